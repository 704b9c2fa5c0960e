//! Per-edge point processes: how many times an oriented edge fires while
//! its source vertex accumulates local time `l`.

use num_complex::Complex64;

use super::hypoexp::{hypoexp_density, interval_prob};
use super::special::scaled_lower_gamma;
use crate::error::{Error, Result};
use crate::graph::{Graph, OrientedEdge};
use crate::numeric::{ln_factorial, ln_gamma};
use crate::sim::{ProcessSpec, Reinforcement};

/// Counting law of an edge clock in the local time of its source vertex.
pub trait PointProcess {
    /// `P(n, l)`: probability of exactly `n` arrivals in `[0, l]`.
    fn count_prob(&self, n: u64, l: f64) -> Result<f64>;
    /// `P*(n, l)`: density of the `n`-th arrival at `l` (zero for `n = 0`).
    fn arrival_density(&self, n: u64, l: f64) -> Result<f64>;
    /// `sum_n P(n, l) w^n`.
    fn transform(&self, l: f64, w: Complex64) -> Result<Complex64>;
    /// `sum_n P*(n, l) w^n`.
    fn transform_star(&self, l: f64, w: Complex64) -> Result<Complex64>;
}

#[derive(Clone, Debug, PartialEq)]
pub enum Clock {
    /// Constant rate.
    Poisson { rate: f64 },
    /// First arrival at rate `a`, later arrivals at rate 1.
    OnceReinforced { a: f64 },
    /// `j`-th arrival at rate `f(j)`.
    Reinforced { f: Reinforcement },
}

impl Clock {
    /// The clock of oriented edge `o` under a directed process.
    pub fn for_edge(spec: &ProcessSpec, o: OrientedEdge) -> Result<Clock> {
        Ok(match spec {
            ProcessSpec::Orrw { a } if *a == 1.0 => Clock::Poisson { rate: 1.0 },
            ProcessSpec::Orrw { .. } => {
                return Err(Error::Unsupported(
                    "undirected reinforcement has no per-edge clock".into(),
                ))
            }
            ProcessSpec::Dorrw { a } => Clock::OnceReinforced { a: *a },
            ProcessSpec::Derrw { f } => match f {
                Reinforcement::Constant { c } => Clock::Poisson { rate: *c },
                Reinforcement::Once { a } => Clock::OnceReinforced { a: *a },
                other => Clock::Reinforced { f: other.clone() },
            },
            ProcessSpec::Rwre { omega } => Clock::Poisson {
                rate: omega[o.index()],
            },
        })
    }

    /// One clock per oriented edge of `g`.
    pub fn for_graph(g: &Graph, spec: &ProcessSpec) -> Result<Vec<Clock>> {
        spec.validate(g)?;
        g.oriented_edges().map(|o| Clock::for_edge(spec, o)).collect()
    }

    pub fn uniform(g: &Graph, clock: Clock) -> Vec<Clock> {
        vec![clock; g.num_oriented()]
    }
}

fn poisson_ln_pmf(n: u64, m: f64) -> f64 {
    if m == 0.0 {
        return if n == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -m + n as f64 * m.ln() - ln_factorial(n)
}

/// `(P, P*)` of the once-reinforced clock.
///
/// `P(n) = a e^{-a l} gamma(n, (1-a) l) / ((1-a)^n (n-1)!)` and
/// `P*(n) = P(n-1)` for `n >= 2`, evaluated through `gamma(s,x)/x^s` so
/// that `a = 1` reduces to the Poisson law without a special case.
fn once_reinforced(a: f64, n: u64, l: f64) -> Result<(f64, f64)> {
    let ln_head = a.ln() - a * l;
    let count = |n: u64| -> Result<f64> {
        if n == 0 {
            return Ok((-a * l).exp());
        }
        if l == 0.0 {
            return Ok(0.0);
        }
        let g = scaled_lower_gamma(n as f64, (1.0 - a) * l)?;
        Ok((ln_head + n as f64 * l.ln() - ln_gamma(n as f64) + g.ln()).exp())
    };
    let p = count(n)?;
    let p_star = match n {
        0 => 0.0,
        1 => ln_head.exp(),
        _ => count(n - 1)?,
    };
    Ok((p, p_star))
}

/// `(P, P*)` for the once-reinforced clock with `a` in `(0, 1]`.
pub fn orrw_count_prob(n: u64, a: f64, l: f64) -> Result<(f64, f64)> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::InvalidParameter(format!("a = {a} outside (0, 1]")));
    }
    if !(l >= 0.0) {
        return Err(Error::InvalidParameter(format!("local time {l} is negative")));
    }
    once_reinforced(a, n, l)
}

/// `F(n) = E[l^(n+D) / (n+D)!]` with `P(D = d) = a (1-a)^d`.
pub fn geometric_mixture(n: u64, a: f64, l: f64) -> f64 {
    if l == 0.0 {
        return if n == 0 { a } else { 0.0 };
    }
    let mut sum = 0.0;
    let ln_l = l.ln();
    let ln_q = (1.0 - a).ln();
    for d in 0..100_000u64 {
        let term = (a.ln() + d as f64 * ln_q + (n + d) as f64 * ln_l - ln_factorial(n + d)).exp();
        sum += term;
        if (d as f64) > l && term < 1e-18 * sum {
            break;
        }
        if a == 1.0 {
            break;
        }
    }
    sum
}

/// Both sides of `P(n) = E[e^{-l} l^(n+D) / (n+D)!]` for `n >= 1`.
pub fn geometric_mixture_identity_check(n: u64, a: f64, l: f64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::InvalidParameter("the identity holds for n >= 1".into()));
    }
    let (lhs, _) = orrw_count_prob(n, a, l)?;
    Ok((lhs, (-l).exp() * geometric_mixture(n, a, l)))
}

const SERIES_TAIL: f64 = 1e-18;

impl Clock {
    fn series_transform(&self, l: f64, w: Complex64, star: bool) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut mass = 0.0;
        let mut wn = Complex64::new(1.0, 0.0);
        for n in 0..20_000u64 {
            let p = self.count_prob(n, l)?;
            mass += p;
            let coeff = if star { self.arrival_density(n, l)? } else { p };
            acc += coeff * wn;
            if n > 2 && p < SERIES_TAIL && coeff.abs() < SERIES_TAIL * acc.norm().max(1e-300) {
                return Ok(acc);
            }
            wn *= w;
        }
        Err(Error::NonConvergence {
            what: "clock transform series",
            residual: 1.0 - mass,
        })
    }
}

impl PointProcess for Clock {
    fn count_prob(&self, n: u64, l: f64) -> Result<f64> {
        match self {
            Clock::Poisson { rate } => Ok(poisson_ln_pmf(n, rate * l).exp()),
            Clock::OnceReinforced { a } => Ok(once_reinforced(*a, n, l)?.0),
            Clock::Reinforced { f } => interval_prob(f, n, l),
        }
    }

    fn arrival_density(&self, n: u64, l: f64) -> Result<f64> {
        if n == 0 {
            return Ok(0.0);
        }
        match self {
            Clock::Poisson { rate } => Ok(rate * poisson_ln_pmf(n - 1, rate * l).exp()),
            Clock::OnceReinforced { a } => Ok(once_reinforced(*a, n, l)?.1),
            Clock::Reinforced { f } => hypoexp_density(f, n, l),
        }
    }

    fn transform(&self, l: f64, w: Complex64) -> Result<Complex64> {
        match self {
            Clock::Poisson { rate } => Ok((rate * l * (w - 1.0)).exp()),
            Clock::OnceReinforced { a } => {
                let den = w - (1.0 - a);
                if den.norm() < 1e-6 {
                    return self.series_transform(l, w, false);
                }
                let num = (1.0 - a) * (w - 1.0) * (-a * l).exp() + a * w * (l * (w - 1.0)).exp();
                Ok(num / den)
            }
            Clock::Reinforced { .. } => self.series_transform(l, w, false),
        }
    }

    fn transform_star(&self, l: f64, w: Complex64) -> Result<Complex64> {
        match self {
            Clock::Poisson { rate } => Ok(rate * w * (rate * l * (w - 1.0)).exp()),
            Clock::OnceReinforced { a } => {
                let den = w - (1.0 - a);
                if den.norm() < 1e-6 {
                    return self.series_transform(l, w, true);
                }
                let num = w * (l * (w - 1.0)).exp() - (1.0 - a) * (-a * l).exp();
                Ok(a * w * num / den)
            }
            Clock::Reinforced { .. } => self.series_transform(l, w, true),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::integrate;
    use std::f64::consts::PI;

    #[test]
    fn once_reinforced_count_values() {
        let (p, _) = orrw_count_prob(1, 0.5, 1.0).unwrap();
        let exact = (-0.5f64).exp() - (-1.0f64).exp();
        assert!((p - exact).abs() < 1e-15);
        let quad = integrate(|x: f64| 0.5 * (-0.5 * x).exp() * (-(1.0 - x)).exp(), 0.0, 1.0, 1e-16, 1e-14).unwrap();
        assert!((quad - exact).abs() < 1e-14);
        assert!((orrw_count_prob(0, 0.3, 2.0).unwrap().0 - (-0.6f64).exp()).abs() < 1e-16);
        assert!(orrw_count_prob(1, 1.5, 1.0).is_err());
    }

    #[test]
    fn once_reinforced_tends_to_poisson() {
        let l = 1.7;
        for n in 0..8 {
            let (p, ps) = orrw_count_prob(n, 1.0 - 1e-6, l).unwrap();
            let poisson = Clock::Poisson { rate: 1.0 };
            assert!((p - poisson.count_prob(n, l).unwrap()).abs() < 1e-4);
            assert!((ps - poisson.arrival_density(n, l).unwrap()).abs() < 1e-4);
            let (p1, _) = orrw_count_prob(n, 1.0, l).unwrap();
            assert!((p1 - poisson.count_prob(n, l).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn mixture_identity() {
        let (l, r) = geometric_mixture_identity_check(1, 0.5, 1.0).unwrap();
        assert!((l - 0.238_651_218_541_101_4).abs() < 1e-12);
        assert!((l - r).abs() < 1e-14);
        let (l, r) = geometric_mixture_identity_check(3, 0.9, 2.0).unwrap();
        assert!((l - r).abs() < 1e-10 * l);
        assert_eq!(geometric_mixture_identity_check(2, 0.4, 0.0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn counts_sum_to_one_and_match_densities() {
        let clocks = [
            Clock::Poisson { rate: 1.3 },
            Clock::OnceReinforced { a: 0.3 },
            Clock::OnceReinforced { a: 1.8 },
            Clock::Reinforced {
                f: Reinforcement::Affine { intercept: 0.5, slope: 1.0 },
            },
        ];
        for c in &clocks {
            let total: f64 = (0..200).map(|n| c.count_prob(n, 1.2).unwrap()).sum();
            assert!((total - 1.0).abs() < 1e-11, "{c:?}: {total}");
            // d/dl P(N(l) <= n) = -P*(n+1)
            for n in 0..4 {
                let cdf = |l: f64| (0..=n).map(|m| c.count_prob(m, l).unwrap()).sum::<f64>();
                let h = 1e-5;
                let deriv = (cdf(1.2 + h) - cdf(1.2 - h)) / (2.0 * h);
                assert!((deriv + c.arrival_density(n + 1, 1.2).unwrap()).abs() < 1e-7, "{c:?} n={n}");
            }
        }
    }

    #[test]
    fn closed_transforms_match_series() {
        for c in [Clock::Poisson { rate: 0.7 }, Clock::OnceReinforced { a: 0.4 }, Clock::OnceReinforced { a: 1.5 }] {
            for x in [0.0, 0.13, 0.5, 0.77] {
                let w = Complex64::from_polar(1.0, 2.0 * PI * x);
                let closed = c.transform(0.9, w).unwrap();
                let series = c.series_transform(0.9, w, false).unwrap();
                assert!((closed - series).norm() < 1e-13, "{c:?} x={x}");
                let closed = c.transform_star(0.9, w).unwrap();
                let series = c.series_transform(0.9, w, true).unwrap();
                assert!((closed - series).norm() < 1e-13, "{c:?} x={x}");
            }
        }
    }
}
