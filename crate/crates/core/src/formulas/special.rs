//! Incomplete gamma, Bessel-type series and the constants built from the
//! first zero of the Bessel function.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::{gamma, ln_gamma};

const SERIES_EPS: f64 = 1e-17;
const MAX_TERMS: usize = 100_000;
const RESCALE: f64 = 1e280;

fn check_gamma_args(s: f64, x: f64) -> Result<()> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameter(format!("incomplete gamma needs s > 0, got {s}")));
    }
    if !x.is_finite() {
        return Err(Error::InvalidParameter(format!("incomplete gamma argument {x} is not finite")));
    }
    Ok(())
}

/// `ln sum_k x^k / (s (s+1) ... (s+k))` for `x >= 0`, rescaled to stay finite.
fn ln_series(s: f64, x: f64) -> Result<f64> {
    let mut term = 1.0 / s;
    let mut sum = term;
    let mut ln_scale = 0.0;
    for k in 1..MAX_TERMS {
        term *= x / (s + k as f64);
        sum += term;
        if sum > RESCALE {
            sum /= RESCALE;
            term /= RESCALE;
            ln_scale += RESCALE.ln();
        }
        if (k as f64) > x - s && term < SERIES_EPS * sum {
            return Ok(sum.ln() + ln_scale);
        }
    }
    Err(Error::NonConvergence {
        what: "incomplete gamma series",
        residual: term / sum,
    })
}

/// Lower incomplete gamma `gamma(s, x) = int_0^x t^(s-1) e^(-t) dt`.
pub fn lower_incomplete_gamma(s: f64, x: f64) -> Result<f64> {
    check_gamma_args(s, x)?;
    if x < 0.0 {
        return Err(Error::InvalidParameter(format!("incomplete gamma needs x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let ln = s * x.ln() - x + ln_series(s, x)?;
    if ln > 709.0 {
        return Err(Error::Overflow("lower incomplete gamma"));
    }
    Ok(ln.exp())
}

/// `gamma(s, x) / x^s = int_0^1 u^(s-1) e^(-x u) du`, also for negative `x`.
///
/// This stays finite as `x -> 0`, where it tends to `1/s`.
pub fn scaled_lower_gamma(s: f64, x: f64) -> Result<f64> {
    check_gamma_args(s, x)?;
    if x >= 0.0 {
        return Ok((ln_series(s, x)? - x).exp());
    }
    // sum_k (-x)^k / (k! (s + k)), all terms positive
    let y = -x;
    let mut pow = 1.0;
    let mut sum = 1.0 / s;
    let mut ln_scale = 0.0;
    for k in 1..MAX_TERMS {
        pow *= y / k as f64;
        let term = pow / (s + k as f64);
        sum += term;
        if sum > RESCALE {
            sum /= RESCALE;
            pow /= RESCALE;
            ln_scale += RESCALE.ln();
        }
        if (k as f64) > y && term < SERIES_EPS * sum {
            let ln = sum.ln() + ln_scale;
            if ln > 709.0 {
                return Err(Error::Overflow("scaled incomplete gamma"));
            }
            return Ok(ln.exp());
        }
    }
    Err(Error::NonConvergence {
        what: "scaled incomplete gamma series",
        residual: f64::NAN,
    })
}

/// `J_{v,w}(z) = sum_k (z/2)^(2k+v+w) / (Gamma(k+v+1) Gamma(k+w+1))`.
///
/// `J_{v,0}` is the modified Bessel function `I_v`.
pub fn bessel_jvw(v: u32, w: u32, z: f64) -> f64 {
    assert!(z >= 0.0, "J_(v,w) needs z >= 0");
    let (vf, wf) = (v as f64, w as f64);
    if z == 0.0 {
        return if v + w == 0 { 1.0 } else { 0.0 };
    }
    let h = z / 2.0;
    let mut term = ((vf + wf) * h.ln() - ln_gamma(vf + 1.0) - ln_gamma(wf + 1.0)).exp();
    let mut sum = term;
    let h2 = h * h;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= h2 / ((kf + vf + 1.0) * (kf + wf + 1.0));
        sum += term;
        if term <= SERIES_EPS * sum {
            break;
        }
    }
    sum
}

/// Bessel function of the first kind `J_nu(x)` by its power series; meant
/// for moderate `x` (below about 20).
pub fn bessel_j(nu: f64, x: f64) -> f64 {
    assert!(x > 0.0 || (x == 0.0 && nu >= 0.0), "J_nu needs x > 0");
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    let h = x / 2.0;
    let lead = nu * h.ln() - ln_gamma(nu + 1.0);
    let mut term = if nu + 1.0 > 0.0 {
        lead.exp()
    } else {
        h.powf(nu) / gamma(nu + 1.0)
    };
    let mut sum = term;
    for k in 1..500 {
        let kf = k as f64;
        term *= -h * h / (kf * (kf + nu));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) && kf > h {
            break;
        }
    }
    sum
}

/// First positive zero of `J_nu`, by bracketing and bisection.
pub fn first_bessel_zero(nu: f64) -> Result<f64> {
    if nu < -0.5 {
        return Err(Error::InvalidParameter(format!("order {nu} below -1/2")));
    }
    let step = 0.05;
    let mut lo = step;
    let mut f_lo = bessel_j(nu, lo);
    let mut hi = lo;
    while hi < 20.0 {
        hi += step;
        let f_hi = bessel_j(nu, hi);
        if f_lo.signum() != f_hi.signum() {
            break;
        }
        lo = hi;
        f_lo = f_hi;
    }
    if hi >= 20.0 {
        return Err(Error::NonConvergence {
            what: "Bessel zero bracketing",
            residual: f_lo,
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = bessel_j(nu, mid);
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn check_dimension(d: u32) -> Result<()> {
    if (1..=4).contains(&d) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("dimension {d} not in 1..=4")))
    }
}

/// Volume of the unit ball in `R^d`.
pub fn omega_d(d: u32) -> Result<f64> {
    check_dimension(d)?;
    let h = d as f64 / 2.0;
    Ok(PI.powf(h) / gamma(h + 1.0))
}

/// Principal Dirichlet eigenvalue of `-Laplacian/2` on the unit ball:
/// `j^2 / 2` with `j` the first zero of `J_{d/2 - 1}`.
pub fn lambda_d(d: u32) -> Result<f64> {
    check_dimension(d)?;
    let j = first_bessel_zero(d as f64 / 2.0 - 1.0)?;
    Ok(j * j / 2.0)
}

/// `psi_d = ((d+2)/2) (2 lambda_d / d) omega_d^(2/(2+d))`.
pub fn psi_d(d: u32) -> Result<f64> {
    let df = d as f64;
    Ok((df + 2.0) / 2.0 * (2.0 * lambda_d(d)? / df) * omega_d(d)?.powf(2.0 / (2.0 + df)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::integrate;

    #[test]
    fn gamma_closed_forms() {
        let e1 = (-1.0f64).exp();
        assert!((lower_incomplete_gamma(1.0, 1.0).unwrap() - (1.0 - e1)).abs() < 1e-15);
        assert!((lower_incomplete_gamma(2.0, 1.0).unwrap() - (1.0 - 2.0 * e1)).abs() < 1e-15);
        assert_eq!(lower_incomplete_gamma(3.5, 0.0).unwrap(), 0.0);
        assert!(lower_incomplete_gamma(0.0, 1.0).is_err());
        assert!(matches!(lower_incomplete_gamma(200.0, 1000.0), Err(Error::Overflow(_))));
    }

    #[test]
    fn gamma_against_quadrature() {
        for s in [0.5, 1.0, 1.5, 2.5, 4.0, 6.0] {
            for x in [0.01, 0.5, 2.0, 7.0, 20.0] {
                let series = lower_incomplete_gamma(s, x).unwrap();
                // t = u^2 removes the endpoint singularity for s < 1
                let quad = integrate(
                    |u: f64| 2.0 * u.powf(2.0 * s - 1.0) * (-u * u).exp(),
                    0.0,
                    x.sqrt(),
                    1e-16,
                    1e-14,
                )
                .unwrap();
                assert!((series - quad).abs() <= 1e-12 * quad.max(1e-300), "s={s} x={x}");
            }
        }
    }

    #[test]
    fn scaled_gamma_limits_and_sign() {
        assert!((scaled_lower_gamma(3.0, 0.0).unwrap() - 1.0 / 3.0).abs() < 1e-16);
        for x in [-2.0, -0.3, 0.4, 3.0] {
            let quad = integrate(|u: f64| u * u * (-x * u).exp(), 0.0, 1.0, 1e-16, 1e-14).unwrap();
            assert!((scaled_lower_gamma(3.0, x).unwrap() - quad).abs() < 1e-13);
        }
    }

    #[test]
    fn jvw_values() {
        assert_eq!(bessel_jvw(0, 0, 0.0), 1.0);
        assert!((bessel_jvw(1, 0, 2.0) - 1.590_636_854_637_329).abs() < 1e-14);
        // symmetric in v and w
        assert!((bessel_jvw(2, 5, 3.0) - bessel_jvw(5, 2, 3.0)).abs() < 1e-15);
        // J_{1,1}(2) = sum 1/(k! (k+2)!) ... truncated sums agree
        let partial = |n: usize| -> f64 {
            (0..n)
                .map(|k| 1.0 / (gamma(k as f64 + 2.0) * gamma(k as f64 + 2.0)))
                .sum()
        };
        assert!((partial(30) - partial(60)).abs() < 1e-15);
        assert!((bessel_jvw(1, 1, 2.0) - partial(60)).abs() < 1e-14);
    }

    #[test]
    fn bessel_zeros_and_constants() {
        let j0 = first_bessel_zero(0.0).unwrap();
        assert!((j0 - 2.404_825_557_695_773).abs() < 1e-12);
        assert!((first_bessel_zero(-0.5).unwrap() - PI / 2.0).abs() < 1e-12);
        assert!((first_bessel_zero(0.5).unwrap() - PI).abs() < 1e-12);
        assert!((first_bessel_zero(1.0).unwrap() - 3.831_705_970_207_512).abs() < 1e-12);
        assert!((omega_d(2).unwrap() - PI).abs() < 1e-15);
        assert!((omega_d(3).unwrap() - 4.0 * PI / 3.0).abs() < 1e-13);
        assert!((lambda_d(2).unwrap() - 2.891_592_981_473_392).abs() < 1e-11);
        let psi2 = psi_d(2).unwrap();
        assert!((psi2 - 2.0 * (j0 * j0 / 2.0) * PI.sqrt()).abs() < 1e-12);
        assert!(psi_d(5).is_err());
    }
}
