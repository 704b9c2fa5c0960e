//! Constants of the range large deviations and the local-time LDP bounds.

use serde::{Deserialize, Serialize};

use super::special::psi_d;
use crate::error::{Error, Result};
use crate::graph::{dirichlet_energy, Graph};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFunctionParams {
    pub d: u32,
    pub a: f64,
    /// Range scale.
    pub u: f64,
    /// Holder exponent.
    pub p: f64,
}

impl RateFunctionParams {
    pub fn validate(&self) -> Result<()> {
        if !(1..=4).contains(&self.d) {
            return Err(Error::InvalidParameter(format!("dimension {} not in 1..=4", self.d)));
        }
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::InvalidParameter(format!("a = {} must be positive", self.a)));
        }
        if !(self.u > 0.0 && self.u.is_finite()) {
            return Err(Error::InvalidParameter(format!("u = {} must be positive", self.u)));
        }
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(Error::InvalidParameter(format!("p = {} must exceed 1", self.p)));
        }
        if self.a < 1.0 && (1.0 - self.a) * self.p >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "(1 - a) p = {} must be below 1",
                (1.0 - self.a) * self.p
            )));
        }
        Ok(())
    }
}

/// Coefficient of `-u` in `nu`.
fn slope(d: u32, a: f64, p: f64) -> f64 {
    let df = d as f64;
    if a < 1.0 {
        (p - 1.0) / p - 2.0 * df / p * (1.0 - p * (1.0 - a)).ln()
    } else {
        df * a.ln() + 1.0
    }
}

/// Value of `nu` at `u = 0+`.
fn intercept(d: u32, a: f64, p: f64) -> Result<f64> {
    let psi = psi_d(d)?;
    Ok(if a < 1.0 { (p - 1.0) / p * psi } else { psi })
}

/// `nu(d, a, u, p)`:
/// `-u ((p-1)/p - (2d/p) ln(1 - p(1-a))) + ((p-1)/p) psi_d` for `a < 1`,
/// `-u (d ln a + 1) + psi_d` for `a >= 1`.
pub fn nu_rate(params: RateFunctionParams) -> Result<f64> {
    params.validate()?;
    let RateFunctionParams { d, a, u, p } = params;
    Ok(-u * slope(d, a, p) + intercept(d, a, p)?)
}

/// `sup_{u > 0} nu`. The slope is positive on the admissible set, so the
/// supremum is the value at `u = 0+`.
pub fn nu_sup(d: u32, a: f64, p: f64) -> Result<f64> {
    RateFunctionParams { d, a, u: 1.0, p }.validate()?;
    if slope(d, a, p) <= 0.0 {
        return Err(Error::InvalidParameter("nu is not decreasing in u".into()));
    }
    intercept(d, a, p)
}

/// A Holder exponent admissible for `a`: the midpoint of `(1, 1/(1-a))`
/// when `a < 1`, and 2 otherwise.
pub fn admissible_p(a: f64) -> f64 {
    if a < 1.0 {
        0.5 * (1.0 + 1.0 / (1.0 - a))
    } else {
        2.0
    }
}

/// Bounds on the exponential rate of `P(L_t / t near x)` for the directed
/// once-reinforced walk: `(-Dir(x), (1-a) sum_i deg_i x_i - Dir(x))` with
/// `x = l / t`.
pub fn ldp_bounds(g: &Graph, a: f64, l: &[f64], t: f64) -> Result<(f64, f64)> {
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(format!("a = {a} must be positive")));
    }
    if !(t > 0.0) || l.len() != g.num_vertices() {
        return Err(Error::InvalidParameter("need t > 0 and one local time per vertex".into()));
    }
    if l.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::InvalidParameter("local times must be positive".into()));
    }
    let x: Vec<f64> = l.iter().map(|v| v / t).collect();
    let dir = dirichlet_energy(g, &x);
    let spread: f64 = (0..g.num_vertices()).map(|v| g.degree(v) as f64 * x[v]).sum();
    let gain = if a < 1.0 { (1.0 - a) * spread } else { 0.0 };
    Ok((-dir, gain - dir))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nu_values() {
        let psi2 = psi_d(2).unwrap();
        let at_psi = nu_rate(RateFunctionParams { d: 2, a: 1.0, u: psi2, p: 2.0 }).unwrap();
        assert!(at_psi.abs() < 1e-12);
        let u = 0.2;
        let v = nu_rate(RateFunctionParams { d: 2, a: 0.5, u, p: 1.5 }).unwrap();
        let want = -u * (1.0 / 3.0 - (4.0 / 1.5) * 0.25f64.ln()) + psi2 / 3.0;
        assert!((v - want).abs() < 1e-12);
        assert!(nu_rate(RateFunctionParams { d: 2, a: 0.5, u, p: 2.0 }).is_err());
    }

    #[test]
    fn sup_is_positive_and_approached_from_small_u() {
        for i in 1..=9 {
            let a = i as f64 / 10.0;
            let p = admissible_p(a);
            let sup = nu_sup(2, a, p).unwrap();
            assert!(sup > 0.0);
            let near = nu_rate(RateFunctionParams { d: 2, a, u: 1e-9, p }).unwrap();
            assert!((near - sup).abs() < 1e-6);
            let far = nu_rate(RateFunctionParams { d: 2, a, u: 1.0, p }).unwrap();
            assert!(far < near);
        }
    }

    #[test]
    fn ldp_plug_in() {
        let g = Graph::complete(2).unwrap();
        let (lo, hi) = ldp_bounds(&g, 1.0, &[0.3, 0.7], 1.0).unwrap();
        assert_eq!(lo, hi);
        let (lo, _) = ldp_bounds(&g, 0.5, &[2.0, 2.0], 4.0).unwrap();
        assert_eq!(lo, 0.0);
        let (lo, hi) = ldp_bounds(&g, 0.5, &[0.25, 0.75], 1.0).unwrap();
        assert!((hi - lo - 0.5).abs() < 1e-15);
    }
}
