//! Sums of independent exponentials with distinct rates `f(1), f(2), ...`.
//!
//! The closed forms are partial-fraction expansions. When the expansion
//! cancels badly (close rates, long chains) the same quantity is computed by
//! uniformization of the pure-birth chain, which sums positive terms only.

use crate::error::{Error, Result};
use crate::graph::{CrossingVector, Graph};
use crate::numeric::ln_factorial;
use crate::sim::Reinforcement;

const TIE_TOL: f64 = 1e-14;
// Largest tolerated ratio sum|terms| / |sum| in a partial-fraction expansion.
const MAX_CANCELLATION: f64 = 1e4;

/// Rejects repeated rates, for which the partial fractions are undefined.
pub fn check_distinct(rates: &[f64]) -> Result<()> {
    for i in 0..rates.len() {
        if !(rates[i] > 0.0 && rates[i].is_finite()) {
            return Err(Error::InvalidParameter(format!("rate f({}) = {} is not positive", i + 1, rates[i])));
        }
        for j in i + 1..rates.len() {
            let scale = rates[i].abs().max(rates[j].abs());
            if (rates[i] - rates[j]).abs() <= TIE_TOL * scale {
                return Err(Error::DegenerateRates {
                    i: i as u64 + 1,
                    j: j as u64 + 1,
                    value: rates[i],
                });
            }
        }
    }
    Ok(())
}

/// `Lambda(m, i) = prod_{j = 1..m, j != i} 1 / (f(j) - f(i))`, with `m = rates.len()`
/// and 1-based `i`.
pub fn lambda_coeff(rates: &[f64], i: usize) -> f64 {
    let fi = rates[i - 1];
    rates
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i - 1)
        .map(|(_, &fj)| 1.0 / (fj - fi))
        .product()
}

/// `Theta(f, k) = prod_{(i,j)} prod_{s=1}^{k_ij} f(s)`.
pub fn theta(g: &Graph, f: &Reinforcement, k: &CrossingVector) -> f64 {
    g.oriented_edges()
        .map(|o| (1..=k.get(o)).map(|s| f.eval(s)).product::<f64>())
        .product()
}

/// `P(N(l) = k)` for the pure-birth counting process whose `j`-th arrival
/// comes at rate `rates[j-1]`, by uniformization. Needs `rates.len() >= k + 1`.
pub fn birth_count_prob(rates: &[f64], k: usize, l: f64) -> f64 {
    assert!(rates.len() > k, "need rates up to f(k+1)");
    if l == 0.0 {
        return (k == 0) as u8 as f64;
    }
    let r = &rates[..=k];
    let big = r.iter().copied().fold(0.0, f64::max);
    let lam = big * l;
    let move_prob: Vec<f64> = r.iter().map(|x| x / big).collect();
    let mut p = vec![0.0; k + 1];
    p[0] = 1.0;
    let mut next = vec![0.0; k + 1];
    let mut acc = 0.0;
    let mut m: usize = 0;
    let give_up = lam + 40.0 * lam.sqrt() + k as f64 + 100.0;
    loop {
        let ln_w = -lam + m as f64 * lam.ln() - ln_factorial(m as u64);
        let w = ln_w.exp();
        acc += w * p[k];
        if m >= k && m as f64 > lam {
            let ratio = lam / (m as f64 + 1.0);
            let tail = w * ratio / (1.0 - ratio);
            if (acc > 0.0 && tail < 1e-17 * acc) || m as f64 > give_up {
                return acc;
            }
        }
        next[0] = p[0] * (1.0 - move_prob[0]);
        for j in 1..=k {
            next[j] = p[j] * (1.0 - move_prob[j]) + p[j - 1] * move_prob[j - 1];
        }
        std::mem::swap(&mut p, &mut next);
        m += 1;
    }
}

/// `sum_i Lambda(m, i) e^{-f(i) l}` over `m = rates.len()` distinct rates.
pub fn exp_partial_fractions(rates: &[f64], l: f64) -> Result<f64> {
    check_distinct(rates)?;
    let m = rates.len();
    if m == 0 {
        return Err(Error::InvalidParameter("need at least one rate".into()));
    }
    let terms: Vec<f64> = (1..=m)
        .map(|i| lambda_coeff(rates, i) * (-rates[i - 1] * l).exp())
        .collect();
    let sum: f64 = terms.iter().sum();
    let magnitude: f64 = terms.iter().map(|t| t.abs()).sum();
    if sum > 0.0 && magnitude <= MAX_CANCELLATION * sum && magnitude.is_finite() {
        return Ok(sum);
    }
    // equals P(N(l) = m - 1) / prod_{j < m} f(j)
    let p = birth_count_prob(rates, m - 1, l);
    let ln_prod: f64 = rates[..m - 1].iter().map(|x| x.ln()).sum();
    Ok(p * (-ln_prod).exp())
}

/// Density at `t` of the sum of independent Exp(rates[i]) variables.
pub fn hypoexp_density_rates(rates: &[f64], t: f64) -> Result<f64> {
    if t < 0.0 {
        return Ok(0.0);
    }
    let prod: f64 = rates.iter().product();
    Ok(prod * exp_partial_fractions(rates, t)?)
}

/// Density of the `n`-th arrival time of the counting process with rates `f`.
pub fn hypoexp_density(f: &Reinforcement, n: u64, t: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("hypoexponential needs n >= 1".into()));
    }
    hypoexp_density_rates(&f.values(n), t)
}

/// `P(exactly n arrivals in [0, l])` with `rates = f(1..=n+1)`.
pub fn interval_prob_rates(rates: &[f64], l: f64) -> Result<f64> {
    check_distinct(rates)?;
    let n = rates.len() - 1;
    let last = rates[n];
    if n == 0 {
        return Ok((-last * l).exp());
    }
    let prod: f64 = rates[..n].iter().product();
    let terms: Vec<f64> = (1..=n)
        .map(|i| lambda_coeff(rates, i) * ((-rates[i - 1] * l).exp() - (-last * l).exp()))
        .collect();
    let sum: f64 = terms.iter().sum();
    let magnitude: f64 = terms.iter().map(|t| t.abs()).sum();
    if sum > 0.0 && magnitude <= MAX_CANCELLATION * sum && magnitude.is_finite() {
        return Ok(prod * sum);
    }
    Ok(birth_count_prob(rates, n, l))
}

pub fn interval_prob(f: &Reinforcement, n: u64, l: f64) -> Result<f64> {
    interval_prob_rates(&f.values(n + 1), l)
}
