//! Empirical large-deviation rates.
//!
//! Occupation events `l_v(t) / t in (lo, hi)` become exponentially rare in
//! `t`, so they are estimated by importance sampling: every rate `i -> j` is
//! multiplied by `sqrt(x_j / x_i)`, which makes `x` the typical occupation
//! profile, and each path carries its likelihood ratio.

use serde::{Deserialize, Serialize};

use super::report::Verdict;
use super::stats::Tally;
use crate::error::{Error, Result};
use crate::formulas::{ldp_bounds, nu_rate, RateFunctionParams};
use crate::graph::Graph;
use crate::sim::rng::run_replicas;
use crate::sim::{extract_observables, simulate_tilted, simulate_with_rng, ProcessSpec, SimOptions, StopRule};

/// `{l_vertex / t in (lo, hi)}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OccupationWindow {
    pub vertex: usize,
    pub lo: f64,
    pub hi: f64,
}

impl OccupationWindow {
    fn validate(&self, g: &Graph) -> Result<()> {
        if self.vertex >= g.num_vertices() || !(0.0 <= self.lo && self.lo < self.hi && self.hi <= 1.0) {
            return Err(Error::InvalidParameter("occupation window must be a vertex and 0 <= lo < hi <= 1".into()));
        }
        Ok(())
    }

    /// Profile in the closure of the window closest to uniform: the rate
    /// bounds are evaluated there.
    pub fn nearest_to_uniform(&self, g: &Graph) -> Vec<f64> {
        let n = g.num_vertices() as f64;
        self.profile_with(g, (1.0 / n).clamp(self.lo, self.hi))
    }

    /// Profile used for the tilt: the window midpoint at `vertex`.
    pub fn center(&self, g: &Graph) -> Vec<f64> {
        self.profile_with(g, 0.5 * (self.lo + self.hi))
    }

    fn profile_with(&self, g: &Graph, xv: f64) -> Vec<f64> {
        let n = g.num_vertices();
        let rest = if n > 1 { (1.0 - xv) / (n - 1) as f64 } else { 0.0 };
        (0..n).map(|v| if v == self.vertex { xv } else { rest }).collect()
    }

    pub fn contains(&self, l: &[f64], t: f64) -> bool {
        let x = l[self.vertex] / t;
        self.lo < x && x < self.hi
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LdpPoint {
    pub t: f64,
    pub prob: f64,
    pub prob_se: f64,
    /// `ln(prob) / t`.
    pub rate: f64,
    pub rate_se: f64,
    pub lower: f64,
    pub upper: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LdpReport {
    pub a: f64,
    pub window: OccupationWindow,
    pub slack: f64,
    pub points: Vec<LdpPoint>,
    pub verdict: Verdict,
}

/// Tilt factor per oriented edge for target profile `x`.
pub fn tilt_for_profile(g: &Graph, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != g.num_vertices() || x.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidParameter("tilt profile must be positive on every vertex".into()));
    }
    Ok(g.oriented_edges()
        .map(|o| {
            let (i, j) = g.endpoints(o);
            (x[j] / x[i]).sqrt()
        })
        .collect())
}

/// Importance-sampled `P(l_v(t)/t in window)` for the directed
/// once-reinforced walk with parameter `a`.
pub fn occupation_probability(
    g: &Graph,
    a: f64,
    window: OccupationWindow,
    t: f64,
    replicas: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    window.validate(g)?;
    let spec = ProcessSpec::Dorrw { a };
    let tilt = tilt_for_profile(g, &window.center(g))?;
    let weights = run_replicas(seed, replicas, |_, rng| -> Result<f64> {
        let (traj, log_lr) = simulate_tilted(g, &spec, StopRule::Time(t), &tilt, rng, SimOptions::default())?;
        let obs = extract_observables(g, &traj, t)?;
        Ok(if window.contains(&obs.local_times, t) { log_lr.exp() } else { 0.0 })
    });
    let tally: Tally = weights.into_iter().collect::<Result<Vec<_>>>()?.into_iter().collect();
    Ok((tally.mean(), tally.se()))
}

/// Checks `ln P / t` against the rate bounds on a grid of times.
pub fn ldp_empirical_check(
    g: &Graph,
    a: f64,
    window: OccupationWindow,
    t_grid: &[f64],
    replicas: u64,
    seed: u64,
    slack: f64,
) -> Result<LdpReport> {
    window.validate(g)?;
    let x = window.nearest_to_uniform(g);
    let mut points = Vec::with_capacity(t_grid.len());
    for (i, &t) in t_grid.iter().enumerate() {
        let l: Vec<f64> = x.iter().map(|v| v * t).collect();
        let (lower, upper) = ldp_bounds(g, a, &l, t)?;
        let (prob, prob_se) = occupation_probability(g, a, window, t, replicas, seed.wrapping_add(i as u64))?;
        if !(prob > 0.0) {
            return Err(Error::TooFewSamples { got: 0, need: 1 });
        }
        let rate = prob.ln() / t;
        let rate_se = prob_se / prob / t;
        let verdict = Verdict::from_bool(rate >= lower - slack && rate <= upper + slack);
        points.push(LdpPoint {
            t,
            prob,
            prob_se,
            rate,
            rate_se,
            lower,
            upper,
            verdict,
        });
    }
    let verdict = points.iter().fold(Verdict::Pass, |v, p| v.and(p.verdict));
    Ok(LdpReport {
        a,
        window,
        slack,
        points,
        verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RangeTrendPoint {
    pub n: u64,
    /// `u N^{d/(d+2)}`.
    pub threshold: f64,
    pub prob: f64,
    pub hits: u64,
    /// `-ln(prob) / N^{d/(d+2)} - nu`; `None` without hits.
    pub residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RangeTrend {
    pub d: u32,
    pub a: f64,
    pub u: f64,
    pub p: f64,
    pub nu: f64,
    pub points: Vec<RangeTrendPoint>,
}

/// Frequency of `|range after N jumps| <= u N^{d/(d+2)}` for the
/// once-reinforced walk on `Z^d`, with the gap to the exponential bound.
///
/// The lattice is replaced by a ball just large enough that the event is
/// unaffected by its boundary.
pub fn range_trend(params: RateFunctionParams, n_grid: &[u64], replicas: u64, seed: u64) -> Result<RangeTrend> {
    let nu = nu_rate(params)?;
    let RateFunctionParams { d, a, u, p } = params;
    let spec = ProcessSpec::Orrw { a };
    let mut points = Vec::with_capacity(n_grid.len());
    for (i, &n) in n_grid.iter().enumerate() {
        let scale = (n as f64).powf(d as f64 / (d as f64 + 2.0));
        let threshold = u * scale;
        let g = Graph::ball(d as usize, threshold.floor() as usize + 2)?;
        let hits = run_replicas(seed.wrapping_add(i as u64), replicas, |_, rng| -> Result<bool> {
            let traj = simulate_with_rng(&g, &spec, StopRule::Jumps(n), rng, SimOptions::default())?;
            let mut seen = vec![false; g.num_vertices()];
            seen[traj.root] = true;
            let mut range = 1usize;
            for j in &traj.jumps {
                if !seen[j.to] {
                    seen[j.to] = true;
                    range += 1;
                }
            }
            Ok(range as f64 <= threshold)
        });
        let hits = hits.into_iter().collect::<Result<Vec<_>>>()?.into_iter().filter(|&h| h).count() as u64;
        let prob = hits as f64 / replicas as f64;
        points.push(RangeTrendPoint {
            n,
            threshold,
            prob,
            hits,
            residual: (hits > 0).then(|| -prob.ln() / scale - nu),
        });
    }
    Ok(RangeTrend { d, a, u, p, nu, points })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tilt_makes_profile_stationary() {
        let g = Graph::complete(3).unwrap();
        let x = [0.5, 0.3, 0.2];
        let tilt = tilt_for_profile(&g, &x).unwrap();
        // detailed balance of the tilted rates with respect to x
        for o in g.oriented_edges() {
            let (i, j) = g.endpoints(o);
            let back = g.oriented(j, i).unwrap();
            assert!((x[i] * tilt[o.index()] - x[j] * tilt[back.index()]).abs() < 1e-15);
        }
    }

    #[test]
    fn typical_window_has_rate_near_zero() {
        let g = Graph::complete(2).unwrap();
        let w = OccupationWindow { vertex: 0, lo: 0.4, hi: 0.6 };
        let (p, _) = occupation_probability(&g, 1.0, w, 20.0, 4000, 3).unwrap();
        assert!(p > 0.5, "{p}");
    }

    #[test]
    fn importance_sampling_matches_plain_frequency() {
        let g = Graph::complete(2).unwrap();
        let w = OccupationWindow { vertex: 0, lo: 0.7, hi: 0.8 };
        let t = 10.0;
        let (p, se) = occupation_probability(&g, 1.0, w, t, 20_000, 1).unwrap();
        let spec = ProcessSpec::Dorrw { a: 1.0 };
        let plain = run_replicas(2, 20_000, |_, rng| {
            let traj = simulate_with_rng(&g, &spec, StopRule::Time(t), rng, SimOptions::default()).unwrap();
            w.contains(&extract_observables(&g, &traj, t).unwrap().local_times, t) as u8 as f64
        });
        let q: Tally = plain.into_iter().collect();
        let z = (p - q.mean()) / (se * se + q.se() * q.se()).sqrt();
        assert!(z.abs() < 4.0, "is {p} plain {} z {z}", q.mean());
    }

    #[test]
    fn range_trend_reports_residuals() {
        let params = RateFunctionParams { d: 2, a: 0.5, u: 1.5, p: 1.5 };
        let r = range_trend(params, &[16, 36], 2000, 4).unwrap();
        assert_eq!(r.points.len(), 2);
        assert!(r.points[0].hits > 0);
    }
}
