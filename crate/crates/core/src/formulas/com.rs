//! Likelihood ratio of the once-reinforced walk against the rate-one walk
//! along a jump path.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::sim::{extract_observables, Trajectory};

fn check(traj: &Trajectory, n: usize, a: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidParameter(format!("a = {a} must be positive")));
    }
    if n > traj.num_jumps() {
        return Err(Error::InvalidParameter(format!(
            "trajectory has {} jumps, asked for {n}",
            traj.num_jumps()
        )));
    }
    Ok(())
}

/// `(1-a) sum_e T_e(tau_n) + ln(a) |C(tau_n)|`, where `T_e` is the time spent
/// next to `e` before its first crossing and `C` the set of crossed edges.
pub fn com_log_weight(g: &Graph, traj: &Trajectory, n: usize, a: f64) -> Result<f64> {
    check(traj, n, a)?;
    let obs = extract_observables(g, &traj.prefix(n), traj.jump_time(n))?;
    Ok((1.0 - a) * obs.total_exposure() + a.ln() * obs.edge_range.len() as f64)
}

/// The same quantity from the path decomposition: `m ln(a)` plus
/// `(1-a) sum_k b_k (tau_{k+1} - tau_k)`, with `b_k` the number of uncrossed
/// edges at the position after `k` jumps and `m` the number of first crossings.
pub fn com_log_weight_by_steps(g: &Graph, traj: &Trajectory, n: usize, a: f64) -> Result<f64> {
    check(traj, n, a)?;
    let mut crossed = vec![false; g.num_edges()];
    let mut fresh_crossings = 0u64;
    let mut exponent = 0.0;
    let mut prev = 0.0;
    for j in &traj.jumps[..n] {
        let fresh = g.out_edges(j.from).iter().filter(|&&(_, o)| !crossed[o.edge()]).count();
        exponent += fresh as f64 * (j.time - prev);
        prev = j.time;
        if !crossed[j.edge.edge()] {
            crossed[j.edge.edge()] = true;
            fresh_crossings += 1;
        }
    }
    Ok(fresh_crossings as f64 * a.ln() + (1.0 - a) * exponent)
}

/// Radon-Nikodym weight of the once-reinforced walk with parameter `a`
/// against the rate-one walk on the first `n` jumps of `traj`.
pub fn com_weight(g: &Graph, traj: &Trajectory, n: usize, a: f64) -> Result<f64> {
    Ok(com_log_weight(g, traj, n, a)?.exp())
}
