//! Monte Carlo checks of simulator output against exact laws.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::report::{EstimateReport, Thresholds, Verdict};
use super::stats::{chi_square_test, ks_test, lag1_autocorrelation, ChiSquareResult, KsResult, Tally};
use crate::error::{Error, Result};
use crate::formulas::{adjusted_current, com_log_weight, com_log_weight_by_steps, dirichlet_k_prob};
use crate::graph::{CrossingVector, Current, Graph, OrientedSpanningTree};
use crate::numeric::integrate;
use crate::sim::rng::{derive_master, run_replicas};
use crate::sim::{
    couple_on_shared_clocks, extract_observables, sample_dirichlet_environment, simulate_with_rng, Observables,
    ProcessSpec, SimOptions, StopRule, Trajectory,
};

const DIRECT_ARM: u64 = 1;
const WEIGHTED_ARM: u64 = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaLawReport {
    pub a: f64,
    pub trajectories: usize,
    pub ks: KsResult,
    pub mean: f64,
    pub mean_rel_err: f64,
    pub lag1: f64,
    pub verdict: Verdict,
}

/// Pools the exposures between consecutive edge-range increments of the
/// once-reinforced walk and tests them against Exp(a).
pub fn delta_law(
    g: &Graph,
    a: f64,
    samples: usize,
    per_trajectory: usize,
    seed: u64,
    mean_tol: f64,
    rho_max: f64,
    p_min: f64,
) -> Result<DeltaLawReport> {
    if per_trajectory == 0 || samples == 0 {
        return Err(Error::InvalidParameter("need a positive sample count".into()));
    }
    let spec = ProcessSpec::Orrw { a };
    let trajectories = samples.div_ceil(per_trajectory);
    let runs = run_replicas(seed, trajectories as u64, |_, rng| -> Result<Vec<f64>> {
        let traj = simulate_with_rng(g, &spec, StopRule::EdgeRange(per_trajectory), rng, SimOptions::default())?;
        Ok(extract_observables(g, &traj, traj.horizon)?.deltas)
    });
    let mut series = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let mut left = samples;
    for s in series.iter_mut() {
        s.truncate(left);
        left -= s.len();
    }
    let pooled: Vec<f64> = series.iter().flatten().copied().collect();
    let ks = ks_test(&pooled, |x| if x <= 0.0 { 0.0 } else { 1.0 - (-a * x).exp() })?;
    let mean = pooled.iter().copied().collect::<Tally>().mean();
    let mean_rel_err = (mean * a - 1.0).abs();
    let lag1 = lag1_autocorrelation(&series);
    let verdict = Verdict::from_bool(ks.p_value > p_min && mean_rel_err < mean_tol && lag1.abs() < rho_max);
    Ok(DeltaLawReport {
        a,
        trajectories,
        ks,
        mean,
        mean_rel_err,
        lag1,
        verdict,
    })
}

/// An event determined by the first few jumps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CylinderEvent {
    /// The first jumps have these lattice displacements.
    Steps { steps: Vec<Vec<i64>> },
    /// The walk visits exactly these vertices after the root, in order.
    Path { vertices: Vec<usize> },
    /// The first jump happens before `time`.
    FirstJumpBefore { time: f64 },
}

impl CylinderEvent {
    pub fn jumps(&self) -> usize {
        match self {
            CylinderEvent::Steps { steps } => steps.len(),
            CylinderEvent::Path { vertices } => vertices.len(),
            CylinderEvent::FirstJumpBefore { .. } => 1,
        }
    }

    pub fn occurs(&self, g: &Graph, traj: &Trajectory) -> Result<bool> {
        if traj.num_jumps() < self.jumps() {
            return Ok(false);
        }
        Ok(match self {
            CylinderEvent::Steps { steps } => {
                for (j, step) in traj.jumps.iter().zip(steps) {
                    let from = g.coord(j.from).ok_or(Error::MissingCoordinates)?;
                    let to = g.coord(j.to).ok_or(Error::MissingCoordinates)?;
                    if step.len() != from.len() || from.iter().zip(to).zip(step).any(|((x, y), s)| y - x != *s) {
                        return Ok(false);
                    }
                }
                true
            }
            CylinderEvent::Path { vertices } => traj.jumps.iter().zip(vertices).all(|(j, &v)| j.to == v),
            CylinderEvent::FirstJumpBefore { time } => traj.jumps[0].time < *time,
        })
    }
}

/// Frequency of `event` under the once-reinforced walk against the mean of
/// `weight * 1{event}` under the rate-one walk; the arms use disjoint seeds.
pub fn compare_change_of_measure(
    g: &Graph,
    event: &CylinderEvent,
    a: f64,
    replicas: u64,
    seed: u64,
    z_max: f64,
) -> Result<EstimateReport> {
    let n = event.jumps();
    let stop = StopRule::Jumps(n as u64);
    let direct_spec = ProcessSpec::Orrw { a };
    let direct = run_replicas(derive_master(seed, DIRECT_ARM), replicas, |_, rng| -> Result<f64> {
        let traj = simulate_with_rng(g, &direct_spec, stop, rng, SimOptions::default())?;
        Ok(event.occurs(g, &traj)? as u8 as f64)
    });
    let weighted = run_replicas(derive_master(seed, WEIGHTED_ARM), replicas, |_, rng| -> Result<f64> {
        let traj = simulate_with_rng(g, &ProcessSpec::simple(), stop, rng, SimOptions::default())?;
        if event.occurs(g, &traj)? {
            Ok(com_log_weight(g, &traj, n, a)?.exp())
        } else {
            Ok(0.0)
        }
    });
    let d: Tally = direct.into_iter().collect::<Result<Vec<_>>>()?.into_iter().collect();
    let w: Tally = weighted.into_iter().collect::<Result<Vec<_>>>()?.into_iter().collect();
    Ok(EstimateReport::compare(
        "change-of-measure",
        w.mean(),
        w.se(),
        d.mean(),
        d.se(),
        replicas,
        seed,
        z_max,
    ))
}

/// Largest relative gap between the two forms of the change-of-measure
/// weight over `trajectories` rate-one walks of `jumps` jumps.
pub fn com_forms_agreement(g: &Graph, a: f64, trajectories: u64, jumps: u64, seed: u64) -> Result<f64> {
    let gaps = run_replicas(seed, trajectories, |_, rng| -> Result<f64> {
        let traj = simulate_with_rng(g, &ProcessSpec::simple(), StopRule::Jumps(jumps), rng, SimOptions::default())?;
        let n = traj.num_jumps();
        let x = com_log_weight(g, &traj, n, a)?;
        let y = com_log_weight_by_steps(g, &traj, n, a)?;
        Ok((x - y).abs() / x.abs().max(1.0))
    });
    Ok(gaps.into_iter().collect::<Result<Vec<_>>>()?.into_iter().fold(0.0, f64::max))
}

/// What a trajectory must realise for the local-time check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum TargetCounts {
    Crossings(CrossingVector),
    /// Net current of the crossings outside the tree.
    ReducedCurrent(Current),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalTimeTarget {
    pub vertices: BTreeSet<usize>,
    pub tree: OrientedSpanningTree,
    pub counts: TargetCounts,
}

impl LocalTimeTarget {
    pub fn matches(&self, g: &Graph, obs: &Observables) -> bool {
        if obs.vertex_range.len() != self.vertices.len()
            || !obs.vertex_range.iter().all(|v| self.vertices.contains(v))
            || obs.last_exit_tree != self.tree
        {
            return false;
        }
        match &self.counts {
            TargetCounts::Crossings(k) => obs.crossings == *k,
            TargetCounts::ReducedCurrent(b) => {
                let got = adjusted_current(g, &obs.crossings, &obs.last_exit_tree);
                self.vertices.iter().all(|&v| {
                    g.out_edges(v)
                        .iter()
                        .filter(|(w, _)| self.vertices.contains(w))
                        .all(|&(_, o)| got.get(o) == b.get(o))
                })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalTimeCheck {
    /// Event frequency against the integrated density.
    pub event: EstimateReport,
    /// Conditional histogram of the local time at the axis vertex.
    pub histogram: Option<ChiSquareResult>,
    pub verdict: Verdict,
}

const QUAD_ABS: f64 = 1e-14;
const QUAD_REL: f64 = 1e-11;

/// Marginal density of the axis local time, integrating out at most one
/// further coordinate; the last vertex takes the remaining time.
fn axis_marginal<D>(g: &Graph, vertices: &[usize], axis: usize, t: f64, density: &D, la: f64) -> Result<f64>
where
    D: Fn(&[f64]) -> Result<f64>,
{
    let others: Vec<usize> = vertices.iter().copied().filter(|&v| v != axis).collect();
    let mut l = vec![0.0; g.num_vertices()];
    l[axis] = la;
    match others.as_slice() {
        [last] => {
            l[*last] = t - la;
            density(&l)
        }
        [mid, last] => {
            let rest = t - la;
            if rest <= 0.0 {
                return Ok(0.0);
            }
            let f = |u: f64| {
                let mut l = l.clone();
                l[*mid] = u;
                l[*last] = rest - u;
                density(&l).unwrap_or(f64::NAN)
            };
            integrate(f, 0.0, rest, QUAD_ABS, QUAD_REL)
        }
        _ => Err(Error::InvalidQuery("local-time check supports 2 or 3 visited vertices".into())),
    }
}

/// Simulates `spec` to time `t` and compares the frequency of `target`, and
/// the histogram of `l_axis` on that event, with the integrated `density`.
#[allow(clippy::too_many_arguments)]
pub fn validate_local_time_formula<D>(
    g: &Graph,
    spec: &ProcessSpec,
    target: &LocalTimeTarget,
    t: f64,
    axis: usize,
    bins: usize,
    replicas: u64,
    seed: u64,
    thresholds: Thresholds,
    density: D,
) -> Result<LocalTimeCheck>
where
    D: Fn(&[f64]) -> Result<f64>,
{
    if !target.vertices.contains(&axis) || bins == 0 {
        return Err(Error::InvalidParameter("axis must be a visited vertex and bins positive".into()));
    }
    let vertices: Vec<usize> = target.vertices.iter().copied().collect();
    let marginal = |x: f64| axis_marginal(g, &vertices, axis, t, &density, x).unwrap_or(f64::NAN);
    let width = t / bins as f64;
    let mut bin_probs = Vec::with_capacity(bins);
    for b in 0..bins {
        bin_probs.push(integrate(marginal, b as f64 * width, (b + 1) as f64 * width, QUAD_ABS, QUAD_REL)?);
    }
    let p: f64 = bin_probs.iter().sum();
    if !p.is_finite() {
        return Err(Error::NonConvergence {
            what: "local-time density integral",
            residual: f64::NAN,
        });
    }

    let hits = run_replicas(seed, replicas, |_, rng| -> Result<Option<f64>> {
        let traj = simulate_with_rng(g, spec, StopRule::Time(t), rng, SimOptions::default())?;
        let obs = extract_observables(g, &traj, t)?;
        Ok(target.matches(g, &obs).then(|| obs.local_times[axis]))
    });
    let hits: Vec<f64> = hits.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect();
    let n = replicas as f64;
    let freq = hits.len() as f64 / n;
    let se = (freq * (1.0 - freq) / n).sqrt();
    let mut event = EstimateReport::compare("local-time-event", freq, se, p, 0.0, replicas, seed, thresholds.z_max);
    if event.verdict == Verdict::Degenerate || p * n < 10.0 || hits.len() < 10 {
        event.verdict = Verdict::InsufficientMass;
        return Ok(LocalTimeCheck {
            event,
            histogram: None,
            verdict: Verdict::InsufficientMass,
        });
    }
    let mut observed = vec![0.0; bins];
    for &x in &hits {
        observed[((x / width) as usize).min(bins - 1)] += 1.0;
    }
    let expected: Vec<f64> = bin_probs.iter().map(|q| q / p * hits.len() as f64).collect();
    let histogram = chi_square_test(&observed, &expected, 0)?;
    let verdict = event.verdict.and(Verdict::from_bool(histogram.p_value > thresholds.p_min));
    Ok(LocalTimeCheck {
        event,
        histogram: Some(histogram),
        verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KEventRow {
    /// Crossing counts in oriented-edge order, then the final vertex.
    pub counts: Vec<u64>,
    pub terminal: usize,
    pub formula: f64,
    pub empirical: f64,
    pub rel_err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirichletCheck {
    pub rows: Vec<KEventRow>,
    /// Formula mass of the observed events.
    pub covered_mass: f64,
    pub max_rel_err: f64,
    pub verdict: Verdict,
}

/// Annealed walk in an i.i.d. flat-Dirichlet environment: for every
/// observed `(k, X_t)` whose exact probability exceeds `min_prob`, compares
/// the frequency with the exact probability.
pub fn dirichlet_annealed_check(
    g: &Graph,
    t: f64,
    replicas: u64,
    seed: u64,
    min_prob: f64,
    rel_tol: f64,
) -> Result<DirichletCheck> {
    let outcomes = run_replicas(seed, replicas, |_, rng| -> Result<(Vec<u64>, usize)> {
        let omega = sample_dirichlet_environment(g, rng)?;
        let traj = simulate_with_rng(g, &ProcessSpec::Rwre { omega }, StopRule::Time(t), rng, SimOptions::default())?;
        let obs = extract_observables(g, &traj, t)?;
        Ok((obs.crossings.counts().to_vec(), obs.position))
    });
    let mut counts: BTreeMap<(Vec<u64>, usize), u64> = BTreeMap::new();
    for o in outcomes {
        *counts.entry(o?).or_default() += 1;
    }
    let mut rows = Vec::new();
    let mut covered_mass = 0.0;
    for ((k, i1), c) in counts {
        let kv = CrossingVector::from_counts(g, k.clone())?;
        let formula = dirichlet_k_prob(g, &kv, t, i1)?;
        covered_mass += formula;
        if formula > min_prob {
            let empirical = c as f64 / replicas as f64;
            rows.push(KEventRow {
                counts: k,
                terminal: i1,
                formula,
                empirical,
                rel_err: (empirical - formula).abs() / formula,
            });
        }
    }
    let max_rel_err = rows.iter().map(|r| r.rel_err).fold(0.0, f64::max);
    let verdict = if rows.is_empty() {
        Verdict::InsufficientMass
    } else {
        Verdict::from_bool(max_rel_err < rel_tol)
    };
    Ok(DirichletCheck {
        rows,
        covered_mass,
        max_rel_err,
        verdict,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingSummary {
    pub seeds: u64,
    pub consistent: u64,
    /// Runs in which the small walk reached its boundary.
    pub boundary_hits: u64,
    pub compared_jumps: u64,
    pub verdict: Verdict,
}

/// Runs the shared-clock coupling of the directed walk on two nested
/// balls for `seeds` seeds.
pub fn coupling_check(small: &Graph, big: &Graph, a: f64, jumps: u64, seeds: u64, seed: u64) -> Result<CouplingSummary> {
    let spec = ProcessSpec::Dorrw { a };
    let reports = run_replicas(seed, seeds, |r, _| {
        couple_on_shared_clocks(small, big, &spec, StopRule::Jumps(jumps), derive_master(seed, r))
    });
    let mut out = CouplingSummary {
        seeds,
        consistent: 0,
        boundary_hits: 0,
        compared_jumps: 0,
        verdict: Verdict::Pass,
    };
    for r in reports {
        let r = r?;
        out.consistent += r.consistent() as u64;
        out.boundary_hits += r.boundary_hit.is_some() as u64;
        out.compared_jumps += r.compared as u64;
    }
    out.verdict = Verdict::from_bool(out.consistent == seeds);
    Ok(out)
}
