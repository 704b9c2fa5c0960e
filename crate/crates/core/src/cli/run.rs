//! Execution of configured suites.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::config::{ExperimentConfig, Suite};
use super::eval::eval_op;
use crate::error::{Error, Result};
use crate::formulas::{product_density, Clock, LocalTimeQuery, Profile, RateFunctionParams};
use crate::graph::Graph;
use crate::harness::{
    com_forms_agreement, compare_change_of_measure, coupling_check, delta_law, dirichlet_annealed_check,
    ldp_empirical_check, q_summary, range_trend, tree_return_smoke, validate_local_time_formula, verdict_for_error,
    LocalTimeTarget, TargetCounts, Tally, Verdict,
};
use crate::sim::rng::{derive_master, run_replicas};
use crate::sim::{extract_observables, simulate_with_rng, ProcessSpec, SimOptions};

const COM_FORMS_TOL: f64 = 1e-10;

/// One line of `results.jsonl`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteRecord {
    pub test: String,
    #[serde(rename = "config-hash")]
    pub config_hash: String,
    pub seed: u64,
    pub suite: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Value>,
    pub estimate: Option<f64>,
    pub se: Option<f64>,
    pub target: Option<f64>,
    pub verdict: Verdict,
    pub details: Value,
}

/// Per-replica rows produced by the `simulate` suite.
#[derive(Clone, Debug, Default)]
pub struct SuiteOutput {
    pub record: Option<SuiteRecord>,
    pub rows: Vec<Value>,
}

fn orrw_a(spec: &ProcessSpec, suite: &str) -> Result<f64> {
    match spec {
        ProcessSpec::Orrw { a } => Ok(*a),
        _ => Err(Error::InvalidParameter(format!("suite {suite} needs process family orrw"))),
    }
}

fn once_a(spec: &ProcessSpec, suite: &str) -> Result<f64> {
    match spec {
        ProcessSpec::Dorrw { a } => Ok(*a),
        ProcessSpec::Orrw { a } if *a == 1.0 => Ok(1.0),
        _ => Err(Error::InvalidParameter(format!("suite {suite} needs process family dorrw"))),
    }
}

fn ball_params(cfg: &ExperimentConfig, suite: &str) -> Result<(usize, usize)> {
    match cfg.graph {
        super::config::GraphSpec::Ball { d, r } => Ok((d, r)),
        _ => Err(Error::InvalidParameter(format!("suite {suite} needs a ball graph"))),
    }
}

fn to_json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

struct Outcome {
    estimate: Option<f64>,
    se: Option<f64>,
    target: Option<f64>,
    verdict: Verdict,
    details: Value,
}

impl Outcome {
    fn info(details: Value) -> Self {
        Outcome {
            estimate: None,
            se: None,
            target: None,
            verdict: Verdict::Info,
            details,
        }
    }
}

/// Runs suite `index` of `cfg`. Capped and underpowered runs become
/// verdicts; other errors propagate.
pub fn run_suite(cfg: &ExperimentConfig, index: usize, hash: &str, g: &Graph) -> Result<SuiteOutput> {
    let suite = &cfg.suite[index];
    let seed = derive_master(cfg.seed, index as u64);
    let mut rows = Vec::new();
    let outcome = match execute(cfg, suite, seed, g, &mut rows) {
        Ok(o) => o,
        Err(e) => match verdict_for_error(&e) {
            Some(verdict) => Outcome {
                estimate: None,
                se: None,
                target: None,
                verdict,
                details: json!({ "error": e.to_string() }),
            },
            None => return Err(e),
        },
    };
    let record = SuiteRecord {
        test: suite.name().to_string(),
        config_hash: hash.to_string(),
        seed: cfg.seed,
        suite: index,
        grid: None,
        estimate: outcome.estimate,
        se: outcome.se,
        target: outcome.target,
        verdict: outcome.verdict,
        details: outcome.details,
    };
    for row in rows.iter_mut() {
        if let Value::Object(m) = row {
            m.insert("config-hash".into(), hash.into());
            m.insert("seed".into(), cfg.seed.into());
            m.insert("suite".into(), index.into());
        }
    }
    Ok(SuiteOutput {
        record: Some(record),
        rows,
    })
}

fn execute(cfg: &ExperimentConfig, suite: &Suite, seed: u64, g: &Graph, rows: &mut Vec<Value>) -> Result<Outcome> {
    let th = cfg.thresholds;
    let n = cfg.replicas;
    let name = suite.name();
    Ok(match suite {
        Suite::Simulate { trajectories } => {
            let stop = cfg
                .stop
                .ok_or_else(|| Error::InvalidParameter("simulate needs a [stop] rule".into()))?;
            let mut opts = SimOptions::default();
            if let Some(cap) = cfg.max_events {
                opts.max_events = cap;
            }
            let runs = run_replicas(seed, n, |_, rng| -> Result<(Value, Option<String>, usize)> {
                let traj = simulate_with_rng(g, &cfg.process, stop, rng, opts)?;
                let obs = extract_observables(g, &traj, traj.horizon)?;
                let records = trajectories.then(|| traj.to_records());
                Ok((obs.to_flat_json(g), records, obs.vertex_range.len()))
            });
            let mut range = Tally::new();
            let mut time = Tally::new();
            for (r, run) in runs.into_iter().enumerate() {
                let (mut row, records, vr) = run?;
                range.push(vr as f64);
                time.push(row["time"].as_f64().unwrap_or(f64::NAN));
                if let Value::Object(m) = &mut row {
                    m.insert("replica".into(), r.into());
                    if let Some(rec) = records {
                        m.insert("jumps-record".into(), rec.into());
                    }
                }
                rows.push(row);
            }
            Outcome {
                estimate: Some(range.mean()),
                se: Some(range.se()),
                target: None,
                verdict: Verdict::Info,
                details: json!({ "mean-vertex-range": range.mean(), "mean-time": time.mean() }),
            }
        }
        Suite::DeltaExponential {
            samples,
            per_trajectory,
            mean_tol,
            rho_max,
        } => {
            let a = orrw_a(&cfg.process, name)?;
            let r = delta_law(g, a, *samples, *per_trajectory, seed, *mean_tol, *rho_max, th.p_min)?;
            Outcome {
                estimate: Some(r.mean),
                se: None,
                target: Some(1.0 / a),
                verdict: r.verdict,
                details: to_json(&r),
            }
        }
        Suite::ChangeOfMeasure { event } => {
            let a = orrw_a(&cfg.process, name)?;
            let r = compare_change_of_measure(g, event, a, n, seed, th.z_max)?;
            Outcome {
                estimate: Some(r.estimate),
                se: Some(r.se),
                target: Some(r.target),
                verdict: r.verdict,
                details: to_json(&r),
            }
        }
        Suite::ComForms { trajectories, jumps } => {
            let a = orrw_a(&cfg.process, name)?;
            let gap = com_forms_agreement(g, a, *trajectories, *jumps, seed)?;
            Outcome {
                estimate: Some(gap),
                se: None,
                target: Some(0.0),
                verdict: Verdict::from_bool(gap < COM_FORMS_TOL),
                details: json!({ "max-rel-gap": gap, "tolerance": COM_FORMS_TOL }),
            }
        }
        Suite::LocalTime { target, t, axis, bins } => {
            let (tree, k) = target.resolve(g)?;
            let clocks = Clock::for_graph(g, &cfg.process)?;
            let vertices = target.vertices.clone();
            let density = |l: &[f64]| {
                let profile = Profile::new(g, vertices.clone(), l.to_vec(), tree.clone())?;
                product_density(g, &LocalTimeQuery::new(g, profile, k.clone())?, &clocks)
            };
            let lt = LocalTimeTarget {
                vertices: target.vertices.iter().copied().collect::<BTreeSet<_>>(),
                tree: tree.clone(),
                counts: TargetCounts::Crossings(k.clone()),
            };
            let r = validate_local_time_formula(g, &cfg.process, &lt, *t, *axis, *bins, n, seed, th, density)?;
            Outcome {
                estimate: Some(r.event.estimate),
                se: Some(r.event.se),
                target: Some(r.event.target),
                verdict: r.verdict,
                details: to_json(&r),
            }
        }
        Suite::DirichletAnnealed { t, min_prob } => {
            let r = dirichlet_annealed_check(g, *t, n, seed, *min_prob, th.rel_err)?;
            Outcome {
                estimate: Some(r.max_rel_err),
                se: None,
                target: None,
                verdict: r.verdict,
                details: to_json(&r),
            }
        }
        Suite::Ldp { window, t_grid, slack } => {
            let a = once_a(&cfg.process, name)?;
            let r = ldp_empirical_check(g, a, *window, t_grid, n, seed, *slack)?;
            let last = r.points.last();
            Outcome {
                estimate: last.map(|p| p.rate),
                se: last.map(|p| p.rate_se),
                target: last.map(|p| p.lower),
                verdict: r.verdict,
                details: to_json(&r),
            }
        }
        Suite::RangeTrend { u, p, n_grid } => {
            let a = orrw_a(&cfg.process, name)?;
            let (d, _) = ball_params(cfg, name)?;
            let params = RateFunctionParams { d: d as u32, a, u: *u, p: *p };
            Outcome::info(to_json(&range_trend(params, n_grid, n, seed)?))
        }
        Suite::Coupling { big_radius, jumps } => {
            let a = once_a(&cfg.process, name)?;
            let (d, r) = ball_params(cfg, name)?;
            if *big_radius <= r {
                return Err(Error::InvalidParameter("big-radius must exceed the graph radius".into()));
            }
            let big = Graph::ball(d, *big_radius)?;
            let s = coupling_check(g, &big, a, *jumps, n, seed)?;
            Outcome {
                estimate: Some(s.consistent as f64),
                se: None,
                target: Some(s.seeds as f64),
                verdict: s.verdict,
                details: to_json(&s),
            }
        }
        Suite::TreeReturn { times } => {
            let a = orrw_a(&cfg.process, name)?;
            let (degree, depth) = match cfg.graph {
                super::config::GraphSpec::RegularTree { degree, depth } => (degree, depth),
                _ => return Err(Error::InvalidParameter("tree-return needs a regular-tree graph".into())),
            };
            Outcome::info(to_json(&tree_return_smoke(degree, depth, a, times, n, seed)?))
        }
        Suite::QStatistics { jumps } => {
            let a = once_a(&cfg.process, name)?;
            Outcome::info(to_json(&q_summary(g, a, *jumps, n, seed)?))
        }
        Suite::FormulaEval { op, args } => {
            let v = eval_op(op, args)?;
            Outcome {
                estimate: Some(v),
                se: None,
                target: None,
                verdict: Verdict::Info,
                details: json!({ "op": op, "args": args, "value": v }),
            }
        }
    })
}

/// 0 pass, 1 any failure, 3 capped or underpowered without failures.
pub fn exit_code<'a, I: IntoIterator<Item = &'a Verdict>>(verdicts: I) -> i32 {
    let mut code = 0;
    for v in verdicts {
        match v {
            Verdict::Fail => return 1,
            Verdict::Capped | Verdict::InsufficientMass | Verdict::Degenerate => code = 3,
            Verdict::Pass | Verdict::Info => {}
        }
    }
    code
}
