use rand::Rng;
use rand_distr::Exp1;

use super::rng::replica_rng;
use super::{Jump, ProcessSpec, SimOptions, StopRule, Trajectory};
use crate::error::{Error, Result};
use crate::graph::{Graph, OrientedEdge};

/// Simulates one trajectory with the default options and replica stream 0
/// of `seed`.
pub fn simulate(g: &Graph, spec: &ProcessSpec, stop: StopRule, seed: u64) -> Result<Trajectory> {
    let mut rng = replica_rng(seed, 0);
    simulate_with_rng(g, spec, stop, &mut rng, SimOptions::default())
}

struct State<'a> {
    spec: &'a ProcessSpec,
    crossings: Vec<u64>,
    edge_seen: Vec<bool>,
    edge_range: usize,
    directed_range: usize,
}

impl<'a> State<'a> {
    fn new(g: &'a Graph, spec: &'a ProcessSpec) -> Self {
        State {
            spec,
            crossings: vec![0; g.num_oriented()],
            edge_seen: vec![false; g.num_edges()],
            edge_range: 0,
            directed_range: 0,
        }
    }

    fn rate(&self, o: OrientedEdge) -> f64 {
        match self.spec {
            ProcessSpec::Orrw { a } => {
                if self.edge_seen[o.edge()] {
                    1.0
                } else {
                    *a
                }
            }
            ProcessSpec::Dorrw { a } => {
                if self.crossings[o.index()] > 0 {
                    1.0
                } else {
                    *a
                }
            }
            ProcessSpec::Derrw { f } => f.eval(self.crossings[o.index()] + 1),
            ProcessSpec::Rwre { omega } => omega[o.index()],
        }
    }

    fn cross(&mut self, o: OrientedEdge) {
        if self.crossings[o.index()] == 0 {
            self.directed_range += 1;
        }
        self.crossings[o.index()] += 1;
        if !self.edge_seen[o.edge()] {
            self.edge_seen[o.edge()] = true;
            self.edge_range += 1;
        }
    }

    fn done(&self, stop: StopRule, jumps: usize) -> bool {
        match stop {
            StopRule::Time(_) => false,
            StopRule::Jumps(n) => jumps as u64 >= n,
            StopRule::EdgeRange(n) => self.edge_range >= n,
            StopRule::DirectedEdgeRange(n) => self.directed_range >= n,
        }
    }
}

/// Event-driven simulation: at each step the holding time at the current
/// vertex is exponential with the total outgoing rate, and the target is
/// chosen proportionally to the individual rates.
pub fn simulate_with_rng<R: Rng + ?Sized>(
    g: &Graph,
    spec: &ProcessSpec,
    stop: StopRule,
    rng: &mut R,
    opts: SimOptions,
) -> Result<Trajectory> {
    Ok(run(g, spec, stop, rng, opts, None)?.0)
}

/// Simulates with every rate multiplied by `tilt[o.index()]` and returns the
/// trajectory with `ln dP/dP~` of the untilted law against the tilted one.
pub fn simulate_tilted<R: Rng + ?Sized>(
    g: &Graph,
    spec: &ProcessSpec,
    stop: StopRule,
    tilt: &[f64],
    rng: &mut R,
    opts: SimOptions,
) -> Result<(Trajectory, f64)> {
    if tilt.len() != g.num_oriented() || tilt.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidParameter("tilt must be positive, one per oriented edge".into()));
    }
    run(g, spec, stop, rng, opts, Some(tilt))
}

fn run<R: Rng + ?Sized>(
    g: &Graph,
    spec: &ProcessSpec,
    stop: StopRule,
    rng: &mut R,
    opts: SimOptions,
    tilt: Option<&[f64]>,
) -> Result<(Trajectory, f64)> {
    spec.validate(g)?;
    stop.check_reachable(g)?;
    let mut state = State::new(g, spec);
    let mut jumps: Vec<Jump> = Vec::new();
    let mut x = g.root();
    let mut now = 0.0;
    let mut rates: Vec<f64> = Vec::with_capacity(8);
    let mut log_lr = 0.0;
    let t_max = match stop {
        StopRule::Time(t) => t,
        _ => f64::INFINITY,
    };

    while !state.done(stop, jumps.len()) {
        if jumps.len() as u64 >= opts.max_events {
            return Err(Error::Capped {
                cap: opts.max_events,
                partial: Box::new(Trajectory {
                    root: g.root(),
                    horizon: now,
                    jumps,
                    spec: spec.clone(),
                }),
            });
        }
        let out = g.out_edges(x);
        rates.clear();
        rates.extend(out.iter().map(|&(_, o)| state.rate(o)));
        let plain: f64 = rates.iter().sum();
        if let Some(tilt) = tilt {
            for (r, &(_, o)) in rates.iter_mut().zip(out) {
                *r *= tilt[o.index()];
            }
        }
        let total: f64 = rates.iter().sum();
        let hold: f64 = rng.sample::<f64, _>(Exp1) / total;
        let next = now + hold;
        if next > t_max {
            log_lr += (t_max - now) * (total - plain);
            break;
        }
        log_lr += hold * (total - plain);
        let mut u = rng.random::<f64>() * total;
        let mut pick = out.len() - 1;
        for (i, r) in rates.iter().enumerate() {
            if u < *r {
                pick = i;
                break;
            }
            u -= r;
        }
        let (y, o) = out[pick];
        if let Some(tilt) = tilt {
            log_lr -= tilt[o.index()].ln();
        }
        state.cross(o);
        now = next;
        jumps.push(Jump {
            time: now,
            from: x,
            to: y,
            edge: o,
        });
        x = y;
    }

    let horizon = if t_max.is_finite() { t_max } else { now };
    let traj = Trajectory {
        root: g.root(),
        horizon,
        jumps,
        spec: spec.clone(),
    };
    Ok((traj, log_lr))
}
