//! Simulation from persistent per-edge clocks.
//!
//! Every oriented edge `(x, y)` owns its own random stream, keyed by the
//! geometric position of the edge, from which it draws exponentials
//! `chi_1, chi_2, ...`. Measured in the local time of `x`, the `m`-th
//! crossing of `(x, y)` becomes available at `chi_1/f(1) + ... + chi_m/f(m)`.
//! The walk at `x` leaves along the edge whose next arrival comes first.
//! Unused exponentials keep their residual value, which is memoryless, so
//! the law equals that of the event-driven engine. Because clocks depend
//! only on edge positions, walks on nested graphs driven by the same seed
//! move identically until one of them reaches a vertex whose neighborhood
//! differs between the two graphs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use super::rng::hash_key;
use super::{Jump, ProcessSpec, SimOptions, StopRule, Trajectory};
use crate::error::{Error, Result};
use crate::graph::{Graph, OrientedEdge};

struct EdgeClock {
    rng: ChaCha8Rng,
    crossings: u64,
    next_arrival: f64,
}

fn clock_seed(g: &Graph, seed: u64, o: OrientedEdge) -> u64 {
    let (x, y) = g.endpoints(o);
    match (g.coord(x), g.coord(y)) {
        (Some(cx), Some(cy)) => {
            let mut parts = Vec::with_capacity(cx.len() + cy.len() + 1);
            parts.extend_from_slice(cx);
            parts.push(i64::MIN);
            parts.extend_from_slice(cy);
            hash_key(seed, &parts)
        }
        _ => hash_key(seed, &[x as i64, y as i64]),
    }
}

fn rate_for(spec: &ProcessSpec, o: OrientedEdge, m: u64) -> f64 {
    match spec {
        ProcessSpec::Orrw { .. } => 1.0,
        ProcessSpec::Dorrw { a } => {
            if m == 1 {
                *a
            } else {
                1.0
            }
        }
        ProcessSpec::Derrw { f } => f.eval(m),
        ProcessSpec::Rwre { omega } => omega[o.index()],
    }
}

pub fn simulate_strong_construction(g: &Graph, spec: &ProcessSpec, stop: StopRule, seed: u64) -> Result<Trajectory> {
    simulate_strong_with_key(g, spec, stop, seed, SimOptions::default())
}

/// Strong construction with explicit options. `seed` keys all edge clocks.
pub fn simulate_strong_with_key(
    g: &Graph,
    spec: &ProcessSpec,
    stop: StopRule,
    seed: u64,
    opts: SimOptions,
) -> Result<Trajectory> {
    spec.validate(g)?;
    stop.check_reachable(g)?;
    if let ProcessSpec::Orrw { a } = spec {
        if *a != 1.0 {
            return Err(Error::Unsupported(
                "the strong construction needs per-edge clocks; use the directed walk".into(),
            ));
        }
    }
    let mut clocks: Vec<Option<EdgeClock>> = (0..g.num_oriented()).map(|_| None).collect();
    let mut local_time = vec![0.0f64; g.num_vertices()];
    let mut edge_seen = vec![false; g.num_edges()];
    let (mut edge_range, mut directed_range) = (0usize, 0usize);
    let mut jumps: Vec<Jump> = Vec::new();
    let mut x = g.root();
    let mut now = 0.0;
    let t_max = match stop {
        StopRule::Time(t) => t,
        _ => f64::INFINITY,
    };

    loop {
        let done = match stop {
            StopRule::Time(_) => false,
            StopRule::Jumps(n) => jumps.len() as u64 >= n,
            StopRule::EdgeRange(n) => edge_range >= n,
            StopRule::DirectedEdgeRange(n) => directed_range >= n,
        };
        if done {
            break;
        }
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
        let mut best: Option<(f64, usize, OrientedEdge)> = None;
        for &(y, o) in g.out_edges(x) {
            let clock = clocks[o.index()].get_or_insert_with(|| {
                let mut rng = ChaCha8Rng::seed_from_u64(clock_seed(g, seed, o));
                let chi: f64 = Exp1.sample(&mut rng);
                EdgeClock {
                    next_arrival: chi / rate_for(spec, o, 1),
                    rng,
                    crossings: 0,
                }
            });
            if best.is_none_or(|(t, _, _)| clock.next_arrival < t) {
                best = Some((clock.next_arrival, y, o));
            }
        }
        let (arrival, y, o) = best.expect("connected graph has edges at every vertex");
        let hold = arrival - local_time[x];
        if now + hold > t_max {
            break;
        }
        now += hold;
        local_time[x] = arrival;
        let clock = clocks[o.index()].as_mut().expect("clock initialized");
        clock.crossings += 1;
        let chi: f64 = Exp1.sample(&mut clock.rng);
        clock.next_arrival = arrival + chi / rate_for(spec, o, clock.crossings + 1);
        if clock.crossings == 1 {
            directed_range += 1;
        }
        if !edge_seen[o.edge()] {
            edge_seen[o.edge()] = true;
            edge_range += 1;
        }
        jumps.push(Jump {
            time: now,
            from: x,
            to: y,
            edge: o,
        });
        x = y;
    }
    let horizon = if t_max.is_finite() { t_max } else { now };
    Ok(Trajectory {
        root: g.root(),
        horizon,
        jumps,
        spec: spec.clone(),
    })
}

/// Outcome of running two walks on nested graphs from the same clocks.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CouplingReport {
    /// Number of leading jumps that were compared.
    pub compared: usize,
    /// Jump index (1-based) at which the small walk first reached a vertex
    /// whose degree differs between the graphs, if it did.
    pub boundary_hit: Option<usize>,
    /// First compared jump at which the walks differ.
    pub first_mismatch: Option<usize>,
    /// Number of jumps the two walks share before they first differ.
    pub common_prefix: usize,
}

impl CouplingReport {
    pub fn consistent(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

fn same_jump(small: &Graph, big: &Graph, a: &Jump, b: &Jump) -> bool {
    a.time.to_bits() == b.time.to_bits()
        && small.coord(a.from) == big.coord(b.from)
        && small.coord(a.to) == big.coord(b.to)
}

/// Runs the strong construction on `small` and `big` with shared clocks and
/// checks that the walks agree jump for jump until the small one reaches a
/// vertex on its boundary. Both graphs need lattice coordinates.
pub fn couple_on_shared_clocks(
    small: &Graph,
    big: &Graph,
    spec: &ProcessSpec,
    stop: StopRule,
    seed: u64,
) -> Result<CouplingReport> {
    if small.coords().is_none() || big.coords().is_none() {
        return Err(Error::MissingCoordinates);
    }
    if big.coord(big.root()) != small.coord(small.root()) {
        return Err(Error::InvalidParameter("graphs must share the root position".into()));
    }
    let s = simulate_strong_with_key(small, spec, stop, seed, SimOptions::default())?;
    let b = simulate_strong_with_key(big, spec, stop, seed, SimOptions::default())?;
    let differs = |v: usize| {
        let c = small.coord(v).expect("coordinates");
        big.vertex_at(c).is_none_or(|w| big.degree(w) != small.degree(v))
    };
    let boundary_hit = if differs(small.root()) {
        Some(0)
    } else {
        s.jumps.iter().position(|j| differs(j.to)).map(|i| i + 1)
    };
    let compared = boundary_hit.unwrap_or(s.num_jumps()).min(s.num_jumps()).min(b.num_jumps());
    let first_mismatch = (0..compared)
        .find(|&i| !same_jump(small, big, &s.jumps[i], &b.jumps[i]))
        .map(|i| i + 1);
    let common_prefix = s
        .jumps
        .iter()
        .zip(&b.jumps)
        .take_while(|(p, q)| same_jump(small, big, p, q))
        .count();
    Ok(CouplingReport {
        compared,
        boundary_hit,
        first_mismatch,
        common_prefix,
    })
}
