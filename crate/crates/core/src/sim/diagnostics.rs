use serde::{Deserialize, Serialize};

use super::Trajectory;
use crate::error::{Error, Result};
use crate::graph::{Graph, OrientedEdge};

/// Horizontal-displacement statistics of a directed walk on a lattice ball
/// after `n` jumps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QStatistic {
    /// Sum of first-coordinate increments taken from vertices where at
    /// least one of the two horizontal out-edges was still uncrossed.
    pub q: i64,
    /// Vertices whose `+e1` out-edge was crossed but not the `-e1` one.
    pub u_plus: u64,
    /// Vertices whose `-e1` out-edge was crossed but not the `+e1` one.
    pub u_minus: u64,
    /// Visited vertices with neither horizontal out-edge crossed.
    pub u_bullet: u64,
    /// First coordinate of the position minus `q`.
    pub s: i64,
}

fn horizontal(g: &Graph, v: usize, sign: i64) -> Option<OrientedEdge> {
    let mut c = g.coord(v)?.to_vec();
    c[0] += sign;
    g.vertex_at(&c).and_then(|w| g.oriented(v, w))
}

/// Computes [`QStatistic`] for the first `n` jumps. Edges missing from the
/// ball count as uncrossed.
pub fn q_statistic(g: &Graph, traj: &Trajectory, n: usize) -> Result<QStatistic> {
    let dim = g.dimension().ok_or(Error::MissingCoordinates)?;
    if dim < 2 {
        return Err(Error::InvalidParameter("needs a lattice of dimension >= 2".into()));
    }
    if n > traj.num_jumps() {
        return Err(Error::InvalidParameter(format!(
            "trajectory has {} jumps, asked for {n}",
            traj.num_jumps()
        )));
    }
    let mut crossed = vec![false; g.num_oriented()];
    let mut visited = vec![false; g.num_vertices()];
    visited[traj.root] = true;
    let is_crossed = |crossed: &[bool], e: Option<OrientedEdge>| e.is_some_and(|o| crossed[o.index()]);
    let mut q = 0i64;
    for j in &traj.jumps[..n] {
        let x = j.from;
        let unsaturated = !is_crossed(&crossed, horizontal(g, x, 1)) || !is_crossed(&crossed, horizontal(g, x, -1));
        if unsaturated {
            q += g.coord(j.to).expect("coordinates")[0] - g.coord(x).expect("coordinates")[0];
        }
        crossed[j.edge.index()] = true;
        visited[j.to] = true;
    }
    let mut out = QStatistic {
        q,
        ..QStatistic::default()
    };
    for v in (0..g.num_vertices()).filter(|&v| visited[v]) {
        let plus = is_crossed(&crossed, horizontal(g, v, 1));
        let minus = is_crossed(&crossed, horizontal(g, v, -1));
        match (plus, minus) {
            (true, false) => out.u_plus += 1,
            (false, true) => out.u_minus += 1,
            (false, false) => out.u_bullet += 1,
            (true, true) => {}
        }
    }
    let end = traj.vertex_after(n);
    out.s = g.coord(end).expect("coordinates")[0] - q;
    Ok(out)
}
