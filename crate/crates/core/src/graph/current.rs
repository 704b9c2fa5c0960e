use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Graph, OrientedEdge};
use crate::error::{Error, Result};

/// Non-negative crossing count per oriented edge of a graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CrossingVector {
    counts: Vec<u64>,
}

impl CrossingVector {
    pub fn zeros(g: &Graph) -> Self {
        CrossingVector {
            counts: vec![0; g.num_oriented()],
        }
    }

    pub fn from_counts(g: &Graph, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != g.num_oriented() {
            return Err(Error::InvalidParameter(format!(
                "crossing vector has {} entries, graph has {} oriented edges",
                counts.len(),
                g.num_oriented()
            )));
        }
        Ok(CrossingVector { counts })
    }

    /// Builds a crossing vector from `(from, to, count)` triples.
    pub fn from_pairs(g: &Graph, pairs: &[(usize, usize, u64)]) -> Result<Self> {
        let mut k = CrossingVector::zeros(g);
        for &(u, v, c) in pairs {
            let o = g
                .oriented(u, v)
                .ok_or_else(|| Error::InvalidParameter(format!("no edge ({u}, {v})")))?;
            k.counts[o.index()] = c;
        }
        Ok(k)
    }

    pub fn get(&self, o: OrientedEdge) -> u64 {
        self.counts[o.index()]
    }

    pub fn set(&mut self, o: OrientedEdge, value: u64) {
        self.counts[o.index()] = value;
    }

    pub fn increment(&mut self, o: OrientedEdge) {
        self.counts[o.index()] += 1;
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// `||k||`: total number of crossings.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Outgoing crossings `k_i = sum_j k_ij`.
    pub fn out_count(&self, g: &Graph, v: usize) -> u64 {
        g.out_edges(v).iter().map(|&(_, o)| self.get(o)).sum()
    }

    /// Vertices touched by a crossed edge, together with `extra`.
    pub fn support(&self, g: &Graph, extra: &[usize]) -> BTreeSet<usize> {
        let mut s: BTreeSet<usize> = extra.iter().copied().collect();
        for o in g.oriented_edges() {
            if self.get(o) > 0 {
                let (u, v) = g.endpoints(o);
                s.insert(u);
                s.insert(v);
            }
        }
        s
    }
}

/// Antisymmetric integer flow on oriented edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Current {
    values: Vec<i64>,
}

impl Current {
    pub fn zeros(g: &Graph) -> Self {
        Current {
            values: vec![0; g.num_oriented()],
        }
    }

    pub fn get(&self, o: OrientedEdge) -> i64 {
        self.values[o.index()]
    }

    /// Sets `b_o = value` and `b_{reverse(o)} = -value`.
    pub fn set(&mut self, o: OrientedEdge, value: i64) {
        self.values[o.index()] = value;
        self.values[o.reverse().index()] = -value;
    }

    pub fn add(&mut self, o: OrientedEdge, value: i64) {
        let v = self.get(o) + value;
        self.set(o, v);
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// `b_i = sum_{j ~ i} b_ij` for every vertex.
    pub fn vertex_divergence(&self, g: &Graph) -> Vec<i64> {
        (0..g.num_vertices())
            .map(|v| g.out_edges(v).iter().map(|&(_, o)| self.get(o)).sum())
            .collect()
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.values.chunks(2).all(|p| p[0] == -p[1])
    }
}

/// `b(k)_ij = k_ij - k_ji` together with the per-vertex divergences.
pub fn divergence(g: &Graph, k: &CrossingVector) -> (Current, Vec<i64>) {
    let mut b = Current::zeros(g);
    for e in 0..g.num_edges() {
        let fwd = OrientedEdge::new(e, false);
        b.set(fwd, k.get(fwd) as i64 - k.get(fwd.reverse()) as i64);
    }
    let div = b.vertex_divergence(g);
    (b, div)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_divergence() {
        let g = Graph::complete(2).unwrap();
        let k = CrossingVector::from_pairs(&g, &[(0, 1, 1)]).unwrap();
        let (b, div) = divergence(&g, &k);
        assert_eq!(b.get(g.oriented(0, 1).unwrap()), 1);
        assert_eq!(b.get(g.oriented(1, 0).unwrap()), -1);
        assert_eq!(div, vec![1, -1]);

        let k = CrossingVector::from_pairs(&g, &[(0, 1, 2), (1, 0, 2)]).unwrap();
        let (b, div) = divergence(&g, &k);
        assert!(b.values().iter().all(|&x| x == 0));
        assert_eq!(div, vec![0, 0]);
    }

    #[test]
    fn cycle_flow_has_no_divergence() {
        let g = Graph::complete(3).unwrap();
        let k = CrossingVector::from_pairs(&g, &[(0, 1, 1), (1, 2, 1), (2, 0, 1)]).unwrap();
        let (b, div) = divergence(&g, &k);
        assert!(b.is_antisymmetric());
        assert_eq!(div, vec![0, 0, 0]);
    }

    #[test]
    fn support_includes_extra_vertices() {
        let g = Graph::path(4).unwrap();
        let k = CrossingVector::from_pairs(&g, &[(1, 2, 3)]).unwrap();
        let s: Vec<_> = k.support(&g, &[0]).into_iter().collect();
        assert_eq!(s, vec![0, 1, 2]);
        assert_eq!(k.total(), 3);
        assert_eq!(k.out_count(&g, 1), 3);
    }
}
