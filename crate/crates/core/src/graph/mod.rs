//! Rooted graphs with canonical oriented-edge indexing.
//!
//! Vertices are dense indices `0..n`. Each undirected edge `{u, v}` with
//! `u < v` gets an id `e`; its two orientations are `2e` (`u -> v`) and
//! `2e + 1` (`v -> u`), so reversing an oriented edge is a bit flip.
//! Lattice graphs additionally carry integer coordinates, which only the
//! simulator diagnostics look at.

mod current;
mod io;
mod trees;

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use current::{divergence, Current, CrossingVector};
pub use io::{read_graph, write_graph};
pub use trees::{
    count_spanning_trees, enumerate_oriented_spanning_trees,
    enumerate_oriented_spanning_trees_with_limit, tree_sum_by_enumeration, tree_sum_by_minor,
    weighted_tree_sum, OrientedSpanningTree, DEFAULT_TREE_LIMIT,
};

/// Index of an oriented edge: `2 * edge_id + direction`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OrientedEdge(pub u32);

impl OrientedEdge {
    pub fn new(edge: usize, backward: bool) -> Self {
        OrientedEdge((2 * edge + backward as usize) as u32)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn edge(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn reverse(self) -> Self {
        OrientedEdge(self.0 ^ 1)
    }

    pub fn is_backward(self) -> bool {
        self.0 & 1 == 1
    }
}

impl fmt::Display for OrientedEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "o{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    root: usize,
    edges: Vec<(usize, usize)>,
    /// Per vertex: `(neighbor, oriented edge to that neighbor)`, sorted by neighbor.
    adjacency: Vec<Vec<(usize, OrientedEdge)>>,
    coords: Option<Vec<Vec<i64>>>,
    coord_index: HashMap<Vec<i64>, usize>,
}

impl Graph {
    /// Builds a graph from an undirected edge list.
    ///
    /// Rejects self-loops, multi-edges, out-of-range endpoints, an invalid
    /// root and disconnected inputs.
    pub fn from_edges(n: usize, root: usize, edge_list: &[(usize, usize)]) -> Result<Graph> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        if root >= n {
            return Err(Error::InvalidGraph(format!("root {root} out of range")));
        }
        let mut seen = BTreeSet::new();
        let mut edges = Vec::with_capacity(edge_list.len());
        for &(a, b) in edge_list {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!("edge ({a}, {b}) out of range")));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at {a}")));
            }
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                return Err(Error::InvalidGraph(format!("multi-edge {{{a}, {b}}}")));
            }
            edges.push(key);
        }
        edges.sort_unstable();
        let mut adjacency = vec![Vec::new(); n];
        for (e, &(u, v)) in edges.iter().enumerate() {
            adjacency[u].push((v, OrientedEdge::new(e, false)));
            adjacency[v].push((u, OrientedEdge::new(e, true)));
        }
        for adj in &mut adjacency {
            adj.sort_unstable_by_key(|&(w, _)| w);
        }
        let g = Graph {
            root,
            edges,
            adjacency,
            coords: None,
            coord_index: HashMap::new(),
        };
        let reached = g.reachable_from(root, |_| true);
        if reached.len() != n {
            return Err(Error::Disconnected(format!(
                "{} of {} vertices reachable from the root",
                reached.len(),
                n
            )));
        }
        Ok(g)
    }

    pub fn with_coordinates(mut self, coords: Vec<Vec<i64>>) -> Result<Graph> {
        if coords.len() != self.num_vertices() {
            return Err(Error::InvalidGraph("coordinate table has wrong length".into()));
        }
        let dim = coords[0].len();
        let mut index = HashMap::with_capacity(coords.len());
        for (v, c) in coords.iter().enumerate() {
            if c.len() != dim {
                return Err(Error::InvalidGraph("mixed coordinate dimensions".into()));
            }
            if index.insert(c.clone(), v).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate coordinate {c:?}")));
            }
        }
        self.coords = Some(coords);
        self.coord_index = index;
        Ok(self)
    }

    /// Induced subgraph of `Z^d` on `{x : |x|_2 <= r}`, rooted at the origin.
    ///
    /// The origin gets index 0; the other points follow in lexicographic order.
    pub fn ball(d: usize, r: usize) -> Result<Graph> {
        if d == 0 || r == 0 {
            return Err(Error::InvalidParameter("ball needs d >= 1 and r >= 1".into()));
        }
        let r = r as i64;
        let mut points: Vec<Vec<i64>> = Vec::new();
        let mut current = vec![-r; d];
        loop {
            if current.iter().map(|x| x * x).sum::<i64>() <= r * r {
                points.push(current.clone());
            }
            let mut k = 0;
            loop {
                if k == d {
                    break;
                }
                current[k] += 1;
                if current[k] <= r {
                    break;
                }
                current[k] = -r;
                k += 1;
            }
            if k == d {
                break;
            }
        }
        points.sort();
        let origin = vec![0; d];
        let pos = points.iter().position(|p| *p == origin).expect("origin in ball");
        let o = points.remove(pos);
        points.insert(0, o);
        let index: HashMap<Vec<i64>, usize> =
            points.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let mut edges = Vec::new();
        for (i, p) in points.iter().enumerate() {
            for k in 0..d {
                let mut q = p.clone();
                q[k] += 1;
                if let Some(&j) = index.get(&q) {
                    edges.push((i, j));
                }
            }
        }
        Graph::from_edges(points.len(), 0, &edges)?.with_coordinates(points)
    }

    pub fn complete(n: usize) -> Result<Graph> {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        Graph::from_edges(n, 0, &edges)
    }

    /// Path `0 - 1 - ... - (n-1)` rooted at 0, with 1-d coordinates.
    pub fn path(n: usize) -> Result<Graph> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, 0, &edges)?.with_coordinates((0..n as i64).map(|i| vec![i]).collect())
    }

    pub fn cycle(n: usize) -> Result<Graph> {
        if n < 3 {
            return Err(Error::InvalidParameter("cycle needs n >= 3".into()));
        }
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, 0, &edges)
    }

    /// Finite `degree`-regular tree of the given depth: the root and every
    /// internal vertex have `degree` neighbors, leaves have one.
    pub fn regular_tree(degree: usize, depth: usize) -> Result<Graph> {
        if degree < 2 {
            return Err(Error::InvalidParameter("tree degree must be >= 2".into()));
        }
        let mut edges = Vec::new();
        let mut frontier = vec![0usize];
        let mut n = 1;
        for level in 0..depth {
            let mut next = Vec::new();
            for &v in &frontier {
                let children = if level == 0 { degree } else { degree - 1 };
                for _ in 0..children {
                    edges.push((v, n));
                    next.push(n);
                    n += 1;
                }
            }
            frontier = next;
        }
        Graph::from_edges(n, 0, &edges)
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn num_vertices(&self) -> usize {
        self.adjacency.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_oriented(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[v].iter().map(|&(w, _)| w)
    }

    /// Oriented edges leaving `v`, in neighbor order.
    pub fn out_edges(&self, v: usize) -> &[(usize, OrientedEdge)] {
        &self.adjacency[v]
    }

    pub fn tail(&self, o: OrientedEdge) -> usize {
        let (u, v) = self.edges[o.edge()];
        if o.is_backward() {
            v
        } else {
            u
        }
    }

    pub fn head(&self, o: OrientedEdge) -> usize {
        self.tail(o.reverse())
    }

    pub fn endpoints(&self, o: OrientedEdge) -> (usize, usize) {
        (self.tail(o), self.head(o))
    }

    pub fn oriented(&self, from: usize, to: usize) -> Option<OrientedEdge> {
        let adj = self.adjacency.get(from)?;
        adj.binary_search_by_key(&to, |&(w, _)| w).ok().map(|i| adj[i].1)
    }

    pub fn oriented_edges(&self) -> impl Iterator<Item = OrientedEdge> {
        (0..self.num_oriented() as u32).map(OrientedEdge)
    }

    /// `Some(degree)` if every vertex has the same degree.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.degree(0);
        (0..self.num_vertices()).all(|v| self.degree(v) == d).then_some(d)
    }

    pub fn require_regular(&self) -> Result<usize> {
        let d = self.degree(0);
        for v in 0..self.num_vertices() {
            if self.degree(v) != d {
                return Err(Error::NotRegular {
                    vertex: v,
                    degree: self.degree(v),
                    expected: d,
                });
            }
        }
        Ok(d)
    }

    pub fn coords(&self) -> Option<&[Vec<i64>]> {
        self.coords.as_deref()
    }

    pub fn coord(&self, v: usize) -> Option<&[i64]> {
        self.coords.as_ref().map(|c| c[v].as_slice())
    }

    pub fn dimension(&self) -> Option<usize> {
        self.coords.as_ref().map(|c| c[0].len())
    }

    pub fn vertex_at(&self, coord: &[i64]) -> Option<usize> {
        self.coord_index.get(coord).copied()
    }

    /// Vertices reachable from `start` using only vertices accepted by `keep`.
    pub fn reachable_from<F: Fn(usize) -> bool>(&self, start: usize, keep: F) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        if !keep(start) {
            return seen;
        }
        let mut queue = VecDeque::from([start]);
        seen.insert(start);
        while let Some(v) = queue.pop_front() {
            for w in self.neighbors(v) {
                if keep(w) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// True if the subgraph induced by `vertices` is connected.
    pub fn induces_connected(&self, vertices: &BTreeSet<usize>) -> bool {
        match vertices.iter().next() {
            None => false,
            Some(&s) => self.reachable_from(s, |v| vertices.contains(&v)).len() == vertices.len(),
        }
    }
}

/// Dirichlet energy `sum_i sum_{j ~ i} (sqrt(x_i) - sqrt(x_j))^2`.
///
/// Each unordered edge is counted twice. Returns `+inf` unless every entry
/// is strictly positive.
pub fn dirichlet_energy(g: &Graph, x: &[f64]) -> f64 {
    assert_eq!(x.len(), g.num_vertices(), "profile length must match the graph");
    if x.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return f64::INFINITY;
    }
    let mut total = 0.0;
    for &(u, v) in g.edges() {
        let d = x[u].sqrt() - x[v].sqrt();
        total += 2.0 * d * d;
    }
    total
}
