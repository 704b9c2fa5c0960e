use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{CrossingVector, Graph, OrientedEdge};
use crate::error::{Error, Result};

pub const DEFAULT_TREE_LIMIT: usize = 1_000_000;

/// Spanning tree of a vertex set whose edges point towards `root`.
///
/// Every non-root vertex has exactly one outgoing tree edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrientedSpanningTree {
    root: usize,
    parent: BTreeMap<usize, OrientedEdge>,
}

impl OrientedSpanningTree {
    /// Tree consisting of the root only.
    pub fn trivial(root: usize) -> Self {
        OrientedSpanningTree {
            root,
            parent: BTreeMap::new(),
        }
    }

    /// Builds and validates a tree from its parent edges.
    pub fn from_edges(g: &Graph, root: usize, edges: &[OrientedEdge]) -> Result<Self> {
        let mut parent = BTreeMap::new();
        for &o in edges {
            if o.index() >= g.num_oriented() {
                return Err(Error::InvalidParameter(format!("edge {o} out of range")));
            }
            if parent.insert(g.tail(o), o).is_some() {
                return Err(Error::InvalidParameter(format!(
                    "vertex {} has two outgoing tree edges",
                    g.tail(o)
                )));
            }
        }
        let t = OrientedSpanningTree { root, parent };
        t.validate(g)?;
        Ok(t)
    }

    /// Convenience constructor from `(from, to)` pairs.
    pub fn from_pairs(g: &Graph, root: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let edges = pairs
            .iter()
            .map(|&(u, v)| {
                g.oriented(u, v)
                    .ok_or_else(|| Error::InvalidParameter(format!("no edge ({u}, {v})")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_edges(g, root, &edges)
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn edges(&self) -> impl Iterator<Item = OrientedEdge> + '_ {
        self.parent.values().copied()
    }

    pub fn parent_edge(&self, v: usize) -> Option<OrientedEdge> {
        self.parent.get(&v).copied()
    }

    pub fn num_edges(&self) -> usize {
        self.parent.len()
    }

    pub fn vertices(&self) -> BTreeSet<usize> {
        let mut s: BTreeSet<usize> = self.parent.keys().copied().collect();
        s.insert(self.root);
        s
    }

    /// `h_ij(T)`: 1 if the oriented edge belongs to the tree.
    pub fn h(&self, g: &Graph, o: OrientedEdge) -> u64 {
        (self.parent.get(&g.tail(o)) == Some(&o)) as u64
    }

    pub fn contains(&self, g: &Graph, o: OrientedEdge) -> bool {
        self.h(g, o) == 1
    }

    /// Checks that the root has no parent and every parent chain ends at the root.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.root >= g.num_vertices() {
            return Err(Error::InvalidParameter("tree root out of range".into()));
        }
        if self.parent.contains_key(&self.root) {
            return Err(Error::InvalidParameter("tree root has an outgoing edge".into()));
        }
        let vertices = self.vertices();
        for (&v, &o) in &self.parent {
            if g.tail(o) != v {
                return Err(Error::InvalidParameter(format!("edge {o} does not leave {v}")));
            }
            if !vertices.contains(&g.head(o)) {
                return Err(Error::InvalidParameter(format!("edge {o} leaves the tree")));
            }
        }
        for &start in self.parent.keys() {
            let mut v = start;
            let mut steps = 0;
            while v != self.root {
                v = g.head(self.parent[&v]);
                steps += 1;
                if steps > self.parent.len() {
                    return Err(Error::InvalidParameter("tree contains a cycle".into()));
                }
            }
        }
        Ok(())
    }
}

/// All oriented spanning trees of the subgraph induced by `vertices`, rooted at `i1`.
pub fn enumerate_oriented_spanning_trees(
    g: &Graph,
    vertices: &BTreeSet<usize>,
    i1: usize,
) -> Result<Vec<OrientedSpanningTree>> {
    enumerate_oriented_spanning_trees_with_limit(g, vertices, i1, DEFAULT_TREE_LIMIT)
}

pub fn enumerate_oriented_spanning_trees_with_limit(
    g: &Graph,
    vertices: &BTreeSet<usize>,
    i1: usize,
    limit: usize,
) -> Result<Vec<OrientedSpanningTree>> {
    let mut out = Vec::new();
    for_each_tree(g, vertices, i1, limit, |t| out.push(t.clone()))?;
    Ok(out)
}

struct Enumerator<'a, F> {
    g: &'a Graph,
    vertices: &'a BTreeSet<usize>,
    limit: usize,
    count: usize,
    visit: F,
}

impl<F: FnMut(&OrientedSpanningTree)> Enumerator<'_, F> {
    // Grows the tree outward from the root. Each call picks the first
    // frontier edge and branches on including or excluding it, so every
    // tree is produced exactly once.
    fn grow(
        &mut self,
        tree: &mut OrientedSpanningTree,
        inside: &mut BTreeSet<usize>,
        excluded: &mut BTreeSet<usize>,
    ) -> Result<()> {
        if inside.len() == self.vertices.len() {
            self.count += 1;
            if self.count > self.limit {
                return Err(Error::TreeLimitExceeded { limit: self.limit });
            }
            (self.visit)(tree);
            return Ok(());
        }
        let frontier = inside.iter().find_map(|&w| {
            self.g.out_edges(w).iter().find_map(|&(v, o)| {
                (self.vertices.contains(&v) && !inside.contains(&v) && !excluded.contains(&o.edge()))
                    .then_some((v, o.reverse()))
            })
        });
        let Some((v, o)) = frontier else {
            return Ok(());
        };

        inside.insert(v);
        tree.parent.insert(v, o);
        self.grow(tree, inside, excluded)?;
        tree.parent.remove(&v);
        inside.remove(&v);

        excluded.insert(o.edge());
        if self.still_spannable(inside, excluded) {
            self.grow(tree, inside, excluded)?;
        }
        excluded.remove(&o.edge());
        Ok(())
    }

    // Can every outside vertex still be reached from the current tree using
    // non-excluded edges?
    fn still_spannable(&self, inside: &BTreeSet<usize>, excluded: &BTreeSet<usize>) -> bool {
        let mut seen = inside.clone();
        let mut stack: Vec<usize> = inside.iter().copied().collect();
        while let Some(w) = stack.pop() {
            for &(v, o) in self.g.out_edges(w) {
                if self.vertices.contains(&v) && !excluded.contains(&o.edge()) && seen.insert(v) {
                    stack.push(v);
                }
            }
        }
        seen.len() == self.vertices.len()
    }
}

fn check_subgraph(g: &Graph, vertices: &BTreeSet<usize>, i1: usize) -> Result<()> {
    if vertices.iter().any(|&v| v >= g.num_vertices()) {
        return Err(Error::InvalidParameter("vertex out of range".into()));
    }
    if !vertices.contains(&i1) {
        return Err(Error::InvalidParameter(format!("root {i1} not in the vertex set")));
    }
    if !g.induces_connected(vertices) {
        return Err(Error::Disconnected("induced subgraph is disconnected".into()));
    }
    Ok(())
}

fn for_each_tree<F: FnMut(&OrientedSpanningTree)>(
    g: &Graph,
    vertices: &BTreeSet<usize>,
    i1: usize,
    limit: usize,
    visit: F,
) -> Result<()> {
    check_subgraph(g, vertices, i1)?;
    let mut e = Enumerator {
        g,
        vertices,
        limit,
        count: 0,
        visit,
    };
    let mut tree = OrientedSpanningTree::trivial(i1);
    let mut inside = BTreeSet::from([i1]);
    let mut excluded = BTreeSet::new();
    e.grow(&mut tree, &mut inside, &mut excluded)
}

/// `sum_T prod_{(i,j) in T} k_ij` by explicit enumeration.
pub fn tree_sum_by_enumeration(
    g: &Graph,
    vertices: &BTreeSet<usize>,
    k: &CrossingVector,
    i1: usize,
) -> Result<u128> {
    let mut total: u128 = 0;
    for_each_tree(g, vertices, i1, DEFAULT_TREE_LIMIT, |t| {
        total += t.edges().map(|o| k.get(o) as u128).product::<u128>();
    })?;
    Ok(total)
}

/// The same sum as the principal minor of `L_ii = sum_r k_ir`, `L_ij = -k_ij`
/// with the row and column of `i1` deleted.
pub fn tree_sum_by_minor(
    g: &Graph,
    vertices: &BTreeSet<usize>,
    k: &CrossingVector,
    i1: usize,
) -> Result<u128> {
    check_subgraph(g, vertices, i1)?;
    let others: Vec<usize> = vertices.iter().copied().filter(|&v| v != i1).collect();
    let pos: BTreeMap<usize, usize> = others.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = others.len();
    let mut m = vec![vec![0i128; n]; n];
    for (r, &v) in others.iter().enumerate() {
        for &(w, o) in g.out_edges(v) {
            if !vertices.contains(&w) {
                continue;
            }
            let kv = k.get(o) as i128;
            m[r][r] += kv;
            if let Some(&c) = pos.get(&w) {
                m[r][c] -= kv;
            }
        }
    }
    let det = bareiss_determinant(m)?;
    u128::try_from(det).map_err(|_| Error::Overflow("negative tree-sum minor"))
}

/// Weighted tree sum on the support of `k` (plus `i1`), via the minor.
pub fn weighted_tree_sum(g: &Graph, k: &CrossingVector, i1: usize) -> Result<u128> {
    let vertices = k.support(g, &[i1]);
    tree_sum_by_minor(g, &vertices, k, i1)
}

/// Number of undirected spanning trees of the induced subgraph.
pub fn count_spanning_trees(g: &Graph, vertices: &BTreeSet<usize>) -> Result<u128> {
    let first = *vertices
        .iter()
        .next()
        .ok_or_else(|| Error::InvalidParameter("empty vertex set".into()))?;
    let mut ones = CrossingVector::zeros(g);
    for o in g.oriented_edges() {
        ones.set(o, 1);
    }
    tree_sum_by_minor(g, vertices, &ones, first)
}

// Fraction-free Gaussian elimination; exact on integers.
fn bareiss_determinant(mut m: Vec<Vec<i128>>) -> Result<i128> {
    let n = m.len();
    if n == 0 {
        return Ok(1);
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for p in 0..n {
        if m[p][p] == 0 {
            match (p + 1..n).find(|&r| m[r][p] != 0) {
                Some(r) => {
                    m.swap(p, r);
                    sign = -sign;
                }
                None => return Ok(0),
            }
        }
        for i in p + 1..n {
            for j in p + 1..n {
                let num = m[i][j]
                    .checked_mul(m[p][p])
                    .and_then(|x| m[i][p].checked_mul(m[p][j]).and_then(|y| x.checked_sub(y)))
                    .ok_or(Error::Overflow("Bareiss elimination"))?;
                m[i][j] = num / prev;
            }
            m[i][p] = 0;
        }
        prev = m[p][p];
    }
    Ok(sign * m[n - 1][n - 1])
}
