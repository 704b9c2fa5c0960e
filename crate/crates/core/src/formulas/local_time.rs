//! Joint law of crossing counts, local times and the last-exit tree of a
//! directed walk whose edges carry independent clocks.
//!
//! The walk started at the graph root is stopped at total time `t` at the
//! terminal vertex `i1`. Its visited set `V'`, the local times `l` on `V'`,
//! the crossings `k` and the tree of last exits `T` have the density
//!
//! ```text
//! prod_{tail(o) in V'}  P*_o(k_o, l_tail)  if o in T
//!                       P_o(k_o, l_tail)   otherwise
//! ```
//!
//! with respect to counting measure in `(k, T)` and Lebesgue measure on the
//! local times of `V'` minus one coordinate.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::clocks::PointProcess;
use crate::error::{Error, Result};
use crate::graph::{divergence, CrossingVector, Current, Graph, OrientedEdge, OrientedSpanningTree};
use crate::numeric::CompensatedSum;
use crate::sim::Observables;

/// Visited set, local times and last-exit tree; the crossing counts are
/// left free.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub vertices: BTreeSet<usize>,
    /// One entry per vertex of the ambient graph; entries outside
    /// `vertices` are ignored.
    pub local_times: Vec<f64>,
    pub tree: OrientedSpanningTree,
}

impl Profile {
    pub fn new(
        g: &Graph,
        vertices: BTreeSet<usize>,
        local_times: Vec<f64>,
        tree: OrientedSpanningTree,
    ) -> Result<Self> {
        let p = Profile {
            vertices,
            local_times,
            tree,
        };
        p.validate(g)?;
        Ok(p)
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.local_times.len() != g.num_vertices() {
            return Err(Error::InvalidQuery(format!(
                "{} local times for {} vertices",
                self.local_times.len(),
                g.num_vertices()
            )));
        }
        if let Some(&v) = self.vertices.iter().find(|&&v| v >= g.num_vertices()) {
            return Err(Error::InvalidQuery(format!("vertex {v} out of range")));
        }
        if !self.vertices.contains(&g.root()) {
            return Err(Error::InvalidQuery("visited set misses the starting vertex".into()));
        }
        for &v in &self.vertices {
            let l = self.local_times[v];
            if !(l >= 0.0 && l.is_finite()) {
                return Err(Error::InvalidQuery(format!("local time {l} at vertex {v}")));
            }
        }
        self.tree.validate(g)?;
        if self.tree.vertices() != self.vertices {
            return Err(Error::InvalidQuery("tree does not span the visited set".into()));
        }
        Ok(())
    }

    /// The vertex `i1` where the walk sits at the final time.
    pub fn terminal(&self) -> usize {
        self.tree.root()
    }

    pub fn total_time(&self) -> f64 {
        self.vertices.iter().map(|&v| self.local_times[v]).sum()
    }

    pub fn has_zero_time(&self) -> bool {
        self.vertices.iter().any(|&v| self.local_times[v] == 0.0)
    }

    /// Oriented edges with both endpoints in the visited set.
    pub fn inner_edges<'a>(&'a self, g: &'a Graph) -> impl Iterator<Item = OrientedEdge> + 'a {
        g.oriented_edges()
            .filter(move |&o| self.vertices.contains(&g.tail(o)) && self.vertices.contains(&g.head(o)))
    }

    /// Oriented edges leaving the visited set.
    pub fn boundary_edges<'a>(&'a self, g: &'a Graph) -> impl Iterator<Item = OrientedEdge> + 'a {
        g.oriented_edges()
            .filter(move |&o| self.vertices.contains(&g.tail(o)) && !self.vertices.contains(&g.head(o)))
    }

    /// Local time of the source vertex of `o`.
    pub fn tail_time(&self, g: &Graph, o: OrientedEdge) -> f64 {
        self.local_times[g.tail(o)]
    }
}

/// A full point `(V', l, T, k)` of the joint law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalTimeQuery {
    pub profile: Profile,
    pub crossings: CrossingVector,
}

impl LocalTimeQuery {
    pub fn new(g: &Graph, profile: Profile, crossings: CrossingVector) -> Result<Self> {
        let q = LocalTimeQuery { profile, crossings };
        q.validate(g)?;
        Ok(q)
    }

    /// The query realised by an observed trajectory.
    pub fn from_observables(g: &Graph, obs: &Observables) -> Result<Self> {
        let vertices: BTreeSet<usize> = obs.vertex_range.iter().copied().collect();
        let profile = Profile::new(g, vertices, obs.local_times.clone(), obs.last_exit_tree.clone())?;
        Self::new(g, profile, obs.crossings.clone())
    }

    /// Checks support and the divergence constraint
    /// `sum_j (k_ij - k_ji) = 1{i = root} - 1{i = i1}`.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        self.profile.validate(g)?;
        if self.crossings.counts().len() != g.num_oriented() {
            return Err(Error::InvalidQuery("crossing vector has the wrong length".into()));
        }
        let v = &self.profile.vertices;
        for o in g.oriented_edges() {
            if self.crossings.get(o) > 0 && !(v.contains(&g.tail(o)) && v.contains(&g.head(o))) {
                return Err(Error::InvalidQuery(format!("edge {o} crossed outside the visited set")));
            }
        }
        check_divergence(g, &self.crossings, self.profile.terminal())
    }

    /// False when some tree edge was never crossed, in which case the
    /// density vanishes.
    pub fn feasible(&self) -> bool {
        self.profile.tree.edges().all(|o| self.crossings.get(o) >= 1)
    }
}

pub(crate) fn expected_divergence(g: &Graph, i1: usize) -> Vec<i64> {
    let mut want = vec![0i64; g.num_vertices()];
    want[g.root()] += 1;
    want[i1] -= 1;
    want
}

pub(crate) fn check_divergence(g: &Graph, k: &CrossingVector, i1: usize) -> Result<()> {
    let (_, div) = divergence(g, k);
    let want = expected_divergence(g, i1);
    if let Some(v) = (0..g.num_vertices()).find(|&v| div[v] != want[v]) {
        return Err(Error::InvalidQuery(format!(
            "divergence {} at vertex {v}, expected {}",
            div[v], want[v]
        )));
    }
    Ok(())
}

fn edge_factor<C: PointProcess>(c: &C, k: u64, in_tree: bool, l: f64) -> Result<f64> {
    if in_tree {
        c.arrival_density(k, l)
    } else {
        c.count_prob(k, l)
    }
}

fn check_clocks<C>(g: &Graph, clocks: &[C]) -> Result<()> {
    if clocks.len() != g.num_oriented() {
        return Err(Error::InvalidParameter(format!(
            "{} clocks for {} oriented edges",
            clocks.len(),
            g.num_oriented()
        )));
    }
    Ok(())
}

/// Joint density of `(k, l, T)` for per-edge clocks `clocks[o.index()]`.
pub fn product_density<C: PointProcess>(g: &Graph, q: &LocalTimeQuery, clocks: &[C]) -> Result<f64> {
    check_clocks(g, clocks)?;
    q.validate(g)?;
    if !q.feasible() {
        return Ok(0.0);
    }
    let p = &q.profile;
    let mut ln = CompensatedSum::new();
    for o in g.oriented_edges().filter(|&o| p.vertices.contains(&g.tail(o))) {
        let f = edge_factor(&clocks[o.index()], q.crossings.get(o), p.tree.contains(g, o), p.tail_time(g, o))?;
        if f == 0.0 {
            return Ok(0.0);
        }
        ln.add(f.ln());
    }
    Ok(ln.value().exp())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourierOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Largest grid, in points, before giving up.
    pub max_points: usize,
}

impl Default for FourierOptions {
    fn default() -> Self {
        FourierOptions {
            rel_tol: 1e-12,
            abs_tol: 1e-300,
            max_points: 1 << 22,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Approximation {
    pub value: f64,
    /// Size of the last correction.
    pub residual: f64,
    pub evaluations: usize,
}

/// Density of `(l, T)` with the crossings summed out, written as a Fourier
/// integral over one phase per visited vertex (the terminal phase is 0):
///
/// `int Re[ e^{-2 pi i x_root} prod_{o inner} T_o(l_tail, e^{2 pi i (x_tail - x_head)}) ] dx`
///
/// times `P_o(0, l_tail)` for every edge leaving `V'`, where `T_o` is the
/// generating function of `P*` on tree edges and of `P` elsewhere. The
/// integrand is a trigonometric series with fast-decaying coefficients, so
/// the trapezoidal rule is refined by doubling until it settles.
pub fn product_fourier<C: PointProcess>(
    g: &Graph,
    profile: &Profile,
    clocks: &[C],
    opts: FourierOptions,
) -> Result<Approximation> {
    check_clocks(g, clocks)?;
    profile.validate(g)?;
    if profile.has_zero_time() {
        return Ok(Approximation {
            value: 0.0,
            residual: 0.0,
            evaluations: 0,
        });
    }
    let i1 = profile.terminal();
    let mut boundary = 1.0;
    for o in profile.boundary_edges(g) {
        boundary *= clocks[o.index()].count_prob(0, profile.tail_time(g, o))?;
    }
    // phase slot of each visited vertex; the terminal vertex has none
    let free: Vec<usize> = profile.vertices.iter().copied().filter(|&v| v != i1).collect();
    let slot = |v: usize| free.iter().position(|&w| w == v);
    let dim = free.len();
    let inner: Vec<OrientedEdge> = profile.inner_edges(g).collect();

    let grid_value = |m: usize| -> Result<f64> {
        // transform of every inner edge at each phase difference j/m
        let mut tables = Vec::with_capacity(inner.len());
        for &o in &inner {
            let c = &clocks[o.index()];
            let l = profile.tail_time(g, o);
            let tree = profile.tree.contains(g, o);
            let mut row = Vec::with_capacity(m);
            for j in 0..m {
                let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / m as f64);
                row.push(if tree { c.transform_star(l, w)? } else { c.transform(l, w)? });
            }
            tables.push(row);
        }
        let source: Vec<Complex64> = (0..m)
            .map(|j| Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * j as f64 / m as f64))
            .collect();
        let slots: Vec<(Option<usize>, Option<usize>)> =
            inner.iter().map(|&o| (slot(g.tail(o)), slot(g.head(o)))).collect();
        let root_slot = slot(g.root());
        let mut idx = vec![0usize; dim];
        let mut sum = CompensatedSum::new();
        let total = m.pow(dim as u32);
        for _ in 0..total {
            let phase = |s: Option<usize>| s.map_or(0, |s| idx[s]);
            let mut z = match root_slot {
                Some(s) => source[idx[s]],
                None => Complex64::new(1.0, 0.0),
            };
            for (e, &(t, h)) in slots.iter().enumerate() {
                z *= tables[e][(phase(t) + m - phase(h)) % m];
            }
            sum.add(z.re);
            for d in idx.iter_mut() {
                *d += 1;
                if *d < m {
                    break;
                }
                *d = 0;
            }
        }
        Ok(sum.value() / total as f64)
    };

    if dim == 0 {
        let v = grid_value(1)?;
        return Ok(Approximation {
            value: boundary * v,
            residual: 0.0,
            evaluations: 1,
        });
    }
    let mut m = 4usize;
    let mut prev = grid_value(m)?;
    let mut evaluations = m.pow(dim as u32);
    loop {
        let next_points = (2 * m).checked_pow(dim as u32).unwrap_or(usize::MAX);
        if next_points > opts.max_points {
            return Err(Error::NonConvergence {
                what: "Fourier trapezoidal rule",
                residual: f64::NAN,
            });
        }
        m *= 2;
        let cur = grid_value(m)?;
        evaluations += next_points;
        let diff = (cur - prev).abs();
        if diff <= opts.rel_tol * cur.abs() + opts.abs_tol {
            return Ok(Approximation {
                value: boundary * cur,
                residual: boundary * diff,
                evaluations,
            });
        }
        if next_points.saturating_mul(1 << dim) > opts.max_points {
            return Err(Error::NonConvergence {
                what: "Fourier trapezoidal rule",
                residual: boundary * diff,
            });
        }
        prev = cur;
    }
}

/// `b(k) - h + h^rev`: the net current of the crossings not used by the tree.
pub fn adjusted_current(g: &Graph, k: &CrossingVector, tree: &OrientedSpanningTree) -> Current {
    let mut b = Current::zeros(g);
    for e in 0..g.num_edges() {
        let o = OrientedEdge::new(e, false);
        let r = o.reverse();
        let net = (k.get(o) as i64 - tree.h(g, o) as i64) - (k.get(r) as i64 - tree.h(g, r) as i64);
        b.set(o, net);
    }
    b
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesOptions {
    pub rel_tol: f64,
    pub max_terms: usize,
    /// Largest `|c|_inf` of the cycle coefficients.
    pub max_shell: usize,
    pub max_cycles: usize,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions {
            rel_tol: 1e-14,
            max_terms: 100_000,
            max_shell: 64,
            max_cycles: 6,
        }
    }
}

/// `sum_{m >= 0} F(o, m + b+) F(rev o, m + b-)` for one undirected edge with
/// net current `beta` along `o`, with a geometric tail estimate.
fn edge_series<F>(o: OrientedEdge, beta: i64, factor: &F, opts: &SeriesOptions) -> Result<(f64, f64)>
where
    F: Fn(OrientedEdge, u64) -> Result<f64>,
{
    let (shift_f, shift_r) = if beta >= 0 { (beta as u64, 0) } else { (0, (-beta) as u64) };
    let mut sum = CompensatedSum::new();
    let mut last = 0.0;
    for m in 0..opts.max_terms as u64 {
        let term = factor(o, m + shift_f)? * factor(o.reverse(), m + shift_r)?;
        sum.add(term);
        let s = sum.value();
        if m >= 2 && last > 0.0 {
            let r = term / last;
            if r < 1.0 {
                let tail = term * r / (1.0 - r);
                if tail <= opts.rel_tol * s {
                    return Ok((s, tail));
                }
            }
        }
        if m >= 2 && term == 0.0 && last == 0.0 && s > 0.0 {
            return Ok((s, 0.0));
        }
        last = term;
    }
    Err(Error::NonConvergence {
        what: "crossing series",
        residual: last,
    })
}

/// Sum of the per-edge products over all crossing vectors whose net current
/// on the visited set is `b`. Edges leaving the set contribute `F(o, 0)`.
pub fn ksum_fixed_current<F>(g: &Graph, profile: &Profile, b: &Current, factor: F, opts: SeriesOptions) -> Result<Approximation>
where
    F: Fn(OrientedEdge, u64) -> Result<f64>,
{
    let mut value = 1.0;
    let mut rel_tail = 0.0;
    let mut evaluations = 0;
    for o in profile.inner_edges(g).filter(|o| !o.is_backward()) {
        let (s, tail) = edge_series(o, b.get(o), &factor, &opts)?;
        evaluations += 1;
        if s == 0.0 {
            return Ok(Approximation {
                value: 0.0,
                residual: 0.0,
                evaluations,
            });
        }
        value *= s;
        rel_tail += tail / s;
    }
    for o in profile.boundary_edges(g) {
        value *= factor(o, 0)?;
    }
    Ok(Approximation {
        value,
        residual: value * rel_tail,
        evaluations,
    })
}

/// Spanning-tree parents (towards the graph root) of the subgraph induced
/// by the visited set.
fn bfs_parents(g: &Graph, vertices: &BTreeSet<usize>) -> Result<HashMap<usize, OrientedEdge>> {
    let mut parent = HashMap::new();
    let mut seen = BTreeSet::from([g.root()]);
    let mut queue = VecDeque::from([g.root()]);
    while let Some(v) = queue.pop_front() {
        for &(w, o) in g.out_edges(v) {
            if vertices.contains(&w) && seen.insert(w) {
                parent.insert(w, o.reverse());
                queue.push_back(w);
            }
        }
    }
    if seen.len() != vertices.len() {
        return Err(Error::Disconnected("visited set is not connected".into()));
    }
    Ok(parent)
}

fn add_path_to_root(g: &Graph, parent: &HashMap<usize, OrientedEdge>, mut v: usize, sign: i64, b: &mut Current) {
    while let Some(&o) = parent.get(&v) {
        b.add(o, sign);
        v = g.head(o);
    }
}

/// Integer basis of the currents on the visited set with divergence
/// `1{root} - 1{i1}`: a particular solution and the fundamental cycles.
pub fn current_basis(g: &Graph, vertices: &BTreeSet<usize>, i1: usize) -> Result<(Current, Vec<Current>)> {
    let parent = bfs_parents(g, vertices)?;
    let mut particular = Current::zeros(g);
    add_path_to_root(g, &parent, i1, -1, &mut particular);
    let tree_edges: BTreeSet<usize> = parent.values().map(|o| o.edge()).collect();
    let mut cycles = Vec::new();
    for e in 0..g.num_edges() {
        let (u, v) = g.edges()[e];
        if tree_edges.contains(&e) || !vertices.contains(&u) || !vertices.contains(&v) {
            continue;
        }
        let mut z = Current::zeros(g);
        z.add(OrientedEdge::new(e, false), 1);
        add_path_to_root(g, &parent, v, 1, &mut z);
        add_path_to_root(g, &parent, u, -1, &mut z);
        cycles.push(z);
    }
    Ok((particular, cycles))
}

/// Sum over all crossing vectors compatible with `profile`, shell by shell
/// in the cycle coefficients.
pub fn ksum_with<F>(g: &Graph, profile: &Profile, factor: F, opts: SeriesOptions) -> Result<Approximation>
where
    F: Fn(OrientedEdge, u64) -> Result<f64>,
{
    profile.validate(g)?;
    let (base, cycles) = current_basis(g, &profile.vertices, profile.terminal())?;
    if cycles.len() > opts.max_cycles {
        return Err(Error::InvalidQuery(format!(
            "{} independent cycles, at most {} supported",
            cycles.len(),
            opts.max_cycles
        )));
    }
    let mut total = CompensatedSum::new();
    let mut residual = 0.0;
    let mut evaluations = 0;
    let mut quiet = 0;
    let n = cycles.len() as i64;
    for s in 0..=opts.max_shell as i64 {
        let mut shell = CompensatedSum::new();
        let mut coeffs = vec![-s; n as usize];
        loop {
            if coeffs.iter().any(|c| c.abs() == s) || s == 0 {
                let mut b = base.clone();
                for (z, &c) in cycles.iter().zip(&coeffs) {
                    for e in 0..g.num_edges() {
                        let o = OrientedEdge::new(e, false);
                        if z.get(o) != 0 {
                            b.add(o, c * z.get(o));
                        }
                    }
                }
                let a = ksum_fixed_current(g, profile, &b, &factor, opts)?;
                shell.add(a.value);
                residual += a.residual;
                evaluations += a.evaluations;
            }
            let mut i = 0;
            while i < coeffs.len() {
                coeffs[i] += 1;
                if coeffs[i] <= s {
                    break;
                }
                coeffs[i] = -s;
                i += 1;
            }
            if i == coeffs.len() {
                break;
            }
        }
        let sv = shell.value();
        total.add(sv);
        if n == 0 {
            break;
        }
        if s >= 1 && sv <= opts.rel_tol * total.value() {
            quiet += 1;
            residual += sv;
            if quiet == 2 {
                return Ok(Approximation {
                    value: total.value(),
                    residual,
                    evaluations,
                });
            }
        } else {
            quiet = 0;
        }
    }
    if n > 0 {
        return Err(Error::NonConvergence {
            what: "cycle shells",
            residual,
        });
    }
    Ok(Approximation {
        value: total.value(),
        residual,
        evaluations,
    })
}

/// The crossings summed out of [`product_density`] directly.
pub fn product_ksum<C: PointProcess>(g: &Graph, profile: &Profile, clocks: &[C], opts: SeriesOptions) -> Result<Approximation> {
    check_clocks(g, clocks)?;
    ksum_with(
        g,
        profile,
        |o, k| edge_factor(&clocks[o.index()], k, profile.tree.contains(g, o), profile.tail_time(g, o)),
        opts,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::Clock;
    use crate::graph::enumerate_oriented_spanning_trees;

    fn k3_profile(g: &Graph, l: [f64; 3], i1: usize, parents: &[(usize, usize)]) -> Profile {
        let tree = OrientedSpanningTree::from_pairs(g, i1, parents).unwrap();
        Profile::new(g, BTreeSet::from([0, 1, 2]), l.to_vec(), tree).unwrap()
    }

    #[test]
    fn two_vertex_density_by_hand() {
        // K2, walk 0 -> 1 -> 0 -> 1 with unit-rate clocks
        let g = Graph::complete(2).unwrap();
        let k = CrossingVector::from_pairs(&g, &[(0, 1, 2), (1, 0, 1)]).unwrap();
        let tree = OrientedSpanningTree::from_pairs(&g, 1, &[(0, 1)]).unwrap();
        let profile = Profile::new(&g, BTreeSet::from([0, 1]), vec![0.7, 0.4], tree).unwrap();
        let q = LocalTimeQuery::new(&g, profile, k).unwrap();
        let clocks = Clock::uniform(&g, Clock::Poisson { rate: 1.0 });
        let d = product_density(&g, &q, &clocks).unwrap();
        // P*(2, 0.7) P(1, 0.4)
        let want = 0.7 * (-0.7f64).exp() * 0.4 * (-0.4f64).exp();
        assert!((d - want).abs() < 1e-15);
    }

    #[test]
    fn divergence_and_support_are_checked() {
        let g = Graph::complete(2).unwrap();
        let tree = OrientedSpanningTree::from_pairs(&g, 1, &[(0, 1)]).unwrap();
        let profile = Profile::new(&g, BTreeSet::from([0, 1]), vec![0.7, 0.4], tree).unwrap();
        let bad = CrossingVector::from_pairs(&g, &[(0, 1, 2), (1, 0, 2)]).unwrap();
        assert!(matches!(LocalTimeQuery::new(&g, profile.clone(), bad), Err(Error::InvalidQuery(_))));
        let lone = OrientedSpanningTree::trivial(1);
        assert!(Profile::new(&g, BTreeSet::from([1]), vec![0.0, 1.0], lone).is_err());
    }

    #[test]
    fn tree_edge_without_crossing_gives_zero() {
        let g = Graph::complete(3).unwrap();
        let profile = k3_profile(&g, [0.5, 0.5, 0.5], 0, &[(1, 0), (2, 1)]);
        // 0 -> 2 -> 1 -> 0: tree edge 2 -> 1 crossed, 1 -> 0 crossed
        let k = CrossingVector::from_pairs(&g, &[(0, 2, 1), (2, 1, 1), (1, 0, 1)]).unwrap();
        let q = LocalTimeQuery::new(&g, profile, k).unwrap();
        assert!(q.feasible());
        let k2 = CrossingVector::from_pairs(&g, &[(0, 1, 1), (1, 2, 1), (2, 0, 1)]).unwrap();
        let q2 = LocalTimeQuery::new(&g, q.profile.clone(), k2).unwrap();
        assert!(!q2.feasible());
        let clocks = Clock::uniform(&g, Clock::Poisson { rate: 1.0 });
        assert_eq!(product_density(&g, &q2, &clocks).unwrap(), 0.0);
    }

    #[test]
    fn fourier_matches_crossing_sum() {
        let g = Graph::complete(3).unwrap();
        let clocks_list = [
            Clock::uniform(&g, Clock::Poisson { rate: 1.0 }),
            Clock::uniform(&g, Clock::OnceReinforced { a: 0.4 }),
        ];
        for clocks in &clocks_list {
            for tree in enumerate_oriented_spanning_trees(&g, &BTreeSet::from([0, 1, 2]), 2).unwrap() {
                let profile = Profile::new(&g, BTreeSet::from([0, 1, 2]), vec![0.6, 1.1, 0.3], tree).unwrap();
                let f = product_fourier(&g, &profile, clocks, FourierOptions::default()).unwrap();
                let s = product_ksum(&g, &profile, clocks, SeriesOptions::default()).unwrap();
                assert!((f.value - s.value).abs() <= 1e-12 * s.value, "{} vs {}", f.value, s.value);
            }
        }
    }

    #[test]
    fn fourier_on_a_path_with_boundary() {
        // visited set {0, 1} inside the path 0 - 1 - 2: edge 1 -> 2 is boundary
        let g = Graph::path(3).unwrap();
        let tree = OrientedSpanningTree::from_pairs(&g, 0, &[(1, 0)]).unwrap();
        let profile = Profile::new(&g, BTreeSet::from([0, 1]), vec![0.5, 0.8, 0.0], tree).unwrap();
        let clocks = Clock::uniform(&g, Clock::Poisson { rate: 1.0 });
        let f = product_fourier(&g, &profile, &clocks, FourierOptions::default()).unwrap();
        let s = product_ksum(&g, &profile, &clocks, SeriesOptions::default()).unwrap();
        assert!((f.value - s.value).abs() <= 1e-13 * s.value);
        // closed form: sum_m P(m+1? ...) with k_01 = k_10 + 0 and k_10 >= 1
        let direct: f64 = (1..60u64)
            .map(|m| {
                let p = Clock::Poisson { rate: 1.0 };
                p.count_prob(m, 0.5).unwrap() * p.arrival_density(m, 0.8).unwrap()
            })
            .sum::<f64>()
            * (-0.8f64).exp();
        assert!((s.value - direct).abs() < 1e-14);
    }

    #[test]
    fn basis_has_right_divergence() {
        let g = Graph::complete(4).unwrap();
        let v = BTreeSet::from([0, 1, 2, 3]);
        let (b, cycles) = current_basis(&g, &v, 3).unwrap();
        assert_eq!(cycles.len(), 3);
        assert_eq!(b.vertex_divergence(&g), expected_divergence(&g, 3));
        for z in &cycles {
            assert!(z.vertex_divergence(&g).iter().all(|&d| d == 0));
        }
    }

    #[test]
    fn adjusted_current_removes_tree() {
        let g = Graph::complete(2).unwrap();
        let k = CrossingVector::from_pairs(&g, &[(0, 1, 3), (1, 0, 2)]).unwrap();
        let tree = OrientedSpanningTree::from_pairs(&g, 1, &[(0, 1)]).unwrap();
        let b = adjusted_current(&g, &k, &tree);
        assert_eq!(b.get(g.oriented(0, 1).unwrap()), 0);
    }
}
