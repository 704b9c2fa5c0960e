//! Specialisations of the clock-product density: random environments,
//! strictly increasing reinforcement, and once-reinforced directed walks.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::clocks::{geometric_mixture, Clock};
use super::hypoexp::{check_distinct, exp_partial_fractions, theta};
use super::local_time::{check_divergence, ksum_fixed_current, product_density, Approximation, LocalTimeQuery, Profile, SeriesOptions};
use super::special::{bessel_jvw, scaled_lower_gamma};
use crate::error::{Error, Result};
use crate::graph::{divergence, weighted_tree_sum, CrossingVector, Current, Graph, OrientedEdge};
use crate::numeric::{ln_factorial, ln_gamma, CompensatedSum};
use crate::sim::Reinforcement;

/// `E[prod_j w_j^{n_j}]` for `w` uniform on the simplex of dimension
/// `delta - 1`: `Gamma(delta) / Gamma(delta + |n|) prod_j n_j!`.
pub fn dirichlet_moment(delta: usize, n: &[u64]) -> f64 {
    let total: u64 = n.iter().sum();
    let ln = ln_gamma(delta as f64) - ln_gamma((delta as u64 + total) as f64)
        + n.iter().map(|&x| ln_factorial(x)).sum::<f64>();
    ln.exp()
}

fn positive_times(vertices: &BTreeSet<usize>, l: &[f64]) -> Result<()> {
    match vertices.iter().find(|&&v| !(l[v] > 0.0)) {
        Some(&v) => Err(Error::InvalidQuery(format!("local time at vertex {v} must be positive"))),
        None => Ok(()),
    }
}

/// Annealed density of `(k, l, T)` for a walk in an i.i.d. random
/// environment on a regular graph. `psi(v, n)` is the joint moment of the
/// transition probabilities out of `v`, with `n` listed in the order of
/// `g.out_edges(v)`.
pub fn rwre_density<P>(g: &Graph, q: &LocalTimeQuery, psi: P) -> Result<f64>
where
    P: Fn(usize, &[u64]) -> f64,
{
    g.require_regular()?;
    q.validate(g)?;
    let p = &q.profile;
    positive_times(&p.vertices, &p.local_times)?;
    if !q.feasible() {
        return Ok(0.0);
    }
    let i1 = p.terminal();
    let mut ln = CompensatedSum::new();
    ln.add(-p.total_time() + p.local_times[i1].ln());
    for &v in &p.vertices {
        let counts: Vec<u64> = g.out_edges(v).iter().map(|&(_, o)| q.crossings.get(o)).collect();
        let kv: u64 = counts.iter().sum();
        ln.add((kv as f64 - 1.0) * p.local_times[v].ln());
        let moment = psi(v, &counts);
        if moment == 0.0 {
            return Ok(0.0);
        }
        ln.add(moment.ln());
        for &(_, o) in g.out_edges(v) {
            ln.add(-ln_factorial(q.crossings.get(o) - p.tree.h(g, o)));
        }
    }
    Ok(ln.value().exp())
}

/// `V' = supp(k) + {root, i1}` after checking the flow constraint.
fn dirichlet_vertices(g: &Graph, k: &CrossingVector, i1: usize) -> Result<BTreeSet<usize>> {
    if i1 >= g.num_vertices() {
        return Err(Error::InvalidQuery(format!("terminal vertex {i1} out of range")));
    }
    check_divergence(g, k, i1)?;
    Ok(k.support(g, &[g.root(), i1]))
}

fn tree_sum_or_zero(g: &Graph, k: &CrossingVector, i1: usize) -> Result<f64> {
    match weighted_tree_sum(g, k, i1) {
        Ok(s) => Ok(s as f64),
        // crossings on a component the walk cannot reach
        Err(Error::Disconnected(_)) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// Density of `(k, l)` for the walk in an i.i.d. uniform (Dirichlet(1,...,1))
/// environment, summed over last-exit trees:
/// `e^{-t} Gamma(D)^{|V'|} prod_i l_i^{k_i - 1} / Gamma(k_i + D) * l_{i1} * sum_T prod_T k`.
pub fn dirichlet_density(g: &Graph, k: &CrossingVector, local_times: &[f64], i1: usize) -> Result<f64> {
    let delta = g.require_regular()? as f64;
    let vertices = dirichlet_vertices(g, k, i1)?;
    if local_times.len() != g.num_vertices() {
        return Err(Error::InvalidQuery("one local time per vertex expected".into()));
    }
    positive_times(&vertices, local_times)?;
    let trees = tree_sum_or_zero(g, k, i1)?;
    if trees == 0.0 {
        return Ok(0.0);
    }
    let t: f64 = vertices.iter().map(|&v| local_times[v]).sum();
    let mut ln = CompensatedSum::new();
    ln.add(-t + vertices.len() as f64 * ln_gamma(delta) + local_times[i1].ln() + trees.ln());
    for &v in &vertices {
        let kv = k.out_count(g, v) as f64;
        ln.add((kv - 1.0) * local_times[v].ln() - ln_gamma(kv + delta));
    }
    Ok(ln.value().exp())
}

/// Probability that the Dirichlet-environment walk has crossing vector `k`
/// and sits at `i1` at time `t`:
/// `e^{-t} Gamma(D)^{|V'|} t^|k| / |k|! prod_i Gamma(k_i + 1{i = i1}) / Gamma(k_i + D) * sum_T prod_T k`.
pub fn dirichlet_k_prob(g: &Graph, k: &CrossingVector, t: f64, i1: usize) -> Result<f64> {
    let delta = g.require_regular()? as f64;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("time {t}")));
    }
    let vertices = dirichlet_vertices(g, k, i1)?;
    let total = k.total();
    if t == 0.0 {
        return Ok((total == 0) as u8 as f64);
    }
    let trees = tree_sum_or_zero(g, k, i1)?;
    if trees == 0.0 {
        return Ok(0.0);
    }
    let mut ln = CompensatedSum::new();
    ln.add(-t + vertices.len() as f64 * ln_gamma(delta) + total as f64 * t.ln() - ln_factorial(total) + trees.ln());
    for &v in &vertices {
        let kv = k.out_count(g, v) as f64;
        let shift = (v == i1) as u8 as f64;
        ln.add(ln_gamma(kv + shift) - ln_gamma(kv + delta));
    }
    Ok(ln.value().exp())
}

/// Density for the directed walk reinforced by a strictly monotone `f`,
/// written as `Theta(f, k)` times one partial-fraction sum per edge:
/// `sum_{i <= k+1-h} Lambda(k+1-h, i) e^{-f(i) l}`.
pub fn derrw_density(g: &Graph, q: &LocalTimeQuery, f: &Reinforcement) -> Result<f64> {
    q.validate(g)?;
    let p = &q.profile;
    let needed = g
        .oriented_edges()
        .filter(|&o| p.vertices.contains(&g.tail(o)))
        .map(|o| q.crossings.get(o) + 1)
        .max()
        .unwrap_or(1);
    f.validate(needed)?;
    check_distinct(&f.values(needed.max(3)))?;
    if !q.feasible() {
        return Ok(0.0);
    }
    let mut value = theta(g, f, &q.crossings);
    for o in g.oriented_edges().filter(|&o| p.vertices.contains(&g.tail(o))) {
        let m = q.crossings.get(o) + 1 - p.tree.h(g, o);
        value *= exp_partial_fractions(&f.values(m), p.tail_time(g, o))?;
    }
    Ok(value)
}

fn check_a(a: f64) -> Result<()> {
    if a > 0.0 && a < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("a = {a} outside (0, 1)")))
    }
}

/// `a^{1{h=1 or k>=1}} e^{-a l} gamma(k-h, (1-a) l) / ((1-a)^{k-h} Gamma(k-h))`,
/// with the gamma ratio read as 1 when `k = h`.
pub fn dorrw_gamma_factor(a: f64, k: u64, h: u64, l: f64) -> Result<f64> {
    if k < h {
        return Ok(0.0);
    }
    let n = k - h;
    let mut ln = -a * l;
    if h == 1 || k >= 1 {
        ln += a.ln();
    }
    if n > 0 {
        if l == 0.0 {
            return Ok(0.0);
        }
        let x = (1.0 - a) * l;
        // gamma(n, x) / (1-a)^n = l^n * gamma(n, x) / x^n
        ln += n as f64 * l.ln() + scaled_lower_gamma(n as f64, x)?.ln() - ln_gamma(n as f64);
    }
    Ok(ln.exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DorrwForms {
    /// Density at the queried `k`.
    pub gamma_form: f64,
    /// Density summed over all `k` with the same reduced current as the query.
    pub bessel_form: f64,
}

/// `a^{N+} / (1-a)^{|k| - |T|} e^{-a sum_i deg_i l_i} prod gamma(k-h, (1-a) l) / Gamma(k-h)`
/// where `N+` counts the oriented edges out of `V'` that are in `T` or crossed.
pub fn dorrw_gamma_form(g: &Graph, q: &LocalTimeQuery, a: f64) -> Result<f64> {
    check_a(a)?;
    q.validate(g)?;
    if !q.feasible() {
        return Ok(0.0);
    }
    let p = &q.profile;
    let mut ln = CompensatedSum::new();
    for o in g.oriented_edges().filter(|&o| p.vertices.contains(&g.tail(o))) {
        let v = dorrw_gamma_factor(a, q.crossings.get(o), p.tree.h(g, o), p.tail_time(g, o))?;
        if v == 0.0 {
            return Ok(0.0);
        }
        ln.add(v.ln());
    }
    Ok(ln.value().exp())
}

/// The gamma form summed over every crossing vector whose net current on
/// `V'` is `b` (not the reduced current).
pub fn dorrw_gamma_ksum(g: &Graph, profile: &Profile, b: &Current, a: f64) -> Result<Approximation> {
    check_a(a)?;
    profile.validate(g)?;
    ksum_fixed_current(
        g,
        profile,
        b,
        |o, k| dorrw_gamma_factor(a, k, profile.tree.h(g, o), profile.tail_time(g, o)),
        SeriesOptions::default(),
    )
}

/// `E_{D,D'}[(l_i/l_j)^{(beta+D-D')/2} J_{beta+D,D'}(2 sqrt(l_i l_j))]`.
fn bessel_mixture(a: f64, beta: u64, li: f64, lj: f64) -> f64 {
    let z = 2.0 * (li * lj).sqrt();
    let ln_ratio = li.ln() - lj.ln();
    let ln_q = (1.0 - a).ln();
    let cutoff = z + 8.0;
    let mut total = CompensatedSum::new();
    for d in 0..10_000u64 {
        let mut row = CompensatedSum::new();
        for e in 0..10_000u64 {
            let exponent = (beta as f64 + d as f64 - e as f64) / 2.0;
            let weight = (2.0 * a.ln() + (d + e) as f64 * ln_q + exponent * ln_ratio).exp();
            let term = weight * bessel_jvw((beta + d) as u32, e as u32, z);
            row.add(term);
            if e as f64 > cutoff && term <= 1e-18 * (row.value() + total.value()) {
                break;
            }
        }
        let r = row.value();
        total.add(r);
        if d as f64 > cutoff && r <= 1e-18 * total.value() {
            break;
        }
    }
    total.value()
}

/// The density of `(l, T)` together with the event that the reduced current
/// `k - h - (k - h)^rev` equals `b_red`, in geometric-mixture / Bessel form.
pub fn dorrw_bessel_form(g: &Graph, profile: &Profile, b_red: &Current, a: f64) -> Result<f64> {
    check_a(a)?;
    profile.validate(g)?;
    positive_times(&profile.vertices, &profile.local_times)?;
    let l = &profile.local_times;
    let mut ln = CompensatedSum::new();
    for o in profile.inner_edges(g).filter(|o| !o.is_backward()) {
        // orient so that the reduced current is nonnegative
        let o = if b_red.get(o) < 0 { o.reverse() } else { o };
        let beta = b_red.get(o) as u64;
        let (i, j) = g.endpoints(o);
        let main = bessel_mixture(a, beta, l[i], l[j]);
        let fi = geometric_mixture(beta, a, l[i]);
        let fj = geometric_mixture(0, a, l[j]);
        let untouched = |o: OrientedEdge, n: u64| n == 0 && profile.tree.h(g, o) == 0;
        let gi = if untouched(o, beta) { fi / a } else { fi };
        let gj = if untouched(o.reverse(), 0) { fj / a } else { fj };
        let s = main + gi * gj - fi * fj;
        if s <= 0.0 {
            return Ok(0.0);
        }
        ln.add(s.ln() - l[i] - l[j]);
    }
    for o in profile.boundary_edges(g) {
        ln.add(-a * profile.tail_time(g, o));
    }
    Ok(ln.value().exp())
}

pub fn dorrw_density(g: &Graph, q: &LocalTimeQuery, a: f64) -> Result<DorrwForms> {
    let gamma_form = dorrw_gamma_form(g, q, a)?;
    let b_red = super::local_time::adjusted_current(g, &q.crossings, &q.profile.tree);
    let bessel_form = dorrw_bessel_form(g, &q.profile, &b_red, a)?;
    Ok(DorrwForms {
        gamma_form,
        bessel_form,
    })
}

/// Net current `b(k)` restricted to a fixed query, for [`dorrw_gamma_ksum`].
pub fn net_current(g: &Graph, k: &CrossingVector) -> Current {
    divergence(g, k).0
}

fn n_plus(g: &Graph, q: &LocalTimeQuery) -> i32 {
    let p = &q.profile;
    g.oriented_edges()
        .filter(|&o| p.vertices.contains(&g.tail(o)))
        .filter(|&o| p.tree.contains(g, o) || q.crossings.get(o) >= 1)
        .count() as i32
}

fn exposure_factor(g: &Graph, p: &Profile, a: f64) -> f64 {
    let s: f64 = p.vertices.iter().map(|&v| g.degree(v) as f64 * p.local_times[v]).sum();
    ((1.0 - a) * s).exp()
}

fn rate_one_density(g: &Graph, q: &LocalTimeQuery) -> Result<f64> {
    product_density(g, q, &Clock::uniform(g, Clock::Poisson { rate: 1.0 }))
}

/// `a^{N+} e^{(1-a) sum_i deg_i l_i}` times the rate-one density. Every
/// edge factor of the gamma form is at most the matching rate-one factor
/// times `a e^{(1-a) l}` (or `e^{(1-a) l}` for untouched edges), because
/// `gamma(n, x) <= x^n / n`.
pub fn dorrw_upper_bound(g: &Graph, q: &LocalTimeQuery, a: f64) -> Result<f64> {
    check_a(a)?;
    Ok(a.powi(n_plus(g, q)) * exposure_factor(g, &q.profile, a) * rate_one_density(g, q)?)
}

/// The same bound with `a^{|V'|}` in front. This is smaller than the gamma
/// form on some queries, e.g. a single crossing of `K2`.
pub fn dorrw_vertex_count_bound(g: &Graph, q: &LocalTimeQuery, a: f64) -> Result<f64> {
    check_a(a)?;
    let n = q.profile.vertices.len() as i32;
    Ok(a.powi(n) * exposure_factor(g, &q.profile, a) * rate_one_density(g, q)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::local_time::adjusted_current;
    use crate::graph::{enumerate_oriented_spanning_trees, OrientedSpanningTree};

    fn k2_query(g: &Graph, k01: u64, k10: u64, l: [f64; 2], i1: usize) -> LocalTimeQuery {
        let tree = if i1 == 1 {
            OrientedSpanningTree::from_pairs(g, 1, &[(0, 1)]).unwrap()
        } else {
            OrientedSpanningTree::from_pairs(g, 0, &[(1, 0)]).unwrap()
        };
        let k = CrossingVector::from_pairs(g, &[(0, 1, k01), (1, 0, k10)]).unwrap();
        let profile = Profile::new(g, BTreeSet::from([0, 1]), l.to_vec(), tree).unwrap();
        LocalTimeQuery::new(g, profile, k).unwrap()
    }

    #[test]
    fn moments() {
        assert!((dirichlet_moment(1, &[5]) - 1.0).abs() < 1e-13);
        // E[w^2] for w ~ U(0,1) is 1/3
        assert!((dirichlet_moment(2, &[2, 0]) - 1.0 / 3.0).abs() < 1e-15);
        // E[w(1-w)] = 1/6
        assert!((dirichlet_moment(2, &[1, 1]) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn rwre_with_unit_environment_is_rate_one() {
        let g = Graph::complete(2).unwrap();
        for (k01, k10, i1) in [(1, 0, 1), (2, 1, 1), (2, 2, 0)] {
            let q = k2_query(&g, k01, k10, [0.4, 0.9], i1);
            let r = rwre_density(&g, &q, |_, _| 1.0).unwrap();
            let p = rate_one_density(&g, &q).unwrap();
            assert!((r - p).abs() <= 1e-12 * p, "{k01} {k10}");
        }
    }

    #[test]
    fn rwre_tree_sum_is_dirichlet_density() {
        let g = Graph::complete(3).unwrap();
        let k = CrossingVector::from_pairs(&g, &[(0, 1, 2), (1, 2, 1), (2, 0, 1), (1, 0, 1), (2, 1, 1), (0, 2, 1)]).unwrap();
        // div: 0 -> 3 out, 2 in; 1 -> 2 out, 3 in
        let i1 = 1;
        let l = vec![0.3, 0.5, 0.8];
        let mut sum = 0.0;
        for tree in enumerate_oriented_spanning_trees(&g, &BTreeSet::from([0, 1, 2]), i1).unwrap() {
            let profile = Profile::new(&g, BTreeSet::from([0, 1, 2]), l.clone(), tree).unwrap();
            let q = LocalTimeQuery::new(&g, profile, k.clone()).unwrap();
            sum += rwre_density(&g, &q, |_, n| dirichlet_moment(2, n)).unwrap();
        }
        let d = dirichlet_density(&g, &k, &l, i1).unwrap();
        assert!((sum - d).abs() <= 1e-12 * d);
    }

    #[test]
    fn dirichlet_two_point_chain() {
        let g = Graph::complete(2).unwrap();
        let k = CrossingVector::from_pairs(&g, &[(0, 1, 1)]).unwrap();
        for t in [0.1, 1.0, 3.5] {
            let p = dirichlet_k_prob(&g, &k, t, 1).unwrap();
            assert!((p - t * (-t as f64).exp()).abs() < 1e-15);
        }
        assert_eq!(dirichlet_k_prob(&g, &k, 0.0, 1).unwrap(), 0.0);
        let none = CrossingVector::zeros(&g);
        assert!((dirichlet_k_prob(&g, &none, 2.0, 0).unwrap() - (-2.0f64).exp()).abs() < 1e-16);
        assert!(dirichlet_k_prob(&g, &none, 2.0, 1).is_err());
    }

    #[test]
    fn dirichlet_k_prob_integrates_density() {
        // two free local times on K3 reduce to a one-dimensional integral
        let g = Graph::complete(3).unwrap();
        let k = CrossingVector::from_pairs(&g, &[(0, 1, 1), (1, 2, 1)]).unwrap();
        let t = 1.3;
        let inner = |l0: f64| {
            crate::numeric::integrate(
                |l1: f64| dirichlet_density(&g, &k, &[l0, l1, t - l0 - l1], 2).unwrap(),
                0.0,
                t - l0,
                1e-15,
                1e-12,
            )
            .unwrap()
        };
        let total = crate::numeric::integrate(inner, 0.0, t, 1e-15, 1e-11).unwrap();
        let p = dirichlet_k_prob(&g, &k, t, 2).unwrap();
        assert!((total - p).abs() < 1e-9 * p, "{total} {p}");
    }

    #[test]
    fn derrw_agrees_with_clock_product() {
        let g = Graph::complete(2).unwrap();
        let f = Reinforcement::Affine { intercept: 0.0, slope: 1.0 };
        let clocks = Clock::uniform(&g, Clock::Reinforced { f: f.clone() });
        for (k01, k10, i1) in [(1, 0, 1), (3, 2, 1), (2, 2, 0), (5, 4, 1)] {
            let q = k2_query(&g, k01, k10, [0.7, 1.2], i1);
            let a = derrw_density(&g, &q, &f).unwrap();
            let b = product_density(&g, &q, &clocks).unwrap();
            assert!((a - b).abs() <= 1e-12 * b, "{k01} {k10}: {a} {b}");
        }
        let once = Reinforcement::Once { a: 0.5 };
        let q = k2_query(&g, 1, 0, [0.7, 1.2], 1);
        assert!(matches!(derrw_density(&g, &q, &once), Err(Error::DegenerateRates { .. })));
    }

    #[test]
    fn gamma_form_is_clock_product() {
        let g = Graph::complete(2).unwrap();
        for a in [0.3, 0.5, 0.8] {
            let clocks = Clock::uniform(&g, Clock::OnceReinforced { a });
            for (k01, k10, i1) in [(1, 0, 1), (2, 1, 1), (1, 1, 0), (4, 4, 0)] {
                let q = k2_query(&g, k01, k10, [0.6, 1.1], i1);
                let x = dorrw_gamma_form(&g, &q, a).unwrap();
                let y = product_density(&g, &q, &clocks).unwrap();
                assert!((x - y).abs() <= 1e-13 * y);
            }
        }
    }

    #[test]
    fn gamma_form_poisson_limit() {
        let g = Graph::complete(2).unwrap();
        let q = k2_query(&g, 3, 2, [0.6, 1.1], 1);
        let x = dorrw_gamma_form(&g, &q, 1.0 - 1e-5).unwrap();
        let y = rate_one_density(&g, &q).unwrap();
        assert!((x - y).abs() < 1e-3 * y);
        assert!(dorrw_gamma_form(&g, &q, 1.0).is_err());
    }

    #[test]
    fn bessel_form_sums_gamma_form() {
        let g = Graph::complete(2).unwrap();
        for a in [0.3, 0.5, 0.8] {
            for (k01, k10, i1) in [(1, 0, 1), (2, 1, 1), (4, 3, 1), (1, 1, 0), (3, 3, 0)] {
                let q = k2_query(&g, k01, k10, [0.6, 1.4], i1);
                let forms = dorrw_density(&g, &q, a).unwrap();
                let b = net_current(&g, &q.crossings);
                let s = dorrw_gamma_ksum(&g, &q.profile, &b, a).unwrap();
                assert!((forms.bessel_form - s.value).abs() <= 1e-10 * s.value, "a={a} {k01} {k10}: {} {}", forms.bessel_form, s.value);
                let red = adjusted_current(&g, &q.crossings, &q.profile.tree);
                assert_eq!(red.get(g.oriented(0, 1).unwrap()), k01 as i64 - k10 as i64 - (i1 == 1) as i64 + (i1 == 0) as i64);
            }
        }
    }

    #[test]
    fn corrected_bound_holds_where_vertex_count_bound_fails() {
        let g = Graph::complete(2).unwrap();
        let q = k2_query(&g, 1, 0, [0.6, 1.1], 1);
        let a = 0.5;
        let x = dorrw_gamma_form(&g, &q, a).unwrap();
        // equality: the only crossed edge is the tree edge
        assert!((x - dorrw_upper_bound(&g, &q, a).unwrap()).abs() < 1e-15);
        assert!(x > dorrw_vertex_count_bound(&g, &q, a).unwrap());
    }
}
