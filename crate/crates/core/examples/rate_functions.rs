//! Range rate functions on Z^d and the occupation large deviations of the
//! once-reinforced walk on two vertices.

use reinforced_walks::formulas::{admissible_p, ldp_bounds, nu_sup, psi_d, RateFunctionParams};
use reinforced_walks::graph::Graph;
use reinforced_walks::harness::{ldp_empirical_check, range_trend, OccupationWindow};

fn main() -> reinforced_walks::Result<()> {
    for d in 1..=4 {
        println!("psi_{d} = {:.6}", psi_d(d)?);
    }
    for a in [0.2, 0.5, 0.8] {
        let p = admissible_p(a);
        println!("a={a}: p={p:.4}, sup_u nu(2, a, u, p) = {:.5}", nu_sup(2, a, p)?);
    }

    let g = Graph::complete(2)?;
    let (lo, up) = ldp_bounds(&g, 0.5, &[0.7, 0.3], 1.0)?;
    println!("occupation (0.7, 0.3), a=0.5: rate bounds [{lo:.4}, {up:.4}]");
    let window = OccupationWindow { vertex: 0, lo: 0.7, hi: 0.8 };
    let r = ldp_empirical_check(&g, 0.5, window, &[25.0, 50.0], 20_000, 3, 0.1)?;
    for p in &r.points {
        println!("  t={}: P={:.3e}, (1/t) log P = {:.4} +- {:.4}", p.t, p.prob, p.rate, p.rate_se);
    }

    let trend = range_trend(RateFunctionParams { d: 2, a: 0.5, u: 1.5, p: admissible_p(0.5) }, &[16, 36, 64], 20_000, 4)?;
    for p in &trend.points {
        println!("  N={}: P(range <= {:.1}) = {:.4} ({} hits)", p.n, p.threshold, p.prob, p.hits);
    }
    Ok(())
}
