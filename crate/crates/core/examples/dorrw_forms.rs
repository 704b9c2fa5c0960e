//! Three expressions for the directed once-reinforced local-time density:
//! a gamma-function form, a Bessel-function form with the crossings summed
//! out, and a Fourier integral over phases. They must agree.

use std::collections::BTreeSet;

use reinforced_walks::formulas::{
    adjusted_current, dorrw_bessel_form, dorrw_gamma_form, dorrw_upper_bound, product_fourier, Clock,
    FourierOptions, LocalTimeQuery, Profile,
};
use reinforced_walks::graph::{CrossingVector, Graph, OrientedSpanningTree};

fn main() -> reinforced_walks::Result<()> {
    let g = Graph::complete(2)?;
    let a = 0.4;
    let tree = OrientedSpanningTree::from_pairs(&g, 1, &[(0, 1)])?;
    let profile = Profile::new(&g, BTreeSet::from([0, 1]), vec![1.2, 0.9], tree.clone())?;

    let mut total = 0.0;
    for m in 1..=8u64 {
        let k = CrossingVector::from_pairs(&g, &[(0, 1, m), (1, 0, m - 1)])?;
        let q = LocalTimeQuery::new(&g, profile.clone(), k.clone())?;
        let d = dorrw_gamma_form(&g, &q, a)?;
        total += d;
        println!("k=({m},{}): gamma form {d:.6e}, upper bound {:.6e}", m - 1, dorrw_upper_bound(&g, &q, a)?);
    }
    println!("first 8 terms: {total:.10}");

    let k = CrossingVector::from_pairs(&g, &[(0, 1, 1)])?;
    let reduced = adjusted_current(&g, &k, &tree);
    println!("Bessel form:   {:.10}", dorrw_bessel_form(&g, &profile, &reduced, a)?);

    let clocks = Clock::uniform(&g, Clock::OnceReinforced { a });
    let f = product_fourier(&g, &profile, &clocks, FourierOptions::default())?;
    println!("Fourier form:  {:.10} ({} evaluations)", f.value, f.evaluations);
    Ok(())
}
