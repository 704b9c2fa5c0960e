//! Annealed law of the walk in a Dirichlet(1,...,1) environment: exact
//! crossing-count probabilities against sampled environments.

use reinforced_walks::formulas::dirichlet_k_prob;
use reinforced_walks::graph::{CrossingVector, Graph};
use reinforced_walks::harness::dirichlet_annealed_check;

fn main() -> reinforced_walks::Result<()> {
    let k2 = Graph::complete(2)?;
    let k = CrossingVector::from_pairs(&k2, &[(0, 1, 1)])?;
    for t in [0.5, 1.0, 2.0] {
        println!("K2, one jump by t={t}: {:.10} (t e^-t = {:.10})", dirichlet_k_prob(&k2, &k, t, 1)?, t * (-t as f64).exp());
    }

    let k3 = Graph::complete(3)?;
    let r = dirichlet_annealed_check(&k3, 1.0, 200_000, 12, 0.02, 0.05)?;
    println!("K3 at t=1, events with probability >= 0.02 (mass {:.3}):", r.covered_mass);
    for row in &r.rows {
        println!(
            "  k={:?} end at {}: formula {:.5}, simulated {:.5} (rel err {:.4})",
            row.counts, row.terminal, row.formula, row.empirical, row.rel_err
        );
    }
    println!("verdict {:?}", r.verdict);
    Ok(())
}
