//! Exposure accumulated between consecutive new edges of the once-reinforced
//! walk is i.i.d. Exp(a). Collect the increments and test that.

use reinforced_walks::graph::Graph;
use reinforced_walks::harness::delta_law;

fn main() -> reinforced_walks::Result<()> {
    let g = Graph::ball(2, 8)?;
    for a in [0.25, 0.5, 1.0, 2.0] {
        let r = delta_law(&g, a, 20_000, 100, 1, 0.03, 0.05, 0.001)?;
        println!(
            "a={a:<5} mean={:.4} (1/a={:.4})  KS D={:.4} p={:.3}  lag-1 rho={:+.4}  {:?}",
            r.mean,
            1.0 / a,
            r.ks.statistic,
            r.ks.p_value,
            r.lag1,
            r.verdict
        );
    }
    Ok(())
}
