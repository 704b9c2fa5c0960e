//! Exploratory statistics with no closed-form target: return probabilities
//! on a regular tree and the Q statistics of the directed walk.

use reinforced_walks::graph::Graph;
use reinforced_walks::harness::{q_summary, tree_return_smoke};

fn main() -> reinforced_walks::Result<()> {
    for a in [0.5, 1.0, 3.0] {
        let pts = tree_return_smoke(3, 7, a, &[1.0, 5.0, 20.0], 5_000, 9)?;
        let line: Vec<String> = pts.iter().map(|p| format!("t={}: {:.4}+-{:.4}", p.t, p.prob, p.se)).collect();
        println!("3-regular tree, a={a}: P(at root) {}", line.join("  "));
    }
    let g = Graph::ball(2, 12)?;
    for a in [0.3, 1.0] {
        let q = q_summary(&g, a, 400, 500, 10)?;
        println!(
            "a={a}: mean Q {:+.3}, mean |Q| {:.3}, mean S {:.3}",
            q.mean_q, q.mean_abs_q, q.mean_s
        );
    }
    Ok(())
}
