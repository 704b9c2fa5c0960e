//! Sum over oriented spanning trees weighted by crossing counts, by brute
//! enumeration and by a Laplacian minor.

use std::collections::BTreeSet;

use reinforced_walks::graph::{
    count_spanning_trees, enumerate_oriented_spanning_trees, tree_sum_by_enumeration, tree_sum_by_minor,
    CrossingVector, Graph,
};

fn main() -> reinforced_walks::Result<()> {
    let g = Graph::cycle(4)?;
    let all: BTreeSet<usize> = (0..4).collect();
    println!("C4 has {} spanning trees", count_spanning_trees(&g, &all)?);
    for t in enumerate_oriented_spanning_trees(&g, &all, 0)? {
        let edges: Vec<_> = t.edges().map(|o| g.endpoints(o)).collect();
        println!("  toward 0: {edges:?}");
    }

    let counts: Vec<u64> = (0..g.num_oriented() as u64).map(|i| 1 + i % 3).collect();
    let k = CrossingVector::from_counts(&g, counts)?;
    for root in 0..4 {
        println!(
            "root {root}: enumeration {}, minor {}",
            tree_sum_by_enumeration(&g, &all, &k, root)?,
            tree_sum_by_minor(&g, &all, &k, root)?
        );
    }
    Ok(())
}
