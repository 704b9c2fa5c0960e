//! The strong construction assigns clocks to edges, so walks on nested boxes
//! driven by the same clocks agree until they leave the smaller box.

use reinforced_walks::graph::Graph;
use reinforced_walks::harness::coupling_check;
use reinforced_walks::sim::{couple_on_shared_clocks, ProcessSpec, StopRule};

fn main() -> reinforced_walks::Result<()> {
    let small = Graph::ball(2, 5)?;
    let big = Graph::ball(2, 10)?;
    let r = couple_on_shared_clocks(&small, &big, &ProcessSpec::Dorrw { a: 0.5 }, StopRule::Jumps(200), 42)?;
    println!("{r:?}");
    let s = coupling_check(&small, &big, 0.5, 200, 500, 1)?;
    println!(
        "{} of {} seeds consistent, {} left the small box, {} jumps compared",
        s.consistent, s.seeds, s.boundary_hits, s.compared_jumps
    );
    Ok(())
}
