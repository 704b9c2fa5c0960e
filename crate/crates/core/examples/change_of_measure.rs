//! The once-reinforced walk is absolutely continuous with respect to the
//! simple walk up to any jump count. Estimate a cylinder probability both
//! directly and by reweighting simple-walk paths.

use reinforced_walks::formulas::{com_log_weight, com_log_weight_by_steps};
use reinforced_walks::graph::Graph;
use reinforced_walks::harness::{compare_change_of_measure, CylinderEvent};
use reinforced_walks::sim::{simulate, ProcessSpec, StopRule};

fn main() -> reinforced_walks::Result<()> {
    let g = Graph::ball(2, 6)?;

    let traj = simulate(&g, &ProcessSpec::simple(), StopRule::Jumps(12), 3)?;
    for a in [0.2, 0.5, 1.5] {
        let x = com_log_weight(&g, &traj, 12, a)?;
        let y = com_log_weight_by_steps(&g, &traj, 12, a)?;
        println!("a={a}: log weight {x:.10} (step by step {y:.10})");
    }

    let event = CylinderEvent::Steps {
        steps: vec![vec![1, 0], vec![-1, 0], vec![1, 0]],
    };
    for a in [0.3, 0.7] {
        let r = compare_change_of_measure(&g, &event, a, 50_000, 5, 3.0)?;
        println!(
            "back-and-forth, a={a}: weighted {:.5} +- {:.5}  direct {:.5} +- {:.5}  z={:+.2}",
            r.estimate, r.se, r.target, r.target_se, r.z
        );
    }
    Ok(())
}
