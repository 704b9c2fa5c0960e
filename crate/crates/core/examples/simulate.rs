//! Simulate a directed once-reinforced walk on a box of Z^2 and print what
//! it left behind, then do the same for a walk in a Dirichlet environment.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use reinforced_walks::graph::Graph;
use reinforced_walks::sim::{extract_observables, sample_dirichlet_environment, simulate, ProcessSpec, StopRule};

fn main() -> reinforced_walks::Result<()> {
    let g = Graph::ball(2, 10)?;
    let t = 50.0;
    for spec in [ProcessSpec::simple(), ProcessSpec::Dorrw { a: 0.3 }, ProcessSpec::Orrw { a: 0.3 }] {
        let traj = simulate(&g, &spec, StopRule::Time(t), 2024)?;
        let obs = extract_observables(&g, &traj, t)?;
        let busiest = obs
            .local_times
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.total_cmp(y.1))
            .map(|(v, l)| (g.coord(v).unwrap_or_default().to_vec(), (*l * 100.0).round() / 100.0));
        println!(
            "{:<6} a={:<4} jumps={:<4} visited={:<4} edges crossed={:<4} busiest vertex {:?}",
            spec.name(),
            match spec {
                ProcessSpec::Orrw { a } | ProcessSpec::Dorrw { a } => a,
                _ => f64::NAN,
            },
            obs.jumps,
            obs.vertex_range.len(),
            obs.edge_range.len(),
            busiest
        );
    }

    // quenched environment: i.i.d. Dirichlet rates at every vertex of a
    // regular graph
    let ring = Graph::cycle(40)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let omega = sample_dirichlet_environment(&ring, &mut rng)?;
    let traj = simulate(&ring, &ProcessSpec::Rwre { omega }, StopRule::Jumps(500), 8)?;
    let obs = extract_observables(&ring, &traj, traj.horizon)?;
    println!("rwre   500 jumps on a 40-cycle took t={:.2}, visited {} vertices", traj.horizon, obs.vertex_range.len());
    Ok(())
}
