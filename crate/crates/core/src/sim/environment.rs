use rand::Rng;
use rand_distr::Exp1;

use crate::error::Result;
use crate::graph::Graph;

/// Draws an i.i.d. flat-Dirichlet environment on a regular graph.
///
/// Returns one rate per oriented edge; the rates leaving each vertex sum
/// to 1. Normalized independent Exp(1) variables have the flat Dirichlet law.
pub fn sample_dirichlet_environment<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> Result<Vec<f64>> {
    g.require_regular()?;
    let mut omega = vec![0.0; g.num_oriented()];
    for v in 0..g.num_vertices() {
        let out = g.out_edges(v);
        let draws: Vec<f64> = out.iter().map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = draws.iter().sum();
        for (&(_, o), d) in out.iter().zip(&draws) {
            omega[o.index()] = d / total;
        }
    }
    Ok(omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::sim::rng::replica_rng;

    #[test]
    fn degree_one_is_deterministic() {
        let g = Graph::complete(2).unwrap();
        let omega = sample_dirichlet_environment(&g, &mut replica_rng(1, 0)).unwrap();
        assert_eq!(omega, vec![1.0, 1.0]);
    }

    #[test]
    fn rows_sum_to_one_and_marginals_are_symmetric() {
        let g = Graph::cycle(5).unwrap();
        let mut rng = replica_rng(2, 0);
        let draws = 10_000;
        let mut mean = 0.0;
        for _ in 0..draws {
            let omega = sample_dirichlet_environment(&g, &mut rng).unwrap();
            for v in 0..5 {
                let s: f64 = g.out_edges(v).iter().map(|&(_, o)| omega[o.index()]).sum();
                assert!((s - 1.0).abs() < 1e-12);
            }
            mean += omega[0];
        }
        mean /= draws as f64;
        assert!((mean - 0.5).abs() < 0.01);

        let g = Graph::complete(5).unwrap();
        let mut means = [0.0; 4];
        for _ in 0..draws {
            let omega = sample_dirichlet_environment(&g, &mut rng).unwrap();
            for (i, &(_, o)) in g.out_edges(0).iter().enumerate() {
                means[i] += omega[o.index()] / draws as f64;
            }
        }
        for m in means {
            assert!((m - 0.25).abs() < 0.01);
        }
    }

    #[test]
    fn irregular_graph_is_rejected() {
        let g = Graph::path(3).unwrap();
        assert!(matches!(
            sample_dirichlet_environment(&g, &mut replica_rng(0, 0)),
            Err(Error::NotRegular { .. })
        ));
    }
}
