//! Deterministic sampling of totally nonnegative matrices: positive weights
//! on one fixed staircase-grid network. Any nonnegative weighting of a
//! planar network yields a TNN matrix, and this grid is dense enough that
//! every minor is generically strictly positive.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::flow::lindstrom_matrix;
use crate::geometry::Point;
use crate::matrix::Matrix;
use crate::network::{PlanarNetwork, Vertex, Weighting};
use crate::rational::rat;

/// The quarter-grid staircase with sources `s_i = (i, 0)` on the horizontal
/// boundary, sinks `t_j = (0, j)` on the vertical one, and west/north unit
/// edges. Every source reaches every sink, with unit weights the entry
/// counts are binomial, and all minors are positive for positive weights.
pub fn staircase_network(n: usize, n_prime: usize) -> PlanarNetwork {
    assert!(n >= 1 && n_prime >= 1);
    let cols = n + 1;
    let idx = |x: usize, y: usize| y * cols + x;
    let mut vertices = Vec::with_capacity(cols * (n_prime + 1));
    for y in 0..=n_prime {
        for x in 0..=n {
            vertices.push(Vertex {
                name: format!("{x}.{y}"),
                pos: Point::new(rat(x as i64), rat(y as i64)),
            });
        }
    }
    let mut edges = Vec::new();
    for y in 0..=n_prime {
        for x in 0..=n {
            if x >= 1 {
                edges.push((idx(x, y), idx(x - 1, y)));
            }
            if y < n_prime {
                edges.push((idx(x, y), idx(x, y + 1)));
            }
        }
    }
    let sources: Vec<usize> = (1..=n).map(|i| idx(i, 0)).collect();
    let sinks: Vec<usize> = (1..=n_prime).map(|j| idx(0, j)).collect();
    PlanarNetwork::new(vertices, edges, sources, sinks).expect("staircase grid is well formed")
}

/// A TNN matrix drawn deterministically from `seed`: integer weights
/// uniform in 1..=100 on the staircase grid. Returns the generating
/// network and weighting for auditability.
pub fn random_tnn(n: usize, n_prime: usize, seed: u64) -> Result<(Matrix, PlanarNetwork, Weighting)> {
    let net = staircase_network(n, n_prime);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..net.vertex_count())
        .map(|_| rat(rng.gen_range(1..=100)))
        .collect();
    let w = Weighting::new(&net, values)?;
    let q = lindstrom_matrix(&net, &w)?;
    Ok((q, net, w))
}
