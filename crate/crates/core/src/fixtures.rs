//! Small reference graphs and seeded random generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::ColoredMultigraph;

/// Node names of [`worked_example`], indexed by node id.
pub const WORKED_EXAMPLE_NAMES: [&str; 6] = ["a1", "a2", "a3", "b1", "b2", "b3"];

/// The six-node color refinement example: `a1..a3` colored `a`, `b1..b3`
/// colored `b`, eleven unit edges. Node ids follow [`WORKED_EXAMPLE_NAMES`].
pub fn worked_example() -> ColoredMultigraph {
    let [a1, a2, a3, b1, b2, b3] = [0, 1, 2, 3, 4, 5];
    let edges = [
        (a1, a3),
        (a2, a3),
        (a3, a2),
        (a1, a2),
        (a2, a1),
        (a1, b1),
        (a2, b1),
        (a1, b2),
        (a3, b2),
        (a2, b3),
        (a3, b3),
    ];
    ColoredMultigraph::from_edges(
        6,
        edges.iter().map(|&(u, v)| (u, v, 1)),
        &["a", "a", "a", "b", "b", "b"],
    )
    .expect("static graph")
}

/// Tree whose root `v` (node 0) has `m` children colored `b` (nodes `1..=m`),
/// each with `n` children colored `c`; edges point towards the root.
pub fn star_of_stars(m: usize, n: usize) -> ColoredMultigraph {
    let mut colors = vec!["v"];
    colors.extend(std::iter::repeat_n("b", m));
    colors.extend(std::iter::repeat_n("c", m * n));
    let mut edges = Vec::with_capacity(m + m * n);
    for i in 0..m {
        let b = 1 + i;
        edges.push((b, 0, 1));
        for j in 0..n {
            edges.push((1 + m + i * n + j, b, 1));
        }
    }
    ColoredMultigraph::from_edges(colors.len(), edges, &colors).expect("static graph")
}

/// Parameters for [`random_graph`].
#[derive(Debug, Clone, Copy)]
pub struct RandomGraphSpec {
    pub nodes: usize,
    /// Probability of each ordered pair (self-loops included) being an edge.
    pub density: f64,
    pub colors: usize,
    /// Multiplicities are drawn uniformly from `1..=max_multiplicity`.
    pub max_multiplicity: u64,
}

/// Dense-ish seeded random multigraph (`O(n²)` generation; meant for small `n`).
pub fn random_graph(spec: RandomGraphSpec, seed: u64) -> ColoredMultigraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let colors: Vec<String> = (0..spec.nodes)
        .map(|_| format!("k{}", rng.gen_range(0..spec.colors.max(1))))
        .collect();
    let mut edges = Vec::new();
    for u in 0..spec.nodes {
        for v in 0..spec.nodes {
            if rng.gen_bool(spec.density.clamp(0.0, 1.0)) {
                edges.push((u, v, rng.gen_range(1..=spec.max_multiplicity.max(1))));
            }
        }
    }
    ColoredMultigraph::from_edges(spec.nodes, edges, &colors).expect("generated graph")
}

/// Sparse single-colored random graph with `edges` uniformly drawn unit edges
/// (repeats merge into multiplicities).
pub fn random_sparse_graph(nodes: usize, edges: usize, seed: u64) -> ColoredMultigraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let list: Vec<_> = (0..edges)
        .map(|_| (rng.gen_range(0..nodes), rng.gen_range(0..nodes), 1))
        .collect();
    ColoredMultigraph::uncolored(nodes, list).expect("generated graph")
}
