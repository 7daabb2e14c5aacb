//! Refinement timing on seeded random graphs.

use std::time::{Duration, Instant};

use crate::bound::{Depth, Grade};
use crate::fixtures;
use crate::refine;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    /// Requested `n + m`.
    pub size: usize,
    pub nodes: usize,
    pub edges: usize,
    /// Refinement steps until stable.
    pub rounds: usize,
    pub median: Duration,
}

/// Splits `n + m = size` so that `m ≈ density · n`.
pub fn split_size(size: usize, density: f64) -> (usize, usize) {
    let nodes = ((size as f64) / (1.0 + density)).round().max(1.0) as usize;
    (nodes, size.saturating_sub(nodes))
}

pub fn median(mut samples: Vec<Duration>) -> Duration {
    samples.sort_unstable();
    let k = samples.len();
    if k == 0 {
        return Duration::ZERO;
    }
    if k % 2 == 1 {
        samples[k / 2]
    } else {
        (samples[k / 2 - 1] + samples[k / 2]) / 2
    }
}

/// Times `refine(d = ∞)` `repeats` times per size on a fresh seeded graph.
pub fn run(sizes: &[usize], density: f64, repeats: usize, seed: u64) -> Vec<BenchRow> {
    sizes
        .iter()
        .enumerate()
        .map(|(i, &size)| {
            let (nodes, edges) = split_size(size, density);
            let g = fixtures::random_sparse_graph(nodes, edges, seed.wrapping_add(i as u64));
            let mut rounds = 0;
            let samples = (0..repeats.max(1))
                .map(|_| {
                    let start = Instant::now();
                    let r = refine::refine(&g, Depth::Infinite, Grade::Infinite);
                    let t = start.elapsed();
                    rounds = r.steps();
                    t
                })
                .collect();
            BenchRow {
                size,
                nodes,
                edges,
                rounds,
                median: median(samples),
            }
        })
        .collect()
}

/// Ratios of consecutive median times.
pub fn doubling_ratios(rows: &[BenchRow]) -> Vec<f64> {
    rows.windows(2)
        .map(|w| w[1].median.as_secs_f64() / w[0].median.as_secs_f64().max(1e-12))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_odd_and_even() {
        let ms = Duration::from_millis;
        assert_eq!(median(vec![ms(5), ms(1), ms(3)]), ms(3));
        assert_eq!(median(vec![ms(4), ms(2)]), ms(3));
    }

    #[test]
    fn size_split() {
        assert_eq!(split_size(10_000, 4.0), (2000, 8000));
    }

    #[test]
    fn same_seed_same_graph() {
        let a = fixtures::random_sparse_graph(100, 400, 3);
        let b = fixtures::random_sparse_graph(100, 400, 3);
        assert_eq!(a, b);
    }
}
