//! Synthetic random graphs for scalability benchmarks.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Dataset, Graph};

/// Generates an unlabeled graph with `node_count` nodes and `2 * node_count`
/// distinct edges sampled uniformly without replacement among all
/// non-self-loop pairs. Connectivity is not guaranteed.
///
/// The PRNG is ChaCha8 (`rand_chacha`), seeded directly with `seed`, so
/// equal seeds reproduce the edge set bitwise on every platform. When
/// `2n` exceeds the number of available pairs `n(n-1)/2` (possible only
/// for `n <= 5`) the edge count is clamped to the complete graph and a
/// warning is logged.
pub fn generate_synthetic(node_count: usize, seed: u64) -> Result<Graph> {
    if node_count < 3 {
        return Err(Error::Precondition(format!(
            "synthetic generator needs at least 3 nodes, got {node_count}"
        )));
    }
    let n = node_count as u64;
    let max_edges = n * (n - 1) / 2;
    let mut requested = 2 * n;
    if requested > max_edges {
        log::warn!(
            "requested {requested} edges on {node_count} nodes; clamping to the complete graph ({max_edges} edges)"
        );
        requested = max_edges;
    }

    // Partial Fisher-Yates over pair indices, materializing only touched slots.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut swapped: HashMap<u64, u64> = HashMap::new();
    let mut edges = Vec::with_capacity(requested as usize);
    for k in 0..requested {
        let pick = rng.gen_range(k..max_edges);
        let value = *swapped.get(&pick).unwrap_or(&pick);
        let displaced = *swapped.get(&k).unwrap_or(&k);
        swapped.insert(pick, displaced);
        edges.push(pair_from_index(value, n));
    }
    Graph::unlabeled(node_count, edges)
}

/// Builds a dataset of `num_graphs` synthetic graphs of size `node_count`,
/// with per-graph seeds `seed + i` and class ids alternating 0/1.
pub fn synthetic_dataset(num_graphs: usize, node_count: usize, seed: u64) -> Result<Dataset> {
    let mut graphs = Vec::with_capacity(num_graphs);
    let mut labels = Vec::with_capacity(num_graphs);
    for i in 0..num_graphs {
        graphs.push(generate_synthetic(node_count, seed.wrapping_add(i as u64))?);
        labels.push(i % 2);
    }
    Dataset::new(format!("synthetic_n{node_count}"), graphs, labels)
}

/// Maps a lexicographic pair index onto the pair (i, j), i < j, over the
/// upper triangle of an n x n grid.
fn pair_from_index(index: u64, n: u64) -> (u32, u32) {
    // Pairs with first coordinate < i: s(i) = i*(n-1) - i*(i-1)/2.
    let s = |i: u64| i * (n - 1) - i * i.saturating_sub(1) / 2;
    let (mut lo, mut hi) = (0u64, n - 1);
    while lo < hi {
        let mid = (lo + hi + 1) / 2;
        if s(mid) <= index {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    let i = lo;
    let j = i + 1 + (index - s(i));
    (i as u32, j as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_index_is_a_bijection() {
        let n = 7u64;
        let mut seen = std::collections::HashSet::new();
        for idx in 0..n * (n - 1) / 2 {
            let (i, j) = pair_from_index(idx, n);
            assert!(i < j && (j as u64) < n);
            assert!(seen.insert((i, j)));
        }
    }

    #[test]
    fn produces_exactly_twice_as_many_edges_as_nodes() {
        let g = generate_synthetic(8, 7).unwrap();
        assert_eq!(g.node_count(), 8);
        assert_eq!(g.edge_count(), 16);
    }

    #[test]
    fn equal_seeds_reproduce_bitwise() {
        let a = generate_synthetic(100, 1).unwrap();
        let b = generate_synthetic(100, 1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_differ() {
        let a = generate_synthetic(100, 1).unwrap();
        let b = generate_synthetic(100, 2).unwrap();
        assert_ne!(a.edges(), b.edges());
    }

    #[test]
    fn clamps_to_complete_graph() {
        let g = generate_synthetic(4, 3).unwrap();
        assert_eq!(g.edge_count(), 6);
    }

    #[test]
    fn rejects_tiny_inputs() {
        assert!(generate_synthetic(2, 0).is_err());
    }
}
