//! Shared helpers for integration tests: an independent brute-force LP
//! oracle for small transportation problems, random problem generators,
//! and dataset-directory discovery.
#![allow(dead_code)]

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rge::transport::TransportProblem;

/// Exact optimum of a small transportation LP by enumerating the vertices
/// of the transportation polytope: every vertex corresponds to a spanning
/// tree of the complete bipartite graph, whose flows are uniquely fixed by
/// the balances. Independent of the production solver.
pub fn vertex_oracle(problem: &TransportProblem) -> f64 {
    let a = problem.source_weights();
    let b = problem.sink_weights();
    let cost = problem.cost();
    let (nx, ny) = (a.len(), b.len());
    let nodes = nx + ny;
    let arcs: Vec<(usize, usize)> = (0..nx)
        .flat_map(|i| (0..ny).map(move |j| (i, j)))
        .collect();
    let tree_size = nodes - 1;
    assert!(arcs.len() <= 20, "oracle is for tiny instances only");

    let mut best = f64::INFINITY;
    let mut chosen: Vec<usize> = (0..tree_size).collect();
    loop {
        if spans_tree(&chosen, &arcs, nx, nodes) {
            if let Some(objective) = tree_objective(&chosen, &arcs, &a, &b, &cost, nx, ny) {
                best = best.min(objective);
            }
        }
        // next combination in lexicographic order
        let mut k = tree_size;
        loop {
            if k == 0 {
                return best;
            }
            k -= 1;
            if chosen[k] != arcs.len() - tree_size + k {
                chosen[k] += 1;
                for t in k + 1..tree_size {
                    chosen[t] = chosen[t - 1] + 1;
                }
                break;
            }
        }
    }
}

fn spans_tree(chosen: &[usize], arcs: &[(usize, usize)], nx: usize, nodes: usize) -> bool {
    let mut parent: Vec<usize> = (0..nodes).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        let mut root = x;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = x;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }
    let mut merged = 0;
    for &c in chosen {
        let (i, j) = arcs[c];
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, nx + j));
        if ri == rj {
            return false;
        }
        parent[ri] = rj;
        merged += 1;
    }
    merged == nodes - 1
}

/// Unique flows on the tree by leaf elimination; `None` when any flow is
/// negative (infeasible vertex).
fn tree_objective(
    chosen: &[usize],
    arcs: &[(usize, usize)],
    a: &ndarray::ArrayView1<f64>,
    b: &ndarray::ArrayView1<f64>,
    cost: &ndarray::ArrayView2<f64>,
    nx: usize,
    ny: usize,
) -> Option<f64> {
    let nodes = nx + ny;
    let mut balance: Vec<f64> = (0..nodes)
        .map(|v| if v < nx { a[v] } else { -b[v - nx] })
        .collect();
    let mut adjacent: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    for (slot, &c) in chosen.iter().enumerate() {
        let (i, j) = arcs[c];
        adjacent[i].push(slot);
        adjacent[nx + j].push(slot);
    }
    let mut degree: Vec<usize> = adjacent.iter().map(|l| l.len()).collect();
    let mut removed_arc = vec![false; chosen.len()];
    let mut removed_node = vec![false; nodes];
    let mut objective = 0.0;
    for _ in 0..chosen.len() {
        let leaf = (0..nodes).find(|&v| !removed_node[v] && degree[v] == 1)?;
        let slot = *adjacent[leaf].iter().find(|&&s| !removed_arc[s])?;
        let (i, j) = arcs[chosen[slot]];
        // flow out of source = its remaining balance; into sink = minus its balance
        let flow = if leaf < nx { balance[leaf] } else { -balance[leaf] };
        if flow < -1e-12 {
            return None;
        }
        let flow = flow.max(0.0);
        objective += flow * cost[[i, j]];
        let other = if leaf < nx { nx + j } else { i };
        balance[other] += balance[leaf];
        balance[leaf] = 0.0;
        removed_arc[slot] = true;
        removed_node[leaf] = true;
        degree[leaf] = 0;
        degree[other] -= 1;
    }
    Some(objective)
}

/// A random transportation problem with rational weights (multiples of
/// 1/1024, so they sit exactly on the solver's integer grid) and uniform
/// costs in [0, 1).
pub fn random_problem(rng: &mut ChaCha8Rng, max_side: usize) -> TransportProblem {
    let nx = rng.gen_range(1..=max_side);
    let ny = rng.gen_range(1..=max_side);
    let source = rational_weights(rng, nx);
    let sink = rational_weights(rng, ny);
    let cost = Array2::from_shape_fn((nx, ny), |_| rng.gen_range(0.0..1.0));
    TransportProblem::new(source, sink, cost).unwrap()
}

pub fn rational_weights(rng: &mut ChaCha8Rng, n: usize) -> Array1<f64> {
    const DENOM: u64 = 1024;
    loop {
        let mut parts: Vec<u64> = (0..n).map(|_| rng.gen_range(0..=8u64)).collect();
        let total: u64 = parts.iter().sum();
        if total == 0 {
            continue;
        }
        // rescale onto the fixed denominator, largest remainder
        let mut scaled: Vec<u64> = parts.iter().map(|&p| p * DENOM / total).collect();
        let mut leftover = DENOM - scaled.iter().sum::<u64>();
        let mut k = 0;
        while leftover > 0 {
            if parts[k % n] > 0 {
                scaled[k % n] += 1;
                leftover -= 1;
            }
            k += 1;
        }
        parts = scaled;
        return Array1::from_iter(parts.iter().map(|&p| p as f64 / DENOM as f64));
    }
}

/// Root of the external benchmark datasets: `$RGE_DATA_DIR` if set, else
/// `data/` at the workspace root. Returns `None` when the named dataset's
/// directory is absent.
pub fn dataset_dir(name: &str) -> Option<std::path::PathBuf> {
    let root = std::env::var_os("RGE_DATA_DIR")
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| {
            std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
                .join("..")
                .join("..")
                .join("data")
        });
    let dir = root.join(name);
    dir.is_dir().then_some(dir)
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
