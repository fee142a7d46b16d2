//! Geometric node embeddings from the normalized graph Laplacian.
//!
//! Each node of a graph is mapped to the absolute values of its entries
//! in the `d` eigenvectors of the smallest eigenvalues of
//! `L = I - D^{-1/2} A D^{-1/2}`. Since the eigenvectors are unit-norm,
//! every embedding lies in the d-dimensional unit hypercube. Alongside
//! the vectors each node receives a normalized bag-of-words weight
//! `t_i = deg(i) / sum_j deg(j)`, the transport mass it carries.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constants::{DENSE_EIGEN_LIMIT, EIGEN_RESIDUAL_TOL, EIGEN_TIE_TOL};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Per-graph node embeddings: an `n x d` matrix of entries in `[0, 1]`,
/// a weight vector summing to one, and the graph's node labels if any.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeEmbeddings {
    vectors: Array2<f64>,
    weights: Array1<f64>,
    labels: Option<Vec<u32>>,
}

impl NodeEmbeddings {
    /// The `n x d` embedding matrix; row `i` is node `i`.
    pub fn vectors(&self) -> &Array2<f64> {
        &self.vectors
    }

    /// nBOW weights, non-negative and summing to one.
    pub fn weights(&self) -> &Array1<f64> {
        &self.weights
    }

    pub fn labels(&self) -> Option<&[u32]> {
        self.labels.as_deref()
    }

    pub fn node_count(&self) -> usize {
        self.vectors.nrows()
    }

    /// Embedding dimension `d`.
    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }

    /// A copy with the node labels stripped, for label-free distances on
    /// labeled datasets.
    pub fn without_labels(&self) -> Self {
        NodeEmbeddings {
            vectors: self.vectors.clone(),
            weights: self.weights.clone(),
            labels: None,
        }
    }

    /// Writes the embedding matrix as text, one node per line, entries at
    /// 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in self.vectors.rows() {
            let fields: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&fields.join(" "));
            out.push('\n');
        }
        out
    }
}

/// The symmetric normalized Laplacian `I - D^{-1/2} A D^{-1/2}`.
///
/// Rows and columns of isolated nodes are identically zero (including the
/// diagonal), which makes each isolated node an exact eigenvector with
/// eigenvalue zero. All eigenvalues lie in `[0, 2]`.
pub fn normalized_laplacian(graph: &Graph) -> Array2<f64> {
    let n = graph.node_count();
    let degrees = graph.degrees();
    let mut lap = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        if degrees[i] > 0 {
            lap[[i, i]] = 1.0;
        }
    }
    for &(a, b) in graph.edges() {
        let (i, j) = (a as usize, b as usize);
        let w = -1.0 / ((degrees[i] as f64) * (degrees[j] as f64)).sqrt();
        lap[[i, j]] = w;
        lap[[j, i]] = w;
    }
    lap
}

/// nBOW weights: `deg(i) / sum_j deg(j)`, or uniform `1/n` when the graph
/// has no edges. Depends only on degrees, not on the embedding dimension.
pub fn nbow_weights(graph: &Graph) -> Array1<f64> {
    let degrees = graph.degrees();
    let total: usize = degrees.iter().sum();
    if total == 0 {
        let n = graph.node_count();
        return Array1::from_elem(n, 1.0 / n as f64);
    }
    Array1::from_iter(degrees.iter().map(|&d| d as f64 / total as f64))
}

/// Computes the geometric node embeddings of `graph` in dimension `d`:
/// absolute entries of the unit-norm eigenvectors of the `d` smallest
/// eigenvalues of the normalized Laplacian, columns ordered by ascending
/// eigenvalue (ties broken lexicographically on the absolute vectors).
/// When `d` exceeds the node count the missing columns are zero.
///
/// Node labels of the graph, if present, are carried along.
pub fn node_embeddings(graph: &Graph, d: usize) -> Result<NodeEmbeddings> {
    if d == 0 {
        return Err(Error::Precondition("embedding dimension must be at least 1".into()));
    }
    let n = graph.node_count();
    let want = d.min(n);

    let pairs = if n <= DENSE_EIGEN_LIMIT {
        dense_smallest(graph, want)?
    } else {
        lanczos_smallest(graph, want)?
    };
    let pairs = order_pairs(pairs);

    let mut vectors = Array2::<f64>::zeros((n, d));
    for (col, (_, v)) in pairs.iter().enumerate().take(want) {
        for (row, &x) in v.iter().enumerate() {
            vectors[[row, col]] = x.abs().min(1.0);
        }
    }

    Ok(NodeEmbeddings {
        vectors,
        weights: nbow_weights(graph),
        labels: graph.node_labels().map(|l| l.to_vec()),
    })
}

type EigenPair = (f64, Vec<f64>);

/// Ascending eigenvalue order; among eigenvalues within `EIGEN_TIE_TOL`
/// of each other, vectors are ordered lexicographically by their
/// absolute-value entries.
fn order_pairs(mut pairs: Vec<EigenPair>) -> Vec<EigenPair> {
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[end].0 - pairs[end - 1].0 <= EIGEN_TIE_TOL {
            end += 1;
        }
        if end - start > 1 {
            pairs[start..end].sort_by(|a, b| {
                let abs_a = a.1.iter().map(|x| x.abs());
                let abs_b = b.1.iter().map(|x| x.abs());
                abs_a.partial_cmp(abs_b).unwrap()
            });
        }
        start = end;
    }
    pairs
}

fn frobenius_norm(m: &Array2<f64>) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn verify_residuals(lap: &Array2<f64>, pairs: &[EigenPair]) -> Result<()> {
    let tol = EIGEN_RESIDUAL_TOL * frobenius_norm(lap).max(f64::MIN_POSITIVE);
    for (lambda, v) in pairs {
        let n = v.len();
        let mut residual = 0.0f64;
        for i in 0..n {
            let mut lv = 0.0;
            for j in 0..n {
                lv += lap[[i, j]] * v[j];
            }
            residual += (lv - lambda * v[i]).powi(2);
        }
        if residual.sqrt() > tol {
            return Err(Error::Numerical(format!(
                "eigenpair residual {:.3e} exceeds {:.3e} at eigenvalue {lambda}",
                residual.sqrt(),
                tol
            )));
        }
    }
    Ok(())
}

/// Full symmetric eigendecomposition; returns the `want` smallest pairs.
fn dense_smallest(graph: &Graph, want: usize) -> Result<Vec<EigenPair>> {
    let lap = normalized_laplacian(graph);
    let n = graph.node_count();
    let (values, vectors) = crate::eigen::symmetric_eigen(&lap)?;
    let mut pairs: Vec<EigenPair> = (0..n)
        .map(|k| {
            let mut v: Vec<f64> = vectors.column(k).to_vec();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            for x in &mut v {
                *x /= norm;
            }
            (values[k], v)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.truncate(want);
    verify_residuals(&lap, &pairs)?;
    Ok(pairs)
}

/// Sparse matrix-vector product with the normalized Laplacian. Rows of
/// isolated nodes are zero by convention.
fn laplacian_matvec(graph: &Graph, degrees: &[usize], x: &[f64], y: &mut [f64]) {
    for i in 0..x.len() {
        y[i] = if degrees[i] > 0 { x[i] } else { 0.0 };
    }
    for &(a, b) in graph.edges() {
        let (i, j) = (a as usize, b as usize);
        let w = 1.0 / ((degrees[i] as f64) * (degrees[j] as f64)).sqrt();
        y[i] -= w * x[j];
        y[j] -= w * x[i];
    }
}

/// The zero-eigenspace of the normalized Laplacian, in closed form: one
/// vector per connected component (`sqrt(deg_i)` profile, normalized) and
/// one indicator per isolated node.
fn kernel_basis(graph: &Graph, degrees: &[usize]) -> Vec<Vec<f64>> {
    let n = graph.node_count();
    let mut basis = Vec::new();
    for comp in graph.components() {
        let mut v = vec![0.0; n];
        if comp.len() == 1 && degrees[comp[0] as usize] == 0 {
            v[comp[0] as usize] = 1.0;
        } else {
            let volume: f64 = comp.iter().map(|&i| degrees[i as usize] as f64).sum();
            for &i in &comp {
                v[i as usize] = (degrees[i as usize] as f64 / volume).sqrt();
            }
        }
        basis.push(v);
    }
    basis
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Lanczos with full reorthogonalization for the `want` smallest
/// eigenpairs. The known zero-eigenspace is deflated analytically, so
/// multiplicities at zero are handled exactly; the remaining smallest
/// positive pairs come from the Krylov iteration.
fn lanczos_smallest(graph: &Graph, want: usize) -> Result<Vec<EigenPair>> {
    let n = graph.node_count();
    let degrees = graph.degrees();
    let kernel = kernel_basis(graph, &degrees);

    let mut pairs: Vec<EigenPair> = kernel.iter().take(want).map(|v| (0.0, v.clone())).collect();
    let remaining = want.saturating_sub(kernel.len());
    if remaining == 0 {
        return Ok(pairs);
    }

    // Frobenius norm of L without materializing it: diagonal ones plus
    // the off-diagonal couplings, each appearing twice.
    let diag: f64 = degrees.iter().filter(|&&d| d > 0).count() as f64;
    let off: f64 = graph
        .edges()
        .iter()
        .map(|&(a, b)| 2.0 / (degrees[a as usize] as f64 * degrees[b as usize] as f64))
        .sum();
    let fro = (diag + off).sqrt();
    let target = EIGEN_RESIDUAL_TOL * fro;

    let max_steps = n.min(600);
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e3779b97f4a7c15);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();

    let orthogonalize = |v: &mut Vec<f64>, basis: &[Vec<f64>], kernel: &[Vec<f64>]| {
        for _ in 0..2 {
            for k in kernel {
                let c = dot(v, k);
                for (x, y) in v.iter_mut().zip(k) {
                    *x -= c * y;
                }
            }
            for q in basis {
                let c = dot(v, q);
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= c * y;
                }
            }
        }
    };

    let mut q = vec![0.0; n];
    for x in &mut q {
        *x = rng.gen_range(-1.0..1.0);
    }
    orthogonalize(&mut q, &basis, &kernel);
    let q_norm = norm(&q);
    if q_norm < 1e-12 {
        return Err(Error::Numerical("could not seed the Lanczos iteration".into()));
    }
    for x in &mut q {
        *x /= q_norm;
    }
    basis.push(q);

    let mut scratch = vec![0.0; n];
    let mut step = 0;
    loop {
        let current = basis.last().unwrap().clone();
        laplacian_matvec(graph, &degrees, &current, &mut scratch);
        let alpha = dot(&scratch, &current);
        alphas.push(alpha);
        let mut w = scratch.clone();
        orthogonalize(&mut w, &basis, &kernel);
        let beta = norm(&w);

        step += 1;
        let dim = alphas.len();
        let enough_history = dim >= remaining + 2;
        let check_now = enough_history && (step % 8 == 0 || beta < 1e-10 || dim == max_steps);
        if check_now {
            if let Some(found) = extract_ritz(&alphas, &betas, &basis, remaining, beta, target) {
                pairs.extend(found);
                return finalize_lanczos(graph, &degrees, pairs, fro);
            }
        }
        if dim == max_steps {
            return Err(Error::Numerical(format!(
                "Lanczos did not converge within {max_steps} steps (n={n})"
            )));
        }

        if beta < 1e-10 {
            // Invariant subspace exhausted: restart with a fresh direction.
            let mut fresh = vec![0.0; n];
            for x in &mut fresh {
                *x = rng.gen_range(-1.0..1.0);
            }
            orthogonalize(&mut fresh, &basis, &kernel);
            let f_norm = norm(&fresh);
            if f_norm < 1e-12 {
                // The whole complement is spanned; Ritz values are exact.
                if let Some(found) =
                    extract_ritz(&alphas, &betas, &basis, remaining, 0.0, f64::INFINITY)
                {
                    pairs.extend(found);
                    return finalize_lanczos(graph, &degrees, pairs, fro);
                }
                return Err(Error::Numerical("Lanczos exhausted the space without converging".into()));
            }
            for x in &mut fresh {
                *x /= f_norm;
            }
            betas.push(0.0);
            basis.push(fresh);
        } else {
            for x in &mut w {
                *x /= beta;
            }
            betas.push(beta);
            basis.push(w);
        }
    }
}

/// Solves the tridiagonal Rayleigh-Ritz problem; returns the `remaining`
/// smallest Ritz pairs if all their residual bounds sit below `target`.
fn extract_ritz(
    alphas: &[f64],
    betas: &[f64],
    basis: &[Vec<f64>],
    remaining: usize,
    beta_last: f64,
    target: f64,
) -> Option<Vec<EigenPair>> {
    let dim = alphas.len();
    let Ok((values, vectors)) = crate::eigen::tridiagonal_eigen(alphas, betas) else {
        return None;
    };
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());

    let mut found = Vec::with_capacity(remaining);
    for &k in order.iter().take(remaining) {
        let bound = beta_last * vectors[[dim - 1, k]].abs();
        if bound > target {
            return None;
        }
        let n = basis[0].len();
        let mut v = vec![0.0; n];
        for (j, q) in basis.iter().enumerate() {
            let c = vectors[[j, k]];
            for i in 0..n {
                v[i] += c * q[i];
            }
        }
        let v_norm = norm(&v);
        for x in &mut v {
            *x /= v_norm;
        }
        found.push((values[k].max(0.0), v));
    }
    if found.len() == remaining {
        Some(found)
    } else {
        None
    }
}

/// Verifies true residuals of the assembled pairs against the matrix-free
/// operator before returning them.
fn finalize_lanczos(
    graph: &Graph,
    degrees: &[usize],
    pairs: Vec<EigenPair>,
    fro: f64,
) -> Result<Vec<EigenPair>> {
    let tol = EIGEN_RESIDUAL_TOL * fro.max(f64::MIN_POSITIVE);
    let n = graph.node_count();
    let mut scratch = vec![0.0; n];
    for (lambda, v) in &pairs {
        laplacian_matvec(graph, degrees, v, &mut scratch);
        let residual: f64 = scratch
            .iter()
            .zip(v)
            .map(|(lv, x)| (lv - lambda * x).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual > tol {
            return Err(Error::Numerical(format!(
                "Lanczos residual {residual:.3e} exceeds {tol:.3e} at eigenvalue {lambda}"
            )));
        }
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn path3() -> Graph {
        Graph::unlabeled(3, vec![(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn laplacian_of_single_edge() {
        let g = Graph::unlabeled(2, vec![(0, 1)]).unwrap();
        let lap = normalized_laplacian(&g);
        assert_abs_diff_eq!(lap[[0, 0]], 1.0);
        assert_abs_diff_eq!(lap[[0, 1]], -1.0);
        assert_abs_diff_eq!(lap[[1, 0]], -1.0);
        assert_abs_diff_eq!(lap[[1, 1]], 1.0);
    }

    #[test]
    fn laplacian_of_triangle_has_known_spectrum() {
        let g = Graph::unlabeled(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let lap = normalized_laplacian(&g);
        // I - A/2 for the 2-regular triangle.
        assert_abs_diff_eq!(lap[[0, 1]], -0.5);
        let pairs = dense_smallest(&g, 3).unwrap();
        let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        assert_abs_diff_eq!(values[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(values[1], 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(values[2], 1.5, epsilon = 1e-12);
    }

    #[test]
    fn path3_matches_hand_eigendecomposition() {
        // L(P3) has eigenvalues {0, 1, 2} with |eigenvectors|
        // (1/2, 1/sqrt2, 1/2), (1/sqrt2, 0, 1/sqrt2), (1/2, 1/sqrt2, 1/2).
        let g = path3();
        let lap = normalized_laplacian(&g);
        assert_abs_diff_eq!(lap[[0, 1]], -1.0 / 2.0_f64.sqrt(), epsilon = 1e-15);
        let pairs = dense_smallest(&g, 3).unwrap();
        let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        assert_abs_diff_eq!(values[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(values[1], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(values[2], 2.0, epsilon = 1e-12);

        let emb = node_embeddings(&g, 2).unwrap();
        let half = 0.5;
        let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
        let expect = [
            [half, inv_sqrt2],
            [inv_sqrt2, 0.0],
            [half, inv_sqrt2],
        ];
        for i in 0..3 {
            for j in 0..2 {
                assert_abs_diff_eq!(emb.vectors()[[i, j]], expect[i][j], epsilon = 1e-10);
            }
        }
        assert_abs_diff_eq!(emb.weights()[0], 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(emb.weights()[1], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(emb.weights()[2], 0.25, epsilon = 1e-15);
    }

    #[test]
    fn single_edge_embedding_is_constant() {
        let g = Graph::unlabeled(2, vec![(0, 1)]).unwrap();
        let emb = node_embeddings(&g, 1).unwrap();
        let c = 1.0 / 2.0_f64.sqrt();
        assert_abs_diff_eq!(emb.vectors()[[0, 0]], c, epsilon = 1e-12);
        assert_abs_diff_eq!(emb.vectors()[[1, 0]], c, epsilon = 1e-12);
        assert_eq!(emb.weights().to_vec(), vec![0.5, 0.5]);
    }

    #[test]
    fn triangle_embedding_is_constant() {
        let g = Graph::unlabeled(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let emb = node_embeddings(&g, 1).unwrap();
        let c = 1.0 / 3.0_f64.sqrt();
        for i in 0..3 {
            assert_abs_diff_eq!(emb.vectors()[[i, 0]], c, epsilon = 1e-12);
        }
    }

    #[test]
    fn entries_stay_in_unit_interval_and_rows_in_hypercube() {
        let g = crate::synthetic::generate_synthetic(40, 5).unwrap();
        let d = 6;
        let emb = node_embeddings(&g, d).unwrap();
        for row in emb.vectors().rows() {
            let mut sq = 0.0;
            for &x in row {
                assert!((0.0..=1.0).contains(&x));
                sq += x * x;
            }
            assert!(sq.sqrt() <= (d as f64).sqrt() + 1e-12);
        }
        let total: f64 = emb.weights().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn d_larger_than_n_pads_with_zeros() {
        let g = Graph::unlabeled(2, vec![(0, 1)]).unwrap();
        let emb = node_embeddings(&g, 5).unwrap();
        assert_eq!(emb.dim(), 5);
        for j in 2..5 {
            assert_eq!(emb.vectors()[[0, j]], 0.0);
            assert_eq!(emb.vectors()[[1, j]], 0.0);
        }
    }

    #[test]
    fn edgeless_graph_gets_uniform_weights() {
        let g = Graph::unlabeled(4, std::iter::empty()).unwrap();
        let emb = node_embeddings(&g, 2).unwrap();
        for &w in emb.weights() {
            assert_abs_diff_eq!(w, 0.25, epsilon = 1e-15);
        }
    }

    #[test]
    fn isolated_node_gets_zero_weight() {
        let g = Graph::unlabeled(3, vec![(0, 1)]).unwrap();
        let emb = node_embeddings(&g, 1).unwrap();
        assert_eq!(emb.weights()[2], 0.0);
        assert_abs_diff_eq!(emb.weights().sum(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn weights_do_not_depend_on_dimension() {
        let g = crate::synthetic::generate_synthetic(12, 3).unwrap();
        let a = node_embeddings(&g, 2).unwrap();
        let b = node_embeddings(&g, 5).unwrap();
        assert_eq!(a.weights(), b.weights());
    }

    #[test]
    fn lanczos_agrees_with_dense_on_medium_graph() {
        let g = crate::synthetic::generate_synthetic(530, 11).unwrap();
        let want = 6;
        let dense = dense_smallest(&g, want).unwrap();
        let lanczos = lanczos_smallest(&g, want).unwrap();
        let mut dense_vals: Vec<f64> = dense.iter().map(|p| p.0).collect();
        let mut lanczos_vals: Vec<f64> = lanczos.iter().map(|p| p.0).collect();
        dense_vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        lanczos_vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in dense_vals.iter().zip(&lanczos_vals) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-7);
        }
    }

    #[test]
    fn permutation_equivariance_on_simple_spectrum() {
        // Compare row multisets under a node permutation, skipping draws
        // whose spectrum has near-ties where the basis is not unique.
        let mut checked = 0;
        for seed in 0..20u64 {
            let g = crate::synthetic::generate_synthetic(9, seed).unwrap();
            let d = 3;
            let pairs = dense_smallest(&g, 4).unwrap();
            let gaps_ok = pairs.windows(2).all(|w| w[1].0 - w[0].0 > 1e-6);
            if !gaps_ok {
                continue;
            }
            checked += 1;
            let perm: Vec<u32> = (0..9).rev().collect();
            let edges: Vec<(u32, u32)> = g
                .edges()
                .iter()
                .map(|&(a, b)| (perm[a as usize], perm[b as usize]))
                .collect();
            let permuted = Graph::unlabeled(9, edges).unwrap();
            let ea = node_embeddings(&g, d).unwrap();
            let eb = node_embeddings(&permuted, d).unwrap();
            for (i, &p) in perm.iter().enumerate() {
                for j in 0..d {
                    assert_abs_diff_eq!(
                        ea.vectors()[[i, j]],
                        eb.vectors()[[p as usize, j]],
                        epsilon = 1e-8
                    );
                }
            }
        }
        assert!(checked >= 5, "too few non-degenerate draws ({checked})");
    }
}
