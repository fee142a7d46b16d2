//! Dataset-level kernel matrices: the centered EMD kernel baseline and
//! the Gram matrix of random graph embeddings.
//!
//! The baseline kernel `K = -1/2 J D J` (with `J = I - 11'/N` the
//! centering matrix and `D` the pairwise EMD matrix) is not positive
//! semidefinite in general; the embedding Gram matrix `Z Z'` is PSD by
//! construction. [`extreme_eigenvalues`] exposes the contrast.

use ndarray::Array2;
use rayon::prelude::*;

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::spectral::NodeEmbeddings;
use crate::transport::emd_between_graphs;

/// Symmetric matrix of pairwise EMD values with zero diagonal.
pub fn pairwise_emd_matrix(embeddings: &[NodeEmbeddings]) -> Result<Array2<f64>> {
    let n = embeddings.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let values: Result<Vec<f64>> = pairs
        .par_iter()
        .map(|&(i, j)| emd_between_graphs(&embeddings[i], &embeddings[j]))
        .collect();
    let values = values?;
    let mut matrix = Array2::zeros((n, n));
    for (&(i, j), &v) in pairs.iter().zip(values.iter()) {
        matrix[[i, j]] = v;
        matrix[[j, i]] = v;
    }
    Ok(matrix)
}

/// The centered EMD kernel `-1/2 J D J`. Requires a symmetric `D` with
/// zero diagonal; rows of the result sum to zero since `J` annihilates
/// the all-ones vector.
pub fn indefinite_emd_kernel(distances: &Array2<f64>) -> Result<Array2<f64>> {
    let n = distances.nrows();
    if distances.ncols() != n {
        return Err(Error::Dimension(format!(
            "distance matrix is {}x{}",
            n,
            distances.ncols()
        )));
    }
    for i in 0..n {
        if distances[[i, i]].abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "distance matrix has non-zero diagonal at {i}: {}",
                distances[[i, i]]
            )));
        }
        for j in i + 1..n {
            if (distances[[i, j]] - distances[[j, i]]).abs() > 1e-9 {
                return Err(Error::InvalidInput(format!(
                    "distance matrix is asymmetric at ({i},{j})"
                )));
            }
        }
    }
    let nf = n as f64;
    let row_means: Vec<f64> = (0..n).map(|i| distances.row(i).sum() / nf).collect();
    let grand_mean = row_means.iter().sum::<f64>() / nf;
    let mut kernel = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            kernel[[i, j]] = -0.5 * (distances[[i, j]] - row_means[i] - row_means[j] + grand_mean);
        }
    }
    Ok(kernel)
}

/// Gram matrix `Z Z'` of an embedding matrix; positive semidefinite by
/// construction.
pub fn gram_matrix(z: &EmbeddingMatrix) -> Array2<f64> {
    let v = z.values();
    v.dot(&v.t())
}

/// Smallest and largest eigenvalue of a symmetric matrix.
pub fn extreme_eigenvalues(matrix: &Array2<f64>) -> (f64, f64) {
    let (values, _) = crate::eigen::symmetric_eigen(matrix)
        .expect("QL iteration converges on symmetric input");
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in &values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{embed_dataset, SamplerConfig, Scheme};
    use crate::spectral::node_embeddings;
    use crate::synthetic::generate_synthetic;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn two_point_centering_has_closed_form() {
        // D = [[0, a], [a, 0]] centers to (a/4) [[1, -1], [-1, 1]].
        let a = 0.8;
        let d = array![[0.0, a], [a, 0.0]];
        let k = indefinite_emd_kernel(&d).unwrap();
        let expect = array![[a / 4.0, -a / 4.0], [-a / 4.0, a / 4.0]];
        for (x, y) in k.iter().zip(expect.iter()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_distances_center_to_zero() {
        let d = Array2::zeros((4, 4));
        let k = indefinite_emd_kernel(&d).unwrap();
        assert!(k.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn kernel_rows_sum_to_zero() {
        let mut d = Array2::zeros((5, 5));
        for i in 0..5 {
            for j in i + 1..5 {
                let v = ((i * 7 + j * 3) % 11) as f64 / 10.0;
                d[[i, j]] = v;
                d[[j, i]] = v;
            }
        }
        let k = indefinite_emd_kernel(&d).unwrap();
        for i in 0..5 {
            assert_abs_diff_eq!(k.row(i).sum(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn asymmetric_input_is_rejected() {
        let mut d = Array2::zeros((3, 3));
        d[[0, 1]] = 1.0;
        d[[1, 0]] = 1.0 + 1e-6;
        assert!(indefinite_emd_kernel(&d).is_err());
    }

    #[test]
    fn gram_matrix_is_psd() {
        let embeddings: Vec<_> = (0..10)
            .map(|i| {
                let g = generate_synthetic(8 + i % 4, 40 + i as u64).unwrap();
                node_embeddings(&g, 3).unwrap()
            })
            .collect();
        let cfg = SamplerConfig {
            scheme: Scheme::Rf,
            d_max: 5,
            r: 12,
            gamma: 0.5,
            d: 3,
            seed: 3,
            use_labels: false,
        };
        let (z, _) = embed_dataset(&embeddings, &cfg, &[]).unwrap();
        let gram = gram_matrix(&z);
        let (lo, _) = extreme_eigenvalues(&gram);
        assert!(lo >= -1e-10, "gram matrix has eigenvalue {lo}");
    }

    #[test]
    fn pairwise_matrix_is_symmetric_with_zero_diagonal() {
        let embeddings: Vec<_> = (0..6)
            .map(|i| {
                let g = generate_synthetic(6 + i, 7 + i as u64).unwrap();
                node_embeddings(&g, 2).unwrap()
            })
            .collect();
        let d = pairwise_emd_matrix(&embeddings).unwrap();
        for i in 0..6 {
            assert_eq!(d[[i, i]], 0.0);
            for j in 0..6 {
                assert_eq!(d[[i, j]], d[[j, i]]);
            }
        }
    }
}
