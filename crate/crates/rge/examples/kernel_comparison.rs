//! Why the embedding route matters: the centered pairwise-EMD kernel can
//! have negative eigenvalues, while the embedding Gram matrix is positive
//! semidefinite by construction.
//!
//! Run: cargo run --example kernel_comparison

use rge::embedding::{embed_dataset, SamplerConfig, Scheme};
use rge::kernels::{extreme_eigenvalues, gram_matrix, indefinite_emd_kernel, pairwise_emd_matrix};
use rge::spectral::node_embeddings;
use rge::synthetic::generate_synthetic;

fn main() {
    let d = 3;
    let embeddings: Vec<_> = (0..25)
        .map(|i| {
            let g = generate_synthetic(5 + i % 9, 300 + i as u64).unwrap();
            node_embeddings(&g, d).unwrap()
        })
        .collect();

    let distances = pairwise_emd_matrix(&embeddings).unwrap();
    let centered = indefinite_emd_kernel(&distances).unwrap();
    let (c_min, c_max) = extreme_eigenvalues(&centered);
    println!("centered EMD kernel -1/2 J D J:");
    println!("  eigenvalue range [{c_min:.6}, {c_max:.6}]");
    if c_min < -1e-10 {
        println!("  -> indefinite on this dataset (negative eigenvalue present)");
    } else {
        println!("  -> happens to be PSD on this dataset; indefiniteness is data-dependent");
    }

    let config = SamplerConfig {
        scheme: Scheme::Rf,
        d_max: 6,
        r: 32,
        gamma: 1.0,
        d,
        seed: 5,
        use_labels: false,
    };
    let everything: Vec<usize> = (0..embeddings.len()).collect();
    let (z, _) = embed_dataset(&embeddings, &config, &everything).unwrap();
    let (g_min, g_max) = extreme_eigenvalues(&gram_matrix(&z));
    println!("\nembedding Gram matrix Z Z':");
    println!("  eigenvalue range [{g_min:.2e}, {g_max:.6}]");
    println!("  -> PSD by construction (inner products of explicit features)");
}
