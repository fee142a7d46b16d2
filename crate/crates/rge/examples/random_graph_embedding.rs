//! The full embedding pipeline: spectral node embeddings, random graph
//! sampling under both schemes, the feature map, and the convergence of
//! embedding inner products to the Monte-Carlo kernel estimate.
//!
//! Run: cargo run --example random_graph_embedding

use rge::embedding::{
    approx_kernel, embed_dataset, exact_kernel_mc, RandomGraphSampler, SamplerConfig, Scheme,
};
use rge::spectral::node_embeddings;
use rge::synthetic::generate_synthetic;

fn main() {
    let d = 4;
    let embeddings: Vec<_> = (0..12)
        .map(|i| {
            let g = generate_synthetic(8 + i % 5, 20 + i as u64).unwrap();
            node_embeddings(&g, d).unwrap()
        })
        .collect();
    let everything: Vec<usize> = (0..embeddings.len()).collect();

    for scheme in [Scheme::Rf, Scheme::Asg] {
        let config = SamplerConfig {
            scheme,
            d_max: 6,
            r: 64,
            gamma: 1.0,
            d,
            seed: 42,
            use_labels: false,
        };
        let (z, graphs) = embed_dataset(&embeddings, &config, &everything).unwrap();
        println!(
            "{}: embedded {} graphs into {} dimensions ({} random graphs, sizes {:?}...)",
            scheme.as_str(),
            z.num_graphs(),
            z.width(),
            graphs.len(),
            graphs.iter().take(8).map(|g| g.size()).collect::<Vec<_>>()
        );

        // Inner products approximate the kernel expectation.
        let approx = approx_kernel(z.row(0), z.row(1)).unwrap();
        let sampler = RandomGraphSampler::new(&config, &embeddings, &everything).unwrap();
        let exact = exact_kernel_mc(&embeddings[0], &embeddings[1], &sampler, 4096, 777).unwrap();
        println!(
            "  <Z_0, Z_1> = {approx:.5} vs Monte-Carlo kernel  = {exact:.5} (gap {:.2e})\n",
            (approx - exact).abs()
        );
    }
}
