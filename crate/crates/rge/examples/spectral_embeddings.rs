//! Geometric node embeddings of small graphs: absolute eigenvector
//! entries of the normalized Laplacian, plus degree-based nBOW weights.
//!
//! Run: cargo run --example spectral_embeddings

use rge::graph::Graph;
use rge::spectral::{node_embeddings, normalized_laplacian};

fn show(name: &str, graph: &Graph, d: usize) {
    let emb = node_embeddings(graph, d).unwrap();
    println!("{name} (n={}, d={d})", graph.node_count());
    for (i, row) in emb.vectors().rows().into_iter().enumerate() {
        let fields: Vec<String> = row.iter().map(|v| format!("{v:.5}")).collect();
        println!("  node {i}: [{}]  weight {:.4}", fields.join(", "), emb.weights()[i]);
    }
    println!();
}

fn main() {
    let path = Graph::unlabeled(3, vec![(0, 1), (1, 2)]).unwrap();
    let lap = normalized_laplacian(&path);
    println!("normalized Laplacian of the path 0-1-2:");
    for row in lap.rows() {
        let fields: Vec<String> = row.iter().map(|v| format!("{v:8.4}")).collect();
        println!("  [{}]", fields.join(" "));
    }
    println!();

    show("path P3", &path, 2);
    let triangle = Graph::unlabeled(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
    show("triangle K3", &triangle, 2);
    let star = Graph::unlabeled(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
    show("star K1,3", &star, 3);

    // Every embedding lives in the unit hypercube; export as text.
    let emb = node_embeddings(&star, 3).unwrap();
    println!("text export (17 significant digits):\n{}", emb.to_text());
}
