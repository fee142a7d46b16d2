//! Dataset round trip: generate a synthetic benchmark, write it in the
//! four-file text format, parse it back, and print its statistics.
//!
//! Run: cargo run --example dataset_io

use rge::dataset_io::{parse_dataset, write_dataset};
use rge::synthetic::synthetic_dataset;

fn main() {
    let dir = std::env::temp_dir().join("rge_example_dataset");
    let dataset = synthetic_dataset(12, 24, 7).unwrap();
    write_dataset(&dataset, &dir).unwrap();
    println!("wrote {} under {}", dataset.name(), dir.display());

    let parsed = parse_dataset(&dir, dataset.name()).unwrap();
    assert_eq!(parsed, dataset);
    println!("parsed it back identically\n");

    println!("graphs: {}", parsed.len());
    println!("classes: {}", parsed.num_classes());
    let nodes: Vec<usize> = parsed.graphs().iter().map(|g| g.node_count()).collect();
    let edges: Vec<usize> = parsed.graphs().iter().map(|g| g.edge_count()).collect();
    println!(
        "nodes per graph: min {} max {}",
        nodes.iter().min().unwrap(),
        nodes.iter().max().unwrap()
    );
    println!(
        "edges per graph: min {} max {} (always 2x nodes)",
        edges.iter().min().unwrap(),
        edges.iter().max().unwrap()
    );
}
