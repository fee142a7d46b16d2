//! Miniature scalability study: embedding time against the number of
//! graphs and against the graph size, with fitted log-log slopes.
//!
//! The full-scale protocol (graph counts up to 16384, sizes up to 1024)
//! runs through the CLI: `rge bench --out <dir>`.
//!
//! Run: cargo run --example scalability

use rge::bench::{geometric_axis, sweep_graph_size, sweep_num_graphs, SweepConfig};

fn main() {
    let config = SweepConfig {
        r: 32,
        d_max: 6,
        d: 4,
        seed: 9,
        max_seconds: None,
    };

    let counts = sweep_num_graphs(&geometric_axis(16, 256), 40, &config).unwrap();
    println!("--- varying the number of graphs (n = 40 fixed) ---");
    print!("{}", counts.to_text());

    let sizes = sweep_graph_size(&geometric_axis(16, 256), 20, &config).unwrap();
    println!("\n--- varying the graph size (20 graphs fixed) ---");
    print!("{}", sizes.to_text());

    println!("\nembedding-time slopes: {:.2} vs graph count, {:.2} vs graph size",
        counts.embed_slope(), sizes.embed_slope());
    println!("(both close to 1: work grows (quasi-)linearly on each axis)");
}
