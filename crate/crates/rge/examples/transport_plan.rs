//! Exact node transportation between two graphs: the optimal flow, its
//! objective (the EMD), and the dual certificate.
//!
//! Run: cargo run --example transport_plan

use rge::spectral::node_embeddings;
use rge::synthetic::generate_synthetic;
use rge::transport::{dump_text, emd_with_duals, TransportProblem};

fn main() {
    let gx = generate_synthetic(6, 3).unwrap();
    let gy = generate_synthetic(9, 4).unwrap();
    let d = 2;
    let ex = node_embeddings(&gx, d).unwrap();
    let ey = node_embeddings(&gy, d).unwrap();

    // Pairwise Euclidean ground distances between embedding rows.
    let mut cost = ndarray::Array2::zeros((ex.node_count(), ey.node_count()));
    for i in 0..ex.node_count() {
        for j in 0..ey.node_count() {
            cost[[i, j]] = rge::transport::ground_distance(
                ex.vectors().row(i),
                ey.vectors().row(j),
                None,
                None,
            )
            .unwrap();
        }
    }
    let problem =
        TransportProblem::new(ex.weights().clone(), ey.weights().clone(), cost).unwrap();
    let (plan, duals) = emd_with_duals(&problem).unwrap();

    println!("EMD(G_x, G_y) = {:.6}\n", plan.objective());
    println!("{}", dump_text(&problem, &plan));

    if let Some((u, v)) = duals {
        // Complementary slackness: u_i + v_j = cost_ij wherever flow > 0.
        let mut worst = 0.0f64;
        for i in 0..u.len() {
            for j in 0..v.len() {
                if plan.flow()[[i, j]] > 0.0 {
                    worst = worst.max((problem.cost()[[i, j]] - u[i] - v[j]).abs());
                }
            }
        }
        println!("dual certificate: worst slack on the support = {worst:.2e}");
    }

    // Moving a graph onto itself costs nothing.
    let zero = rge::transport::emd_between_graphs(&ex, &ex).unwrap();
    println!("EMD(G_x, G_x) = {zero:.2e}");
}
