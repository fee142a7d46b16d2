//! Scalability sweeps over the number of graphs and the graph size.
//!
//! Each point generates a synthetic dataset (every graph has twice as
//! many edges as nodes), then times the two pipeline phases separately:
//! the eigensolve (spectral node embeddings) and the embedding (random
//! graph generation plus all EMD feature evaluations). A log-log slope
//! fitted to the timings quantifies the empirical scaling.

use std::time::Instant;

use rayon::prelude::*;

use crate::embedding::{embed_dataset, SamplerConfig, Scheme};
use crate::error::Result;
use crate::spectral::{node_embeddings, NodeEmbeddings};
use crate::synthetic::synthetic_dataset;

/// Timings for one sweep point.
#[derive(Debug, Clone)]
pub struct BenchPoint {
    pub axis: usize,
    pub eigensolve_seconds: f64,
    pub embed_seconds: f64,
    pub total_seconds: f64,
}

/// A completed (possibly truncated) sweep.
#[derive(Debug, Clone)]
pub struct BenchTable {
    pub axis_name: &'static str,
    pub points: Vec<BenchPoint>,
    /// True when a wall-clock budget stopped the sweep early.
    pub aborted: bool,
}

impl BenchTable {
    /// Fitted log-log slope of embedding time against the axis.
    pub fn embed_slope(&self) -> f64 {
        fit_loglog_slope(
            &self
                .points
                .iter()
                .map(|p| (p.axis as f64, p.embed_seconds))
                .collect::<Vec<_>>(),
        )
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} eigensolve_s embed_s total_s\n", self.axis_name);
        for p in &self.points {
            out.push_str(&format!(
                "{} {:.6} {:.6} {:.6}\n",
                p.axis, p.eigensolve_seconds, p.embed_seconds, p.total_seconds
            ));
        }
        if self.points.len() >= 2 {
            out.push_str(&format!("embed_loglog_slope {:.4}\n", self.embed_slope()));
        }
        if self.aborted {
            out.push_str("aborted_by_budget 1\n");
        }
        out
    }
}

/// Geometric axis `start, 2*start, ...` up to and including `end`.
pub fn geometric_axis(start: usize, end: usize) -> Vec<usize> {
    let mut axis = Vec::new();
    let mut v = start;
    while v <= end {
        axis.push(v);
        v *= 2;
    }
    axis
}

/// Least-squares slope of `ln(y)` against `ln(x)`.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points
        .iter()
        .map(|&(x, y)| (x.ln(), y.max(1e-12).ln()))
        .collect();
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let cov: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let var: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    cov / var
}

/// Sweeps the number of graphs at fixed graph size.
pub fn sweep_num_graphs(
    counts: &[usize],
    node_count: usize,
    config: &SweepConfig,
) -> Result<BenchTable> {
    run_sweep("num_graphs", counts, config, |&n| (n, node_count))
}

/// Sweeps the graph size at a fixed number of graphs.
pub fn sweep_graph_size(
    sizes: &[usize],
    num_graphs: usize,
    config: &SweepConfig,
) -> Result<BenchTable> {
    run_sweep("graph_size", sizes, config, |&n| (num_graphs, n))
}

/// Sweep-wide settings; the embedding always uses the data-independent
/// scheme.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub r: usize,
    pub d_max: usize,
    pub d: usize,
    pub seed: u64,
    /// Wall-clock budget in seconds; the sweep stops before starting a
    /// point that would exceed it, keeping partial results.
    pub max_seconds: Option<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            r: 128,
            d_max: 10,
            d: 6,
            seed: 1,
            max_seconds: None,
        }
    }
}

fn run_sweep(
    axis_name: &'static str,
    axis: &[usize],
    config: &SweepConfig,
    shape: impl Fn(&usize) -> (usize, usize),
) -> Result<BenchTable> {
    let started = Instant::now();
    let mut points = Vec::with_capacity(axis.len());
    let mut aborted = false;
    for value in axis {
        if let Some(budget) = config.max_seconds {
            if started.elapsed().as_secs_f64() > budget {
                aborted = true;
                break;
            }
        }
        let (num_graphs, node_count) = shape(value);
        let dataset = synthetic_dataset(num_graphs, node_count, config.seed)?;

        let eig_start = Instant::now();
        let embeddings: Result<Vec<NodeEmbeddings>> = dataset
            .graphs()
            .par_iter()
            .map(|g| node_embeddings(g, config.d))
            .collect();
        let embeddings = embeddings?;
        let eigensolve_seconds = eig_start.elapsed().as_secs_f64();

        let sampler_config = SamplerConfig {
            scheme: Scheme::Rf,
            d_max: config.d_max,
            r: config.r,
            gamma: 1.0,
            d: config.d,
            seed: config.seed,
            use_labels: false,
        };
        let embed_start = Instant::now();
        let (_z, _graphs) = embed_dataset(&embeddings, &sampler_config, &[])?;
        let embed_seconds = embed_start.elapsed().as_secs_f64();

        points.push(BenchPoint {
            axis: *value,
            eigensolve_seconds,
            embed_seconds,
            total_seconds: eigensolve_seconds + embed_seconds,
        });
    }
    Ok(BenchTable {
        axis_name,
        points,
        aborted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_exact_power_law() {
        let points: Vec<(f64, f64)> = (1..=6).map(|k| {
            let x = (1 << k) as f64;
            (x, 0.5 * x.powf(1.25))
        }).collect();
        assert!((fit_loglog_slope(&points) - 1.25).abs() < 1e-12);
    }

    #[test]
    fn geometric_axis_doubles() {
        assert_eq!(geometric_axis(8, 64), vec![8, 16, 32, 64]);
        assert_eq!(geometric_axis(8, 100), vec![8, 16, 32, 64]);
    }

    #[test]
    fn sweep_produces_one_row_per_point() {
        let cfg = SweepConfig {
            r: 4,
            d_max: 3,
            d: 2,
            seed: 5,
            max_seconds: None,
        };
        let table = sweep_num_graphs(&[4, 8], 12, &cfg).unwrap();
        assert_eq!(table.points.len(), 2);
        assert!(!table.aborted);
        assert_eq!(table.points[0].axis, 4);
        assert!(table.points.iter().all(|p| p.total_seconds >= p.embed_seconds));
    }

    #[test]
    fn zero_budget_aborts_gracefully() {
        let cfg = SweepConfig {
            r: 4,
            d_max: 3,
            d: 2,
            seed: 5,
            max_seconds: Some(0.0),
        };
        let table = sweep_graph_size(&[8, 16], 4, &cfg).unwrap();
        assert!(table.aborted);
        assert!(table.points.len() < 2);
    }
}
