//! Earth Mover's Distance between weighted point sets.
//!
//! The distance is the optimum of the transportation LP
//! `min <D, T>  s.t.  T 1 = t_x, T' 1 = t_y, T >= 0`
//! where `D` is a pairwise ground-distance matrix and `t_x`, `t_y` are the
//! nBOW weight vectors of the two sides. Weights are rescaled onto a
//! common integer grid (largest-remainder apportionment, see
//! [`crate::constants::WEIGHT_GRID`]) and the rescaled problem is solved
//! exactly by network simplex, so results are deterministic and agree
//! with brute-force LP oracles to well below the 1e-9 tolerances.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::constants::{FEASIBILITY_TOL, WEIGHT_GRID};
use crate::error::{Error, Result};
use crate::simplex::solve_transportation;
use crate::spectral::NodeEmbeddings;

/// A transportation instance: two non-negative weight vectors of equal
/// mass and a non-negative cost matrix.
#[derive(Debug, Clone)]
pub struct TransportProblem {
    source_weights: Array1<f64>,
    sink_weights: Array1<f64>,
    cost: Array2<f64>,
}

impl TransportProblem {
    pub fn new(
        source_weights: Array1<f64>,
        sink_weights: Array1<f64>,
        cost: Array2<f64>,
    ) -> Result<Self> {
        if cost.nrows() != source_weights.len() || cost.ncols() != sink_weights.len() {
            return Err(Error::Dimension(format!(
                "cost is {}x{} but weights are {} and {}",
                cost.nrows(),
                cost.ncols(),
                source_weights.len(),
                sink_weights.len()
            )));
        }
        if source_weights.is_empty() || sink_weights.is_empty() {
            return Err(Error::InvalidInput("weight vectors must be non-empty".into()));
        }
        for (name, w) in [("source", &source_weights), ("sink", &sink_weights)] {
            if w.iter().any(|&x| !x.is_finite() || x < 0.0) {
                return Err(Error::InvalidInput(format!(
                    "{name} weights must be finite and non-negative"
                )));
            }
            if w.sum() <= 0.0 {
                return Err(Error::InvalidInput(format!("{name} weights must carry mass")));
            }
        }
        if cost.iter().any(|&c| !c.is_finite() || c < 0.0) {
            return Err(Error::InvalidInput("costs must be finite and non-negative".into()));
        }
        Ok(TransportProblem {
            source_weights,
            sink_weights,
            cost,
        })
    }

    pub fn source_weights(&self) -> ArrayView1<'_, f64> {
        self.source_weights.view()
    }

    pub fn sink_weights(&self) -> ArrayView1<'_, f64> {
        self.sink_weights.view()
    }

    pub fn cost(&self) -> ArrayView2<'_, f64> {
        self.cost.view()
    }
}

/// An optimal transportation flow and its objective value. The objective
/// is unique even when the flow is not.
#[derive(Debug, Clone)]
pub struct TransportPlan {
    flow: Array2<f64>,
    objective: f64,
}

impl TransportPlan {
    pub fn flow(&self) -> ArrayView2<'_, f64> {
        self.flow.view()
    }

    pub fn objective(&self) -> f64 {
        self.objective
    }
}

/// Solves the transportation LP exactly.
///
/// Rows and columns with exactly zero weight are dropped before the solve
/// and reinstated as zero flow. Errors if the two sides' masses differ by
/// more than [`FEASIBILITY_TOL`].
pub fn emd(problem: &TransportProblem) -> Result<TransportPlan> {
    Ok(emd_with_duals(problem)?.0)
}

/// Like [`emd`], also returning dual potentials `(u, v)` when the solver
/// terminated with a clean certificate (`u_i + v_j <= cost_ij`, tight on
/// the support of the flow).
pub fn emd_with_duals(
    problem: &TransportProblem,
) -> Result<(TransportPlan, Option<(Vec<f64>, Vec<f64>)>)> {
    let source_total = problem.source_weights.sum();
    let sink_total = problem.sink_weights.sum();
    if (source_total - sink_total).abs() > FEASIBILITY_TOL {
        return Err(Error::Infeasible(format!(
            "source mass {source_total} and sink mass {sink_total} differ by more than {FEASIBILITY_TOL}"
        )));
    }

    let supplies = apportion(problem.source_weights.view());
    let demands = apportion(problem.sink_weights.view());

    let live_rows: Vec<usize> = (0..supplies.len()).filter(|&i| supplies[i] > 0).collect();
    let live_cols: Vec<usize> = (0..demands.len()).filter(|&j| demands[j] > 0).collect();
    let reduced_supplies: Vec<u64> = live_rows.iter().map(|&i| supplies[i]).collect();
    let reduced_demands: Vec<u64> = live_cols.iter().map(|&j| demands[j]).collect();
    let reduced_cost = Array2::from_shape_fn((live_rows.len(), live_cols.len()), |(a, b)| {
        problem.cost[[live_rows[a], live_cols[b]]]
    });

    let solution = solve_transportation(&reduced_supplies, &reduced_demands, reduced_cost.view())?;

    let nx = problem.source_weights.len();
    let ny = problem.sink_weights.len();
    let inv_grid = 1.0 / WEIGHT_GRID as f64;
    let mut flow = Array2::<f64>::zeros((nx, ny));
    let mut objective = 0.0;
    for (a, &i) in live_rows.iter().enumerate() {
        for (b, &j) in live_cols.iter().enumerate() {
            let units = solution.flow[[a, b]];
            if units > 0 {
                let f = units as f64 * inv_grid;
                flow[[i, j]] = f;
                objective += f * problem.cost[[i, j]];
            }
        }
    }

    let duals = solution.duals.map(|(u, v)| {
        let mut full_u = vec![0.0; nx];
        let mut full_v = vec![0.0; ny];
        for (a, &i) in live_rows.iter().enumerate() {
            full_u[i] = u[a];
        }
        for (b, &j) in live_cols.iter().enumerate() {
            full_v[j] = v[b];
        }
        // Dropped rows/columns carry no mass; give them feasible duals.
        for i in 0..nx {
            if supplies[i] == 0 {
                full_u[i] = (0..ny)
                    .map(|j| problem.cost[[i, j]] - full_v[j])
                    .fold(f64::INFINITY, f64::min);
            }
        }
        for j in 0..ny {
            if demands[j] == 0 {
                full_v[j] = (0..nx)
                    .map(|i| problem.cost[[i, j]] - full_u[i])
                    .fold(f64::INFINITY, f64::min);
            }
        }
        (full_u, full_v)
    });

    Ok((TransportPlan { flow, objective }, duals))
}

/// Debug dump of a solved instance: the cost matrix, the flow matrix,
/// and the objective, as plain text.
pub fn dump_text(problem: &TransportProblem, plan: &TransportPlan) -> String {
    let mut out = String::from("cost\n");
    for row in problem.cost.rows() {
        let fields: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&fields.join(" "));
        out.push('\n');
    }
    out.push_str("flow\n");
    for row in plan.flow.rows() {
        let fields: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&fields.join(" "));
        out.push('\n');
    }
    out.push_str(&format!("objective {:.16e}\n", plan.objective));
    out
}

/// Ground distance between two embedding rows: Euclidean when labels are
/// absent or equal, and exactly `sqrt(d)` when both rows are labeled and
/// the labels differ (the diameter of the d-dimensional unit hypercube,
/// which dominates any Euclidean distance between embeddings).
pub fn ground_distance(
    a: ArrayView1<'_, f64>,
    b: ArrayView1<'_, f64>,
    label_a: Option<u32>,
    label_b: Option<u32>,
) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!(
            "rows have widths {} and {}",
            a.len(),
            b.len()
        )));
    }
    match (label_a, label_b) {
        (Some(la), Some(lb)) if la != lb => Ok((a.len() as f64).sqrt()),
        (Some(_), Some(_)) | (None, None) => Ok(euclidean(a, b)),
        _ => Err(Error::Precondition(
            "cannot compare a labeled node with an unlabeled one".into(),
        )),
    }
}

fn euclidean(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// EMD between two graphs' node embeddings under the label-aware ground
/// distance. Node labels are used when both sides carry them; exactly one
/// labeled side is an error.
pub fn emd_between_graphs(x: &NodeEmbeddings, y: &NodeEmbeddings) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::Dimension(format!(
            "embeddings have dimensions {} and {}",
            x.dim(),
            y.dim()
        )));
    }
    if x.labels().is_some() != y.labels().is_some() {
        return Err(Error::Precondition(
            "label presence must match on both graphs".into(),
        ));
    }
    let problem = TransportProblem::new(
        x.weights().clone(),
        y.weights().clone(),
        cost_matrix(x, y, x.labels().is_some()),
    )?;
    Ok(emd(&problem)?.objective)
}

/// Pairwise ground-distance matrix between two embedding sets.
pub(crate) fn cost_matrix(x: &NodeEmbeddings, y: &NodeEmbeddings, use_labels: bool) -> Array2<f64> {
    let (nx, ny) = (x.node_count(), y.node_count());
    let sqrt_d = (x.dim() as f64).sqrt();
    let mut cost = Array2::zeros((nx, ny));
    for i in 0..nx {
        let a = x.vectors().row(i);
        for j in 0..ny {
            let b = y.vectors().row(j);
            cost[[i, j]] = if use_labels {
                let (la, lb) = (x.labels().unwrap()[i], y.labels().unwrap()[j]);
                if la != lb {
                    sqrt_d
                } else {
                    euclidean(a, b)
                }
            } else {
                euclidean(a, b)
            };
        }
    }
    cost
}

/// Largest-remainder apportionment of a weight vector onto the integer
/// grid: results are exact integers summing to `WEIGHT_GRID`, each within
/// one grid unit of the normalized weight.
fn apportion(weights: ArrayView1<'_, f64>) -> Vec<u64> {
    let total: f64 = weights.sum();
    let grid = WEIGHT_GRID as f64;
    let mut floors: Vec<u64> = Vec::with_capacity(weights.len());
    let mut remainders: Vec<(f64, usize)> = Vec::with_capacity(weights.len());
    let mut assigned: u64 = 0;
    for (i, &w) in weights.iter().enumerate() {
        let scaled = w / total * grid;
        let floor = scaled.floor().min(grid) as u64;
        floors.push(floor);
        remainders.push((scaled - floor as f64, i));
        assigned += floor;
    }
    let missing = WEIGHT_GRID.saturating_sub(assigned) as usize;
    // Largest remainders first; ties resolved toward lower index.
    remainders.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    for k in 0..missing {
        floors[remainders[k].1] += 1;
    }
    floors
}
