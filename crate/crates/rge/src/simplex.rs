//! Exact network simplex for dense transportation problems.
//!
//! Solves `min <C, T>` subject to `T 1 = a`, `T' 1 = b` for integer
//! supplies `a` and demands `b` with equal sums and a full bipartite arc
//! set with real-valued costs. Flows are integers throughout, so the
//! returned solution is an exact vertex of the transportation polytope.
//!
//! The implementation follows the classic primal network simplex with an
//! artificial root node: costs of artificial arcs are handled symbolically
//! as one unit of a big-M component, potentials are recomputed exactly
//! from the tree on every subtree reattachment, entering arcs are found by
//! cyclic block pricing, and the leaving arc uses the strongly-feasible
//! tie-breaking discipline (strict improvement on the tail path, weak on
//! the head path), which precludes cycling.

use ndarray::{Array2, ArrayView2};

use crate::constants::PIVOT_TOL;
use crate::error::{Error, Result};

/// An exact transportation optimum: integer flows, the objective under
/// the given costs, and dual potentials when a clean certificate exists.
pub(crate) struct TransportationSolution {
    pub flow: Array2<u64>,
    /// Dual variables (u, v) with `u_i + v_j <= c_ij`, tight on the flow
    /// support; `None` when the optimal basis leaves the duals pinned to
    /// artificial arcs (disconnected real support).
    pub duals: Option<(Vec<f64>, Vec<f64>)>,
}

pub(crate) fn solve_transportation(
    supplies: &[u64],
    demands: &[u64],
    cost: ArrayView2<'_, f64>,
) -> Result<TransportationSolution> {
    let nx = supplies.len();
    let ny = demands.len();
    debug_assert_eq!(cost.nrows(), nx);
    debug_assert_eq!(cost.ncols(), ny);
    let total: u64 = supplies.iter().sum();
    debug_assert_eq!(total, demands.iter().sum::<u64>());
    debug_assert!(supplies.iter().all(|&s| s > 0) && demands.iter().all(|&d| d > 0));

    // Single-row or single-column problems have a unique feasible flow,
    // and every dual constraint on the lone column (row) is tight.
    if ny == 1 {
        let mut flow = Array2::zeros((nx, 1));
        for i in 0..nx {
            flow[[i, 0]] = supplies[i];
        }
        let duals = Some((cost.column(0).to_vec(), vec![0.0]));
        return Ok(TransportationSolution { flow, duals });
    }
    if nx == 1 {
        let mut flow = Array2::zeros((1, ny));
        for j in 0..ny {
            flow[[0, j]] = demands[j];
        }
        let duals = Some((vec![0.0], cost.row(0).to_vec()));
        return Ok(TransportationSolution { flow, duals });
    }

    let mut simplex = Simplex::new(supplies, demands, cost);
    simplex.run()?;
    Ok(simplex.into_solution())
}

const NO_NODE: u32 = u32::MAX;

struct Simplex<'a> {
    nx: usize,
    ny: usize,
    cost: ArrayView2<'a, f64>,
    num_real: usize,
    num_arcs: usize,

    // Per-arc state. Real arc a = i * ny + j goes source i -> sink j;
    // artificial arc num_real + v joins node v and the root.
    flow: Vec<u64>,
    in_tree: Vec<bool>,

    // Per-node state; root = nx + ny.
    parent: Vec<u32>,
    pred_arc: Vec<u32>,
    /// Whether the pred arc is directed node -> parent.
    pred_to_parent: Vec<bool>,
    depth: Vec<u32>,
    children: Vec<Vec<u32>>,
    /// Potentials, split into a float part and an integer big-M part.
    pi_f: Vec<f64>,
    pi_m: Vec<i64>,

    next_arc: usize,
    block_size: usize,
}

impl<'a> Simplex<'a> {
    fn new(supplies: &[u64], demands: &[u64], cost: ArrayView2<'a, f64>) -> Self {
        let nx = supplies.len();
        let ny = demands.len();
        let num_real = nx * ny;
        let nodes = nx + ny + 1;
        let root = (nx + ny) as u32;
        let num_arcs = num_real + nx + ny;

        let mut flow = vec![0u64; num_arcs];
        let mut in_tree = vec![false; num_arcs];
        let mut parent = vec![root; nodes];
        let mut pred_arc = vec![0u32; nodes];
        let mut pred_to_parent = vec![false; nodes];
        let mut depth = vec![1u32; nodes];
        let mut children = vec![Vec::new(); nodes];
        let pi_f = vec![0.0; nodes];
        let mut pi_m = vec![0i64; nodes];

        parent[root as usize] = NO_NODE;
        depth[root as usize] = 0;
        children[root as usize] = (0..root).collect();

        for v in 0..nx + ny {
            let arc = (num_real + v) as u32;
            pred_arc[v] = arc;
            in_tree[arc as usize] = true;
            if v < nx {
                // source -> root, carrying the supply
                flow[arc as usize] = supplies[v];
                pred_to_parent[v] = true;
                pi_m[v] = 1; // from 0 = M - pi_v + pi_root
            } else {
                // root -> sink, carrying the demand
                flow[arc as usize] = demands[v - nx];
                pred_to_parent[v] = false;
                pi_m[v] = -1;
            }
        }

        let block_size = ((num_arcs as f64).sqrt().ceil() as usize).max(64).min(num_arcs);
        Simplex {
            nx,
            ny,
            cost,
            num_real,
            num_arcs,
            flow,
            in_tree,
            parent,
            pred_arc,
            pred_to_parent,
            depth,
            children,
            pi_f,
            pi_m,
            next_arc: 0,
            block_size,
        }
    }

    fn arc_endpoints(&self, arc: usize) -> (u32, u32) {
        if arc < self.num_real {
            ((arc / self.ny) as u32, (self.nx + arc % self.ny) as u32)
        } else {
            let v = (arc - self.num_real) as u32;
            let root = (self.nx + self.ny) as u32;
            if (v as usize) < self.nx {
                (v, root)
            } else {
                (root, v)
            }
        }
    }

    fn arc_cost(&self, arc: usize) -> (f64, i64) {
        if arc < self.num_real {
            (self.cost[[arc / self.ny, arc % self.ny]], 0)
        } else {
            (0.0, 1)
        }
    }

    /// Reduced cost of a non-tree arc: c - pi[tail] + pi[head].
    fn reduced_cost(&self, arc: usize) -> (f64, i64) {
        let (tail, head) = self.arc_endpoints(arc);
        let (cf, cm) = self.arc_cost(arc);
        (
            cf - self.pi_f[tail as usize] + self.pi_f[head as usize],
            cm - self.pi_m[tail as usize] + self.pi_m[head as usize],
        )
    }

    fn improving(rc: (f64, i64)) -> bool {
        rc.1 < 0 || (rc.1 == 0 && rc.0 < -PIVOT_TOL)
    }

    fn better(a: (f64, i64), b: (f64, i64)) -> bool {
        a.1 < b.1 || (a.1 == b.1 && a.0 < b.0)
    }

    /// Cyclic block pricing; returns the most improving arc of the first
    /// block that contains one.
    fn find_entering(&mut self) -> Option<usize> {
        let mut best: Option<(usize, (f64, i64))> = None;
        let mut scanned = 0;
        let mut arc = self.next_arc;
        let mut in_block = 0;
        while scanned < self.num_arcs {
            if !self.in_tree[arc] {
                let rc = self.reduced_cost(arc);
                if Self::improving(rc) {
                    match &best {
                        Some((_, brc)) if !Self::better(rc, *brc) => {}
                        _ => best = Some((arc, rc)),
                    }
                }
            }
            arc += 1;
            if arc == self.num_arcs {
                arc = 0;
            }
            scanned += 1;
            in_block += 1;
            if in_block == self.block_size {
                if best.is_some() {
                    break;
                }
                in_block = 0;
            }
        }
        self.next_arc = arc;
        best.map(|(a, _)| a)
    }

    fn run(&mut self) -> Result<()> {
        let nodes = self.nx + self.ny + 1;
        let max_pivots = 200 * nodes + 20 * self.num_arcs + 1000;
        let mut pivots = 0usize;
        while let Some(entering) = self.find_entering() {
            self.pivot(entering);
            pivots += 1;
            if pivots > max_pivots {
                return Err(Error::Numerical(format!(
                    "network simplex exceeded {max_pivots} pivots on {nodes}-node problem"
                )));
            }
        }
        // A balanced integer problem always zeroes the artificial arcs.
        for arc in self.num_real..self.num_arcs {
            if self.flow[arc] > 0 {
                return Err(Error::Infeasible(
                    "artificial flow remained after optimization".into(),
                ));
            }
        }
        Ok(())
    }

    fn join_of(&self, mut u: u32, mut v: u32) -> u32 {
        while self.depth[u as usize] > self.depth[v as usize] {
            u = self.parent[u as usize];
        }
        while self.depth[v as usize] > self.depth[u as usize] {
            v = self.parent[v as usize];
        }
        while u != v {
            u = self.parent[u as usize];
            v = self.parent[v as usize];
        }
        u
    }

    fn pivot(&mut self, entering: usize) {
        let (tail, head) = self.arc_endpoints(entering);
        let join = self.join_of(tail, head);

        // Ratio test. Pushing flow around the cycle tail ->(entering) head
        // -> ... -> join -> ... -> tail decreases tree arcs that point
        // against the cycle. Tail-side arcs are traversed parent-to-node,
        // head-side arcs node-to-parent.
        let mut delta = u64::MAX;
        let mut out_node = NO_NODE;
        let mut out_on_tail_side = false;
        let mut w = tail;
        while w != join {
            // cycle direction parent -> w: arcs w -> parent decrease
            if self.pred_to_parent[w as usize] {
                let f = self.flow[self.pred_arc[w as usize] as usize];
                if f < delta {
                    delta = f;
                    out_node = w;
                    out_on_tail_side = true;
                }
            }
            w = self.parent[w as usize];
        }
        let mut w = head;
        while w != join {
            // cycle direction w -> parent: arcs parent -> w decrease
            if !self.pred_to_parent[w as usize] {
                let f = self.flow[self.pred_arc[w as usize] as usize];
                if f <= delta {
                    delta = f;
                    out_node = w;
                    out_on_tail_side = false;
                }
            }
            w = self.parent[w as usize];
        }
        debug_assert_ne!(out_node, NO_NODE, "transportation cycles are always bounded");

        // Apply the flow change around the cycle.
        if delta > 0 {
            self.flow[entering] += delta;
            let mut w = tail;
            while w != join {
                let arc = self.pred_arc[w as usize] as usize;
                if self.pred_to_parent[w as usize] {
                    self.flow[arc] -= delta;
                } else {
                    self.flow[arc] += delta;
                }
                w = self.parent[w as usize];
            }
            let mut w = head;
            while w != join {
                let arc = self.pred_arc[w as usize] as usize;
                if self.pred_to_parent[w as usize] {
                    self.flow[arc] += delta;
                } else {
                    self.flow[arc] -= delta;
                }
                w = self.parent[w as usize];
            }
        }

        // Swap the leaving arc out of the tree and hang the detached
        // subtree from the entering arc.
        let leaving = self.pred_arc[out_node as usize] as usize;
        let attach = if out_on_tail_side { tail } else { head };
        let new_parent = if out_on_tail_side { head } else { tail };

        let old_parent = self.parent[out_node as usize];
        remove_child(&mut self.children[old_parent as usize], out_node);
        self.in_tree[leaving] = false;
        self.in_tree[entering] = true;

        // Reverse parent pointers along attach -> ... -> out_node.
        let mut path = Vec::new();
        let mut x = attach;
        while x != out_node {
            path.push(x);
            x = self.parent[x as usize];
        }
        path.push(out_node);
        let saved: Vec<(u32, bool)> = path
            .iter()
            .map(|&p| (self.pred_arc[p as usize], self.pred_to_parent[p as usize]))
            .collect();
        for k in 0..path.len() - 1 {
            let x = path[k];
            let y = path[k + 1];
            remove_child(&mut self.children[y as usize], x);
            self.children[x as usize].push(y);
            self.parent[y as usize] = x;
            self.pred_arc[y as usize] = saved[k].0;
            self.pred_to_parent[y as usize] = !saved[k].1;
        }
        self.parent[attach as usize] = new_parent;
        self.pred_arc[attach as usize] = entering as u32;
        self.pred_to_parent[attach as usize] = attach == tail;
        self.children[new_parent as usize].push(attach);

        // Depths and potentials of the reattached subtree, exact from the
        // tree arcs.
        let mut stack = vec![attach];
        while let Some(x) = stack.pop() {
            let p = self.parent[x as usize] as usize;
            self.depth[x as usize] = self.depth[p] + 1;
            let arc = self.pred_arc[x as usize] as usize;
            let (cf, cm) = self.arc_cost(arc);
            if self.pred_to_parent[x as usize] {
                // arc x -> p tight: pi_x = c + pi_p
                self.pi_f[x as usize] = cf + self.pi_f[p];
                self.pi_m[x as usize] = cm + self.pi_m[p];
            } else {
                // arc p -> x tight: pi_x = pi_p - c
                self.pi_f[x as usize] = self.pi_f[p] - cf;
                self.pi_m[x as usize] = self.pi_m[p] - cm;
            }
            stack.extend(self.children[x as usize].iter().copied());
        }
    }

    fn into_solution(self) -> TransportationSolution {
        let mut flow = Array2::zeros((self.nx, self.ny));
        for i in 0..self.nx {
            for j in 0..self.ny {
                flow[[i, j]] = self.flow[i * self.ny + j];
            }
        }
        // Duals are clean when every source/sink shares one M offset.
        let m0 = self.pi_m[0];
        let uniform = self.pi_m[..self.nx + self.ny].iter().all(|&m| m == m0);
        let duals = if uniform {
            let u = self.pi_f[..self.nx].to_vec();
            let v = self.pi_f[self.nx..self.nx + self.ny].iter().map(|&f| -f).collect();
            Some((u, v))
        } else {
            None
        };
        TransportationSolution { flow, duals }
    }
}

fn remove_child(children: &mut Vec<u32>, child: u32) {
    let pos = children
        .iter()
        .position(|&c| c == child)
        .expect("child must be present");
    children.swap_remove(pos);
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn objective(flow: &Array2<u64>, cost: &Array2<f64>, grid: f64) -> f64 {
        flow.iter()
            .zip(cost.iter())
            .map(|(&f, &c)| (f as f64 / grid) * c)
            .sum()
    }

    #[test]
    fn forced_single_sink() {
        let cost = array![[2.0], [4.0]];
        let sol = solve_transportation(&[5, 5], &[10], cost.view()).unwrap();
        assert_eq!(sol.flow, array![[5], [5]]);
        assert_abs_diff_eq!(objective(&sol.flow, &cost, 10.0), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_cost_matching() {
        let cost = array![[0.0, 2.0], [2.0, 0.0]];
        let sol = solve_transportation(&[5, 5], &[5, 5], cost.view()).unwrap();
        assert_abs_diff_eq!(objective(&sol.flow, &cost, 10.0), 0.0, epsilon = 1e-12);
        assert_eq!(sol.flow[[0, 0]], 5);
        assert_eq!(sol.flow[[1, 1]], 5);
    }

    #[test]
    fn known_two_by_two_optimum() {
        // Supplies (0.7, 0.3), demands (0.4, 0.6), costs [[1,3],[2,1]]:
        // optimal objective 1.6 with flow [[0.4, 0.3], [0, 0.3]].
        let cost = array![[1.0, 3.0], [2.0, 1.0]];
        let sol = solve_transportation(&[7, 3], &[4, 6], cost.view()).unwrap();
        assert_abs_diff_eq!(objective(&sol.flow, &cost, 10.0), 1.6, epsilon = 1e-12);
        assert_eq!(sol.flow, array![[4, 3], [0, 3]]);
    }

    #[test]
    fn duals_certify_optimality() {
        let cost = array![[1.0, 3.0, 0.5], [2.0, 1.0, 4.0], [0.25, 2.5, 1.0]];
        let sol = solve_transportation(&[5, 3, 2], &[4, 4, 2], cost.view()).unwrap();
        let (u, v) = sol.duals.expect("connected support");
        for i in 0..3 {
            for j in 0..3 {
                let slack = cost[[i, j]] - u[i] - v[j];
                assert!(slack >= -1e-9, "dual infeasible at ({i},{j}): {slack}");
                if sol.flow[[i, j]] > 0 {
                    assert!(slack.abs() <= 1e-9, "slack {slack} on support at ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn marginals_always_match() {
        let cost = array![
            [0.9, 0.1, 0.4, 0.7],
            [0.3, 0.8, 0.2, 0.6],
            [0.5, 0.5, 0.9, 0.1]
        ];
        let supplies = [17u64, 5, 11];
        let demands = [8u64, 9, 10, 6];
        let sol = solve_transportation(&supplies, &demands, cost.view()).unwrap();
        for i in 0..3 {
            let row: u64 = (0..4).map(|j| sol.flow[[i, j]]).sum();
            assert_eq!(row, supplies[i]);
        }
        for j in 0..4 {
            let col: u64 = (0..3).map(|i| sol.flow[[i, j]]).sum();
            assert_eq!(col, demands[j]);
        }
    }
}
