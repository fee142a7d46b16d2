//! L2-regularized hinge-loss linear SVM, trained by dual coordinate
//! descent (one-vs-rest for multiclass).
//!
//! The primal objective per class is `1/2 ||w||^2 + C * sum_i xi_i` with
//! `xi_i = max(0, 1 - y_i (w . x_i + b))`. The bias is handled by an
//! augmented constant feature, so it is regularized like the weights.
//! Coordinates are visited in a fixed order, making training
//! deterministic; iteration stops when the largest projected gradient
//! falls below 1e-4 or after 1000 epochs.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const PROJECTED_GRADIENT_TOL: f64 = 1e-4;
const MAX_EPOCHS: usize = 10_000;

/// A trained one-vs-rest linear classifier.
#[derive(Debug, Clone)]
pub struct LinearModel {
    weights: Array2<f64>,
    bias: Array1<f64>,
    classes: Vec<usize>,
}

impl LinearModel {
    /// One weight vector per class, rows aligned with [`classes`](Self::classes).
    pub fn weights(&self) -> ArrayView2<'_, f64> {
        self.weights.view()
    }

    pub fn bias(&self) -> ArrayView1<'_, f64> {
        self.bias.view()
    }

    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    /// Per-class margins `w_c . x + b_c`.
    pub fn decision(&self, x: ArrayView1<'_, f64>) -> Vec<f64> {
        self.weights
            .rows()
            .into_iter()
            .zip(self.bias.iter())
            .map(|(w, &b)| w.dot(&x) + b)
            .collect()
    }

    /// Highest-margin class; ties go to the lower class id.
    pub fn predict(&self, x: ArrayView1<'_, f64>) -> usize {
        let scores = self.decision(x);
        let mut best = 0;
        for k in 1..scores.len() {
            if scores[k] > scores[best] {
                best = k;
            }
        }
        self.classes[best]
    }

    pub fn predict_batch(&self, xs: ArrayView2<'_, f64>) -> Vec<usize> {
        xs.rows().into_iter().map(|row| self.predict(row)).collect()
    }

    /// Fraction of correctly classified rows.
    pub fn accuracy(&self, xs: ArrayView2<'_, f64>, labels: &[usize]) -> f64 {
        let correct = self
            .predict_batch(xs)
            .iter()
            .zip(labels)
            .filter(|(p, l)| p == l)
            .count();
        correct as f64 / labels.len() as f64
    }
}

/// Trains a one-vs-rest linear SVM on an `N x R` feature matrix.
pub fn svm_train(features: ArrayView2<'_, f64>, labels: &[usize], c: f64) -> Result<LinearModel> {
    let n = features.nrows();
    if n != labels.len() {
        return Err(Error::Dimension(format!(
            "{n} feature rows but {} labels",
            labels.len()
        )));
    }
    if n < 2 {
        return Err(Error::Precondition("need at least two training points".into()));
    }
    if !(c > 0.0) {
        return Err(Error::Precondition(format!("C must be positive, got {c}")));
    }
    let mut classes: Vec<usize> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::DegenerateLabels(format!(
            "training set contains only class {}",
            classes[0]
        )));
    }

    let dim = features.ncols();
    // Diagonal of the dual Hessian, with the augmented bias feature.
    let q_diag: Vec<f64> = features
        .rows()
        .into_iter()
        .map(|row| row.dot(&row) + 1.0)
        .collect();

    let mut weights = Array2::<f64>::zeros((classes.len(), dim));
    let mut bias = Array1::<f64>::zeros(classes.len());
    for (k, &class) in classes.iter().enumerate() {
        let y: Vec<f64> = labels
            .iter()
            .map(|&l| if l == class { 1.0 } else { -1.0 })
            .collect();
        let (w, b) = train_binary(features, &y, &q_diag, c);
        weights.row_mut(k).assign(&Array1::from(w));
        bias[k] = b;
    }

    Ok(LinearModel {
        weights,
        bias,
        classes,
    })
}

fn train_binary(features: ArrayView2<'_, f64>, y: &[f64], q_diag: &[f64], c: f64) -> (Vec<f64>, f64) {
    let n = features.nrows();
    let dim = features.ncols();
    let mut alpha = vec![0.0f64; n];
    let mut w = vec![0.0f64; dim];
    let mut b = 0.0f64;

    // Visiting coordinates in a freshly permuted order each epoch speeds
    // convergence substantially; the permutation stream is fixed, so
    // training stays deterministic.
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5531_90ab_cdef_1234);

    for _ in 0..MAX_EPOCHS {
        for k in (1..n).rev() {
            let pick = rng.gen_range(0..=k);
            order.swap(k, pick);
        }
        let mut max_violation = 0.0f64;
        for &i in &order {
            let row = features.row(i);
            let margin: f64 = row.dot(&ndarray::ArrayView1::from(&w[..])) + b;
            let gradient = y[i] * margin - 1.0;
            let projected = if alpha[i] <= 0.0 {
                gradient.min(0.0)
            } else if alpha[i] >= c {
                gradient.max(0.0)
            } else {
                gradient
            };
            max_violation = max_violation.max(projected.abs());
            if projected.abs() > 1e-12 {
                let updated = (alpha[i] - gradient / q_diag[i]).clamp(0.0, c);
                let delta = updated - alpha[i];
                if delta != 0.0 {
                    alpha[i] = updated;
                    let step = delta * y[i];
                    for (wk, &xk) in w.iter_mut().zip(row.iter()) {
                        *wk += step * xk;
                    }
                    b += step;
                }
            }
        }
        if max_violation < PROJECTED_GRADIENT_TOL {
            break;
        }
    }
    (w, b)
}

/// Primal objective `1/2 ||w||^2 + 1/2 b^2 + C sum xi` of a binary
/// problem, used by tests to compare against a reference optimizer.
pub fn primal_objective(
    features: ArrayView2<'_, f64>,
    y: &[f64],
    w: &[f64],
    b: f64,
    c: f64,
) -> f64 {
    let reg = 0.5 * (w.iter().map(|x| x * x).sum::<f64>() + b * b);
    let hinge: f64 = features
        .rows()
        .into_iter()
        .zip(y)
        .map(|(row, &yi)| {
            let margin: f64 = row.dot(&ndarray::ArrayView1::from(w)) + b;
            (1.0 - yi * margin).max(0.0)
        })
        .sum();
    reg + c * hinge
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn toy_separable() -> (Array2<f64>, Vec<usize>) {
        let features = array![
            [3.0, 3.2],
            [2.8, 3.1],
            [3.3, 2.7],
            [3.1, 3.0],
            [-3.0, -3.1],
            [-2.9, -3.3],
            [-3.2, -2.8],
            [-3.0, -3.0],
        ];
        let labels = vec![1, 1, 1, 1, 0, 0, 0, 0];
        (features, labels)
    }

    #[test]
    fn separates_two_far_clusters() {
        let (x, labels) = toy_separable();
        let model = svm_train(x.view(), &labels, 10.0).unwrap();
        assert_eq!(model.accuracy(x.view(), &labels), 1.0);
    }

    #[test]
    fn rejects_degenerate_labels() {
        let x = array![[1.0, 0.0], [0.0, 1.0]];
        match svm_train(x.view(), &[1, 1], 1.0) {
            Err(Error::DegenerateLabels(_)) => {}
            other => panic!("expected DegenerateLabels, got {other:?}"),
        }
    }

    #[test]
    fn duplicating_points_matches_halved_c() {
        // With a summed hinge loss, duplicating every training point is
        // the same objective as doubling C, so the duplicated problem at
        // C/2 reproduces the original decision function.
        let (x, labels) = toy_separable();
        let mut doubled = x.clone();
        doubled.append(ndarray::Axis(0), x.view()).unwrap();
        let mut labels2 = labels.clone();
        labels2.extend_from_slice(&labels);

        let base = svm_train(x.view(), &labels, 1.0).unwrap();
        let dup = svm_train(doubled.view(), &labels2, 0.5).unwrap();
        for (a, b) in base.weights().iter().zip(dup.weights().iter()) {
            assert!((a - b).abs() < 1e-3, "{a} vs {b}");
        }
        assert_eq!(
            base.predict_batch(x.view()),
            dup.predict_batch(x.view())
        );
    }

    #[test]
    fn objective_matches_long_subgradient_run() {
        // 20-point two-class problem; reference optimum from a slow
        // subgradient descent with averaging, run to tight convergence.
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        let mut state = 88172645463325252u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for i in 0..20 {
            let class = i % 2;
            let center = if class == 1 { 0.8 } else { -0.8 };
            rows.push([center + next() - 0.5, center + next() - 0.5, next() - 0.5]);
            labels.push(class);
        }
        let features = Array2::from_shape_fn((20, 3), |(i, j)| rows[i][j]);
        let y: Vec<f64> = labels.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
        let c = 2.0;

        let model = svm_train(features.view(), &labels, c).unwrap();
        let w: Vec<f64> = model.weights().row(1).to_vec();
        let b = model.bias()[1];
        let ours = primal_objective(features.view(), &y, &w, b, c);

        // Subgradient oracle on the same objective.
        let mut wo = vec![0.0f64; 3];
        let mut bo = 0.0f64;
        let mut best = f64::INFINITY;
        for t in 1..400_000usize {
            let step = 1.0 / (t as f64).sqrt() * 0.05;
            let mut gw = wo.clone();
            let mut gb = bo;
            for (row, &yi) in features.rows().into_iter().zip(&y) {
                let margin: f64 = row.dot(&ndarray::ArrayView1::from(&wo[..])) + bo;
                if 1.0 - yi * margin > 0.0 {
                    for (g, &xk) in gw.iter_mut().zip(row.iter()) {
                        *g -= c * yi * xk;
                    }
                    gb -= c * yi;
                }
            }
            for (wk, g) in wo.iter_mut().zip(&gw) {
                *wk -= step * g;
            }
            bo -= step * gb;
            best = best.min(primal_objective(features.view(), &y, &wo, bo, c));
        }
        let rel = (ours - best).abs() / best.abs().max(1.0);
        assert!(rel < 1e-3, "ours {ours} vs oracle {best} (rel {rel})");
    }

    #[test]
    fn prediction_invariant_under_zero_feature_column() {
        let (x, labels) = toy_separable();
        let mut padded = Array2::zeros((x.nrows(), x.ncols() + 1));
        padded.slice_mut(ndarray::s![.., ..x.ncols()]).assign(&x);
        let base = svm_train(x.view(), &labels, 5.0).unwrap();
        let wide = svm_train(padded.view(), &labels, 5.0).unwrap();
        assert_eq!(
            base.predict_batch(x.view()),
            wide.predict_batch(padded.view())
        );
    }

    #[test]
    fn multiclass_tie_breaks_toward_lower_class() {
        let model = LinearModel {
            weights: Array2::zeros((3, 2)),
            bias: Array1::zeros(3),
            classes: vec![0, 1, 2],
        };
        // all scores equal -> class 0
        assert_eq!(model.predict(array![1.0, 1.0].view()), 0);
    }
}
