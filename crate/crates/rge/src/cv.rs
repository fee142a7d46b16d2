//! Repeated stratified k-fold cross-validation with inner hyperparameter
//! selection.
//!
//! The protocol: spectral preprocessing runs once over the whole dataset
//! (it is label-free); per fold, random graphs are sampled from the
//! training graphs only, hyperparameters (gamma, D_max, C) are chosen by
//! an inner 3-fold grid search on the training folds, and the held-out
//! fold is embedded with the training fold's random graph columns. Every
//! random draw derives from the run seed, the repetition, and the fold,
//! so reports are reproducible run to run regardless of thread count.
//!
//! Because the EMD between a graph and a random graph does not depend on
//! gamma, the grid over gamma reuses one raw EMD matrix per `D_max`.

use std::time::Instant;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::embedding::{
    emd_feature_matrix, EmbeddingMatrix, RandomGraphSampler, SamplerConfig, Scheme,
};
use crate::error::{Error, Result};
use crate::graph::Dataset;
use crate::seeding::derive_seed;
use crate::spectral::{node_embeddings, NodeEmbeddings};
use crate::svm::svm_train;

/// Hyperparameter grids and fixed embedding settings for one evaluation.
#[derive(Debug, Clone)]
pub struct GridConfig {
    pub gammas: Vec<f64>,
    pub d_maxes: Vec<usize>,
    pub cs: Vec<f64>,
    pub scheme: Scheme,
    pub use_labels: bool,
    pub r: usize,
    pub d: usize,
}

impl GridConfig {
    /// The evaluation grids: gamma in {1e-3..10}, D_max in {3,6,..,30},
    /// C in {1e-2..100}.
    pub fn standard(scheme: Scheme, use_labels: bool, r: usize, d: usize) -> Self {
        GridConfig {
            gammas: vec![1e-3, 1e-2, 1e-1, 1.0, 10.0],
            d_maxes: (1..=10).map(|k| 3 * k).collect(),
            cs: vec![1e-2, 1e-1, 1.0, 10.0, 100.0],
            scheme,
            use_labels,
            r,
            d,
        }
    }
}

/// Hyperparameters chosen for one (repetition, fold) run.
#[derive(Debug, Clone, PartialEq)]
pub struct ChosenParams {
    pub repetition: usize,
    pub fold: usize,
    pub gamma: f64,
    pub d_max: usize,
    pub c: f64,
    pub accuracy: f64,
}

/// Cross-validation outcome: per-run accuracies (percent) and summary
/// statistics. `mean_accuracy` averages all runs; `std_accuracy` is the
/// sample standard deviation of the per-repetition means.
#[derive(Debug, Clone)]
pub struct CvReport {
    pub dataset: String,
    pub num_classes: usize,
    pub repetitions: usize,
    pub folds: usize,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub per_run: Array2<f64>,
    pub chosen: Vec<ChosenParams>,
    pub wall_time_seconds: f64,
}

impl CvReport {
    pub fn recompute_mean(&self) -> f64 {
        self.per_run.iter().sum::<f64>() / (self.per_run.len() as f64)
    }

    pub fn recompute_std(&self) -> f64 {
        let rep_means: Vec<f64> = self
            .per_run
            .rows()
            .into_iter()
            .map(|r| r.sum() / r.len() as f64)
            .collect();
        let n = rep_means.len() as f64;
        if rep_means.len() < 2 {
            return 0.0;
        }
        let mean = rep_means.iter().sum::<f64>() / n;
        (rep_means.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    }

    /// Structured text document: key-value header, one line per run with
    /// its chosen hyperparameters, then the accuracy grid. The wall time
    /// goes on the final line so seed-identical reruns differ at most
    /// there.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("dataset {}\n", self.dataset));
        out.push_str(&format!("classes {}\n", self.num_classes));
        out.push_str(&format!("repetitions {}\n", self.repetitions));
        out.push_str(&format!("folds {}\n", self.folds));
        out.push_str(&format!("mean_accuracy {:.6}\n", self.mean_accuracy));
        out.push_str(&format!("std_accuracy {:.6}\n", self.std_accuracy));
        for p in &self.chosen {
            out.push_str(&format!(
                "run rep={} fold={} accuracy={:.6} gamma={} dmax={} c={}\n",
                p.repetition, p.fold, p.accuracy, p.gamma, p.d_max, p.c
            ));
        }
        out.push_str("accuracy_grid\n");
        for row in self.per_run.rows() {
            let fields: Vec<String> = row.iter().map(|v| format!("{v:.6}")).collect();
            out.push_str(&fields.join(" "));
            out.push('\n');
        }
        out.push_str(&format!("wall_time_seconds {:.3}\n", self.wall_time_seconds));
        out
    }
}

/// Stratified fold assignment: indices of each class are shuffled and
/// dealt round-robin, so every fold holds each class's share within one
/// sample. Returns `folds` index lists.
pub fn stratified_folds(
    labels: &[usize],
    folds: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Vec<usize>>> {
    let num_classes = labels.iter().copied().max().unwrap_or(0) + 1;
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); num_classes];
    for (i, &l) in labels.iter().enumerate() {
        by_class[l].push(i);
    }
    for (class, members) in by_class.iter().enumerate() {
        if !members.is_empty() && members.len() < folds {
            return Err(Error::Stratification {
                class,
                count: members.len(),
                folds,
            });
        }
    }
    let mut assignment = vec![Vec::new(); folds];
    let mut cursor = 0usize;
    for members in &mut by_class {
        // Fisher-Yates shuffle
        for k in (1..members.len()).rev() {
            let pick = rng.gen_range(0..=k);
            members.swap(k, pick);
        }
        for &idx in members.iter() {
            assignment[cursor % folds].push(idx);
            cursor += 1;
        }
    }
    for fold in &mut assignment {
        fold.sort_unstable();
    }
    Ok(assignment)
}

/// Inner folds are lenient about tiny classes: no stratification error,
/// classes smaller than the fold count simply land where the deal puts
/// them.
fn lenient_folds(labels: &[usize], folds: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let num_classes = labels.iter().copied().max().unwrap_or(0) + 1;
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); num_classes];
    for (i, &l) in labels.iter().enumerate() {
        by_class[l].push(i);
    }
    let mut assignment = vec![Vec::new(); folds];
    let mut cursor = 0usize;
    for members in &mut by_class {
        for k in (1..members.len()).rev() {
            let pick = rng.gen_range(0..=k);
            members.swap(k, pick);
        }
        for &idx in members.iter() {
            assignment[cursor % folds].push(idx);
            cursor += 1;
        }
    }
    for fold in &mut assignment {
        fold.sort_unstable();
    }
    assignment
}

/// Runs `repetitions x folds` stratified cross-validation with inner
/// 3-fold selection of (gamma, D_max, C) on the training folds only.
pub fn cross_validate(
    dataset: &Dataset,
    grid: &GridConfig,
    repetitions: usize,
    folds: usize,
    seed: u64,
) -> Result<CvReport> {
    let start = Instant::now();
    if repetitions == 0 || folds < 2 {
        return Err(Error::Precondition(
            "need at least one repetition and two folds".into(),
        ));
    }
    if grid.gammas.is_empty() || grid.d_maxes.is_empty() || grid.cs.is_empty() {
        return Err(Error::Precondition("hyperparameter grids must be non-empty".into()));
    }
    if dataset.num_classes() < 2 {
        return Err(Error::DegenerateLabels(
            "cross-validation needs at least two classes".into(),
        ));
    }
    if grid.use_labels && !dataset.has_node_labels() {
        return Err(Error::Precondition(
            "use_labels requires node labels in the dataset".into(),
        ));
    }

    // Spectral preprocessing is unsupervised; compute it once.
    let embeddings: Result<Vec<NodeEmbeddings>> = dataset
        .graphs()
        .par_iter()
        .map(|g| node_embeddings(g, grid.d))
        .collect();
    let embeddings = embeddings?;
    let labels = dataset.graph_labels();

    // Fail fast on stratification before any heavy work.
    {
        let mut probe = ChaCha8Rng::seed_from_u64(derive_seed(&[seed, 0, 0xf01d]));
        stratified_folds(labels, folds, &mut probe)?;
    }

    let runs: Result<Vec<Vec<(f64, ChosenParams)>>> = (0..repetitions)
        .into_par_iter()
        .map(|rep| {
            let mut fold_rng =
                ChaCha8Rng::seed_from_u64(derive_seed(&[seed, rep as u64, 0xf01d]));
            let fold_sets = stratified_folds(labels, folds, &mut fold_rng)?;
            let mut results = Vec::with_capacity(folds);
            for fold in 0..folds {
                let run = run_single_fold(
                    &embeddings,
                    labels,
                    grid,
                    &fold_sets,
                    rep,
                    fold,
                    seed,
                )?;
                results.push(run);
            }
            Ok(results)
        })
        .collect();
    let runs = runs?;

    let mut per_run = Array2::zeros((repetitions, folds));
    let mut chosen = Vec::with_capacity(repetitions * folds);
    for (rep, fold_results) in runs.into_iter().enumerate() {
        for (fold, (accuracy, params)) in fold_results.into_iter().enumerate() {
            per_run[[rep, fold]] = accuracy;
            chosen.push(params);
        }
    }

    let mut report = CvReport {
        dataset: dataset.name().to_string(),
        num_classes: dataset.num_classes(),
        repetitions,
        folds,
        mean_accuracy: 0.0,
        std_accuracy: 0.0,
        per_run,
        chosen,
        wall_time_seconds: 0.0,
    };
    report.mean_accuracy = report.recompute_mean();
    report.std_accuracy = report.recompute_std();
    report.wall_time_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

fn run_single_fold(
    embeddings: &[NodeEmbeddings],
    labels: &[usize],
    grid: &GridConfig,
    fold_sets: &[Vec<usize>],
    rep: usize,
    fold: usize,
    seed: u64,
) -> Result<(f64, ChosenParams)> {
    let test_idx: &[usize] = &fold_sets[fold];
    let train_idx: Vec<usize> = (0..fold_sets.len())
        .filter(|&f| f != fold)
        .flat_map(|f| fold_sets[f].iter().copied())
        .collect();
    let train_labels: Vec<usize> = train_idx.iter().map(|&i| labels[i]).collect();
    let test_labels: Vec<usize> = test_idx.iter().map(|&i| labels[i]).collect();
    let train_embeddings: Vec<NodeEmbeddings> =
        train_idx.iter().map(|&i| embeddings[i].clone()).collect();
    let test_embeddings: Vec<NodeEmbeddings> =
        test_idx.iter().map(|&i| embeddings[i].clone()).collect();

    // One raw EMD matrix per D_max; every gamma reuses it.
    let mut train_raw = Vec::with_capacity(grid.d_maxes.len());
    let mut test_raw = Vec::with_capacity(grid.d_maxes.len());
    for (di, &d_max) in grid.d_maxes.iter().enumerate() {
        let column_seed = derive_seed(&[seed, rep as u64, fold as u64, di as u64]);
        let config = SamplerConfig {
            scheme: grid.scheme,
            d_max,
            r: grid.r,
            gamma: 1.0,
            d: grid.d,
            seed: column_seed,
            use_labels: grid.use_labels,
        };
        // Random graphs are drawn from the training graphs only; the
        // sampler never sees the held-out fold.
        let sampler = RandomGraphSampler::new(&config, embeddings, &train_idx)?;
        let graphs: Result<Vec<_>> = (1..=grid.r as u64)
            .into_par_iter()
            .map(|j| sampler.column(j))
            .collect();
        let graphs = graphs?;
        train_raw.push(emd_feature_matrix(&train_embeddings, &graphs)?);
        test_raw.push(emd_feature_matrix(&test_embeddings, &graphs)?);
    }

    // Inner 3-fold selection over (gamma, d_max, c), on training data only.
    let mut inner_rng =
        ChaCha8Rng::seed_from_u64(derive_seed(&[seed, rep as u64, fold as u64, 0x1223]));
    let inner_sets = lenient_folds(&train_labels, 3, &mut inner_rng);
    let scale = 1.0 / (grid.r as f64).sqrt();

    let mut best: Option<(f64, usize, usize, usize)> = None; // acc, gi, di, ci
    for (di, raw) in train_raw.iter().enumerate() {
        for (gi, &gamma) in grid.gammas.iter().enumerate() {
            let features = raw.mapv(|e| (-gamma * e).exp() * scale);
            for (ci, &c) in grid.cs.iter().enumerate() {
                let mut correct = 0usize;
                let mut total = 0usize;
                for inner in 0..inner_sets.len() {
                    let val_idx = &inner_sets[inner];
                    if val_idx.is_empty() {
                        continue;
                    }
                    let fit_idx: Vec<usize> = (0..inner_sets.len())
                        .filter(|&k| k != inner)
                        .flat_map(|k| inner_sets[k].iter().copied())
                        .collect();
                    let fit_labels: Vec<usize> =
                        fit_idx.iter().map(|&i| train_labels[i]).collect();
                    let mut distinct = fit_labels.clone();
                    distinct.sort_unstable();
                    distinct.dedup();
                    if distinct.len() < 2 {
                        continue;
                    }
                    let fit_rows = select_rows(&features, &fit_idx);
                    let model = svm_train(fit_rows.view(), &fit_labels, c)?;
                    for &v in val_idx {
                        let row = features.row(v);
                        if model.predict(row) == train_labels[v] {
                            correct += 1;
                        }
                        total += 1;
                    }
                }
                let accuracy = if total > 0 {
                    correct as f64 / total as f64
                } else {
                    0.0
                };
                let better = match best {
                    None => true,
                    Some((best_acc, ..)) => accuracy > best_acc,
                };
                if better {
                    best = Some((accuracy, gi, di, ci));
                }
            }
        }
    }
    let (_, gi, di, ci) = best.expect("grids are non-empty");
    let (gamma, d_max, c) = (grid.gammas[gi], grid.d_maxes[di], grid.cs[ci]);

    // Final model on the full training fold, evaluated on the held-out
    // fold embedded with the same random graph columns.
    let config = SamplerConfig {
        scheme: grid.scheme,
        d_max,
        r: grid.r,
        gamma,
        d: grid.d,
        seed: derive_seed(&[seed, rep as u64, fold as u64, di as u64]),
        use_labels: grid.use_labels,
    };
    let train_features = EmbeddingMatrix::from_emd_matrix(&train_raw[di], &config);
    let test_features = EmbeddingMatrix::from_emd_matrix(&test_raw[di], &config);
    let model = svm_train(train_features.values().view(), &train_labels, c)?;
    let accuracy = model.accuracy(test_features.values().view(), &test_labels) * 100.0;

    Ok((
        accuracy,
        ChosenParams {
            repetition: rep,
            fold,
            gamma,
            d_max,
            c,
            accuracy,
        },
    ))
}

fn select_rows(matrix: &Array2<f64>, rows: &[usize]) -> Array2<f64> {
    Array2::from_shape_fn((rows.len(), matrix.ncols()), |(r, c)| matrix[[rows[r], c]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Dataset, Graph};

    fn noiseless_dataset(copies: usize) -> Dataset {
        // Class is a deterministic function of the (constant) 1-column
        // embedding: single edges embed at 1/sqrt(2), triangles at 1/sqrt(3).
        let mut graphs = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..copies {
            graphs.push(Graph::unlabeled(2, vec![(0, 1)]).unwrap());
            labels.push(0);
            graphs.push(Graph::unlabeled(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap());
            labels.push(1);
        }
        Dataset::new("noiseless", graphs, labels).unwrap()
    }

    #[test]
    fn stratified_folds_balance_classes() {
        let labels: Vec<usize> = (0..53).map(|i| if i < 31 { 0 } else { 1 }).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let folds = stratified_folds(&labels, 10, &mut rng).unwrap();
        assert_eq!(folds.iter().map(|f| f.len()).sum::<usize>(), 53);
        let mut seen = vec![false; 53];
        for fold in &folds {
            let zeros = fold.iter().filter(|&&i| labels[i] == 0).count();
            let ones = fold.len() - zeros;
            assert!((3..=4).contains(&zeros), "zeros per fold: {zeros}");
            assert!((2..=3).contains(&ones), "ones per fold: {ones}");
            for &i in fold {
                assert!(!seen[i]);
                seen[i] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn small_class_raises_stratification_error() {
        let labels = vec![0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1];
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        match stratified_folds(&labels, 10, &mut rng) {
            Err(Error::Stratification { class, count, folds }) => {
                assert_eq!((class, count, folds), (1, 3, 10));
            }
            other => panic!("expected Stratification, got {other:?}"),
        }
    }

    #[test]
    fn noiseless_pipeline_reaches_full_accuracy() {
        let dataset = noiseless_dataset(10);
        let grid = GridConfig {
            gammas: vec![1.0, 10.0],
            d_maxes: vec![3],
            cs: vec![1.0, 100.0],
            scheme: Scheme::Rf,
            use_labels: false,
            r: 8,
            d: 1,
        };
        let report = cross_validate(&dataset, &grid, 2, 5, 7).unwrap();
        assert_eq!(report.mean_accuracy, 100.0);
        assert_eq!(report.std_accuracy, 0.0);
        assert_eq!(report.per_run.dim(), (2, 5));
        assert_eq!(report.chosen.len(), 10);
    }

    #[test]
    fn report_statistics_recompute_from_grid() {
        let dataset = noiseless_dataset(6);
        let grid = GridConfig {
            gammas: vec![0.1, 1.0],
            d_maxes: vec![2],
            cs: vec![1.0],
            scheme: Scheme::Asg,
            use_labels: false,
            r: 4,
            d: 1,
        };
        let report = cross_validate(&dataset, &grid, 3, 4, 11).unwrap();
        assert!((report.mean_accuracy - report.recompute_mean()).abs() < 1e-9);
        assert!((report.std_accuracy - report.recompute_std()).abs() < 1e-9);
    }

    #[test]
    fn reports_are_seed_reproducible() {
        let dataset = noiseless_dataset(5);
        let grid = GridConfig {
            gammas: vec![0.5],
            d_maxes: vec![2, 4],
            cs: vec![1.0],
            scheme: Scheme::Rf,
            use_labels: false,
            r: 4,
            d: 2,
        };
        let a = cross_validate(&dataset, &grid, 2, 5, 3).unwrap();
        let b = cross_validate(&dataset, &grid, 2, 5, 3).unwrap();
        assert_eq!(a.per_run, b.per_run);
        assert_eq!(a.chosen, b.chosen);
        // Everything but the wall time is byte-identical.
        let strip = |s: &str| {
            s.lines()
                .filter(|l| !l.starts_with("wall_time"))
                .collect::<Vec<_>>()
                .join("\n")
        };
        assert_eq!(strip(&a.to_text()), strip(&b.to_text()));
    }
}
