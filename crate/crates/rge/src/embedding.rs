//! Random graph embeddings.
//!
//! A *random graph* is a small set of `D_j` node-embedding vectors,
//! optionally labeled, drawn from a distribution over the embedding
//! space. Each random graph `w_j` defines one feature coordinate
//! `phi_j(G) = exp(-gamma * EMD(G, w_j))`, and a dataset's embedding
//! matrix stacks `phi_j(G_i) / sqrt(R)` over `R` random graphs. Inner
//! products of embedding rows then approximate the kernel
//! `k(G_x, G_y) = E[phi(G_x) phi(G_y)]`, whose Monte-Carlo estimate
//! [`exact_kernel_mc`] serves as the convergence oracle.
//!
//! Two sampling schemes are provided:
//!
//! * `rf` — data-independent: vector entries are i.i.d. uniform on
//!   `[u_min, u_max]`, the scalar range of all node-embedding entries in
//!   the sampling pool;
//! * `asg` — data-dependent (anchor sub-graphs): rows are drawn from a
//!   uniformly chosen training graph, optionally carrying its node labels.
//!
//! Column `j` derives its own PRNG from `seed ^ j`, so embeddings are
//! bitwise reproducible regardless of how work is distributed over
//! threads, and test-time embeddings reuse the training-time random
//! graphs by passing the returned list to [`embed_with_graphs`].

use ndarray::{Array1, Array2, ArrayView1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spectral::NodeEmbeddings;
use crate::transport::{emd, TransportProblem};

/// Random-graph sampling scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Data-independent uniform sampling in the embedding range.
    Rf,
    /// Anchor sub-graphs: node rows of a random training graph.
    Asg,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Rf => "rf",
            Scheme::Asg => "asg",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rf" => Ok(Scheme::Rf),
            "asg" => Ok(Scheme::Asg),
            other => Err(Error::Precondition(format!("unknown scheme {other:?}"))),
        }
    }
}

/// Everything that parameterizes an embedding run.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    pub scheme: Scheme,
    pub d_max: usize,
    pub r: usize,
    pub gamma: f64,
    pub d: usize,
    pub seed: u64,
    pub use_labels: bool,
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) {
            return Err(Error::Precondition(format!("gamma must be positive, got {}", self.gamma)));
        }
        if self.r == 0 {
            return Err(Error::Precondition("R must be at least 1".into()));
        }
        if self.d_max == 0 {
            return Err(Error::Precondition("D_max must be at least 1".into()));
        }
        if self.d == 0 {
            return Err(Error::Precondition("embedding dimension must be at least 1".into()));
        }
        if self.use_labels && self.scheme != Scheme::Asg {
            return Err(Error::Precondition("node labels require the asg scheme".into()));
        }
        Ok(())
    }
}

/// A sampled random graph: `D_j` rows of dimension `d`, the optional
/// labels of the sampled nodes, and uniform node weights `1 / D_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomGraph {
    vectors: Array2<f64>,
    labels: Option<Vec<u32>>,
}

impl RandomGraph {
    pub fn new(vectors: Array2<f64>, labels: Option<Vec<u32>>) -> Result<Self> {
        if vectors.nrows() == 0 {
            return Err(Error::InvalidInput("random graph must have at least one node".into()));
        }
        if let Some(l) = &labels {
            if l.len() != vectors.nrows() {
                return Err(Error::InvalidInput("label count must match node count".into()));
            }
        }
        Ok(RandomGraph { vectors, labels })
    }

    pub fn vectors(&self) -> &Array2<f64> {
        &self.vectors
    }

    pub fn labels(&self) -> Option<&[u32]> {
        self.labels.as_deref()
    }

    pub fn size(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }
}

/// Scalar min and max over every entry of every embedding matrix.
pub fn embedding_range(embeddings: &[&NodeEmbeddings]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for e in embeddings {
        for &x in e.vectors() {
            lo = lo.min(x);
            hi = hi.max(x);
        }
    }
    (lo, hi)
}

/// Draws a data-independent random graph: `size` vectors with i.i.d.
/// entries uniform on the scalar range of `pool`. Deterministic in `seed`.
pub fn sample_random_graph_rf(
    pool: &[NodeEmbeddings],
    size: usize,
    d: usize,
    seed: u64,
) -> Result<RandomGraph> {
    if pool.is_empty() {
        return Err(Error::Precondition("need at least one node embedding".into()));
    }
    let refs: Vec<&NodeEmbeddings> = pool.iter().collect();
    let range = embedding_range(&refs);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(rf_sample(range, size, d, &mut rng))
}

/// Draws an anchor sub-graph: a uniformly chosen graph from `training`,
/// then `size` of its node rows (without replacement, or with replacement
/// when `size` exceeds the graph). Labels are carried when `use_labels`.
pub fn sample_random_graph_asg(
    training: &[NodeEmbeddings],
    size: usize,
    use_labels: bool,
    seed: u64,
) -> Result<RandomGraph> {
    if training.is_empty() {
        return Err(Error::Precondition("training collection must be non-empty".into()));
    }
    let refs: Vec<&NodeEmbeddings> = training.iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    asg_sample(&refs, size, use_labels, &mut rng)
}

fn rf_sample(range: (f64, f64), size: usize, d: usize, rng: &mut ChaCha8Rng) -> RandomGraph {
    let (lo, hi) = range;
    let vectors = Array2::from_shape_fn((size, d), |_| {
        if hi > lo {
            rng.gen_range(lo..hi)
        } else {
            lo
        }
    });
    RandomGraph {
        vectors,
        labels: None,
    }
}

fn asg_sample(
    training: &[&NodeEmbeddings],
    size: usize,
    use_labels: bool,
    rng: &mut ChaCha8Rng,
) -> Result<RandomGraph> {
    let graph = training[rng.gen_range(0..training.len())];
    let n = graph.node_count();
    let node_ids: Vec<usize> = if size > n {
        (0..size).map(|_| rng.gen_range(0..n)).collect()
    } else {
        // partial Fisher-Yates, without replacement
        let mut ids: Vec<usize> = (0..n).collect();
        for k in 0..size {
            let pick = rng.gen_range(k..n);
            ids.swap(k, pick);
        }
        ids.truncate(size);
        ids
    };
    let d = graph.dim();
    let vectors = Array2::from_shape_fn((size, d), |(r, c)| graph.vectors()[[node_ids[r], c]]);
    let labels = if use_labels {
        let source = graph.labels().ok_or_else(|| {
            Error::Precondition("use_labels requires node labels on the training graphs".into())
        })?;
        Some(node_ids.iter().map(|&i| source[i]).collect())
    } else {
        None
    };
    Ok(RandomGraph { vectors, labels })
}

/// A frozen sampling environment: the scheme's data-dependent state
/// (training pool or entry range) plus the per-column seeding rule.
pub struct RandomGraphSampler<'a> {
    config: SamplerConfig,
    training: Vec<&'a NodeEmbeddings>,
    range: (f64, f64),
}

impl<'a> RandomGraphSampler<'a> {
    /// Builds the sampler over `embeddings`, restricted to the graphs in
    /// `training`. The training list is mandatory for `asg`; for `rf` an
    /// empty list means the whole collection defines the entry range.
    pub fn new(
        config: &SamplerConfig,
        embeddings: &'a [NodeEmbeddings],
        training: &[usize],
    ) -> Result<Self> {
        config.validate()?;
        if embeddings.is_empty() {
            return Err(Error::Precondition("need at least one embedded graph".into()));
        }
        if config.scheme == Scheme::Asg && training.is_empty() {
            return Err(Error::Precondition(
                "asg sampling requires a non-empty training subset".into(),
            ));
        }
        if let Some(&bad) = training.iter().find(|&&i| i >= embeddings.len()) {
            return Err(Error::Precondition(format!(
                "training index {bad} out of range for {} graphs",
                embeddings.len()
            )));
        }
        let pool: Vec<&NodeEmbeddings> = if training.is_empty() {
            embeddings.iter().collect()
        } else {
            training.iter().map(|&i| &embeddings[i]).collect()
        };
        if config.use_labels && pool.iter().any(|e| e.labels().is_none()) {
            return Err(Error::Precondition(
                "use_labels requires node labels on the training graphs".into(),
            ));
        }
        if let Some(e) = pool.iter().find(|e| e.dim() != config.d) {
            return Err(Error::Dimension(format!(
                "config d = {} but embeddings have dimension {}",
                config.d,
                e.dim()
            )));
        }
        let range = embedding_range(&pool);
        Ok(RandomGraphSampler {
            config: config.clone(),
            training: pool,
            range,
        })
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.config
    }

    /// The random graph of column `j` (1-based): a ChaCha8 stream seeded
    /// with `seed ^ j` first draws `D_j` uniform on `1..=D_max`, then the
    /// graph itself.
    pub fn column(&self, j: u64) -> Result<RandomGraph> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed ^ j);
        self.draw(&mut rng)
    }

    /// Draws one random graph from an external stream (Monte-Carlo use).
    pub fn draw(&self, rng: &mut ChaCha8Rng) -> Result<RandomGraph> {
        let size = rng.gen_range(1..=self.config.d_max);
        match self.config.scheme {
            Scheme::Rf => Ok(rf_sample(self.range, size, self.config.d, rng)),
            Scheme::Asg => asg_sample(&self.training, size, self.config.use_labels, rng),
        }
    }
}

/// EMD between a graph's node embeddings and a random graph, under
/// uniform `1/D_j` weights on the random side. The label-aware ground
/// distance applies exactly when the random graph carries labels.
pub fn emd_to_random_graph(graph: &NodeEmbeddings, omega: &RandomGraph) -> Result<f64> {
    if graph.dim() != omega.dim() {
        return Err(Error::Dimension(format!(
            "graph dimension {} vs random graph dimension {}",
            graph.dim(),
            omega.dim()
        )));
    }
    let use_labels = omega.labels().is_some();
    if use_labels && graph.labels().is_none() {
        return Err(Error::Precondition(
            "labeled random graph against unlabeled embeddings".into(),
        ));
    }
    let (n, m) = (graph.node_count(), omega.size());
    let sqrt_d = (graph.dim() as f64).sqrt();
    let mut cost = Array2::zeros((n, m));
    for i in 0..n {
        let a = graph.vectors().row(i);
        for j in 0..m {
            let b = omega.vectors().row(j);
            cost[[i, j]] = if use_labels
                && graph.labels().unwrap()[i] != omega.labels().unwrap()[j]
            {
                sqrt_d
            } else {
                a.iter()
                    .zip(b.iter())
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>()
                    .sqrt()
            };
        }
    }
    let problem = TransportProblem::new(
        graph.weights().clone(),
        Array1::from_elem(m, 1.0 / m as f64),
        cost,
    )?;
    Ok(emd(&problem)?.objective())
}

/// One feature coordinate: `exp(-gamma * EMD(graph, omega))`, in `(0, 1]`.
pub fn feature_value(graph: &NodeEmbeddings, omega: &RandomGraph, gamma: f64) -> Result<f64> {
    Ok((-gamma * emd_to_random_graph(graph, omega)?).exp())
}

/// Raw EMD values between every graph and every random graph, an `N x R`
/// matrix. Work is distributed over threads; results are positioned by
/// index, so the output does not depend on the thread count.
pub fn emd_feature_matrix(
    embeddings: &[NodeEmbeddings],
    graphs: &[RandomGraph],
) -> Result<Array2<f64>> {
    let n = embeddings.len();
    let r = graphs.len();
    let entries: Result<Vec<f64>> = (0..n * r)
        .into_par_iter()
        .map(|k| emd_to_random_graph(&embeddings[k / r], &graphs[k % r]))
        .collect();
    Array2::from_shape_vec((n, r), entries?)
        .map_err(|e| Error::Numerical(format!("shape error: {e}")))
}

/// An `N x R` embedding matrix whose rows are graph embeddings; entries
/// lie in `(0, 1/sqrt(R)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    values: Array2<f64>,
    config: SamplerConfig,
}

impl EmbeddingMatrix {
    /// Scales a raw EMD matrix into embedding values
    /// `exp(-gamma * emd) / sqrt(R)`.
    pub fn from_emd_matrix(emd_values: &Array2<f64>, config: &SamplerConfig) -> Self {
        let scale = 1.0 / (config.r as f64).sqrt();
        let values = emd_values.mapv(|e| (-config.gamma * e).exp() * scale);
        EmbeddingMatrix {
            values,
            config: config.clone(),
        }
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.config
    }

    pub fn num_graphs(&self) -> usize {
        self.values.nrows()
    }

    pub fn width(&self) -> usize {
        self.values.ncols()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.values.row(i)
    }

    /// Text export: header `N R gamma D_max scheme seed`, then one line
    /// per graph with R values at 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} {} {} {} {} {}\n",
            self.num_graphs(),
            self.config.r,
            self.config.gamma,
            self.config.d_max,
            self.config.scheme.as_str(),
            self.config.seed
        );
        for row in self.values.rows() {
            let fields: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&fields.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Runs the full embedding: draws `R` random graphs (per-column seeds,
/// training-restricted sampling) and maps every graph onto its feature
/// row. Returns the random graphs so that held-out graphs can be embedded
/// against the same columns.
pub fn embed_dataset(
    embeddings: &[NodeEmbeddings],
    config: &SamplerConfig,
    training: &[usize],
) -> Result<(EmbeddingMatrix, Vec<RandomGraph>)> {
    let sampler = RandomGraphSampler::new(config, embeddings, training)?;
    let graphs: Result<Vec<RandomGraph>> = (1..=config.r as u64)
        .into_par_iter()
        .map(|j| sampler.column(j))
        .collect();
    let graphs = graphs?;
    let matrix = embed_with_graphs(embeddings, &graphs, config)?;
    Ok((matrix, graphs))
}

/// Embeds `embeddings` against an existing list of random graphs (the
/// output of [`embed_dataset`]), reusing its columns exactly.
pub fn embed_with_graphs(
    embeddings: &[NodeEmbeddings],
    graphs: &[RandomGraph],
    config: &SamplerConfig,
) -> Result<EmbeddingMatrix> {
    config.validate()?;
    if graphs.len() != config.r {
        return Err(Error::Dimension(format!(
            "{} random graphs for R = {}",
            graphs.len(),
            config.r
        )));
    }
    let raw = emd_feature_matrix(embeddings, graphs)?;
    Ok(EmbeddingMatrix::from_emd_matrix(&raw, config))
}

/// Serializes random graphs as a self-describing text bundle:
/// a header `random_graph_bundle <R> <d> <labels 0|1>`, then per graph a
/// line `graph <j> <D_j>`, `D_j` vector lines at 17 significant digits,
/// and a `labels ...` line when labeled.
pub fn write_bundle(graphs: &[RandomGraph]) -> String {
    let d = graphs.first().map_or(0, |g| g.dim());
    let labeled = graphs.first().is_some_and(|g| g.labels().is_some());
    let mut out = format!(
        "random_graph_bundle {} {} {}\n",
        graphs.len(),
        d,
        u8::from(labeled)
    );
    for (j, g) in graphs.iter().enumerate() {
        out.push_str(&format!("graph {} {}\n", j + 1, g.size()));
        for row in g.vectors().rows() {
            let fields: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&fields.join(" "));
            out.push('\n');
        }
        if let Some(labels) = g.labels() {
            let fields: Vec<String> = labels.iter().map(|l| l.to_string()).collect();
            out.push_str("labels ");
            out.push_str(&fields.join(" "));
            out.push('\n');
        }
    }
    out
}

/// Parses a bundle produced by [`write_bundle`]; round trips exactly.
pub fn parse_bundle(text: &str) -> Result<Vec<RandomGraph>> {
    let mut lines = text.lines().enumerate();
    let bad = |line: usize, message: String| Error::Parse {
        file: "random graph bundle".into(),
        line: line + 1,
        message,
    };
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| bad(0, "empty bundle".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "random_graph_bundle" {
        return Err(bad(line_no, "malformed bundle header".into()));
    }
    let count: usize = fields[1].parse().map_err(|_| bad(line_no, "bad count".into()))?;
    let d: usize = fields[2].parse().map_err(|_| bad(line_no, "bad dimension".into()))?;
    let labeled = fields[3] == "1";

    let mut graphs = Vec::with_capacity(count);
    for expected in 1..=count {
        let (line_no, header) = lines
            .next()
            .ok_or_else(|| bad(0, format!("missing graph {expected}")))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 || fields[0] != "graph" {
            return Err(bad(line_no, format!("expected a graph header, got {header:?}")));
        }
        let size: usize = fields[2]
            .parse()
            .map_err(|_| bad(line_no, "bad graph size".into()))?;
        let mut vectors = Array2::zeros((size, d));
        for r in 0..size {
            let (line_no, row) = lines
                .next()
                .ok_or_else(|| bad(0, "truncated bundle".into()))?;
            let values: Vec<&str> = row.split_whitespace().collect();
            if values.len() != d {
                return Err(bad(line_no, format!("expected {d} values, got {}", values.len())));
            }
            for (c, v) in values.iter().enumerate() {
                vectors[[r, c]] = v
                    .parse::<f64>()
                    .map_err(|_| bad(line_no, format!("bad float {v:?}")))?;
            }
        }
        let labels = if labeled {
            let (line_no, row) = lines
                .next()
                .ok_or_else(|| bad(0, "missing labels line".into()))?;
            let values: Vec<&str> = row.split_whitespace().collect();
            if values.first() != Some(&"labels") || values.len() != size + 1 {
                return Err(bad(line_no, "malformed labels line".into()));
            }
            Some(
                values[1..]
                    .iter()
                    .map(|v| v.parse::<u32>().map_err(|_| bad(line_no, format!("bad label {v:?}"))))
                    .collect::<Result<Vec<u32>>>()?,
            )
        } else {
            None
        };
        graphs.push(RandomGraph::new(vectors, labels)?);
    }
    Ok(graphs)
}

/// Inner product of two embedding rows; approximates the exact kernel.
pub fn approx_kernel(zx: ArrayView1<'_, f64>, zy: ArrayView1<'_, f64>) -> Result<f64> {
    if zx.len() != zy.len() {
        return Err(Error::Dimension(format!(
            "embedding rows have lengths {} and {}",
            zx.len(),
            zy.len()
        )));
    }
    Ok(zx.iter().zip(zy.iter()).map(|(a, b)| a * b).sum())
}

/// Monte-Carlo estimate of the exact kernel between two graphs:
/// `mean_j phi_j(x) phi_j(y)` over `r_oracle` fresh random graphs drawn
/// from the same sampling environment (per-draw seeds `seed ^ j`).
pub fn exact_kernel_mc(
    x: &NodeEmbeddings,
    y: &NodeEmbeddings,
    sampler: &RandomGraphSampler<'_>,
    r_oracle: usize,
    seed: u64,
) -> Result<f64> {
    let gamma = sampler.config().gamma;
    let products: Result<Vec<f64>> = (1..=r_oracle as u64)
        .into_par_iter()
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ j);
            let omega = sampler.draw(&mut rng)?;
            let px = (-gamma * emd_to_random_graph(x, &omega)?).exp();
            let py = (-gamma * emd_to_random_graph(y, &omega)?).exp();
            Ok(px * py)
        })
        .collect();
    let products = products?;
    Ok(products.iter().sum::<f64>() / r_oracle as f64)
}
