//! Command-line interface: reproducible embedding, kernel, evaluation,
//! and benchmark runs.
//!
//! Every command writes its outputs under `--out` together with a
//! `config.txt` resolved-configuration record sufficient to rerun it.
//! Exit codes: 0 success, 2 usage error, 3 data/format error,
//! 4 numerical failure.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use ndarray::Array2;
use rayon::prelude::*;

use crate::bench::{geometric_axis, sweep_graph_size, sweep_num_graphs, SweepConfig};
use crate::cv::{cross_validate, GridConfig};
use crate::dataset_io::{parse_dataset, write_dataset};
use crate::embedding::{embed_dataset, write_bundle, SamplerConfig, Scheme};
use crate::error::{Error, Result};
use crate::graph::Dataset;
use crate::kernels::{extreme_eigenvalues, gram_matrix, indefinite_emd_kernel, pairwise_emd_matrix};
use crate::spectral::{node_embeddings, NodeEmbeddings};
use crate::synthetic::synthetic_dataset;
use crate::wl::wl_relabel;

#[derive(Parser)]
#[command(name = "rge", version, about = "Graph embeddings from node transportation distances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Embed a dataset and write the matrix plus the random-graph bundle
    Embed(EmbedArgs),
    /// Pairwise EMD matrix, centered EMD kernel, embedding Gram matrix
    Kernel(KernelArgs),
    /// Repeated stratified cross-validation with inner grid search
    Cv(CvArgs),
    /// Scalability sweeps over the number of graphs and the graph size
    Bench(BenchArgs),
    /// Generate a synthetic dataset in the benchmark text format
    Gen(GenArgs),
}

#[derive(Args)]
struct DataArgs {
    /// Dataset name (file prefix inside the root directory)
    #[arg(long)]
    dataset: String,
    /// Directory holding the dataset files
    #[arg(long, default_value = "data")]
    root: PathBuf,
}

#[derive(Args)]
struct SamplerArgs {
    /// Random graph scheme
    #[arg(long, default_value = "rf")]
    scheme: String,
    /// Use node labels in the ground distance (asg only)
    #[arg(long, default_value_t = false)]
    use_labels: bool,
    /// Node embedding dimension
    #[arg(long, default_value_t = 6)]
    d: usize,
    /// Number of random graphs (embedding width)
    #[arg(long = "R", default_value_t = 128)]
    r: usize,
    /// Maximum random graph size
    #[arg(long, default_value_t = 10)]
    dmax: usize,
    /// Feature map scale
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
}

#[derive(Args)]
struct RunArgs {
    /// Output directory
    #[arg(long)]
    out: PathBuf,
    /// Master seed
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct EmbedArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    sampler: SamplerArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Apply this many Weisfeiler-Leman relabeling rounds first
    #[arg(long)]
    wl: Option<usize>,
}

#[derive(Args)]
struct KernelArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    sampler: SamplerArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Allow datasets larger than 5000 graphs (quadratic memory)
    #[arg(long, default_value_t = false)]
    force: bool,
    /// Also dump (cost, flow, objective) of the first graph pair
    #[arg(long, default_value_t = false)]
    dump_transport: bool,
}

#[derive(Args)]
struct CvArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    sampler: SamplerArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Apply this many Weisfeiler-Leman relabeling rounds first
    #[arg(long)]
    wl: Option<usize>,
    /// Repetitions of the whole fold split
    #[arg(long, default_value_t = 10)]
    repetitions: usize,
    /// Number of folds
    #[arg(long, default_value_t = 10)]
    folds: usize,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Embedding width for every point
    #[arg(long = "R", default_value_t = 128)]
    r: usize,
    /// Maximum random graph size
    #[arg(long, default_value_t = 10)]
    dmax: usize,
    /// Node embedding dimension
    #[arg(long, default_value_t = 6)]
    d: usize,
    /// Fixed graph size for the graph-count sweep
    #[arg(long, default_value_t = 100)]
    nodes: usize,
    /// Fixed graph count for the graph-size sweep
    #[arg(long, default_value_t = 50)]
    num_graphs: usize,
    /// Largest graph count on the sweep axis
    #[arg(long, default_value_t = 16384)]
    max_graphs: usize,
    /// Largest graph size on the sweep axis
    #[arg(long, default_value_t = 1024)]
    max_nodes: usize,
    /// Total wall-clock budget in seconds; partial tables are kept
    #[arg(long)]
    max_seconds: Option<f64>,
}

#[derive(Args)]
struct GenArgs {
    /// Name of the generated dataset (file prefix)
    #[arg(long, default_value = "SYNTH")]
    dataset: String,
    #[command(flatten)]
    run: RunArgs,
    /// Nodes per graph
    #[arg(long, default_value_t = 100)]
    nodes: usize,
    /// Number of graphs
    #[arg(long, default_value_t = 50)]
    num_graphs: usize,
    /// Replace an existing output directory
    #[arg(long, default_value_t = false)]
    overwrite: bool,
}

/// Parses `args` and runs the selected command; returns the process exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Embed(args) => cmd_embed(&args),
        Command::Kernel(args) => cmd_kernel(&args),
        Command::Cv(args) => cmd_cv(&args),
        Command::Bench(args) => cmd_bench(&args),
        Command::Gen(args) => cmd_gen(&args),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Exit code classification for library errors.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Precondition(_) | Error::Dimension(_) => 2,
        Error::MissingFile(_)
        | Error::Parse { .. }
        | Error::Consistency { .. }
        | Error::InvalidInput(_)
        | Error::Io(_)
        | Error::Stratification { .. }
        | Error::DegenerateLabels(_) => 3,
        Error::Numerical(_) | Error::Infeasible(_) => 4,
    }
}

fn setup_threads(threads: Option<usize>) {
    if let Some(t) = threads {
        // Ignore the error when a pool already exists (repeat calls in
        // one process); determinism does not depend on the pool size.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
}

fn sampler_config(args: &SamplerArgs, seed: u64) -> Result<SamplerConfig> {
    let scheme: Scheme = args.scheme.parse()?;
    let config = SamplerConfig {
        scheme,
        d_max: args.dmax,
        r: args.r,
        gamma: args.gamma,
        d: args.d,
        seed,
        use_labels: args.use_labels,
    };
    config.validate()?;
    Ok(config)
}

fn load_dataset(data: &DataArgs, wl: Option<usize>) -> Result<Dataset> {
    let dataset = parse_dataset(&data.root, &data.dataset)?;
    match wl {
        Some(h) => wl_relabel(&dataset, h),
        None => Ok(dataset),
    }
}

fn embed_all(dataset: &Dataset, d: usize) -> Result<Vec<NodeEmbeddings>> {
    dataset
        .graphs()
        .par_iter()
        .map(|g| node_embeddings(g, d))
        .collect()
}

fn write_config(out: &Path, entries: &[(&str, String)]) -> Result<()> {
    let mut sorted: Vec<(&str, String)> = entries.to_vec();
    sorted.sort_by(|a, b| a.0.cmp(b.0));
    let mut text = String::new();
    for (k, v) in sorted {
        text.push_str(&format!("{k}={v}\n"));
    }
    fs::write(out.join("config.txt"), text)?;
    Ok(())
}

fn write_matrix(path: &Path, matrix: &Array2<f64>) -> Result<()> {
    let mut text = String::with_capacity(matrix.len() * 25);
    for row in matrix.rows() {
        let fields: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        text.push_str(&fields.join(" "));
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(())
}

fn sampler_entries(args: &SamplerArgs) -> Vec<(&'static str, String)> {
    vec![
        ("scheme", args.scheme.clone()),
        ("use_labels", args.use_labels.to_string()),
        ("d", args.d.to_string()),
        ("R", args.r.to_string()),
        ("dmax", args.dmax.to_string()),
        ("gamma", args.gamma.to_string()),
    ]
}

fn cmd_embed(args: &EmbedArgs) -> Result<()> {
    setup_threads(args.run.threads);
    let config = sampler_config(&args.sampler, args.run.seed)?;
    let dataset = load_dataset(&args.data, args.wl)?;
    let embeddings = embed_all(&dataset, config.d)?;
    let everything: Vec<usize> = (0..dataset.len()).collect();
    let (matrix, graphs) = embed_dataset(&embeddings, &config, &everything)?;

    fs::create_dir_all(&args.run.out)?;
    fs::write(args.run.out.join("embedding.txt"), matrix.to_text())?;
    fs::write(args.run.out.join("random_graphs.txt"), write_bundle(&graphs))?;
    let mut entries = vec![
        ("command", "embed".to_string()),
        ("dataset", args.data.dataset.clone()),
        ("root", args.data.root.display().to_string()),
        ("wl", args.wl.map_or("none".into(), |h| h.to_string())),
        ("seed", args.run.seed.to_string()),
        ("threads", args.run.threads.map_or("auto".into(), |t| t.to_string())),
        ("num_graphs", dataset.len().to_string()),
    ];
    entries.extend(sampler_entries(&args.sampler));
    write_config(&args.run.out, &entries)
}

fn cmd_kernel(args: &KernelArgs) -> Result<()> {
    setup_threads(args.run.threads);
    let config = sampler_config(&args.sampler, args.run.seed)?;
    let dataset = load_dataset(&args.data, None)?;
    if dataset.len() > 5000 && !args.force {
        return Err(Error::Precondition(format!(
            "dataset has {} graphs; pairwise kernels need quadratic memory, pass --force to proceed",
            dataset.len()
        )));
    }
    let embeddings = embed_all(&dataset, config.d)?;

    // Pairwise EMD under the same label convention as the embedding.
    let distance_inputs: Vec<NodeEmbeddings> = if args.sampler.use_labels {
        embeddings.clone()
    } else {
        embeddings.iter().map(|e| e.without_labels()).collect()
    };
    let distances = pairwise_emd_matrix(&distance_inputs)?;
    let centered = indefinite_emd_kernel(&distances)?;

    let everything: Vec<usize> = (0..dataset.len()).collect();
    let (matrix, _graphs) = embed_dataset(&embeddings, &config, &everything)?;
    let gram = gram_matrix(&matrix);

    let (centered_min, centered_max) = extreme_eigenvalues(&centered);
    let (gram_min, gram_max) = extreme_eigenvalues(&gram);

    fs::create_dir_all(&args.run.out)?;
    write_matrix(&args.run.out.join("emd_matrix.txt"), &distances)?;
    write_matrix(&args.run.out.join("emd_kernel.txt"), &centered)?;
    write_matrix(&args.run.out.join("rge_gram.txt"), &gram)?;
    if args.dump_transport && distance_inputs.len() >= 2 {
        let (x, y) = (&distance_inputs[0], &distance_inputs[1]);
        let problem = crate::transport::TransportProblem::new(
            x.weights().clone(),
            y.weights().clone(),
            crate::transport::cost_matrix(x, y, args.sampler.use_labels),
        )?;
        let plan = crate::transport::emd(&problem)?;
        fs::write(
            args.run.out.join("transport_dump.txt"),
            crate::transport::dump_text(&problem, &plan),
        )?;
    }
    let summary = format!(
        "emd_kernel_min_eigenvalue {centered_min:.16e}\n\
         emd_kernel_max_eigenvalue {centered_max:.16e}\n\
         rge_gram_min_eigenvalue {gram_min:.16e}\n\
         rge_gram_max_eigenvalue {gram_max:.16e}\n"
    );
    fs::write(args.run.out.join("eigen_summary.txt"), summary)?;

    let mut entries = vec![
        ("command", "kernel".to_string()),
        ("dataset", args.data.dataset.clone()),
        ("root", args.data.root.display().to_string()),
        ("seed", args.run.seed.to_string()),
        ("threads", args.run.threads.map_or("auto".into(), |t| t.to_string())),
        ("force", args.force.to_string()),
        ("dump_transport", args.dump_transport.to_string()),
        ("num_graphs", dataset.len().to_string()),
    ];
    entries.extend(sampler_entries(&args.sampler));
    write_config(&args.run.out, &entries)
}

fn cmd_cv(args: &CvArgs) -> Result<()> {
    setup_threads(args.run.threads);
    let config = sampler_config(&args.sampler, args.run.seed)?;
    let dataset = load_dataset(&args.data, args.wl)?;
    let grid = GridConfig::standard(config.scheme, config.use_labels, config.r, config.d);
    let report = cross_validate(&dataset, &grid, args.repetitions, args.folds, args.run.seed)?;

    fs::create_dir_all(&args.run.out)?;
    fs::write(args.run.out.join("report.txt"), report.to_text())?;
    let mut entries = vec![
        ("command", "cv".to_string()),
        ("dataset", args.data.dataset.clone()),
        ("root", args.data.root.display().to_string()),
        ("wl", args.wl.map_or("none".into(), |h| h.to_string())),
        ("seed", args.run.seed.to_string()),
        ("threads", args.run.threads.map_or("auto".into(), |t| t.to_string())),
        ("repetitions", args.repetitions.to_string()),
        ("folds", args.folds.to_string()),
        ("classes", report.num_classes.to_string()),
        ("mean_accuracy", format!("{:.6}", report.mean_accuracy)),
        ("std_accuracy", format!("{:.6}", report.std_accuracy)),
    ];
    entries.extend(sampler_entries(&args.sampler));
    write_config(&args.run.out, &entries)
}

fn cmd_bench(args: &BenchArgs) -> Result<()> {
    setup_threads(args.run.threads);
    let started = std::time::Instant::now();
    let sweep = SweepConfig {
        r: args.r,
        d_max: args.dmax,
        d: args.d,
        seed: args.run.seed,
        max_seconds: args.max_seconds,
    };
    let count_axis = geometric_axis(8, args.max_graphs);
    let counts = sweep_num_graphs(&count_axis, args.nodes, &sweep)?;

    let remaining = args
        .max_seconds
        .map(|b| (b - started.elapsed().as_secs_f64()).max(0.0));
    let size_sweep = SweepConfig {
        max_seconds: remaining,
        ..sweep
    };
    let size_axis = geometric_axis(8, args.max_nodes);
    let sizes = sweep_graph_size(&size_axis, args.num_graphs, &size_sweep)?;

    fs::create_dir_all(&args.run.out)?;
    fs::write(args.run.out.join("num_graphs_sweep.txt"), counts.to_text())?;
    fs::write(args.run.out.join("graph_size_sweep.txt"), sizes.to_text())?;
    write_config(
        &args.run.out,
        &[
            ("command", "bench".to_string()),
            ("R", args.r.to_string()),
            ("dmax", args.dmax.to_string()),
            ("d", args.d.to_string()),
            ("nodes", args.nodes.to_string()),
            ("num_graphs", args.num_graphs.to_string()),
            ("max_graphs", args.max_graphs.to_string()),
            ("max_nodes", args.max_nodes.to_string()),
            ("seed", args.run.seed.to_string()),
            ("threads", args.run.threads.map_or("auto".into(), |t| t.to_string())),
            (
                "max_seconds",
                args.max_seconds.map_or("none".into(), |s| s.to_string()),
            ),
        ],
    )
}

fn cmd_gen(args: &GenArgs) -> Result<()> {
    setup_threads(args.run.threads);
    let out = &args.run.out;
    if out.exists() && out.read_dir().map(|mut d| d.next().is_some()).unwrap_or(false) {
        if !args.overwrite {
            return Err(Error::Precondition(format!(
                "output directory {} exists; pass --overwrite to replace it",
                out.display()
            )));
        }
        fs::remove_dir_all(out)?;
    }
    fs::create_dir_all(out)?;
    let dataset = synthetic_dataset(args.num_graphs, args.nodes, args.run.seed)?;
    let dataset = Dataset::new(
        args.dataset.clone(),
        dataset.graphs().to_vec(),
        dataset.graph_labels().to_vec(),
    )?;
    write_dataset(&dataset, out)?;
    write_config(
        out,
        &[
            ("command", "gen".to_string()),
            ("dataset", args.dataset.clone()),
            ("nodes", args.nodes.to_string()),
            ("num_graphs", args.num_graphs.to_string()),
            ("seed", args.run.seed.to_string()),
            ("threads", args.run.threads.map_or("auto".into(), |t| t.to_string())),
            ("overwrite", args.overwrite.to_string()),
        ],
    )
}
