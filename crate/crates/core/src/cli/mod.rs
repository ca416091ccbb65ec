//! Command-line pipeline.
//!
//! Stages communicate through directories of artifacts, each with a
//! `manifest.json`:
//!
//! ```text
//! ingest  → graph.tsv, graph.labels.tsv
//! split   → train.tsv, validation.tsv, test.tsv
//! cluster → user_clusters.tsv, item_clusters.tsv, cluster_scores.csv, concurrence.tsv
//! sample  → sample_<k>.tsv, provenance.json
//! stats   → degree_report.csv, summary.txt
//! eval    → metrics.txt
//! ```
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for data errors.

pub mod config;
pub mod manifest;

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::clustering::{ClusterAssignment, DbscanParams};
use crate::error::Error;
use crate::graph::{self, EdgeListFormat, InteractionGraph, Side};
use crate::metrics::{self, RankingJudgment};
use crate::sampler::{self, ModelOptions, PecoModel, Preset, SamplerConfig};
use crate::similarity::{self, concurrence_matrix, SimilarityOptions};
use crate::split::{self, SplitFractions};
use crate::stats;
use crate::synthetic::{self, BlockModel};
use manifest::{verify_dir, verify_file, Manifest};

#[derive(Debug, Parser)]
#[command(name = "peco", version, about = "Sample perturbed ensembles of user-item interaction graphs")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// key=value file with default option values; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Read a raw edge list and write the canonical graph.
    Ingest(IngestArgs),
    /// Partition each user's interactions into train/validation/test.
    Split(SplitArgs),
    /// Cluster users and items and compute cluster-pair edge counts.
    Cluster(ClusterArgs),
    /// Draw an ensemble of sampled graphs.
    Sample(SampleArgs),
    /// Compare an ensemble against its source graph.
    Stats(StatsArgs),
    /// Recall@K and NDCG@K of rankings against held-out interactions.
    Eval(EvalArgs),
    /// Write a synthetic block-structured edge list.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Movielens,
    Tsv,
    Csv,
}

impl From<FormatArg> for EdgeListFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Movielens => EdgeListFormat::MovieLens,
            FormatArg::Tsv => EdgeListFormat::Tsv,
            FormatArg::Csv => EdgeListFormat::Csv,
        }
    }
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "tsv")]
    pub format: FormatArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.6)]
    pub train: f64,
    #[arg(long, default_value_t = 0.2)]
    pub validation: f64,
    #[arg(long, default_value_t = 0.2)]
    pub test: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 0.7)]
    pub user_eps: f64,
    #[arg(long, default_value_t = 4)]
    pub user_min_pts: usize,
    #[arg(long, default_value_t = 0.7)]
    pub item_eps: f64,
    #[arg(long, default_value_t = 4)]
    pub item_min_pts: usize,
    /// Keep only the K strongest concurrence entries per item.
    #[arg(long)]
    pub topk: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Peco,
    NodeCopy,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Output directory of the `cluster` stage (required for `peco`).
    #[arg(long)]
    pub clusters: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "peco")]
    pub method: MethodArg,
    /// Dataset preset for alpha and retain; explicit values take precedence.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub retain: Option<f64>,
    /// Copy probability of the node-copy baseline.
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1)]
    pub ensemble: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fail instead of drawing uniformly when all candidates have zero weight.
    #[arg(long)]
    pub no_fallback: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub clusters: PathBuf,
    #[arg(long)]
    pub samples: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Held-out interactions (canonical edge list).
    #[arg(long)]
    pub truth: PathBuf,
    /// `user<TAB>item,item,...` ranked lists in dense indices.
    #[arg(long, conflicts_with = "popularity_from")]
    pub rankings: Option<PathBuf>,
    /// Rank unseen items by their degree in this training graph instead.
    #[arg(long)]
    pub popularity_from: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub k: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub users: usize,
    #[arg(long)]
    pub items: usize,
    #[arg(long)]
    pub edges: usize,
    #[arg(long, default_value_t = 50)]
    pub blocks: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Data(err) => write!(f, "error: {err:#}"),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(err: anyhow::Error) -> Self {
        match err.downcast_ref::<Error>() {
            Some(Error::InvalidParameter(msg)) => CliError::Usage(msg.clone()),
            _ => CliError::Data(err),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        match err {
            Error::InvalidParameter(msg) => CliError::Usage(msg),
            other => CliError::Data(other.into()),
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Errors are reported on stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match config::expand(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("usage error: {e:#}");
            return 1;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli) -> CliResult {
    match cli.threads {
        Some(0) => Err(usage("--threads must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Data(e.into()))?;
            pool.install(|| dispatch(cli.command))
        }
        None => dispatch(cli.command),
    }
}

fn dispatch(command: Command) -> CliResult {
    match command {
        Command::Ingest(a) => cmd_ingest(&a),
        Command::Split(a) => cmd_split(&a),
        Command::Cluster(a) => cmd_cluster(&a),
        Command::Sample(a) => cmd_sample(&a),
        Command::Stats(a) => cmd_stats(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Synth(a) => cmd_synth(&a),
    }
}

fn create_dir(dir: &Path) -> CliResult {
    fs::create_dir_all(dir)
        .with_context(|| format!("creating {}", dir.display()))
        .map_err(CliError::Data)
}

/// Loads a canonical graph after checking it against its manifest.
fn load_graph(path: &Path) -> CliResult<(InteractionGraph, String)> {
    let hash = verify_file(path)?;
    let graph = graph::read_canonical(path)?;
    Ok((graph, hash))
}

fn write_with<F>(dir: &Path, name: &str, write: F) -> CliResult
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    write(&mut out)
        .and_then(|_| out.flush())
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn print_summary(lines: &[(String, String)]) {
    for (k, v) in lines {
        println!("{k}={v}");
    }
}

pub fn cmd_ingest(a: &IngestArgs) -> CliResult {
    let g = graph::load_edge_list(&a.input, a.format.into())?;
    create_dir(&a.out)?;
    let path = a.out.join("graph.tsv");
    g.save(&path)?;

    let mut m = Manifest::new("ingest");
    m.set("format", format!("{:?}", a.format).to_lowercase());
    m.add_input(&a.input)?;
    m.add_output(&a.out, "graph.tsv")?;
    if g.labels().is_some() {
        m.add_output(&a.out, "graph.labels.tsv")?;
    }
    m.write(&a.out)?;

    print_summary(&[
        ("users".into(), g.num_users().to_string()),
        ("items".into(), g.num_items().to_string()),
        ("interactions".into(), g.num_edges().to_string()),
        ("density".into(), format!("{:.6}", g.density())),
    ]);
    Ok(())
}

pub fn cmd_split(a: &SplitArgs) -> CliResult {
    let fractions = SplitFractions {
        train: a.train,
        validation: a.validation,
        test: a.test,
    };
    let (g, _) = load_graph(&a.graph)?;
    let parts = split::split(&g, fractions, a.seed)?;
    create_dir(&a.out)?;

    let mut m = Manifest::new("split");
    m.set("seed", a.seed)
        .set("train", a.train)
        .set("validation", a.validation)
        .set("test", a.test);
    m.add_input(&a.graph)?;
    for (name, part) in [
        ("train", &parts.train),
        ("validation", &parts.validation),
        ("test", &parts.test),
    ] {
        let file = format!("{name}.tsv");
        part.save(&a.out.join(&file))?;
        m.add_output(&a.out, &file)?;
        if part.labels().is_some() {
            m.add_output(&a.out, &format!("{name}.labels.tsv"))?;
        }
    }
    m.write(&a.out)?;
    print_summary(&[
        ("train".into(), parts.train.num_edges().to_string()),
        ("validation".into(), parts.validation.num_edges().to_string()),
        ("test".into(), parts.test.num_edges().to_string()),
        ("degenerate_users".into(), parts.degenerate_users.to_string()),
    ]);
    Ok(())
}

pub fn cmd_cluster(a: &ClusterArgs) -> CliResult {
    let users = DbscanParams {
        eps: a.user_eps,
        min_pts: a.user_min_pts,
    };
    let items = DbscanParams {
        eps: a.item_eps,
        min_pts: a.item_min_pts,
    };
    users.validate()?;
    items.validate()?;
    if a.topk == Some(0) {
        return Err(usage("--topk must be at least 1"));
    }
    let (g, _) = load_graph(&a.graph)?;
    let model = PecoModel::fit(
        &g,
        ModelOptions {
            users,
            items,
            topk: a.topk,
        },
    )?;
    create_dir(&a.out)?;

    write_with(&a.out, "user_clusters.tsv", |w| model.user_clusters().write_tsv(w))?;
    write_with(&a.out, "item_clusters.tsv", |w| model.item_clusters().write_tsv(w))?;
    write_with(&a.out, "cluster_scores.csv", |w| model.scores().write_csv(w))?;
    write_with(&a.out, "concurrence.tsv", |w| {
        model.concurrence().similarity().write_tsv(w)
    })?;

    let mut m = Manifest::new("cluster");
    m.set("user-eps", a.user_eps)
        .set("user-min-pts", a.user_min_pts)
        .set("item-eps", a.item_eps)
        .set("item-min-pts", a.item_min_pts)
        .set(
            "topk",
            a.topk.map_or_else(|| "none".to_owned(), |k| k.to_string()),
        );
    m.add_input(&a.graph)?;
    for name in [
        "user_clusters.tsv",
        "item_clusters.tsv",
        "cluster_scores.csv",
        "concurrence.tsv",
    ] {
        m.add_output(&a.out, name)?;
    }
    m.write(&a.out)?;

    print_summary(&[
        ("user_clusters".into(), model.user_clusters().num_clusters().to_string()),
        ("item_clusters".into(), model.item_clusters().num_clusters().to_string()),
        ("concurrence_entries".into(), (model.concurrence().similarity().nnz() / 2).to_string()),
    ]);
    Ok(())
}

fn read_assignment(path: &Path, side: Side, expected: usize) -> CliResult<ClusterAssignment> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut labels = Vec::with_capacity(expected);
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.with_context(|| format!("reading {}", path.display()))?;
        let parsed = line.split_once('\t').and_then(|(node, c)| {
            Some((node.parse::<usize>().ok()?, c.parse::<u32>().ok()?))
        });
        match parsed {
            Some((node, c)) if node == labels.len() => labels.push(c),
            _ => {
                return Err(CliError::Data(anyhow!(
                    "{}:{}: expected `node<TAB>cluster` in node order",
                    path.display(),
                    n + 1
                )))
            }
        }
    }
    if labels.len() != expected {
        return Err(Error::DimensionMismatch {
            side,
            expected,
            actual: labels.len(),
        }
        .into());
    }
    Ok(ClusterAssignment::from_labels(side, &labels))
}

struct ClusterArtifacts {
    manifest: Manifest,
    users: ClusterAssignment,
    items: ClusterAssignment,
    topk: Option<usize>,
}

/// Loads the `cluster` stage outputs and checks they were computed from `graph_hash`.
fn load_clusters(dir: &Path, g: &InteractionGraph, graph_hash: &str) -> CliResult<ClusterArtifacts> {
    let manifest = verify_dir(dir, "cluster")?;
    if !manifest.inputs.iter().any(|i| i.sha256 == graph_hash) {
        return Err(CliError::Data(anyhow!(
            "clusters in {} were computed from a different graph",
            dir.display()
        )));
    }
    let topk = match manifest.config.get("topk").map(String::as_str) {
        None | Some("none") => None,
        Some(k) => Some(
            k.parse()
                .map_err(|_| CliError::Data(anyhow!("bad topk `{k}` in cluster manifest")))?,
        ),
    };
    Ok(ClusterArtifacts {
        users: read_assignment(&dir.join("user_clusters.tsv"), Side::Users, g.num_users())?,
        items: read_assignment(&dir.join("item_clusters.tsv"), Side::Items, g.num_items())?,
        topk,
        manifest,
    })
}

/// Sampler settings from flags: explicit alpha/retain override the preset.
pub fn resolve_sampler_config(a: &SampleArgs) -> CliResult<SamplerConfig> {
    let preset = a
        .preset
        .as_deref()
        .map(str::parse::<Preset>)
        .transpose()?;
    let cfg = SamplerConfig {
        alpha: a.alpha.or(preset.map(Preset::alpha)).unwrap_or(0.0),
        retain: a.retain.or(preset.map(Preset::retain)).unwrap_or(0.0),
        ensemble_size: a.ensemble,
        seed: a.seed,
        uniform_fallback: !a.no_fallback,
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn cmd_sample(a: &SampleArgs) -> CliResult {
    let cfg = resolve_sampler_config(a)?;
    if !(0.0..=1.0).contains(&a.epsilon) {
        return Err(usage(format!("--epsilon must lie in [0, 1], got {}", a.epsilon)));
    }
    let (g, graph_hash) = load_graph(&a.graph)?;
    let mut m = Manifest::new("sample");
    m.add_input(&a.graph)?;

    let provenance = match a.method {
        MethodArg::Peco => {
            let dir = a
                .clusters
                .as_deref()
                .ok_or_else(|| usage("--clusters is required for --method peco"))?;
            let clusters = load_clusters(dir, &g, &graph_hash)?;
            m.add_input_dir(dir, &clusters.manifest);
            let model = PecoModel::from_parts(
                &g,
                clusters.users,
                clusters.items,
                concurrence_matrix(&g, clusters.topk),
            )?;
            m.set("method", "peco");
            sampler::write_ensemble(&g, &model, &cfg, &a.out)?
        }
        MethodArg::NodeCopy => {
            let sim = similarity::pairwise_similarity_with(&g, Side::Users, SimilarityOptions::default());
            m.set("method", "node-copy").set("epsilon", a.epsilon);
            sampler::write_node_copy_ensemble(&g, &sim, a.epsilon, &cfg, &a.out)?
        }
    };

    m.set("alpha", cfg.alpha)
        .set("retain", cfg.retain)
        .set("ensemble", cfg.ensemble_size)
        .set("seed", cfg.seed)
        .set("uniform-fallback", cfg.uniform_fallback);
    for s in &provenance.samples {
        m.add_output(&a.out, &s.file)?;
    }
    m.add_output(&a.out, "provenance.json")?;
    m.write(&a.out)?;

    print_summary(&[
        ("samples".into(), provenance.samples.len().to_string()),
        ("alpha".into(), cfg.alpha.to_string()),
        ("retain".into(), cfg.retain.to_string()),
        ("source_hash".into(), provenance.source_hash.clone()),
    ]);
    Ok(())
}

pub fn cmd_stats(a: &StatsArgs) -> CliResult {
    let (g, graph_hash) = load_graph(&a.graph)?;
    let clusters = load_clusters(&a.clusters, &g, &graph_hash)?;
    let sample_manifest = verify_dir(&a.samples, "sample")?;
    let provenance = sampler::read_provenance(&a.samples)?;
    if provenance.source_hash != g.content_hash() {
        return Err(CliError::Data(anyhow!(
            "samples in {} were drawn from a different graph",
            a.samples.display()
        )));
    }
    let ensemble = provenance
        .samples
        .iter()
        .map(|s| graph::read_canonical(&a.samples.join(&s.file)))
        .collect::<Result<Vec<_>, _>>()?;

    let s_orig = concurrence_matrix(&g, clusters.topk);
    let e_orig = crate::clustering::cluster_scores(&g, &clusters.users, &clusters.items)?;
    let degrees = stats::degree_report(&g, &ensemble)?;
    let concurrence = stats::concurrence_report(&s_orig, &ensemble, clusters.topk)?;
    let pref = stats::preference_report(&e_orig, &ensemble, &clusters.users, &clusters.items)?;
    let source_nc = stats::neighborhood_concurrence(&s_orig, &g);
    let sample_nc = ensemble
        .iter()
        .map(|s| stats::neighborhood_concurrence(&s_orig, s))
        .sum::<f64>()
        / ensemble.len() as f64;
    let user_degrees_exact = ensemble
        .iter()
        .all(|s| s.degrees(Side::Users) == g.degrees(Side::Users));

    let opt = |v: Option<f64>| v.map_or_else(|| "undefined".to_owned(), |x| x.to_string());
    let summary: Vec<(String, String)> = vec![
        ("samples".into(), ensemble.len().to_string()),
        ("user_degrees_exact".into(), user_degrees_exact.to_string()),
        ("item_degree_spearman".into(), opt(degrees.spearman)),
        ("concurrence_mean_abs_deviation".into(), concurrence.mean_abs_deviation.to_string()),
        ("concurrence_rank_correlation".into(), opt(concurrence.rank_correlation)),
        ("concurrence_compared_pairs".into(), concurrence.compared_pairs.to_string()),
        ("concurrence_overlapping_pairs".into(), concurrence.overlapping_pairs.to_string()),
        ("neighborhood_concurrence_source".into(), source_nc.to_string()),
        ("neighborhood_concurrence_samples".into(), sample_nc.to_string()),
        ("preference_mean_tv_distance".into(), pref.mean_tv_distance.to_string()),
        ("preference_tv_of_mean".into(), pref.tv_of_mean.to_string()),
    ];

    create_dir(&a.out)?;
    write_with(&a.out, "degree_report.csv", |w| degrees.write_csv(w))?;
    write_with(&a.out, "summary.txt", |w| {
        summary.iter().try_for_each(|(k, v)| writeln!(w, "{k}={v}"))
    })?;

    let mut m = Manifest::new("stats");
    m.add_input(&a.graph)?;
    m.add_input_dir(&a.clusters, &clusters.manifest);
    m.add_input_dir(&a.samples, &sample_manifest);
    m.add_output(&a.out, "degree_report.csv")?;
    m.add_output(&a.out, "summary.txt")?;
    m.write(&a.out)?;

    print_summary(&summary);
    Ok(())
}

fn read_rankings(path: &Path) -> CliResult<HashMap<usize, Vec<u32>>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut out = HashMap::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.with_context(|| format!("reading {}", path.display()))?;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || CliError::Data(anyhow!("{}:{}: expected `user<TAB>item,item,...`", path.display(), n + 1));
        let (user, items) = line.split_once('\t').ok_or_else(bad)?;
        let user: usize = user.parse().map_err(|_| bad())?;
        let items = if items.is_empty() {
            Vec::new()
        } else {
            items
                .split(',')
                .map(|i| i.parse::<u32>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| bad())?
        };
        out.insert(user, items);
    }
    Ok(out)
}

pub fn cmd_eval(a: &EvalArgs) -> CliResult {
    if a.k == 0 {
        return Err(usage("--k must be at least 1"));
    }
    let (truth, _) = load_graph(&a.truth)?;
    let mut m = Manifest::new("eval");
    m.set("k", a.k);
    m.add_input(&a.truth)?;

    let rankings: Vec<Vec<u32>> = match (&a.rankings, &a.popularity_from) {
        (Some(path), None) => {
            m.set("rankings", "file");
            m.add_input(path)?;
            let mut by_user = read_rankings(path)?;
            (0..truth.num_users())
                .map(|u| by_user.remove(&u).unwrap_or_default())
                .collect()
        }
        (None, Some(path)) => {
            let (train, _) = load_graph(path)?;
            m.set("rankings", "popularity");
            m.add_input(path)?;
            if train.num_users() != truth.num_users() || train.num_items() != truth.num_items() {
                return Err(CliError::Data(anyhow!("training and truth graphs differ in size")));
            }
            (0..truth.num_users())
                .map(|u| metrics::popularity_ranking(&train, u, a.k))
                .collect()
        }
        _ => return Err(usage("exactly one of --rankings or --popularity-from is required")),
    };

    let judgments = rankings
        .into_iter()
        .enumerate()
        .map(|(u, ranked)| RankingJudgment::new(ranked, truth.items_of(u).iter().copied()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Data(e.into()))?;
    let summary = metrics::evaluate(&judgments, a.k)?;
    let lines: Vec<(String, String)> = vec![
        (format!("recall@{}", a.k), summary.recall.to_string()),
        (format!("ndcg@{}", a.k), summary.ndcg.to_string()),
        ("evaluated_users".into(), summary.evaluated.to_string()),
        ("excluded_users".into(), summary.excluded.to_string()),
    ];

    create_dir(&a.out)?;
    write_with(&a.out, "metrics.txt", |w| {
        lines.iter().try_for_each(|(k, v)| writeln!(w, "{k}={v}"))
    })?;
    m.add_output(&a.out, "metrics.txt")?;
    m.write(&a.out)?;
    print_summary(&lines);
    Ok(())
}

pub fn cmd_synth(a: &SynthArgs) -> CliResult {
    let model = BlockModel::with_edges(a.users, a.items, a.edges, a.blocks);
    let g = synthetic::stochastic_block_graph(&model, a.seed)?;
    if let Some(parent) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    let file = File::create(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let mut w = BufWriter::new(file);
    (|| -> std::io::Result<()> {
        for (u, i) in g.edges() {
            writeln!(w, "u{u}\ti{i}")?;
        }
        w.flush()
    })()
    .with_context(|| format!("writing {}", a.out.display()))?;
    print_summary(&[
        ("users".into(), g.num_users().to_string()),
        ("items".into(), g.num_items().to_string()),
        ("interactions".into(), g.num_edges().to_string()),
    ]);
    Ok(())
}
