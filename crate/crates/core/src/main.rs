use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use flowcomm::amcs::{build_amcs, rasterize_amcs, AmcsOrdering, Palette};
use flowcomm::baseline::{pca_kmeans, KMeansConfig, Padding, DEFAULT_POINTS_PER_LINE};
use flowcomm::bench::{run_pipeline, BenchReport};
use flowcomm::community::{LouvainConfig, Partition, Variant};
use flowcomm::csng::{build_csng, CsngConfig};
use flowcomm::metrics::{segment_labels, weighted_jaccard};
use flowcomm::neighbor::{NeighborQueryConfig, ProximityMeasure};
use flowcomm::service::{ApiError, ServiceConfig, DEFAULT_LISTEN, DEFAULT_MAX_UPLOAD};
use flowcomm::streamline::{filter_short, load_streamlines, resample_uniform, InputFormat};
use flowcomm::synth::{self, BundleParams, GridParams, InterleavedParams, VortexParams};
use flowcomm::{Error, Level, StreamlineSet};

#[derive(Debug, Parser)]
#[command(name = "flowcomm", version, about = "Streamline neighborhood graphs and flow community detection")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Md,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Generate a synthetic labeled dataset.
    Synth {
        #[command(subcommand)]
        kind: SynthKind,
    },
    /// Build a CSNG and detect communities.
    Detect(DetectArgs),
    /// Compare Louvain against PCA k-means on labeled data.
    Compare(CompareArgs),
    /// Time the pipeline over a series of dataset sizes.
    Bench(BenchArgs),
    /// Score a partition file against labels.
    Eval(EvalArgs),
    /// Export the adjacency matrix of a segment selection.
    Amcs(AmcsArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Subcommand)]
enum SynthKind {
    Bundles {
        #[arg(long, default_value_t = 2)]
        b: usize,
        #[arg(long, default_value_t = 6)]
        m: usize,
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 100.0)]
        gap: f64,
        #[arg(long, default_value_t = 0.1)]
        jitter: f64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    Interleaved {
        #[arg(long, default_value_t = 2)]
        b: usize,
        #[arg(long, default_value_t = 12)]
        m: usize,
        /// Arc radius of each bundle.
        #[arg(long, default_value_t = 20.0)]
        radius: f64,
        #[arg(long, default_value_t = 0.15)]
        noise: f64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    Vortex {
        #[arg(long, default_value_t = 3)]
        c: usize,
        #[arg(long, default_value_t = 20)]
        m: usize,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 3.0)]
        turns: f64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    Grid {
        #[arg(long, default_value_t = 5)]
        side: usize,
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        spacing: f64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Streamline file (JSON, or whitespace text with --text).
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long)]
    text: bool,
    /// Resample every streamline at this arc-length spacing.
    #[arg(long)]
    resample: Option<f64>,
    /// Drop streamlines with fewer segments.
    #[arg(long)]
    min_segments: Option<usize>,
}

#[derive(Debug, Args)]
struct GraphArgs {
    #[arg(long, default_value = "segment")]
    level: Level,
    /// k nearest neighbors (default 60 when no radius is given).
    #[arg(long, conflicts_with = "radius")]
    knn: Option<usize>,
    /// Neighbor radius; `auto` is 10% of the bounding-box diagonal.
    #[arg(long)]
    radius: Option<String>,
    #[arg(long, default_value = "longest")]
    distance: ProximityMeasure,
    #[arg(long, default_value_t = 8)]
    subcurve_len: usize,
}

#[derive(Debug, Args)]
struct LouvainArgs {
    /// Higher values give more, smaller communities. Segment-level graphs
    /// usually want a value 4-10x lower than streamline level.
    #[arg(long, default_value_t = 1.0)]
    resolution: f64,
    #[arg(long, default_value_t = 20)]
    max_passes: usize,
    #[arg(long, default_value_t = 1e-7)]
    min_gain: f64,
    /// Independent Louvain runs; the highest modularity wins.
    #[arg(long, default_value_t = 1)]
    restarts: usize,
    /// Perturb-and-rerun steps on the best partition; 0 is plain Louvain.
    #[arg(long, default_value_t = 64)]
    perturbations: usize,
    /// At streamline level, aggregate a segment graph by relationship
    /// strength instead of building a streamline graph.
    #[arg(long)]
    aggregate: bool,
}

#[derive(Debug, Args)]
struct DetectArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    louvain: LouvainArgs,
    /// Partition output file (default: stdout).
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Report output file.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Include wall-clock phase times in the report.
    #[arg(long)]
    timings: bool,
    /// Write the CSNG in binary form.
    #[arg(long)]
    csng_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    louvain: LouvainArgs,
    /// Number of k-means clusters.
    #[arg(long)]
    kc: usize,
    /// Labels file (JSON integer array per streamline); defaults to the
    /// labels stored in the input.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_POINTS_PER_LINE)]
    points_per_line: usize,
    #[arg(long, default_value_t = 0.95)]
    variance: f64,
    /// k-means++ restarts; the lowest within-cluster sum of squares wins.
    #[arg(long, default_value_t = 10)]
    n_init: usize,
    /// Zero-pad short streamlines instead of resampling them.
    #[arg(long)]
    zero_pad: bool,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Target segment counts for synthetic vortex datasets.
    #[arg(long, value_delimiter = ',', default_value = "10000,50000,100000")]
    sizes: Vec<usize>,
    /// Benchmark these files instead of synthetic data.
    #[arg(long, value_delimiter = ',')]
    inputs: Vec<PathBuf>,
    #[arg(long, default_value_t = 25)]
    knn: usize,
    #[arg(long, default_value = "longest")]
    distance: ProximityMeasure,
    #[arg(long, default_value = "segment")]
    level: Level,
    #[arg(long, default_value_t = 1.0)]
    resolution: f64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Partition JSON written by `detect`.
    #[arg(long)]
    partition: PathBuf,
    /// Dataset, needed to expand streamline labels to segments.
    #[arg(long, short)]
    input: Option<PathBuf>,
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AmcsArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    knn: Option<usize>,
    #[arg(long)]
    radius: Option<String>,
    #[arg(long, default_value = "longest")]
    distance: ProximityMeasure,
    /// Segment-level partition file; with --community selects its members.
    #[arg(long)]
    partition: Option<PathBuf>,
    #[arg(long)]
    community: Option<usize>,
    /// Use every segment.
    #[arg(long)]
    full: bool,
    #[arg(long, default_value_t = 1024)]
    max_pixels: usize,
    #[arg(long)]
    by_id: bool,
    /// PPM image output.
    #[arg(long)]
    image: Option<PathBuf>,
    /// JSON matrix output (default: stdout).
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, env = "FLOWCOMM_LISTEN", default_value = DEFAULT_LISTEN)]
    listen: std::net::SocketAddr,
    #[arg(long)]
    cors_origin: Option<String>,
    #[arg(long, default_value_t = DEFAULT_MAX_UPLOAD)]
    max_upload: usize,
}

enum Failure {
    Usage(String),
    Api(ApiError),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Api(e.into())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Api(Error::Io(e).into())
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Api(e)) => {
            eprintln!("error [{}]: {}", serde_json::to_value(e.code).unwrap().as_str().unwrap_or("internal"), e.message);
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> CliResult {
    let seed = cli.seed;
    match cli.command {
        Cmd::Synth { kind } => cmd_synth(kind, seed),
        Cmd::Detect(a) => cmd_detect(a, seed, cli.format),
        Cmd::Compare(a) => cmd_compare(a, seed, cli.format),
        Cmd::Bench(a) => cmd_bench(a, seed, cli.format),
        Cmd::Eval(a) => cmd_eval(a),
        Cmd::Amcs(a) => cmd_amcs(a),
        Cmd::Serve(a) => cmd_serve(a),
    }
}

fn write_out(path: Option<&Path>, bytes: &[u8]) -> CliResult {
    match path {
        Some(p) => std::fs::write(p, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn open(path: &Path) -> CliResult<File> {
    File::open(path).map_err(|e| Failure::Usage(format!("cannot open '{}': {e}", path.display())))
}

fn load(args: &InputArgs) -> CliResult<StreamlineSet> {
    let format = if args.text { InputFormat::Text } else { InputFormat::Json };
    let (mut set, report) = load_streamlines(BufReader::new(open(&args.input)?), format)?;
    if report.discarded_streamlines > 0 || report.collapsed_points > 0 {
        eprintln!(
            "note: discarded {} degenerate streamlines, collapsed {} duplicate points",
            report.discarded_streamlines, report.collapsed_points
        );
    }
    if let Some(s) = args.resample {
        set = resample_uniform(&set, s)?;
    }
    if let Some(m) = args.min_segments {
        set = filter_short(&set, m)?;
    }
    Ok(set)
}

fn neighbor_config(
    set: &StreamlineSet,
    knn: Option<usize>,
    radius: Option<&str>,
    measure: ProximityMeasure,
) -> CliResult<NeighborQueryConfig> {
    let cfg = match (knn, radius) {
        (_, Some("auto")) => NeighborQueryConfig::default_rbn(set, measure),
        (_, Some(r)) => {
            let r: f64 = r.parse().map_err(|_| Failure::Usage(format!("invalid radius '{r}'")))?;
            NeighborQueryConfig::rbn(r, measure)
        }
        (k, None) => NeighborQueryConfig::knn(k.unwrap_or(60), measure),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn louvain_config(a: &LouvainArgs, seed: u64) -> LouvainConfig {
    LouvainConfig {
        resolution: a.resolution,
        max_passes: a.max_passes,
        min_gain: a.min_gain,
        seed,
        restarts: a.restarts,
        perturbations: a.perturbations,
    }
}

/// Detection variant and the level of the graph it needs.
fn plan(level: Level, aggregate: bool) -> CliResult<(Variant, Level)> {
    match (level, aggregate) {
        (Level::Streamline, true) => Ok((Variant::Streamline, Level::Segment)),
        (_, true) => Err(Failure::Usage("--aggregate applies to --level streamline only".into())),
        (Level::Segment, false) => Ok((Variant::Segment, Level::Segment)),
        (Level::SubCurve, false) => Ok((Variant::SubCurve, Level::SubCurve)),
        (Level::Streamline, false) => Ok((Variant::Streamline, Level::Streamline)),
    }
}

fn partition_json(p: &Partition) -> String {
    let mut s = serde_json::to_string_pretty(&json!({
        "level": p.level,
        "n_communities": p.n_communities,
        "modularity": p.modularity,
        "assignment": p.assignment,
    }))
    .expect("partition serializes");
    s.push('\n');
    s
}

fn cmd_detect(a: DetectArgs, seed: u64, format: Format) -> CliResult {
    let t = Instant::now();
    let set = load(&a.input)?;
    let data_ms = t.elapsed().as_secs_f64() * 1e3;
    let neighbor = neighbor_config(&set, a.graph.knn, a.graph.radius.as_deref(), a.graph.distance)?;
    let csng = CsngConfig {
        neighbor,
        subcurve_len: a.graph.subcurve_len,
    };
    let (variant, graph_level) = plan(a.graph.level, a.louvain.aggregate)?;
    let label = a.input.input.display().to_string();
    let run = run_pipeline(&label, &set, data_ms, graph_level, variant, &csng, &louvain_config(&a.louvain, seed))?;
    write_out(a.output.as_deref(), partition_json(&run.partition).as_bytes())?;
    if let Some(p) = &a.csng_out {
        run.csng.write_binary(std::io::BufWriter::new(File::create(p)?))?;
    }
    let mut row = run.row;
    if !a.timings {
        row.data_ms = 0.0;
        row.kdtree_ms = 0.0;
        row.knn_ms = 0.0;
        row.detection_ms = 0.0;
    }
    let report = BenchReport { rows: vec![row] };
    let text = render_report(&report, format);
    match &a.report {
        Some(p) => std::fs::write(p, text)?,
        None if a.output.is_some() => print!("{text}"),
        None => eprint!("{text}"),
    }
    Ok(())
}

fn render_report(r: &BenchReport, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(r).expect("report serializes") + "\n",
        Format::Csv => r.to_csv(),
        Format::Md => r.to_markdown(),
    }
}

fn read_labels(path: &Path) -> CliResult<Vec<i64>> {
    serde_json::from_reader(BufReader::new(open(path)?))
        .map_err(|e| Failure::Api(Error::MalformedInput(format!("labels file: {e}")).into()))
}

fn cmd_compare(a: CompareArgs, seed: u64, format: Format) -> CliResult {
    let set = load(&a.input)?;
    let labels = match &a.labels {
        Some(p) => read_labels(p)?,
        None => set
            .labels()
            .map(<[i64]>::to_vec)
            .ok_or_else(|| Failure::Usage("no labels: pass --labels or use a labeled input".into()))?,
    };
    let level = a.graph.level;
    let truth = match level {
        Level::Streamline => labels.clone(),
        Level::Segment => segment_labels(&set, &labels)?,
        Level::SubCurve => return Err(Failure::Usage("compare supports segment and streamline levels".into())),
    };
    let neighbor = neighbor_config(&set, a.graph.knn, a.graph.radius.as_deref(), a.graph.distance)?;
    let csng = CsngConfig {
        neighbor,
        subcurve_len: a.graph.subcurve_len,
    };
    let (variant, graph_level) = plan(level, a.louvain.aggregate)?;
    let run = run_pipeline("louvain", &set, 0.0, graph_level, variant, &csng, &louvain_config(&a.louvain, seed))?;
    let louvain_wj = weighted_jaccard(&run.partition.assignment, &truth)?;

    let t = Instant::now();
    let padding = if a.zero_pad { Padding::ZeroPad } else { Padding::Resample };
    let km = KMeansConfig {
        k_c: a.kc,
        max_iters: 100,
        variance_retained: a.variance,
        seed,
        n_init: a.n_init,
    };
    let (result, components) = pca_kmeans(&set, level, a.points_per_line, padding, &km)?;
    let kmeans_ms = t.elapsed().as_secs_f64() * 1e3;
    let kmeans_wj = weighted_jaccard(&result.assignment, &truth)?;

    let rows = [
        ("louvain", louvain_wj, run.row.detection_ms, run.partition.n_communities, run.row.kdtree_ms + run.row.knn_ms),
        ("pca_kmeans", kmeans_wj, kmeans_ms, result.k_c, 0.0),
    ];
    let text = match format {
        Format::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|(m, wj, ms, k, graph_ms)| {
                    json!({"method": m, "level": level, "weighted_jaccard": wj, "wall_ms": ms,
                           "graph_ms": graph_ms, "communities": k})
                })
                .collect();
            serde_json::to_string_pretty(&json!({"rows": v, "pca_components": components})).expect("json") + "\n"
        }
        Format::Csv => {
            let mut s = String::from("method,level,weighted_jaccard,wall_ms,graph_ms,communities\n");
            for (m, wj, ms, k, g) in rows {
                s += &format!("{m},{level},{wj:.6},{ms:.3},{g:.3},{k}\n");
            }
            s
        }
        Format::Md => {
            let mut s = String::from(
                "| method | level | weighted_jaccard | wall_ms | graph_ms | communities |\n|---|---|---|---|---|---|\n",
            );
            for (m, wj, ms, k, g) in rows {
                s += &format!("| {m} | {level} | {wj:.6} | {ms:.3} | {g:.3} | {k} |\n");
            }
            s
        }
    };
    print!("{text}");
    Ok(())
}

fn cmd_bench(a: BenchArgs, seed: u64, format: Format) -> CliResult {
    let measure = a.distance;
    let csng = CsngConfig::new(NeighborQueryConfig::knn(a.knn, measure));
    let louvain = LouvainConfig {
        resolution: a.resolution,
        seed,
        ..Default::default()
    };
    let variant = plan(a.level, false)?.0;
    let mut report = BenchReport::default();
    if a.inputs.is_empty() {
        for &size in &a.sizes {
            let t = Instant::now();
            let set = vortex_of_size(size, seed)?;
            let data_ms = t.elapsed().as_secs_f64() * 1e3;
            let run = run_pipeline(&format!("vortex-{size}"), &set, data_ms, a.level, variant, &csng, &louvain)?;
            report.rows.push(run.row);
        }
    } else {
        for path in &a.inputs {
            let t = Instant::now();
            let set = load(&InputArgs {
                input: path.clone(),
                text: path.extension().is_some_and(|e| e == "txt"),
                resample: None,
                min_segments: None,
            })?;
            let data_ms = t.elapsed().as_secs_f64() * 1e3;
            let run = run_pipeline(&path.display().to_string(), &set, data_ms, a.level, variant, &csng, &louvain)?;
            report.rows.push(run.row);
        }
    }
    write_out(a.output.as_deref(), render_report(&report, format).as_bytes())
}

/// Vortex dataset with roughly `segments` segments.
fn vortex_of_size(segments: usize, seed: u64) -> CliResult<StreamlineSet> {
    let points_per_line = 200;
    let lines = segments.div_ceil(points_per_line - 1).max(4);
    let axes = 4.min(lines);
    Ok(synth::vortex(&VortexParams {
        axes,
        lines_per_axis: lines.div_ceil(axes),
        points_per_line,
        turns: 3.0,
        seed,
    })?)
}

fn cmd_eval(a: EvalArgs) -> CliResult {
    let v: serde_json::Value = serde_json::from_reader(BufReader::new(open(&a.partition)?))
        .map_err(|e| Failure::Api(Error::MalformedInput(format!("partition file: {e}")).into()))?;
    let level: Level = v["level"]
        .as_str()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Failure::Api(Error::MalformedInput("partition file lacks a level".into()).into()))?;
    let assignment: Vec<usize> = serde_json::from_value(v["assignment"].clone())
        .map_err(|e| Failure::Api(Error::MalformedInput(format!("partition assignment: {e}")).into()))?;
    let set = match &a.input {
        Some(p) => Some(load(&InputArgs {
            input: p.clone(),
            text: false,
            resample: None,
            min_segments: None,
        })?),
        None => None,
    };
    let labels = match (&a.labels, &set) {
        (Some(p), _) => read_labels(p)?,
        (None, Some(s)) => s
            .labels()
            .map(<[i64]>::to_vec)
            .ok_or_else(|| Failure::Usage("input has no labels; pass --labels".into()))?,
        (None, None) => return Err(Failure::Usage("pass --labels or a labeled --input".into())),
    };
    let truth = match (level, &set) {
        (Level::Segment, Some(s)) if labels.len() == s.streamlines().len() => segment_labels(s, &labels)?,
        _ => labels,
    };
    let wj = weighted_jaccard(&assignment, &truth)?;
    let n = assignment.iter().copied().max().map_or(0, |m| m + 1);
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({"level": level, "weighted_jaccard": wj, "n_communities": n})).expect("json")
    );
    Ok(())
}

fn cmd_amcs(a: AmcsArgs) -> CliResult {
    let set = load(&a.input)?;
    let neighbor = neighbor_config(&set, a.knn, a.radius.as_deref(), a.distance)?;
    let g = build_csng(&set, Level::Segment, &CsngConfig::new(neighbor))?;
    let members: Vec<usize> = match (&a.partition, a.community, a.full) {
        (Some(p), Some(c), _) => {
            let v: serde_json::Value = serde_json::from_reader(BufReader::new(open(p)?))
                .map_err(|e| Failure::Api(Error::MalformedInput(format!("partition file: {e}")).into()))?;
            if v["level"] != "segment" {
                return Err(Error::LevelMismatch {
                    expected: Level::Segment,
                    found: v["level"].as_str().and_then(|s| s.parse().ok()).unwrap_or(Level::Streamline),
                }
                .into());
            }
            let assignment: Vec<usize> = serde_json::from_value(v["assignment"].clone())
                .map_err(|e| Failure::Api(Error::MalformedInput(format!("partition assignment: {e}")).into()))?;
            assignment
                .iter()
                .enumerate()
                .filter(|(_, &x)| x == c)
                .map(|(i, _)| i)
                .collect()
        }
        (_, _, true) => (0..g.n_nodes()).collect(),
        _ => return Err(Failure::Usage("select --partition with --community, or pass --full".into())),
    };
    let ordering = if a.by_id { AmcsOrdering::ById } else { AmcsOrdering::ByStreamline };
    let m = build_amcs(&g, &set, &members, ordering)?;
    if let Some(p) = &a.image {
        std::fs::write(p, rasterize_amcs(&m, a.max_pixels, Palette::Light)?.to_ppm())?;
    }
    write_out(a.output.as_deref(), (m.to_json() + "\n").as_bytes())
}

fn cmd_serve(a: ServeArgs) -> CliResult {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info,tower_http=info")),
        )
        .init();
    let runtime = tokio::runtime::Runtime::new()?;
    let config = ServiceConfig {
        max_upload_bytes: a.max_upload,
        cors_origin: a.cors_origin,
    };
    runtime
        .block_on(flowcomm::service::serve(a.listen, config))
        .map_err(|e| Failure::Usage(format!("cannot serve on {}: {e}", a.listen)))
}

fn cmd_synth(kind: SynthKind, seed: u64) -> CliResult {
    let (set, output) = match kind {
        SynthKind::Bundles { b, m, n, gap, jitter, output } => (
            synth::bundles(&BundleParams {
                bundles: b,
                lines_per_bundle: m,
                points_per_line: n,
                gap,
                jitter,
                seed,
            })?,
            output,
        ),
        SynthKind::Interleaved { b, m, radius, noise, output } => (
            synth::interleaved(&InterleavedParams {
                bundles: b,
                lines_per_bundle: m,
                radius,
                noise,
                seed,
            })?,
            output,
        ),
        SynthKind::Vortex { c, m, n, turns, output } => (
            synth::vortex(&VortexParams {
                axes: c,
                lines_per_axis: m,
                points_per_line: n,
                turns,
                seed,
            })?,
            output,
        ),
        SynthKind::Grid { side, n, spacing, output } => (
            synth::grid(&GridParams {
                side,
                points_per_line: n,
                spacing,
            })?,
            output,
        ),
    };
    write_out(output.as_deref(), (set.to_json() + "\n").as_bytes())
}
