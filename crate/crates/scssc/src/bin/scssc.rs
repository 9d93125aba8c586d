use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use scssc::bench::{rows_to_csv, run_bench, BenchConfig};
use scssc::config::{preset, Config};
use scssc::report::{metrics_table, timing_table, write_json, MetricsJson};
use scssc::run::{run_scene, score_labels, RunRequest};
use scssc::synth::{generate, write_scene, SynthSpec};
use scssc::{Error, RayonExecutor, Result};

/// Unsupervised hyperspectral segmentation with similarity-constrained
/// sparse subspace clustering.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    /// Worker threads; 0 uses every core. Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster a scene and write labels, maps, metrics and timings.
    Run(RunArgs),
    /// Generate a planted-subspace scene with ground truth.
    Synth(SynthArgs),
    /// Time SC-SSC against full SSC on synthetic scenes.
    Bench(BenchArgs),
    /// Score an existing label CSV against ground truth.
    Metrics(MetricsArgs),
}

#[derive(Args)]
struct RunArgs {
    /// ENVI header of the scene.
    #[arg(long)]
    scene: PathBuf,
    /// Ground truth as a CSV grid or single-band ENVI header.
    #[arg(long)]
    gt: Option<PathBuf>,
    /// JSON parameter file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Named parameter set: indian-pines-roi, salinas-roi, pavia-roi.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    clusters: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    no_pca: bool,
    #[arg(long)]
    no_superpixels: bool,
    #[arg(long)]
    no_smoothing: bool,
    /// Also write segments, exemplars and raw coefficients.
    #[arg(long)]
    dump: bool,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 4)]
    subspaces: usize,
    #[arg(long, default_value_t = 30)]
    ambient_dim: usize,
    #[arg(long, default_value_t = 3)]
    subspace_dim: usize,
    #[arg(long, default_value_t = 70)]
    rows: usize,
    #[arg(long, default_value_t = 70)]
    cols: usize,
    /// Block grid as `ROWSxCOLS`; defaults to a near-square grid of `subspaces` blocks.
    #[arg(long)]
    blocks: Option<String>,
    #[arg(long, default_value_t = 0.01)]
    noise: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    /// Pixel counts, comma-separated.
    #[arg(long, value_delimiter = ',', default_value = "400,900,1600,2500")]
    sizes: Vec<usize>,
    /// Selection fractions, comma-separated.
    #[arg(long, value_delimiter = ',', default_value = "0.3")]
    rhos: Vec<f64>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Largest N at which full SSC is also run.
    #[arg(long)]
    ssc_cap: Option<usize>,
    /// Skip full SSC entirely.
    #[arg(long)]
    no_ssc: bool,
    /// CSV destination; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MetricsArgs {
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    gt: PathBuf,
    #[arg(long, default_value_t = 0)]
    ignore_label: u32,
    /// Also write the report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

fn run(args: RunArgs, exec: &RayonExecutor) -> Result<()> {
    let mut config = match (&args.config, &args.preset) {
        (Some(p), _) => Config::load(p)?,
        (None, Some(name)) => preset(name)?,
        (None, None) => Config::default(),
    };
    if let Some(k) = args.clusters {
        config.clusters = k;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    config.toggles.use_pca &= !args.no_pca;
    config.toggles.use_superpixels &= !args.no_superpixels;
    config.toggles.use_smoothing &= !args.no_smoothing;
    let req = RunRequest {
        scene: args.scene,
        ground_truth: args.gt,
        config,
        out_dir: args.out,
        dump_intermediates: args.dump,
    };
    let outcome = run_scene(&req, exec)?;
    print!("{}", timing_table(&outcome.result));
    if let Some(m) = &outcome.metrics {
        print!("{}", metrics_table(m));
    }
    Ok(())
}

fn synth(args: SynthArgs) -> Result<()> {
    let mut spec = SynthSpec::new(
        args.subspaces,
        args.ambient_dim,
        args.subspace_dim,
        args.rows,
        args.cols,
    );
    if let Some(b) = &args.blocks {
        let parsed = b
            .split_once('x')
            .and_then(|(r, c)| Some((r.trim().parse().ok()?, c.trim().parse().ok()?)));
        spec.blocks =
            parsed.ok_or_else(|| Error::Config(format!("blocks must look like 2x2, got `{b}`")))?;
    }
    spec.noise = args.noise;
    spec.seed = args.seed;
    let scene = generate(&spec)?;
    let (header, gt) = write_scene(&args.out, &scene)?;
    println!("{}\n{}", header.display(), gt.display());
    Ok(())
}

fn bench(args: BenchArgs, exec: &RayonExecutor) -> Result<()> {
    let mut cfg = BenchConfig::new(args.sizes);
    cfg.rhos = args.rhos;
    cfg.seed = args.seed;
    if let Some(c) = args.ssc_cap {
        cfg.ssc_cap = c;
    }
    if args.no_ssc {
        cfg.ssc_cap = 0;
    }
    let csv = rows_to_csv(&run_bench(&cfg, exec)?);
    match args.out {
        Some(p) => std::fs::write(&p, csv).map_err(|e| Error::Io { path: p, source: e })?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn metrics(args: MetricsArgs) -> Result<()> {
    let report = score_labels(&args.labels, &args.gt, args.ignore_label)?;
    print!("{}", metrics_table(&report));
    if let Some(p) = args.json {
        write_json(&p, &MetricsJson::from(&report))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = RayonExecutor::new(cli.threads).and_then(|exec| match cli.command {
        Command::Run(a) => run(a, &exec),
        Command::Synth(a) => synth(a),
        Command::Bench(a) => bench(a, &exec),
        Command::Metrics(a) => metrics(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
