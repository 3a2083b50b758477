//! The `genaug` command line: `search`, `eval`, `apply`, and `report`.

pub mod config;
pub mod error;
pub mod report;

use std::collections::HashSet;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use genaug_core::augment::{parse_policy, serialize_policy, Policy};
use genaug_core::dataset::{decode, resize_shortest_side, save_png, scan_dataset, DatasetError, Domain, ImageSource};
use genaug_core::evolve::{run_search, EvalContext, EvolveError};
use genaug_core::features::{load_extractor, ExtractorSpec, FeatureError, FeatureExtractor};
use genaug_core::metrics::MetricPair;
use genaug_core::rng;

pub use config::{RunConfig, DEFAULT_SHORTEST_SIDE};
pub use error::CliError;

/// Datasets at most this large are decoded once up front.
const PRELOAD_LIMIT: usize = 4096;

#[derive(Debug, Parser)]
#[command(name = "genaug", version, about = "Evolve image augmentation policies toward a real image domain")]
pub struct Cli {
    /// Run seed; overrides the config file's seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Maximum evaluation threads (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: Option<u64>,
    /// Resize images so their shorter side has this many pixels.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub shortest_side: Option<u32>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the evolutionary search described by a JSON config.
    Search {
        #[arg(long)]
        config: PathBuf,
    },
    /// Score one policy on synthetic and real images.
    Eval {
        #[arg(long)]
        policy: PathBuf,
        #[arg(long)]
        synthetic_dir: PathBuf,
        #[arg(long)]
        real_dir: PathBuf,
        /// Images drawn from each domain.
        #[arg(long, default_value_t = 2048, value_parser = clap::value_parser!(u64).range(2..))]
        samples: u64,
        /// Also score the unaugmented synthetic images.
        #[arg(long)]
        baseline: bool,
        /// Extractor spec as JSON; the built-in statistics extractor when unset.
        #[arg(long)]
        extractor: Option<String>,
    },
    /// Write every input image augmented by a policy, as PNG.
    Apply {
        #[arg(long)]
        policy: PathBuf,
        #[arg(long)]
        input_dir: PathBuf,
        #[arg(long)]
        output_dir: PathBuf,
    },
    /// Render evolution.svg and pareto.svg from a search output directory.
    Report {
        #[arg(long)]
        run_dir: PathBuf,
    },
}

/// Parses `args` and runs the command, returning the process exit code.
/// Output goes to `out`; errors are reported on stderr.
pub fn run<I, T>(args: I, out: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli, out: &mut dyn std::io::Write) -> Result<(), CliError> {
    let workers = cli.workers.map(|w| w as usize);
    match cli.command {
        Command::Search { ref config } => cmd_search(config, &cli, workers, out),
        Command::Eval { ref policy, ref synthetic_dir, ref real_dir, samples, baseline, ref extractor } => {
            let spec = match extractor {
                Some(text) => serde_json::from_str(text).map_err(|e| CliError::usage(format!("--extractor: {e}")))?,
                None => ExtractorSpec::BuiltinStats,
            };
            let args = EvalArgs {
                policy,
                synthetic_dir,
                real_dir,
                samples: samples as usize,
                baseline,
                spec: &spec,
                seed: cli.seed.unwrap_or(0),
                shortest_side: cli.shortest_side.unwrap_or(DEFAULT_SHORTEST_SIDE),
                workers,
            };
            cmd_eval(&args, out)
        }
        Command::Apply { ref policy, ref input_dir, ref output_dir } => {
            cmd_apply(policy, input_dir, output_dir, cli.seed.unwrap_or(0), cli.shortest_side, out)
        }
        Command::Report { ref run_dir } => {
            report::write_report(run_dir)?;
            let _ = writeln!(out, "wrote {} and {}", report::EVOLUTION_SVG, report::PARETO_SVG);
            Ok(())
        }
    }
}

fn dataset_err(e: DatasetError) -> CliError {
    match e {
        DatasetError::DatasetEmpty(_) | DatasetError::Io { .. } | DatasetError::InvalidShortestSide => CliError::usage(e),
        _ => CliError::runtime(e),
    }
}

fn feature_err(e: FeatureError) -> CliError {
    match e {
        FeatureError::ModelLoad(_) | FeatureError::ModelShape(_) => CliError::usage(e),
        FeatureError::Dataset(d) => dataset_err(d),
        _ => CliError::runtime(e),
    }
}

fn evolve_err(e: EvolveError) -> CliError {
    match e {
        EvolveError::Config(c) => CliError::usage(c),
        EvolveError::Features(f) => feature_err(f),
        EvolveError::Dataset(d) => dataset_err(d),
        other => CliError::runtime(other),
    }
}

fn open_source(dir: &Path, domain: Domain, shortest_side: u32) -> Result<ImageSource, CliError> {
    let handle = scan_dataset(dir, domain).map_err(dataset_err)?;
    ImageSource::new(handle, shortest_side, PRELOAD_LIMIT).map_err(CliError::runtime)
}

fn read_policy(path: &Path) -> Result<Policy, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read policy {}: {e}", path.display())))?;
    parse_policy(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn pair_json(m: &MetricPair) -> String {
    format!("{{\"variance\": {}, \"distance\": {}}}", m.variance, m.distance)
}

/// Runs `f` on a thread pool of `workers` threads (all cores when `None`).
fn with_workers<T>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError>
where
    T: Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(CliError::runtime)?;
    Ok(pool.install(f))
}

fn cmd_search(config: &Path, cli: &Cli, workers: Option<usize>, out: &mut dyn std::io::Write) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(config)?;
    if let Some(seed) = cli.seed {
        cfg.search.seed = seed;
    }
    let side = cli.shortest_side.or(cfg.shortest_side).unwrap_or(DEFAULT_SHORTEST_SIDE);
    let extractor = load_extractor(&cfg.extractor).map_err(feature_err)?;
    let synthetic = open_source(&cfg.synthetic_dir, Domain::Synthetic, side)?;
    let real = open_source(&cfg.real_dir, Domain::Real, side)?;

    let outcome = with_workers(workers, || -> Result<_, EvolveError> {
        let ctx = EvalContext::prepare(&synthetic, &real, &extractor, cfg.search.eval_samples, cfg.search.real_samples(), cfg.search.seed)?;
        run_search(&cfg.search, &ctx, workers)
    })?
    .map_err(evolve_err)?;
    report::write_search_artifacts(&cfg.output_dir, &outcome)?;

    let fit = outcome.final_genome.expect_fitness();
    let _ = writeln!(out, "final policy ({} steps):", outcome.final_genome.policy.len());
    let _ = writeln!(out, "{}", serialize_policy(&outcome.final_genome.policy));
    let _ = writeln!(out, "final:    {}", pair_json(&fit));
    let _ = writeln!(out, "baseline: {}", pair_json(&outcome.baseline));
    let _ = writeln!(out, "archive: {} entries; artifacts in {}", outcome.archive.len(), cfg.output_dir.display());
    Ok(())
}

struct EvalArgs<'a> {
    policy: &'a Path,
    synthetic_dir: &'a Path,
    real_dir: &'a Path,
    samples: usize,
    baseline: bool,
    spec: &'a ExtractorSpec,
    seed: u64,
    shortest_side: u32,
    workers: Option<usize>,
}

fn cmd_eval(args: &EvalArgs<'_>, out: &mut dyn std::io::Write) -> Result<(), CliError> {
    let policy = read_policy(args.policy)?;
    let extractor: FeatureExtractor = load_extractor(args.spec).map_err(feature_err)?;
    let synthetic = open_source(args.synthetic_dir, Domain::Synthetic, args.shortest_side)?;
    let real = open_source(args.real_dir, Domain::Real, args.shortest_side)?;
    let (pair, base) = with_workers(args.workers, || -> Result<_, EvolveError> {
        let ctx = EvalContext::prepare(&synthetic, &real, &extractor, args.samples, args.samples, args.seed)?;
        let pair = ctx.evaluate(&policy, 0)?;
        let base = if args.baseline { Some(ctx.baseline()?) } else { None };
        Ok((pair, base))
    })?
    .map_err(evolve_err)?;
    let _ = writeln!(out, "{}", pair_json(&pair));
    if let Some(b) = base {
        let _ = writeln!(out, "{{\"baseline\": {}}}", pair_json(&b));
    }
    Ok(())
}

/// PNG output name for an input file: same stem, `.png` extension.
fn output_name(path: &Path) -> PathBuf {
    Path::new(path.file_name().expect("scanned files have names")).with_extension("png")
}

fn cmd_apply(
    policy: &Path,
    input_dir: &Path,
    output_dir: &Path,
    seed: u64,
    shortest_side: Option<u32>,
    out: &mut dyn std::io::Write,
) -> Result<(), CliError> {
    let policy = read_policy(policy)?;
    let handle = scan_dataset(input_dir, Domain::Synthetic).map_err(dataset_err)?;
    let mut seen = HashSet::new();
    for f in handle.files() {
        if !seen.insert(output_name(f)) {
            return Err(CliError::usage(format!("two inputs map to output {}", output_name(f).display())));
        }
    }
    std::fs::create_dir_all(output_dir).map_err(|e| CliError::runtime(format!("{}: {e}", output_dir.display())))?;
    for f in handle.files() {
        let mut img = decode(f).map_err(CliError::runtime)?;
        if let Some(side) = shortest_side {
            img = resize_shortest_side(&img, side).map_err(CliError::runtime)?;
        }
        let name = f.file_name().expect("scanned files have names").to_string_lossy();
        let mut r = rng::stream(seed, rng::fnv1a(name.as_bytes()));
        let augmented = policy.apply(&img, &mut r);
        save_png(&augmented, output_dir.join(output_name(f))).map_err(CliError::runtime)?;
    }
    let _ = writeln!(out, "wrote {} images to {}", handle.len(), output_dir.display());
    Ok(())
}
