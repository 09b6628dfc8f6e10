//! Single-binary command-line front end.
//!
//! Subcommands mirror the experiment pipeline: `synth` emits raw event
//! files, `prepare` filters and splits them, `train` fits one model,
//! `eval` scores a checkpoint, `sweep` runs the full model × K grid, and
//! `stats` reports corpus shape. Every command writes a `manifest.json`
//! recording the invocation, resolved settings, seeds, and SHA-256
//! digests of the files it read and wrote, so a run can be audited or
//! replayed later.
//!
//! Training knobs resolve in three layers: a flat `key=value` config
//! file, then `CPREC_*` environment variables, then flags. Flags win.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::data::io::{
    self, read_dataset, read_interactions, read_producers, read_split, write_dataset,
    write_scatter, write_split, SplitMeta,
};
use crate::data::Dataset;
use crate::error::Error;
use crate::eval::{evaluate_model, k_sweep, EvalMode, EvalOptions, EvalTarget, TiePolicy};
use crate::manifest::RunManifest;
use crate::model::checkpoint::{load_checkpoint, save_checkpoint};
use crate::model::ModelKind;
use crate::synth::{generate_synthetic, SynthConfig};
use crate::train::{train, TrainConfig};
use crate::Result;

pub const CHECKPOINT_FILE: &str = "checkpoint.ckpt";
pub const TRAIN_REPORT_FILE: &str = "train_report.csv";
pub const EVAL_REPORT_FILE: &str = "eval_report.csv";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Parser, Debug)]
#[command(
    name = "cprec",
    version,
    about = "Train and evaluate recommenders that model users as both consumers and producers"
)]
pub struct Cli {
    /// Worker threads for evaluation; defaults to all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Filter raw events, split leave-one-out, and write a data directory.
    Prepare(PrepareArgs),
    /// Fit one model on a prepared directory and save the best checkpoint.
    Train(TrainArgs),
    /// Score a checkpoint: per-user AUC with all-user and cold slices.
    Eval(EvalArgs),
    /// Grid-search λ per (model, K) cell and tabulate test AUC.
    Sweep(SweepArgs),
    /// Corpus summary table and the producer-concentration scatter.
    Stats(StatsArgs),
    /// Generate a synthetic prosumer corpus as raw event files.
    Synth(SynthArgs),
}

#[derive(Args, Debug)]
pub struct PrepareArgs {
    /// Tab-separated (user, item) consumption events.
    pub interactions: PathBuf,
    /// Tab-separated (item, producer) attributions.
    pub producers: PathBuf,
    /// Drop users with fewer consumption actions than this.
    #[arg(long, default_value_t = 10)]
    pub min_actions: usize,
    /// Re-apply the activity filter until no row changes.
    #[arg(long, default_value_t = false)]
    pub fixpoint: bool,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Output data directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
}

/// Training knobs shared by `train` and `sweep`. Every flag is optional;
/// unset values fall back to environment, config file, then defaults.
#[derive(Args, Debug, Clone)]
pub struct TrainKnobs {
    /// Flat key=value config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Embedding dimension K.
    #[arg(long)]
    pub k: Option<usize>,
    /// L2 penalty weight λ.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long = "lr")]
    pub learning_rate: Option<f64>,
    #[arg(long = "batch")]
    pub batch_size: Option<usize>,
    #[arg(long = "epochs")]
    pub max_epochs: Option<usize>,
    /// Epochs without validation improvement before stopping.
    #[arg(long)]
    pub patience: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Negatives per user for per-epoch validation AUC; 0 = exact.
    #[arg(long)]
    pub val_negatives: Option<usize>,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Prepared data directory.
    pub data_dir: PathBuf,
    #[arg(long, default_value = "cprec")]
    pub model: ModelKind,
    #[command(flatten)]
    pub knobs: TrainKnobs,
    /// Output directory; defaults to the data directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Test,
    Val,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TiesArg {
    /// Ties count as losses (the strict ranking definition).
    Strict,
    /// Ties earn half credit; diagnostic only.
    Half,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Prepared data directory.
    pub data_dir: PathBuf,
    /// Checkpoint to score; defaults to checkpoint.ckpt in the data dir.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// A user is cold below this many training actions.
    #[arg(long, default_value_t = 5)]
    pub cold_threshold: usize,
    /// Negatives per user; 0 ranks against every non-consumed item.
    #[arg(long, default_value_t = 0)]
    pub negatives: usize,
    /// Seed for sampled candidate draws.
    #[arg(long, default_value_t = 42)]
    pub eval_seed: u64,
    #[arg(long, value_enum, default_value_t = TargetArg::Test)]
    pub target: TargetArg,
    #[arg(long, value_enum, default_value_t = TiesArg::Strict)]
    pub ties: TiesArg,
    /// Output directory; defaults to the data directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Prepared data directory.
    pub data_dir: PathBuf,
    /// Comma-separated model list.
    #[arg(long, value_delimiter = ',', default_value = "poprec,bpr,fm,vista,cprec")]
    pub models: Vec<ModelKind>,
    /// Comma-separated embedding dimensions.
    #[arg(long = "k-list", value_delimiter = ',', default_value = "10,20,30,40")]
    pub k_list: Vec<usize>,
    /// Comma-separated λ grid searched per cell.
    #[arg(
        long = "lambda-grid",
        value_delimiter = ',',
        default_value = "0.001,0.01,0.1,1"
    )]
    pub lambda_grid: Vec<f64>,
    #[command(flatten)]
    pub knobs: TrainKnobs,
    /// Negatives per user for the test evaluation; 0 = exact.
    #[arg(long, default_value_t = 0)]
    pub negatives: usize,
    /// Seed for sampled candidate draws.
    #[arg(long, default_value_t = 42)]
    pub eval_seed: u64,
    /// Output directory; defaults to the data directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    /// Prepared data directory.
    pub data_dir: PathBuf,
    /// Output directory; defaults to the data directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 2000)]
    pub users: usize,
    #[arg(long, default_value_t = 10)]
    pub items_per_producer: usize,
    /// Latent dimension of the generator.
    #[arg(long, default_value_t = 8)]
    pub k_true: usize,
    /// Producer-appreciation weight w in [0, 1].
    #[arg(long, default_value_t = 0.5)]
    pub appreciation: f64,
    /// Unlearnable per-(user, item) logit noise.
    #[arg(long, default_value_t = 0.1)]
    pub noise: f64,
    /// Poisson mean of per-user basket size.
    #[arg(long, default_value_t = 30.0)]
    pub mean_actions: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Output directory for interactions.tsv and producers.tsv.
    #[arg(long)]
    pub out: PathBuf,
}

const CONFIG_KEYS: [&str; 8] = [
    "k",
    "lambda",
    "learning_rate",
    "batch_size",
    "max_epochs",
    "patience",
    "seed",
    "val_negatives",
];

fn apply_key(cfg: &mut TrainConfig, key: &str, value: &str, origin: &str) -> Result<()> {
    let bad = |what: &str| Error::ConfigParse {
        path: origin.to_string(),
        line: 0,
        reason: format!("bad {what} value for {key}: {value}"),
    };
    match key {
        "k" => cfg.k = value.parse().map_err(|_| bad("integer"))?,
        "lambda" => cfg.lambda = value.parse().map_err(|_| bad("float"))?,
        "learning_rate" => cfg.learning_rate = value.parse().map_err(|_| bad("float"))?,
        "batch_size" => cfg.batch_size = value.parse().map_err(|_| bad("integer"))?,
        "max_epochs" => cfg.max_epochs = value.parse().map_err(|_| bad("integer"))?,
        "patience" => cfg.patience = value.parse().map_err(|_| bad("integer"))?,
        "seed" => cfg.seed = value.parse().map_err(|_| bad("integer"))?,
        "val_negatives" => cfg.val_negatives = value.parse().map_err(|_| bad("integer"))?,
        other => {
            return Err(Error::ConfigParse {
                path: origin.to_string(),
                line: 0,
                reason: format!("unknown key: {other}"),
            })
        }
    }
    Ok(())
}

fn apply_config_file(cfg: &mut TrainConfig, path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(path)?;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::ConfigParse {
                path: path.display().to_string(),
                line: idx + 1,
                reason: "expected key=value".to_string(),
            });
        };
        apply_key(cfg, key.trim(), value.trim(), &path.display().to_string()).map_err(
            |e| match e {
                Error::ConfigParse { path, reason, .. } => Error::ConfigParse {
                    path,
                    line: idx + 1,
                    reason,
                },
                other => other,
            },
        )?;
    }
    Ok(())
}

fn apply_env(cfg: &mut TrainConfig) -> Result<()> {
    for key in CONFIG_KEYS {
        let var = format!("CPREC_{}", key.to_uppercase());
        if let Ok(value) = std::env::var(&var) {
            apply_key(cfg, key, &value, &var)?;
        }
    }
    Ok(())
}

/// Defaults, then config file, then environment, then flags.
pub fn resolve_train_config(knobs: &TrainKnobs) -> Result<TrainConfig> {
    let mut cfg = TrainConfig::default();
    if let Some(path) = &knobs.config {
        apply_config_file(&mut cfg, path)?;
    }
    apply_env(&mut cfg)?;
    if let Some(k) = knobs.k {
        cfg.k = k;
    }
    if let Some(lambda) = knobs.lambda {
        cfg.lambda = lambda;
    }
    if let Some(lr) = knobs.learning_rate {
        cfg.learning_rate = lr;
    }
    if let Some(batch) = knobs.batch_size {
        cfg.batch_size = batch;
    }
    if let Some(epochs) = knobs.max_epochs {
        cfg.max_epochs = epochs;
    }
    if let Some(patience) = knobs.patience {
        cfg.patience = patience;
    }
    if let Some(seed) = knobs.seed {
        cfg.seed = seed;
    }
    if let Some(n) = knobs.val_negatives {
        cfg.val_negatives = n;
    }
    Ok(cfg)
}

fn config_snapshot(model: &str, cfg: &TrainConfig) -> serde_json::Value {
    serde_json::json!({
        "model": model,
        "k": cfg.k,
        "lambda": cfg.lambda,
        "learning_rate": cfg.learning_rate,
        "batch_size": cfg.batch_size,
        "max_epochs": cfg.max_epochs,
        "patience": cfg.patience,
        "seed": cfg.seed,
        "val_negatives": cfg.val_negatives,
    })
}

fn load_prepared(dir: &Path) -> Result<(Dataset, crate::data::Split)> {
    let dataset = read_dataset(dir)?;
    let split = read_split(dir, &dataset)?;
    Ok((dataset, split))
}

fn cmd_prepare(args: &PrepareArgs) -> Result<()> {
    let mut manifest = RunManifest::new("prepare");
    manifest.add_seed("split", args.seed);
    manifest.add_input(&args.interactions)?;
    manifest.add_input(&args.producers)?;

    let interactions = read_interactions(&args.interactions)?;
    let producers = read_producers(&args.producers)?;
    let raw = Dataset::ingest(interactions, producers)?;
    let filtered = raw.filter_inactive(args.min_actions, args.fixpoint)?;
    let split = filtered.split_leave_one_out(args.seed);

    std::fs::create_dir_all(&args.out)?;
    write_dataset(&args.out, &filtered)?;
    let meta = SplitMeta {
        seed: args.seed,
        min_actions: args.min_actions,
        fixpoint: args.fixpoint,
    };
    write_split(&args.out, &filtered, &split, &meta)?;

    let stats = filtered.corpus_stats();
    print!("{}", stats.render_table("prepared"));

    manifest.config = serde_json::json!({
        "min_actions": args.min_actions,
        "fixpoint": args.fixpoint,
        "seed": args.seed,
    });
    for file in [
        io::INTERACTIONS_FILE,
        io::PRODUCERS_FILE,
        io::TRAIN_FILE,
        io::VAL_FILE,
        io::TEST_FILE,
        io::SPLIT_META_FILE,
    ] {
        manifest.add_output(&args.out.join(file))?;
    }
    manifest.finish_and_write(&args.out.join(MANIFEST_FILE))?;
    Ok(())
}

fn cmd_train(args: &TrainArgs) -> Result<()> {
    let cfg = resolve_train_config(&args.knobs)?;
    let out_dir = args.out.as_deref().unwrap_or(&args.data_dir);
    let mut manifest = RunManifest::new("train");
    manifest.config = config_snapshot(&args.model.to_string(), &cfg);
    manifest.add_seed("train", cfg.seed);
    for file in [
        io::INTERACTIONS_FILE,
        io::PRODUCERS_FILE,
        io::TRAIN_FILE,
        io::VAL_FILE,
        io::TEST_FILE,
    ] {
        manifest.add_input(&args.data_dir.join(file))?;
    }

    let (dataset, split) = load_prepared(&args.data_dir)?;
    let (params, report) = train(&dataset, &split, args.model, &cfg)?;

    std::fs::create_dir_all(out_dir)?;
    let ckpt_path = out_dir.join(CHECKPOINT_FILE);
    save_checkpoint(&ckpt_path, &params, cfg.seed)?;
    let report_path = out_dir.join(TRAIN_REPORT_FILE);
    std::fs::write(&report_path, report.to_csv())?;

    let best = report
        .best_epoch
        .map(|e| e.to_string())
        .unwrap_or_else(|| "none".to_string());
    println!(
        "trained {} for {} epochs (best epoch {best})",
        args.model,
        report.epochs.len()
    );

    manifest.add_output(&ckpt_path)?;
    manifest.add_output(&report_path)?;
    manifest.finish_and_write(&out_dir.join(MANIFEST_FILE))?;
    Ok(())
}

fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let out_dir = args.out.as_deref().unwrap_or(&args.data_dir);
    let ckpt_path = args
        .checkpoint
        .clone()
        .unwrap_or_else(|| args.data_dir.join(CHECKPOINT_FILE));
    let mut manifest = RunManifest::new("eval");
    manifest.add_seed("eval", args.eval_seed);
    for file in [
        io::INTERACTIONS_FILE,
        io::PRODUCERS_FILE,
        io::TRAIN_FILE,
        io::VAL_FILE,
        io::TEST_FILE,
    ] {
        manifest.add_input(&args.data_dir.join(file))?;
    }
    manifest.add_input(&ckpt_path)?;

    let (dataset, split) = load_prepared(&args.data_dir)?;
    let (params, _) = load_checkpoint(&ckpt_path)?;
    if params.n_items() != dataset.n_items()
        || params.n_users().is_some_and(|n| n != dataset.n_users())
    {
        return Err(Error::DimensionMismatch {
            context: format!(
                "checkpoint shaped for {:?} users x {} items, data has {} x {}",
                params.n_users(),
                params.n_items(),
                dataset.n_users(),
                dataset.n_items()
            ),
        });
    }

    let opts = EvalOptions {
        target: match args.target {
            TargetArg::Test => EvalTarget::Test,
            TargetArg::Val => EvalTarget::Validation,
        },
        cold_threshold: args.cold_threshold,
        mode: if args.negatives == 0 {
            EvalMode::Exact
        } else {
            EvalMode::Sampled {
                n_negatives: args.negatives,
                seed: args.eval_seed,
            }
        },
        ties: match args.ties {
            TiesArg::Strict => TiePolicy::Strict,
            TiesArg::Half => TiePolicy::Half,
        },
    };
    let report = evaluate_model(&params, &dataset, &split, &opts)?;
    print!("{}", report.render());

    std::fs::create_dir_all(out_dir)?;
    let report_path = out_dir.join(EVAL_REPORT_FILE);
    std::fs::write(&report_path, report.render())?;

    manifest.config = serde_json::json!({
        "cold_threshold": args.cold_threshold,
        "negatives": args.negatives,
        "eval_seed": args.eval_seed,
        "target": format!("{:?}", args.target),
        "ties": format!("{:?}", args.ties),
    });
    manifest.add_output(&report_path)?;
    manifest.finish_and_write(&out_dir.join(MANIFEST_FILE))?;
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let cfg = resolve_train_config(&args.knobs)?;
    let out_dir = args.out.as_deref().unwrap_or(&args.data_dir);
    let mut manifest = RunManifest::new("sweep");
    manifest.add_seed("train", cfg.seed);
    manifest.add_seed("eval", args.eval_seed);
    for file in [
        io::INTERACTIONS_FILE,
        io::PRODUCERS_FILE,
        io::TRAIN_FILE,
        io::VAL_FILE,
        io::TEST_FILE,
    ] {
        manifest.add_input(&args.data_dir.join(file))?;
    }

    let (dataset, split) = load_prepared(&args.data_dir)?;
    let eval_opts = EvalOptions {
        mode: if args.negatives == 0 {
            EvalMode::Exact
        } else {
            EvalMode::Sampled {
                n_negatives: args.negatives,
                seed: args.eval_seed,
            }
        },
        ..EvalOptions::default()
    };
    let table = k_sweep(
        &dataset,
        &split,
        &args.models,
        &args.k_list,
        &cfg,
        &args.lambda_grid,
        &eval_opts,
    );
    print!("{}", table.to_csv());
    for row in &table.rows {
        if let Some(err) = &row.error {
            eprintln!("cell {} K={} failed: {err}", row.model, row.k);
        }
    }

    std::fs::create_dir_all(out_dir)?;
    let sweep_path = out_dir.join(SWEEP_FILE);
    std::fs::write(&sweep_path, table.to_csv())?;

    let mut config = config_snapshot("sweep", &cfg);
    config["models"] = serde_json::json!(args
        .models
        .iter()
        .map(|m| m.to_string())
        .collect::<Vec<_>>());
    config["k_list"] = serde_json::json!(args.k_list);
    config["lambda_grid"] = serde_json::json!(args.lambda_grid);
    config["negatives"] = serde_json::json!(args.negatives);
    manifest.config = config;
    manifest.add_output(&sweep_path)?;
    manifest.finish_and_write(&out_dir.join(MANIFEST_FILE))?;
    Ok(())
}

fn cmd_stats(args: &StatsArgs) -> Result<()> {
    let out_dir = args.out.as_deref().unwrap_or(&args.data_dir);
    let mut manifest = RunManifest::new("stats");
    for file in [io::INTERACTIONS_FILE, io::PRODUCERS_FILE] {
        manifest.add_input(&args.data_dir.join(file))?;
    }

    let dataset = read_dataset(&args.data_dir)?;
    let stats = dataset.corpus_stats();
    let table = stats.render_table("corpus");
    print!("{table}");

    std::fs::create_dir_all(out_dir)?;
    let stats_path = out_dir.join(io::STATS_FILE);
    std::fs::write(&stats_path, &table)?;
    let scatter_path = out_dir.join(io::SCATTER_FILE);
    write_scatter(&scatter_path, &stats)?;

    manifest.add_output(&stats_path)?;
    manifest.add_output(&scatter_path)?;
    manifest.finish_and_write(&out_dir.join(MANIFEST_FILE))?;
    Ok(())
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let cfg = SynthConfig {
        n_users: args.users,
        n_items_per_producer: args.items_per_producer,
        k_true: args.k_true,
        appreciation_weight: args.appreciation,
        noise: args.noise,
        mean_actions: args.mean_actions,
        seed: args.seed,
    };
    let mut manifest = RunManifest::new("synth");
    manifest.add_seed("synth", cfg.seed);
    manifest.config = serde_json::json!({
        "n_users": cfg.n_users,
        "n_items_per_producer": cfg.n_items_per_producer,
        "k_true": cfg.k_true,
        "appreciation_weight": cfg.appreciation_weight,
        "noise": cfg.noise,
        "mean_actions": cfg.mean_actions,
        "seed": cfg.seed,
    });

    let dataset = generate_synthetic(&cfg);
    std::fs::create_dir_all(&args.out)?;
    write_dataset(&args.out, &dataset)?;

    let stats = dataset.corpus_stats();
    print!("{}", stats.render_table("synthetic"));
    let mut spread = 0.0;
    for items in dataset.all_positives() {
        let mut producers: Vec<usize> =
            items.iter().map(|&i| dataset.producer_of()[i]).collect();
        producers.sort_unstable();
        producers.dedup();
        spread += producers.len() as f64 / items.len() as f64;
    }
    println!(
        "distinct-producer share of the mean basket: {:.4}",
        spread / dataset.n_users() as f64
    );

    manifest.add_output(&args.out.join(io::INTERACTIONS_FILE))?;
    manifest.add_output(&args.out.join(io::PRODUCERS_FILE))?;
    manifest.finish_and_write(&args.out.join(MANIFEST_FILE))?;
    Ok(())
}

/// Dispatches a parsed command line. Separated from `main` so tests can
/// drive the real command path in-process.
pub fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        // Ignore the error if a pool already exists (tests call run twice).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match &cli.command {
        Command::Prepare(args) => cmd_prepare(args),
        Command::Train(args) => cmd_train(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Synth(args) => cmd_synth(args),
    }
}

/// Binary entry point: parse, run, map errors to documented exit codes.
pub fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
