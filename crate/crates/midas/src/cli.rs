//! Command-line entry point: dataset generation, augmentation, training,
//! evaluation, analyses, and the four-mode ablation suite.
//!
//! Every subcommand writes its resolved configuration to `run.json` in the
//! output directory before producing anything else, so a run directory is
//! self-describing and re-executing with the same flags reproduces it
//! byte for byte.
//!
//! Exit codes: 0 on success, 2 for usage and configuration errors, 1 for
//! data and I/O errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::label::SoftLabel;
use crate::metrics;
use crate::mixing::{midas_batch, LabelMode};
use crate::sampling::RngStream;
use crate::synthdata::{
    gen_dataset, read_dataset, write_dataset, Dataset, DatasetSample, Provenance, Split,
    SynthConfig,
};
use crate::trainer::{self, TrainConfig, TrainMode, TinyClassifier};

const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(name = "midas", version, about = "Soft-label video mixing toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for all randomness (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// TOML file providing defaults (currently `seed`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Suppress progress output.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic ambiguous-clip dataset.
    GenSynth(GenSynthArgs),
    /// Mix an existing dataset into augmented samples.
    Augment(AugmentArgs),
    /// Train a classifier on a dataset directory.
    Train(TrainArgs),
    /// Evaluate a saved model and emit a report.
    Eval(EvalArgs),
    /// Dataset analyses: coexistence ratios and the ambiguity split.
    Analyze {
        #[command(subcommand)]
        what: AnalyzeCommand,
    },
    /// Train all four label modes over several seeds and tabulate them.
    Ablation(AblationArgs),
}

#[derive(Debug, Args, Serialize)]
struct GenSynthArgs {
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 7)]
    classes: usize,
    #[arg(long, default_value_t = 10)]
    annotators: usize,
    #[arg(long, default_value_t = 8)]
    frames: usize,
    #[arg(long, default_value_t = 16)]
    height: usize,
    #[arg(long, default_value_t = 16)]
    width: usize,
    #[arg(long, default_value_t = 1)]
    channels: usize,
    #[arg(long, default_value_t = 600)]
    train: usize,
    #[arg(long, default_value_t = 200)]
    test: usize,
    /// Mixture concentration in [0, 1].
    #[arg(long, default_value_t = 0.6)]
    ambiguity: f64,
    #[arg(long, default_value_t = 0.10)]
    noise_sigma: f64,
}

#[derive(Debug, Args, Serialize)]
struct AugmentArgs {
    /// Source dataset directory.
    #[arg(long)]
    data: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Beta distribution shape.
    #[arg(long, default_value_t = 0.4)]
    alpha: f64,
    /// Mix soft labels or one-hot argmax labels.
    #[arg(long, value_enum, default_value_t = LabelMode::Soft)]
    label_mode: LabelMode,
    /// Skip softmax normalization of combined labels.
    #[arg(long)]
    no_normalize: bool,
    /// Number of samples to generate (defaults to the train split size).
    #[arg(long)]
    count: Option<usize>,
}

/// Training hyperparameters shared by `train` and `ablation`.
#[derive(Debug, Args, Serialize)]
struct TrainOpts {
    #[arg(long, default_value_t = 0.4)]
    alpha: f64,
    #[arg(long, default_value_t = 0.02)]
    lr: f64,
    #[arg(long, default_value_t = 0.9)]
    momentum: f64,
    #[arg(long, default_value_t = 50)]
    epochs: usize,
    #[arg(long, default_value_t = 8)]
    batch_size: usize,
    #[arg(long, default_value_t = 0.5)]
    dropout: f64,
    /// Skip softmax normalization of combined labels in mixed modes.
    #[arg(long)]
    no_normalize: bool,
    /// Mix one fixed augmented set up front instead of fresh batches
    /// every epoch (mixed modes only).
    #[arg(long)]
    pregenerate: bool,
    #[arg(long, default_value_t = 64)]
    hidden: usize,
    /// Spatial pooling target per frame.
    #[arg(long, default_value_t = 8)]
    pool: usize,
    /// Temporal segments fed to the model.
    #[arg(long, default_value_t = 8)]
    segments: usize,
}

impl TrainOpts {
    fn to_config(&self, mode: TrainMode, seed: u64) -> TrainConfig {
        TrainConfig {
            lr0: self.lr,
            momentum: self.momentum,
            epochs: self.epochs,
            batch_size: self.batch_size,
            dropout_rate: self.dropout,
            alpha: self.alpha,
            mode,
            normalize: !self.no_normalize,
            pregenerate: self.pregenerate,
            seed,
            hidden_dim: self.hidden,
            pool: self.pool,
            num_segments: self.segments,
        }
    }
}

#[derive(Debug, Args, Serialize)]
struct TrainArgs {
    /// Dataset directory.
    #[arg(long)]
    data: PathBuf,
    /// Output directory (model.midm, history.csv).
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = TrainMode::Soft)]
    mode: TrainMode,
    #[command(flatten)]
    opts: TrainOpts,
}

#[derive(Debug, Args, Serialize)]
struct EvalArgs {
    /// Model file.
    #[arg(long)]
    model: PathBuf,
    /// Dataset directory.
    #[arg(long)]
    data: PathBuf,
    /// Output directory (report.json, report.txt).
    #[arg(long)]
    out: PathBuf,
    /// Which split to evaluate.
    #[arg(long, value_enum, default_value_t = SplitArg::Test)]
    split: SplitArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SplitArg {
    Train,
    Test,
    All,
}

#[derive(Debug, Subcommand)]
enum AnalyzeCommand {
    /// Per-class mean soft label matrix.
    Coexist(AnalyzeCoexistArgs),
    /// Clear/mixed ambiguity split, optionally distribution-matched.
    Split(AnalyzeSplitArgs),
}

#[derive(Debug, Args, Serialize)]
struct AnalyzeCoexistArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct AnalyzeSplitArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Clear group = samples with max soft probability strictly above this.
    #[arg(long, default_value_t = 0.9)]
    threshold: f64,
    /// Resample both groups to this size, matching the source dataset's
    /// per-class distribution by oversampling and down-sampling.
    #[arg(long)]
    match_size: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
struct AblationArgs {
    /// Output directory (ablation.csv, dataset/ when generated).
    #[arg(long)]
    out: PathBuf,
    /// Existing dataset directory; a default synthetic set is generated
    /// when omitted.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Training seeds, one full run of every mode each.
    #[arg(long, value_delimiter = ',', default_values_t = vec![101u64, 102, 103, 104, 105])]
    seeds: Vec<u64>,
    #[command(flatten)]
    opts: TrainOpts,
}

/// Resolved invocation, captured verbatim as `run.json`.
#[derive(Debug, Serialize)]
pub struct RunConfig {
    pub tool_version: String,
    pub subcommand: String,
    pub seed: u64,
    pub quiet: bool,
    pub args: serde_json::Value,
}

/// Entry point used by the binary.
pub fn run_from_env() -> i32 {
    run(std::env::args_os())
}

/// Parses arguments and executes one subcommand.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };

    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::InvalidParameter(_) => 2,
                _ => 1,
            }
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    let seed = resolve_seed(cli.seed, cli.config.as_deref())?;
    let quiet = cli.quiet;
    match cli.command {
        Command::GenSynth(args) => cmd_gen_synth(args, seed, quiet),
        Command::Augment(args) => cmd_augment(args, seed, quiet),
        Command::Train(args) => cmd_train(args, seed, quiet),
        Command::Eval(args) => cmd_eval(args, seed, quiet),
        Command::Analyze { what } => match what {
            AnalyzeCommand::Coexist(args) => cmd_analyze_coexist(args, seed, quiet),
            AnalyzeCommand::Split(args) => cmd_analyze_split(args, seed, quiet),
        },
        Command::Ablation(args) => cmd_ablation(args, seed, quiet),
    }
}

/// Seed precedence: `--seed` flag, then the config file, then 42.
fn resolve_seed(flag: Option<u64>, config: Option<&Path>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Some(path) = config {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let table: toml::Table = text
            .parse()
            .map_err(|e| Error::Config(format!("config file {}: {e}", path.display())))?;
        if let Some(v) = table.get("seed") {
            let s = v
                .as_integer()
                .filter(|s| *s >= 0)
                .ok_or_else(|| Error::Config(format!("config file seed must be a u64, got {v}")))?;
            return Ok(s as u64);
        }
    }
    Ok(DEFAULT_SEED)
}

/// Creates the output directory and records the resolved invocation before
/// any other output is produced.
fn write_run_config(
    out: &Path,
    subcommand: &str,
    seed: u64,
    quiet: bool,
    args: &impl Serialize,
) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let run = RunConfig {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        subcommand: subcommand.to_string(),
        seed,
        quiet,
        args: serde_json::to_value(args)
            .map_err(|e| Error::Validation(format!("run config encode: {e}")))?,
    };
    let path = out.join("run.json");
    let text = serde_json::to_string_pretty(&run)
        .map_err(|e| Error::Validation(format!("run config encode: {e}")))?;
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
}

fn cmd_gen_synth(args: GenSynthArgs, seed: u64, quiet: bool) -> Result<()> {
    let config = SynthConfig {
        classes: args.classes,
        annotators: args.annotators,
        frames: args.frames,
        height: args.height,
        width: args.width,
        channels: args.channels,
        n_train: args.train,
        n_test: args.test,
        ambiguity: args.ambiguity,
        noise_sigma: args.noise_sigma,
        seed,
    };
    config.validate()?;
    write_run_config(&args.out, "gen-synth", seed, quiet, &args)?;
    let dataset = gen_dataset(&config)?;
    write_dataset(&dataset, &args.out)?;
    if !quiet {
        println!(
            "wrote {} samples ({} train / {} test) to {}",
            dataset.len(),
            config.n_train,
            config.n_test,
            args.out.display()
        );
    }
    Ok(())
}

fn cmd_augment(args: AugmentArgs, seed: u64, quiet: bool) -> Result<()> {
    write_run_config(&args.out, "augment", seed, quiet, &args)?;
    let source = read_dataset(&args.data)?;
    let train_items = source.split_items(Split::Train);
    let count = args.count.unwrap_or(train_items.len());
    let rng = RngStream::new(seed).derive_named("augment");
    let mixed = midas_batch(
        &train_items,
        count,
        args.alpha,
        args.label_mode,
        !args.no_normalize,
        &rng,
    )?;
    let samples: Vec<DatasetSample> = mixed
        .into_iter()
        .enumerate()
        .map(|(k, m)| {
            Ok(DatasetSample {
                item: crate::label::LabeledClip::new(
                    format!("aug-{k:05}"),
                    m.clip,
                    m.label,
                    None,
                    None,
                )?,
                split: Split::Train,
                provenance: Some(Provenance {
                    source_i: m.source_i,
                    source_j: m.source_j,
                    lambda: m.lambda.lambda(),
                }),
            })
        })
        .collect::<Result<_>>()?;
    let augmented = Dataset { samples };
    write_dataset(&augmented, &args.out)?;
    if !quiet {
        println!(
            "wrote {count} mixed samples from {} sources to {}",
            train_items.len(),
            args.out.display()
        );
    }
    Ok(())
}

fn cmd_train(args: TrainArgs, seed: u64, quiet: bool) -> Result<()> {
    let config = args.opts.to_config(args.mode, seed);
    config.validate()?;
    write_run_config(&args.out, "train", seed, quiet, &args)?;
    let dataset = read_dataset(&args.data)?;
    let (model, history) = trainer::train(&dataset, &config)?;
    let model_path = args.out.join("model.midm");
    model.save(&model_path)?;
    let history_path = args.out.join("history.csv");
    std::fs::write(&history_path, history.to_csv())
        .map_err(|e| Error::io(&history_path, e))?;
    if !quiet {
        if let Some(last) = history.epochs.last() {
            println!(
                "trained {} epochs (mode {}): loss {:.4}, train UAR {:.4}, train WAR {:.4}",
                history.epochs.len(),
                config.mode.as_str(),
                last.loss,
                last.train_uar,
                last.train_war
            );
        }
        println!("model written to {}", model_path.display());
    }
    Ok(())
}

fn cmd_eval(args: EvalArgs, seed: u64, quiet: bool) -> Result<()> {
    write_run_config(&args.out, "eval", seed, quiet, &args)?;
    let model = TinyClassifier::load(&args.model)?;
    let dataset = read_dataset(&args.data)?;
    let items = match args.split {
        SplitArg::Train => dataset.split_items(Split::Train),
        SplitArg::Test => dataset.split_items(Split::Test),
        SplitArg::All => dataset.all_items(),
    };
    let report = trainer::evaluate(&model, &items)?;
    let json_path = args.out.join("report.json");
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::Validation(format!("report encode: {e}")))?;
    std::fs::write(&json_path, json + "\n").map_err(|e| Error::io(&json_path, e))?;
    let txt_path = args.out.join("report.txt");
    std::fs::write(&txt_path, report.text_table()).map_err(|e| Error::io(&txt_path, e))?;
    if !quiet {
        print!("{}", report.text_table());
    }
    Ok(())
}

fn cmd_analyze_coexist(args: AnalyzeCoexistArgs, seed: u64, quiet: bool) -> Result<()> {
    write_run_config(&args.out, "analyze-coexist", seed, quiet, &args)?;
    let dataset = read_dataset(&args.data)?;
    let labels: Vec<&SoftLabel> = dataset.samples.iter().map(|s| &s.item.soft).collect();
    let matrix = metrics::coexistence_matrix(&labels)?;
    let classes = matrix.len();

    let mut csv = String::from("class");
    for c in 0..classes {
        csv.push_str(&format!(",c{c}"));
    }
    csv.push('\n');
    for (c, row) in matrix.iter().enumerate() {
        csv.push_str(&c.to_string());
        match row {
            Some(values) => {
                for v in values {
                    csv.push_str(&format!(",{v}"));
                }
            }
            None => {
                // Class absent from the dataset: empty cells.
                csv.push_str(&",".repeat(classes));
            }
        }
        csv.push('\n');
    }
    let path = args.out.join("coexistence.csv");
    std::fs::write(&path, csv).map_err(|e| Error::io(&path, e))?;
    if !quiet {
        println!("coexistence matrix written to {}", path.display());
    }
    Ok(())
}

fn cmd_analyze_split(args: AnalyzeSplitArgs, seed: u64, quiet: bool) -> Result<()> {
    write_run_config(&args.out, "analyze-split", seed, quiet, &args)?;
    let dataset = read_dataset(&args.data)?;
    let labels: Vec<&SoftLabel> = dataset.samples.iter().map(|s| &s.item.soft).collect();
    let (clear, mixed) = metrics::split_by_ambiguity(&labels, args.threshold)?;

    let (clear_out, mixed_out) = match args.match_size {
        None => (clear.clone(), mixed.clone()),
        Some(size) => {
            // Match each group's class distribution to the source dataset.
            let targets = apportion_counts(&labels, size);
            let root = RngStream::new(seed).derive_named("resample");
            let clear_labels: Vec<&SoftLabel> = clear.iter().map(|&i| labels[i]).collect();
            let mixed_labels: Vec<&SoftLabel> = mixed.iter().map(|&i| labels[i]).collect();
            let clear_picked =
                metrics::resample_to_distribution(&clear_labels, &targets, &mut root.derive(0))?;
            let mixed_picked =
                metrics::resample_to_distribution(&mixed_labels, &targets, &mut root.derive(1))?;
            (
                clear_picked.into_iter().map(|i| clear[i]).collect(),
                mixed_picked.into_iter().map(|i| mixed[i]).collect(),
            )
        }
    };

    for (name, indices) in [("clear.csv", &clear_out), ("mixed.csv", &mixed_out)] {
        let mut csv = String::from("id,max_prob,argmax_class\n");
        for &i in indices.iter() {
            let s = &dataset.samples[i];
            csv.push_str(&format!(
                "{},{},{}\n",
                s.item.id,
                s.item.soft.max_prob(),
                s.item.soft.argmax()
            ));
        }
        let path = args.out.join(name);
        std::fs::write(&path, csv).map_err(|e| Error::io(&path, e))?;
    }
    let summary = serde_json::json!({
        "threshold": args.threshold,
        "total": labels.len(),
        "clear": clear.len(),
        "mixed": mixed.len(),
        "emitted_clear": clear_out.len(),
        "emitted_mixed": mixed_out.len(),
        "match_size": args.match_size,
    });
    let path = args.out.join("split_summary.json");
    std::fs::write(&path, serde_json::to_string_pretty(&summary).unwrap() + "\n")
        .map_err(|e| Error::io(&path, e))?;
    if !quiet {
        println!(
            "clear {} / mixed {} (threshold {}), manifests in {}",
            clear_out.len(),
            mixed_out.len(),
            args.threshold,
            args.out.display()
        );
    }
    Ok(())
}

/// Splits `total` across classes proportionally to the argmax distribution
/// of `labels`, largest remainders first, so the counts sum to `total`.
fn apportion_counts(labels: &[&SoftLabel], total: usize) -> Vec<usize> {
    let classes = labels.first().map_or(0, |l| l.num_classes());
    let mut class_counts = vec![0usize; classes];
    for l in labels {
        class_counts[l.argmax()] += 1;
    }
    let n = labels.len() as f64;
    let shares: Vec<f64> = class_counts
        .iter()
        .map(|&c| c as f64 / n * total as f64)
        .collect();
    let mut counts: Vec<usize> = shares.iter().map(|s| s.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..classes).collect();
    order.sort_by(|&a, &b| {
        let ra = shares[a] - shares[a].floor();
        let rb = shares[b] - shares[b].floor();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for c in order.into_iter().cycle().take(total - assigned) {
        counts[c] += 1;
    }
    counts
}

/// One training run's test-set scores.
#[derive(Debug, Clone, Serialize)]
pub struct AblationRow {
    pub mode: TrainMode,
    pub seed: u64,
    pub uar: f64,
    pub war: f64,
}

/// Per-seed rows and per-mode medians for the four label regimes.
#[derive(Debug, Clone, Serialize)]
pub struct AblationSummary {
    pub rows: Vec<AblationRow>,
    /// `(mode, median uar, median war)` in row order.
    pub medians: Vec<(TrainMode, f64, f64)>,
}

impl AblationSummary {
    pub fn median_uar(&self, mode: TrainMode) -> Option<f64> {
        self.medians
            .iter()
            .find(|(m, _, _)| *m == mode)
            .map(|(_, uar, _)| *uar)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("mode,seed,uar,war\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.mode.as_str(),
                row.seed,
                row.uar,
                row.war
            ));
        }
        for (mode, uar, war) in &self.medians {
            out.push_str(&format!("{},median,{},{}\n", mode.as_str(), uar, war));
        }
        out
    }
}

const ABLATION_MODES: [TrainMode; 4] = [
    TrainMode::Hard,
    TrainMode::Soft,
    TrainMode::MidasHard,
    TrainMode::MidasSoft,
];

/// Trains every mode on every seed and scores the test split.
///
/// Runs are independent and execute in parallel; results are ordered mode
/// first, seed second, so the output is the same regardless of scheduling.
pub fn ablation_suite(
    dataset: &Dataset,
    seeds: &[u64],
    base: &TrainConfig,
) -> Result<AblationSummary> {
    if seeds.is_empty() {
        return Err(Error::Config("ablation needs at least one seed".into()));
    }
    let test_items = dataset.split_items(Split::Test);
    if test_items.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }

    let configs: Vec<(TrainMode, u64)> = ABLATION_MODES
        .iter()
        .flat_map(|&mode| seeds.iter().map(move |&seed| (mode, seed)))
        .collect();
    let rows: Vec<AblationRow> = configs
        .par_iter()
        .map(|&(mode, seed)| {
            let config = TrainConfig {
                mode,
                seed,
                ..base.clone()
            };
            let (model, _) = trainer::train(dataset, &config)?;
            let report = trainer::evaluate(&model, &test_items)?;
            Ok(AblationRow {
                mode,
                seed,
                uar: report.uar,
                war: report.war,
            })
        })
        .collect::<Result<_>>()?;

    let medians = ABLATION_MODES
        .iter()
        .map(|&mode| {
            let uars: Vec<f64> = rows
                .iter()
                .filter(|r| r.mode == mode)
                .map(|r| r.uar)
                .collect();
            let wars: Vec<f64> = rows
                .iter()
                .filter(|r| r.mode == mode)
                .map(|r| r.war)
                .collect();
            (mode, median(&uars), median(&wars))
        })
        .collect();

    Ok(AblationSummary { rows, medians })
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn cmd_ablation(args: AblationArgs, seed: u64, quiet: bool) -> Result<()> {
    let base = args.opts.to_config(TrainMode::Soft, seed);
    base.validate()?;
    if args.opts.batch_size < 2 {
        return Err(Error::Config(
            "ablation trains mixed modes; batch size must be at least 2".into(),
        ));
    }
    write_run_config(&args.out, "ablation", seed, quiet, &args)?;

    let dataset = match &args.data {
        Some(dir) => read_dataset(dir)?,
        None => {
            let config = SynthConfig {
                seed,
                ..SynthConfig::default()
            };
            let ds = gen_dataset(&config)?;
            write_dataset(&ds, &args.out.join("dataset"))?;
            ds
        }
    };

    let summary = ablation_suite(&dataset, &args.seeds, &base)?;
    let path = args.out.join("ablation.csv");
    std::fs::write(&path, summary.to_csv()).map_err(|e| Error::io(&path, e))?;
    if !quiet {
        for (mode, uar, war) in &summary.medians {
            println!("{:<11} median UAR {:.4}  WAR {:.4}", mode.as_str(), uar, war);
        }
        println!("table written to {}", path.display());
    }
    Ok(())
}
