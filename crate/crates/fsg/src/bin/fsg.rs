//! Thin command-line front end over the `fsg` library.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal
//! error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use fsg::experiment::{
    emit_report, run_experiment, DataSource, ExperimentConfig, ReportFormat,
};
use fsg::io;
use fsg::stacking::{performance, KPolicy};
use fsg::synthetic::{generate_dataset, FixtureName, OmegaFixture};
use fsg::{Error, FsgModel, RngSeed};

#[derive(Parser)]
#[command(
    name = "fsg",
    about = "Fuzzy stacked generalization: train, classify, and benchmark a two-layer fuzzy k-NN ensemble",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic fixture dataset and write it as CSV files.
    Generate(GenerateArgs),
    /// Train a model on a full dataset and save it to disk.
    Train(TrainArgs),
    /// Classify samples with a saved model.
    Classify(ClassifyArgs),
    /// Run the full repeated experiment and emit reports.
    Evaluate(EvaluateArgs),
    /// Standalone entropy analysis of decision and fusion spaces.
    Entropy(EvaluateArgs),
    /// Print a summary of a saved model.
    InspectModel(InspectArgs),
}

/// Where the samples come from; shared by train/evaluate/entropy.
#[derive(Args)]
struct DataArgs {
    /// Fixture name (e.g. avecorr_1.0, twoclass_geom) or, in
    /// multi-attribute mode, a single CSV file.
    #[arg(long)]
    dataset: Option<String>,
    /// One CSV file per feature space (repeatable; multi-feature mode).
    #[arg(long)]
    features: Vec<PathBuf>,
    /// Label file for multi-feature mode (id,label rows).
    #[arg(long)]
    labels: Option<PathBuf>,
    /// multi-feature | multi-attribute
    #[arg(long, default_value = "multi-feature")]
    mode: String,
    /// Label column name for multi-attribute mode.
    #[arg(long, default_value = "label")]
    label_column: String,
    /// Samples per class when generating from a fixture.
    #[arg(long, default_value_t = 250)]
    per_class_n: usize,
}

#[derive(Args)]
struct ModelArgs {
    /// Fuzzifier exponent.
    #[arg(long, default_value_t = 2.0)]
    phi: f64,
    /// Neighbor count: an integer or "auto" for cross-validated search.
    #[arg(long, default_value = "auto")]
    k: String,
    /// Override the meta-layer neighbor count.
    #[arg(long)]
    meta_k: Option<usize>,
}

#[derive(Args)]
struct GenerateArgs {
    /// Fixture name to generate.
    #[arg(long)]
    dataset: String,
    #[arg(long, default_value_t = 250)]
    per_class_n: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Output directory for the CSV files.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Path for the saved model (JSON).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Saved model from `fsg train`.
    #[arg(long)]
    model: PathBuf,
    /// One CSV file per feature space, matching the model's layout.
    #[arg(long)]
    features: Vec<PathBuf>,
    /// Optional label file; when given, accuracy is reported.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Output CSV of predictions (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 0.5)]
    train_fraction: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Number of repetitions.
    #[arg(long, default_value_t = 10)]
    reps: usize,
    /// Histogram bin count for the entropy section.
    #[arg(long, default_value_t = 32)]
    bins: usize,
    /// Report stem; writes {out}.json, {out}.txt/tsv, and plot files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Human-readable table style: text | table
    #[arg(long, default_value = "text")]
    format: String,
    /// Worker thread cap (defaults to all cores).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct InspectArgs {
    #[arg(long)]
    model: PathBuf,
}

/// Errors carrying their process exit code.
enum CliError {
    Usage(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        CliError::Lib(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn exit_code(e: &CliError) -> u8 {
    match e {
        CliError::Usage(_) => 1,
        CliError::Lib(err) => match err {
            Error::InvalidParameter(_) | Error::UnknownFixture(_) => 1,
            Error::DataFile { .. }
            | Error::Csv(_)
            | Error::InvalidDataset(_)
            | Error::DimensionMismatch { .. }
            | Error::InsufficientData { .. }
            | Error::Io(_) => 2,
            Error::Json(_) | Error::NotPositiveDefinite => 3,
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(msg) => eprintln!("error: {msg}"),
                CliError::Lib(err) => eprintln!("error: {err}"),
            }
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Generate(args) => generate(args),
        Command::Train(args) => train(args),
        Command::Classify(args) => classify(args),
        Command::Evaluate(args) => evaluate(args, false),
        Command::Entropy(args) => evaluate(args, true),
        Command::InspectModel(args) => inspect(args),
    }
}

fn parse_k_policy(model: &ModelArgs) -> CliResult<KPolicy> {
    if model.k == "auto" {
        Ok(KPolicy::Auto)
    } else {
        let k: usize = model
            .k
            .parse()
            .map_err(|_| usage(format!("--k must be a positive integer or 'auto', got '{}'", model.k)))?;
        if k == 0 {
            return Err(usage("--k must be at least 1"));
        }
        Ok(KPolicy::Fixed(k))
    }
}

fn data_source(data: &DataArgs) -> CliResult<DataSource> {
    if !data.features.is_empty() {
        if data.mode != "multi-feature" {
            return Err(usage("--features implies --mode multi-feature"));
        }
        let labels_path = data
            .labels
            .clone()
            .ok_or_else(|| usage("multi-feature mode needs --labels"))?;
        return Ok(DataSource::MultiFeature { feature_paths: data.features.clone(), labels_path });
    }
    let dataset = data
        .dataset
        .as_ref()
        .ok_or_else(|| usage("provide --dataset, or --features with --labels"))?;
    if let Ok(name) = FixtureName::from_str(dataset) {
        return Ok(DataSource::Fixture { name, per_class_n: data.per_class_n });
    }
    match data.mode.as_str() {
        "multi-attribute" => Ok(DataSource::MultiAttribute {
            path: PathBuf::from(dataset),
            label_column: data.label_column.clone(),
        }),
        "multi-feature" => Err(usage(format!(
            "'{dataset}' is not a known fixture; multi-feature files go through --features/--labels"
        ))),
        other => Err(usage(format!("unknown mode '{other}'"))),
    }
}

fn load_labeled(data: &DataArgs, seed: RngSeed) -> CliResult<(fsg::LabeledDataset, Vec<String>)> {
    match data_source(data)? {
        DataSource::Fixture { name, per_class_n } => {
            let fixture = OmegaFixture::load(name);
            let dataset = generate_dataset(&fixture.spec(per_class_n), seed)?;
            let names = (0..dataset.num_classes).map(|c| c.to_string()).collect();
            Ok((dataset, names))
        }
        DataSource::MultiFeature { feature_paths, labels_path } => {
            Ok(io::load_multi_feature(&feature_paths, &labels_path)?)
        }
        DataSource::MultiAttribute { path, label_column } => {
            Ok(io::load_multi_attribute(&path, &label_column)?)
        }
    }
}

fn generate(args: GenerateArgs) -> CliResult<()> {
    let name = FixtureName::from_str(&args.dataset)?;
    let fixture = OmegaFixture::load(name);
    let dataset = generate_dataset(&fixture.spec(args.per_class_n), RngSeed(args.seed))?;
    let names: Vec<String> = (0..dataset.num_classes).map(|c| c.to_string()).collect();
    let files = io::write_dataset(&dataset, &names, &args.out, name.as_str())?;
    for f in &files {
        println!("{}", f.display());
    }
    Ok(())
}

fn train(args: TrainArgs) -> CliResult<()> {
    let seed = RngSeed(args.seed);
    let k_policy = parse_k_policy(&args.model)?;
    let (dataset, label_names) = load_labeled(&args.data, seed)?;
    let mut model = FsgModel::train(&dataset, args.model.phi, k_policy, seed)?;
    if let Some(mk) = args.model.meta_k {
        model.meta_k = mk;
    }
    model.label_names = label_names;
    model.save(&args.out)?;
    println!(
        "trained: {} samples, {} classes, {} spaces, base k = {:?}, meta k = {}",
        model.training_labels.len(),
        model.num_classes,
        model.num_spaces(),
        model.base_k,
        model.meta_k
    );
    println!("saved model to {}", args.out.display());
    Ok(())
}

fn classify(args: ClassifyArgs) -> CliResult<()> {
    if args.features.is_empty() {
        return Err(usage("classify needs at least one --features file"));
    }
    let model = FsgModel::load(&args.model)?;
    let samples = io::load_unlabeled_multi_feature(&args.features)?;
    let predictions = model.classify(&samples)?;

    let mut out = String::from("id,predicted");
    for c in 0..model.num_classes {
        out.push_str(&format!(",mu_{}", model.label_names[c]));
    }
    out.push('\n');
    for p in &predictions {
        out.push_str(&format!("{},{}", p.id, model.label_names[p.predicted]));
        for v in p.meta_membership.values() {
            out.push_str(&format!(",{v:.6}"));
        }
        out.push('\n');
    }
    match &args.out {
        Some(path) => std::fs::write(path, out).map_err(Error::from)?,
        None => print!("{out}"),
    }

    if let Some(labels_path) = &args.labels {
        let (dataset, label_names) =
            io::load_multi_feature(&args.features, labels_path)?;
        // Align the file's first-appearance label order with the
        // order recorded in the model.
        let truth: Vec<usize> = dataset
            .samples
            .iter()
            .map(|s| {
                model
                    .label_names
                    .iter()
                    .position(|n| n == &label_names[s.label])
                    .unwrap_or(s.label)
            })
            .collect();
        let acc = performance(&predictions, &truth)?;
        eprintln!("accuracy: {:.2}%", acc * 100.0);
    }
    Ok(())
}

fn evaluate(args: EvaluateArgs, entropy_only: bool) -> CliResult<()> {
    if let Some(workers) = args.workers {
        // Ignore failure when a global pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    }
    let format = ReportFormat::from_str(&args.format)?;
    let mut cfg = ExperimentConfig::new(data_source(&args.data)?, RngSeed(args.seed));
    cfg.fuzzifier = args.model.phi;
    cfg.k_policy = parse_k_policy(&args.model)?;
    cfg.meta_k = args.model.meta_k;
    cfg.train_fraction = args.train_fraction;
    cfg.repetitions = args.reps;
    cfg.bins = args.bins;
    let report = run_experiment(&cfg)?;

    if entropy_only {
        match &args.out {
            Some(stem) => {
                let mut name = stem.file_name().map(|n| n.to_os_string()).unwrap_or_default();
                name.push(".json");
                let path = stem.with_file_name(name);
                let entropy: Vec<_> = report.repetitions.iter().map(|r| &r.entropy).collect();
                std::fs::write(&path, serde_json::to_string_pretty(&entropy).map_err(Error::from)?)
                    .map_err(Error::from)?;
                println!("wrote {}", path.display());
            }
            None => print_entropy(&report),
        }
        return Ok(());
    }

    println!(
        "FSG average accuracy {:.2}% over {} repetitions (bases: {})",
        report.average.fsg_accuracy * 100.0,
        report.repetitions.len(),
        report
            .average
            .base_accuracy
            .iter()
            .map(|a| format!("{:.2}%", a * 100.0))
            .collect::<Vec<_>>()
            .join(", ")
    );
    println!("ave_corr {:.4}", report.average.ave_corr);
    if let Some(stem) = &args.out {
        for f in emit_report(&report, stem, format)? {
            println!("wrote {}", f.display());
        }
    }
    if !report.complete {
        for f in &report.failures {
            eprintln!("warning: {f}");
        }
    }
    Ok(())
}

fn print_entropy(report: &fsg::experiment::ExperimentReport) {
    println!(
        "Decision-space entropy (nats, {} bins), averaged over {} repetitions",
        report.repetitions[0].entropy.bins,
        report.repetitions.len()
    );
    for (b, h) in report.average.per_space_entropy.iter().enumerate() {
        println!("  base{}: {h:.4}", b + 1);
    }
    if let (Some(fusion), Some(diff)) =
        (report.average.fusion_entropy, report.average.entropy_difference)
    {
        let sum: f64 = report.average.per_space_entropy.iter().sum();
        println!("  sum of spaces: {sum:.4}");
        println!("  fusion: {fusion:.4}");
        println!(
            "  difference: {diff:.4} ({})",
            if diff > 0.0 { "decisions are dependent" } else { "no dependence detected" }
        );
    }
}

fn inspect(args: InspectArgs) -> CliResult<()> {
    let model = FsgModel::load(&args.model)?;
    println!("classes: {}", model.num_classes);
    println!("labels: {}", model.label_names.join(", "));
    println!("feature spaces: {} (dims {:?})", model.num_spaces(), model.space_dims);
    println!("training samples: {}", model.training_labels.len());
    println!("fuzzifier: {}", model.fuzzifier);
    println!("base k: {:?}", model.base_k);
    println!("meta k: {}", model.meta_k);
    println!("fusion dimension: {}", model.num_classes * model.num_spaces());
    for j in 0..model.num_spaces() {
        println!(
            "base {} training accuracy (leave-one-out): {:.2}%",
            j + 1,
            model.base_training_accuracy(j) * 100.0
        );
    }
    Ok(())
}
