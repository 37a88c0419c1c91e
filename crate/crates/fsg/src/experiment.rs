//! Repeated-experiment orchestration and report emission.
//!
//! An experiment resamples (or re-splits) a dataset over `repetitions`
//! independent runs, trains the ensemble, classifies the held-out
//! samples, and collects accuracy, diversity, and entropy metrics.
//! Each repetition draws its seed as a pure function of the master
//! seed and the repetition index, so repetitions can run in any order
//! (they run in parallel) and individually reproduce.

use std::fs::File;
use std::io::{BufWriter, Write as _};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{ave_corr, sharing_matrix, SharingMatrix};
use crate::dataset::{LabeledDataset, RngSeed};
use crate::entropy::{
    build_histogram, class_conditional_entropy_table, entropy, fusion_entropy_comparison,
    joint_entropy, own_class_components, FusionEntropyReport,
};
use crate::stacking::{crisp_accuracy, crisp_per_class_accuracy, per_class_performance,
    performance, FsgModel, KPolicy};
use crate::synthetic::{build_fixture_dataset, FixtureName};
use crate::{io, Error, Result};

/// Where the experiment's samples come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DataSource {
    /// A checked-in synthetic fixture, regenerated per repetition.
    Fixture { name: FixtureName, per_class_n: usize },
    /// One file per feature space plus a label file; re-split per
    /// repetition.
    MultiFeature { feature_paths: Vec<PathBuf>, labels_path: PathBuf },
    /// One file whose attribute columns each become a 1-D space.
    MultiAttribute { path: PathBuf, label_column: String },
}

/// Full description of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub source: DataSource,
    pub fuzzifier: f64,
    pub k_policy: KPolicy,
    /// Overrides the meta-layer k after training when set.
    pub meta_k: Option<usize>,
    pub train_fraction: f64,
    pub seed: RngSeed,
    pub repetitions: usize,
    /// Histogram bin count for the entropy section.
    pub bins: usize,
}

impl ExperimentConfig {
    /// Defaults: φ = 2, auto k, 50/50 split, 10 repetitions, 32 bins.
    pub fn new(source: DataSource, seed: RngSeed) -> ExperimentConfig {
        ExperimentConfig {
            source,
            fuzzifier: crate::fuzzy_knn::DEFAULT_FUZZIFIER,
            k_policy: KPolicy::Auto,
            meta_k: None,
            train_fraction: 0.5,
            seed,
            repetitions: 10,
            bins: crate::entropy::DEFAULT_BINS,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.repetitions < 1 {
            return Err(Error::InvalidParameter("repetitions must be >= 1".into()));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "train fraction must be in (0,1), got {}",
                self.train_fraction
            )));
        }
        if self.bins == 0 {
            return Err(Error::InvalidParameter("bins must be >= 1".into()));
        }
        Ok(())
    }
}

/// Wall-clock seconds per phase of one repetition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct PhaseTimings {
    pub training_s: f64,
    pub classification_s: f64,
}

/// Entropy metrics of one repetition, all in nats. Scalars entering
/// the histograms are each test sample's membership in its own class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropySection {
    pub bins: usize,
    pub unit: String,
    /// Decision-space entropy per base classifier.
    pub per_space: Vec<f64>,
    /// C rows per base classifier: class-conditional entropies.
    pub class_conditional: Vec<Vec<f64>>,
    /// Fusion-space entropy against the per-space sum; absent when
    /// there is only one base classifier.
    pub fusion: Option<FusionEntropyReport>,
}

/// Everything measured in one repetition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionResult {
    pub repetition: usize,
    pub seed: u64,
    pub train_size: usize,
    pub test_size: usize,
    pub base_k: Vec<usize>,
    pub meta_k: usize,
    pub fsg_accuracy: f64,
    pub fsg_per_class: Vec<Option<f64>>,
    pub base_accuracy: Vec<f64>,
    pub base_per_class: Vec<Vec<Option<f64>>>,
    pub ave_corr: f64,
    pub sharing: SharingMatrix,
    pub entropy: EntropySection,
    pub timings: PhaseTimings,
}

/// Means over the successful repetitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AverageSection {
    pub fsg_accuracy: f64,
    pub fsg_per_class: Vec<Option<f64>>,
    pub base_accuracy: Vec<f64>,
    pub base_per_class: Vec<Vec<Option<f64>>>,
    pub ave_corr: f64,
    pub per_space_entropy: Vec<f64>,
    pub fusion_entropy: Option<f64>,
    pub entropy_difference: Option<f64>,
}

/// The full experiment outcome: config echo, per-repetition rows, and
/// the averaged row. `complete` is false when any repetition failed;
/// its diagnostics are kept in `failures`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub num_classes: usize,
    pub num_spaces: usize,
    pub repetitions: Vec<RepetitionResult>,
    pub average: AverageSection,
    pub complete: bool,
    pub failures: Vec<String>,
}

impl ExperimentReport {
    /// Zeroes every timing field, leaving only deterministic content.
    pub fn strip_timings(&mut self) {
        for rep in &mut self.repetitions {
            rep.timings = PhaseTimings::default();
        }
    }
}

fn materialize(cfg: &ExperimentConfig, rep_seed: RngSeed) -> Result<(LabeledDataset, LabeledDataset)> {
    match &cfg.source {
        DataSource::Fixture { name, per_class_n } => {
            build_fixture_dataset(*name, *per_class_n, cfg.train_fraction, rep_seed)
        }
        DataSource::MultiFeature { feature_paths, labels_path } => {
            let (data, _) = io::load_multi_feature(feature_paths, labels_path)?;
            Ok(data.stratified_split(cfg.train_fraction, rep_seed))
        }
        DataSource::MultiAttribute { path, label_column } => {
            let (data, _) = io::load_multi_attribute(path, label_column)?;
            Ok(data.stratified_split(cfg.train_fraction, rep_seed))
        }
    }
}

fn entropy_section(
    cfg: &ExperimentConfig,
    model: &FsgModel,
    predictions: &[crate::stacking::Prediction],
    truth: &[usize],
) -> Result<EntropySection> {
    let j = model.num_spaces();
    let mut streams = Vec::with_capacity(j);
    let mut per_space = Vec::with_capacity(j);
    let mut class_conditional = Vec::with_capacity(j);
    for space in 0..j {
        let memberships: Vec<_> =
            predictions.iter().map(|p| p.base_memberships[space].clone()).collect();
        let own = own_class_components(&memberships, truth)?;
        per_space.push(entropy(&build_histogram(&own, cfg.bins, None)?));
        class_conditional.push(class_conditional_entropy_table(
            &own,
            truth,
            model.num_classes,
            cfg.bins,
        )?);
        streams.push(own);
    }
    let fusion = if j >= 2 {
        let joint = joint_entropy(&streams, cfg.bins)?;
        Some(fusion_entropy_comparison(&per_space, joint)?)
    } else {
        None
    };
    Ok(EntropySection { bins: cfg.bins, unit: "nats".to_string(), per_space, class_conditional, fusion })
}

fn run_repetition(cfg: &ExperimentConfig, r: usize) -> Result<RepetitionResult> {
    let rep_seed = cfg.seed.for_repetition(r as u64);
    let (train, test) = materialize(cfg, rep_seed)?;

    let t0 = Instant::now();
    let mut model = FsgModel::train(&train, cfg.fuzzifier, cfg.k_policy, rep_seed)?;
    if let Some(mk) = cfg.meta_k {
        model.meta_k = mk;
    }
    let training_s = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let predictions = model.classify_dataset(&test)?;
    let classification_s = t1.elapsed().as_secs_f64();

    let truth = test.labels();
    let per_base_preds: Vec<Vec<usize>> = (0..model.num_spaces())
        .map(|j| predictions.iter().map(|p| p.base_crisp[j]).collect())
        .collect();
    let base_accuracy = per_base_preds
        .iter()
        .map(|preds| crisp_accuracy(preds, &truth))
        .collect::<Result<Vec<_>>>()?;
    let base_per_class = per_base_preds
        .iter()
        .map(|preds| crisp_per_class_accuracy(preds, &truth, model.num_classes))
        .collect::<Result<Vec<_>>>()?;

    Ok(RepetitionResult {
        repetition: r,
        seed: rep_seed.0,
        train_size: train.num_samples(),
        test_size: test.num_samples(),
        base_k: model.base_k.clone(),
        meta_k: model.meta_k,
        fsg_accuracy: performance(&predictions, &truth)?,
        fsg_per_class: per_class_performance(&predictions, &truth, model.num_classes)?,
        base_accuracy,
        base_per_class,
        ave_corr: ave_corr(&per_base_preds, &truth)?,
        sharing: sharing_matrix(&per_base_preds, &truth)?,
        entropy: entropy_section(cfg, &model, &predictions, &truth)?,
        timings: PhaseTimings { training_s, classification_s },
    })
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut n) = (0.0, 0usize);
    for v in values {
        sum += v;
        n += 1;
    }
    sum / n as f64
}

fn mean_opt(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let present: Vec<f64> = values.flatten().collect();
    if present.is_empty() {
        None
    } else {
        Some(present.iter().sum::<f64>() / present.len() as f64)
    }
}

fn average_section(reps: &[RepetitionResult]) -> AverageSection {
    let j = reps[0].base_accuracy.len();
    let c = reps[0].fsg_per_class.len();
    let has_fusion = reps[0].entropy.fusion.is_some();
    AverageSection {
        fsg_accuracy: mean(reps.iter().map(|r| r.fsg_accuracy)),
        fsg_per_class: (0..c)
            .map(|cl| mean_opt(reps.iter().map(|r| r.fsg_per_class[cl])))
            .collect(),
        base_accuracy: (0..j)
            .map(|b| mean(reps.iter().map(|r| r.base_accuracy[b])))
            .collect(),
        base_per_class: (0..j)
            .map(|b| {
                (0..c)
                    .map(|cl| mean_opt(reps.iter().map(|r| r.base_per_class[b][cl])))
                    .collect()
            })
            .collect(),
        ave_corr: mean(reps.iter().map(|r| r.ave_corr)),
        per_space_entropy: (0..j)
            .map(|b| mean(reps.iter().map(|r| r.entropy.per_space[b])))
            .collect(),
        fusion_entropy: has_fusion
            .then(|| mean(reps.iter().map(|r| r.entropy.fusion.as_ref().unwrap().fusion))),
        entropy_difference: has_fusion
            .then(|| mean(reps.iter().map(|r| r.entropy.fusion.as_ref().unwrap().difference))),
    }
}

/// Runs all repetitions (in parallel, merged by repetition index) and
/// aggregates. Errors only when every repetition fails or the config
/// is invalid; individual failures are recorded in the report.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let outcomes: Vec<(usize, Result<RepetitionResult>)> = (0..cfg.repetitions)
        .into_par_iter()
        .map(|r| (r, run_repetition(cfg, r)))
        .collect();

    let mut repetitions = Vec::new();
    let mut failures = Vec::new();
    for (r, outcome) in outcomes {
        match outcome {
            Ok(rep) => repetitions.push(rep),
            Err(e) => failures.push(format!("repetition {r}: {e}")),
        }
    }
    if repetitions.is_empty() {
        return Err(Error::InvalidDataset(format!(
            "all {} repetitions failed; first failure: {}",
            cfg.repetitions, failures[0]
        )));
    }
    repetitions.sort_by_key(|r| r.repetition);
    let average = average_section(&repetitions);
    let (num_classes, num_spaces) =
        (repetitions[0].fsg_per_class.len(), repetitions[0].base_accuracy.len());
    Ok(ExperimentReport {
        config: cfg.clone(),
        num_classes,
        num_spaces,
        repetitions,
        average,
        complete: failures.is_empty(),
        failures,
    })
}

/// Output style of the human-readable table file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReportFormat {
    /// Aligned plain-text tables.
    StructuredText,
    /// Tab-separated tables for spreadsheet import.
    DelimitedTable,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<ReportFormat> {
        match s {
            "text" | "structured-text" => Ok(ReportFormat::StructuredText),
            "table" | "delimited-table" => Ok(ReportFormat::DelimitedTable),
            other => Err(Error::InvalidParameter(format!(
                "unknown report format '{other}' (expected 'text' or 'table')"
            ))),
        }
    }
}

fn fmt_pct(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{:.1}", v * 100.0),
        None => "-".to_string(),
    }
}

fn write_tables(report: &ExperimentReport, sep: &str, pad: bool) -> String {
    let j = report.num_spaces;
    let c = report.num_classes;
    let cell = |s: String| if pad { format!("{s:>8}") } else { s };
    let mut out = String::new();

    out.push_str("Accuracy per class (%), averaged over repetitions\n");
    let mut header: Vec<String> = vec![cell("class".into())];
    header.extend((0..j).map(|b| cell(format!("base{}", b + 1))));
    header.push(cell("FSG".into()));
    out.push_str(&header.join(sep));
    out.push('\n');
    for cl in 0..c {
        let mut row = vec![cell(format!("{cl}"))];
        row.extend((0..j).map(|b| cell(fmt_pct(report.average.base_per_class[b][cl]))));
        row.push(cell(fmt_pct(report.average.fsg_per_class[cl])));
        out.push_str(&row.join(sep));
        out.push('\n');
    }
    let mut avg_row = vec![cell("average".into())];
    avg_row.extend((0..j).map(|b| cell(fmt_pct(Some(report.average.base_accuracy[b])))));
    avg_row.push(cell(fmt_pct(Some(report.average.fsg_accuracy))));
    out.push_str(&avg_row.join(sep));
    out.push('\n');
    out.push_str(&format!("\nave_corr{}{:.4}\n", sep, report.average.ave_corr));

    out.push_str("\nSharing matrix (summed over repetitions): entry (r, c) counts samples\nmisclassified by base r and recovered by base c\n");
    let mut sum_counts = vec![vec![0usize; j]; j];
    let mut sum_rows = vec![0usize; j];
    for rep in &report.repetitions {
        for (r, rep_row) in rep.sharing.counts.iter().enumerate() {
            sum_rows[r] += rep.sharing.row_totals[r];
            for (dst, &src) in sum_counts[r].iter_mut().zip(rep_row) {
                *dst += src;
            }
        }
    }
    let mut header: Vec<String> = vec![cell("".into())];
    header.extend((0..j).map(|b| cell(format!("base{}", b + 1))));
    header.push(cell("missed".into()));
    out.push_str(&header.join(sep));
    out.push('\n');
    for r in 0..j {
        let mut row = vec![cell(format!("base{}", r + 1))];
        row.extend((0..j).map(|cc| cell(format!("{}", sum_counts[r][cc]))));
        row.push(cell(format!("{}", sum_rows[r])));
        out.push_str(&row.join(sep));
        out.push('\n');
    }

    out.push_str(&format!(
        "\nDecision-space entropy (nats, {} bins), averaged over repetitions\n",
        report.repetitions[0].entropy.bins
    ));
    let mut header: Vec<String> = vec![cell("space".into())];
    header.extend((0..c).map(|cl| cell(format!("class{cl}"))));
    header.push(cell("overall".into()));
    out.push_str(&header.join(sep));
    out.push('\n');
    let reps = &report.repetitions;
    for b in 0..j {
        let mut row = vec![cell(format!("base{}", b + 1))];
        for cl in 0..c {
            let m = mean(reps.iter().map(|r| r.entropy.class_conditional[b][cl]));
            row.push(cell(format!("{m:.3}")));
        }
        row.push(cell(format!("{:.3}", report.average.per_space_entropy[b])));
        out.push_str(&row.join(sep));
        out.push('\n');
    }
    if let (Some(fusion), Some(diff)) =
        (report.average.fusion_entropy, report.average.entropy_difference)
    {
        let sum: f64 = report.average.per_space_entropy.iter().sum();
        out.push_str(&format!(
            "fusion{}{fusion:.3}{}sum-of-spaces{}{sum:.3}{}difference{}{diff:.3}\n",
            sep, sep, sep, sep, sep
        ));
    }
    if !report.complete {
        out.push_str("\nINCOMPLETE REPORT - failed repetitions:\n");
        for f in &report.failures {
            out.push_str(f);
            out.push('\n');
        }
    }
    out
}

/// Writes the report: `{stem}.json` (machine-readable, full
/// fidelity), `{stem}.txt` or `{stem}.tsv` (human-readable tables),
/// and two-column plot data files `{stem}_per_class.dat` (class index
/// vs FSG accuracy) and `{stem}_per_repetition.dat` (repetition vs
/// FSG accuracy). Returns the written paths.
pub fn emit_report(
    report: &ExperimentReport,
    stem: impl AsRef<Path>,
    format: ReportFormat,
) -> Result<Vec<PathBuf>> {
    if report.repetitions.is_empty() {
        return Err(Error::InvalidParameter("refusing to emit a report with no repetitions".into()));
    }
    let stem = stem.as_ref();
    if let Some(parent) = stem.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut written = Vec::new();

    // Append rather than Path::with_extension: a stem like
    // "report_v1.0" must keep its dotted suffix.
    let json_path = with_suffix(stem, ".json");
    let writer = BufWriter::new(File::create(&json_path)?);
    serde_json::to_writer_pretty(writer, report)?;
    written.push(json_path);

    let (table_path, body) = match format {
        ReportFormat::StructuredText => (with_suffix(stem, ".txt"), write_tables(report, "  ", true)),
        ReportFormat::DelimitedTable => (with_suffix(stem, ".tsv"), write_tables(report, "\t", false)),
    };
    std::fs::write(&table_path, body)?;
    written.push(table_path);

    let per_class_path = with_suffix(stem, "_per_class.dat");
    let mut w = BufWriter::new(File::create(&per_class_path)?);
    for (cl, acc) in report.average.fsg_per_class.iter().enumerate() {
        if let Some(a) = acc {
            writeln!(w, "{cl} {a}")?;
        }
    }
    drop(w);
    written.push(per_class_path);

    let per_rep_path = with_suffix(stem, "_per_repetition.dat");
    let mut w = BufWriter::new(File::create(&per_rep_path)?);
    for rep in &report.repetitions {
        writeln!(w, "{} {}", rep.repetition, rep.fsg_accuracy)?;
    }
    drop(w);
    written.push(per_rep_path);

    Ok(written)
}

fn with_suffix(stem: &Path, suffix: &str) -> PathBuf {
    let mut name = stem.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(suffix);
    stem.with_file_name(name)
}
