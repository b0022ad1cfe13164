//! Benchmark harness: load a configuration, evaluate the requested
//! classifiers on one shared fold plan, and render the comparison as
//! text/CSV/JSON tables and SVG charts.

mod config;
mod render;

pub use config::{parse_config, parse_config_file, BenchConfig, DataFormat, OutputFormat};
pub use render::{render_charts, render_table, ChartSet};

use crate::classifiers::{Variant, ALL_VARIANTS};
use crate::dataset::{
    apply_schema, canonical_ckd_schema, parse_arff, parse_csv, summarize, DataError, Dataset,
    Summary,
};
use crate::eval::{
    cross_validate_with_sink, kfold_partition, EvalError, EvalResult, PipelineOptions,
};
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::time::{Duration, Instant};
use thiserror::Error;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("dataset '{path}': {source}")]
    Dataset {
        path: String,
        #[source]
        source: DataError,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// One classifier's slot in the report: either a full evaluation or the
/// error that stopped it (other classifiers keep running).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchEntry {
    pub classifier: String,
    pub display_name: String,
    pub result: Option<EvalResult>,
    pub error: Option<String>,
    /// Wall-clock seconds; logged to stderr, excluded from the serialized
    /// report so identical runs produce identical bytes.
    #[serde(skip)]
    pub wall_clock: Duration,
}

impl BenchEntry {
    pub fn variant(&self) -> Variant {
        Variant::from_id(&self.classifier).expect("entry carries a canonical id")
    }

    pub fn pooled_accuracy(&self) -> Option<f64> {
        self.result.as_ref().and_then(|r| r.pooled.accuracy)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub schema_version: u32,
    pub code_version: String,
    pub config: BenchConfig,
    pub dataset_summary: Summary,
    pub plan_hash: String,
    /// Entries in canonical variant order.
    pub entries: Vec<BenchEntry>,
    /// Canonical ids sorted by pooled accuracy (desc), ties and failures
    /// by canonical order.
    pub ranking: Vec<String>,
}

impl BenchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<BenchReport, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn any_failed(&self) -> bool {
        self.entries.iter().any(|e| e.error.is_some())
    }
}

/// Loads and schema-validates the dataset named by the config.
pub fn load_dataset(path: &Path, format: DataFormat) -> Result<Dataset, BenchError> {
    let wrap = |source: DataError| BenchError::Dataset {
        path: path.display().to_string(),
        source,
    };
    let text = std::fs::read_to_string(path).map_err(|e| BenchError::Dataset {
        path: path.display().to_string(),
        source: DataError::Io(e),
    })?;
    let raw = match format {
        DataFormat::Arff => parse_arff(&text).map_err(wrap)?,
        DataFormat::Csv => parse_csv(&text).map_err(wrap)?,
    };
    apply_schema(&raw, &canonical_ckd_schema()).map_err(wrap)
}

fn ranking_of(entries: &[BenchEntry]) -> Vec<String> {
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by(|&a, &b| {
        let (ea, eb) = (&entries[a], &entries[b]);
        match (ea.pooled_accuracy(), eb.pooled_accuracy()) {
            (Some(x), Some(y)) => y.partial_cmp(&x).unwrap().then(
                ea.variant()
                    .canonical_rank()
                    .cmp(&eb.variant().canonical_rank()),
            ),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => ea
                .variant()
                .canonical_rank()
                .cmp(&eb.variant().canonical_rank()),
        }
    });
    order
        .into_iter()
        .map(|i| entries[i].classifier.clone())
        .collect()
}

/// Runs every configured classifier on the identical fold plan, so the
/// comparison is paired. Per-classifier failures are recorded in the
/// report without aborting the remaining runs. `model_archive` receives
/// (classifier id, fold, model JSON) when the config asks for archiving.
pub fn run_benchmark_with(
    config: &BenchConfig,
    ds: &Dataset,
    model_archive: &mut dyn FnMut(&str, usize, String),
) -> Result<BenchReport, BenchError> {
    let labels: Vec<bool> = (0..ds.n_rows()).map(|i| ds.is_positive(i)).collect();
    let plan = kfold_partition(
        ds.n_rows(),
        config.folds,
        config.seed,
        config.stratified,
        &labels,
    )?;
    let options = PipelineOptions {
        imputation_scope: config.imputation_scope,
    };
    let mut entries = Vec::with_capacity(config.classifiers.len());
    for spec in &config.classifiers {
        let id = spec.variant.canonical_id().to_string();
        let started = Instant::now();
        let mut sink = |fold: usize, model: &crate::classifiers::TrainedModel| {
            if config.archive_models {
                model_archive(&id, fold, model.to_json());
            }
        };
        let outcome = cross_validate_with_sink(spec, ds, &plan, &options, &mut sink);
        let wall_clock = started.elapsed();
        let (result, error) = match outcome {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        };
        entries.push(BenchEntry {
            classifier: id,
            display_name: spec.variant.display_name().to_string(),
            result,
            error,
            wall_clock,
        });
    }
    let ranking = ranking_of(&entries);
    Ok(BenchReport {
        schema_version: REPORT_SCHEMA_VERSION,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        dataset_summary: summarize(ds),
        plan_hash: plan.content_hash(),
        entries,
        ranking,
    })
}

/// Convenience wrapper: load the dataset from disk and run.
pub fn run_benchmark(config: &BenchConfig) -> Result<BenchReport, BenchError> {
    let ds = load_dataset(&config.dataset_path, config.format)?;
    run_benchmark_with(config, &ds, &mut |_, _, _| {})
}

/// Writes the artifacts requested by `config.formats` into
/// `config.output_dir`; returns the written paths.
pub fn write_artifacts(
    config: &BenchConfig,
    report: &BenchReport,
) -> Result<Vec<std::path::PathBuf>, BenchError> {
    std::fs::create_dir_all(&config.output_dir)?;
    let mut written = Vec::new();
    let mut emit = |name: &str, bytes: &[u8]| -> Result<(), BenchError> {
        let path = config.output_dir.join(name);
        std::fs::write(&path, bytes)?;
        written.push(path);
        Ok(())
    };
    for fmt in &config.formats {
        match fmt {
            OutputFormat::Text => emit("table.txt", render_table(report, *fmt).as_bytes())?,
            OutputFormat::Csv => emit("table.csv", render_table(report, *fmt).as_bytes())?,
            OutputFormat::Json => emit("report.json", report.to_json().as_bytes())?,
            OutputFormat::Svg => {
                let charts = render_charts(report);
                emit("accuracy.svg", charts.accuracy.as_bytes())?;
                emit("metrics.svg", charts.metrics.as_bytes())?;
            }
        }
    }
    Ok(written)
}

/// All twelve variants in canonical order, for consumers building configs
/// programmatically.
pub fn canonical_variant_ids() -> Vec<&'static str> {
    ALL_VARIANTS.iter().map(|v| v.canonical_id()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::ClassifierSpec;
    use crate::eval::{compute_metrics, ConfusionMatrix, MetricsReport};

    pub(super) fn entry_with_accuracy(variant: Variant, tp: usize, tn: usize) -> BenchEntry {
        let cm = ConfusionMatrix {
            tp,
            fp: 100 - tn,
            tn,
            fn_: 100 - tp,
            positive_label: "ckd".into(),
        };
        let pooled = compute_metrics(&cm).unwrap();
        let undefined = MetricsReport {
            accuracy: None,
            sensitivity: None,
            specificity: None,
            precision: None,
        };
        BenchEntry {
            classifier: variant.canonical_id().to_string(),
            display_name: variant.display_name().to_string(),
            result: Some(EvalResult {
                spec: ClassifierSpec::new(variant),
                seed: 0,
                plan_hash: "0".into(),
                pooled_confusion: cm,
                pooled,
                per_fold: vec![undefined],
                fold_mean: undefined,
                warnings: vec![],
                code_version: "test".into(),
            }),
            error: None,
            wall_clock: Duration::ZERO,
        }
    }

    fn failed_entry(variant: Variant) -> BenchEntry {
        BenchEntry {
            classifier: variant.canonical_id().to_string(),
            display_name: variant.display_name().to_string(),
            result: None,
            error: Some("boom".into()),
            wall_clock: Duration::ZERO,
        }
    }

    #[test]
    fn ranking_orders_by_accuracy_then_canonical_order() {
        let entries = vec![
            entry_with_accuracy(Variant::DecisionTree, 90, 90), // 0.90
            entry_with_accuracy(Variant::LinearSvm, 95, 95),    // 0.95
            entry_with_accuracy(Variant::FineKnn, 90, 90),      // 0.90 tie
            failed_entry(Variant::FfbpnnGd),
        ];
        let ranking = ranking_of(&entries);
        assert_eq!(
            ranking,
            vec!["linear_svm", "decision_tree", "fine_knn", "ffbpnn_gd"],
            "accuracy desc, tie by canonical order, failures last"
        );
    }

    #[test]
    fn ranking_is_a_permutation_of_the_entries() {
        let entries = vec![
            entry_with_accuracy(Variant::CosineKnn, 80, 70),
            entry_with_accuracy(Variant::MediumKnn, 85, 85),
        ];
        let mut ranking = ranking_of(&entries);
        ranking.sort();
        let mut ids: Vec<String> = entries.iter().map(|e| e.classifier.clone()).collect();
        ids.sort();
        assert_eq!(ranking, ids);
    }
}
