//! K-fold cross-validation engine and the four performance metrics
//! (accuracy, sensitivity, specificity, precision).
//!
//! Headline numbers come from the pooled confusion matrix built from the
//! union of out-of-fold predictions; per-fold metrics and their mean are
//! reported alongside.

use crate::classifiers::{self, ClassifierError, ClassifierSpec};
use crate::dataset::Dataset;
use crate::preprocess::{
    build_imputation_plan, encode, impute, impute_class_agnostic, standardize, EncodingPolicy,
    FeatureMatrix, ImputationScope, PreprocessError,
};
use crate::rng::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("k = {k} is not between 2 and {n}")]
    BadK { k: usize, n: usize },
    #[error("prediction vector has {predicted} entries, truth has {truth}")]
    LengthMismatch { predicted: usize, truth: usize },
    #[error("confusion matrix has no observations")]
    EmptyMatrix,
    #[error("fold {fold}: {source}")]
    FoldFailure {
        fold: usize,
        #[source]
        source: ClassifierError,
    },
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
}

/// Assignment of every row to one of k disjoint folds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    /// fold index per row
    pub assignments: Vec<usize>,
    pub seed: u64,
    pub stratified: bool,
}

impl FoldPlan {
    pub fn n_rows(&self) -> usize {
        self.assignments.len()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }

    /// (out-of-fold, in-fold) row indices for one fold.
    pub fn split(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (i, &f) in self.assignments.iter().enumerate() {
            if f == fold {
                test.push(i);
            } else {
                train.push(i);
            }
        }
        (train, test)
    }

    /// FNV-1a over the plan contents; lets a report assert that every
    /// classifier ran on the identical partition.
    pub fn content_hash(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |v: u64| {
            for b in v.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x1000_0000_01b3);
            }
        };
        eat(self.k as u64);
        eat(self.seed);
        eat(self.stratified as u64);
        for &a in &self.assignments {
            eat(a as u64);
        }
        format!("{h:016x}")
    }
}

/// Seeded shuffle, then round-robin fold assignment. Stratified mode
/// shuffles within each class first and keeps one running round-robin
/// cursor so fold sizes still differ by at most one overall.
pub fn kfold_partition(
    n: usize,
    k: usize,
    seed: u64,
    stratified: bool,
    labels: &[bool],
) -> Result<FoldPlan, EvalError> {
    if k < 2 || k > n {
        return Err(EvalError::BadK { k, n });
    }
    assert_eq!(labels.len(), n, "labels must cover all rows");
    let mut rng = Rng::seed_from_u64(seed);
    let mut assignments = vec![0usize; n];
    if stratified {
        let mut pos: Vec<usize> = (0..n).filter(|&i| labels[i]).collect();
        let mut neg: Vec<usize> = (0..n).filter(|&i| !labels[i]).collect();
        rng.shuffle(&mut pos);
        rng.shuffle(&mut neg);
        let mut cursor = 0usize;
        for &i in pos.iter().chain(neg.iter()) {
            assignments[i] = cursor % k;
            cursor += 1;
        }
    } else {
        let mut order: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut order);
        for (pos, &i) in order.iter().enumerate() {
            assignments[i] = pos % k;
        }
    }
    Ok(FoldPlan {
        k,
        assignments,
        seed,
        stratified,
    })
}

/// Counts for the positive class of a two-class problem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub positive_label: String,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

/// Tallies predictions against truth; `true` marks the positive class.
pub fn confusion(
    predicted: &[bool],
    truth: &[bool],
    positive_label: &str,
) -> Result<ConfusionMatrix, EvalError> {
    if predicted.len() != truth.len() {
        return Err(EvalError::LengthMismatch {
            predicted: predicted.len(),
            truth: truth.len(),
        });
    }
    let mut cm = ConfusionMatrix {
        tp: 0,
        fp: 0,
        tn: 0,
        fn_: 0,
        positive_label: positive_label.to_string(),
    };
    for (&p, &t) in predicted.iter().zip(truth) {
        match (p, t) {
            (true, true) => cm.tp += 1,
            (true, false) => cm.fp += 1,
            (false, false) => cm.tn += 1,
            (false, true) => cm.fn_ += 1,
        }
    }
    Ok(cm)
}

/// Metric values in [0, 1]; `None` marks an undefined value (zero
/// denominator), never silently coerced to 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: Option<f64>,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub precision: Option<f64>,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// accuracy = (tp+tn)/total, sensitivity = tp/(tp+fn),
/// specificity = tn/(tn+fp), precision = tp/(tp+fp).
pub fn compute_metrics(cm: &ConfusionMatrix) -> Result<MetricsReport, EvalError> {
    if cm.total() == 0 {
        return Err(EvalError::EmptyMatrix);
    }
    Ok(MetricsReport {
        accuracy: ratio(cm.tp + cm.tn, cm.total()),
        sensitivity: ratio(cm.tp, cm.tp + cm.fn_),
        specificity: ratio(cm.tn, cm.tn + cm.fp),
        precision: ratio(cm.tp, cm.tp + cm.fp),
    })
}

fn mean_of(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let defined: Vec<f64> = values.flatten().collect();
    (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
}

/// Pooled and per-fold outcome of one classifier under one fold plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub spec: ClassifierSpec,
    pub seed: u64,
    pub plan_hash: String,
    pub pooled_confusion: ConfusionMatrix,
    pub pooled: MetricsReport,
    pub per_fold: Vec<MetricsReport>,
    pub fold_mean: MetricsReport,
    /// e.g. convergence flags, annotated with the fold index
    pub warnings: Vec<String>,
    pub code_version: String,
}

impl EvalResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }
}

/// Per-run preprocessing policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineOptions {
    pub imputation_scope: ImputationScope,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            imputation_scope: ImputationScope::WholeDataset,
        }
    }
}

/// The seed handed to the classifier for one fold.
pub fn fold_seed(base: u64, fold: usize) -> u64 {
    let mut rng = Rng::derive(base, fold as u64 + 1);
    rng.next_u64()
}

/// Generic out-of-fold evaluation: `fit_predict(fold, train, test)` returns
/// (predictions for the test rows, convergence flag). This is the engine
/// under [`cross_validate`]; it also lets callers evaluate baselines or
/// custom models under the identical protocol.
pub fn cross_validate_fn<F>(
    ds: &Dataset,
    plan: &FoldPlan,
    options: &PipelineOptions,
    wants_standardization: bool,
    mut fit_predict: F,
) -> Result<(ConfusionMatrix, Vec<MetricsReport>, Vec<String>), EvalError>
where
    F: FnMut(usize, &FeatureMatrix, &FeatureMatrix) -> Result<(Vec<bool>, bool), ClassifierError>,
{
    assert_eq!(plan.n_rows(), ds.n_rows(), "plan must cover the dataset");
    let positive = ds.schema().positive_label().to_string();
    let truth: Vec<bool> = (0..ds.n_rows()).map(|i| ds.is_positive(i)).collect();
    let mut predictions: Vec<Option<bool>> = vec![None; ds.n_rows()];
    let mut per_fold = Vec::with_capacity(plan.k);
    let mut warnings = Vec::new();

    // whole-dataset scope: impute/encode/standardize once, slice per fold
    let whole = if options.imputation_scope == ImputationScope::WholeDataset {
        let imp_plan = build_imputation_plan(ds, ImputationScope::WholeDataset)?;
        let imputed = impute(ds, &imp_plan)?;
        let fm = encode(&imputed, EncodingPolicy::default())?;
        let fm = if wants_standardization {
            standardize(&fm, None)?.0
        } else {
            fm
        };
        Some(fm)
    } else {
        None
    };

    for fold in 0..plan.k {
        let (train_idx, test_idx) = plan.split(fold);
        let (train_fm, test_fm) = match &whole {
            Some(fm) => (fm.select_rows(&train_idx), fm.select_rows(&test_idx)),
            None => {
                // train-fold-only scope: statistics from the training rows;
                // held-out rows imputed with class-agnostic train statistics
                let train_ds = ds.select_rows(&train_idx);
                let test_ds = ds.select_rows(&test_idx);
                let imp_plan = build_imputation_plan(&train_ds, ImputationScope::TrainFoldOnly)?;
                let train_imp = impute(&train_ds, &imp_plan)?;
                let test_imp = impute_class_agnostic(&test_ds, &imp_plan)?;
                let train_fm = encode(&train_imp, EncodingPolicy::default())?;
                let test_fm = encode(&test_imp, EncodingPolicy::default())?;
                if wants_standardization {
                    let (train_fm, stats) = standardize(&train_fm, None)?;
                    let (test_fm, _) = standardize(&test_fm, Some(&stats))?;
                    (train_fm, test_fm)
                } else {
                    (train_fm, test_fm)
                }
            }
        };

        let (fold_preds, converged) = fit_predict(fold, &train_fm, &test_fm)
            .map_err(|source| EvalError::FoldFailure { fold, source })?;
        if !converged {
            warnings.push(format!("fold {fold}: iteration budget exhausted"));
        }
        debug_assert_eq!(fold_preds.len(), test_idx.len());
        for (&row, &p) in test_idx.iter().zip(&fold_preds) {
            predictions[row] = Some(p);
        }
        let fold_truth: Vec<bool> = test_idx.iter().map(|&i| truth[i]).collect();
        let cm = confusion(&fold_preds, &fold_truth, &positive)?;
        per_fold.push(compute_metrics(&cm)?);
    }

    let all_preds: Vec<bool> = predictions
        .into_iter()
        .map(|p| p.expect("every row predicted exactly once"))
        .collect();
    let pooled = confusion(&all_preds, &truth, &positive)?;
    Ok((pooled, per_fold, warnings))
}

/// Out-of-fold evaluation of one classifier spec: for each fold, fit on the
/// out-of-fold rows and predict the in-fold rows; pool the predictions.
pub fn cross_validate(
    spec: &ClassifierSpec,
    ds: &Dataset,
    plan: &FoldPlan,
    options: &PipelineOptions,
) -> Result<EvalResult, EvalError> {
    cross_validate_with_sink(spec, ds, plan, options, &mut |_, _| {})
}

/// [`cross_validate`] plus a callback receiving every fold's fitted model
/// (the benchmark harness uses it to archive per-fold models).
pub fn cross_validate_with_sink(
    spec: &ClassifierSpec,
    ds: &Dataset,
    plan: &FoldPlan,
    options: &PipelineOptions,
    model_sink: &mut dyn FnMut(usize, &classifiers::TrainedModel),
) -> Result<EvalResult, EvalError> {
    let base_seed = spec.hyperparameters.seed;
    let (pooled_confusion, per_fold, warnings) = cross_validate_fn(
        ds,
        plan,
        options,
        spec.variant.wants_standardization(),
        |fold, train, test| {
            let mut fold_spec = spec.clone();
            fold_spec.hyperparameters.seed = fold_seed(base_seed, fold);
            let model = classifiers::fit(&fold_spec, train)?;
            let preds = classifiers::predict(&model, test)?;
            model_sink(fold, &model);
            Ok((preds, model.converged))
        },
    )?;
    let pooled = compute_metrics(&pooled_confusion)?;
    let fold_mean = MetricsReport {
        accuracy: mean_of(per_fold.iter().map(|m| m.accuracy)),
        sensitivity: mean_of(per_fold.iter().map(|m| m.sensitivity)),
        specificity: mean_of(per_fold.iter().map(|m| m.specificity)),
        precision: mean_of(per_fold.iter().map(|m| m.precision)),
    };
    Ok(EvalResult {
        spec: spec.clone(),
        seed: base_seed,
        plan_hash: plan.content_hash(),
        pooled_confusion,
        pooled,
        per_fold,
        fold_mean,
        warnings,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
    })
}
