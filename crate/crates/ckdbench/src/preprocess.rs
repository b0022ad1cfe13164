//! Missing-value imputation (class-conditional mean/mode), one-hot
//! encoding of mixed-type records into numeric feature vectors, and
//! feature standardization.
//!
//! Imputation fills numeric and discrete-integer cells with the attribute
//! mean over instances sharing the row's class label, and nominal cells
//! with the same-class mode. Means are kept at full real precision; mode
//! ties break by allowed-value order.

use crate::dataset::{AttributeKind, CellValue, DataRow, Dataset};
use crate::numkernel::Matrix;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("attribute '{attribute}' has no observed value for class '{class}'")]
    AllMissingForClass { attribute: String, class: String },
    #[error("imputation plan has no fill for attribute '{attribute}', class '{class}'")]
    PlanGap { attribute: String, class: String },
    #[error("attribute '{attribute}' still has missing cells at encode time (row {row})")]
    ResidualMissing { attribute: String, row: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Which rows feed the imputation statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImputationScope {
    /// Statistics from the entire dataset before cross-validation.
    WholeDataset,
    /// Statistics from the training fold only; held-out rows are imputed
    /// with class-agnostic training statistics.
    TrainFoldOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeFills {
    pub attribute: String,
    /// class label → fill value (mean as real, mode as token)
    pub by_class: BTreeMap<String, CellValue>,
    /// class-agnostic fill, for rows whose label may not be consulted
    pub global: CellValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImputationPlan {
    pub scope: ImputationScope,
    fills: Vec<AttributeFills>,
}

impl ImputationPlan {
    pub fn fills(&self) -> &[AttributeFills] {
        &self.fills
    }

    pub fn fill_for(&self, attribute_idx: usize, class: &str) -> Option<&CellValue> {
        self.fills[attribute_idx].by_class.get(class)
    }

    /// JSON export (attribute → class → fill value) for audit.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes")
    }
}

fn mean_fill(ds: &Dataset, attr_idx: usize, keep: impl Fn(&DataRow) -> bool) -> Option<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for row in ds.rows().iter().filter(|r| keep(r)) {
        if let Some(v) = row.cells[attr_idx].as_f64() {
            sum += v;
            count += 1;
        }
    }
    (count > 0).then(|| sum / count as f64)
}

fn mode_fill(
    ds: &Dataset,
    attr_idx: usize,
    allowed: &[String],
    keep: impl Fn(&DataRow) -> bool,
) -> Option<String> {
    let mut counts = vec![0usize; allowed.len()];
    for row in ds.rows().iter().filter(|r| keep(r)) {
        if let CellValue::Token(t) = &row.cells[attr_idx] {
            if let Some(pos) = allowed.iter().position(|a| a == t) {
                counts[pos] += 1;
            }
        }
    }
    let best = counts.iter().enumerate().fold(None, |acc, (i, &c)| {
        // ties break toward the earlier allowed value
        match acc {
            None if c > 0 => Some((i, c)),
            Some((_, bc)) if c > bc => Some((i, c)),
            other => other,
        }
    });
    best.map(|(i, _)| allowed[i].clone())
}

/// Computes class-conditional (and class-agnostic) fill values for every
/// attribute of `ds`.
pub fn build_imputation_plan(
    ds: &Dataset,
    scope: ImputationScope,
) -> Result<ImputationPlan, PreprocessError> {
    let schema = ds.schema();
    let classes = [
        schema.positive_label().to_string(),
        schema.negative_label().to_string(),
    ];
    let mut fills = Vec::with_capacity(schema.n_attributes());
    for (idx, attr) in schema.attributes().iter().enumerate() {
        let mut by_class = BTreeMap::new();
        for class in &classes {
            let fill = match &attr.kind {
                AttributeKind::Numeric | AttributeKind::DiscreteInteger => {
                    mean_fill(ds, idx, |r| r.label == *class).map(CellValue::Real)
                }
                AttributeKind::Nominal(allowed) => {
                    mode_fill(ds, idx, allowed, |r| r.label == *class).map(CellValue::Token)
                }
            };
            match fill {
                Some(v) => {
                    by_class.insert(class.clone(), v);
                }
                None => {
                    return Err(PreprocessError::AllMissingForClass {
                        attribute: attr.name.clone(),
                        class: class.clone(),
                    })
                }
            }
        }
        let global = match &attr.kind {
            AttributeKind::Numeric | AttributeKind::DiscreteInteger => {
                mean_fill(ds, idx, |_| true).map(CellValue::Real)
            }
            AttributeKind::Nominal(allowed) => {
                mode_fill(ds, idx, allowed, |_| true).map(CellValue::Token)
            }
        }
        .expect("global fill exists when both class fills exist");
        fills.push(AttributeFills {
            attribute: attr.name.clone(),
            by_class,
            global,
        });
    }
    Ok(ImputationPlan { scope, fills })
}

fn impute_rows(
    ds: &Dataset,
    plan: &ImputationPlan,
    class_conditional: bool,
) -> Result<Dataset, PreprocessError> {
    let mut rows = Vec::with_capacity(ds.n_rows());
    for row in ds.rows() {
        let mut cells = Vec::with_capacity(row.cells.len());
        for (idx, cell) in row.cells.iter().enumerate() {
            if cell.is_missing() {
                let fill = if class_conditional {
                    plan.fills[idx].by_class.get(&row.label).ok_or_else(|| {
                        PreprocessError::PlanGap {
                            attribute: plan.fills[idx].attribute.clone(),
                            class: row.label.clone(),
                        }
                    })?
                } else {
                    &plan.fills[idx].global
                };
                cells.push(fill.clone());
            } else {
                cells.push(cell.clone());
            }
        }
        rows.push(DataRow {
            cells,
            label: row.label.clone(),
        });
    }
    Ok(Dataset::from_parts(ds.schema().clone(), rows))
}

/// Fills every missing cell with the plan's class-conditional value.
/// Non-missing cells pass through untouched; the result has no missing
/// cells and re-imputing it is a no-op.
pub fn impute(ds: &Dataset, plan: &ImputationPlan) -> Result<Dataset, PreprocessError> {
    impute_rows(ds, plan, true)
}

/// Fills missing cells with the plan's class-agnostic values (used for
/// held-out rows under `TrainFoldOnly` scope, where consulting the label
/// would leak it).
pub fn impute_class_agnostic(
    ds: &Dataset,
    plan: &ImputationPlan,
) -> Result<Dataset, PreprocessError> {
    impute_rows(ds, plan, false)
}

/// Nominal attributes expand to one indicator column per allowed value.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NominalStrategy {
    #[default]
    OneHot,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingPolicy {
    pub nominal: NominalStrategy,
}

/// Dense numeric matrix with a row-aligned label vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub values: Matrix,
    pub feature_names: Vec<String>,
    /// true = positive class; consumers map to {1, 0} or {+1, -1}.
    pub labels: Vec<bool>,
}

impl FeatureMatrix {
    pub fn n_rows(&self) -> usize {
        self.values.rows()
    }

    pub fn n_features(&self) -> usize {
        self.values.cols()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.values.row(i)
    }

    pub fn select_rows(&self, indices: &[usize]) -> FeatureMatrix {
        let cols = self.n_features();
        let mut data = Vec::with_capacity(indices.len() * cols);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            data.extend_from_slice(self.values.row(i));
            labels.push(self.labels[i]);
        }
        FeatureMatrix {
            values: Matrix::new(indices.len(), cols, data),
            feature_names: self.feature_names.clone(),
            labels,
        }
    }

    /// Labels as ±1 (positive class = +1).
    pub fn sign_labels(&self) -> Vec<f64> {
        self.labels
            .iter()
            .map(|&p| if p { 1.0 } else { -1.0 })
            .collect()
    }

    /// Labels as {1, 0}.
    pub fn binary_labels(&self) -> Vec<f64> {
        self.labels
            .iter()
            .map(|&p| if p { 1.0 } else { 0.0 })
            .collect()
    }
}

/// Encodes a fully-imputed dataset into a [`FeatureMatrix`]: identity
/// columns for numeric-like attributes, one-hot columns (in allowed-value
/// order) for nominal ones, labels mapped positive → true.
pub fn encode(ds: &Dataset, _policy: EncodingPolicy) -> Result<FeatureMatrix, PreprocessError> {
    let schema = ds.schema();
    let mut feature_names = Vec::new();
    for attr in schema.attributes() {
        match &attr.kind {
            AttributeKind::Numeric | AttributeKind::DiscreteInteger => {
                feature_names.push(attr.name.clone());
            }
            AttributeKind::Nominal(values) => {
                for v in values {
                    feature_names.push(format!("{}={}", attr.name, v));
                }
            }
        }
    }
    let n_features = feature_names.len();
    let mut data = Vec::with_capacity(ds.n_rows() * n_features);
    let mut labels = Vec::with_capacity(ds.n_rows());
    for (row_idx, row) in ds.rows().iter().enumerate() {
        for (attr_idx, attr) in schema.attributes().iter().enumerate() {
            let cell = &row.cells[attr_idx];
            match (&attr.kind, cell) {
                (_, CellValue::Missing) => {
                    return Err(PreprocessError::ResidualMissing {
                        attribute: attr.name.clone(),
                        row: row_idx + 1,
                    })
                }
                (AttributeKind::Numeric | AttributeKind::DiscreteInteger, c) => {
                    data.push(c.as_f64().expect("numeric cell in numeric column"));
                }
                (AttributeKind::Nominal(values), CellValue::Token(t)) => {
                    for v in values {
                        data.push(if v == t { 1.0 } else { 0.0 });
                    }
                }
                (AttributeKind::Nominal(_), other) => {
                    unreachable!("non-token cell {other:?} in nominal column")
                }
            }
        }
        labels.push(row.label == schema.positive_label());
    }
    Ok(FeatureMatrix {
        values: Matrix::new(ds.n_rows(), n_features, data),
        feature_names,
        labels,
    })
}

const STD_EPSILON: f64 = 1e-12;

/// Per-feature mean and stddev (population normalization, floored at 1e-12).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationStats {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl StandardizationStats {
    pub fn fit(fm: &FeatureMatrix) -> StandardizationStats {
        let n = fm.n_rows().max(1) as f64;
        let d = fm.n_features();
        let mut means = vec![0.0; d];
        for i in 0..fm.n_rows() {
            for (m, v) in means.iter_mut().zip(fm.row(i)) {
                *m += v;
            }
        }
        for m in &mut means {
            *m /= n;
        }
        let mut vars = vec![0.0; d];
        for i in 0..fm.n_rows() {
            for ((var, v), m) in vars.iter_mut().zip(fm.row(i)).zip(&means) {
                *var += (v - m) * (v - m);
            }
        }
        let stds = vars
            .into_iter()
            .map(|v| (v / n).sqrt().max(STD_EPSILON))
            .collect();
        StandardizationStats { means, stds }
    }
}

/// Applies (x - mean) / std per column. When `stats` is `None` the stats
/// are fitted from the input itself.
pub fn standardize(
    fm: &FeatureMatrix,
    stats: Option<&StandardizationStats>,
) -> Result<(FeatureMatrix, StandardizationStats), PreprocessError> {
    let fitted;
    let stats = match stats {
        Some(s) => {
            if s.means.len() != fm.n_features() {
                return Err(PreprocessError::DimensionMismatch(format!(
                    "stats cover {} features, matrix has {}",
                    s.means.len(),
                    fm.n_features()
                )));
            }
            s
        }
        None => {
            fitted = StandardizationStats::fit(fm);
            &fitted
        }
    };
    let d = fm.n_features();
    let mut data = Vec::with_capacity(fm.n_rows() * d);
    for i in 0..fm.n_rows() {
        for ((v, m), s) in fm.row(i).iter().zip(&stats.means).zip(&stats.stds) {
            data.push((v - m) / s);
        }
    }
    Ok((
        FeatureMatrix {
            values: Matrix::new(fm.n_rows(), d, data),
            feature_names: fm.feature_names.clone(),
            labels: fm.labels.clone(),
        },
        stats.clone(),
    ))
}
