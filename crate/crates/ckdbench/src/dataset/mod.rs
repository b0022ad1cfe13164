//! Dataset ingestion and validation for the chronic kidney disease study:
//! ARFF/CSV parsing, schema enforcement against the canonical 24-attribute
//! definition, dataset summaries, and a synthetic-data generator for tests.

mod arff;
mod csv;
mod schema;
mod synth;

pub use arff::{parse_arff, RawTable};
pub use csv::parse_csv;
pub use schema::{apply_schema, canonical_ckd_schema, CKD_SCHEMA_VERSION};
pub use synth::{synth_generate, SynthAttribute, SynthKind, SynthSpec};

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("malformed input at line {line}: {msg}")]
    MalformedHeader { line: usize, msg: String },
    #[error("no data rows")]
    EmptyData,
    #[error("row {row}, attribute '{attribute}': token '{token}' not in the allowed domain")]
    DomainViolation {
        row: usize,
        attribute: String,
        token: String,
    },
    #[error("row {row}: class label is missing")]
    LabelMissing { row: usize },
    #[error(
        "row {row}, attribute '{attribute}': token '{token}' is not valid for a {expected} column"
    )]
    TypeMismatch {
        row: usize,
        attribute: String,
        token: String,
        expected: &'static str,
    },
    #[error("invalid schema: {0}")]
    SchemaInvalid(String),
    #[error("invalid synthesis spec: {0}")]
    BadSpec(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Domain of one attribute, per the canonical schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttributeKind {
    DiscreteInteger,
    Numeric,
    /// Allowed tokens, in declaration order (order is observable: it fixes
    /// one-hot column order and mode tie-breaking).
    Nominal(Vec<String>),
}

impl AttributeKind {
    pub fn is_numeric_like(&self) -> bool {
        matches!(
            self,
            AttributeKind::DiscreteInteger | AttributeKind::Numeric
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attribute {
    /// Short token used in files and plans (e.g. "hemo").
    pub name: String,
    /// Human-readable name for reports (e.g. "Hemoglobin").
    pub label: String,
    pub kind: AttributeKind,
}

/// Ordered attribute list plus the class attribute definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub schema_version: u32,
    attributes: Vec<Attribute>,
    class_attribute: String,
    positive_label: String,
    negative_label: String,
}

impl Schema {
    pub fn new(
        attributes: Vec<Attribute>,
        class_attribute: &str,
        positive_label: &str,
        negative_label: &str,
    ) -> Result<Self, DataError> {
        let mut seen = std::collections::BTreeSet::new();
        for attr in &attributes {
            if !seen.insert(attr.name.clone()) {
                return Err(DataError::SchemaInvalid(format!(
                    "duplicate attribute name '{}'",
                    attr.name
                )));
            }
            if let AttributeKind::Nominal(values) = &attr.kind {
                if values.is_empty() {
                    return Err(DataError::SchemaInvalid(format!(
                        "attribute '{}' has an empty nominal domain",
                        attr.name
                    )));
                }
                let mut vset = std::collections::BTreeSet::new();
                for v in values {
                    if !vset.insert(v) {
                        return Err(DataError::SchemaInvalid(format!(
                            "attribute '{}' repeats nominal value '{}'",
                            attr.name, v
                        )));
                    }
                }
            }
        }
        if seen.contains(class_attribute) {
            return Err(DataError::SchemaInvalid(format!(
                "class attribute '{class_attribute}' clashes with a predictor"
            )));
        }
        if positive_label == negative_label {
            return Err(DataError::SchemaInvalid(
                "positive and negative labels must differ".into(),
            ));
        }
        Ok(Schema {
            schema_version: CKD_SCHEMA_VERSION,
            attributes,
            class_attribute: class_attribute.to_string(),
            positive_label: positive_label.to_string(),
            negative_label: negative_label.to_string(),
        })
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn attribute(&self, idx: usize) -> &Attribute {
        &self.attributes[idx]
    }

    pub fn n_attributes(&self) -> usize {
        self.attributes.len()
    }

    pub fn class_attribute(&self) -> &str {
        &self.class_attribute
    }

    pub fn positive_label(&self) -> &str {
        &self.positive_label
    }

    pub fn negative_label(&self) -> &str {
        &self.negative_label
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema serializes")
    }
}

/// One cell of a parsed dataset. Numeric text with a fractional part is
/// retained as `Real` even under a `DiscreteInteger` kind, because the raw
/// UCI file contains such values (e.g. blood urea 1.5).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellValue {
    Missing,
    Integer(i64),
    Real(f64),
    Token(String),
}

impl CellValue {
    pub fn is_missing(&self) -> bool {
        matches!(self, CellValue::Missing)
    }

    /// Numeric view of the cell, if it has one.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            CellValue::Integer(v) => Some(*v as f64),
            CellValue::Real(v) => Some(*v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataRow {
    pub cells: Vec<CellValue>,
    pub label: String,
}

/// Schema-validated dataset. Immutable after construction; all cells are
/// either `Missing` or in-domain for their attribute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    schema: Schema,
    rows: Vec<DataRow>,
}

impl Dataset {
    pub(crate) fn from_parts(schema: Schema, rows: Vec<DataRow>) -> Self {
        Dataset { schema, rows }
    }

    /// Builds a dataset from already-typed rows, validating every cell
    /// against the schema (kind, domain membership) and every label.
    pub fn new(schema: Schema, rows: Vec<DataRow>) -> Result<Self, DataError> {
        for (i, row) in rows.iter().enumerate() {
            let row_no = i + 1;
            if row.cells.len() != schema.n_attributes() {
                return Err(DataError::SchemaInvalid(format!(
                    "row {row_no} has {} cells, schema has {} attributes",
                    row.cells.len(),
                    schema.n_attributes()
                )));
            }
            if row.label != schema.positive_label() && row.label != schema.negative_label() {
                return Err(DataError::DomainViolation {
                    row: row_no,
                    attribute: schema.class_attribute().to_string(),
                    token: row.label.clone(),
                });
            }
            for (cell, attr) in row.cells.iter().zip(schema.attributes()) {
                let ok = match (cell, &attr.kind) {
                    (CellValue::Missing, _) => true,
                    (CellValue::Integer(_), AttributeKind::DiscreteInteger) => true,
                    (CellValue::Real(v), AttributeKind::DiscreteInteger) => v.is_finite(),
                    (CellValue::Real(v), AttributeKind::Numeric) => v.is_finite(),
                    (CellValue::Token(t), AttributeKind::Nominal(values)) => {
                        values.iter().any(|v| v == t)
                    }
                    _ => false,
                };
                if !ok {
                    return Err(DataError::TypeMismatch {
                        row: row_no,
                        attribute: attr.name.clone(),
                        token: format!("{cell:?}"),
                        expected: match attr.kind {
                            AttributeKind::DiscreteInteger => "discrete integer",
                            AttributeKind::Numeric => "numeric",
                            AttributeKind::Nominal(_) => "nominal",
                        },
                    });
                }
            }
        }
        Ok(Dataset { schema, rows })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn rows(&self) -> &[DataRow] {
        &self.rows
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn is_positive(&self, row: usize) -> bool {
        self.rows[row].label == self.schema.positive_label
    }

    /// Dataset restricted to the given row indices (used by fold-scoped
    /// preprocessing).
    pub fn select_rows(&self, indices: &[usize]) -> Dataset {
        Dataset {
            schema: self.schema.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    /// Serializes back to ARFF text. Parsing the output yields an identical
    /// dataset (token normalization is idempotent).
    pub fn to_arff_string(&self, relation: &str) -> String {
        let mut out = String::new();
        out.push_str(&format!("@relation {relation}\n"));
        for attr in self.schema.attributes() {
            match &attr.kind {
                AttributeKind::DiscreteInteger | AttributeKind::Numeric => {
                    out.push_str(&format!("@attribute {} numeric\n", attr.name));
                }
                AttributeKind::Nominal(values) => {
                    out.push_str(&format!(
                        "@attribute {} {{{}}}\n",
                        attr.name,
                        values.join(",")
                    ));
                }
            }
        }
        out.push_str(&format!(
            "@attribute {} {{{},{}}}\n@data\n",
            self.schema.class_attribute(),
            self.schema.positive_label(),
            self.schema.negative_label()
        ));
        for row in &self.rows {
            let mut fields: Vec<String> = row.cells.iter().map(cell_to_text).collect();
            fields.push(row.label.clone());
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    /// Serializes to CSV with a header row; same missing marker.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        let mut header: Vec<&str> = self
            .schema
            .attributes()
            .iter()
            .map(|a| a.name.as_str())
            .collect();
        header.push(self.schema.class_attribute());
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let mut fields: Vec<String> = row.cells.iter().map(cell_to_text).collect();
            fields.push(row.label.clone());
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}

fn cell_to_text(cell: &CellValue) -> String {
    match cell {
        CellValue::Missing => "?".to_string(),
        CellValue::Integer(v) => v.to_string(),
        CellValue::Real(v) => {
            // keep round-trippable decimal text
            let s = format!("{v}");
            s
        }
        CellValue::Token(t) => t.clone(),
    }
}

/// Per-attribute slice of a [`Summary`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeSummary {
    pub name: String,
    pub missing: usize,
    /// Observed numeric range, for numeric-like attributes with data.
    pub min: Option<f64>,
    pub max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub rows: usize,
    pub predictors: usize,
    pub positive_label: String,
    pub negative_label: String,
    pub positive_count: usize,
    pub negative_count: usize,
    pub attributes: Vec<AttributeSummary>,
}

impl Summary {
    pub fn total_missing(&self) -> usize {
        self.attributes.iter().map(|a| a.missing).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }

    pub fn missing_by_attribute(&self) -> BTreeMap<&str, usize> {
        self.attributes
            .iter()
            .map(|a| (a.name.as_str(), a.missing))
            .collect()
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("rows: {}\n", self.rows));
        out.push_str(&format!("predictors: {}\n", self.predictors));
        out.push_str(&format!(
            "class {}: {}\nclass {}: {}\n",
            self.positive_label, self.positive_count, self.negative_label, self.negative_count
        ));
        out.push_str("attribute      missing  min        max\n");
        for a in &self.attributes {
            let fmt = |v: Option<f64>| match v {
                Some(x) => format!("{x:<10}"),
                None => format!("{:<10}", "-"),
            };
            out.push_str(&format!(
                "{:<14} {:>7}  {} {}\n",
                a.name,
                a.missing,
                fmt(a.min),
                fmt(a.max)
            ));
        }
        out
    }
}

/// Row count, class counts, per-attribute missing counts and numeric ranges.
pub fn summarize(ds: &Dataset) -> Summary {
    let schema = ds.schema();
    let mut positive = 0usize;
    let mut attributes: Vec<AttributeSummary> = schema
        .attributes()
        .iter()
        .map(|a| AttributeSummary {
            name: a.name.clone(),
            missing: 0,
            min: None,
            max: None,
        })
        .collect();
    for row in ds.rows() {
        if row.label == schema.positive_label() {
            positive += 1;
        }
        for (cell, summary) in row.cells.iter().zip(attributes.iter_mut()) {
            match cell {
                CellValue::Missing => summary.missing += 1,
                other => {
                    if let Some(v) = other.as_f64() {
                        summary.min = Some(summary.min.map_or(v, |m: f64| m.min(v)));
                        summary.max = Some(summary.max.map_or(v, |m: f64| m.max(v)));
                    }
                }
            }
        }
    }
    Summary {
        rows: ds.n_rows(),
        predictors: schema.n_attributes(),
        positive_label: schema.positive_label().to_string(),
        negative_label: schema.negative_label().to_string(),
        positive_count: positive,
        negative_count: ds.n_rows() - positive,
        attributes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_dataset() -> Dataset {
        let schema = Schema::new(
            vec![
                Attribute {
                    name: "x".into(),
                    label: "X".into(),
                    kind: AttributeKind::Numeric,
                },
                Attribute {
                    name: "c".into(),
                    label: "C".into(),
                    kind: AttributeKind::Nominal(vec!["yes".into(), "no".into()]),
                },
            ],
            "class",
            "pos",
            "neg",
        )
        .unwrap();
        Dataset::from_parts(
            schema,
            vec![
                DataRow {
                    cells: vec![CellValue::Real(1.5), CellValue::Token("yes".into())],
                    label: "pos".into(),
                },
                DataRow {
                    cells: vec![CellValue::Missing, CellValue::Token("no".into())],
                    label: "neg".into(),
                },
            ],
        )
    }

    #[test]
    fn summarize_counts() {
        let ds = tiny_dataset();
        let s = summarize(&ds);
        assert_eq!(s.rows, 2);
        assert_eq!(s.positive_count, 1);
        assert_eq!(s.negative_count, 1);
        assert_eq!(s.attributes[0].missing, 1);
        assert_eq!(s.attributes[0].min, Some(1.5));
        assert_eq!(s.attributes[1].missing, 0);
        assert_eq!(s.positive_count + s.negative_count, s.rows);
    }

    #[test]
    fn summarize_empty() {
        let ds = Dataset::from_parts(tiny_dataset().schema().clone(), vec![]);
        let s = summarize(&ds);
        assert_eq!(s.rows, 0);
        assert_eq!(s.positive_count, 0);
        assert_eq!(s.negative_count, 0);
        assert!(s.attributes.iter().all(|a| a.missing == 0));
    }

    #[test]
    fn schema_rejects_duplicates() {
        let dup = Schema::new(
            vec![
                Attribute {
                    name: "x".into(),
                    label: "X".into(),
                    kind: AttributeKind::Numeric,
                },
                Attribute {
                    name: "x".into(),
                    label: "X2".into(),
                    kind: AttributeKind::Numeric,
                },
            ],
            "class",
            "pos",
            "neg",
        );
        assert!(matches!(dup, Err(DataError::SchemaInvalid(_))));
    }

    #[test]
    fn schema_rejects_equal_labels() {
        let bad = Schema::new(vec![], "class", "pos", "pos");
        assert!(matches!(bad, Err(DataError::SchemaInvalid(_))));
    }

    #[test]
    fn schema_rejects_duplicate_nominal_values() {
        let bad = Schema::new(
            vec![Attribute {
                name: "x".into(),
                label: "X".into(),
                kind: AttributeKind::Nominal(vec!["a".into(), "a".into()]),
            }],
            "class",
            "pos",
            "neg",
        );
        assert!(matches!(bad, Err(DataError::SchemaInvalid(_))));
    }
}
