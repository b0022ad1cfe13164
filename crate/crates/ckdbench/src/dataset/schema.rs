//! Canonical chronic-kidney-disease schema and schema application.
//!
//! Attribute identification is positional: the short header codes of the
//! UCI file map onto this list by order, so header spelling differences
//! never matter. The class column is the last column.

use super::arff::RawTable;
use super::{Attribute, AttributeKind, CellValue, DataError, DataRow, Dataset, Schema};

pub const CKD_SCHEMA_VERSION: u32 = 1;

fn nominal(values: &[&str]) -> AttributeKind {
    AttributeKind::Nominal(values.iter().map(|v| v.to_string()).collect())
}

/// The embedded 24-attribute CKD schema, in file order.
pub fn canonical_ckd_schema() -> Schema {
    let attr = |name: &str, label: &str, kind: AttributeKind| Attribute {
        name: name.into(),
        label: label.into(),
        kind,
    };
    Schema::new(
        vec![
            attr("age", "Age", AttributeKind::DiscreteInteger),
            attr("bp", "Blood pressure", AttributeKind::DiscreteInteger),
            attr(
                "sg",
                "Specific gravity",
                nominal(&["1.005", "1.010", "1.015", "1.020", "1.025"]),
            ),
            attr("al", "Albumin", nominal(&["0", "1", "2", "3", "4", "5"])),
            attr("su", "Sugar", nominal(&["0", "1", "2", "3", "4", "5"])),
            attr("rbc", "Red blood cells", nominal(&["normal", "abnormal"])),
            attr("pc", "Pus cell", nominal(&["normal", "abnormal"])),
            attr(
                "pcc",
                "Pus cell clumps",
                nominal(&["present", "notpresent"]),
            ),
            attr("ba", "Bacteria", nominal(&["present", "notpresent"])),
            attr(
                "bgr",
                "Blood glucose random",
                AttributeKind::DiscreteInteger,
            ),
            attr("bu", "Blood urea", AttributeKind::DiscreteInteger),
            attr("sc", "Serum creatinine", AttributeKind::Numeric),
            attr("sod", "Sodium", AttributeKind::DiscreteInteger),
            attr("pot", "Potassium", AttributeKind::Numeric),
            attr("hemo", "Hemoglobin", AttributeKind::Numeric),
            attr("pcv", "Packed cell volume", AttributeKind::DiscreteInteger),
            attr("wc", "WBC count", AttributeKind::DiscreteInteger),
            attr("rc", "RBC count", AttributeKind::Numeric),
            attr("htn", "Hypertension", nominal(&["yes", "no"])),
            attr("dm", "Diabetes mellitus", nominal(&["yes", "no"])),
            attr("cad", "Coronary artery disease", nominal(&["yes", "no"])),
            attr("appet", "Appetite", nominal(&["good", "poor"])),
            attr("pe", "Pedal edema", nominal(&["yes", "no"])),
            attr("ane", "Anemia", nominal(&["yes", "no"])),
        ],
        "class",
        "ckd",
        "notckd",
    )
    .expect("canonical schema is valid")
}

fn parse_cell(
    token: Option<&String>,
    attr: &Attribute,
    row: usize,
) -> Result<CellValue, DataError> {
    let Some(tok) = token else {
        return Ok(CellValue::Missing);
    };
    match &attr.kind {
        AttributeKind::DiscreteInteger => match tok.parse::<f64>() {
            Ok(v) if v.is_finite() => {
                if v.fract() == 0.0 && v.abs() < i64::MAX as f64 {
                    Ok(CellValue::Integer(v as i64))
                } else {
                    // raw UCI file has fractional values in integer-declared
                    // columns (bu, sod); keep them rather than reject the file
                    Ok(CellValue::Real(v))
                }
            }
            _ => Err(DataError::TypeMismatch {
                row,
                attribute: attr.name.clone(),
                token: tok.clone(),
                expected: "discrete integer",
            }),
        },
        AttributeKind::Numeric => match tok.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(CellValue::Real(v)),
            _ => Err(DataError::TypeMismatch {
                row,
                attribute: attr.name.clone(),
                token: tok.clone(),
                expected: "numeric",
            }),
        },
        AttributeKind::Nominal(values) => {
            // tokens arrive lower-cased and trimmed; allowed values are
            // matched case-insensitively, numerically-looking ones (e.g.
            // specific gravity) by exact decimal text
            match values.iter().find(|v| v.to_lowercase() == *tok) {
                Some(v) => Ok(CellValue::Token(v.to_lowercase())),
                None => Err(DataError::DomainViolation {
                    row,
                    attribute: attr.name.clone(),
                    token: tok.clone(),
                }),
            }
        }
    }
}

/// Validates a raw table against a schema, producing a typed [`Dataset`].
///
/// The raw table must have exactly one more column than the schema has
/// predictors; the last column is the class.
pub fn apply_schema(raw: &RawTable, schema: &Schema) -> Result<Dataset, DataError> {
    let expected = schema.n_attributes() + 1;
    if raw.attribute_names.len() != expected {
        return Err(DataError::SchemaInvalid(format!(
            "schema expects {expected} columns ({} predictors + class), file declares {}",
            schema.n_attributes(),
            raw.attribute_names.len()
        )));
    }
    let positive = schema.positive_label().to_lowercase();
    let negative = schema.negative_label().to_lowercase();
    let mut rows = Vec::with_capacity(raw.rows.len());
    for (i, tokens) in raw.rows.iter().enumerate() {
        let row_no = i + 1;
        let mut cells = Vec::with_capacity(schema.n_attributes());
        for (j, attr) in schema.attributes().iter().enumerate() {
            cells.push(parse_cell(tokens[j].as_ref(), attr, row_no)?);
        }
        let label = match tokens[schema.n_attributes()].as_ref() {
            None => return Err(DataError::LabelMissing { row: row_no }),
            Some(tok) if *tok == positive => schema.positive_label().to_string(),
            Some(tok) if *tok == negative => schema.negative_label().to_string(),
            Some(tok) => {
                return Err(DataError::DomainViolation {
                    row: row_no,
                    attribute: schema.class_attribute().to_string(),
                    token: tok.clone(),
                })
            }
        };
        rows.push(DataRow { cells, label });
    }
    Ok(Dataset::from_parts(schema.clone(), rows))
}
