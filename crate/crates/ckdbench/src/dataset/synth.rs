//! Deterministic synthetic dataset generator, used as a test fixture
//! factory for classifier sanity checks.

use super::{Attribute, AttributeKind, CellValue, DataError, DataRow, Dataset, Schema};
use crate::rng::Rng;

#[derive(Debug, Clone)]
pub enum SynthKind {
    /// Per-class (mean, stddev).
    Numeric { pos: (f64, f64), neg: (f64, f64) },
    /// Token set with per-class sampling probabilities (must sum to 1).
    Nominal {
        values: Vec<String>,
        pos_probs: Vec<f64>,
        neg_probs: Vec<f64>,
    },
}

#[derive(Debug, Clone)]
pub struct SynthAttribute {
    pub name: String,
    pub kind: SynthKind,
}

#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub attributes: Vec<SynthAttribute>,
    /// Fraction of rows labeled positive; positive count = floor(n · fraction).
    pub positive_fraction: f64,
    pub positive_label: String,
    pub negative_label: String,
}

impl SynthSpec {
    /// Two well-separated class Gaussians on `dims` numeric attributes,
    /// means at ±separation, unit stddev.
    pub fn two_gaussians(dims: usize, separation: f64) -> SynthSpec {
        SynthSpec {
            attributes: (0..dims)
                .map(|i| SynthAttribute {
                    name: format!("x{i}"),
                    kind: SynthKind::Numeric {
                        pos: (separation, 1.0),
                        neg: (-separation, 1.0),
                    },
                })
                .collect(),
            positive_fraction: 0.5,
            positive_label: "pos".into(),
            negative_label: "neg".into(),
        }
    }
}

fn validate(spec: &SynthSpec, n: usize) -> Result<(), DataError> {
    if n == 0 {
        return Err(DataError::BadSpec("n must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&spec.positive_fraction) {
        return Err(DataError::BadSpec(
            "positive_fraction must be within [0, 1]".into(),
        ));
    }
    for attr in &spec.attributes {
        match &attr.kind {
            SynthKind::Numeric { pos, neg } => {
                if pos.1 < 0.0 || neg.1 < 0.0 {
                    return Err(DataError::BadSpec(format!(
                        "attribute '{}' has a negative stddev",
                        attr.name
                    )));
                }
            }
            SynthKind::Nominal {
                values,
                pos_probs,
                neg_probs,
            } => {
                if values.is_empty() {
                    return Err(DataError::BadSpec(format!(
                        "attribute '{}' has no nominal values",
                        attr.name
                    )));
                }
                for (cls, probs) in [("positive", pos_probs), ("negative", neg_probs)] {
                    if probs.len() != values.len() {
                        return Err(DataError::BadSpec(format!(
                            "attribute '{}': {cls} probability count mismatch",
                            attr.name
                        )));
                    }
                    if probs.iter().any(|p| *p < 0.0) {
                        return Err(DataError::BadSpec(format!(
                            "attribute '{}': negative {cls} probability",
                            attr.name
                        )));
                    }
                    let sum: f64 = probs.iter().sum();
                    if (sum - 1.0).abs() > 1e-9 {
                        return Err(DataError::BadSpec(format!(
                            "attribute '{}': {cls} probabilities sum to {sum}, not 1",
                            attr.name
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

fn sample_nominal(values: &[String], probs: &[f64], rng: &mut Rng) -> String {
    let u = rng.next_f64();
    let mut acc = 0.0;
    for (v, p) in values.iter().zip(probs) {
        acc += p;
        if u < acc {
            return v.clone();
        }
    }
    values.last().unwrap().clone()
}

/// Generates `n` rows (positives first) deterministically from `seed`.
pub fn synth_generate(spec: &SynthSpec, n: usize, seed: u64) -> Result<Dataset, DataError> {
    validate(spec, n)?;
    let schema = Schema::new(
        spec.attributes
            .iter()
            .map(|a| Attribute {
                name: a.name.clone(),
                label: a.name.clone(),
                kind: match &a.kind {
                    SynthKind::Numeric { .. } => AttributeKind::Numeric,
                    SynthKind::Nominal { values, .. } => AttributeKind::Nominal(values.clone()),
                },
            })
            .collect(),
        "class",
        &spec.positive_label,
        &spec.negative_label,
    )?;

    let n_pos = ((n as f64) * spec.positive_fraction).floor() as usize;
    let mut rng = Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let positive = i < n_pos;
        let cells = spec
            .attributes
            .iter()
            .map(|attr| match &attr.kind {
                SynthKind::Numeric { pos, neg } => {
                    let (mean, sd) = if positive { *pos } else { *neg };
                    CellValue::Real(mean + sd * rng.next_normal())
                }
                SynthKind::Nominal {
                    values,
                    pos_probs,
                    neg_probs,
                } => {
                    let probs = if positive { pos_probs } else { neg_probs };
                    CellValue::Token(sample_nominal(values, probs, &mut rng))
                }
            })
            .collect();
        rows.push(DataRow {
            cells,
            label: if positive {
                spec.positive_label.clone()
            } else {
                spec.negative_label.clone()
            },
        });
    }
    Ok(Dataset::from_parts(schema, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_fixed_seed() {
        let spec = SynthSpec::two_gaussians(1, 5.0);
        let a = synth_generate(&spec, 100, 7).unwrap();
        let b = synth_generate(&spec, 100, 7).unwrap();
        assert_eq!(a.to_csv_string(), b.to_csv_string());
        let c = synth_generate(&spec, 100, 8).unwrap();
        assert_ne!(a.to_csv_string(), c.to_csv_string());
    }

    #[test]
    fn exact_label_proportions() {
        let spec = SynthSpec::two_gaussians(1, 5.0);
        let ds = synth_generate(&spec, 100, 1).unwrap();
        let pos = ds.rows().iter().filter(|r| r.label == "pos").count();
        assert_eq!(pos, 50);
        // floor rule for odd n
        let ds = synth_generate(&spec, 101, 1).unwrap();
        let pos = ds.rows().iter().filter(|r| r.label == "pos").count();
        assert_eq!(pos, 50);
    }

    #[test]
    fn nearest_mean_oracle_separates_wide_gaussians() {
        // means ±5, stddev 1: Bayes error below 1e-6, so the nearest-mean
        // rule must get at least 99% of the training rows right
        let spec = SynthSpec::two_gaussians(2, 5.0);
        let ds = synth_generate(&spec, 200, 3).unwrap();
        let mut correct = 0;
        for row in ds.rows() {
            let v: Vec<f64> = row.cells.iter().map(|c| c.as_f64().unwrap()).collect();
            let d_pos: f64 = v.iter().map(|x| (x - 5.0).powi(2)).sum();
            let d_neg: f64 = v.iter().map(|x| (x + 5.0).powi(2)).sum();
            let predicted_pos = d_pos < d_neg;
            if predicted_pos == (row.label == "pos") {
                correct += 1;
            }
        }
        assert!(correct as f64 / 200.0 >= 0.99);
    }

    #[test]
    fn bad_specs_rejected() {
        let mut spec = SynthSpec::two_gaussians(1, 5.0);
        assert!(matches!(
            synth_generate(&spec, 0, 1),
            Err(DataError::BadSpec(_))
        ));
        spec.attributes[0].kind = SynthKind::Numeric {
            pos: (0.0, -1.0),
            neg: (0.0, 1.0),
        };
        assert!(matches!(
            synth_generate(&spec, 10, 1),
            Err(DataError::BadSpec(_))
        ));
        let nominal_bad = SynthSpec {
            attributes: vec![SynthAttribute {
                name: "c".into(),
                kind: SynthKind::Nominal {
                    values: vec!["a".into(), "b".into()],
                    pos_probs: vec![0.6, 0.5],
                    neg_probs: vec![0.5, 0.5],
                },
            }],
            positive_fraction: 0.5,
            positive_label: "pos".into(),
            negative_label: "neg".into(),
        };
        assert!(matches!(
            synth_generate(&nominal_bad, 10, 1),
            Err(DataError::BadSpec(_))
        ));
    }

    #[test]
    fn nominal_sampling_respects_probabilities() {
        let spec = SynthSpec {
            attributes: vec![SynthAttribute {
                name: "c".into(),
                kind: SynthKind::Nominal {
                    values: vec!["a".into(), "b".into()],
                    pos_probs: vec![1.0, 0.0],
                    neg_probs: vec![0.0, 1.0],
                },
            }],
            positive_fraction: 0.5,
            positive_label: "pos".into(),
            negative_label: "neg".into(),
        };
        let ds = synth_generate(&spec, 50, 11).unwrap();
        for row in ds.rows() {
            let expect = if row.label == "pos" { "a" } else { "b" };
            assert_eq!(row.cells[0], CellValue::Token(expect.into()));
        }
    }
}
