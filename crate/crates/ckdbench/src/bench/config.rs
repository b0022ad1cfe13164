//! Benchmark configuration: flat key = value pairs under [section]
//! headers, parsed strictly — an unknown section or key is an error, so a
//! typo in a hyperparameter name can never silently fall back to a default.

use super::BenchError;
use crate::classifiers::{
    ClassifierSpec, KnnMetric, KnnWeighting, SplitCriterion, Variant, ALL_VARIANTS,
};
use crate::preprocess::ImputationScope;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataFormat {
    Arff,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Text,
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub dataset_path: PathBuf,
    pub format: DataFormat,
    pub seed: u64,
    pub folds: usize,
    pub stratified: bool,
    pub imputation_scope: ImputationScope,
    pub output_dir: PathBuf,
    pub formats: Vec<OutputFormat>,
    pub archive_models: bool,
    /// Resolved per-variant specs, in canonical order.
    pub classifiers: Vec<ClassifierSpec>,
    /// FNV-1a of the raw config bytes, for provenance.
    pub config_hash: String,
}

pub fn hash_bytes(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x1000_0000_01b3);
    }
    format!("{h:016x}")
}

struct RawConfig {
    /// section -> key -> (line, value)
    sections: BTreeMap<String, BTreeMap<String, (usize, String)>>,
}

fn parse_sections(text: &str) -> Result<RawConfig, BenchError> {
    let mut sections: BTreeMap<String, BTreeMap<String, (usize, String)>> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let Some(name) = name.strip_suffix(']') else {
                return Err(BenchError::Config {
                    line: lineno,
                    msg: "unterminated section header".into(),
                });
            };
            let name = name.trim().to_string();
            sections.entry(name.clone()).or_default();
            current = Some(name);
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(BenchError::Config {
                line: lineno,
                msg: format!("expected 'key = value', found '{line}'"),
            });
        };
        let Some(section) = &current else {
            return Err(BenchError::Config {
                line: lineno,
                msg: "key outside any [section]".into(),
            });
        };
        let key = key.trim().to_string();
        let prev = sections
            .get_mut(section)
            .unwrap()
            .insert(key.clone(), (lineno, value.trim().to_string()));
        if prev.is_some() {
            return Err(BenchError::Config {
                line: lineno,
                msg: format!("duplicate key '{key}' in [{section}]"),
            });
        }
    }
    Ok(RawConfig { sections })
}

struct Section {
    name: String,
    entries: BTreeMap<String, (usize, String)>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key).map(|(_, v)| v)
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>, BenchError> {
        match self.entries.remove(key) {
            None => Ok(None),
            Some((line, v)) => v.parse::<T>().map(Some).map_err(|_| BenchError::Config {
                line,
                msg: format!("invalid value '{v}' for {key} in [{}]", self.name),
            }),
        }
    }

    fn finish(self) -> Result<(), BenchError> {
        if let Some((key, (line, _))) = self.entries.into_iter().next() {
            return Err(BenchError::Config {
                line,
                msg: format!("unknown key '{key}' in [{}]", self.name),
            });
        }
        Ok(())
    }
}

fn keyword_error(line: usize, key: &str, value: &str, allowed: &str) -> BenchError {
    BenchError::Config {
        line,
        msg: format!("invalid value '{value}' for {key}: expected one of {allowed}"),
    }
}

fn apply_overrides(spec: &mut ClassifierSpec, section: &mut Section) -> Result<(), BenchError> {
    let variant = spec.variant;
    let hp = &mut spec.hyperparameters;
    match variant {
        Variant::DecisionTree => {
            if let Some((line, v)) = section.entries.remove("criterion") {
                hp.tree.criterion = match v.as_str() {
                    "gini" => SplitCriterion::Gini,
                    "info_gain" => SplitCriterion::InfoGain,
                    _ => return Err(keyword_error(line, "criterion", &v, "gini, info_gain")),
                };
            }
            if let Some(v) = section.parse::<usize>("min_leaf")? {
                hp.tree.min_leaf = v;
            }
            if let Some((line, v)) = section.entries.remove("max_depth") {
                hp.tree.max_depth = match v.as_str() {
                    "none" => None,
                    other => Some(other.parse::<usize>().map_err(|_| {
                        keyword_error(line, "max_depth", other, "none or a positive integer")
                    })?),
                };
            }
        }
        Variant::LinearSvm | Variant::QuadraticSvm => {
            if let Some(v) = section.parse::<f64>("c")? {
                hp.svm.c = v;
            }
            if let Some(v) = section.parse::<f64>("tol")? {
                hp.svm.tol = v;
            }
            if let Some((line, v)) = section.entries.remove("max_passes") {
                hp.svm.max_passes = match v.as_str() {
                    "auto" => None,
                    other => Some(other.parse::<usize>().map_err(|_| {
                        keyword_error(line, "max_passes", other, "auto or a positive integer")
                    })?),
                };
            }
        }
        Variant::FineKnn
        | Variant::MediumKnn
        | Variant::CosineKnn
        | Variant::CubicKnn
        | Variant::WeightedKnn => {
            if let Some(v) = section.parse::<usize>("k")? {
                hp.knn.k = v;
            }
            if let Some((line, v)) = section.entries.remove("metric") {
                hp.knn.metric = match v.as_str() {
                    "euclidean" => KnnMetric::Euclidean,
                    "cosine" => KnnMetric::Cosine,
                    "minkowski3" => KnnMetric::Minkowski3,
                    _ => {
                        return Err(keyword_error(
                            line,
                            "metric",
                            &v,
                            "euclidean, cosine, minkowski3",
                        ))
                    }
                };
            }
            if let Some((line, v)) = section.entries.remove("weighting") {
                hp.knn.weighting = match v.as_str() {
                    "uniform" => KnnWeighting::Uniform,
                    "squared_inverse" => KnnWeighting::SquaredInverse,
                    _ => {
                        return Err(keyword_error(
                            line,
                            "weighting",
                            &v,
                            "uniform, squared_inverse",
                        ))
                    }
                };
            }
        }
        Variant::FfbpnnGd => {
            if let Some(v) = section.parse::<usize>("hidden_units")? {
                hp.nn.hidden_units = v;
            }
            if let Some(v) = section.parse::<f64>("learning_rate")? {
                hp.nn.learning_rate = v;
            }
            if let Some(v) = section.parse::<usize>("max_epochs")? {
                hp.nn.gd_max_epochs = v;
            }
        }
        Variant::FfbpnnLm => {
            if let Some(v) = section.parse::<usize>("hidden_units")? {
                hp.nn.hidden_units = v;
            }
            if let Some(v) = section.parse::<usize>("max_epochs")? {
                hp.nn.lm_max_epochs = v;
            }
            if let Some(v) = section.parse::<f64>("lm_damping")? {
                hp.nn.lm_damping = v;
            }
            if let Some(v) = section.parse::<f64>("lm_factor")? {
                hp.nn.lm_factor = v;
            }
        }
        _ => unreachable!("discriminant variants expose no hyperparameters"),
    }
    Ok(())
}

/// Parses a configuration document. Every key is validated; unknown keys,
/// unknown sections, duplicate keys and malformed values are all errors.
pub fn parse_config(text: &str) -> Result<BenchConfig, BenchError> {
    let mut raw = parse_sections(text)?;
    let mut take_section = |name: &str| -> Option<Section> {
        raw.sections.remove(name).map(|entries| Section {
            name: name.to_string(),
            entries,
        })
    };

    let mut dataset = take_section("dataset").ok_or(BenchError::Config {
        line: 0,
        msg: "missing [dataset] section".into(),
    })?;
    let dataset_path = PathBuf::from(dataset.take("path").ok_or(BenchError::Config {
        line: 0,
        msg: "missing dataset.path".into(),
    })?);
    let format = match dataset.take("format").as_deref() {
        None | Some("arff") => DataFormat::Arff,
        Some("csv") => DataFormat::Csv,
        Some(other) => {
            return Err(BenchError::Config {
                line: 0,
                msg: format!("invalid dataset.format '{other}': expected arff or csv"),
            })
        }
    };
    dataset.finish()?;

    let mut cv = take_section("cv").unwrap_or(Section {
        name: "cv".to_string(),
        entries: BTreeMap::new(),
    });
    let seed = cv.parse::<u64>("seed")?.unwrap_or(1);
    let folds = cv.parse::<usize>("folds")?.unwrap_or(5);
    let stratified = cv.parse::<bool>("stratified")?.unwrap_or(false);
    let imputation_scope = match cv.take("imputation_scope").as_deref() {
        None | Some("whole_dataset") => ImputationScope::WholeDataset,
        Some("train_fold_only") => ImputationScope::TrainFoldOnly,
        Some(other) => return Err(BenchError::Config {
            line: 0,
            msg: format!(
                "invalid cv.imputation_scope '{other}': expected whole_dataset or train_fold_only"
            ),
        }),
    };
    cv.finish()?;
    if folds < 2 {
        return Err(BenchError::Config {
            line: 0,
            msg: format!("cv.folds must be at least 2, got {folds}"),
        });
    }

    let mut run = take_section("run").unwrap_or(Section {
        name: "run".to_string(),
        entries: BTreeMap::new(),
    });
    let classifier_list = run.take("classifiers").unwrap_or_else(|| "all".to_string());
    let output_dir = PathBuf::from(run.take("output_dir").unwrap_or_else(|| "out".to_string()));
    let formats_value = run
        .take("formats")
        .unwrap_or_else(|| "text,csv,json,svg".to_string());
    let archive_models = run.parse::<bool>("archive_models")?.unwrap_or(false);
    run.finish()?;

    let mut formats = Vec::new();
    for tok in formats_value.split(',') {
        let fmt = match tok.trim() {
            "text" => OutputFormat::Text,
            "csv" => OutputFormat::Csv,
            "json" => OutputFormat::Json,
            "svg" => OutputFormat::Svg,
            other => {
                return Err(BenchError::Config {
                    line: 0,
                    msg: format!("invalid output format '{other}'"),
                })
            }
        };
        if !formats.contains(&fmt) {
            formats.push(fmt);
        }
    }

    let variants: Vec<Variant> = if classifier_list.trim() == "all" {
        ALL_VARIANTS.to_vec()
    } else {
        let mut out = Vec::new();
        for tok in classifier_list.split(',') {
            let id = tok.trim();
            let v = Variant::from_id(id).ok_or_else(|| BenchError::Config {
                line: 0,
                msg: format!("unknown classifier '{id}'"),
            })?;
            if !out.contains(&v) {
                out.push(v);
            }
        }
        out
    };
    if variants.is_empty() {
        return Err(BenchError::Config {
            line: 0,
            msg: "classifier list is empty".into(),
        });
    }

    let mut classifiers = Vec::with_capacity(variants.len());
    for variant in variants {
        let mut spec = ClassifierSpec::new(variant).with_seed(seed);
        let section_name = format!("hyperparameters.{}", variant.canonical_id());
        if let Some(entries) = raw.sections.remove(&section_name) {
            if matches!(
                variant,
                Variant::LinearDiscriminant | Variant::QuadraticDiscriminant
            ) {
                if let Some((key, (line, _))) = entries.into_iter().next() {
                    return Err(BenchError::Config {
                        line,
                        msg: format!("unknown key '{key}' in [{section_name}]"),
                    });
                }
            } else {
                let mut section = Section {
                    name: section_name.clone(),
                    entries,
                };
                apply_overrides(&mut spec, &mut section)?;
                section.finish()?;
            }
        }
        spec.validate().map_err(|e| BenchError::Config {
            line: 0,
            msg: format!("[hyperparameters.{}]: {e}", variant.canonical_id()),
        })?;
        classifiers.push(spec);
    }

    // any section left over is unknown
    if let Some((name, entries)) = raw.sections.into_iter().next() {
        let line = entries.values().map(|(l, _)| *l).min().unwrap_or(0);
        return Err(BenchError::Config {
            line,
            msg: format!("unknown section [{name}]"),
        });
    }

    Ok(BenchConfig {
        dataset_path,
        format,
        seed,
        folds,
        stratified,
        imputation_scope,
        output_dir,
        formats,
        archive_models,
        classifiers,
        config_hash: hash_bytes(text.as_bytes()),
    })
}

pub fn parse_config_file(path: &Path) -> Result<BenchConfig, BenchError> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}
