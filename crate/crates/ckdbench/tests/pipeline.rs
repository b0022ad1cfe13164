//! Integration tests against the bundled UCI file and the CLI surface:
//! frozen imputation oracle values, round-trips, leave-one-out behavior,
//! model serialization and process exit codes.

use ckdbench::bench::{self, parse_config, DataFormat};
use ckdbench::classifiers::{self, ClassifierSpec, Variant, ALL_VARIANTS};
use ckdbench::dataset::{apply_schema, parse_arff, parse_csv, summarize, CellValue};
use ckdbench::eval::{cross_validate, kfold_partition, PipelineOptions};
use ckdbench::preprocess::{
    build_imputation_plan, encode, impute, standardize, EncodingPolicy, ImputationScope,
};
use std::path::Path;
use std::process::Command;

const DATA: &str = concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/../../data/chronic_kidney_disease_full.arff"
);

fn load_ckd() -> ckdbench::Dataset {
    bench::load_dataset(Path::new(DATA), DataFormat::Arff).unwrap()
}

/// Brute-force class-conditional column mean straight off the raw text,
/// no parser types involved.
fn raw_class_mean(column: usize, class: &str) -> f64 {
    let text = std::fs::read_to_string(DATA).unwrap();
    let mut in_data = false;
    let mut sum = 0.0;
    let mut count = 0usize;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if !in_data {
            in_data = line.to_lowercase().starts_with("@data");
            continue;
        }
        let mut fields: Vec<&str> = line.split(',').map(|t| t.trim()).collect();
        if fields.len() == 26 {
            let pos = fields.iter().position(|f| f.is_empty()).unwrap();
            fields.remove(pos);
        }
        if fields[24].to_lowercase() != class || fields[column] == "?" {
            continue;
        }
        sum += fields[column].parse::<f64>().unwrap();
        count += 1;
    }
    sum / count as f64
}

#[test]
fn hemoglobin_ckd_fill_matches_raw_file_oracle() {
    let ds = load_ckd();
    let plan = build_imputation_plan(&ds, ImputationScope::WholeDataset).unwrap();
    let hemo_idx = 14; // hemoglobin column in schema order
    let Some(CellValue::Real(fill)) = plan.fill_for(hemo_idx, "ckd") else {
        panic!("expected a real fill for hemoglobin");
    };
    // value frozen from a pre-build scan of the raw file
    assert!((fill - 10.647549019608).abs() < 1e-9, "fill {fill}");
    // and the live independent oracle agrees
    assert!((fill - raw_class_mean(14, "ckd")).abs() < 1e-9);
}

#[test]
fn more_class_conditional_fills_match_the_oracle() {
    let ds = load_ckd();
    let plan = build_imputation_plan(&ds, ImputationScope::WholeDataset).unwrap();
    // (column, class, frozen mean from the pre-build scan)
    let cases = [
        (0usize, "ckd", 54.541322314050), // age
        (10, "notckd", 32.798611111111),  // blood urea
        (12, "ckd", 133.901785714286),    // sodium
        (14, "notckd", 15.188194444444),  // hemoglobin
    ];
    for (col, class, frozen) in cases {
        let Some(CellValue::Real(fill)) = plan.fill_for(col, class) else {
            panic!("expected real fill at column {col}");
        };
        assert!(
            (fill - frozen).abs() < 1e-9,
            "column {col} class {class}: {fill} vs frozen {frozen}"
        );
        assert!((fill - raw_class_mean(col, class)).abs() < 1e-9);
    }
    // nominal modes frozen from the same scan
    let modes = [
        (5usize, "ckd", "normal"), // red blood cells: 60 normal vs 47 abnormal
        (18, "notckd", "no"),      // hypertension: 148 no
        (21, "ckd", "good"),       // appetite: 168 good vs 82 poor
    ];
    for (col, class, token) in modes {
        assert_eq!(
            plan.fill_for(col, class),
            Some(&CellValue::Token(token.to_string())),
            "mode mismatch at column {col}"
        );
    }
}

#[test]
fn imputed_ckd_has_no_missing_and_preserves_observed_cells() {
    let ds = load_ckd();
    let plan = build_imputation_plan(&ds, ImputationScope::WholeDataset).unwrap();
    let imputed = impute(&ds, &plan).unwrap();
    let summary = summarize(&imputed);
    assert_eq!(summary.total_missing(), 0);
    assert_eq!(summary.rows, 400);
    for (orig, imp) in ds.rows().iter().zip(imputed.rows()) {
        for (o, i) in orig.cells.iter().zip(&imp.cells) {
            if !o.is_missing() {
                assert_eq!(o, i);
            }
        }
    }
    // plan JSON export carries attribute -> class -> fill
    let json: serde_json::Value = serde_json::from_str(&plan.to_json()).unwrap();
    let fills = json["fills"].as_array().unwrap();
    assert_eq!(fills.len(), 24);
    assert_eq!(fills[14]["attribute"], "hemo");
    assert!(fills[14]["by_class"]["ckd"]["real"].as_f64().is_some());
}

#[test]
fn real_file_round_trips_through_arff_and_csv() {
    let ds = load_ckd();
    let schema = ckdbench::dataset::canonical_ckd_schema();
    let arff = ds.to_arff_string("chronic_kidney_disease");
    let again = apply_schema(&parse_arff(&arff).unwrap(), &schema).unwrap();
    assert_eq!(again, ds);
    let csv = ds.to_csv_string();
    let again = apply_schema(&parse_csv(&csv).unwrap(), &schema).unwrap();
    assert_eq!(again, ds);
}

#[test]
fn standardized_ckd_encoding_is_finite_and_48_wide() {
    let ds = load_ckd();
    let plan = build_imputation_plan(&ds, ImputationScope::WholeDataset).unwrap();
    let imputed = impute(&ds, &plan).unwrap();
    let fm = encode(&imputed, EncodingPolicy::default()).unwrap();
    assert_eq!(fm.n_features(), 48);
    assert_eq!(fm.n_rows(), 400);
    let (std_fm, _) = standardize(&fm, None).unwrap();
    assert!(std_fm.values.is_finite());
}

#[test]
fn gd_training_loss_never_exceeds_initial_on_standardized_ckd() {
    use ckdbench::classifiers::nn::{mse, train_gd};
    use ckdbench::classifiers::{Activation, Network};
    let ds = load_ckd();
    let plan = build_imputation_plan(&ds, ImputationScope::WholeDataset).unwrap();
    let imputed = impute(&ds, &plan).unwrap();
    let fm = encode(&imputed, EncodingPolicy::default()).unwrap();
    let (fm, _) = standardize(&fm, None).unwrap();
    let targets = fm.binary_labels();
    let mut rng = ckdbench::rng::Rng::seed_from_u64(42);
    let mut net = Network::init(&[fm.n_features(), 10, 1], Activation::Sigmoid, &mut rng);
    let initial = mse(&net, &fm.values, &targets);
    // default learning rate; a shorter budget keeps the test quick and the
    // monotone claim is about the endpoints
    let final_loss = train_gd(&mut net, &fm.values, &targets, 0.05, 400).unwrap();
    assert!(
        final_loss <= initial,
        "final {final_loss} above initial {initial}"
    );
}

#[test]
fn leave_one_out_run_completes_with_full_pooled_total() {
    let config = parse_config(&format!(
        "[dataset]\npath = {DATA}\n[cv]\nseed = 2\nfolds = 400\n[run]\nclassifiers = fine_knn\n"
    ))
    .unwrap();
    let report = bench::run_benchmark(&config).unwrap();
    let result = report.entries[0].result.as_ref().unwrap();
    assert_eq!(result.pooled_confusion.total(), 400);
    assert_eq!(result.per_fold.len(), 400);
}

#[test]
fn trained_models_round_trip_through_json() {
    let ds = load_ckd();
    let plan = build_imputation_plan(&ds, ImputationScope::WholeDataset).unwrap();
    let imputed = impute(&ds, &plan).unwrap();
    let fm = encode(&imputed, EncodingPolicy::default()).unwrap();
    let (std_fm, _) = standardize(&fm, None).unwrap();
    // one model per family is enough for the serialization contract
    for variant in [
        Variant::DecisionTree,
        Variant::QuadraticDiscriminant,
        Variant::LinearSvm,
        Variant::FineKnn,
        Variant::FfbpnnLm,
    ] {
        let x = if variant.wants_standardization() {
            &std_fm
        } else {
            &fm
        };
        let spec = ClassifierSpec::new(variant).with_seed(4);
        let model = classifiers::fit(&spec, x).unwrap();
        let json = model.to_json();
        let back: classifiers::TrainedModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, model, "{variant:?} JSON round trip");
        assert_eq!(
            classifiers::predict(&back, x).unwrap(),
            classifiers::predict(&model, x).unwrap()
        );
    }
}

#[test]
fn eval_result_json_round_trips() {
    let ds = load_ckd();
    let labels: Vec<bool> = (0..ds.n_rows()).map(|i| ds.is_positive(i)).collect();
    let plan = kfold_partition(400, 5, 6, true, &labels).unwrap();
    let spec = ClassifierSpec::new(Variant::MediumKnn).with_seed(6);
    let result = cross_validate(&spec, &ds, &plan, &PipelineOptions::default()).unwrap();
    let back: ckdbench::eval::EvalResult = serde_json::from_str(&result.to_json()).unwrap();
    assert_eq!(back, result);
    // stratified folds carry the exact 50/30 class split
    for fold in 0..5 {
        let (_, test) = plan.split(fold);
        assert_eq!(test.iter().filter(|&&i| labels[i]).count(), 50);
    }
}

#[test]
fn every_variant_completes_under_train_fold_only_scope() {
    // leakage-free preprocessing must hold the pipeline together too
    let ds = load_ckd();
    let labels: Vec<bool> = (0..ds.n_rows()).map(|i| ds.is_positive(i)).collect();
    let plan = kfold_partition(400, 5, 13, false, &labels).unwrap();
    let options = PipelineOptions {
        imputation_scope: ImputationScope::TrainFoldOnly,
    };
    for variant in [
        Variant::DecisionTree,
        Variant::LinearDiscriminant,
        Variant::MediumKnn,
    ] {
        let spec = ClassifierSpec::new(variant).with_seed(13);
        let result = cross_validate(&spec, &ds, &plan, &options).unwrap();
        // class-agnostic test-row imputation costs real accuracy (that is
        // the point of the leakage-free mode); only sanity is asserted
        assert!(
            result.pooled.accuracy.unwrap() > 0.8,
            "{variant:?} accuracy {:?}",
            result.pooled.accuracy
        );
        assert_eq!(result.pooled_confusion.total(), 400);
    }
}

// ---- CLI process-level checks ----

fn exe() -> &'static str {
    env!("CARGO_BIN_EXE_ckdbench")
}

#[test]
fn cli_inspect_json_reports_dataset_shape() {
    let output = Command::new(exe())
        .args(["inspect", DATA, "--json"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let summary: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(summary["rows"], 400);
    assert_eq!(summary["positive_count"], 250);
    assert_eq!(summary["negative_count"], 150);
    assert_eq!(summary["attributes"].as_array().unwrap().len(), 24);
}

#[test]
fn cli_validate_missing_dataset_exits_3_naming_the_path() {
    let tmp = std::env::temp_dir().join(format!("ckdbench_val_{}", std::process::id()));
    std::fs::create_dir_all(&tmp).unwrap();
    let config = tmp.join("missing.conf");
    std::fs::write(&config, "[dataset]\npath = /nonexistent/ckd.arff\n").unwrap();
    let output = Command::new(exe())
        .arg("validate")
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        stderr.contains("/nonexistent/ckd.arff"),
        "stderr should name the path: {stderr}"
    );
    std::fs::remove_dir_all(&tmp).ok();
}

#[test]
fn cli_validate_good_config_exits_0() {
    let tmp = std::env::temp_dir().join(format!("ckdbench_val_ok_{}", std::process::id()));
    std::fs::create_dir_all(&tmp).unwrap();
    let config = tmp.join("ok.conf");
    std::fs::write(&config, format!("[dataset]\npath = {DATA}\n")).unwrap();
    let output = Command::new(exe())
        .arg("validate")
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{:?}", output);
    assert!(String::from_utf8_lossy(&output.stdout).contains("400 rows"));
    std::fs::remove_dir_all(&tmp).ok();
}

#[test]
fn cli_usage_error_exits_2() {
    let output = Command::new(exe()).arg("frobnicate").output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn cli_bad_config_syntax_exits_3() {
    let tmp = std::env::temp_dir().join(format!("ckdbench_bad_{}", std::process::id()));
    std::fs::create_dir_all(&tmp).unwrap();
    let config = tmp.join("bad.conf");
    std::fs::write(&config, "[dataset]\npath = x\nbogus_key = 1\n").unwrap();
    let output = Command::new(exe())
        .arg("run")
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    std::fs::remove_dir_all(&tmp).ok();
}

#[test]
fn cli_inspect_schema_prints_canonical_schema() {
    let output = Command::new(exe())
        .args(["inspect", "--schema"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let schema: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(schema["attributes"].as_array().unwrap().len(), 24);
    assert_eq!(schema["positive_label"], "ckd");
}

#[test]
fn run_with_archive_writes_per_fold_models() {
    let tmp = std::env::temp_dir().join(format!("ckdbench_models_{}", std::process::id()));
    let out = tmp.join("out");
    std::fs::create_dir_all(&tmp).unwrap();
    let config = tmp.join("archive.conf");
    std::fs::write(
        &config,
        format!(
            "[dataset]\npath = {DATA}\n[cv]\nfolds = 5\n[run]\nclassifiers = decision_tree\narchive_models = true\noutput_dir = {}\n",
            out.display()
        ),
    )
    .unwrap();
    let status = Command::new(exe())
        .arg("run")
        .arg(&config)
        .stdout(std::process::Stdio::null())
        .stderr(std::process::Stdio::null())
        .status()
        .unwrap();
    assert!(status.success());
    for fold in 0..5 {
        let path = out
            .join("models")
            .join(format!("decision_tree_fold{fold}.json"));
        assert!(path.exists(), "missing {}", path.display());
        let model: classifiers::TrainedModel =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(model.variant, Variant::DecisionTree);
    }
    std::fs::remove_dir_all(&tmp).ok();
}

#[test]
fn canonical_order_is_stable() {
    let ids: Vec<&str> = ALL_VARIANTS.iter().map(|v| v.canonical_id()).collect();
    assert_eq!(
        ids,
        vec![
            "decision_tree",
            "linear_discriminant",
            "quadratic_discriminant",
            "linear_svm",
            "quadratic_svm",
            "fine_knn",
            "medium_knn",
            "cosine_knn",
            "cubic_knn",
            "weighted_knn",
            "ffbpnn_gd",
            "ffbpnn_lm"
        ]
    );
}
