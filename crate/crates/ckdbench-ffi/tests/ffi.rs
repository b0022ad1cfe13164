//! Exercises the C surface exactly as a foreign caller would: raw
//! pointers, status codes, manual frees.

use ckdbench_ffi::*;
use std::ffi::{CStr, CString};
use std::ptr;

const DATA: &str = concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/../../data/chronic_kidney_disease_full.arff"
);

fn c_string(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take_string(ptr: *mut std::ffi::c_char) -> String {
    assert!(!ptr.is_null());
    let s = unsafe { CStr::from_ptr(ptr) }.to_str().unwrap().to_string();
    unsafe { ckdb_string_free(ptr) };
    s
}

#[test]
fn load_inspect_and_free_dataset() {
    unsafe {
        let path = c_string(DATA);
        let mut status = CkdbStatus::InternalError;
        let ds = ckdb_dataset_load(path.as_ptr(), CkdbDataFormat::Arff, &mut status);
        assert_eq!(status, CkdbStatus::Ok);
        assert!(!ds.is_null());
        assert_eq!(ckdb_dataset_rows(ds), 400);

        let summary_json = take_string(ckdb_dataset_summary_json(ds));
        let summary: serde_json::Value = serde_json::from_str(&summary_json).unwrap();
        assert_eq!(summary["rows"], 400);
        assert_eq!(summary["positive_count"], 250);
        assert_eq!(summary["negative_count"], 150);

        ckdb_dataset_free(ds);
    }
}

#[test]
fn missing_file_reports_data_error_with_message() {
    unsafe {
        let path = c_string("/nonexistent/nowhere.arff");
        let mut status = CkdbStatus::Ok;
        let ds = ckdb_dataset_load(path.as_ptr(), CkdbDataFormat::Arff, &mut status);
        assert!(ds.is_null());
        assert_eq!(status, CkdbStatus::DataError);
        let msg = take_string(ckdb_last_error_message());
        assert!(msg.contains("/nonexistent/nowhere.arff"), "{msg}");
        // the message is consumed: a second query returns NULL
        assert!(ckdb_last_error_message().is_null());
    }
}

#[test]
fn null_arguments_are_rejected_not_crashed() {
    unsafe {
        let mut status = CkdbStatus::Ok;
        let ds = ckdb_dataset_load(ptr::null(), CkdbDataFormat::Arff, &mut status);
        assert!(ds.is_null());
        assert_eq!(status, CkdbStatus::NullArgument);

        assert_eq!(ckdb_dataset_rows(ptr::null()), 0);
        assert!(ckdb_dataset_summary_json(ptr::null()).is_null());
        assert!(ckdb_report_json(ptr::null()).is_null());
        assert_eq!(ckdb_report_any_failed(ptr::null()), -1);
        // frees tolerate NULL
        ckdb_dataset_free(ptr::null_mut());
        ckdb_report_free(ptr::null_mut());
        ckdb_string_free(ptr::null_mut());
    }
}

#[test]
fn schema_json_is_the_canonical_schema() {
    unsafe {
        let json = take_string(ckdb_schema_json());
        let schema: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(schema["attributes"].as_array().unwrap().len(), 24);
        assert_eq!(schema["positive_label"], "ckd");
        assert_eq!(schema["negative_label"], "notckd");
    }
}

#[test]
fn benchmark_through_the_c_surface() {
    let tmp = std::env::temp_dir().join(format!("ckdb_ffi_{}", std::process::id()));
    std::fs::create_dir_all(&tmp).unwrap();
    let config_path = tmp.join("ffi.conf");
    std::fs::write(
        &config_path,
        format!("[dataset]\npath = {DATA}\n[cv]\nseed = 5\n[run]\nclassifiers = decision_tree,fine_knn\n"),
    )
    .unwrap();
    unsafe {
        let c_path = c_string(config_path.to_str().unwrap());
        let mut status = CkdbStatus::InternalError;
        let report = ckdb_run_benchmark(c_path.as_ptr(), &mut status);
        assert_eq!(status, CkdbStatus::Ok);
        assert!(!report.is_null());
        assert_eq!(ckdb_report_any_failed(report), 0);

        let json = take_string(ckdb_report_json(report));
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["entries"].as_array().unwrap().len(), 2);

        let csv = take_string(ckdb_report_table(report, CkdbTableFormat::Csv));
        assert!(csv.starts_with("Classifier,Accuracy,Sensitivity,Precision,Specificity"));
        assert!(csv.contains("Decision Tree"));

        let svg = take_string(ckdb_report_chart_svg(report, CkdbChart::Accuracy));
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("class=\"bar\"").count(), 2);

        ckdb_report_free(report);
    }
    std::fs::remove_dir_all(&tmp).ok();
}

#[test]
fn bad_config_reports_data_error() {
    let tmp = std::env::temp_dir().join(format!("ckdb_ffi_bad_{}", std::process::id()));
    std::fs::create_dir_all(&tmp).unwrap();
    let config_path = tmp.join("bad.conf");
    std::fs::write(&config_path, "[dataset]\npath = x\nnonsense = 1\n").unwrap();
    unsafe {
        let c_path = c_string(config_path.to_str().unwrap());
        let mut status = CkdbStatus::Ok;
        let report = ckdb_run_benchmark(c_path.as_ptr(), &mut status);
        assert!(report.is_null());
        assert_eq!(status, CkdbStatus::DataError);
        let msg = take_string(ckdb_last_error_message());
        assert!(msg.contains("nonsense"), "{msg}");
    }
    std::fs::remove_dir_all(&tmp).ok();
}
