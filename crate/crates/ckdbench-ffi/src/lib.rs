//! C ABI for the ckdbench toolkit: load and summarize datasets, run the
//! configured benchmark, and render reports, from any language with C FFI.
//!
//! Conventions: objects are opaque pointers with explicit `_free`
//! functions; fallible constructors take an out-parameter status code and
//! return NULL on failure; strings are NUL-terminated UTF-8 owned by Rust
//! and released with [`ckdb_string_free`]; the most recent error message
//! is available per thread via [`ckdb_last_error_message`].

use ckdbench::bench::{self, BenchError, BenchReport, DataFormat, OutputFormat};
use ckdbench::dataset::canonical_ckd_schema;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

/// Result of a fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CkdbStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Dataset or configuration rejected (parse error, schema violation,
    /// missing file).
    DataError = 3,
    /// I/O or internal failure.
    InternalError = 4,
}

/// Input format of a dataset file.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CkdbDataFormat {
    Arff = 0,
    Csv = 1,
}

/// Rendering format for [`ckdb_report_table`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CkdbTableFormat {
    Text = 0,
    Csv = 1,
    Json = 2,
}

/// Chart selector for [`ckdb_report_chart_svg`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CkdbChart {
    Accuracy = 0,
    Metrics = 1,
}

/// Opaque parsed, schema-validated dataset.
pub struct CkdbDataset {
    inner: ckdbench::Dataset,
}

/// Opaque benchmark report.
pub struct CkdbReport {
    inner: BenchReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("error message had NUL").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn put_status(out: *mut CkdbStatus, value: CkdbStatus) {
    if !out.is_null() {
        unsafe { *out = value };
    }
}

fn bench_status(e: &BenchError) -> CkdbStatus {
    match e {
        BenchError::Io(_) => CkdbStatus::InternalError,
        _ => CkdbStatus::DataError,
    }
}

fn export_string(s: String) -> *mut c_char {
    match CString::new(s) {
        Ok(c) => c.into_raw(),
        Err(_) => {
            set_error("output contained an interior NUL byte".into());
            ptr::null_mut()
        }
    }
}

unsafe fn utf8_arg<'a>(ptr_arg: *const c_char, status: *mut CkdbStatus) -> Option<&'a str> {
    if ptr_arg.is_null() {
        set_error("required argument is NULL".into());
        put_status(status, CkdbStatus::NullArgument);
        return None;
    }
    match unsafe { CStr::from_ptr(ptr_arg) }.to_str() {
        Ok(s) => Some(s),
        Err(_) => {
            set_error("argument is not valid UTF-8".into());
            put_status(status, CkdbStatus::InvalidUtf8);
            None
        }
    }
}

/// Loads and schema-validates a dataset file. Returns NULL on failure
/// (status and the per-thread error message say why). Free the handle
/// with [`ckdb_dataset_free`].
///
/// # Safety
/// `path` must be a NUL-terminated string valid for the duration of the
/// call; `status` may be NULL or must point to writable memory.
#[no_mangle]
pub unsafe extern "C" fn ckdb_dataset_load(
    path: *const c_char,
    format: CkdbDataFormat,
    status: *mut CkdbStatus,
) -> *mut CkdbDataset {
    clear_error();
    let Some(path) = (unsafe { utf8_arg(path, status) }) else {
        return ptr::null_mut();
    };
    let fmt = match format {
        CkdbDataFormat::Arff => DataFormat::Arff,
        CkdbDataFormat::Csv => DataFormat::Csv,
    };
    match bench::load_dataset(Path::new(path), fmt) {
        Ok(ds) => {
            put_status(status, CkdbStatus::Ok);
            Box::into_raw(Box::new(CkdbDataset { inner: ds }))
        }
        Err(e) => {
            put_status(status, bench_status(&e));
            set_error(e.to_string());
            ptr::null_mut()
        }
    }
}

/// Number of data rows, or 0 for a NULL handle.
///
/// # Safety
/// `dataset` must be NULL or a live handle from [`ckdb_dataset_load`].
#[no_mangle]
pub unsafe extern "C" fn ckdb_dataset_rows(dataset: *const CkdbDataset) -> u64 {
    if dataset.is_null() {
        return 0;
    }
    unsafe { &*dataset }.inner.n_rows() as u64
}

/// Dataset summary (row/class/missing counts, numeric ranges) as a JSON
/// string. Free with [`ckdb_string_free`]. NULL on NULL input.
///
/// # Safety
/// `dataset` must be NULL or a live handle from [`ckdb_dataset_load`].
#[no_mangle]
pub unsafe extern "C" fn ckdb_dataset_summary_json(dataset: *const CkdbDataset) -> *mut c_char {
    if dataset.is_null() {
        return ptr::null_mut();
    }
    let summary = ckdbench::dataset::summarize(&unsafe { &*dataset }.inner);
    export_string(summary.to_json())
}

/// Releases a dataset handle. NULL is a no-op.
///
/// # Safety
/// `dataset` must be NULL or a handle from [`ckdb_dataset_load`] that has
/// not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn ckdb_dataset_free(dataset: *mut CkdbDataset) {
    if !dataset.is_null() {
        drop(unsafe { Box::from_raw(dataset) });
    }
}

/// The embedded canonical 24-attribute schema as JSON. Free with
/// [`ckdb_string_free`].
#[no_mangle]
pub extern "C" fn ckdb_schema_json() -> *mut c_char {
    export_string(canonical_ckd_schema().to_json())
}

/// Parses the configuration file and runs the full benchmark (every
/// classifier on one shared fold plan). Returns NULL on failure; a report
/// with per-classifier errors still returns a handle (inspect it with
/// [`ckdb_report_any_failed`]). Free with [`ckdb_report_free`].
///
/// # Safety
/// `config_path` must be a NUL-terminated string; `status` may be NULL or
/// must point to writable memory.
#[no_mangle]
pub unsafe extern "C" fn ckdb_run_benchmark(
    config_path: *const c_char,
    status: *mut CkdbStatus,
) -> *mut CkdbReport {
    clear_error();
    let Some(path) = (unsafe { utf8_arg(config_path, status) }) else {
        return ptr::null_mut();
    };
    let config = match bench::parse_config_file(Path::new(path)) {
        Ok(c) => c,
        Err(e) => {
            put_status(status, bench_status(&e));
            set_error(e.to_string());
            return ptr::null_mut();
        }
    };
    match bench::run_benchmark(&config) {
        Ok(report) => {
            put_status(status, CkdbStatus::Ok);
            Box::into_raw(Box::new(CkdbReport { inner: report }))
        }
        Err(e) => {
            put_status(status, bench_status(&e));
            set_error(e.to_string());
            ptr::null_mut()
        }
    }
}

/// Full report as deterministic JSON. Free with [`ckdb_string_free`].
///
/// # Safety
/// `report` must be NULL or a live handle from [`ckdb_run_benchmark`].
#[no_mangle]
pub unsafe extern "C" fn ckdb_report_json(report: *const CkdbReport) -> *mut c_char {
    if report.is_null() {
        return ptr::null_mut();
    }
    export_string(unsafe { &*report }.inner.to_json())
}

/// Comparison table in the requested format. Free with
/// [`ckdb_string_free`].
///
/// # Safety
/// `report` must be NULL or a live handle from [`ckdb_run_benchmark`].
#[no_mangle]
pub unsafe extern "C" fn ckdb_report_table(
    report: *const CkdbReport,
    format: CkdbTableFormat,
) -> *mut c_char {
    if report.is_null() {
        return ptr::null_mut();
    }
    let fmt = match format {
        CkdbTableFormat::Text => OutputFormat::Text,
        CkdbTableFormat::Csv => OutputFormat::Csv,
        CkdbTableFormat::Json => OutputFormat::Json,
    };
    export_string(bench::render_table(&unsafe { &*report }.inner, fmt))
}

/// One of the two SVG charts. Free with [`ckdb_string_free`].
///
/// # Safety
/// `report` must be NULL or a live handle from [`ckdb_run_benchmark`].
#[no_mangle]
pub unsafe extern "C" fn ckdb_report_chart_svg(
    report: *const CkdbReport,
    chart: CkdbChart,
) -> *mut c_char {
    if report.is_null() {
        return ptr::null_mut();
    }
    let charts = bench::render_charts(&unsafe { &*report }.inner);
    export_string(match chart {
        CkdbChart::Accuracy => charts.accuracy,
        CkdbChart::Metrics => charts.metrics,
    })
}

/// 1 if any classifier failed inside the run, 0 if all succeeded,
/// -1 for a NULL handle.
///
/// # Safety
/// `report` must be NULL or a live handle from [`ckdb_run_benchmark`].
#[no_mangle]
pub unsafe extern "C" fn ckdb_report_any_failed(report: *const CkdbReport) -> i32 {
    if report.is_null() {
        return -1;
    }
    unsafe { &*report }.inner.any_failed() as i32
}

/// Releases a report handle. NULL is a no-op.
///
/// # Safety
/// `report` must be NULL or a handle from [`ckdb_run_benchmark`] that has
/// not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn ckdb_report_free(report: *mut CkdbReport) {
    if !report.is_null() {
        drop(unsafe { Box::from_raw(report) });
    }
}

/// The most recent error message on this thread, or NULL if none. The
/// caller owns the returned string; free it with [`ckdb_string_free`].
#[no_mangle]
pub extern "C" fn ckdb_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| match e.borrow_mut().take() {
        Some(c) => c.into_raw(),
        None => ptr::null_mut(),
    })
}

/// Releases a string returned by this library. NULL is a no-op.
///
/// # Safety
/// `s` must be NULL or a pointer previously returned by one of the
/// string-returning functions of this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ckdb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
