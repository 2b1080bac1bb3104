//! C ABI for qassert.
//!
//! Circuits and reports are opaque heap handles released with their `_free`
//! function. Fallible calls return a [`QaStatus`] and write results through
//! out-pointers; on failure [`qa_last_error_message`] describes the problem.
//! Strings returned by the library are freed with [`qa_string_free`].

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qassert::assertions::{AssertionKind, EvaluationConfig, DEFAULT_ALPHA};
use qassert::cli::{self, CheckpointOutcome, ProgramConfig, ReportFormat, RunReport};
use qassert::stats::{self, DEFAULT_RESAMPLES};
use qassert::{Circuit, ContingencyTable, Error, TestMethod};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Argument = 4,
    Capacity = 5,
    QubitIndex = 6,
    Circuit = 7,
    Numerical = 8,
    InvalidExpected = 9,
    InfeasibleShots = 10,
    UnknownExample = 11,
    OutOfRange = 12,
    Panic = 13,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QaKind {
    Classical = 0,
    Uniform = 1,
    Product = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QaMethod {
    /// The checkpoint errored; no test ran.
    None = 0,
    ChiSquare = 1,
    FisherExact = 2,
    MonteCarlo = 3,
    LegacyChiSquareAdd1 = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QaFormat {
    Text = 0,
    Json = 1,
}

/// Run settings. `shots == 0` keeps each assertion's default shot count.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QaConfig {
    pub shots: u64,
    pub seed: u64,
    pub alpha: f64,
    pub resamples: u64,
    pub legacy_chisq: bool,
}

/// One checkpoint of a report. Tri-state fields use -1 for "not set".
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QaCheckpoint {
    pub item_index: usize,
    pub kind: QaKind,
    /// False when evaluation failed; the fields below are then zero.
    pub evaluated: bool,
    pub passed: bool,
    pub p_value: f64,
    pub alpha: f64,
    pub method: QaMethod,
    pub shots_used: u64,
    /// 1 expects pass, 0 expects fail, -1 no expectation.
    pub expected_verdict: i32,
    /// 1 match, 0 mismatch, -1 no expectation.
    pub matches_expected: i32,
}

pub struct QaCircuit {
    inner: Circuit,
}

pub struct QaReport {
    inner: RunReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let message = CString::new(message.replace('\0', "\\0")).expect("NULs replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(message));
}

fn status_of(e: &Error) -> QaStatus {
    match e {
        Error::Capacity(_) => QaStatus::Capacity,
        Error::QubitIndex { .. } => QaStatus::QubitIndex,
        Error::Argument(_) => QaStatus::Argument,
        Error::Circuit(_) => QaStatus::Circuit,
        Error::Numerical(_) => QaStatus::Numerical,
        Error::InvalidExpected { .. } => QaStatus::InvalidExpected,
        Error::InfeasibleShots { .. } => QaStatus::InfeasibleShots,
        Error::UnknownExample(_) => QaStatus::UnknownExample,
        Error::Parse { .. } => QaStatus::Parse,
    }
}

fn fail(status: QaStatus, message: impl Into<String>) -> QaStatus {
    set_last_error(message.into());
    status
}

fn from_error(e: Error) -> QaStatus {
    fail(status_of(&e), e.to_string())
}

/// Runs `f`, turning panics into [`QaStatus::Panic`].
fn guard(f: impl FnOnce() -> QaStatus) -> QaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let what = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(QaStatus::Panic, format!("internal panic: {what}"))
        }
    }
}

/// # Safety
/// `s` must be null or a valid NUL-terminated string.
unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, QaStatus> {
    if s.is_null() {
        return Err(fail(QaStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(QaStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

/// Message for the most recent failure on this thread, or null.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qa_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

#[no_mangle]
pub extern "C" fn qa_config_default() -> QaConfig {
    QaConfig {
        shots: 0,
        seed: 0,
        alpha: DEFAULT_ALPHA,
        resamples: DEFAULT_RESAMPLES as u64,
        legacy_chisq: false,
    }
}

/// Parses circuit-file text.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qa_circuit_parse(text: *const c_char, out: *mut *mut QaCircuit) -> QaStatus {
    guard(|| {
        if out.is_null() {
            return fail(QaStatus::NullPointer, "out is null");
        }
        let text = match read_str(text, "text") {
            Ok(t) => t,
            Err(s) => return s,
        };
        match cli::parse_circuit(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(QaCircuit { inner }));
                QaStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Builds a built-in example. `params` is null or whitespace-separated
/// `KEY=VALUE` pairs; `bug` is null or an injectable bug name.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qa_example_load(
    name: *const c_char,
    params: *const c_char,
    bug: *const c_char,
    out: *mut *mut QaCircuit,
) -> QaStatus {
    guard(|| {
        if out.is_null() {
            return fail(QaStatus::NullPointer, "out is null");
        }
        let name = match read_str(name, "name") {
            Ok(n) => n,
            Err(s) => return s,
        };
        let mut map = BTreeMap::new();
        if !params.is_null() {
            let text = match read_str(params, "params") {
                Ok(t) => t,
                Err(s) => return s,
            };
            for pair in text.split_whitespace() {
                match pair.split_once('=') {
                    Some((k, v)) => {
                        map.insert(k.to_owned(), v.to_owned());
                    }
                    None => return fail(QaStatus::Argument, format!("expected KEY=VALUE, got `{pair}`")),
                }
            }
        }
        let bug = if bug.is_null() {
            None
        } else {
            match read_str(bug, "bug") {
                Ok(b) => Some(b),
                Err(s) => return s,
            }
        };
        match cli::example(name, &map, bug) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(QaCircuit { inner }));
                QaStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Number of qubits, or 0 for a null handle.
///
/// # Safety
/// `circuit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qa_circuit_n_qubits(circuit: *const QaCircuit) -> usize {
    circuit.as_ref().map_or(0, |c| c.inner.n_qubits)
}

/// # Safety
/// `circuit` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qa_circuit_free(circuit: *mut QaCircuit) {
    if !circuit.is_null() {
        drop(Box::from_raw(circuit));
    }
}

/// Evaluates every checkpoint of `circuit`. A null `config` uses defaults.
///
/// # Safety
/// `circuit` must be a live handle, `config` null or valid, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn qa_run(
    circuit: *const QaCircuit,
    config: *const QaConfig,
    out: *mut *mut QaReport,
) -> QaStatus {
    guard(|| {
        let Some(circuit) = circuit.as_ref() else {
            return fail(QaStatus::NullPointer, "circuit is null");
        };
        if out.is_null() {
            return fail(QaStatus::NullPointer, "out is null");
        }
        let c = config.as_ref().copied().unwrap_or_else(|| qa_config_default());
        let Ok(resamples) = usize::try_from(c.resamples) else {
            return fail(QaStatus::Argument, "resamples does not fit in size_t");
        };
        let config = ProgramConfig {
            evaluation: EvaluationConfig {
                shots: (c.shots != 0).then_some(c.shots),
                seed: c.seed,
                alpha: c.alpha,
                resamples,
                legacy_chisq: c.legacy_chisq,
            },
            format: ReportFormat::Text,
        };
        match cli::run_program("ffi", &circuit.inner, &config) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(QaReport { inner }));
                QaStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Number of checkpoints, or 0 for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qa_report_len(report: *const QaReport) -> usize {
    report.as_ref().map_or(0, |r| r.inner.checkpoints.len())
}

/// Process-style status: 0 when no checkpoint errored or mismatched its
/// expected verdict, 1 otherwise, -1 for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qa_report_exit_code(report: *const QaReport) -> i32 {
    report.as_ref().map_or(-1, |r| r.inner.exit_code())
}

fn tri(v: Option<bool>) -> i32 {
    v.map_or(-1, i32::from)
}

/// # Safety
/// `report` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn qa_report_checkpoint(
    report: *const QaReport,
    index: usize,
    out: *mut QaCheckpoint,
) -> QaStatus {
    guard(|| {
        let Some(report) = report.as_ref() else {
            return fail(QaStatus::NullPointer, "report is null");
        };
        if out.is_null() {
            return fail(QaStatus::NullPointer, "out is null");
        }
        let Some(cp) = report.inner.checkpoints.get(index) else {
            return fail(
                QaStatus::OutOfRange,
                format!(
                    "checkpoint {index} out of range (report has {})",
                    report.inner.checkpoints.len()
                ),
            );
        };
        let directive = cp.directive();
        let kind = match directive.kind() {
            AssertionKind::Classical => QaKind::Classical,
            AssertionKind::Uniform => QaKind::Uniform,
            AssertionKind::Product => QaKind::Product,
        };
        let mut view = QaCheckpoint {
            item_index: cp.item_index,
            kind,
            evaluated: false,
            passed: false,
            p_value: 0.0,
            alpha: 0.0,
            method: QaMethod::None,
            shots_used: 0,
            expected_verdict: tri(directive.expected_verdict),
            matches_expected: -1,
        };
        if let CheckpointOutcome::Evaluated(r) = &cp.outcome {
            view.evaluated = true;
            view.passed = r.passed;
            view.p_value = r.p_value.value;
            view.alpha = r.alpha;
            view.method = match r.p_value.method {
                TestMethod::ChiSquare => QaMethod::ChiSquare,
                TestMethod::FisherExact => QaMethod::FisherExact,
                TestMethod::MonteCarlo => QaMethod::MonteCarlo,
                TestMethod::LegacyChiSquareAdd1 => QaMethod::LegacyChiSquareAdd1,
            };
            view.shots_used = r.shots_used;
            view.matches_expected = tri(r.matches_expected);
        }
        *out = view;
        QaStatus::Ok
    })
}

/// Renders the report as text or JSON into a new string owned by the caller.
///
/// # Safety
/// `report` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn qa_report_render(
    report: *const QaReport,
    format: QaFormat,
    out: *mut *mut c_char,
) -> QaStatus {
    guard(|| {
        let Some(report) = report.as_ref() else {
            return fail(QaStatus::NullPointer, "report is null");
        };
        if out.is_null() {
            return fail(QaStatus::NullPointer, "out is null");
        }
        let format = match format {
            QaFormat::Text => ReportFormat::Text,
            QaFormat::Json => ReportFormat::Json,
        };
        let text = cli::render_report(&report.inner, format);
        match CString::new(text) {
            Ok(s) => {
                *out = s.into_raw();
                QaStatus::Ok
            }
            Err(_) => fail(QaStatus::InvalidUtf8, "report contains a NUL byte"),
        }
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qa_report_free(report: *mut QaReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Two-sided Fisher exact p-value for the table `[[a, b], [c, d]]`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qa_fisher_exact_2x2(a: u64, b: u64, c: u64, d: u64, out: *mut f64) -> QaStatus {
    guard(|| {
        if out.is_null() {
            return fail(QaStatus::NullPointer, "out is null");
        }
        let table = ContingencyTable::new(2, 2, vec![a, b, c, d]).and_then(|t| stats::fisher_exact_2x2(&t));
        match table {
            Ok(p) => {
                *out = p.value;
                QaStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Upper regularized incomplete gamma function Q(a, x).
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qa_upper_regularized_gamma(a: f64, x: f64, out: *mut f64) -> QaStatus {
    guard(|| {
        if out.is_null() {
            return fail(QaStatus::NullPointer, "out is null");
        }
        match stats::upper_regularized_gamma(a, x) {
            Ok(q) => {
                *out = q;
                QaStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}
