//! C ABI over the submaslov library.
//!
//! Scenarios and results are opaque handles owned by the caller and released with
//! `sm_scenario_free` / `sm_result_free`. Every fallible call returns an `SmStatus`; on failure
//! `sm_last_error_message` describes the most recent error on the calling thread. Strings
//! returned by the library are released with `sm_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use submaslov::cli::parse_config;
use submaslov::cli::report::{focal_csv, json_report, summary_text};
use submaslov::jacobi_maslov::FocalReport;
use submaslov::scenarios::{builtin, run_scenario, Scenario, ScenarioResult};
use submaslov::{Error, HalfInteger, Tolerances};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Unknown scenario, malformed or inconsistent configuration.
    Config = 3,
    /// Integration or flow failure while running a scenario.
    Numerical = 4,
    /// Index or level argument out of range.
    OutOfRange = 5,
    /// A Rust panic was caught at the boundary.
    Panic = 6,
}

/// Which curve a focal instant belongs to.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmLevel {
    /// The horizontal geodesic in the total space.
    Total = 0,
    /// Its projection in the base.
    Base = 1,
}

/// Bit set in `SmInstant::flags` when the induced metric on the orthogonal complement is degenerate.
pub const SM_FLAG_DEGENERATE: u32 = 1;
/// Bit set in `SmInstant::flags` when the instant is not isolated at the sampling resolution.
pub const SM_FLAG_CLUSTER: u32 = 2;

/// One focal instant. The contribution is `contribution_num / contribution_den`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SmInstant {
    pub t: f64,
    pub kernel_dim: u32,
    pub contribution_num: i64,
    pub contribution_den: i64,
    pub flags: u32,
}

/// A scenario together with the tolerances it runs under.
pub struct SmScenario {
    scenario: Scenario,
    tolerances: Tolerances,
}

/// The outcome of `sm_run`.
pub struct SmResult {
    result: ScenarioResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> SmStatus {
    match e {
        Error::Config { .. }
        | Error::ConfigParse { .. }
        | Error::Expression(_)
        | Error::InvalidDimension(_)
        | Error::InvalidArgument(_)
        | Error::InvalidBoundaryData(_)
        | Error::InvalidStationaryData(_)
        | Error::InvalidKkData(_)
        | Error::InvalidSubmersion(_) => SmStatus::Config,
        _ => SmStatus::Numerical,
    }
}

fn guard<F: FnOnce() -> Result<(), (SmStatus, String)>>(f: F) -> SmStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SmStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside the submaslov library");
            SmStatus::Panic
        }
    }
}

fn fail(e: Error) -> (SmStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (SmStatus, String) {
    (SmStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (SmStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (SmStatus::InvalidUtf8, format!("`{what}` is not valid UTF-8")))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

fn split(h: HalfInteger) -> (i64, i64) {
    h.num_den()
}

fn report(r: &SmResult, level: SmLevel) -> &FocalReport {
    match level {
        SmLevel::Total => &r.result.total,
        SmLevel::Base => &r.result.base,
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy of the last error message on this thread, or NULL. Free with `sm_string_free`.
#[no_mangle]
pub extern "C" fn sm_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map(|s| s.clone().into_raw()).unwrap_or(ptr::null_mut()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Built-in scenario `name` with default tolerances overridden by `SUBMASLOV_TOL_*`.
///
/// # Safety
/// `name` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_scenario_builtin(name: *const c_char, out: *mut *mut SmScenario) -> SmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let name = read_str(name, "name")?;
        let scenario = builtin(name).map_err(fail)?;
        *out = Box::into_raw(Box::new(SmScenario {
            scenario,
            tolerances: Tolerances::from_env(),
        }));
        Ok(())
    })
}

/// Scenario from a TOML run configuration, validated as by `submaslov check`.
///
/// # Safety
/// `toml` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_scenario_from_toml(toml: *const c_char, out: *mut *mut SmScenario) -> SmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = read_str(toml, "toml")?;
        let run = parse_config(text).and_then(|c| c.resolve()).map_err(fail)?;
        let mut tolerances = run.tolerances;
        tolerances.apply_env();
        *out = Box::into_raw(Box::new(SmScenario {
            scenario: run.scenario,
            tolerances,
        }));
        Ok(())
    })
}

/// Overrides the number of integration steps.
///
/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sm_scenario_set_steps(scenario: *mut SmScenario, steps: u32) -> SmStatus {
    guard(|| {
        let s = scenario.as_mut().ok_or_else(|| null("scenario"))?;
        if steps < 8 {
            return Err((SmStatus::OutOfRange, "at least 8 steps are required".into()));
        }
        s.scenario.seed.steps = steps as usize;
        Ok(())
    })
}

/// # Safety
/// `scenario` must be NULL or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn sm_scenario_free(scenario: *mut SmScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Integrates the geodesic and compares both Maslov indices.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_run(scenario: *const SmScenario, out: *mut *mut SmResult) -> SmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let s = scenario.as_ref().ok_or_else(|| null("scenario"))?;
        let result = run_scenario(&s.scenario, &s.tolerances).map_err(fail)?;
        *out = Box::into_raw(Box::new(SmResult { result }));
        Ok(())
    })
}

/// # Safety
/// `result` must be NULL or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn sm_result_free(result: *mut SmResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// `μ_𝒬(γ)` and `μ_𝒫(x)` as numerator / denominator pairs.
///
/// # Safety
/// `result` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_result_indices(
    result: *const SmResult,
    mu_q_num: *mut i64,
    mu_q_den: *mut i64,
    mu_p_num: *mut i64,
    mu_p_den: *mut i64,
) -> SmStatus {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| null("result"))?;
        if mu_q_num.is_null() || mu_q_den.is_null() || mu_p_num.is_null() || mu_p_den.is_null() {
            return Err(null("index outputs"));
        }
        (*mu_q_num, *mu_q_den) = split(r.result.mu_q);
        (*mu_p_num, *mu_p_den) = split(r.result.mu_p);
        Ok(())
    })
}

/// 1 if every check passed, 0 otherwise.
///
/// # Safety
/// `result` must be a live handle; `pass` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_result_pass(result: *const SmResult, pass: *mut i32) -> SmStatus {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| null("result"))?;
        let pass = pass.as_mut().ok_or_else(|| null("pass"))?;
        *pass = i32::from(r.result.pass);
        Ok(())
    })
}

/// Number of focal instants at `level`.
///
/// # Safety
/// `result` must be a live handle; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_result_instant_count(result: *const SmResult, level: SmLevel, count: *mut usize) -> SmStatus {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| null("result"))?;
        let count = count.as_mut().ok_or_else(|| null("count"))?;
        *count = report(r, level).instants.len();
        Ok(())
    })
}

/// The `index`-th focal instant at `level`, in increasing `t`.
///
/// # Safety
/// `result` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_result_instant(
    result: *const SmResult,
    level: SmLevel,
    index: usize,
    out: *mut SmInstant,
) -> SmStatus {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| null("result"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let rep = report(r, level);
        let i = rep.instants.get(index).ok_or_else(|| {
            (
                SmStatus::OutOfRange,
                format!("instant {index} requested but only {} exist", rep.instants.len()),
            )
        })?;
        let (num, den) = split(i.contribution);
        *out = SmInstant {
            t: i.t,
            kernel_dim: i.kernel_dim as u32,
            contribution_num: num,
            contribution_den: den,
            flags: if i.degenerate { SM_FLAG_DEGENERATE } else { 0 } | if i.cluster { SM_FLAG_CLUSTER } else { 0 },
        };
        Ok(())
    })
}

unsafe fn render(result: *const SmResult, out: *mut *mut c_char, f: fn(&ScenarioResult) -> String) -> SmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let r = result.as_ref().ok_or_else(|| null("result"))?;
        *out = into_c_string(f(&r.result));
        Ok(())
    })
}

/// Focal-instant CSV, identical to the file written by `submaslov run`. Free with `sm_string_free`.
///
/// # Safety
/// `result` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_result_csv(result: *const SmResult, out: *mut *mut c_char) -> SmStatus {
    render(result, out, focal_csv)
}

/// Full result as JSON. Free with `sm_string_free`.
///
/// # Safety
/// `result` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_result_json(result: *const SmResult, out: *mut *mut c_char) -> SmStatus {
    render(result, out, json_report)
}

/// Human-readable summary. Free with `sm_string_free`.
///
/// # Safety
/// `result` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_result_summary(result: *const SmResult, out: *mut *mut c_char) -> SmStatus {
    render(result, out, summary_text)
}
