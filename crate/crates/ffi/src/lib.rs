//! C interface to `dp-core`.
//!
//! Fields and scenarios are opaque handles created by `dp_*_new`/`dp_*_parse`
//! and released with the matching `dp_*_free`. Every fallible function
//! returns a [`DpStatus`] and writes its result through an out-pointer; on
//! failure `dp_last_error_message` describes what went wrong. Panics are
//! caught at the boundary and reported as `DP_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use dp_core::analysis::{blowup_bound, LiouvilleClass};
use dp_core::scenario::{execute, parse_config, run_scenario, RunSummary, Scenario};
use dp_core::solver::{momentum, rhs, Classification};
use dp_core::spectral::{
    ddx, helmholtz_inverse, interp_eval, kernel_p, kernel_positivity_margin, Grid, PeriodicField,
};
use dp_core::DpError;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Io = 4,
    Numerical = 5,
    /// No grid point satisfies the breaking criterion.
    NoHit = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DpClassification {
    Completed = 0,
    WaveBreaking = 1,
    Indeterminate = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DpLiouville {
    IdenticallyFlat = 0,
    Separated = 1,
    Touching = 2,
}

/// Opaque periodic field on a uniform grid.
pub struct DpField(PeriodicField);

/// Opaque parsed scenario.
pub struct DpScenario(Scenario);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DpBlowupBound {
    pub a_star: f64,
    pub h0_max: f64,
    pub t_bound: f64,
}

/// Absent values are NaN; `riccati_passed` is -1 when no audit ran.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DpRunSummary {
    pub classification: DpClassification,
    pub exit_code: i32,
    pub t_detect: f64,
    pub x_detect: f64,
    pub t_final: f64,
    pub a_star: f64,
    pub t_bound: f64,
    pub min_slope: f64,
    pub mean_drift: f64,
    pub flow_invariant_error: f64,
    pub min_momentum: f64,
    pub liouville: DpLiouville,
    pub contradiction: bool,
    pub riccati_passed: i32,
}

impl From<&RunSummary> for DpRunSummary {
    fn from(s: &RunSummary) -> Self {
        let nan = |v: Option<f64>| v.unwrap_or(f64::NAN);
        DpRunSummary {
            classification: match s.classification {
                Classification::Completed => DpClassification::Completed,
                Classification::WaveBreaking => DpClassification::WaveBreaking,
                Classification::Indeterminate => DpClassification::Indeterminate,
            },
            exit_code: s.exit_code(),
            t_detect: nan(s.t_detect),
            x_detect: nan(s.x_detect),
            t_final: s.t_final,
            a_star: nan(s.a_star),
            t_bound: nan(s.t_bound),
            min_slope: s.min_slope,
            mean_drift: s.mean_drift,
            flow_invariant_error: s.flow_invariant_error,
            min_momentum: s.min_momentum,
            liouville: match s.liouville {
                LiouvilleClass::IdenticallyFlat => DpLiouville::IdenticallyFlat,
                LiouvilleClass::Separated => DpLiouville::Separated,
                LiouvilleClass::Touching => DpLiouville::Touching,
            },
            contradiction: s.contradiction,
            riccati_passed: s.riccati_passed.map_or(-1, i32::from),
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(DpStatus, String);

impl From<DpError> for Failure {
    fn from(e: DpError) -> Self {
        let status = match e {
            DpError::Parse { .. } => DpStatus::Parse,
            DpError::Io { .. } => DpStatus::Io,
            DpError::NonFinite(_) | DpError::Breakdown { .. } | DpError::FlowBreakdown { .. } => {
                DpStatus::Numerical
            }
            _ => DpStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(DpStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            DpStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("panic: {msg}"));
            DpStatus::Panic
        }
    }
}

unsafe fn field_ref<'a>(f: *const DpField) -> Result<&'a PeriodicField, Failure> {
    f.as_ref().map(|f| &f.0).ok_or_else(|| null("field"))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_field(out: *mut *mut DpField, f: PeriodicField) -> Result<(), Failure> {
    put(out, Box::into_raw(Box::new(DpField(f))))
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn dp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Copies `n` samples into a new field. `n` must be even and at least 8.
///
/// # Safety
/// `values` must point to `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dp_field_new(values: *const f64, n: usize, out: *mut *mut DpField) -> DpStatus {
    guard(|| {
        if values.is_null() {
            return Err(null("values"));
        }
        let grid = Grid::new(n)?;
        let data = std::slice::from_raw_parts(values, n).to_vec();
        put_field(out, PeriodicField::new(grid, data)?)
    })
}

/// # Safety
/// `field` must come from this library and not have been freed; null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn dp_field_free(field: *mut DpField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Number of samples, or 0 for a null handle.
///
/// # Safety
/// `field` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dp_field_len(field: *const DpField) -> usize {
    field.as_ref().map_or(0, |f| f.0.n())
}

/// # Safety
/// `field` must be a live handle and `out` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn dp_field_copy_values(field: *const DpField, out: *mut f64, len: usize) -> DpStatus {
    guard(|| {
        let f = field_ref(field)?;
        if out.is_null() {
            return Err(null("output buffer"));
        }
        if len != f.n() {
            return Err(Failure(
                DpStatus::InvalidArgument,
                format!("buffer holds {len} values, field has {}", f.n()),
            ));
        }
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(f.values());
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn dp_kernel_p(x: f64) -> f64 {
    kernel_p(x)
}

/// `min (p - |beta| |p_x|)` over `samples` points of a period (at least 64).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dp_kernel_positivity_margin(beta: f64, samples: usize, out: *mut f64) -> DpStatus {
    guard(|| {
        if samples < 64 || !beta.is_finite() {
            return Err(Failure(
                DpStatus::InvalidArgument,
                "need a finite beta and at least 64 samples".into(),
            ));
        }
        put(out, kernel_positivity_margin(beta, samples))
    })
}

unsafe fn unary(field: *const DpField, out: *mut *mut DpField, op: fn(&PeriodicField) -> PeriodicField) -> DpStatus {
    guard(|| {
        let f = field_ref(field)?;
        put_field(out, op(f))
    })
}

/// `(1 - ∂²)⁻¹ field`, i.e. convolution with the kernel.
///
/// # Safety
/// `field` must be a live handle; `out` must be writable. The result is a
/// new handle owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn dp_helmholtz_inverse(field: *const DpField, out: *mut *mut DpField) -> DpStatus {
    unary(field, out, helmholtz_inverse)
}

/// # Safety
/// As for [`dp_helmholtz_inverse`].
#[no_mangle]
pub unsafe extern "C" fn dp_ddx(field: *const DpField, out: *mut *mut DpField) -> DpStatus {
    unary(field, out, ddx)
}

/// `u - u_xx`.
///
/// # Safety
/// As for [`dp_helmholtz_inverse`].
#[no_mangle]
pub unsafe extern "C" fn dp_momentum(field: *const DpField, out: *mut *mut DpField) -> DpStatus {
    unary(field, out, momentum)
}

/// Time derivative of the field under the equation with dispersion `kappa`.
///
/// # Safety
/// As for [`dp_helmholtz_inverse`].
#[no_mangle]
pub unsafe extern "C" fn dp_rhs(field: *const DpField, kappa: f64, dealias: bool, out: *mut *mut DpField) -> DpStatus {
    guard(|| {
        let f = field_ref(field)?;
        put_field(out, rhs(f, kappa, dealias))
    })
}

/// Trigonometric interpolant of the field at any `x`.
///
/// # Safety
/// `field` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dp_interp_eval(field: *const DpField, x: f64, out: *mut f64) -> DpStatus {
    guard(|| {
        let f = field_ref(field)?;
        put(out, interp_eval(f, x))
    })
}

/// Lifespan bound from the best admissible grid point; `DP_STATUS_NO_HIT`
/// when there is none.
///
/// # Safety
/// `field` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dp_blowup_bound(field: *const DpField, kappa: f64, out: *mut DpBlowupBound) -> DpStatus {
    guard(|| {
        let f = field_ref(field)?;
        match blowup_bound(f, kappa) {
            Some(b) => put(out, DpBlowupBound { a_star: b.a_star, h0_max: b.h0_max, t_bound: b.t_bound }),
            None => Err(Failure(DpStatus::NoHit, "no admissible point".into())),
        }
    })
}

/// Parses scenario text in the `key = value` format.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dp_scenario_parse(text: *const c_char, out: *mut *mut DpScenario) -> DpStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| Failure(DpStatus::InvalidArgument, "scenario text is not UTF-8".into()))?;
        let s = parse_config(text)?;
        put(out, Box::into_raw(Box::new(DpScenario(s))))
    })
}

/// # Safety
/// `scenario` must come from [`dp_scenario_parse`]; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn dp_scenario_free(scenario: *mut DpScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Sets the directory the CSV files are written to.
///
/// # Safety
/// `scenario` must be a live handle and `dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn dp_scenario_set_output_dir(scenario: *mut DpScenario, dir: *const c_char) -> DpStatus {
    guard(|| {
        let s = scenario.as_mut().ok_or_else(|| null("scenario"))?;
        if dir.is_null() {
            return Err(null("dir"));
        }
        let dir = CStr::from_ptr(dir)
            .to_str()
            .map_err(|_| Failure(DpStatus::InvalidArgument, "directory is not UTF-8".into()))?;
        s.0.outputs.dir = Some(PathBuf::from(dir));
        Ok(())
    })
}

/// Runs the scenario. With `write_files`, `fields.csv`, `trace.csv` and
/// `summary.csv` are written to its output directory.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dp_scenario_run(scenario: *const DpScenario, write_files: bool, out: *mut DpRunSummary) -> DpStatus {
    guard(|| {
        let s = scenario.as_ref().ok_or_else(|| null("scenario"))?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let summary = if write_files {
            run_scenario(&s.0)?
        } else {
            execute(&s.0)?.summary
        };
        put(out, DpRunSummary::from(&summary))
    })
}

