//! C ABI for the driftreg online learners.
//!
//! The surface is a single opaque handle plus error codes. Every function
//! is null-safe and panic-safe: failures come back as a [`Status`] and the
//! message of the most recent failure on the calling thread is available
//! through [`driftreg_last_error`].
//!
//! Pointer contract shared by all functions: handles must come from one of
//! the constructors and be freed exactly once with
//! [`driftreg_learner_free`]; array arguments must point to at least `len`
//! readable (or writable) doubles; handles must not be used concurrently
//! from multiple threads without external synchronization.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use driftreg::learners::{LearnerSpec, OnlineLearner, Sample};
use driftreg::Error;

/// Result codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NumericalFailure = 4,
    InvalidUtf8 = 5,
    Panic = 6,
}

/// Opaque learner handle.
pub struct Learner {
    inner: Box<dyn OnlineLearner>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> Status {
    match err {
        Error::DimensionMismatch { .. } => Status::DimensionMismatch,
        Error::NotPositiveDefinite { .. } | Error::NonFinite { .. } => Status::NumericalFailure,
        Error::InvalidParameter { .. } | Error::Data(_) | Error::Config(_) | Error::Io { .. } => {
            Status::InvalidArgument
        }
    }
}

fn fail(err: Error) -> Status {
    set_error(&err.to_string());
    status_of(&err)
}

/// Runs `f` behind a panic guard, translating panics into [`Status::Panic`].
fn guarded(f: impl FnOnce() -> Status) -> Status {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic in driftreg".to_string());
            set_error(&msg);
            Status::Panic
        }
    }
}

fn install(
    spec_result: driftreg::Result<Box<dyn OnlineLearner>>,
    out: *mut *mut Learner,
) -> Status {
    match spec_result {
        Ok(inner) => {
            unsafe { *out = Box::into_raw(Box::new(Learner { inner })) };
            Status::Ok
        }
        Err(e) => fail(e),
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn driftreg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copies the most recent error message of this thread into `buf`
/// (truncated, always NUL-terminated when `cap > 0`) and returns the full
/// message length in bytes, excluding the terminator.
///
/// # Safety
/// `buf` must be writable for `cap` bytes, or null with `cap == 0`.
#[no_mangle]
pub unsafe extern "C" fn driftreg_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Builds a learner of input dimension `dim` from the JSON spec used by the
/// CLI and config files, e.g. `{"algo":"laser","b":0.5,"c":100.0}`.
///
/// # Safety
/// `spec_json` must be a NUL-terminated string; `out` must be a valid
/// pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn driftreg_learner_new_json(
    dim: usize,
    spec_json: *const c_char,
    out: *mut *mut Learner,
) -> Status {
    guarded(|| {
        if spec_json.is_null() || out.is_null() {
            set_error("null pointer argument");
            return Status::NullPointer;
        }
        let Ok(json) = unsafe { CStr::from_ptr(spec_json) }.to_str() else {
            set_error("spec is not valid UTF-8");
            return Status::InvalidUtf8;
        };
        let spec: LearnerSpec = match serde_json::from_str(json) {
            Ok(spec) => spec,
            Err(e) => {
                set_error(&format!("bad learner spec: {e}"));
                return Status::InvalidArgument;
            }
        };
        install(spec.build(dim), out)
    })
}

fn checked_install(spec: LearnerSpec, dim: usize, out: *mut *mut Learner) -> Status {
    if out.is_null() {
        set_error("null output pointer");
        return Status::NullPointer;
    }
    install(spec.build(dim), out)
}

/// Normalized least mean squares.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn driftreg_learner_new_nlms(
    dim: usize,
    mu: f64,
    eps: f64,
    out: *mut *mut Learner,
) -> Status {
    guarded(|| checked_install(LearnerSpec::Nlms { mu, eps }, dim, out))
}

/// Recursive least squares with forgetting factor `r` in (0, 1].
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn driftreg_learner_new_rls(
    dim: usize,
    r: f64,
    out: *mut *mut Learner,
) -> Status {
    guarded(|| checked_install(LearnerSpec::Rls { r }, dim, out))
}

/// RLS with covariance reset every `reset_period` samples; 0 never resets
/// (plain RLS).
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn driftreg_learner_new_crrls(
    dim: usize,
    r: f64,
    reset_period: u64,
    out: *mut *mut Learner,
) -> Status {
    let spec = LearnerSpec::Crrls {
        r,
        t0: (reset_period > 0).then_some(reset_period),
    };
    guarded(|| checked_install(spec, dim, out))
}

/// Adaptive regularization of weights for regression.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn driftreg_learner_new_arowr(
    dim: usize,
    r: f64,
    out: *mut *mut Learner,
) -> Status {
    guarded(|| checked_install(LearnerSpec::Arowr { r }, dim, out))
}

/// Aggregating algorithm for regression.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn driftreg_learner_new_aar(
    dim: usize,
    b: f64,
    out: *mut *mut Learner,
) -> Status {
    guarded(|| checked_install(LearnerSpec::Aar { b }, dim, out))
}

/// ARCOR with the polynomial eigenvalue-floor schedule of exponent `q` and
/// projection radius `radius` (pass INFINITY to disable the projection).
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn driftreg_learner_new_arcor(
    dim: usize,
    r: f64,
    radius: f64,
    q: f64,
    out: *mut *mut Learner,
) -> Status {
    let spec = LearnerSpec::Arcor {
        r,
        r_b: radius.is_finite().then_some(radius),
        schedule: driftreg::arcor::LambdaSchedule::Polynomial { q },
    };
    guarded(|| checked_install(spec, dim, out))
}

/// LASER with drift coupling `c` (pass INFINITY for the exact AAR
/// reduction) and optional prediction clip bound `y_bound` (pass 0 or a
/// negative value for unclipped predictions).
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn driftreg_learner_new_laser(
    dim: usize,
    b: f64,
    c: f64,
    y_bound: f64,
    out: *mut *mut Learner,
) -> Status {
    let spec = LearnerSpec::Laser {
        b,
        c: c.is_finite().then_some(c),
        y_bound: (y_bound > 0.0).then_some(y_bound),
    };
    guarded(|| checked_install(spec, dim, out))
}

/// Frees a learner handle. Passing null is a no-op.
///
/// # Safety
/// `learner` must be a live handle from a constructor, freed only once.
#[no_mangle]
pub unsafe extern "C" fn driftreg_learner_free(learner: *mut Learner) {
    if !learner.is_null() {
        drop(unsafe { Box::from_raw(learner) });
    }
}

/// Input dimension of the learner; 0 for a null handle.
///
/// # Safety
/// `learner` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn driftreg_learner_dim(learner: *const Learner) -> usize {
    if learner.is_null() {
        return 0;
    }
    unsafe { &*learner }.inner.dim()
}

/// Number of samples absorbed so far; 0 for a null handle.
///
/// # Safety
/// `learner` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn driftreg_learner_steps(learner: *const Learner) -> u64 {
    if learner.is_null() {
        return 0;
    }
    unsafe { &*learner }.inner.steps()
}

/// Number of covariance resets performed so far (CR-RLS and ARCOR; 0 for
/// the other learners or a null handle).
///
/// # Safety
/// `learner` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn driftreg_learner_reset_count(learner: *const Learner) -> usize {
    if learner.is_null() {
        return 0;
    }
    unsafe { &*learner }.inner.resets().len()
}

unsafe fn slice_arg<'a>(ptr: *const f64, len: usize) -> Option<&'a [f64]> {
    if ptr.is_null() {
        None
    } else {
        Some(unsafe { std::slice::from_raw_parts(ptr, len) })
    }
}

/// Prediction for the input `x` without updating any state.
///
/// # Safety
/// `learner` must be a live handle; `x` must hold `len` doubles; `yhat`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn driftreg_learner_predict(
    learner: *const Learner,
    x: *const f64,
    len: usize,
    yhat: *mut f64,
) -> Status {
    guarded(|| {
        if learner.is_null() || yhat.is_null() {
            set_error("null pointer argument");
            return Status::NullPointer;
        }
        let Some(x) = (unsafe { slice_arg(x, len) }) else {
            set_error("null input vector");
            return Status::NullPointer;
        };
        match unsafe { &*learner }.inner.predict(x) {
            Ok(v) => {
                unsafe { *yhat = v };
                Status::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Absorbs one labeled sample without reporting the prediction.
///
/// # Safety
/// As [`driftreg_learner_predict`], with a mutable handle.
#[no_mangle]
pub unsafe extern "C" fn driftreg_learner_update(
    learner: *mut Learner,
    x: *const f64,
    len: usize,
    y: f64,
) -> Status {
    guarded(|| {
        if learner.is_null() {
            set_error("null learner handle");
            return Status::NullPointer;
        }
        let Some(x) = (unsafe { slice_arg(x, len) }) else {
            set_error("null input vector");
            return Status::NullPointer;
        };
        let sample = match Sample::new(x.to_vec(), y) {
            Ok(s) => s,
            Err(e) => return fail(e),
        };
        match unsafe { &mut *learner }.inner.update(&sample) {
            Ok(()) => Status::Ok,
            Err(e) => fail(e),
        }
    })
}

/// One online round: writes the prediction made before the label was seen
/// to `yhat`, then absorbs the sample.
///
/// # Safety
/// As [`driftreg_learner_update`]; `yhat` must be writable.
#[no_mangle]
pub unsafe extern "C" fn driftreg_learner_step(
    learner: *mut Learner,
    x: *const f64,
    len: usize,
    y: f64,
    yhat: *mut f64,
) -> Status {
    guarded(|| {
        if learner.is_null() || yhat.is_null() {
            set_error("null pointer argument");
            return Status::NullPointer;
        }
        let Some(x) = (unsafe { slice_arg(x, len) }) else {
            set_error("null input vector");
            return Status::NullPointer;
        };
        let sample = match Sample::new(x.to_vec(), y) {
            Ok(s) => s,
            Err(e) => return fail(e),
        };
        match unsafe { &mut *learner }.inner.step(&sample) {
            Ok(v) => {
                unsafe { *yhat = v };
                Status::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Copies the current weight vector into `out`; `len` must equal the
/// learner dimension.
///
/// # Safety
/// `learner` must be a live handle; `out` must be writable for `len`
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn driftreg_learner_weights(
    learner: *const Learner,
    out: *mut f64,
    len: usize,
) -> Status {
    guarded(|| {
        if learner.is_null() || out.is_null() {
            set_error("null pointer argument");
            return Status::NullPointer;
        }
        let inner = &unsafe { &*learner }.inner;
        if len != inner.dim() {
            return fail(Error::DimensionMismatch {
                expected: inner.dim(),
                got: len,
            });
        }
        let w = inner.weights();
        unsafe { std::ptr::copy_nonoverlapping(w.as_ptr(), out, len) };
        Status::Ok
    })
}
