//! C ABI for the adapted-ot library.
//!
//! Handles are opaque pointers created and released by this library; every
//! fallible call returns an [`AotStatus`] and leaves a message retrievable
//! with [`aot_last_error_message`] on failure. All functions are
//! panic-safe: a panic is reported as `AOT_STATUS_INTERNAL` instead of
//! unwinding across the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use adapted_ot::adapted_ot::{aw_distance, estimate_aw, smoothing_sigma};
use adapted_ot::bounds::rate_inf;
use adapted_ot::mixing::eta_bound_memory_chain;
use adapted_ot::path_measure::{
    adapted_empirical_measure, empirical_measure, grid_resolution, DiscretePathMeasure,
    PathSample,
};
use adapted_ot::Error;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AotStatus {
    Ok = 0,
    InvalidArgument = 1,
    Precondition = 2,
    Io = 3,
    Parse = 4,
    UnsupportedPrefix = 5,
    StateSpaceTooLarge = 6,
    ReducibleChain = 7,
    ShapeMismatch = 8,
    NullPointer = 9,
    Internal = 10,
}

/// An observed sample of paths (opaque).
pub struct AotPathSample(PathSample);

/// A finitely supported path measure (opaque).
pub struct AotPathMeasure(DiscretePathMeasure);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized: String = message.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> AotStatus {
    match err {
        Error::InvalidInput(_) => AotStatus::InvalidArgument,
        Error::Precondition(_) => AotStatus::Precondition,
        Error::Io(_) => AotStatus::Io,
        Error::Parse(_) => AotStatus::Parse,
        Error::UnsupportedPrefix => AotStatus::UnsupportedPrefix,
        Error::StateSpaceTooLarge(_) => AotStatus::StateSpaceTooLarge,
        Error::ReducibleChain => AotStatus::ReducibleChain,
        Error::ShapeMismatch(_) => AotStatus::ShapeMismatch,
    }
}

fn guarded(f: impl FnOnce() -> AotStatus) -> AotStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            AotStatus::Internal
        }
    }
}

fn report(result: Result<AotStatus, Error>) -> AotStatus {
    match result {
        Ok(status) => status,
        Err(err) => {
            set_error(&err.to_string());
            status_of(&err)
        }
    }
}

/// # Safety
/// `ptr` must be a valid NUL-terminated string.
unsafe fn path_from(ptr: *const c_char) -> Result<PathBuf, Error> {
    if ptr.is_null() {
        return Err(Error::InvalidInput("null path".into()));
    }
    let s = unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|_| Error::InvalidInput("path is not valid UTF-8".into()))?;
    Ok(PathBuf::from(s))
}

/// Version of the underlying library as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn aot_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copies the last error message of the current thread into `buffer`
/// (truncating) and returns the full message length in bytes, excluding the
/// terminator. A zero `capacity` only queries the length.
///
/// # Safety
/// `buffer` must point to at least `capacity` writable bytes, unless
/// `capacity` is zero.
#[no_mangle]
pub unsafe extern "C" fn aot_last_error_message(buffer: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes();
        if capacity > 0 && !buffer.is_null() {
            let n = bytes.len().min(capacity - 1);
            unsafe {
                std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buffer, n);
                *buffer.add(n) = 0;
            }
        }
        bytes.len()
    })
}

/// Reads a path sample from a CSV file (`path_id,t,x_1,...,x_d`).
///
/// # Safety
/// `path` must be NUL-terminated; `out` must be a valid pointer slot.
#[no_mangle]
pub unsafe extern "C" fn aot_path_sample_read_csv(
    path: *const c_char,
    out: *mut *mut AotPathSample,
) -> AotStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output pointer");
            return AotStatus::NullPointer;
        }
        report((|| {
            let sample = PathSample::read_csv_file(unsafe { path_from(path) }?)?;
            unsafe { *out = Box::into_raw(Box::new(AotPathSample(sample))) };
            Ok(AotStatus::Ok)
        })())
    })
}

/// Releases a path sample handle. Null is ignored.
///
/// # Safety
/// `sample` must have been produced by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn aot_path_sample_free(sample: *mut AotPathSample) {
    if !sample.is_null() {
        drop(unsafe { Box::from_raw(sample) });
    }
}

/// Number of paths in the sample; zero on a null handle.
///
/// # Safety
/// `sample` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn aot_path_sample_len(sample: *const AotPathSample) -> usize {
    if sample.is_null() {
        return 0;
    }
    unsafe { &*sample }.0.n_paths()
}

/// Reads a path measure from a CSV file (`path_id,t,x_1,...,x_d[,weight]`).
///
/// # Safety
/// `path` must be NUL-terminated; `out` must be a valid pointer slot.
#[no_mangle]
pub unsafe extern "C" fn aot_measure_read_csv(
    path: *const c_char,
    out: *mut *mut AotPathMeasure,
) -> AotStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output pointer");
            return AotStatus::NullPointer;
        }
        report((|| {
            let measure = DiscretePathMeasure::read_csv_file(unsafe { path_from(path) }?)?;
            unsafe { *out = Box::into_raw(Box::new(AotPathMeasure(measure))) };
            Ok(AotStatus::Ok)
        })())
    })
}

/// Writes a path measure to a CSV file.
///
/// # Safety
/// `measure` must be a live handle; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn aot_measure_write_csv(
    measure: *const AotPathMeasure,
    path: *const c_char,
) -> AotStatus {
    guarded(|| {
        if measure.is_null() {
            set_error("null measure handle");
            return AotStatus::NullPointer;
        }
        report((|| {
            unsafe { &*measure }
                .0
                .write_csv_file(unsafe { path_from(path) }?)?;
            Ok(AotStatus::Ok)
        })())
    })
}

/// Releases a measure handle. Null is ignored.
///
/// # Safety
/// `measure` must have been produced by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn aot_measure_free(measure: *mut AotPathMeasure) {
    if !measure.is_null() {
        drop(unsafe { Box::from_raw(measure) });
    }
}

/// Number of support paths of a measure; zero on a null handle.
///
/// # Safety
/// `measure` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn aot_measure_len(measure: *const AotPathMeasure) -> usize {
    if measure.is_null() {
        return 0;
    }
    unsafe { &*measure }.0.len()
}

/// Empirical measure of a sample (atoms at distinct observed paths).
///
/// # Safety
/// `sample` must be a live handle; `out` must be a valid pointer slot.
#[no_mangle]
pub unsafe extern "C" fn aot_empirical_measure(
    sample: *const AotPathSample,
    out: *mut *mut AotPathMeasure,
) -> AotStatus {
    guarded(|| {
        if sample.is_null() || out.is_null() {
            set_error("null handle");
            return AotStatus::NullPointer;
        }
        let measure = empirical_measure(&unsafe { &*sample }.0);
        unsafe { *out = Box::into_raw(Box::new(AotPathMeasure(measure))) };
        AotStatus::Ok
    })
}

/// Adapted empirical measure of a sample (grid-quantized paths).
///
/// # Safety
/// `sample` must be a live handle; `out` must be a valid pointer slot.
#[no_mangle]
pub unsafe extern "C" fn aot_adapted_empirical_measure(
    sample: *const AotPathSample,
    out: *mut *mut AotPathMeasure,
) -> AotStatus {
    guarded(|| {
        if sample.is_null() || out.is_null() {
            set_error("null handle");
            return AotStatus::NullPointer;
        }
        let measure = adapted_empirical_measure(&unsafe { &*sample }.0);
        unsafe { *out = Box::into_raw(Box::new(AotPathMeasure(measure))) };
        AotStatus::Ok
    })
}

/// Adapted Wasserstein distance between two measures.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must point to a writable f64.
#[no_mangle]
pub unsafe extern "C" fn aot_aw_distance(
    a: *const AotPathMeasure,
    b: *const AotPathMeasure,
    out: *mut f64,
) -> AotStatus {
    guarded(|| {
        if a.is_null() || b.is_null() || out.is_null() {
            set_error("null handle");
            return AotStatus::NullPointer;
        }
        report((|| {
            let (value, _) = aw_distance(&unsafe { &*a }.0, &unsafe { &*b }.0)?;
            unsafe { *out = value };
            Ok(AotStatus::Ok)
        })())
    })
}

/// Adapted distance between a reference measure and the adapted empirical
/// measure built from the sample.
///
/// # Safety
/// `sample` and `reference` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn aot_estimate_aw(
    sample: *const AotPathSample,
    reference: *const AotPathMeasure,
    out: *mut f64,
) -> AotStatus {
    guarded(|| {
        if sample.is_null() || reference.is_null() || out.is_null() {
            set_error("null handle");
            return AotStatus::NullPointer;
        }
        report((|| {
            let value = estimate_aw(&unsafe { &*sample }.0, &unsafe { &*reference }.0)?;
            unsafe { *out = value };
            Ok(AotStatus::Ok)
        })())
    })
}

/// Grid edge length for the adapted empirical measure.
///
/// # Safety
/// `out` must point to a writable f64.
#[no_mangle]
pub unsafe extern "C" fn aot_grid_resolution(
    n_samples: usize,
    dim: usize,
    horizon: usize,
    out: *mut f64,
) -> AotStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output pointer");
            return AotStatus::NullPointer;
        }
        report((|| {
            unsafe { *out = grid_resolution(n_samples, dim, horizon)? };
            Ok(AotStatus::Ok)
        })())
    })
}

/// Smoothing bandwidth used by the smoothed estimator.
///
/// # Safety
/// `out` must point to a writable f64.
#[no_mangle]
pub unsafe extern "C" fn aot_smoothing_sigma(
    n_samples: usize,
    dim: usize,
    horizon: usize,
    out: *mut f64,
) -> AotStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output pointer");
            return AotStatus::NullPointer;
        }
        report((|| {
            unsafe { *out = smoothing_sigma(n_samples, dim, horizon)? };
            Ok(AotStatus::Ok)
        })())
    })
}

/// Uniform convergence rate for compact laws.
///
/// # Safety
/// `out` must point to a writable f64.
#[no_mangle]
pub unsafe extern "C" fn aot_rate_inf(
    n: usize,
    dim: usize,
    horizon: usize,
    out: *mut f64,
) -> AotStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output pointer");
            return AotStatus::NullPointer;
        }
        report((|| {
            unsafe { *out = rate_inf(n, dim, horizon)? };
            Ok(AotStatus::Ok)
        })())
    })
}

/// Closed-form mixing bound for memory-chain observations.
///
/// # Safety
/// `out` must point to a writable f64.
#[no_mangle]
pub unsafe extern "C" fn aot_eta_bound_memory_chain(
    rho: f64,
    lag: usize,
    s: usize,
    out: *mut f64,
) -> AotStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output pointer");
            return AotStatus::NullPointer;
        }
        report((|| {
            unsafe { *out = eta_bound_memory_chain(rho, lag, s)? };
            Ok(AotStatus::Ok)
        })())
    })
}
