//! C interface to `core_entropy`.
//!
//! Portraits are opaque handles created from JSON and released with
//! `ce_portrait_free`. Every fallible call returns a `CeStatus`; the message of
//! the last failure on the calling thread is available through
//! `ce_last_error_message`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::ptr;

use core_entropy::entropy::{core_entropy_with_limit, EntropyError, DEFAULT_BASIS_LIMIT};
use core_entropy::portrait::{hausdorff_distance, major_metric_md, CriticalPortrait};
use core_entropy::wedge::{growth_rate_with, GrowthOptions, WedgeError};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidPortrait = 3,
    Budget = 4,
    Numerical = 5,
    BufferTooSmall = 6,
    InvalidArgument = 7,
}

/// Opaque portrait handle.
pub struct CePortrait {
    inner: CriticalPortrait,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn fail(status: CeStatus, message: impl Into<String>) -> CeStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = message.into());
    status
}

fn entropy_status(e: EntropyError) -> CeStatus {
    match e {
        EntropyError::BasisTooLarge { .. } => fail(CeStatus::Budget, e.to_string()),
        EntropyError::Eigen(_) => fail(CeStatus::Numerical, e.to_string()),
    }
}

fn wedge_status(e: WedgeError) -> CeStatus {
    let status = match e {
        WedgeError::TooManyVertices { .. }
        | WedgeError::TooManyCycles { .. }
        | WedgeError::TooManyMulticycles { .. }
        | WedgeError::Overflow { .. } => CeStatus::Budget,
        WedgeError::ZeroBound | WedgeError::DegreeTooLarge { .. } => CeStatus::InvalidArgument,
        _ => CeStatus::Numerical,
    };
    fail(status, e.to_string())
}

unsafe fn portrait_ref<'a>(p: *const CePortrait) -> Option<&'a CriticalPortrait> {
    p.as_ref().map(|h| &h.inner)
}

/// Parses and validates a portrait given as JSON, e.g.
/// `{"degree":3,"leaves":[["0","1/3"],["7/15","4/5"]]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ce_portrait_from_json(
    json: *const c_char,
    out: *mut *mut CePortrait,
) -> CeStatus {
    if json.is_null() || out.is_null() {
        return fail(CeStatus::NullPointer, "null argument");
    }
    let Ok(text) = CStr::from_ptr(json).to_str() else {
        return fail(CeStatus::InvalidUtf8, "portrait JSON is not UTF-8");
    };
    match CriticalPortrait::from_json_str(text) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(CePortrait { inner }));
            CeStatus::Ok
        }
        Err(e) => {
            *out = ptr::null_mut();
            fail(CeStatus::InvalidPortrait, e.to_string())
        }
    }
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `p` must come from `ce_portrait_from_json` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ce_portrait_free(p: *mut CePortrait) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ce_portrait_degree(p: *const CePortrait, out: *mut u32) -> CeStatus {
    match (portrait_ref(p), out.as_mut()) {
        (Some(xi), Some(out)) => {
            *out = xi.degree();
            CeStatus::Ok
        }
        _ => fail(CeStatus::NullPointer, "null argument"),
    }
}

/// Number of leaves and polygons.
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ce_portrait_size(p: *const CePortrait, out: *mut usize) -> CeStatus {
    match (portrait_ref(p), out.as_mut()) {
        (Some(xi), Some(out)) => {
            *out = xi.size();
            CeStatus::Ok
        }
        _ => fail(CeStatus::NullPointer, "null argument"),
    }
}

/// 1 if the portrait is a primitive major, 0 otherwise.
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ce_portrait_is_primitive(p: *const CePortrait, out: *mut i32) -> CeStatus {
    match (portrait_ref(p), out.as_mut()) {
        (Some(xi), Some(out)) => {
            *out = i32::from(xi.is_primitive_major());
            CeStatus::Ok
        }
        _ => fail(CeStatus::NullPointer, "null argument"),
    }
}

/// Spectral radius and entropy from the finite transition matrix. Either
/// output pointer may be null.
///
/// # Safety
/// `p` must be a live handle; non-null outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn ce_core_entropy(
    p: *const CePortrait,
    out_rho: *mut f64,
    out_entropy: *mut f64,
) -> CeStatus {
    let Some(xi) = portrait_ref(p) else {
        return fail(CeStatus::NullPointer, "null portrait");
    };
    match core_entropy_with_limit(xi, DEFAULT_BASIS_LIMIT) {
        Ok(fe) => {
            if let Some(r) = out_rho.as_mut() {
                *r = fe.rho;
            }
            if let Some(h) = out_entropy.as_mut() {
                *h = fe.entropy;
            }
            CeStatus::Ok
        }
        Err(e) => entropy_status(e),
    }
}

/// Growth rate of the non-diagonal wedge graph truncated at `bound`.
///
/// # Safety
/// `p` must be a live handle and `out_rate` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ce_growth_rate(
    p: *const CePortrait,
    bound: usize,
    out_rate: *mut f64,
) -> CeStatus {
    let (Some(xi), Some(out)) = (portrait_ref(p), out_rate.as_mut()) else {
        return fail(CeStatus::NullPointer, "null argument");
    };
    let mut opts = GrowthOptions::new(bound);
    opts.check_stabilization = false;
    match growth_rate_with(xi, &opts) {
        Ok(est) => {
            *out = est.rate;
            CeStatus::Ok
        }
        Err(e) => wedge_status(e),
    }
}

/// Grid estimate of the distance between the induced majors: a lower bound
/// and a guaranteed upper bound.
///
/// # Safety
/// Handles must be live; outputs valid.
#[no_mangle]
pub unsafe extern "C" fn ce_major_distance(
    a: *const CePortrait,
    b: *const CePortrait,
    resolution: usize,
    out_value: *mut f64,
    out_upper: *mut f64,
) -> CeStatus {
    let (Some(a), Some(b), Some(v), Some(u)) =
        (portrait_ref(a), portrait_ref(b), out_value.as_mut(), out_upper.as_mut())
    else {
        return fail(CeStatus::NullPointer, "null argument");
    };
    match major_metric_md(&a.induced_major(), &b.induced_major(), resolution) {
        Ok(md) => {
            *v = md.value_f64();
            *u = md.upper_f64();
            CeStatus::Ok
        }
        Err(e) => fail(CeStatus::InvalidArgument, e.to_string()),
    }
}

/// Hausdorff distance between the unions of the leaves in the closed disk.
///
/// # Safety
/// Handles must be live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ce_hausdorff_distance(
    a: *const CePortrait,
    b: *const CePortrait,
    out: *mut f64,
) -> CeStatus {
    match (portrait_ref(a), portrait_ref(b), out.as_mut()) {
        (Some(a), Some(b), Some(out)) => {
            *out = hausdorff_distance(a, b);
            CeStatus::Ok
        }
        _ => fail(CeStatus::NullPointer, "null argument"),
    }
}

/// Copies the last error message of this thread into `buf` (NUL-terminated)
/// and stores its length, without the terminator, in `out_len`. Returns
/// `BufferTooSmall` when `len` cannot hold it; `buf` may be null to query the
/// length.
///
/// # Safety
/// `buf` must hold `len` bytes when non-null; `out_len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ce_last_error_message(
    buf: *mut c_char,
    len: usize,
    out_len: *mut usize,
) -> CeStatus {
    let Some(out_len) = out_len.as_mut() else {
        return CeStatus::NullPointer;
    };
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        *out_len = msg.len();
        if buf.is_null() || len < msg.len() + 1 {
            return CeStatus::BufferTooSmall;
        }
        ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), msg.len());
        *buf.add(msg.len()) = 0;
        CeStatus::Ok
    })
}

/// Static NUL-terminated version string.
#[no_mangle]
pub extern "C" fn ce_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
