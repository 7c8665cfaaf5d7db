//! C ABI for the maslov library: opaque loop handles, integer status codes,
//! and JSON strings for structured reports. The matching header lives in
//! `include/maslov.h`.
//!
//! Conventions: every function returns a `maslov_status`; outputs go through
//! pointers and are written only on `MASLOV_OK`. Strings returned by this
//! library must be released with `maslov_string_free`, loops with
//! `maslov_loop_free`. `maslov_last_error` returns a thread-local message
//! for the most recent failure.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};

use maslov::bundles::{maslov_gerbe_class, maslov_holonomy, maslov_holonomy_general, BranchConvention};
use maslov::charts::maslov_index;
use maslov::error::Error;
use maslov::json::LoopJson;
use maslov::symplectic::{rotation_line_loop, LagrangianLoop};

/// Status codes shared with the C header.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MaslovStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    WrongField = 4,
    Compute = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<Vec<u8>>) {
    let cstring = CString::new(message).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(cstring));
}

fn status_of(e: &Error) -> MaslovStatus {
    match e {
        Error::ComplexFieldUnsupported => MaslovStatus::WrongField,
        Error::Json(_) => MaslovStatus::Parse,
        _ => MaslovStatus::Compute,
    }
}

/// Opaque handle around a validated closed loop.
pub struct MaslovLoop {
    inner: LagrangianLoop,
}

/// Parse a loop from its JSON wire format. On success `*out` owns a new
/// handle.
///
/// # Safety
/// `json` must be a valid NUL-terminated C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn maslov_loop_from_json(
    json: *const c_char,
    out: *mut *mut MaslovLoop,
) -> MaslovStatus {
    if json.is_null() || out.is_null() {
        set_error("null argument");
        return MaslovStatus::NullArgument;
    }
    let text = match CStr::from_ptr(json).to_str() {
        Ok(t) => t,
        Err(_) => {
            set_error("input is not valid UTF-8");
            return MaslovStatus::InvalidUtf8;
        }
    };
    let parsed: LoopJson = match serde_json::from_str(text) {
        Ok(p) => p,
        Err(e) => {
            set_error(format!("json: {e}"));
            return MaslovStatus::Parse;
        }
    };
    match parsed.to_loop() {
        Ok(lp) => {
            *out = Box::into_raw(Box::new(MaslovLoop { inner: lp }));
            MaslovStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            MaslovStatus::Parse
        }
    }
}

/// Build the loop of lines making `k` half-turns, sampled `samples` times.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn maslov_rotation_loop(
    k: i64,
    samples: usize,
    out: *mut *mut MaslovLoop,
) -> MaslovStatus {
    if out.is_null() {
        set_error("null argument");
        return MaslovStatus::NullArgument;
    }
    match rotation_line_loop(k, samples) {
        Ok(lp) => {
            *out = Box::into_raw(Box::new(MaslovLoop { inner: lp }));
            MaslovStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            MaslovStatus::Compute
        }
    }
}

/// Release a loop handle. Null is allowed.
///
/// # Safety
/// `loop_ptr` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn maslov_loop_free(loop_ptr: *mut MaslovLoop) {
    if !loop_ptr.is_null() {
        drop(Box::from_raw(loop_ptr));
    }
}

/// Number of samples in the loop.
///
/// # Safety
/// `loop_ptr` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn maslov_loop_len(
    loop_ptr: *const MaslovLoop,
    out: *mut usize,
) -> MaslovStatus {
    if loop_ptr.is_null() || out.is_null() {
        set_error("null argument");
        return MaslovStatus::NullArgument;
    }
    *out = (*loop_ptr).inner.len();
    MaslovStatus::Ok
}

/// Maslov index of the loop (real spaces only).
///
/// # Safety
/// `loop_ptr` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn maslov_loop_index(
    loop_ptr: *const MaslovLoop,
    out: *mut i64,
) -> MaslovStatus {
    if loop_ptr.is_null() || out.is_null() {
        set_error("null argument");
        return MaslovStatus::NullArgument;
    }
    match maslov_index(&(*loop_ptr).inner) {
        Ok(index) => {
            *out = index;
            MaslovStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            status_of(&e)
        }
    }
}

/// Z4 holonomy of the loop as a unit complex number. `branch_negative = 0`
/// selects the +i convention, anything else -i.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn maslov_loop_holonomy(
    loop_ptr: *const MaslovLoop,
    branch_negative: c_int,
    out_re: *mut f64,
    out_im: *mut f64,
) -> MaslovStatus {
    if loop_ptr.is_null() || out_re.is_null() || out_im.is_null() {
        set_error("null argument");
        return MaslovStatus::NullArgument;
    }
    let convention = if branch_negative == 0 {
        BranchConvention::PlusI
    } else {
        BranchConvention::MinusI
    };
    let lp = &(*loop_ptr).inner;
    let result = if lp.space().n() == 1 {
        maslov_holonomy(lp, convention)
    } else {
        maslov_holonomy_general(lp, convention)
    };
    match result {
        Ok(h) => {
            let z = h.value.to_complex();
            *out_re = z.re;
            *out_im = z.im;
            MaslovStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            status_of(&e)
        }
    }
}

fn export_string(text: String, out: *mut *mut c_char) -> MaslovStatus {
    match CString::new(text) {
        Ok(cstring) => {
            unsafe { *out = cstring.into_raw() };
            MaslovStatus::Ok
        }
        Err(_) => {
            set_error("report contained an interior NUL");
            MaslovStatus::Compute
        }
    }
}

/// Dual-route gerbe-class report as a JSON string. `branch_negative`
/// selects the Z4 convention used for the equator transport.
///
/// # Safety
/// `out` must be a valid pointer; free the string with `maslov_string_free`.
#[no_mangle]
pub unsafe extern "C" fn maslov_gerbe_report_json(
    branch_negative: c_int,
    out: *mut *mut c_char,
) -> MaslovStatus {
    if out.is_null() {
        set_error("null argument");
        return MaslovStatus::NullArgument;
    }
    let convention = if branch_negative == 0 {
        BranchConvention::PlusI
    } else {
        BranchConvention::MinusI
    };
    match maslov_gerbe_class(convention) {
        Ok(report) => {
            let value = serde_json::json!({
                "giraud_evaluation": [report.giraud_evaluation.re, report.giraud_evaluation.im],
                "equator_holonomy": [report.equator_holonomy.re, report.equator_holonomy.im],
                "equal": report.routes_equal,
                "max_deviation": (report.giraud_evaluation - report.equator_holonomy).norm(),
                "chern_evaluation": report.chern_evaluation,
                "z4_holonomy": report.z4_holonomy.to_string(),
                "square_relation_holds": report.square_relation_holds,
                "value": [report.value.re, report.value.im],
                "consistent": report.consistent,
            });
            export_string(value.to_string(), out)
        }
        Err(e) => {
            set_error(e.to_string());
            status_of(&e)
        }
    }
}

/// Run the verification suite; the result is a JSON array of check reports.
///
/// # Safety
/// `out` must be a valid pointer; free the string with `maslov_string_free`.
#[no_mangle]
pub unsafe extern "C" fn maslov_verify_json(
    seed: u64,
    samples: usize,
    out: *mut *mut c_char,
) -> MaslovStatus {
    if out.is_null() {
        set_error("null argument");
        return MaslovStatus::NullArgument;
    }
    let reports = maslov::verify::run_all(seed, samples);
    match serde_json::to_string(&reports) {
        Ok(text) => export_string(text, out),
        Err(e) => {
            set_error(format!("json: {e}"));
            MaslovStatus::Compute
        }
    }
}

/// Release a string returned by this library. Null is allowed.
///
/// # Safety
/// `s` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn maslov_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn maslov_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map(|s| s.as_ptr())
            .unwrap_or(std::ptr::null())
    })
}
