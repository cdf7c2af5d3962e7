//! C ABI for the credalk engine.
//!
//! Models are opaque handles created from JSON text. Functions return a
//! [`CkStatus`]; strings handed out must be released with
//! [`ck_string_free`]. The message for the last failure on the calling
//! thread is available from [`ck_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use credalk_core::cli::{self, Model, Outcome, VertexOptions};
use credalk_core::credal::Bound;
use credalk_core::exactq::format_rational;
use credalk_core::Error;

/// Status codes. The first four match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CkStatus {
    Ok = 0,
    /// A check failed or the joint set is empty; the report is still produced.
    Fail = 1,
    InvalidInput = 2,
    ResourceCap = 3,
    NullPointer = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CkBound {
    Lower = 0,
    Upper = 1,
}

/// Opaque parsed model.
pub struct CkModel {
    inner: Model,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> CkStatus {
    match cli::exit_code(e) {
        1 => CkStatus::Fail,
        3 => CkStatus::ResourceCap,
        _ => CkStatus::InvalidInput,
    }
}

fn guard(f: impl FnOnce() -> Result<CkStatus, (CkStatus, String)>) -> CkStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            CkStatus::Panic
        }
    }
}

fn fail(e: Error) -> (CkStatus, String) {
    (status_of(&e), e.to_string())
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, (CkStatus, String)> {
    if p.is_null() {
        return Err((CkStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (CkStatus::InvalidInput, format!("{what} is not UTF-8")))
}

unsafe fn model<'a>(m: *const CkModel) -> Result<&'a Model, (CkStatus, String)> {
    if m.is_null() {
        return Err((CkStatus::NullPointer, "model is null".into()));
    }
    Ok(&(*m).inner)
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), (CkStatus, String)> {
    if out.is_null() {
        return Err((CkStatus::NullPointer, "output pointer is null".into()));
    }
    let c = CString::new(s).map_err(|_| (CkStatus::InvalidInput, "output contains NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn put_outcome(out: *mut *mut c_char, o: Outcome) -> Result<CkStatus, (CkStatus, String)> {
    put_string(out, cli::render(&o.document))?;
    Ok(if o.exit == cli::EXIT_PASS { CkStatus::Ok } else { CkStatus::Fail })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ck_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failing call on this thread, or NULL. Valid until
/// the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn ck_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses a JSON model. On success `*out` owns a handle to release with
/// [`ck_model_free`].
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ck_model_from_json(json: *const c_char, out: *mut *mut CkModel) -> CkStatus {
    guard(|| {
        if out.is_null() {
            return Err((CkStatus::NullPointer, "output pointer is null".into()));
        }
        let m = cli::parse_model(text(json, "json")?).map_err(fail)?;
        *out = Box::into_raw(Box::new(CkModel { inner: m }));
        Ok(CkStatus::Ok)
    })
}

/// # Safety
/// `model` must be NULL or a handle from [`ck_model_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ck_model_free(model: *mut CkModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ck_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Consistency report as JSON. Returns `Fail` when a condition fails.
///
/// # Safety
/// `model` must be a live handle and `report` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ck_validate(model: *const CkModel, report: *mut *mut c_char) -> CkStatus {
    guard(|| {
        let m = self::model(model)?;
        put_outcome(report, cli::validate(m).map_err(fail)?)
    })
}

/// Joint set document as JSON. Returns `Fail` when the joint set is empty.
///
/// # Safety
/// `model` must be a live handle and `report` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ck_build(model: *const CkModel, report: *mut *mut c_char) -> CkStatus {
    guard(|| {
        let m = self::model(model)?;
        put_outcome(report, cli::build(m, VertexOptions::default()).map_err(fail)?)
    })
}

/// Full verification report as JSON. Returns `Fail` unless the
/// representation holds for every supplied tuple.
///
/// # Safety
/// `model` must be a live handle and `report` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ck_verify(model: *const CkModel, report: *mut *mut c_char) -> CkStatus {
    guard(|| {
        let m = self::model(model)?;
        put_outcome(report, cli::verify(m, VertexOptions::default()).map_err(fail)?)
    })
}

/// Lower or upper expectation as a rational string.
///
/// `tuple` is a comma-separated list of index labels; `function` is a JSON
/// array of rationals or whitespace-separated rationals. A nonzero `joint`
/// bounds over the pushforward of the joint set instead of the credal set.
///
/// # Safety
/// String arguments must be valid NUL-terminated strings, `model` a live
/// handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ck_expectation(
    model: *const CkModel,
    tuple: *const c_char,
    function: *const c_char,
    bound: CkBound,
    joint: i32,
    out: *mut *mut c_char,
) -> CkStatus {
    guard(|| {
        let m = self::model(model)?;
        let labels: Vec<&str> = text(tuple, "tuple")?
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .collect();
        let f = cli::parse_function(text(function, "function")?).map_err(fail)?;
        let b = match bound {
            CkBound::Lower => Bound::Lower,
            CkBound::Upper => Bound::Upper,
        };
        let q = cli::expect(m, &labels, &f, b, joint != 0).map_err(fail)?;
        put_string(out, format_rational(&q))?;
        Ok(CkStatus::Ok)
    })
}

/// Uniform-split extension of a partition document; `*out` receives a JSON
/// array of rational strings.
///
/// # Safety
/// `partition` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ck_extend(partition: *const c_char, out: *mut *mut c_char) -> CkStatus {
    guard(|| {
        let v = cli::extend(text(partition, "partition")?).map_err(fail)?;
        let parts: Vec<String> = v
            .as_vector()
            .iter()
            .map(|q| format!("\"{}\"", format_rational(q)))
            .collect();
        put_string(out, format!("[{}]", parts.join(",")))?;
        Ok(CkStatus::Ok)
    })
}
