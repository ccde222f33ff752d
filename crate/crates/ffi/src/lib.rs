//! C ABI over the hoalg kernel.
//!
//! A session is loaded from presentation text and owned by the caller through an opaque
//! handle. Every entry point returns a [`HoalgStatus`]; results come back as JSON strings
//! allocated here, which the caller releases with [`hoalg_string_free`]. On error the
//! output string, when requested, holds `{"error": {"kind", "line", "message"}}`.

use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hoalg::cli::{run, Options};
use hoalg::complex::Window;
use hoalg::linalg::Field;
use hoalg::presentation::Session;
use hoalg::Error;

/// Result of a call. `HOALG_STATUS_TASK_FAILED` means the run completed and its report
/// (written as usual) contains a failing task.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HoalgStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    ValidationError = 4,
    WindowTooNarrow = 5,
    TaskFailed = 6,
    InvalidOption = 7,
    Internal = 8,
}

/// A validated presentation plus run options.
pub struct HoalgSession {
    session: Session,
    options: Options,
}

fn status_of(e: &Error) -> HoalgStatus {
    match e {
        Error::Parse { .. } => HoalgStatus::ParseError,
        Error::Validation(_) => HoalgStatus::ValidationError,
        Error::WindowTooNarrow(_) => HoalgStatus::WindowTooNarrow,
        _ => HoalgStatus::Internal,
    }
}

fn error_json(kind: HoalgStatus, e: &str, line: Option<usize>) -> String {
    serde_json::json!({ "error": { "kind": format!("{kind:?}"), "line": line, "message": e } }).to_string()
}

/// Stores `s` in `*out` when `out` is non-null.
unsafe fn put(out: *mut *mut c_char, s: String) {
    if !out.is_null() {
        *out = CString::new(s).map_or(ptr::null_mut(), CString::into_raw);
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, HoalgStatus> {
    if s.is_null() {
        return Err(HoalgStatus::NullArgument);
    }
    CStr::from_ptr(s).to_str().map_err(|_| HoalgStatus::InvalidUtf8)
}

/// Runs `f`, turning a panic into `HOALG_STATUS_INTERNAL`.
fn guard(f: impl FnOnce() -> HoalgStatus) -> HoalgStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(HoalgStatus::Internal)
}

/// Library version as a static NUL-terminated string; do not free.
#[no_mangle]
pub extern "C" fn hoalg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses and validates a presentation. On success `*out` receives a new session.
/// On failure `*out` is set to null and, if `err` is non-null, `*err` receives the error
/// as JSON.
///
/// # Safety
/// `text` must be a valid NUL-terminated string. `out` must be a valid pointer to write to.
/// `err` must be null or a valid pointer to write to.
#[no_mangle]
pub unsafe extern "C" fn hoalg_session_load(text: *const c_char, out: *mut *mut HoalgSession, err: *mut *mut c_char) -> HoalgStatus {
    if out.is_null() {
        return HoalgStatus::NullArgument;
    }
    *out = ptr::null_mut();
    guard(|| {
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match Session::load(text) {
            Ok(session) => {
                *out = Box::into_raw(Box::new(HoalgSession { session, options: Options::default() }));
                HoalgStatus::Ok
            }
            Err(e) => {
                let st = status_of(&e);
                let line = if let Error::Parse { line, .. } = e { Some(line) } else { None };
                put(err, error_json(st, &e.to_string(), line));
                st
            }
        }
    })
}

/// Releases a session. Null is ignored.
///
/// # Safety
/// `session` must be null or a pointer returned by [`hoalg_session_load`] that has not been
/// freed.
#[no_mangle]
pub unsafe extern "C" fn hoalg_session_free(session: *mut HoalgSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Overrides the seed of sampled checks.
///
/// # Safety
/// `session` must be a live session handle.
#[no_mangle]
pub unsafe extern "C" fn hoalg_session_set_seed(session: *mut HoalgSession, seed: u64) -> HoalgStatus {
    match session.as_mut() {
        Some(s) => {
            s.options.seed = Some(seed);
            HoalgStatus::Ok
        }
        None => HoalgStatus::NullArgument,
    }
}

/// Overrides the coefficient field: `"Q"` or `"Fp:<p>"`.
///
/// # Safety
/// `session` must be a live session handle and `field` a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hoalg_session_set_field(session: *mut HoalgSession, field: *const c_char) -> HoalgStatus {
    let Some(s) = session.as_mut() else { return HoalgStatus::NullArgument };
    match read_str(field) {
        Ok(f) => match Field::parse(f) {
            Some(f) => {
                s.options.field = Some(f);
                HoalgStatus::Ok
            }
            None => HoalgStatus::InvalidOption,
        },
        Err(st) => st,
    }
}

/// Overrides the truncation window, written `a:wmin:wmax:dmin:dmax`.
///
/// # Safety
/// `session` must be a live session handle and `window` a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hoalg_session_set_window(session: *mut HoalgSession, window: *const c_char) -> HoalgStatus {
    let Some(s) = session.as_mut() else { return HoalgStatus::NullArgument };
    match read_str(window) {
        Ok(w) => match Window::parse(w) {
            Some(w) => {
                s.options.window = Some(w);
                HoalgStatus::Ok
            }
            None => HoalgStatus::InvalidOption,
        },
        Err(st) => st,
    }
}

/// Number of tasks listed in the presentation.
///
/// # Safety
/// `session` must be null or a live session handle.
#[no_mangle]
pub unsafe extern "C" fn hoalg_session_task_count(session: *const HoalgSession) -> usize {
    session.as_ref().map_or(0, |s| s.session.pres.tasks.len())
}

/// Runs every task of the session and writes the JSON report (the same document the
/// command-line tool prints) to `*report`.
///
/// # Safety
/// `session` must be a live session handle. `report` must be null or a valid pointer to
/// write to; a string written there must be released with [`hoalg_string_free`].
#[no_mangle]
pub unsafe extern "C" fn hoalg_session_run(session: *const HoalgSession, report: *mut *mut c_char) -> HoalgStatus {
    if !report.is_null() {
        *report = ptr::null_mut();
    }
    let Some(s) = session.as_ref() else { return HoalgStatus::NullArgument };
    guard(|| match run(&s.session, None, &s.options) {
        Ok(r) => {
            put(report, serde_json::to_string(&r).expect("report serializes"));
            if r.passed() {
                HoalgStatus::Ok
            } else {
                HoalgStatus::TaskFailed
            }
        }
        Err(e) => {
            let st = status_of(&e);
            put(report, error_json(st, &e.to_string(), None));
            st
        }
    })
}

/// Canonical printed form of the session's presentation.
///
/// # Safety
/// `session` must be a live session handle and `out` a valid pointer to write to.
#[no_mangle]
pub unsafe extern "C" fn hoalg_session_print(session: *const HoalgSession, out: *mut *mut c_char) -> HoalgStatus {
    let Some(s) = session.as_ref() else { return HoalgStatus::NullArgument };
    if out.is_null() {
        return HoalgStatus::NullArgument;
    }
    put(out, s.session.pres.to_string());
    HoalgStatus::Ok
}

/// Releases a string returned through an output parameter. Null is ignored.
///
/// # Safety
/// `s` must be null or a string allocated by this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn hoalg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
