//! C interface to `simplex-embed`.
//!
//! Diagrams are opaque handles; results cross the boundary as JSON
//! strings owned by the library. Every call returns an [`HsStatus`]; on
//! failure [`hs_last_error_message`] describes the problem.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use simplex_embed::chamber_search::{replay_not_found, search_embedding, EmbeddingCertificate, SearchOptions, SearchReport, Verdict};
use simplex_embed::diagrams::{classify, named_diagram, parse_diagram_text, CoxeterDiagram};

/// Status codes. The first three match the CLI exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HsStatus {
    Ok = 0,
    NotExists = 1,
    Inconclusive = 2,
    InvalidArgument = 3,
    ParseError = 4,
    Internal = 5,
}

/// Opaque Coxeter diagram.
pub struct HsDiagram {
    inner: CoxeterDiagram,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn fail(status: HsStatus, msg: impl Into<String>) -> HsStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> HsStatus) -> HsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(HsStatus::Internal, msg)
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, HsStatus> {
    if p.is_null() {
        return Err(fail(HsStatus::InvalidArgument, "null string"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(HsStatus::InvalidArgument, "string is not UTF-8"))
}

unsafe fn write_out(out: *mut *mut c_char, s: String) -> HsStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            HsStatus::Ok
        }
        Err(_) => fail(HsStatus::Internal, "output contains NUL"),
    }
}

/// Parse a diagram from the text format (first diagram in `text`) or from
/// a name such as `(2,3,7)` or `[3^{[3,3]}]`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer. The
/// handle written to `out` must be released with [`hs_diagram_free`].
#[no_mangle]
pub unsafe extern "C" fn hs_diagram_parse(text: *const c_char, out: *mut *mut HsDiagram) -> HsStatus {
    guard(|| {
        if out.is_null() {
            return fail(HsStatus::InvalidArgument, "null output pointer");
        }
        *out = ptr::null_mut();
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let d = match parse_diagram_text(text) {
            Ok(v) if !v.is_empty() => v.into_iter().next().unwrap().diagram,
            parsed => match named_diagram(text.trim()) {
                Ok(d) => d,
                Err(e) => {
                    let msg = match parsed {
                        Err(pe) => format!("{pe}; as a name: {e}"),
                        Ok(_) => e.to_string(),
                    };
                    return fail(HsStatus::ParseError, msg);
                }
            },
        };
        *out = Box::into_raw(Box::new(HsDiagram { inner: d }));
        HsStatus::Ok
    })
}

/// # Safety
/// `d` must come from [`hs_diagram_parse`] and not be freed twice. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn hs_diagram_free(d: *mut HsDiagram) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Number of vertices, or 0 for a null handle.
///
/// # Safety
/// `d` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hs_diagram_rank(d: *const HsDiagram) -> usize {
    d.as_ref().map_or(0, |d| d.inner.rank())
}

/// Classification (tag, signature, components) as JSON.
///
/// # Safety
/// `d` must be a live handle and `out_json` a valid pointer; free the
/// result with [`hs_string_free`].
#[no_mangle]
pub unsafe extern "C" fn hs_diagram_classify(d: *const HsDiagram, out_json: *mut *mut c_char) -> HsStatus {
    guard(|| {
        let (Some(d), false) = (d.as_ref(), out_json.is_null()) else {
            return fail(HsStatus::InvalidArgument, "null argument");
        };
        match serde_json::to_string(&classify(&d.inner)) {
            Ok(s) => write_out(out_json, s),
            Err(e) => fail(HsStatus::Internal, e.to_string()),
        }
    })
}

/// Chamber search for H inside G. The full report is written to
/// `out_json`; the status is `Ok` (found), `NotExists` or `Inconclusive`.
/// `max_chambers` of 0 selects the default budget.
///
/// # Safety
/// `h` and `g` must be live handles and `out_json` a valid pointer; free
/// the result with [`hs_string_free`].
#[no_mangle]
pub unsafe extern "C" fn hs_embed(
    h: *const HsDiagram,
    g: *const HsDiagram,
    max_chambers: usize,
    out_json: *mut *mut c_char,
) -> HsStatus {
    guard(|| {
        let (Some(h), Some(g), false) = (h.as_ref(), g.as_ref(), out_json.is_null()) else {
            return fail(HsStatus::InvalidArgument, "null argument");
        };
        *out_json = ptr::null_mut();
        let mut opts = SearchOptions::default();
        if max_chambers > 0 {
            opts.max_chambers = max_chambers;
        }
        let report = match search_embedding(&h.inner, &g.inner, &opts) {
            Ok(r) => r,
            Err(e) => return fail(HsStatus::InvalidArgument, e.to_string()),
        };
        let json = match serde_json::to_string(&report) {
            Ok(s) => s,
            Err(e) => return fail(HsStatus::Internal, e.to_string()),
        };
        let s = write_out(out_json, json);
        if s != HsStatus::Ok {
            return s;
        }
        match report.verdict {
            Verdict::Found => HsStatus::Ok,
            Verdict::NotFound => HsStatus::NotExists,
            Verdict::Inapplicable | Verdict::Inconclusive => HsStatus::Inconclusive,
        }
    })
}

/// Re-verify a search report or embedding certificate given as JSON.
/// `Ok` means every certificate re-verified and every not-found claim
/// replayed; `Inconclusive` means the report claims nothing.
///
/// # Safety
/// `json` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hs_verify_json(json: *const c_char) -> HsStatus {
    guard(|| {
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        if let Ok(r) = serde_json::from_str::<SearchReport>(text) {
            return match r.verdict {
                Verdict::Found => match r.certificates.iter().try_for_each(|c| c.verify()) {
                    Ok(()) => HsStatus::Ok,
                    Err(e) => fail(HsStatus::InvalidArgument, e.to_string()),
                },
                Verdict::NotFound => match replay_not_found(&r) {
                    Ok(()) => HsStatus::Ok,
                    Err(e) => fail(HsStatus::InvalidArgument, e),
                },
                _ => HsStatus::Inconclusive,
            };
        }
        match serde_json::from_str::<EmbeddingCertificate>(text) {
            Ok(c) => match c.verify() {
                Ok(()) => HsStatus::Ok,
                Err(e) => fail(HsStatus::InvalidArgument, e.to_string()),
            },
            Err(e) => fail(HsStatus::ParseError, e.to_string()),
        }
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn hs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failing call on this thread, or null. Valid until
/// the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn hs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}
