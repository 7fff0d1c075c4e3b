//! C interface to treeaxes.
//!
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `_free` function. Every call returns a [`TaStatus`]; on failure
//! `ta_last_error` describes the error for the calling thread. Strings
//! returned through out-parameters are released with `ta_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use treeaxes::free_group::{format_word, is_primitive, parse_word, GroupPresentation, ReducedWord};
use treeaxes::suite::analyze_word;
use treeaxes::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInput = 4,
    Unsupported = 5,
    /// The operation needs a nontrivial or loxodromic element.
    Degenerate = 6,
    Internal = 7,
}

/// A group presentation (free product of free and finite cyclic factors).
pub struct TaPresentation {
    inner: GroupPresentation,
}

/// A reduced word, tied to the presentation it was parsed with.
pub struct TaWord {
    inner: ReducedWord,
    presentation: GroupPresentation,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn status_of(e: &Error) -> TaStatus {
    match e {
        Error::Parse { .. } => TaStatus::Parse,
        Error::Unsupported(_) => TaStatus::Unsupported,
        Error::Identity | Error::FiniteOrder | Error::Elliptic => TaStatus::Degenerate,
        _ => TaStatus::InvalidInput,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (TaStatus, String)>) -> TaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            TaStatus::Ok
        }
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            TaStatus::Internal
        }
    }
}

fn lib(e: Error) -> (TaStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (TaStatus, String) {
    (TaStatus::NullArgument, format!("{what} is null"))
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, (TaStatus, String)> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| (TaStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (TaStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, v: T, what: &str) -> Result<(), (TaStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn ta_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn ta_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Parses `F2`, `Z2*Z3` or TOML such as `free_rank = 2`.
///
/// # Safety
/// `spec` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ta_presentation_parse(spec: *const c_char, out: *mut *mut TaPresentation) -> TaStatus {
    guard(|| {
        let spec = text(spec, "spec")?;
        let p = GroupPresentation::from_spec(spec).map_err(lib)?;
        put(out, Box::into_raw(Box::new(TaPresentation { inner: p })), "out")
    })
}

/// # Safety
/// `p` must come from `ta_presentation_parse` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ta_presentation_free(p: *mut TaPresentation) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Parses and freely reduces a word such as `abAB` (capitals are inverses).
///
/// # Safety
/// `p` must be a live presentation, `word` nul-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ta_word_parse(p: *const TaPresentation, word: *const c_char, out: *mut *mut TaWord) -> TaStatus {
    guard(|| {
        let p = deref(p, "presentation")?;
        let w = parse_word(&p.inner, text(word, "word")?).map_err(lib)?;
        let handle = TaWord {
            inner: w,
            presentation: p.inner.clone(),
        };
        put(out, Box::into_raw(Box::new(handle)), "out")
    })
}

/// # Safety
/// `w` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ta_word_free(w: *mut TaWord) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Reduced form of the word; release with `ta_string_free`.
///
/// # Safety
/// `w` must be a live word and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ta_word_to_string(w: *const TaWord, out: *mut *mut c_char) -> TaStatus {
    guard(|| {
        let w = deref(w, "word")?;
        put(out, c_string(format_word(&w.presentation, &w.inner)), "out")
    })
}

/// Translation length in the Cayley tree (free groups) or the Bass–Serre
/// tree (free products); 0 for elliptic elements.
///
/// # Safety
/// `w` must be a live word and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ta_translation_length(w: *const TaWord, out: *mut usize) -> TaStatus {
    guard(|| {
        let w = deref(w, "word")?;
        let a = analyze_word(&w.presentation, &w.inner).map_err(lib)?;
        put(out, a.translation_length, "out")
    })
}

/// w = root^exponent with root not a proper power. The root is a new handle.
///
/// # Safety
/// `w` must be a live word; `root` and `exponent` writable.
#[no_mangle]
pub unsafe extern "C" fn ta_root(w: *const TaWord, root: *mut *mut TaWord, exponent: *mut u32) -> TaStatus {
    guard(|| {
        let w = deref(w, "word")?;
        if root.is_null() || exponent.is_null() {
            return Err(null("out"));
        }
        let r = w.presentation.root(&w.inner).map_err(lib)?;
        let handle = TaWord {
            inner: r.root,
            presentation: w.presentation.clone(),
        };
        put(exponent, r.exponent, "exponent")?;
        put(root, Box::into_raw(Box::new(handle)), "root")
    })
}

/// Whether the word is part of a free basis; free groups only.
///
/// # Safety
/// `w` must be a live word and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ta_is_primitive(w: *const TaWord, out: *mut bool) -> TaStatus {
    guard(|| {
        let w = deref(w, "word")?;
        put(out, is_primitive(&w.presentation, &w.inner).map_err(lib)?, "out")
    })
}

/// Full analysis (cyclic core, root, translation length, primitivity, axis)
/// as JSON; release with `ta_string_free`.
///
/// # Safety
/// `w` must be a live word and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ta_analyze_json(w: *const TaWord, out: *mut *mut c_char) -> TaStatus {
    guard(|| {
        let w = deref(w, "word")?;
        let a = analyze_word(&w.presentation, &w.inner).map_err(lib)?;
        let json = serde_json::to_string(&a).map_err(|e| (TaStatus::Internal, e.to_string()))?;
        put(out, c_string(json), "out")
    })
}

/// # Safety
/// `s` must be a string returned by this library, or null.
#[no_mangle]
pub unsafe extern "C" fn ta_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
