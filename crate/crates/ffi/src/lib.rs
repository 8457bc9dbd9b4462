//! C interface to the qcvine engine.
//!
//! Models are opaque handles freed with `qcv_model_free`. Every fallible call
//! returns a `QcvStatus`; on failure `qcv_last_error` describes the problem
//! for the calling thread. Strings returned through out-parameters are owned
//! by the caller and released with `qcv_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qcvine::dsl::{compile_with, Params};
use qcvine::model::CircuitModel;
use qcvine::render::RenderTheme;
use qcvine::view::{render_view, ViewKind, ViewOptions};
use qcvine::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcvStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Syntax = 3,
    Semantic = 4,
    Compile = 5,
    InvalidJson = 6,
    NotFound = 7,
    InvalidArgument = 8,
    Theme = 9,
    Io = 10,
    Panic = 11,
}

/// Opaque compiled circuit.
pub struct QcvModel {
    inner: CircuitModel,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(QcvStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Syntax { .. } => QcvStatus::Syntax,
            Error::Semantic { .. } => QcvStatus::Semantic,
            Error::Compile { .. } => QcvStatus::Compile,
            Error::Json(_) => QcvStatus::InvalidJson,
            Error::UnknownNode(_) | Error::QubitOutOfRange { .. } => QcvStatus::NotFound,
            Error::Domain(_) => QcvStatus::InvalidArgument,
            Error::Theme(_) => QcvStatus::Theme,
            Error::Io(_) => QcvStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> QcvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QcvStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            QcvStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(QcvStatus::NullArgument, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(QcvStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

unsafe fn opt_str_arg<'a>(p: *const c_char, name: &str) -> Result<Option<&'a str>, Failure> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, name).map(Some)
    }
}

unsafe fn model_arg<'a>(p: *const QcvModel) -> Result<&'a CircuitModel, Failure> {
    p.as_ref()
        .map(|m| &m.inner)
        .ok_or_else(|| Failure(QcvStatus::NullArgument, "model is null".into()))
}

fn null_out() -> Failure {
    Failure(QcvStatus::NullArgument, "out is null".into())
}

unsafe fn put_model(out: *mut *mut QcvModel, model: CircuitModel) {
    *out = Box::into_raw(Box::new(QcvModel { inner: model }));
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure(QcvStatus::InvalidArgument, "output contains NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

/// Compiles a program. `params_json` is an object of integer parameters
/// such as `{"n": 3}` and may be null.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qcv_compile(
    source: *const c_char,
    params_json: *const c_char,
    out: *mut *mut QcvModel,
) -> QcvStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_out());
        }
        *out = ptr::null_mut();
        let source = str_arg(source, "source")?;
        let params: Params = match opt_str_arg(params_json, "params_json")? {
            Some(text) => serde_json::from_str(text).map_err(Error::from)?,
            None => Params::new(),
        };
        put_model(out, compile_with(source, &params)?);
        Ok(())
    })
}

/// Loads a model previously produced by `qcv_model_json`.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qcv_model_from_json(json: *const c_char, out: *mut *mut QcvModel) -> QcvStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_out());
        }
        *out = ptr::null_mut();
        let text = str_arg(json, "json")?;
        put_model(out, CircuitModel::from_json(text)?);
        Ok(())
    })
}

/// # Safety
/// `model` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qcv_model_free(model: *mut QcvModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of qubits, or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qcv_model_qubits(model: *const QcvModel) -> u32 {
    model.as_ref().map_or(0, |m| m.inner.qubit_count)
}

/// Number of gate instances, or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qcv_model_gate_count(model: *const QcvModel) -> u64 {
    model.as_ref().map_or(0, |m| m.inner.gates.len() as u64)
}

/// Canonical model JSON.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qcv_model_json(model: *const QcvModel, out: *mut *mut c_char) -> QcvStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_out());
        }
        *out = ptr::null_mut();
        put_string(out, model_arg(model)?.to_json())
    })
}

/// Semantic tree JSON.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qcv_structure_json(model: *const QcvModel, out: *mut *mut c_char) -> QcvStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_out());
        }
        *out = ptr::null_mut();
        let tree = &model_arg(model)?.tree;
        put_string(out, serde_json::to_string(tree).map_err(Error::from)?)
    })
}

/// Renders `view` (component, abstraction, provenance, placement or
/// connectivity). `options_json` may be null or an object with `foldDepth`,
/// `unfolded`, `qubit`, `node`, `threshold` and `json`. `theme_json` may be
/// null for the default theme.
///
/// # Safety
/// `model` must be a live handle; strings NUL-terminated or null where
/// allowed; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qcv_render(
    model: *const QcvModel,
    view: *const c_char,
    options_json: *const c_char,
    theme_json: *const c_char,
    out: *mut *mut c_char,
) -> QcvStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_out());
        }
        *out = ptr::null_mut();
        let model = model_arg(model)?;
        let view: ViewKind = str_arg(view, "view")?.parse()?;
        let opts: ViewOptions = match opt_str_arg(options_json, "options_json")? {
            Some(text) => serde_json::from_str(text).map_err(Error::from)?,
            None => ViewOptions::default(),
        };
        let theme = match opt_str_arg(theme_json, "theme_json")? {
            Some(text) => RenderTheme::from_json(text)?,
            None => RenderTheme::default(),
        };
        put_string(out, render_view(model, view, &opts, &theme)?)
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qcv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the most recent failure on this thread; empty if none.
/// Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qcv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn qcv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
