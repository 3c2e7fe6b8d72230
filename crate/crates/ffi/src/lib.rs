//! C interface to the `atlh` model checker.
//!
//! Models and formulas are opaque handles owned by the caller and released
//! with their `_free` function. Every fallible call returns an
//! [`AtlhStatus`]; on failure a message is kept per thread and can be read
//! with [`atlh_last_error_message`]. Strings returned through out-pointers
//! are released with [`atlh_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use atlh::cegm::{load_model, save_model, Cegm};
use atlh::formula::{parse_formula, Formula};
use atlh::mcheck::{check, CheckOptions, StrategyMode, SuccessScope};
use atlh::scenarios::{gen_referendum_double, gen_referendum_single, gen_threeballot, DoubleVariant};
use atlh::succinct::{gen_mn, gen_nnj};
use atlh::translate::{h_to_k, k_to_h, TranslateOptions};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtlhStatus {
    Ok = 0,
    /// A required pointer was null.
    Null = 1,
    /// A string argument was not valid UTF-8.
    Utf8 = 2,
    /// The formula text did not parse.
    Parse = 3,
    /// The model text was invalid, or a generator rejected its parameters.
    Model = 4,
    /// Checking failed: unknown names or a strategy space above the cap.
    Check = 5,
    /// The translation exceeded its caps.
    Translate = 6,
    /// An argument was out of range.
    Arg = 7,
    /// The library panicked; the handle arguments are left untouched.
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtlhStrategyMode {
    /// Memoryless strategies that agree on indistinguishable states.
    Uniform = 0,
    /// Memoryless strategies without the uniformity constraint.
    NonUniform = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtlhScope {
    Objective = 0,
    Subjective = 1,
}

/// Options for [`atlh_check`]; obtain defaults from
/// [`atlh_check_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct AtlhCheckOptions {
    pub strategy_mode: AtlhStrategyMode,
    pub scope: AtlhScope,
    /// Worker threads for strategy enumeration; 0 and 1 run inline.
    pub threads: usize,
    /// Largest strategy space that will be enumerated.
    pub strategy_cap: u64,
    pub force_enumeration: bool,
}

/// Opaque model handle.
pub struct AtlhModel(Cegm);

/// Opaque formula handle.
pub struct AtlhFormula(Formula);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).expect("nul bytes removed"));
}

fn fail(status: AtlhStatus, message: impl Into<String>) -> AtlhStatus {
    set_error(message);
    status
}

fn guard(f: impl FnOnce() -> AtlhStatus) -> AtlhStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => {
            if status == AtlhStatus::Ok {
                set_error("");
            }
            status
        }
        Err(_) => fail(AtlhStatus::Panic, "internal error"),
    }
}

/// Borrow a C string as `&str`.
///
/// # Safety
/// `s` must be null or point to a nul-terminated string that outlives `'a`.
unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, AtlhStatus> {
    if s.is_null() {
        return Err(fail(AtlhStatus::Null, format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| fail(AtlhStatus::Utf8, format!("{what}: {e}")))
}

fn export_string(s: String, out: *mut *mut c_char) -> AtlhStatus {
    match CString::new(s) {
        Ok(c) => {
            // SAFETY: callers check `out` for null before calling.
            unsafe { *out = c.into_raw() };
            AtlhStatus::Ok
        }
        Err(_) => fail(AtlhStatus::Utf8, "output contains a nul byte"),
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(AtlhStatus::Null, concat!("`", stringify!($p), "` is null"));
        })+
    };
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

/// Message describing the last failed call on this thread; empty after a
/// successful call. Valid until the next call into the library on this
/// thread; do not free.
#[no_mangle]
pub extern "C" fn atlh_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn atlh_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a model in the text format.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn atlh_model_load(text_ptr: *const c_char, out: *mut *mut AtlhModel) -> AtlhStatus {
    non_null!(out);
    guard(|| {
        let t = try_status!(text(text_ptr, "model text"));
        match load_model(t) {
            Ok(m) => {
                *out = Box::into_raw(Box::new(AtlhModel(m)));
                AtlhStatus::Ok
            }
            Err(e) => fail(AtlhStatus::Model, e.to_string()),
        }
    })
}

/// Serializes a model to the text format.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn atlh_model_save(model: *const AtlhModel, out: *mut *mut c_char) -> AtlhStatus {
    non_null!(model, out);
    guard(|| export_string(save_model(&(*model).0), out))
}

/// Number of states of a model.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn atlh_model_num_states(model: *const AtlhModel, out: *mut usize) -> AtlhStatus {
    non_null!(model, out);
    *out = (*model).0.num_states();
    set_error("");
    AtlhStatus::Ok
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn atlh_model_free(model: *mut AtlhModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Builds a named model: `fig1`, `m1`, `m2`, `threeballot`, `Mn` (uses
/// `n`) or `Nnj` (uses `n` and `j`). Unused parameters are ignored.
///
/// # Safety
/// `name` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn atlh_generate(name: *const c_char, n: usize, j: usize, out: *mut *mut AtlhModel) -> AtlhStatus {
    non_null!(out);
    guard(|| {
        let name = try_status!(text(name, "generator name"));
        let m = match name {
            "fig1" => gen_referendum_single(),
            "m1" => gen_referendum_double(DoubleVariant::M1),
            "m2" => gen_referendum_double(DoubleVariant::M2),
            "threeballot" => gen_threeballot(),
            "Mn" | "Nnj" => {
                let r = if name == "Mn" { gen_mn(n) } else { gen_nnj(n, j) };
                match r {
                    Ok(m) => m,
                    Err(e) => return fail(AtlhStatus::Model, e.to_string()),
                }
            }
            other => return fail(AtlhStatus::Arg, format!("unknown generator `{other}`")),
        };
        *out = Box::into_raw(Box::new(AtlhModel(m)));
        AtlhStatus::Ok
    })
}

/// Parses a formula.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn atlh_formula_parse(text_ptr: *const c_char, out: *mut *mut AtlhFormula) -> AtlhStatus {
    non_null!(out);
    guard(|| {
        let t = try_status!(text(text_ptr, "formula text"));
        match parse_formula(t) {
            Ok(f) => {
                *out = Box::into_raw(Box::new(AtlhFormula(f)));
                AtlhStatus::Ok
            }
            Err(e) => fail(AtlhStatus::Parse, e.to_string()),
        }
    })
}

/// Releases a formula. Null is ignored.
///
/// # Safety
/// `formula` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn atlh_formula_free(formula: *mut AtlhFormula) {
    if !formula.is_null() {
        drop(Box::from_raw(formula));
    }
}

/// Symbol count of a formula.
///
/// # Safety
/// `formula` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn atlh_formula_length(formula: *const AtlhFormula, out: *mut usize) -> AtlhStatus {
    non_null!(formula, out);
    guard(|| {
        *out = (*formula).0.length();
        AtlhStatus::Ok
    })
}

/// Prints a formula in the concrete syntax accepted by
/// [`atlh_formula_parse`].
///
/// # Safety
/// `formula` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn atlh_formula_to_string(formula: *const AtlhFormula, out: *mut *mut c_char) -> AtlhStatus {
    non_null!(formula, out);
    guard(|| export_string((*formula).0.to_string(), out))
}

#[no_mangle]
pub extern "C" fn atlh_check_options_default() -> AtlhCheckOptions {
    let d = CheckOptions::default();
    AtlhCheckOptions {
        strategy_mode: AtlhStrategyMode::Uniform,
        scope: AtlhScope::Objective,
        threads: d.threads,
        strategy_cap: u64::try_from(d.strategy_cap).unwrap_or(u64::MAX),
        force_enumeration: d.force_enumeration,
    }
}

/// Truth of `formula` at `state` (the initial state when null). `options`
/// may be null for defaults.
///
/// # Safety
/// `model` and `formula` must be live handles; `state` must be null or a
/// nul-terminated string; `options` must be null or readable; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn atlh_check(
    model: *const AtlhModel,
    formula: *const AtlhFormula,
    state: *const c_char,
    options: *const AtlhCheckOptions,
    out: *mut bool,
) -> AtlhStatus {
    non_null!(model, formula, out);
    guard(|| {
        let m = &(*model).0;
        let q = if state.is_null() {
            m.initial()
        } else {
            let name = try_status!(text(state, "state"));
            match m.state_index(name) {
                Some(q) => q,
                None => return fail(AtlhStatus::Arg, format!("unknown state `{name}`")),
            }
        };
        let o = if options.is_null() { atlh_check_options_default() } else { *options };
        let opts = CheckOptions {
            strategy_mode: match o.strategy_mode {
                AtlhStrategyMode::Uniform => StrategyMode::Uniform,
                AtlhStrategyMode::NonUniform => StrategyMode::NonUniform,
            },
            success_scope: match o.scope {
                AtlhScope::Objective => SuccessScope::Objective,
                AtlhScope::Subjective => SuccessScope::Subjective,
            },
            threads: o.threads.max(1),
            strategy_cap: u128::from(o.strategy_cap),
            force_enumeration: o.force_enumeration,
        };
        match check(m, q, &(*formula).0, &opts) {
            Ok(holds) => {
                *out = holds;
                AtlhStatus::Ok
            }
            Err(e) => fail(AtlhStatus::Check, e.to_string()),
        }
    })
}

/// Rewrites every uncertainty operator into knowledge operators.
/// `max_length` caps the result (0 for the default cap).
///
/// # Safety
/// `formula` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn atlh_h_to_k(
    formula: *const AtlhFormula,
    max_length: usize,
    out: *mut *mut AtlhFormula,
) -> AtlhStatus {
    non_null!(formula, out);
    guard(|| {
        let mut opts = TranslateOptions::default();
        if max_length > 0 {
            opts.max_length = max_length;
        }
        match h_to_k(&(*formula).0, &opts) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(AtlhFormula(g)));
                AtlhStatus::Ok
            }
            Err(e) => fail(AtlhStatus::Translate, e.to_string()),
        }
    })
}

/// Rewrites every knowledge operator into uncertainty operators.
///
/// # Safety
/// `formula` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn atlh_k_to_h(formula: *const AtlhFormula, out: *mut *mut AtlhFormula) -> AtlhStatus {
    non_null!(formula, out);
    guard(|| {
        *out = Box::into_raw(Box::new(AtlhFormula(k_to_h(&(*formula).0))));
        AtlhStatus::Ok
    })
}

