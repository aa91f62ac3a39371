//! C interface to levymult.
//!
//! Objects cross the boundary as opaque handles created by `lm_*_new`/
//! `lm_*_parse`/`lm_*_evaluate` and released by the matching `lm_*_free`.
//! Every fallible call returns an `LmStatus`; on failure the message is
//! available from `lm_last_error` until the next call on the same thread.

#![allow(clippy::not_unsafe_ptr_arg_deref)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use levymult::io::{parse_config, run_command, Command, RunConfig};
use levymult::spectral::{apply_multiplier, pairing, SampledField};
use levymult::symbol::{evaluate_grid, symbol_stable, GridSpec, SymbolGrid};
use levymult::Error;

/// Status codes. Library errors keep the numbering of `Error::code`.
pub type LmStatus = i32;

pub const LM_OK: LmStatus = 0;
pub const LM_ERR_ATOM_AT_ORIGIN: LmStatus = 1;
pub const LM_ERR_NON_INTEGRABLE_MEASURE: LmStatus = 2;
pub const LM_ERR_SHAPE_MISMATCH: LmStatus = 3;
pub const LM_ERR_MODULATOR_EXCEEDS_ONE: LmStatus = 4;
pub const LM_ERR_QUADRATURE_NOT_CONVERGED: LmStatus = 5;
pub const LM_ERR_MODULATOR_UNDEFINED: LmStatus = 6;
pub const LM_ERR_EPS_TOO_LARGE: LmStatus = 7;
pub const LM_ERR_REQUIRES_FINITE_MEASURE: LmStatus = 8;
pub const LM_ERR_REQUIRES_EQUAL_MATRICES: LmStatus = 9;
pub const LM_ERR_DEGENERATE_DENOMINATOR: LmStatus = 10;
pub const LM_ERR_K_NORM_EXCEEDS_ONE: LmStatus = 11;
pub const LM_ERR_ZERO_FREQUENCY_VECTOR: LmStatus = 12;
pub const LM_ERR_ALPHA_OUT_OF_RANGE: LmStatus = 13;
pub const LM_ERR_ZERO_COORDINATE: LmStatus = 14;
pub const LM_ERR_GRID_MISMATCH: LmStatus = 15;
pub const LM_ERR_PAIRING_MISMATCH: LmStatus = 16;
pub const LM_ERR_TRACE_MISMATCH: LmStatus = 17;
pub const LM_ERR_QUADRATURE_NODES_INSUFFICIENT: LmStatus = 18;
pub const LM_ERR_STEP_TOO_COARSE: LmStatus = 19;
pub const LM_ERR_UNSUPPORTED_DIMENSION: LmStatus = 20;
pub const LM_ERR_INVALID_ARGUMENT: LmStatus = 21;
pub const LM_ERR_PARSE: LmStatus = 22;
pub const LM_ERR_VALIDATION: LmStatus = 23;
pub const LM_ERR_FORMAT: LmStatus = 24;
pub const LM_ERR_IO: LmStatus = 25;
pub const LM_ERR_CSV: LmStatus = 26;
pub const LM_ERR_NULL: LmStatus = 100;
pub const LM_ERR_UTF8: LmStatus = 101;
pub const LM_ERR_PANIC: LmStatus = 102;
pub const LM_ERR_BUFFER: LmStatus = 103;
pub const LM_ERR_COMMAND: LmStatus = 104;

/// Parsed run configuration.
pub struct LmConfig {
    inner: RunConfig,
}

/// Symbol values on a frequency grid.
pub struct LmSymbolGrid {
    inner: SymbolGrid,
}

/// Complex samples on a spatial grid.
pub struct LmField {
    inner: SampledField,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(code: LmStatus, msg: impl Into<String>) -> LmStatus {
    set_error(msg.into());
    code
}

fn from_error(e: Error) -> LmStatus {
    fail(e.code(), e.to_string())
}

/// Runs `f`, turning panics into LM_ERR_PANIC.
fn guard<F: FnOnce() -> LmStatus>(f: F) -> LmStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(LM_ERR_PANIC, "panic inside levymult"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, LmStatus> {
    if p.is_null() {
        return Err(fail(LM_ERR_NULL, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(LM_ERR_UTF8, "argument is not UTF-8"))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize) -> Result<&'a [T], LmStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(LM_ERR_NULL, "null array argument"));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

macro_rules! try_ffi {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

macro_rules! try_lib {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return from_error(e),
        }
    };
}

fn put<T>(out: *mut *mut T, value: T) -> LmStatus {
    if out.is_null() {
        return fail(LM_ERR_NULL, "null output handle");
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    LM_OK
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message of the last failure on this thread, or NULL. Owned by the library.
#[no_mangle]
pub extern "C" fn lm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a TOML configuration.
#[no_mangle]
pub extern "C" fn lm_config_parse(text: *const c_char, out: *mut *mut LmConfig) -> LmStatus {
    guard(|| {
        let text = try_ffi!(unsafe { str_arg(text) });
        let cfg = try_lib!(parse_config(text));
        put(out, LmConfig { inner: cfg })
    })
}

/// Overrides the seed of a parsed configuration.
#[no_mangle]
pub extern "C" fn lm_config_set_seed(cfg: *mut LmConfig, seed: u64) -> LmStatus {
    guard(|| match unsafe { cfg.as_mut() } {
        Some(c) => {
            c.inner.seed = seed;
            LM_OK
        }
        None => fail(LM_ERR_NULL, "null config"),
    })
}

/// Overrides the output directory of a parsed configuration.
#[no_mangle]
pub extern "C" fn lm_config_set_out(cfg: *mut LmConfig, dir: *const c_char) -> LmStatus {
    guard(|| {
        let dir = try_ffi!(unsafe { str_arg(dir) });
        match unsafe { cfg.as_mut() } {
            Some(c) => {
                c.inner.out = dir.to_string();
                LM_OK
            }
            None => fail(LM_ERR_NULL, "null config"),
        }
    })
}

#[no_mangle]
pub extern "C" fn lm_config_free(cfg: *mut LmConfig) {
    unsafe { free(cfg) }
}

/// Runs a CLI command ("symbol", "apply", "pair", "probe", "mc",
/// "gaussian-mc", "selftest"). `passed` receives whether every check passed.
#[no_mangle]
pub extern "C" fn lm_run_command(cfg: *const LmConfig, command: *const c_char, passed: *mut bool) -> LmStatus {
    guard(|| {
        let Some(cfg) = (unsafe { cfg.as_ref() }) else {
            return fail(LM_ERR_NULL, "null config");
        };
        if passed.is_null() {
            return fail(LM_ERR_NULL, "null output flag");
        }
        let name = try_ffi!(unsafe { str_arg(command) });
        let cmd = match name {
            "symbol" => Command::Symbol,
            "apply" => Command::Apply,
            "pair" => Command::Pair,
            "probe" => Command::Probe,
            "mc" => Command::Mc,
            "gaussian-mc" => Command::GaussianMc,
            "selftest" => Command::Selftest,
            other => return fail(LM_ERR_COMMAND, format!("unknown command {other:?}")),
        };
        let outcome = try_lib!(run_command(cmd, &cfg.inner));
        unsafe { *passed = outcome.pass() };
        LM_OK
    })
}

/// Tabulates the configured symbol on the configured grid.
#[no_mangle]
pub extern "C" fn lm_symbol_evaluate(cfg: *const LmConfig, out: *mut *mut LmSymbolGrid) -> LmStatus {
    guard(|| {
        let Some(cfg) = (unsafe { cfg.as_ref() }) else {
            return fail(LM_ERR_NULL, "null config");
        };
        let spec = try_lib!(cfg.inner.symbol_spec());
        let grid = try_lib!(cfg.inner.grid());
        let m = try_lib!(evaluate_grid(&spec, &grid));
        put(out, LmSymbolGrid { inner: m })
    })
}

/// Number of grid points.
#[no_mangle]
pub extern "C" fn lm_symbol_len(m: *const LmSymbolGrid) -> usize {
    unsafe { m.as_ref() }.map_or(0, |m| m.inner.values.len())
}

#[no_mangle]
pub extern "C" fn lm_symbol_max_abs(m: *const LmSymbolGrid, out: *mut f64) -> LmStatus {
    guard(|| match (unsafe { m.as_ref() }, out.is_null()) {
        (Some(m), false) => {
            unsafe { *out = m.inner.max_abs };
            LM_OK
        }
        _ => fail(LM_ERR_NULL, "null argument"),
    })
}

/// Copies the values, row-major in centered frequency order, into `re` and
/// `im`, each of length `len` = lm_symbol_len.
#[no_mangle]
pub extern "C" fn lm_symbol_values(m: *const LmSymbolGrid, re: *mut f64, im: *mut f64, len: usize) -> LmStatus {
    guard(|| {
        let Some(m) = (unsafe { m.as_ref() }) else {
            return fail(LM_ERR_NULL, "null symbol grid");
        };
        copy_complex(&m.inner.values, re, im, len)
    })
}

#[no_mangle]
pub extern "C" fn lm_symbol_free(m: *mut LmSymbolGrid) {
    unsafe { free(m) }
}

fn copy_complex(values: &[num_complex::Complex64], re: *mut f64, im: *mut f64, len: usize) -> LmStatus {
    if len != values.len() {
        return fail(LM_ERR_BUFFER, format!("buffer length {len}, need {}", values.len()));
    }
    if re.is_null() || im.is_null() {
        return fail(LM_ERR_NULL, "null output buffer");
    }
    let (re, im) = unsafe { (std::slice::from_raw_parts_mut(re, len), std::slice::from_raw_parts_mut(im, len)) };
    for (i, v) in values.iter().enumerate() {
        re[i] = v.re;
        im[i] = v.im;
    }
    LM_OK
}

/// Closed-form stable symbol m(ξ) for 0 < α < 2.
#[no_mangle]
pub extern "C" fn lm_symbol_stable(alpha: f64, xi: f64, re: *mut f64, im: *mut f64) -> LmStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return fail(LM_ERR_NULL, "null output");
        }
        let v = try_lib!(symbol_stable(alpha, xi));
        unsafe {
            *re = v.re;
            *im = v.im;
        }
        LM_OK
    })
}

/// Field from `d` axes of lengths and point counts and row-major samples.
#[no_mangle]
pub extern "C" fn lm_field_new(
    d: usize,
    lengths: *const f64,
    points: *const usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut LmField,
) -> LmStatus {
    guard(|| {
        let lengths = try_ffi!(unsafe { slice_arg(lengths, d) });
        let points = try_ffi!(unsafe { slice_arg(points, d) });
        let grid = try_lib!(GridSpec::new(lengths.to_vec(), points.to_vec()));
        let n = grid.len();
        let re = try_ffi!(unsafe { slice_arg(re, n) });
        let im = try_ffi!(unsafe { slice_arg(im, n) });
        let values = re.iter().zip(im).map(|(&a, &b)| num_complex::Complex64::new(a, b)).collect();
        let f = try_lib!(SampledField::new(grid, values));
        put(out, LmField { inner: f })
    })
}

#[no_mangle]
pub extern "C" fn lm_field_len(f: *const LmField) -> usize {
    unsafe { f.as_ref() }.map_or(0, |f| f.inner.values.len())
}

#[no_mangle]
pub extern "C" fn lm_field_values(f: *const LmField, re: *mut f64, im: *mut f64, len: usize) -> LmStatus {
    guard(|| {
        let Some(f) = (unsafe { f.as_ref() }) else {
            return fail(LM_ERR_NULL, "null field");
        };
        copy_complex(&f.inner.values, re, im, len)
    })
}

#[no_mangle]
pub extern "C" fn lm_field_free(f: *mut LmField) {
    unsafe { free(f) }
}

/// Mf for a tabulated symbol and a field on the same grid.
#[no_mangle]
pub extern "C" fn lm_apply(m: *const LmSymbolGrid, f: *const LmField, out: *mut *mut LmField) -> LmStatus {
    guard(|| {
        let (Some(m), Some(f)) = (unsafe { m.as_ref() }, unsafe { f.as_ref() }) else {
            return fail(LM_ERR_NULL, "null argument");
        };
        let mf = try_lib!(apply_multiplier(&m.inner, &f.inner));
        put(out, LmField { inner: mf })
    })
}

/// ∫ (Mf) g dx evaluated in space and in frequency; `out` receives
/// [re_spatial, im_spatial, re_spectral, im_spectral].
#[no_mangle]
pub extern "C" fn lm_pairing(m: *const LmSymbolGrid, f: *const LmField, g: *const LmField, out: *mut f64) -> LmStatus {
    guard(|| {
        let (Some(m), Some(f), Some(g)) = (unsafe { m.as_ref() }, unsafe { f.as_ref() }, unsafe { g.as_ref() }) else {
            return fail(LM_ERR_NULL, "null argument");
        };
        if out.is_null() {
            return fail(LM_ERR_NULL, "null output");
        }
        let p = try_lib!(pairing(&m.inner, &f.inner, &g.inner));
        let o = unsafe { std::slice::from_raw_parts_mut(out, 4) };
        o.copy_from_slice(&[p.spatial.re, p.spatial.im, p.spectral.re, p.spectral.im]);
        LM_OK
    })
}
