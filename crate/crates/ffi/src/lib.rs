//! C ABI over `rmtkit`.
//!
//! Every entry point returns an `int32_t` status (`RMT_OK` on success) and
//! writes results through out-pointers. On failure the message is kept per
//! thread and can be read with `rmt_last_error`. Handles returned by `*_new`
//! or `rmt_sample_spectrum` are owned by the caller and released with the
//! matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rmtkit::ensembles::{sample_spectrum, EnsembleKind, EnsembleSpec, SamplingMethod};
use rmtkit::kernels::{self, FredholmConfig, Tw1Variant, TwMethod};
use rmtkit::numerics::RngStream;
use rmtkit::spectral::{LawDescriptor, Spectrum};
use rmtkit::Error;

pub const RMT_OK: i32 = 0;
pub const RMT_ERR_NULL: i32 = 1;
pub const RMT_ERR_INPUT: i32 = 2;
pub const RMT_ERR_NUMERICAL: i32 = 3;
pub const RMT_ERR_SOLVER: i32 = 4;
pub const RMT_ERR_PARSE: i32 = 5;
pub const RMT_ERR_IO: i32 = 6;
pub const RMT_ERR_PANIC: i32 = 7;

pub const RMT_ENSEMBLE_GOE: i32 = 0;
pub const RMT_ENSEMBLE_GUE: i32 = 1;
pub const RMT_ENSEMBLE_WISHART_REAL: i32 = 2;
pub const RMT_ENSEMBLE_WISHART_COMPLEX: i32 = 3;

pub const RMT_METHOD_DENSE: i32 = 0;
pub const RMT_METHOD_TRIDIAGONAL: i32 = 1;

pub const RMT_TW_PAINLEVE: i32 = 0;
pub const RMT_TW_FREDHOLM: i32 = 1;

pub const RMT_LAW_SEMICIRCLE: i32 = 0;
pub const RMT_LAW_MP: i32 = 1;

/// Opaque Tracy–Widom CDF table.
pub struct RmtTwTable(kernels::TwTable);

/// Opaque sampled spectrum, eigenvalues in descending order.
pub struct RmtSpectrum(Spectrum);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> i32 {
    match e {
        Error::Input(_) => RMT_ERR_INPUT,
        Error::Numerical { .. } => RMT_ERR_NUMERICAL,
        Error::Solver(_) => RMT_ERR_SOLVER,
        Error::Parse(_) | Error::Json(_) => RMT_ERR_PARSE,
        Error::Io(_) => RMT_ERR_IO,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (i32, String)>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RMT_OK,
        Ok(Err((code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic".into());
            RMT_ERR_PANIC
        }
    }
}

fn lift<T>(r: rmtkit::Result<T>) -> Result<T, (i32, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn bad(msg: &str) -> (i32, String) {
    (RMT_ERR_INPUT, msg.to_string())
}

fn null(name: &str) -> (i32, String) {
    (RMT_ERR_NULL, format!("{name} is null"))
}

fn tw_method(m: i32) -> Result<TwMethod, (i32, String)> {
    match m {
        RMT_TW_PAINLEVE => Ok(TwMethod::Painleve),
        RMT_TW_FREDHOLM => Ok(TwMethod::Fredholm),
        _ => Err(bad("unknown Tracy-Widom method")),
    }
}

/// Writes `value` to `out`, failing on a null pointer.
///
/// # Safety
/// `out` must be null or valid for a write of `T`.
unsafe fn put<T>(out: *mut T, value: T, name: &str) -> Result<(), (i32, String)> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rmt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rmt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Ai(x) and Ai'(x).
///
/// # Safety
/// `ai` and `ai_prime` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rmt_airy(x: f64, ai: *mut f64, ai_prime: *mut f64) -> i32 {
    guard(|| {
        let v = lift(kernels::airy(x))?;
        put(ai, v.ai, "ai")?;
        put(ai_prime, v.ai_prime, "ai_prime")
    })
}

/// Tracy–Widom CDF F_β(s) for β ∈ {1, 2} with the default β=1 variant.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn rmt_tw_cdf(beta: i32, s: f64, method: i32, out: *mut f64) -> i32 {
    guard(|| {
        let beta = u8::try_from(beta).map_err(|_| bad("beta must be 1 or 2"))?;
        let v = lift(kernels::tw_cdf(beta, s, tw_method(method)?))?;
        put(out, v, "out")
    })
}

/// Probability that an n×n GUE (σ²=1) has no eigenvalue above `a`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn rmt_gue_gap_probability(n: usize, a: f64, out: *mut f64) -> i32 {
    guard(|| {
        let v = lift(kernels::gue_gap_probability(n, a, &FredholmConfig::default()))?;
        put(out, v.value, "out")
    })
}

/// Density (`cdf == 0`) or distribution function of the semicircle or
/// Marčenko–Pastur law. `gamma` is ignored for the semicircle.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn rmt_law_eval(law: i32, sigma2: f64, gamma: f64, x: f64, cdf: i32, out: *mut f64) -> i32 {
    guard(|| {
        let d = match law {
            RMT_LAW_SEMICIRCLE => lift(LawDescriptor::semicircle(sigma2))?,
            RMT_LAW_MP => lift(LawDescriptor::marchenko_pastur(sigma2, gamma))?,
            _ => return Err(bad("unknown law")),
        };
        put(out, if cdf != 0 { d.cdf(x) } else { d.pdf(x) }, "out")
    })
}

/// Builds a TW_β table on `start:stop:step`.
///
/// # Safety
/// `out` must be valid for a write; the handle it receives must be released
/// with `rmt_tw_table_free`.
#[no_mangle]
pub unsafe extern "C" fn rmt_tw_table_new(
    beta: i32,
    method: i32,
    start: f64,
    stop: f64,
    step: f64,
    out: *mut *mut RmtTwTable,
) -> i32 {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let beta = u8::try_from(beta).map_err(|_| bad("beta must be 1 or 2"))?;
        let t = lift(kernels::TwTable::build(beta, tw_method(method)?, Tw1Variant::default(), start, stop, step))?;
        out.write(Box::into_raw(Box::new(RmtTwTable(t))));
        Ok(())
    })
}

/// Number of grid points in a table.
///
/// # Safety
/// `table` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn rmt_tw_table_len(table: *const RmtTwTable, out: *mut usize) -> i32 {
    guard(|| {
        let t = table.as_ref().ok_or_else(|| null("table"))?;
        put(out, t.0.s.len(), "out")
    })
}

/// Interpolated CDF. `clamped` is set to 1 when `s` lies outside the table.
///
/// # Safety
/// `table` must be a live handle; `out` and `clamped` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rmt_tw_table_cdf(table: *const RmtTwTable, s: f64, out: *mut f64, clamped: *mut i32) -> i32 {
    guard(|| {
        let t = table.as_ref().ok_or_else(|| null("table"))?;
        let p = t.0.cdf_at(s);
        put(out, p.value, "out")?;
        put(clamped, p.clamped as i32, "clamped")
    })
}

/// Upper-tail p-value 1 − F_β(statistic).
///
/// # Safety
/// `table` must be a live handle; `out` and `clamped` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rmt_tw_table_pvalue(
    table: *const RmtTwTable,
    statistic: f64,
    out: *mut f64,
    clamped: *mut i32,
) -> i32 {
    guard(|| {
        let t = table.as_ref().ok_or_else(|| null("table"))?;
        let p = kernels::tw_pvalue(&t.0, statistic);
        put(out, p.value, "out")?;
        put(clamped, p.clamped as i32, "clamped")
    })
}

/// Releases a table. Null is a no-op.
///
/// # Safety
/// `table` must come from `rmt_tw_table_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rmt_tw_table_free(table: *mut RmtTwTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Samples one spectrum. `p` is used by the Wishart ensembles only.
///
/// # Safety
/// `out` must be valid for a write; release the handle with
/// `rmt_spectrum_free`.
#[no_mangle]
pub unsafe extern "C" fn rmt_sample_spectrum(
    ensemble: i32,
    n: usize,
    p: usize,
    sigma2: f64,
    seed: u64,
    method: i32,
    out: *mut *mut RmtSpectrum,
) -> i32 {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let stream = RngStream::new(seed, 0);
        let spec = match ensemble {
            RMT_ENSEMBLE_GOE => EnsembleSpec::gaussian(EnsembleKind::Goe, n, sigma2, stream),
            RMT_ENSEMBLE_GUE => EnsembleSpec::gaussian(EnsembleKind::Gue, n, sigma2, stream),
            RMT_ENSEMBLE_WISHART_REAL => EnsembleSpec::wishart(false, n, p, sigma2, stream),
            RMT_ENSEMBLE_WISHART_COMPLEX => EnsembleSpec::wishart(true, n, p, sigma2, stream),
            _ => return Err(bad("unknown ensemble")),
        };
        let method = match method {
            RMT_METHOD_DENSE => SamplingMethod::Dense,
            RMT_METHOD_TRIDIAGONAL => SamplingMethod::Tridiagonal,
            _ => return Err(bad("unknown sampling method")),
        };
        let s = lift(sample_spectrum(&spec, method))?;
        out.write(Box::into_raw(Box::new(RmtSpectrum(s))));
        Ok(())
    })
}

/// Number of eigenvalues in a spectrum.
///
/// # Safety
/// `spectrum` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn rmt_spectrum_len(spectrum: *const RmtSpectrum, out: *mut usize) -> i32 {
    guard(|| {
        let s = spectrum.as_ref().ok_or_else(|| null("spectrum"))?;
        put(out, s.0.len(), "out")
    })
}

/// Copies the eigenvalues (descending) into `buf`, which must hold at least
/// `rmt_spectrum_len` values.
///
/// # Safety
/// `spectrum` must be a live handle; `buf` valid for `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn rmt_spectrum_copy(spectrum: *const RmtSpectrum, buf: *mut f64, capacity: usize) -> i32 {
    guard(|| {
        let s = spectrum.as_ref().ok_or_else(|| null("spectrum"))?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let v = s.0.values();
        if capacity < v.len() {
            return Err(bad(&format!("buffer holds {capacity} values, spectrum has {}", v.len())));
        }
        ptr::copy_nonoverlapping(v.as_ptr(), buf, v.len());
        Ok(())
    })
}

/// Releases a spectrum. Null is a no-op.
///
/// # Safety
/// `spectrum` must come from `rmt_sample_spectrum` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rmt_spectrum_free(spectrum: *mut RmtSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}
