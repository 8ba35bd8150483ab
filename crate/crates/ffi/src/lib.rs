//! C ABI over `scorekit`.
//!
//! Densities and skew-symmetric models are opaque heap handles created by
//! `scorekit_*_new`/`_from_*` functions and released with the matching
//! `_free`. Every fallible call returns a [`ScorekitStatus`]; on failure the
//! message is available from [`scorekit_last_error_message`] on the same
//! thread. Panics are caught at the boundary and reported as
//! `SCOREKIT_STATUS_PANIC`.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use scorekit::numerics::QuadratureSpec;
use scorekit::skewsym::{self, ModelSpec, SkewSymmetricModel};
use scorekit::stein::{self, SteinOperatorKind, TestFunction};
use scorekit::varbounds::{self, SmoothFunction};
use scorekit::{make_builtin, mle, Density, DensitySpec, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScorekitStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed input: unknown family, bad parameter, parse error.
    InvalidInput = 3,
    /// Valid input that violates a precondition of the operation.
    PreconditionFailed = 4,
    /// A numerical procedure failed on valid input.
    NumericalFailure = 5,
    Panic = 6,
}

/// Opaque density handle.
pub struct ScorekitDensity(Density);

/// Opaque skew-symmetric model handle.
pub struct ScorekitSkewModel(SkewSymmetricModel);

/// Variance of g(X) and the three upper bounds; unavailable bounds are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ScorekitVarianceBounds {
    pub variance: f64,
    pub chernoff: f64,
    pub cacoullos: f64,
    pub sharp: f64,
}

/// Fisher information at delta = 0, row-major over (mu, sigma, delta).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ScorekitFisherInfo {
    pub matrix: [f64; 9],
    /// Ascending.
    pub eigenvalues: [f64; 3],
    pub min_rel_eigenvalue: f64,
    pub rank: u32,
    /// 1 when the collinearity fit below was computed.
    pub has_collinearity: u8,
    pub collinearity_c1: f64,
    pub collinearity_c2: f64,
    pub collinearity_max_residual: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> ScorekitStatus {
    if e.is_numerical() {
        return ScorekitStatus::NumericalFailure;
    }
    match e {
        Error::UnknownFamily(_)
        | Error::InvalidParameter { .. }
        | Error::Parse { .. }
        | Error::Config(_)
        | Error::Io(_)
        | Error::EmptySample
        | Error::SampleTooSmall { .. } => ScorekitStatus::InvalidInput,
        _ => ScorekitStatus::PreconditionFailed,
    }
}

enum Fail {
    Status(ScorekitStatus, String),
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

type FfiResult<T> = std::result::Result<T, Fail>;

fn guard<F>(f: F) -> ScorekitStatus
where
    F: FnOnce() -> FfiResult<()>,
{
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ScorekitStatus::Ok,
        Ok(Err(Fail::Status(s, msg))) => {
            set_last_error(msg);
            s
        }
        Ok(Err(Fail::Core(e))) => {
            set_last_error(format!("{}: {e}", e.code()));
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("panic: {msg}"));
            ScorekitStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail::Status(ScorekitStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Status(ScorekitStatus::InvalidUtf8, format!("`{what}` is not UTF-8")))
}

unsafe fn slice_arg<'a>(p: *const f64, n: usize, what: &str) -> FfiResult<&'a [f64]> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> FfiResult<&'a mut T> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn density_arg<'a>(d: *const ScorekitDensity) -> FfiResult<&'a Density> {
    d.as_ref().map(|d| &d.0).ok_or_else(|| null("density"))
}

fn boxed_density(d: Density) -> *mut ScorekitDensity {
    Box::into_raw(Box::new(ScorekitDensity(d)))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn scorekit_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn scorekit_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Built-in family with `n_params` named parameters (may be 0).
///
/// # Safety
/// `name` and the parameter names must be NUL-terminated strings; the two
/// parameter arrays must hold `n_params` entries; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn scorekit_density_builtin(
    name: *const c_char,
    param_names: *const *const c_char,
    param_values: *const f64,
    n_params: usize,
    out: *mut *mut ScorekitDensity,
) -> ScorekitStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let name = str_arg(name, "name")?;
        let values = slice_arg(param_values, n_params, "param_values")?;
        let mut params = BTreeMap::new();
        if n_params > 0 {
            if param_names.is_null() {
                return Err(null("param_names"));
            }
            let names = std::slice::from_raw_parts(param_names, n_params);
            for (k, v) in names.iter().zip(values) {
                params.insert(str_arg(*k, "param name")?.to_string(), *v);
            }
        }
        *out = boxed_density(make_builtin(name, &params)?);
        Ok(())
    })
}

/// Density from a TOML table (see the README for the format).
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn scorekit_density_from_toml(
    toml: *const c_char,
    out: *mut *mut ScorekitDensity,
) -> ScorekitStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let spec = DensitySpec::from_toml(str_arg(toml, "toml")?)?;
        *out = boxed_density(spec.build()?);
        Ok(())
    })
}

/// Normalized `p^c`.
///
/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn scorekit_density_power(
    d: *const ScorekitDensity,
    c: f64,
    out: *mut *mut ScorekitDensity,
) -> ScorekitStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = boxed_density(density_arg(d)?.power(c)?);
        Ok(())
    })
}

/// Normalized `|x|^(c1+c2-1) p(x)^c1` for symmetric `p`.
///
/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn scorekit_density_scale_pair(
    d: *const ScorekitDensity,
    c1: f64,
    c2: f64,
    out: *mut *mut ScorekitDensity,
) -> ScorekitStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = boxed_density(skewsym::construct_singular_scale_pair(density_arg(d)?, c1, c2)?);
        Ok(())
    })
}

/// # Safety
/// `d` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn scorekit_density_free(d: *mut ScorekitDensity) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// `log p(x)`; `-inf` outside the support.
///
/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn scorekit_log_pdf(d: *const ScorekitDensity, x: f64, out: *mut f64) -> ScorekitStatus {
    guard(|| {
        *out_arg(out, "out")? = density_arg(d)?.log_pdf(x);
        Ok(())
    })
}

/// Location score `phi(x)`.
///
/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn scorekit_location_score(
    d: *const ScorekitDensity,
    x: f64,
    out: *mut f64,
) -> ScorekitStatus {
    guard(|| {
        *out_arg(out, "out")? = density_arg(d)?.location_score(x)?.phi;
        Ok(())
    })
}

/// Scale score `psi(x) = 1 + x phi(x)`.
///
/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn scorekit_scale_score(d: *const ScorekitDensity, x: f64, out: *mut f64) -> ScorekitStatus {
    guard(|| {
        *out_arg(out, "out")? = density_arg(d)?.scale_score(x)?.psi;
        Ok(())
    })
}

unsafe fn smooth_function(d: &Density, g: *const c_char) -> FfiResult<SmoothFunction> {
    let src = str_arg(g, "g")?;
    if src.trim() == "score" {
        Ok(SmoothFunction::score_of(d))
    } else {
        Ok(SmoothFunction::parse(src)?)
    }
}

/// Variance of `g(X)` and its bounds. `g` is an expression in `x`, or
/// `"score"` for the location score of `d`.
///
/// # Safety
/// `d` must be a live handle, `g` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn scorekit_variance_bounds(
    d: *const ScorekitDensity,
    g: *const c_char,
    out: *mut ScorekitVarianceBounds,
) -> ScorekitStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let d = density_arg(d)?;
        let g = smooth_function(d, g)?;
        let r = varbounds::bound_report(d, &g, &QuadratureSpec::tight())?;
        let v = |name: &str| r.value(name).unwrap_or(f64::NAN);
        *out = ScorekitVarianceBounds {
            variance: r.variance,
            chernoff: v("chernoff"),
            cacoullos: v("cacoullos"),
            sharp: v("sharp"),
        };
        Ok(())
    })
}

unsafe fn operator_args(kind: *const c_char, f: *const c_char) -> FfiResult<(SteinOperatorKind, TestFunction)> {
    let kind: SteinOperatorKind = str_arg(kind, "kind")?.parse()?;
    let tf = TestFunction::parse(str_arg(f, "f")?)?;
    Ok((kind, tf))
}

/// `E[(A f)(X)]` for the operator `kind` (`location`, `exp_unit`,
/// `exp_scale`) and test function `f` given as an expression in `x`.
///
/// # Safety
/// `d` must be a live handle, strings NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn scorekit_stein_expected(
    d: *const ScorekitDensity,
    kind: *const c_char,
    f: *const c_char,
    out: *mut f64,
) -> ScorekitStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let d = density_arg(d)?;
        let (kind, tf) = operator_args(kind, f)?;
        *out = stein::expected_operator(d, kind, &tf, &QuadratureSpec::tight())?;
        Ok(())
    })
}

/// Sample mean of `(A f)(x_i)`.
///
/// # Safety
/// `d` must be a live handle, strings NUL-terminated, `sample` must hold
/// `n` values and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn scorekit_stein_empirical(
    d: *const ScorekitDensity,
    kind: *const c_char,
    f: *const c_char,
    sample: *const f64,
    n: usize,
    out: *mut f64,
) -> ScorekitStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let d = density_arg(d)?;
        let (kind, tf) = operator_args(kind, f)?;
        let xs = slice_arg(sample, n, "sample")?;
        let r = stein::empirical_discrepancy(xs, d, kind, std::slice::from_ref(&tf))?;
        *out = r.per_function[0].value;
        Ok(())
    })
}

/// Model from a preset name (`skew-normal`, `skew-t`) or a TOML table.
///
/// # Safety
/// `src` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn scorekit_skew_model_new(
    src: *const c_char,
    out: *mut *mut ScorekitSkewModel,
) -> ScorekitStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let src = str_arg(src, "src")?;
        let spec = match ModelSpec::preset(src.trim()) {
            Some(p) => p,
            None => ModelSpec::from_toml(src)?,
        };
        *out = Box::into_raw(Box::new(ScorekitSkewModel(spec.build()?)));
        Ok(())
    })
}

/// # Safety
/// `m` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn scorekit_skew_model_free(m: *mut ScorekitSkewModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Density of the model at `x`.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn scorekit_skew_density(m: *const ScorekitSkewModel, x: f64, out: *mut f64) -> ScorekitStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(|| null("model"))?;
        *out_arg(out, "out")? = skewsym::skew_density(&m.0, x);
        Ok(())
    })
}

/// Fisher information at delta = 0 with the default rank tolerance.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn scorekit_fisher_info(
    m: *const ScorekitSkewModel,
    out: *mut ScorekitFisherInfo,
) -> ScorekitStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let m = m.as_ref().ok_or_else(|| null("model"))?;
        let r = skewsym::fisher_info_at_symmetry(&m.0)?;
        let mut matrix = [0.0; 9];
        for (i, row) in r.matrix.iter().enumerate() {
            matrix[3 * i..3 * i + 3].copy_from_slice(row);
        }
        let mut eigenvalues = [0.0; 3];
        eigenvalues.copy_from_slice(&r.eigenvalues[..3]);
        let (has, c1, c2, res) = match r.collinearity {
            Some(c) => (1, c.c1, c.c2, c.max_residual),
            None => (0, f64::NAN, f64::NAN, f64::NAN),
        };
        *out = ScorekitFisherInfo {
            matrix,
            eigenvalues,
            min_rel_eigenvalue: r.min_rel_eigenvalue,
            rank: r.rank_at_tol as u32,
            has_collinearity: has,
            collinearity_c1: c1,
            collinearity_c2: c2,
            collinearity_max_residual: res,
        };
        Ok(())
    })
}

/// Root of the location score equation.
///
/// # Safety
/// `d` must be a live handle, `sample` must hold `n` values, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn scorekit_solve_location_mle(
    d: *const ScorekitDensity,
    sample: *const f64,
    n: usize,
    out: *mut f64,
) -> ScorekitStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let xs = slice_arg(sample, n, "sample")?;
        *out = mle::solve_location_mle(density_arg(d)?, xs)?.estimate;
        Ok(())
    })
}

/// Root of the scale score equation on `s > 0`.
///
/// # Safety
/// `d` must be a live handle, `sample` must hold `n` values, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn scorekit_solve_scale_mle(
    d: *const ScorekitDensity,
    sample: *const f64,
    n: usize,
    out: *mut f64,
) -> ScorekitStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let xs = slice_arg(sample, n, "sample")?;
        *out = mle::solve_scale_mle(density_arg(d)?, xs)?.estimate;
        Ok(())
    })
}
