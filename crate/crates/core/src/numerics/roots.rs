//! Derivative-free bracketing root solver.
//!
//! Brent's method: inverse quadratic interpolation or secant steps when they
//! land safely inside the bracket, bisection otherwise. The bracket always
//! contains a sign change, so convergence is guaranteed.

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 500;

/// An interval whose endpoint values differ in sign (or one is zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64, f_lo: f64, f_hi: f64) -> Result<Self> {
        let invalid = Error::InvalidBracket { lo, hi, f_lo, f_hi };
        if !(lo < hi) || f_lo.is_nan() || f_hi.is_nan() {
            return Err(invalid);
        }
        if f_lo == 0.0 || f_hi == 0.0 || (f_lo < 0.0) != (f_hi < 0.0) {
            Ok(Bracket { lo, hi, f_lo, f_hi })
        } else {
            Err(invalid)
        }
    }

    /// Evaluates `f` at both ends and validates the sign condition.
    pub fn from_fn<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<Self> {
        Bracket::new(lo, hi, f(lo), f(hi))
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Root with diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSolution {
    pub root: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Returns `x*` inside `bracket` with `|f(x*)| <= tol` or a final bracket
/// no wider than `tol`.
pub fn find_root<F: Fn(f64) -> f64>(f: F, bracket: Bracket, tol: f64) -> Result<f64> {
    brent(f, bracket, tol).map(|s| s.root)
}

pub fn brent<F: Fn(f64) -> f64>(f: F, bracket: Bracket, tol: f64) -> Result<RootSolution> {
    // re-validate: the fields are public
    let Bracket { lo, hi, f_lo, f_hi } = Bracket::new(bracket.lo, bracket.hi, bracket.f_lo, bracket.f_hi)?;
    if f_lo == 0.0 {
        return Ok(RootSolution { root: lo, residual: 0.0, iterations: 0 });
    }
    if f_hi == 0.0 {
        return Ok(RootSolution { root: hi, residual: 0.0, iterations: 0 });
    }
    let tol = tol.abs().max(f64::MIN_POSITIVE);

    let (mut a, mut fa) = (lo, f_lo);
    let (mut b, mut fb) = (hi, f_hi);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;

    for iter in 1..=MAX_ITERATIONS {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if fb.abs() <= tol || xm.abs() <= tol1 || fb == 0.0 {
            return Ok(RootSolution {
                root: b.clamp(lo, hi),
                residual: fb,
                iterations: iter,
            });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::NonFinite { x: b });
        }
    }
    Err(Error::RootIterationLimit {
        iterations: MAX_ITERATIONS,
    })
}

/// Plain bisection for the boundary of `{x : pred(x)}` when `pred(lo)` is
/// false and `pred(hi)` is true. Used where `f` is a step function and the
/// edge of a flat solution set is wanted.
pub fn bisect_edge<P: Fn(f64) -> bool>(pred: P, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
