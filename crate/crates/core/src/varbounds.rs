//! Upper bounds on `Var[g(X)]`.
//!
//! * Chernoff, for `X` standard normal: `E[g'(X)²]`.
//! * Cacoullos, for any `X` with `E|X| < ∞`:
//!   `∫_0^b g'(t)² T₊(t) dt - ∫_a^0 g'(t)² T₋(t) dt` with
//!   `T₊(t) = ∫_t^b x p(x) dx` and `T₋(t) = ∫_a^t x p(x) dx`.
//! * Sharp, for strictly log-concave `X`: `E[g'(X)² / (-φ_p)'(X)]`, with
//!   equality when `g ∝ φ_p`.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::density::Density;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::numerics::{integrate, integrate_pieces, QuadratureSpec};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `g` together with its derivative.
#[derive(Clone)]
pub struct SmoothFunction {
    label: String,
    g: RealFn,
    g_prime: RealFn,
}

impl fmt::Debug for SmoothFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothFunction").field("label", &self.label).finish()
    }
}

impl SmoothFunction {
    pub fn new<G, D>(label: &str, g: G, g_prime: D) -> SmoothFunction
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        SmoothFunction {
            label: label.to_string(),
            g: Arc::new(g),
            g_prime: Arc::new(g_prime),
        }
    }

    pub fn from_expr(label: &str, expr: Expr) -> SmoothFunction {
        let d = expr.derivative();
        SmoothFunction::new(label, move |x| expr.eval(x), move |x| d.eval(x))
    }

    pub fn parse(src: &str) -> Result<SmoothFunction> {
        Ok(SmoothFunction::from_expr(src.trim(), Expr::parse(src)?))
    }

    /// `g = φ_p`, `g' = φ_p'`.
    pub fn score_of(d: &Density) -> SmoothFunction {
        let (a, b) = (d.clone(), d.clone());
        SmoothFunction::new(
            &format!("score({})", d.name()),
            move |x| a.score_unchecked(x),
            move |x| b.score_slope(x),
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.g)(x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        (self.g_prime)(x)
    }

    /// `|g(hi) - g(lo) - ∫_lo^hi g'|`.
    pub fn antiderivative_gap(&self, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64> {
        let i = integrate(|t| self.derivative(t), lo, hi, spec)?;
        Ok((self.eval(hi) - self.eval(lo) - i).abs())
    }
}

/// `E[g(X)]`.
pub fn mean_of(d: &Density, g: &SmoothFunction, spec: &QuadratureSpec) -> Result<f64> {
    d.expect(|x| g.eval(x), spec)
}

/// `E[(g(X) - E g(X))²]`, computed in two passes.
pub fn variance_of(d: &Density, g: &SmoothFunction, spec: &QuadratureSpec) -> Result<f64> {
    let m = mean_of(d, g, spec)?;
    d.expect(
        |x| {
            let r = g.eval(x) - m;
            r * r
        },
        spec,
    )
}

/// `E[g'(Z)²]` for `Z` standard normal.
pub fn chernoff_bound(g: &SmoothFunction, spec: &QuadratureSpec) -> Result<f64> {
    Density::standard_normal().expect(
        |x| {
            let d = g.derivative(x);
            d * d
        },
        spec,
    )
}

/// The double-integral bound, evaluated as nested single integrals. Tail
/// integrals are memoized on the outer quadrature nodes.
pub fn cacoullos_bound(d: &Density, g: &SmoothFunction, spec: &QuadratureSpec) -> Result<f64> {
    let (a, b) = (d.support().a, d.support().b);
    let inner_spec = QuadratureSpec::tight();
    d.expect(|x| x.abs(), &inner_spec)
        .map_err(|e| Error::HeavyTail(format!("{}: {e}", d.name())))?;

    let pts = d.breakpoints();
    let xp = |x: f64| {
        let p = d.pdf(x);
        if p == 0.0 {
            0.0
        } else {
            x * p
        }
    };
    let cache: RefCell<HashMap<u64, f64>> = RefCell::new(HashMap::new());
    let failure: RefCell<Option<Error>> = RefCell::new(None);

    // T(t): upper tail for t >= 0, lower tail for t < 0
    let tail = |t: f64| -> f64 {
        if let Some(v) = cache.borrow().get(&t.to_bits()) {
            return *v;
        }
        let r = if t >= 0.0 {
            let lo = t.max(a);
            let mut p = vec![lo];
            p.extend(pts.iter().copied().filter(|x| *x > lo));
            integrate_pieces(xp, &p, &inner_spec)
        } else {
            let hi = t.min(b);
            let mut p: Vec<f64> = pts.iter().copied().filter(|x| *x < hi).collect();
            p.push(hi);
            integrate_pieces(xp, &p, &inner_spec)
        };
        let v = match r {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(Error::HeavyTail(format!("{}: {e}", d.name())));
                f64::NAN
            }
        };
        cache.borrow_mut().insert(t.to_bits(), v);
        v
    };
    let outer = |t: f64| {
        let gp = g.derivative(t);
        if gp == 0.0 {
            return 0.0;
        }
        let tv = tail(t);
        if tv == 0.0 {
            0.0
        } else {
            gp * gp * tv
        }
    };

    let mut total = 0.0;
    // (0, b): the tail is constant E[X] on (0, a) when a > 0
    if b > 0.0 {
        let mut p = vec![0.0];
        if a > 0.0 {
            p.push(a);
        }
        p.extend(pts.iter().copied().filter(|x| *x > 0.0 && *x > a));
        let r = integrate_pieces(outer, &p, spec);
        total += settle(r, &failure)?;
    }
    if a < 0.0 {
        let mut p: Vec<f64> = pts.iter().copied().filter(|x| *x < 0.0 && *x < b).collect();
        if b < 0.0 {
            p.push(b);
        }
        p.push(0.0);
        let r = integrate_pieces(outer, &p, spec);
        total -= settle(r, &failure)?;
    }
    Ok(total)
}

fn settle(r: Result<f64>, failure: &RefCell<Option<Error>>) -> Result<f64> {
    if let Some(e) = failure.borrow_mut().take() {
        return Err(e);
    }
    r
}

/// `E[(g(X) - g(0))²]`, the quantity the Cacoullos bound controls through
/// Cauchy–Schwarz. Exposed for debugging.
pub fn increment_second_moment(d: &Density, g: &SmoothFunction, spec: &QuadratureSpec) -> Result<f64> {
    let g0 = g.eval(0.0);
    d.expect(
        |x| {
            let r = g.eval(x) - g0;
            r * r
        },
        spec,
    )
}

pub const LOG_CONCAVITY_MASS: f64 = 0.999;
pub const LOG_CONCAVITY_POINTS: usize = 401;

/// `E[g'(X)² / (-φ_p)'(X)]`; strict log-concavity is checked on a 401-point
/// grid over the central 99.9% of the target. The check is a heuristic.
pub fn sharp_bound(d: &Density, g: &SmoothFunction, spec: &QuadratureSpec) -> Result<f64> {
    d.check_log_concave(true, LOG_CONCAVITY_MASS, LOG_CONCAVITY_POINTS)?;
    // in log space: in light tails p, -φ' and g' under- and overflow together
    let integrand = |x: f64| {
        let gp = g.derivative(x);
        let lp = d.log_pdf(x);
        if gp == 0.0 || lp == f64::NEG_INFINITY {
            return 0.0;
        }
        (2.0 * gp.abs().ln() + lp - (-d.score_slope(x)).ln()).exp()
    };
    integrate_pieces(integrand, &d.breakpoints(), spec).map_err(|e| match e {
        Error::NonConvergence { .. } | Error::NonFinite { .. } => {
            Error::NotIntegrable(format!("E[g'(X)^2 / (-phi)'(X)] for `{}` under `{}`", g.label(), d.name()))
        }
        other => other,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundEntry {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl BoundEntry {
    fn from_result(name: &str, r: Result<f64>) -> BoundEntry {
        match r {
            Ok(v) => BoundEntry {
                name: name.into(),
                value: Some(v),
                code: None,
                reason: None,
            },
            Err(e) => BoundEntry {
                name: name.into(),
                value: None,
                code: Some(e.code().into()),
                reason: Some(e.to_string()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceBoundReport {
    pub density: String,
    pub g: String,
    pub variance: f64,
    pub mean_g: f64,
    pub mean_x: Option<f64>,
    pub bounds: Vec<BoundEntry>,
    /// `variance / bound` for each available, non-zero bound.
    pub ratios: BTreeMap<String, f64>,
}

impl VarianceBoundReport {
    pub fn bound(&self, name: &str) -> Option<&BoundEntry> {
        self.bounds.iter().find(|b| b.name == name)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.bound(name).and_then(|b| b.value)
    }
}

/// Variance, every applicable bound, and sharpness ratios. Inapplicable
/// bounds carry the reason instead of a value.
pub fn bound_report(d: &Density, g: &SmoothFunction, spec: &QuadratureSpec) -> Result<VarianceBoundReport> {
    let mean_g = mean_of(d, g, spec)?;
    let variance = variance_of(d, g, spec)?;
    let chernoff = if d.is_standard_normal() {
        BoundEntry::from_result("chernoff", chernoff_bound(g, spec))
    } else {
        BoundEntry {
            name: "chernoff".into(),
            value: None,
            code: Some("NOT_APPLICABLE".into()),
            reason: Some("the Chernoff bound holds for the standard normal only".into()),
        }
    };
    let bounds = vec![
        chernoff,
        BoundEntry::from_result("cacoullos", cacoullos_bound(d, g, spec)),
        BoundEntry::from_result("sharp", sharp_bound(d, g, spec)),
    ];
    let ratios = bounds
        .iter()
        .filter_map(|b| b.value.filter(|v| *v != 0.0).map(|v| (b.name.clone(), variance / v)))
        .collect();
    Ok(VarianceBoundReport {
        density: d.name().to_string(),
        g: g.label().to_string(),
        variance,
        mean_g,
        mean_x: d.expect(|x| x, spec).ok(),
        bounds,
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::make_builtin;

    fn builtin(name: &str) -> Density {
        make_builtin(name, &BTreeMap::new()).unwrap()
    }

    fn g(src: &str) -> SmoothFunction {
        SmoothFunction::parse(src).unwrap()
    }

    fn spec() -> QuadratureSpec {
        QuadratureSpec::tight()
    }

    #[test]
    fn variances() {
        let n = builtin("normal");
        assert!((variance_of(&n, &g("x"), &spec()).unwrap() - 1.0).abs() < 1e-10);
        assert!((variance_of(&n, &g("x^2"), &spec()).unwrap() - 2.0).abs() < 1e-10);
        let e = builtin("exponential");
        assert!((variance_of(&e, &g("x"), &spec()).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn chernoff_examples() {
        assert!((chernoff_bound(&g("x"), &spec()).unwrap() - 1.0).abs() < 1e-12);
        assert!((chernoff_bound(&g("x^2"), &spec()).unwrap() - 4.0).abs() < 1e-10);
        assert_eq!(chernoff_bound(&g("3"), &spec()).unwrap(), 0.0);
    }

    #[test]
    fn cacoullos_collapses_to_chernoff_for_normal() {
        let n = builtin("normal");
        for src in ["x", "x^2", "x^3", "sin(x)", "exp(x/2)"] {
            let c = cacoullos_bound(&n, &g(src), &spec()).unwrap();
            let k = chernoff_bound(&g(src), &spec()).unwrap();
            assert!((c - k).abs() <= 2e-8, "{src}: {c} vs {k}");
        }
    }

    #[test]
    fn cacoullos_exponential_closed_form() {
        // T₊(t) = (1 + t)e^(-t) and ∫_0^∞ (1 + t)e^(-t) dt = 2
        let e = builtin("exponential");
        let c = cacoullos_bound(&e, &g("x"), &spec()).unwrap();
        assert!((c - 2.0).abs() < 1e-8, "{c}");
        assert_eq!(cacoullos_bound(&e, &g("5"), &spec()).unwrap(), 0.0);
    }

    #[test]
    fn cacoullos_heavy_tail() {
        let cauchy = make_builtin("student_t", &[("nu".to_string(), 1.0)].into_iter().collect()).unwrap();
        assert!(matches!(
            cacoullos_bound(&cauchy, &g("x"), &QuadratureSpec::default()),
            Err(Error::HeavyTail(_))
        ));
    }

    #[test]
    fn sharp_bound_examples() {
        let n = builtin("normal");
        assert!((sharp_bound(&n, &g("x"), &spec()).unwrap() - 1.0).abs() < 1e-12);
        assert!((sharp_bound(&n, &g("x^2"), &spec()).unwrap() - 4.0).abs() < 1e-10);
        assert!(matches!(
            sharp_bound(&builtin("exponential"), &g("x"), &spec()),
            Err(Error::NotStrictlyLogConcave { .. })
        ));
        let l = builtin("logistic");
        let score = SmoothFunction::score_of(&l);
        let ratio = variance_of(&l, &score, &spec()).unwrap() / sharp_bound(&l, &score, &spec()).unwrap();
        assert!((ratio - 1.0).abs() <= 1e-6, "{ratio}");
    }

    #[test]
    fn report_for_normal_cube() {
        let r = bound_report(&builtin("normal"), &g("x^3"), &spec()).unwrap();
        assert!((r.variance - 15.0).abs() < 1e-9);
        for name in ["chernoff", "cacoullos", "sharp"] {
            assert!((r.value(name).unwrap() - 27.0).abs() < 1e-7, "{name}");
        }
    }

    #[test]
    fn report_for_exponential() {
        let r = bound_report(&builtin("exponential"), &g("x"), &spec()).unwrap();
        assert!((r.value("cacoullos").unwrap() - 2.0).abs() < 1e-8);
        assert_eq!(r.bound("sharp").unwrap().code.as_deref(), Some("NOT_STRICTLY_LOG_CONCAVE"));
        assert_eq!(r.bound("chernoff").unwrap().code.as_deref(), Some("NOT_APPLICABLE"));
        assert!((r.mean_x.unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn linear_g_ratios_are_one() {
        let r = bound_report(&builtin("normal"), &g("2*x + 1"), &spec()).unwrap();
        for (name, ratio) in &r.ratios {
            assert!((ratio - 1.0).abs() < 1e-8, "{name}: {ratio}");
        }
        assert_eq!(r.ratios.len(), 3);
    }

    #[test]
    fn antiderivative_spot_check() {
        let f = g("sin(x) * x^2");
        assert!(f.antiderivative_gap(-1.0, 2.5, &spec()).unwrap() < 1e-10);
    }
}
