//! Stein operators, their zero-mean identity under the target, and
//! empirical Stein discrepancies.
//!
//! Three operators are available:
//!
//! | kind        | `(A f)(x)`                 | target          |
//! |-------------|----------------------------|-----------------|
//! | `location`  | `f'(x) + φ_p(x) f(x)`      | any density     |
//! | `exp_unit`  | `f'(x) - f(x)`             | positive support |
//! | `exp_scale` | `x f'(x) - (x - 1) f(x)`   | positive support |
//!
//! `E_p[(A f)(X)] = 0` whenever the boundary term vanishes at both support
//! ends. For `location` and `exp_unit` the boundary term is `f·p`, for
//! `exp_scale` it is `x·f·p`. Only this sufficiency direction is checked; a
//! finite bank of test functions cannot establish the converse.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::Density;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::numerics::{order_independent_sum, QuadratureSpec};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A differentiable test function `f` with its derivative.
#[derive(Clone)]
pub struct TestFunction {
    label: String,
    f: RealFn,
    f_prime: RealFn,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction").field("label", &self.label).finish()
    }
}

impl TestFunction {
    pub fn new<F, G>(label: &str, f: F, f_prime: G) -> TestFunction
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        TestFunction {
            label: label.to_string(),
            f: Arc::new(f),
            f_prime: Arc::new(f_prime),
        }
    }

    /// Test function from an expression; the derivative is symbolic.
    pub fn from_expr(label: &str, expr: Expr) -> TestFunction {
        let d = expr.derivative();
        TestFunction::new(label, move |x| expr.eval(x), move |x| d.eval(x))
    }

    pub fn parse(src: &str) -> Result<TestFunction> {
        Ok(TestFunction::from_expr(src.trim(), Expr::parse(src)?))
    }

    /// `a·f1 + b·f2`.
    pub fn combine(a: f64, f1: &TestFunction, b: f64, f2: &TestFunction) -> TestFunction {
        let (g1, g2) = (f1.f.clone(), f2.f.clone());
        let (d1, d2) = (f1.f_prime.clone(), f2.f_prime.clone());
        TestFunction::new(
            &format!("{a}*({}) + {b}*({})", f1.label, f2.label),
            move |x| a * g1(x) + b * g2(x),
            move |x| a * d1(x) + b * d2(x),
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        (self.f_prime)(x)
    }
}

pub const DEFAULT_BANK: [&str; 6] = ["x", "x^2", "x^3", "sin(x)", "tanh(x)", "exp(-x^2/2)"];

/// `{x, x², x³, sin x, tanh x, exp(-x²/2)}`.
pub fn default_bank() -> Vec<TestFunction> {
    DEFAULT_BANK
        .iter()
        .map(|s| TestFunction::parse(s).expect("bank expressions parse"))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SteinOperatorKind {
    Location,
    ExpUnit,
    ExpScale,
}

impl SteinOperatorKind {
    pub const ALL: [SteinOperatorKind; 3] = [
        SteinOperatorKind::Location,
        SteinOperatorKind::ExpUnit,
        SteinOperatorKind::ExpScale,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SteinOperatorKind::Location => "location",
            SteinOperatorKind::ExpUnit => "exp_unit",
            SteinOperatorKind::ExpScale => "exp_scale",
        }
    }

    /// The exponential operators need a target supported on `(a, b)` with
    /// `a >= 0`.
    pub fn validate_for(&self, d: &Density) -> Result<()> {
        if *self != SteinOperatorKind::Location && !(d.support().a >= 0.0) {
            return Err(Error::InvalidOperator {
                kind: self.as_str().into(),
                target: d.name().into(),
                reason: "needs a target supported on the positive half-line".into(),
            });
        }
        Ok(())
    }

    fn boundary_weight(&self, x: f64) -> f64 {
        match self {
            SteinOperatorKind::ExpScale => x,
            _ => 1.0,
        }
    }
}

impl fmt::Display for SteinOperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SteinOperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "location" => Ok(SteinOperatorKind::Location),
            "exp_unit" => Ok(SteinOperatorKind::ExpUnit),
            "exp_scale" => Ok(SteinOperatorKind::ExpScale),
            other => Err(Error::Config(format!(
                "unknown operator `{other}` (expected location, exp_unit or exp_scale)"
            ))),
        }
    }
}

fn operator_value(kind: SteinOperatorKind, phi: f64, f: f64, fp: f64, x: f64) -> f64 {
    match kind {
        SteinOperatorKind::Location => fp + phi * f,
        SteinOperatorKind::ExpUnit => fp - f,
        SteinOperatorKind::ExpScale => x * fp - (x - 1.0) * f,
    }
}

/// `(A f)(x)` for the chosen operator.
pub fn apply_operator(d: &Density, kind: SteinOperatorKind, tf: &TestFunction, x: f64) -> Result<f64> {
    kind.validate_for(d)?;
    let phi = match kind {
        SteinOperatorKind::Location => d.location_score(x)?.phi,
        _ => {
            let s = d.support();
            if !s.contains_interior(x) {
                return Err(Error::OutOfSupport { x, a: s.a, b: s.b });
            }
            0.0
        }
    };
    Ok(operator_value(kind, phi, tf.eval(x), tf.derivative(x), x))
}

const BOUNDARY_LIMIT: f64 = 1e-8;

/// Largest `|w(x)·f(x)·p(x)|` over the deepest points of geometric
/// sequences approaching each support end (`w = x` for `exp_scale`, else
/// 1).
pub fn boundary_terms(d: &Density, kind: SteinOperatorKind, tf: &TestFunction) -> Result<(f64, f64)> {
    let s = d.support();
    let (center, spread) = d.center_spread();
    let term = |x: f64| -> Result<f64> {
        let p = d.pdf(x);
        if p == 0.0 {
            return Ok(0.0);
        }
        let v = kind.boundary_weight(x) * tf.eval(x) * p;
        if v.is_finite() {
            Ok(v.abs())
        } else {
            Err(Error::NonFinite { x })
        }
    };
    let approach = |end: f64, dir: f64| -> Result<f64> {
        let points: Vec<f64> = if end.is_finite() {
            let scale = spread.min((end - center).abs().max(f64::MIN_POSITIVE));
            (1..=15).map(|k| end - dir * scale * 10f64.powi(-k)).collect()
        } else {
            (1..=60).map(|k| center + dir * spread * 2f64.powi(k)).collect()
        };
        let tail = &points[points.len() - 3..];
        let mut worst = 0.0f64;
        for &x in tail {
            worst = worst.max(term(x)?);
        }
        Ok(worst)
    };
    Ok((approach(s.a, -1.0)?, approach(s.b, 1.0)?))
}

/// True iff the boundary term `f·p` vanishes (to 1e-8) at both ends.
pub fn boundary_condition_check(d: &Density, tf: &TestFunction) -> Result<bool> {
    boundary_condition_check_for(d, SteinOperatorKind::Location, tf)
}

/// Boundary check with the operator-specific weight (`x·f·p` for
/// `exp_scale`).
pub fn boundary_condition_check_for(d: &Density, kind: SteinOperatorKind, tf: &TestFunction) -> Result<bool> {
    let (lo, hi) = boundary_terms(d, kind, tf)?;
    Ok(lo <= BOUNDARY_LIMIT && hi <= BOUNDARY_LIMIT)
}

/// `E_p[(A f)(X)]` by quadrature.
pub fn expected_operator(
    d: &Density,
    kind: SteinOperatorKind,
    tf: &TestFunction,
    spec: &QuadratureSpec,
) -> Result<f64> {
    kind.validate_for(d)?;
    d.expect(
        |x| {
            let phi = match kind {
                SteinOperatorKind::Location => d.score_unchecked(x),
                _ => 0.0,
            };
            operator_value(kind, phi, tf.eval(x), tf.derivative(x), x)
        },
        spec,
    )
}

/// Test functions from `bank` that pass the boundary check and whose
/// expected operator integral converges.
pub fn admissible_bank(
    d: &Density,
    kind: SteinOperatorKind,
    bank: &[TestFunction],
    spec: &QuadratureSpec,
) -> Vec<TestFunction> {
    bank.iter()
        .filter(|tf| {
            matches!(boundary_condition_check_for(d, kind, tf), Ok(true))
                && expected_operator(d, kind, tf, spec).is_ok()
        })
        .cloned()
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionDiscrepancy {
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteinDiscrepancyReport {
    pub target: String,
    pub kind: SteinOperatorKind,
    pub n: usize,
    pub excluded: usize,
    pub per_function: Vec<FunctionDiscrepancy>,
    pub max_abs: f64,
}

/// Sample means of `(A f)(w_i)` for each test function. Points outside the
/// support interior, or on a registered non-differentiability point for the
/// location operator, are excluded and counted. The result does not depend
/// on the order of `sample`.
pub fn empirical_discrepancy(
    sample: &[f64],
    d: &Density,
    kind: SteinOperatorKind,
    tfs: &[TestFunction],
) -> Result<SteinDiscrepancyReport> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    kind.validate_for(d)?;
    let support = d.support();
    let used: Vec<(f64, f64)> = sample
        .iter()
        .copied()
        .filter(|x| support.contains_interior(*x))
        .filter(|x| kind != SteinOperatorKind::Location || !d.kinks().contains(x))
        .map(|x| {
            let phi = match kind {
                SteinOperatorKind::Location => d.score_unchecked(x),
                _ => 0.0,
            };
            (x, phi)
        })
        .collect();
    if used.is_empty() {
        return Err(Error::EmptySample);
    }
    let n_used = used.len() as f64;
    let mut per_function = Vec::with_capacity(tfs.len());
    for tf in tfs {
        let mut terms: Vec<f64> = used
            .par_iter()
            .map(|&(x, phi)| operator_value(kind, phi, tf.eval(x), tf.derivative(x), x))
            .collect();
        if let Some(x) = terms.iter().position(|v| !v.is_finite()).map(|i| used[i].0) {
            return Err(Error::NonFinite { x });
        }
        per_function.push(FunctionDiscrepancy {
            label: tf.label().to_string(),
            value: order_independent_sum(&mut terms) / n_used,
        });
    }
    let max_abs = per_function.iter().fold(0.0f64, |m, f| m.max(f.value.abs()));
    Ok(SteinDiscrepancyReport {
        target: d.name().to_string(),
        kind,
        n: sample.len(),
        excluded: sample.len() - used.len(),
        per_function,
        max_abs,
    })
}

/// Parses one value per line; blank lines are skipped and an optional
/// first line `x` is treated as a header.
pub fn parse_sample_csv(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || (i == 0 && t.eq_ignore_ascii_case("x")) {
            continue;
        }
        let v: f64 = t
            .parse()
            .map_err(|_| Error::Config(format!("sample line {}: `{t}` is not a number", i + 1)))?;
        out.push(v);
    }
    Ok(out)
}

pub fn read_sample_csv(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_sample_csv(&text)
}

/// Header `x` then one value per line, in shortest round-trip form.
pub fn format_sample_csv(sample: &[f64]) -> String {
    let mut s = String::from("x\n");
    for v in sample {
        s.push_str(&format!("{v:?}\n"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::make_builtin;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn builtin(name: &str) -> Density {
        make_builtin(name, &BTreeMap::new()).unwrap()
    }

    fn tf(src: &str) -> TestFunction {
        TestFunction::parse(src).unwrap()
    }

    #[test]
    fn operator_values() {
        let n = builtin("normal");
        let e = builtin("exponential");
        let x = tf("x");
        assert_eq!(apply_operator(&n, SteinOperatorKind::Location, &x, 2.0).unwrap(), -3.0);
        assert_eq!(apply_operator(&e, SteinOperatorKind::ExpScale, &x, 3.0).unwrap(), -3.0);
        assert_eq!(apply_operator(&e, SteinOperatorKind::Location, &x, 3.0).unwrap(), -2.0);
        assert_eq!(apply_operator(&e, SteinOperatorKind::ExpUnit, &x, 3.0).unwrap(), -2.0);
    }

    #[test]
    fn operator_errors() {
        let x = tf("x");
        assert!(matches!(
            apply_operator(&builtin("normal"), SteinOperatorKind::ExpUnit, &x, 1.0),
            Err(Error::InvalidOperator { .. })
        ));
        assert!(matches!(
            apply_operator(&builtin("exponential"), SteinOperatorKind::ExpUnit, &x, -1.0),
            Err(Error::OutOfSupport { .. })
        ));
        assert!(matches!(
            apply_operator(&builtin("laplace"), SteinOperatorKind::Location, &x, 0.0),
            Err(Error::NonDifferentiablePoint { .. })
        ));
    }

    #[test]
    fn boundary_checks() {
        let n = builtin("normal");
        let e = builtin("exponential");
        assert!(boundary_condition_check(&n, &tf("x")).unwrap());
        assert!(!boundary_condition_check(&e, &tf("1")).unwrap());
        assert!(boundary_condition_check(&e, &tf("x")).unwrap());
        // x·f·p at 0+ vanishes even for f = 1
        assert!(boundary_condition_check_for(&e, SteinOperatorKind::ExpScale, &tf("1")).unwrap());
        let cauchy = make_builtin("student_t", &[("nu".to_string(), 1.0)].into_iter().collect()).unwrap();
        assert!(!boundary_condition_check(&cauchy, &tf("x^3")).unwrap());
    }

    #[test]
    fn expected_operator_examples() {
        let spec = QuadratureSpec::default();
        let n = builtin("normal");
        let e = builtin("exponential");
        for f in ["x", "x^2"] {
            let v = expected_operator(&n, SteinOperatorKind::Location, &tf(f), &spec).unwrap();
            assert!(v.abs() <= 1e-8, "{f}: {v}");
        }
        let v = expected_operator(&e, SteinOperatorKind::ExpScale, &tf("x"), &spec).unwrap();
        assert!(v.abs() <= 1e-8);
        // inadmissible: f(0+)p(0+) = 1, and E[0 - 1] = -1
        let v = expected_operator(&e, SteinOperatorKind::ExpUnit, &tf("1"), &spec).unwrap();
        assert!((v + 1.0).abs() <= 1e-8);
    }

    #[test]
    fn admissible_bank_for_exponential() {
        let e = builtin("exponential");
        let bank = admissible_bank(&e, SteinOperatorKind::Location, &default_bank(), &QuadratureSpec::default());
        let labels: Vec<&str> = bank.iter().map(|t| t.label()).collect();
        assert_eq!(labels, ["x", "x^2", "x^3", "sin(x)", "tanh(x)"]);
    }

    #[test]
    fn constant_sample() {
        let n = builtin("normal");
        let r = empirical_discrepancy(&[0.0; 50], &n, SteinOperatorKind::Location, &[tf("x")]).unwrap();
        assert_eq!(r.per_function[0].value, 1.0);
        assert_eq!(r.max_abs, 1.0);
        assert_eq!((r.n, r.excluded), (50, 0));
    }

    #[test]
    fn exclusions_and_empty() {
        let e = builtin("exponential");
        let r = empirical_discrepancy(&[-1.0, 0.0, 1.0, 2.0], &e, SteinOperatorKind::ExpUnit, &[tf("x")]).unwrap();
        assert_eq!(r.excluded, 2);
        assert_eq!(r.per_function[0].value, 0.5 * ((1.0 - 1.0) + (1.0 - 2.0)));
        assert!(matches!(
            empirical_discrepancy(&[], &e, SteinOperatorKind::Location, &[tf("x")]),
            Err(Error::EmptySample)
        ));
    }

    #[test]
    fn laplace_sample_against_normal_target() {
        let l = builtin("laplace");
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let sample = l.sample(&mut rng, 10_000).unwrap();
        let r = empirical_discrepancy(&sample, &builtin("normal"), SteinOperatorKind::Location, &[tf("x")]).unwrap();
        assert!((r.per_function[0].value + 1.0).abs() < 0.1, "{}", r.per_function[0].value);
    }

    #[test]
    fn csv_round_trip() {
        let v = vec![1.5, -2.0, 1e-300, 0.1 + 0.2];
        assert_eq!(parse_sample_csv(&format_sample_csv(&v)).unwrap(), v);
        assert_eq!(parse_sample_csv("1\n\n2\n").unwrap(), vec![1.0, 2.0]);
        assert!(parse_sample_csv("x\nfoo\n").is_err());
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("exp-scale".parse::<SteinOperatorKind>().unwrap(), SteinOperatorKind::ExpScale);
        assert!("scale".parse::<SteinOperatorKind>().is_err());
    }
}
