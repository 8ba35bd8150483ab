//! Densities and their score functions.
//!
//! A [`Density`] carries its support, a normalized log-density, and when
//! available a closed-form location score `φ_p = (log p)'`. The scale score
//! is always derived as `ψ_p(x) = 1 + x·φ_p(x)`. When no closed form exists
//! the score falls back to a central difference of the log-density and the
//! [`ScoreEvaluation`] records that.
//!
//! Points where the score does not exist (the Laplace median) are
//! registered explicitly and rejected by [`Density::location_score`].

pub mod builtin;
pub mod spec;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::numerics::{
    central_diff_step, diff::default_step, find_root, integrate_pieces, Bracket, DiffOrder, QuadratureSpec,
};

pub use builtin::Family;
pub use spec::DensitySpec;

/// Open support interval `(a, b)`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupportInterval {
    pub a: f64,
    pub b: f64,
}

impl SupportInterval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a.is_nan() || b.is_nan() || !(a < b) {
            return Err(Error::Config(format!("support must satisfy a < b, got ({a}, {b})")));
        }
        Ok(SupportInterval { a, b })
    }

    pub fn real_line() -> Self {
        SupportInterval {
            a: f64::NEG_INFINITY,
            b: f64::INFINITY,
        }
    }

    pub fn contains_interior(&self, x: f64) -> bool {
        self.a < x && x < self.b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScoreSource {
    Analytic,
    FiniteDifference,
}

/// Location and scale score at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoreEvaluation {
    pub x: f64,
    pub phi: f64,
    pub psi: f64,
    pub source: ScoreSource,
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Builtin(Family),
    Expression(Expr),
    Custom { log_pdf: RealFn, score: Option<RealFn> },
    Power { base: Arc<Density>, exponent: f64 },
    ScalePair { base: Arc<Density>, c1: f64, c2: f64 },
}

/// An immutable univariate density.
#[derive(Clone)]
pub struct Density {
    name: String,
    support: SupportInterval,
    symmetric: bool,
    params: Vec<(String, f64)>,
    kinks: Vec<f64>,
    log_norm: f64,
    center: f64,
    spread: f64,
    kind: Kind,
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Density")
            .field("name", &self.name)
            .field("support", &self.support)
            .field("symmetric", &self.symmetric)
            .field("params", &self.params)
            .field("kinks", &self.kinks)
            .finish()
    }
}

/// Builds a built-in family by name, e.g. `("normal", {mu: 0, sigma: 1})`.
pub fn make_builtin(name: &str, params: &BTreeMap<String, f64>) -> Result<Density> {
    Family::from_name(name, params).map(Density::from_family)
}

impl Density {
    pub fn from_family(family: Family) -> Density {
        let (a, b) = family.support();
        let (center, spread) = family.center_spread();
        Density {
            name: family.name().to_string(),
            support: SupportInterval { a, b },
            symmetric: family.symmetric(),
            params: family.params(),
            kinks: family.kinks(),
            log_norm: 0.0,
            center,
            spread,
            kind: Kind::Builtin(family),
        }
    }

    pub fn standard_normal() -> Density {
        Density::from_family(Family::Normal { mu: 0.0, sigma: 1.0 })
    }

    /// Density proportional to `exp(expr(x))` on `support`, normalized
    /// numerically. `symmetric` is a declaration and is verified on a grid.
    pub fn from_expression(
        name: &str,
        log_pdf: Expr,
        support: SupportInterval,
        symmetric: bool,
        kinks: Vec<f64>,
        params: Vec<(String, f64)>,
    ) -> Result<Density> {
        let mut d = Density {
            name: name.to_string(),
            support,
            symmetric,
            params,
            kinks: clean_kinks(kinks, support),
            log_norm: 0.0,
            center: 0.0,
            spread: 1.0,
            kind: Kind::Expression(log_pdf),
        };
        d.normalize_numerically()?;
        if symmetric {
            d.verify_symmetry()?;
        }
        Ok(d)
    }

    /// Density proportional to `exp(log_pdf(x))` with an optional analytic
    /// score of the *unnormalized* log-density (normalization does not change
    /// the score).
    pub fn custom<L, S>(
        name: &str,
        support: SupportInterval,
        log_pdf: L,
        score: Option<S>,
        symmetric: bool,
        kinks: Vec<f64>,
    ) -> Result<Density>
    where
        L: Fn(f64) -> f64 + Send + Sync + 'static,
        S: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let mut d = Density {
            name: name.to_string(),
            support,
            symmetric,
            params: Vec::new(),
            kinks: clean_kinks(kinks, support),
            log_norm: 0.0,
            center: 0.0,
            spread: 1.0,
            kind: Kind::Custom {
                log_pdf: Arc::new(log_pdf),
                score: score.map(|s| Arc::new(s) as RealFn),
            },
        };
        d.normalize_numerically()?;
        if symmetric {
            d.verify_symmetry()?;
        }
        Ok(d)
    }

    /// Normalized density proportional to `p(x)^c`; its score is `c·φ_p`.
    pub fn power(&self, c: f64) -> Result<Density> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidParameter {
                name: "c".into(),
                value: c,
                reason: "exponent must be > 0".into(),
            });
        }
        let mut d = Density {
            name: format!("{}^{}", self.name, c),
            support: self.support,
            symmetric: self.symmetric,
            params: vec![("c".to_string(), c)],
            kinks: self.kinks.clone(),
            log_norm: 0.0,
            center: self.center,
            spread: self.spread,
            kind: Kind::Power {
                base: Arc::new(self.clone()),
                exponent: c,
            },
        };
        d.normalize_numerically().map_err(as_not_integrable)?;
        Ok(d)
    }

    /// `q(x) ∝ |x|^(c1+c2-1)·p(x)^c1`, the density whose scale score is
    /// `c1·ψ_p + c2`. Requires a symmetric `p`, `c1 > 0` and `c1 + c2` an
    /// odd positive integer.
    pub fn scale_pair(&self, c1: f64, c2: f64) -> Result<Density> {
        if !self.symmetric {
            return Err(Error::DensityNotSymmetric { name: self.name.clone() });
        }
        if !(c1 > 0.0) || !c1.is_finite() {
            return Err(Error::InvalidParameter {
                name: "c1".into(),
                value: c1,
                reason: "must be > 0".into(),
            });
        }
        let s = c1 + c2;
        let k = s.round();
        if !((s - k).abs() <= 1e-12 * s.abs().max(1.0) && k >= 1.0 && (k as i64) % 2 == 1) {
            return Err(Error::ParityViolation(format!(
                "c1 + c2 = {s} must be an odd positive integer"
            )));
        }
        let c2 = k - c1;
        let e = c1 + c2 - 1.0;
        let mut kinks = self.kinks.clone();
        if e != 0.0 && self.support.contains_interior(0.0) && !kinks.contains(&0.0) {
            kinks.push(0.0);
            kinks.sort_by(f64::total_cmp);
        }
        let mut d = Density {
            name: format!("scale_pair({}, {}, {})", self.name, c1, c2),
            support: self.support,
            symmetric: self.symmetric,
            params: vec![("c1".to_string(), c1), ("c2".to_string(), c2)],
            kinks,
            log_norm: 0.0,
            center: self.center,
            spread: self.spread,
            kind: Kind::ScalePair {
                base: Arc::new(self.clone()),
                c1,
                c2,
            },
        };
        d.normalize_numerically().map_err(as_not_integrable)?;
        Ok(d)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn support(&self) -> SupportInterval {
        self.support
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn params(&self) -> &[(String, f64)] {
        &self.params
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    /// Registered non-differentiability points.
    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    pub fn family(&self) -> Option<Family> {
        match &self.kind {
            Kind::Builtin(f) => Some(*f),
            _ => None,
        }
    }

    pub fn is_standard_normal(&self) -> bool {
        matches!(self.family(), Some(Family::Normal { mu, sigma }) if mu == 0.0 && sigma == 1.0)
    }

    /// True when the score is piecewise constant (solution sets of score
    /// equations may then be intervals).
    pub fn has_flat_score(&self) -> bool {
        match &self.kind {
            Kind::Builtin(Family::Laplace { .. }) | Kind::Builtin(Family::Exponential { .. }) => true,
            Kind::Power { base, .. } => base.has_flat_score(),
            _ => false,
        }
    }

    pub fn has_analytic_score(&self) -> bool {
        match &self.kind {
            Kind::Builtin(_) => true,
            Kind::Expression(_) => false,
            Kind::Custom { score, .. } => score.is_some(),
            Kind::Power { base, .. } | Kind::ScalePair { base, .. } => base.has_analytic_score(),
        }
    }

    /// Location and spread hints (mean and standard deviation where they
    /// exist).
    pub fn center_spread(&self) -> (f64, f64) {
        (self.center, self.spread)
    }

    fn raw_log(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Builtin(f) => f.log_pdf(x),
            Kind::Expression(e) => e.eval(x),
            Kind::Custom { log_pdf, .. } => log_pdf(x),
            Kind::Power { base, exponent } => exponent * base.log_pdf(x),
            Kind::ScalePair { base, c1, c2 } => {
                let e = c1 + c2 - 1.0;
                let lp = c1 * base.log_pdf(x);
                if e == 0.0 {
                    lp
                } else {
                    e * x.abs().ln() + lp
                }
            }
        }
    }

    /// Normalized log-density; `-∞` outside the closed support.
    pub fn log_pdf(&self, x: f64) -> f64 {
        if x < self.support.a || x > self.support.b {
            return f64::NEG_INFINITY;
        }
        self.raw_log(x) - self.log_norm
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.log_pdf(x).exp()
    }

    fn analytic_score(&self, x: f64) -> Option<f64> {
        match &self.kind {
            Kind::Builtin(f) => Some(f.score(x)),
            Kind::Expression(_) => None,
            Kind::Custom { score, .. } => score.as_ref().map(|s| s(x)),
            Kind::Power { base, exponent } => base.analytic_score(x).map(|s| exponent * s),
            Kind::ScalePair { base, c1, c2 } => {
                let e = c1 + c2 - 1.0;
                base.analytic_score(x).map(|s| if e == 0.0 { c1 * s } else { e / x + c1 * s })
            }
        }
    }

    fn fd_step(&self, x: f64, order: DiffOrder) -> f64 {
        let mut h = default_step(x, order);
        let (a, b) = (self.support.a, self.support.b);
        if a.is_finite() {
            h = h.min(0.5 * (x - a));
        }
        if b.is_finite() {
            h = h.min(0.5 * (b - x));
        }
        h
    }

    fn fd_score(&self, x: f64) -> Result<f64> {
        central_diff_step(|t| self.log_pdf(t), x, DiffOrder::First, self.fd_step(x, DiffOrder::First))
    }

    /// Score without support or kink checks; `NaN` if it cannot be formed.
    /// Used inside integrands where nodes never land on kinks.
    pub fn score_unchecked(&self, x: f64) -> f64 {
        match self.analytic_score(x) {
            Some(s) => s,
            None => self.fd_score(x).unwrap_or(f64::NAN),
        }
    }

    /// Scale score `1 + x·φ(x)` without checks.
    pub fn scale_score_unchecked(&self, x: f64) -> f64 {
        1.0 + x * self.score_unchecked(x)
    }

    /// `φ_p'(x) = (log p)''(x)`, analytic where available.
    pub fn score_slope(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Builtin(f) => f.score_slope(x),
            Kind::Power { base, exponent } if base.has_analytic_score() => exponent * base.score_slope(x),
            Kind::ScalePair { base, c1, c2 } if base.has_analytic_score() => {
                let e = c1 + c2 - 1.0;
                -e / (x * x) + c1 * base.score_slope(x)
            }
            _ => central_diff_step(
                |t| self.log_pdf(t),
                x,
                DiffOrder::Second,
                self.fd_step(x, DiffOrder::Second),
            )
            .unwrap_or(f64::NAN),
        }
    }

    fn check_point(&self, x: f64) -> Result<()> {
        if !self.support.contains_interior(x) {
            return Err(Error::OutOfSupport {
                x,
                a: self.support.a,
                b: self.support.b,
            });
        }
        if self.kinks.contains(&x) {
            return Err(Error::NonDifferentiablePoint { x });
        }
        Ok(())
    }

    /// `φ_p(x)` and `ψ_p(x) = 1 + x·φ_p(x)`.
    pub fn location_score(&self, x: f64) -> Result<ScoreEvaluation> {
        self.check_point(x)?;
        let (phi, source) = match self.analytic_score(x) {
            Some(s) => (s, ScoreSource::Analytic),
            None => (self.fd_score(x)?, ScoreSource::FiniteDifference),
        };
        if !phi.is_finite() {
            return Err(Error::NonFinite { x });
        }
        Ok(ScoreEvaluation {
            x,
            phi,
            psi: 1.0 + x * phi,
            source,
        })
    }

    /// Same evaluation as [`Density::location_score`]; `psi` is the value of
    /// interest.
    pub fn scale_score(&self, x: f64) -> Result<ScoreEvaluation> {
        self.location_score(x)
    }

    /// Finite-difference score regardless of whether a closed form exists.
    pub fn finite_difference_score(&self, x: f64) -> Result<f64> {
        self.check_point(x)?;
        self.fd_score(x)
    }

    /// Partition of the support used to seed quadrature: the support ends,
    /// registered kinks and a few points around the bulk.
    pub fn breakpoints(&self) -> Vec<f64> {
        let (a, b) = (self.support.a, self.support.b);
        let mut pts = vec![a, b];
        pts.extend(self.kinks.iter().copied().filter(|k| a < *k && *k < b));
        for k in [-8.0, -3.0, -1.0, 0.0, 1.0, 3.0, 8.0] {
            let p = self.center + k * self.spread;
            if p.is_finite() && a < p && p < b {
                pts.push(p);
            }
        }
        if a < 0.0 && 0.0 < b {
            pts.push(0.0);
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|x, y| x == y || (x.is_finite() && y.is_finite() && (*x - *y).abs() <= 1e-12 * x.abs().max(y.abs())));
        pts
    }

    /// `∫ h(x) p(x) dx` over the support. `h` is not evaluated where `p`
    /// underflows to zero.
    pub fn expect<H: Fn(f64) -> f64>(&self, h: H, spec: &QuadratureSpec) -> Result<f64> {
        let pts = self.breakpoints();
        integrate_pieces(
            |x| {
                let p = self.pdf(x);
                // subnormal p carries no mass but can pair with an overflowing h
                if p < f64::MIN_POSITIVE {
                    0.0
                } else {
                    h(x) * p
                }
            },
            &pts,
            spec,
        )
    }

    /// `∫ p` over the support; 1 up to quadrature error.
    pub fn total_mass(&self, spec: &QuadratureSpec) -> Result<f64> {
        self.expect(|_| 1.0, spec)
    }

    /// `∫ φ_p(z) p(z) dz`, which vanishes when `p` does at both support
    /// ends.
    pub fn score_zero_mean(&self, spec: &QuadratureSpec) -> Result<f64> {
        self.expect(|x| self.score_unchecked(x), spec)
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        if let Kind::Builtin(f) = &self.kind {
            return Ok(f.cdf(x));
        }
        let (a, b) = (self.support.a, self.support.b);
        if x <= a {
            return Ok(0.0);
        }
        if x >= b {
            return Ok(1.0);
        }
        let spec = QuadratureSpec::tight();
        let pts = self.breakpoints();
        let pdf = |t: f64| self.pdf(t);
        if x <= self.center {
            let mut lower: Vec<f64> = pts.iter().copied().filter(|p| *p < x).collect();
            lower.push(x);
            integrate_pieces(pdf, &lower, &spec)
        } else {
            let mut upper = vec![x];
            upper.extend(pts.iter().copied().filter(|p| *p > x));
            integrate_pieces(pdf, &upper, &spec).map(|t| 1.0 - t)
        }
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::InvalidParameter {
                name: "u".into(),
                value: u,
                reason: "probability must lie in (0, 1)".into(),
            });
        }
        if let Some(q) = self.family().and_then(|f| f.quantile(u)) {
            return Ok(q);
        }
        let (a, b) = (self.support.a, self.support.b);
        let g = |x: f64| self.cdf(x).map(|c| c - u).unwrap_or(f64::NAN);
        let step = self.spread.max(1e-8);
        let mut lo = (self.center - step).max(a);
        let mut hi = (self.center + step).min(b);
        if lo <= a {
            lo = a + 0.5 * (hi - a);
        }
        if hi >= b {
            hi = b - 0.5 * (b - lo);
        }
        let mut width = step;
        for _ in 0..200 {
            if g(lo) <= 0.0 {
                break;
            }
            width *= 2.0;
            lo = if a.is_finite() { a + 0.5 * (lo - a) } else { lo - width };
        }
        width = step;
        for _ in 0..200 {
            if g(hi) >= 0.0 {
                break;
            }
            width *= 2.0;
            hi = if b.is_finite() { b - 0.5 * (b - hi) } else { hi + width };
        }
        let bracket = Bracket::from_fn(g, lo, hi)?;
        find_root(g, bracket, 1e-12 * step)
    }

    /// Quantiles bounding the central `mass` of probability.
    pub fn central_region(&self, mass: f64) -> Result<(f64, f64)> {
        let tail = 0.5 * (1.0 - mass);
        Ok((self.quantile(tail)?, self.quantile(1.0 - tail)?))
    }

    /// `n` equally spaced points over the central region, registered kinks
    /// removed.
    pub fn central_grid(&self, mass: f64, n: usize) -> Result<Vec<f64>> {
        let (lo, hi) = self.central_region(mass)?;
        let n = n.max(2);
        Ok((0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .filter(|x| !self.kinks.contains(x) && self.support.contains_interior(*x))
            .collect())
    }

    /// Draws `n` values: direct samplers for normal, exponential, Laplace
    /// and Student-t, inverse cdf otherwise.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            if let Some(v) = self.family().and_then(|f| f.sample_one(rng)) {
                out.push(v);
                continue;
            }
            let u = loop {
                let u: f64 = rng.random();
                if u > 0.0 {
                    break u;
                }
            };
            out.push(self.quantile(u)?);
        }
        Ok(out)
    }

    /// Checks `|log p(z) - log p(-z)|` on a grid.
    pub fn verify_symmetry(&self) -> Result<()> {
        for i in 1..=200 {
            let z = i as f64 * 0.05 * self.spread.max(1e-3);
            let (l1, l2) = (self.log_pdf(z), self.log_pdf(-z));
            if l1 == f64::NEG_INFINITY && l2 == f64::NEG_INFINITY {
                continue;
            }
            if !((l1 - l2).abs() <= 1e-12 * l1.abs().max(1.0)) {
                return Err(Error::DensityNotSymmetric { name: self.name.clone() });
            }
        }
        Ok(())
    }

    /// Grid test of (strict) log-concavity over the central `mass` region.
    /// Non-strict: the score never increases between grid points. Strict:
    /// `(-φ)'(x) > 0` at every grid point.
    pub fn check_log_concave(&self, strict: bool, mass: f64, points: usize) -> Result<()> {
        let grid = self.central_grid(mass, points)?;
        if strict {
            for &x in &grid {
                let slope = -self.score_slope(x);
                if !(slope > 0.0) {
                    return Err(Error::NotStrictlyLogConcave {
                        name: self.name.clone(),
                        x,
                        slope,
                    });
                }
            }
        } else {
            let scores: Vec<f64> = grid.iter().map(|&x| self.score_unchecked(x)).collect();
            for (w, xs) in scores.windows(2).zip(grid.windows(2)) {
                let tol = 1e-9 * w[0].abs().max(w[1].abs()).max(1.0);
                if !(w[1] <= w[0] + tol) {
                    return Err(Error::NotLogConcave {
                        name: self.name.clone(),
                        x: xs[1],
                    });
                }
            }
        }
        Ok(())
    }

    fn normalize_numerically(&mut self) -> Result<()> {
        let (a, b) = (self.support.a, self.support.b);
        // locate the bulk: scan a coarse grid for the largest log-density
        let mut probes: Vec<f64> = Vec::new();
        for k in -4..=4 {
            for m in [1.0, 2.0, 5.0] {
                let v = m * 10f64.powi(k);
                probes.push(v);
                probes.push(-v);
            }
        }
        probes.push(0.0);
        probes.extend((0..=400).map(|i| -10.0 + 0.05 * i as f64));
        probes.extend((0..=40).map(|i| self.center + self.spread * (-4.0 + 0.2 * i as f64)));
        if a.is_finite() && b.is_finite() {
            probes.extend((1..400).map(|i| a + (b - a) * i as f64 / 400.0));
        }
        let mut best = (f64::NEG_INFINITY, self.center);
        for &x in probes.iter().filter(|x| a < **x && **x < b) {
            let v = self.raw_log(x);
            if v.is_finite() && v > best.0 {
                best = (v, x);
            }
        }
        let (shift, mode) = best;
        if !shift.is_finite() {
            return Err(Error::NormalizationFailure(format!(
                "log-density of `{}` is not finite anywhere in its support",
                self.name
            )));
        }
        if !(self.center.is_finite() && a < self.center && self.center < b) {
            self.center = mode;
        }
        if matches!(self.kind, Kind::Expression(_) | Kind::Custom { .. }) {
            self.center = mode;
            self.spread = 1.0;
        }

        let spec = QuadratureSpec::tight();
        let mass = |d: &Density| {
            let pts = d.breakpoints();
            integrate_pieces(
                |x| {
                    let v = d.raw_log(x) - shift;
                    if v == f64::NEG_INFINITY {
                        0.0
                    } else {
                        v.exp()
                    }
                },
                &pts,
                &spec,
            )
        };
        let z = mass(self).map_err(|e| Error::NormalizationFailure(format!("{}: {e}", self.name)))?;
        if !(z > 0.0 && z.is_finite()) {
            return Err(Error::NormalizationFailure(format!(
                "{}: normalizing integral is {z}",
                self.name
            )));
        }
        self.log_norm = shift + z.ln();

        // refine the bulk hints from moments when they exist, then
        // renormalize on the refined partition
        let moments = self
            .expect(|x| x, &spec)
            .and_then(|m| self.expect(|x| (x - m) * (x - m), &spec).map(|v| (m, v)));
        if let Ok((m, v)) = moments {
            if m.is_finite() && v.is_finite() && v > 0.0 && a < m && m < b {
                self.center = m;
                self.spread = v.sqrt();
                let z = mass(self).map_err(|e| Error::NormalizationFailure(format!("{}: {e}", self.name)))?;
                self.log_norm = shift + z.ln();
            }
        }
        Ok(())
    }
}

fn clean_kinks(mut kinks: Vec<f64>, support: SupportInterval) -> Vec<f64> {
    kinks.retain(|k| support.contains_interior(*k));
    kinks.sort_by(f64::total_cmp);
    kinks.dedup();
    kinks
}

fn as_not_integrable(e: Error) -> Error {
    match e {
        Error::NormalizationFailure(m) => Error::NotIntegrable(m),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn builtin(name: &str, params: &[(&str, f64)]) -> Density {
        let p = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        make_builtin(name, &p).unwrap()
    }

    fn builtins() -> Vec<Density> {
        vec![
            builtin("normal", &[]),
            builtin("exponential", &[("rate", 1.0)]),
            builtin("laplace", &[]),
            builtin("gumbel", &[]),
            builtin("student_t", &[("nu", 5.0)]),
            builtin("gamma", &[("shape", 3.0)]),
            builtin("logistic", &[]),
        ]
    }

    #[test]
    fn normal_score_is_negative_identity() {
        let d = builtin("normal", &[("mu", 0.0), ("sigma", 1.0)]);
        let s = d.location_score(2.0).unwrap();
        assert_eq!(s.phi, -2.0);
        assert_eq!(s.psi, -3.0);
        assert_eq!(s.source, ScoreSource::Analytic);
        assert_eq!(d.location_score(0.0).unwrap().phi, 0.0);
    }

    #[test]
    fn exponential_constant_score() {
        let d = builtin("exponential", &[("lambda", 2.0)]);
        assert_eq!(d.support(), SupportInterval { a: 0.0, b: f64::INFINITY });
        assert_eq!(d.location_score(0.7).unwrap().phi, -2.0);
        let unit = builtin("exponential", &[]);
        assert_eq!(unit.location_score(5.0).unwrap().phi, -1.0);
        assert_eq!(unit.scale_score(3.0).unwrap().psi, -2.0);
        assert!(matches!(unit.location_score(-1.0), Err(Error::OutOfSupport { .. })));
        assert!(matches!(unit.location_score(0.0), Err(Error::OutOfSupport { .. })));
    }

    #[test]
    fn laplace_sign_score_and_kink() {
        let d = builtin("laplace", &[]);
        assert_eq!(d.location_score(1.5).unwrap().phi, -1.0);
        assert_eq!(d.location_score(-0.2).unwrap().phi, 1.0);
        assert!(matches!(d.location_score(0.0), Err(Error::NonDifferentiablePoint { .. })));
    }

    #[test]
    fn scale_score_at_origin_is_one() {
        for d in builtins() {
            if d.support().contains_interior(0.0) && !d.kinks().contains(&0.0) {
                assert_eq!(d.scale_score(0.0).unwrap().psi, 1.0, "{}", d.name());
            }
        }
    }

    #[test]
    fn builtins_are_normalized() {
        let spec = QuadratureSpec::tight();
        for d in builtins() {
            let m = d.total_mass(&spec).unwrap();
            assert!((m - 1.0).abs() <= 1e-8, "{}: {m}", d.name());
        }
    }

    #[test]
    fn score_has_zero_mean() {
        let spec = QuadratureSpec::tight();
        for name in ["normal", "logistic", "gumbel", "laplace"] {
            let v = builtin(name, &[]).score_zero_mean(&spec).unwrap();
            assert!(v.abs() <= 1e-8, "{name}: {v}");
        }
        let g = builtin("gamma", &[("shape", 3.0), ("scale", 1.0)]);
        assert!(g.score_zero_mean(&spec).unwrap().abs() <= 1e-8);
        // p(0+) = 1 for the exponential, so the identity picks up -p(0+)
        let e = builtin("exponential", &[]);
        assert!((e.score_zero_mean(&spec).unwrap() + 1.0).abs() < 1e-9);
    }

    #[test]
    fn analytic_and_finite_difference_scores_agree() {
        for d in builtins() {
            for x in d.central_grid(0.99, 101).unwrap() {
                let an = d.location_score(x).unwrap().phi;
                let fd = d.finite_difference_score(x).unwrap();
                assert!((an - fd).abs() <= 1e-6, "{} at {x}: {an} vs {fd}", d.name());
            }
        }
    }

    #[test]
    fn symmetric_builtins_have_odd_score_even_scale_score() {
        for d in builtins().into_iter().filter(|d| d.is_symmetric()) {
            d.verify_symmetry().unwrap();
            for i in 1..=60 {
                let x = 0.1 * i as f64 + 0.013;
                let (p, m) = (d.location_score(x).unwrap(), d.location_score(-x).unwrap());
                assert!((p.phi + m.phi).abs() <= 1e-9, "{}", d.name());
                assert!((p.psi - m.psi).abs() <= 1e-9, "{}", d.name());
            }
        }
    }

    #[test]
    fn power_of_normal_is_narrower_normal() {
        let d = Density::standard_normal();
        let p4 = d.power(4.0).unwrap();
        let target = builtin("normal", &[("sigma", 0.5)]);
        for x in [-1.3, -0.2, 0.0, 0.6, 2.0] {
            assert!((p4.log_pdf(x) - target.log_pdf(x)).abs() <= 1e-9, "{x}");
            let s = p4.location_score(x).unwrap().phi;
            assert!((s - 4.0 * d.location_score(x).unwrap().phi).abs() <= 1e-12);
        }
    }

    #[test]
    fn power_of_laplace_and_identity_power() {
        let d = builtin("laplace", &[]);
        let p2 = d.power(2.0).unwrap();
        let target = builtin("laplace", &[("b", 0.5)]);
        for x in [-1.3, -0.2, 0.6, 2.0] {
            assert!((p2.log_pdf(x) - target.log_pdf(x)).abs() <= 1e-9);
        }
        let same = builtin("gumbel", &[]).power(1.0).unwrap();
        for x in [-1.0, 0.5, 3.0] {
            assert!((same.log_pdf(x) - builtin("gumbel", &[]).log_pdf(x)).abs() <= 1e-9);
        }
        assert!(matches!(d.power(0.0), Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn power_not_integrable() {
        let t = builtin("student_t", &[("nu", 1.0)]);
        assert!(matches!(t.power(0.5), Err(Error::NotIntegrable(_))));
    }

    #[test]
    fn expression_density_normalizes_and_uses_finite_differences() {
        let e = Expr::parse("-x^2/2").unwrap();
        let d = Density::from_expression("gauss", e, SupportInterval::real_line(), true, vec![], vec![]).unwrap();
        let n = Density::standard_normal();
        for x in [-2.0, 0.0, 1.5] {
            assert!((d.log_pdf(x) - n.log_pdf(x)).abs() <= 1e-9);
        }
        let s = d.location_score(3.0).unwrap();
        assert_eq!(s.source, ScoreSource::FiniteDifference);
        assert!((s.phi + 3.0).abs() <= 1e-8);
        assert!((d.total_mass(&QuadratureSpec::tight()).unwrap() - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn asymmetric_declaration_rejected() {
        let e = Expr::parse("-x^2/2 + x").unwrap();
        let err = Density::from_expression("shifted", e, SupportInterval::real_line(), true, vec![], vec![])
            .unwrap_err();
        assert!(matches!(err, Error::DensityNotSymmetric { .. }));
    }

    #[test]
    fn off_center_expression_density() {
        // normal(30, 2) written unnormalized
        let e = Expr::parse("-(x - 30)^2 / 8").unwrap();
        let d = Density::from_expression("far", e, SupportInterval::real_line(), false, vec![], vec![]).unwrap();
        let t = builtin("normal", &[("mu", 30.0), ("sigma", 2.0)]);
        assert!((d.log_pdf(31.0) - t.log_pdf(31.0)).abs() <= 1e-8);
        assert!((d.quantile(0.975).unwrap() - t.quantile(0.975).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn numeric_quantiles() {
        let g = builtin("gamma", &[("shape", 3.0)]);
        for u in [0.005, 0.3, 0.5, 0.995] {
            let q = g.quantile(u).unwrap();
            assert!((g.cdf(q).unwrap() - u).abs() < 1e-10);
        }
        assert!(g.quantile(1.0).is_err());
    }

    #[test]
    fn sampling_is_seeded() {
        for d in builtins() {
            let a = d.sample(&mut ChaCha8Rng::seed_from_u64(7), 20).unwrap();
            let b = d.sample(&mut ChaCha8Rng::seed_from_u64(7), 20).unwrap();
            assert_eq!(a, b);
            assert!(a.iter().all(|x| d.support().contains_interior(*x)));
        }
    }

    #[test]
    fn log_concavity_checks() {
        builtin("logistic", &[]).check_log_concave(true, 0.999, 401).unwrap();
        builtin("laplace", &[]).check_log_concave(false, 0.99, 101).unwrap();
        assert!(matches!(
            builtin("exponential", &[]).check_log_concave(true, 0.999, 401),
            Err(Error::NotStrictlyLogConcave { .. })
        ));
        assert!(matches!(
            builtin("student_t", &[("nu", 3.0)]).check_log_concave(false, 0.99, 101),
            Err(Error::NotLogConcave { .. })
        ));
    }
}
