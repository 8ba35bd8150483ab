//! Skew-symmetric models `(2/σ)·q(z)·F(δ·w(z))`, `z = (x - μ)/σ`, and the
//! Fisher information of `(μ, σ, δ)` at `δ = 0`.
//!
//! `q` is a symmetric base density, `F` a symmetric cdf and `w` the skewing
//! argument. For odd `w` the model integrates to one for every `δ`. For even
//! `w` it does not, and the model is divided by the numerically computed
//! `C(δ) = ∫ 2 q(z) F(δ w(z)) dz`.
//!
//! At `δ = 0` the scores are
//!
//! ```text
//! s_μ(x) = -φ_q(z)/σ
//! s_σ(x) = -ψ_q(z)/σ
//! s_δ(x) = 2F'(0)·(w(z) - E_q[w])
//! ```
//!
//! and the information matrix is singular exactly when `s_δ` is a.e.
//! collinear with `s_μ` (odd `w`) or with `s_σ` and the constants (even
//! `w`).

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, StudentsT};

use crate::density::builtin::{normal_cdf, normal_pdf};
use crate::density::{Density, DensitySpec};
use crate::error::{Error, Result};
use crate::numerics::{central_diff_step, eig_sym3, DiffOrder, Matrix3, QuadratureSpec};

/// Symmetric cdf used as the skewing function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum SkewingCdf {
    Normal,
    Logistic,
    Student { nu: f64 },
}

impl SkewingCdf {
    pub fn student(nu: f64) -> Result<SkewingCdf> {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::InvalidParameter {
                name: "nu".into(),
                value: nu,
                reason: "degrees of freedom must be > 0".into(),
            });
        }
        Ok(SkewingCdf::Student { nu })
    }

    pub fn cdf(&self, t: f64) -> f64 {
        match *self {
            SkewingCdf::Normal => normal_cdf(t),
            SkewingCdf::Logistic => 1.0 / (1.0 + (-t).exp()),
            SkewingCdf::Student { nu } => {
                // evaluate in the left tail and reflect so F(t) + F(-t) = 1
                let left = student(nu).cdf(-t.abs());
                if t > 0.0 {
                    1.0 - left
                } else {
                    left
                }
            }
        }
    }

    pub fn pdf(&self, t: f64) -> f64 {
        match *self {
            SkewingCdf::Normal => normal_pdf(t),
            SkewingCdf::Logistic => {
                let e = (-t.abs()).exp();
                e / ((1.0 + e) * (1.0 + e))
            }
            SkewingCdf::Student { nu } => student(nu).pdf(t),
        }
    }

    /// Largest `|F(t) + F(-t) - 1|` on a grid.
    pub fn symmetry_defect(&self) -> f64 {
        (0..=400)
            .map(|i| {
                let t = 0.05 * i as f64;
                (self.cdf(t) + self.cdf(-t) - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

fn student(nu: f64) -> StudentsT {
    StudentsT::new(0.0, 1.0, nu).expect("validated degrees of freedom")
}

impl fmt::Display for SkewingCdf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SkewingCdf::Normal => f.write_str("normal"),
            SkewingCdf::Logistic => f.write_str("logistic"),
            SkewingCdf::Student { nu } => write!(f, "student({nu})"),
        }
    }
}

impl FromStr for SkewingCdf {
    type Err = Error;

    /// `normal`, `logistic` or `student(ν)`.
    fn from_str(s: &str) -> Result<SkewingCdf> {
        let s = s.trim();
        match s {
            "normal" | "gaussian" => return Ok(SkewingCdf::Normal),
            "logistic" => return Ok(SkewingCdf::Logistic),
            _ => {}
        }
        let inner = s
            .strip_prefix("student(")
            .or_else(|| s.strip_prefix("t("))
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Config(format!("unknown skewing cdf `{s}`")))?;
        let nu: f64 = inner
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("bad degrees of freedom in `{s}`")))?;
        SkewingCdf::student(nu)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Odd,
    Even,
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The skewing argument `w`.
#[derive(Clone)]
pub enum SkewingArgument {
    Identity,
    /// `w = φ_p` for a symmetric `p`.
    LocationScore(Density),
    /// `w = ψ_p` for a symmetric `p`.
    ScaleScore(Density),
    /// `w(z) = z·√((ν+1)/(ν+z²))`.
    SkewT { nu: f64 },
    Custom { label: String, w: RealFn, parity: Parity },
}

impl fmt::Debug for SkewingArgument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl SkewingArgument {
    pub fn custom<W>(label: &str, parity: Parity, w: W) -> SkewingArgument
    where
        W: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        SkewingArgument::Custom {
            label: label.into(),
            w: Arc::new(w),
            parity,
        }
    }

    pub fn label(&self) -> String {
        match self {
            SkewingArgument::Identity => "identity".into(),
            SkewingArgument::LocationScore(d) => format!("location_score({})", d.name()),
            SkewingArgument::ScaleScore(d) => format!("scale_score({})", d.name()),
            SkewingArgument::SkewT { nu } => format!("skew_t({nu})"),
            SkewingArgument::Custom { label, .. } => label.clone(),
        }
    }

    pub fn eval(&self, z: f64) -> f64 {
        match self {
            SkewingArgument::Identity => z,
            SkewingArgument::LocationScore(d) => d.score_unchecked(z),
            SkewingArgument::ScaleScore(d) => d.scale_score_unchecked(z),
            SkewingArgument::SkewT { nu } => z * ((nu + 1.0) / (nu + z * z)).sqrt(),
            SkewingArgument::Custom { w, .. } => w(z),
        }
    }

    pub fn parity(&self) -> Parity {
        match self {
            SkewingArgument::ScaleScore(_) => Parity::Even,
            SkewingArgument::Custom { parity, .. } => *parity,
            _ => Parity::Odd,
        }
    }

    /// Checks the declared parity on a grid avoiding the origin.
    pub fn verify(&self) -> Result<()> {
        match self {
            SkewingArgument::LocationScore(d) | SkewingArgument::ScaleScore(d) if !d.is_symmetric() => {
                return Err(Error::DensityNotSymmetric { name: d.name().into() })
            }
            SkewingArgument::SkewT { nu } if !(*nu > 0.0) => {
                return Err(Error::InvalidParameter {
                    name: "nu".into(),
                    value: *nu,
                    reason: "must be > 0".into(),
                })
            }
            _ => {}
        }
        let sign = match self.parity() {
            Parity::Odd => -1.0,
            Parity::Even => 1.0,
        };
        for i in 1..=200 {
            let z = 0.05 * i as f64 + 0.0123;
            let (a, b) = (self.eval(z), self.eval(-z));
            if !((a - sign * b).abs() <= 1e-9 * a.abs().max(1.0)) {
                return Err(Error::ParityViolation(format!(
                    "argument `{}` is not {:?} at z = {z}",
                    self.label(),
                    self.parity()
                )));
            }
        }
        Ok(())
    }
}

/// `(2/σ) q((x-μ)/σ) F(δ w((x-μ)/σ)) / C(δ)`.
#[derive(Debug, Clone)]
pub struct SkewSymmetricModel {
    base: Density,
    cdf: SkewingCdf,
    arg: SkewingArgument,
    mu: f64,
    sigma: f64,
    delta: f64,
    norm: f64,
}

impl SkewSymmetricModel {
    pub fn new(base: Density, cdf: SkewingCdf, arg: SkewingArgument, mu: f64, sigma: f64, delta: f64) -> Result<Self> {
        if !base.is_symmetric() {
            return Err(Error::DensityNotSymmetric { name: base.name().into() });
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidParameter {
                name: "sigma".into(),
                value: sigma,
                reason: "must be > 0".into(),
            });
        }
        for (name, v) in [("mu", mu), ("delta", delta)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name: name.into(),
                    value: v,
                    reason: "must be finite".into(),
                });
            }
        }
        let defect = cdf.symmetry_defect();
        if defect > 1e-12 {
            return Err(Error::ParityViolation(format!("skewing cdf {cdf} is not symmetric ({defect:e})")));
        }
        arg.verify()?;
        let mut m = SkewSymmetricModel {
            base,
            cdf,
            arg,
            mu,
            sigma,
            delta,
            norm: 1.0,
        };
        if m.arg.parity() == Parity::Even && delta != 0.0 {
            let c = m
                .base
                .expect(|z| 2.0 * m.cdf.cdf(delta * m.arg.eval(z)), &QuadratureSpec::tight())
                .map_err(|e| Error::NormalizationFailure(format!("C({delta}): {e}")))?;
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::NormalizationFailure(format!("C({delta}) = {c}")));
            }
            m.norm = c;
        }
        Ok(m)
    }

    /// Skew-normal: base and `F` normal, identity argument.
    pub fn skew_normal(mu: f64, sigma: f64, delta: f64) -> Result<Self> {
        SkewSymmetricModel::new(
            Density::standard_normal(),
            SkewingCdf::Normal,
            SkewingArgument::Identity,
            mu,
            sigma,
            delta,
        )
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        SkewSymmetricModel::new(
            self.base.clone(),
            self.cdf,
            self.arg.clone(),
            self.mu,
            self.sigma,
            delta,
        )
    }

    pub fn with_location_scale(&self, mu: f64, sigma: f64) -> Result<Self> {
        SkewSymmetricModel::new(self.base.clone(), self.cdf, self.arg.clone(), mu, sigma, self.delta)
    }

    pub fn base(&self) -> &Density {
        &self.base
    }

    pub fn skewing_cdf(&self) -> SkewingCdf {
        self.cdf
    }

    pub fn argument(&self) -> &SkewingArgument {
        &self.arg
    }

    pub fn params(&self) -> (f64, f64, f64) {
        (self.mu, self.sigma, self.delta)
    }

    /// `C(δ)`; 1 for odd arguments.
    pub fn normalizer(&self) -> f64 {
        self.norm
    }

    pub fn log_density(&self, x: f64) -> f64 {
        let z = (x - self.mu) / self.sigma;
        (2.0 / self.sigma).ln() + self.base.log_pdf(z) + self.cdf.cdf(self.delta * self.arg.eval(z)).ln()
            - self.norm.ln()
    }

    pub fn density(&self, x: f64) -> f64 {
        let z = (x - self.mu) / self.sigma;
        let q = self.base.pdf(z);
        if q == 0.0 {
            return 0.0;
        }
        2.0 / self.sigma * q * self.cdf.cdf(self.delta * self.arg.eval(z)) / self.norm
    }

    /// `∫ f` over the real line, via the base's partition.
    pub fn total_mass(&self, spec: &QuadratureSpec) -> Result<f64> {
        self.base
            .expect(|z| 2.0 * self.cdf.cdf(self.delta * self.arg.eval(z)) / self.norm, spec)
    }
}

/// `skew_density(m, x)`.
pub fn skew_density(m: &SkewSymmetricModel, x: f64) -> f64 {
    m.density(x)
}

/// Analytic scores in `(μ, σ, δ)` at `δ = 0`.
#[derive(Debug, Clone)]
pub struct SymmetryScores {
    base: Density,
    arg: SkewingArgument,
    mu: f64,
    sigma: f64,
    fprime0: f64,
    w_mean: f64,
}

impl SymmetryScores {
    fn z(&self, x: f64) -> f64 {
        (x - self.mu) / self.sigma
    }

    pub fn s_mu(&self, x: f64) -> f64 {
        -self.base.score_unchecked(self.z(x)) / self.sigma
    }

    pub fn s_sigma(&self, x: f64) -> f64 {
        -self.base.scale_score_unchecked(self.z(x)) / self.sigma
    }

    pub fn s_delta(&self, x: f64) -> f64 {
        2.0 * self.fprime0 * (self.arg.eval(self.z(x)) - self.w_mean)
    }

    /// All three scores; fails on a registered non-differentiability point
    /// of the base.
    pub fn at(&self, x: f64) -> Result<[f64; 3]> {
        let z = self.z(x);
        if self.base.kinks().contains(&z) {
            return Err(Error::NonDifferentiablePoint { x });
        }
        Ok([self.s_mu(x), self.s_sigma(x), self.s_delta(x)])
    }

    fn in_z(&self, z: f64) -> [f64; 3] {
        let x = self.mu + self.sigma * z;
        [self.s_mu(x), self.s_sigma(x), self.s_delta(x)]
    }

    /// `E_q[w]`, the centering of the skewness score (0 for odd `w`).
    pub fn argument_mean(&self) -> f64 {
        self.w_mean
    }
}

pub fn scores_at_symmetry(m: &SkewSymmetricModel) -> Result<SymmetryScores> {
    if m.delta != 0.0 {
        return Err(Error::InvalidParameter {
            name: "delta".into(),
            value: m.delta,
            reason: "scores are taken at delta = 0".into(),
        });
    }
    let w_mean = match m.arg.parity() {
        Parity::Odd => 0.0,
        Parity::Even => m.base.expect(|z| m.arg.eval(z), &QuadratureSpec::tight())?,
    };
    Ok(SymmetryScores {
        base: m.base.clone(),
        arg: m.arg.clone(),
        mu: m.mu,
        sigma: m.sigma,
        fprime0: m.cdf.pdf(0.0),
        w_mean,
    })
}

/// Largest gap between the analytic scores and central differences of the
/// normalized log-density in each parameter, over 21 points spanning the
/// central 98% of the base.
pub fn finite_difference_check(m: &SkewSymmetricModel) -> Result<f64> {
    let scores = scores_at_symmetry(m)?;
    let h = 1e-5;
    // the δ difference uses a wider 4-point stencil: some skewing cdfs are
    // only accurate to ~1e-13 near the origin
    let hd = 1e-3;
    let shifted: Vec<SkewSymmetricModel> = [-2.0, -1.0, 1.0, 2.0]
        .iter()
        .map(|k| m.with_delta(k * hd))
        .collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for z in m.base.central_grid(0.98, 21)? {
        let x = m.mu + m.sigma * z;
        let s = scores.at(x)?;
        let d_mu = central_diff_step(
            |mu| m.with_location_scale(mu, m.sigma).map(|v| v.log_density(x)).unwrap_or(f64::NAN),
            m.mu,
            DiffOrder::First,
            h * m.sigma,
        )?;
        let d_sigma = central_diff_step(
            |sg| m.with_location_scale(m.mu, sg).map(|v| v.log_density(x)).unwrap_or(f64::NAN),
            m.sigma,
            DiffOrder::First,
            h * m.sigma,
        )?;
        let l: Vec<f64> = shifted.iter().map(|v| v.log_density(x)).collect();
        let d_delta = (8.0 * (l[2] - l[1]) - (l[3] - l[0])) / (12.0 * hd);
        for (a, b) in s.iter().zip([d_mu, d_sigma, d_delta]) {
            worst = worst.max((a - b).abs() / a.abs().max(1.0));
        }
    }
    Ok(worst)
}

/// `base score ≈ c1·w + c2` fitted over the central 99% of the base.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Collinearity {
    pub c1: f64,
    pub c2: f64,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FisherInfoResult {
    /// Parameter order `(μ, σ, δ)`.
    pub matrix: Matrix3,
    pub eigenvalues: [f64; 3],
    pub min_rel_eigenvalue: f64,
    pub rank_at_tol: usize,
    pub tol: f64,
    pub collinearity: Option<Collinearity>,
}

pub const DEFAULT_RANK_TOL: f64 = 1e-6;

pub fn fisher_info_at_symmetry(m: &SkewSymmetricModel) -> Result<FisherInfoResult> {
    fisher_info_with_tol(m, DEFAULT_RANK_TOL, &QuadratureSpec::tight())
}

/// `I_ij = ∫ s_i s_j f_0`. The six distinct entries are integrated in
/// parallel. `tol` is relative to the largest eigenvalue.
pub fn fisher_info_with_tol(m: &SkewSymmetricModel, tol: f64, spec: &QuadratureSpec) -> Result<FisherInfoResult> {
    let scores = scores_at_symmetry(m)?;
    let pairs = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
    let entries: Vec<Result<f64>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            m.base.expect(
                |z| {
                    let s = scores.in_z(z);
                    s[i] * s[j]
                },
                spec,
            )
        })
        .collect();
    let mut matrix = [[0.0; 3]; 3];
    for (&(i, j), v) in pairs.iter().zip(entries) {
        let v = v?;
        matrix[i][j] = v;
        matrix[j][i] = v;
    }
    let eig = eig_sym3(&matrix)?;
    let lmax = eig.values[2];
    if !(lmax > f64::MIN_POSITIVE) {
        return Err(Error::DegenerateBase(lmax));
    }
    let rank_at_tol = eig.values.iter().filter(|v| **v > tol * lmax).count();
    let collinearity = if rank_at_tol < 3 {
        Some(fit_collinearity(m)?)
    } else {
        None
    };
    Ok(FisherInfoResult {
        matrix,
        eigenvalues: eig.values,
        min_rel_eigenvalue: eig.values[0] / lmax,
        rank_at_tol,
        tol,
        collinearity,
    })
}

/// Weighted least squares of the base score (`φ_q` for odd `w`, `ψ_q` for
/// even `w`) on `{w, 1}`, weights `q` on a grid over the central 99%.
pub fn fit_collinearity(m: &SkewSymmetricModel) -> Result<Collinearity> {
    let q = &m.base;
    let grid = q.central_grid(0.99, 2001)?;
    let pts: Vec<(f64, f64, f64)> = grid
        .iter()
        .map(|&z| {
            let y = match m.arg.parity() {
                Parity::Odd => q.score_unchecked(z),
                Parity::Even => q.scale_score_unchecked(z),
            };
            (q.pdf(z), m.arg.eval(z), y)
        })
        .collect();
    let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(w, x, y) in &pts {
        sw += w;
        sx += w * x;
        sy += w * y;
        sxx += w * x * x;
        sxy += w * x * y;
    }
    let det = sw * sxx - sx * sx;
    if !(det.abs() > 1e-300) {
        return Err(Error::DegenerateBase(det));
    }
    let c1 = (sw * sxy - sx * sy) / det;
    let c2 = (sxx * sy - sx * sxy) / det;
    let max_residual = pts.iter().fold(0.0f64, |r, &(_, x, y)| r.max((y - c1 * x - c2).abs()));
    Ok(Collinearity { c1, c2, max_residual })
}

/// `q ∝ |x|^(c1+c2-1) p^c1`, whose scale score is `c1 ψ_p + c2`.
pub fn construct_singular_scale_pair(p: &Density, c1: f64, c2: f64) -> Result<Density> {
    p.scale_pair(c1, c2)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularityReport {
    pub singular: bool,
    pub detail: FisherInfoResult,
}

pub fn singularity_report(m: &SkewSymmetricModel, tol: f64) -> Result<SingularityReport> {
    let detail = fisher_info_with_tol(m, tol, &QuadratureSpec::tight())?;
    Ok(SingularityReport {
        singular: detail.rank_at_tol < 3,
        detail,
    })
}

/// TOML model description.
///
/// ```toml
/// base = "normal"
/// cdf = "student(6)"
/// mu = 0.0
/// sigma = 1.0
/// delta = 0.0
///
/// [argument]
/// kind = "skew_t"       # identity | location_score | scale_score | skew_t
/// nu = 5.0
/// # density = "laplace" # for the score kinds; defaults to the base
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub base: DensitySpec,
    #[serde(default = "default_cdf")]
    pub cdf: String,
    #[serde(default)]
    pub argument: ArgumentSpec,
    #[serde(default)]
    pub mu: f64,
    #[serde(default = "one")]
    pub sigma: f64,
    #[serde(default)]
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArgumentSpec {
    #[serde(default = "default_kind")]
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<DensitySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
}

fn default_cdf() -> String {
    "normal".into()
}

fn default_kind() -> String {
    "identity".into()
}

fn one() -> f64 {
    1.0
}

impl Default for ArgumentSpec {
    fn default() -> Self {
        ArgumentSpec::new("identity", None, None)
    }
}

impl ArgumentSpec {
    pub fn new(kind: &str, density: Option<DensitySpec>, nu: Option<f64>) -> ArgumentSpec {
        ArgumentSpec {
            kind: kind.into(),
            density,
            nu,
        }
    }
}

impl ModelSpec {
    pub fn from_toml(src: &str) -> Result<ModelSpec> {
        toml::from_str(src).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<ModelSpec> {
        let src = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        ModelSpec::from_toml(&src)
    }

    /// Named presets: `skew-normal`, `skew-t` (ν = 5, `F = T₆`).
    pub fn preset(name: &str) -> Option<ModelSpec> {
        match name {
            "skew-normal" | "skew_normal" => Some(ModelSpec {
                base: DensitySpec::builtin("normal"),
                cdf: "normal".into(),
                argument: ArgumentSpec::new("identity", None, None),
                mu: 0.0,
                sigma: 1.0,
                delta: 0.0,
            }),
            "skew-t" | "skew_t" => Some(ModelSpec {
                base: DensitySpec::builtin("normal"),
                cdf: "student(6)".into(),
                argument: ArgumentSpec::new("skew_t", None, Some(5.0)),
                mu: 0.0,
                sigma: 1.0,
                delta: 0.0,
            }),
            _ => None,
        }
    }

    pub fn build(&self) -> Result<SkewSymmetricModel> {
        self.build_in(std::path::Path::new("."))
    }

    pub fn build_in(&self, dir: &std::path::Path) -> Result<SkewSymmetricModel> {
        let base = self.base.build_in(dir)?;
        let cdf: SkewingCdf = self.cdf.parse()?;
        let arg_density = || -> Result<Density> {
            match &self.argument.density {
                Some(s) => s.build_in(dir),
                None => Ok(base.clone()),
            }
        };
        let arg = match self.argument.kind.replace('-', "_").as_str() {
            "identity" => SkewingArgument::Identity,
            "location_score" => SkewingArgument::LocationScore(arg_density()?),
            "scale_score" => SkewingArgument::ScaleScore(arg_density()?),
            "skew_t" => SkewingArgument::SkewT {
                nu: self
                    .argument
                    .nu
                    .ok_or_else(|| Error::Config("argument kind skew_t needs `nu`".into()))?,
            },
            other => return Err(Error::Config(format!("unknown argument kind `{other}`"))),
        };
        SkewSymmetricModel::new(base, cdf, arg, self.mu, self.sigma, self.delta)
    }
}
