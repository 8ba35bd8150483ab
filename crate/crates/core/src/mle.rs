//! Score-equation solvers for location and scale, and numerical checks of
//! the maximum-likelihood characterizations built on them.
//!
//! Location: `μ̂` solves `Σ φ(x_i - μ) = 0`. Scale: the family is
//! `(1/s) p(x/s)` and `ŝ` solves `Σ ψ(x_i / s) = 0`. The inverse-scale
//! convention `σ p(σ x)` has the same equation with `σ = 1/s`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::Density;
use crate::error::{Error, Result};
use crate::numerics::roots::bisect_edge;
use crate::numerics::{brent, Bracket};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreEquationSolution {
    pub estimate: f64,
    /// Score sum at the estimate.
    pub residual: f64,
    pub iterations: usize,
    pub bracket_used: [f64; 2],
    /// Set when the solution set is an interval; the estimate is its
    /// midpoint.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solution_interval: Option<[f64; 2]>,
}

fn check_sample(sample: &[f64]) -> Result<()> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if let Some(x) = sample.iter().find(|x| !x.is_finite()) {
        return Err(Error::NonFinite { x: *x });
    }
    Ok(())
}

/// Moves `lo` down and `hi` up until `h(lo) <= 0 <= h(hi)` for a
/// nondecreasing `h`. Finite limits are approached by halving the gap.
fn expand<H: Fn(f64) -> f64>(
    h: &H,
    mut lo: f64,
    mut hi: f64,
    limits: (f64, f64),
    scale: f64,
) -> Result<(f64, f64)> {
    let (lower, upper) = limits;
    let mut width = scale;
    for _ in 0..300 {
        let v = h(lo);
        if v.is_nan() {
            return Err(Error::NonFinite { x: lo });
        }
        if v <= 0.0 {
            break;
        }
        width *= 2.0;
        lo = if lower.is_finite() { lower + 0.5 * (lo - lower) } else { lo - width };
    }
    width = scale;
    for _ in 0..300 {
        let v = h(hi);
        if v.is_nan() {
            return Err(Error::NonFinite { x: hi });
        }
        if v >= 0.0 {
            break;
        }
        width *= 2.0;
        hi = if upper.is_finite() { upper - 0.5 * (upper - hi) } else { hi + width };
    }
    if h(lo) > 0.0 || h(hi) < 0.0 {
        return Err(Error::NoCrossing(format!(
            "score sum keeps one sign on [{lo}, {hi}]"
        )));
    }
    Ok((lo, hi))
}

fn spread(sample: &[f64]) -> f64 {
    let n = sample.len() as f64;
    let m = sample.iter().sum::<f64>() / n;
    let v = sample.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n;
    v.sqrt()
}

/// Root of `μ ↦ Σ φ(x_i - μ)`. For piecewise-constant scores (Laplace) the
/// solution set can be an interval; its midpoint is returned, so an even
/// sample yields the midpoint of the two middle order statistics.
pub fn solve_location_mle(d: &Density, sample: &[f64]) -> Result<ScoreEquationSolution> {
    check_sample(sample)?;
    d.check_log_concave(false, 0.999, 401)?;
    let grid = d.central_grid(0.999, 401)?;
    let scores: Vec<f64> = grid.iter().map(|&x| d.score_unchecked(x)).collect();
    let crosses = scores.iter().any(|s| *s > 0.0) && scores.iter().any(|s| *s < 0.0);
    if !crosses {
        return Err(Error::NoCrossing(format!("the score of `{}` never changes sign", d.name())));
    }

    let h = |mu: f64| -> f64 {
        let mut acc = crate::numerics::NeumaierSum::default();
        for &x in sample {
            acc.add(d.score_unchecked(x - mu));
        }
        // nondecreasing in μ
        acc.value()
    };
    let (min, max) = sample
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let s = d.support();
    // x_i - μ must stay inside (a, b)
    let limits = (max - s.b, min - s.a);
    let scale = spread(sample).max(d.center_spread().1).max(f64::MIN_POSITIVE);
    let inside = |v: f64| limits.0 < v && v < limits.1;
    let (mut lo, mut hi) = (min - d.center_spread().0, max - d.center_spread().0);
    if !inside(lo) || !inside(hi) {
        let c = match (limits.0.is_finite(), limits.1.is_finite()) {
            (true, true) => 0.5 * (limits.0 + limits.1),
            (true, false) => limits.0 + scale,
            (false, true) => limits.1 - scale,
            (false, false) => 0.5 * (min + max),
        };
        lo = if inside(lo) { lo.min(c) } else { c };
        hi = if inside(hi) { hi.max(c) } else { c };
    }
    let (lo, hi) = expand(&h, lo, hi, limits, scale)?;
    let tol = 1e-13 * scale.max(min.abs()).max(max.abs());

    if d.has_flat_score() && lo < hi {
        let left = bisect_edge(|mu| h(mu) >= 0.0, lo, hi, tol);
        let right = bisect_edge(|mu| h(mu) > 0.0, lo, hi, tol);
        let snap = |v: f64| {
            candidates(sample, d.kinks())
                .into_iter()
                .find(|c| (c - v).abs() <= 4.0 * tol)
                .unwrap_or(v)
        };
        let (left, right) = (snap(left), snap(right));
        let estimate = 0.5 * (left + right);
        return Ok(ScoreEquationSolution {
            estimate,
            residual: h(estimate),
            iterations: 0,
            bracket_used: [lo, hi],
            solution_interval: (right > left).then_some([left, right]),
        });
    }

    if lo == hi {
        return Ok(ScoreEquationSolution {
            estimate: lo,
            residual: h(lo),
            iterations: 0,
            bracket_used: [lo, hi],
            solution_interval: None,
        });
    }
    let r = brent(h, Bracket::from_fn(h, lo, hi)?, tol)?;
    Ok(ScoreEquationSolution {
        estimate: r.root,
        residual: r.residual,
        iterations: r.iterations,
        bracket_used: [lo, hi],
        solution_interval: None,
    })
}

/// Points where a step score sum can jump: `x_i - k` for kinks `k`.
fn candidates(sample: &[f64], kinks: &[f64]) -> Vec<f64> {
    sample.iter().flat_map(|x| kinks.iter().map(move |k| x - k)).collect()
}

/// Root of `s ↦ Σ ψ(x_i / s)` over `s > 0`.
pub fn solve_scale_mle(d: &Density, sample: &[f64]) -> Result<ScoreEquationSolution> {
    check_sample(sample)?;
    let sup = d.support();
    for &x in sample {
        // x/s must lie in (a, b) for every s > 0
        let ok = if x > 0.0 {
            sup.b == f64::INFINITY && (sup.a < 0.0 || sup.a == 0.0)
        } else if x < 0.0 {
            sup.a == f64::NEG_INFINITY && sup.b >= 0.0
        } else {
            sup.contains_interior(0.0)
        };
        if !ok {
            return Err(Error::OutOfSupport { x, a: sup.a, b: sup.b });
        }
    }
    let rms = (sample.iter().map(|x| x * x).sum::<f64>() / sample.len() as f64).sqrt();
    if rms == 0.0 {
        return Err(Error::NoCrossing("all observations are zero".into()));
    }
    let h = |s: f64| -> f64 {
        let mut acc = crate::numerics::NeumaierSum::default();
        for &x in sample {
            acc.add(d.scale_score_unchecked(x / s));
        }
        acc.value()
    };
    let (mut lo, mut hi) = (rms, rms);
    for _ in 0..200 {
        if h(lo) <= 0.0 {
            break;
        }
        lo *= 0.5;
    }
    for _ in 0..200 {
        if h(hi) >= 0.0 {
            break;
        }
        hi *= 2.0;
    }
    let (fl, fh) = (h(lo), h(hi));
    if fl.is_nan() || fh.is_nan() {
        return Err(Error::NonFinite { x: if fl.is_nan() { lo } else { hi } });
    }
    if fl > 0.0 || fh < 0.0 {
        return Err(Error::NoCrossing(format!(
            "scale score sum keeps one sign on [{lo}, {hi}]"
        )));
    }
    if lo == hi {
        return Ok(ScoreEquationSolution {
            estimate: lo,
            residual: fl,
            iterations: 0,
            bracket_used: [lo, hi],
            solution_interval: None,
        });
    }
    let r = brent(h, Bracket::new(lo, hi, fl, fh)?, 1e-15 * hi)?;
    Ok(ScoreEquationSolution {
        estimate: r.root,
        residual: r.residual,
        iterations: r.iterations,
        bracket_used: [lo, hi],
        solution_interval: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MleKind {
    Location,
    Scale,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceEstimator {
    Mean,
    Median,
    Rms,
}

impl ReferenceEstimator {
    pub fn apply(&self, sample: &[f64]) -> f64 {
        let n = sample.len() as f64;
        match self {
            ReferenceEstimator::Mean => sample.iter().sum::<f64>() / n,
            ReferenceEstimator::Rms => (sample.iter().map(|x| x * x).sum::<f64>() / n).sqrt(),
            ReferenceEstimator::Median => {
                let mut v = sample.to_vec();
                v.sort_by(f64::total_cmp);
                let k = v.len();
                if k % 2 == 1 {
                    v[k / 2]
                } else {
                    0.5 * (v[k / 2 - 1] + v[k / 2])
                }
            }
        }
    }
}

impl std::str::FromStr for MleKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "location" => Ok(MleKind::Location),
            "scale" => Ok(MleKind::Scale),
            _ => Err(Error::Config(format!("unknown kind `{s}` (location or scale)"))),
        }
    }
}

impl std::str::FromStr for ReferenceEstimator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(ReferenceEstimator::Mean),
            "median" => Ok(ReferenceEstimator::Median),
            "rms" => Ok(ReferenceEstimator::Rms),
            _ => Err(Error::Config(format!("unknown reference `{s}` (mean, median or rms)"))),
        }
    }
}

pub fn solve(d: &Density, kind: MleKind, sample: &[f64]) -> Result<ScoreEquationSolution> {
    match kind {
        MleKind::Location => solve_location_mle(d, sample),
        MleKind::Scale => solve_scale_mle(d, sample),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharacterizationReport {
    pub density: String,
    pub kind: MleKind,
    pub reference: ReferenceEstimator,
    pub n_trials: usize,
    pub sample_size: usize,
    pub seed: u64,
    pub max_abs_gap: f64,
    /// Trials whose solver failed.
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

pub const MIN_SAMPLE_SIZE: usize = 3;

/// Draws `n_trials` samples (trial `t` seeded with `seed + t`), solves the
/// score equation on each and records the largest gap to the reference
/// estimator. Trials run in parallel; the result matches a sequential run.
pub fn verify_characterization(
    d: &Density,
    kind: MleKind,
    reference: ReferenceEstimator,
    n_trials: usize,
    sample_size: usize,
    seed: u64,
) -> Result<CharacterizationReport> {
    if sample_size < MIN_SAMPLE_SIZE {
        return Err(Error::SampleTooSmall {
            got: sample_size,
            min: MIN_SAMPLE_SIZE,
        });
    }
    if n_trials == 0 {
        return Err(Error::InvalidParameter {
            name: "n_trials".into(),
            value: 0.0,
            reason: "need at least one trial".into(),
        });
    }
    let gaps: Vec<Result<f64>> = (0..n_trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
            let sample = d.sample(&mut rng, sample_size)?;
            let sol = solve(d, kind, &sample)?;
            Ok((sol.estimate - reference.apply(&sample)).abs())
        })
        .collect();
    let mut max_abs_gap = 0.0f64;
    let mut failures = 0;
    let mut first_failure = None;
    for g in gaps {
        match g {
            Ok(v) => max_abs_gap = max_abs_gap.max(v),
            Err(e) => {
                failures += 1;
                if first_failure.is_none() {
                    first_failure = Some(e);
                }
            }
        }
    }
    if failures == n_trials {
        return Err(first_failure.expect("at least one failure"));
    }
    Ok(CharacterizationReport {
        density: d.name().to_string(),
        kind,
        reference,
        n_trials,
        sample_size,
        seed,
        max_abs_gap,
        failures,
        first_failure: first_failure.map(|e| e.to_string()),
    })
}

/// Sample configurations under which "the score root is the mean" forces
/// structure on the score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "witness", rename_all = "snake_case")]
pub enum Witness {
    /// `(a, -a, 0, …, 0)`: mean 0, so `φ(a) + φ(-a) + (n-2)φ(0) = 0`.
    Odd { a: f64 },
    /// `(a, b, -(a+b), 0, …, 0)`: mean 0, so with an odd score
    /// `φ(a) + φ(b) = φ(a + b)`.
    Additive { a: f64, b: f64 },
}

impl Witness {
    pub fn sample(&self, n: usize) -> Vec<f64> {
        let mut v = match *self {
            Witness::Odd { a } => vec![a, -a],
            Witness::Additive { a, b } => vec![a, b, -(a + b)],
        };
        v.resize(n.max(v.len()), 0.0);
        v
    }

    /// The pair fed to [`cauchy_additivity_check`].
    pub fn pair(&self) -> (f64, f64) {
        match *self {
            Witness::Odd { a } => (a, -a),
            Witness::Additive { a, b } => (a, b),
        }
    }

    /// `|Σ φ(x_i - x̄)|` on the witness sample.
    pub fn score_sum_at_mean(&self, d: &Density, n: usize) -> Result<f64> {
        let s = self.sample(n);
        let m = ReferenceEstimator::Mean.apply(&s);
        let mut total = 0.0;
        for x in s {
            total += d.location_score(x - m)?.phi;
        }
        Ok(total.abs())
    }
}

/// Witnesses for every ordered pair of `values`.
pub fn additive_witnesses(values: &[f64]) -> Vec<Witness> {
    values
        .iter()
        .flat_map(|&a| values.iter().map(move |&b| Witness::Additive { a, b }))
        .collect()
}

/// `(0, 0, 3)`: its mean is 1 and its median 0, so only a density whose
/// location MLE is the mean returns 1.
pub const NEGATIVE_CONTROL_SAMPLE: [f64; 3] = [0.0, 0.0, 3.0];

/// `max |score(a + b) - score(a) - score(b)|` over `pairs`.
pub fn cauchy_additivity_check<F>(score: F, pairs: &[(f64, f64)]) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut worst = 0.0f64;
    for &(a, b) in pairs {
        worst = worst.max((score(a + b)? - score(a)? - score(b)?).abs());
    }
    Ok(worst)
}

/// [`cauchy_additivity_check`] on a density's location score.
pub fn density_additivity_check(d: &Density, pairs: &[(f64, f64)]) -> Result<f64> {
    cauchy_additivity_check(|x| d.location_score(x).map(|s| s.phi), pairs)
}

/// All pairs from `values × values`.
pub fn grid_pairs(values: &[f64]) -> Vec<(f64, f64)> {
    values
        .iter()
        .flat_map(|&a| values.iter().map(move |&b| (a, b)))
        .collect()
}

/// How much of the real line the score of `p` covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreRange {
    /// Unbounded in both directions.
    FullRange,
    /// Changes sign but is bounded on at least one side.
    CrossesZeroOnly,
    NoCrossing,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerFit {
    pub c: f64,
    pub max_residual: f64,
    pub strictly_monotone: bool,
    pub range: ScoreRange,
}

const RANGE_THRESHOLD: f64 = 1e6;

fn score_range(p: &Density) -> ScoreRange {
    let s = p.support();
    let (c, w) = p.center_spread();
    let probe = |dir: f64| -> f64 {
        let mut extreme = 0.0f64;
        for k in 0..=60 {
            let x = c + dir * w * 2f64.powi(k);
            if !s.contains_interior(x) {
                break;
            }
            let v = p.score_unchecked(x);
            if v.is_finite() && v.abs() > extreme.abs() {
                extreme = v;
            }
        }
        // approach a finite end as well
        let end = if dir > 0.0 { s.b } else { s.a };
        if end.is_finite() {
            for k in 1..=30 {
                let x = end - dir * w * 2f64.powi(-k);
                let v = p.score_unchecked(x);
                if v.is_finite() && v.abs() > extreme.abs() {
                    extreme = v;
                }
            }
        }
        extreme
    };
    let (left, right) = (probe(-1.0), probe(1.0));
    if left >= RANGE_THRESHOLD && right <= -RANGE_THRESHOLD {
        ScoreRange::FullRange
    } else if left > 0.0 && right < 0.0 {
        ScoreRange::CrossesZeroOnly
    } else {
        ScoreRange::NoCrossing
    }
}

/// Least-squares `c` in `φ_g ≈ c·φ_p` (through the origin) on a 101-point
/// grid over the central 99% of `p`. Requires `φ_p` nonincreasing on the
/// grid; strictness and the range of `φ_p` are reported.
pub fn fit_power_relation(g: &Density, p: &Density) -> Result<PowerFit> {
    let grid = p.central_grid(0.99, 101)?;
    let mut fp = Vec::with_capacity(grid.len());
    let mut fg = Vec::with_capacity(grid.len());
    for &x in &grid {
        fp.push(p.location_score(x)?.phi);
        fg.push(g.location_score(x)?.phi);
    }
    let mut strictly = true;
    for w in fp.windows(2) {
        if w[1] > w[0] {
            return Err(Error::NotMonotone { name: p.name().into() });
        }
        if w[1] == w[0] {
            strictly = false;
        }
    }
    let sxy: f64 = fp.iter().zip(&fg).map(|(a, b)| a * b).sum();
    let sxx: f64 = fp.iter().map(|a| a * a).sum();
    if sxx == 0.0 {
        return Err(Error::NotMonotone { name: p.name().into() });
    }
    let c = sxy / sxx;
    let max_residual = fp
        .iter()
        .zip(&fg)
        .fold(0.0f64, |r, (a, b)| r.max((b - c * a).abs()));
    Ok(PowerFit {
        c,
        max_residual,
        strictly_monotone: strictly,
        range: score_range(p),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::make_builtin;
    use std::collections::BTreeMap;

    fn builtin(name: &str) -> Density {
        make_builtin(name, &BTreeMap::new()).unwrap()
    }

    #[test]
    fn normal_location_root_is_mean() {
        let s = solve_location_mle(&builtin("normal"), &[1.0, 2.0, 6.0]).unwrap();
        assert!((s.estimate - 3.0).abs() < 1e-12);
        assert!(s.residual.abs() < 1e-12);
    }

    #[test]
    fn laplace_location_root_is_median() {
        let l = builtin("laplace");
        let s = solve_location_mle(&l, &[0.0, 1.0, 10.0]).unwrap();
        assert_eq!(s.estimate, 1.0);
        assert_eq!(s.solution_interval, None);
        let s = solve_location_mle(&l, &[4.0, 0.0, 1.0, 10.0]).unwrap();
        assert_eq!(s.estimate, 2.5);
        assert_eq!(s.solution_interval, Some([1.0, 4.0]));
    }

    #[test]
    fn exponential_location_has_no_crossing() {
        assert!(matches!(
            solve_location_mle(&builtin("exponential"), &[1.0, 2.0]),
            Err(Error::NoCrossing(_))
        ));
    }

    #[test]
    fn non_log_concave_rejected() {
        let t = make_builtin("student_t", &[("nu".to_string(), 3.0)].into_iter().collect()).unwrap();
        assert!(matches!(
            solve_location_mle(&t, &[1.0, 2.0]),
            Err(Error::NotLogConcave { .. })
        ));
        assert!(matches!(solve_location_mle(&builtin("normal"), &[]), Err(Error::EmptySample)));
    }

    #[test]
    fn gamma_location_respects_support() {
        let g = make_builtin("gamma", &[("shape".to_string(), 3.0)].into_iter().collect()).unwrap();
        let sample = [2.0, 3.5, 7.0];
        let s = solve_location_mle(&g, &sample).unwrap();
        assert!(s.estimate < 2.0);
        assert!(s.residual.abs() < 1e-9);
    }

    #[test]
    fn scale_roots() {
        let e = solve_scale_mle(&builtin("exponential"), &[1.0, 2.0, 6.0]).unwrap();
        assert!((e.estimate - 3.0).abs() < 1e-12);
        let n = solve_scale_mle(&builtin("normal"), &[3.0, 4.0]).unwrap();
        assert!((n.estimate - 12.5f64.sqrt()).abs() < 1e-12);
        assert!(matches!(
            solve_scale_mle(&builtin("exponential"), &[1.0, -2.0]),
            Err(Error::OutOfSupport { .. })
        ));
        assert!(matches!(
            solve_scale_mle(&builtin("normal"), &[0.0, 0.0]),
            Err(Error::NoCrossing(_))
        ));
    }

    #[test]
    fn characterizations() {
        let r = verify_characterization(&builtin("normal"), MleKind::Location, ReferenceEstimator::Mean, 100, 5, 42)
            .unwrap();
        assert!(r.max_abs_gap <= 1e-9 && r.failures == 0);
        let r = verify_characterization(&builtin("exponential"), MleKind::Scale, ReferenceEstimator::Mean, 100, 5, 42)
            .unwrap();
        assert!(r.max_abs_gap <= 1e-9);
        let r = verify_characterization(&builtin("normal"), MleKind::Scale, ReferenceEstimator::Rms, 100, 5, 42)
            .unwrap();
        assert!(r.max_abs_gap <= 1e-9);
        let r = verify_characterization(&builtin("laplace"), MleKind::Location, ReferenceEstimator::Median, 50, 6, 1)
            .unwrap();
        assert!(r.max_abs_gap <= 1e-9);
        let r = verify_characterization(&builtin("logistic"), MleKind::Location, ReferenceEstimator::Mean, 100, 5, 42)
            .unwrap();
        assert!(r.max_abs_gap > 0.01);
        assert!(matches!(
            verify_characterization(&builtin("normal"), MleKind::Location, ReferenceEstimator::Mean, 3, 2, 0),
            Err(Error::SampleTooSmall { got: 2, min: 3 })
        ));
    }

    #[test]
    fn negative_control_witness() {
        for name in ["logistic", "laplace"] {
            let s = solve_location_mle(&builtin(name), &NEGATIVE_CONTROL_SAMPLE).unwrap();
            assert!((s.estimate - 1.0).abs() > 0.01, "{name}");
        }
    }

    #[test]
    fn additivity() {
        let pairs = grid_pairs(&[-2.0, -1.0, 1.0, 2.0]);
        assert_eq!(cauchy_additivity_check(|x| Ok(-3.0 * x), &pairs).unwrap(), 0.0);
        assert!(density_additivity_check(&builtin("normal"), &pairs).unwrap() <= 1e-9);
        assert_eq!(density_additivity_check(&builtin("laplace"), &[(1.0, 1.0)]).unwrap(), 1.0);
        assert!(matches!(
            density_additivity_check(&builtin("laplace"), &[(1.0, -1.0)]),
            Err(Error::NonDifferentiablePoint { .. })
        ));
    }

    #[test]
    fn witnesses() {
        let n = builtin("normal");
        for w in additive_witnesses(&[-1.5, 0.5, 2.0]) {
            assert!(w.score_sum_at_mean(&n, 5).unwrap() < 1e-12);
        }
        assert_eq!(Witness::Odd { a: 2.0 }.sample(4), vec![2.0, -2.0, 0.0, 0.0]);
        let l = builtin("logistic");
        assert!(Witness::Additive { a: 1.0, b: 2.0 }.score_sum_at_mean(&l, 3).unwrap() > 0.01);
    }

    #[test]
    fn power_relation() {
        let n = builtin("normal");
        let f = fit_power_relation(&n.power(4.0).unwrap(), &n).unwrap();
        assert!((f.c - 4.0).abs() < 1e-9 && f.max_residual <= 1e-7);
        assert_eq!(f.range, ScoreRange::FullRange);
        let same = fit_power_relation(&n, &n).unwrap();
        assert_eq!((same.c, same.max_residual), (1.0, 0.0));
        let l = fit_power_relation(&builtin("logistic"), &n).unwrap();
        assert!(l.max_residual > 0.1);
        let lap = builtin("laplace");
        let f = fit_power_relation(&lap.power(2.0).unwrap(), &lap).unwrap();
        assert!((f.c - 2.0).abs() < 1e-9);
        assert!(!f.strictly_monotone);
        assert_eq!(f.range, ScoreRange::CrossesZeroOnly);
        let t = make_builtin("student_t", &[("nu".to_string(), 3.0)].into_iter().collect()).unwrap();
        assert!(matches!(fit_power_relation(&n, &t), Err(Error::NotMonotone { .. })));
    }
}
