//! Command-line front end.
//!
//! Every subcommand reads its inputs from flags and, optionally, a TOML
//! config file (`--config`); flags win over the file. `run --config FILE`
//! takes the command name from the file. Output is JSON with a fixed key
//! order, or a flattened CSV. Exit codes: 0 success, 1 invalid input or a
//! failed precondition, 2 numerical failure.

pub mod repro;

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::density::{Density, DensitySpec};
use crate::error::{Error, Result};
use crate::mle::{self, MleKind, ReferenceEstimator};
use crate::numerics::QuadratureSpec;
use crate::skewsym::{self, ModelSpec, SkewSymmetricModel, SkewingArgument, SkewingCdf};
use crate::stein::{self, SteinOperatorKind, TestFunction};
use crate::varbounds::{self, SmoothFunction};

/// Model given as a preset name, a path, or an inline table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelRef {
    Name(String),
    Spec(Box<ModelSpec>),
}

impl ModelRef {
    fn build(&self, dir: &Path) -> Result<SkewSymmetricModel> {
        match self {
            ModelRef::Spec(s) => s.build_in(dir),
            ModelRef::Name(n) => {
                let path = dir.join(n);
                if path.is_file() {
                    let parent = path.parent().map(Path::to_path_buf).unwrap_or_default();
                    ModelSpec::load(&path)?.build_in(&parent)
                } else if let Some(p) = ModelSpec::preset(n) {
                    p.build_in(dir)
                } else {
                    Err(Error::Config(format!("model `{n}` is neither a file nor a preset")))
                }
            }
        }
    }
}

/// Every input any command accepts. All fields are optional so that a
/// config file and command-line flags can be layered.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<DensitySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<DensitySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_from: Option<DensitySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functions: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cdf: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_subdivisions: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
}

macro_rules! layer {
    ($base:expr, $over:expr, $($f:ident),*) => {
        RunConfig { $($f: $over.$f.or($base.$f)),* }
    };
}

impl RunConfig {
    pub fn from_toml(src: &str) -> Result<RunConfig> {
        toml::from_str(src).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let src = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        RunConfig::from_toml(&src)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Fields set in `over` replace those in `self`.
    pub fn layered(self, over: RunConfig) -> RunConfig {
        layer!(
            self, over, command, density, base, model, sample, data, sample_from, n, seed, at, grid, operator,
            functions, g, kind, reference, trials, sample_size, rank_tol, c1, c2, cdf, values, pairs, abs_tol,
            rel_tol, max_subdivisions, output, format
        )
    }

    pub fn quadrature(&self) -> Result<QuadratureSpec> {
        let d = QuadratureSpec::tight();
        QuadratureSpec::new(
            self.abs_tol.unwrap_or(d.abs_tol),
            self.rel_tol.unwrap_or(d.rel_tol),
            self.max_subdivisions.unwrap_or(d.max_subdivisions),
        )
    }

    pub fn format(&self) -> Result<OutputFormat> {
        match self.format.as_deref().unwrap_or("json") {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::Config(format!("unknown format `{other}` (json or csv)"))),
        }
    }

    fn need<'a, T>(v: &'a Option<T>, key: &str) -> Result<&'a T> {
        v.as_ref().ok_or_else(|| Error::Config(format!("missing `{key}`")))
    }

    fn density(&self, dir: &Path) -> Result<Density> {
        Self::need(&self.density, "density")?.build_in(dir)
    }

    fn load_sample(&self, dir: &Path) -> Result<Vec<f64>> {
        if let Some(d) = &self.data {
            return Ok(d.clone());
        }
        if let Some(p) = &self.sample {
            return stein::read_sample_csv(&dir.join(p));
        }
        if let Some(spec) = &self.sample_from {
            let d = spec.build_in(dir)?;
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed.unwrap_or(0));
            return d.sample(&mut rng, *Self::need(&self.n, "n")?);
        }
        Err(Error::Config("no sample: give `sample`, `data` or `sample_from`".into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Command name, then the module operations it reaches.
pub const COMMAND_TABLE: &[(&str, &[&str])] = &[
    ("score", &["make_builtin", "location_score", "scale_score"]),
    (
        "stein-check",
        &["apply_operator", "boundary_condition_check", "expected_operator", "score_zero_mean_check"],
    ),
    ("stein-gof", &["empirical_discrepancy"]),
    (
        "varbound",
        &["variance_of", "chernoff_bound", "cacoullos_bound", "sharp_bound", "bound_report"],
    ),
    ("fisher", &["skew_density", "scores_at_symmetry", "fisher_info_at_symmetry"]),
    ("singular-pair", &["construct_singular_scale_pair", "singularity_report"]),
    ("mle-verify", &["verify_characterization"]),
    ("mle-solve", &["solve_location_mle", "solve_scale_mle"]),
    ("cauchy-check", &["cauchy_additivity_check"]),
    ("power-fit", &["power_density", "fit_power_relation"]),
    ("sample", &[]),
    ("repro-emit", &["emit_reproduction_suite"]),
    ("repro-check", &["run"]),
];

pub const COMMANDS: &[&str] = &[
    "score",
    "stein-check",
    "stein-gof",
    "varbound",
    "fisher",
    "singular-pair",
    "mle-verify",
    "mle-solve",
    "cauchy-check",
    "power-fit",
    "sample",
];

/// Runs one analysis and returns its report. `dir` anchors relative paths.
pub fn execute(cfg: &RunConfig, dir: &Path) -> Result<Value> {
    let command = RunConfig::need(&cfg.command, "command")?.as_str();
    let spec = cfg.quadrature()?;
    match command {
        "score" => cmd_score(cfg, dir),
        "stein-check" => cmd_stein_check(cfg, dir, &spec),
        "stein-gof" => cmd_stein_gof(cfg, dir),
        "varbound" => cmd_varbound(cfg, dir, &spec),
        "fisher" => cmd_fisher(cfg, dir, &spec),
        "singular-pair" => cmd_singular_pair(cfg, dir, &spec),
        "mle-verify" => cmd_mle_verify(cfg, dir),
        "mle-solve" => cmd_mle_solve(cfg, dir),
        "cauchy-check" => cmd_cauchy(cfg, dir),
        "power-fit" => cmd_power_fit(cfg, dir),
        "sample" => {
            let d = cfg.density(dir)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or(0));
            let xs = d.sample(&mut rng, *RunConfig::need(&cfg.n, "n")?)?;
            Ok(json!({ "density": d.name(), "seed": cfg.seed.unwrap_or(0), "sample": xs }))
        }
        other => Err(Error::Config(format!("unknown command `{other}`"))),
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Config(e.to_string()))
}

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::Config(format!("grid `{s}` must be LO:HI:N"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n < 2 || !(lo < hi) {
        return Err(bad());
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

fn cmd_score(cfg: &RunConfig, dir: &Path) -> Result<Value> {
    let d = cfg.density(dir)?;
    let mut xs = cfg.at.clone().unwrap_or_default();
    if let Some(g) = &cfg.grid {
        xs.extend(parse_grid(g)?);
    }
    if xs.is_empty() {
        return Err(Error::Config("missing `at` or `grid`".into()));
    }
    if xs.len() == 1 && cfg.grid.is_none() {
        let s = d.location_score(xs[0])?;
        return Ok(json!({ "density": d.name(), "x": s.x, "phi": s.phi, "psi": s.psi, "source": s.source }));
    }
    // grid points where the score does not exist are skipped
    let points: Vec<_> = xs.iter().filter_map(|&x| d.location_score(x).ok()).collect();
    Ok(json!({ "density": d.name(), "points": points }))
}

fn operator(cfg: &RunConfig) -> Result<SteinOperatorKind> {
    cfg.operator.as_deref().unwrap_or("location").parse()
}

fn test_functions(cfg: &RunConfig) -> Result<Vec<TestFunction>> {
    match &cfg.functions {
        Some(fs) => fs.iter().map(|s| TestFunction::parse(s)).collect(),
        None => Ok(stein::default_bank()),
    }
}

fn cmd_stein_check(cfg: &RunConfig, dir: &Path, spec: &QuadratureSpec) -> Result<Value> {
    let d = cfg.density(dir)?;
    let kind = operator(cfg)?;
    kind.validate_for(&d)?;
    let mut rows = Vec::new();
    let mut max_abs = 0.0f64;
    for tf in test_functions(cfg)? {
        let (lo, hi) = stein::boundary_terms(&d, kind, &tf)?;
        let boundary_ok = stein::boundary_condition_check_for(&d, kind, &tf)?;
        let expected = stein::expected_operator(&d, kind, &tf, spec);
        let admissible = boundary_ok && expected.is_ok();
        if admissible {
            max_abs = max_abs.max(expected.as_ref().map(|v| v.abs()).unwrap_or(0.0));
        }
        rows.push(json!({
            "label": tf.label(),
            "admissible": admissible,
            "boundary": [lo, hi],
            "expected": expected.as_ref().ok(),
            "error": expected.as_ref().err().map(|e| e.code()),
        }));
    }
    let zero_mean = if kind == SteinOperatorKind::Location {
        d.score_zero_mean(spec).ok()
    } else {
        None
    };
    Ok(json!({
        "target": d.name(),
        "kind": kind,
        "functions": rows,
        "max_abs": max_abs,
        "score_mean": zero_mean,
    }))
}

fn cmd_stein_gof(cfg: &RunConfig, dir: &Path) -> Result<Value> {
    let d = cfg.density(dir)?;
    let sample = cfg.load_sample(dir)?;
    let report = stein::empirical_discrepancy(&sample, &d, operator(cfg)?, &test_functions(cfg)?)?;
    to_value(&report)
}

fn cmd_varbound(cfg: &RunConfig, dir: &Path, spec: &QuadratureSpec) -> Result<Value> {
    let d = cfg.density(dir)?;
    let src = RunConfig::need(&cfg.g, "g")?;
    let g = if src.trim() == "score" {
        SmoothFunction::score_of(&d)
    } else {
        SmoothFunction::parse(src)?
    };
    to_value(&varbounds::bound_report(&d, &g, spec)?)
}

fn fisher_value(label: &str, r: &skewsym::FisherInfoResult) -> Value {
    let flat: Vec<f64> = r.matrix.iter().flatten().copied().collect();
    json!({
        "model": label,
        "matrix": flat,
        "eigenvalues": r.eigenvalues,
        "min_rel_eigenvalue": r.min_rel_eigenvalue,
        "rank": r.rank_at_tol,
        "tol": r.tol,
        "singular": r.rank_at_tol < 3,
        "collinearity": r.collinearity,
    })
}

fn model_label(m: &SkewSymmetricModel) -> String {
    let (mu, sigma, delta) = m.params();
    format!(
        "base={} cdf={} arg={} mu={mu} sigma={sigma} delta={delta}",
        m.base().name(),
        m.skewing_cdf(),
        m.argument().label()
    )
}

fn cmd_fisher(cfg: &RunConfig, dir: &Path, spec: &QuadratureSpec) -> Result<Value> {
    let m = RunConfig::need(&cfg.model, "model")?.build(dir)?;
    let tol = cfg.rank_tol.unwrap_or(skewsym::DEFAULT_RANK_TOL);
    let r = skewsym::fisher_info_with_tol(&m, tol, spec)?;
    let mut v = fisher_value(&model_label(&m), &r);
    v["density_at_zero"] = json!(skewsym::skew_density(&m, m.params().0));
    Ok(v)
}

fn cmd_singular_pair(cfg: &RunConfig, dir: &Path, spec: &QuadratureSpec) -> Result<Value> {
    let p = match &cfg.base {
        Some(b) => b.build_in(dir)?,
        None => cfg.density(dir)?,
    };
    let c1 = *RunConfig::need(&cfg.c1, "c1")?;
    let c2 = *RunConfig::need(&cfg.c2, "c2")?;
    let q = skewsym::construct_singular_scale_pair(&p, c1, c2)?;
    let mut gap = 0.0f64;
    for z in q.central_grid(0.99, 201)? {
        let lhs = q.scale_score(z)?.psi;
        let rhs = c1 * p.scale_score_unchecked(z) + c2;
        gap = gap.max((lhs - rhs).abs());
    }
    let cdf: SkewingCdf = cfg.cdf.as_deref().unwrap_or("normal").parse()?;
    let m = SkewSymmetricModel::new(q.clone(), cdf, SkewingArgument::ScaleScore(p), 0.0, 1.0, 0.0)?;
    let tol = cfg.rank_tol.unwrap_or(skewsym::DEFAULT_RANK_TOL);
    let r = skewsym::fisher_info_with_tol(&m, tol, spec)?;
    let mut v = fisher_value(&model_label(&m), &r);
    v["density"] = json!(q.name());
    v["scale_score_gap"] = json!(gap);
    Ok(v)
}

fn mle_kind(cfg: &RunConfig) -> Result<MleKind> {
    cfg.kind.as_deref().unwrap_or("location").parse()
}

fn cmd_mle_verify(cfg: &RunConfig, dir: &Path) -> Result<Value> {
    let d = cfg.density(dir)?;
    let reference: ReferenceEstimator = cfg.reference.as_deref().unwrap_or("mean").parse()?;
    let r = mle::verify_characterization(
        &d,
        mle_kind(cfg)?,
        reference,
        cfg.trials.unwrap_or(100),
        cfg.sample_size.unwrap_or(5),
        cfg.seed.unwrap_or(0),
    )?;
    to_value(&r)
}

fn cmd_mle_solve(cfg: &RunConfig, dir: &Path) -> Result<Value> {
    let d = cfg.density(dir)?;
    let sample = cfg.load_sample(dir)?;
    let kind = mle_kind(cfg)?;
    let sol = mle::solve(&d, kind, &sample)?;
    let refs = [ReferenceEstimator::Mean, ReferenceEstimator::Median, ReferenceEstimator::Rms];
    let mut v = to_value(&sol)?;
    v["density"] = json!(d.name());
    v["kind"] = json!(kind);
    v["n"] = json!(sample.len());
    let mut gaps = serde_json::Map::new();
    for r in refs {
        let key = to_value(&r)?.as_str().unwrap_or_default().to_string();
        let value = r.apply(&sample);
        v[&key] = json!(value);
        gaps.insert(key, json!((sol.estimate - value).abs()));
    }
    v["gaps"] = Value::Object(gaps);
    Ok(v)
}

fn cmd_cauchy(cfg: &RunConfig, dir: &Path) -> Result<Value> {
    let d = cfg.density(dir)?;
    let pairs: Vec<(f64, f64)> = match (&cfg.pairs, &cfg.values) {
        (Some(p), _) => p.iter().map(|[a, b]| (*a, *b)).collect(),
        (None, Some(v)) => mle::grid_pairs(v),
        (None, None) => mle::grid_pairs(&[-2.0, -1.0, 1.0, 2.0]),
    };
    let r = mle::density_additivity_check(&d, &pairs)?;
    let flat: Vec<[f64; 2]> = pairs.iter().map(|&(a, b)| [a, b]).collect();
    Ok(json!({ "density": d.name(), "pairs": flat, "max_residual": r }))
}

fn cmd_power_fit(cfg: &RunConfig, dir: &Path) -> Result<Value> {
    let g = cfg.density(dir)?;
    let p = RunConfig::need(&cfg.base, "base")?.build_in(dir)?;
    let fit = mle::fit_power_relation(&g, &p)?;
    let mut v = to_value(&fit)?;
    v["density"] = json!(g.name());
    v["base"] = json!(p.name());
    Ok(v)
}

/// Pretty JSON (trailing newline) or flattened CSV.
pub fn render(v: &Value, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(v).expect("values serialize");
            s.push('\n');
            s
        }
        OutputFormat::Csv => to_csv(v),
    }
}

/// Score grids become an `x,phi,psi,source` table; everything else is
/// flattened to `key,value` rows with dotted paths.
pub fn to_csv(v: &Value) -> String {
    if let Some(points) = v.get("points").and_then(Value::as_array) {
        let mut s = String::from("x,phi,psi,source\n");
        for p in points {
            s.push_str(&format!(
                "{},{},{},{}\n",
                p["x"],
                p["phi"],
                p["psi"],
                p["source"].as_str().unwrap_or("")
            ));
        }
        return s;
    }
    if let Some(sample) = v.get("sample").and_then(Value::as_array) {
        let xs: Vec<f64> = sample.iter().filter_map(Value::as_f64).collect();
        return stein::format_sample_csv(&xs);
    }
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    let mut s = String::from("key,value\n");
    for (k, val) in rows {
        s.push_str(&format!("{k},{}\n", csv_field(&val)));
    }
    s
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&key(k), x, out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&key(&i.to_string()), x, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

#[derive(Parser, Debug)]
#[command(name = "scorekit", version, about = "Score functions, Stein operators, variance bounds and skew-symmetric Fisher information")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Common {
    /// TOML file with defaults for any flag
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the report here instead of stdout
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// json (default) or csv
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    max_subdivisions: Option<usize>,
}

#[derive(Args, Debug, Default)]
struct SampleSource {
    /// CSV file, one value per line
    #[arg(long)]
    sample: Option<PathBuf>,
    /// Inline values, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    data: Option<Vec<f64>>,
    /// Draw the sample from this density instead
    #[arg(long)]
    sample_from: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Location and scale score at points or on a grid
    Score {
        #[arg(long)]
        density: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        at: Vec<f64>,
        /// LO:HI:N
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Boundary conditions and E[A f] for a test-function bank
    SteinCheck {
        #[arg(long)]
        density: Option<String>,
        #[arg(long)]
        operator: Option<String>,
        #[arg(long = "f")]
        functions: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Empirical Stein discrepancy of a sample against a target
    SteinGof {
        #[arg(long)]
        density: Option<String>,
        #[arg(long)]
        operator: Option<String>,
        #[arg(long = "f")]
        functions: Vec<String>,
        #[command(flatten)]
        source: SampleSource,
        #[command(flatten)]
        common: Common,
    },
    /// Variance of g(X) against the Chernoff, Cacoullos and sharp bounds
    Varbound {
        #[arg(long)]
        density: Option<String>,
        /// Expression in x, or `score`
        #[arg(long, allow_hyphen_values = true)]
        g: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Fisher information of a skew-symmetric model at delta = 0
    Fisher {
        /// Model TOML file or preset (skew-normal, skew-t)
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        rank_tol: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Build |x|^(c1+c2-1) p^c1 and test its scale-score singularity
    SingularPair {
        #[arg(long)]
        base: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        c1: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        c2: Option<f64>,
        #[arg(long)]
        cdf: Option<String>,
        #[arg(long)]
        rank_tol: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo check that the score root equals a reference estimator
    MleVerify {
        #[arg(long)]
        density: Option<String>,
        /// location or scale
        #[arg(long)]
        kind: Option<String>,
        /// mean, median or rms
        #[arg(long)]
        reference: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        sample_size: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Solve one location or scale score equation
    MleSolve {
        #[arg(long)]
        density: Option<String>,
        #[arg(long)]
        kind: Option<String>,
        #[command(flatten)]
        source: SampleSource,
        #[command(flatten)]
        common: Common,
    },
    /// max |phi(a+b) - phi(a) - phi(b)| over pairs
    CauchyCheck {
        #[arg(long)]
        density: Option<String>,
        /// Use all pairs of these values
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Option<Vec<f64>>,
        /// Explicit pairs a:b
        #[arg(long = "pair", allow_hyphen_values = true)]
        pairs: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Fit phi_g = c phi_p
    PowerFit {
        /// g
        #[arg(long)]
        density: Option<String>,
        /// p
        #[arg(long)]
        base: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Draw a seeded sample (CSV)
    Sample {
        #[arg(long)]
        density: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the command named in a config file
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long)]
        format: Option<String>,
    },
    /// Write config files and a manifest reproducing the acceptance checks
    ReproEmit {
        #[arg(long)]
        dir: PathBuf,
    },
    /// Run a reproduction suite and compare against its manifest
    ReproCheck {
        #[arg(long)]
        dir: PathBuf,
    },
}

fn density_arg(s: Option<String>) -> Result<Option<DensitySpec>> {
    s.map(|s| DensitySpec::from_arg(&s)).transpose()
}

fn nonempty<T>(v: Vec<T>) -> Option<Vec<T>> {
    (!v.is_empty()).then_some(v)
}

fn parse_pair(s: &str) -> Result<[f64; 2]> {
    let bad = || Error::Config(format!("pair `{s}` must be a:b"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    Ok([a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?])
}

impl Common {
    fn apply(self, mut cfg: RunConfig) -> (Option<PathBuf>, RunConfig) {
        cfg.output = self.output;
        cfg.format = self.format;
        cfg.abs_tol = self.abs_tol;
        cfg.rel_tol = self.rel_tol;
        cfg.max_subdivisions = self.max_subdivisions;
        (self.config, cfg)
    }
}

impl SampleSource {
    fn apply(self, mut cfg: RunConfig) -> Result<RunConfig> {
        cfg.sample = self.sample;
        cfg.data = self.data;
        cfg.sample_from = density_arg(self.sample_from)?;
        cfg.n = self.n;
        cfg.seed = self.seed;
        Ok(cfg)
    }
}

enum Action {
    Analysis { config_file: Option<PathBuf>, flags: RunConfig },
    ReproEmit(PathBuf),
    ReproCheck(PathBuf),
}

fn action(cmd: Command) -> Result<Action> {
    let named = |name: &str| RunConfig {
        command: Some(name.into()),
        ..Default::default()
    };
    let (config_file, flags) = match cmd {
        Command::Score { density, at, grid, common } => {
            let mut c = named("score");
            c.density = density_arg(density)?;
            c.at = nonempty(at);
            c.grid = grid;
            common.apply(c)
        }
        Command::SteinCheck { density, operator, functions, common } => {
            let mut c = named("stein-check");
            c.density = density_arg(density)?;
            c.operator = operator;
            c.functions = nonempty(functions);
            common.apply(c)
        }
        Command::SteinGof { density, operator, functions, source, common } => {
            let mut c = named("stein-gof");
            c.density = density_arg(density)?;
            c.operator = operator;
            c.functions = nonempty(functions);
            common.apply(source.apply(c)?)
        }
        Command::Varbound { density, g, common } => {
            let mut c = named("varbound");
            c.density = density_arg(density)?;
            c.g = g;
            common.apply(c)
        }
        Command::Fisher { model, rank_tol, common } => {
            let mut c = named("fisher");
            c.model = model.map(ModelRef::Name);
            c.rank_tol = rank_tol;
            common.apply(c)
        }
        Command::SingularPair { base, c1, c2, cdf, rank_tol, common } => {
            let mut c = named("singular-pair");
            c.base = density_arg(base)?;
            c.c1 = c1;
            c.c2 = c2;
            c.cdf = cdf;
            c.rank_tol = rank_tol;
            common.apply(c)
        }
        Command::MleVerify { density, kind, reference, trials, sample_size, seed, common } => {
            let mut c = named("mle-verify");
            c.density = density_arg(density)?;
            c.kind = kind;
            c.reference = reference;
            c.trials = trials;
            c.sample_size = sample_size;
            c.seed = seed;
            common.apply(c)
        }
        Command::MleSolve { density, kind, source, common } => {
            let mut c = named("mle-solve");
            c.density = density_arg(density)?;
            c.kind = kind;
            common.apply(source.apply(c)?)
        }
        Command::CauchyCheck { density, values, pairs, common } => {
            let mut c = named("cauchy-check");
            c.density = density_arg(density)?;
            c.values = values;
            c.pairs = nonempty(pairs.iter().map(|p| parse_pair(p)).collect::<Result<Vec<_>>>()?);
            common.apply(c)
        }
        Command::PowerFit { density, base, common } => {
            let mut c = named("power-fit");
            c.density = density_arg(density)?;
            c.base = density_arg(base)?;
            common.apply(c)
        }
        Command::Sample { density, n, seed, common } => {
            let mut c = named("sample");
            c.density = density_arg(density)?;
            c.n = n;
            c.seed = seed;
            c.format = Some("csv".into());
            let (file, mut c) = common.apply(c);
            c.format = c.format.or(Some("csv".into()));
            (file, c)
        }
        Command::Run { config, output, format } => {
            let c = RunConfig {
                output,
                format,
                ..Default::default()
            };
            (Some(config), c)
        }
        Command::ReproEmit { dir } => return Ok(Action::ReproEmit(dir)),
        Command::ReproCheck { dir } => return Ok(Action::ReproCheck(dir)),
    };
    Ok(Action::Analysis { config_file, flags })
}

/// Loads the optional config file, layers `flags` over it and runs.
/// Returns the rendered output and where it should go.
pub fn run_layered(config_file: Option<&Path>, flags: RunConfig) -> Result<(String, Option<PathBuf>)> {
    let (file_cfg, dir) = match config_file {
        Some(p) => (
            RunConfig::load(p)?,
            p.parent().map(Path::to_path_buf).unwrap_or_default(),
        ),
        None => (RunConfig::default(), PathBuf::from(".")),
    };
    // a subcommand's own name wins over the file's `command`, unless the
    // subcommand is `run`
    let cfg = file_cfg.clone().layered(flags);
    let cfg = match (&file_cfg.command, &cfg.command) {
        (Some(_), Some(_)) | (None, _) => cfg,
        (Some(c), None) => RunConfig {
            command: Some(c.clone()),
            ..cfg
        },
    };
    let value = execute(&cfg, &dir)?;
    let text = render(&value, cfg.format()?);
    // output paths from the file are relative to it; flag paths to the cwd
    let out = match (&cfg.output, &file_cfg.output) {
        (Some(o), Some(f)) if o == f => Some(dir.join(o)),
        (Some(o), _) => Some(o.clone()),
        (None, _) => None,
    };
    Ok((text, out))
}

fn write_text(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(p, text)?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("SCOREKIT_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| Error::Config(format!("SCOREKIT_THREADS must be a positive integer, got `{v}`")))?;
        // a pool may already exist when embedded; keep it
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn report_error(e: &Error) -> i32 {
    eprintln!("{}", json!({ "code": e.code(), "message": e.to_string() }));
    if e.is_numerical() {
        2
    } else {
        1
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = configure_threads().and_then(|_| action(cli.command)).and_then(|a| match a {
        Action::Analysis { config_file, flags } => {
            let (text, out) = run_layered(config_file.as_deref(), flags)?;
            write_text(&text, out.as_deref())?;
            Ok(0)
        }
        Action::ReproEmit(dir) => {
            let m = repro::emit(&dir)?;
            write_text(&render(&to_value(&m)?, OutputFormat::Json), None)?;
            Ok(0)
        }
        Action::ReproCheck(dir) => {
            let r = repro::check(&dir)?;
            let ok = r.passed;
            write_text(&render(&to_value(&r)?, OutputFormat::Json), None)?;
            Ok(if ok { 0 } else { 1 })
        }
    });
    match result {
        Ok(code) => code,
        Err(e) => report_error(&e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(src: &str) -> RunConfig {
        RunConfig::from_toml(src).unwrap()
    }

    #[test]
    fn score_output() {
        let v = execute(&cfg("command = \"score\"\ndensity = \"normal\"\nat = [2.0]"), Path::new(".")).unwrap();
        assert_eq!(v["phi"], json!(-2.0));
        assert_eq!(v["psi"], json!(-3.0));
    }

    #[test]
    fn varbound_output() {
        let v = execute(&cfg("command = \"varbound\"\ndensity = \"exponential\"\ng = \"x\""), Path::new(".")).unwrap();
        assert!((v["variance"].as_f64().unwrap() - 1.0).abs() < 1e-9);
        let cac = v["bounds"].as_array().unwrap().iter().find(|b| b["name"] == "cacoullos").unwrap();
        assert!((cac["value"].as_f64().unwrap() - 2.0).abs() < 1e-8);
    }

    #[test]
    fn fisher_preset() {
        let v = execute(&cfg("command = \"fisher\"\nmodel = \"skew-normal\""), Path::new(".")).unwrap();
        assert_eq!(v["rank"], json!(2));
        assert_eq!(v["matrix"].as_array().unwrap().len(), 9);
    }

    #[test]
    fn layering_prefers_flags() {
        let file = cfg("command = \"score\"\ndensity = \"normal\"\nat = [1.0]\nformat = \"csv\"");
        let flags = RunConfig {
            at: Some(vec![3.0]),
            ..Default::default()
        };
        let c = file.layered(flags);
        assert_eq!(c.at, Some(vec![3.0]));
        assert_eq!(c.format.as_deref(), Some("csv"));
        assert_eq!(c.command.as_deref(), Some("score"));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::from_toml("comand = \"score\"").is_err());
    }

    #[test]
    fn csv_flattening() {
        let v = json!({ "a": 1, "b": [1.5, { "c": "x,y" }], "d": null });
        assert_eq!(to_csv(&v), "key,value\na,1\nb.0,1.5\nb.1.c,\"x,y\"\nd,\n");
        let g = execute(&cfg("command = \"score\"\ndensity = \"normal\"\ngrid = \"-1:1:3\""), Path::new(".")).unwrap();
        assert_eq!(
            to_csv(&g),
            "x,phi,psi,source\n-1.0,1.0,0.0,analytic\n0.0,-0.0,1.0,analytic\n1.0,-1.0,0.0,analytic\n"
        );
    }

    #[test]
    fn command_table_covers_every_operation() {
        let ops = [
            "make_builtin",
            "location_score",
            "scale_score",
            "score_zero_mean_check",
            "power_density",
            "apply_operator",
            "boundary_condition_check",
            "expected_operator",
            "empirical_discrepancy",
            "variance_of",
            "chernoff_bound",
            "cacoullos_bound",
            "sharp_bound",
            "bound_report",
            "skew_density",
            "scores_at_symmetry",
            "fisher_info_at_symmetry",
            "construct_singular_scale_pair",
            "singularity_report",
            "solve_location_mle",
            "solve_scale_mle",
            "verify_characterization",
            "cauchy_additivity_check",
            "fit_power_relation",
            "run",
            "emit_reproduction_suite",
        ];
        for op in ops {
            assert!(
                COMMAND_TABLE.iter().any(|(_, reached)| reached.contains(&op)),
                "{op} is not reachable"
            );
        }
        for (name, _) in COMMAND_TABLE {
            let argv = ["scorekit", name, "--help"];
            assert!(Cli::try_parse_from(argv).is_err(), "{name} should print help");
            let e = Cli::try_parse_from(argv).unwrap_err();
            assert_eq!(e.kind(), clap::error::ErrorKind::DisplayHelp, "{name}");
        }
    }
}
