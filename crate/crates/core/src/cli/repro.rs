//! Reproduction suite: one config file per check plus `manifest.toml`
//! listing JSON-pointer assertions on each output.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{run_layered, ModelRef, RunConfig};
use crate::density::spec::DensityTable;
use crate::density::DensitySpec;
use crate::error::{Error, Result};
use crate::skewsym::{ArgumentSpec, ModelSpec};

pub const MANIFEST: &str = "manifest.toml";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|v - expected| <= tol`
    Approx,
    /// `||v| - expected| <= tol`
    AbsApprox,
    Le,
    Ge,
    Eq,
}

/// `expected` may be a JSON pointer string into the same output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub pointer: String,
    pub relation: Relation,
    pub expected: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Case {
    pub name: String,
    pub criterion: u32,
    pub config: String,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub cases: Vec<Case>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub pointer: String,
    pub relation: Relation,
    pub expected: Value,
    pub actual: Value,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseOutcome {
    pub name: String,
    pub criterion: u32,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub checks: Vec<CheckOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub passed: bool,
    pub cases: Vec<CaseOutcome>,
}

fn assertion(pointer: &str, relation: Relation, expected: impl Into<Value>, tol: Option<f64>) -> Check {
    Check {
        pointer: pointer.into(),
        relation,
        expected: expected.into(),
        tol,
    }
}

fn approx(pointer: &str, expected: f64, tol: f64) -> Check {
    assertion(pointer, Relation::Approx, expected, Some(tol))
}

fn eq(pointer: &str, expected: impl Into<Value>) -> Check {
    assertion(pointer, Relation::Eq, expected, None)
}

fn le(pointer: &str, bound: f64) -> Check {
    assertion(pointer, Relation::Le, bound, None)
}

fn ge(pointer: &str, bound: f64) -> Check {
    assertion(pointer, Relation::Ge, bound, None)
}

fn named(command: &str, density: Option<DensitySpec>) -> RunConfig {
    RunConfig {
        command: Some(command.into()),
        density,
        ..Default::default()
    }
}

fn d(name: &str) -> Option<DensitySpec> {
    Some(DensitySpec::builtin(name))
}

fn power(c: f64) -> DensitySpec {
    DensitySpec::Table(Box::new(DensityTable {
        family: Some("power".into()),
        of: Some(DensitySpec::builtin("normal")),
        c: Some(c),
        ..Default::default()
    }))
}

fn model(base: &str, cdf: &str, argument: ArgumentSpec) -> Option<ModelRef> {
    Some(ModelRef::Spec(Box::new(ModelSpec {
        base: DensitySpec::builtin(base),
        cdf: cdf.into(),
        argument,
        mu: 0.0,
        sigma: 1.0,
        delta: 0.0,
    })))
}

/// The suite, in manifest order.
pub fn cases() -> Vec<(String, u32, RunConfig, Vec<Check>)> {
    let mut out = Vec::new();
    let mut push = |name: &str, criterion: u32, cfg: RunConfig, checks: Vec<Check>| {
        out.push((name.to_string(), criterion, cfg, checks));
    };

    push(
        "score-normal",
        1,
        RunConfig {
            at: Some(vec![2.0]),
            ..named("score", d("normal"))
        },
        vec![approx("/phi", -2.0, 1e-12), approx("/psi", -3.0, 1e-12)],
    );
    push(
        "score-exponential",
        1,
        RunConfig {
            at: Some(vec![3.0]),
            ..named("score", d("exponential"))
        },
        vec![approx("/psi", -2.0, 1e-12)],
    );

    for (name, density, op) in [
        ("stein-normal", "normal", "location"),
        ("stein-logistic", "logistic", "location"),
        ("stein-exponential-unit", "exponential", "exp_unit"),
        ("stein-exponential-scale", "exponential", "exp_scale"),
    ] {
        push(
            name,
            2,
            RunConfig {
                operator: Some(op.into()),
                ..named("stein-check", d(density))
            },
            vec![le("/max_abs", 1e-7)],
        );
    }

    push(
        "gof-normal-sample",
        3,
        RunConfig {
            sample_from: d("normal"),
            n: Some(10_000),
            seed: Some(42),
            ..named("stein-gof", d("normal"))
        },
        vec![le("/max_abs", 0.05)],
    );
    push(
        "gof-laplace-sample",
        3,
        RunConfig {
            sample_from: d("laplace"),
            n: Some(10_000),
            seed: Some(42),
            functions: Some(vec!["x".into()]),
            ..named("stein-gof", d("normal"))
        },
        vec![assertion("/per_function/0/value", Relation::AbsApprox, 1.0, Some(0.1))],
    );

    push(
        "varbound-normal-linear",
        4,
        RunConfig {
            g: Some("2*x + 1".into()),
            ..named("varbound", d("normal"))
        },
        vec![
            approx("/ratios/chernoff", 1.0, 1e-8),
            assertion("/bounds/1/value", Relation::Approx, "/bounds/0/value", Some(2e-8)),
        ],
    );
    push(
        "varbound-normal-sin",
        4,
        RunConfig {
            g: Some("sin(x)".into()),
            ..named("varbound", d("normal"))
        },
        vec![
            le("/ratios/chernoff", 1.0),
            assertion("/bounds/1/value", Relation::Approx, "/bounds/0/value", Some(2e-8)),
        ],
    );
    push(
        "varbound-exponential",
        4,
        RunConfig {
            g: Some("x".into()),
            ..named("varbound", d("exponential"))
        },
        vec![
            approx("/variance", 1.0, 1e-8),
            approx("/bounds/1/value", 2.0, 1e-6),
            eq("/bounds/2/code", "NOT_STRICTLY_LOG_CONCAVE"),
        ],
    );

    push(
        "varbound-logistic-score",
        5,
        RunConfig {
            g: Some("score".into()),
            ..named("varbound", d("logistic"))
        },
        vec![approx("/ratios/sharp", 1.0, 1e-5)],
    );

    push(
        "fisher-skew-normal",
        6,
        RunConfig {
            model: Some(ModelRef::Name("skew-normal".into())),
            ..named("fisher", None)
        },
        vec![eq("/rank", 2), le("/min_rel_eigenvalue", 1e-8)],
    );
    push(
        "fisher-skew-t",
        6,
        RunConfig {
            model: Some(ModelRef::Name("skew-t".into())),
            ..named("fisher", None)
        },
        vec![eq("/rank", 3), ge("/min_rel_eigenvalue", 1e-3)],
    );
    for (name, cdf) in [
        ("fisher-skew-laplace-normal", "normal"),
        ("fisher-skew-laplace-logistic", "logistic"),
        ("fisher-skew-laplace-student", "student(6)"),
    ] {
        push(
            name,
            6,
            RunConfig {
                model: model("laplace", cdf, ArgumentSpec::new("location_score", None, None)),
                ..named("fisher", None)
            },
            vec![eq("/rank", 2)],
        );
    }

    push(
        "singular-pair-normal",
        7,
        RunConfig {
            base: d("normal"),
            c1: Some(1.0),
            c2: Some(2.0),
            ..named("singular-pair", None)
        },
        vec![
            eq("/rank", 2),
            approx("/collinearity/c1", 1.0, 0.01),
            approx("/collinearity/c2", 2.0, 0.01),
        ],
    );
    push(
        "scale-score-negative-control",
        7,
        RunConfig {
            model: model(
                "logistic",
                "normal",
                ArgumentSpec::new("scale_score", Some(DensitySpec::builtin("normal")), None),
            ),
            ..named("fisher", None)
        },
        vec![eq("/rank", 3)],
    );

    for (name, density, kind, reference) in [
        ("mle-normal-location", "normal", "location", "mean"),
        ("mle-exponential-scale", "exponential", "scale", "mean"),
        ("mle-normal-scale", "normal", "scale", "rms"),
    ] {
        push(
            name,
            8,
            RunConfig {
                kind: Some(kind.into()),
                reference: Some(reference.into()),
                trials: Some(100),
                sample_size: Some(5),
                seed: Some(42),
                ..named("mle-verify", d(density))
            },
            vec![le("/max_abs_gap", 1e-9), eq("/failures", 0)],
        );
    }
    push(
        "mle-logistic-witness",
        8,
        RunConfig {
            kind: Some("location".into()),
            data: Some(crate::mle::NEGATIVE_CONTROL_SAMPLE.to_vec()),
            ..named("mle-solve", d("logistic"))
        },
        vec![ge("/gaps/mean", 0.01)],
    );
    push(
        "cauchy-normal",
        8,
        RunConfig {
            values: Some(vec![-2.0, -0.5, 0.3, 1.0, 2.5]),
            ..named("cauchy-check", d("normal"))
        },
        vec![approx("/max_residual", 0.0, 1e-9)],
    );
    push(
        "cauchy-laplace-witness",
        8,
        RunConfig {
            pairs: Some(vec![[1.0, 1.0]]),
            ..named("cauchy-check", d("laplace"))
        },
        vec![approx("/max_residual", 1.0, 1e-9)],
    );

    for c in [0.5, 1.0, 2.0, 4.0] {
        push(
            &format!("power-fit-{c}"),
            9,
            RunConfig {
                density: Some(power(c)),
                base: d("normal"),
                ..named("power-fit", None)
            },
            vec![approx("/c", c, 1e-6 * c)],
        );
    }
    out
}

/// Writes every case's config and the manifest into `dir`.
pub fn emit(dir: &Path) -> Result<Manifest> {
    std::fs::create_dir_all(dir)?;
    let mut manifest = Manifest { cases: Vec::new() };
    for (name, criterion, mut cfg, checks) in cases() {
        let file = format!("{name}.toml");
        cfg.output = Some(format!("out/{name}.json").into());
        std::fs::write(dir.join(&file), cfg.to_toml()?)?;
        manifest.cases.push(Case {
            name,
            criterion,
            config: file,
            checks,
        });
    }
    let text = toml::to_string(&manifest).map_err(|e| Error::Config(e.to_string()))?;
    std::fs::write(dir.join(MANIFEST), text)?;
    Ok(manifest)
}

pub fn load_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST);
    let src = std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    toml::from_str(&src).map_err(|e| Error::Config(e.to_string()))
}

fn evaluate(out: &Value, c: &Check) -> CheckOutcome {
    let actual = out.pointer(&c.pointer).cloned().unwrap_or(Value::Null);
    let expected = match c.expected.as_str() {
        Some(p) if p.starts_with('/') => out.pointer(p).cloned().unwrap_or(Value::Null),
        _ => c.expected.clone(),
    };
    let tol = c.tol.unwrap_or(0.0);
    let passed = match c.relation {
        Relation::Eq => actual == expected,
        rel => match (actual.as_f64(), expected.as_f64()) {
            (Some(a), Some(e)) => match rel {
                Relation::Approx => (a - e).abs() <= tol,
                Relation::AbsApprox => (a.abs() - e).abs() <= tol,
                Relation::Le => a <= e,
                Relation::Ge => a >= e,
                Relation::Eq => unreachable!(),
            },
            _ => false,
        },
    };
    CheckOutcome {
        pointer: c.pointer.clone(),
        relation: c.relation,
        expected,
        actual,
        passed,
    }
}

/// Runs every case in `dir`, writing outputs under `dir/out`.
pub fn check(dir: &Path) -> Result<SuiteReport> {
    let manifest = load_manifest(dir)?;
    let mut cases = Vec::new();
    for case in &manifest.cases {
        let run = run_layered(Some(&dir.join(&case.config)), RunConfig::default()).and_then(|(text, out)| {
            if let Some(p) = out {
                if let Some(parent) = p.parent() {
                    std::fs::create_dir_all(parent)?;
                }
                std::fs::write(p, &text)?;
            }
            serde_json::from_str::<Value>(&text).map_err(|e| Error::Config(e.to_string()))
        });
        let outcome = match run {
            Ok(v) => {
                let checks: Vec<_> = case.checks.iter().map(|c| evaluate(&v, c)).collect();
                CaseOutcome {
                    name: case.name.clone(),
                    criterion: case.criterion,
                    passed: checks.iter().all(|c| c.passed),
                    error: None,
                    checks,
                }
            }
            Err(e) => CaseOutcome {
                name: case.name.clone(),
                criterion: case.criterion,
                passed: false,
                error: Some(format!("{}: {e}", e.code())),
                checks: Vec::new(),
            },
        };
        cases.push(outcome);
    }
    Ok(SuiteReport {
        passed: cases.iter().all(|c| c.passed),
        cases,
    })
}
