//! TOML density specifications.
//!
//! A spec is either a bare string (a built-in family name, or a path to a
//! TOML file holding a table) or a table:
//!
//! ```toml
//! family = "student_t"
//! params = { nu = 5.0 }
//! ```
//!
//! ```toml
//! name = "quartic"
//! log_pdf = "-x^4 / k"
//! support = [-inf, inf]
//! symmetric = true
//! params = { k = 4.0 }
//! ```
//!
//! ```toml
//! family = "scale_pair"
//! of = "normal"
//! c1 = 1.0
//! c2 = 2.0
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{make_builtin, Density, SupportInterval};
use crate::error::{Error, Result};
use crate::expr::Expr;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DensitySpec {
    Name(String),
    Table(Box<DensityTable>),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityTable {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_pdf: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetric: Option<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub kinks: Vec<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub of: Option<DensitySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
}

impl DensitySpec {
    pub fn builtin(name: &str) -> DensitySpec {
        DensitySpec::Name(name.to_string())
    }

    pub fn with_params(family: &str, params: &[(&str, f64)]) -> DensitySpec {
        DensitySpec::Table(Box::new(DensityTable {
            family: Some(family.to_string()),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            ..Default::default()
        }))
    }

    /// Parses a TOML document holding a single density table.
    pub fn from_toml(src: &str) -> Result<DensitySpec> {
        let table: DensityTable = toml::from_str(src).map_err(|e| Error::Config(e.to_string()))?;
        Ok(DensitySpec::Table(Box::new(table)))
    }

    pub fn load(path: &Path) -> Result<DensitySpec> {
        let src = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        DensitySpec::from_toml(&src)
    }

    /// Interprets a command-line argument: an existing file is loaded,
    /// anything else is a family name.
    pub fn from_arg(arg: &str) -> Result<DensitySpec> {
        let path = Path::new(arg);
        if path.is_file() {
            DensitySpec::load(path)
        } else {
            Ok(DensitySpec::Name(arg.to_string()))
        }
    }

    pub fn build(&self) -> Result<Density> {
        self.build_in(Path::new("."))
    }

    /// Builds the density, resolving file references relative to `dir`.
    pub fn build_in(&self, dir: &Path) -> Result<Density> {
        match self {
            DensitySpec::Name(s) => {
                let path = resolve(dir, s);
                if path.is_file() {
                    let spec = DensitySpec::load(&path)?;
                    let parent = path.parent().map(Path::to_path_buf).unwrap_or_default();
                    spec.build_in(&parent)
                } else {
                    make_builtin(s, &BTreeMap::new())
                }
            }
            DensitySpec::Table(t) => t.build_in(dir),
        }
    }
}

fn resolve(dir: &Path, s: &str) -> PathBuf {
    let p = Path::new(s);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        dir.join(p)
    }
}

impl DensityTable {
    fn base(&self, dir: &Path) -> Result<Density> {
        self.of
            .as_ref()
            .ok_or_else(|| Error::Config("missing `of` (the base density)".into()))?
            .build_in(dir)
    }

    fn required(value: Option<f64>, key: &str) -> Result<f64> {
        value.ok_or_else(|| Error::Config(format!("missing `{key}`")))
    }

    fn build_in(&self, dir: &Path) -> Result<Density> {
        if let Some(src) = &self.log_pdf {
            let expr = Expr::parse_with(src, &self.params)?;
            let support = match self.support {
                Some([a, b]) => SupportInterval::new(a, b)?,
                None => SupportInterval::real_line(),
            };
            let name = self.name.clone().unwrap_or_else(|| "custom".to_string());
            let params = self.params.iter().map(|(k, v)| (k.clone(), *v)).collect();
            return Density::from_expression(
                &name,
                expr,
                support,
                self.symmetric.unwrap_or(false),
                self.kinks.clone(),
                params,
            );
        }
        let family = self
            .family
            .as_deref()
            .ok_or_else(|| Error::Config("density table needs `family` or `log_pdf`".into()))?;
        match family {
            "power" => self.base(dir)?.power(Self::required(self.c, "c")?),
            "scale_pair" => {
                let c1 = Self::required(self.c1, "c1")?;
                let c2 = Self::required(self.c2, "c2")?;
                self.base(dir)?.scale_pair(c1, c2)
            }
            name => make_builtin(name, &self.params),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_table() {
        let d = DensitySpec::from_toml("family = \"student_t\"\nparams = { nu = 5.0 }")
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(d.name(), "student_t");
        assert_eq!(d.param("nu"), Some(5.0));
    }

    #[test]
    fn expression_table_with_constants() {
        let src = "name = \"quartic\"\nlog_pdf = \"-x^4 / k\"\nsupport = [-inf, inf]\nsymmetric = true\nparams = { k = 4 }";
        let d = DensitySpec::from_toml(src).unwrap().build().unwrap();
        assert_eq!(d.name(), "quartic");
        let s = d.location_score(1.0).unwrap();
        assert!((s.phi + 1.0).abs() < 1e-8);
    }

    #[test]
    fn derived_tables() {
        let p = DensitySpec::from_toml("family = \"power\"\nof = \"normal\"\nc = 4.0")
            .unwrap()
            .build()
            .unwrap();
        assert!((p.location_score(1.0).unwrap().phi + 4.0).abs() < 1e-12);
        let q = DensitySpec::from_toml("family = \"scale_pair\"\nof = \"normal\"\nc1 = 1.0\nc2 = 2.0")
            .unwrap()
            .build()
            .unwrap();
        assert!((q.scale_score(1.5).unwrap().psi - (3.0 - 2.25)).abs() < 1e-12);
        let nested = "family = \"power\"\nc = 2.0\n[of]\nfamily = \"laplace\"\nparams = { b = 2.0 }";
        let l = DensitySpec::from_toml(nested).unwrap().build().unwrap();
        assert_eq!(l.location_score(3.0).unwrap().phi, -1.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            DensitySpec::from_toml("famly = \"normal\""),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            DensitySpec::builtin("cauchy").build(),
            Err(Error::UnknownFamily(_))
        ));
        assert!(matches!(
            DensitySpec::from_toml("family = \"scale_pair\"\nof = \"normal\"\nc1 = 1.0\nc2 = 1.0")
                .unwrap()
                .build(),
            Err(Error::ParityViolation(_))
        ));
    }

    #[test]
    fn file_reference() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("base.toml"), "family = \"logistic\"").unwrap();
        let spec = DensitySpec::from_toml("family = \"power\"\nof = \"base.toml\"\nc = 1.0").unwrap();
        assert_eq!(spec.build_in(dir.path()).unwrap().name(), "logistic^1");
    }

    #[test]
    fn round_trip() {
        let spec = DensitySpec::with_params("gamma", &[("shape", 3.0)]);
        let text = toml::to_string(&spec).unwrap();
        assert_eq!(DensitySpec::from_toml(&text).unwrap(), spec);
    }
}
