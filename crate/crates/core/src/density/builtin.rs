//! Closed-form families: log-density, score, score slope, cdf and quantile.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use rand_distr::{Distribution, Exp, Normal, StudentT};
use statrs::distribution::{ContinuousCDF, Gamma as GammaDist, StudentsT};
use statrs::function::erf::{erfc, erfc_inv};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Euler–Mascheroni constant (mean of the standard Gumbel).
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Normal { mu: f64, sigma: f64 },
    Exponential { rate: f64 },
    Laplace { mu: f64, scale: f64 },
    Gumbel { mu: f64, beta: f64 },
    StudentT { nu: f64, mu: f64, sigma: f64 },
    Gamma { shape: f64, scale: f64 },
    Logistic { mu: f64, scale: f64 },
}

pub const FAMILY_NAMES: [&str; 7] = [
    "normal",
    "exponential",
    "laplace",
    "gumbel",
    "student_t",
    "gamma",
    "logistic",
];

struct ParamReader<'a> {
    family: &'static str,
    given: &'a BTreeMap<String, f64>,
    used: Vec<&'a str>,
}

impl<'a> ParamReader<'a> {
    fn get(&mut self, names: &[&str], default: Option<f64>) -> Result<f64> {
        for (k, v) in self.given.iter() {
            if names.contains(&k.as_str()) {
                self.used.push(k.as_str());
                if !v.is_finite() {
                    return Err(Error::InvalidParameter {
                        name: k.clone(),
                        value: *v,
                        reason: "must be finite".into(),
                    });
                }
                return Ok(*v);
            }
        }
        default.ok_or_else(|| Error::InvalidParameter {
            name: names[0].to_string(),
            value: f64::NAN,
            reason: format!("required for {}", self.family),
        })
    }

    fn positive(&mut self, names: &[&str], default: Option<f64>) -> Result<f64> {
        let v = self.get(names, default)?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(Error::InvalidParameter {
                name: names[0].to_string(),
                value: v,
                reason: "must be > 0".into(),
            })
        }
    }

    fn finish(self) -> Result<()> {
        for k in self.given.keys() {
            if !self.used.contains(&k.as_str()) {
                return Err(Error::InvalidParameter {
                    name: k.clone(),
                    value: self.given[k],
                    reason: format!("not a parameter of {}", self.family),
                });
            }
        }
        Ok(())
    }
}

impl Family {
    pub fn from_name(name: &str, params: &BTreeMap<String, f64>) -> Result<Family> {
        let canonical = match name.to_ascii_lowercase().as_str() {
            "normal" | "gaussian" => "normal",
            "exponential" | "exp" => "exponential",
            "laplace" => "laplace",
            "gumbel" => "gumbel",
            "student_t" | "student" | "t" => "student_t",
            "gamma" => "gamma",
            "logistic" => "logistic",
            _ => return Err(Error::UnknownFamily(name.to_string())),
        };
        let mut r = ParamReader {
            family: canonical,
            given: params,
            used: Vec::new(),
        };
        let fam = match canonical {
            "normal" => Family::Normal {
                mu: r.get(&["mu", "loc"], Some(0.0))?,
                sigma: r.positive(&["sigma", "scale"], Some(1.0))?,
            },
            "exponential" => Family::Exponential {
                rate: r.positive(&["rate", "lambda"], Some(1.0))?,
            },
            "laplace" => Family::Laplace {
                mu: r.get(&["mu", "loc"], Some(0.0))?,
                scale: r.positive(&["b", "scale"], Some(1.0))?,
            },
            "gumbel" => Family::Gumbel {
                mu: r.get(&["mu", "loc"], Some(0.0))?,
                beta: r.positive(&["beta", "scale"], Some(1.0))?,
            },
            "student_t" => Family::StudentT {
                nu: r.positive(&["nu", "df"], None)?,
                mu: r.get(&["mu", "loc"], Some(0.0))?,
                sigma: r.positive(&["sigma", "scale"], Some(1.0))?,
            },
            "gamma" => Family::Gamma {
                shape: r.positive(&["shape", "k"], None)?,
                scale: r.positive(&["scale", "theta"], Some(1.0))?,
            },
            _ => Family::Logistic {
                mu: r.get(&["mu", "loc"], Some(0.0))?,
                scale: r.positive(&["s", "scale"], Some(1.0))?,
            },
        };
        r.finish()?;
        Ok(fam)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Normal { .. } => "normal",
            Family::Exponential { .. } => "exponential",
            Family::Laplace { .. } => "laplace",
            Family::Gumbel { .. } => "gumbel",
            Family::StudentT { .. } => "student_t",
            Family::Gamma { .. } => "gamma",
            Family::Logistic { .. } => "logistic",
        }
    }

    pub fn params(&self) -> Vec<(String, f64)> {
        let p = |pairs: &[(&str, f64)]| pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        match *self {
            Family::Normal { mu, sigma } => p(&[("mu", mu), ("sigma", sigma)]),
            Family::Exponential { rate } => p(&[("rate", rate)]),
            Family::Laplace { mu, scale } => p(&[("mu", mu), ("b", scale)]),
            Family::Gumbel { mu, beta } => p(&[("mu", mu), ("beta", beta)]),
            Family::StudentT { nu, mu, sigma } => p(&[("nu", nu), ("mu", mu), ("sigma", sigma)]),
            Family::Gamma { shape, scale } => p(&[("shape", shape), ("scale", scale)]),
            Family::Logistic { mu, scale } => p(&[("mu", mu), ("s", scale)]),
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            Family::Exponential { .. } | Family::Gamma { .. } => (0.0, f64::INFINITY),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn symmetric(&self) -> bool {
        match *self {
            Family::Normal { mu, .. }
            | Family::Laplace { mu, .. }
            | Family::StudentT { mu, .. }
            | Family::Logistic { mu, .. } => mu == 0.0,
            _ => false,
        }
    }

    /// Points where the score does not exist.
    pub fn kinks(&self) -> Vec<f64> {
        match *self {
            Family::Laplace { mu, .. } => vec![mu],
            _ => Vec::new(),
        }
    }

    /// Location and spread hints used to seed quadrature partitions.
    pub fn center_spread(&self) -> (f64, f64) {
        match *self {
            Family::Normal { mu, sigma } => (mu, sigma),
            Family::Exponential { rate } => (1.0 / rate, 1.0 / rate),
            Family::Laplace { mu, scale } => (mu, scale),
            Family::Gumbel { mu, beta } => (mu + EULER_GAMMA * beta, 1.3 * beta),
            Family::StudentT { mu, sigma, .. } => (mu, sigma),
            Family::Gamma { shape, scale } => (shape * scale, shape.sqrt() * scale),
            Family::Logistic { mu, scale } => (mu, 1.8 * scale),
        }
    }

    /// Normalized log-density; only meaningful inside the support.
    pub fn log_pdf(&self, x: f64) -> f64 {
        match *self {
            Family::Normal { mu, sigma } => {
                let z = (x - mu) / sigma;
                -0.5 * z * z - sigma.ln() - 0.5 * (2.0 * PI).ln()
            }
            Family::Exponential { rate } => rate.ln() - rate * x,
            Family::Laplace { mu, scale } => -(x - mu).abs() / scale - (2.0 * scale).ln(),
            Family::Gumbel { mu, beta } => {
                let z = (x - mu) / beta;
                -(z + (-z).exp()) - beta.ln()
            }
            Family::StudentT { nu, mu, sigma } => {
                let z = (x - mu) / sigma;
                ln_gamma(0.5 * (nu + 1.0)) - ln_gamma(0.5 * nu) - 0.5 * (nu * PI).ln() - sigma.ln()
                    - 0.5 * (nu + 1.0) * (z * z / nu).ln_1p()
            }
            Family::Gamma { shape, scale } => {
                (shape - 1.0) * x.ln() - x / scale - ln_gamma(shape) - shape * scale.ln()
            }
            Family::Logistic { mu, scale } => {
                let z = ((x - mu) / scale).abs();
                -z - 2.0 * (-z).exp().ln_1p() - scale.ln()
            }
        }
    }

    /// `(log p)'`; Laplace returns `-sign(x-μ)/b` (0 at the median).
    pub fn score(&self, x: f64) -> f64 {
        match *self {
            Family::Normal { mu, sigma } => -(x - mu) / (sigma * sigma),
            Family::Exponential { rate } => -rate,
            Family::Laplace { mu, scale } => {
                let d = x - mu;
                if d > 0.0 {
                    -1.0 / scale
                } else if d < 0.0 {
                    1.0 / scale
                } else {
                    0.0
                }
            }
            Family::Gumbel { mu, beta } => {
                let z = (x - mu) / beta;
                ((-z).exp() - 1.0) / beta
            }
            Family::StudentT { nu, mu, sigma } => {
                let z = (x - mu) / sigma;
                -(nu + 1.0) * z / (sigma * (nu + z * z))
            }
            Family::Gamma { shape, scale } => (shape - 1.0) / x - 1.0 / scale,
            Family::Logistic { mu, scale } => -(0.5 * (x - mu) / scale).tanh() / scale,
        }
    }

    /// `(log p)''`, zero almost everywhere for Laplace and exponential.
    pub fn score_slope(&self, x: f64) -> f64 {
        match *self {
            Family::Normal { sigma, .. } => -1.0 / (sigma * sigma),
            Family::Exponential { .. } | Family::Laplace { .. } => 0.0,
            Family::Gumbel { mu, beta } => {
                let z = (x - mu) / beta;
                -(-z).exp() / (beta * beta)
            }
            Family::StudentT { nu, mu, sigma } => {
                let z = (x - mu) / sigma;
                let d = nu + z * z;
                -(nu + 1.0) * (nu - z * z) / (sigma * sigma * d * d)
            }
            Family::Gamma { shape, .. } => -(shape - 1.0) / (x * x),
            Family::Logistic { mu, scale } => {
                let c = (0.5 * (x - mu) / scale).cosh();
                -0.5 / (scale * scale * c * c)
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Family::Normal { mu, sigma } => 0.5 * erfc(-(x - mu) / (sigma * SQRT_2)),
            Family::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            Family::Laplace { mu, scale } => {
                let z = (x - mu) / scale;
                if z < 0.0 {
                    0.5 * z.exp()
                } else {
                    1.0 - 0.5 * (-z).exp()
                }
            }
            Family::Gumbel { mu, beta } => (-(-(x - mu) / beta).exp()).exp(),
            Family::StudentT { nu, mu, sigma } => StudentsT::new(mu, sigma, nu)
                .map(|d| d.cdf(x))
                .unwrap_or(f64::NAN),
            Family::Gamma { shape, scale } => {
                if x <= 0.0 {
                    0.0
                } else {
                    GammaDist::new(shape, 1.0 / scale).map(|d| d.cdf(x)).unwrap_or(f64::NAN)
                }
            }
            Family::Logistic { mu, scale } => 1.0 / (1.0 + (-(x - mu) / scale).exp()),
        }
    }

    /// Closed-form quantile where one exists.
    pub fn quantile(&self, u: f64) -> Option<f64> {
        match *self {
            Family::Normal { mu, sigma } => {
                // erfc_inv is good to ~1e-10; one Newton step on the cdf
                let z = -SQRT_2 * erfc_inv(2.0 * u);
                Some(mu + sigma * (z - (normal_cdf(z) - u) / normal_pdf(z)))
            }
            Family::Exponential { rate } => Some(-(-u).ln_1p() / rate),
            Family::Laplace { mu, scale } => Some(if u < 0.5 {
                mu + scale * (2.0 * u).ln()
            } else {
                mu - scale * (2.0 * (1.0 - u)).ln()
            }),
            Family::Gumbel { mu, beta } => Some(mu - beta * (-u.ln()).ln()),
            Family::Logistic { mu, scale } => Some(mu + scale * (u / (1.0 - u)).ln()),
            Family::StudentT { .. } | Family::Gamma { .. } => None,
        }
    }

    /// Direct sampler for the families that have one.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<f64> {
        match *self {
            Family::Normal { mu, sigma } => Normal::new(mu, sigma).ok().map(|d| d.sample(rng)),
            Family::Exponential { rate } => Exp::new(rate).ok().map(|d| d.sample(rng)),
            Family::StudentT { nu, mu, sigma } => {
                StudentT::new(nu).ok().map(|d| mu + sigma * d.sample(rng))
            }
            Family::Laplace { mu, scale } => {
                // difference of two unit exponentials is standard Laplace
                let e1: f64 = Exp::new(1.0).ok()?.sample(rng);
                let e2: f64 = Exp::new(1.0).ok()?.sample(rng);
                Some(mu + scale * (e1 - e2))
            }
            _ => None,
        }
    }
}

/// Standard normal cdf.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z - 0.5 * (2.0 * PI).ln()).exp()
}
