//! Score functions of univariate densities and the tools built on them:
//! Stein operators, variance bounds, Fisher information of skew-symmetric
//! models at symmetry, and score-equation (MLE) characterizations.

pub mod cli;
pub mod density;
pub mod error;
pub mod expr;
pub mod mle;
pub mod numerics;
pub mod skewsym;
pub mod stein;
pub mod varbounds;

pub use density::{make_builtin, Density, DensitySpec, ScoreEvaluation, ScoreSource, SupportInterval};
pub use error::{Error, Result};
