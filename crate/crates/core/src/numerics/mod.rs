//! Shared numerical machinery: quadrature, bracketing roots, finite
//! differences and the 3×3 symmetric eigen-solver.

pub mod diff;
pub mod eigen;
pub mod quadrature;
pub mod roots;
pub mod sum;

pub use diff::{central_diff, central_diff_step, DiffOrder};
pub use eigen::{eig_sym3, Matrix3, SymEigen3};
pub use quadrature::{integrate, integrate_estimate, integrate_pieces, Estimate, QuadratureSpec};
pub use roots::{brent, find_root, Bracket, RootSolution};
pub use sum::{order_independent_sum, NeumaierSum};
