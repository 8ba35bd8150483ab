//! Symmetric 3×3 eigen-decomposition by cyclic Jacobi rotations.

use crate::error::{Error, Result};

pub type Matrix3 = [[f64; 3]; 3];

/// Eigenvalues in ascending order; column `k` of `vectors` belongs to
/// `values[k]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymEigen3 {
    pub values: [f64; 3],
    pub vectors: Matrix3,
}

impl SymEigen3 {
    /// `Q Λ Qᵀ`
    pub fn reconstruct(&self) -> Matrix3 {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3)
                    .map(|k| self.vectors[i][k] * self.values[k] * self.vectors[j][k])
                    .sum();
            }
        }
        m
    }
}

pub fn max_abs(m: &Matrix3) -> f64 {
    m.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

pub fn eig_sym3(m: &Matrix3) -> Result<SymEigen3> {
    let scale = max_abs(m);
    if m.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { x: f64::NAN });
    }
    let asym = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|&(i, j)| (m[i][j] - m[j][i]).abs())
        .fold(0.0f64, f64::max);
    if asym > 1e-12 * scale {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }

    // symmetrize so rounding in the input does not bias the rotations
    let mut a = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            a[i][j] = 0.5 * (m[i][j] + m[j][i]);
        }
    }
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

    for _sweep in 0..64 {
        let off = a[0][1].abs() + a[0][2].abs() + a[1][2].abs();
        if off == 0.0 || off <= f64::EPSILON * f64::EPSILON * scale {
            break;
        }
        for &(p, q) in &[(0usize, 1usize), (0, 2), (1, 2)] {
            if a[p][q] == 0.0 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            // A ← Jᵀ A J with J the (p, q) rotation
            for k in 0..3 {
                let akp = a[k][p];
                let akq = a[k][q];
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let apk = a[p][k];
                let aqk = a[q][k];
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
            for row in v.iter_mut() {
                let vp = row[p];
                let vq = row[q];
                row[p] = c * vp - s * vq;
                row[q] = s * vp + c * vq;
            }
        }
    }

    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let mut values = [0.0; 3];
    let mut vectors = [[0.0; 3]; 3];
    for (dst, &src) in order.iter().enumerate() {
        values[dst] = a[src][src];
        for i in 0..3 {
            vectors[i][dst] = v[i][src];
        }
    }
    Ok(SymEigen3 { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_reconstructs(m: &Matrix3, e: &SymEigen3) {
        let r = e.reconstruct();
        let scale = max_abs(m).max(f64::MIN_POSITIVE);
        for i in 0..3 {
            for j in 0..3 {
                assert!((r[i][j] - m[i][j]).abs() <= 1e-10 * scale, "{r:?} vs {m:?}");
            }
        }
    }

    #[test]
    fn identity() {
        let m = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let e = eig_sym3(&m).unwrap();
        assert_eq!(e.values, [1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_sorted() {
        let m = [[3.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 2.0]];
        let e = eig_sym3(&m).unwrap();
        assert_eq!(e.values, [1.0, 2.0, 3.0]);
        assert_reconstructs(&m, &e);
    }

    #[test]
    fn rank_two_from_known_spectrum() {
        let s = 1.0 / 2f64.sqrt();
        let t = 1.0 / 3f64.sqrt();
        let v = [s, s, 0.0];
        let w = [t, -t, t];
        // orthonormal pair, so the spectrum is {0, 1, 1}
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = v[i] * v[j] + w[i] * w[j];
            }
        }
        let e = eig_sym3(&m).unwrap();
        assert!(e.values[0].abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        assert!((e.values[2] - 1.0).abs() < 1e-14);
        assert_reconstructs(&m, &e);
    }

    #[test]
    fn rejects_asymmetric() {
        let m = [[1.0, 2.0, 0.0], [2.1, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert!(matches!(eig_sym3(&m), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn dense_example() {
        let m = [[4.0, 1.0, -2.0], [1.0, 2.0, 0.5], [-2.0, 0.5, 3.0]];
        let e = eig_sym3(&m).unwrap();
        assert!((e.values.iter().sum::<f64>() - 9.0).abs() < 1e-12);
        assert!(e.values[0] <= e.values[1] && e.values[1] <= e.values[2]);
        assert_reconstructs(&m, &e);
    }
}
