//! Thomas elimination for the tridiagonal systems of the implicit schemes.
//!
//! The assembled matrices are strictly diagonally dominant (positive time
//! weight plus the Laplacian stencil), so no pivoting is needed; a vanishing
//! pivot is treated as a hard failure rather than silently producing NaNs.

use crate::error::{Error, Result};

const PIVOT_FLOOR: f64 = 1e-300;

/// Solves the tridiagonal system with `lower` (length n−1), `diag` (n),
/// `upper` (n−1) against `rhs` (n).
pub fn thomas_solve(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    assert!(n >= 1 && lower.len() == n - 1 && upper.len() == n - 1 && rhs.len() == n);
    let mut factor = TridiagFactor::new(lower, diag, upper)?;
    let mut x = rhs.to_vec();
    factor.solve_in_place(&mut x);
    Ok(x)
}

/// Precomputed forward-elimination data; the uniform schemes solve the same
/// matrix at every step, so the elimination is done once.
#[derive(Debug, Clone)]
pub struct TridiagFactor {
    multipliers: Vec<f64>,
    pivots: Vec<f64>,
    upper: Vec<f64>,
}

impl TridiagFactor {
    pub fn new(lower: &[f64], diag: &[f64], upper: &[f64]) -> Result<Self> {
        let n = diag.len();
        assert!(n >= 1 && lower.len() == n - 1 && upper.len() == n - 1);
        let mut multipliers = vec![0.0; n.saturating_sub(1)];
        let mut pivots = vec![0.0; n];
        pivots[0] = diag[0];
        if pivots[0].abs() < PIVOT_FLOOR {
            return Err(Error::SingularPivot { index: 0 });
        }
        for i in 1..n {
            let m = lower[i - 1] / pivots[i - 1];
            multipliers[i - 1] = m;
            pivots[i] = diag[i] - m * upper[i - 1];
            if pivots[i].abs() < PIVOT_FLOOR {
                return Err(Error::SingularPivot { index: i });
            }
        }
        Ok(Self {
            multipliers,
            pivots,
            upper: upper.to_vec(),
        })
    }

    /// Overwrites `rhs` with the solution.
    pub fn solve_in_place(&mut self, rhs: &mut [f64]) {
        let n = self.pivots.len();
        debug_assert_eq!(rhs.len(), n);
        for i in 1..n {
            rhs[i] -= self.multipliers[i - 1] * rhs[i - 1];
        }
        rhs[n - 1] /= self.pivots[n - 1];
        for i in (0..n - 1).rev() {
            rhs[i] = (rhs[i] - self.upper[i] * rhs[i + 1]) / self.pivots[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(lower: &[f64], diag: &[f64], upper: &[f64], x: &[f64], rhs: &[f64]) -> f64 {
        let n = diag.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            let mut ax = diag[i] * x[i];
            if i > 0 {
                ax += lower[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                ax += upper[i] * x[i + 1];
            }
            worst = worst.max((ax - rhs[i]).abs());
        }
        worst
    }

    #[test]
    fn identity_returns_rhs() {
        let rhs = vec![3.0, -1.5, 0.25, 7.0];
        let x = thomas_solve(&[0.0; 3], &[1.0; 4], &[0.0; 3], &rhs).unwrap();
        assert_eq!(x, rhs);
    }

    #[test]
    fn laplacian_plus_identity_round_trip() {
        let n = 200;
        let diag = vec![2.0 + 1.0; n];
        let off = vec![-1.0; n - 1];
        let truth: Vec<f64> = (0..n).map(|i| ((i * i) % 17) as f64 - 8.0).collect();
        // rhs = A * truth
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            rhs[i] = diag[i] * truth[i];
            if i > 0 {
                rhs[i] += off[i - 1] * truth[i - 1];
            }
            if i + 1 < n {
                rhs[i] += off[i] * truth[i + 1];
            }
        }
        let x = thomas_solve(&off, &diag, &off, &rhs).unwrap();
        for (xi, ti) in x.iter().zip(&truth) {
            assert!((xi - ti).abs() < 1e-12);
        }
        let norm = rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(residual(&off, &diag, &off, &x, &rhs) <= 1e-13 * norm);
    }

    #[test]
    fn three_by_three_against_cramer() {
        let lower = [2.0, -1.0];
        let diag = [4.0, 5.0, 3.0];
        let upper = [1.0, 0.5];
        let rhs = [1.0, -2.0, 4.0];
        // Cramer's rule on the dense 3x3.
        let a = [
            [diag[0], upper[0], 0.0],
            [lower[0], diag[1], upper[1]],
            [0.0, lower[1], diag[2]],
        ];
        let det3 = |m: &[[f64; 3]; 3]| {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        let det = det3(&a);
        let mut expect = [0.0; 3];
        for col in 0..3 {
            let mut ac = a;
            for row in 0..3 {
                ac[row][col] = rhs[row];
            }
            expect[col] = det3(&ac) / det;
        }
        let x = thomas_solve(&lower, &diag, &upper, &rhs).unwrap();
        for (xi, ei) in x.iter().zip(&expect) {
            assert!((xi - ei).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_pivot_is_a_hard_error() {
        let err = thomas_solve(&[1.0], &[0.0, 1.0], &[1.0], &[1.0, 1.0]);
        assert!(matches!(err, Err(Error::SingularPivot { index: 0 })));
    }
}
