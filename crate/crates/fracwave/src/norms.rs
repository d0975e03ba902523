//! Discrete norms on spatial grid functions with zero Dirichlet boundary.

use crate::error::{Error, Result};

/// Discrete L² norm ‖u‖ = sqrt(h Σ_{i=1}^{M−1} u_i²).
pub fn l2_norm(u: &[f64], h: f64) -> f64 {
    let m = u.len() - 1;
    let sum: f64 = u[1..m].iter().map(|&v| v * v).sum();
    (h * sum).sqrt()
}

/// Discrete H¹ seminorm |u|₁ = sqrt(h Σ_{i=0}^{M−1} (δ_x u_{i+1/2})²).
pub fn h1_seminorm(u: &[f64], h: f64) -> f64 {
    let sum: f64 = u.windows(2).map(|w| ((w[1] - w[0]) / h).powi(2)).sum();
    (h * sum).sqrt()
}

/// Max norm over all nodes including the boundary.
pub fn max_norm(u: &[f64]) -> f64 {
    u.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
}

/// Embedding check for zero-boundary grid functions:
/// ‖u‖_∞ ≤ (L/√6)|u|₁ and ‖u‖ ≤ (√L/2)|u|₁.
#[derive(Debug, Clone, Copy)]
pub struct EmbeddingReport {
    pub l2: f64,
    pub h1_semi: f64,
    pub max: f64,
    pub infinity_bound: f64,
    pub l2_bound: f64,
}

impl EmbeddingReport {
    pub fn holds(&self) -> bool {
        self.max <= self.infinity_bound + 1e-14 && self.l2 <= self.l2_bound + 1e-14
    }
}

/// Evaluates both embedding inequalities; rejects nonzero boundary values,
/// for which they do not hold.
pub fn check_embedding(u: &[f64], h: f64, length: f64) -> Result<EmbeddingReport> {
    if u.len() < 2 {
        return Err(Error::InvalidParameter("grid function too short".into()));
    }
    if u[0] != 0.0 || u[u.len() - 1] != 0.0 {
        return Err(Error::Inconsistent(
            "embedding check requires zero boundary values".into(),
        ));
    }
    let h1 = h1_seminorm(u, h);
    Ok(EmbeddingReport {
        l2: l2_norm(u, h),
        h1_semi: h1,
        max: max_norm(u),
        infinity_bound: length / 6.0f64.sqrt() * h1,
        l2_bound: length.sqrt() / 2.0 * h1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_field() {
        let u = vec![0.0; 11];
        assert_eq!(l2_norm(&u, 0.1), 0.0);
        assert_eq!(h1_seminorm(&u, 0.1), 0.0);
        assert_eq!(max_norm(&u), 0.0);
    }

    #[test]
    fn sine_l2_against_riemann_oracle() {
        // ∫₀¹ sin²(πx) dx = 1/2, so ‖u‖ → √(1/2) as the grid refines.
        let m = 1000;
        let h = 1.0 / m as f64;
        let u: Vec<f64> = (0..=m).map(|i| (PI * i as f64 * h).sin()).collect();
        assert!((l2_norm(&u, h) - 0.5f64.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn embedding_rejects_nonzero_boundary() {
        let u = vec![1.0, 0.5, 0.0];
        assert!(check_embedding(&u, 0.5, 1.0).is_err());
    }
}
