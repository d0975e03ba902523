//! Gauss quadrature node generation (Golub–Welsch).
//!
//! Only what the sum-of-exponentials builder needs: Gauss–Legendre on the
//! dyadic panels and Gauss–Jacobi with weight (1+x)^{γ−1} on the panel that
//! absorbs the s^{γ−1} endpoint singularity of the Laplace representation.

use nalgebra::DMatrix;

use crate::gamma::gamma;

/// Nodes and weights on [-1, 1] for the weight (1−x)^a (1+x)^b.
///
/// Eigen-decomposition of the symmetric Jacobi matrix; weights are
/// μ₀ · (first eigenvector component)² with μ₀ the weight-function mass.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2, "need at least two quadrature nodes");
    assert!(a > -1.0 && b > -1.0, "Jacobi exponents must exceed -1");
    let mut mat = DMatrix::<f64>::zeros(n, n);
    let mut diag = (b - a) / (2.0 + a + b);
    for i in 0..n - 1 {
        let i1 = (i + 1) as f64;
        let denom = 2.0 * i1 + a + b;
        let off = 2.0 / denom
            * (i1 * (i1 + a) * (i1 + b) * (i1 + a + b) / ((denom + 1.0) * (denom - 1.0))).sqrt();
        mat[(i, i)] = diag;
        mat[(i, i + 1)] = off;
        mat[(i + 1, i)] = off;
        diag = (b * b - a * a) / (denom * (denom + 2.0));
    }
    mat[(n - 1, n - 1)] = diag;

    let eigen = mat.symmetric_eigen();
    let mass = 2.0f64.powf(a + b + 1.0) * gamma(a + 1.0) * gamma(b + 1.0) / gamma(a + b + 2.0);
    let mut pairs: Vec<(f64, f64)> = eigen
        .eigenvalues
        .iter()
        .zip(eigen.eigenvectors.row(0).iter())
        .map(|(&x, &v0)| (x, mass * v0 * v0))
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    pairs.into_iter().unzip()
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    gauss_jacobi(n, 0.0, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        // Degree-15 exactness; check x^14 whose integral is 2/15.
        let got: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(14)).sum();
        assert!((got - 2.0 / 15.0).abs() < 1e-14);
        let mass: f64 = w.iter().sum();
        assert!((mass - 2.0).abs() < 1e-13);
    }

    #[test]
    fn jacobi_mass_and_first_moment() {
        let b = -0.5; // weight (1+x)^{-1/2}
        let (x, w) = gauss_jacobi(12, 0.0, b);
        // ∫ (1+x)^{-1/2} dx over [-1,1] = 2^{b+1}/(b+1) = 2√2.
        let mass: f64 = w.iter().sum();
        assert!((mass - 2.0 * 2.0f64.sqrt()).abs() < 1e-12);
        // ∫ x (1+x)^{-1/2} dx = 2√2 (x = (1+x) − 1 gives 2^{5/2}/3 − 2^{3/2}).
        let first: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi).sum();
        let expect = 2.0f64.powf(2.5) / 3.0 - 2.0f64.powf(1.5);
        assert!((first - expect).abs() < 1e-12);
        assert!(w.iter().all(|&wi| wi > 0.0));
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn jacobi_smooth_integrand_converges_fast() {
        // ∫_{-1}^{1} e^{x/4} (1+x)^{-0.3} dx: compare 10 vs 24 nodes.
        let f = |x: f64| (x / 4.0).exp();
        let eval = |n: usize| {
            let (x, w) = gauss_jacobi(n, 0.0, -0.3);
            x.iter().zip(&w).map(|(xi, wi)| wi * f(*xi)).sum::<f64>()
        };
        assert!((eval(10) - eval(24)).abs() < 1e-13);
    }
}
