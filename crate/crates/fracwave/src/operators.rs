//! Discrete Caputo-derivative operators on scalar time histories.
//!
//! These are the reference (direct-summation) forms used to audit both the
//! coefficient tables and the PDE schemes: H3N3-2σ on uniform and graded
//! meshes, the H3 startup operator at t_{1−α/3}, and the L2C baseline
//! weights. Analytic Caputo derivatives of powers t^μ serve as the exact
//! oracle throughout.

use crate::coeffs::{graded_coeff_table, uniform_coeff_table, uniform_table_with_offset};
use crate::error::{Error, Result};
use crate::gamma::gamma;
use crate::mesh::{derive_sigma, FractionalOrder, GradedTemporalMesh};

/// Solution samples p⁰..p^K at consecutive mesh nodes plus the initial slope
/// p'(t₀) consumed by the slope-corrected second difference δ_t²p⁰.
#[derive(Debug, Clone)]
pub struct TimeHistory {
    pub values: Vec<f64>,
    pub initial_slope: f64,
}

impl TimeHistory {
    pub fn new(values: Vec<f64>, initial_slope: f64) -> Self {
        Self {
            values,
            initial_slope,
        }
    }

    /// Samples p(t_k) on the first `levels + 1` nodes of a uniform mesh.
    pub fn sample_uniform(
        p: impl Fn(f64) -> f64,
        slope: f64,
        tau: f64,
        levels: usize,
    ) -> Self {
        let values = (0..=levels).map(|k| p(k as f64 * tau)).collect();
        Self::new(values, slope)
    }

    pub fn sample_graded(p: impl Fn(f64) -> f64, slope: f64, mesh: &GradedTemporalMesh) -> Self {
        let values = mesh.nodes().iter().map(|&t| p(t)).collect();
        Self::new(values, slope)
    }
}

/// Uniform second differences δ_t²p⁰..δ_t²p^{K−1} for a history of K+1
/// values: slope-corrected at level 0, centered elsewhere.
pub fn second_differences_uniform(history: &TimeHistory, tau: f64) -> Vec<f64> {
    let p = &history.values;
    assert!(p.len() >= 2, "second differences need at least two levels");
    let mut d2 = Vec::with_capacity(p.len() - 1);
    d2.push(2.0 / tau * ((p[1] - p[0]) / tau - history.initial_slope));
    for k in 1..p.len() - 1 {
        d2.push((p[k + 1] - 2.0 * p[k] + p[k - 1]) / (tau * tau));
    }
    d2
}

/// Graded second differences δ̂_t²p⁰..δ̂_t²p^{K−1}; the interior divisor is
/// τ̄_k = τ_k + τ_{k+1}, which makes δ̂_t²p^k ≈ p''/2 there.
pub fn second_differences_graded(history: &TimeHistory, mesh: &GradedTemporalMesh) -> Vec<f64> {
    let p = &history.values;
    assert!(p.len() >= 2);
    let tau1 = mesh.tau(1);
    let mut d2 = Vec::with_capacity(p.len() - 1);
    d2.push(2.0 / tau1 * ((p[1] - p[0]) / tau1 - history.initial_slope));
    for k in 1..p.len() - 1 {
        let tk = mesh.tau(k);
        let tk1 = mesh.tau(k + 1);
        d2.push(((p[k + 1] - p[k]) / tk1 - (p[k] - p[k - 1]) / tk) / (tk + tk1));
    }
    d2
}

/// H3N3-2σ value at t_{k+σ} on a uniform mesh:
/// (1/Γ(2−α)) Σ_{l=0}^{k} c_l^{(k,α)} δ_t²p^{k−l}.
///
/// Needs history levels 0..k+1 because δ_t²p^k reaches one level ahead.
pub fn caputo_h3n3_uniform(
    history: &TimeHistory,
    order: FractionalOrder,
    tau: f64,
    k: usize,
) -> Result<f64> {
    if history.values.len() < k + 2 {
        return Err(Error::Inconsistent(format!(
            "history has {} levels, H3N3 at k = {k} needs {}",
            history.values.len(),
            k + 2
        )));
    }
    let table = uniform_coeff_table(k, order.alpha(), tau)?;
    let d2 = second_differences_uniform(history, tau);
    let mut acc = 0.0;
    for (l, &c) in table.weights.iter().enumerate() {
        acc += c * d2[k - l];
    }
    Ok(acc / gamma(2.0 - order.alpha()))
}

/// Diagnostic variant with an explicit evaluation offset; used to measure how
/// the order collapses away from σ = 1 − α/2.
pub fn caputo_h3n3_uniform_with_offset(
    history: &TimeHistory,
    alpha: f64,
    tau: f64,
    k: usize,
    sigma: f64,
) -> Result<f64> {
    if history.values.len() < k + 2 {
        return Err(Error::Inconsistent("history too short".into()));
    }
    let table = uniform_table_with_offset(k, alpha, tau, sigma)?;
    let d2 = second_differences_uniform(history, tau);
    let mut acc = 0.0;
    for (l, &c) in table.weights.iter().enumerate() {
        acc += c * d2[k - l];
    }
    Ok(acc / gamma(2.0 - alpha))
}

/// Startup operator at t_{1−α/3}:
/// (1/Γ(3−α)) t_{1−α/3}^{2−α} · (2/τ)(δ_t p^{1/2} − p'(t₀)).
pub fn caputo_first_step(p0: f64, p1: f64, slope: f64, alpha: f64, tau: f64) -> Result<f64> {
    let _ = derive_sigma(alpha)?;
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!("tau = {tau} must be positive")));
    }
    let t_eval = (1.0 - alpha / 3.0) * tau;
    Ok(t_eval.powf(2.0 - alpha) / gamma(3.0 - alpha) * (2.0 / tau) * ((p1 - p0) / tau - slope))
}

/// H3N3-2σ_k value at t_{k+σ_k} on a graded mesh:
/// (1/Γ(2−α)) Σ_{l=0}^{k} c̃_l^{(k,α)} δ̂_t²p^{k−l}.
pub fn caputo_h3n3_graded(
    history: &TimeHistory,
    mesh: &GradedTemporalMesh,
    k: usize,
) -> Result<f64> {
    if history.values.len() < k + 2 {
        return Err(Error::Inconsistent(format!(
            "history has {} levels, graded H3N3 at k = {k} needs {}",
            history.values.len(),
            k + 2
        )));
    }
    let table = graded_coeff_table(k, mesh)?;
    let d2 = second_differences_graded(history, mesh);
    let mut acc = 0.0;
    for (l, &c) in table.weights.iter().enumerate() {
        acc += c * d2[k - l];
    }
    Ok(acc / gamma(2.0 - mesh.order().alpha()))
}

/// L2C weights c^{(α)}_{l,k} for l = 0..k+1 as a four-branch piecewise
/// power-difference table; the newest weight is always 1.
pub fn l2c_weights(k: usize, alpha: f64) -> Result<Vec<f64>> {
    if k < 1 {
        return Err(Error::InvalidParameter("L2C weights need k >= 1".into()));
    }
    let _ = derive_sigma(alpha)?;
    let s = 2.0 - alpha;
    let pw = |n: i64| -> f64 {
        debug_assert!(n >= 0);
        (n as f64).powf(s)
    };
    let mut w = vec![0.0; k + 2];
    for (l, wl) in w.iter_mut().enumerate() {
        let j = k as i64 - l as i64; // distance of the difference u^l − u^{l−1}
        *wl = if l >= k {
            pw(j + 2) - pw(j + 1)
        } else if l <= 1 {
            pw(j - 1) - pw(j)
        } else {
            pw(j + 2) - pw(j + 1) - pw(j) + pw(j - 1)
        };
    }
    Ok(w)
}

/// Exact Caputo derivative of t^μ for order α ∈ (1, 2):
/// Γ(μ+1)/Γ(μ+1−α) · t^{μ−α}.
pub fn analytic_caputo_power(mu: f64, alpha: f64, t: f64) -> Result<f64> {
    if !(mu > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "analytic Caputo oracle needs mu > 1, got {mu}"
        )));
    }
    let _ = derive_sigma(alpha)?;
    if t < 0.0 {
        return Err(Error::InvalidParameter(format!("t = {t} must be >= 0")));
    }
    if t == 0.0 {
        if mu > alpha {
            return Ok(0.0);
        }
        return Err(Error::InvalidParameter(format!(
            "t^{{mu-alpha}} diverges at t = 0 for mu = {mu} <= alpha = {alpha}"
        )));
    }
    Ok(gamma(mu + 1.0) / gamma(mu + 1.0 - alpha) * t.powf(mu - alpha))
}

/// One row of a truncation-error scan.
#[derive(Debug, Clone, Copy)]
pub struct ScanRow {
    pub n: usize,
    pub max_error: f64,
    /// log₂ of the error ratio against the previous row; `None` on the first.
    pub order: Option<f64>,
}

/// Max over k of |analytic − discrete| at t_{k+σ} for p = t^μ on meshes with
/// N from `n_list`, horizon T. The halving ratios approach 4 for C⁴ data.
pub fn truncation_error_scan(
    mu: f64,
    alpha: f64,
    n_list: &[usize],
    t_final: f64,
) -> Result<Vec<ScanRow>> {
    let order = FractionalOrder::new(alpha)?;
    let sigma = order.sigma();
    let mut rows: Vec<ScanRow> = Vec::with_capacity(n_list.len());
    for &n in n_list {
        if n < 2 {
            return Err(Error::InvalidParameter("scan needs N >= 2".into()));
        }
        let tau = t_final / n as f64;
        let slope = if mu > 1.0 { 0.0 } else { f64::NAN };
        let history = TimeHistory::sample_uniform(|t| t.powf(mu), slope, tau, n);
        let mut max_error = 0.0f64;
        for k in 1..n {
            let discrete = caputo_h3n3_uniform(&history, order, tau, k)?;
            let exact = analytic_caputo_power(mu, alpha, (k as f64 + sigma) * tau)?;
            max_error = max_error.max((discrete - exact).abs());
        }
        let order_est = rows
            .last()
            .map(|prev: &ScanRow| (prev.max_error / max_error).log2() / ((n as f64 / prev.n as f64).log2()));
        rows.push(ScanRow {
            n,
            max_error,
            order: order_est,
        });
    }
    Ok(rows)
}
