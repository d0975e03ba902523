//! Recursive fast-history evaluation of the H3N3-2σ convolution.
//!
//! With the kernel compressed into exponentials, the history integral over
//! [t_0, t_{k−1/2}] collapses into one scalar accumulator per exponential:
//! F_m^k = e^{−s_m τ} F_m^{k−1} + A_m δ_t²p^k + B_m δ_t²p^{k−1}. Only the
//! final sub-interval [t_{k−1/2}, t_{k+σ}] keeps the exact power kernel. All
//! A/B-type quantities are integrals of a linear hat against a decaying
//! exponential; `exp_linear_integral` evaluates them in closed form with a
//! series fallback where e^{−x}-differences would cancel.

use crate::error::{Error, Result};
use crate::gamma::gamma;
use crate::mesh::GradedTemporalMesh;
use crate::soe::SoeApproximation;

/// φ(x) = (x − 1 + e^{−x}) / x, the relative defect of the exponential decay
/// over one interval. Series for small x, where the direct expression loses
/// half the digits to cancellation.
pub(crate) fn phi_decay(x: f64) -> f64 {
    if x < 1e-4 {
        x * (0.5 + x * (-1.0 / 6.0 + x * (1.0 / 24.0 - x / 120.0)))
    } else {
        (x + (-x).exp_m1()) / x
    }
}

/// ∫_{s1}^{s2} (a·s + b) e^{−μ(c−s)} ds in closed form, stable for μ(s2−s1)
/// anywhere from 1e−12 to overflow-of-e^{−x} territory.
pub fn exp_linear_integral(a: f64, b: f64, c: f64, mu: f64, s1: f64, s2: f64) -> f64 {
    debug_assert!(mu > 0.0 && s2 >= s1 && c >= s2);
    let h = s2 - s1;
    let x = mu * h;
    let q = a * s1 + b;
    let e2 = (-mu * (c - s2)).exp();
    (e2 / mu) * (-q * (-x).exp_m1() + a * h * phi_decay(x))
}

/// Level-independent ingredients of the uniform fast recursion.
#[derive(Debug, Clone)]
pub struct UniformFastCoeffs {
    /// e^{−s_m τ}, the one-step decay of each accumulator.
    pub decay: Vec<f64>,
    /// Weight of δ_t²p^k in the freshly absorbed panel [t_{k−3/2}, t_{k−1/2}].
    pub a: Vec<f64>,
    /// Weight of δ_t²p^{k−1} in that panel.
    pub b: Vec<f64>,
    /// Weight of δ_t²p^1 in the startup integral over [t_0, t_{1/2}].
    pub g1: Vec<f64>,
    /// Weight of δ_t²p^0 in the startup integral.
    pub k1: Vec<f64>,
    /// Exact last-interval weight τ^{2−α} (σ+1/2)^{2−α} / (2−α).
    pub stub: f64,
}

impl UniformFastCoeffs {
    pub fn new(soe: &SoeApproximation, sigma: f64, alpha: f64, tau: f64) -> Self {
        let c = (1.0 + sigma) * tau;
        let n = soe.n_exp();
        let mut decay = Vec::with_capacity(n);
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        let mut g1 = Vec::with_capacity(n);
        let mut k1 = Vec::with_capacity(n);
        for &s in soe.nodes() {
            decay.push((-s * tau).exp());
            // Panel [t_{k−3/2}, t_{k−1/2}] in coordinates centered at t_{k−1}.
            a.push(exp_linear_integral(1.0 / tau, 0.0, c, s, -0.5 * tau, 0.5 * tau));
            b.push(exp_linear_integral(-1.0 / tau, 1.0, c, s, -0.5 * tau, 0.5 * tau));
            // Startup panel [t_0, t_{1/2}] with the Hermite hats.
            g1.push(exp_linear_integral(1.5 / tau, -0.5, c, s, 0.0, 0.5 * tau));
            k1.push(exp_linear_integral(-1.5 / tau, 1.5, c, s, 0.0, 0.5 * tau));
        }
        let stub = tau.powf(2.0 - alpha) * (sigma + 0.5).powf(2.0 - alpha) / (2.0 - alpha);
        Self {
            decay,
            a,
            b,
            g1,
            k1,
            stub,
        }
    }
}

/// Per-step ingredients of the graded fast recursion (k ≥ 2).
#[derive(Debug, Clone)]
pub struct GradedFastCoeffs {
    pub decay: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// Exact last-interval weight 2 (σ_k τ_{k+1} + τ_k/2)^{2−α} / (2−α).
    pub stub: f64,
}

/// Decay, Ã_m^k, B̃_m^k and the last-interval stub for level k on a graded
/// mesh. The recursion shifts the kernel center from t_{k−1+σ_{k−1}} to
/// t_{k+σ_k}, hence the (1−σ_{k−1})τ_k + σ_k τ_{k+1} decay distance.
pub fn graded_fast_coeffs(
    k: usize,
    soe: &SoeApproximation,
    mesh: &GradedTemporalMesh,
) -> Result<GradedFastCoeffs> {
    if k < 2 || k > mesh.steps() - 1 {
        return Err(Error::InvalidParameter(format!(
            "graded fast coefficients need 2 <= k <= N-1, got k = {k}"
        )));
    }
    let alpha = mesh.order().alpha();
    let t = mesh.nodes();
    let eval = mesh.eval_point(k);
    let shift = (1.0 - mesh.sigma_k(k - 1)) * mesh.tau(k) + mesh.sigma_k(k) * mesh.tau(k + 1);
    let lo = mesh.half_node(k - 1);
    let hi = mesh.half_node(k);
    let denom = t[k + 1] - t[k - 2];
    let n = soe.n_exp();
    let mut decay = Vec::with_capacity(n);
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for &s in soe.nodes() {
        decay.push((-s * shift).exp());
        a.push(exp_linear_integral(
            6.0 / denom,
            -2.0 * (t[k] + t[k - 1] + t[k - 2]) / denom,
            eval,
            s,
            lo,
            hi,
        ));
        b.push(exp_linear_integral(
            -6.0 / denom,
            2.0 * (t[k + 1] + t[k] + t[k - 1]) / denom,
            eval,
            s,
            lo,
            hi,
        ));
    }
    let stub = 2.0 * (eval - hi).powf(2.0 - alpha) / (2.0 - alpha);
    Ok(GradedFastCoeffs {
        decay,
        a,
        b,
        stub,
    })
}

/// Startup weights for the graded accumulators: the integral of the graded
/// Hermite hats over [t_0, t_{1/2}] against e^{−s_m(t_{1+σ_1}−s)}. The
/// closed form follows from `exp_linear_integral` by parts, cross-checked
/// against quadrature in the tests.
pub fn graded_startup_coeffs(
    soe: &SoeApproximation,
    mesh: &GradedTemporalMesh,
) -> (Vec<f64>, Vec<f64>) {
    let t = mesh.nodes();
    let eval = mesh.eval_point(1);
    let hi = mesh.half_node(1);
    let t_three_half = 0.5 * (t[1] + t[2]);
    let mut g1 = Vec::with_capacity(soe.n_exp());
    let mut k1 = Vec::with_capacity(soe.n_exp());
    for &s in soe.nodes() {
        g1.push(exp_linear_integral(
            6.0 / t[2],
            -2.0 * t[1] / t[2],
            eval,
            s,
            t[0],
            hi,
        ));
        k1.push(exp_linear_integral(
            -3.0 / t[2],
            2.0 * t_three_half / t[2],
            eval,
            s,
            t[0],
            hi,
        ));
    }
    (g1, k1)
}

/// Scalar fast-history state: one accumulator per exponential plus the two
/// most recent second differences.
#[derive(Debug, Clone)]
pub struct FastHistoryState {
    pub level: usize,
    pub accumulators: Vec<f64>,
    pub d2_current: f64,
    pub d2_previous: f64,
}

/// State after the startup step (level 1): F_m^1 built from the closed-form
/// Hermite-panel integrals applied to δ_t²p^1 and δ_t²p^0.
pub fn init_fast_history_uniform(
    d2p0: f64,
    d2p1: f64,
    coeffs: &UniformFastCoeffs,
) -> FastHistoryState {
    let accumulators = coeffs
        .g1
        .iter()
        .zip(&coeffs.k1)
        .map(|(&g, &k)| g * d2p1 + k * d2p0)
        .collect();
    FastHistoryState {
        level: 1,
        accumulators,
        d2_current: d2p1,
        d2_previous: d2p0,
    }
}

/// One recursion step: F_m^k = e^{−s_m τ} F_m^{k−1} + A_m δ_t²p^k + B_m δ_t²p^{k−1}.
pub fn advance_fast_history_uniform(
    state: &FastHistoryState,
    d2pk: f64,
    coeffs: &UniformFastCoeffs,
) -> FastHistoryState {
    let d2prev = state.d2_current;
    let accumulators = state
        .accumulators
        .iter()
        .zip(coeffs.decay.iter().zip(coeffs.a.iter().zip(&coeffs.b)))
        .map(|(&f, (&e, (&a, &b)))| e * f + a * d2pk + b * d2prev)
        .collect();
    FastHistoryState {
        level: state.level + 1,
        accumulators,
        d2_current: d2pk,
        d2_previous: d2prev,
    }
}

/// Same recursion with per-level graded coefficients.
pub fn advance_fast_history_graded(
    state: &FastHistoryState,
    d2pk: f64,
    coeffs: &GradedFastCoeffs,
) -> FastHistoryState {
    let d2prev = state.d2_current;
    let accumulators = state
        .accumulators
        .iter()
        .zip(coeffs.decay.iter().zip(coeffs.a.iter().zip(&coeffs.b)))
        .map(|(&f, (&e, (&a, &b)))| e * f + a * d2pk + b * d2prev)
        .collect();
    FastHistoryState {
        level: state.level + 1,
        accumulators,
        d2_current: d2pk,
        d2_previous: d2prev,
    }
}

/// Fast evaluation of the discrete Caputo derivative at t_{k+σ} from a
/// level-k state: (1/Γ(2−α)) [Σ_m w_m F_m^k + stub · δ_t²p^k].
pub fn fast_caputo_value(
    state: &FastHistoryState,
    soe: &SoeApproximation,
    stub: f64,
    alpha: f64,
) -> f64 {
    let hist: f64 = soe
        .weights()
        .iter()
        .zip(&state.accumulators)
        .map(|(&w, &f)| w * f)
        .sum();
    (hist + stub * state.d2_current) / gamma(2.0 - alpha)
}
