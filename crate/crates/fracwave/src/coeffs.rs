//! Discrete-convolution weights of the H3N3-2σ formula.
//!
//! The weight c_l^{(k,α)} multiplies the second difference δ_t²p^{k−l} in the
//! discrete Caputo derivative at t_{k+σ}. Each weight is an integral of a
//! piecewise-linear interpolation hat against the kernel (t_{k+σ}−s)^{1−α};
//! all production paths evaluate the exact power-law antiderivatives, never
//! quadrature, so that quadrature error cannot contaminate convergence-order
//! measurements. The integral definitions survive in the test suite as an
//! independent oracle.
//!
//! Index convention: entry `weights[l]` is the coefficient of δ_t²p^{k−l},
//! so l = 0 is the newest level and l = k the oldest (the slope-corrected
//! δ_t²p⁰).

use crate::error::{Error, Result};
use crate::mesh::{derive_sigma, FractionalOrder, GradedTemporalMesh};

/// Which mesh family a table was built for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshTag {
    Uniform,
    Graded,
}

/// Convolution weights for one time level k.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    pub level: usize,
    pub alpha: f64,
    pub weights: Vec<f64>,
    pub mesh: MeshTag,
}

impl CoefficientTable {
    /// Number of weights, always level + 1.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// u_hi^p − (u_hi − width)^p for 0 ≤ width ≤ u_hi, p > 0, without the
/// catastrophic cancellation of the naive subtraction when width ≪ u_hi.
/// Adjacent-interval weights at large k subtract power values that agree in
/// the first several digits; this keeps them at full precision.
pub(crate) fn pow_diff(u_hi: f64, width: f64, p: f64) -> f64 {
    debug_assert!(width >= 0.0 && width <= u_hi);
    if width == 0.0 {
        return 0.0;
    }
    if width == u_hi {
        return u_hi.powf(p);
    }
    // u_hi^p (1 - (1 - width/u_hi)^p) via log1p/expm1.
    -u_hi.powf(p) * (p * (-width / u_hi).ln_1p()).exp_m1()
}

// ---------------------------------------------------------------------------
// Uniform closed forms, all in units of τ^{2−α}. The argument u is the
// kernel distance in steps: u = k + σ − l for the piece attached to level l.
// ---------------------------------------------------------------------------

/// Rising N3 hat over [t_{l−3/2}, t_{l−1/2}], valid for 2 ≤ l ≤ k.
fn a_generic(u: f64, alpha: f64) -> f64 {
    let s2 = 2.0 - alpha;
    let s3 = 3.0 - alpha;
    pow_diff(u + 1.5, 1.0, s3) / (s2 * s3)
        - ((u + 1.5).powf(s2) + (u + 0.5).powf(s2)) / (2.0 * s2)
}

/// Falling N3 hat over [t_{l−1/2}, t_{l+1/2}], valid for 1 ≤ l ≤ k−1.
fn b_generic(u: f64, alpha: f64) -> f64 {
    let s2 = 2.0 - alpha;
    let s3 = 3.0 - alpha;
    -pow_diff(u + 0.5, 1.0, s3) / (s2 * s3)
        + (3.0 * (u + 0.5).powf(s2) - (u - 0.5).powf(s2)) / (2.0 * s2)
}

/// Rising H3 hat over [t_0, t_{1/2}] (the l = 1 piece); kps = k + σ.
fn a1_special(kps: f64, alpha: f64) -> f64 {
    let s2 = 2.0 - alpha;
    let s3 = 3.0 - alpha;
    1.5 * (pow_diff(kps, 0.5, s3) / (s2 * s3)
        - kps.powf(s2) / (3.0 * s2)
        - (kps - 0.5).powf(s2) / (6.0 * s2))
}

/// Final stub ∫_{t_{k−1/2}}^{t_{k+σ}} (t_{k+σ}−s)^{1−α} ds, an elementary
/// power integral; vanishing first moment at σ = 1 − α/2 is what buys the
/// second order.
fn b_stub(sigma: f64, alpha: f64) -> f64 {
    let s2 = 2.0 - alpha;
    (sigma + 0.5).powf(s2) / s2
}

/// Falling H3 hat over [t_0, t_{1/2}] (the δ_t²p⁰ weight); kps = k + σ.
fn ck_h3(kps: f64, alpha: f64) -> f64 {
    let s2 = 2.0 - alpha;
    let s3 = 3.0 - alpha;
    1.5 * (-pow_diff(kps, 0.5, s3) / (s2 * s3) + kps.powf(s2) / s2
        - (kps - 0.5).powf(s2) / (2.0 * s2))
}

/// Weights c_0^{(k,α)} … c_k^{(k,α)} on a uniform mesh with step τ.
///
/// ```
/// use fracwave::coeffs::uniform_coeff_table;
/// let table = uniform_coeff_table(1, 1.5, 1.0).unwrap();
/// // c_0 − c_1 = (1−σ)(1+σ)^{2−α} / ((2−α)(3−α)) = √1.25 at α = 3/2, τ = 1.
/// let diff = table.weights[0] - table.weights[1];
/// assert!((diff - 1.25f64.sqrt()).abs() < 1e-14);
/// ```
pub fn uniform_coeff_table(k: usize, alpha: f64, tau: f64) -> Result<CoefficientTable> {
    let sigma = derive_sigma(alpha)?;
    uniform_table_with_offset(k, alpha, tau, sigma)
}

/// Same table but with an explicit evaluation offset; only σ = 1 − α/2 gives
/// the second-order formula, anything else drops to order 3 − α. Exposed so
/// the sensitivity of the superconvergence point can be measured.
pub fn uniform_table_with_offset(
    k: usize,
    alpha: f64,
    tau: f64,
    sigma: f64,
) -> Result<CoefficientTable> {
    if k < 1 {
        return Err(Error::InvalidParameter("coefficient level k must be >= 1".into()));
    }
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!("tau = {tau} must be positive")));
    }
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::InvalidAlpha { alpha });
    }
    let scale = tau.powf(2.0 - alpha);
    let mut weights = vec![0.0; k + 1];
    if k == 1 {
        weights[0] = scale * (a1_special(1.0 + sigma, alpha) + b_stub(sigma, alpha));
        weights[1] = scale * ck_h3(1.0 + sigma, alpha);
    } else {
        weights[0] = scale * (a_generic(sigma, alpha) + b_stub(sigma, alpha));
        for (l, w) in weights.iter_mut().enumerate().take(k - 1).skip(1) {
            let u = sigma + l as f64;
            *w = scale * (a_generic(u, alpha) + b_generic(u, alpha));
        }
        weights[k - 1] = scale
            * (a1_special(k as f64 + sigma, alpha) + b_generic(sigma + (k - 1) as f64, alpha));
        weights[k] = scale * ck_h3(k as f64 + sigma, alpha);
    }
    Ok(CoefficientTable {
        level: k,
        alpha,
        weights,
        mesh: MeshTag::Uniform,
    })
}

// ---------------------------------------------------------------------------
// Graded weights: every hat is (a·s + b) on some interval, integrated against
// (t_{k+σ_k}−s)^{1−α}. The substitution u = t_{k+σ_k}−s reduces each piece to
// two power terms, evaluated below. No quadrature anywhere.
// ---------------------------------------------------------------------------

/// ∫_{s1}^{s2} (a·s + b)(c−s)^{1−α} ds by the exact two-term antiderivative.
pub(crate) fn power_linear_integral(
    a: f64,
    b: f64,
    c: f64,
    s1: f64,
    s2: f64,
    alpha: f64,
) -> f64 {
    let s2a = 2.0 - alpha;
    let s3a = 3.0 - alpha;
    let u_hi = c - s1;
    let width = s2 - s1;
    (a * c + b) * pow_diff(u_hi, width, s2a) / s2a - a * pow_diff(u_hi, width, s3a) / s3a
}

/// Weights c̃_0^{(k,α)} … c̃_k^{(k,α)} on a graded mesh, paired with the
/// graded second differences δ̂_t² (whose interior values carry half the
/// curvature of the uniform δ_t², hence the doubled hats here).
pub fn graded_coeff_table(k: usize, mesh: &GradedTemporalMesh) -> Result<CoefficientTable> {
    if k < 1 || k > mesh.steps() - 1 {
        return Err(Error::InvalidParameter(format!(
            "graded coefficient level k = {k} outside [1, N-1] with N = {}",
            mesh.steps()
        )));
    }
    let alpha = mesh.order().alpha();
    let t = mesh.nodes();
    let eval = mesh.eval_point(k);
    let mut a_til = vec![0.0; k + 1];
    let mut b_til = vec![0.0; k + 1];
    // l = 1 piece lives on the H3 interval [t_0, t_{1/2}].
    let t_three_half = 0.5 * (t[1] + t[2]);
    a_til[1] = power_linear_integral(
        6.0 / t[2],
        -2.0 * t[1] / t[2],
        eval,
        t[0],
        mesh.half_node(1),
        alpha,
    );
    for l in 2..=k {
        let denom = t[l + 1] - t[l - 2];
        a_til[l] = power_linear_integral(
            6.0 / denom,
            -2.0 * (t[l] + t[l - 1] + t[l - 2]) / denom,
            eval,
            mesh.half_node(l - 1),
            mesh.half_node(l),
            alpha,
        );
    }
    for l in 1..k {
        let denom = t[l + 2] - t[l - 1];
        b_til[l] = power_linear_integral(
            -6.0 / denom,
            2.0 * (t[l + 2] + t[l + 1] + t[l]) / denom,
            eval,
            mesh.half_node(l),
            mesh.half_node(l + 1),
            alpha,
        );
    }
    // Final stub: ∫ 2 (t_{k+σ_k}−s)^{1−α} ds over [t_{k−1/2}, t_{k+σ_k}].
    b_til[k] = 2.0 * (eval - mesh.half_node(k)).powf(2.0 - alpha) / (2.0 - alpha);

    let mut weights = vec![0.0; k + 1];
    for l in 0..k {
        weights[l] = a_til[k - l] + b_til[k - l];
    }
    // Oldest entry: falling H3 hat (2 t_{3/2} − 3s)/t_2 over [t_0, t_{1/2}].
    weights[k] = power_linear_integral(
        -3.0 / t[2],
        2.0 * t_three_half / t[2],
        eval,
        t[0],
        mesh.half_node(1),
        alpha,
    );
    Ok(CoefficientTable {
        level: k,
        alpha,
        weights,
        mesh: MeshTag::Graded,
    })
}

// ---------------------------------------------------------------------------
// Property report
// ---------------------------------------------------------------------------

/// One failed inequality, with the signed margin that should have been
/// positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub family: PropertyFamily,
    pub k: usize,
    pub alpha: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropertyFamily {
    /// Strict decrease c_0 > c_1 > … > c_k.
    Decrease,
    /// Lower bound c_k > (3/8)(k+σ)^{1−α} τ^{2−α}.
    LowerBound,
    /// 4σ c_0 − (1+2σ) c_1 > 0.
    SigmaCombination,
    /// Σ_{m≤k} c_{m−1}^{(m)} < (8σ+21) T^{2−α} / (16(1+2σ)σ).
    RunningSum,
}

impl std::fmt::Display for PropertyFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            PropertyFamily::Decrease => "decrease",
            PropertyFamily::LowerBound => "lower-bound",
            PropertyFamily::SigmaCombination => "sigma-combination",
            PropertyFamily::RunningSum => "running-sum",
        };
        f.write_str(name)
    }
}

/// Outcome of scanning the coefficient inequalities over k and α.
#[derive(Debug, Clone)]
pub struct PropertyReport {
    pub k_max: usize,
    pub tau: f64,
    pub alphas: Vec<f64>,
    pub violations: Vec<Violation>,
    pub checks: u64,
}

impl PropertyReport {
    pub fn all_pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Scans the four inequality families for every k ≤ k_max and every α in the
/// grid. The history weights at distance l ≤ k−3 are shared between levels,
/// so the scan walks each α once in O(k_max) instead of materialising every
/// level's table; the exhaustive per-level equivalence of that walk is pinned
/// by tests on small k.
pub fn check_coefficient_properties(
    k_max: usize,
    alpha_grid: &[f64],
    tau: f64,
) -> Result<PropertyReport> {
    if k_max < 1 {
        return Err(Error::InvalidParameter("k_max must be >= 1".into()));
    }
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!("tau = {tau} must be positive")));
    }
    for &alpha in alpha_grid {
        let _ = FractionalOrder::new(alpha)?;
    }
    // Horizon consistent with levels up to k_max (the schemes use k ≤ N−1).
    let t_final = (k_max as f64 + 1.0) * tau;
    let mut violations = Vec::new();
    let mut checks: u64 = 0;
    for &alpha in alpha_grid {
        let sigma = derive_sigma(alpha)?;
        let scale = tau.powf(2.0 - alpha);
        let sum_bound =
            (8.0 * sigma + 21.0) * t_final.powf(2.0 - alpha) / (16.0 * (1.0 + 2.0 * sigma) * sigma);

        // Interior weights shared by all levels: index l is the distance from
        // the evaluation point.
        let interior_len = k_max.saturating_sub(1).max(1);
        let mut interior = vec![0.0; interior_len];
        interior[0] = scale * (a_generic(sigma, alpha) + b_stub(sigma, alpha));
        for (l, w) in interior.iter_mut().enumerate().skip(1) {
            let u = sigma + l as f64;
            *w = scale * (a_generic(u, alpha) + b_generic(u, alpha));
        }
        for l in 1..interior.len() {
            checks += 1;
            let margin = interior[l - 1] - interior[l];
            if margin <= 0.0 {
                violations.push(Violation {
                    family: PropertyFamily::Decrease,
                    k: l + 2, // first level whose table contains both entries
                    alpha,
                    margin,
                });
            }
        }

        let mut running_sum = 0.0;
        for k in 1..=k_max {
            let kps = k as f64 + sigma;
            let (c0, c1, c_second_last, c_last) = if k == 1 {
                let c0 = scale * (a1_special(kps, alpha) + b_stub(sigma, alpha));
                let c1 = scale * ck_h3(kps, alpha);
                (c0, c1, c0, c1)
            } else {
                let c_second_last = scale
                    * (a1_special(kps, alpha) + b_generic(sigma + (k - 1) as f64, alpha));
                let c_last = scale * ck_h3(kps, alpha);
                let c0 = interior[0];
                let c1 = if k == 2 { c_second_last } else { interior[1] };
                (c0, c1, c_second_last, c_last)
            };

            // Tail of the strict decrease: interior prefix is checked above,
            // here the junction to the two oldest entries.
            checks += 2;
            if k >= 2 {
                let junction = interior[k - 2] - c_second_last;
                if junction <= 0.0 {
                    violations.push(Violation {
                        family: PropertyFamily::Decrease,
                        k,
                        alpha,
                        margin: junction,
                    });
                }
            }
            let tail = c_second_last - c_last;
            if tail <= 0.0 {
                violations.push(Violation {
                    family: PropertyFamily::Decrease,
                    k,
                    alpha,
                    margin: tail,
                });
            }

            checks += 1;
            let lower = c_last - 0.375 * kps.powf(1.0 - alpha) * scale;
            if lower <= 0.0 {
                violations.push(Violation {
                    family: PropertyFamily::LowerBound,
                    k,
                    alpha,
                    margin: lower,
                });
            }

            checks += 1;
            let combo = 4.0 * sigma * c0 - (1.0 + 2.0 * sigma) * c1;
            if combo <= 0.0 {
                violations.push(Violation {
                    family: PropertyFamily::SigmaCombination,
                    k,
                    alpha,
                    margin: combo,
                });
            }

            checks += 1;
            running_sum += c_second_last; // c_{k−1}^{(k)}, the δ_t²p¹ weight
            let sum_margin = sum_bound - running_sum;
            if sum_margin <= 0.0 {
                violations.push(Violation {
                    family: PropertyFamily::RunningSum,
                    k,
                    alpha,
                    margin: sum_margin,
                });
            }
        }
    }
    Ok(PropertyReport {
        k_max,
        tau,
        alphas: alpha_grid.to_vec(),
        violations,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::FractionalOrder;

    #[test]
    fn k1_difference_matches_closed_form() {
        // c_0^{(1,α)} − c_1^{(1,α)} = (1−σ)(1+σ)^{2−α} / ((2−α)(3−α)).
        for alpha in [1.1, 1.5, 1.9] {
            let sigma = derive_sigma(alpha).unwrap();
            let t = uniform_coeff_table(1, alpha, 1.0).unwrap();
            let expect =
                (1.0 - sigma) * (1.0 + sigma).powf(2.0 - alpha) / ((2.0 - alpha) * (3.0 - alpha));
            let got = t.weights[0] - t.weights[1];
            assert!(((got - expect) / expect).abs() < 1e-14, "alpha = {alpha}");
        }
    }

    #[test]
    fn k1_alpha_15_value() {
        let t = uniform_coeff_table(1, 1.5, 1.0).unwrap();
        assert!((t.weights[0] - t.weights[1] - 1.25f64.sqrt()).abs() < 1e-12);
        assert!((t.weights[0] - t.weights[1] - 1.118_033_988_749_895).abs() < 1e-12);
    }

    #[test]
    fn monotone_and_lower_bound_example() {
        // k = 5, α = 1.9, τ = 0.01.
        let (k, alpha, tau) = (5usize, 1.9, 0.01);
        let t = uniform_coeff_table(k, alpha, tau).unwrap();
        for l in 1..=k {
            assert!(t.weights[l - 1] > t.weights[l]);
        }
        let sigma = derive_sigma(alpha).unwrap();
        let bound = 0.375 * (k as f64 + sigma).powf(1.0 - alpha) * tau.powf(2.0 - alpha);
        assert!(t.weights[k] > bound);
    }

    #[test]
    fn history_weights_are_level_stable_up_to_k_minus_3() {
        // Entries at distance l ≤ k−3 are built from the same closed forms
        // with the same inputs, hence bitwise equal across levels.
        for alpha in [1.05, 1.3, 1.5, 1.8, 1.95] {
            for k in 3..40usize {
                let cur = uniform_coeff_table(k, alpha, 0.037).unwrap();
                let prev = uniform_coeff_table(k - 1, alpha, 0.037).unwrap();
                for l in 0..=k - 3 {
                    let rel = ((cur.weights[l] - prev.weights[l]) / prev.weights[l]).abs();
                    assert!(rel <= 1e-15, "alpha={alpha} k={k} l={l} rel={rel:.2e}");
                }
            }
        }
    }

    #[test]
    fn second_newest_entry_is_not_level_stable() {
        // At level k−1 the distance-(k−2) weight uses the Hermite
        // first-interval hat; at level k it is a generic Newton hat. The two
        // genuinely differ, so stability stops at distance k−3.
        let cur = uniform_coeff_table(3, 1.5, 1.0).unwrap();
        let prev = uniform_coeff_table(2, 1.5, 1.0).unwrap();
        assert!((cur.weights[1] - prev.weights[1]).abs() > 1e-3);
    }

    #[test]
    fn property_scan_matches_exhaustive_tables_small_k() {
        // The O(k_max) walk must agree with literally materialising every
        // level's table.
        let (k_max, tau) = (64usize, 0.05);
        for alpha in [1.1, 1.5, 1.9] {
            let report = check_coefficient_properties(k_max, &[alpha], tau).unwrap();
            assert!(report.all_pass(), "scan found violations at alpha={alpha}");
            let sigma = derive_sigma(alpha).unwrap();
            let t_final = (k_max as f64 + 1.0) * tau;
            let bound = (8.0 * sigma + 21.0) * t_final.powf(2.0 - alpha)
                / (16.0 * (1.0 + 2.0 * sigma) * sigma);
            let mut sum = 0.0;
            for k in 1..=k_max {
                let t = uniform_coeff_table(k, alpha, tau).unwrap();
                for l in 1..=k {
                    assert!(t.weights[l - 1] > t.weights[l], "k={k} l={l}");
                }
                assert!(
                    t.weights[k]
                        > 0.375 * (k as f64 + sigma).powf(1.0 - alpha) * tau.powf(2.0 - alpha)
                );
                assert!(4.0 * sigma * t.weights[0] - (1.0 + 2.0 * sigma) * t.weights[1] > 0.0);
                sum += t.weights[k - 1];
                assert!(sum < bound, "running sum at k={k}");
            }
        }
    }

    #[test]
    fn property_scan_stress_near_alpha_two() {
        let report = check_coefficient_properties(3, &[1.999_999], 1.0).unwrap();
        assert!(report.all_pass());
    }

    #[test]
    fn graded_r1_matches_uniform_with_convention_factor() {
        // On the uniform degeneracy the graded hats carry a factor 2 for all
        // but the oldest entry, mirroring the halved interior δ̂_t².
        let order = FractionalOrder::new(1.5).unwrap();
        let (n, k) = (32usize, 8usize);
        let mesh = GradedTemporalMesh::new(1.0, n, 1.0, order).unwrap();
        let graded = graded_coeff_table(k, &mesh).unwrap();
        let uniform = uniform_coeff_table(k, 1.5, 1.0 / n as f64).unwrap();
        for l in 0..k {
            let rel = ((graded.weights[l] - 2.0 * uniform.weights[l]) / uniform.weights[l]).abs();
            assert!(rel < 1e-12, "l={l} rel={rel:.2e}");
        }
        let rel = ((graded.weights[k] - uniform.weights[k]) / uniform.weights[k]).abs();
        assert!(rel < 1e-12);
    }

    #[test]
    fn graded_weights_positive() {
        for (alpha, r) in [(1.3, 2.0), (1.9, 3.0), (1.5, 1.5)] {
            let order = FractionalOrder::new(alpha).unwrap();
            let mesh = GradedTemporalMesh::new(1.0, 16, r, order).unwrap();
            for k in 1..16 {
                let t = graded_coeff_table(k, &mesh).unwrap();
                for (l, w) in t.weights.iter().enumerate() {
                    assert!(*w > 0.0, "alpha={alpha} r={r} k={k} l={l} w={w}");
                }
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(uniform_coeff_table(0, 1.5, 0.1).is_err());
        assert!(uniform_coeff_table(3, 1.5, 0.0).is_err());
        assert!(uniform_coeff_table(3, 2.5, 0.1).is_err());
        let order = FractionalOrder::new(1.5).unwrap();
        let mesh = GradedTemporalMesh::new(1.0, 8, 2.0, order).unwrap();
        assert!(graded_coeff_table(0, &mesh).is_err());
        assert!(graded_coeff_table(8, &mesh).is_err());
    }

    #[test]
    fn pow_diff_agrees_with_naive_and_stays_stable() {
        // Where the naive difference is well conditioned the two must agree;
        // where it is not, pow_diff still matches a higher-precision route.
        let p = 1.3;
        let naive = 5.0f64.powf(p) - 4.0f64.powf(p);
        assert!((pow_diff(5.0, 1.0, p) - naive).abs() < 1e-14);
        // Tiny relative width: compare against the first-order expansion
        // p * u^{p-1} * w with a second-order correction bound.
        let (u, w) = (1.0e4, 1.0e-6);
        let got = pow_diff(u, w, p);
        let lead = p * u.powf(p - 1.0) * w;
        assert!(((got - lead) / lead).abs() < 1e-9);
    }
}
