//! Fractional order and temporal meshes.
//!
//! The schemes evaluate the Caputo derivative not at grid nodes but at the
//! superconvergence point t_{k+σ} (uniform) or t_{k+σ_k} (graded), with
//! σ = 1 − α/2. The offset is what lifts the composite interpolation to
//! second order, so it is derived, never chosen freely.

use crate::error::{Error, Result};

/// Fractional order α ∈ (1, 2) together with its superconvergence offset
/// σ = 1 − α/2 ∈ (0, 1/2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalOrder {
    alpha: f64,
    sigma: f64,
}

impl FractionalOrder {
    /// Validates α ∈ (1, 2) and derives σ.
    ///
    /// ```
    /// use fracwave::FractionalOrder;
    /// let order = FractionalOrder::new(1.5).unwrap();
    /// assert_eq!(order.sigma(), 0.25);
    /// assert!(FractionalOrder::new(2.0).is_err());
    /// ```
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(Error::InvalidAlpha { alpha });
        }
        Ok(Self {
            alpha,
            sigma: derive_sigma(alpha).expect("range checked above"),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// σ = 1 − α/2 for α ∈ (1, 2); rejects anything outside the open interval.
pub fn derive_sigma(alpha: f64) -> Result<f64> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::InvalidAlpha { alpha });
    }
    Ok(1.0 - alpha / 2.0)
}

/// Uniform temporal mesh t_k = k·τ, τ = T/N.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformTemporalMesh {
    t_final: f64,
    steps: usize,
    tau: f64,
}

impl UniformTemporalMesh {
    pub fn new(t_final: f64, steps: usize) -> Result<Self> {
        if !(t_final > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mesh horizon T = {t_final} must be positive"
            )));
        }
        if steps == 0 {
            return Err(Error::InvalidParameter("mesh needs N >= 1 steps".into()));
        }
        Ok(Self {
            t_final,
            steps,
            tau: t_final / steps as f64,
        })
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Node t_k = k·τ.
    pub fn node(&self, k: usize) -> f64 {
        k as f64 * self.tau
    }
}

/// Graded temporal mesh t_k = (k/N)^r · T.
///
/// For r > 1 the steps concentrate near t = 0 to compensate the typical
/// u_t ~ t^{α−1} weak initial regularity; r = 1 reproduces the uniform mesh
/// bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedTemporalMesh {
    t_final: f64,
    steps: usize,
    grading: f64,
    order: FractionalOrder,
    nodes: Vec<f64>,
}

impl GradedTemporalMesh {
    pub fn new(t_final: f64, steps: usize, grading: f64, order: FractionalOrder) -> Result<Self> {
        if !(t_final > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mesh horizon T = {t_final} must be positive"
            )));
        }
        if steps < 2 {
            return Err(Error::InvalidParameter(
                "graded mesh needs N >= 2 steps".into(),
            ));
        }
        if !(grading >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "grading exponent r = {grading} must be >= 1"
            )));
        }
        let n = steps as f64;
        let nodes = (0..=steps)
            .map(|k| {
                if grading == 1.0 {
                    // Same expression as the uniform mesh so that r = 1
                    // degenerates exactly, not merely to rounding.
                    k as f64 * (t_final / n)
                } else {
                    (k as f64 / n).powf(grading) * t_final
                }
            })
            .collect();
        Ok(Self {
            t_final,
            steps,
            grading,
            order,
            nodes,
        })
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn grading(&self) -> f64 {
        self.grading
    }

    pub fn order(&self) -> FractionalOrder {
        self.order
    }

    pub fn node(&self, k: usize) -> f64 {
        self.nodes[k]
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Step τ_k = t_k − t_{k−1}, 1 ≤ k ≤ N.
    pub fn tau(&self, k: usize) -> f64 {
        self.nodes[k] - self.nodes[k - 1]
    }

    /// Step ratio ρ_k = τ_k / τ_{k+1}, in (0, 1] for r ≥ 1.
    pub fn rho(&self, k: usize) -> f64 {
        self.tau(k) / self.tau(k + 1)
    }

    /// Offset σ_k = (1 − α/2)·ρ_k, always below 1/2.
    pub fn sigma_k(&self, k: usize) -> f64 {
        self.order.sigma() * self.rho(k)
    }

    /// Half node t_{k−1/2} = (t_k + t_{k−1})/2.
    pub fn half_node(&self, k: usize) -> f64 {
        0.5 * (self.nodes[k] + self.nodes[k - 1])
    }

    /// Evaluation point t_{k+σ_k} = t_k + σ_k·τ_{k+1}.
    pub fn eval_point(&self, k: usize) -> f64 {
        self.nodes[k] + self.sigma_k(k) * self.tau(k + 1)
    }
}
