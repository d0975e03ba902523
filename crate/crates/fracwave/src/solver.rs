//! Implicit time stepping for the fractional hyperbolic problem.
//!
//! Every scheme advances one tridiagonal solve per level:
//!
//! * `h3n3-direct` — H3N3-2σ on a uniform mesh, full O(N) history per step;
//! * `h3n3-fast` — same scheme with the history collapsed into
//!   sum-of-exponentials accumulators (O(N_exp) per step);
//! * `h3n3-graded` / `h3n3-graded-fast` — the σ_k variant on t_k = (k/N)^r T;
//! * `l2c` — the L2C baseline (order 3−α in time), for comparison runs.
//!
//! The startup level u¹ always comes from the H3-based equation at t_{1−α/3}.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::coeffs::{graded_coeff_table, uniform_coeff_table};
use crate::error::{Error, Result};
use crate::fast::{graded_fast_coeffs, graded_startup_coeffs, GradedFastCoeffs, UniformFastCoeffs};
use crate::gamma::gamma;
use crate::mesh::GradedTemporalMesh;
use crate::norms::l2_norm;
use crate::problem::ProblemSpec;
use crate::soe::build_soe;
use crate::tridiag::TridiagFactor;

/// Uniform spatial grid x_i = i·h, h = L/M.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    length: f64,
    intervals: usize,
    h: f64,
}

impl SpatialGrid {
    pub fn new(length: f64, intervals: usize) -> Result<Self> {
        if !(length > 0.0) {
            return Err(Error::InvalidParameter("grid length must be positive".into()));
        }
        if intervals < 2 {
            return Err(Error::InvalidParameter("grid needs M >= 2 intervals".into()));
        }
        Ok(Self {
            length,
            intervals,
            h: length / intervals as f64,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.h
    }
}

/// Scheme selector; the string forms are the CLI names.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    H3n3Direct,
    H3n3Fast,
    H3n3Graded,
    H3n3GradedFast,
    L2c,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::H3n3Direct,
        Scheme::H3n3Fast,
        Scheme::H3n3Graded,
        Scheme::H3n3GradedFast,
        Scheme::L2c,
    ];

    pub fn is_graded(&self) -> bool {
        matches!(self, Scheme::H3n3Graded | Scheme::H3n3GradedFast)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::H3n3Direct => "h3n3-direct",
            Scheme::H3n3Fast => "h3n3-fast",
            Scheme::H3n3Graded => "h3n3-graded",
            Scheme::H3n3GradedFast => "h3n3-graded-fast",
            Scheme::L2c => "l2c",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "h3n3-direct" => Ok(Scheme::H3n3Direct),
            "h3n3-fast" => Ok(Scheme::H3n3Fast),
            "h3n3-graded" => Ok(Scheme::H3n3Graded),
            "h3n3-graded-fast" => Ok(Scheme::H3n3GradedFast),
            "l2c" => Ok(Scheme::L2c),
            other => Err(Error::Config(format!(
                "unknown scheme '{other}' (expected h3n3-direct|h3n3-fast|h3n3-graded|h3n3-graded-fast|l2c)"
            ))),
        }
    }
}

/// Wall-clock accounting per solve phase.
#[derive(Debug, Clone, Copy, Default)]
pub struct Timings {
    pub setup_seconds: f64,
    pub step_seconds: f64,
    pub post_seconds: f64,
}

impl Timings {
    pub fn total(&self) -> f64 {
        self.setup_seconds + self.step_seconds + self.post_seconds
    }
}

/// Full trajectory of one solve.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub scheme: Scheme,
    /// Temporal nodes t_0..t_N (graded or uniform).
    pub times: Vec<f64>,
    /// field[k][i] = u_i^k, boundary columns identically zero.
    pub field: Vec<Vec<f64>>,
    /// Post-processed trajectory û (uniform-mesh schemes only; the staggered
    /// combination has no graded analogue). û⁰ = u⁰, û¹ = u¹.
    pub uhat: Option<Vec<Vec<f64>>>,
    /// Discrete L² norm of each level.
    pub level_l2: Vec<f64>,
    pub timings: Timings,
    pub h: f64,
}

impl SolveResult {
    /// max_{k ≥ from_level} ‖u^k − exact‖_∞ against the problem's exact
    /// solution.
    pub fn max_error(
        &self,
        problem: &ProblemSpec,
        grid: &SpatialGrid,
        from_level: usize,
    ) -> Option<f64> {
        if !problem.has_exact() {
            return None;
        }
        let mut worst = 0.0f64;
        for (k, level) in self.field.iter().enumerate().skip(from_level) {
            let t = self.times[k];
            for (i, &v) in level.iter().enumerate() {
                let exact = problem.exact(grid.node(i), t).unwrap();
                worst = worst.max((v - exact).abs());
            }
        }
        Some(worst)
    }

    /// Largest per-level L² norm, the quantity watched by the stability
    /// monitor.
    pub fn max_level_l2(&self) -> f64 {
        self.level_l2.iter().fold(0.0f64, |m, &v| m.max(v))
    }
}

/// û^{k+1} from three consecutive levels: the affine two-level combination
/// whose weights sum to one, exact for sequences linear in the level index.
pub fn uhat_postprocess(next: &[f64], cur: &[f64], prev: &[f64], sigma: f64) -> Vec<f64> {
    let w_plus = 0.5 + sigma;
    let w_minus = 0.5 - sigma;
    next.iter()
        .zip(cur.iter().zip(prev))
        .map(|(&n, (&c, &p))| {
            (1.5 - sigma) * (w_plus * n + w_minus * c) - w_minus * (w_plus * c + w_minus * p)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// shared pieces
// ---------------------------------------------------------------------------

/// δ_x²u at the interior nodes, zero in the boundary slots.
fn laplacian(u: &[f64], h: f64) -> Vec<f64> {
    let m = u.len() - 1;
    let mut out = vec![0.0; m + 1];
    let h2 = h * h;
    for i in 1..m {
        out[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2;
    }
    out
}

/// Interior tridiagonal factor for w_t·u − w_s·δ_x²u = rhs.
fn implicit_factor(w_t: f64, w_s: f64, grid: &SpatialGrid) -> Result<TridiagFactor> {
    let m = grid.intervals();
    let h2 = grid.h() * grid.h();
    let diag = vec![w_t + 2.0 * w_s / h2; m - 1];
    let off = vec![-w_s / h2; m - 2];
    TridiagFactor::new(&off, &diag, &off)
}

fn sample_initial(problem: &ProblemSpec, grid: &SpatialGrid) -> (Vec<f64>, Vec<f64>) {
    let m = grid.intervals();
    let mut u0 = vec![0.0; m + 1];
    let mut psi = vec![0.0; m + 1];
    for i in 1..m {
        u0[i] = problem.initial_value(grid.node(i));
        psi[i] = problem.initial_slope(grid.node(i));
    }
    (u0, psi)
}

/// Solves the startup system for u¹ at t_{1−α/3} = (1−α/3)τ₁:
/// (1/Γ(3−α)) t_{1−α/3}^{2−α} δ_t²u⁰ = δ_x²[(1−α/3)u¹ + (α/3)u⁰] + f^{1−α/3}.
pub fn first_step_solve(problem: &ProblemSpec, grid: &SpatialGrid, tau1: f64) -> Result<Vec<f64>> {
    if !(tau1 > 0.0) {
        return Err(Error::InvalidParameter("first step needs tau > 0".into()));
    }
    let (u0, psi) = sample_initial(problem, grid);
    first_step_from(problem, grid, tau1, &u0, &psi)
}

fn first_step_from(
    problem: &ProblemSpec,
    grid: &SpatialGrid,
    tau1: f64,
    u0: &[f64],
    psi: &[f64],
) -> Result<Vec<f64>> {
    let alpha = problem.order.alpha();
    let m = grid.intervals();
    let t_eval = (1.0 - alpha / 3.0) * tau1;
    let kappa = t_eval.powf(2.0 - alpha) / gamma(3.0 - alpha);
    let w_t = 2.0 * kappa / (tau1 * tau1);
    let w_s = 1.0 - alpha / 3.0;
    let mut factor = implicit_factor(w_t, w_s, grid)?;
    let lap0 = laplacian(u0, grid.h());
    let mut rhs = vec![0.0; m - 1];
    for i in 1..m {
        rhs[i - 1] = w_t * u0[i]
            + (2.0 * kappa / tau1) * psi[i]
            + (alpha / 3.0) * lap0[i]
            + problem.source(grid.node(i), t_eval);
    }
    factor.solve_in_place(&mut rhs);
    let mut u1 = vec![0.0; m + 1];
    u1[1..m].copy_from_slice(&rhs);
    Ok(u1)
}

fn finalize(
    scheme: Scheme,
    times: Vec<f64>,
    field: Vec<Vec<f64>>,
    sigma_for_uhat: Option<f64>,
    grid: &SpatialGrid,
    setup: f64,
    stepping: f64,
) -> SolveResult {
    let post_start = Instant::now();
    let uhat = sigma_for_uhat.map(|sigma| {
        let mut uh: Vec<Vec<f64>> = Vec::with_capacity(field.len());
        uh.push(field[0].clone());
        if field.len() > 1 {
            uh.push(field[1].clone());
        }
        for k in 2..field.len() {
            uh.push(uhat_postprocess(&field[k], &field[k - 1], &field[k - 2], sigma));
        }
        uh
    });
    let level_l2 = field.iter().map(|u| l2_norm(u, grid.h())).collect();
    SolveResult {
        scheme,
        times,
        field,
        uhat,
        level_l2,
        timings: Timings {
            setup_seconds: setup,
            step_seconds: stepping,
            post_seconds: post_start.elapsed().as_secs_f64(),
        },
        h: grid.h(),
    }
}

fn validate_steps(n: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidParameter("time stepping needs N >= 1".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// H3N3-2σ, uniform mesh, direct history
// ---------------------------------------------------------------------------

pub fn solve_h3n3_direct(
    problem: &ProblemSpec,
    grid: &SpatialGrid,
    n: usize,
) -> Result<SolveResult> {
    validate_steps(n)?;
    let setup_start = Instant::now();
    let alpha = problem.order.alpha();
    let sigma = problem.order.sigma();
    let tau = problem.horizon / n as f64;
    let m = grid.intervals();
    let inv_gamma = 1.0 / gamma(2.0 - alpha);
    let (u0, psi) = sample_initial(problem, grid);
    let setup = setup_start.elapsed().as_secs_f64();

    let step_start = Instant::now();
    let mut field = Vec::with_capacity(n + 1);
    field.push(u0);
    field.push(first_step_from(problem, grid, tau, &field[0], &psi)?);

    // d2[j] = δ_t²u^j, slope-corrected at level 0.
    let mut d2: Vec<Vec<f64>> = Vec::with_capacity(n);
    d2.push(
        (0..=m)
            .map(|i| 2.0 / tau * ((field[1][i] - field[0][i]) / tau - psi[i]))
            .collect(),
    );

    let w_s = 0.5 * (0.5 + sigma);
    let mut factor: Option<(f64, TridiagFactor)> = None;
    for k in 1..n {
        let table = uniform_coeff_table(k, alpha, tau)?;
        let c0 = table.weights[0];
        let w_t = inv_gamma * c0 / (tau * tau);
        // c_0 is level-independent for k >= 2, so the factor is reused there.
        let stale = factor.as_ref().map_or(true, |(wt, _)| *wt != w_t);
        if stale {
            factor = Some((w_t, implicit_factor(w_t, w_s, grid)?));
        }
        let lap_cur = laplacian(&field[k], grid.h());
        let lap_prev = laplacian(&field[k - 1], grid.h());
        let t_eval = (k as f64 + sigma) * tau;
        let mut rhs = vec![0.0; m - 1];
        for i in 1..m {
            let mut hist = 0.0;
            for l in 1..=k {
                hist += table.weights[l] * d2[k - l][i];
            }
            rhs[i - 1] = inv_gamma * c0 * (2.0 * field[k][i] - field[k - 1][i]) / (tau * tau)
                - inv_gamma * hist
                + 0.5 * (0.5 + sigma) * lap_cur[i]
                + 0.5 * (0.5 - sigma) * (lap_cur[i] + lap_prev[i])
                + problem.source(grid.node(i), t_eval);
        }
        factor.as_mut().unwrap().1.solve_in_place(&mut rhs);
        let mut next = vec![0.0; m + 1];
        next[1..m].copy_from_slice(&rhs);
        d2.push(
            (0..=m)
                .map(|i| (next[i] - 2.0 * field[k][i] + field[k - 1][i]) / (tau * tau))
                .collect(),
        );
        field.push(next);
    }
    let stepping = step_start.elapsed().as_secs_f64();
    let times = (0..=n).map(|k| k as f64 * tau).collect();
    Ok(finalize(Scheme::H3n3Direct, times, field, Some(sigma), grid, setup, stepping))
}

// ---------------------------------------------------------------------------
// H3N3-2σ, uniform mesh, sum-of-exponentials history
// ---------------------------------------------------------------------------

pub fn solve_h3n3_fast(
    problem: &ProblemSpec,
    grid: &SpatialGrid,
    n: usize,
    soe_eps: f64,
) -> Result<SolveResult> {
    validate_steps(n)?;
    let setup_start = Instant::now();
    let alpha = problem.order.alpha();
    let sigma = problem.order.sigma();
    let tau = problem.horizon / n as f64;
    let m = grid.intervals();
    let inv_gamma = 1.0 / gamma(2.0 - alpha);
    let (u0, psi) = sample_initial(problem, grid);

    // Kernel distances span [στ, T]; στ is the cut-off time.
    let soe = build_soe(alpha - 1.0, soe_eps, sigma * tau, problem.horizon)?;
    let coeffs = UniformFastCoeffs::new(&soe, sigma, alpha, tau);
    let n_exp = soe.n_exp();
    let w = soe.weights();
    let weight_a: f64 = w.iter().zip(&coeffs.a).map(|(&w, &a)| w * a).sum::<f64>() + coeffs.stub;
    let weight_b: f64 = w.iter().zip(&coeffs.b).map(|(&w, &b)| w * b).sum();
    let weight_g: f64 = w.iter().zip(&coeffs.g1).map(|(&w, &g)| w * g).sum::<f64>() + coeffs.stub;
    let weight_k: f64 = w.iter().zip(&coeffs.k1).map(|(&w, &k)| w * k).sum();
    let w_decay: Vec<f64> = w.iter().zip(&coeffs.decay).map(|(&w, &e)| w * e).collect();
    let setup = setup_start.elapsed().as_secs_f64();

    let step_start = Instant::now();
    let mut field = Vec::with_capacity(n + 1);
    field.push(u0);
    field.push(first_step_from(problem, grid, tau, &field[0], &psi)?);

    let mut d2_prev: Vec<f64> = (0..=m)
        .map(|i| 2.0 / tau * ((field[1][i] - field[0][i]) / tau - psi[i]))
        .collect();
    let mut d2_cur = vec![0.0; m + 1];
    // acc[(i−1)·n_exp + j] = F_{j,i} at the interior node i.
    let mut acc = vec![0.0f64; (m - 1) * n_exp];

    let w_s = 0.5 * (0.5 + sigma);
    let mut factor_startup = implicit_factor(inv_gamma * weight_g / (tau * tau), w_s, grid)?;
    let mut factor_recur = implicit_factor(inv_gamma * weight_a / (tau * tau), w_s, grid)?;
    for k in 1..n {
        let startup = k == 1;
        let w_time = if startup { weight_g } else { weight_a };
        let lap_cur = laplacian(&field[k], grid.h());
        let lap_prev = laplacian(&field[k - 1], grid.h());
        let t_eval = (k as f64 + sigma) * tau;
        let mut rhs = vec![0.0; m - 1];
        for i in 1..m {
            let hist = if startup {
                weight_k * d2_prev[i]
            } else {
                let row = &acc[(i - 1) * n_exp..i * n_exp];
                let decayed: f64 = row.iter().zip(&w_decay).map(|(&f, &wd)| wd * f).sum();
                decayed + weight_b * d2_prev[i]
            };
            rhs[i - 1] = inv_gamma * w_time * (2.0 * field[k][i] - field[k - 1][i]) / (tau * tau)
                - inv_gamma * hist
                + 0.5 * (0.5 + sigma) * lap_cur[i]
                + 0.5 * (0.5 - sigma) * (lap_cur[i] + lap_prev[i])
                + problem.source(grid.node(i), t_eval);
        }
        if startup {
            factor_startup.solve_in_place(&mut rhs);
        } else {
            factor_recur.solve_in_place(&mut rhs);
        }
        let mut next = vec![0.0; m + 1];
        next[1..m].copy_from_slice(&rhs);
        for i in 1..m {
            d2_cur[i] = (next[i] - 2.0 * field[k][i] + field[k - 1][i]) / (tau * tau);
        }
        for i in 1..m {
            let row = &mut acc[(i - 1) * n_exp..i * n_exp];
            let (dk, dk1) = (d2_cur[i], d2_prev[i]);
            if startup {
                for (fm, (g, k1)) in row.iter_mut().zip(coeffs.g1.iter().zip(&coeffs.k1)) {
                    *fm = g * dk + k1 * dk1;
                }
            } else {
                for (fm, ((e, a), b)) in row
                    .iter_mut()
                    .zip(coeffs.decay.iter().zip(&coeffs.a).zip(&coeffs.b))
                {
                    *fm = e * *fm + a * dk + b * dk1;
                }
            }
        }
        std::mem::swap(&mut d2_prev, &mut d2_cur);
        field.push(next);
    }
    let stepping = step_start.elapsed().as_secs_f64();
    let times = (0..=n).map(|k| k as f64 * tau).collect();
    Ok(finalize(Scheme::H3n3Fast, times, field, Some(sigma), grid, setup, stepping))
}

// ---------------------------------------------------------------------------
// Graded mesh (direct and fast)
// ---------------------------------------------------------------------------

enum GradedLevelOps {
    Direct { weights: Vec<f64> },
    FastStartup { w_time: f64, w_b: f64 },
    FastRecur {
        w_time: f64,
        w_b: f64,
        w_decay: Vec<f64>,
        coeffs: GradedFastCoeffs,
    },
}

pub fn solve_graded(
    problem: &ProblemSpec,
    grid: &SpatialGrid,
    mesh: &GradedTemporalMesh,
    fast: bool,
    soe_eps: f64,
) -> Result<SolveResult> {
    if (mesh.t_final() - problem.horizon).abs() > 1e-12 * problem.horizon {
        return Err(Error::Inconsistent(
            "graded mesh horizon differs from the problem horizon".into(),
        ));
    }
    if mesh.order().alpha() != problem.order.alpha() {
        return Err(Error::Inconsistent(
            "graded mesh fractional order differs from the problem order".into(),
        ));
    }
    let n = mesh.steps();
    let setup_start = Instant::now();
    let alpha = problem.order.alpha();
    let m = grid.intervals();
    let inv_gamma = 1.0 / gamma(2.0 - alpha);
    let (u0, psi) = sample_initial(problem, grid);

    let soe = if fast {
        // Smallest kernel distance over all levels: τ_k/2 + σ_k τ_{k+1}.
        let mut delta = f64::INFINITY;
        for k in 1..n {
            delta = delta.min(0.5 * mesh.tau(k) + mesh.sigma_k(k) * mesh.tau(k + 1));
        }
        Some(build_soe(alpha - 1.0, soe_eps, delta, problem.horizon)?)
    } else {
        None
    };
    let startup_coeffs = soe.as_ref().map(|s| graded_startup_coeffs(s, mesh));
    let setup = setup_start.elapsed().as_secs_f64();

    let step_start = Instant::now();
    let mut field = Vec::with_capacity(n + 1);
    field.push(u0);
    field.push(first_step_from(problem, grid, mesh.tau(1), &field[0], &psi)?);

    let tau1 = mesh.tau(1);
    let mut d2: Vec<Vec<f64>> = Vec::with_capacity(n);
    d2.push(
        (0..=m)
            .map(|i| 2.0 / tau1 * ((field[1][i] - field[0][i]) / tau1 - psi[i]))
            .collect(),
    );

    let n_exp = soe.as_ref().map_or(0, |s| s.n_exp());
    let mut acc = vec![0.0f64; if fast { (m - 1) * n_exp } else { 0 }];

    for k in 1..n {
        let tau_next = mesh.tau(k + 1);
        let tau_bar = mesh.tau(k) + tau_next;
        let rho = mesh.rho(k);
        let sigma_k = mesh.sigma_k(k);
        let w_new = (0.5 * rho + sigma_k) / (0.5 * (rho + 1.0))
;
        let w_old = (0.5 - sigma_k) / (0.5 * (rho + 1.0));
        let t_eval = mesh.eval_point(k);

        let ops = if let Some(soe) = &soe {
            let w = soe.weights();
            if k == 1 {
                let (g1, k1) = startup_coeffs.as_ref().unwrap();
                let stub = 2.0 * (t_eval - mesh.half_node(1)).powf(2.0 - alpha) / (2.0 - alpha);
                GradedLevelOps::FastStartup {
                    w_time: w.iter().zip(g1).map(|(&w, &g)| w * g).sum::<f64>() + stub,
                    w_b: w.iter().zip(k1).map(|(&w, &kk)| w * kk).sum(),
                }
            } else {
                let coeffs = graded_fast_coeffs(k, soe, mesh)?;
                GradedLevelOps::FastRecur {
                    w_time: w.iter().zip(&coeffs.a).map(|(&w, &a)| w * a).sum::<f64>()
                        + coeffs.stub,
                    w_b: w.iter().zip(&coeffs.b).map(|(&w, &b)| w * b).sum(),
                    w_decay: w.iter().zip(&coeffs.decay).map(|(&w, &e)| w * e).collect(),
                    coeffs,
                }
            }
        } else {
            GradedLevelOps::Direct {
                weights: graded_coeff_table(k, mesh)?.weights,
            }
        };

        let c0 = match &ops {
            GradedLevelOps::Direct { weights } => weights[0],
            GradedLevelOps::FastStartup { w_time, .. } => *w_time,
            GradedLevelOps::FastRecur { w_time, .. } => *w_time,
        };
        let w_t = inv_gamma * c0 / (tau_next * tau_bar);
        let mut factor = implicit_factor(w_t, 0.5 * w_new, grid)?;
        let lap_cur = laplacian(&field[k], grid.h());
        let lap_prev = laplacian(&field[k - 1], grid.h());
        let mut rhs = vec![0.0; m - 1];
        for i in 1..m {
            let hist = match &ops {
                GradedLevelOps::Direct { weights } => {
                    let mut acc_hist = 0.0;
                    for l in 1..=k {
                        acc_hist += weights[l] * d2[k - l][i];
                    }
                    acc_hist
                }
                GradedLevelOps::FastStartup { w_b, .. } => w_b * d2[0][i],
                GradedLevelOps::FastRecur { w_b, w_decay, .. } => {
                    let row = &acc[(i - 1) * n_exp..i * n_exp];
                    let decayed: f64 = row.iter().zip(w_decay).map(|(&f, &wd)| wd * f).sum();
                    decayed + w_b * d2[k - 1][i]
                }
            };
            let explicit_d2 =
                (field[k][i] / tau_next + (field[k][i] - field[k - 1][i]) / mesh.tau(k)) / tau_bar;
            rhs[i - 1] = inv_gamma * c0 * explicit_d2 - inv_gamma * hist
                + 0.5 * w_new * lap_cur[i]
                + 0.5 * w_old * (lap_cur[i] + lap_prev[i])
                + problem.source(grid.node(i), t_eval);
        }
        factor.solve_in_place(&mut rhs);
        let mut next = vec![0.0; m + 1];
        next[1..m].copy_from_slice(&rhs);
        let d2_new: Vec<f64> = (0..=m)
            .map(|i| {
                ((next[i] - field[k][i]) / tau_next
                    - (field[k][i] - field[k - 1][i]) / mesh.tau(k))
                    / tau_bar
            })
            .collect();
        match &ops {
            GradedLevelOps::Direct { .. } => {}
            GradedLevelOps::FastStartup { .. } => {
                let (g1, k1) = startup_coeffs.as_ref().unwrap();
                for i in 1..m {
                    let row = &mut acc[(i - 1) * n_exp..i * n_exp];
                    let (dk, dk1) = (d2_new[i], d2[0][i]);
                    for (fm, (g, kk)) in row.iter_mut().zip(g1.iter().zip(k1)) {
                        *fm = g * dk + kk * dk1;
                    }
                }
            }
            GradedLevelOps::FastRecur { coeffs, .. } => {
                for i in 1..m {
                    let row = &mut acc[(i - 1) * n_exp..i * n_exp];
                    let (dk, dk1) = (d2_new[i], d2[k - 1][i]);
                    for (fm, ((e, a), b)) in row
                        .iter_mut()
                        .zip(coeffs.decay.iter().zip(&coeffs.a).zip(&coeffs.b))
                    {
                        *fm = e * *fm + a * dk + b * dk1;
                    }
                }
            }
        }
        d2.push(d2_new);
        field.push(next);
    }
    let stepping = step_start.elapsed().as_secs_f64();
    let scheme = if fast {
        Scheme::H3n3GradedFast
    } else {
        Scheme::H3n3Graded
    };
    Ok(finalize(
        scheme,
        mesh.nodes().to_vec(),
        field,
        None,
        grid,
        setup,
        stepping,
    ))
}

// ---------------------------------------------------------------------------
// L2C baseline
// ---------------------------------------------------------------------------

pub fn solve_l2c(problem: &ProblemSpec, grid: &SpatialGrid, n: usize) -> Result<SolveResult> {
    validate_steps(n)?;
    let setup_start = Instant::now();
    let alpha = problem.order.alpha();
    let tau = problem.horizon / n as f64;
    let m = grid.intervals();
    let s = 2.0 - alpha;
    // Power table j^{2−α} for the distance-indexed weights.
    let powers: Vec<f64> = (0..=n + 2).map(|j| (j as f64).powf(s)).collect();
    let a_t = tau.powf(-alpha) / (2.0 * gamma(3.0 - alpha));
    let (u0, psi) = sample_initial(problem, grid);
    let setup = setup_start.elapsed().as_secs_f64();

    let step_start = Instant::now();
    let mut field = Vec::with_capacity(n + 1);
    field.push(u0);
    field.push(first_step_from(problem, grid, tau, &field[0], &psi)?);

    // v[l] = u^l − u^{l−1}, with u^{−1} = u¹ − 2τψ folded into v[0].
    let mut v: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    v.push(
        (0..=m)
            .map(|i| field[0][i] - field[1][i] + 2.0 * tau * psi[i])
            .collect(),
    );
    v.push((0..=m).map(|i| field[1][i] - field[0][i]).collect());

    let mut factor = implicit_factor(a_t, 0.25, grid)?;
    for k in 1..n {
        let lap_cur = laplacian(&field[k], grid.h());
        let lap_prev = laplacian(&field[k - 1], grid.h());
        let mut rhs = vec![0.0; m - 1];
        for i in 1..m {
            let mut hist = 0.0;
            for (l, vl) in v.iter().enumerate().take(k + 1) {
                let j = (k - l) as isize;
                let weight = if l >= k {
                    powers[(j + 2) as usize] - powers[(j + 1) as usize]
                } else if l <= 1 {
                    powers[(j - 1) as usize] - powers[j as usize]
                } else {
                    powers[(j + 2) as usize] - powers[(j + 1) as usize] - powers[j as usize]
                        + powers[(j - 1) as usize]
                };
                hist += weight * vl[i];
            }
            rhs[i - 1] = a_t * field[k][i] - a_t * hist
                + 0.25 * (2.0 * lap_cur[i] + lap_prev[i])
                + problem.source(grid.node(i), k as f64 * tau);
        }
        factor.solve_in_place(&mut rhs);
        let mut next = vec![0.0; m + 1];
        next[1..m].copy_from_slice(&rhs);
        v.push((0..=m).map(|i| next[i] - field[k][i]).collect());
        field.push(next);
    }
    let stepping = step_start.elapsed().as_secs_f64();
    let times = (0..=n).map(|k| k as f64 * tau).collect();
    let sigma = problem.order.sigma();
    Ok(finalize(Scheme::L2c, times, field, Some(sigma), grid, setup, stepping))
}

/// Scheme dispatcher used by the harness and the CLI.
pub fn solve(
    problem: &ProblemSpec,
    grid: &SpatialGrid,
    n: usize,
    scheme: Scheme,
    grading: f64,
    soe_eps: f64,
) -> Result<SolveResult> {
    match scheme {
        Scheme::H3n3Direct => solve_h3n3_direct(problem, grid, n),
        Scheme::H3n3Fast => solve_h3n3_fast(problem, grid, n, soe_eps),
        Scheme::L2c => solve_l2c(problem, grid, n),
        Scheme::H3n3Graded | Scheme::H3n3GradedFast => {
            let mesh = GradedTemporalMesh::new(problem.horizon, n, grading, problem.order)?;
            solve_graded(
                problem,
                grid,
                &mesh,
                scheme == Scheme::H3n3GradedFast,
                soe_eps,
            )
        }
    }
}
