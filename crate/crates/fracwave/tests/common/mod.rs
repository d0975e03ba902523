//! Shared oracles for the integration tests.
//!
//! The adaptive quadrature here is deliberately independent of every
//! production code path: the crate evaluates closed-form antiderivatives,
//! the tests re-integrate the defining integrals numerically and compare.

#![allow(dead_code)]

/// Adaptive Simpson on [a, b] to absolute tolerance `tol` (floored at the
/// rounding noise of the local estimate, so impossibly tight requests
/// terminate instead of recursing to the bottom everywhere).
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        let tol_eff = tol.max(4.0 * f64::EPSILON * whole.abs());
        if depth == 0 || delta.abs() <= 15.0 * tol_eff {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 26)
}

/// ∫_lo^hi hat(x)·e^{−s(eval−x)} dx by chunked adaptive Simpson: pieces of
/// width ≈ 4/s walking down from the dominant (hi) end keep each piece
/// non-stiff, so the oracle stays relative-accurate even when the integrand
/// spans hundreds of orders of magnitude across the panel.
pub fn exp_hat_quadrature(
    hat: &dyn Fn(f64) -> f64,
    s: f64,
    eval: f64,
    lo: f64,
    hi: f64,
) -> f64 {
    let width = hi - lo;
    let chunk = (4.0 / s).min(width);
    let integrand = |x: f64| hat(x) * (-s * (eval - x)).exp();
    let mut total = 0.0;
    let mut x_hi = hi;
    for _ in 0..20_000 {
        let x_lo = (x_hi - chunk).max(lo);
        let piece = adaptive_simpson(&integrand, x_lo, x_hi, 0.0);
        total += piece;
        if x_lo <= lo || piece.abs() < 1e-40 * total.abs() {
            break;
        }
        x_hi = x_lo;
    }
    total
}

/// Quadrature evaluation of the uniform convolution weights from their
/// defining integrals (hat functions against (t_{k+σ}−s)^{1−α}). The final
/// stub is an elementary power integral and is evaluated exactly.
pub fn uniform_table_by_quadrature(k: usize, alpha: f64, tau: f64) -> Vec<f64> {
    assert!(k >= 1);
    let sigma = 1.0 - alpha / 2.0;
    let t = |j: f64| j * tau;
    let t_eval = (k as f64 + sigma) * tau;
    let kernel = move |s: f64| (t_eval - s).powf(1.0 - alpha);
    let tol = 1e-15 * tau.powf(2.0 - alpha).max(1e-15);

    let mut a = vec![0.0; k + 1];
    let mut b = vec![0.0; k + 1];
    // H3 rising hat on [t0, t_{1/2}].
    a[1] = adaptive_simpson(
        &|s| (s - t(1.0 / 3.0)) / (t(1.0) - t(1.0 / 3.0)) * kernel(s),
        0.0,
        0.5 * tau,
        tol,
    );
    for l in 2..=k {
        let tl = t(l as f64);
        a[l] = adaptive_simpson(
            &|s| (s - (tl - tau)) / tau * kernel(s),
            tl - 1.5 * tau,
            tl - 0.5 * tau,
            tol,
        );
    }
    for l in 1..k {
        let tl = t(l as f64);
        b[l] = adaptive_simpson(
            &|s| (tl + tau - s) / tau * kernel(s),
            tl - 0.5 * tau,
            tl + 0.5 * tau,
            tol,
        );
    }
    // ∫_{t_{k−1/2}}^{t_{k+σ}} (t_{k+σ}−s)^{1−α} ds = (σ+1/2)^{2−α} τ^{2−α}/(2−α).
    b[k] = (sigma + 0.5).powf(2.0 - alpha) * tau.powf(2.0 - alpha) / (2.0 - alpha);

    let mut c = vec![0.0; k + 1];
    for l in 0..k {
        c[l] = a[k - l] + b[k - l];
    }
    c[k] = adaptive_simpson(
        &|s| (t(1.0) - s) / (t(1.0) - t(1.0 / 3.0)) * kernel(s),
        0.0,
        0.5 * tau,
        tol,
    );
    c
}

/// Quadrature evaluation of the graded convolution weights from the
/// mesh-dependent hat integrals.
pub fn graded_table_by_quadrature(k: usize, mesh: &fracwave::GradedTemporalMesh) -> Vec<f64> {
    let alpha = mesh.order().alpha();
    let t = mesh.nodes();
    let t_eval = mesh.eval_point(k);
    let kernel = move |s: f64| (t_eval - s).powf(1.0 - alpha);
    let tol = 1e-16;

    let mut a = vec![0.0; k + 1];
    let mut b = vec![0.0; k + 1];
    a[1] = adaptive_simpson(
        &|s| (6.0 * s - 2.0 * t[1]) / t[2] * kernel(s),
        t[0],
        mesh.half_node(1),
        tol,
    );
    for l in 2..=k {
        let denom = t[l + 1] - t[l - 2];
        let shift = t[l] + t[l - 1] + t[l - 2];
        a[l] = adaptive_simpson(
            &|s| (6.0 * s - 2.0 * shift) / denom * kernel(s),
            mesh.half_node(l - 1),
            mesh.half_node(l),
            tol,
        );
    }
    for l in 1..k {
        let denom = t[l + 2] - t[l - 1];
        let shift = t[l + 2] + t[l + 1] + t[l];
        b[l] = adaptive_simpson(
            &|s| (2.0 * shift - 6.0 * s) / denom * kernel(s),
            mesh.half_node(l),
            mesh.half_node(l + 1),
            tol,
        );
    }
    b[k] = 2.0 * (t_eval - mesh.half_node(k)).powf(2.0 - alpha) / (2.0 - alpha);

    let mut c = vec![0.0; k + 1];
    for l in 0..k {
        c[l] = a[k - l] + b[k - l];
    }
    let t_three_half = 0.5 * (t[1] + t[2]);
    c[k] = adaptive_simpson(
        &|s| (2.0 * t_three_half - 3.0 * s) / t[2] * kernel(s),
        t[0],
        mesh.half_node(1),
        tol,
    );
    c
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(f64::MIN_POSITIVE)
}
