//! Quadrature oracle for the regularized incomplete beta function.
//!
//! Integrates the Beta density by adaptive Simpson quadrature and normalizes
//! by the full integral computed the same way, so the oracle shares no code
//! path (no log-gamma, no continued fraction) with the implementation it
//! checks.
//!
//! Shapes below one make the density singular at the corresponding endpoint;
//! those pieces are integrated under the substitutions u = s^alpha (left) or
//! v = (1-s)^beta (right), which bound the integrand. For shapes of one or
//! more the density itself is smooth and is integrated directly — the
//! substitutions must not be used there, because for large shapes they
//! compress the mass into a logarithmically thin sliver that defeats
//! bisection-based refinement.

/// I_x(alpha, beta) to roughly 1e-12 absolute accuracy.
pub fn inc_beta_oracle(alpha: f64, beta: f64, x: f64) -> f64 {
    assert!(alpha > 0.0 && beta > 0.0 && (0.0..=1.0).contains(&x));
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    // interior split point (the Beta mean)
    let m = alpha / (alpha + beta);

    let head_m = head_integral(alpha, beta, m);
    let tail_m = tail_integral(alpha, beta, m);
    let total = head_m + tail_m;

    let unnormalized = if x <= m {
        head_integral(alpha, beta, x)
    } else {
        total - tail_integral(alpha, beta, x)
    };
    (unnormalized / total).clamp(0.0, 1.0)
}

fn density(alpha: f64, beta: f64, s: f64) -> f64 {
    s.powf(alpha - 1.0) * (1.0 - s).powf(beta - 1.0)
}

/// ∫_0^t s^(α−1)(1−s)^(β−1) ds. For α < 1 the substitution u = s^α bounds
/// the left-endpoint singularity:
/// (1/α) ∫_0^(t^α) (1 − u^(1/α))^(β−1) du.
fn head_integral(alpha: f64, beta: f64, t: f64) -> f64 {
    if alpha >= 1.0 {
        return integrate(&|s: f64| density(alpha, beta, s), 0.0, t);
    }
    let upper = t.powf(alpha);
    if upper == 0.0 {
        return 0.0;
    }
    let g = |u: f64| {
        let base = (1.0 - u.powf(1.0 / alpha)).max(0.0);
        base.powf(beta - 1.0)
    };
    integrate(&g, 0.0, upper) / alpha
}

/// ∫_t^1 s^(α−1)(1−s)^(β−1) ds. For β < 1 the substitution v = (1−s)^β
/// bounds the right-endpoint singularity:
/// (1/β) ∫_0^((1−t)^β) (1 − v^(1/β))^(α−1) dv.
fn tail_integral(alpha: f64, beta: f64, t: f64) -> f64 {
    if beta >= 1.0 {
        return integrate(&|s: f64| density(alpha, beta, s), t, 1.0);
    }
    let upper = (1.0 - t).powf(beta);
    if upper == 0.0 {
        return 0.0;
    }
    let g = |v: f64| {
        let base = (1.0 - v.powf(1.0 / beta)).max(0.0);
        base.powf(alpha - 1.0)
    };
    integrate(&g, 0.0, upper) / beta
}

/// Adaptive Simpson with a relative tolerance: a coarse pass estimates the
/// magnitude, the adaptive pass then refines to `1e-13 * scale`.
fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if a >= b {
        return 0.0;
    }
    // coarse composite Simpson for the scale estimate
    let n = 256u32;
    let h = (b - a) / n as f64;
    let mut coarse = f(a) + f(b);
    for i in 1..n {
        let w = if i.is_multiple_of(2) { 2.0 } else { 4.0 };
        coarse += w * f(a + i as f64 * h);
    }
    coarse *= h / 3.0;

    let tol = coarse.abs().max(1e-300) * 1e-13;
    let fa = f(a);
    let fb = f(b);
    let mid = 0.5 * (a + b);
    let fm = f(mid);
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(f, a, b, fa, fm, fb, whole, tol, 64)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let mid = 0.5 * (a + b);
    let lm = 0.5 * (a + mid);
    let rm = 0.5 * (mid + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, mid, fa, flm, fm);
    let right = simpson(mid, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, mid, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive(f, mid, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
