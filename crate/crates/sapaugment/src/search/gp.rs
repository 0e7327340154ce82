//! Gaussian-process surrogate with a squared-exponential ARD kernel.
//!
//! Inputs live in the unit cube (the search space handles the transform,
//! including log-scaled dimensions), targets are standardized internally.
//! Kernel hyper-parameters are chosen by maximizing the log marginal
//! likelihood with a multi-start coordinate search; the covariance is
//! factorized by Cholesky with a jitter ladder from 1e-10 to 1e-4.

use rand::Rng;

use crate::error::{Error, Result};
use crate::seeding::stream;

/// Fitting knobs. Defaults balance fit quality against the cost of the many
/// refits a constant-liar suggestion loop performs.
#[derive(Debug, Clone, Copy)]
pub struct GpConfig {
    /// Lower bound for the fitted noise variance.
    pub noise_floor: f64,
    /// Random multi-start candidates for the likelihood search.
    pub n_starts: usize,
    /// Candidates kept for coordinate refinement.
    pub refine_top: usize,
    /// Coordinate-descent sweeps per refined candidate.
    pub sweeps: usize,
}

impl Default for GpConfig {
    fn default() -> Self {
        GpConfig { noise_floor: 1e-10, n_starts: 6, refine_top: 2, sweeps: 2 }
    }
}

/// Kernel hyper-parameters of a fitted model.
#[derive(Debug, Clone, PartialEq)]
pub struct GpHyperparams {
    /// One ARD length-scale per input dimension (unit-cube coordinates).
    pub length_scales: Vec<f64>,
    pub signal_var: f64,
    pub noise_var: f64,
}

/// Fitted Gaussian-process posterior.
#[derive(Debug, Clone)]
pub struct GpModel {
    x: Vec<Vec<f64>>,
    y_std: Vec<f64>,
    y_mean: f64,
    y_scale: f64,
    hyper: GpHyperparams,
    /// Lower-triangular Cholesky factor of K + (noise + jitter) I, row-major.
    chol: Vec<f64>,
    /// (K + noise I)^-1 y_standardized.
    alpha: Vec<f64>,
    jitter: f64,
}

const JITTER_LADDER: [f64; 5] = [0.0, 1e-10, 1e-8, 1e-6, 1e-4];

impl GpModel {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn hyperparams(&self) -> &GpHyperparams {
        &self.hyper
    }

    /// Diagonal jitter the factorization needed, if any.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Standard deviation of the fitted observation noise in target units.
    pub fn noise_std(&self) -> f64 {
        self.y_scale * self.hyper.noise_var.sqrt()
    }

    /// Posterior mean and standard deviation of the latent function at a
    /// unit-cube point, in the original target units.
    pub fn predict(&self, x_unit: &[f64]) -> (f64, f64) {
        let n = self.x.len();
        let mut k_star = vec![0.0; n];
        for (i, xi) in self.x.iter().enumerate() {
            k_star[i] = kernel(&self.hyper, xi, x_unit);
        }
        let mean_std: f64 = k_star.iter().zip(&self.alpha).map(|(k, a)| k * a).sum();
        // var = k(x,x) − ‖L⁻¹ k*‖²
        let v = solve_lower(&self.chol, n, &k_star);
        let explained: f64 = v.iter().map(|vi| vi * vi).sum();
        let var = (self.hyper.signal_var - explained).max(0.0);
        (self.y_mean + self.y_scale * mean_std, self.y_scale * var.sqrt())
    }

    /// A new model over the same hyper-parameters with one extra
    /// observation; used by the constant-liar loop to condition on lies
    /// without re-estimating the kernel. The lie keeps the base model's
    /// standardization constants.
    pub fn with_extra(&self, x_unit: Vec<f64>, y: f64) -> Result<GpModel> {
        let mut x = self.x.clone();
        x.push(x_unit);
        let mut y_std = self.y_std.clone();
        y_std.push((y - self.y_mean) / self.y_scale);
        factorize(x, y_std, self.y_mean, self.y_scale, self.hyper.clone())
    }
}

fn kernel(hyper: &GpHyperparams, a: &[f64], b: &[f64]) -> f64 {
    let mut dist = 0.0;
    for ((&ai, &bi), &l) in a.iter().zip(b).zip(&hyper.length_scales) {
        let d = (ai - bi) / l;
        dist += d * d;
    }
    hyper.signal_var * (-0.5 * dist).exp()
}

/// Fits a GP to unit-cube points and raw objective values.
///
/// Hyper-parameters maximize the log marginal likelihood via multi-start
/// coordinate search; the search is deterministic for a given data set.
pub fn fit(points: &[(Vec<f64>, f64)], config: &GpConfig) -> Result<GpModel> {
    if points.is_empty() {
        return Err(Error::state("cannot fit a GP without observations"));
    }
    let dims = points[0].0.len();
    if points.iter().any(|(x, _)| x.len() != dims) {
        return Err(Error::input("inconsistent point dimensions"));
    }
    if points.iter().any(|(_, y)| !y.is_finite()) {
        return Err(Error::input("objectives must be finite"));
    }

    let n = points.len();
    let y_raw: Vec<f64> = points.iter().map(|(_, y)| *y).collect();
    let y_mean = y_raw.iter().sum::<f64>() / n as f64;
    let y_var = y_raw.iter().map(|y| (y - y_mean).powi(2)).sum::<f64>() / n as f64;
    let y_scale = if y_var.sqrt() > 1e-12 { y_var.sqrt() } else { 1.0 };
    let y_std: Vec<f64> = y_raw.iter().map(|y| (y - y_mean) / y_scale).collect();
    let x: Vec<Vec<f64>> = points.iter().map(|(p, _)| p.clone()).collect();

    let hyper = optimize_hyperparams(&x, &y_std, dims, config)?;
    factorize(x, y_std, y_mean, y_scale, hyper)
}

/// Fits a GP reusing known hyper-parameters (single factorization).
pub fn fit_with_hyperparams(
    points: &[(Vec<f64>, f64)],
    hyper: GpHyperparams,
) -> Result<GpModel> {
    if points.is_empty() {
        return Err(Error::state("cannot fit a GP without observations"));
    }
    let n = points.len();
    let y_raw: Vec<f64> = points.iter().map(|(_, y)| *y).collect();
    let y_mean = y_raw.iter().sum::<f64>() / n as f64;
    let y_var = y_raw.iter().map(|y| (y - y_mean).powi(2)).sum::<f64>() / n as f64;
    let y_scale = if y_var.sqrt() > 1e-12 { y_var.sqrt() } else { 1.0 };
    let y_std: Vec<f64> = y_raw.iter().map(|y| (y - y_mean) / y_scale).collect();
    let x: Vec<Vec<f64>> = points.iter().map(|(p, _)| p.clone()).collect();
    factorize(x, y_std, y_mean, y_scale, hyper)
}

fn factorize(
    x: Vec<Vec<f64>>,
    y_std: Vec<f64>,
    y_mean: f64,
    y_scale: f64,
    hyper: GpHyperparams,
) -> Result<GpModel> {
    let n = x.len();
    let mut base = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let k = kernel(&hyper, &x[i], &x[j]);
            base[i * n + j] = k;
            base[j * n + i] = k;
        }
        base[i * n + i] += hyper.noise_var;
    }
    for &jitter in &JITTER_LADDER {
        let mut k = base.clone();
        for i in 0..n {
            k[i * n + i] += jitter;
        }
        if cholesky_in_place(&mut k, n) {
            let alpha = solve_cholesky(&k, n, &y_std);
            return Ok(GpModel { x, y_std, y_mean, y_scale, hyper, chol: k, alpha, jitter });
        }
    }
    Err(Error::numerical(format!(
        "covariance not positive definite for {n} points (noise {:.3e}, jitter up to {:.0e})",
        hyper.noise_var,
        JITTER_LADDER.last().unwrap()
    )))
}

fn optimize_hyperparams(
    x: &[Vec<f64>],
    y_std: &[f64],
    dims: usize,
    config: &GpConfig,
) -> Result<GpHyperparams> {
    let n = x.len();
    // theta = [ln l_1 .. ln l_d, ln sf2, ln sn2]
    let floor_ln = config.noise_floor.ln();
    let clamp = move |theta: &mut Vec<f64>| {
        for t in theta.iter_mut().take(dims) {
            *t = t.clamp((1e-2f64).ln(), (1e2f64).ln());
        }
        theta[dims] = theta[dims].clamp((1e-4f64).ln(), (1e4f64).ln());
        theta[dims + 1] = theta[dims + 1].clamp(floor_ln, 0.0);
    };
    let score = |theta: &[f64]| -> f64 {
        let hyper = GpHyperparams {
            length_scales: theta[..dims].iter().map(|t| t.exp()).collect(),
            signal_var: theta[dims].exp(),
            noise_var: theta[dims + 1].exp(),
        };
        log_marginal_likelihood(x, y_std, &hyper).unwrap_or(f64::NEG_INFINITY)
    };

    let mut candidates: Vec<Vec<f64>> = Vec::new();
    // default start
    let mut theta0 = vec![(0.5f64).ln(); dims];
    theta0.push(0.0);
    theta0.push((1e-4f64).max(config.noise_floor).ln());
    candidates.push(theta0);
    // median-distance start
    if n >= 2 {
        let mut dists = Vec::new();
        for i in 0..n.min(64) {
            for j in (i + 1)..n.min(64) {
                let d: f64 = x[i]
                    .iter()
                    .zip(&x[j])
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                if d > 0.0 {
                    dists.push(d);
                }
            }
        }
        if !dists.is_empty() {
            dists.sort_by(f64::total_cmp);
            let median = dists[dists.len() / 2];
            let mut theta = vec![median.max(1e-2).ln(); dims];
            theta.push(0.0);
            theta.push((1e-6f64).max(config.noise_floor).ln());
            candidates.push(theta);
        }
    }
    // random starts, deterministic in the data size
    let mut rng = stream(0x6b5e_77a3, &[n as u64, dims as u64]);
    for _ in 0..config.n_starts {
        let mut theta: Vec<f64> = (0..dims)
            .map(|_| rng.random_range((0.05f64).ln()..(2.0f64).ln()))
            .collect();
        theta.push(rng.random_range((0.1f64).ln()..(10.0f64).ln()));
        theta.push(rng.random_range(floor_ln.max((1e-7f64).ln())..(1e-2f64).ln()));
        candidates.push(theta);
    }
    for theta in candidates.iter_mut() {
        clamp(theta);
    }

    let mut scored: Vec<(f64, Vec<f64>)> =
        candidates.into_iter().map(|t| (score(&t), t)).collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    scored.truncate(config.refine_top.max(1));

    let mut best = scored[0].clone();
    for (mut lml, mut theta) in scored {
        for _ in 0..config.sweeps {
            for c in 0..theta.len() {
                let mut step = 2.0f64.ln();
                while step > 0.05 {
                    let mut improved = false;
                    for dir in [1.0, -1.0] {
                        let mut trial = theta.clone();
                        trial[c] += dir * step;
                        clamp(&mut trial);
                        let s = score(&trial);
                        if s > lml {
                            lml = s;
                            theta = trial;
                            improved = true;
                        }
                    }
                    if !improved {
                        step *= 0.5;
                    }
                }
            }
        }
        // the noise coordinate has flat stretches that defeat local steps;
        // finish with a global sweep over its ladder
        for noise in [config.noise_floor, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2] {
            if noise < config.noise_floor {
                continue;
            }
            let mut trial = theta.clone();
            trial[dims + 1] = noise.ln();
            clamp(&mut trial);
            let s = score(&trial);
            if s > lml {
                lml = s;
                theta = trial;
            }
        }
        if lml > best.0 {
            best = (lml, theta);
        }
    }

    let theta = best.1;
    Ok(GpHyperparams {
        length_scales: theta[..dims].iter().map(|t| t.exp()).collect(),
        signal_var: theta[dims].exp(),
        noise_var: theta[dims + 1].exp(),
    })
}

fn log_marginal_likelihood(x: &[Vec<f64>], y: &[f64], hyper: &GpHyperparams) -> Option<f64> {
    let n = x.len();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let v = kernel(hyper, &x[i], &x[j]);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
        k[i * n + i] += hyper.noise_var;
    }
    for &jitter in &JITTER_LADDER {
        let mut kj = k.clone();
        for i in 0..n {
            kj[i * n + i] += jitter;
        }
        if cholesky_in_place(&mut kj, n) {
            let alpha = solve_cholesky(&kj, n, y);
            let fit: f64 = y.iter().zip(&alpha).map(|(yi, ai)| yi * ai).sum();
            let log_det: f64 = (0..n).map(|i| kj[i * n + i].ln()).sum();
            let lml = -0.5 * fit
                - log_det
                - 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln();
            return Some(lml);
        }
    }
    None
}

/// In-place lower Cholesky; returns false if not positive definite.
fn cholesky_in_place(a: &mut [f64], n: usize) -> bool {
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i * n + j];
            for k in 0..j {
                sum -= a[i * n + k] * a[j * n + k];
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return false;
                }
                a[i * n + i] = sum.sqrt();
            } else {
                a[i * n + j] = sum / a[j * n + j];
            }
        }
        for j in (i + 1)..n {
            a[i * n + j] = 0.0;
        }
    }
    true
}

/// Solves L z = b.
fn solve_lower(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut z = vec![0.0; n];
    for i in 0..n {
        let mut sum = b[i];
        for j in 0..i {
            sum -= l[i * n + j] * z[j];
        }
        z[i] = sum / l[i * n + i];
    }
    z
}

/// Solves (L Lᵀ) x = b.
fn solve_cholesky(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut z = solve_lower(l, n, b);
    for i in (0..n).rev() {
        let mut sum = z[i];
        for j in (i + 1)..n {
            sum -= l[j * n + i] * z[j];
        }
        z[i] = sum / l[i * n + i];
    }
    z
}

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

fn normal_pdf(z: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * z * z).exp()
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

/// Complementary error function, fractional error below 1.2e-7.
fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let ans = t
        * (-z * z - 1.265_512_23
            + t * (1.000_023_68
                + t * (0.374_091_96
                    + t * (0.096_784_18
                        + t * (-0.186_288_06
                            + t * (0.278_868_07
                                + t * (-1.135_203_98
                                    + t * (1.488_515_87
                                        + t * (-0.822_152_23 + t * 0.170_872_77)))))))))
            .exp();
    if x >= 0.0 {
        ans
    } else {
        2.0 - ans
    }
}

/// Closed-form E[max(0, N(mean, std²) − best)].
pub fn ei_from_moments(mean: f64, std: f64, best: f64) -> f64 {
    if std <= 1e-15 {
        return (mean - best).max(0.0);
    }
    let z = (mean - best) / std;
    ((mean - best) * normal_cdf(z) + std * normal_pdf(z)).max(0.0)
}

/// Expected improvement over `best_so_far` at a unit-cube point, for
/// maximization: E[max(0, f(x) − best)] under the posterior Gaussian.
pub fn expected_improvement(model: &GpModel, x_unit: &[f64], best_so_far: f64) -> f64 {
    let (mean, std) = model.predict(x_unit);
    ei_from_moments(mean, std, best_so_far)
}
