//! Weighted LASSO decoder,
//! `min_z ‖Ãz − y‖₂² + α ‖z‖_{1,w}`,
//! solved by accelerated proximal gradient (FISTA) with backtracking and a
//! function-value restart that keeps the objective monotone.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::assembly::LinearSystem;
use crate::basis::WeightVector;
use crate::error::{Error, Result};

const POWER_ITERATIONS: usize = 20;
const CHECKPOINT_EVERY: usize = 10;
const MAX_BACKTRACKS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LassoConfig {
    pub alpha: f64,
    pub max_iterations: usize,
    /// Stop once `‖z_k − z_{k−1}‖₂ ≤ rel_tolerance · ‖z_k‖₂`.
    pub rel_tolerance: f64,
    /// Fixed gradient step; `None` derives it from a power-method estimate of `‖Ã‖₂²`.
    pub step_size: Option<f64>,
}

impl Default for LassoConfig {
    fn default() -> Self {
        Self {
            alpha: 1e-3,
            max_iterations: 5000,
            rel_tolerance: 1e-8,
            step_size: None,
        }
    }
}

impl LassoConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::Config(format!("alpha must be > 0, got {}", self.alpha)));
        }
        if !(self.rel_tolerance > 0.0) {
            return Err(Error::Config("rel_tolerance must be > 0".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be >= 1".into()));
        }
        if let Some(step) = self.step_size {
            if !(step > 0.0) {
                return Err(Error::Config("step_size must be > 0".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LassoResult {
    pub coefficients: DVector<f64>,
    pub objective: f64,
    pub iterations: usize,
    /// False when `max_iterations` ran out; `coefficients` is then the best iterate.
    pub converged: bool,
    /// Objective value every ten iterations.
    pub checkpoints: Vec<f64>,
}

/// `Σ_j |z_j| w_j`.
pub fn weighted_l1_norm(z: &DVector<f64>, w: &WeightVector) -> f64 {
    z.iter().zip(w.values()).map(|(v, wj)| v.abs() * wj).sum()
}

pub fn soft_threshold(v: f64, threshold: f64) -> f64 {
    if v > threshold {
        v - threshold
    } else if v < -threshold {
        v + threshold
    } else {
        0.0
    }
}

pub fn objective(sys: &LinearSystem, w: &WeightVector, alpha: f64, z: &DVector<f64>) -> f64 {
    (sys.matrix() * z - sys.rhs()).norm_squared() + alpha * weighted_l1_norm(z, w)
}

/// Largest `|(Ãᵀy)_j| / w_j`; zero solves the LASSO for every `α ≥ 2·alpha_scale`.
pub fn alpha_scale(sys: &LinearSystem, w: &WeightVector) -> f64 {
    let c = sys.matrix().tr_mul(sys.rhs());
    c.iter()
        .zip(w.values())
        .map(|(cj, wj)| cj.abs() / wj)
        .fold(0.0, f64::max)
}

/// `count` log-spaced factors from `1e-1` down to `1e-8`, largest first.
pub fn default_alpha_factors(count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![1e-1],
        _ => (0..count)
            .map(|i| 10f64.powf(-1.0 - 7.0 * i as f64 / (count - 1) as f64))
            .collect(),
    }
}

/// Power-method estimate of `‖A‖₂²` from a fixed start vector.
pub fn spectral_norm_sq(a: &DMatrix<f64>, iterations: usize) -> f64 {
    let n = a.ncols();
    if n == 0 {
        return 0.0;
    }
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut estimate = 0.0;
    for _ in 0..iterations {
        let u = a.tr_mul(&(a * &v));
        let norm = u.norm();
        if norm == 0.0 {
            return 0.0;
        }
        estimate = norm;
        v = u / norm;
    }
    estimate
}

/// Largest violation of the subgradient optimality conditions at `z`,
/// divided by `alpha`.
pub fn stationarity_violation(sys: &LinearSystem, w: &WeightVector, alpha: f64, z: &DVector<f64>) -> f64 {
    let grad = sys.matrix().tr_mul(&(sys.matrix() * z - sys.rhs())) * 2.0;
    let worst = (0..z.len())
        .map(|j| {
            let t = alpha * w[j];
            if z[j] != 0.0 {
                (grad[j] + t * z[j].signum()).abs()
            } else {
                (grad[j].abs() - t).max(0.0)
            }
        })
        .fold(0.0, f64::max);
    worst / alpha
}

pub fn lasso_solve(sys: &LinearSystem, w: &WeightVector, cfg: &LassoConfig) -> Result<LassoResult> {
    lasso_solve_from(sys, w, cfg, None)
}

/// As [`lasso_solve`], optionally warm-started.
pub fn lasso_solve_from(
    sys: &LinearSystem,
    w: &WeightVector,
    cfg: &LassoConfig,
    start: Option<&DVector<f64>>,
) -> Result<LassoResult> {
    if !sys.is_normalized() {
        return Err(Error::NotNormalized);
    }
    cfg.validate()?;
    let n = sys.cols();
    if w.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: w.len(),
        });
    }
    let a = sys.matrix();
    let y = sys.rhs();
    let alpha = cfg.alpha;

    let mut lipschitz = match cfg.step_size {
        Some(step) => 1.0 / step,
        None => 2.0 * spectral_norm_sq(a, POWER_ITERATIONS),
    };
    if !(lipschitz > 0.0) {
        lipschitz = 1.0;
    }

    let mut x = start.cloned().unwrap_or_else(|| DVector::zeros(n));
    let mut ax = a * &x;
    let mut fx = (&ax - y).norm_squared() + alpha * weighted_l1_norm(&x, w);
    let mut z = x.clone();
    let mut az = ax.clone();
    let mut theta = 1.0f64;
    let mut fresh = true;
    let mut checkpoints = vec![fx];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iterations {
        iterations += 1;
        let rz = &az - y;
        let smooth_z = rz.norm_squared();
        let grad = a.tr_mul(&rz) * 2.0;

        let mut backtracks = 0;
        let lipschitz_before = lipschitz;
        let (x_new, ax_new, smooth_new) = loop {
            let step = 1.0 / lipschitz;
            let cand = DVector::from_fn(n, |j, _| soft_threshold(z[j] - step * grad[j], step * alpha * w[j]));
            let acand = a * &cand;
            let smooth = (&acand - y).norm_squared();
            let diff = &cand - &z;
            let model = smooth_z + grad.dot(&diff) + 0.5 * lipschitz * diff.norm_squared();
            if smooth <= model * (1.0 + 1e-12) + 1e-300 {
                break (cand, acand, smooth);
            }
            backtracks += 1;
            if backtracks > MAX_BACKTRACKS {
                lipschitz = lipschitz_before;
                break (x.clone(), ax.clone(), f64::INFINITY);
            }
            lipschitz *= 2.0;
        };
        let f_new = smooth_new + alpha * weighted_l1_norm(&x_new, w);

        if f_new > fx {
            if fresh {
                // no descent even from the plain proximal step
                converged = true;
                break;
            }
            z = x.clone();
            az = ax.clone();
            theta = 1.0;
            fresh = true;
        } else {
            let change = (&x_new - &x).norm();
            let scale = x_new.norm();
            let theta_next = 0.5 * (1.0 + (1.0 + 4.0 * theta * theta).sqrt());
            let beta = (theta - 1.0) / theta_next;
            z = &x_new + (&x_new - &x) * beta;
            az = a * &z;
            theta = theta_next;
            fresh = false;
            x = x_new;
            ax = ax_new;
            fx = f_new;
            if change <= cfg.rel_tolerance * scale {
                converged = true;
                break;
            }
        }
        if iterations % CHECKPOINT_EVERY == 0 {
            checkpoints.push(fx);
        }
    }
    if checkpoints.last() != Some(&fx) {
        checkpoints.push(fx);
    }

    Ok(LassoResult {
        coefficients: x,
        objective: fx,
        iterations,
        converged,
        checkpoints,
    })
}

/// Solves along descending `alphas`, warm-starting each solve from the previous.
pub fn lasso_path(
    sys: &LinearSystem,
    w: &WeightVector,
    alphas: &[f64],
    template: &LassoConfig,
) -> Result<Vec<LassoResult>> {
    let mut order: Vec<usize> = (0..alphas.len()).collect();
    order.sort_by(|&i, &j| alphas[j].total_cmp(&alphas[i]));
    let mut results: Vec<Option<LassoResult>> = vec![None; alphas.len()];
    let mut warm: Option<DVector<f64>> = None;
    for i in order {
        let cfg = LassoConfig {
            alpha: alphas[i],
            ..*template
        };
        let res = lasso_solve_from(sys, w, &cfg, warm.as_ref())?;
        warm = Some(res.coefficients.clone());
        results[i] = Some(res);
    }
    Ok(results.into_iter().map(|r| r.unwrap()).collect())
}
