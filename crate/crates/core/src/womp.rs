//! Weighted orthogonal matching pursuit.
//!
//! Greedy minimization of
//!
//! ```text
//! G_λ(z) = ‖y − Ãz‖₂² + λ ‖z‖_{0,w},    ‖z‖_{0,w} = Σ_{j ∈ supp z} w_j²
//! ```
//!
//! over a column-normalized system. Each step picks the index whose best
//! one-coordinate move lowers `G_λ` the most. For a least-squares iterate
//! `x` supported on `S` and residual `r = y − Ãx`, that decrease is
//!
//! ```text
//!            ⎧ max(|(Ãᵀr)_j|² − λ w_j², 0)   j ∉ S
//! Δ(x,S,j) = ⎨ max(λ w_j² − |x_j|², 0)       j ∈ S, x_j ≠ 0
//!            ⎩ 0                             j ∈ S, x_j = 0
//! ```
//!
//! With `λ = 0` and unit weights this is classical OMP.

use std::fmt;
use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::assembly::LinearSystem;
use crate::basis::WeightVector;
use crate::error::{Error, Result};
use crate::lstsq;

/// Residual norms below this fraction of `‖y‖` end the solve.
pub const RESIDUAL_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WompConfig {
    pub lambda: f64,
    pub max_iterations: usize,
    /// Entries with `|z_j| ≤ support_epsilon` are outside `supp(z)`.
    pub support_epsilon: f64,
    /// Relative rank tolerance of the restricted least-squares refit.
    pub ls_tolerance: f64,
}

impl Default for WompConfig {
    fn default() -> Self {
        Self {
            lambda: 0.0,
            max_iterations: 25,
            support_epsilon: 1e-12,
            ls_tolerance: 1e-12,
        }
    }
}

impl WompConfig {
    pub fn with_lambda(lambda: f64, max_iterations: usize) -> Self {
        Self {
            lambda,
            max_iterations,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::Config(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be >= 1".into()));
        }
        if !(self.support_epsilon > 0.0) {
            return Err(Error::Config("support_epsilon must be > 0".into()));
        }
        if !(self.ls_tolerance >= 0.0) {
            return Err(Error::Config("ls_tolerance must be >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxIterations,
    /// Every score vanished: no single-coordinate move lowers `G_λ`.
    ZeroDelta,
    /// The best move is a removal, which the refit step cannot perform.
    InSupportReselect,
    ResidualFloor,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::MaxIterations => "max_iterations",
            StopReason::ZeroDelta => "zero_delta",
            StopReason::InSupportReselect => "in_support_reselect",
            StopReason::ResidualFloor => "residual_floor",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    pub selected_index: usize,
    pub delta_value: f64,
    /// `S_k` in selection order.
    pub support: Vec<usize>,
    pub coefficients: DVector<f64>,
    pub residual_norm: f64,
    pub g_lambda: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveTrace {
    pub records: Vec<IterationRecord>,
    pub stop_reason: StopReason,
    pub lambda: f64,
    pub support_epsilon: f64,
    /// `‖y‖₂`, the residual of `x̂_0 = 0`.
    pub initial_residual_norm: f64,
    n: usize,
}

impl SolveTrace {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    /// `x̂_k`; `k = 0` is the zero vector and iterates past the stopping point
    /// repeat the last one.
    pub fn coefficients_at(&self, k: usize) -> DVector<f64> {
        match k.min(self.records.len()) {
            0 => DVector::zeros(self.n),
            k => self.records[k - 1].coefficients.clone(),
        }
    }

    pub fn final_coefficients(&self) -> DVector<f64> {
        self.coefficients_at(self.records.len())
    }

    /// `|supp(x̂_k)|` under the solve's support threshold, held past the stop.
    pub fn support_size_at(&self, k: usize) -> usize {
        match k.min(self.records.len()) {
            0 => 0,
            k => support_size(&self.records[k - 1].coefficients, self.support_epsilon),
        }
    }

    pub fn selected_indices(&self) -> Vec<usize> {
        self.records.iter().map(|r| r.selected_index).collect()
    }

    /// One row per iteration: `k,selected_index,delta,residual_norm,g_lambda,support_size`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "k,selected_index,delta,residual_norm,g_lambda,support_size")?;
        for r in &self.records {
            writeln!(
                out,
                "{},{},{:?},{:?},{:?},{}",
                r.k,
                r.selected_index,
                r.delta_value,
                r.residual_norm,
                r.g_lambda,
                support_size(&r.coefficients, self.support_epsilon)
            )?;
        }
        Ok(())
    }
}

pub fn support_size(z: &DVector<f64>, eps: f64) -> usize {
    z.iter().filter(|v| v.abs() > eps).count()
}

/// `Σ_{|z_j| > eps} w_j²`.
pub fn weighted_l0(z: &DVector<f64>, w: &WeightVector, eps: f64) -> f64 {
    z.iter()
        .zip(w.values())
        .filter(|(v, _)| v.abs() > eps)
        .map(|(_, wj)| wj * wj)
        .sum()
}

/// `G_λ(z) = ‖y − Ãz‖₂² + λ ‖z‖_{0,w}`.
pub fn g_lambda(z: &DVector<f64>, sys: &LinearSystem, w: &WeightVector, lambda: f64, eps: f64) -> f64 {
    let residual = sys.rhs() - sys.matrix() * z;
    residual.norm_squared() + lambda * weighted_l0(z, w, eps)
}

/// Greedy score of index `j` at state `(x, S)`.
///
/// `x` is expected to be a least-squares fit supported on `S`; the value is
/// then exactly the decrease `G_λ(x) − min_t G_λ(x + t e_j)`.
pub fn compute_delta(
    x: &DVector<f64>,
    support: &[usize],
    j: usize,
    sys: &LinearSystem,
    w: &WeightVector,
    lambda: f64,
    eps: f64,
) -> f64 {
    let penalty = lambda * w[j] * w[j];
    if support.contains(&j) {
        let xj = x[j];
        if xj.abs() > eps {
            (penalty - xj * xj).max(0.0)
        } else {
            0.0
        }
    } else {
        let residual = sys.rhs() - sys.matrix() * x;
        let corr = sys.matrix().column(j).dot(&residual);
        (corr * corr - penalty).max(0.0)
    }
}

/// Scores every index from precomputed correlations `Ãᵀr`. Returns the
/// maximizer (smallest index on ties) and its score.
fn best_score(
    correlations: &DVector<f64>,
    x: &DVector<f64>,
    in_support: &[bool],
    w: &WeightVector,
    lambda: f64,
    eps: f64,
) -> (usize, f64) {
    let mut best = (0usize, f64::NEG_INFINITY);
    for j in 0..correlations.len() {
        let penalty = lambda * w[j] * w[j];
        let score = if in_support[j] {
            if x[j].abs() > eps {
                (penalty - x[j] * x[j]).max(0.0)
            } else {
                0.0
            }
        } else {
            (correlations[j] * correlations[j] - penalty).max(0.0)
        };
        if score > best.1 {
            best = (j, score);
        }
    }
    best
}

fn submatrix(matrix: &DMatrix<f64>, support: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(matrix.nrows(), support.len(), |i, c| matrix[(i, support[c])])
}

/// `argmin ‖Ã v − y‖₂` over `supp(v) ⊆ S`, embedded in `ℝ^N`.
///
/// Minimum-norm on `S` when `Ã_S` is rank deficient. An empty `S` gives zero.
pub fn restricted_least_squares(
    sys: &LinearSystem,
    support: &[usize],
    ls_tolerance: f64,
) -> Result<DVector<f64>> {
    let mut out = DVector::zeros(sys.cols());
    if support.is_empty() {
        return Ok(out);
    }
    if let Some(&bad) = support.iter().find(|&&j| j >= sys.cols()) {
        return Err(Error::DimensionMismatch {
            expected: sys.cols(),
            found: bad + 1,
        });
    }
    let sub = submatrix(sys.matrix(), support);
    let fit = lstsq::solve(&sub, sys.rhs(), ls_tolerance)?;
    for (c, &j) in support.iter().enumerate() {
        out[j] = fit.coefficients[c];
    }
    Ok(out)
}

/// Runs the weighted greedy pursuit on a column-normalized system.
pub fn womp_solve(sys: &LinearSystem, w: &WeightVector, cfg: &WompConfig) -> Result<SolveTrace> {
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
    let eps = cfg.support_epsilon;
    let y_norm = y.norm();

    let mut x = DVector::zeros(n);
    let mut residual = y.clone();
    let mut in_support = vec![false; n];
    let mut support: Vec<usize> = Vec::new();
    let mut records: Vec<IterationRecord> = Vec::with_capacity(cfg.max_iterations);

    let stop_reason = loop {
        if records.len() == cfg.max_iterations {
            break StopReason::MaxIterations;
        }
        let correlations = a.tr_mul(&residual);
        let (j, delta) = best_score(&correlations, &x, &in_support, w, cfg.lambda, eps);
        if !(delta > 0.0) {
            break StopReason::ZeroDelta;
        }
        if in_support[j] {
            break StopReason::InSupportReselect;
        }
        in_support[j] = true;
        support.push(j);
        x = restricted_least_squares(sys, &support, cfg.ls_tolerance)?;
        residual = y - a * &x;
        let residual_norm = residual.norm();
        let g = residual_norm * residual_norm + cfg.lambda * weighted_l0(&x, w, eps);
        records.push(IterationRecord {
            k: records.len() + 1,
            selected_index: j,
            delta_value: delta,
            support: support.clone(),
            coefficients: x.clone(),
            residual_norm,
            g_lambda: g,
        });
        if residual_norm < RESIDUAL_FLOOR * y_norm && records.len() < cfg.max_iterations {
            break StopReason::ResidualFloor;
        }
    };

    Ok(SolveTrace {
        records,
        stop_reason,
        lambda: cfg.lambda,
        support_epsilon: eps,
        initial_residual_norm: y_norm,
        n,
    })
}
