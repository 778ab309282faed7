//! Multi-trial accuracy, support-size and runtime study.
//!
//! For every trial a fresh sample set is drawn, the system is assembled and
//! column-normalized, WOMP runs once per λ and the weighted LASSO once per α
//! on a warm-started path. Errors are relative ℓ2 distances in coefficient
//! space to a single oversampled least-squares reference per basis; by
//! Parseval this is the relative `L²_ν` error on the span of the index set.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assembly::{build_system, TargetFunction};
use crate::basis::{sample_measure, BasisKind, WeightVector};
use crate::error::{Error, Result};
use crate::index_sets::{hyperbolic_cross, MultiIndexSet};
use crate::lasso::{alpha_scale, default_alpha_factors, lasso_path, LassoConfig};
use crate::lstsq;
use crate::womp::{support_size, womp_solve, StopReason, WompConfig};

const REFERENCE_STREAM: u64 = 0x5245_4645_5245_4e43;
const TRIAL_STREAM: u64 = 0x5452_4941_4c53_0000;
const SUPPORT_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub basis_kind: BasisKind,
    pub dimension: usize,
    pub cross_order: usize,
    pub sample_counts: Vec<usize>,
    pub lambdas: Vec<f64>,
    pub iterations: usize,
    pub trials: usize,
    pub reference_oversampling: usize,
    pub base_seed: u64,
    /// Number of α values on the LASSO grid; 0 skips the baseline.
    pub lasso_grid: usize,
    pub lasso_max_iterations: usize,
    pub lasso_tolerance: f64,
}

pub const DEFAULT_SEED: u64 = 20_190_318;

/// `λ ∈ {0, 1e-5, 10^-4.5, 1e-4, 10^-3.5, 1e-3}`.
pub fn study_lambdas() -> Vec<f64> {
    let mut out = vec![0.0];
    out.extend([5.0, 4.5, 4.0, 3.5, 3.0].iter().map(|k: &f64| 10f64.powf(-k)));
    out
}

impl ExperimentConfig {
    /// `d = 10`, `s = 10`, `m ∈ {60, 80}`, `K = 25`, 25 trials, 20× oversampled reference.
    pub fn study(basis_kind: BasisKind) -> Self {
        Self {
            basis_kind,
            dimension: 10,
            cross_order: 10,
            sample_counts: vec![60, 80],
            lambdas: study_lambdas(),
            iterations: 25,
            trials: 25,
            reference_oversampling: 20,
            base_seed: DEFAULT_SEED,
            lasso_grid: 10,
            lasso_max_iterations: 5000,
            lasso_tolerance: 1e-8,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::Config(msg.to_string()));
        if self.dimension == 0 {
            return fail("d must be >= 1");
        }
        if self.cross_order == 0 {
            return fail("s must be >= 1");
        }
        if self.sample_counts.is_empty() {
            return fail("m: at least one sample count is required");
        }
        if self.sample_counts.contains(&0) {
            return fail("m: every sample count must be >= 1");
        }
        if self.lambdas.is_empty() {
            return fail("lambdas: at least one value is required");
        }
        if self.lambdas.iter().any(|l| !(*l >= 0.0) || !l.is_finite()) {
            return fail("lambdas: values must be finite and >= 0");
        }
        if self.iterations == 0 {
            return fail("iterations must be >= 1");
        }
        if self.trials == 0 {
            return fail("trials must be >= 1");
        }
        if self.reference_oversampling == 0 {
            return fail("oversampling must be >= 1");
        }
        if self.lasso_grid > 0 {
            if self.lasso_max_iterations == 0 {
                return fail("lasso_max_iterations must be >= 1");
            }
            if !(self.lasso_tolerance > 0.0) {
                return fail("lasso_tolerance must be > 0");
            }
        }
        Ok(())
    }
}

/// `t ↦ ln(d + 1 + Σ t_k)`; the argument exceeds 1 on the open cube.
pub fn target_log_sum(d: usize) -> TargetFunction {
    let shift = d as f64 + 1.0;
    TargetFunction::new(format!("ln({} + sum t_k)", d + 1), move |t: &[f64]| {
        (shift + t.iter().sum::<f64>()).ln()
    })
}

/// splitmix64 finalizer, used to derive independent stream seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for the stream identified by `tags` under `base`.
pub fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(mix(base), |acc, &t| mix(acc ^ mix(t)))
}

fn basis_tag(kind: BasisKind) -> u64 {
    match kind {
        BasisKind::Legendre => 1,
        BasisKind::Chebyshev => 2,
    }
}

pub fn reference_seed(cfg: &ExperimentConfig) -> u64 {
    derive_seed(cfg.base_seed, &[REFERENCE_STREAM, basis_tag(cfg.basis_kind)])
}

pub fn trial_seed(cfg: &ExperimentConfig, m: usize, trial: usize) -> u64 {
    derive_seed(
        cfg.base_seed,
        &[TRIAL_STREAM, basis_tag(cfg.basis_kind), m as u64, trial as u64],
    )
}

/// Least-squares fit of `f` over `set` from `oversampling · N` samples of ν.
pub fn reference_coefficients(
    f: &TargetFunction,
    kind: BasisKind,
    set: &MultiIndexSet,
    oversampling: usize,
    seed: u64,
) -> Result<DVector<f64>> {
    if oversampling == 0 {
        return Err(Error::Config("oversampling must be >= 1".into()));
    }
    let count = oversampling * set.cardinality();
    let points = sample_measure(kind, set.dimension(), count, seed);
    let sys = build_system(&points, f, kind, set)?;
    lstsq::solve_full_rank(sys.matrix(), sys.rhs(), 1e-10)
}

/// `‖x̂ − x_ref‖₂ / ‖x_ref‖₂`.
pub fn relative_error(x_hat: &DVector<f64>, x_ref: &DVector<f64>) -> Result<f64> {
    if x_hat.len() != x_ref.len() {
        return Err(Error::DimensionMismatch {
            expected: x_ref.len(),
            found: x_hat.len(),
        });
    }
    let denom = x_ref.norm();
    if denom == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok((x_hat - x_ref).norm() / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

impl Stat {
    /// Mean and sample standard deviation (zero for a single value).
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        if values.is_empty() {
            return Self::default();
        }
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, std }
    }
}

/// Aggregated WOMP behaviour for one `(λ, m)`; index `k − 1` holds iteration `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WompCurve {
    pub lambda: f64,
    pub m: usize,
    pub initial_mean_error: f64,
    pub errors: Vec<Stat>,
    pub support: Vec<Stat>,
    pub iterations_run: Stat,
    /// Fewest iterations any trial ran before its solver stopped.
    pub first_stop: usize,
    pub stop_reasons: BTreeMap<String, usize>,
    pub seconds: Stat,
}

impl WompCurve {
    pub fn mean_errors(&self) -> Vec<f64> {
        self.errors.iter().map(|s| s.mean).collect()
    }

    pub fn mean_support(&self) -> Vec<f64> {
        self.support.iter().map(|s| s.mean).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LassoPoint {
    pub m: usize,
    /// `α / alpha_scale`, the grid coordinate shared by all trials.
    pub alpha_factor: f64,
    pub error: Stat,
    pub support: Stat,
    pub converged_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuntimeRow {
    pub decoder: String,
    pub lambda: Option<f64>,
    pub m: usize,
    pub trials: usize,
    pub seconds: Stat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub target: String,
    pub n: usize,
    pub reference_seed: u64,
    pub reference_samples: usize,
    pub reference_norm: f64,
    /// Per `m` (as a string key), the trial seeds in trial order.
    pub trial_seeds: BTreeMap<String, Vec<u64>>,
    pub womp: Vec<WompCurve>,
    pub lasso: Vec<LassoPoint>,
    pub runtimes: Vec<RuntimeRow>,
}

impl ExperimentReport {
    pub fn curve(&self, lambda: f64, m: usize) -> Option<&WompCurve> {
        self.womp.iter().find(|c| c.lambda == lambda && c.m == m)
    }

    /// Grid point with the smallest mean error for `m`.
    pub fn best_lasso(&self, m: usize) -> Option<&LassoPoint> {
        self.lasso
            .iter()
            .filter(|p| p.m == m)
            .min_by(|a, b| a.error.mean.total_cmp(&b.error.mean))
    }

    /// The report with every wall-clock measurement zeroed.
    pub fn without_timings(&self) -> Self {
        let mut out = self.clone();
        for c in &mut out.womp {
            c.seconds = Stat::default();
        }
        for r in &mut out.runtimes {
            r.seconds = Stat::default();
        }
        out
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }

    /// `decoder,lambda,m,k,mean_error,std_error`. LASSO rows carry the α
    /// grid factor in the lambda column and leave k empty.
    pub fn write_errors_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "decoder,lambda,m,k,mean_error,std_error")?;
        for c in &self.womp {
            for (k, s) in c.errors.iter().enumerate() {
                writeln!(out, "womp,{:?},{},{},{:?},{:?}", c.lambda, c.m, k + 1, s.mean, s.std)?;
            }
        }
        for p in &self.lasso {
            writeln!(out, "wlasso,{:?},{},,{:?},{:?}", p.alpha_factor, p.m, p.error.mean, p.error.std)?;
        }
        Ok(())
    }

    /// `decoder,lambda,m,k,mean_support,std_support`, same layout as errors.
    pub fn write_support_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "decoder,lambda,m,k,mean_support,std_support")?;
        for c in &self.womp {
            for (k, s) in c.support.iter().enumerate() {
                writeln!(out, "womp,{:?},{},{},{:?},{:?}", c.lambda, c.m, k + 1, s.mean, s.std)?;
            }
        }
        for p in &self.lasso {
            writeln!(out, "wlasso,{:?},{},,{:?},{:?}", p.alpha_factor, p.m, p.support.mean, p.support.std)?;
        }
        Ok(())
    }

    /// `decoder,lambda,m,trials,mean_seconds,std_seconds`.
    pub fn write_runtimes_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "decoder,lambda,m,trials,mean_seconds,std_seconds")?;
        for r in &self.runtimes {
            let lambda = r.lambda.map(|l| format!("{l:?}")).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{:e},{:e}",
                r.decoder, lambda, r.m, r.trials, r.seconds.mean, r.seconds.std
            )?;
        }
        Ok(())
    }

    /// Fixed-width table of final errors, support sizes and mean times.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "{} basis, d={}, s={}, N={}, K={}, trials={}\n",
            self.config.basis_kind,
            self.config.dimension,
            self.config.cross_order,
            self.n,
            self.config.iterations,
            self.config.trials
        );
        s.push_str(&format!(
            "{:>5}  {:<8} {:>12} {:>12} {:>9} {:>11}\n",
            "m", "decoder", "lambda", "mean_error", "support", "seconds"
        ));
        for &m in &self.config.sample_counts {
            for c in self.womp.iter().filter(|c| c.m == m) {
                let last = c.errors.len() - 1;
                s.push_str(&format!(
                    "{:>5}  {:<8} {:>12.3e} {:>12.4e} {:>9.2} {:>11.3e}\n",
                    m, "womp", c.lambda, c.errors[last].mean, c.support[last].mean, c.seconds.mean
                ));
            }
            if let Some(best) = self.best_lasso(m) {
                let secs = self
                    .runtimes
                    .iter()
                    .find(|r| r.m == m && r.decoder == "wlasso_sweep")
                    .map_or(0.0, |r| r.seconds.mean);
                s.push_str(&format!(
                    "{:>5}  {:<8} {:>12.3e} {:>12.4e} {:>9.2} {:>11.3e}\n",
                    m, "wlasso*", best.alpha_factor, best.error.mean, best.support.mean, secs
                ));
            }
        }
        s.push_str("wlasso* = best grid point; lambda column holds alpha/alpha_scale, time is the full sweep\n");
        s
    }
}

struct WompTrial {
    errors: Vec<f64>,
    support: Vec<f64>,
    iterations: usize,
    stop: StopReason,
    seconds: f64,
}

struct TrialOutcome {
    womp: Vec<WompTrial>,
    lasso: Vec<(f64, f64, bool)>,
    lasso_seconds: f64,
    normalize_seconds: f64,
}

struct Problem<'a> {
    cfg: &'a ExperimentConfig,
    set: &'a MultiIndexSet,
    weights: &'a WeightVector,
    f: &'a TargetFunction,
    reference: &'a DVector<f64>,
    alpha_factors: &'a [f64],
}

fn run_trial(p: &Problem<'_>, m: usize, trial: usize) -> Result<TrialOutcome> {
    let cfg = p.cfg;
    let seed = trial_seed(cfg, m, trial);
    let points = sample_measure(cfg.basis_kind, cfg.dimension, m, seed);
    let raw = build_system(&points, p.f, cfg.basis_kind, p.set)?;
    let started = Instant::now();
    let sys = raw.normalize_columns()?;
    let normalize_seconds = started.elapsed().as_secs_f64();

    let mut womp = Vec::with_capacity(cfg.lambdas.len());
    for &lambda in &cfg.lambdas {
        let wcfg = WompConfig {
            lambda,
            max_iterations: cfg.iterations,
            support_epsilon: SUPPORT_EPSILON,
            ..WompConfig::default()
        };
        let started = Instant::now();
        let trace = womp_solve(&sys, p.weights, &wcfg)?;
        let seconds = started.elapsed().as_secs_f64();
        let mut errors = Vec::with_capacity(cfg.iterations);
        let mut support = Vec::with_capacity(cfg.iterations);
        for k in 1..=cfg.iterations {
            let x = sys.denormalize_solution(&trace.coefficients_at(k))?;
            errors.push(relative_error(&x, p.reference)?);
            support.push(trace.support_size_at(k) as f64);
        }
        womp.push(WompTrial {
            errors,
            support,
            iterations: trace.iterations(),
            stop: trace.stop_reason,
            seconds,
        });
    }

    let mut lasso = Vec::new();
    let mut lasso_seconds = 0.0;
    if !p.alpha_factors.is_empty() {
        let template = LassoConfig {
            alpha: 1.0,
            max_iterations: cfg.lasso_max_iterations,
            rel_tolerance: cfg.lasso_tolerance,
            step_size: None,
        };
        let started = Instant::now();
        let scale = alpha_scale(&sys, p.weights);
        let alphas: Vec<f64> = p.alpha_factors.iter().map(|f| f * scale).collect();
        let path = lasso_path(&sys, p.weights, &alphas, &template)?;
        lasso_seconds = started.elapsed().as_secs_f64();
        for res in path {
            let x = sys.denormalize_solution(&res.coefficients)?;
            lasso.push((
                relative_error(&x, p.reference)?,
                support_size(&res.coefficients, SUPPORT_EPSILON) as f64,
                res.converged,
            ));
        }
    }

    Ok(TrialOutcome {
        womp,
        lasso,
        lasso_seconds,
        normalize_seconds,
    })
}

fn column_stats(rows: &[&[f64]], len: usize) -> Vec<Stat> {
    (0..len)
        .map(|k| Stat::of(&rows.iter().map(|r| r[k]).collect::<Vec<_>>()))
        .collect()
}

/// Runs the full study. Trials run on the current rayon pool and are reduced
/// in trial order, so everything except wall-clock times is a pure function
/// of `cfg`.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let set = hyperbolic_cross(cfg.dimension, cfg.cross_order)?;
    let weights = WeightVector::for_set(cfg.basis_kind, &set);
    let f = target_log_sum(cfg.dimension);
    let ref_seed = reference_seed(cfg);
    let reference = reference_coefficients(&f, cfg.basis_kind, &set, cfg.reference_oversampling, ref_seed)
        .map_err(|e| Error::Trial {
            context: format!("reference fit ({} basis, seed {ref_seed})", cfg.basis_kind),
            source: Box::new(e),
        })?;
    let alpha_factors = default_alpha_factors(cfg.lasso_grid);
    let problem = Problem {
        cfg,
        set: &set,
        weights: &weights,
        f: &f,
        reference: &reference,
        alpha_factors: &alpha_factors,
    };

    let mut womp_curves = Vec::new();
    let mut lasso_points = Vec::new();
    let mut runtimes = Vec::new();
    let mut trial_seeds = BTreeMap::new();

    for &m in &cfg.sample_counts {
        let outcomes: Vec<TrialOutcome> = (0..cfg.trials)
            .into_par_iter()
            .map(|trial| {
                run_trial(&problem, m, trial).map_err(|e| Error::Trial {
                    context: format!(
                        "{} basis, m={m}, trial {trial} (seed {})",
                        cfg.basis_kind,
                        trial_seed(cfg, m, trial)
                    ),
                    source: Box::new(e),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        trial_seeds.insert(
            m.to_string(),
            (0..cfg.trials).map(|t| trial_seed(cfg, m, t)).collect(),
        );

        for (li, &lambda) in cfg.lambdas.iter().enumerate() {
            let runs: Vec<&WompTrial> = outcomes.iter().map(|o| &o.womp[li]).collect();
            let error_rows: Vec<&[f64]> = runs.iter().map(|r| r.errors.as_slice()).collect();
            let support_rows: Vec<&[f64]> = runs.iter().map(|r| r.support.as_slice()).collect();
            let mut stop_reasons = BTreeMap::new();
            for r in &runs {
                *stop_reasons.entry(r.stop.to_string()).or_insert(0) += 1;
            }
            let seconds = Stat::of(&runs.iter().map(|r| r.seconds).collect::<Vec<_>>());
            womp_curves.push(WompCurve {
                lambda,
                m,
                initial_mean_error: 1.0,
                errors: column_stats(&error_rows, cfg.iterations),
                support: column_stats(&support_rows, cfg.iterations),
                iterations_run: Stat::of(&runs.iter().map(|r| r.iterations as f64).collect::<Vec<_>>()),
                first_stop: runs.iter().map(|r| r.iterations).min().unwrap_or(0),
                stop_reasons,
                seconds,
            });
            runtimes.push(RuntimeRow {
                decoder: "womp".into(),
                lambda: Some(lambda),
                m,
                trials: cfg.trials,
                seconds,
            });
        }

        for (ai, &factor) in alpha_factors.iter().enumerate() {
            let errs: Vec<f64> = outcomes.iter().map(|o| o.lasso[ai].0).collect();
            let supp: Vec<f64> = outcomes.iter().map(|o| o.lasso[ai].1).collect();
            let conv = outcomes.iter().filter(|o| o.lasso[ai].2).count();
            lasso_points.push(LassoPoint {
                m,
                alpha_factor: factor,
                error: Stat::of(&errs),
                support: Stat::of(&supp),
                converged_fraction: conv as f64 / cfg.trials as f64,
            });
        }
        if !alpha_factors.is_empty() {
            runtimes.push(RuntimeRow {
                decoder: "wlasso_sweep".into(),
                lambda: None,
                m,
                trials: cfg.trials,
                seconds: Stat::of(&outcomes.iter().map(|o| o.lasso_seconds).collect::<Vec<_>>()),
            });
        }
        runtimes.push(RuntimeRow {
            decoder: "normalize".into(),
            lambda: None,
            m,
            trials: cfg.trials,
            seconds: Stat::of(&outcomes.iter().map(|o| o.normalize_seconds).collect::<Vec<_>>()),
        });
    }

    Ok(ExperimentReport {
        config: cfg.clone(),
        target: f.description().to_string(),
        n: set.cardinality(),
        reference_seed: ref_seed,
        reference_samples: cfg.reference_oversampling * set.cardinality(),
        reference_norm: reference.norm(),
        trial_seeds,
        womp: womp_curves,
        lasso: lasso_points,
        runtimes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{eval_tensor, SamplePoint};

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            basis_kind: BasisKind::Legendre,
            dimension: 3,
            cross_order: 6,
            sample_counts: vec![12],
            lambdas: vec![0.0, 1e-4],
            iterations: 6,
            trials: 3,
            reference_oversampling: 10,
            base_seed: 11,
            lasso_grid: 3,
            lasso_max_iterations: 2000,
            lasso_tolerance: 1e-8,
        }
    }

    #[test]
    fn log_sum_values() {
        let f = target_log_sum(10);
        assert!((f.eval(&[0.0; 10]) - 11f64.ln()).abs() < 1e-15);
        assert!((f.eval(&[0.0; 10]) - 2.3978953).abs() < 1e-7);
        assert!((f.eval(&[0.5; 10]) - 16f64.ln()).abs() < 1e-15);
        assert!((f.eval(&[0.5; 10]) - 2.7725887).abs() < 1e-7);
        assert!(f.eval(&[-1.0; 10]).abs() < 1e-15);
        assert!(f.eval(&[-0.999_999; 10]).is_finite());
    }

    #[test]
    fn relative_error_examples() {
        let r = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        assert_eq!(relative_error(&r, &r).unwrap(), 0.0);
        assert_eq!(relative_error(&DVector::zeros(3), &r).unwrap(), 1.0);
        assert!((relative_error(&(&r * 2.0), &r).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            relative_error(&r, &DVector::zeros(3)),
            Err(Error::ZeroReference)
        ));
    }

    #[test]
    fn reference_of_basis_element() {
        let set = hyperbolic_cross(3, 6).unwrap();
        let target = set.get(9).unwrap().clone();
        let f = TargetFunction::new("phi", move |t| {
            eval_tensor(BasisKind::Chebyshev, &target, &SamplePoint::new(t.to_vec()).unwrap()).unwrap()
        });
        let x = reference_coefficients(&f, BasisKind::Chebyshev, &set, 5, 1).unwrap();
        assert!((x[9] - 1.0).abs() < 1e-8);
        for (j, v) in x.iter().enumerate() {
            if j != 9 {
                assert!(v.abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn reference_residual_shrinks_with_oversampling() {
        // Monte Carlo estimate of ‖f − f_ref‖² on fresh points
        let set = hyperbolic_cross(4, 5).unwrap();
        let f = target_log_sum(4);
        let kind = BasisKind::Legendre;
        let test_points = sample_measure(kind, 4, 20_000, 99);
        let test = build_system(&test_points, &f, kind, &set).unwrap();
        let mut errs = Vec::new();
        for over in [2, 4, 8, 16] {
            let mut acc = 0.0;
            for rep in 0..5 {
                let x = reference_coefficients(&f, kind, &set, over, 1000 + rep).unwrap();
                acc += (test.rhs() - test.matrix() * &x).norm_squared();
            }
            errs.push(acc / 5.0);
        }
        assert!(errs.windows(2).all(|p| p[1] < p[0]), "{errs:?}");
    }

    #[test]
    fn minimal_sweep_shape() {
        let cfg = ExperimentConfig {
            lambdas: vec![0.0],
            iterations: 1,
            trials: 1,
            lasso_grid: 0,
            ..small_config()
        };
        let report = run_sweep(&cfg).unwrap();
        assert_eq!(report.womp.len(), 1);
        assert_eq!(report.womp[0].errors.len(), 1);
        assert!(report.lasso.is_empty());
    }

    #[test]
    fn sweep_is_deterministic_and_sane() {
        let cfg = small_config();
        let a = run_sweep(&cfg).unwrap();
        let b = run_sweep(&cfg).unwrap();
        assert_eq!(a.without_timings(), b.without_timings());
        assert_eq!(a.womp.len(), 2);
        assert_eq!(a.lasso.len(), 3);
        for c in &a.womp {
            assert_eq!(c.initial_mean_error, 1.0);
            assert!(c.errors.iter().all(|s| s.mean >= 0.0));
            assert_eq!(c.errors.len(), 6);
        }
        let mut buf = Vec::new();
        a.write_errors_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 2 * 6 + 3);
    }

    #[test]
    fn extra_trials_do_not_reshuffle() {
        let cfg = small_config();
        let more = ExperimentConfig { trials: 5, ..cfg.clone() };
        for t in 0..3 {
            assert_eq!(trial_seed(&cfg, 12, t), trial_seed(&more, 12, t));
        }
        assert_ne!(trial_seed(&cfg, 12, 0), trial_seed(&cfg, 12, 1));
        assert_ne!(trial_seed(&cfg, 12, 0), trial_seed(&cfg, 13, 0));
    }

    #[test]
    fn invalid_configs() {
        let base = small_config();
        for bad in [
            ExperimentConfig { lambdas: vec![], ..base.clone() },
            ExperimentConfig { trials: 0, ..base.clone() },
            ExperimentConfig { sample_counts: vec![0], ..base.clone() },
            ExperimentConfig { reference_oversampling: 0, ..base.clone() },
            ExperimentConfig { lambdas: vec![-1.0], ..base.clone() },
        ] {
            assert!(matches!(run_sweep(&bad), Err(Error::Config(_))));
        }
    }

    #[test]
    fn stats() {
        let s = Stat::of(&[1.0, 2.0, 3.0]);
        assert_eq!(s.mean, 2.0);
        assert!((s.std - 1.0).abs() < 1e-15);
        assert_eq!(Stat::of(&[4.0]).std, 0.0);
    }
}
