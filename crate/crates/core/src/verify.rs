//! Built-in oracle suite behind `womp verify`.
//!
//! Every check compares the library against an independent route: a
//! brute-force line search for the greedy score, a Gram–Schmidt OMP for the
//! unweighted limit, box enumeration for the hyperbolic cross, and Gauss
//! quadrature for orthonormality.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assembly::LinearSystem;
use crate::basis::{eval_1d, BasisKind, WeightVector};
use crate::experiments::derive_seed;
use crate::index_sets::hyperbolic_cross;
use crate::quadrature;
use crate::womp::{compute_delta, weighted_l0, womp_solve, WompConfig};

/// Deliberate faults for exercising the suite itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Negates the greedy score before it is compared to the oracle.
    DeltaSign,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub seed: u64,
    pub score_instances: usize,
    pub omp_instances: usize,
    pub fault: Option<Fault>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: crate::experiments::DEFAULT_SEED,
            score_instances: 20,
            omp_instances: 20,
            fault: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub failing_seed: Option<u64>,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{status}] {}: {}", self.name, self.detail)?;
        if let Some(seed) = self.failing_seed {
            write!(f, " (instance seed {seed})")?;
        }
        Ok(())
    }
}

pub const SCORE_TOLERANCE: f64 = 1e-6;
pub const SCORE_LAMBDAS: [f64; 3] = [0.0, 1e-4, 1e-2];

/// Random `m × n` normalized system with Gaussian entries, weights in `[1, 4)`.
pub fn gaussian_instance(m: usize, n: usize, seed: u64) -> (LinearSystem, WeightVector) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = || {
        let u: f64 = rng.sample(rand::distributions::Open01);
        let v: f64 = rng.gen();
        (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
    };
    let a = DMatrix::from_fn(m, n, |_, _| gauss());
    let y = DVector::from_fn(m, |_, _| gauss());
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa5a5);
    let w = WeightVector::from_values((0..n).map(|_| rng.gen_range(1.0..4.0)).collect()).unwrap();
    let sys = LinearSystem::from_parts(a, y).unwrap().normalize_columns().unwrap();
    (sys, w)
}

fn g_direct(sys: &LinearSystem, w: &WeightVector, lambda: f64, eps: f64, z: &DVector<f64>) -> f64 {
    (sys.rhs() - sys.matrix() * z).norm_squared() + lambda * weighted_l0(z, w, eps)
}

/// `min_t G_λ(x + t e_j)` by a two-stage grid over `[-3‖y‖, 3‖y‖]` away
/// from the two points where the support term jumps (`t = 0`, `t = -x_j`),
/// which are evaluated separately.
pub fn grid_line_min(
    sys: &LinearSystem,
    w: &WeightVector,
    lambda: f64,
    eps: f64,
    x: &DVector<f64>,
    j: usize,
) -> f64 {
    const POINTS: usize = 801;
    let residual = sys.rhs() - sys.matrix() * x;
    let column = sys.matrix().column(j);
    let mut others = x.clone();
    others[j] = 0.0;
    let l0_rest = weighted_l0(&others, w, eps);
    let eval = |t: f64| {
        let fit: f64 = residual
            .iter()
            .zip(column.iter())
            .map(|(r, a)| (r - t * a).powi(2))
            .sum();
        let jump = if (x[j] + t).abs() > eps { w[j] * w[j] } else { 0.0 };
        fit + lambda * (l0_rest + jump)
    };
    let half = 3.0 * sys.rhs().norm().max(1e-300);
    let scan = |lo: f64, hi: f64| {
        let h = (hi - lo) / (POINTS - 1) as f64;
        (0..POINTS)
            .map(|i| lo + h * i as f64)
            .filter(|t| t.abs() > eps && (x[j] + t).abs() > eps)
            .map(|t| (t, eval(t)))
            .fold((0.0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
    };
    let (t1, g1) = scan(-half, half);
    let h = 2.0 * half / (POINTS - 1) as f64;
    let (_, g2) = scan(t1 - h, t1 + h);
    g1.min(g2).min(eval(0.0)).min(eval(-x[j]))
}

fn apply_fault(fault: Option<Fault>, delta: f64) -> f64 {
    match fault {
        Some(Fault::DeltaSign) => -delta,
        None => delta,
    }
}

/// Greedy-score identity `min_t G(x + t e_j) = G(x) − Δ(x, S, j)` on every
/// state of real solver runs.
pub fn check_greedy_score(opts: &VerifyOptions) -> CheckResult {
    let mut states = 0usize;
    let mut worst = 0.0f64;
    for inst in 0..opts.score_instances {
        let seed = derive_seed(opts.seed, &[1, inst as u64]);
        let (sys, w) = gaussian_instance(15, 30, seed);
        for &lambda in &SCORE_LAMBDAS {
            let cfg = WompConfig::with_lambda(lambda, 15);
            let eps = cfg.support_epsilon;
            let trace = womp_solve(&sys, &w, &cfg).expect("normalized instance");
            let mut path: Vec<(DVector<f64>, Vec<usize>)> = vec![(DVector::zeros(30), Vec::new())];
            path.extend(trace.records.iter().map(|r| (r.coefficients.clone(), r.support.clone())));
            for (x, support) in &path {
                states += 1;
                let gx = g_direct(&sys, &w, lambda, eps, x);
                for j in 0..30 {
                    let delta = apply_fault(opts.fault, compute_delta(x, support, j, &sys, &w, lambda, eps));
                    let gap = (grid_line_min(&sys, &w, lambda, eps, x, j) - (gx - delta)).abs();
                    worst = worst.max(gap);
                    if gap > SCORE_TOLERANCE {
                        return CheckResult {
                            name: "greedy-score line search",
                            passed: false,
                            detail: format!("lambda={lambda:e} j={j} |S|={} gap={gap:.3e}", support.len()),
                            failing_seed: Some(seed),
                        };
                    }
                }
            }
        }
    }
    CheckResult {
        name: "greedy-score line search",
        passed: true,
        detail: format!(
            "{} instances, {states} states, max gap {worst:.2e} <= {SCORE_TOLERANCE:e}",
            opts.score_instances
        ),
        failing_seed: None,
    }
}

/// Classical OMP with modified Gram–Schmidt on the selected columns.
pub fn textbook_omp(a: &DMatrix<f64>, y: &DVector<f64>, iterations: usize) -> (Vec<usize>, DVector<f64>) {
    let (m, n) = a.shape();
    let mut selected: Vec<usize> = Vec::new();
    let mut q: Vec<DVector<f64>> = Vec::new();
    let mut residual = y.clone();
    for _ in 0..iterations.min(m) {
        let mut best = (usize::MAX, -1.0);
        for j in 0..n {
            if selected.contains(&j) {
                continue;
            }
            let c = a.column(j).dot(&residual).abs();
            if c > best.1 {
                best = (j, c);
            }
        }
        if best.1 <= 0.0 {
            break;
        }
        selected.push(best.0);
        let mut v = a.column(best.0).into_owned();
        for _ in 0..2 {
            for qi in &q {
                let p = qi.dot(&v);
                v -= qi * p;
            }
        }
        let v = &v / v.norm();
        residual -= &v * v.dot(&residual);
        q.push(v);
    }
    // coefficients from the triangular system Qᵀ A_S c = Qᵀ y
    let k = selected.len();
    let r = DMatrix::from_fn(k, k, |i, c| q[i].dot(&a.column(selected[c])));
    let qty = DVector::from_fn(k, |i, _| q[i].dot(y));
    let coef = r.solve_upper_triangular(&qty).unwrap_or_else(|| DVector::zeros(k));
    let mut x = DVector::zeros(n);
    for (c, &j) in selected.iter().enumerate() {
        x[j] = coef[c];
    }
    (selected, x)
}

pub fn check_omp_reduction(opts: &VerifyOptions) -> CheckResult {
    let mut worst = 0.0f64;
    for inst in 0..opts.omp_instances {
        let seed = derive_seed(opts.seed, &[2, inst as u64]);
        let (sys, _) = gaussian_instance(20, 50, seed);
        let ones = WeightVector::ones(50);
        let trace = womp_solve(&sys, &ones, &WompConfig::with_lambda(0.0, 10)).expect("normalized instance");
        let (sel, x) = textbook_omp(sys.matrix(), sys.rhs(), trace.iterations());
        if sel != trace.selected_indices() {
            return CheckResult {
                name: "omp reduction",
                passed: false,
                detail: format!("index sequences differ: {:?} vs {:?}", trace.selected_indices(), sel),
                failing_seed: Some(seed),
            };
        }
        let diff = (trace.final_coefficients() - x).amax();
        worst = worst.max(diff);
        if diff > 1e-10 {
            return CheckResult {
                name: "omp reduction",
                passed: false,
                detail: format!("coefficients differ by {diff:.3e}"),
                failing_seed: Some(seed),
            };
        }
    }
    CheckResult {
        name: "omp reduction",
        passed: true,
        detail: format!("{} instances, max coefficient gap {worst:.2e}", opts.omp_instances),
        failing_seed: None,
    }
}

fn box_count(d: usize, s: usize) -> usize {
    let mut count = 0;
    let mut j = vec![0usize; d];
    loop {
        if j.iter().map(|e| e + 1).product::<usize>() <= s {
            count += 1;
        }
        let mut k = 0;
        loop {
            if k == d {
                return count;
            }
            j[k] += 1;
            if j[k] < s {
                break;
            }
            j[k] = 0;
            k += 1;
        }
    }
}

pub fn check_cross_counts() -> CheckResult {
    let name = "hyperbolic cross counts";
    let n = hyperbolic_cross(10, 10).map(|s| s.cardinality()).unwrap_or(0);
    if n != 571 {
        return CheckResult {
            name,
            passed: false,
            detail: format!("(d=10, s=10) gave {n}, expected 571"),
            failing_seed: None,
        };
    }
    for d in 1..=4 {
        for s in 1..=8 {
            let got = hyperbolic_cross(d, s).map(|x| x.cardinality()).unwrap_or(0);
            let want = box_count(d, s);
            if got != want {
                return CheckResult {
                    name,
                    passed: false,
                    detail: format!("(d={d}, s={s}) gave {got}, enumeration {want}"),
                    failing_seed: None,
                };
            }
        }
    }
    CheckResult {
        name,
        passed: true,
        detail: "(10,10) -> 571; enumeration agrees for d<=4, s<=8".into(),
        failing_seed: None,
    }
}

pub fn check_orthonormality() -> CheckResult {
    let mut worst = 0.0f64;
    for (kind, rule) in [
        (BasisKind::Legendre, quadrature::gauss_legendre(20)),
        (BasisKind::Chebyshev, quadrature::gauss_chebyshev(20)),
    ] {
        for p in 0..=12 {
            for q in 0..=12 {
                let ip: f64 = rule
                    .iter()
                    .map(|&(t, wt)| wt * eval_1d(kind, p, t).unwrap() * eval_1d(kind, q, t).unwrap())
                    .sum();
                worst = worst.max((ip - if p == q { 1.0 } else { 0.0 }).abs());
            }
        }
    }
    CheckResult {
        name: "orthonormality quadrature",
        passed: worst <= 1e-10,
        detail: format!("degrees <= 12, max deviation {worst:.2e}"),
        failing_seed: None,
    }
}

pub fn run_all(opts: &VerifyOptions) -> Vec<CheckResult> {
    vec![
        check_greedy_score(opts),
        check_omp_reduction(opts),
        check_cross_counts(),
        check_orthonormality(),
    ]
}
