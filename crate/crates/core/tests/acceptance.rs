//! Acceptance suite. Prints one line per criterion and exits nonzero if any fails.
//!
//! Run with `cargo test -p womp-core --test acceptance`.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use womp_core::assembly::{build_system, LinearSystem, TargetFunction};
use womp_core::basis::{eval_tensor, sample_measure, weight, BasisKind, WeightVector};
use womp_core::experiments::{run_sweep, ExperimentConfig, ExperimentReport};
use womp_core::index_sets::{hyperbolic_cross, MultiIndex};
use womp_core::womp::{compute_delta, womp_solve, WompConfig};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.sample(rand::distributions::Open01);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

/// Gaussian columns around a shared random direction, then unit-normalized.
fn perturbed_instance(m: usize, n: usize, seed: u64, unit_weights: bool) -> (LinearSystem, WeightVector) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let common = DVector::from_fn(m, |_, _| gaussian(&mut rng));
    let a = DMatrix::from_fn(m, n, |i, _| 0.5 * common[i] + gaussian(&mut rng));
    let y = DVector::from_fn(m, |_, _| gaussian(&mut rng));
    let w = if unit_weights {
        WeightVector::ones(n)
    } else {
        WeightVector::from_values((0..n).map(|_| rng.gen_range(1.0..4.0)).collect()).unwrap()
    };
    let sys = LinearSystem::from_parts(a, y).unwrap().normalize_columns().unwrap();
    (sys, w)
}

fn objective(a: &DMatrix<f64>, y: &DVector<f64>, w: &WeightVector, lambda: f64, z: &DVector<f64>) -> f64 {
    let l0: f64 = (0..z.len()).filter(|&j| z[j].abs() > 1e-12).map(|j| w[j] * w[j]).sum();
    (y - a * z).norm_squared() + lambda * l0
}

/// min over t of the objective along `e_j`: coarse grid, two refinements
/// around the coarse winner, plus the points where the support term jumps.
fn line_min(a: &DMatrix<f64>, y: &DVector<f64>, w: &WeightVector, lambda: f64, x: &DVector<f64>, j: usize) -> f64 {
    let r = y - a * x;
    let col = a.column(j);
    let rest: f64 = (0..x.len()).filter(|&k| k != j && x[k].abs() > 1e-12).map(|k| w[k] * w[k]).sum();
    let at = |t: f64| {
        let fit: f64 = (0..r.len()).map(|i| (r[i] - t * col[i]).powi(2)).sum();
        let own = if (x[j] + t).abs() > 1e-12 { w[j] * w[j] } else { 0.0 };
        fit + lambda * (rest + own)
    };
    let generic = |t: f64| t.abs() > 1e-12 && (x[j] + t).abs() > 1e-12;
    let grid = |lo: f64, hi: f64, n: usize| {
        let h = (hi - lo) / n as f64;
        (0..=n)
            .map(|i| lo + h * i as f64)
            .filter(|&t| generic(t))
            .map(|t| (t, at(t)))
            .fold((0.0, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b })
    };
    let half = 2.0 * y.norm() + x[j].abs();
    let n = 400;
    let (t0, g0) = grid(-half, half, n);
    let h = 2.0 * half / n as f64;
    let (t1, g1) = grid(t0 - h, t0 + h, n);
    let h = 2.0 * h / n as f64;
    let (_, g2) = grid(t1 - h, t1 + h, n);
    g0.min(g1).min(g2).min(at(0.0)).min(at(-x[j]))
}

fn criterion_1() -> Outcome {
    let lambdas = [0.0, 1e-4, 1e-2];
    let instances = 100;
    let mut worst = 0.0f64;
    let mut checks = 0usize;
    for inst in 0..instances {
        let (sys, w) = perturbed_instance(15, 30, 1000 + inst, false);
        let (a, y) = (sys.matrix().clone(), sys.rhs().clone());
        for &lambda in &lambdas {
            let trace = womp_solve(&sys, &w, &WompConfig::with_lambda(lambda, 15)).unwrap();
            let mut states = vec![(DVector::zeros(30), Vec::new())];
            states.extend(trace.records.iter().map(|r| (r.coefficients.clone(), r.support.clone())));
            for (x, support) in &states {
                let gx = objective(&a, &y, &w, lambda, x);
                for j in 0..30 {
                    let delta = compute_delta(x, support, j, &sys, &w, lambda, 1e-12);
                    let gap = (line_min(&a, &y, &w, lambda, x, j) - (gx - delta)).abs();
                    worst = worst.max(gap);
                    checks += 1;
                }
            }
        }
    }
    outcome(
        worst <= 1e-6,
        format!("{instances} instances, {checks} (state, j) pairs, max gap {worst:.2e} (tol 1e-6)"),
    )
}

/// Classical OMP: greedy correlation, least squares by QR on the chosen columns.
fn textbook_omp(a: &DMatrix<f64>, y: &DVector<f64>, steps: usize) -> (Vec<usize>, DVector<f64>) {
    let n = a.ncols();
    let mut chosen: Vec<usize> = Vec::new();
    let mut x = DVector::zeros(n);
    for _ in 0..steps {
        let r = y - a * &x;
        let (jbest, cbest) = (0..n)
            .filter(|j| !chosen.contains(j))
            .map(|j| (j, a.column(j).dot(&r).abs()))
            .fold((usize::MAX, -1.0), |b, c| if c.1 > b.1 { c } else { b });
        if cbest <= 1e-14 * y.norm() {
            break;
        }
        chosen.push(jbest);
        let sub = DMatrix::from_fn(a.nrows(), chosen.len(), |i, c| a[(i, chosen[c])]);
        let qr = sub.qr();
        let rhs = qr.q().transpose() * y;
        let c = qr.r().solve_upper_triangular(&rhs).unwrap();
        x = DVector::zeros(n);
        for (k, &j) in chosen.iter().enumerate() {
            x[j] = c[k];
        }
    }
    (chosen, x)
}

fn criterion_2() -> Outcome {
    let instances = 50;
    let mut worst = 0.0f64;
    for inst in 0..instances {
        let (sys, w) = perturbed_instance(20, 50, 5000 + inst, true);
        let trace = womp_solve(&sys, &w, &WompConfig::with_lambda(0.0, 12)).unwrap();
        let (expected, coef) = textbook_omp(sys.matrix(), sys.rhs(), 12);
        if trace.selected_indices() != expected {
            return outcome(
                false,
                format!("instance {inst}: indices {:?} vs {:?}", trace.selected_indices(), expected),
            );
        }
        worst = worst.max((trace.final_coefficients() - coef).amax());
    }
    outcome(
        worst <= 1e-10,
        format!("{instances} instances, indices identical, max coefficient gap {worst:.2e} (tol 1e-10)"),
    )
}

fn brute_force_count(d: usize, s: u64) -> usize {
    let mut count = 0;
    let mut j = vec![0u64; d];
    loop {
        if j.iter().map(|e| e + 1).product::<u64>() <= s {
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

fn criterion_3() -> Outcome {
    let n = hyperbolic_cross(10, 10).unwrap().cardinality();
    if n != 571 {
        return outcome(false, format!("|cross(10,10)| = {n}"));
    }
    for d in 1..=4 {
        for s in 1..=8 {
            let got = hyperbolic_cross(d, s).unwrap().cardinality();
            let want = brute_force_count(d, s as u64);
            if got != want {
                return outcome(false, format!("d={d} s={s}: {got} vs brute force {want}"));
            }
        }
    }
    outcome(true, "|cross(10,10)| = 571; brute force agrees for all d <= 4, s <= 8")
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Orthonormal univariate polynomials from closed forms.
fn closed_form_1d(kind: BasisKind, n: u32, t: f64) -> f64 {
    match kind {
        BasisKind::Legendre => {
            let p: f64 = (0..=n)
                .map(|k| binomial(n, k).powi(2) * (t - 1.0).powi((n - k) as i32) * (t + 1.0).powi(k as i32))
                .sum::<f64>()
                / 2f64.powi(n as i32);
            (2.0 * n as f64 + 1.0).sqrt() * p
        }
        BasisKind::Chebyshev => {
            let c = (n as f64 * t.clamp(-1.0, 1.0).acos()).cos();
            if n == 0 {
                c
            } else {
                2f64.sqrt() * c
            }
        }
    }
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let grid: Vec<f64> = (0..=2000).map(|i| -1.0 + i as f64 / 1000.0).collect();
    let mut worst = 0.0f64;
    for kind in [BasisKind::Legendre, BasisKind::Chebyshev] {
        for _ in 0..200 {
            let d = rng.gen_range(1..=3);
            let entries: Vec<u32> = (0..d).map(|_| rng.gen_range(0..=6)).collect();
            let j = MultiIndex::new(entries.clone()).unwrap();
            let sup: f64 = entries
                .iter()
                .map(|&e| grid.iter().map(|&t| closed_form_1d(kind, e, t).abs()).fold(0.0, f64::max))
                .product();
            let corner = womp_core::basis::SamplePoint::new(vec![1.0; d]).unwrap();
            let at_corner = eval_tensor(kind, &j, &corner).unwrap().abs();
            let rel = (sup - weight(kind, &j)).abs() / sup;
            let rel_corner = (at_corner - weight(kind, &j)).abs() / sup;
            worst = worst.max(rel).max(rel_corner);
        }
    }
    outcome(
        worst <= 1e-6,
        format!("200 indices per basis, max relative gap {worst:.2e} (tol 1e-6)"),
    )
}

fn criterion_5() -> Outcome {
    let set = hyperbolic_cross(10, 10).unwrap();
    let kind = BasisKind::Legendre;
    let trials = 25;
    let mut successes = 0;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(7000 + trial);
        let mut positions: Vec<usize> = (0..set.cardinality()).collect();
        positions.shuffle(&mut rng);
        let chosen: Vec<usize> = positions[..5].to_vec();
        let coefs: Vec<f64> = (0..5)
            .map(|_| rng.gen_range(0.5..2.0) * if rng.gen() { 1.0 } else { -1.0 })
            .collect();
        let terms: Vec<(MultiIndex, f64)> = chosen.iter().zip(&coefs).map(|(&p, &c)| (set.get(p).unwrap().clone(), c)).collect();
        let f = TargetFunction::new("five-term", move |t: &[f64]| {
            let p = womp_core::basis::SamplePoint::new(t.to_vec()).unwrap();
            terms.iter().map(|(j, c)| c * eval_tensor(kind, j, &p).unwrap()).sum()
        });
        let points = sample_measure(kind, 10, 80, 9000 + trial);
        let sys = build_system(&points, &f, kind, &set).unwrap().normalize_columns().unwrap();
        let trace = womp_solve(&sys, &WeightVector::ones(set.cardinality()), &WompConfig::with_lambda(0.0, 5)).unwrap();
        let found: BTreeSet<usize> = trace.coefficients_at(5).iter().enumerate().filter(|(_, v)| v.abs() > 1e-12).map(|(j, _)| j).collect();
        let want: BTreeSet<usize> = chosen.iter().copied().collect();
        let z = sys.denormalize_solution(&trace.coefficients_at(5)).unwrap();
        let mut exact = DVector::zeros(set.cardinality());
        for (&p, &c) in chosen.iter().zip(&coefs) {
            exact[p] = c;
        }
        if found == want && (z - exact).amax() <= 1e-8 {
            successes += 1;
        }
    }
    let fraction = successes as f64 / trials as f64;
    outcome(
        fraction >= 0.9,
        format!("{successes}/{trials} trials recovered support in 5 iterations with coefficients within 1e-8"),
    )
}

fn study_config(kind: BasisKind) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::study(kind);
    cfg.sample_counts = vec![80];
    cfg
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs().max(1e-300)
}

fn criterion_6(reports: &[ExperimentReport], omp_long: &[ExperimentReport]) -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for report in reports {
        let kind = report.config.basis_kind;
        let omp = report.curve(0.0, 80).unwrap().mean_errors()[24];
        let best = report
            .womp
            .iter()
            .filter(|c| [10f64.powf(-4.5), 1e-4, 10f64.powf(-3.5)].iter().any(|&l| near(c.lambda, l)))
            .map(|c| c.mean_errors()[24])
            .fold(f64::INFINITY, f64::min);
        let a = best <= omp;
        let mut b = true;
        let mut rising_later = Vec::new();
        for c in report.womp.iter().filter(|c| c.lambda > 0.0) {
            let mut curve = vec![c.initial_mean_error];
            curve.extend(c.mean_errors());
            let stall = c.first_stop.min(curve.len() - 1);
            b &= curve[..=stall].windows(2).all(|p| p[1] <= p[0]);
            if !curve.windows(2).all(|p| p[1] <= p[0]) {
                rising_later.push(format!("{:.1e}", c.lambda));
            }
        }
        ok &= a && b;
        notes.push(format!(
            "{kind}: (a) best weighted {best:.3e} vs OMP {omp:.3e}, (b) non-increasing to first stop={b}, rises after it for lambda [{}]",
            rising_later.join(", ")
        ));
    }
    for report in omp_long {
        let kind = report.config.basis_kind;
        let errors = report.curve(0.0, 80).unwrap().mean_errors();
        let min_to_m = errors[..80].iter().copied().fold(f64::INFINITY, f64::min);
        let at_2m = errors[159];
        let c = at_2m > min_to_m;
        ok &= c;
        notes.push(format!("{kind}: (c) OMP k=160 {at_2m:.3e} vs min k<=80 {min_to_m:.3e}"));
    }
    outcome(ok, notes.join("; "))
}

fn criterion_7(reports: &[ExperimentReport]) -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for report in reports {
        let mut curves: Vec<_> = report.womp.iter().filter(|c| c.m == 80).collect();
        curves.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        let sizes: Vec<f64> = curves.iter().map(|c| c.mean_support()[24]).collect();
        let ordered = sizes.windows(2).all(|p| p[1] <= p[0]);
        let bounded = curves
            .iter()
            .filter(|c| c.lambda > 0.0)
            .all(|c| c.support.iter().all(|s| s.mean <= 25.0));
        ok &= ordered && bounded;
        let shown: Vec<String> = sizes.iter().map(|s| format!("{s:.2}")).collect();
        notes.push(format!("{}: support at k=25 over lambda [{}]", report.config.basis_kind, shown.join(", ")));
    }
    outcome(ok, notes.join("; "))
}

fn criterion_8(reports: &[ExperimentReport]) -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for report in reports {
        let lasso = report.best_lasso(80).unwrap().error.mean;
        let womp = report
            .womp
            .iter()
            .filter(|c| c.lambda > 0.0)
            .map(|c| c.mean_errors()[24])
            .fold(f64::INFINITY, f64::min);
        let ratio = (lasso / womp).max(womp / lasso);
        ok &= ratio <= 3.0;
        notes.push(format!("{}: LASSO {lasso:.3e} vs WOMP {womp:.3e}, ratio {ratio:.2}", report.config.basis_kind));
    }
    outcome(ok, notes.join("; "))
}

fn criterion_9(reports: &[ExperimentReport]) -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for report in reports {
        let sweep = report
            .runtimes
            .iter()
            .find(|r| r.decoder == "wlasso_sweep" && r.m == 80)
            .unwrap()
            .seconds
            .mean;
        let normalize = report
            .runtimes
            .iter()
            .find(|r| r.decoder == "normalize" && r.m == 80)
            .unwrap()
            .seconds
            .mean;
        let slowest = normalize + report
            .runtimes
            .iter()
            .filter(|r| r.decoder == "womp" && r.m == 80)
            .map(|r| r.seconds.mean)
            .fold(0.0, f64::max);
        ok &= slowest < sweep;
        notes.push(format!(
            "{}: slowest WOMP plus normalization {slowest:.2e}s vs LASSO sweep {sweep:.2e}s",
            report.config.basis_kind
        ));
    }
    outcome(ok, notes.join("; "))
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("study.cfg");
    std::fs::write(&config, "basis=legendre\nd=10\ns=10\nm=80\nlambdas=0,1e-5,10^-4.5,1e-4,10^-3.5,1e-3\niterations=25\ntrials=25\noversampling=20\n").unwrap();
    let run = |out: &Path| {
        Command::new(env!("CARGO_BIN_EXE_womp"))
            .arg("run")
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(out)
            .output()
            .unwrap()
    };
    let (first, second) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&first, &second] {
        let status = run(out);
        if !status.status.success() {
            return outcome(false, format!("run failed: {}", String::from_utf8_lossy(&status.stderr)));
        }
    }
    for name in ["errors.csv", "support.csv"] {
        let a = std::fs::read(first.join(name)).unwrap();
        let b = std::fs::read(second.join(name)).unwrap();
        if a != b {
            return outcome(false, format!("{name} differs between runs"));
        }
    }
    let shape = |p: &Path| -> Vec<String> {
        std::fs::read_to_string(p.join("runtimes.csv"))
            .unwrap()
            .lines()
            .map(|l| l.rsplitn(3, ',').nth(2).unwrap_or("").to_string())
            .collect()
    };
    if shape(&first) != shape(&second) {
        return outcome(false, "runtimes.csv rows differ beyond timing columns");
    }
    outcome(true, "errors.csv and support.csv byte-identical over two runs; runtimes.csv rows match")
}

fn main() {
    let started = Instant::now();
    let mut results: Vec<(usize, Outcome)> = Vec::new();
    let mut report = |n: usize, o: Outcome| {
        println!("[{}] criterion {n}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        results.push((n, o));
    };
    report(1, criterion_1());
    report(2, criterion_2());
    report(3, criterion_3());
    report(4, criterion_4());
    report(5, criterion_5());

    let kinds = [BasisKind::Legendre, BasisKind::Chebyshev];
    let sweeps: Vec<ExperimentReport> = kinds.iter().map(|&k| run_sweep(&study_config(k)).unwrap()).collect();
    let omp_long: Vec<ExperimentReport> = kinds
        .iter()
        .map(|&k| {
            let mut cfg = study_config(k);
            cfg.lambdas = vec![0.0];
            cfg.iterations = 160;
            cfg.lasso_grid = 0;
            run_sweep(&cfg).unwrap()
        })
        .collect();
    report(6, criterion_6(&sweeps, &omp_long));
    report(7, criterion_7(&sweeps));
    report(8, criterion_8(&sweeps));
    report(9, criterion_9(&sweeps));
    report(10, criterion_10());

    let failed: Vec<usize> = results.iter().filter(|(_, o)| !o.passed).map(|(n, _)| *n).collect();
    println!(
        "{} of {} criteria passed in {:.1}s",
        results.len() - failed.len(),
        results.len(),
        started.elapsed().as_secs_f64()
    );
    if !failed.is_empty() {
        println!("failed: {failed:?}");
        std::process::exit(1);
    }
}
