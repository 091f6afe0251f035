//! End-to-end acceptance checks. Each test prints one PASS/FAIL line.
//!
//! Tests hold a shared lock so that wall-clock budgets are measured without
//! competing threads.

use std::io::Write;
use std::sync::{Mutex, MutexGuard};
use std::time::{Duration, Instant};

use maxlr::apsolve::{estimate_distance, project_ball, project_rank, ApConfig, SearchConfig};
use maxlr::diagnostics::{diagnose, DEFAULT_RANK_TOL};
use maxlr::embeddings::{hw_approximant, jl_approximant, SubGaussian};
use maxlr::genmat::{banded_uniform, hadamard, stiefel_product, MatrixClass, MatrixSpec};
use maxlr::harness::{
    aggregate, loglog_slope, pearson, run_sweep, write_outputs, SweepAxis, SweepRecord, SweepSpec,
    CSV_FILE,
};
use maxlr::matcore::{spectral_norm, svd_dense, DenseMatrix};
use maxlr::Rng;

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

/// Prints the verdict line and fails the test if either the check or the
/// time budget failed.
fn verdict(id: u32, name: &str, pass: bool, detail: String, started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    let in_time = elapsed <= budget;
    let ok = pass && in_time;
    // written to the process stdout directly so the line survives capture
    let mut out = std::io::stdout().lock();
    let _ = writeln!(
        out,
        "{} AC{id:02} {name}: {detail} [{:.1}s / {}s budget]",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    drop(out);
    assert!(pass, "AC{id:02} {name}: {detail}");
    assert!(in_time, "AC{id:02} {name}: took {elapsed:?}, budget {budget:?}");
}

fn best_column(records: &[SweepRecord]) -> Vec<f64> {
    records.iter().map(|r| r.best).collect()
}

/// `max |I₂ − σ u vᵀ|` for unit `u = (cos a, sin a)`, `v = (cos b, sin b)`.
fn rank_one_error(a: f64, b: f64, sigma: f64) -> f64 {
    let (u, v) = ([a.cos(), a.sin()], [b.cos(), b.sin()]);
    let mut worst = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((target - sigma * u[i] * v[j]).abs());
        }
    }
    worst
}

/// Grid search over rank-one 2x2 matrices followed by pattern-search
/// refinement from the best grid points.
fn brute_force_d1_identity2() -> f64 {
    use std::f64::consts::PI;
    let steps = 160;
    let mut seeds: Vec<(f64, [f64; 3])> = Vec::new();
    for ia in 0..steps {
        let a = PI * ia as f64 / steps as f64;
        for ib in 0..steps {
            let b = PI * ib as f64 / steps as f64;
            for is in 0..=steps {
                let s = 2.0 * is as f64 / steps as f64;
                seeds.push((rank_one_error(a, b, s), [a, b, s]));
            }
        }
    }
    seeds.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut best = f64::INFINITY;
    for &(mut err, mut p) in seeds.iter().take(20) {
        let mut step = PI / steps as f64;
        while step > 1e-10 {
            let mut moved = false;
            for k in 0..3 {
                for dir in [-1.0, 1.0] {
                    let mut q = p;
                    q[k] += dir * step;
                    let e = rank_one_error(q[0], q[1], q[2]);
                    if e < err {
                        (err, p, moved) = (e, q, true);
                    }
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        best = best.min(err);
    }
    best
}

#[test]
fn ac01_identity_two_distance() {
    let _g = serial();
    let t = Instant::now();
    let x = DenseMatrix::identity(2);
    let search = SearchConfig { bs_tol: 1e-3, ..SearchConfig::default() };
    let est = estimate_distance(&x, 1, &search, &ApConfig::default()).unwrap();
    let solver_time = t.elapsed();
    let oracle = brute_force_d1_identity2();
    let pass = (0.499..=0.502).contains(&est.eps_plus)
        && (oracle - 0.5).abs() <= 1e-3
        && (est.eps_plus - oracle).abs() <= 2e-3;
    verdict(
        1,
        "d_1(I_2)",
        pass,
        format!("eps_plus = {:.6}, grid oracle = {oracle:.6}, solver {solver_time:.2?}", est.eps_plus),
        t,
        Duration::from_secs(5),
    );
}

#[test]
fn ac02_exact_rank_is_recovered() {
    let _g = serial();
    let t = Instant::now();
    let mut rng = Rng::new(0xAC02);
    let mut worst = 0.0f64;
    let mut count = 0;
    for r in [1, 4, 16] {
        for _ in 0..20 {
            let x = rng.gaussian_matrix(64, r, 1.0).matmul_t(&rng.gaussian_matrix(64, r, 1.0)).unwrap();
            let cfg = ApConfig { seed: rng.next_u64(), ..ApConfig::default() };
            let est = estimate_distance(&x, r, &SearchConfig::default(), &cfg).unwrap();
            worst = worst.max(est.eps_plus / x.max_norm());
            count += 1;
        }
    }
    verdict(
        2,
        "rank exactness",
        worst <= 1e-6,
        format!("{count} matrices, worst eps_plus / max_norm = {worst:.3e}"),
        t,
        Duration::from_secs(60),
    );
}

#[test]
fn ac03_identity_rank_decay() {
    let _g = serial();
    let t = Instant::now();
    let mut spec = SweepSpec::new(MatrixSpec::new(MatrixClass::Identity, 128), SweepAxis::Rank, vec![2, 4, 8, 16]);
    spec.trials = 1;
    spec.restarts = 5;
    spec.master_seed = 3;
    let out = run_sweep(&spec).unwrap();
    let best = best_column(&out.records);
    let slope = loglog_slope(&[2.0, 4.0, 8.0, 16.0], &best).unwrap();
    verdict(
        3,
        "identity r^-1 decay",
        (-1.3..=-0.7).contains(&slope),
        format!("best eps_plus {best:.4?}, slope {slope:.3} (window [-1.3, -0.7])"),
        t,
        Duration::from_secs(600),
    );
}

#[test]
fn ac04_identity_size_growth() {
    let _g = serial();
    let t = Instant::now();
    let values = vec![10, 12, 16, 24, 40];
    let mut spec = SweepSpec::new(MatrixSpec::new(MatrixClass::Identity, 10), SweepAxis::Size, values.clone());
    spec.rank = Some(8);
    spec.trials = 1;
    spec.restarts = 5;
    spec.master_seed = 4;
    let out = run_sweep(&spec).unwrap();
    let best = best_column(&out.records);
    let gap: Vec<f64> = values.iter().map(|&n| (n - 8) as f64).collect();
    let slope = loglog_slope(&gap, &best).unwrap();
    verdict(
        4,
        "identity sqrt(n-r) growth",
        (0.35..=0.65).contains(&slope),
        format!("best eps_plus {best:.4?}, slope {slope:.3} (window [0.35, 0.65])"),
        t,
        Duration::from_secs(600),
    );
}

#[test]
fn ac05_banded_spectral_norm() {
    let _g = serial();
    let t = Instant::now();
    let bands = [4usize, 16, 64, 256];
    let medians: Vec<f64> = bands
        .iter()
        .map(|&b| {
            let norms: Vec<f64> = (0..10)
                .map(|s| {
                    let m = banded_uniform(500, b, &mut Rng::new(0xAC05 + s)).unwrap();
                    spectral_norm(&m, 1e-8).unwrap()
                })
                .collect();
            aggregate(&norms).unwrap().median
        })
        .collect();
    let x: Vec<f64> = bands.iter().map(|&b| b as f64).collect();
    let slope = loglog_slope(&x, &medians).unwrap();
    verdict(
        5,
        "banded norm ~ sqrt(b)",
        (0.4..=0.6).contains(&slope),
        format!("median norms {medians:.3?}, slope {slope:.3}"),
        t,
        Duration::from_secs(120),
    );
}

#[test]
fn ac06_banded_distance_tracks_norm() {
    let _g = serial();
    let t = Instant::now();
    let mut family = MatrixSpec::new(MatrixClass::Banded, 256);
    family.b = Some(8);
    let mut spec = SweepSpec::new(family, SweepAxis::Band, vec![8, 32, 128]);
    spec.rank = Some(8);
    spec.trials = 3;
    spec.restarts = 3;
    spec.bs_tol = 1e-2;
    spec.master_seed = 6;
    spec.solver.stall_window = 200;
    spec.solver.max_iter = 4000;
    let out = run_sweep(&spec).unwrap();
    let medians: Vec<f64> = out.records.iter().map(|r| r.median).collect();
    let norms: Vec<f64> = out.records.iter().map(|r| r.median_spectral_norm()).collect();
    let rho = pearson(&norms, &medians).unwrap();
    verdict(
        6,
        "banded distance vs spectral norm",
        rho >= 0.95,
        format!("median eps_plus {medians:.4?}, median norms {norms:.3?}, pearson {rho:.4}"),
        t,
        Duration::from_secs(900),
    );
}

#[test]
fn ac07_stiefel_product_norms() {
    let _g = serial();
    let t = Instant::now();
    let ks = [16usize, 64, 256];
    let medians: Vec<f64> = ks
        .iter()
        .map(|&k| {
            let norms: Vec<f64> = (0..5)
                .map(|s| {
                    let p = stiefel_product(512, k, &mut Rng::new(0xAC07 + 100 * s + k as u64), true).unwrap();
                    spectral_norm(&p, 1e-8).unwrap()
                })
                .collect();
            aggregate(&norms).unwrap().median
        })
        .collect();
    let x: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
    let slope = loglog_slope(&x, &medians).unwrap();
    verdict(
        7,
        "normalized Stiefel product norm decay",
        (-0.7..=-0.4).contains(&slope),
        format!("median norms {medians:.3?}, slope {slope:.3}"),
        t,
        Duration::from_secs(120),
    );
}

#[test]
fn ac08_hw_error_scaling() {
    let _g = serial();
    let t = Instant::now();
    let x = DenseMatrix::identity(512);
    let median_error = |r: usize| {
        let errs: Vec<f64> = (0..5)
            .map(|s| {
                let rng = Rng::new(0xAC08 + s);
                hw_approximant(&x, r, SubGaussian::Rademacher, 10, &rng, 1.0)
                    .unwrap()
                    .1
                    .achieved_error
            })
            .collect();
        aggregate(&errs).unwrap().median
    };
    let e16 = median_error(16);
    let e64 = median_error(64);
    let ratio = e64 / e16;
    verdict(
        8,
        "HW error ratio r=64 / r=16",
        (0.4..=0.65).contains(&ratio),
        format!("median errors {e16:.4} -> {e64:.4}, ratio {ratio:.3}"),
        t,
        Duration::from_secs(120),
    );
}

#[test]
fn ac09_jl_exact_at_full_rank() {
    let _g = serial();
    let t = Instant::now();
    let mut rng = Rng::new(0xAC09);
    let mut worst = 0.0f64;
    for i in 0..10 {
        let (m, n, k) = (30 + 7 * i, 45 - 2 * i, 2 + i);
        let x = rng.gaussian_matrix(m, k, 1.0).matmul_t(&rng.gaussian_matrix(n, k, 1.0)).unwrap();
        let (y, _) = jl_approximant(&x, k, 3, &Rng::new(rng.next_u64())).unwrap();
        let diff = x.sub(&y.to_dense()).unwrap();
        let rel = svd_dense(&diff).unwrap().s[0] / svd_dense(&x).unwrap().s[0];
        worst = worst.max(rel);
    }
    verdict(
        9,
        "JL exact at r = rank",
        worst <= 1e-8,
        format!("worst ||X - Y||_2 / ||X||_2 = {worst:.3e}"),
        t,
        Duration::from_secs(30),
    );
}

#[test]
fn ac10_projection_and_diagnostic_properties() {
    let _g = serial();
    let t = Instant::now();
    let mut rng = Rng::new(0xAC10);
    let mut failures = Vec::new();
    for i in 0..1000 {
        let (m, n) = (1 + (rng.next_u64() % 9) as usize, 1 + (rng.next_u64() % 9) as usize);
        let scale = 10f64.powf(3.0 * rng.uniform_pm1());
        let x = DenseMatrix::from_fn(m, n, |_, _| scale * rng.uniform_pm1());
        let a = DenseMatrix::from_fn(m, n, |_, _| 3.0 * scale * rng.uniform_pm1());
        let b = DenseMatrix::from_fn(m, n, |_, _| 3.0 * scale * rng.uniform_pm1());
        let eps = if i % 10 == 0 { 0.0 } else { scale * rng.open01() };
        let pa = project_ball(&a, &x, eps).unwrap();
        let pb = project_ball(&b, &x, eps).unwrap();
        if project_ball(&pa, &x, eps).unwrap() != pa {
            failures.push(format!("pair {i}: not idempotent"));
        }
        if pa.max_abs_diff(&x).unwrap() > eps {
            failures.push(format!("pair {i}: outside ball"));
        }
        let lhs = pa.sub(&pb).unwrap().fro_norm();
        let rhs = a.sub(&b).unwrap().fro_norm();
        if lhs > rhs + 1e-12 * rhs.max(1.0) {
            failures.push(format!("pair {i}: expansive {lhs} > {rhs}"));
        }
    }
    for n in [1usize, 4, 16, 64] {
        let d = diagnose(&DenseMatrix::identity(n), DEFAULT_RANK_TOL).unwrap();
        if (d.spikiness, d.mu_col, d.mu_row, d.rank) != (n as f64, 1.0, 1.0, n) {
            failures.push(format!("I_{n}: {d:?}"));
        }
    }
    for n in [2usize, 8, 32, 128] {
        let d = diagnose(&hadamard(n).unwrap(), DEFAULT_RANK_TOL).unwrap();
        let root = (n as f64).sqrt();
        if (d.spikiness - root).abs() > 1e-10 * root
            || (d.mu_col - 1.0).abs() > 1e-10
            || (d.mu_row - 1.0).abs() > 1e-10
            || d.rank != n
        {
            failures.push(format!("H_{n}: spikiness {} mu {} {}", d.spikiness, d.mu_col, d.mu_row));
        }
    }
    verdict(
        10,
        "projection and diagnostic properties",
        failures.is_empty(),
        if failures.is_empty() {
            "1000 pairs, identity and Hadamard diagnostics exact".to_string()
        } else {
            failures.join("; ")
        },
        t,
        Duration::from_secs(30),
    );
}

#[test]
fn ac11_sweep_csv_is_reproducible() {
    let _g = serial();
    let t = Instant::now();
    let text = r#"
        axis = "rank"
        values = [1, 2, 4]
        trials = 3
        restarts = 2
        bs_tol = 0.01
        master_seed = 20240611
        plots = ["loglog"]

        [family]
        class = "uniform"
        n = 24
    "#;
    let spec = SweepSpec::from_toml(text).unwrap();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut bytes = Vec::new();
    for d in &dirs {
        let out = run_sweep(&spec).unwrap();
        write_outputs(&out, d.path()).unwrap();
        bytes.push(std::fs::read(d.path().join(CSV_FILE)).unwrap());
    }
    verdict(
        11,
        "byte-identical sweep CSV",
        bytes[0] == bytes[1] && !bytes[0].is_empty(),
        format!("{} bytes per run", bytes[0].len()),
        t,
        Duration::from_secs(120),
    );
}

#[test]
fn ac12_rank_projection_matches_svd() {
    let _g = serial();
    let t = Instant::now();
    let mut rng = Rng::new(0xAC12);
    let cfg = ApConfig::default();
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let z = rng.gaussian_matrix(200, 200, 1.0);
        let approx = project_rank(&z, 20, &cfg, &mut rng).unwrap().to_dense();
        let exact = svd_dense(&z).unwrap().truncate(20).to_dense();
        let ratio = z.sub(&approx).unwrap().fro_norm() / z.sub(&exact).unwrap().fro_norm();
        worst = worst.max(ratio);
    }
    verdict(
        12,
        "randomized truncation vs dense SVD",
        worst <= 1.05,
        format!("worst Frobenius error ratio {worst:.5} over 50 matrices"),
        t,
        Duration::from_secs(120),
    );
}
