//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines are always printed.

use isocrit::goi::{sample_goi, validate_ensemble};
use isocrit::mc::stream_rng;
use isocrit::quad::{integrate_scalar, QuadSettings};
use isocrit::sim::detect::Rect;
use isocrit::sim::report::{height_distribution, Binning};
use isocrit::sim::{run_study, Domain, FieldKind, StudyConfig, SynthesisSpec};
use isocrit::{CritModel, EuclideanModel, EvalOptions, Method, NumericConfig, Regime, SphereModel};
use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn quad() -> EvalOptions {
    EvalOptions::new(Method::Quadrature)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Critical-point counts of a smooth process on the line (Rice), from the
/// variances of X′ and X″: minima per unit length `√(λ4/λ2)/(2π)`.
fn rice_minima(var_d1: f64, var_d2: f64) -> f64 {
    (var_d2 / var_d1).sqrt() / (2.0 * PI)
}

fn rice_reduction() -> Outcome {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for kappa2 in [0.5, 1.0, 2.5] {
        let m = EuclideanModel::from_eta_kappa(1, 1.0, kappa2).map_err(|e| e.to_string())?;
        let oracle = rice_minima(-2.0 * m.rho1(), 12.0 * m.rho2());
        for i in 0..=1 {
            let r = m.expected_crit_total_with(i, &quad()).map_err(|e| e.to_string())?;
            worst = worst.max((r.value - oracle).abs());
        }
    }
    let m = EuclideanModel::from_eta_kappa(1, 1.0, 1.0).unwrap();
    let v = m.expected_crit_total_with(0, &quad()).unwrap().value;
    let target = 6f64.sqrt() / (2.0 * PI);
    let el = t.elapsed();
    ensure!((v - target).abs() < 1e-6, "E[mu0] = {v}, expected {target}");
    ensure!(worst < 1e-6, "Rice oracle gap {worst:.2e}");
    ensure!(el < Duration::from_secs(1), "took {el:?}");
    Ok(format!("E[mu0] = {v:.9} (target {target:.9}), Rice oracle gap {worst:.1e}, {el:.2?}"))
}

fn euclidean_closed_forms() -> Outcome {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for eta in [0.5f64, 1.0, 2.0] {
        let e2 = eta * eta;
        let unit = 1.0 / (3f64.sqrt() * PI * e2);
        for kappa2 in [0.3, 1.0] {
            let m = EuclideanModel::from_eta_kappa(2, e2, kappa2).map_err(|e| e.to_string())?;
            for (i, target) in [(0, unit), (1, 2.0 * unit), (2, unit)] {
                let r = m.expected_crit_total_with(i, &quad()).map_err(|e| e.to_string())?;
                worst = worst.max(rel(r.value, target));
            }
        }
    }
    let el = t.elapsed();
    ensure!(worst < 1e-6, "worst relative gap {worst:.2e}");
    ensure!(el < Duration::from_secs(30), "took {el:?}");
    Ok(format!("worst relative gap {worst:.1e} over 18 totals, {el:.2?}"))
}

fn sphere_totals(eta2: f64) -> [f64; 3] {
    let a = 1.0 / (4.0 * PI);
    let b = 1.0 / (PI * eta2 * (3.0 + eta2).sqrt());
    [a + 0.5 * b, b, a + 0.5 * b]
}

fn sphere_closed_forms() -> Outcome {
    let mut worst: f64 = 0.0;
    for eta in [0.5f64, 1.0, 2.0] {
        let e2 = eta * eta;
        for kappa2 in [0.5 * e2, e2 + 1.0] {
            let m = SphereModel::from_eta_kappa(2, e2, kappa2).map_err(|e| e.to_string())?;
            for (i, target) in sphere_totals(e2).into_iter().enumerate() {
                let r = m.expected_crit_total_with(i, &quad()).map_err(|e| e.to_string())?;
                worst = worst.max(rel(r.value, target));
            }
        }
    }
    ensure!(worst < 1e-6, "worst relative gap {worst:.2e}");
    Ok(format!("worst relative gap {worst:.1e} over 18 totals"))
}

fn euler_characteristic() -> Outcome {
    let mut notes = Vec::new();
    for (e2, k2) in [(1.0, 1.5), (0.5, 0.2), (2.0, 2.5), (1.0, 3.0), (0.5, 2.5)] {
        let m = SphereModel::from_eta_kappa(2, e2, k2).map_err(|e| e.to_string())?;
        let sign = [1.0, -1.0, 1.0];
        let closed: f64 = (0..3).map(|i| sign[i] * m.expected_crit_total(i).unwrap().value).sum::<f64>() * 4.0 * PI;
        ensure!((closed - 2.0).abs() < 1e-10, "closed form chi = {closed} at ({e2}, {k2})");
        let mut chi = 0.0;
        let mut var = 0.0;
        for i in 0..3 {
            let r = m.expected_crit_total_with(i, &quad()).map_err(|e| e.to_string())?;
            chi += sign[i] * r.value;
            var += r.error_estimate.powi(2);
        }
        let (chi, err) = (4.0 * PI * chi, 4.0 * PI * var.sqrt());
        ensure!(
            (chi - 2.0).abs() <= 3.0 * err,
            "general path chi = {chi} (|gap| {:.2e}) exceeds 3 x error {err:.2e} at ({e2}, {k2}), {:?}",
            (chi - 2.0).abs(),
            m.regime()
        );
        notes.push(format!("{:?}:{:.1e}/{:.1e}", m.regime(), (chi - 2.0).abs(), err));
    }
    Ok(format!("closed form exact to 1e-10; general |gap|/error: {}", notes.join(" ")))
}

fn six_settings() -> Vec<(String, Box<dyn CritModel>)> {
    let mut out: Vec<(String, Box<dyn CritModel>)> = Vec::new();
    for k2 in [0.5, 1.0, 2.0] {
        out.push((format!("R2 k2={k2}"), Box::new(EuclideanModel::from_eta_kappa(2, 1.0, k2).unwrap())));
    }
    for (e2, k2) in [(1.0, 1.5), (0.5, 0.2), (1.0, 3.0)] {
        out.push((format!("S2 ({e2},{k2})"), Box::new(SphereModel::from_eta_kappa(2, e2, k2).unwrap())));
    }
    out
}

fn normalization_and_symmetry() -> Outcome {
    let settings = QuadSettings {
        rel_tol: 1e-12,
        abs_tol: 1e-15,
        max_subdivisions: 400,
    };
    let grid: Vec<f64> = (0..161).map(|k| -4.0 + 0.05 * k as f64).collect();
    let (mut worst_norm, mut worst_sym): (f64, f64) = (0.0, 0.0);
    let mut regimes = [false; 2];
    for (name, m) in six_settings() {
        regimes[(m.regime() == Regime::Boundary) as usize] = true;
        for i in 0..3 {
            let h = |x: f64| m.height_density(i, x).unwrap().value;
            let mass = integrate_scalar(h, -14.0, 14.0, &[0.0], &settings).value;
            worst_norm = worst_norm.max((mass - 1.0).abs());
            let mut prev = f64::INFINITY;
            for &u in &grid {
                let f = m.height_cdf(i, u).unwrap().value;
                ensure!(f <= prev + 1e-15, "{name}: F_{i} increases at u = {u} ({prev} -> {f})");
                prev = f;
            }
        }
        for &x in &grid {
            let (a, b) = (m.height_density(1, x).unwrap().value, m.height_density(1, -x).unwrap().value);
            worst_sym = worst_sym.max((a - b).abs());
        }
    }
    ensure!(regimes == [true, true], "both regimes must be covered");
    ensure!(worst_norm < 1e-8, "worst |int h - 1| = {worst_norm:.2e}");
    ensure!(worst_sym < 1e-10, "h1 asymmetry {worst_sym:.2e}");
    Ok(format!("|int h - 1| <= {worst_norm:.1e}, h1 asymmetry {worst_sym:.1e}, F monotone on 161 points"))
}

/// Sign flip `X -> -X`: index-(N-i) points above `u` match index-i points
/// below `-u`, so `E[mu_{N-i}(X, u)] = E[mu_i(X)] - E[mu_i(X, -u)]`.
fn index_symmetry() -> Outcome {
    let us = [-1.5, -0.5, 0.0, 0.7, 1.5];
    let mut worst: f64 = 0.0;
    let mut literal: f64 = 0.0;
    let t = Instant::now();
    let cases: Vec<Box<dyn CritModel>> = vec![
        Box::new(EuclideanModel::from_eta_kappa(2, 1.0, 0.5).unwrap()),
        Box::new(EuclideanModel::from_eta_kappa(2, 1.0, 2.0).unwrap()),
        Box::new(SphereModel::from_eta_kappa(2, 1.0, 1.5).unwrap()),
        Box::new(EuclideanModel::from_eta_kappa(3, 1.0, 1.0).unwrap()),
    ];
    for m in &cases {
        let n = m.n();
        for i in 0..=n {
            let total = m.expected_crit_total_with(i, &quad()).map_err(|e| e.to_string())?;
            for &u in &us {
                let a = m.expected_crit_above_with(n - i, u, &quad()).map_err(|e| e.to_string())?;
                let b = m.expected_crit_above_with(i, -u, &quad()).map_err(|e| e.to_string())?;
                let below = total.value - b.value;
                let tol = a.error_estimate + b.error_estimate + total.error_estimate;
                let gap = (a.value - below).abs();
                ensure!(
                    gap <= tol,
                    "N={n} i={i} u={u}: above {} vs mirrored below {below} (gap {gap:.2e}, errors {tol:.2e})",
                    a.value
                );
                worst = worst.max(gap / tol.max(f64::MIN_POSITIVE));
                literal = literal.max((a.value - b.value).abs());
            }
        }
    }
    Ok(format!(
        "worst gap/combined-error {worst:.2} over N in {{2,3}} and both regimes, {:.1?} \
         (the above-vs-above reading differs by up to {literal:.3})",
        t.elapsed()
    ))
}

fn fyodorov_cross_path() -> Outcome {
    let t = Instant::now();
    let ninf = f64::NEG_INFINITY;
    let e = |n, e2, k2| -> Box<dyn CritModel> { Box::new(EuclideanModel::from_eta_kappa(n, e2, k2).unwrap()) };
    let s = |n, e2, k2| -> Box<dyn CritModel> { Box::new(SphereModel::from_eta_kappa(n, e2, k2).unwrap()) };
    let configs: Vec<(Box<dyn CritModel>, usize, f64)> = vec![
        (e(1, 1.0, 0.5), 0, 0.0),
        (e(1, 2.0, 0.8), 1, ninf),
        (e(2, 1.0, 0.5), 0, ninf),
        (e(2, 1.0, 0.5), 1, 0.3),
        (e(2, 0.5, 0.9), 2, 0.5),
        (e(3, 1.0, 0.6), 1, ninf),
        (e(3, 1.0, 0.6), 2, 0.2),
        (s(2, 1.0, 1.5), 0, ninf),
        (s(2, 1.0, 1.5), 1, 0.2),
        (s(2, 0.5, 0.2), 2, -0.5),
        (s(3, 0.5, 0.8), 0, ninf),
        (s(3, 0.5, 0.8), 3, 0.0),
    ];
    let numeric = NumericConfig::default().with_seed(2024).with_samples(1_000_000);
    let fy = EvalOptions::new(Method::Fyodorov).with_numeric(numeric);
    let mut worst: f64 = 0.0;
    for (k, (m, i, u)) in configs.iter().enumerate() {
        ensure!(m.hessian_ensembles().conditional.c() > 0.0, "config {k} is not restricted");
        let g = m.expected_crit_above_with(*i, *u, &quad()).map_err(|e| e.to_string())?;
        let f = m.expected_crit_above_with(*i, *u, &fy).map_err(|e| e.to_string())?;
        let err = g.error_estimate.hypot(f.error_estimate);
        let z = (g.value - f.value).abs() / err;
        ensure!(z <= 3.0, "config {k} (N={}, i={i}, u={u}): general {} vs fyodorov {} ± {}", m.n(), g.value, f.value, f.error_estimate);
        worst = worst.max(z);
    }
    let el = t.elapsed();
    ensure!(el < Duration::from_secs(300), "took {el:?}");
    Ok(format!("12 configurations, worst gap {worst:.2} combined errors, 1e6 matrices each, {el:.1?}"))
}

fn boundary_continuity() -> Outcome {
    let xs: Vec<f64> = (0..=800).map(|k| -4.0 + 0.01 * k as f64).collect();
    let sup = |near: &dyn CritModel, at: &dyn CritModel| -> f64 {
        let mut s: f64 = 0.0;
        for i in 0..3 {
            for &x in &xs {
                let a = near.height_density(i, x).unwrap().value;
                let b = at.height_density(i, x).unwrap().value;
                s = s.max((a - b).abs());
            }
        }
        s
    };
    let near = EuclideanModel::from_eta_kappa(2, 1.0, 2.0 - 1e-3).unwrap();
    let at = EuclideanModel::from_eta_kappa(2, 1.0, 2.0).unwrap();
    ensure!(near.regime() == Regime::Nonboundary && at.regime() == Regime::Boundary, "regimes");
    let gap_e = sup(&near, &at);
    let near = SphereModel::from_eta_kappa(2, 1.0, 3.0 - 1e-3).unwrap();
    let at = SphereModel::from_eta_kappa(2, 1.0, 3.0).unwrap();
    let gap_s = sup(&near, &at);
    ensure!(gap_e < 1e-2, "Euclidean sup gap {gap_e:.3e}");
    ensure!(gap_s < 1e-2, "sphere sup gap {gap_s:.3e}");
    Ok(format!("sup gaps: plane {gap_e:.2e}, sphere {gap_s:.2e}"))
}

fn goi_sampler() -> Outcome {
    let n_samples = 100_000;
    let mut worst: f64 = 0.0;
    for (n, c) in [(2usize, 0.5), (2, -0.45), (3, 1.0), (3, -1.0 / 3.0 + 0.05)] {
        let ens = validate_ensemble(n, c).map_err(|e| e.to_string())?;
        let entries: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        let p = entries.len();
        let mut sum = vec![0.0; p * p];
        let mut sum2 = vec![0.0; p * p];
        let mut rng = stream_rng(99, n as u64);
        for _ in 0..n_samples {
            let m = sample_goi(&ens, &mut rng);
            for a in 0..p {
                for b in a..p {
                    let v = m[entries[a]] * m[entries[b]];
                    sum[a * p + b] += v;
                    sum2[a * p + b] += v * v;
                }
            }
        }
        let d = |x: usize, y: usize| (x == y) as u8 as f64;
        for a in 0..p {
            for b in a..p {
                let ((i, j), (k, l)) = (entries[a], entries[b]);
                let target = 0.5 * (d(i, k) * d(j, l) + d(i, l) * d(j, k)) + c * d(i, j) * d(k, l);
                let mean = sum[a * p + b] / n_samples as f64;
                let var = sum2[a * p + b] / n_samples as f64 - mean * mean;
                let se = (var / n_samples as f64).sqrt();
                let z = (mean - target).abs() / se;
                ensure!(z <= 4.0, "(N={n}, c={c}) E[M{i}{j} M{k}{l}] = {mean}, expected {target} ({z:.2} SE)");
                worst = worst.max(z);
            }
        }
    }
    let ens = validate_ensemble(2, -0.5).map_err(|e| e.to_string())?;
    let mut rng = stream_rng(100, 0);
    let mut max_trace: f64 = 0.0;
    for _ in 0..10_000 {
        let m = sample_goi(&ens, &mut rng);
        max_trace = max_trace.max(m.trace().abs());
    }
    ensure!(max_trace < 1e-12, "degenerate trace {max_trace:.2e}");
    Ok(format!("worst second-moment deviation {worst:.2} SE; degenerate max |trace| {max_trace:.1e}"))
}

fn field_validation() -> Outcome {
    let t = Instant::now();
    let spec = SynthesisSpec::new(FieldKind::PlaneWave { radius: 10.0 }, 2024).map_err(|e| e.to_string())?;
    let pw = run_study(&StudyConfig::new(spec, Domain::Rectangle(Rect::square(10.0)))).map_err(|e| e.to_string())?;
    let target0 = 100.0 / (8.0 * 3f64.sqrt() * PI);
    let i0 = pw.intensity(0).unwrap();
    ensure!(
        (i0.value - target0).abs() < 3.0 * i0.error,
        "plane wave mu0 intensity {} ± {} vs {target0}",
        i0.value,
        i0.error
    );
    let spec = SynthesisSpec::new(FieldKind::GaussianCovariance { length_scale: 1.0 }, 77).map_err(|e| e.to_string())?;
    let gc = run_study(&StudyConfig::new(spec, Domain::Rectangle(Rect::square(34.0)))).map_err(|e| e.to_string())?;
    let target1 = 1.0 / (3f64.sqrt() * PI);
    let i1 = gc.intensity(1).unwrap();
    ensure!(
        (i1.value - target1).abs() < 3.0 * i1.error,
        "gaussian-covariance mu1 intensity {} ± {} vs {target1}",
        i1.value,
        i1.error
    );
    let model = EuclideanModel::gaussian_covariance(2, 1.0).unwrap();
    let hist = height_distribution(gc.heights(1), 1, &Binning::Uniform(60), |u| model.height_cdf(1, u).unwrap().value)
        .map_err(|e| e.to_string())?;
    ensure!(hist.n >= 10_000, "only {} saddles pooled", hist.n);
    ensure!(hist.ks_passes(), "KS {} >= critical {}", hist.ks_distance, hist.ks_critical_01);
    let el = t.elapsed();
    ensure!(el < Duration::from_secs(600), "took {el:?}");
    Ok(format!(
        "mu0 {:.4} ± {:.4} (target {target0:.4}); mu1 {:.4} ± {:.4} (target {target1:.4}); KS {:.4} < {:.4} at n = {}; {el:.1?}",
        i0.value, i0.error, i1.value, i1.error, hist.ks_distance, hist.ks_critical_01, hist.n
    ))
}

fn figure_curves() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_isocrit");
    let panels: [(&str, f64, f64); 6] = [
        ("euclidean", 1.0, 0.01),
        ("euclidean", 1.0, 1.0),
        ("euclidean", 1.0, 2.0),
        ("sphere", 0.05, 0.05),
        ("sphere", 0.5, 1.0),
        ("sphere", 1.0, 3.0),
    ];
    let settings = QuadSettings {
        rel_tol: 1e-12,
        abs_tol: 1e-15,
        max_subdivisions: 400,
    };
    let mut worst_norm: f64 = 0.0;
    for (space, e2, k2) in panels {
        let out = Command::new(bin)
            .args(["heights", "--space", space, "--N", "2", "--grid", "-4:4:0.05"])
            .args(["--eta2", &e2.to_string(), "--kappa2", &k2.to_string()])
            .env_remove("ISOCRIT_OUTPUT_DIR")
            .output()
            .map_err(|e| e.to_string())?;
        ensure!(out.status.success(), "{space} ({e2},{k2}): {}", String::from_utf8_lossy(&out.stderr));
        let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
        let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
        ensure!(rows.len() == 3 * 161, "{space}: {} rows", rows.len());
        for r in &rows {
            let v: f64 = r[8].parse().map_err(|_| format!("bad value {}", r[8]))?;
            ensure!(v.is_finite() && v >= 0.0, "{space} ({e2},{k2}) i={} x={}: {v}", r[5], r[6]);
            ensure!(r[10] == "closed-form", "method {}", r[10]);
        }
        let model: Box<dyn CritModel> = if space == "euclidean" {
            Box::new(EuclideanModel::from_eta_kappa(2, e2, k2).unwrap())
        } else {
            Box::new(SphereModel::from_eta_kappa(2, e2, k2).unwrap())
        };
        for i in 0..3 {
            let mass = integrate_scalar(|x| model.height_density(i, x).unwrap().value, -14.0, 14.0, &[0.0], &settings).value;
            worst_norm = worst_norm.max((mass - 1.0).abs());
            for r in rows.iter().filter(|r| r[5] == i.to_string()) {
                let x: f64 = r[6].parse().unwrap();
                let v: f64 = r[8].parse().unwrap();
                ensure!(v == model.height_density(i, x).unwrap().value, "table differs from library at x = {x}");
            }
        }
    }
    ensure!(worst_norm < 1e-8, "curve mass off by {worst_norm:.2e}");
    Ok(format!("6 panels x 3 indices x 161 points finite and nonnegative; |int h - 1| <= {worst_norm:.1e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("Rice reduction, N = 1", rice_reduction),
        ("Euclidean N = 2 totals by general quadrature", euclidean_closed_forms),
        ("sphere N = 2 totals by general quadrature", sphere_closed_forms),
        ("Euler characteristic of the 2-sphere", euler_characteristic),
        ("height normalization, symmetry, monotone F", normalization_and_symmetry),
        ("index symmetry, N in {2, 3}", index_symmetry),
        ("GOE(N+1) reduction against the general engine", fyodorov_cross_path),
        ("boundary continuity of height densities", boundary_continuity),
        ("GOI sampler second moments", goi_sampler),
        ("Monte Carlo field validation", field_validation),
        ("height curve tables from the CLI", figure_curves),
    ];
    let mut failed = 0;
    for (k, (title, run)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {title}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {title}: {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
