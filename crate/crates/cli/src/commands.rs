//! The five subcommands.

use crate::output::{emit, write_json, Row, RowBase};
use crate::settings::{resolve_output, CliError, CliResult, Model, Settings};
use isocrit::goi::{ordered_eigenvalue_density, GoiEnsemble};
use isocrit::sim::detect::Rect;
use isocrit::sim::{run_study, Domain, FieldKind, StudyConfig, SynthesisSpec};
use isocrit::special::sphere_area;
use isocrit::{EuclideanModel, EvalOptions, Method, SphereModel};
use rayon::prelude::*;

fn eval_options(s: &Settings, model: &Model, what: &str) -> CliResult<(EvalOptions, Option<u64>)> {
    let method = s.method()?;
    let resolved = method.unwrap_or_else(|| model.get().default_method());
    let mut numeric = s.numeric()?;
    let seed = if matches!(resolved, Method::MonteCarlo | Method::Fyodorov) {
        let seed = s.require_seed(&format!("{what} with method {}", resolved.as_str()))?;
        numeric.seed = seed;
        Some(seed)
    } else {
        None
    };
    Ok((EvalOptions { method, numeric }, seed))
}

/// Ordered-eigenvalue density of GOI(c) along `λ = x + offsets`.
pub fn density(s: &Settings) -> CliResult<()> {
    let n = s.n.ok_or_else(|| CliError::Config("--N is required".into()))?;
    let c = s.c.ok_or_else(|| CliError::Config("--c is required".into()))?;
    let ens = GoiEnsemble::new(n, c)?;
    let offsets: Vec<f64> = match &s.offsets {
        Some(o) => o
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Config(format!("bad offset `{t}`"))))
            .collect::<CliResult<_>>()?,
        None => (0..n).map(|k| k as f64).collect(),
    };
    if offsets.len() != n {
        return Err(CliError::Config(format!("--offsets needs {n} values, got {}", offsets.len())));
    }
    if offsets.windows(2).any(|w| w[1] < w[0]) {
        return Err(CliError::Config("--offsets must be non-decreasing".into()));
    }
    let grid = s.grid()?.ok_or_else(|| CliError::Config("--grid is required".into()))?;
    let base = RowBase::goi(n, ens.is_degenerate());
    let mut rows = Vec::with_capacity(grid.len());
    for &x in &grid {
        let lam: Vec<f64> = offsets.iter().map(|o| x + o).collect();
        let v = ordered_eigenvalue_density(&ens, &lam)?;
        rows.push(base.row(None, Some(x), "goi_density", v, 0.0, Method::ClosedForm.as_str()));
    }
    emit(&rows, s.csv_format()?, s.output_path(&out_name("density", s)?).as_deref())
}

fn out_name(cmd: &str, s: &Settings) -> CliResult<String> {
    Ok(format!("{cmd}.{}", if s.csv_format()? { "csv" } else { "json" }))
}

fn volume(s: &Settings, model: &Model) -> CliResult<f64> {
    let mut v = s.volume.unwrap_or(1.0);
    if !(v > 0.0) || !v.is_finite() {
        return Err(CliError::Config(format!("--volume must be positive, got {v}")));
    }
    if s.whole_sphere.unwrap_or(false) {
        match model {
            Model::Sphere(m) => v *= sphere_area(m.n()),
            Model::Euclidean(_) => return Err(CliError::Config("--whole-sphere needs a sphere model".into())),
        }
    }
    Ok(v)
}

/// Expected numbers of critical points, totals or above thresholds.
pub fn expect(s: &Settings) -> CliResult<()> {
    let model = s.model()?;
    let m = model.get();
    let (opts, seed) = eval_options(s, &model, "expect")?;
    let vol = volume(s, &model)?;
    let indices = s.indices(m.n())?;
    let grid = s.grid()?;
    let jobs: Vec<(usize, Option<f64>)> = match &grid {
        Some(g) => indices.iter().flat_map(|&i| g.iter().map(move |&u| (i, Some(u)))).collect(),
        None => indices.iter().map(|&i| (i, None)).collect(),
    };
    let base = RowBase::from_model(&model, seed);
    let rows = jobs
        .par_iter()
        .map(|&(i, u)| {
            let (q, r) = match u {
                Some(u) => ("expected_crit_above", m.expected_crit_above_with(i, u, &opts)?),
                None => ("expected_crit_total", m.expected_crit_total_with(i, &opts)?),
            };
            Ok(base.row(Some(i), u, q, vol * r.value, vol * r.error_estimate, r.method.as_str()))
        })
        .collect::<CliResult<Vec<Row>>>()?;
    emit(&rows, s.csv_format()?, s.output_path(&out_name("expect", s)?).as_deref())
}

/// Height densities `h_i(x)` and/or survival functions `F_i(u)`.
pub fn heights(s: &Settings) -> CliResult<()> {
    let model = s.model()?;
    let m = model.get();
    let (opts, seed) = eval_options(s, &model, "heights")?;
    let grid = s.grid()?.ok_or_else(|| CliError::Config("--grid is required".into()))?;
    let (dens, cdf) = match s.quantity.as_deref().unwrap_or("density") {
        "density" => (true, false),
        "cdf" => (false, true),
        "both" => (true, true),
        q => return Err(CliError::Config(format!("unknown quantity `{q}` (density, cdf or both)"))),
    };
    let mut jobs = Vec::new();
    for i in s.indices(m.n())? {
        for &x in &grid {
            if dens {
                jobs.push((i, x, true));
            }
            if cdf {
                jobs.push((i, x, false));
            }
        }
    }
    let base = RowBase::from_model(&model, seed);
    let rows = jobs
        .par_iter()
        .map(|&(i, x, d)| {
            let (q, r) = if d {
                ("height_density", m.height_density_with(i, x, &opts)?)
            } else {
                ("height_cdf", m.height_cdf_with(i, x, &opts)?)
            };
            Ok(base.row(Some(i), Some(x), q, r.value, r.error_estimate, r.method.as_str()))
        })
        .collect::<CliResult<Vec<Row>>>()?;
    emit(&rows, s.csv_format()?, s.output_path(&out_name("heights", s)?).as_deref())
}

struct Check {
    model: Model,
    index: usize,
    u: f64,
    a: Method,
    b: Method,
}

fn cross_path_checks() -> isocrit::Result<Vec<Check>> {
    let mut out = Vec::new();
    let push = |out: &mut Vec<Check>, model: Model, a: Method, b: Method, us: &[f64]| {
        for i in 0..=model.get().n() {
            for &u in us {
                out.push(Check { model: model.clone(), index: i, u, a, b });
            }
        }
    };
    // closed form against the general Kac-Rice quadrature
    for (e2, k2) in [(1.0, 0.5), (0.5, 1.0), (2.0, 2.0)] {
        let m = Model::Euclidean(EuclideanModel::from_eta_kappa(2, e2, k2)?);
        push(&mut out, m, Method::ClosedForm, Method::Quadrature, &[f64::NEG_INFINITY, 0.5]);
    }
    for (e2, k2) in [(1.0, 1.5), (0.5, 0.2), (1.0, 3.0)] {
        let m = Model::Sphere(SphereModel::from_eta_kappa(2, e2, k2)?);
        push(&mut out, m, Method::ClosedForm, Method::Quadrature, &[f64::NEG_INFINITY, -0.3]);
    }
    // general engine against the GOE(N+1) reduction
    for (e2, k2) in [(1.0, 0.5), (2.0, 0.8)] {
        let m = Model::Euclidean(EuclideanModel::from_eta_kappa(2, e2, k2)?);
        push(&mut out, m, Method::Quadrature, Method::Fyodorov, &[f64::NEG_INFINITY, 0.3]);
    }
    let m = Model::Sphere(SphereModel::from_eta_kappa(2, 1.0, 1.5)?);
    push(&mut out, m, Method::Quadrature, Method::Fyodorov, &[f64::NEG_INFINITY, 0.3]);
    let m = Model::Euclidean(EuclideanModel::from_eta_kappa(1, 1.0, 0.5)?);
    push(&mut out, m, Method::Quadrature, Method::Fyodorov, &[f64::NEG_INFINITY, 0.0]);
    Ok(out)
}

/// Cross-path agreement suite; exit 4 when any check fails.
pub fn validate(s: &Settings) -> CliResult<()> {
    let suite = s.suite.as_deref().unwrap_or("cross-path");
    if suite != "cross-path" {
        return Err(CliError::Config(format!("unknown suite `{suite}` (available: cross-path)")));
    }
    let seed = s.require_seed("validate")?;
    let mut numeric = s.numeric()?;
    numeric.seed = seed;
    if s.samples.is_none() {
        numeric.mc_samples = 200_000;
    }
    let checks = cross_path_checks()?;
    let results = checks
        .par_iter()
        .map(|c| {
            let m = c.model.get();
            let run = |method: Method| {
                let opts = EvalOptions { method: Some(method), numeric };
                if c.u == f64::NEG_INFINITY {
                    m.expected_crit_total_with(c.index, &opts)
                } else {
                    m.expected_crit_above_with(c.index, c.u, &opts)
                }
            };
            let (a, b) = (run(c.a)?, run(c.b)?);
            let diff = (a.value - b.value).abs();
            let combined = a.error_estimate.hypot(b.error_estimate);
            let tol = 3.0 * combined + 1e-6 * a.value.abs().max(b.value.abs()) + 1e-12;
            let label = format!("check:{}-vs-{}", c.a.as_str(), c.b.as_str());
            let row = RowBase::from_model(&c.model, Some(seed)).row(
                Some(c.index),
                Some(c.u),
                &label,
                diff,
                tol,
                Method::MonteCarlo.as_str(),
            );
            Ok((row, diff <= tol, a.value, b.value))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut failures = 0;
    for (row, ok, a, b) in &results {
        if !ok {
            failures += 1;
        }
        eprintln!(
            "{} {} {} N={} eta2={} kappa2={} i={} u={}: {a} vs {b} (|diff| {} tol {})",
            if *ok { "PASS" } else { "FAIL" },
            row.quantity,
            row.space,
            row.n,
            row.eta2.unwrap_or(f64::NAN),
            row.kappa2.unwrap_or(f64::NAN),
            row.index.unwrap_or(0),
            row.grid_value.unwrap_or(f64::NAN),
            row.value,
            row.error
        );
    }
    let rows: Vec<Row> = results.into_iter().map(|r| r.0).collect();
    emit(&rows, s.csv_format()?, s.output_path(&out_name("validate", s)?).as_deref())?;
    if failures > 0 {
        return Err(CliError::Validation(format!("{failures} of {} cross-path checks failed", rows.len())));
    }
    eprintln!("all {} cross-path checks passed", rows.len());
    Ok(())
}

/// Replicated field simulation with critical point detection.
pub fn simulate(s: &Settings) -> CliResult<()> {
    let seed = s.require_seed("simulate")?;
    let kind = s
        .field_kind()?
        .ok_or_else(|| CliError::Config("simulate needs --preset".into()))?;
    if s.n.is_some_and(|n| n != 2) {
        return Err(CliError::Config("simulation supports N = 2 only".into()));
    }
    let mut spec = SynthesisSpec::new(kind.clone(), seed)?;
    if let Some(k) = s.waves {
        spec = spec.with_waves(k)?;
    }
    let domain = match kind {
        FieldKind::SphericalHarmonic { .. } => Domain::FullSphere,
        _ => {
            let w = s.width.unwrap_or(10.0);
            let h = s.height.unwrap_or(w);
            if !(w > 0.0 && h > 0.0) {
                return Err(CliError::Config("--width and --height must be positive".into()));
            }
            Domain::Rectangle(Rect::new(0.0, w, 0.0, h))
        }
    };
    let mut cfg = StudyConfig::new(spec, domain).with_replications(s.replications.unwrap_or(50));
    if let Some(h) = s.grid_step {
        cfg = cfg.with_grid_step(h);
    }
    let report = run_study(&cfg)?;
    for w in &report.diagnostics.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(p) = resolve_output(s.points.as_deref(), "points.csv").filter(|_| s.points.is_some()) {
        let f = std::fs::File::create(&p)?;
        report.write_points_csv(std::io::BufWriter::new(f)).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let path = s.output_path(&out_name("simulate", s)?);
    if s.csv_format()? {
        let model = match SynthesisSpec::new(kind, seed)?.model()? {
            isocrit::sim::TheoryModel::Euclidean(m) => Model::Euclidean(m),
            isocrit::sim::TheoryModel::Sphere(m) => Model::Sphere(m),
        };
        let base = RowBase::from_model(&model, Some(seed));
        let mut rows = Vec::new();
        for (c, r) in report.counts_per_index.iter().zip(&report.intensities) {
            rows.push(base.row(Some(c.index), None, "count", c.count as f64, 0.0, "monte-carlo"));
            rows.push(base.row(Some(r.index), None, "intensity", r.value, r.error, "monte-carlo"));
        }
        emit(&rows, true, path.as_deref())
    } else {
        match path {
            Some(p) => write_json(&report, std::io::BufWriter::new(std::fs::File::create(p)?)),
            None => write_json(&report, std::io::stdout().lock()),
        }
    }
}
