//! Monte Carlo validation: synthesize isotropic fields, locate their critical
//! points and compare empirical intensities and heights with the theory.

pub mod detect;
pub mod harmonic;
pub mod planar;
pub mod report;

use crate::error::{Error, Result};
use crate::euclidean::EuclideanModel;
use crate::kacrice::{CritModel, Space};
use crate::mc::stream_rng;
use crate::sphere::SphereModel;
use detect::{find_planar, find_sphere, Detection, Rect, Tolerances};
use harmonic::{HarmonicBasis, HarmonicField};
use planar::{PlanarField, Spectrum};
use rayon::prelude::*;
use report::{mean_se, Diagnostics, IndexCount, IndexHeights, Intensity, ModelSummary, SimReport};

pub use detect::CriticalPoint;

/// Default number of cosine terms.
pub const DEFAULT_WAVES: usize = 2000;

/// Below this the cosine sum is visibly non-Gaussian.
pub const MIN_WAVES: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub enum FieldKind {
    /// Covariance `exp(-|t|²/(2ℓ²))` on the plane.
    GaussianCovariance { length_scale: f64 },
    /// Random plane wave: `ΔX = -r²X`.
    PlaneWave { radius: f64 },
    /// Degree-ℓ random spherical harmonic on the 2-sphere.
    SphericalHarmonic { degree: u32 },
    /// Mixture of rings `(radius, weight)` in the spectral plane.
    CustomSpectral { rings: Vec<(f64, f64)> },
}

impl FieldKind {
    pub fn name(&self) -> &'static str {
        match self {
            FieldKind::GaussianCovariance { .. } => "gaussian-covariance",
            FieldKind::PlaneWave { .. } => "plane-wave",
            FieldKind::SphericalHarmonic { .. } => "spherical-harmonic",
            FieldKind::CustomSpectral { .. } => "custom-spectral",
        }
    }

    pub fn space(&self) -> Space {
        match self {
            FieldKind::SphericalHarmonic { .. } => Space::Sphere,
            _ => Space::Euclidean,
        }
    }
}

/// The theory model matching a synthesized field.
#[derive(Debug, Clone, PartialEq)]
pub enum TheoryModel {
    Euclidean(EuclideanModel),
    Sphere(SphereModel),
}

impl TheoryModel {
    pub fn as_model(&self) -> &dyn CritModel {
        match self {
            TheoryModel::Euclidean(m) => m,
            TheoryModel::Sphere(m) => m,
        }
    }

    pub fn eta2(&self) -> f64 {
        match self {
            TheoryModel::Euclidean(m) => m.eta2(),
            TheoryModel::Sphere(m) => m.eta2(),
        }
    }

    pub fn kappa2(&self) -> f64 {
        match self {
            TheoryModel::Euclidean(m) => m.kappa2(),
            TheoryModel::Sphere(m) => m.kappa2(),
        }
    }

    /// Standard deviations of one gradient component and one Hessian diagonal entry.
    pub fn derivative_scales(&self) -> (f64, f64) {
        match self {
            TheoryModel::Euclidean(m) => ((-2.0 * m.rho1()).sqrt(), (12.0 * m.rho2()).sqrt()),
            TheoryModel::Sphere(m) => (m.c1().sqrt(), (3.0 * m.c2() + m.c1()).sqrt()),
        }
    }

    pub fn summary(&self) -> ModelSummary {
        let m = self.as_model();
        ModelSummary {
            space: m.params().space,
            n: m.n(),
            eta2: self.eta2(),
            kappa2: self.kappa2(),
            regime: m.regime(),
        }
    }
}

/// What to synthesize and from which seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisSpec {
    pub kind: FieldKind,
    pub num_waves: usize,
    pub seed: u64,
}

/// One field realization.
#[derive(Debug, Clone)]
pub enum Realization {
    Planar(PlanarField),
    Sphere(HarmonicField),
}

impl SynthesisSpec {
    pub fn new(kind: FieldKind, seed: u64) -> Result<Self> {
        let spec = SynthesisSpec {
            kind,
            num_waves: DEFAULT_WAVES,
            seed,
        };
        spec.model()?;
        Ok(spec)
    }

    pub fn with_waves(mut self, num_waves: usize) -> Result<Self> {
        if num_waves == 0 {
            return Err(Error::InvalidArgument("num_waves must be positive".into()));
        }
        self.num_waves = num_waves;
        Ok(self)
    }

    /// Non-fatal problems with the specification.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.kind.space() == Space::Euclidean && self.num_waves < MIN_WAVES {
            out.push(format!(
                "num_waves = {} is below {MIN_WAVES}; the field is noticeably non-Gaussian",
                self.num_waves
            ));
        }
        out
    }

    fn spectrum(&self) -> Option<Spectrum> {
        match &self.kind {
            FieldKind::GaussianCovariance { length_scale } => Some(Spectrum::Gaussian {
                length_scale: *length_scale,
            }),
            FieldKind::PlaneWave { radius } => Some(Spectrum::Ring { radius: *radius }),
            FieldKind::CustomSpectral { rings } => Some(Spectrum::Rings(rings.clone())),
            FieldKind::SphericalHarmonic { .. } => None,
        }
    }

    pub fn model(&self) -> Result<TheoryModel> {
        match &self.kind {
            FieldKind::GaussianCovariance { length_scale } => {
                Ok(TheoryModel::Euclidean(EuclideanModel::gaussian_covariance(2, *length_scale)?))
            }
            FieldKind::PlaneWave { radius } => Ok(TheoryModel::Euclidean(EuclideanModel::plane_wave(2, *radius)?)),
            FieldKind::SphericalHarmonic { degree } => {
                HarmonicBasis::new(*degree)?;
                Ok(TheoryModel::Sphere(SphereModel::spherical_harmonic(*degree)?))
            }
            FieldKind::CustomSpectral { rings } => {
                if rings.is_empty() || rings.iter().any(|&(r, w)| !(r > 0.0) || !(w > 0.0) || !r.is_finite() || !w.is_finite()) {
                    return Err(Error::InvalidArgument(
                        "custom spectrum needs at least one ring with positive finite radius and weight".into(),
                    ));
                }
                let (m2, m4) = Spectrum::Rings(rings.clone()).moments();
                Ok(TheoryModel::Euclidean(EuclideanModel::from_rho(2, -m2 / 4.0, m4 / 32.0)?))
            }
        }
    }

    /// Realization number `replicate`, drawn from its own sub-stream.
    pub fn synthesize(&self, replicate: u64) -> Realization {
        let mut rng = stream_rng(self.seed, replicate);
        match (&self.kind, self.spectrum()) {
            (FieldKind::SphericalHarmonic { degree }, _) => {
                let basis = HarmonicBasis::new(*degree).expect("degree checked at construction");
                Realization::Sphere(basis.sample(&mut rng))
            }
            (_, Some(s)) => Realization::Planar(PlanarField::sample(&s, self.num_waves, &mut rng)),
            _ => unreachable!(),
        }
    }
}

/// Where critical points are counted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Rectangle(Rect),
    FullSphere,
}

/// A replicated simulation study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub spec: SynthesisSpec,
    pub domain: Domain,
    /// Defaults to `η/6`.
    pub grid_step: Option<f64>,
    pub replications: usize,
}

impl StudyConfig {
    pub fn new(spec: SynthesisSpec, domain: Domain) -> Self {
        StudyConfig {
            spec,
            domain,
            grid_step: None,
            replications: 50,
        }
    }

    pub fn with_replications(mut self, replications: usize) -> Self {
        self.replications = replications;
        self
    }

    pub fn with_grid_step(mut self, step: f64) -> Self {
        self.grid_step = Some(step);
        self
    }
}

/// Detect the critical points of one realization.
pub fn find_critical_points(realization: &Realization, domain: Domain, grid_step: f64, tol: Tolerances) -> Result<Detection> {
    match (realization, domain) {
        (Realization::Planar(f), Domain::Rectangle(r)) => Ok(find_planar(f, r, grid_step, tol)),
        (Realization::Sphere(f), Domain::FullSphere) => Ok(find_sphere(f, grid_step, tol)),
        _ => Err(Error::InvalidArgument(
            "planar fields need a rectangle domain and spherical harmonics the full sphere".into(),
        )),
    }
}

/// Run all replications and aggregate per-index counts, intensities and heights.
pub fn run_study(cfg: &StudyConfig) -> Result<SimReport> {
    let model = cfg.spec.model()?;
    let eta = model.eta2().sqrt();
    let step = cfg.grid_step.unwrap_or(eta / 6.0);
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidArgument(format!("grid step must be positive, got {step}")));
    }
    if cfg.replications == 0 {
        return Err(Error::InvalidArgument("at least one replication is required".into()));
    }
    let area = match cfg.domain {
        Domain::Rectangle(r) => {
            let inner = r.shrink(0.5 * step);
            if !(inner.x1 > inner.x0 && inner.y1 > inner.y0) {
                return Err(Error::InvalidArgument("domain is smaller than the boundary margin".into()));
            }
            inner.area()
        }
        Domain::FullSphere => 4.0 * std::f64::consts::PI,
    };
    let mut warnings = cfg.spec.warnings();
    if step >= eta / 4.0 {
        warnings.push(format!(
            "grid step {step} is not below eta/4 = {}; critical points may be missed",
            eta / 4.0
        ));
    }
    let (gs, hs) = model.derivative_scales();
    let tol = Tolerances::from_scales(gs, hs);
    let runs: Vec<Result<Detection>> = (0..cfg.replications as u64)
        .into_par_iter()
        .map(|rep| find_critical_points(&cfg.spec.synthesize(rep), cfg.domain, step, tol))
        .collect();
    let n = model.as_model().n();
    let mut per_rep = vec![Vec::with_capacity(cfg.replications); n + 1];
    let mut heights = vec![Vec::new(); n + 1];
    let mut diag = Diagnostics {
        warnings,
        ..Default::default()
    };
    let mut points = Vec::new();
    for (rep, run) in runs.into_iter().enumerate() {
        let d = run?;
        diag.candidate_cells += d.candidates as u64;
        diag.newton_failures += d.newton_failures as u64;
        diag.flagged_points += d.flagged.len() as u64;
        let mut counts = vec![0u64; n + 1];
        for p in d.points {
            counts[p.index] += 1;
            heights[p.index].push(p.height);
            points.push((rep as u64, p));
        }
        for (i, c) in counts.into_iter().enumerate() {
            per_rep[i].push(c);
        }
    }
    let counts_per_index = per_rep
        .iter()
        .enumerate()
        .map(|(index, c)| IndexCount {
            index,
            count: c.iter().sum(),
        })
        .collect();
    let intensities = per_rep
        .iter()
        .enumerate()
        .map(|(index, c)| {
            let xs: Vec<f64> = c.iter().map(|&k| k as f64 / area).collect();
            let (value, error) = mean_se(&xs);
            Intensity { index, value, error }
        })
        .collect();
    Ok(SimReport {
        kind: cfg.spec.kind.name().to_string(),
        model: model.summary(),
        seed: cfg.spec.seed,
        num_waves: cfg.spec.num_waves,
        replications: cfg.replications,
        grid_step: step,
        domain_area: area,
        counts_per_index,
        intensities,
        heights_per_index: heights
            .into_iter()
            .enumerate()
            .map(|(index, heights)| IndexHeights { index, heights })
            .collect(),
        diagnostics: diag,
        points,
    })
}
