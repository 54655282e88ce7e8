//! Options shared by all commands, from flags and an optional flat JSON file.

use crate::grid::{parse_grid, parse_indices};
use clap::Args;
use isocrit::sim::FieldKind;
use isocrit::{CritModel, Error, EuclideanModel, Method, NumericConfig, SphereModel};
use serde::Deserialize;
use std::path::{Path, PathBuf};

/// Failures mapped to process exit codes.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Infeasible(String),
    Validation(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Validation(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Infeasible(m) | CliError::Validation(m) | CliError::Io(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::ImpossibleField { .. }
            | Error::InvalidCovariance(_)
            | Error::ParameterOutOfRange { .. }
            | Error::UndefinedDistribution { .. } => CliError::Infeasible(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Every option can also be given as a key of the `--config` file,
/// spelled as the long flag without dashes (`"eta2": 1.0`, `"length-scale": 2`).
/// Flags take precedence over the file.
#[derive(Debug, Default, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Settings {
    /// Flat JSON object with default values for any option.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Optional in a config file; must match the subcommand.
    #[arg(skip)]
    pub command: Option<String>,

    /// euclidean or sphere.
    #[arg(long)]
    pub space: Option<String>,
    /// Dimension N.
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    /// η² (default 1; height distributions do not depend on it in Euclidean space).
    #[arg(long, allow_hyphen_values = true)]
    pub eta2: Option<f64>,
    /// κ² (Euclidean) or κ² with η² (sphere).
    #[arg(long, allow_hyphen_values = true)]
    pub kappa2: Option<f64>,
    /// ρ′ and ρ″ for a Euclidean covariance ρ(|t|²).
    #[arg(long, allow_hyphen_values = true)]
    pub rho1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub rho2: Option<f64>,
    /// C′(1) and C″(1) for a sphere covariance C(⟨s,t⟩).
    #[arg(long, allow_hyphen_values = true)]
    pub c1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c2: Option<f64>,
    /// gaussian-covariance, plane-wave, spherical-harmonic or custom-spectral.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub length_scale: Option<f64>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub degree: Option<u32>,
    /// Spectral rings `r1:w1,r2:w2,…` for custom-spectral.
    #[arg(long)]
    pub rings: Option<String>,

    /// Comma list of indices (default all 0..=N).
    #[arg(long)]
    pub index: Option<String>,
    /// `a:b:step` or a comma list.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// closed-form, quadrature, monte-carlo or fyodorov.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
    /// Monte Carlo sample count.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Master seed; required whenever Monte Carlo is involved.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Output file (stdout if absent and ISOCRIT_OUTPUT_DIR is unset).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,

    /// Multiply expected counts by this volume.
    #[arg(long)]
    pub volume: Option<f64>,
    /// Multiply sphere counts by the area of the whole sphere.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub whole_sphere: Option<bool>,

    /// GOI parameter c for `density`.
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Eigenvalue offsets for `density`: evaluates at `x + offsets`.
    #[arg(long, allow_hyphen_values = true)]
    pub offsets: Option<String>,

    /// density, cdf or both (for `heights`).
    #[arg(long)]
    pub quantity: Option<String>,

    /// Validation suite name.
    #[arg(long)]
    pub suite: Option<String>,

    /// Rectangle size for `simulate`.
    #[arg(long)]
    pub width: Option<f64>,
    #[arg(long)]
    pub height: Option<f64>,
    #[arg(long)]
    pub replications: Option<usize>,
    /// Number of cosine terms.
    #[arg(long)]
    pub waves: Option<usize>,
    #[arg(long)]
    pub grid_step: Option<f64>,
    /// Also write the detected points as CSV here.
    #[arg(long)]
    pub points: Option<PathBuf>,
}

macro_rules! merge_fields {
    ($dst:ident, $src:ident; $($f:ident),*) => {
        $( if $dst.$f.is_none() { $dst.$f = $src.$f; } )*
    };
}

impl Settings {
    /// Fill unset flags from the config file, if any.
    pub fn resolve(mut self, command: &str) -> CliResult<Settings> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let file: Settings = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?;
        if let Some(c) = &file.command {
            if c != command {
                return Err(CliError::Config(format!(
                    "config file is for command `{c}` but `{command}` was invoked"
                )));
            }
        }
        merge_fields!(self, file; space, n, eta2, kappa2, rho1, rho2, c1, c2, preset, length_scale, radius,
            degree, rings, index, grid, method, rel_tol, abs_tol, samples, seed, output, format, volume,
            whole_sphere, c, offsets, quantity, suite, width, height, replications, waves, grid_step, points);
        Ok(self)
    }

    pub fn method(&self) -> CliResult<Option<Method>> {
        self.method
            .as_deref()
            .map(|m| m.parse::<Method>().map_err(|_| CliError::Config(format!("unknown method `{m}`"))))
            .transpose()
    }

    pub fn numeric(&self) -> CliResult<NumericConfig> {
        let mut cfg = NumericConfig::default();
        if let Some(t) = self.rel_tol {
            cfg.rel_tol = t;
        }
        if let Some(t) = self.abs_tol {
            cfg.abs_tol = t;
        }
        if let Some(s) = self.samples {
            if s == 0 {
                return Err(CliError::Config("samples must be positive".into()));
            }
            cfg.mc_samples = s;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        Ok(cfg)
    }

    pub fn require_seed(&self, why: &str) -> CliResult<u64> {
        self.seed
            .ok_or_else(|| CliError::Config(format!("--seed is required: {why} uses Monte Carlo")))
    }

    pub fn grid(&self) -> CliResult<Option<Vec<f64>>> {
        self.grid.as_deref().map(parse_grid).transpose().map_err(CliError::Config)
    }

    pub fn indices(&self, n: usize) -> CliResult<Vec<usize>> {
        let out = match &self.index {
            Some(s) => parse_indices(s).map_err(CliError::Config)?,
            None => (0..=n).collect(),
        };
        if let Some(&i) = out.iter().find(|&&i| i > n) {
            return Err(CliError::Config(format!("index {i} exceeds N = {n}")));
        }
        Ok(out)
    }

    pub fn csv_format(&self) -> CliResult<bool> {
        match self.format.as_deref().unwrap_or("csv") {
            "csv" => Ok(true),
            "json" => Ok(false),
            f => Err(CliError::Config(format!("unknown format `{f}` (csv or json)"))),
        }
    }

    /// Synthesis kind from `--preset`, if one was given.
    pub fn field_kind(&self) -> CliResult<Option<FieldKind>> {
        let need = |v: Option<f64>, name: &str, p: &str| {
            v.ok_or_else(|| CliError::Config(format!("preset {p} needs --{name}")))
        };
        let Some(p) = self.preset.as_deref() else {
            return Ok(None);
        };
        let kind = match p {
            "gaussian-covariance" => FieldKind::GaussianCovariance {
                length_scale: need(self.length_scale.or(Some(1.0)), "length-scale", p)?,
            },
            "plane-wave" => FieldKind::PlaneWave {
                radius: need(self.radius, "radius", p)?,
            },
            "spherical-harmonic" => FieldKind::SphericalHarmonic {
                degree: self
                    .degree
                    .ok_or_else(|| CliError::Config("preset spherical-harmonic needs --degree".into()))?,
            },
            "custom-spectral" => FieldKind::CustomSpectral {
                rings: parse_rings(
                    self.rings
                        .as_deref()
                        .ok_or_else(|| CliError::Config("preset custom-spectral needs --rings".into()))?,
                )?,
            },
            other => return Err(CliError::Config(format!("unknown preset `{other}`"))),
        };
        Ok(Some(kind))
    }

    /// The theory model described by the options.
    pub fn model(&self) -> CliResult<Model> {
        if let Some(kind) = self.field_kind()? {
            let n = self.n.unwrap_or(2);
            return Ok(match kind {
                FieldKind::GaussianCovariance { length_scale } => {
                    Model::Euclidean(EuclideanModel::gaussian_covariance(n, length_scale)?)
                }
                FieldKind::PlaneWave { radius } => Model::Euclidean(EuclideanModel::plane_wave(n, radius)?),
                FieldKind::SphericalHarmonic { degree } => Model::Sphere(SphereModel::spherical_harmonic(degree)?),
                FieldKind::CustomSpectral { .. } => {
                    let spec = isocrit::sim::SynthesisSpec::new(kind, 0)?;
                    match spec.model()? {
                        isocrit::sim::TheoryModel::Euclidean(m) => Model::Euclidean(m),
                        isocrit::sim::TheoryModel::Sphere(m) => Model::Sphere(m),
                    }
                }
            });
        }
        let space = self
            .space
            .as_deref()
            .ok_or_else(|| CliError::Config("give --space (euclidean or sphere) or --preset".into()))?;
        let n = self.n.ok_or_else(|| CliError::Config("--N is required".into()))?;
        match space {
            "euclidean" => {
                if let (Some(r1), Some(r2)) = (self.rho1, self.rho2) {
                    return Ok(Model::Euclidean(EuclideanModel::from_rho(n, r1, r2)?));
                }
                let kappa2 = self
                    .kappa2
                    .ok_or_else(|| CliError::Config("give --kappa2 (with optional --eta2) or --rho1/--rho2".into()))?;
                Ok(Model::Euclidean(EuclideanModel::from_eta_kappa(n, self.eta2.unwrap_or(1.0), kappa2)?))
            }
            "sphere" => {
                if let (Some(c1), Some(c2)) = (self.c1, self.c2) {
                    return Ok(Model::Sphere(SphereModel::from_c(n, c1, c2)?));
                }
                let (Some(eta2), Some(kappa2)) = (self.eta2, self.kappa2) else {
                    return Err(CliError::Config("sphere models need --eta2 and --kappa2, or --c1/--c2".into()));
                };
                Ok(Model::Sphere(SphereModel::from_eta_kappa(n, eta2, kappa2)?))
            }
            other => Err(CliError::Config(format!("unknown space `{other}`"))),
        }
    }

    /// Where to write: `--output` resolved against ISOCRIT_OUTPUT_DIR, or a
    /// default file name inside that directory, or stdout.
    pub fn output_path(&self, default_name: &str) -> Option<PathBuf> {
        resolve_output(self.output.as_deref(), default_name)
    }
}

pub fn resolve_output(path: Option<&Path>, default_name: &str) -> Option<PathBuf> {
    let dir = std::env::var_os("ISOCRIT_OUTPUT_DIR").map(PathBuf::from);
    match (path, dir) {
        (Some(p), Some(d)) if p.is_relative() => Some(d.join(p)),
        (Some(p), _) => Some(p.to_path_buf()),
        (None, Some(d)) => Some(d.join(default_name)),
        (None, None) => None,
    }
}

fn parse_rings(s: &str) -> CliResult<Vec<(f64, f64)>> {
    s.split(',')
        .map(|t| {
            let (r, w) = t.split_once(':').unwrap_or((t, "1"));
            match (r.trim().parse::<f64>(), w.trim().parse::<f64>()) {
                (Ok(r), Ok(w)) => Ok((r, w)),
                _ => Err(CliError::Config(format!("bad ring `{t}` (expected radius:weight)"))),
            }
        })
        .collect()
}

/// A resolved theory model.
#[derive(Debug, Clone)]
pub enum Model {
    Euclidean(EuclideanModel),
    Sphere(SphereModel),
}

impl Model {
    pub fn get(&self) -> &(dyn CritModel + Sync) {
        match self {
            Model::Euclidean(m) => m,
            Model::Sphere(m) => m,
        }
    }

    pub fn eta2(&self) -> f64 {
        match self {
            Model::Euclidean(m) => m.eta2(),
            Model::Sphere(m) => m.eta2(),
        }
    }

    pub fn kappa2(&self) -> f64 {
        match self {
            Model::Euclidean(m) => m.kappa2(),
            Model::Sphere(m) => m.kappa2(),
        }
    }
}
