//! Simulation summaries, height histograms and Kolmogorov–Smirnov checks.

use super::detect::CriticalPoint;
use crate::error::{Error, Result};
use crate::kacrice::{Regime, Space};
use serde::Serialize;
use std::io::Write;

/// Minimum number of heights for an empirical height distribution.
pub const MIN_POINTS: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexCount {
    pub index: usize,
    pub count: u64,
}

/// Mean critical points per unit area, with its standard error across replications.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Intensity {
    pub index: usize,
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexHeights {
    pub index: usize,
    pub heights: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub candidate_cells: u64,
    pub newton_failures: u64,
    /// Points with a near-singular Hessian, excluded from the counts.
    pub flagged_points: u64,
    pub warnings: Vec<String>,
}

/// The theory model matched to a simulation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSummary {
    pub space: Space,
    #[serde(rename = "N")]
    pub n: usize,
    pub eta2: f64,
    pub kappa2: f64,
    pub regime: Regime,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub kind: String,
    pub model: ModelSummary,
    pub seed: u64,
    pub num_waves: usize,
    pub replications: usize,
    pub grid_step: f64,
    /// Usable area of one replication, after removing the boundary margin.
    pub domain_area: f64,
    pub counts_per_index: Vec<IndexCount>,
    pub intensities: Vec<Intensity>,
    pub heights_per_index: Vec<IndexHeights>,
    pub diagnostics: Diagnostics,
    /// `(replicate, point)` for every classified point.
    #[serde(skip)]
    pub points: Vec<(u64, CriticalPoint)>,
}

impl SimReport {
    pub fn total_points(&self) -> u64 {
        self.counts_per_index.iter().map(|c| c.count).sum()
    }

    pub fn intensity(&self, index: usize) -> Option<&Intensity> {
        self.intensities.iter().find(|c| c.index == index)
    }

    pub fn heights(&self, index: usize) -> &[f64] {
        self.heights_per_index
            .iter()
            .find(|h| h.index == index)
            .map(|h| h.heights.as_slice())
            .unwrap_or(&[])
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    /// Points as CSV: `replicate,x,y,height,index,lambda1,lambda2`.
    ///
    /// Sphere points are written as `x` = azimuth, `y` = polar angle.
    pub fn write_points_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["replicate", "x", "y", "height", "index", "lambda1", "lambda2"])?;
        for (rep, p) in &self.points {
            let (x, y) = match p.location.as_slice() {
                [x, y] => (*x, *y),
                [x, y, z] => (y.atan2(*x), z.clamp(-1.0, 1.0).acos()),
                _ => (f64::NAN, f64::NAN),
            };
            w.write_record([
                rep.to_string(),
                x.to_string(),
                y.to_string(),
                p.height.to_string(),
                p.index.to_string(),
                p.hessian_eigenvalues[0].to_string(),
                p.hessian_eigenvalues[1].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Mean and standard error of per-replication values.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Histogram bin layout.
#[derive(Debug, Clone, PartialEq)]
pub enum Binning {
    /// `count` equal bins spanning the sample range.
    Uniform(usize),
    /// Explicit increasing edges; samples outside are not binned.
    Edges(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeightHistogram {
    pub index: usize,
    pub n: usize,
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// `count / (n · width)`, comparable to a height density.
    pub density: Vec<f64>,
    pub ks_distance: f64,
    /// Critical value of the KS statistic at level 0.01 for `n` samples.
    pub ks_critical_01: f64,
}

impl HeightHistogram {
    pub fn ks_passes(&self) -> bool {
        self.ks_distance < self.ks_critical_01
    }
}

/// Kolmogorov–Smirnov distance between a sample and a model given by its
/// survival function `P(H > u)`.
pub fn ks_distance<S: Fn(f64) -> f64>(sample: &[f64], survival: S) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0, |d, (j, &x)| {
        let g = 1.0 - survival(x);
        let hi = (j + 1) as f64 / n - g;
        let lo = g - j as f64 / n;
        d.max(hi).max(lo)
    })
}

/// Critical value of the one-sample KS statistic at level `alpha`
/// (asymptotic Kolmogorov quantile with the Stephens small-sample factor).
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    let rn = (n as f64).sqrt();
    c / (rn + 0.12 + 0.11 / rn)
}

/// Histogram and KS distance for raw heights of index `index`.
pub fn height_distribution<S: Fn(f64) -> f64>(
    heights: &[f64],
    index: usize,
    bins: &Binning,
    survival: S,
) -> Result<HeightHistogram> {
    if heights.len() < MIN_POINTS {
        return Err(Error::InsufficientData {
            index,
            have: heights.len(),
            need: MIN_POINTS,
        });
    }
    let edges = match bins {
        Binning::Uniform(k) => {
            let k = (*k).max(1);
            let lo = heights.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = heights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let w = if hi > lo { (hi - lo) / k as f64 } else { 1.0 };
            let mut e: Vec<f64> = (0..=k).map(|j| lo + w * j as f64).collect();
            e[k] = e[k].max(hi);
            e
        }
        Binning::Edges(e) => {
            if e.len() < 2 || e.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::InvalidArgument("histogram edges must be strictly increasing".into()));
            }
            e.clone()
        }
    };
    let nb = edges.len() - 1;
    let mut counts = vec![0u64; nb];
    for &h in heights {
        if h < edges[0] || h > edges[nb] {
            continue;
        }
        let j = edges.partition_point(|&e| e <= h).saturating_sub(1).min(nb - 1);
        counts[j] += 1;
    }
    let n = heights.len();
    let density = counts
        .iter()
        .zip(edges.windows(2))
        .map(|(&c, w)| c as f64 / (n as f64 * (w[1] - w[0])))
        .collect();
    Ok(HeightHistogram {
        index,
        n,
        edges,
        counts,
        density,
        ks_distance: ks_distance(heights, survival),
        ks_critical_01: ks_critical_value(n, 0.01),
    })
}

/// [`height_distribution`] over the index-`index` points of a list.
pub fn empirical_height_distribution<S: Fn(f64) -> f64>(
    points: &[CriticalPoint],
    index: usize,
    bins: &Binning,
    survival: S,
) -> Result<HeightHistogram> {
    let heights: Vec<f64> = points.iter().filter(|p| p.index == index).map(|p| p.height).collect();
    height_distribution(&heights, index, bins, survival)
}
