//! Shared Kac–Rice machinery for isotropic fields on `R^N` and `S^N`.
//!
//! Both geometries reduce to the same computation: a prefactor times a GOI
//! expectation of `∏|λⱼ − β| 1{λ_i < β < λ_{i+1}}`, with either a Gaussian
//! outer integral over the height (`β = k x`) or, in the boundary regime,
//! a cap on the eigenvalue mean.

use crate::error::{Error, Result};
use crate::fyodorov;
use crate::goi::{self, GoiEnsemble, IndexedFunctional, OrderedRegion};
use crate::numeric::{Estimate, EvalOptions, Method, NumericConfig};
use crate::quad::{self, QuadSettings};
use crate::special::{gaussian_moments, phi};
use serde::{Deserialize, Serialize};
use std::fmt;

/// `|κ² − bound|` below this classifies a model as boundary.
pub const REGIME_TOL: f64 = 1e-9;

/// Step of the central difference used for boundary height densities.
pub const DENSITY_STEP: f64 = 1e-4;

/// Largest dimension accepted by the eigenvalue routines.
pub const MAX_DIM: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Euclidean,
    Sphere,
}

impl Space {
    pub fn as_str(self) -> &'static str {
        match self {
            Space::Euclidean => "euclidean",
            Space::Sphere => "sphere",
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Space {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "euclidean" => Ok(Space::Euclidean),
            "sphere" => Ok(Space::Sphere),
            other => Err(format!("unknown space `{other}` (expected euclidean or sphere)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Nonboundary,
    Boundary,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Nonboundary => "nonboundary",
            Regime::Boundary => "boundary",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A computed intensity or probability with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CritResult {
    pub value: f64,
    pub error_estimate: f64,
    pub method: Method,
}

impl CritResult {
    pub fn new(est: Estimate, method: Method) -> Self {
        CritResult {
            value: est.value,
            error_estimate: est.error,
            method,
        }
    }

    pub fn estimate(&self) -> Estimate {
        Estimate::new(self.value, self.error_estimate)
    }
}

/// Hessian laws at a point: unconditional, conditional on the field value
/// (degenerate on the boundary), and the scale mapping GOI draws to Hessians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HessianEnsembles {
    pub unconditional: GoiEnsemble,
    pub conditional: GoiEnsemble,
    pub scale: f64,
}

/// Everything the general evaluation path needs, for either geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KacRiceParams {
    pub space: Space,
    pub n: usize,
    pub eta: f64,
    pub kappa: f64,
    pub regime: Regime,
    /// Multiplies the GOI expectation to give an intensity.
    pub prefactor: f64,
    pub ensembles: HessianEnsembles,
    /// The conditional shift is `β = shift_scale · x`.
    pub shift_scale: f64,
    /// Boundary regime: the eigenvalue mean is capped at `-cap_scale · u`.
    pub cap_scale: f64,
}

impl KacRiceParams {
    fn check_index(&self, i: usize) -> Result<()> {
        if i > self.n {
            return Err(Error::IndexOutOfRange { index: i, n: self.n });
        }
        Ok(())
    }
}

/// `∫ φ(x) P(x) dx` over `x ≥ u` with `λ_i < kx < λ_{i+1}`, where
/// `P(x) = ∏|λⱼ − kx|`. The sign of every factor is fixed on that window,
/// so the integrand is a polynomial times `φ` and integrates exactly.
pub(crate) fn window_integral(lam: &[f64], i: usize, k: f64, u: f64) -> f64 {
    let n = lam.len();
    let lo = if i == 0 { u } else { u.max(lam[i - 1] / k) };
    let hi = if i == n { f64::INFINITY } else { lam[i] / k };
    if !(hi > lo) {
        return 0.0;
    }
    let mut poly = [0.0f64; MAX_DIM + 1];
    poly[0] = 1.0;
    for (j, &l) in lam.iter().enumerate() {
        // factor (kx - l) below the window, (l - kx) above it
        let (c0, c1) = if j < i { (-l, k) } else { (l, -k) };
        for m in (0..=j + 1).rev() {
            let lower = if m > 0 { poly[m - 1] } else { 0.0 };
            poly[m] = poly[m] * c0 + lower * c1;
        }
    }
    let mut mom = [0.0f64; MAX_DIM + 1];
    gaussian_moments(lo, hi, n, &mut mom);
    (0..=n).map(|m| poly[m] * mom[m]).sum()
}

fn ratio(num: Estimate, den: Estimate, index: usize) -> Result<Estimate> {
    if !(den.value > den.error) || den.value <= 0.0 {
        return Err(Error::UndefinedDistribution {
            index,
            value: den.value,
            error: den.error,
        });
    }
    let v = num.value / den.value;
    let rel = num.error / num.value.abs().max(f64::MIN_POSITIVE) + den.error / den.value;
    let err = if num.value == 0.0 {
        num.error / den.value
    } else {
        v.abs() * rel
    };
    Ok(Estimate::new(v, err))
}

fn general_method(p: &KacRiceParams, m: Method) -> Result<Method> {
    if p.n > MAX_DIM {
        return Err(Error::Unsupported(format!("dimension {} exceeds {MAX_DIM}", p.n)));
    }
    match m {
        Method::Quadrature if p.n > 3 => Err(Error::MethodUnavailable(format!(
            "quadrature supports N ≤ 3 (got N = {}), use monte-carlo",
            p.n
        ))),
        Method::Quadrature | Method::MonteCarlo => Ok(m),
        other => Err(Error::MethodUnavailable(format!("{other} is not a general-path method"))),
    }
}

/// `E[μ_i]` from the unconditional Hessian law.
pub(crate) fn general_total(p: &KacRiceParams, i: usize, m: Method, cfg: &NumericConfig) -> Result<Estimate> {
    p.check_index(i)?;
    let m = general_method(p, m)?;
    let g = IndexedFunctional::new(i, 0.0);
    Ok(goi::goi_expectation(&p.ensembles.unconditional, &g, m, cfg)?.scale(p.prefactor))
}

/// `E[μ_i(X, u)]`.
pub(crate) fn general_above(p: &KacRiceParams, i: usize, u: f64, m: Method, cfg: &NumericConfig) -> Result<Estimate> {
    p.check_index(i)?;
    let m = general_method(p, m)?;
    if u.is_nan() {
        return Err(Error::InvalidArgument("threshold is NaN".into()));
    }
    if u == f64::INFINITY {
        return Ok(Estimate::ZERO);
    }
    let raw = match p.regime {
        Regime::Boundary => {
            let g = if u == f64::NEG_INFINITY {
                IndexedFunctional::new(i, 0.0)
            } else {
                IndexedFunctional::with_trace_cap(i, 0.0, -p.cap_scale * u)
            };
            goi::goi_expectation(&p.ensembles.unconditional, &g, m, cfg)?
        }
        Regime::Nonboundary => {
            let ens = &p.ensembles.conditional;
            let k = p.shift_scale;
            let f = |lam: &[f64]| window_integral(lam, i, k, u);
            match m {
                Method::MonteCarlo => goi::mc_expectation(ens, f, cfg),
                _ => {
                    let beta = k * u;
                    let radius = goi::truncation_radius(ens.c(), if beta.is_finite() { beta } else { 0.0 });
                    let settings = QuadSettings::from(cfg);
                    // The lower window edge switches from u to λ_i/k at λ_i = ku.
                    let mut total = goi::integrate_ordered(ens, &OrderedRegion::split_at(i, beta, radius), &f, &settings)?;
                    if i > 0 {
                        let region = OrderedRegion {
                            below: None,
                            above: Some((i - 1, beta)),
                            sum_cap: None,
                            radius,
                        };
                        total = total + goi::integrate_ordered(ens, &region, &f, &settings)?;
                    }
                    total
                }
            }
        }
    };
    Ok(raw.scale(p.prefactor))
}

/// Height density by the general path.
pub(crate) fn general_density(p: &KacRiceParams, i: usize, x: f64, m: Method, cfg: &NumericConfig) -> Result<Estimate> {
    p.check_index(i)?;
    let total = general_total(p, i, m, cfg)?;
    if !x.is_finite() {
        return ratio(Estimate::ZERO, total, i);
    }
    match p.regime {
        Regime::Nonboundary => {
            let g = IndexedFunctional::new(i, p.shift_scale * x);
            let e = goi::goi_expectation(&p.ensembles.conditional, &g, general_method(p, m)?, cfg)?;
            ratio(e.scale(p.prefactor * phi(x)), total, i)
        }
        Regime::Boundary => {
            let lo = general_above(p, i, x - DENSITY_STEP, m, cfg)?;
            let hi = general_above(p, i, x + DENSITY_STEP, m, cfg)?;
            let mut d = ratio((lo - hi).scale(0.5 / DENSITY_STEP), total, i)?;
            d.value = d.value.max(0.0);
            Ok(d)
        }
    }
}

/// `∫_u^∞ h(x) dx` for a closed-form density with Gaussian tails.
pub(crate) fn survival_by_quadrature<H: Fn(f64) -> f64>(h: H, u: f64) -> Estimate {
    const EDGE: f64 = 40.0;
    if u == f64::NEG_INFINITY || u <= -EDGE {
        let whole = quad::integrate_scalar(&h, -EDGE, EDGE, &[-4.0, -2.0, 0.0, 2.0, 4.0], &closed_settings());
        return Estimate::new(1.0, (whole.value - 1.0).abs() + whole.error);
    }
    if u >= EDGE {
        return Estimate::ZERO;
    }
    // Integrate whichever side is shorter to keep small tails accurate.
    if u > 0.0 {
        quad::integrate_scalar(&h, u, EDGE, &[u + 1.0, u + 3.0, 4.0, 8.0], &closed_settings())
    } else {
        let left = quad::integrate_scalar(&h, -EDGE, u, &[u - 1.0, u - 3.0, -4.0, -8.0], &closed_settings());
        Estimate::new(1.0 - left.value, left.error)
    }
}

fn closed_settings() -> QuadSettings {
    QuadSettings {
        rel_tol: 1e-13,
        abs_tol: 1e-16,
        max_subdivisions: 400,
    }
}

/// Evaluation interface shared by [`EuclideanModel`](crate::euclidean::EuclideanModel)
/// and [`SphereModel`](crate::sphere::SphereModel).
pub trait CritModel {
    fn params(&self) -> KacRiceParams;

    /// Exact `E[μ_i]`, where available.
    fn closed_total(&self, i: usize) -> Option<f64>;

    /// Exact `h_i(x)`, where available.
    fn closed_density(&self, i: usize, x: f64) -> Option<f64>;

    /// `F_i(u)` from the closed-form density, where available.
    fn closed_cdf(&self, i: usize, u: f64) -> Option<Estimate>;

    fn n(&self) -> usize {
        self.params().n
    }

    fn regime(&self) -> Regime {
        self.params().regime
    }

    fn hessian_ensembles(&self) -> HessianEnsembles {
        self.params().ensembles
    }

    /// Method used when none is requested.
    fn default_method(&self) -> Method {
        match self.n() {
            2 => Method::ClosedForm,
            1 | 3 => Method::Quadrature,
            _ => Method::MonteCarlo,
        }
    }

    fn expected_crit_total(&self, i: usize) -> Result<CritResult> {
        self.expected_crit_total_with(i, &EvalOptions::auto())
    }

    fn expected_crit_total_with(&self, i: usize, opts: &EvalOptions) -> Result<CritResult> {
        let p = self.params();
        p.check_index(i)?;
        let m = opts.method.unwrap_or_else(|| self.default_method());
        let est = match m {
            Method::ClosedForm => Estimate::exact(self.closed_total(i).ok_or_else(|| no_closed_form(&p))?),
            Method::Fyodorov => fyodorov::fyodorov_expected_crit(&p, i, f64::NEG_INFINITY, &opts.numeric)?.estimate(),
            _ => general_total(&p, i, m, &opts.numeric)?,
        };
        Ok(CritResult::new(est, m))
    }

    fn expected_crit_above(&self, i: usize, u: f64) -> Result<CritResult> {
        self.expected_crit_above_with(i, u, &EvalOptions::auto())
    }

    fn expected_crit_above_with(&self, i: usize, u: f64, opts: &EvalOptions) -> Result<CritResult> {
        let p = self.params();
        p.check_index(i)?;
        let m = opts.method.unwrap_or_else(|| self.default_method());
        let est = match m {
            Method::ClosedForm => {
                let total = self.closed_total(i).ok_or_else(|| no_closed_form(&p))?;
                let f = self.closed_cdf(i, u).ok_or_else(|| no_closed_form(&p))?;
                f.scale(total)
            }
            Method::Fyodorov => fyodorov::fyodorov_expected_crit(&p, i, u, &opts.numeric)?.estimate(),
            _ => general_above(&p, i, u, m, &opts.numeric)?,
        };
        Ok(CritResult::new(est, m))
    }

    fn height_density(&self, i: usize, x: f64) -> Result<CritResult> {
        self.height_density_with(i, x, &EvalOptions::auto())
    }

    fn height_density_with(&self, i: usize, x: f64, opts: &EvalOptions) -> Result<CritResult> {
        let p = self.params();
        p.check_index(i)?;
        let m = opts.method.unwrap_or_else(|| self.default_method());
        let est = match m {
            Method::ClosedForm => Estimate::exact(self.closed_density(i, x).ok_or_else(|| no_closed_form(&p))?),
            Method::Fyodorov => {
                if !x.is_finite() {
                    Estimate::ZERO
                } else {
                    let total = fyodorov::fyodorov_expected_crit(&p, i, f64::NEG_INFINITY, &opts.numeric)?.estimate();
                    let dens = fyodorov::fyodorov_density_numerator(&p, i, x, &opts.numeric)?;
                    ratio(dens, total, i)?
                }
            }
            _ => general_density(&p, i, x, m, &opts.numeric)?,
        };
        Ok(CritResult::new(est, m))
    }

    fn height_cdf(&self, i: usize, u: f64) -> Result<CritResult> {
        self.height_cdf_with(i, u, &EvalOptions::auto())
    }

    fn height_cdf_with(&self, i: usize, u: f64, opts: &EvalOptions) -> Result<CritResult> {
        let p = self.params();
        p.check_index(i)?;
        let m = opts.method.unwrap_or_else(|| self.default_method());
        if m == Method::ClosedForm {
            let f = self.closed_cdf(i, u).ok_or_else(|| no_closed_form(&p))?;
            return Ok(CritResult::new(f, m));
        }
        let total = self.expected_crit_total_with(i, opts)?.estimate();
        let above = self.expected_crit_above_with(i, u, opts)?.estimate();
        Ok(CritResult::new(ratio(above, total, i)?, m))
    }
}

fn no_closed_form(p: &KacRiceParams) -> Error {
    Error::MethodUnavailable(format!(
        "closed forms exist only for N = 2 (got N = {}); use quadrature or monte-carlo",
        p.n
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::big_phi_upper;
    use proptest::prelude::*;

    fn brute_window(lam: &[f64], i: usize, k: f64, u: f64) -> f64 {
        let s = QuadSettings {
            rel_tol: 1e-13,
            abs_tol: 1e-16,
            max_subdivisions: 500,
        };
        let b = |x: f64| {
            let beta = k * x;
            let below = lam.iter().filter(|&&l| l < beta).count();
            if below == i {
                phi(x) * lam.iter().map(|&l| (l - beta).abs()).product::<f64>()
            } else {
                0.0
            }
        };
        let mut cuts: Vec<f64> = lam.iter().map(|l| l / k).collect();
        cuts.push(0.0);
        quad::integrate_scalar(b, u.max(-30.0), 30.0, &cuts, &s).value
    }

    #[test]
    fn window_without_factors_is_gaussian_tail() {
        assert!((window_integral(&[], 0, 0.7, 0.3) - big_phi_upper(0.3)).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn window_matches_direct_quadrature(
            v in proptest::collection::vec(-3.0f64..3.0, 1..4),
            k in 0.2f64..1.2,
            u in -3.0f64..2.0,
        ) {
            let mut lam = v;
            lam.sort_by(f64::total_cmp);
            for i in 0..=lam.len() {
                let a = window_integral(&lam, i, k, u);
                let b = brute_window(&lam, i, k, u);
                prop_assert!((a - b).abs() < 1e-10 * (1.0 + b.abs()), "i={} {} vs {}", i, a, b);
            }
        }
    }
}
