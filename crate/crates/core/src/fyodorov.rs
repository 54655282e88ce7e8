//! GOI(c) functionals with `c > 0` rewritten as GOE expectations of size N+1.
//!
//! For `M ~ GOI(c)`,
//! `E[|det(M − a)| 1{index(M − a) = i}] = Γ((N+1)/2)/√(πc) · E_GOE[exp(λ²/2 − (λ − a)²/(2c))]`,
//! where `λ` is the `(i+1)`-th smallest eigenvalue of a GOE matrix of size N+1.
//! This is an independent route to the restricted-regime intensities.

use crate::error::{Error, Result};
use crate::goi::{self, GoiEnsemble, OrderedRegion};
use crate::kacrice::{CritResult, KacRiceParams, Regime, Space};
use crate::numeric::{Estimate, Method, NumericConfig};
use crate::quad::QuadSettings;
use crate::special::{big_phi_upper, ln_gamma, phi};
use std::f64::consts::PI;

/// `E_GOE^{N+1}[w(λ_{i+1})]` by Monte Carlo or, for N ≤ 2, quadrature.
fn goe_order_statistic<W>(n: usize, i: usize, w: W, radius: f64, method: Method, cfg: &NumericConfig) -> Result<Estimate>
where
    W: Fn(f64) -> f64 + Sync,
{
    let goe = GoiEnsemble::goe(n + 1)?;
    match method {
        Method::MonteCarlo | Method::Fyodorov => Ok(goi::mc_expectation(&goe, |lam| w(lam[i]), cfg)),
        Method::Quadrature if n <= 2 => goi::integrate_ordered(
            &goe,
            &OrderedRegion::full(radius),
            &|lam: &[f64]| w(lam[i]),
            &QuadSettings::from(cfg),
        ),
        Method::Quadrature => Err(Error::MethodUnavailable(format!(
            "GOE(N+1) quadrature supports N ≤ 2 (got N = {n}), use monte-carlo"
        ))),
        Method::ClosedForm => Err(Error::MethodUnavailable("no closed form for GOE(N+1) expectations".into())),
    }
}

fn gamma_ratio(n: usize, c: f64) -> f64 {
    (ln_gamma((n as f64 + 1.0) / 2.0) - 0.5 * (PI * c).ln()).exp()
}

/// `E[|det(M − aI)| 1{index(M − aI) = i}]` for `M ~ GOI(c)`, `c > 0`.
pub fn goi_to_goe_np1(ens: &GoiEnsemble, i: usize, a: f64, method: Method, cfg: &NumericConfig) -> Result<Estimate> {
    let n = ens.n();
    let c = ens.c();
    if i > n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    if !(c > 0.0) {
        return Err(Error::MethodUnavailable(format!(
            "the GOE(N+1) representation needs c > 0 (got c = {c}); for c = 0 the ensemble is the GOE itself, use a direct GOI expectation"
        )));
    }
    let w = |l: f64| (0.5 * l * l - (l - a) * (l - a) / (2.0 * c)).exp();
    let radius = goi::truncation_radius(c, a);
    Ok(goe_order_statistic(n, i, w, radius, method, cfg)?.scale(gamma_ratio(n, c)))
}

fn restricted(p: &KacRiceParams) -> Result<f64> {
    let c = p.ensembles.conditional.c();
    if p.regime == Regime::Boundary || !(c > 0.0) {
        let what = match p.space {
            Space::Euclidean => format!("kappa^2 = {} (needs kappa^2 < 1)", p.kappa * p.kappa),
            Space::Sphere => format!(
                "kappa^2 - eta^2 = {} (needs kappa^2 - eta^2 < 1)",
                p.kappa * p.kappa - p.eta * p.eta
            ),
        };
        return Err(Error::RegimeUnsupported(format!(
            "the GOE(N+1) route is restricted: {what}; use the general path (quadrature or monte-carlo)"
        )));
    }
    Ok(c)
}

/// `E[μ_i(X, u)]` in the restricted regime, with Monte Carlo over GOE(N+1).
pub fn fyodorov_expected_crit(p: &KacRiceParams, i: usize, u: f64, cfg: &NumericConfig) -> Result<CritResult> {
    fyodorov_expected_crit_with(p, i, u, Method::MonteCarlo, cfg)
}

/// As [`fyodorov_expected_crit`], choosing how the GOE(N+1) expectation is computed.
///
/// The height integral is done in closed form: with `s = c + k²`,
/// `∫_u^∞ φ(x) e^{-(λ−kx)²/(2c)} dx = √(c/s) e^{-λ²/(2s)} Φ̄(√(s/c)(u − kλ/s))`.
pub fn fyodorov_expected_crit_with(
    p: &KacRiceParams,
    i: usize,
    u: f64,
    inner: Method,
    cfg: &NumericConfig,
) -> Result<CritResult> {
    let c = restricted(p)?;
    if i > p.n {
        return Err(Error::IndexOutOfRange { index: i, n: p.n });
    }
    if u.is_nan() {
        return Err(Error::InvalidArgument("threshold is NaN".into()));
    }
    let k = p.shift_scale;
    let s = c + k * k;
    let slope = (s / c).sqrt();
    let w = |l: f64| {
        let tail = if u == f64::NEG_INFINITY { 1.0 } else { big_phi_upper(slope * (u - k * l / s)) };
        (0.5 * l * l * (1.0 - 1.0 / s)).exp() * tail
    };
    let radius = goi::truncation_radius(s, 0.0);
    let e = goe_order_statistic(p.n, i, w, radius, inner, cfg)?;
    let est = if u == f64::INFINITY { Estimate::ZERO } else { e.scale(p.prefactor * gamma_ratio(p.n, s)) };
    Ok(CritResult::new(est, Method::Fyodorov))
}

/// `pref · φ(x) · E_GOI(c)[∏|λ − kx| 1{index = i}]`, the unnormalized height density.
pub(crate) fn fyodorov_density_numerator(p: &KacRiceParams, i: usize, x: f64, cfg: &NumericConfig) -> Result<Estimate> {
    restricted(p)?;
    let a = p.shift_scale * x;
    let e = goi_to_goe_np1(&p.ensembles.conditional, i, a, Method::MonteCarlo, cfg)?;
    Ok(e.scale(p.prefactor * phi(x)))
}
