//! Isotropic Gaussian fields on `R^N` with covariance `ρ(|t|²)`.

use crate::error::{Error, Result};
use crate::goi::GoiEnsemble;
use crate::kacrice::{self, CritModel, HessianEnsembles, KacRiceParams, Regime, Space, REGIME_TOL};
use crate::numeric::Estimate;
use crate::special::{big_phi, big_phi_upper, phi};
use std::f64::consts::{PI, SQRT_2};

/// Field summarized by `ρ′ = ρ′(0) < 0` and `ρ″ = ρ″(0) > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EuclideanModel {
    n: usize,
    rho1: f64,
    rho2: f64,
}

impl EuclideanModel {
    pub fn from_rho(n: usize, rho1: f64, rho2: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        if !(rho1 < 0.0) || !rho1.is_finite() {
            return Err(Error::InvalidCovariance(format!("rho' must be negative, got {rho1}")));
        }
        if !(rho2 > 0.0) || !rho2.is_finite() {
            return Err(Error::InvalidCovariance(format!("rho'' must be positive, got {rho2}")));
        }
        let m = EuclideanModel { n, rho1, rho2 };
        let bound = m.kappa2_bound();
        if m.kappa2() > bound + REGIME_TOL {
            return Err(Error::ImpossibleField {
                n,
                quantity: "kappa^2",
                value: m.kappa2(),
                bound,
            });
        }
        Ok(m)
    }

    /// Model with prescribed `η²` and `κ²`.
    pub fn from_eta_kappa(n: usize, eta2: f64, kappa2: f64) -> Result<Self> {
        if !(eta2 > 0.0) || !(kappa2 > 0.0) {
            return Err(Error::InvalidCovariance(format!(
                "eta^2 and kappa^2 must be positive, got {eta2} and {kappa2}"
            )));
        }
        EuclideanModel::from_rho(n, -kappa2 / eta2, kappa2 / (eta2 * eta2))
    }

    /// `ρ(r) = exp(-r / (2ℓ²))`, i.e. covariance `exp(-|t|²/(2ℓ²))`.
    pub fn gaussian_covariance(n: usize, length_scale: f64) -> Result<Self> {
        let l2 = length_scale * length_scale;
        EuclideanModel::from_rho(n, -0.5 / l2, 0.25 / (l2 * l2))
    }

    /// Spectral measure uniform on the sphere of radius `r` (random plane waves).
    pub fn plane_wave(n: usize, r: f64) -> Result<Self> {
        let nf = n as f64;
        let r2 = r * r;
        EuclideanModel::from_rho(n, -r2 / (2.0 * nf), r2 * r2 / (4.0 * nf * (nf + 2.0)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rho1(&self) -> f64 {
        self.rho1
    }

    pub fn rho2(&self) -> f64 {
        self.rho2
    }

    pub fn eta(&self) -> f64 {
        (-self.rho1).sqrt() / self.rho2.sqrt()
    }

    pub fn kappa(&self) -> f64 {
        -self.rho1 / self.rho2.sqrt()
    }

    pub fn eta2(&self) -> f64 {
        -self.rho1 / self.rho2
    }

    pub fn kappa2(&self) -> f64 {
        self.rho1 * self.rho1 / self.rho2
    }

    /// `(N+2)/N`, the largest attainable `κ²`.
    pub fn kappa2_bound(&self) -> f64 {
        (self.n as f64 + 2.0) / self.n as f64
    }

    pub fn regime(&self) -> Regime {
        if (self.kappa2() - self.kappa2_bound()).abs() < REGIME_TOL {
            Regime::Boundary
        } else {
            Regime::Nonboundary
        }
    }

    /// `κ²` with boundary models snapped onto the exact bound.
    fn kappa2_effective(&self) -> f64 {
        match self.regime() {
            Regime::Boundary => self.kappa2_bound(),
            Regime::Nonboundary => self.kappa2(),
        }
    }

    pub fn hessian_ensembles(&self) -> HessianEnsembles {
        let n = self.n;
        let cond_c = match self.regime() {
            Regime::Boundary => -1.0 / n as f64,
            Regime::Nonboundary => (1.0 - self.kappa2()) / 2.0,
        };
        HessianEnsembles {
            unconditional: GoiEnsemble::new(n, 0.5).expect("c = 1/2 is valid"),
            conditional: GoiEnsemble::new(n, cond_c).expect("bounded κ² gives valid c"),
            scale: (8.0 * self.rho2).sqrt(),
        }
    }

    fn h_closed(&self, i: usize, x: f64) -> f64 {
        let k2 = self.kappa2_effective();
        match (self.regime(), i) {
            (_, 1) => {
                let s3 = 3.0f64.sqrt();
                s3 / (2.0 * PI * (3.0 - k2)).sqrt() * (-1.5 * x * x / (3.0 - k2)).exp()
            }
            (Regime::Boundary, 0) => boundary_extreme(-x),
            (Regime::Boundary, _) => boundary_extreme(x),
            (Regime::Nonboundary, 0) => nonboundary_max(k2, -x),
            (Regime::Nonboundary, _) => nonboundary_max(k2, x),
        }
    }

    fn max_survival(&self, u: f64) -> Estimate {
        match self.regime() {
            Regime::Boundary => Estimate::exact(if u <= 0.0 {
                1.0
            } else {
                2.0 * 3f64.sqrt() * u * phi(u) + 2.0 * big_phi_upper(3f64.sqrt() * u)
            }),
            Regime::Nonboundary => {
                let k2 = self.kappa2();
                kacrice::survival_by_quadrature(|x| nonboundary_max(k2, x), u)
            }
        }
    }
}

/// `h_2` for N = 2 off the boundary; depends on `κ²` only.
fn nonboundary_max(k2: f64, x: f64) -> f64 {
    let k = k2.sqrt();
    let a = 2.0 - k2;
    let b = 3.0 - k2;
    3f64.sqrt() * k2 * (x * x - 1.0) * phi(x) * big_phi(k * x / a.sqrt())
        + k * x * (3.0 * a).sqrt() / (2.0 * PI) * (-x * x / a).exp()
        + 6f64.sqrt() / (PI * b).sqrt() * (-1.5 * x * x / b).exp() * big_phi(k * x / (b * a).sqrt())
}

/// `h_2` for N = 2 on the boundary `κ² = 2`.
fn boundary_extreme(x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    2.0 * 3f64.sqrt() / (2.0 * PI).sqrt() * ((x * x - 1.0) * (-0.5 * x * x).exp() + (-1.5 * x * x).exp())
}

impl CritModel for EuclideanModel {
    fn params(&self) -> KacRiceParams {
        let n = self.n as f64;
        let eta = self.eta();
        let kappa = self.kappa2_effective().sqrt();
        KacRiceParams {
            space: Space::Euclidean,
            n: self.n,
            eta,
            kappa,
            regime: self.regime(),
            prefactor: (2.0 / PI).powf(n / 2.0) / eta.powi(self.n as i32),
            ensembles: self.hessian_ensembles(),
            shift_scale: kappa / SQRT_2,
            cap_scale: ((n + 2.0) / (2.0 * n)).sqrt(),
        }
    }

    fn closed_total(&self, i: usize) -> Option<f64> {
        if self.n != 2 || i > 2 {
            return None;
        }
        let base = 1.0 / (3f64.sqrt() * PI * self.eta2());
        Some(if i == 1 { 2.0 * base } else { base })
    }

    fn closed_density(&self, i: usize, x: f64) -> Option<f64> {
        if self.n != 2 || i > 2 {
            return None;
        }
        Some(self.h_closed(i, x))
    }

    fn closed_cdf(&self, i: usize, u: f64) -> Option<Estimate> {
        if self.n != 2 || i > 2 {
            return None;
        }
        if u == f64::NEG_INFINITY {
            return Some(Estimate::exact(1.0));
        }
        if u == f64::INFINITY {
            return Some(Estimate::ZERO);
        }
        Some(match i {
            1 => {
                let sd = ((3.0 - self.kappa2_effective()) / 3.0).sqrt();
                Estimate::exact(big_phi_upper(u / sd))
            }
            2 => self.max_survival(u),
            _ => {
                let s = self.max_survival(-u);
                Estimate::new(1.0 - s.value, s.error)
            }
        })
    }
}
