//! Isotropic Gaussian fields on the unit sphere `S^N` with covariance `C(⟨s, t⟩)`.

use crate::error::{Error, Result};
use crate::goi::GoiEnsemble;
use crate::kacrice::{self, CritModel, HessianEnsembles, KacRiceParams, Regime, Space, REGIME_TOL};
use crate::numeric::Estimate;
use crate::special::{big_phi, big_phi_upper, phi};
use std::f64::consts::{PI, SQRT_2};

/// Field summarized by `C′ = C′(1) > 0` and `C″ = C″(1) > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereModel {
    n: usize,
    c1: f64,
    c2: f64,
}

impl SphereModel {
    pub fn from_c(n: usize, c1: f64, c2: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        if !(c1 > 0.0) || !c1.is_finite() {
            return Err(Error::InvalidCovariance(format!("C' must be positive, got {c1}")));
        }
        if !(c2 > 0.0) || !c2.is_finite() {
            return Err(Error::InvalidCovariance(format!("C'' must be positive, got {c2}")));
        }
        let m = SphereModel { n, c1, c2 };
        let bound = m.gap_bound();
        if m.gap() > bound + REGIME_TOL {
            return Err(Error::ImpossibleField {
                n,
                quantity: "kappa^2 - eta^2",
                value: m.gap(),
                bound,
            });
        }
        Ok(m)
    }

    pub fn from_eta_kappa(n: usize, eta2: f64, kappa2: f64) -> Result<Self> {
        if !(eta2 > 0.0) || !(kappa2 > 0.0) {
            return Err(Error::InvalidCovariance(format!(
                "eta^2 and kappa^2 must be positive, got {eta2} and {kappa2}"
            )));
        }
        SphereModel::from_c(n, kappa2 / eta2, kappa2 / (eta2 * eta2))
    }

    /// Random spherical harmonics of degree `ell` on `S^2`: `C = P_ℓ`, so
    /// `C′ = ℓ(ℓ+1)/2` and `C″ = (ℓ−1)ℓ(ℓ+1)(ℓ+2)/8`.
    pub fn spherical_harmonic(ell: u32) -> Result<Self> {
        if ell < 2 {
            return Err(Error::InvalidArgument(format!("spherical-harmonic degree must be at least 2, got {ell}")));
        }
        let l = ell as f64;
        SphereModel::from_c(2, l * (l + 1.0) / 2.0, (l - 1.0) * l * (l + 1.0) * (l + 2.0) / 8.0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn eta(&self) -> f64 {
        self.eta2().sqrt()
    }

    pub fn kappa(&self) -> f64 {
        self.c1 / self.c2.sqrt()
    }

    pub fn eta2(&self) -> f64 {
        self.c1 / self.c2
    }

    pub fn kappa2(&self) -> f64 {
        self.c1 * self.c1 / self.c2
    }

    /// `κ² − η²`.
    pub fn gap(&self) -> f64 {
        self.kappa2() - self.eta2()
    }

    /// `(N+2)/N`, the largest attainable `κ² − η²`.
    pub fn gap_bound(&self) -> f64 {
        (self.n as f64 + 2.0) / self.n as f64
    }

    pub fn regime(&self) -> Regime {
        if (self.gap() - self.gap_bound()).abs() < REGIME_TOL {
            Regime::Boundary
        } else {
            Regime::Nonboundary
        }
    }

    fn kappa2_effective(&self) -> f64 {
        match self.regime() {
            Regime::Boundary => self.eta2() + self.gap_bound(),
            Regime::Nonboundary => self.kappa2(),
        }
    }

    pub fn hessian_ensembles(&self) -> HessianEnsembles {
        let n = self.n;
        let e2 = self.eta2();
        let cond_c = match self.regime() {
            Regime::Boundary => -1.0 / n as f64,
            Regime::Nonboundary => (1.0 + e2 - self.kappa2()) / 2.0,
        };
        HessianEnsembles {
            unconditional: GoiEnsemble::new(n, (1.0 + e2) / 2.0).expect("positive c is valid"),
            conditional: GoiEnsemble::new(n, cond_c).expect("bounded gap gives valid c"),
            scale: (2.0 * self.c2).sqrt(),
        }
    }

    /// Normalizing factor shared by the N = 2 extreme-value densities.
    fn extreme_norm(&self) -> f64 {
        let e2 = self.eta2();
        let r = (3.0 + e2).sqrt();
        2.0 * r / (2.0 + e2 * r)
    }

    fn h_max(&self, x: f64) -> f64 {
        let e2 = self.eta2();
        let k2 = self.kappa2_effective();
        match self.regime() {
            Regime::Boundary => {
                if x < 0.0 {
                    return 0.0;
                }
                self.extreme_norm() / (2.0 * PI).sqrt()
                    * (((e2 + 2.0) * x * x - 2.0) * (-0.5 * x * x).exp() + 2.0 * (-(3.0 + e2) * x * x / 2.0).exp())
            }
            Regime::Nonboundary => {
                let k = k2.sqrt();
                let a = 2.0 + e2 - k2;
                let b = 3.0 + e2 - k2;
                self.extreme_norm()
                    * ((e2 + k2 * (x * x - 1.0)) * phi(x) * big_phi(k * x / a.sqrt())
                        + k * a.sqrt() / (2.0 * PI) * x * (-(2.0 + e2) * x * x / (2.0 * a)).exp()
                        + SQRT_2 / (PI * b).sqrt()
                            * (-(3.0 + e2) * x * x / (2.0 * b)).exp()
                            * big_phi(k * x / (a * b).sqrt()))
            }
        }
    }

    fn saddle_sd(&self) -> f64 {
        let e2 = self.eta2();
        ((3.0 + e2 - self.kappa2_effective()) / (3.0 + e2)).sqrt()
    }

    fn max_survival(&self, u: f64) -> Estimate {
        match self.regime() {
            Regime::Boundary => {
                if u <= 0.0 {
                    return Estimate::exact(1.0);
                }
                let e2 = self.eta2();
                let r = (3.0 + e2).sqrt();
                let bracket = (e2 + 2.0) * u * phi(u) + e2 * big_phi_upper(u) + 2.0 * big_phi_upper(r * u) / r;
                Estimate::exact(self.extreme_norm() * bracket)
            }
            Regime::Nonboundary => kacrice::survival_by_quadrature(|x| self.h_max(x), u),
        }
    }
}

impl CritModel for SphereModel {
    fn params(&self) -> KacRiceParams {
        let n = self.n as f64;
        let eta = self.eta();
        let kappa = self.kappa2_effective().sqrt();
        KacRiceParams {
            space: Space::Sphere,
            n: self.n,
            eta,
            kappa,
            regime: self.regime(),
            prefactor: PI.powf(-n / 2.0) / eta.powi(self.n as i32),
            ensembles: self.hessian_ensembles(),
            shift_scale: kappa / SQRT_2,
            cap_scale: ((n + 2.0 + n * self.eta2()) / (2.0 * n)).sqrt(),
        }
    }

    fn closed_total(&self, i: usize) -> Option<f64> {
        if self.n != 2 || i > 2 {
            return None;
        }
        let e2 = self.eta2();
        let r = (3.0 + e2).sqrt();
        Some(if i == 1 {
            1.0 / (PI * e2 * r)
        } else {
            0.25 / PI + 0.5 / (PI * e2 * r)
        })
    }

    fn closed_density(&self, i: usize, x: f64) -> Option<f64> {
        if self.n != 2 || i > 2 {
            return None;
        }
        Some(match i {
            1 => {
                let sd = self.saddle_sd();
                phi(x / sd) / sd
            }
            0 => self.h_max(-x),
            _ => self.h_max(x),
        })
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
            1 => Estimate::exact(big_phi_upper(u / self.saddle_sd())),
            2 => self.max_survival(u),
            _ => {
                let s = self.max_survival(-u);
                Estimate::new(1.0 - s.value, s.error)
            }
        })
    }
}
