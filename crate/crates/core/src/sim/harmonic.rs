//! Random spherical harmonics of a fixed degree on the unit 2-sphere.
//!
//! The field is stored as a homogeneous polynomial of degree ℓ in `(x, y, z)`,
//! restricted to `|p| = 1`. Derivatives come from the ambient polynomial, so
//! there are no coordinate singularities at the poles.

use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;
use std::collections::BTreeMap;

/// Largest supported degree; beyond it monomial cancellation costs accuracy.
pub const MAX_DEGREE: u32 = 24;

type Poly = BTreeMap<[u32; 3], f64>;

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

fn falling(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64)
}

fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
            *out.entry(e).or_insert(0.0) += ca * cb;
        }
    }
    out
}

/// `(x² + y² + z²)^k`.
fn r2_pow(k: u32) -> Poly {
    let mut out = Poly::new();
    for a in 0..=k {
        for b in 0..=k - a {
            let c = k - a - b;
            out.insert([2 * a, 2 * b, 2 * c], binom(k, a) * binom(k - a, b));
        }
    }
    out
}

/// `r^{ℓ−m} P_ℓ^{(m)}(z/r)` homogenized, i.e. the z/r part of `r^ℓ P_ℓ^m(cos θ)`.
fn legendre_part(ell: u32, m: u32) -> Poly {
    let mut out = Poly::new();
    let scale = 0.5f64.powi(ell as i32);
    for k in 0..=(ell - m) / 2 {
        let coef = scale
            * if k % 2 == 0 { 1.0 } else { -1.0 }
            * binom(ell, k)
            * binom(2 * ell - 2 * k, ell)
            * falling(ell - 2 * k, m);
        let zp = ell - 2 * k - m;
        for (e, c) in r2_pow(k) {
            *out.entry([e[0], e[1], e[2] + zp]).or_insert(0.0) += coef * c;
        }
    }
    out
}

/// Real and imaginary parts of `(x + iy)^m`.
fn planar_power(m: u32) -> (Poly, Poly) {
    let (mut re, mut im) = (Poly::new(), Poly::new());
    for j in 0..=m {
        let c = binom(m, j) * if (j / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let target = if j % 2 == 0 { &mut re } else { &mut im };
        target.insert([m - j, j, 0], c);
    }
    (re, im)
}

/// Orthogonal basis of degree-ℓ harmonics, scaled so that
/// `Σ_k b_k(p) b_k(q) = P_ℓ(⟨p, q⟩)`.
#[derive(Debug, Clone)]
pub struct HarmonicBasis {
    degree: u32,
    polys: Vec<Vec<([u32; 3], f64)>>,
}

impl HarmonicBasis {
    pub fn new(degree: u32) -> Result<Self> {
        if !(2..=MAX_DEGREE).contains(&degree) {
            return Err(Error::InvalidArgument(format!(
                "spherical harmonic degree must be in 2..={MAX_DEGREE}, got {degree}"
            )));
        }
        let mut polys = Vec::with_capacity(2 * degree as usize + 1);
        for m in 0..=degree {
            let base = legendre_part(degree, m);
            let (re, im) = planar_power(m);
            let w = if m == 0 {
                1.0
            } else {
                (2.0 / (falling(degree + m, 2 * m))).sqrt()
            };
            let mut parts = vec![mul(&base, &re)];
            if m > 0 {
                parts.push(mul(&base, &im));
            }
            for p in parts {
                polys.push(p.into_iter().filter(|t| t.1 != 0.0).map(|(e, c)| (e, w * c)).collect());
            }
        }
        Ok(HarmonicBasis { degree, polys })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// All basis functions at `p`.
    pub fn eval(&self, p: [f64; 3]) -> Vec<f64> {
        let pw = powers(p, self.degree);
        self.polys.iter().map(|terms| terms.iter().map(|(e, c)| c * monomial(&pw, *e)).sum()).collect()
    }

    /// A field with i.i.d. standard normal coefficients.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> HarmonicField {
        let mut acc = Poly::new();
        for terms in &self.polys {
            let a: f64 = rng.sample(StandardNormal);
            for (e, c) in terms {
                *acc.entry(*e).or_insert(0.0) += a * c;
            }
        }
        HarmonicField {
            degree: self.degree,
            terms: acc.into_iter().collect(),
        }
    }
}

fn powers(p: [f64; 3], deg: u32) -> [Vec<f64>; 3] {
    let col = |v: f64| {
        let mut out = Vec::with_capacity(deg as usize + 1);
        let mut acc = 1.0;
        for _ in 0..=deg {
            out.push(acc);
            acc *= v;
        }
        out
    };
    [col(p[0]), col(p[1]), col(p[2])]
}

fn monomial(pw: &[Vec<f64>; 3], e: [u32; 3]) -> f64 {
    pw[0][e[0] as usize] * pw[1][e[1] as usize] * pw[2][e[2] as usize]
}

fn dpow(pw: &[f64], e: u32, order: u32) -> f64 {
    if order > e {
        0.0
    } else {
        falling(e, order) * pw[(e - order) as usize]
    }
}

/// Value, ambient gradient and ambient Hessian of the extended polynomial.
#[derive(Debug, Clone, Copy)]
pub struct AmbientJet {
    pub value: f64,
    pub grad: [f64; 3],
    pub hess: [[f64; 3]; 3],
}

/// One realization of a degree-ℓ random spherical harmonic.
#[derive(Debug, Clone)]
pub struct HarmonicField {
    degree: u32,
    terms: Vec<([u32; 3], f64)>,
}

impl HarmonicField {
    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Derivatives of the homogeneous extension at `p` (not necessarily unit).
    pub fn ambient(&self, p: [f64; 3]) -> AmbientJet {
        let pw = powers(p, self.degree);
        let mut j = AmbientJet {
            value: 0.0,
            grad: [0.0; 3],
            hess: [[0.0; 3]; 3],
        };
        for (e, c) in &self.terms {
            let d = |axis: usize, order: u32| dpow(&pw[axis], e[axis], order);
            let v = [d(0, 0), d(1, 0), d(2, 0)];
            let g = [d(0, 1), d(1, 1), d(2, 1)];
            let h = [d(0, 2), d(1, 2), d(2, 2)];
            j.value += c * v[0] * v[1] * v[2];
            j.grad[0] += c * g[0] * v[1] * v[2];
            j.grad[1] += c * v[0] * g[1] * v[2];
            j.grad[2] += c * v[0] * v[1] * g[2];
            j.hess[0][0] += c * h[0] * v[1] * v[2];
            j.hess[1][1] += c * v[0] * h[1] * v[2];
            j.hess[2][2] += c * v[0] * v[1] * h[2];
            j.hess[0][1] += c * g[0] * g[1] * v[2];
            j.hess[0][2] += c * g[0] * v[1] * g[2];
            j.hess[1][2] += c * v[0] * g[1] * g[2];
        }
        j.hess[1][0] = j.hess[0][1];
        j.hess[2][0] = j.hess[0][2];
        j.hess[2][1] = j.hess[1][2];
        j
    }

    pub fn value(&self, p: [f64; 3]) -> f64 {
        self.ambient(p).value
    }

    /// Value, Riemannian gradient and Hessian at unit `p` in the tangent
    /// basis `(t1, t2)`. Uses homogeneity: `⟨∇F, p⟩ = ℓF`.
    pub fn tangent_jet(&self, p: [f64; 3], t1: [f64; 3], t2: [f64; 3]) -> super::planar::Jet2 {
        let a = self.ambient(p);
        let lf = self.degree as f64 * a.value;
        let dot = |u: [f64; 3], v: [f64; 3]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
        let hv = |v: [f64; 3]| {
            [
                dot(a.hess[0], v),
                dot(a.hess[1], v),
                dot(a.hess[2], v),
            ]
        };
        let (h1, h2) = (hv(t1), hv(t2));
        let off = dot(t1, h2);
        super::planar::Jet2 {
            value: a.value,
            grad: [dot(a.grad, t1), dot(a.grad, t2)],
            hess: [[dot(t1, h1) - lf, off], [off, dot(t2, h2) - lf]],
        }
    }
}

/// An orthonormal basis of the tangent plane at unit `p`.
pub fn tangent_frame(p: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let axis = if p[0].abs() < 0.6 {
        [1.0, 0.0, 0.0]
    } else if p[1].abs() < 0.6 {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let d = axis[0] * p[0] + axis[1] * p[1] + axis[2] * p[2];
    let t1 = normalize([axis[0] - d * p[0], axis[1] - d * p[1], axis[2] - d * p[2]]);
    let t2 = [
        p[1] * t1[2] - p[2] * t1[1],
        p[2] * t1[0] - p[0] * t1[2],
        p[0] * t1[1] - p[1] * t1[0],
    ];
    (t1, t2)
}

pub fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}
