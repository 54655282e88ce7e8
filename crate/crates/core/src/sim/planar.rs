//! Planar fields as finite random cosine sums `√(2/K) Σ cos(⟨ω_k, t⟩ + φ_k)`.

use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

/// Value, gradient and Hessian of a planar field at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub grad: [f64; 2],
    pub hess: [[f64; 2]; 2],
}

/// A smooth planar field that can be differentiated twice exactly.
pub trait PlanarSurface: Sync {
    fn jet(&self, t: [f64; 2]) -> Jet2;

    /// Gradient on the tensor grid `xs × ys`, row-major with `x` fastest.
    fn gradient_grid(&self, xs: &[f64], ys: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut gx = Vec::with_capacity(xs.len() * ys.len());
        let mut gy = Vec::with_capacity(xs.len() * ys.len());
        for &y in ys {
            for &x in xs {
                let j = self.jet([x, y]);
                gx.push(j.grad[0]);
                gy.push(j.grad[1]);
            }
        }
        (gx, gy)
    }
}

/// How wave vectors are drawn.
#[derive(Debug, Clone, PartialEq)]
pub enum Spectrum {
    /// `ω ~ N(0, I/ℓ²)`: covariance `exp(-|t|²/(2ℓ²))`.
    Gaussian { length_scale: f64 },
    /// `|ω| = r`, uniform direction: covariance `J₀(r|t|)`.
    Ring { radius: f64 },
    /// Mixture of rings `(radius, weight)`; weights need not be normalized.
    Rings(Vec<(f64, f64)>),
}

impl Spectrum {
    /// `(E|ω|², E|ω|⁴)`, which fix `ρ′` and `ρ″`.
    pub fn moments(&self) -> (f64, f64) {
        match self {
            Spectrum::Gaussian { length_scale } => {
                let l2 = length_scale * length_scale;
                (2.0 / l2, 8.0 / (l2 * l2))
            }
            Spectrum::Ring { radius } => (radius.powi(2), radius.powi(4)),
            Spectrum::Rings(rings) => {
                let total: f64 = rings.iter().map(|r| r.1).sum();
                let m2 = rings.iter().map(|(r, w)| w * r * r).sum::<f64>() / total;
                let m4 = rings.iter().map(|(r, w)| w * r.powi(4)).sum::<f64>() / total;
                (m2, m4)
            }
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 2] {
        match self {
            Spectrum::Gaussian { length_scale } => {
                let a: f64 = rng.sample(StandardNormal);
                let b: f64 = rng.sample(StandardNormal);
                [a / length_scale, b / length_scale]
            }
            Spectrum::Ring { radius } => on_ring(*radius, rng),
            Spectrum::Rings(rings) => {
                let total: f64 = rings.iter().map(|r| r.1).sum();
                let mut pick = rng.random::<f64>() * total;
                let mut radius = rings.last().map(|r| r.0).unwrap_or(0.0);
                for &(r, w) in rings {
                    if pick < w {
                        radius = r;
                        break;
                    }
                    pick -= w;
                }
                on_ring(radius, rng)
            }
        }
    }
}

fn on_ring<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> [f64; 2] {
    let theta = 2.0 * PI * rng.random::<f64>();
    [radius * theta.cos(), radius * theta.sin()]
}

/// One realization of a random cosine sum.
#[derive(Debug, Clone)]
pub struct PlanarField {
    omega: Vec<[f64; 2]>,
    phase: Vec<f64>,
    amp: f64,
}

impl PlanarField {
    pub fn sample<R: Rng + ?Sized>(spectrum: &Spectrum, num_waves: usize, rng: &mut R) -> Self {
        let mut omega = Vec::with_capacity(num_waves);
        let mut phase = Vec::with_capacity(num_waves);
        for _ in 0..num_waves {
            omega.push(spectrum.draw(rng));
            phase.push(2.0 * PI * rng.random::<f64>());
        }
        PlanarField {
            omega,
            phase,
            amp: (2.0 / num_waves as f64).sqrt(),
        }
    }

    pub fn num_waves(&self) -> usize {
        self.omega.len()
    }

    pub fn value(&self, t: [f64; 2]) -> f64 {
        self.jet(t).value
    }
}

impl PlanarSurface for PlanarField {
    fn jet(&self, t: [f64; 2]) -> Jet2 {
        let (mut v, mut gx, mut gy, mut hxx, mut hxy, mut hyy) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for (w, &p) in self.omega.iter().zip(&self.phase) {
            let (s, c) = (w[0] * t[0] + w[1] * t[1] + p).sin_cos();
            v += c;
            gx -= s * w[0];
            gy -= s * w[1];
            hxx -= c * w[0] * w[0];
            hxy -= c * w[0] * w[1];
            hyy -= c * w[1] * w[1];
        }
        let a = self.amp;
        Jet2 {
            value: a * v,
            grad: [a * gx, a * gy],
            hess: [[a * hxx, a * hxy], [a * hxy, a * hyy]],
        }
    }

    /// Uses `e^{i(ω·t + φ)} = e^{iω₁x} · e^{i(ω₂y + φ)}` so each wave costs
    /// one complex product per node instead of a `sin_cos`.
    fn gradient_grid(&self, xs: &[f64], ys: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let nx = xs.len();
        let mut gx = vec![0.0; nx * ys.len()];
        let mut gy = vec![0.0; nx * ys.len()];
        let mut cx = vec![(0.0, 0.0); nx];
        for (w, &p) in self.omega.iter().zip(&self.phase) {
            for (slot, &x) in cx.iter_mut().zip(xs) {
                let (s, c) = (w[0] * x).sin_cos();
                *slot = (c, s);
            }
            for (row, &y) in ys.iter().enumerate() {
                let (sy, cy) = (w[1] * y + p).sin_cos();
                let base = row * nx;
                let (rx, ry) = (&mut gx[base..base + nx], &mut gy[base..base + nx]);
                for a in 0..nx {
                    let im = cx[a].0 * sy + cx[a].1 * cy;
                    rx[a] -= im * w[0];
                    ry[a] -= im * w[1];
                }
            }
        }
        let a = self.amp;
        gx.iter_mut().chain(gy.iter_mut()).for_each(|v| *v *= a);
        (gx, gy)
    }
}

/// `cos(a x + p) cos(b y + q)`, a deterministic field with a known critical lattice.
#[derive(Debug, Clone, Copy)]
pub struct ProductCosine {
    pub a: f64,
    pub b: f64,
    pub p: f64,
    pub q: f64,
}

impl PlanarSurface for ProductCosine {
    fn jet(&self, t: [f64; 2]) -> Jet2 {
        let (sx, cx) = (self.a * t[0] + self.p).sin_cos();
        let (sy, cy) = (self.b * t[1] + self.q).sin_cos();
        Jet2 {
            value: cx * cy,
            grad: [-self.a * sx * cy, -self.b * cx * sy],
            hess: [
                [-self.a * self.a * cx * cy, self.a * self.b * sx * sy],
                [self.a * self.b * sx * sy, -self.b * self.b * cx * cy],
            ],
        }
    }
}
