//! Critical point detection: grid scan for gradient sign changes, damped
//! Newton refinement, deduplication and Hessian classification.

use super::harmonic::{normalize, tangent_frame, HarmonicField};
use super::planar::{Jet2, PlanarSurface};
use serde::Serialize;

/// A located critical point.
///
/// Planar locations are `[x, y]`; sphere locations are unit vectors `[x, y, z]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub location: Vec<f64>,
    pub height: f64,
    pub index: usize,
    pub hessian_eigenvalues: Vec<f64>,
    /// Some Hessian eigenvalue is within `eps_h` of zero; `index` is then unreliable.
    pub flagged: bool,
}

/// Detector thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub eps_g: f64,
    pub eps_h: f64,
    pub max_iter: usize,
}

impl Tolerances {
    /// `eps_g = 1e-10 · grad_sd`, `eps_h = 1e-6 · hess_sd`.
    pub fn from_scales(grad_sd: f64, hess_sd: f64) -> Self {
        Tolerances {
            eps_g: 1e-10 * grad_sd,
            eps_h: 1e-6 * hess_sd,
            max_iter: 60,
        }
    }
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Rect { x0, x1, y0, y1 }
    }

    pub fn square(side: f64) -> Self {
        Rect::new(0.0, side, 0.0, side)
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    /// Rectangle shrunk by `m` on every side.
    pub fn shrink(&self, m: f64) -> Rect {
        Rect::new(self.x0 + m, self.x1 - m, self.y0 + m, self.y1 - m)
    }

    fn contains(&self, t: [f64; 2]) -> bool {
        t[0] >= self.x0 && t[0] <= self.x1 && t[1] >= self.y0 && t[1] <= self.y1
    }
}

/// Outcome of one detection pass.
#[derive(Debug, Clone, Default)]
pub struct Detection {
    /// Classified points (not flagged).
    pub points: Vec<CriticalPoint>,
    /// Points with a near-singular Hessian.
    pub flagged: Vec<CriticalPoint>,
    /// Candidate cells where Newton did not converge nearby.
    pub newton_failures: usize,
    pub candidates: usize,
}

fn sym2_eigen(h: [[f64; 2]; 2]) -> [f64; 2] {
    let m = 0.5 * (h[0][0] + h[1][1]);
    let d = 0.5 * (h[0][0] - h[1][1]);
    let r = d.hypot(h[0][1]);
    [m - r, m + r]
}

fn classify(location: Vec<f64>, j: &Jet2, eps_h: f64) -> CriticalPoint {
    let ev = sym2_eigen(j.hess);
    CriticalPoint {
        location,
        height: j.value,
        index: ev.iter().filter(|&&l| l < 0.0).count(),
        hessian_eigenvalues: ev.to_vec(),
        flagged: ev.iter().any(|l| l.abs() <= eps_h),
    }
}

/// Damped Newton step for `∇ = 0`, length capped at `cap`.
fn newton_step(j: &Jet2, cap: f64) -> [f64; 2] {
    let h = j.hess;
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    let mut s = if det.abs() > 1e-300 {
        [
            -(h[1][1] * j.grad[0] - h[0][1] * j.grad[1]) / det,
            -(-h[1][0] * j.grad[0] + h[0][0] * j.grad[1]) / det,
        ]
    } else {
        [-j.grad[0], -j.grad[1]]
    };
    let len = s[0].hypot(s[1]);
    if len > cap {
        s = [s[0] * cap / len, s[1] * cap / len];
    }
    s
}

fn grad_norm(j: &Jet2) -> f64 {
    j.grad[0].hypot(j.grad[1])
}

fn straddles(v: [f64; 4]) -> bool {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    lo <= 0.0 && hi >= 0.0
}

/// Indices of grid cells where both gradient components change sign.
fn candidate_cells(gx: &[f64], gy: &[f64], nx: usize, ny: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for b in 0..ny.saturating_sub(1) {
        for a in 0..nx.saturating_sub(1) {
            let k = [b * nx + a, b * nx + a + 1, (b + 1) * nx + a, (b + 1) * nx + a + 1];
            if straddles(k.map(|i| gx[i])) && straddles(k.map(|i| gy[i])) {
                out.push((a, b));
            }
        }
    }
    out
}

fn grid_axis(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let cells = ((hi - lo) / step).ceil().max(1.0) as usize;
    let h = (hi - lo) / cells as f64;
    (0..=cells).map(|k| lo + h * k as f64).collect()
}

/// Critical points of a planar field in the interior of `domain`.
///
/// Points closer than `step / 2` to the boundary are dropped; the matching
/// usable region is `domain.shrink(step / 2)`.
pub fn find_planar<F: PlanarSurface>(field: &F, domain: Rect, step: f64, tol: Tolerances) -> Detection {
    let xs = grid_axis(domain.x0, domain.x1, step);
    let ys = grid_axis(domain.y0, domain.y1, step);
    let (hx, hy) = (xs[1] - xs[0], ys[1] - ys[0]);
    let cap = hx.max(hy);
    let merge = 0.5 * step;
    let interior = domain.shrink(merge);
    let (gx, gy) = field.gradient_grid(&xs, &ys);
    let cells = candidate_cells(&gx, &gy, xs.len(), ys.len());
    let mut det = Detection {
        candidates: cells.len(),
        ..Default::default()
    };
    let mut found: Vec<CriticalPoint> = Vec::new();
    for (a, b) in cells {
        let start = [xs[a] + 0.5 * hx, ys[b] + 0.5 * hy];
        let mut t = start;
        let mut converged = None;
        for _ in 0..tol.max_iter {
            let j = field.jet(t);
            if grad_norm(&j) < tol.eps_g {
                converged = Some(j);
                break;
            }
            let s = newton_step(&j, cap);
            t = [t[0] + s[0], t[1] + s[1]];
            if (t[0] - start[0]).hypot(t[1] - start[1]) > 2.0 * cap {
                break;
            }
        }
        let Some(j) = converged else {
            det.newton_failures += 1;
            continue;
        };
        if (t[0] - start[0]).hypot(t[1] - start[1]) > 2.0 * cap {
            det.newton_failures += 1;
            continue;
        }
        if !interior.contains(t) {
            continue;
        }
        if found.iter().any(|p| (p.location[0] - t[0]).hypot(p.location[1] - t[1]) < merge) {
            continue;
        }
        found.push(classify(t.to_vec(), &j, tol.eps_h));
    }
    let (flagged, points) = found.into_iter().partition(|p| p.flagged);
    det.points = points;
    det.flagged = flagged;
    det
}

fn angle(p: [f64; 3], q: [f64; 3]) -> f64 {
    let c = [p[1] * q[2] - p[2] * q[1], p[2] * q[0] - p[0] * q[2], p[0] * q[1] - p[1] * q[0]];
    let s = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    s.atan2(p[0] * q[0] + p[1] * q[1] + p[2] * q[2])
}

/// The six cube faces as `(normal, u-axis, v-axis)`.
const FACES: [([f64; 3], [f64; 3], [f64; 3]); 6] = [
    ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]),
    ([-1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]),
    ([0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]),
    ([0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]),
    ([0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]),
    ([0.0, 0.0, -1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]),
];

fn face_point(f: &([f64; 3], [f64; 3], [f64; 3]), a: f64, b: f64) -> [f64; 3] {
    let (n, u, v) = f;
    normalize([
        n[0] + a * u[0] + b * v[0],
        n[1] + a * u[1] + b * v[1],
        n[2] + a * u[2] + b * v[2],
    ])
}

/// Critical points of a spherical harmonic on the whole sphere.
///
/// The scan runs over the six faces of a gnomonic cube grid with angular
/// spacing at most `step`; refinement is Riemannian Newton with the
/// normalization retraction.
pub fn find_sphere(field: &HarmonicField, step: f64, tol: Tolerances) -> Detection {
    let axis = grid_axis(-1.0, 1.0, step);
    let h = axis[1] - axis[0];
    let cap = h;
    let merge = 0.5 * step;
    let n = axis.len();
    let mut det = Detection::default();
    let mut found: Vec<(CriticalPoint, [f64; 3])> = Vec::new();
    for face in &FACES {
        let (_, fu, fv) = face;
        let mut gu = Vec::with_capacity(n * n);
        let mut gv = Vec::with_capacity(n * n);
        for &b in &axis {
            for &a in &axis {
                let p = face_point(face, a, b);
                let g = field.ambient(p).grad;
                let lf = field.degree() as f64 * field.value(p);
                let tg = [g[0] - lf * p[0], g[1] - lf * p[1], g[2] - lf * p[2]];
                gu.push(tg[0] * fu[0] + tg[1] * fu[1] + tg[2] * fu[2]);
                gv.push(tg[0] * fv[0] + tg[1] * fv[1] + tg[2] * fv[2]);
            }
        }
        let cells = candidate_cells(&gu, &gv, n, n);
        det.candidates += cells.len();
        for (a, b) in cells {
            let start = face_point(face, axis[a] + 0.5 * h, axis[b] + 0.5 * h);
            let mut p = start;
            let mut converged = None;
            for _ in 0..tol.max_iter {
                let (t1, t2) = tangent_frame(p);
                let j = field.tangent_jet(p, t1, t2);
                if grad_norm(&j) < tol.eps_g {
                    converged = Some(j);
                    break;
                }
                let s = newton_step(&j, cap);
                p = normalize([
                    p[0] + s[0] * t1[0] + s[1] * t2[0],
                    p[1] + s[0] * t1[1] + s[1] * t2[1],
                    p[2] + s[0] * t1[2] + s[1] * t2[2],
                ]);
                if angle(p, start) > 2.0 * cap {
                    break;
                }
            }
            match converged {
                Some(j) if angle(p, start) <= 2.0 * cap => {
                    if found.iter().all(|(_, q)| angle(p, *q) >= merge) {
                        found.push((classify(p.to_vec(), &j, tol.eps_h), p));
                    }
                }
                _ => det.newton_failures += 1,
            }
        }
    }
    let (flagged, points) = found.into_iter().map(|x| x.0).partition(|p| p.flagged);
    det.points = points;
    det.flagged = flagged;
    det
}
