//! Gaussian orthogonally invariant matrices GOI(c): validation, sampling,
//! the ordered-eigenvalue density and expectations of eigenvalue functionals.

use crate::error::{Error, Result};
use crate::mc;
use crate::numeric::{Estimate, Method, NumericConfig};
use crate::quad::{self, QuadSettings};
use crate::special::ln_gamma;
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::FRAC_1_SQRT_2;

/// `|c + 1/N|` below this classifies the ensemble as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Matrix size and covariance parameter of a GOI(c) law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoiEnsemble {
    n: usize,
    c: f64,
    degenerate: bool,
}

impl GoiEnsemble {
    pub fn new(n: usize, c: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        if !c.is_finite() {
            return Err(Error::InvalidArgument(format!("covariance parameter {c} is not finite")));
        }
        let bound = -1.0 / n as f64;
        let degenerate = (c - bound).abs() < DEGENERACY_TOL;
        if c < bound && !degenerate {
            return Err(Error::ParameterOutOfRange { n, c, bound });
        }
        Ok(GoiEnsemble { n, c, degenerate })
    }

    /// The GOE of size `n`.
    pub fn goe(n: usize) -> Result<Self> {
        GoiEnsemble::new(n, 0.0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Coefficient of the diagonal shift in the symmetric square root of
    /// `I + c 1 1ᵀ`, i.e. `(I + c 1 1ᵀ)^{1/2} = I + alpha 1 1ᵀ`.
    fn diag_alpha(&self) -> f64 {
        let n = self.n as f64;
        let s = if self.degenerate { 0.0 } else { (1.0 + n * self.c).max(0.0).sqrt() };
        (s - 1.0) / n
    }
}

/// Validate `(N, c)` and classify degeneracy.
pub fn validate_ensemble(n: usize, c: f64) -> Result<GoiEnsemble> {
    GoiEnsemble::new(n, c)
}

/// Sorted eigenvalues `λ₁ ≤ … ≤ λ_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueVector(Vec<f64>);

impl EigenvalueVector {
    /// Accepts only non-decreasing input.
    pub fn new(lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::InvalidArgument("eigenvalues must be non-decreasing".into()));
        }
        Ok(EigenvalueVector(lambdas))
    }

    pub fn sorted(mut lambdas: Vec<f64>) -> Self {
        lambdas.sort_by(f64::total_cmp);
        EigenvalueVector(lambdas)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for EigenvalueVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Fill the diagonal vector `d` of a GOI(c) draw from standard normals.
fn fill_diagonal<R: Rng + ?Sized>(ens: &GoiEnsemble, rng: &mut R, d: &mut [f64]) {
    let mut sum = 0.0;
    for v in d.iter_mut() {
        *v = rng.sample(StandardNormal);
        sum += *v;
    }
    let shift = ens.diag_alpha() * sum;
    for v in d.iter_mut() {
        *v += shift;
    }
}

/// Draw one symmetric GOI(c) matrix.
pub fn sample_goi<R: Rng + ?Sized>(ens: &GoiEnsemble, rng: &mut R) -> DMatrix<f64> {
    let n = ens.n;
    let mut d = vec![0.0; n];
    fill_diagonal(ens, rng, &mut d);
    let mut m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d));
    for i in 0..n {
        for j in (i + 1)..n {
            let z: f64 = rng.sample(StandardNormal);
            m[(i, j)] = z * FRAC_1_SQRT_2;
            m[(j, i)] = m[(i, j)];
        }
    }
    m
}

/// Sorted eigenvalues of a symmetric matrix.
pub fn symmetric_eigenvalues(m: DMatrix<f64>, out: &mut [f64]) {
    let n = m.nrows();
    match n {
        1 => out[0] = m[(0, 0)],
        2 => {
            let (a, b, d) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
            let mid = 0.5 * (a + d);
            let r = (0.25 * (a - d) * (a - d) + b * b).sqrt();
            out[0] = mid - r;
            out[1] = mid + r;
        }
        _ => {
            let ev = m.symmetric_eigenvalues();
            out.copy_from_slice(ev.as_slice());
            out.sort_by(f64::total_cmp);
        }
    }
}

/// Draw the sorted eigenvalues of one GOI(c) matrix into `out`.
pub fn sample_eigenvalues<R: Rng + ?Sized>(ens: &GoiEnsemble, rng: &mut R, out: &mut [f64]) {
    let m = sample_goi(ens, rng);
    symmetric_eigenvalues(m, out);
}

pub fn ln_k_norm(n: usize) -> f64 {
    let mut s = 0.5 * n as f64 * std::f64::consts::LN_2;
    for i in 1..=n {
        s += ln_gamma(i as f64 / 2.0);
    }
    s
}

/// Normalizing constant `K_N = 2^{N/2} ∏ Γ(i/2)`.
pub fn k_norm(n: usize) -> f64 {
    ln_k_norm(n).exp()
}

/// Density of the ordered eigenvalues. Only the caller's slice length and
/// ordering are checked, so this is also the hot path of the quadrature.
fn density_unchecked(n: usize, c: f64, ln_norm: f64, lam: &[f64]) -> f64 {
    let nf = n as f64;
    let mut sq = 0.0;
    let mut sum = 0.0;
    let mut vdm = 1.0;
    for (i, &x) in lam.iter().enumerate() {
        sq += x * x;
        sum += x;
        for &y in &lam[i + 1..] {
            vdm *= y - x;
        }
    }
    let expo = -0.5 * sq + c * sum * sum / (2.0 * (1.0 + nf * c)) - ln_norm;
    vdm.abs() * expo.exp()
}

/// `ln(K_N √(1+Nc))`.
fn ln_density_norm(ens: &GoiEnsemble) -> f64 {
    ln_k_norm(ens.n) + 0.5 * (1.0 + ens.n as f64 * ens.c).ln()
}

/// Ordered-eigenvalue density `f_c(λ)`; zero off the ordered region.
pub fn ordered_eigenvalue_density(ens: &GoiEnsemble, lam: impl AsRef<[f64]>) -> Result<f64> {
    let lam = lam.as_ref();
    if ens.degenerate {
        return Err(Error::Unsupported(format!(
            "GOI({}) of size {} is degenerate and has no eigenvalue density",
            ens.c, ens.n
        )));
    }
    if lam.len() != ens.n {
        return Err(Error::InvalidArgument(format!(
            "expected {} eigenvalues, got {}",
            ens.n,
            lam.len()
        )));
    }
    if lam.windows(2).any(|w| w[0] > w[1]) {
        return Ok(0.0);
    }
    Ok(density_unchecked(ens.n, ens.c, ln_density_norm(ens), lam))
}

/// How an [`IndexedFunctional`] treats the eigenvalue mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FunctionalMode {
    AbsDetIndicator,
    /// Additionally require `Σλ/N ≤ cap`.
    WithTraceCap(f64),
}

/// `g(λ) = ∏|λⱼ − β| · 1{λ_i < β < λ_{i+1}}`, optionally times a trace cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexedFunctional {
    pub index: usize,
    pub shift: f64,
    pub mode: FunctionalMode,
}

impl IndexedFunctional {
    pub fn new(index: usize, shift: f64) -> Self {
        IndexedFunctional {
            index,
            shift,
            mode: FunctionalMode::AbsDetIndicator,
        }
    }

    pub fn with_trace_cap(index: usize, shift: f64, cap: f64) -> Self {
        IndexedFunctional {
            index,
            shift,
            mode: FunctionalMode::WithTraceCap(cap),
        }
    }

    pub fn trace_cap(&self) -> Option<f64> {
        match self.mode {
            FunctionalMode::AbsDetIndicator => None,
            FunctionalMode::WithTraceCap(c) => Some(c),
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.index > n {
            return Err(Error::IndexOutOfRange { index: self.index, n });
        }
        Ok(())
    }

    /// Evaluate on sorted eigenvalues.
    pub fn eval(&self, lam: &[f64]) -> f64 {
        let b = self.shift;
        let below = lam.iter().filter(|&&x| x < b).count();
        if below != self.index || lam.iter().any(|&x| x == b) {
            return 0.0;
        }
        if let Some(cap) = self.trace_cap() {
            let mean = lam.iter().sum::<f64>() / lam.len() as f64;
            if mean > cap {
                return 0.0;
            }
        }
        lam.iter().map(|&x| (x - b).abs()).product()
    }
}

/// Subset of the ordered simplex `λ₁ ≤ … ≤ λ_N` to integrate over.
///
/// `below = (m, b)` requires `λ_j ≤ b` for the first `m` coordinates,
/// `above = (m, a)` requires `λ_j ≥ a` for coordinates `m..N` (zero-based),
/// `sum_cap` bounds `Σλ`. Every coordinate is truncated to `[-radius, radius]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderedRegion {
    pub below: Option<(usize, f64)>,
    pub above: Option<(usize, f64)>,
    pub sum_cap: Option<f64>,
    pub radius: f64,
}

impl OrderedRegion {
    pub fn full(radius: f64) -> Self {
        OrderedRegion {
            below: None,
            above: None,
            sum_cap: None,
            radius,
        }
    }

    /// Region where exactly the first `i` coordinates lie below `beta`.
    pub fn split_at(i: usize, beta: f64, radius: f64) -> Self {
        OrderedRegion {
            below: Some((i, beta)),
            above: Some((i, beta)),
            sum_cap: None,
            radius,
        }
    }

    pub fn with_sum_cap(mut self, cap: Option<f64>) -> Self {
        self.sum_cap = cap;
        self
    }
}

/// Truncation radius that keeps the discarded Gaussian mass far below `1e-20`
/// for GOI(c) eigenvalues shifted by up to `shift`.
pub fn truncation_radius(c: f64, shift: f64) -> f64 {
    12.0 * (1.0 + c.max(0.0)).sqrt() + 2.0 + shift.abs()
}

struct Nested<'a, F> {
    n: usize,
    c: f64,
    ln_norm: f64,
    /// Coefficient of `(Σλ)²` in the log-density.
    quad_coef: f64,
    region: &'a OrderedRegion,
    settings: QuadSettings,
    f: &'a F,
    outer_breaks: Vec<f64>,
}

impl<'a, F: Fn(&[f64]) -> f64> Nested<'a, F> {
    fn lower_bound(&self, j: usize) -> f64 {
        match self.region.above {
            Some((m, a)) if j >= m => a,
            _ => f64::NEG_INFINITY,
        }
    }

    /// Largest `t` such that `λ_j = t` leaves the sum cap attainable, given
    /// `partial = Σ_{l<j} λ_l` and that every later `λ_l ≥ max(t, lower_l)`.
    fn cap_limit(&self, j: usize, partial: f64, cap: f64) -> f64 {
        let lowers: Vec<f64> = ((j + 1)..self.n).map(|l| self.lower_bound(l)).collect();
        let budget = cap - partial;
        // min-sum(t) = t + Σ max(t, lower_l), increasing and piecewise linear.
        let min_sum = |t: f64| t + lowers.iter().map(|&lo| t.max(lo)).sum::<f64>();
        let mut kinks: Vec<f64> = lowers.iter().copied().filter(|v| v.is_finite()).collect();
        kinks.sort_by(f64::total_cmp);
        kinks.dedup();
        // On the segment ending at kink k, terms with lower < k track t.
        for &k in &kinks {
            let at = min_sum(k);
            if at >= budget {
                let slope = 1.0 + lowers.iter().filter(|&&lo| lo < k).count() as f64;
                return k - (at - budget) / slope;
            }
        }
        let anchor = kinks.last().copied().unwrap_or(0.0);
        anchor + (budget - min_sum(anchor)) / (1.0 + lowers.len() as f64)
    }

    fn level(&self, j: usize, lam: &mut [f64], partial: f64) -> Estimate {
        let r = self.region.radius;
        let mut lo = if j == 0 { -r } else { lam[j - 1] };
        lo = lo.max(self.lower_bound(j));
        let mut hi = r;
        if let Some((m, b)) = self.region.below {
            if j < m {
                hi = hi.min(b);
            }
        }
        if let Some(cap) = self.region.sum_cap {
            hi = hi.min(self.cap_limit(j, partial, cap));
        }
        if !(hi > lo) {
            return Estimate::ZERO;
        }
        if j + 1 == self.n {
            let breaks = self.peak_breaks(partial);
            quad::integrate(
                |t| {
                    lam[j] = t;
                    Estimate::exact(
                        density_unchecked(self.n, self.c, self.ln_norm, lam) * (self.f)(lam),
                    )
                },
                lo,
                hi,
                &breaks,
                &self.settings,
            )
        } else {
            quad::integrate(
                |t| {
                    lam[j] = t;
                    self.level(j + 1, lam, partial + t)
                },
                lo,
                hi,
                &self.outer_breaks,
                &self.settings,
            )
        }
    }

    /// Breakpoints around the Gaussian peak of the innermost coordinate.
    fn peak_breaks(&self, partial: f64) -> Vec<f64> {
        let k = 1.0 - 2.0 * self.quad_coef;
        let mut out = self.outer_breaks.clone();
        if k > 0.0 {
            let center = 2.0 * self.quad_coef * partial / k;
            let sd = 1.0 / k.sqrt();
            for s in [-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0] {
                out.push(center + s * sd);
            }
        }
        out
    }
}

/// `∫ f_c(λ) f(λ) dλ` over `region` by nested adaptive Gauss–Kronrod rules.
pub fn integrate_ordered<F>(
    ens: &GoiEnsemble,
    region: &OrderedRegion,
    f: &F,
    settings: &QuadSettings,
) -> Result<Estimate>
where
    F: Fn(&[f64]) -> f64,
{
    if ens.degenerate {
        return Err(Error::MethodUnavailable(format!(
            "quadrature needs a density; GOI({}) of size {} is degenerate, use monte-carlo",
            ens.c, ens.n
        )));
    }
    let nf = ens.n as f64;
    let spread = (1.0 + ens.c.max(0.0)).sqrt();
    let outer_breaks = [-6.0, -3.0, -1.5, 0.0, 1.5, 3.0, 6.0].iter().map(|s| s * spread).collect();
    let nested = Nested {
        n: ens.n,
        c: ens.c,
        ln_norm: ln_density_norm(ens),
        quad_coef: ens.c / (2.0 * (1.0 + nf * ens.c)),
        region,
        settings: *settings,
        f,
        outer_breaks,
    };
    let mut lam = vec![0.0; ens.n];
    Ok(nested.level(0, &mut lam, 0.0))
}

/// Monte Carlo estimate of `E f(λ)` with sorted GOI(c) eigenvalues.
pub fn mc_expectation<F>(ens: &GoiEnsemble, f: F, cfg: &NumericConfig) -> Estimate
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let n = ens.n;
    mc::estimate(cfg, |rng| {
        let mut lam = [0.0f64; 32];
        if n <= 32 {
            sample_eigenvalues(ens, rng, &mut lam[..n]);
            f(&lam[..n])
        } else {
            let mut v = vec![0.0; n];
            sample_eigenvalues(ens, rng, &mut v);
            f(&v)
        }
    })
}

/// `E_{GOI(c)}[g(λ)]` by quadrature (N ≤ 3, nondegenerate) or Monte Carlo.
pub fn goi_expectation(
    ens: &GoiEnsemble,
    g: &IndexedFunctional,
    method: Method,
    cfg: &NumericConfig,
) -> Result<Estimate> {
    g.check(ens.n)?;
    match method {
        Method::Quadrature => {
            if ens.n > 3 {
                return Err(Error::MethodUnavailable(format!(
                    "quadrature supports N ≤ 3 (got N = {}), use monte-carlo",
                    ens.n
                )));
            }
            let radius = truncation_radius(ens.c, g.shift);
            let cap = g.trace_cap().map(|c| c * ens.n as f64);
            let region = OrderedRegion::split_at(g.index, g.shift, radius).with_sum_cap(cap);
            let beta = g.shift;
            integrate_ordered(
                ens,
                &region,
                &|lam: &[f64]| lam.iter().map(|&x| (x - beta).abs()).product::<f64>(),
                &QuadSettings::from(cfg),
            )
        }
        Method::MonteCarlo => Ok(mc_expectation(ens, |lam| g.eval(lam), cfg)),
        other => Err(Error::MethodUnavailable(format!(
            "{other} is not a GOI expectation method; use quadrature or monte-carlo"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::stream_rng;
    use rand::Rng;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn settings() -> QuadSettings {
        QuadSettings::from(&NumericConfig::default())
    }

    #[test]
    fn validation() {
        assert!(!validate_ensemble(2, 0.0).unwrap().is_degenerate());
        assert!(validate_ensemble(2, -0.5).unwrap().is_degenerate());
        match validate_ensemble(3, -0.5) {
            Err(Error::ParameterOutOfRange { bound, .. }) => assert_relative_eq!(bound, -1.0 / 3.0),
            other => panic!("{other:?}"),
        }
        assert_eq!(validate_ensemble(0, 0.0), Err(Error::ZeroDimension));
    }

    #[test]
    fn k_norm_values() {
        assert_relative_eq!(k_norm(1), (2.0 * PI).sqrt(), max_relative = 1e-14);
        assert_relative_eq!(k_norm(2), 2.0 * PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(k_norm(3), 2f64.sqrt() * PI, max_relative = 1e-14);
    }

    #[test]
    fn density_point_values() {
        let e = validate_ensemble(1, 0.0).unwrap();
        assert_relative_eq!(ordered_eigenvalue_density(&e, [0.0]).unwrap(), 0.398_942_280_401_432_7, max_relative = 1e-14);
        let e = validate_ensemble(1, 1.0).unwrap();
        assert_relative_eq!(ordered_eigenvalue_density(&e, [0.0]).unwrap(), 0.5 / PI.sqrt(), max_relative = 1e-14);
        let e = validate_ensemble(2, 0.3).unwrap();
        assert_eq!(ordered_eigenvalue_density(&e, [1.0, 0.0]).unwrap(), 0.0);
        let d = validate_ensemble(2, -0.5).unwrap();
        assert!(matches!(ordered_eigenvalue_density(&d, [0.0, 0.0]), Err(Error::Unsupported(_))));
    }

    #[test]
    fn density_normalizes() {
        for n in 1..=3 {
            for c in [-0.2, 0.0, 1.0, 0.3] {
                let e = validate_ensemble(n, c).unwrap();
                let r = integrate_ordered(&e, &OrderedRegion::full(truncation_radius(c, 0.0)), &|_: &[f64]| 1.0, &settings()).unwrap();
                assert!((r.value - 1.0).abs() < 1e-8, "n={n} c={c} {r:?}");
            }
        }
    }

    #[test]
    fn near_degenerate_density_normalizes() {
        let e = validate_ensemble(2, -0.5 + 1e-4).unwrap();
        let r = integrate_ordered(&e, &OrderedRegion::full(14.0), &|_: &[f64]| 1.0, &settings()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-7, "{r:?}");
    }

    #[test]
    fn goe_reduction_matches_explicit_formula() {
        let e = validate_ensemble(3, 0.0).unwrap();
        let mut rng = stream_rng(5, 0);
        for _ in 0..20 {
            let v = EigenvalueVector::sorted((0..3).map(|_| rng.random_range(-3.0..3.0)).collect());
            let l = v.as_slice();
            let explicit = (-0.5 * l.iter().map(|x| x * x).sum::<f64>()).exp()
                * ((l[1] - l[0]) * (l[2] - l[0]) * (l[2] - l[1]))
                / k_norm(3);
            let f = ordered_eigenvalue_density(&e, &v).unwrap();
            assert!(((f - explicit) / explicit).abs() < 1e-12);
        }
    }

    #[test]
    fn expectation_examples_by_quadrature() {
        let cfg = NumericConfig::default();
        let e1 = validate_ensemble(1, 0.0).unwrap();
        let r = goi_expectation(&e1, &IndexedFunctional::new(1, 0.0), Method::Quadrature, &cfg).unwrap();
        assert_relative_eq!(r.value, 0.398_942_280_401_432_7, max_relative = 1e-9);
        let e2 = validate_ensemble(2, 0.5).unwrap();
        let r = goi_expectation(&e2, &IndexedFunctional::new(1, 0.0), Method::Quadrature, &cfg).unwrap();
        assert_relative_eq!(r.value, 1.0 / 3f64.sqrt(), max_relative = 1e-9);
        let r = goi_expectation(&e2, &IndexedFunctional::new(0, 0.0), Method::Quadrature, &cfg).unwrap();
        assert_relative_eq!(r.value, 0.5 / 3f64.sqrt(), max_relative = 1e-9);
    }

    #[test]
    fn expectation_by_monte_carlo() {
        let cfg = NumericConfig::default().with_seed(1).with_samples(200_000);
        let e2 = validate_ensemble(2, 0.5).unwrap();
        let r = goi_expectation(&e2, &IndexedFunctional::new(1, 0.0), Method::MonteCarlo, &cfg).unwrap();
        assert!((r.value - 1.0 / 3f64.sqrt()).abs() < 4.0 * r.error, "{r:?}");
    }

    #[test]
    fn quadrature_refuses_large_or_degenerate() {
        let cfg = NumericConfig::default();
        let e = validate_ensemble(4, 0.0).unwrap();
        assert!(matches!(
            goi_expectation(&e, &IndexedFunctional::new(0, 0.0), Method::Quadrature, &cfg),
            Err(Error::MethodUnavailable(_))
        ));
        let d = validate_ensemble(2, -0.5).unwrap();
        assert!(matches!(
            goi_expectation(&d, &IndexedFunctional::new(0, 0.0), Method::Quadrature, &cfg),
            Err(Error::MethodUnavailable(_))
        ));
        assert!(matches!(
            goi_expectation(&d, &IndexedFunctional::new(3, 0.0), Method::MonteCarlo, &cfg),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn trace_cap_quadrature_matches_mc() {
        let e = validate_ensemble(2, 0.5).unwrap();
        let g = IndexedFunctional::with_trace_cap(1, 0.0, -0.3);
        let q = goi_expectation(&e, &g, Method::Quadrature, &NumericConfig::default()).unwrap();
        let m = goi_expectation(&e, &g, Method::MonteCarlo, &NumericConfig::default().with_seed(2).with_samples(300_000)).unwrap();
        assert!((q.value - m.value).abs() < 3.0 * (q.error + m.error), "{q:?} {m:?}");
    }

    #[test]
    fn one_dimensional_sampler_variance() {
        let e = validate_ensemble(1, 0.0).unwrap();
        let mut rng = stream_rng(9, 0);
        let n = 100_000;
        let s2: f64 = (0..n).map(|_| sample_goi(&e, &mut rng)[(0, 0)].powi(2)).sum::<f64>() / n as f64;
        assert!((s2 - 1.0).abs() < 4.0 * (2.0f64 / n as f64).sqrt());
    }

    #[test]
    fn sampler_is_orthogonally_invariant_in_moments() {
        let e = validate_ensemble(3, 0.7).unwrap();
        let mut rng = stream_rng(4, 1);
        let q = nalgebra::Rotation3::from_euler_angles(0.3, -1.1, 2.0).into_inner();
        let q = DMatrix::from_iterator(3, 3, q.iter().copied());
        let n = 40_000;
        let (mut a, mut b) = (0.0, 0.0);
        for _ in 0..n {
            let m = sample_goi(&e, &mut rng);
            let r = &q * &m * q.transpose();
            a += m[(0, 0)] * m[(1, 1)];
            b += r[(0, 0)] * r[(1, 1)];
        }
        // Both estimate Cov(M11, M22) = c; SE per estimator ≈ sqrt(E[M11² M22²]/n).
        let se = ((1.7f64 * 1.7 + 2.0 * 0.49) / n as f64).sqrt();
        assert!((a / n as f64 - 0.7).abs() < 4.0 * se);
        assert!((b / n as f64 - 0.7).abs() < 4.0 * se);
    }

    proptest! {
        #[test]
        fn degenerate_sampler_has_zero_trace(n in 1usize..7, seed in any::<u64>()) {
            let e = validate_ensemble(n, -1.0 / n as f64).unwrap();
            prop_assert!(e.is_degenerate());
            let mut rng = stream_rng(seed, 0);
            let m = sample_goi(&e, &mut rng);
            prop_assert!(m.trace().abs() < 1e-12);
        }

        #[test]
        fn density_nonnegative_and_zero_when_unordered(a in -5.0f64..5.0, b in -5.0f64..5.0, c in -0.45f64..3.0) {
            let e = validate_ensemble(2, c).unwrap();
            let f = ordered_eigenvalue_density(&e, [a, b]).unwrap();
            prop_assert!(f >= 0.0);
            if a > b {
                prop_assert_eq!(f, 0.0);
            }
        }

        #[test]
        fn functional_counts_index(v in proptest::collection::vec(-4.0f64..4.0, 1..6), beta in -2.0f64..2.0) {
            let lam = EigenvalueVector::sorted(v);
            let l = lam.as_slice();
            let below = l.iter().filter(|&&x| x < beta).count();
            for i in 0..=l.len() {
                let g = IndexedFunctional::new(i, beta).eval(l);
                if i == below {
                    prop_assert!(g >= 0.0);
                } else {
                    prop_assert_eq!(g, 0.0);
                }
            }
        }
    }
}
