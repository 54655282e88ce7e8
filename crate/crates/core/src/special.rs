//! Gaussian helpers and truncated Gaussian moments.

use libm::erfc;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal density.
pub fn phi(x: f64) -> f64 {
    if x.is_infinite() {
        return 0.0;
    }
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal CDF.
pub fn big_phi(x: f64) -> f64 {
    if x == f64::INFINITY {
        return 1.0;
    }
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal survival function, accurate in the upper tail.
pub fn big_phi_upper(x: f64) -> f64 {
    big_phi(-x)
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Surface area of the unit sphere S^n embedded in R^{n+1}.
pub fn sphere_area(n: usize) -> f64 {
    let k = (n as f64 + 1.0) / 2.0;
    2.0 * PI.powf(k) / gamma(k)
}

/// `∫_a^b x^m φ(x) dx` for `m = 0..=max`, via the recurrence
/// `M_m = (m-1) M_{m-2} + a^{m-1} φ(a) - b^{m-1} φ(b)`. Infinite limits allowed.
pub fn gaussian_moments(a: f64, b: f64, max: usize, out: &mut [f64]) {
    debug_assert!(out.len() > max);
    if a >= b {
        out[..=max].iter_mut().for_each(|v| *v = 0.0);
        return;
    }
    let pa = phi(a);
    let pb = phi(b);
    // Lower-tail-stable mass for the zeroth moment.
    out[0] = if a >= 0.0 {
        big_phi_upper(a) - big_phi_upper(b)
    } else {
        big_phi(b) - big_phi(a)
    };
    if max == 0 {
        return;
    }
    out[1] = pa - pb;
    let mut apow = if a.is_finite() { a } else { 0.0 };
    let mut bpow = if b.is_finite() { b } else { 0.0 };
    for m in 2..=max {
        // apow = a^{m-1}, bpow = b^{m-1}; φ kills infinite endpoints.
        let ta = if a.is_finite() { apow * pa } else { 0.0 };
        let tb = if b.is_finite() { bpow * pb } else { 0.0 };
        out[m] = (m as f64 - 1.0) * out[m - 2] + ta - tb;
        if a.is_finite() {
            apow *= a;
        }
        if b.is_finite() {
            bpow *= b;
        }
    }
}
