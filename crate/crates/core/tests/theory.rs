use isocrit::fyodorov::fyodorov_expected_crit_with;
use isocrit::{CritModel, EuclideanModel, EvalOptions, Method, NumericConfig, SphereModel};
use proptest::prelude::*;
use std::f64::consts::PI;

fn quad() -> EvalOptions {
    EvalOptions::new(Method::Quadrature)
}

fn totals(m: &dyn CritModel, opts: &EvalOptions) -> Vec<(f64, f64)> {
    (0..=m.n())
        .map(|i| {
            let r = m.expected_crit_total_with(i, opts).unwrap();
            (r.value, r.error_estimate)
        })
        .collect()
}

fn alternating(t: &[(f64, f64)]) -> (f64, f64) {
    t.iter().enumerate().fold((0.0, 0.0), |(s, e), (i, &(v, err))| {
        (s + if i % 2 == 0 { v } else { -v }, e + err)
    })
}

#[test]
fn euler_density_of_flat_space_vanishes() {
    for (n, kappa2) in [(1, 0.4), (2, 0.5), (2, 2.0), (3, 0.3), (3, 1.2), (3, 5.0 / 3.0)] {
        let m = EuclideanModel::from_eta_kappa(n, 1.3, kappa2).unwrap();
        let (s, e) = alternating(&totals(&m, &quad()));
        assert!(s.abs() <= 3.0 * e + 1e-10, "N={n} kappa2={kappa2}: {s} ± {e}");
    }
}

#[test]
fn counts_scale_as_inverse_volume() {
    for n in 1..=3 {
        let a = EuclideanModel::from_eta_kappa(n, 1.0, 0.6).unwrap();
        let b = EuclideanModel::from_eta_kappa(n, 4.0, 0.6).unwrap();
        for i in 0..=n {
            let x = a.expected_crit_total_with(i, &quad()).unwrap().value;
            let y = b.expected_crit_total_with(i, &quad()).unwrap().value;
            let want = 2f64.powi(n as i32);
            assert!((x / y - want).abs() < 1e-8 * want, "N={n} i={i}: {}", x / y);
        }
    }
}

#[test]
fn planar_totals_against_hand_values() {
    let m = EuclideanModel::gaussian_covariance(2, 1.0).unwrap();
    let s3 = 3f64.sqrt();
    let t = totals(&m, &EvalOptions::auto());
    for (got, want) in t.iter().zip([1.0 / (2.0 * s3 * PI), 1.0 / (s3 * PI), 1.0 / (2.0 * s3 * PI)]) {
        assert!((got.0 - want).abs() < 1e-14, "{} vs {want}", got.0);
    }
    // the plane-wave spectrum of radius r gives eta^2 = 8 / r^2 on the boundary
    let pw = EuclideanModel::plane_wave(2, 10.0).unwrap();
    assert!((pw.eta2() - 0.08).abs() < 1e-15);
    let mu0 = pw.expected_crit_total(0).unwrap().value;
    assert!((mu0 - 100.0 / (8.0 * s3 * PI)).abs() < 1e-12);
}

#[test]
fn approaching_the_boundary_is_continuous() {
    let edge = EuclideanModel::from_eta_kappa(2, 1.0, 2.0).unwrap();
    let near = EuclideanModel::from_eta_kappa(2, 1.0, 2.0 - 1e-9).unwrap();
    for i in 0..=2 {
        for u in [-1.0, 0.0, 0.4] {
            let a = edge.expected_crit_above(i, u).unwrap().value;
            let b = near.expected_crit_above(i, u).unwrap().value;
            assert!((a - b).abs() < 1e-4, "i={i} u={u}: {a} vs {b}");
        }
    }
    let sphere_edge = SphereModel::spherical_harmonic(2).unwrap();
    let sphere_near = SphereModel::from_eta_kappa(2, 1.0, 3.0 - 1e-9).unwrap();
    for i in 0..=2 {
        let a = sphere_edge.expected_crit_above(i, 0.2).unwrap().value;
        let b = sphere_near.expected_crit_above(i, 0.2).unwrap().value;
        assert!((a - b).abs() < 1e-4, "i={i}: {a} vs {b}");
    }
}

#[test]
fn three_dimensional_sign_flip() {
    let m = EuclideanModel::from_eta_kappa(3, 1.0, 0.8).unwrap();
    let opts = quad();
    for i in 0..=3 {
        let total = m.expected_crit_total_with(i, &opts).unwrap();
        for u in [-0.9, 0.0, 1.1] {
            let hi = m.expected_crit_above_with(3 - i, u, &opts).unwrap();
            let lo = m.expected_crit_above_with(i, -u, &opts).unwrap();
            let gap = hi.value - (total.value - lo.value);
            let tol = 3.0 * (hi.error_estimate + lo.error_estimate + total.error_estimate) + 1e-10;
            assert!(gap.abs() <= tol, "i={i} u={u}: gap {gap} tol {tol}");
        }
    }
}

#[test]
fn fyodorov_route_matches_quadrature() {
    let cfg = NumericConfig::default().with_seed(3).with_samples(200_000);
    for m in [
        Box::new(EuclideanModel::from_eta_kappa(2, 1.0, 0.5).unwrap()) as Box<dyn CritModel>,
        Box::new(SphereModel::from_eta_kappa(2, 1.0, 1.5).unwrap()),
    ] {
        for i in 0..=2 {
            for u in [f64::NEG_INFINITY, -0.5, 0.5] {
                let q = m.expected_crit_above_with(i, u, &quad()).unwrap();
                let f = fyodorov_expected_crit_with(&m.params(), i, u, Method::MonteCarlo, &cfg).unwrap();
                let tol = 3.0 * (q.error_estimate + f.error_estimate) + 1e-12;
                assert!((q.value - f.value).abs() <= tol, "i={i} u={u}: {} vs {} ± {}", q.value, f.value, f.error_estimate);
            }
        }
    }
}

#[test]
fn restricted_route_refuses_large_kappa() {
    let m = EuclideanModel::from_eta_kappa(2, 1.0, 1.5).unwrap();
    let cfg = NumericConfig::default().with_seed(1);
    assert!(fyodorov_expected_crit_with(&m.params(), 0, 0.0, Method::MonteCarlo, &cfg).is_err());
    assert!(m.expected_crit_total_with(0, &EvalOptions::new(Method::Fyodorov)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn planar_sign_flip(kappa2 in 0.05f64..2.0, eta2 in 0.2f64..5.0, u in -3.0f64..3.0, i in 0usize..=2) {
        let m = EuclideanModel::from_eta_kappa(2, eta2, kappa2).unwrap();
        let hi = m.expected_crit_above(2 - i, u).unwrap().value;
        let total = m.expected_crit_total(i).unwrap().value;
        let lo = m.expected_crit_above(i, -u).unwrap().value;
        prop_assert!((hi - (total - lo)).abs() < 1e-9 * total.max(1e-3));
    }

    #[test]
    fn sphere_euler_characteristic(eta2 in 0.05f64..10.0, gap in 0.0f64..2.0) {
        let m = SphereModel::from_eta_kappa(2, eta2, eta2 + gap).unwrap();
        let t = totals(&m, &EvalOptions::auto());
        let (s, _) = alternating(&t);
        prop_assert!((4.0 * PI * s - 2.0).abs() < 1e-9);
    }

    #[test]
    fn exceedance_is_monotone(kappa2 in 0.05f64..2.0, u in -3.0f64..3.0, du in 0.01f64..1.0, i in 0usize..=2) {
        let m = EuclideanModel::from_eta_kappa(2, 1.0, kappa2).unwrap();
        let a = m.height_cdf(i, u).unwrap().value;
        let b = m.height_cdf(i, u + du).unwrap().value;
        prop_assert!(b <= a + 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&a));
    }
}
