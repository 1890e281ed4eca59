mod common;

use chen_censor::chen::ChenParams;
use chen_censor::rng;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = ChenParams> {
    (0.05f64..5.0, 0.1f64..3.0).prop_map(|(a, b)| ChenParams::new(a, b).unwrap())
}

proptest! {
    #[test]
    fn cdf_is_monotone_and_bounded(p in params(), x in 0.0f64..3.0, dx in 1e-6f64..1.0) {
        let f1 = p.cdf(x).unwrap();
        let f2 = p.cdf(x + dx).unwrap();
        prop_assert!((0.0..=1.0).contains(&f1));
        prop_assert!(f2 >= f1);
        prop_assert!((p.survival(x).unwrap() + f1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quantile_inverts_cdf(p in params(), u in 0.001f64..0.999) {
        let x = p.quantile(u).unwrap();
        prop_assert!((p.cdf(x).unwrap() - u).abs() < 1e-10);
    }

    #[test]
    fn pdf_is_derivative_of_cdf(p in params(), x in 0.05f64..2.0) {
        prop_assume!(p.survival(x).unwrap() > 1e-6);
        let h = 1e-5 * x;
        let fd = common::central_diff(|t| p.cdf(t).unwrap(), x, h);
        let pdf = p.pdf(x).unwrap();
        prop_assert!(common::rel_err(fd, pdf) < 1e-5, "fd={} pdf={}", fd, pdf);
    }

    #[test]
    fn hazard_is_pdf_over_survival(p in params(), x in 0.05f64..2.0) {
        prop_assume!(p.survival(x).unwrap() > 1e-100);
        let h = p.pdf(x).unwrap() / p.survival(x).unwrap();
        prop_assert!(common::rel_err(p.hazard(x).unwrap(), h) < 1e-10);
    }
}

#[test]
fn bathtub_hazard_has_interior_minimum() {
    let p = ChenParams::new(0.2, 0.5).unwrap();
    let x0 = p.hazard_minimizer().unwrap();
    let h0 = p.hazard(x0).unwrap();
    for k in 1..200 {
        let x = k as f64 * 0.02;
        assert!(p.hazard(x).unwrap() >= h0 - 1e-12, "x={x}");
    }
    // derivative vanishes at the minimizer
    let d = common::central_diff(|t| p.hazard(t).unwrap().ln(), x0, 1e-6);
    assert!(d.abs() < 1e-6);
}

#[test]
fn increasing_hazard_for_beta_at_least_one() {
    let p = ChenParams::new(0.5, 1.3).unwrap();
    assert!(p.hazard_minimizer().is_none());
    let mut last = 0.0;
    for k in 1..100 {
        let h = p.hazard(k as f64 * 0.03).unwrap();
        assert!(h > last);
        last = h;
    }
}

#[test]
fn density_integrates_to_one() {
    let p = ChenParams::new(0.2, 0.7).unwrap();
    let upper = p.quantile(1.0 - 1e-15).unwrap();
    // Simpson on a sqrt grid, which absorbs the x^(beta-1) spike at zero
    let n = 20_000;
    let s_max = upper.sqrt();
    let g = |s: f64| if s == 0.0 { 0.0 } else { 2.0 * s * p.pdf(s * s).unwrap() };
    let h = s_max / n as f64;
    let mut sum = g(0.0) + g(s_max);
    for i in 1..n {
        sum += g(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let total = sum * h / 3.0;
    assert!((total - 1.0).abs() < 1e-6, "{total}");
}

#[test]
fn large_sample_matches_cdf() {
    let p = ChenParams::new(0.2, 0.5).unwrap();
    let mut r = rng::seeded(2024);
    let x = p.sample(&mut r, 100_000);
    assert!(x.iter().all(|&v| v > 0.0));
    let d = common::ks_one_sample(&x, |t| p.cdf(t).unwrap());
    assert!(d < 0.01, "D = {d}");
}

#[test]
fn sample_is_reproducible() {
    let p = ChenParams::new(1.0, 1.0).unwrap();
    let a = p.sample(&mut rng::seeded(5), 50);
    let b = p.sample(&mut rng::seeded(5), 50);
    assert_eq!(a, b);
    assert!(p.sample(&mut rng::seeded(5), 0).is_empty());
}
