//! Property suite for the ten baseline distributions.

mod common;

use common::{assert_close, assert_rel, baseline_zoo};
use mokw::baseline::{BaselineModel, EwFunction};
use mokw::quad::integrate;
use mokw::special::normal_cdf;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn pdf_integrates_to_one_all_kinds() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for round in 0..4 {
        for base in baseline_zoo(&mut rng) {
            let (lo, hi) = base.support();
            let mass = integrate(|t| base.pdf(t), lo, hi, 1e-10)
                .unwrap_or_else(|e| panic!("{} round {round}: {e}", base.kind_name()))
                .value;
            assert_close(mass, 1.0, 1e-6, &format!("{} mass", base.kind_name()));
        }
    }
}

#[test]
fn pdf_is_cdf_derivative() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for base in baseline_zoo(&mut rng) {
        for i in 1..=9 {
            let t = base.quantile(i as f64 / 10.0).unwrap();
            let h = 1e-6 * t.abs().max(1e-3);
            let fd = (base.cdf(t + h) - base.cdf(t - h)) / (2.0 * h);
            assert_rel(base.pdf(t), fd, 1e-5, &format!("{} pdf at {t}", base.kind_name()));
        }
    }
}

#[test]
fn quantile_cdf_roundtrip() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for base in baseline_zoo(&mut rng) {
        for i in 1..=19 {
            let p = i as f64 / 20.0;
            let t = base.quantile(p).unwrap();
            assert_close(base.cdf(t), p, 1e-8, &format!("{} roundtrip p={p}", base.kind_name()));
        }
    }
}

#[test]
fn power_log_normal_reduces_to_log_normal() {
    // p = 1 is the plain log-normal: G(t) = Phi((ln t - mu)/sigma)
    let (mu, sigma) = (0.3, 0.8);
    let m = BaselineModel::power_log_normal(1.0, mu, sigma).unwrap();
    for i in 1..=40 {
        let t = 0.1 * i as f64;
        let expect = normal_cdf((t.ln() - mu) / sigma);
        assert_close(m.cdf(t), expect, 1e-12, "log-normal cdf");
    }
}

#[test]
fn extended_weibull_special_cases() {
    let delta = 1.3;
    let ew_exp = BaselineModel::extended_weibull(delta, EwFunction::Identity).unwrap();
    let exponential = BaselineModel::exponential(delta).unwrap();
    let ew_ray = BaselineModel::extended_weibull(delta, EwFunction::Square).unwrap();
    let rayleigh = BaselineModel::weibull(delta, 2.0).unwrap();
    for i in 1..=30 {
        let t = 0.1 * i as f64;
        assert_close(ew_exp.cdf(t), exponential.cdf(t), 1e-12, "EW identity tag vs exponential");
        assert_close(ew_exp.pdf(t), exponential.pdf(t), 1e-12, "EW identity tag pdf");
        assert_close(ew_ray.cdf(t), rayleigh.cdf(t), 1e-12, "EW square tag vs Rayleigh");
        assert_close(ew_ray.pdf(t), rayleigh.pdf(t), 1e-12, "EW square tag pdf");
    }
}

#[test]
fn dlog_pdf_matches_finite_difference() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for base in baseline_zoo(&mut rng) {
        for i in &[2, 5, 8] {
            let t = base.quantile(*i as f64 / 10.0).unwrap();
            let h = 1e-6 * t.abs().max(1e-4);
            let fd = (base.log_pdf(t + h) - base.log_pdf(t - h)) / (2.0 * h);
            assert_rel(
                base.dlog_pdf_dt(t),
                fd,
                1e-4,
                &format!("{} dlog pdf at {t}", base.kind_name()),
            );
        }
    }
}

#[test]
fn parameter_derivatives_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for base in baseline_zoo(&mut rng) {
        let params = base.params();
        for i in &[3, 7] {
            let t = base.quantile(*i as f64 / 10.0).unwrap();
            for m in 0..base.param_count() {
                let h = 1e-6 * params[m].abs().max(1e-3);
                let mut up = params.clone();
                up[m] += h;
                let mut dn = params.clone();
                dn[m] -= h;
                let (Ok(bu), Ok(bd)) = (base.with_params(&up), base.with_params(&dn)) else {
                    continue;
                };
                let fd_logg = (bu.log_pdf(t) - bd.log_pdf(t)) / (2.0 * h);
                let fd_cdf = (bu.cdf(t) - bd.cdf(t)) / (2.0 * h);
                assert_rel(
                    base.dlog_pdf_dparam(t, m),
                    fd_logg,
                    2e-4,
                    &format!("{} dlogg/dp{m} at {t}", base.kind_name()),
                );
                let tol = 2e-4 * fd_cdf.abs().max(1e-3);
                assert_close(
                    base.dcdf_dparam(t, m),
                    fd_cdf,
                    tol,
                    &format!("{} dG/dp{m} at {t}", base.kind_name()),
                );
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exponential_roundtrip(lambda in 0.1f64..5.0, p in 0.001f64..0.999) {
        let m = BaselineModel::exponential(lambda).unwrap();
        let t = m.quantile(p).unwrap();
        prop_assert!((m.cdf(t) - p).abs() < 1e-10);
    }

    #[test]
    fn weibull_cdf_monotone(lambda in 0.3f64..3.0, beta in 0.5f64..4.0, t in 0.01f64..10.0) {
        let m = BaselineModel::weibull(lambda, beta).unwrap();
        prop_assert!(m.cdf(t) <= m.cdf(t * 1.1) + 1e-15);
        prop_assert!(m.pdf(t) >= 0.0);
    }

    #[test]
    fn lomax_sf_in_unit_interval(beta in 0.5f64..5.0, delta in 0.2f64..3.0, t in 0.0f64..50.0) {
        let m = BaselineModel::lomax(beta, delta).unwrap();
        let s = m.sf(t);
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert!((m.cdf(t) + s - 1.0).abs() < 1e-12);
    }
}
