//! Shared helpers for the property suites.
#![allow(dead_code)]

use mokw::baseline::{BaselineModel, EwFunction};
use rand::Rng;

pub fn assert_close(got: f64, want: f64, tol: f64, label: &str) {
    assert!(
        (got - want).abs() <= tol,
        "{label}: {got} vs {want} (|diff| = {:e}, tol {tol:e})",
        (got - want).abs()
    );
}

pub fn assert_rel(got: f64, want: f64, tol: f64, label: &str) {
    let denom = want.abs().max(1e-300);
    assert!(
        ((got - want) / denom).abs() <= tol,
        "{label}: {got} vs {want} (rel = {:e}, tol {tol:e})",
        ((got - want) / denom).abs()
    );
}

fn uni<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.gen::<f64>()
}

/// One random but quadrature-friendly parameter draw for each baseline kind.
pub fn baseline_zoo<R: Rng>(rng: &mut R) -> Vec<BaselineModel> {
    vec![
        BaselineModel::exponential(uni(rng, 0.5, 2.5)).unwrap(),
        BaselineModel::lomax(uni(rng, 1.5, 4.0), uni(rng, 0.5, 2.0)).unwrap(),
        BaselineModel::weibull(uni(rng, 0.5, 2.0), uni(rng, 0.8, 3.0)).unwrap(),
        BaselineModel::frechet(uni(rng, 1.0, 3.0), uni(rng, 0.5, 2.0)).unwrap(),
        BaselineModel::gompertz(uni(rng, 0.5, 2.0), uni(rng, 0.5, 2.0)).unwrap(),
        BaselineModel::extended_weibull(uni(rng, 0.5, 2.0), EwFunction::Square).unwrap(),
        BaselineModel::modified_weibull(uni(rng, 0.3, 1.5), uni(rng, 0.3, 1.5), uni(rng, 0.8, 2.5))
            .unwrap(),
        BaselineModel::power_log_normal(uni(rng, 0.5, 2.0), uni(rng, -0.5, 1.0), uni(rng, 0.5, 1.5))
            .unwrap(),
        BaselineModel::exponentiated_pareto(uni(rng, 0.8, 2.0), uni(rng, 1.0, 3.0), uni(rng, 0.5, 1.5))
            .unwrap(),
        BaselineModel::extended_power(uni(rng, 0.8, 3.0), uni(rng, 0.5, 2.0)).unwrap(),
    ]
}

/// Family shape draw kept clear of boundary singularities.
pub fn family_shape<R: Rng>(rng: &mut R) -> (f64, f64, f64) {
    (uni(rng, 0.3, 3.0), uni(rng, 0.7, 2.5), uni(rng, 0.7, 2.5))
}

/// Interior evaluation grid: quantile levels of the given distribution.
pub fn quantile_grid(q: impl Fn(f64) -> f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| q(i as f64 / (n as f64 + 1.0))).collect()
}
