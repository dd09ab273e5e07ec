//! Composable cdf transforms on the unit interval.
//!
//! A transform is a strictly increasing bijection of [0,1] fixing 0 and 1,
//! together with its derivative (the density chain-rule factor) and inverse.
//! Chaining transforms over a baseline cdf produces the generated families:
//! MO after Kw gives MOKw-G, Kw after MO gives KwMO-G.

use crate::baseline::{BaselineError, BaselineModel};
use crate::special::ln_1m_exp;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error("parameter {name} must be finite and > 0, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },
}

/// Common surface of the unit-interval maps.
pub trait UnitTransform {
    /// The transformed cdf value at inner cdf u.
    fn apply(&self, u: f64) -> f64;
    /// Derivative of `apply` at u; may be +inf at a boundary.
    fn density_factor(&self, u: f64) -> f64;
    /// log of `density_factor`, finite wherever the factor is positive.
    fn log_density_factor(&self, u: f64) -> f64;
    /// Exact inverse of `apply`.
    fn invert(&self, v: f64) -> f64;
}

/// Marshall-Olkin tilt with parameter alpha > 0: u -> u / (alpha + (1-alpha) u).
/// alpha = 1 is the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoTilt {
    alpha: f64,
}

impl MoTilt {
    pub fn new(alpha: f64) -> Result<Self, TransformError> {
        if alpha.is_finite() && alpha > 0.0 {
            Ok(MoTilt { alpha })
        } else {
            Err(TransformError::InvalidParameter { name: "alpha", value: alpha })
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// The derived quantity 1 - alpha.
    pub fn alpha_bar(&self) -> f64 {
        1.0 - self.alpha
    }
}

impl UnitTransform for MoTilt {
    fn apply(&self, u: f64) -> f64 {
        u / (self.alpha + self.alpha_bar() * u)
    }

    fn density_factor(&self, u: f64) -> f64 {
        let d = self.alpha + self.alpha_bar() * u;
        self.alpha / (d * d)
    }

    fn log_density_factor(&self, u: f64) -> f64 {
        self.alpha.ln() - 2.0 * (self.alpha + self.alpha_bar() * u).ln()
    }

    fn invert(&self, v: f64) -> f64 {
        self.alpha * v / (1.0 - self.alpha_bar() * v)
    }
}

/// Kumaraswamy map with shapes a, b > 0: u -> 1 - (1 - u^a)^b.
/// a = b = 1 is the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KwMap {
    a: f64,
    b: f64,
}

impl KwMap {
    pub fn new(a: f64, b: f64) -> Result<Self, TransformError> {
        if !(a.is_finite() && a > 0.0) {
            return Err(TransformError::InvalidParameter { name: "a", value: a });
        }
        if !(b.is_finite() && b > 0.0) {
            return Err(TransformError::InvalidParameter { name: "b", value: b });
        }
        Ok(KwMap { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

impl UnitTransform for KwMap {
    fn apply(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return 1.0;
        }
        -((self.b * ln_1m_exp(self.a * u.ln())).exp_m1())
    }

    fn density_factor(&self, u: f64) -> f64 {
        if u <= 0.0 {
            // limit: ab u^{a-1} -> 0 for a>1, ab for a=1, +inf for a<1
            return if self.a > 1.0 {
                0.0
            } else if self.a == 1.0 {
                self.b
            } else {
                f64::INFINITY
            };
        }
        if u >= 1.0 {
            return if self.b > 1.0 {
                0.0
            } else if self.b == 1.0 {
                self.a
            } else {
                f64::INFINITY
            };
        }
        self.log_density_factor(u).exp()
    }

    fn log_density_factor(&self, u: f64) -> f64 {
        // log(ab) + (a-1) log u + (b-1) log(1-u^a), evaluated in log space so
        // extreme shapes (the data fits reach b over 100) stay finite.
        let ln_u = u.ln();
        self.a.ln() + self.b.ln() + (self.a - 1.0) * ln_u + (self.b - 1.0) * ln_1m_exp(self.a * ln_u)
    }

    fn invert(&self, v: f64) -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        if v >= 1.0 {
            return 1.0;
        }
        // u = [1 - (1-v)^{1/b}]^{1/a}
        let ln_w = (-v).ln_1p() / self.b;
        (ln_1m_exp(ln_w) / self.a).exp()
    }
}

/// A chain element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    Mo(MoTilt),
    Kw(KwMap),
}

impl UnitTransform for Transform {
    fn apply(&self, u: f64) -> f64 {
        match self {
            Transform::Mo(t) => t.apply(u),
            Transform::Kw(t) => t.apply(u),
        }
    }

    fn density_factor(&self, u: f64) -> f64 {
        match self {
            Transform::Mo(t) => t.density_factor(u),
            Transform::Kw(t) => t.density_factor(u),
        }
    }

    fn log_density_factor(&self, u: f64) -> f64 {
        match self {
            Transform::Mo(t) => t.log_density_factor(u),
            Transform::Kw(t) => t.log_density_factor(u),
        }
    }

    fn invert(&self, v: f64) -> f64 {
        match self {
            Transform::Mo(t) => t.invert(v),
            Transform::Kw(t) => t.invert(v),
        }
    }
}

/// An ordered list of transforms, applied to the baseline cdf innermost first.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TransformChain {
    steps: Vec<Transform>,
}

impl TransformChain {
    pub fn new(steps: Vec<Transform>) -> Self {
        TransformChain { steps }
    }

    pub fn steps(&self) -> &[Transform] {
        &self.steps
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Compose this chain over a baseline; an empty chain yields the baseline
    /// itself.
    pub fn compose(self, base: BaselineModel) -> ComposedDistribution {
        ComposedDistribution { base, chain: self }
    }
}

/// A baseline together with a transform chain: an evaluable generated
/// distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ComposedDistribution {
    base: BaselineModel,
    chain: TransformChain,
}

impl ComposedDistribution {
    pub fn base(&self) -> &BaselineModel {
        &self.base
    }

    pub fn chain(&self) -> &TransformChain {
        &self.chain
    }

    pub fn support(&self) -> (f64, f64) {
        self.base.support()
    }

    pub fn cdf(&self, t: f64) -> f64 {
        let mut u = self.base.cdf(t);
        for step in self.chain.steps() {
            u = step.apply(u);
        }
        u
    }

    pub fn sf(&self, t: f64) -> f64 {
        1.0 - self.cdf(t)
    }

    /// log pdf: baseline log pdf plus the log density factors evaluated at the
    /// intermediate cdf values.
    pub fn log_pdf(&self, t: f64) -> f64 {
        let (lo, hi) = self.support();
        if t <= lo || t >= hi {
            return f64::NEG_INFINITY;
        }
        let mut acc = self.base.log_pdf(t);
        let mut u = self.base.cdf(t);
        for step in self.chain.steps() {
            acc += step.log_density_factor(u);
            u = step.apply(u);
        }
        acc
    }

    pub fn pdf(&self, t: f64) -> f64 {
        let lp = self.log_pdf(t);
        if lp == f64::NEG_INFINITY {
            0.0
        } else {
            lp.exp()
        }
    }

    /// Baseline quantile applied to the inverse chain.
    pub fn quantile(&self, p: f64) -> Result<f64, BaselineError> {
        if !(p > 0.0 && p < 1.0) {
            return Err(BaselineError::ProbabilityOutOfRange(p));
        }
        let mut v = p;
        for step in self.chain.steps().iter().rev() {
            v = step.invert(v);
        }
        self.base.quantile(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn mo_cdf_point_values() {
        let id = MoTilt::new(1.0).unwrap();
        close(id.apply(0.5), 0.5, 0.0);
        let t2 = MoTilt::new(2.0).unwrap();
        close(t2.apply(0.5), 1.0 / 3.0, 1e-16);
        let t05 = MoTilt::new(0.5).unwrap();
        close(t05.apply(0.25), 0.4, 1e-16);
    }

    #[test]
    fn mo_density_factor_values() {
        close(MoTilt::new(1.0).unwrap().density_factor(0.3), 1.0, 0.0);
        close(MoTilt::new(2.0).unwrap().density_factor(0.0), 0.5, 0.0);
        close(MoTilt::new(0.5).unwrap().density_factor(0.5), 0.5 / (0.75 * 0.75), 1e-15);
    }

    #[test]
    fn mo_inverse_point_values() {
        close(MoTilt::new(2.0).unwrap().invert(1.0 / 3.0), 0.5, 1e-15);
        close(MoTilt::new(0.5).unwrap().invert(0.4), 0.25, 1e-15);
        close(MoTilt::new(1.0).unwrap().invert(0.5), 0.5, 0.0);
    }

    #[test]
    fn kw_cdf_point_values() {
        close(KwMap::new(1.0, 1.0).unwrap().apply(0.5), 0.5, 1e-16);
        close(KwMap::new(2.0, 1.0).unwrap().apply(0.5), 0.25, 1e-15);
        close(KwMap::new(2.0, 3.0).unwrap().apply(0.5), 1.0 - 0.75f64.powi(3), 1e-15);
    }

    #[test]
    fn kw_density_factor_values() {
        close(KwMap::new(1.0, 1.0).unwrap().density_factor(0.5), 1.0, 1e-15);
        close(KwMap::new(2.0, 2.0).unwrap().density_factor(0.5), 1.5, 1e-15);
        close(KwMap::new(2.0, 3.0).unwrap().density_factor(0.5), 6.0 * 0.5 * 0.75 * 0.75, 1e-15);
    }

    #[test]
    fn kw_boundary_limits() {
        let k = KwMap::new(0.5, 0.5).unwrap();
        assert!(k.density_factor(0.0).is_infinite());
        assert!(k.density_factor(1.0).is_infinite());
        let k2 = KwMap::new(2.0, 2.0).unwrap();
        close(k2.density_factor(0.0), 0.0, 0.0);
        close(k2.density_factor(1.0), 0.0, 0.0);
    }

    #[test]
    fn kw_inverse_point_values() {
        close(KwMap::new(2.0, 3.0).unwrap().invert(0.578125), 0.5, 1e-15);
        close(KwMap::new(2.0, 1.0).unwrap().invert(0.25), 0.5, 1e-15);
        close(KwMap::new(1.0, 1.0).unwrap().invert(0.5), 0.5, 1e-16);
    }

    #[test]
    fn identity_chain_reduces_to_baseline() {
        let base = BaselineModel::exponential(1.0).unwrap();
        let chain = TransformChain::new(vec![
            Transform::Kw(KwMap::new(1.0, 1.0).unwrap()),
            Transform::Mo(MoTilt::new(1.0).unwrap()),
        ]);
        let d = chain.compose(base);
        close(d.cdf(std::f64::consts::LN_2), 0.5, 1e-15);
    }

    #[test]
    fn empty_chain_is_baseline() {
        let base = BaselineModel::weibull(1.0, 2.0).unwrap();
        let d = TransformChain::default().compose(base.clone());
        for &t in &[0.2, 0.7, 1.9] {
            close(d.pdf(t), base.pdf(t), 1e-15);
            close(d.cdf(t), base.cdf(t), 1e-15);
        }
    }
}
