//! The ten baseline distributions G that the generator chain wraps.
//!
//! Each kind exposes pdf/cdf/quantile plus the log-scale variants the family
//! layer composes with, the time derivative of the log density (needed for
//! density/hazard shape analysis), and closed-form parameter derivatives of
//! both log g and G (needed for analytic score vectors).

use crate::quad::bisect;
use crate::special::{inv_normal_cdf, ln_1m_exp, ln_normal_cdf, ln_normal_pdf, normal_cdf, normal_pdf};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BaselineError {
    #[error("parameter {name} must be {constraint}, got {value}")]
    InvalidParameter {
        name: &'static str,
        constraint: &'static str,
        value: f64,
    },
    #[error("probability level must lie in (0,1), got {0}")]
    ProbabilityOutOfRange(f64),
    #[error("expected {expected} parameters, got {got}")]
    ParameterCount { expected: usize, got: usize },
}

fn require_positive(name: &'static str, value: f64) -> Result<f64, BaselineError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(BaselineError::InvalidParameter {
            name,
            constraint: "finite and > 0",
            value,
        })
    }
}

fn require_finite(name: &'static str, value: f64) -> Result<f64, BaselineError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(BaselineError::InvalidParameter {
            name,
            constraint: "finite",
            value,
        })
    }
}

/// The monotone exponent function of the extended Weibull cdf
/// G(t) = 1 - exp(-delta * E(t)). Constants inside a tag are fixed data,
/// not fitted parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EwFunction {
    /// E(t) = t (exponential)
    Identity,
    /// E(t) = t^2 (Rayleigh)
    Square,
    /// E(t) = log(t/k) (Pareto), support t > k
    LogRatio { k: f64 },
    /// E(t) = (exp(beta t) - 1)/beta (Gompertz-type)
    ExpGrowth { beta: f64 },
}

impl EwFunction {
    fn value(&self, t: f64) -> f64 {
        match *self {
            EwFunction::Identity => t,
            EwFunction::Square => t * t,
            EwFunction::LogRatio { k } => (t / k).ln(),
            EwFunction::ExpGrowth { beta } => (beta * t).exp_m1() / beta,
        }
    }

    fn ln_derivative(&self, t: f64) -> f64 {
        match *self {
            EwFunction::Identity => 0.0,
            EwFunction::Square => std::f64::consts::LN_2 + t.ln(),
            EwFunction::LogRatio { .. } => -t.ln(),
            EwFunction::ExpGrowth { beta } => beta * t,
        }
    }

    fn derivative(&self, t: f64) -> f64 {
        match *self {
            EwFunction::Identity => 1.0,
            EwFunction::Square => 2.0 * t,
            EwFunction::LogRatio { .. } => 1.0 / t,
            EwFunction::ExpGrowth { beta } => (beta * t).exp(),
        }
    }

    fn invert(&self, y: f64) -> f64 {
        match *self {
            EwFunction::Identity => y,
            EwFunction::Square => y.sqrt(),
            EwFunction::LogRatio { k } => k * y.exp(),
            EwFunction::ExpGrowth { beta } => (beta * y).ln_1p() / beta,
        }
    }

    fn support_lower(&self) -> f64 {
        match *self {
            EwFunction::LogRatio { k } => k,
            _ => 0.0,
        }
    }

    /// d/dt of log g(t) contributed beyond -delta*E'(t), i.e. e'(t)/e(t).
    fn dln_derivative_dt(&self, t: f64) -> f64 {
        match *self {
            EwFunction::Identity => 0.0,
            EwFunction::Square => 1.0 / t,
            EwFunction::LogRatio { .. } => -1.0 / t,
            EwFunction::ExpGrowth { beta } => beta,
        }
    }
}

/// A validated baseline distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum BaselineModel {
    /// g(t) = lambda e^{-lambda t}
    Exponential { lambda: f64 },
    /// g(t) = (beta/delta) (1 + t/delta)^{-(beta+1)}
    Lomax { beta: f64, delta: f64 },
    /// g(t) = lambda beta t^{beta-1} e^{-lambda t^beta}
    Weibull { lambda: f64, beta: f64 },
    /// g(t) = lambda delta^lambda t^{-(lambda+1)} e^{-(delta/t)^lambda}
    Frechet { lambda: f64, delta: f64 },
    /// g(t) = beta e^{lambda t} exp(-(beta/lambda)(e^{lambda t}-1))
    Gompertz { beta: f64, lambda: f64 },
    /// g(t) = delta e(t) exp(-delta E(t))
    ExtendedWeibull { delta: f64, e: EwFunction },
    /// g(t) = (sigma + beta gamma t^{gamma-1}) exp(-sigma t - beta t^gamma)
    ModifiedWeibull { sigma: f64, beta: f64, gamma: f64 },
    /// g(t) = (p/(t sigma)) phi(z) Phi(z)^{p-1}, z = (mu - ln t)/sigma
    PowerLogNormal { p: f64, mu: f64, sigma: f64 },
    /// g(t) = gamma k theta^k t^{-(k+1)} [1-(theta/t)^k]^{gamma-1}, t > theta
    ExponentiatedPareto { gamma: f64, k: f64, theta: f64 },
    /// g(t) = k theta^k t^{k-1} on (0, 1/theta)
    ExtendedPower { k: f64, theta: f64 },
}

use BaselineModel::*;

impl BaselineModel {
    pub fn exponential(lambda: f64) -> Result<Self, BaselineError> {
        Ok(Exponential { lambda: require_positive("lambda", lambda)? })
    }

    pub fn lomax(beta: f64, delta: f64) -> Result<Self, BaselineError> {
        Ok(Lomax {
            beta: require_positive("beta", beta)?,
            delta: require_positive("delta", delta)?,
        })
    }

    pub fn weibull(lambda: f64, beta: f64) -> Result<Self, BaselineError> {
        Ok(Weibull {
            lambda: require_positive("lambda", lambda)?,
            beta: require_positive("beta", beta)?,
        })
    }

    pub fn frechet(lambda: f64, delta: f64) -> Result<Self, BaselineError> {
        Ok(Frechet {
            lambda: require_positive("lambda", lambda)?,
            delta: require_positive("delta", delta)?,
        })
    }

    pub fn gompertz(beta: f64, lambda: f64) -> Result<Self, BaselineError> {
        Ok(Gompertz {
            beta: require_positive("beta", beta)?,
            lambda: require_positive("lambda", lambda)?,
        })
    }

    pub fn extended_weibull(delta: f64, e: EwFunction) -> Result<Self, BaselineError> {
        match e {
            EwFunction::LogRatio { k } => {
                require_positive("k", k)?;
            }
            EwFunction::ExpGrowth { beta } => {
                require_positive("beta", beta)?;
            }
            _ => {}
        }
        Ok(ExtendedWeibull { delta: require_positive("delta", delta)?, e })
    }

    /// sigma, beta >= 0 with sigma + beta > 0; gamma > 0.
    pub fn modified_weibull(sigma: f64, beta: f64, gamma: f64) -> Result<Self, BaselineError> {
        require_finite("sigma", sigma)?;
        require_finite("beta", beta)?;
        if sigma < 0.0 {
            return Err(BaselineError::InvalidParameter {
                name: "sigma",
                constraint: ">= 0",
                value: sigma,
            });
        }
        if beta < 0.0 {
            return Err(BaselineError::InvalidParameter {
                name: "beta",
                constraint: ">= 0",
                value: beta,
            });
        }
        if sigma + beta <= 0.0 {
            return Err(BaselineError::InvalidParameter {
                name: "sigma+beta",
                constraint: "> 0",
                value: sigma + beta,
            });
        }
        Ok(ModifiedWeibull { sigma, beta, gamma: require_positive("gamma", gamma)? })
    }

    pub fn power_log_normal(p: f64, mu: f64, sigma: f64) -> Result<Self, BaselineError> {
        Ok(PowerLogNormal {
            p: require_positive("p", p)?,
            mu: require_finite("mu", mu)?,
            sigma: require_positive("sigma", sigma)?,
        })
    }

    pub fn exponentiated_pareto(gamma: f64, k: f64, theta: f64) -> Result<Self, BaselineError> {
        Ok(ExponentiatedPareto {
            gamma: require_positive("gamma", gamma)?,
            k: require_positive("k", k)?,
            theta: require_positive("theta", theta)?,
        })
    }

    pub fn extended_power(k: f64, theta: f64) -> Result<Self, BaselineError> {
        Ok(ExtendedPower {
            k: require_positive("k", k)?,
            theta: require_positive("theta", theta)?,
        })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Exponential { .. } => "exponential",
            Lomax { .. } => "lomax",
            Weibull { .. } => "weibull",
            Frechet { .. } => "frechet",
            Gompertz { .. } => "gompertz",
            ExtendedWeibull { .. } => "extended-weibull",
            ModifiedWeibull { .. } => "modified-weibull",
            PowerLogNormal { .. } => "power-log-normal",
            ExponentiatedPareto { .. } => "exponentiated-pareto",
            ExtendedPower { .. } => "extended-power",
        }
    }

    /// Open support interval (lower, upper).
    pub fn support(&self) -> (f64, f64) {
        match self {
            ExponentiatedPareto { theta, .. } => (*theta, f64::INFINITY),
            ExtendedPower { theta, .. } => (0.0, 1.0 / theta),
            ExtendedWeibull { e, .. } => (e.support_lower(), f64::INFINITY),
            _ => (0.0, f64::INFINITY),
        }
    }

    fn in_support(&self, t: f64) -> bool {
        let (lo, hi) = self.support();
        t > lo && t < hi
    }

    /// log survival function ln(1 - G(t)); exact at both tails.
    pub fn log_sf(&self, t: f64) -> f64 {
        let (lo, hi) = self.support();
        if t <= lo {
            return 0.0;
        }
        if t >= hi {
            return f64::NEG_INFINITY;
        }
        match self {
            Exponential { lambda } => -lambda * t,
            Lomax { beta, delta } => -beta * (t / delta).ln_1p(),
            Weibull { lambda, beta } => -lambda * t.powf(*beta),
            Frechet { .. } => ln_1m_exp(self.log_cdf(t)),
            Gompertz { beta, lambda } => -(beta / lambda) * (lambda * t).exp_m1(),
            ExtendedWeibull { delta, e } => -delta * e.value(t),
            ModifiedWeibull { sigma, beta, gamma } => -(sigma * t + beta * t.powf(*gamma)),
            PowerLogNormal { p, mu, sigma } => p * ln_normal_cdf((mu - t.ln()) / sigma),
            ExponentiatedPareto { .. } | ExtendedPower { .. } => ln_1m_exp(self.log_cdf(t)),
        }
    }

    /// log cdf ln G(t); exact at both tails.
    pub fn log_cdf(&self, t: f64) -> f64 {
        let (lo, hi) = self.support();
        if t <= lo {
            return f64::NEG_INFINITY;
        }
        if t >= hi {
            return 0.0;
        }
        match self {
            Frechet { lambda, delta } => -(delta / t).powf(*lambda),
            ExponentiatedPareto { gamma, k, theta } => {
                // G = [1 - (theta/t)^k]^gamma
                gamma * ln_1m_exp(k * (theta / t).ln())
            }
            ExtendedPower { k, theta } => k * (theta * t).ln(),
            _ => ln_1m_exp(self.log_sf(t)),
        }
    }

    pub fn cdf(&self, t: f64) -> f64 {
        let (lo, hi) = self.support();
        if t <= lo {
            0.0
        } else if t >= hi {
            1.0
        } else {
            match self {
                Frechet { .. } | ExponentiatedPareto { .. } | ExtendedPower { .. } => {
                    self.log_cdf(t).exp()
                }
                _ => -self.log_sf(t).exp_m1(),
            }
        }
    }

    pub fn sf(&self, t: f64) -> f64 {
        1.0 - self.cdf(t)
    }

    pub fn log_pdf(&self, t: f64) -> f64 {
        if !self.in_support(t) {
            return f64::NEG_INFINITY;
        }
        match self {
            Exponential { lambda } => lambda.ln() - lambda * t,
            Lomax { beta, delta } => beta.ln() - delta.ln() - (beta + 1.0) * (t / delta).ln_1p(),
            Weibull { lambda, beta } => {
                lambda.ln() + beta.ln() + (beta - 1.0) * t.ln() - lambda * t.powf(*beta)
            }
            Frechet { lambda, delta } => {
                lambda.ln() + lambda * delta.ln() - (lambda + 1.0) * t.ln() - (delta / t).powf(*lambda)
            }
            Gompertz { beta, lambda } => {
                beta.ln() + lambda * t - (beta / lambda) * (lambda * t).exp_m1()
            }
            ExtendedWeibull { delta, e } => delta.ln() + e.ln_derivative(t) - delta * e.value(t),
            ModifiedWeibull { sigma, beta, gamma } => {
                (sigma + beta * gamma * t.powf(gamma - 1.0)).ln() - sigma * t - beta * t.powf(*gamma)
            }
            PowerLogNormal { p, mu, sigma } => {
                let z = (mu - t.ln()) / sigma;
                p.ln() - t.ln() - sigma.ln() + ln_normal_pdf(z) + (p - 1.0) * ln_normal_cdf(z)
            }
            ExponentiatedPareto { gamma, k, theta } => {
                let ln_w = k * (theta / t).ln();
                gamma.ln() + k.ln() + k * theta.ln() - (k + 1.0) * t.ln()
                    + (gamma - 1.0) * ln_1m_exp(ln_w)
            }
            ExtendedPower { k, theta } => k.ln() + k * theta.ln() + (k - 1.0) * t.ln(),
        }
    }

    pub fn pdf(&self, t: f64) -> f64 {
        if self.in_support(t) {
            self.log_pdf(t).exp()
        } else {
            0.0
        }
    }

    /// Quantile function G^{-1}(p) for p in (0,1); closed form everywhere
    /// except the modified Weibull, which bisects its monotone cumulative
    /// exponent.
    pub fn quantile(&self, p: f64) -> Result<f64, BaselineError> {
        if !(p > 0.0 && p < 1.0) {
            return Err(BaselineError::ProbabilityOutOfRange(p));
        }
        let y = -(-p).ln_1p(); // -ln(1-p) > 0
        Ok(match self {
            Exponential { lambda } => y / lambda,
            Lomax { beta, delta } => delta * (y / beta).exp_m1(),
            Weibull { lambda, beta } => (y / lambda).powf(1.0 / beta),
            Frechet { lambda, delta } => delta * (-p.ln()).powf(-1.0 / lambda),
            Gompertz { beta, lambda } => (lambda * y / beta).ln_1p() / lambda,
            ExtendedWeibull { delta, e } => e.invert(y / delta),
            ModifiedWeibull { sigma, beta, gamma } => {
                if *beta == 0.0 {
                    y / sigma
                } else if *sigma == 0.0 {
                    (y / beta).powf(1.0 / gamma)
                } else {
                    let h = |t: f64| sigma * t + beta * t.powf(*gamma) - y;
                    let mut hi = 1.0;
                    while h(hi) < 0.0 {
                        hi *= 2.0;
                        if hi > 1e300 {
                            break;
                        }
                    }
                    bisect(h, 0.0, hi, 1e-14, 200)
                }
            }
            PowerLogNormal { p: pw, mu, sigma } => {
                // Phi(z)^pw = 1-p  =>  z = Phi^{-1}((1-p)^{1/pw})
                let z = inv_normal_cdf(((-p).ln_1p() / pw).exp());
                (mu - sigma * z).exp()
            }
            ExponentiatedPareto { gamma, k, theta } => {
                // t = theta (1 - p^{1/gamma})^{-1/k}
                let ln_b = ln_1m_exp(p.ln() / gamma);
                theta * (-ln_b / k).exp()
            }
            ExtendedPower { k, theta } => (p.ln() / k).exp() / theta,
        })
    }

    /// d/dt log g(t) in closed form (g'/g); used by the density and hazard
    /// shape equations.
    pub fn dlog_pdf_dt(&self, t: f64) -> f64 {
        match self {
            Exponential { lambda } => -lambda,
            Lomax { beta, delta } => -(beta + 1.0) / (delta + t),
            Weibull { lambda, beta } => (beta - 1.0) / t - lambda * beta * t.powf(beta - 1.0),
            Frechet { lambda, delta } => {
                let s = (delta / t).powf(*lambda);
                (-(lambda + 1.0) + lambda * s) / t
            }
            Gompertz { beta, lambda } => lambda - beta * (lambda * t).exp(),
            ExtendedWeibull { delta, e } => e.dln_derivative_dt(t) - delta * e.derivative(t),
            ModifiedWeibull { sigma, beta, gamma } => {
                let h = sigma + beta * gamma * t.powf(gamma - 1.0);
                beta * gamma * (gamma - 1.0) * t.powf(gamma - 2.0) / h - sigma
                    - beta * gamma * t.powf(gamma - 1.0)
            }
            PowerLogNormal { p, mu, sigma } => {
                let z = (mu - t.ln()) / sigma;
                let hazard_ratio = (ln_normal_pdf(z) - ln_normal_cdf(z)).exp();
                -1.0 / t + z / (t * sigma) - (p - 1.0) * hazard_ratio / (t * sigma)
            }
            ExponentiatedPareto { gamma, k, theta } => {
                let w = (k * (theta / t).ln()).exp();
                let b = 1.0 - w;
                -(k + 1.0) / t + (gamma - 1.0) * k * w / (t * b)
            }
            ExtendedPower { k, .. } => (k - 1.0) / t,
        }
    }

    pub fn param_count(&self) -> usize {
        match self {
            Exponential { .. } | ExtendedWeibull { .. } => 1,
            Lomax { .. } | Weibull { .. } | Frechet { .. } | Gompertz { .. }
            | ExtendedPower { .. } => 2,
            ModifiedWeibull { .. } | PowerLogNormal { .. } | ExponentiatedPareto { .. } => 3,
        }
    }

    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            Exponential { .. } => &["lambda"],
            Lomax { .. } => &["beta", "delta"],
            Weibull { .. } => &["lambda", "beta"],
            Frechet { .. } => &["lambda", "delta"],
            Gompertz { .. } => &["beta", "lambda"],
            ExtendedWeibull { .. } => &["delta"],
            ModifiedWeibull { .. } => &["sigma", "beta", "gamma"],
            PowerLogNormal { .. } => &["p", "mu", "sigma"],
            ExponentiatedPareto { .. } => &["gamma", "k", "theta"],
            ExtendedPower { .. } => &["k", "theta"],
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match self {
            Exponential { lambda } => vec![*lambda],
            Lomax { beta, delta } => vec![*beta, *delta],
            Weibull { lambda, beta } => vec![*lambda, *beta],
            Frechet { lambda, delta } => vec![*lambda, *delta],
            Gompertz { beta, lambda } => vec![*beta, *lambda],
            ExtendedWeibull { delta, .. } => vec![*delta],
            ModifiedWeibull { sigma, beta, gamma } => vec![*sigma, *beta, *gamma],
            PowerLogNormal { p, mu, sigma } => vec![*p, *mu, *sigma],
            ExponentiatedPareto { gamma, k, theta } => vec![*gamma, *k, *theta],
            ExtendedPower { k, theta } => vec![*k, *theta],
        }
    }

    /// Componentwise positivity constraints (false only for the power
    /// log-normal location, which ranges over all reals).
    pub fn positive_mask(&self) -> &'static [bool] {
        match self {
            Exponential { .. } | ExtendedWeibull { .. } => &[true],
            Lomax { .. } | Weibull { .. } | Frechet { .. } | Gompertz { .. }
            | ExtendedPower { .. } => &[true, true],
            PowerLogNormal { .. } => &[true, false, true],
            ModifiedWeibull { .. } | ExponentiatedPareto { .. } => &[true, true, true],
        }
    }

    /// Rebuild the same kind with a new parameter vector.
    pub fn with_params(&self, params: &[f64]) -> Result<Self, BaselineError> {
        let expected = self.param_count();
        if params.len() != expected {
            return Err(BaselineError::ParameterCount { expected, got: params.len() });
        }
        match self {
            Exponential { .. } => Self::exponential(params[0]),
            Lomax { .. } => Self::lomax(params[0], params[1]),
            Weibull { .. } => Self::weibull(params[0], params[1]),
            Frechet { .. } => Self::frechet(params[0], params[1]),
            Gompertz { .. } => Self::gompertz(params[0], params[1]),
            ExtendedWeibull { e, .. } => Self::extended_weibull(params[0], *e),
            ModifiedWeibull { .. } => Self::modified_weibull(params[0], params[1], params[2]),
            PowerLogNormal { .. } => Self::power_log_normal(params[0], params[1], params[2]),
            ExponentiatedPareto { .. } => {
                Self::exponentiated_pareto(params[0], params[1], params[2])
            }
            ExtendedPower { .. } => Self::extended_power(params[0], params[1]),
        }
    }

    /// Partial derivative of log g(t) with respect to the idx-th parameter.
    pub fn dlog_pdf_dparam(&self, t: f64, idx: usize) -> f64 {
        match self {
            Exponential { lambda } => 1.0 / lambda - t,
            Lomax { beta, delta } => {
                let w = 1.0 + t / delta;
                match idx {
                    0 => 1.0 / beta - w.ln(),
                    _ => -1.0 / delta + (beta + 1.0) * t / (delta * (delta + t)),
                }
            }
            Weibull { lambda, beta } => {
                let tb = t.powf(*beta);
                match idx {
                    0 => 1.0 / lambda - tb,
                    _ => 1.0 / beta + t.ln() * (1.0 - lambda * tb),
                }
            }
            Frechet { lambda, delta } => {
                let s = (delta / t).powf(*lambda);
                match idx {
                    0 => 1.0 / lambda + (delta / t).ln() * (1.0 - s),
                    _ => (lambda / delta) * (1.0 - s),
                }
            }
            Gompertz { beta, lambda } => {
                let w = (lambda * t).exp_m1() / lambda;
                match idx {
                    0 => 1.0 / beta - w,
                    _ => {
                        let dw = (lambda * t * (lambda * t).exp() - (lambda * t).exp_m1())
                            / (lambda * lambda);
                        t - beta * dw
                    }
                }
            }
            ExtendedWeibull { delta, e } => 1.0 / delta - e.value(t),
            ModifiedWeibull { sigma, beta, gamma } => {
                let tg1 = t.powf(gamma - 1.0);
                let h = sigma + beta * gamma * tg1;
                match idx {
                    0 => 1.0 / h - t,
                    1 => gamma * tg1 / h - t * tg1,
                    _ => beta * tg1 * (1.0 + gamma * t.ln()) / h - beta * t * tg1 * t.ln(),
                }
            }
            PowerLogNormal { p, mu, sigma } => {
                let z = (mu - t.ln()) / sigma;
                let hr = (ln_normal_pdf(z) - ln_normal_cdf(z)).exp();
                match idx {
                    0 => 1.0 / p + ln_normal_cdf(z),
                    1 => (-z + (p - 1.0) * hr) / sigma,
                    _ => (-1.0 + z * z - (p - 1.0) * hr * z) / sigma,
                }
            }
            ExponentiatedPareto { gamma, k, theta } => {
                let ln_ratio = (theta / t).ln();
                let w = (k * ln_ratio).exp();
                let b = 1.0 - w;
                match idx {
                    0 => 1.0 / gamma + ln_1m_exp(k * ln_ratio),
                    1 => 1.0 / k + ln_ratio * (1.0 - (gamma - 1.0) * w / b),
                    _ => k / theta - (gamma - 1.0) * k * w / (theta * b),
                }
            }
            ExtendedPower { k, theta } => match idx {
                0 => 1.0 / k + (theta * t).ln(),
                _ => k / theta,
            },
        }
    }

    /// Partial derivative of G(t) with respect to the idx-th parameter.
    pub fn dcdf_dparam(&self, t: f64, idx: usize) -> f64 {
        if !self.in_support(t) {
            return 0.0;
        }
        match self {
            Exponential { lambda } => t * (-lambda * t).exp(),
            Lomax { beta, delta } => {
                let w = 1.0 + t / delta;
                let sf = (-beta * w.ln()).exp();
                match idx {
                    0 => sf * w.ln(),
                    _ => -beta * t * sf / (w * delta * delta),
                }
            }
            Weibull { lambda, beta } => {
                let tb = t.powf(*beta);
                let sf = (-lambda * tb).exp();
                match idx {
                    0 => tb * sf,
                    _ => lambda * tb * t.ln() * sf,
                }
            }
            Frechet { lambda, delta } => {
                let s = (delta / t).powf(*lambda);
                let g = (-s).exp();
                match idx {
                    0 => -g * s * (delta / t).ln(),
                    _ => -g * lambda * s / delta,
                }
            }
            Gompertz { beta, lambda } => {
                let w = (lambda * t).exp_m1() / lambda;
                let sf = (-beta * w).exp();
                match idx {
                    0 => w * sf,
                    _ => {
                        let dw = (lambda * t * (lambda * t).exp() - (lambda * t).exp_m1())
                            / (lambda * lambda);
                        beta * dw * sf
                    }
                }
            }
            ExtendedWeibull { delta, e } => {
                let ev = e.value(t);
                ev * (-delta * ev).exp()
            }
            ModifiedWeibull { sigma, beta, gamma } => {
                let sf = (-(sigma * t + beta * t.powf(*gamma))).exp();
                match idx {
                    0 => t * sf,
                    1 => t.powf(*gamma) * sf,
                    _ => beta * t.powf(*gamma) * t.ln() * sf,
                }
            }
            PowerLogNormal { p, mu, sigma } => {
                let z = (mu - t.ln()) / sigma;
                let phi = normal_pdf(z);
                let cap = normal_cdf(z);
                match idx {
                    0 => -cap.powf(*p) * cap.ln(),
                    1 => -p * cap.powf(p - 1.0) * phi / sigma,
                    _ => p * cap.powf(p - 1.0) * phi * z / sigma,
                }
            }
            ExponentiatedPareto { gamma, k, theta } => {
                let ln_ratio = (theta / t).ln();
                let w = (k * ln_ratio).exp();
                let b = 1.0 - w;
                match idx {
                    0 => b.powf(*gamma) * b.ln(),
                    1 => -gamma * b.powf(gamma - 1.0) * w * ln_ratio,
                    _ => -gamma * b.powf(gamma - 1.0) * k * w / theta,
                }
            }
            ExtendedPower { k, theta } => {
                let g = (k * (theta * t).ln()).exp();
                match idx {
                    0 => g * (theta * t).ln(),
                    _ => k * g / theta,
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn exponential_point_values() {
        let m = BaselineModel::exponential(1.0).unwrap();
        close(m.pdf(0.0), 0.0, 0.0); // boundary excluded from support
        close(m.pdf(1e-300), 1.0, 1e-12);
        close(m.cdf(std::f64::consts::LN_2), 0.5, 1e-15);
        let q = BaselineModel::exponential(2.0).unwrap().quantile(0.5).unwrap();
        close(q, std::f64::consts::LN_2 / 2.0, 1e-14);
    }

    #[test]
    fn weibull_pdf_value() {
        let m = BaselineModel::weibull(1.0, 2.0).unwrap();
        close(m.pdf(1.0), 2.0 * (-1.0f64).exp(), 1e-14);
    }

    #[test]
    fn frechet_pdf_value() {
        // symbolic substitution, cross-checked by differentiating G numerically
        let m = BaselineModel::frechet(1.0, 1.0).unwrap();
        close(m.pdf(2.0), 0.25 * (-0.5f64).exp(), 1e-14);
        let h = 1e-6;
        let fd = (m.cdf(2.0 + h) - m.cdf(2.0 - h)) / (2.0 * h);
        close(m.pdf(2.0), fd, 1e-9);
    }

    #[test]
    fn gompertz_cdf_value() {
        let m = BaselineModel::gompertz(1.0, 1.0).unwrap();
        let expected = 1.0 - (-(std::f64::consts::E - 1.0)).exp();
        close(m.cdf(1.0), expected, 1e-14);
    }

    #[test]
    fn extended_power_cdf_value() {
        let m = BaselineModel::extended_power(1.0, 2.0).unwrap();
        close(m.cdf(0.25), 0.5, 1e-15);
        assert_eq!(m.cdf(0.6), 1.0); // above support
    }

    #[test]
    fn exponentiated_pareto_median() {
        let m = BaselineModel::exponentiated_pareto(1.0, 1.0, 1.0).unwrap();
        close(m.quantile(0.5).unwrap(), 2.0, 1e-12);
    }

    #[test]
    fn power_log_normal_median_is_lognormal_median() {
        let m = BaselineModel::power_log_normal(1.0, 0.0, 1.0).unwrap();
        close(m.quantile(0.5).unwrap(), 1.0, 1e-12);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(BaselineModel::exponential(0.0).is_err());
        assert!(BaselineModel::exponential(f64::NAN).is_err());
        assert!(BaselineModel::weibull(1.0, -2.0).is_err());
        assert!(BaselineModel::modified_weibull(0.0, 0.0, 1.0).is_err());
        assert!(BaselineModel::modified_weibull(0.0, 1.0, 1.0).is_ok());
        assert!(BaselineModel::power_log_normal(1.0, f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn quantile_domain_errors() {
        let m = BaselineModel::exponential(1.0).unwrap();
        assert!(m.quantile(0.0).is_err());
        assert!(m.quantile(1.0).is_err());
        assert!(m.quantile(-0.3).is_err());
    }

    #[test]
    fn modified_weibull_quantile_bisection() {
        let m = BaselineModel::modified_weibull(0.5, 1.5, 2.5).unwrap();
        for &p in &[0.01, 0.3, 0.5, 0.9, 0.999] {
            let t = m.quantile(p).unwrap();
            close(m.cdf(t), p, 1e-10);
        }
    }
}
