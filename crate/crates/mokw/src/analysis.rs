//! Series expansions, order statistics, probability weighted moments,
//! ordinary moments, the moment generating function, Renyi entropy and
//! stochastic-ordering checks for the MOKw-G family.
//!
//! The expansions split on the tilt: for alpha in (0,1) the density is a
//! kappa-weighted mixture in powers of the Kw-G survival function, for
//! alpha > 1 an eta-weighted mixture in powers of the Kw-G cdf. Both converge
//! geometrically, so truncations cut off early once terms stop contributing.

use crate::family::MokwDistribution;
use crate::quad::{integrate, QuadError};
use crate::special::{ln_1m_exp, ln_gamma};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("order-statistic index {i} outside 1..={n}")]
    IndexOutOfRange { i: usize, n: usize },
    #[error("integral did not converge: {0}")]
    NonConvergent(#[from] QuadError),
    #[error("series branch requires alpha > 1 (got {0})")]
    SeriesBranch(f64),
    #[error("renyi order delta must be positive and different from 1, got {0}")]
    InvalidDelta(f64),
    #[error("distributions must share baseline and (a, b) and differ only in alpha")]
    MismatchedShapes,
}

/// Tag for the expansion weight families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientKind {
    /// kappa_j = (j+1) alpha (1-alpha)^j            (alpha in (0,1), pdf)
    Kappa,
    /// kappa'_j = -alpha (1-alpha)^j                (alpha in (0,1), sf)
    KappaPrime,
    /// phi_{j,k} = alpha (1-alpha)^j (-1)^{j-k} (j+1) C(j,k)
    Phi,
    /// phi'_{j,k} = alpha (1-alpha)^j (-1)^{j-k} C(j+1,k)
    PhiPrime,
    /// eta_j = ((j+1)/alpha) (1-1/alpha)^j          (alpha > 1, pdf)
    Eta,
    /// eta'_j = (1/alpha) (1-1/alpha)^j
    EtaPrime,
    /// C'_j = (alpha/(j+1)) eta_j = (1-1/alpha)^j   (alpha > 1, sf)
    CPrime,
    /// X_{j,q}: order-statistic weights, lower tilt branch, fixed p
    OrderLower,
    /// lambda_{j,k}: order-statistic weights, upper tilt branch, fixed p
    OrderUpper,
    /// d_{m,k}: coefficients of the m-th power of a series
    PowerSeries,
}

/// Order-statistic context (sample index i, sample size n, expansion index p).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderContext {
    pub i: usize,
    pub n: usize,
    pub p: usize,
}

/// Expansion weights up to a truncation point. One- and two-dimensional kinds
/// share the container; two-dimensional kinds store row-major (j, k).
#[derive(Debug, Clone)]
pub struct SeriesCoefficients {
    pub kind: CoefficientKind,
    pub alpha: f64,
    pub trunc: usize,
    pub context: Option<OrderContext>,
    weights: Vec<f64>,
    cols: usize,
}

impl SeriesCoefficients {
    pub fn get(&self, j: usize) -> f64 {
        self.weights[j]
    }

    pub fn get2(&self, j: usize, k: usize) -> f64 {
        self.weights[j * self.cols + k]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kappa(alpha: f64, trunc: usize) -> Self {
        let abar = 1.0 - alpha;
        let weights = (0..=trunc).map(|j| (j as f64 + 1.0) * alpha * abar.powi(j as i32)).collect();
        Self { kind: CoefficientKind::Kappa, alpha, trunc, context: None, weights, cols: 1 }
    }

    pub fn kappa_prime(alpha: f64, trunc: usize) -> Self {
        let abar = 1.0 - alpha;
        let weights = (0..=trunc).map(|j| -alpha * abar.powi(j as i32)).collect();
        Self { kind: CoefficientKind::KappaPrime, alpha, trunc, context: None, weights, cols: 1 }
    }

    pub fn eta(alpha: f64, trunc: usize) -> Self {
        let r = 1.0 - 1.0 / alpha;
        let weights =
            (0..=trunc).map(|j| (j as f64 + 1.0) / alpha * r.powi(j as i32)).collect();
        Self { kind: CoefficientKind::Eta, alpha, trunc, context: None, weights, cols: 1 }
    }

    pub fn eta_prime(alpha: f64, trunc: usize) -> Self {
        let r = 1.0 - 1.0 / alpha;
        let weights = (0..=trunc).map(|j| r.powi(j as i32) / alpha).collect();
        Self { kind: CoefficientKind::EtaPrime, alpha, trunc, context: None, weights, cols: 1 }
    }

    pub fn c_prime(alpha: f64, trunc: usize) -> Self {
        let r = 1.0 - 1.0 / alpha;
        let weights = (0..=trunc).map(|j| r.powi(j as i32)).collect();
        Self { kind: CoefficientKind::CPrime, alpha, trunc, context: None, weights, cols: 1 }
    }

    pub fn phi(alpha: f64, trunc: usize) -> Self {
        let abar = 1.0 - alpha;
        let cols = trunc + 1;
        let mut weights = vec![0.0; cols * cols];
        for j in 0..=trunc {
            for k in 0..=j {
                let sign = if (j - k) % 2 == 0 { 1.0 } else { -1.0 };
                weights[j * cols + k] =
                    alpha * abar.powi(j as i32) * sign * (j as f64 + 1.0) * binomial(j, k);
            }
        }
        Self { kind: CoefficientKind::Phi, alpha, trunc, context: None, weights, cols }
    }

    pub fn phi_prime(alpha: f64, trunc: usize) -> Self {
        let abar = 1.0 - alpha;
        let cols = trunc + 1;
        let mut weights = vec![0.0; cols * cols];
        for j in 0..=trunc {
            for k in 0..=j {
                let sign = if (j - k) % 2 == 0 { 1.0 } else { -1.0 };
                weights[j * cols + k] = alpha * abar.powi(j as i32) * sign * binomial(j + 1, k);
            }
        }
        Self { kind: CoefficientKind::PhiPrime, alpha, trunc, context: None, weights, cols }
    }

    /// d_{m,k}: coefficients of (sum_k c_k x^k)^m via the standard recursion
    /// d_{m,0} = c_0^m, d_{m,k} = (1/(k c_0)) sum_{h=1}^{k} [h(m+1) - k] c_h d_{m,k-h}.
    pub fn power_series(c: &[f64], m: usize, alpha: f64) -> Self {
        let trunc = c.len() - 1;
        let mut d = vec![0.0; c.len()];
        d[0] = c[0].powi(m as i32);
        for k in 1..c.len() {
            let mut acc = 0.0;
            for h in 1..=k {
                acc += (h as f64 * (m as f64 + 1.0) - k as f64) * c[h] * d[k - h];
            }
            d[k] = acc / (k as f64 * c[0]);
        }
        Self { kind: CoefficientKind::PowerSeries, alpha, trunc, context: None, weights: d, cols: 1 }
    }

    /// X_{j,q} for a fixed p: the (j,q) weight of f^{KwG} sfKw^{j+q+n+p-i} in
    /// the lower-branch order-statistic expansion. Includes the multinomial
    /// constant and the (-1)^p C(i-1,p) factor.
    pub fn order_lower(alpha: f64, ctx: OrderContext, trunc: usize) -> Self {
        let kap = Self::kappa(alpha, trunc);
        let m = ctx.n + ctx.p - ctx.i;
        let mo_sf = mo_sf_power_coeffs_lower(alpha, m, trunc);
        let cols = trunc + 1;
        let konst = order_constant(ctx);
        let mut weights = vec![0.0; cols * cols];
        for j in 0..=trunc {
            for q in 0..=trunc {
                weights[j * cols + q] = konst * kap.get(j) * mo_sf[q];
            }
        }
        Self { kind: CoefficientKind::OrderLower, alpha, trunc, context: Some(ctx), weights, cols }
    }

    /// lambda_{j,k} for a fixed p: the (j,k) weight of
    /// f^{KwG} sfKw^{n+p-i} cdfKw^{j+k} in the upper-branch expansion.
    pub fn order_upper(alpha: f64, ctx: OrderContext, trunc: usize) -> Self {
        let eta = Self::eta(alpha, trunc);
        let m = ctx.n + ctx.p - ctx.i;
        let cp = Self::c_prime(alpha, trunc);
        let d = Self::power_series(cp.weights(), m, alpha);
        let cols = trunc + 1;
        let konst = order_constant(ctx);
        let mut weights = vec![0.0; cols * cols];
        for j in 0..=trunc {
            for k in 0..=trunc {
                weights[j * cols + k] = konst * eta.get(j) * d.get(k);
            }
        }
        Self { kind: CoefficientKind::OrderUpper, alpha, trunc, context: Some(ctx), weights, cols }
    }
}

/// n!/((i-1)!(n-i)!) * (-1)^p C(i-1,p)
fn order_constant(ctx: OrderContext) -> f64 {
    let sign = if ctx.p % 2 == 0 { 1.0 } else { -1.0 };
    (ln_gamma(ctx.n as f64 + 1.0)
        - ln_gamma(ctx.i as f64)
        - ln_gamma((ctx.n - ctx.i) as f64 + 1.0))
    .exp()
        * sign
        * binomial(ctx.i - 1, ctx.p)
}

/// Coefficients e_q of [alpha sum_q abar^q x^q]^m = sum_q e_q x^q
/// (so that sfMO(x)^m = x^m sum_q e_q x^q with x the Kw-G sf).
fn mo_sf_power_coeffs_lower(alpha: f64, m: usize, trunc: usize) -> Vec<f64> {
    let abar = 1.0 - alpha;
    let c: Vec<f64> = (0..=trunc).map(|q| alpha * abar.powi(q as i32)).collect();
    SeriesCoefficients::power_series(&c, m, alpha).weights
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Inner Kw-G log quantities at t: (log f_KwG, log sf_KwG, cdf_KwG).
fn kw_parts(d: &MokwDistribution, t: f64) -> (f64, f64, f64) {
    let base = d.base();
    let l_cdf = base.log_cdf(t);
    let l_a = d.a() * l_cdf;
    let l_b = if l_a >= -1e-305 {
        d.a().ln() + base.log_sf(t)
    } else {
        ln_1m_exp(l_a)
    };
    let l_sf_kw = d.b() * l_b;
    let mut ln_f = d.a().ln() + d.b().ln() + base.log_pdf(t);
    if d.a() != 1.0 {
        ln_f += (d.a() - 1.0) * l_cdf;
    }
    if d.b() != 1.0 {
        ln_f += (d.b() - 1.0) * l_b;
    }
    let cdf_kw = -l_sf_kw.exp_m1();
    (ln_f, l_sf_kw, cdf_kw)
}

const EARLY_EXIT_REL: f64 = 1e-14;

/// Truncated mixture expansion of the density; converges to the closed form
/// as the truncation grows. Exact single term at alpha = 1.
pub fn pdf_series(d: &MokwDistribution, t: f64, trunc: usize) -> f64 {
    let (ln_f, l_sf_kw, cdf_kw) = kw_parts(d, t);
    let f_kw = ln_f.exp();
    if !f_kw.is_finite() || f_kw == 0.0 {
        return f_kw.max(0.0);
    }
    let alpha = d.alpha();
    if alpha == 1.0 {
        return f_kw;
    }
    let mut sum = 0.0;
    if alpha < 1.0 {
        let abar = 1.0 - alpha;
        let sf = l_sf_kw.exp();
        let mut pow = 1.0; // sf^j
        let mut geo = alpha; // alpha abar^j
        for j in 0..=trunc {
            let term = (j as f64 + 1.0) * geo * pow;
            sum += term;
            if term.abs() < EARLY_EXIT_REL * sum.abs() {
                break;
            }
            pow *= sf;
            geo *= abar;
        }
    } else {
        let r = 1.0 - 1.0 / alpha;
        let mut pow = 1.0; // cdf^j
        let mut geo = 1.0 / alpha; // r^j/alpha
        for j in 0..=trunc {
            let term = (j as f64 + 1.0) * geo * pow;
            sum += term;
            if term.abs() < EARLY_EXIT_REL * sum.abs() {
                break;
            }
            pow *= cdf_kw;
            geo *= r;
        }
    }
    f_kw * sum
}

/// Truncated expansion of the survival function.
pub fn sf_series(d: &MokwDistribution, t: f64, trunc: usize) -> f64 {
    let (_, l_sf_kw, cdf_kw) = kw_parts(d, t);
    let alpha = d.alpha();
    let sf_kw = l_sf_kw.exp();
    if alpha == 1.0 {
        return sf_kw;
    }
    let mut sum = 0.0;
    if alpha < 1.0 {
        let abar = 1.0 - alpha;
        let mut pow = sf_kw; // sf^{j+1}
        let mut geo = alpha;
        for _ in 0..=trunc {
            let term = geo * pow;
            sum += term;
            if term.abs() < EARLY_EXIT_REL * sum.abs() {
                break;
            }
            pow *= sf_kw;
            geo *= abar;
        }
    } else {
        let r = 1.0 - 1.0 / alpha;
        let mut pow = 1.0; // cdf^j
        let mut geo = 1.0; // C'_j = r^j
        for _ in 0..=trunc {
            let term = geo * pow;
            sum += term;
            if term.abs() < EARLY_EXIT_REL * sum.abs() {
                break;
            }
            pow *= cdf_kw;
            geo *= r;
        }
        sum *= sf_kw;
    }
    sum
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMethod {
    Direct,
    Series,
}

/// Density of the i-th order statistic in a sample of n.
pub fn order_statistic_pdf(
    d: &MokwDistribution,
    i: usize,
    n: usize,
    t: f64,
    method: EvalMethod,
    trunc: usize,
) -> Result<f64, AnalysisError> {
    if i < 1 || i > n {
        return Err(AnalysisError::IndexOutOfRange { i, n });
    }
    match method {
        EvalMethod::Direct => {
            let ln_c = ln_gamma(n as f64 + 1.0) - ln_gamma(i as f64) - ln_gamma((n - i) as f64 + 1.0);
            let lp = d.log_pdf(t);
            if lp == f64::NEG_INFINITY {
                return Ok(0.0);
            }
            let c = d.cdf(t);
            let mut ln = ln_c + lp + (n - i) as f64 * d.log_sf(t);
            if i > 1 {
                ln += (i - 1) as f64 * c.ln();
            }
            Ok(ln.exp())
        }
        EvalMethod::Series => {
            let (ln_f, l_sf_kw, cdf_kw) = kw_parts(d, t);
            let f_kw = ln_f.exp();
            if f_kw == 0.0 {
                return Ok(0.0);
            }
            let alpha = d.alpha();
            let sf_kw = l_sf_kw.exp();
            let mut total = 0.0;
            for p in 0..i {
                let ctx = OrderContext { i, n, p };
                let m = n + p - i;
                let konst = order_constant(ctx);
                if alpha <= 1.0 {
                    // sum_{j,q} kappa_j e_q sf^{j+q+m} factorises into two
                    // one-dimensional sums in the same variable.
                    let kappa = SeriesCoefficients::kappa(alpha, trunc);
                    let kappa_sum = weighted_power_sum(kappa.weights(), sf_kw);
                    let e = mo_sf_power_coeffs_lower(alpha, m, trunc);
                    let e_sum = weighted_power_sum(&e, sf_kw);
                    total += konst * f_kw * kappa_sum * e_sum * sf_kw.powi(m as i32);
                } else {
                    let eta = SeriesCoefficients::eta(alpha, trunc);
                    let eta_sum = weighted_power_sum(eta.weights(), cdf_kw);
                    let cp = SeriesCoefficients::c_prime(alpha, trunc);
                    let dcoef = SeriesCoefficients::power_series(cp.weights(), m, alpha);
                    let d_sum = weighted_power_sum(dcoef.weights(), cdf_kw);
                    total += konst * f_kw * eta_sum * d_sum * sf_kw.powi(m as i32);
                }
            }
            Ok(total)
        }
    }
}

/// sum_j w_j x^j with early exit once terms stop contributing.
fn weighted_power_sum(weights: &[f64], x: f64) -> f64 {
    let mut sum = 0.0;
    let mut pow = 1.0;
    for &w in weights {
        let term = w * pow;
        sum += term;
        if term.abs() < EARLY_EXIT_REL * sum.abs() || pow == 0.0 {
            break;
        }
        pow *= x;
    }
    sum
}

/// Orders and tolerances of a probability weighted moment
/// Gamma_{p,q,r} = E[T^p F(T)^q (1-F(T))^r] of the inner Kw-G distribution.
#[derive(Debug, Clone, Copy)]
pub struct PwmSpec {
    pub p: u32,
    pub q: u32,
    pub r: u32,
    /// truncation handed to series routines that consume these moments
    pub trunc: usize,
    pub tol: f64,
}

impl Default for PwmSpec {
    fn default() -> Self {
        PwmSpec { p: 0, q: 0, r: 0, trunc: 500, tol: 1e-10 }
    }
}

impl PwmSpec {
    pub fn orders(p: u32, q: u32, r: u32) -> Self {
        PwmSpec { p, q, r, ..Default::default() }
    }
}

/// Probability weighted moment of the inner Kw-G distribution by adaptive
/// quadrature: integrand t^p [F^KwG]^q [(1-G^a)^b]^r f^KwG.
pub fn pwm(d: &MokwDistribution, spec: &PwmSpec) -> Result<f64, AnalysisError> {
    let (lo, hi) = d.support();
    let integrand = |t: f64| {
        let (ln_f, l_sf_kw, cdf_kw) = kw_parts(d, t);
        let mut ln = ln_f + spec.r as f64 * l_sf_kw;
        if spec.p > 0 {
            ln += spec.p as f64 * t.ln();
        }
        let v = ln.exp();
        if spec.q > 0 {
            v * cdf_kw.powi(spec.q as i32)
        } else {
            v
        }
    };
    Ok(integrate(integrand, lo, hi, spec.tol)?.value)
}

/// s-th raw moment: quadrature of t^s f(t), or the kappa/eta-weighted PWM
/// series.
pub fn moment(
    d: &MokwDistribution,
    s: u32,
    method: EvalMethod,
    trunc: usize,
) -> Result<f64, AnalysisError> {
    match method {
        EvalMethod::Direct => {
            let (lo, hi) = d.support();
            let integrand = |t: f64| {
                let lp = d.log_pdf(t);
                if lp == f64::NEG_INFINITY {
                    0.0
                } else {
                    (lp + s as f64 * t.ln()).exp()
                }
            };
            Ok(integrate(integrand, lo, hi, 1e-10)?.value)
        }
        EvalMethod::Series => {
            let alpha = d.alpha();
            if alpha == 1.0 {
                return pwm(d, &PwmSpec::orders(s, 0, 0));
            }
            let mut sum = 0.0;
            let mut weight_scale: f64 = 0.0;
            for j in 0..=trunc {
                let (w, gamma) = if alpha < 1.0 {
                    let w = (j as f64 + 1.0) * alpha * (1.0 - alpha).powi(j as i32);
                    (w, pwm(d, &PwmSpec { p: s, q: 0, r: j as u32, trunc, tol: 1e-11 })?)
                } else {
                    let w = (j as f64 + 1.0) / alpha * (1.0 - 1.0 / alpha).powi(j as i32);
                    (w, pwm(d, &PwmSpec { p: s, q: j as u32, r: 0, trunc, tol: 1e-11 })?)
                };
                let term = w * gamma;
                sum += term;
                weight_scale = weight_scale.max(term.abs());
                if j > 3 && term.abs() < 1e-12 * sum.abs().max(weight_scale) {
                    break;
                }
            }
            Ok(sum)
        }
    }
}

/// Cross-check route for alpha in (0,1): the phi double sum
/// E[T^s] = sum_j sum_k phi_{j,k} Gamma_{s, j-k, 0}, regrouped by the cdf
/// power q = j-k so each distinct PWM is integrated once.
pub fn moment_series_phi(d: &MokwDistribution, s: u32, trunc: usize) -> Result<f64, AnalysisError> {
    let alpha = d.alpha();
    if !(alpha < 1.0) {
        return Err(AnalysisError::SeriesBranch(alpha));
    }
    let phi = SeriesCoefficients::phi(alpha, trunc);
    let mut by_power = vec![0.0; trunc + 1];
    for j in 0..=trunc {
        for k in 0..=j {
            by_power[j - k] += phi.get2(j, k);
        }
    }
    let mut sum = 0.0;
    for (q, w) in by_power.iter().enumerate() {
        if w.abs() < 1e-16 {
            continue;
        }
        let gamma = pwm(d, &PwmSpec { p: s, q: q as u32, r: 0, trunc, tol: 1e-11 })?;
        sum += w * gamma;
    }
    Ok(sum)
}

/// Moment generating function E[e^{sT}]. The series route (alpha > 1) sums
/// eta'_j times the mgf of the exponentiated Kw-G distribution with power j+1.
pub fn mgf(
    d: &MokwDistribution,
    s: f64,
    method: EvalMethod,
    trunc: usize,
) -> Result<f64, AnalysisError> {
    if s == 0.0 {
        return Ok(1.0);
    }
    match method {
        EvalMethod::Direct => {
            let (lo, hi) = d.support();
            let integrand = |t: f64| {
                let lp = d.log_pdf(t);
                if lp == f64::NEG_INFINITY {
                    0.0
                } else {
                    (lp + s * t).exp()
                }
            };
            Ok(integrate(integrand, lo, hi, 1e-10)?.value)
        }
        EvalMethod::Series => {
            let alpha = d.alpha();
            if alpha <= 1.0 {
                return Err(AnalysisError::SeriesBranch(alpha));
            }
            let (lo, hi) = d.support();
            let r = 1.0 - 1.0 / alpha;
            let mut sum = 0.0;
            let mut geo = 1.0 / alpha;
            for j in 0..=trunc {
                // mgf of the exponentiated Kw-G with cdf [F^KwG]^{j+1}
                let m_x = integrate(
                    |t: f64| {
                        let (ln_f, _, cdf_kw) = kw_parts(d, t);
                        let v = (ln_f + s * t).exp() * (j as f64 + 1.0);
                        if j > 0 {
                            v * cdf_kw.powi(j as i32)
                        } else {
                            v
                        }
                    },
                    lo,
                    hi,
                    1e-11,
                )?
                .value;
                let term = geo * m_x;
                sum += term;
                if j > 3 && term.abs() < 1e-12 * sum.abs() {
                    break;
                }
                geo *= r;
            }
            Ok(sum)
        }
    }
}

/// Renyi entropy (1-delta)^{-1} log integral f^delta.
pub fn renyi_entropy(
    d: &MokwDistribution,
    delta: f64,
    method: EvalMethod,
    trunc: usize,
) -> Result<f64, AnalysisError> {
    if !(delta > 0.0) || delta == 1.0 {
        return Err(AnalysisError::InvalidDelta(delta));
    }
    let (lo, hi) = d.support();
    let integral = match method {
        EvalMethod::Direct => {
            integrate(
                |t: f64| {
                    let lp = d.log_pdf(t);
                    if lp == f64::NEG_INFINITY {
                        0.0
                    } else {
                        (delta * lp).exp()
                    }
                },
                lo,
                hi,
                1e-11,
            )?
            .value
        }
        EvalMethod::Series => {
            let alpha = d.alpha();
            let ln_gamma_2d = ln_gamma(2.0 * delta);
            let mut sum = 0.0;
            for j in 0..=trunc {
                let (weight, kw_power_is_sf) = if alpha < 1.0 {
                    // q_j = alpha^delta (1-alpha)^j Gamma(2 delta + j)/(Gamma(2 delta) j!)
                    let ln_w = delta * alpha.ln()
                        + j as f64 * (1.0 - alpha).ln()
                        + ln_gamma(2.0 * delta + j as f64)
                        - ln_gamma_2d
                        - ln_gamma(j as f64 + 1.0);
                    (ln_w.exp(), true)
                } else if alpha > 1.0 {
                    // r_j = (alpha-1)^j Gamma(2 delta + j)/(alpha^{delta+j} Gamma(2 delta) j!)
                    let ln_w = j as f64 * (alpha - 1.0).ln()
                        - (delta + j as f64) * alpha.ln()
                        + ln_gamma(2.0 * delta + j as f64)
                        - ln_gamma_2d
                        - ln_gamma(j as f64 + 1.0);
                    (ln_w.exp(), false)
                } else {
                    // alpha = 1: exact single Kw-G term
                    if j > 0 {
                        break;
                    }
                    (1.0, true)
                };
                let piece = integrate(
                    |t: f64| {
                        let (ln_f, l_sf_kw, cdf_kw) = kw_parts(d, t);
                        let v = (delta * ln_f
                            + if kw_power_is_sf { j as f64 * l_sf_kw } else { 0.0 })
                        .exp();
                        if !kw_power_is_sf && j > 0 {
                            v * cdf_kw.powi(j as i32)
                        } else {
                            v
                        }
                    },
                    lo,
                    hi,
                    1e-12,
                )?
                .value;
                let term = weight * piece;
                sum += term;
                if j > 3 && term.abs() < 1e-12 * sum.abs() {
                    break;
                }
            }
            sum
        }
    };
    if !(integral.is_finite() && integral > 0.0) {
        return Err(AnalysisError::NonConvergent(QuadError::NonFinite { at: lo }));
    }
    Ok(integral.ln() / (1.0 - delta))
}

/// Stochastic-ordering flags between two members differing only in alpha.
#[derive(Debug, Clone, Copy)]
pub struct OrderReport {
    /// pdf ratio f1/f2 nonincreasing on the grid
    pub lr_monotone: bool,
    /// sf1 <= sf2 pointwise
    pub sf_dominance: bool,
    /// sf ratio sf1/sf2 nonincreasing
    pub hr_monotone: bool,
}

pub fn check_stochastic_order(
    d1: &MokwDistribution,
    d2: &MokwDistribution,
    grid: &[f64],
) -> Result<OrderReport, AnalysisError> {
    if d1.base() != d2.base() || d1.a() != d2.a() || d1.b() != d2.b() {
        return Err(AnalysisError::MismatchedShapes);
    }
    const SLACK: f64 = 1e-9;
    let mut lr = true;
    let mut st = true;
    let mut hr = true;
    let mut prev_lr: Option<f64> = None;
    let mut prev_hr: Option<f64> = None;
    for &t in grid {
        let ratio_pdf = (d1.log_pdf(t) - d2.log_pdf(t)).exp();
        let sf1 = d1.sf(t);
        let sf2 = d2.sf(t);
        if sf1 > sf2 + SLACK {
            st = false;
        }
        let ratio_sf = (d1.log_sf(t) - d2.log_sf(t)).exp();
        if let Some(p) = prev_lr {
            if ratio_pdf > p * (1.0 + SLACK) + SLACK {
                lr = false;
            }
        }
        if let Some(p) = prev_hr {
            if ratio_sf > p * (1.0 + SLACK) + SLACK {
                hr = false;
            }
        }
        prev_lr = Some(ratio_pdf);
        prev_hr = Some(ratio_sf);
    }
    Ok(OrderReport { lr_monotone: lr, sf_dominance: st, hr_monotone: hr })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baseline::BaselineModel;

    fn dist(alpha: f64, a: f64, b: f64) -> MokwDistribution {
        MokwDistribution::new(BaselineModel::exponential(1.0).unwrap(), alpha, a, b).unwrap()
    }

    #[test]
    fn kappa_weights_and_sum() {
        let alpha = 0.5;
        let k = SeriesCoefficients::kappa(alpha, 400);
        assert_eq!(k.get(0), alpha); // kappa_0 = alpha
        // geometric identities: sum kappa_j = 1/alpha, and the mixture
        // weights kappa_j/(j+1) = -kappa'_j sum to one
        let bound = (1.0f64 - alpha).powi(400) * 402.0 + 1e-12;
        let total: f64 = k.weights().iter().sum();
        assert!((total - 1.0 / alpha).abs() < bound);
        let mixture: f64 =
            k.weights().iter().enumerate().map(|(j, w)| w / (j as f64 + 1.0)).sum();
        assert!((mixture - 1.0).abs() < bound);
        let kp = SeriesCoefficients::kappa_prime(alpha, 400);
        for j in 0..=400 {
            assert!((kp.get(j) + k.get(j) / (j as f64 + 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn c_prime_head_is_one() {
        for &alpha in &[1.5, 2.0, 10.0] {
            assert_eq!(SeriesCoefficients::c_prime(alpha, 4).get(0), 1.0);
        }
    }

    #[test]
    fn eta_formulas() {
        let e = SeriesCoefficients::eta(2.0, 8);
        let ep = SeriesCoefficients::eta_prime(2.0, 8);
        for j in 0..=8 {
            let expect = (j as f64 + 1.0) / 2.0 * 0.5f64.powi(j as i32);
            assert!((e.get(j) - expect).abs() < 1e-15);
            assert!((ep.get(j) - expect / (j as f64 + 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn power_series_recursion_matches_negative_binomial() {
        // (sum_k rho^k x^k)^m has coefficients C(m+k-1, k) rho^k
        let rho: f64 = 0.45;
        let c: Vec<f64> = (0..12).map(|k| rho.powi(k)).collect();
        for m in 1..5usize {
            let d = SeriesCoefficients::power_series(&c, m, 2.0);
            for k in 0..12usize {
                let expect = binomial(m + k - 1, k) * rho.powi(k as i32);
                assert!(
                    (d.get(k) - expect).abs() < 1e-12 * expect.abs().max(1.0),
                    "m={m} k={k}: {} vs {expect}",
                    d.get(k)
                );
            }
        }
    }

    #[test]
    fn pdf_series_first_term_is_alpha_times_kwg() {
        // J = 0 partial sum: kappa_0 = alpha
        let d = dist(0.5, 1.0, 1.0);
        let t = 0.9;
        let (ln_f, _, _) = kw_parts(&d, t);
        assert!((pdf_series(&d, t, 0) - 0.5 * ln_f.exp()).abs() < 1e-15);
    }

    #[test]
    fn pdf_series_converges_both_branches() {
        for &alpha in &[0.5, 2.0] {
            let d = dist(alpha, 2.0, 3.0);
            let direct = d.pdf(0.5);
            let series = pdf_series(&d, 0.5, 200);
            assert!((series - direct).abs() < 1e-8, "alpha={alpha}: {series} vs {direct}");
        }
    }

    #[test]
    fn sf_series_converges() {
        let d = MokwDistribution::new(BaselineModel::weibull(1.0, 2.0).unwrap(), 0.5, 2.0, 3.0)
            .unwrap();
        assert!((sf_series(&d, 1.0, 200) - d.sf(1.0)).abs() < 1e-8);
        let d2 = MokwDistribution::new(BaselineModel::weibull(1.0, 2.0).unwrap(), 2.0, 2.0, 3.0)
            .unwrap();
        assert!((sf_series(&d2, 1.0, 200) - d2.sf(1.0)).abs() < 1e-8);
    }

    #[test]
    fn order_statistic_single_draw_is_pdf() {
        let d = dist(0.5, 2.0, 2.0);
        for &t in &[0.2, 0.8, 1.7] {
            let f = order_statistic_pdf(&d, 1, 1, t, EvalMethod::Direct, 0).unwrap();
            assert!((f - d.pdf(t)).abs() < 1e-14);
        }
    }

    #[test]
    fn order_statistic_index_error() {
        let d = dist(0.5, 2.0, 2.0);
        assert!(order_statistic_pdf(&d, 0, 3, 0.5, EvalMethod::Direct, 0).is_err());
        assert!(order_statistic_pdf(&d, 4, 3, 0.5, EvalMethod::Direct, 0).is_err());
    }

    #[test]
    fn order_statistic_series_matches_direct() {
        for &alpha in &[0.5, 2.0] {
            let d = dist(alpha, 2.0, 2.0);
            for &(i, n) in &[(1usize, 3usize), (2, 5)] {
                for &t in &[0.3, 0.7, 1.5] {
                    let direct = order_statistic_pdf(&d, i, n, t, EvalMethod::Direct, 0).unwrap();
                    let series = order_statistic_pdf(&d, i, n, t, EvalMethod::Series, 300).unwrap();
                    assert!(
                        (series - direct).abs() < 1e-6 * direct.max(1.0),
                        "alpha={alpha} i={i} n={n} t={t}: {series} vs {direct}"
                    );
                }
            }
        }
    }

    #[test]
    fn pwm_identities() {
        let d = dist(0.7, 1.0, 1.0);
        assert!((pwm(&d, &PwmSpec::orders(0, 0, 0)).unwrap() - 1.0).abs() < 1e-9);
        assert!((pwm(&d, &PwmSpec::orders(1, 0, 0)).unwrap() - 1.0).abs() < 1e-9);
        // integral of t e^{-2t} = 1/4
        assert!((pwm(&d, &PwmSpec::orders(1, 0, 1)).unwrap() - 0.25).abs() < 1e-9);
    }

    #[test]
    fn moment_identity_case() {
        let d = MokwDistribution::new(BaselineModel::exponential(2.0).unwrap(), 1.0, 1.0, 1.0)
            .unwrap();
        assert!((moment(&d, 1, EvalMethod::Direct, 0).unwrap() - 0.5).abs() < 1e-9);
        assert!((moment(&d, 1, EvalMethod::Series, 300).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn mgf_point_values() {
        let d = dist(1.0, 1.0, 1.0);
        assert_eq!(mgf(&d, 0.0, EvalMethod::Direct, 0).unwrap(), 1.0);
        assert!((mgf(&d, 0.5, EvalMethod::Direct, 0).unwrap() - 2.0).abs() < 1e-8);
    }

    #[test]
    fn mgf_divergence_is_error() {
        let d = MokwDistribution::new(BaselineModel::frechet(1.5, 1.0).unwrap(), 1.0, 1.0, 1.0)
            .unwrap();
        assert!(mgf(&d, 0.5, EvalMethod::Direct, 0).is_err());
    }

    #[test]
    fn renyi_exponential_reference() {
        // Renyi entropy of Exp(1) at delta: log(delta)/(delta-1)
        let d = dist(1.0, 1.0, 1.0);
        let v = renyi_entropy(&d, 2.0, EvalMethod::Direct, 0).unwrap();
        assert!((v - std::f64::consts::LN_2).abs() < 1e-8);
    }

    #[test]
    fn renyi_invalid_delta() {
        let d = dist(1.0, 1.0, 1.0);
        assert!(renyi_entropy(&d, 1.0, EvalMethod::Direct, 0).is_err());
        assert!(renyi_entropy(&d, -0.5, EvalMethod::Direct, 0).is_err());
    }

    #[test]
    fn stochastic_order_flags() {
        let grid: Vec<f64> = (1..=200).map(|i| i as f64 * 0.025).collect();
        let lo = dist(0.5, 2.0, 2.0);
        let hi = dist(2.0, 2.0, 2.0);
        let r = check_stochastic_order(&lo, &hi, &grid).unwrap();
        assert!(r.lr_monotone && r.sf_dominance && r.hr_monotone);
        let rev = check_stochastic_order(&hi, &lo, &grid).unwrap();
        assert!(!rev.lr_monotone);
        let eq = check_stochastic_order(&lo, &lo, &grid).unwrap();
        assert!(eq.lr_monotone && eq.sf_dominance && eq.hr_monotone);
    }

    #[test]
    fn mismatched_shapes_rejected() {
        let d1 = dist(0.5, 2.0, 2.0);
        let d2 = dist(2.0, 2.5, 2.0);
        assert!(check_stochastic_order(&d1, &d2, &[0.5, 1.0]).is_err());
    }
}
