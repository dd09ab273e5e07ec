//! The MOKw-G distribution: a Marshall-Olkin tilt applied to a
//! Kumaraswamy-transformed baseline.
//!
//! Closed forms used here, with G the baseline cdf, abar = 1 - alpha and
//! S(t) = [1 - G(t)^a]^b:
//!
//! pdf   alpha a b g G^{a-1} (1-G^a)^{b-1} / [1 - abar S]^2
//! cdf   (1 - S) / (1 - abar S)
//! sf    alpha S / (1 - abar S)
//! hrf   a b g G^{a-1} (1-G^a)^{-1} / (1 - abar S)
//!
//! Everything is evaluated in log space; the survival side is computed first
//! and the cdf is its exact complement, which keeps the upper tail accurate
//! for quantile round-trips at p near 1.

use crate::baseline::{BaselineError, BaselineModel};
use crate::special::ln_1m_exp;
use crate::transform::{KwMap, MoTilt, Transform, TransformChain, UnitTransform};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("parameter {name} must be finite and > 0, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("probability level must lie in (0,1), got {0}")]
    ProbabilityOutOfRange(f64),
    #[error("the genesis construction is degenerate at alpha = 1 (N is identically 1)")]
    DegenerateAlpha,
    #[error("grid bounds must satisfy lo < hi inside the support, got [{lo}, {hi}]")]
    BadGrid { lo: f64, hi: f64 },
    #[error(transparent)]
    Baseline(#[from] BaselineError),
}

/// Intermediate log-scale quantities shared by all the closed forms.
struct LogParts {
    ln_g: f64,     // log baseline pdf
    l_cdf: f64,    // log G
    l_b: f64,      // log(1 - G^a)
    l_s: f64,      // log S = b log(1 - G^a)
    ln_d: f64,     // log(1 - abar S)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MokwDistribution {
    base: BaselineModel,
    alpha: f64,
    a: f64,
    b: f64,
}

impl MokwDistribution {
    pub fn new(base: BaselineModel, alpha: f64, a: f64, b: f64) -> Result<Self, FamilyError> {
        for (name, v) in [("alpha", alpha), ("a", a), ("b", b)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(FamilyError::InvalidParameter { name, value: v });
            }
        }
        Ok(MokwDistribution { base, alpha, a, b })
    }

    pub fn base(&self) -> &BaselineModel {
        &self.base
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn support(&self) -> (f64, f64) {
        self.base.support()
    }

    /// The same distribution as an explicit transform chain (Kw innermost,
    /// MO outermost); used to cross-check the closed forms structurally.
    pub fn to_composed(&self) -> crate::transform::ComposedDistribution {
        TransformChain::new(vec![
            Transform::Kw(KwMap::new(self.a, self.b).expect("validated")),
            Transform::Mo(MoTilt::new(self.alpha).expect("validated")),
        ])
        .compose(self.base.clone())
    }

    fn parts(&self, t: f64) -> LogParts {
        let l_cdf = self.base.log_cdf(t);
        let l_a = self.a * l_cdf;
        // Near G = 1 the direct log(1 - G^a) loses its argument; switch to the
        // survival side where 1 - G^a = a(1-G)(1 + O(1-G)).
        let l_b = if l_a >= -1e-305 {
            let l_sf = self.base.log_sf(t);
            self.a.ln() + l_sf + (-(self.a - 1.0) * 0.5 * l_sf.exp()).ln_1p()
        } else {
            ln_1m_exp(l_a)
        };
        let l_s = self.b * l_b;
        let abar = 1.0 - self.alpha;
        let ln_d = if l_s == f64::NEG_INFINITY {
            0.0
        } else {
            (-abar * l_s.exp()).ln_1p()
        };
        LogParts { ln_g: self.base.log_pdf(t), l_cdf, l_b, l_s, ln_d }
    }

    pub fn log_pdf(&self, t: f64) -> f64 {
        let (lo, hi) = self.support();
        if t <= lo || t >= hi || t.is_nan() {
            return f64::NEG_INFINITY;
        }
        let p = self.parts(t);
        let mut acc = self.alpha.ln() + self.a.ln() + self.b.ln() + p.ln_g - 2.0 * p.ln_d;
        if self.a != 1.0 {
            acc += (self.a - 1.0) * p.l_cdf;
        }
        if self.b != 1.0 {
            acc += (self.b - 1.0) * p.l_b;
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

    /// log survival function computed from the survival closed form.
    pub fn log_sf(&self, t: f64) -> f64 {
        let (lo, hi) = self.support();
        if t <= lo {
            return 0.0;
        }
        if t >= hi {
            return f64::NEG_INFINITY;
        }
        let p = self.parts(t);
        self.alpha.ln() + p.l_s - p.ln_d
    }

    pub fn sf(&self, t: f64) -> f64 {
        self.log_sf(t).exp()
    }

    /// cdf as the exact complement of the survival form, so cdf + sf = 1
    /// holds identically.
    pub fn cdf(&self, t: f64) -> f64 {
        1.0 - self.sf(t)
    }

    /// Hazard rate pdf/sf.
    pub fn hrf(&self, t: f64) -> f64 {
        let (lo, hi) = self.support();
        if t <= lo || t >= hi {
            return 0.0;
        }
        (self.log_pdf(t) - self.log_sf(t)).exp()
    }

    /// Reversed hazard rate pdf/cdf; +inf where the cdf is zero.
    pub fn rhrf(&self, t: f64) -> f64 {
        let c = self.cdf(t);
        if c == 0.0 {
            return f64::INFINITY;
        }
        self.pdf(t) / c
    }

    /// Cumulative hazard -log sf.
    pub fn chrf(&self, t: f64) -> f64 {
        -self.log_sf(t)
    }

    /// Quantile by inverting the tilt, then the Kumaraswamy map, then the
    /// baseline.
    pub fn quantile(&self, p: f64) -> Result<f64, FamilyError> {
        if !(p > 0.0 && p < 1.0) {
            return Err(FamilyError::ProbabilityOutOfRange(p));
        }
        let abar = 1.0 - self.alpha;
        // inner Kw-G cdf level v = alpha p / (1 - abar p); 1 - v = (1-p)/(1 - abar p)
        let ln_one_minus_v = (-p).ln_1p() - (-abar * p).ln_1p();
        let ln_w = ln_one_minus_v / self.b;
        let u = (ln_1m_exp(ln_w) / self.a).exp();
        Ok(self.base.quantile(u)?)
    }

    /// n inversion-method draws, deterministic in the seed.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(n, &mut rng)
    }

    pub fn sample_with<R: Rng>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        (0..n)
            .map(|_| {
                let u = draw_open_unit(rng);
                self.quantile(u).expect("u in (0,1)")
            })
            .collect()
    }

    /// Monte-Carlo check of the geometric min/max genesis: for alpha in (0,1)
    /// the distribution is the minimum of N iid Kw-G draws with N geometric
    /// (success alpha); for alpha > 1 the maximum with parameter 1/alpha.
    /// Compares the empirical survival function against the closed form on an
    /// interior quantile grid.
    pub fn verify_genesis(&self, n_trials: usize, seed: u64) -> Result<GenesisReport, FamilyError> {
        if self.alpha == 1.0 {
            return Err(FamilyError::DegenerateAlpha);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kw = KwMap::new(self.a, self.b).expect("validated");
        let take_min = self.alpha < 1.0;
        let geo_ln = if take_min {
            (1.0 - self.alpha).ln()
        } else {
            (1.0 - 1.0 / self.alpha).ln()
        };
        let grid: Vec<f64> = (1..20)
            .map(|i| self.quantile(i as f64 / 20.0).expect("interior"))
            .collect();
        let mut exceed = vec![0usize; grid.len()];
        for _ in 0..n_trials {
            let u = draw_open_unit(&mut rng);
            let n = (u.ln() / geo_ln).ceil().max(1.0) as usize;
            let mut extreme = f64::NAN;
            for _ in 0..n {
                let v = draw_open_unit(&mut rng);
                let x = self
                    .base
                    .quantile(kw.invert(v))
                    .expect("v in (0,1)");
                extreme = if extreme.is_nan() {
                    x
                } else if take_min {
                    extreme.min(x)
                } else {
                    extreme.max(x)
                };
            }
            for (i, &g) in grid.iter().enumerate() {
                if extreme > g {
                    exceed[i] += 1;
                }
            }
        }
        let mut sup_deviation: f64 = 0.0;
        let mut points = Vec::with_capacity(grid.len());
        for (i, &g) in grid.iter().enumerate() {
            let emp = exceed[i] as f64 / n_trials as f64;
            let exact = self.sf(g);
            sup_deviation = sup_deviation.max((emp - exact).abs());
            points.push(GenesisPoint { t: g, empirical_sf: emp, exact_sf: exact });
        }
        Ok(GenesisReport { sup_deviation, points, n_trials })
    }

    /// Ratios of pdf and hrf to their boundary asymptotes, on baseline
    /// quantile sequences approaching each end of the support.
    ///
    /// Toward the lower end both f and h behave like a b g G^{a-1} / alpha;
    /// toward the upper end f ~ alpha a b g (1-G^a)^{b-1} and
    /// h ~ a b g (1-G^a)^{-1}.
    pub fn asymptote_check(&self) -> AsymptoteReport {
        let ln_ab = self.a.ln() + self.b.ln();
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        for k in 1..=6 {
            let eps = 10f64.powi(-k);
            if let Ok(t) = self.base.quantile(eps) {
                let p = self.parts(t);
                let ln_asym = ln_ab + p.ln_g + (self.a - 1.0) * p.l_cdf - self.alpha.ln();
                let ratio_f = (self.log_pdf(t) - ln_asym).exp();
                let ratio_h = ((self.log_pdf(t) - self.log_sf(t)) - ln_asym).exp();
                lower.push(AsymptotePoint { t, pdf_ratio: ratio_f, hrf_ratio: ratio_h });
            }
            if let Ok(t) = self.base.quantile(1.0 - eps) {
                let p = self.parts(t);
                let ln_asym_f = self.alpha.ln() + ln_ab + p.ln_g + (self.b - 1.0) * p.l_b;
                let ln_asym_h = ln_ab + p.ln_g - p.l_b;
                let ratio_f = (self.log_pdf(t) - ln_asym_f).exp();
                let ratio_h = ((self.log_pdf(t) - self.log_sf(t)) - ln_asym_h).exp();
                upper.push(AsymptotePoint { t, pdf_ratio: ratio_f, hrf_ratio: ratio_h });
            }
        }
        AsymptoteReport { lower, upper }
    }

    /// d/dt log f(t): the stationary-point equation of the density.
    pub fn dlog_pdf_dt(&self, t: f64) -> f64 {
        let p = self.parts(t);
        let abar = 1.0 - self.alpha;
        let g_over_cap = (p.ln_g - p.l_cdf).exp(); // g/G
        let ratio_b = (p.ln_g + (self.a - 1.0) * p.l_cdf - p.l_b).exp(); // g G^{a-1}/(1-G^a)
        let tilt = (p.ln_g + (self.a - 1.0) * p.l_cdf + (self.b - 1.0) * p.l_b - p.ln_d).exp();
        self.base.dlog_pdf_dt(t) + (self.a - 1.0) * g_over_cap
            + self.a * (1.0 - self.b) * ratio_b
            - 2.0 * abar * self.a * self.b * tilt
    }

    /// d/dt log h(t): the stationary-point equation of the hazard rate.
    pub fn dlog_hrf_dt(&self, t: f64) -> f64 {
        let p = self.parts(t);
        let abar = 1.0 - self.alpha;
        let g_over_cap = (p.ln_g - p.l_cdf).exp();
        let ratio_b = (p.ln_g + (self.a - 1.0) * p.l_cdf - p.l_b).exp();
        let tilt = (p.ln_g + (self.a - 1.0) * p.l_cdf + (self.b - 1.0) * p.l_b - p.ln_d).exp();
        self.base.dlog_pdf_dt(t) + (self.a - 1.0) * g_over_cap + self.a * ratio_b
            - abar * self.a * self.b * tilt
    }

    /// Scan d log f/dt or d log h/dt for sign changes on a log-spaced grid,
    /// refine each bracketed root by bisection, and classify it through the
    /// central-difference second derivative.
    pub fn critical_points(
        &self,
        target: CriticalTarget,
        t_lo: f64,
        t_hi: f64,
        grid_n: usize,
    ) -> Result<CriticalPointReport, FamilyError> {
        let (lo, hi) = self.support();
        if !(t_lo < t_hi && t_lo > lo && t_hi < hi) || grid_n < 2 {
            return Err(FamilyError::BadGrid { lo: t_lo, hi: t_hi });
        }
        let slope = |t: f64| match target {
            CriticalTarget::Density => self.dlog_pdf_dt(t),
            CriticalTarget::Hazard => self.dlog_hrf_dt(t),
        };
        let ln_lo = t_lo.ln();
        let step = (t_hi.ln() - ln_lo) / (grid_n - 1) as f64;
        let grid: Vec<f64> = (0..grid_n).map(|i| (ln_lo + step * i as f64).exp()).collect();
        let values: Vec<f64> = grid.iter().map(|&t| slope(t)).collect();

        let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let base_scale = grid
            .iter()
            .fold(0.0f64, |m, &t| m.max(self.base.dlog_pdf_dt(t).abs()))
            .max(1.0);
        if scale <= 1e-9 * base_scale {
            return Ok(CriticalPointReport {
                roots: Vec::new(),
                degenerate_constant: true,
                t_lo,
                t_hi,
                grid_n,
            });
        }

        let mut roots = Vec::new();
        for w in 0..grid_n - 1 {
            let (ta, tb) = (grid[w], grid[w + 1]);
            let (fa, fb) = (values[w], values[w + 1]);
            if fa == 0.0 {
                continue; // grid point exactly on a root: rare, the bracket on the other side catches it
            }
            if (fa > 0.0) != (fb > 0.0) {
                let root = crate::quad::bisect(slope, ta, tb, 1e-10, 200);
                let h = (1e-6f64).max(1e-6 * root.abs());
                let psi = (slope(root + h) - slope(root - h)) / (2.0 * h);
                let class = if psi < -1e-7 {
                    Classification::Maximum
                } else if psi > 1e-7 {
                    Classification::Minimum
                } else {
                    Classification::Inflexion
                };
                roots.push(CriticalPoint { t: root, class, curvature: psi });
            }
        }
        Ok(CriticalPointReport { roots, degenerate_constant: false, t_lo, t_hi, grid_n })
    }
}

fn draw_open_unit<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            return u;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalTarget {
    Density,
    Hazard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Maximum,
    Minimum,
    Inflexion,
}

#[derive(Debug, Clone, Copy)]
pub struct CriticalPoint {
    pub t: f64,
    pub class: Classification,
    pub curvature: f64,
}

#[derive(Debug, Clone)]
pub struct CriticalPointReport {
    pub roots: Vec<CriticalPoint>,
    pub degenerate_constant: bool,
    pub t_lo: f64,
    pub t_hi: f64,
    pub grid_n: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct GenesisPoint {
    pub t: f64,
    pub empirical_sf: f64,
    pub exact_sf: f64,
}

#[derive(Debug, Clone)]
pub struct GenesisReport {
    pub sup_deviation: f64,
    pub points: Vec<GenesisPoint>,
    pub n_trials: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct AsymptotePoint {
    pub t: f64,
    pub pdf_ratio: f64,
    pub hrf_ratio: f64,
}

#[derive(Debug, Clone)]
pub struct AsymptoteReport {
    pub lower: Vec<AsymptotePoint>,
    pub upper: Vec<AsymptotePoint>,
}
