//! Marshall-Olkin Kumaraswamy-G (MOKw-G) distributions.
//!
//! A MOKw-G distribution composes two unit-interval transforms over a
//! baseline cdf G: the Kumaraswamy map `u -> 1 - (1 - u^a)^b` first, then the
//! Marshall-Olkin tilt `u -> u / (alpha + (1-alpha) u)`. The crate provides
//!
//! * ten ready-made baselines ([`baseline::BaselineModel`]),
//! * the transforms and their composition ([`transform`]),
//! * exact evaluation, sampling and shape analysis of the family
//!   ([`family::MokwDistribution`]),
//! * series expansions, moments, entropy and stochastic ordering
//!   ([`analysis`]),
//! * maximum-likelihood and method-of-moments fitting with observed-information
//!   standard errors ([`estimation`]),
//! * information criteria and model comparison, including the reversed
//!   KwMO-G composition ([`selection`]).
//!
//! ```
//! use mokw::baseline::BaselineModel;
//! use mokw::family::MokwDistribution;
//!
//! let d = MokwDistribution::new(
//!     BaselineModel::exponential(1.0).unwrap(),
//!     2.0, // tilt
//!     2.0, // Kumaraswamy a
//!     3.0, // Kumaraswamy b
//! )
//! .unwrap();
//! let t = d.quantile(0.5).unwrap();
//! assert!((d.cdf(t) - 0.5).abs() < 1e-12);
//! ```

pub mod analysis;
pub mod baseline;
pub mod estimation;
pub mod family;
pub mod quad;
pub mod selection;
pub mod special;
pub mod transform;

pub use baseline::BaselineModel;
pub use estimation::{fit_mle, FamilyKind, FamilySpec, FitOptions, FitResult};
pub use family::MokwDistribution;
pub use selection::{compare, criteria, kwmo_distribution};

// The guide chapters double as doctests so the book stays in sync with the
// code it describes.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/baselines.md")]
    mod baselines {}
    #[doc = include_str!("../../../book/src/transforms.md")]
    mod transforms {}
    #[doc = include_str!("../../../book/src/family.md")]
    mod family {}
    #[doc = include_str!("../../../book/src/analysis.md")]
    mod analysis {}
    #[doc = include_str!("../../../book/src/estimation.md")]
    mod estimation {}
    #[doc = include_str!("../../../book/src/selection.md")]
    mod selection {}
}
