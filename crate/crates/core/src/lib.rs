//! Gauss-Weierstrass integrals of positive measures on ℝⁿ and the boundary
//! behaviour of the resulting heat solutions: symmetric and strong
//! derivatives, maximal functions, and limits along parabolic regions.

// `!(a < b)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod derivative;
pub mod error;
pub mod geometry;
pub mod heat;
pub mod limit;
pub mod measure;
pub mod parabolic;
pub mod quad;
pub mod settings;
pub mod special;
pub mod testfn;

pub use derivative::{
    hl_maximal, one_d_beta_derivative, parabolic_maximal, sandwich_check, sandwich_constant, strong_derivative,
    symmetric_derivative, BallFamily, BetaReport, DerivativeReport, MaximalReport, SandwichReport, Verdict,
};
pub use error::{Error, Result};
pub use geometry::{unit_ball_volume, Ball, Interval, Point};
pub use heat::{gw_eval, gw_eval_rel, heat_kernel, HeatField, SpaceTimePoint};
pub use limit::{LimitEstimate, LimitRule, LimitStatus};
pub use measure::{ClassMCertificate, Contraction, Estimate, Measure, Primitive, SelfSimilar, Term};
pub use parabolic::{
    parabolic_limit, ray_limit, two_ray_test, ParabolicRay, ParabolicRegion, RegionLimitReport, SliceRange, TwoRayReport,
};
pub use settings::Settings;
pub use testfn::{duality_check, uniform_ratio_error, DualityReport, TestFunction, UniformRatioReport};
