//! Funk, Thompson and Hilbert geometry of convex bodies, with sharp
//! variation bounds for bounded convex functions.

pub mod bounds;
pub mod error;
pub mod extremal;
pub mod gauge;
pub mod geometry;
pub mod metrics;
pub mod oracles;
pub mod rng;
pub mod selftest;
pub mod vector;

pub use bounds::{
    certify, lipschitz_certificates, metric_form_bounds, variation_bounds, BoundReport,
    BoundedConvexFn, BoundsInterval, FnWithRange, LipschitzCertificate, MetricFormBounds, TOL_CERT,
};
pub use error::{Error, Result};
pub use extremal::{attainment_check, build_extremal, sigma, Attainment, ExtremalFn, Orientation};
pub use gauge::{
    gauge_value, max_subdiff_contains, max_subdiff_hrep, subgradient_of_max_affine, GaugeFn,
    SubdiffMembership,
};
pub use geometry::{
    boundary_point_b, contains, ray_exit, sample_interior, support_function, support_point, tau,
    BodyKind, ConvexBody, RayExitResult,
};
pub use metrics::{distance_matrix, funk, hilbert, metric, thompson, Metric, MetricValue};
pub use oracles::{
    hilbert_cross_ratio_oracle, random_body, random_convex_fn, tau_bisection_oracle, AffinePiece,
    PiecewiseAffineConvexFn, PiecewiseAffineSpec,
};
pub use selftest::{run_selftest, Check, SelftestReport};
pub use vector::{ExtReal, Vector};
