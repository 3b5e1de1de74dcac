//! Tukey half-space depth and depth-based comparison of multivariate
//! distributions.
//!
//! The crate provides
//!
//! * exact and approximate half-space depth ([`depth`]),
//! * the data-depth discrepancy `D_F(x) - D_G(x)` and its plot records with
//!   two-sigma bands ([`discrepancy`]),
//! * Kolmogorov-Smirnov and Cramér-von Mises type statistics built on the
//!   discrepancy, for goodness of fit and for two samples, with bootstrap
//!   p-values ([`hypothesis`]),
//! * a Monte Carlo harness for size and power studies ([`simulation`]),
//! * CSV / JSON / SVG input and output and the `ddd` command line ([`io`],
//!   [`cli`]).
//!
//! All randomness flows through [`rng::StreamRng`], addressed by
//! `(seed, stream)`, so results do not depend on thread count.

pub mod cli;
pub mod data;
pub mod datasets;
pub mod depth;
pub mod discrepancy;
pub mod distributions;
pub mod error;
pub mod hypothesis;
pub mod io;
pub mod rng;
pub mod simulation;

pub use data::{column_mean, sample_covariance, standardize, DataMatrix, StandardizationParams};
pub use depth::{
    depth, depth_approx, depth_exact_2d, depth_profile, depth_sweep_2d, depth_univariate,
    DepthFunction, DepthMethod, DepthPlan, DepthValue, DirectionSet,
};
pub use distributions::{sample, ReferenceDistribution};
pub use error::{Error, Result};
pub use rng::StreamRng;
