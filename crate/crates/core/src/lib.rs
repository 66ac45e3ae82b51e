//! Game-theoretic models of individual pandemic decisions and a policy layer
//! that lets a government (the mechanism designer) reshape those games.
//!
//! * [`game`] holds a generic two-player cost bimatrix with pure equilibrium,
//!   dominance and social-optimum solvers.
//! * [`mask`] builds the Mask Game instances and its Bayesian, efficiency and
//!   multi-player analyses.
//! * [`distancing`] covers the go-out/stay-home decision and the meeting
//!   size/duration optimization.
//! * [`policy`] applies government policies to a [`policy::Scenario`] and
//!   scores the resulting outcome for citizens and designer.
//! * [`oracle`] contains brute-force checkers used to cross-validate the
//!   closed-form results.
//!
//! Grid sweeps run on rayon when the `parallel` feature is enabled (the
//! default); [`Execution`] selects the path explicitly.

pub mod distancing;
mod error;
mod exec;
pub mod game;
pub mod mask;
pub mod oracle;
pub mod policy;

pub use error::{Error, Result};
pub use exec::Execution;

/// Absolute tolerance used when comparing costs for ties.
pub const DEFAULT_TOL: f64 = 1e-9;
