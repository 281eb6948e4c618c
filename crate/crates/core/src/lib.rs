//! Risk-aware algorithms for stochastic combinatorial semi-bandits.
//!
//! An agent repeatedly picks a *super arm* (a feasible subset of base arms),
//! observes each constituent arm's reward, and is judged by the Conditional
//! Value-at-Risk of the super-arm reward sum rather than its expectation.
//! This crate provides:
//!
//! - [`dist`]: finite-support distributions, convolution, stochastic
//!   dominance shifts, ε-grid discretization and discrete CVaR/VaR;
//! - [`gaussian`]: the standard-normal quantile/density and the closed-form
//!   Gaussian CVaR;
//! - [`env`]: ground-truth bandit instances with exact gap tables;
//! - [`algo`]: the CVaR-UCB algorithm for Gaussian arms, the stochastically
//!   dominant confidence-bound algorithm for bounded arms, its discretized
//!   variant, and a naive per-super-arm baseline;
//! - [`harness`]: seeded, reproducible regret experiments;
//! - [`oracles`]: slow brute-force reference computations used to verify
//!   the fast paths;
//! - [`verify`]: self-check suites comparing the two.

pub mod algo;
pub mod config;
pub mod dist;
pub mod env;
pub mod error;
pub mod gaussian;
pub mod grid;
pub mod harness;
pub mod oracles;
pub mod rng;
pub mod verify;

pub use dist::{
    convolve, convolve_many, cvar_discrete, dominant_shift, empirical_distribution,
    var_discrete, DiscreteDistribution, RiskLevel,
};
pub use error::{Error, Result};
pub use gaussian::{gaussian_cvar, std_normal_pdf, std_normal_quantile, GaussianParams};
pub use grid::{discretize_up, GridDistribution};
