//! Estimation of laws of discrete-time stochastic processes in the adapted
//! (bicausal) Wasserstein distance.
//!
//! The crate provides:
//!
//! * [`path_measure`] — sampled paths, grid quantization and the adapted
//!   empirical measure with its prefix-tree disintegration,
//! * [`ot_core`] — exact solvers for Wasserstein-1, total variation and
//!   (smoothed) weighted total variation between finitely supported measures,
//! * [`adapted_ot`] — the nested backward-induction solver for the adapted
//!   Wasserstein distance, the smoothed estimator and the radial compact
//!   truncation map,
//! * [`processes`] — simulators and exact laws for the example processes
//!   (memory chain, seasonal chain, finite Markov chains),
//! * [`mixing`] — exact eta-mixing coefficients of finite-alphabet joint laws
//!   together with closed-form mixing bounds,
//! * [`bounds`] — evaluable rate and concentration bound formulas,
//! * [`experiments`] — a reproducible Monte-Carlo experiment harness emitting
//!   CSV tables and SVG figures.
//!
//! ```
//! use adapted_ot::adapted_ot::aw_distance;
//! use adapted_ot::path_measure::DiscretePathMeasure;
//!
//! // Two-step measures: one reveals the future through the first step, the
//! // other pools it, which the adapted distance prices at offset + 1.
//! let revealed = DiscretePathMeasure::new(
//!     vec![vec![0.25, 1.0], vec![-0.25, -1.0]],
//!     vec![0.5, 0.5],
//!     2,
//!     1,
//! )?;
//! let pooled = DiscretePathMeasure::new(
//!     vec![vec![0.0, 1.0], vec![0.0, -1.0]],
//!     vec![0.5, 0.5],
//!     2,
//!     1,
//! )?;
//! let (distance, _) = aw_distance(&revealed, &pooled)?;
//! assert!((distance - 1.25).abs() < 1e-9);
//! # Ok::<(), adapted_ot::Error>(())
//! ```

// Index-style loops below mirror the matrix and odometer arithmetic they
// implement.
#![allow(clippy::needless_range_loop)]

pub mod adapted_ot;
pub mod bounds;
pub mod error;
pub mod experiments;
pub mod mixing;
pub mod numfmt;
pub mod ot_core;
pub mod path_measure;
pub mod processes;
pub mod rng;

pub use error::{Error, Result};
