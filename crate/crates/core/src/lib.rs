//! Local martingales on single-jump filtrations.
//!
//! All information in this model arrives at a single random time whose law
//! lives on `[0, +∞]`. Every local martingale is then a deterministic curve
//! `F` before the jump and a random level afterwards, tied together by a
//! one-line balance equation between `F`, the conditional mean `H` of the
//! post-jump level, and the law of the jump time. This crate builds those
//! objects constructively:
//!
//! - [`measure`]: mixed laws of the jump time (atoms + density pieces + mass
//!   at infinity) with exact CDF/quantile bookkeeping;
//! - [`integrate`]: Lebesgue–Stieltjes integrals against such laws, improper
//!   integration toward the open endpoint with divergence verdicts;
//! - [`solver`]: solving the balance equation in either direction, validating
//!   it, classifying global behaviour, and separating local martingales from
//!   proper σ-martingales;
//! - [`compensator`]: compensators of single-jump processes and the inverse
//!   problem recovering a survival function from a conditional mean;
//! - [`simulate`]: reproducible Monte Carlo over the jump representation;
//! - [`preset`]: classical worked examples wired up end to end;
//! - [`config`]: the strict JSON run configuration shared by the CLI and the
//!   browser demo.

// Validation guards use `!(x > 0.0)`-style comparisons so that NaN inputs
// fail alongside out-of-range ones.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compensator;
pub mod config;
pub mod error;
pub mod func;
pub mod integrate;
pub mod measure;
pub mod options;
pub mod preset;
pub mod simulate;
pub mod solver;

pub use error::{Error, Result};
pub use func::{RealFunction, TailVerdict};
pub use integrate::{atomic_oracle, improper_integral, stieltjes_integral, IntegralResult};
pub use measure::{Atom, CaseTag, DensityPiece, Distribution, EndpointCase, PieceShape};
pub use options::NumericOptions;
