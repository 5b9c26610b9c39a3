//! Tikhonov–Mann iteration for families of nonexpansive mappings in
//! W-hyperbolic spaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: the W-hyperbolic space abstraction (metric plus convex
//!   combination) with a Euclidean and a star-shaped R-tree instance, and a
//!   sampler that checks the space axioms.
//! * [`sequences`]: integer rate functions, parameter schedules with their
//!   declared quantitative moduli, and brute-force oracles validating them.
//! * [`mappings`]: families of nonexpansive maps, resolvent families and the
//!   empirical nonexpansiveness / family-coherence checkers.
//! * [`iterate`]: the Tikhonov–Mann and modified Halpern iterations, traces and
//!   the per-step inequality checks.
//! * [`rates`]: every explicit rate composition plus the certifier that checks a
//!   claimed rate against a recorded residual sequence.
//! * [`splitting`]: the Tikhonov forward-backward method built on top of the
//!   family iteration.
//! * [`report`]: CSV writers for traces and certification tables.

// `!(a <= b)` is used on purpose so that NaN counts as a violation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod iterate;
pub mod mappings;
pub mod rates;
pub mod report;
pub mod sequences;
pub mod splitting;

pub use error::{Error, Result};
pub use geometry::{Euclidean, StarPoint, StarTree, WSpace};
pub use iterate::{IterationTrace, ProblemInstance, RunOptions};
pub use mappings::{FamilyKind, MappingFamily};
pub use rates::{CertificationReport, RateBundle};
pub use sequences::{ParamSchedule, RateFn};
