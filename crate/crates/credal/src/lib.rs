//! Credal sets of coherent lower previsions on finite spaces.
//!
//! Given finitely many judgements "the expectation of gamble `f` is at
//! least `l`", the compatible probability mass vectors form a convex
//! polytope inside the probability simplex, the credal set. This crate
//!
//! - enumerates the credal set's extreme points (incremental double
//!   description, cross-checked by a brute-force oracle),
//! - evaluates the natural extension and checks avoiding sure loss and
//!   coherence,
//! - builds normal cones at vertices and computes the normed distance
//!   `max_h (P(h) − E(h))/‖h‖` over a cone via a small exact QP,
//! - combines these into the worst-case bound on how far two coherent
//!   extensions of the same assessment can differ on any unit gamble,
//!   with dominance-based pruning, and
//! - generates random coherent lower probabilities and benchmarks the
//!   whole pipeline with instrumentation counters.

pub mod bench;
pub mod cone;
pub mod distance;
pub mod error;
pub mod extension;
pub mod gamble;
pub mod io;
pub mod maxdist;
pub mod polytope;
pub mod tol;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use gamble::{Assessment, Gamble, LinearPrevision};
pub use polytope::{ConstraintRow, ConstraintSystem, CredalSet, Face};
pub use tol::Tolerances;
