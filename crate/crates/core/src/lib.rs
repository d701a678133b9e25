//! Trace measures of generative probabilistic transition systems.
//!
//! A system moves from a state by jointly choosing a label from a finite
//! alphabet and a successor state (or terminating) according to a
//! (sub-)probability measure. Its trace measure `tr(x)` is a measure on
//! finite and/or infinite words, defined on the semiring of singletons and
//! cones by a backward recursion and extended by additivity and limits.
//!
//! Numeric code is generic over [`Scalar`]: exact [`Rational`] weights give
//! exact traces, `f64` weights give values with error bounds.

pub mod catalog;
pub mod kernels;
pub mod model;
pub mod modelio;
pub mod montecarlo;
pub mod numeric;
pub mod scalar;
pub mod trace;
pub mod wordspace;

pub use scalar::{Rational, Scalar};

/// Discrete model with exact rational weights.
pub type ExactModel = kernels::DiscreteModel<Rational>;
/// Discrete model with floating-point weights.
pub type FloatModel = kernels::DiscreteModel<f64>;
