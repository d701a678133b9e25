//! Trace measures.
//!
//! `tr(x)` is defined on the generating semiring by a backward recursion
//! over the queried word: `tr(x)(∅) = 0`, `tr(x)({ε})` is the termination
//! weight, `tr(x)(↑ε) = 1`, and
//!
//! ```text
//! tr(x)({au}) = ∫ tr(x')({u}) dP_a(x, x')
//! tr(x)(↑au)  = ∫ tr(x')(↑u)  dP_a(x, x')
//! ```
//!
//! Both tracers memoize the suffix functions `x ↦ tr(x)(S_u)` keyed by the
//! suffix `u`. Beyond the semiring, finite disjoint unions are evaluated by
//! additivity and `A*`, `A^ω` and eventually periodic infinite words by
//! monotone limits, reported as brackets.

mod continuous;
mod discrete;
mod equiv;
mod linear;

pub use continuous::{ContinuousTracer, DEFAULT_INTERPOLATION_TOL};
pub use discrete::{DiscreteTracer, StateTrace};
pub use equiv::{trace_equiv, EquivReport, Witness};

use std::fmt;

use num_traits::{One, Zero};
use serde_json::json;

use crate::scalar::{format_rational, Rational, Scalar};
use crate::wordspace::{BaseSet, InfiniteWord, RingSet, SpaceKind, WordError, WordSpace};

/// Value of a trace measure on a set: exact, or approximate with an
/// absolute error bound.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceValue {
    Exact(Rational),
    Approx { value: f64, err_bound: f64 },
}

impl TraceValue {
    pub fn zero() -> Self {
        TraceValue::Exact(Rational::zero())
    }

    pub fn one() -> Self {
        TraceValue::Exact(Rational::one())
    }

    pub fn value(&self) -> f64 {
        match self {
            TraceValue::Exact(r) => r.to_f64(),
            TraceValue::Approx { value, .. } => *value,
        }
    }

    pub fn err_bound(&self) -> f64 {
        match self {
            TraceValue::Exact(_) => 0.0,
            TraceValue::Approx { err_bound, .. } => *err_bound,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, TraceValue::Exact(_))
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            TraceValue::Exact(r) => Some(r),
            TraceValue::Approx { .. } => None,
        }
    }

    pub fn form(&self) -> &'static str {
        if self.is_exact() {
            "exact"
        } else {
            "approximate"
        }
    }

    pub fn add(&self, other: &TraceValue) -> TraceValue {
        match (self, other) {
            (TraceValue::Exact(a), TraceValue::Exact(b)) => TraceValue::Exact(a + b),
            _ => TraceValue::Approx {
                value: self.value() + other.value(),
                err_bound: self.err_bound() + other.err_bound(),
            },
        }
    }

    /// `1 - self`.
    pub fn complement(&self) -> TraceValue {
        match self {
            TraceValue::Exact(a) => TraceValue::Exact(Rational::one() - a),
            TraceValue::Approx { value, err_bound } => TraceValue::Approx {
                value: 1.0 - value,
                err_bound: *err_bound,
            },
        }
    }

    /// Whether `[value - err, value + err]` meets `[0, 1]`.
    pub fn is_consistent(&self) -> bool {
        match self {
            TraceValue::Exact(r) => *r >= Rational::zero() && *r <= Rational::one(),
            TraceValue::Approx { value, err_bound } => {
                value.is_finite() && *value >= -err_bound && *value <= 1.0 + err_bound
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            TraceValue::Exact(r) => json!({
                "form": "exact",
                "value": format_rational(r),
                "approx": r.to_f64(),
                "errBound": 0.0,
            }),
            TraceValue::Approx { value, err_bound } => json!({
                "form": "approximate",
                "value": value,
                "errBound": err_bound,
            }),
        }
    }
}

impl fmt::Display for TraceValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceValue::Exact(r) => f.write_str(&format_rational(r)),
            TraceValue::Approx { value, err_bound } => write!(f, "{value} ± {err_bound:.1e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TraceError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("set has kind {found}, model has kind {expected}")]
    KindMismatch { expected: SpaceKind, found: SpaceKind },
    #[error("models have different alphabets")]
    AlphabetMismatch,
    #[error("{op} is undefined for kind {kind}")]
    UnsupportedKind { op: &'static str, kind: SpaceKind },
    #[error("numerical error bound {err_bound:.3e} exceeds tolerance {tol:.3e} for {what}")]
    Numeric { what: String, err_bound: f64, tol: f64 },
    #[error("trace value {value} lies outside [0, 1] beyond its error bound {err_bound:.3e}")]
    Inconsistent { value: f64, err_bound: f64 },
    #[error("invalid state: {0}")]
    BadState(String),
}

pub(crate) fn checked(v: TraceValue) -> Result<TraceValue, TraceError> {
    if v.is_consistent() {
        Ok(v)
    } else {
        Err(TraceError::Inconsistent {
            value: v.value(),
            err_bound: v.err_bound(),
        })
    }
}

/// Depth-`n` bracket around a limit value, with the partial values that
/// certify monotonicity.
#[derive(Debug, Clone, PartialEq)]
pub struct Bracket {
    pub depth: usize,
    pub lower: TraceValue,
    pub upper: TraceValue,
    /// Successive approximations by depth; nondecreasing for limits from
    /// below, nonincreasing for limits from above.
    pub partial: Vec<TraceValue>,
    /// The limit itself when it can be computed in closed form.
    pub limit: Option<TraceValue>,
}

impl Bracket {
    /// Best single value: the closed-form limit, else the bracket midpoint
    /// with half its width added to the error.
    pub fn value(&self) -> TraceValue {
        if let Some(l) = &self.limit {
            return l.clone();
        }
        let lo = self.lower.value();
        let hi = self.upper.value();
        TraceValue::Approx {
            value: 0.5 * (lo + hi),
            err_bound: 0.5 * (hi - lo).abs() + self.lower.err_bound().max(self.upper.err_bound()),
        }
    }

    pub fn width(&self) -> f64 {
        self.upper.value() - self.lower.value()
    }

    pub fn contains(&self, x: f64, slack: f64) -> bool {
        x >= self.lower.value() - self.lower.err_bound() - slack
            && x <= self.upper.value() + self.upper.err_bound() + slack
    }

    /// Bracket of `1 - limit`.
    pub fn complement(&self) -> Bracket {
        Bracket {
            depth: self.depth,
            lower: self.upper.complement(),
            upper: self.lower.complement(),
            partial: self.partial.iter().map(TraceValue::complement).collect(),
            limit: self.limit.as_ref().map(TraceValue::complement),
        }
    }
}

/// Approximation of `tr(x)({w})` for an infinite word `w` by the cones of
/// its prefixes.
#[derive(Debug, Clone, PartialEq)]
pub struct InfiniteSingleton {
    pub depth: usize,
    /// `tr(x)(↑w[..depth])`.
    pub at_depth: TraceValue,
    /// `tr(x)(↑w[..depth + |period|])`.
    pub next_period: TraceValue,
    /// Closed form when available (discrete models).
    pub limit: Option<TraceValue>,
}

impl InfiniteSingleton {
    pub fn gap(&self) -> f64 {
        (self.at_depth.value() - self.next_period.value()).max(0.0)
    }

    /// The closed form if known, else the depth value with the observed
    /// one-period decrease added to its error bound.
    pub fn value(&self) -> TraceValue {
        match &self.limit {
            Some(l) => l.clone(),
            None => TraceValue::Approx {
                value: self.at_depth.value(),
                err_bound: self.gap() + self.at_depth.err_bound(),
            },
        }
    }
}

/// Trace measure of one fixed state.
pub trait TraceMeasure {
    fn space(&self) -> &WordSpace;

    /// `tr(x)(s)` on the semiring.
    fn base(&mut self, s: &BaseSet) -> Result<TraceValue, TraceError>;

    /// Finite additivity over the disjoint parts.
    fn ring(&mut self, r: &RingSet) -> Result<TraceValue, TraceError> {
        let kind = self.space().kind();
        if r.kind() != kind {
            return Err(TraceError::KindMismatch {
                expected: kind,
                found: r.kind(),
            });
        }
        let mut acc = TraceValue::zero();
        for p in r.parts() {
            acc = acc.add(&self.base(p)?);
        }
        checked(acc)
    }

    /// `tr(x)(A^{≤n})` from below, with an upper bound on `tr(x)(A*)`.
    fn finite_words(&mut self, depth: usize) -> Result<Bracket, TraceError>;

    /// `tr(x)({w})` via `↑w[..n]`.
    fn infinite_singleton(&mut self, w: &InfiniteWord, depth: usize) -> Result<InfiniteSingleton, TraceError>;

    /// `tr(x)(A^ω)`: everything for kind omega, `1 - tr(x)(A*)` for infty.
    fn infinite_words(&mut self, depth: usize) -> Result<Bracket, TraceError> {
        match self.space().kind() {
            SpaceKind::Omega => Ok(Bracket {
                depth,
                lower: TraceValue::one(),
                upper: TraceValue::one(),
                partial: vec![TraceValue::one()],
                limit: Some(TraceValue::one()),
            }),
            SpaceKind::Infty => Ok(self.finite_words(depth)?.complement()),
            kind => Err(TraceError::UnsupportedKind { op: "A^omega", kind }),
        }
    }
}

pub(crate) fn require_kind(space: &WordSpace, s: &BaseSet) -> Result<(), TraceError> {
    space.check(s).map_err(TraceError::from)
}

pub(crate) fn require_finite_kind(kind: SpaceKind) -> Result<(), TraceError> {
    if kind.has_termination() {
        Ok(())
    } else {
        Err(TraceError::UnsupportedKind { op: "A*", kind })
    }
}

pub(crate) fn require_infinite_kind(kind: SpaceKind) -> Result<(), TraceError> {
    if kind.is_probability() {
        Ok(())
    } else {
        Err(TraceError::UnsupportedKind {
            op: "infinite-word singleton",
            kind,
        })
    }
}

pub(crate) fn scalar_value<S: Scalar>(v: S, err: f64) -> TraceValue {
    v.into_trace_value(err)
}
