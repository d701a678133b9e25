use num_traits::Signed;

use crate::scalar::Scalar;
use super::{TraceError, TraceMeasure, TraceValue};
use crate::wordspace::BaseSet;

/// Generator on which two trace measures differ the most.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub set: BaseSet,
    pub left: TraceValue,
    pub right: TraceValue,
}

impl Witness {
    pub fn difference(&self) -> f64 {
        (self.left.value() - self.right.value()).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivReport {
    pub equivalent: bool,
    pub depth: usize,
    pub tol: f64,
    /// Number of generators compared.
    pub compared: usize,
    /// Largest difference seen and where; `None` when nothing was compared.
    pub max: Option<Witness>,
}

impl EquivReport {
    /// The maximizing generator, reported only for inequivalent states.
    pub fn witness(&self) -> Option<&Witness> {
        if self.equivalent {
            None
        } else {
            self.max.as_ref()
        }
    }
}

/// Compares two trace measures on every admissible generator whose word
/// has length at most `depth`, in length-lexicographic order.
///
/// The states count as equivalent when every difference is within `tol`
/// plus the two error bounds. The reported maximizer is the first one in
/// that order.
pub fn trace_equiv(
    a: &mut dyn TraceMeasure,
    b: &mut dyn TraceMeasure,
    depth: usize,
    tol: f64,
) -> Result<EquivReport, TraceError> {
    let (sa, sb) = (a.space().clone(), b.space().clone());
    if sa.alphabet() != sb.alphabet() {
        return Err(TraceError::AlphabetMismatch);
    }
    if sa.kind() != sb.kind() {
        return Err(TraceError::KindMismatch {
            expected: sa.kind(),
            found: sb.kind(),
        });
    }
    let kind = sa.kind();
    let mut report = EquivReport {
        equivalent: true,
        depth,
        tol,
        compared: 0,
        max: None,
    };
    let mut best = f64::NEG_INFINITY;
    for u in sa.alphabet().words_up_to(depth) {
        let mut sets = Vec::with_capacity(2);
        if kind.admits_singletons() {
            sets.push(BaseSet::Singleton(u.clone()));
        }
        if kind.admits_cones() {
            sets.push(BaseSet::Cone(u));
        }
        for s in sets {
            let left = a.base(&s)?;
            let right = b.base(&s)?;
            report.compared += 1;
            let diff = match (left.exact(), right.exact()) {
                (Some(x), Some(y)) => Scalar::to_f64(&(x - y).abs()),
                _ => (left.value() - right.value()).abs(),
            };
            if diff > tol + left.err_bound() + right.err_bound() {
                report.equivalent = false;
            }
            if diff > best {
                best = diff;
                report.max = Some(Witness { set: s, left, right });
            }
        }
    }
    Ok(report)
}
