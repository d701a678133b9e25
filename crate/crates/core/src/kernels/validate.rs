use serde::Serialize;

use super::continuous::ContinuousDynamics;
use super::discrete::DiscreteModel;
use crate::scalar::{abs_f64_gap, Scalar};

/// Per-state outcome of a validation pass.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StateReport {
    pub state: String,
    /// `term(x) + Σ_a P_a(x, X)`.
    pub total_mass: f64,
    /// Exact total when the model is rational.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_total: Option<String>,
    pub ok: bool,
    pub issues: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ValidationReport {
    pub model: String,
    pub kind: String,
    pub passed: bool,
    pub tolerance: f64,
    pub states: Vec<StateReport>,
}

impl ValidationReport {
    pub fn failures(&self) -> impl Iterator<Item = &StateReport> {
        self.states.iter().filter(|s| !s.ok)
    }
}

/// Checks the mass condition of the model's kind at every state: total
/// mass exactly 1 for probability kinds, at most 1 otherwise.
pub fn validate_discrete<S: Scalar>(model: &DiscreteModel<S>, name: &str) -> ValidationReport {
    let kind = model.kind();
    let tol = if S::EXACT { 0.0 } else { 64.0 * S::unit_roundoff() };
    let states = (0..model.len())
        .map(|x| {
            let total = model.total_mass(x);
            let mut issues = Vec::new();
            if !kind.has_termination() && !model.termination(x).is_zero() {
                issues.push(format!("kind {kind} does not allow termination"));
            }
            let gap = abs_f64_gap(&total, &S::one());
            if kind.is_probability() {
                if gap > tol {
                    issues.push(format!("total mass {total} differs from 1"));
                }
            } else if total > S::one() && gap > tol {
                issues.push(format!("total mass {total} exceeds 1"));
            }
            StateReport {
                state: model.state_names()[x].clone(),
                total_mass: total.to_f64(),
                exact_total: S::EXACT.then(|| total.to_string()),
                ok: issues.is_empty(),
                issues,
            }
        })
        .collect::<Vec<_>>();
    ValidationReport {
        model: name.to_string(),
        kind: kind.to_string(),
        passed: states.iter().all(|s| s.ok),
        tolerance: tol,
        states,
    }
}

/// Mass conditions at the model's probe states, plus a quadrature
/// self-check `∫ 1 dP_a(x, ·) ≈ P_a(x, X)` per label.
pub fn validate_continuous(model: &dyn ContinuousDynamics) -> ValidationReport {
    let kind = model.kind();
    let tol = model.mass_tolerance();
    let states = model
        .probe_states()
        .into_iter()
        .map(|x| {
            let mut issues = Vec::new();
            let term = model.termination(x);
            if !(0.0..=1.0).contains(&term) {
                issues.push(format!("termination weight {term} outside [0, 1]"));
            }
            if !kind.has_termination() && term != 0.0 {
                issues.push(format!("kind {kind} does not allow termination"));
            }
            let mut total = term;
            for a in model.alphabet().letters() {
                let m = model.mass(a, x);
                if m < -tol {
                    issues.push(format!("negative mass {m} for `{}`", model.alphabet().symbol(a)));
                }
                let q = model.integrate(a, x, &|_| 1.0, tol * 1e-3);
                if (q.value - m).abs() > tol {
                    issues.push(format!(
                        "quadrature mass {} disagrees with {m} for `{}`",
                        q.value,
                        model.alphabet().symbol(a)
                    ));
                }
                total += m;
            }
            if kind.is_probability() {
                if (total - 1.0).abs() > tol {
                    issues.push(format!("total mass {total} differs from 1"));
                }
            } else if total > 1.0 + tol {
                issues.push(format!("total mass {total} exceeds 1"));
            }
            StateReport {
                state: x.to_string(),
                total_mass: total,
                exact_total: None,
                ok: issues.is_empty(),
                issues,
            }
        })
        .collect::<Vec<_>>();
    ValidationReport {
        model: model.describe(),
        kind: kind.to_string(),
        passed: states.iter().all(|s| s.ok),
        tolerance: tol,
        states,
    }
}
