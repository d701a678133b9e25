use super::MatrixKernel;
use crate::scalar::{is_unit_interval, Scalar};
use crate::wordspace::{Alphabet, Letter, SpaceKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("model needs at least one state")]
    NoStates,
    #[error("weight {0} is outside [0, 1]")]
    WeightOutOfRange(String),
    #[error("kind {0} has no termination")]
    TerminationNotAllowed(SpaceKind),
    #[error("label index {0} is outside the alphabet")]
    UnknownLabel(usize),
    #[error("state `{0}`: {1}")]
    BadState(String, String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transition<S> {
    pub label: Letter,
    pub target: usize,
    pub weight: S,
}

/// Generative system on a finite state set.
///
/// Each state carries a termination weight (zero unless the kind allows
/// termination) and a list of labelled, weighted transitions. Parallel
/// edges with the same label and target add up.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteModel<S> {
    alphabet: Alphabet,
    kind: SpaceKind,
    states: Vec<String>,
    termination: Vec<S>,
    transitions: Vec<Vec<Transition<S>>>,
}

impl<S: Scalar> DiscreteModel<S> {
    pub fn new(alphabet: Alphabet, kind: SpaceKind, states: Vec<String>) -> Result<Self, ModelError> {
        if states.is_empty() {
            return Err(ModelError::NoStates);
        }
        for (i, s) in states.iter().enumerate() {
            if states[..i].contains(s) {
                return Err(ModelError::DuplicateState(s.clone()));
            }
        }
        let n = states.len();
        Ok(DiscreteModel {
            alphabet,
            kind,
            states,
            termination: vec![S::zero(); n],
            transitions: vec![Vec::new(); n],
        })
    }

    /// States named `0..n`.
    pub fn with_states(alphabet: Alphabet, kind: SpaceKind, n: usize) -> Result<Self, ModelError> {
        Self::new(alphabet, kind, (0..n).map(|i| i.to_string()).collect())
    }

    fn check_state(&self, x: usize) -> Result<(), ModelError> {
        if x < self.states.len() {
            Ok(())
        } else {
            Err(ModelError::UnknownState(x.to_string()))
        }
    }

    fn check_weight(w: &S) -> Result<(), ModelError> {
        if is_unit_interval(w) {
            Ok(())
        } else {
            Err(ModelError::WeightOutOfRange(w.to_string()))
        }
    }

    pub fn set_termination(&mut self, x: usize, w: S) -> Result<(), ModelError> {
        self.check_state(x)?;
        Self::check_weight(&w)?;
        if !self.kind.has_termination() && !w.is_zero() {
            return Err(ModelError::TerminationNotAllowed(self.kind));
        }
        self.termination[x] = w;
        Ok(())
    }

    pub fn add_transition(&mut self, from: usize, label: Letter, to: usize, w: S) -> Result<(), ModelError> {
        self.check_state(from)?;
        self.check_state(to)?;
        Self::check_weight(&w)?;
        if label.0 >= self.alphabet.len() {
            return Err(ModelError::UnknownLabel(label.0));
        }
        self.transitions[from].push(Transition {
            label,
            target: to,
            weight: w,
        });
        Ok(())
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn termination(&self, x: usize) -> &S {
        &self.termination[x]
    }

    pub fn transitions(&self, x: usize) -> &[Transition<S>] {
        &self.transitions[x]
    }

    /// `α(x)(A × X + 1)`.
    pub fn total_mass(&self, x: usize) -> S {
        let mut acc = self.termination[x].clone();
        for t in &self.transitions[x] {
            acc += t.weight.clone();
        }
        acc
    }

    /// `P_a(x, X)`.
    pub fn label_mass(&self, x: usize, a: Letter) -> S {
        let mut acc = S::zero();
        for t in self.transitions[x].iter().filter(|t| t.label == a) {
            acc += t.weight.clone();
        }
        acc
    }

    /// The kernel `P_a(x, ·) = α(x)({a} × ·)`.
    pub fn label_kernel(&self, a: Letter) -> MatrixKernel<S> {
        let rows = self
            .transitions
            .iter()
            .map(|ts| {
                let mut row: Vec<(usize, S)> = Vec::new();
                for t in ts.iter().filter(|t| t.label == a) {
                    match row.iter_mut().find(|(y, _)| *y == t.target) {
                        Some((_, w)) => *w += t.weight.clone(),
                        None => row.push((t.target, t.weight.clone())),
                    }
                }
                row
            })
            .collect();
        MatrixKernel::new(self.len(), rows).expect("targets checked on insertion")
    }

    /// `Σ_a P_a`, the label-forgetting step kernel.
    pub fn step_kernel(&self) -> MatrixKernel<S> {
        let dense: Vec<Vec<S>> = self
            .transitions
            .iter()
            .map(|ts| {
                let mut row = vec![S::zero(); self.len()];
                for t in ts {
                    row[t.target] += t.weight.clone();
                }
                row
            })
            .collect();
        MatrixKernel::from_dense(&dense)
    }

    /// Same model over another scalar type.
    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> DiscreteModel<T> {
        DiscreteModel {
            alphabet: self.alphabet.clone(),
            kind: self.kind,
            states: self.states.clone(),
            termination: self.termination.iter().map(&f).collect(),
            transitions: self
                .transitions
                .iter()
                .map(|ts| {
                    ts.iter()
                        .map(|t| Transition {
                            label: t.label,
                            target: t.target,
                            weight: f(&t.weight),
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_f64(&self) -> DiscreteModel<f64> {
        self.map_scalar(|w| w.to_f64())
    }
}
