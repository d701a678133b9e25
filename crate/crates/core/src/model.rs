//! A loaded model of either shape, and its states.

use std::fmt;
use std::sync::Arc;

use crate::kernels::{validate_continuous, validate_discrete, ContState, ContinuousDynamics, ValidationReport};
use crate::trace::{
    trace_equiv, Bracket, ContinuousTracer, DiscreteTracer, EquivReport, InfiniteSingleton, TraceError, TraceMeasure,
    TraceValue,
};
use crate::wordspace::{Alphabet, BaseSet, InfiniteWord, RingSet, SpaceKind, WordSpace};
use crate::ExactModel;

/// Discrete models carry exact rational weights; continuous ones are
/// grid kernels or built-in families.
#[derive(Debug, Clone)]
pub enum Model {
    Discrete(ExactModel),
    Continuous(Arc<dyn ContinuousDynamics>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum State {
    Discrete(usize),
    Continuous(ContState),
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            State::Discrete(i) => write!(f, "#{i}"),
            State::Continuous(s) => write!(f, "{s}"),
        }
    }
}

impl Model {
    pub fn alphabet(&self) -> &Alphabet {
        match self {
            Model::Discrete(m) => m.alphabet(),
            Model::Continuous(m) => m.alphabet(),
        }
    }

    pub fn kind(&self) -> SpaceKind {
        match self {
            Model::Discrete(m) => m.kind(),
            Model::Continuous(m) => m.kind(),
        }
    }

    pub fn space(&self) -> WordSpace {
        WordSpace::new(self.alphabet().clone(), self.kind())
    }

    /// A state name for discrete models; `z` or `(t,z)` for continuous ones.
    pub fn parse_state(&self, text: &str) -> Result<State, TraceError> {
        let text = text.trim();
        match self {
            Model::Discrete(m) => m
                .state_index(text)
                .map(State::Discrete)
                .ok_or_else(|| TraceError::BadState(format!("unknown state `{text}`"))),
            Model::Continuous(m) => {
                let bad = || TraceError::BadState(format!("`{text}` is not a number or a (t,z) pair"));
                let s = match text.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
                    Some(inner) => {
                        let (t, z) = inner.split_once(',').ok_or_else(bad)?;
                        ContState::new(
                            t.trim().parse().map_err(|_| bad())?,
                            z.trim().parse().map_err(|_| bad())?,
                        )
                    }
                    None => ContState::at(text.parse().map_err(|_| bad())?),
                };
                m.normalize_state(s).map(State::Continuous).map_err(TraceError::BadState)
            }
        }
    }

    pub fn state_label(&self, x: &State) -> String {
        match (self, x) {
            (Model::Discrete(m), State::Discrete(i)) => m.state_names()[*i].clone(),
            (_, s) => s.to_string(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Model::Discrete(m) => format!("discrete model ({} states)", m.len()),
            Model::Continuous(m) => m.describe(),
        }
    }

    pub fn validate(&self, name: &str) -> ValidationReport {
        match self {
            Model::Discrete(m) => validate_discrete(m, name),
            Model::Continuous(m) => {
                let mut r = validate_continuous(m.as_ref());
                r.model = name.to_string();
                r
            }
        }
    }

    /// Trace measure of `x`; `tol` bounds acceptable numeric error for
    /// continuous models.
    pub fn tracer(&self, x: &State, tol: f64) -> Result<Box<dyn TraceMeasure + '_>, TraceError> {
        match (self, x) {
            (Model::Discrete(m), State::Discrete(i)) => Ok(Box::new(DiscreteTracer::new(m).at(*i)?)),
            (Model::Continuous(m), State::Continuous(s)) => {
                Ok(Box::new(ContinuousTracer::new(m.as_ref(), *s)?.with_tolerance(tol)))
            }
            _ => Err(TraceError::BadState(format!("{x} is not a state of this model"))),
        }
    }

    pub fn trace_base(&self, x: &State, s: &BaseSet, tol: f64) -> Result<TraceValue, TraceError> {
        self.tracer(x, tol)?.base(s)
    }

    pub fn trace_ring(&self, x: &State, r: &RingSet, tol: f64) -> Result<TraceValue, TraceError> {
        self.tracer(x, tol)?.ring(r)
    }

    pub fn trace_finite_words(&self, x: &State, depth: usize, tol: f64) -> Result<Bracket, TraceError> {
        self.tracer(x, tol)?.finite_words(depth)
    }

    pub fn trace_infinite_words(&self, x: &State, depth: usize, tol: f64) -> Result<Bracket, TraceError> {
        self.tracer(x, tol)?.infinite_words(depth)
    }

    pub fn trace_infinite_singleton(
        &self,
        x: &State,
        w: &InfiniteWord,
        depth: usize,
        tol: f64,
    ) -> Result<InfiniteSingleton, TraceError> {
        self.tracer(x, tol)?.infinite_singleton(w, depth)
    }
}

/// [`trace_equiv`] between states of two models.
pub fn equiv_states(
    a: &Model,
    xa: &State,
    b: &Model,
    xb: &State,
    depth: usize,
    tol: f64,
) -> Result<EquivReport, TraceError> {
    let mut ta = a.tracer(xa, tol.max(1e-6))?;
    let mut tb = b.tracer(xb, tol.max(1e-6))?;
    trace_equiv(ta.as_mut(), tb.as_mut(), depth, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::kernels::{GaussianJumper, JumpGame};

    #[test]
    fn parses_states() {
        let d = Model::Discrete(catalog::mixed_traces());
        assert_eq!(d.parse_state("1").unwrap(), State::Discrete(1));
        assert!(d.parse_state("7").is_err());
        let j = Model::Continuous(Arc::new(JumpGame::new()));
        assert_eq!(j.parse_state("0.5").unwrap(), State::Continuous(ContState::at(0.5)));
        assert!(j.parse_state("1.5").is_err());
        let g = Model::Continuous(Arc::new(GaussianJumper::new(3)));
        assert_eq!(
            g.parse_state("(1, -4.2)").unwrap(),
            State::Continuous(ContState::new(1, -4.2))
        );
        assert!(g.parse_state("(1;2)").is_err());
    }

    #[test]
    fn dispatches_queries() {
        let d = Model::Discrete(catalog::mixed_traces());
        let x = d.parse_state("1").unwrap();
        let sp = d.space();
        let r = sp.ring(&[sp.parse_base("word:").unwrap(), sp.parse_base("cone:a").unwrap()]).unwrap();
        assert_eq!(d.trace_ring(&x, &r, 1e-9).unwrap().to_string(), "2/3");
        assert_eq!(d.trace_ring(&x, &RingSet::empty(SpaceKind::Infty), 1e-9).unwrap(), TraceValue::zero());

        let j = Model::Continuous(Arc::new(JumpGame::new()));
        let z = j.parse_state("0.5").unwrap();
        let sp = j.space();
        let r = sp.ring(&[sp.parse_base("cone:L").unwrap(), sp.parse_base("cone:R").unwrap()]).unwrap();
        assert!((j.trace_ring(&z, &r, 1e-9).unwrap().value() - 1.0).abs() < 1e-9);
        assert!(j.tracer(&x, 1e-9).is_err());
    }

    #[test]
    fn equivalence_across_models() {
        let g = Model::Continuous(Arc::new(GaussianJumper::new(3)));
        let c = Model::Discrete(catalog::jumper_chain(3));
        let r = equiv_states(&g, &g.parse_state("(0,-4.2)").unwrap(), &c, &State::Discrete(0), 2, 1e-6).unwrap();
        assert!(r.equivalent);
    }
}
