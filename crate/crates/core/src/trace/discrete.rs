use std::collections::HashMap;
use std::sync::Arc;

use super::linear::{can_reach, solve};
use super::{
    checked, require_finite_kind, require_infinite_kind, require_kind, scalar_value, Bracket, InfiniteSingleton,
    TraceError, TraceMeasure, TraceValue,
};
use crate::kernels::{DiscreteModel, MatrixKernel};
use crate::scalar::Scalar;
use crate::wordspace::{BaseSet, InfiniteWord, RingSet, Word, WordSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Shape {
    Singleton,
    Cone,
}

/// Trace measures of all states of a discrete model at once.
///
/// Suffix vectors `g_u[x] = tr(x)(S_u)` are built by
/// `g_{au}[x] = Σ_{x'} P_a(x, x') · g_u[x']` and memoized per suffix, so a
/// query for `u` also caches every suffix of `u`.
#[derive(Debug)]
pub struct DiscreteTracer<'m, S> {
    model: &'m DiscreteModel<S>,
    space: WordSpace,
    kernels: Vec<MatrixKernel<S>>,
    table: HashMap<(Shape, Word), Arc<Vec<S>>>,
}

impl<'m, S: Scalar> DiscreteTracer<'m, S> {
    pub fn new(model: &'m DiscreteModel<S>) -> Self {
        let kernels = model.alphabet().letters().map(|a| model.label_kernel(a)).collect();
        DiscreteTracer {
            model,
            space: WordSpace::new(model.alphabet().clone(), model.kind()),
            kernels,
            table: HashMap::new(),
        }
    }

    pub fn model(&self) -> &'m DiscreteModel<S> {
        self.model
    }

    pub fn space(&self) -> &WordSpace {
        &self.space
    }

    /// Number of memoized suffix vectors.
    pub fn cached(&self) -> usize {
        self.table.len()
    }

    /// Fixes a state.
    pub fn at(self, x: usize) -> Result<StateTrace<'m, S>, TraceError> {
        if x >= self.model.len() {
            return Err(TraceError::BadState(format!("no state with index {x}")));
        }
        Ok(StateTrace { tracer: self, state: x })
    }

    fn suffix(&mut self, shape: Shape, w: &Word) -> Arc<Vec<S>> {
        let n = self.model.len();
        let letters = w.letters();
        let start = (0..=letters.len())
            .find(|&i| self.table.contains_key(&(shape, Word(letters[i..].to_vec()))))
            .unwrap_or(letters.len() + 1);
        let mut current = if start <= letters.len() {
            self.table[&(shape, Word(letters[start..].to_vec()))].clone()
        } else {
            let base = match shape {
                Shape::Singleton => (0..n).map(|x| self.model.termination(x).clone()).collect(),
                Shape::Cone => vec![S::one(); n],
            };
            let base = Arc::new(base);
            self.table.insert((shape, Word::empty()), base.clone());
            base
        };
        for i in (0..start.min(letters.len())).rev() {
            let k = &self.kernels[letters[i].0];
            let next: Vec<S> = (0..n).map(|x| k.apply(x, &current)).collect();
            current = Arc::new(next);
            self.table.insert((shape, Word(letters[i..].to_vec())), current.clone());
        }
        current
    }

    fn roundoff(&self, steps: usize) -> f64 {
        if S::EXACT {
            return 0.0;
        }
        let width = self.kernels.iter().flat_map(|k| (0..k.sources()).map(|x| k.row(x).len())).max().unwrap_or(0);
        2.0 * (steps as f64 + 1.0) * (width as f64 + 1.0) * S::unit_roundoff()
    }

    /// `x ↦ tr(x)(s)` for every state.
    pub fn base_vector(&mut self, s: &BaseSet) -> Result<Vec<S>, TraceError> {
        require_kind(&self.space, s)?;
        Ok(match s {
            BaseSet::Empty => vec![S::zero(); self.model.len()],
            BaseSet::Singleton(u) => self.suffix(Shape::Singleton, u).as_ref().clone(),
            BaseSet::Cone(u) => self.suffix(Shape::Cone, u).as_ref().clone(),
        })
    }

    pub fn base(&mut self, x: usize, s: &BaseSet) -> Result<TraceValue, TraceError> {
        require_kind(&self.space, s)?;
        let v = match s {
            BaseSet::Empty => return Ok(TraceValue::zero()),
            BaseSet::Singleton(u) => self.suffix(Shape::Singleton, u)[x].clone(),
            BaseSet::Cone(u) => self.suffix(Shape::Cone, u)[x].clone(),
        };
        let len = s.word().map_or(0, Word::len);
        checked(scalar_value(v, self.roundoff(len)))
    }

    pub fn ring(&mut self, x: usize, r: &RingSet) -> Result<TraceValue, TraceError> {
        if r.kind() != self.space.kind() {
            return Err(TraceError::KindMismatch {
                expected: self.space.kind(),
                found: r.kind(),
            });
        }
        let mut acc = TraceValue::zero();
        for p in r.parts() {
            acc = acc.add(&self.base(x, p)?);
        }
        checked(acc)
    }

    /// Partial sums `Σ_{|u| ≤ k} tr(x)({u})` for `k ≤ depth`, the upper
    /// bound `partial + P^{depth+1}(alive)`, and the exact absorption value.
    pub fn finite_words(&mut self, x: usize, depth: usize) -> Result<Bracket, TraceError> {
        require_finite_kind(self.space.kind())?;
        let n = self.model.len();
        let step = self.model.step_kernel();
        let term: Vec<S> = (0..n).map(|y| self.model.termination(y).clone()).collect();

        let mut level = term.clone();
        let mut sum = S::zero();
        let mut partial = Vec::with_capacity(depth + 1);
        for k in 0..=depth {
            if k > 0 {
                level = (0..n).map(|y| step.apply(y, &level)).collect();
            }
            sum += level[x].clone();
            partial.push(scalar_value(sum.clone(), self.roundoff(k)));
        }

        let rows: Vec<Vec<(usize, S)>> = (0..n).map(|y| step.row(y).to_vec()).collect();
        let terminating: Vec<bool> = term.iter().map(|t| !t.is_zero()).collect();
        let live = can_reach(&rows, &terminating);
        let mut alive: Vec<S> = live.iter().map(|&l| if l { S::one() } else { S::zero() }).collect();
        for _ in 0..=depth {
            alive = (0..n).map(|y| step.apply(y, &alive)).collect();
        }
        let mut upper = sum.clone() + alive[x].clone();
        if upper > S::one() {
            upper = S::one();
        }

        let limit = absorption(&rows, &term, &live).map(|h| scalar_value(h[x].clone(), self.roundoff(n * n)));
        let err = self.roundoff(depth);
        Ok(Bracket {
            depth,
            lower: checked(scalar_value(sum, err))?,
            upper: checked(scalar_value(upper, err))?,
            partial,
            limit: limit.map(checked).transpose()?,
        })
    }

    /// Cones of the prefixes of `w` at `depth` and one period later, and
    /// the limit `M_p · h` where `h` is the probability of reaching the
    /// largest set on which `M_q` conserves mass.
    pub fn infinite_singleton(&mut self, x: usize, w: &InfiniteWord, depth: usize) -> Result<InfiniteSingleton, TraceError> {
        require_infinite_kind(self.space.kind())?;
        for part in [w.prefix(), w.period()] {
            if !part.is_over(self.space.alphabet()) {
                return Err(crate::wordspace::WordError::UnknownLetter(format!("{part:?}")).into());
            }
        }
        let p = w.period().len();
        let at_depth = self.base(x, &BaseSet::Cone(w.truncate(depth)))?;
        let next_period = self.base(x, &BaseSet::Cone(w.truncate(depth + p)))?;

        let n = self.model.len();
        let mut m = MatrixKernel::identity(n);
        for a in w.period().letters() {
            m = m.then(&self.kernels[a.0]).expect("square kernels");
        }
        let h = persistence(&m, self.roundoff(p) * 4.0);
        let mut g = h;
        for a in w.prefix().letters().iter().rev() {
            let k = &self.kernels[a.0];
            g = (0..n).map(|y| k.apply(y, &g)).collect();
        }
        let err = self.roundoff(n * n + w.prefix().len());
        Ok(InfiniteSingleton {
            depth,
            at_depth,
            next_period,
            limit: Some(checked(scalar_value(g[x].clone(), err))?),
        })
    }
}

/// Probability of eventually terminating: solves `h = t + P h` on states
/// that can reach termination, zero elsewhere.
fn absorption<S: Scalar>(rows: &[Vec<(usize, S)>], term: &[S], live: &[bool]) -> Option<Vec<S>> {
    let idx: Vec<usize> = (0..rows.len()).filter(|&y| live[y]).collect();
    let pos: HashMap<usize, usize> = idx.iter().enumerate().map(|(i, &y)| (y, i)).collect();
    let k = idx.len();
    let mut a = vec![vec![S::zero(); k]; k];
    let mut b = vec![S::zero(); k];
    for (i, &y) in idx.iter().enumerate() {
        a[i][i] = S::one();
        b[i] = term[y].clone();
        for (z, w) in &rows[y] {
            if let Some(&j) = pos.get(z) {
                a[i][j] -= w.clone();
            }
        }
    }
    let sol = solve(a, b)?;
    let mut h = vec![S::zero(); rows.len()];
    for (i, &y) in idx.iter().enumerate() {
        h[y] = sol[i].clone();
    }
    Some(h)
}

/// `lim_k M^k 1`: one on the largest mass-conserving set `Q`, the
/// probability of reaching `Q` elsewhere.
fn persistence<S: Scalar>(m: &MatrixKernel<S>, slack: f64) -> Vec<S> {
    let n = m.sources();
    let mut keep = vec![true; n];
    loop {
        let mut changed = false;
        for x in 0..n {
            if !keep[x] {
                continue;
            }
            let mut inside = S::zero();
            for (y, w) in m.row(x) {
                if keep[*y] {
                    inside += w.clone();
                }
            }
            let conserves = if S::EXACT {
                inside == S::one()
            } else {
                (inside.to_f64() - 1.0).abs() <= slack
            };
            if !conserves {
                keep[x] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let rows: Vec<Vec<(usize, S)>> = (0..n).map(|x| m.row(x).to_vec()).collect();
    let reach = can_reach(&rows, &keep);
    let transient: Vec<usize> = (0..n).filter(|&x| reach[x] && !keep[x]).collect();
    let pos: HashMap<usize, usize> = transient.iter().enumerate().map(|(i, &y)| (y, i)).collect();
    let k = transient.len();
    let mut a = vec![vec![S::zero(); k]; k];
    let mut b = vec![S::zero(); k];
    for (i, &x) in transient.iter().enumerate() {
        a[i][i] = S::one();
        for (y, w) in m.row(x) {
            if keep[*y] {
                b[i] += w.clone();
            } else if let Some(&j) = pos.get(y) {
                a[i][j] -= w.clone();
            }
        }
    }
    let sol = solve(a, b).unwrap_or_else(|| vec![S::zero(); k]);
    let mut h: Vec<S> = keep.iter().map(|&q| if q { S::one() } else { S::zero() }).collect();
    for (i, &x) in transient.iter().enumerate() {
        h[x] = sol[i].clone();
    }
    h
}

/// A [`DiscreteTracer`] fixed at one state.
#[derive(Debug)]
pub struct StateTrace<'m, S> {
    tracer: DiscreteTracer<'m, S>,
    state: usize,
}

impl<'m, S: Scalar> StateTrace<'m, S> {
    pub fn state(&self) -> usize {
        self.state
    }

    pub fn tracer(&mut self) -> &mut DiscreteTracer<'m, S> {
        &mut self.tracer
    }
}

impl<S: Scalar> TraceMeasure for StateTrace<'_, S> {
    fn space(&self) -> &WordSpace {
        &self.tracer.space
    }

    fn base(&mut self, s: &BaseSet) -> Result<TraceValue, TraceError> {
        self.tracer.base(self.state, s)
    }

    fn ring(&mut self, r: &RingSet) -> Result<TraceValue, TraceError> {
        self.tracer.ring(self.state, r)
    }

    fn finite_words(&mut self, depth: usize) -> Result<Bracket, TraceError> {
        self.tracer.finite_words(self.state, depth)
    }

    fn infinite_singleton(&mut self, w: &InfiniteWord, depth: usize) -> Result<InfiniteSingleton, TraceError> {
        self.tracer.infinite_singleton(self.state, w, depth)
    }
}
