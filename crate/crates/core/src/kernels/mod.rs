//! Markov kernels and generative transition systems.
//!
//! A [`Kernel`] maps a source state to a (sub-)probability measure on a
//! target space, observed only through integration. [`Dirac`] is the unit,
//! [`kleisli_compose`] the composition; [`MatrixKernel`] is the discrete
//! instance used for the per-label transition kernels of a
//! [`DiscreteModel`].

mod builtin;
mod continuous;
mod discrete;
mod grid;
mod validate;

pub use builtin::{BuiltinFamily, GaussianJumper, JumpGame};
pub use continuous::{ContState, ContinuousDynamics, DensityPiece, LabelKernel, Profile, StateSpace};
pub use discrete::{DiscreteModel, ModelError, Transition};
pub use grid::{GridError, GridKernel};
pub use validate::{validate_continuous, validate_discrete, StateReport, ValidationReport};

use std::marker::PhantomData;

use crate::scalar::Scalar;
use crate::wordspace::Letter;

/// A (sub-)probability measure, observed through integrals.
pub trait Measure<S: Scalar> {
    type Point;

    fn integrate(&self, g: &dyn Fn(&Self::Point) -> S) -> S;

    fn mass(&self) -> S {
        self.integrate(&|_| S::one())
    }
}

/// Markov kernel `Source → S(Target)`.
pub trait Kernel<S: Scalar> {
    type Source;
    type Target;

    /// `∫ g d k(x, ·)`.
    fn integrate(&self, x: &Self::Source, g: &dyn Fn(&Self::Target) -> S) -> S;

    fn mass(&self, x: &Self::Source) -> S {
        self.integrate(x, &|_| S::one())
    }

    /// The measure `k(x, ·)`.
    fn at(&self, x: Self::Source) -> KernelAt<'_, Self, Self::Source>
    where
        Self: Sized,
    {
        KernelAt { kernel: self, source: x }
    }
}

/// The point mass `δ_x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dirac<X>(pub X);

pub fn dirac<X>(x: X) -> Dirac<X> {
    Dirac(x)
}

impl<S: Scalar, X> Measure<S> for Dirac<X> {
    type Point = X;

    fn integrate(&self, g: &dyn Fn(&X) -> S) -> S {
        g(&self.0)
    }
}

/// The unit kernel `x ↦ δ_x`.
#[derive(Debug, Clone, Copy, Default)]
pub struct DiracKernel<X>(PhantomData<fn(X) -> X>);

impl<X> DiracKernel<X> {
    pub fn new() -> Self {
        DiracKernel(PhantomData)
    }
}

impl<S: Scalar, X: Clone> Kernel<S> for DiracKernel<X> {
    type Source = X;
    type Target = X;

    fn integrate(&self, x: &X, g: &dyn Fn(&X) -> S) -> S {
        g(x)
    }
}

/// A kernel frozen at one source point.
#[derive(Debug)]
pub struct KernelAt<'k, K, X> {
    kernel: &'k K,
    source: X,
}

impl<S: Scalar, K: Kernel<S>> Measure<S> for KernelAt<'_, K, K::Source> {
    type Point = K::Target;

    fn integrate(&self, g: &dyn Fn(&K::Target) -> S) -> S {
        self.kernel.integrate(&self.source, g)
    }
}

/// `g ∘ f` in the Kleisli category: first `f`, then `g`.
#[derive(Debug, Clone)]
pub struct Composed<F, G> {
    first: F,
    second: G,
}

/// `(g ∘ f)(x)(S) = ∫ g(y)(S) df(x)(y)`.
pub fn kleisli_compose<S, F, G>(f: F, g: G) -> Composed<F, G>
where
    S: Scalar,
    F: Kernel<S>,
    G: Kernel<S, Source = F::Target>,
{
    Composed { first: f, second: g }
}

impl<S, F, G> Kernel<S> for Composed<F, G>
where
    S: Scalar,
    F: Kernel<S>,
    G: Kernel<S, Source = F::Target>,
{
    type Source = F::Source;
    type Target = G::Target;

    fn integrate(&self, x: &F::Source, h: &dyn Fn(&G::Target) -> S) -> S {
        self.first.integrate(x, &|y| self.second.integrate(y, h))
    }
}

impl<S: Scalar, K: Kernel<S>> Kernel<S> for &K {
    type Source = K::Source;
    type Target = K::Target;

    fn integrate(&self, x: &K::Source, g: &dyn Fn(&K::Target) -> S) -> S {
        (**self).integrate(x, g)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("cannot compose a kernel into {targets} states with one over {sources} states")]
    SpaceMismatch { targets: usize, sources: usize },
    #[error("state {0} is out of range")]
    StateOutOfRange(usize),
}

/// Kernel between finite state sets `{0..sources} → S({0..targets})`,
/// stored as sparse rows.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixKernel<S> {
    targets: usize,
    rows: Vec<Vec<(usize, S)>>,
}

impl<S: Scalar> MatrixKernel<S> {
    pub fn new(targets: usize, rows: Vec<Vec<(usize, S)>>) -> Result<Self, KernelError> {
        for row in &rows {
            if let Some(&(y, _)) = row.iter().find(|(y, _)| *y >= targets) {
                return Err(KernelError::StateOutOfRange(y));
            }
        }
        Ok(MatrixKernel { targets, rows })
    }

    pub fn from_dense(dense: &[Vec<S>]) -> Self {
        let targets = dense.first().map_or(0, Vec::len);
        let rows = dense
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, w)| !w.is_zero())
                    .map(|(y, w)| (y, w.clone()))
                    .collect()
            })
            .collect();
        MatrixKernel { targets, rows }
    }

    pub fn identity(n: usize) -> Self {
        MatrixKernel {
            targets: n,
            rows: (0..n).map(|x| vec![(x, S::one())]).collect(),
        }
    }

    pub fn sources(&self) -> usize {
        self.rows.len()
    }

    pub fn targets(&self) -> usize {
        self.targets
    }

    pub fn row(&self, x: usize) -> &[(usize, S)] {
        &self.rows[x]
    }

    pub fn to_dense(&self) -> Vec<Vec<S>> {
        self.rows
            .iter()
            .map(|row| {
                let mut d = vec![S::zero(); self.targets];
                for (y, w) in row {
                    d[*y] += w.clone();
                }
                d
            })
            .collect()
    }

    /// `Σ_y k(x, y) · g[y]`.
    pub fn apply(&self, x: usize, g: &[S]) -> S {
        let mut acc = S::zero();
        for (y, w) in &self.rows[x] {
            acc += w.clone() * g[*y].clone();
        }
        acc
    }

    /// Materialized Kleisli composite: first `self`, then `next`.
    pub fn then(&self, next: &MatrixKernel<S>) -> Result<MatrixKernel<S>, KernelError> {
        if self.targets != next.sources() {
            return Err(KernelError::SpaceMismatch {
                targets: self.targets,
                sources: next.sources(),
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc: Vec<Option<S>> = vec![None; next.targets];
                for (y, w) in row {
                    for (z, v) in &next.rows[*y] {
                        let term = w.clone() * v.clone();
                        match &mut acc[*z] {
                            Some(s) => *s += term,
                            slot => *slot = Some(term),
                        }
                    }
                }
                acc.into_iter()
                    .enumerate()
                    .filter_map(|(z, s)| s.map(|s| (z, s)))
                    .collect()
            })
            .collect();
        Ok(MatrixKernel {
            targets: next.targets,
            rows,
        })
    }
}

impl<S: Scalar> Kernel<S> for MatrixKernel<S> {
    type Source = usize;
    type Target = usize;

    fn integrate(&self, x: &usize, g: &dyn Fn(&usize) -> S) -> S {
        let mut acc = S::zero();
        for (y, w) in &self.rows[*x] {
            acc += w.clone() * g(y);
        }
        acc
    }
}

/// Outcome space `A × X + 1` of one generative step.
#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome<X> {
    Emit(Letter, X),
    Terminate,
}

/// `δ_a ⊙ P`: the measure on `A × X + 1` that puts `P(S_X)` on
/// `{a} × S_X`, nothing on other labels, and nothing on termination.
#[derive(Debug)]
pub struct LabelledStep<'p, P> {
    label: Letter,
    measure: &'p P,
}

pub fn labelled_step<S: Scalar, P: Measure<S>>(label: Letter, measure: &P) -> LabelledStep<'_, P> {
    LabelledStep { label, measure }
}

impl<'p, P> LabelledStep<'p, P> {
    pub fn label(&self) -> Letter {
        self.label
    }

    /// Measure of `S_A × S_X + S_1`, given as predicates and a flag for `✓`.
    pub fn evaluate<S: Scalar>(
        &self,
        labels: &dyn Fn(Letter) -> bool,
        states: &dyn Fn(&P::Point) -> bool,
        _includes_termination: bool,
    ) -> S
    where
        P: Measure<S>,
    {
        if !labels(self.label) {
            return S::zero();
        }
        self.measure
            .integrate(&|x| if states(x) { S::one() } else { S::zero() })
    }
}

impl<S: Scalar, P: Measure<S>> Measure<S> for LabelledStep<'_, P>
where
    P::Point: Clone,
{
    type Point = StepOutcome<P::Point>;

    fn integrate(&self, g: &dyn Fn(&StepOutcome<P::Point>) -> S) -> S {
        self.measure
            .integrate(&|x| g(&StepOutcome::Emit(self.label, x.clone())))
    }
}

#[cfg(test)]
mod tests;
