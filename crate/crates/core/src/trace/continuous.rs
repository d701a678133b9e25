use std::cell::Cell;
use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use super::{
    checked, require_finite_kind, require_infinite_kind, require_kind, Bracket, InfiniteSingleton, TraceError,
    TraceMeasure, TraceValue,
};
use crate::kernels::{ContState, ContinuousDynamics};
use crate::numeric::{Chebyshev, Estimate};
use crate::wordspace::{BaseSet, InfiniteWord, Letter, Word, WordSpace};

/// Interpolation residual targeted for suffix functions.
pub const DEFAULT_INTERPOLATION_TOL: f64 = 1e-10;
const DEFAULT_TOL: f64 = 1e-6;
const QUAD_TOL: f64 = 1e-13;
const MAX_DEGREE: usize = 256;
const ROUNDOFF: f64 = 64.0 * f64::EPSILON;
/// Relative inward shift of sample points at piece boundaries, so that
/// piecewise-defined kernels are sampled on the piece's own side.
const NUDGE: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Key {
    Singleton(Word),
    Cone(Word),
    /// `x ↦ Σ_{|u| = k} tr(x)({u})`.
    Level(usize),
    /// `x ↦ (P^k 1)(x)`, the mass still running after `k` steps.
    Alive(usize),
}

impl Key {
    fn steps(&self) -> usize {
        match self {
            Key::Singleton(w) | Key::Cone(w) => w.len(),
            Key::Level(k) | Key::Alive(k) => *k,
        }
    }
}

#[derive(Debug)]
struct Piece {
    lo: f64,
    f: Chebyshev,
}

/// Piecewise Chebyshev representation of a suffix function, one list of
/// pieces per state index, with an absolute error bound.
#[derive(Debug)]
struct SuffixFn {
    pieces: Vec<Vec<Piece>>,
    err: f64,
}

impl SuffixFn {
    fn eval(&self, s: ContState) -> f64 {
        let list = &self.pieces[s.index.min(self.pieces.len() - 1)];
        let i = list.partition_point(|p| p.lo <= s.x).saturating_sub(1);
        list[i].f.eval(s.x)
    }
}

/// Trace measure of one state of a continuous model.
///
/// Suffix functions `g_u = tr(·)(S_u)` are tabulated as Chebyshev
/// interpolants over the model's smooth pieces, restricted to a window
/// around the origin that covers everything reachable within the current
/// horizon. The outermost integral is taken directly at the origin.
#[derive(Debug)]
pub struct ContinuousTracer<'m> {
    model: &'m dyn ContinuousDynamics,
    origin: ContState,
    space: WordSpace,
    horizon: usize,
    tol: f64,
    interp_tol: f64,
    table: HashMap<Key, Arc<SuffixFn>>,
}

impl<'m> ContinuousTracer<'m> {
    pub fn new(model: &'m dyn ContinuousDynamics, origin: ContState) -> Result<Self, TraceError> {
        let origin = model.normalize_state(origin).map_err(TraceError::BadState)?;
        Ok(ContinuousTracer {
            model,
            origin,
            space: WordSpace::new(model.alphabet().clone(), model.kind()),
            horizon: 0,
            tol: DEFAULT_TOL,
            interp_tol: DEFAULT_INTERPOLATION_TOL,
            table: HashMap::new(),
        })
    }

    /// Largest acceptable error bound; larger bounds are reported as
    /// numeric failures.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_interpolation_tolerance(mut self, tol: f64) -> Self {
        self.interp_tol = tol;
        self
    }

    /// Pre-sizes windows for queries of words up to `depth` letters.
    pub fn with_horizon(mut self, depth: usize) -> Self {
        self.horizon = depth;
        self
    }

    pub fn origin(&self) -> ContState {
        self.origin
    }

    fn reserve(&mut self, depth: usize) {
        if depth > self.horizon {
            self.horizon = depth;
            self.table.clear();
        }
    }

    fn constant(&self, value: impl Fn(ContState) -> f64) -> SuffixFn {
        let n = self.model.space().indices;
        let steps = self.horizon;
        let pieces = (0..n)
            .map(|i| {
                let window = self.window(i, steps);
                self.model
                    .smooth_pieces(i, window)
                    .into_iter()
                    .map(|(lo, hi)| {
                        let mid = ContState::new(i, 0.5 * (lo + hi));
                        Piece {
                            lo,
                            f: Chebyshev::constant(lo, hi, value(mid)),
                        }
                    })
                    .collect()
            })
            .collect();
        SuffixFn { pieces, err: 0.0 }
    }

    fn window(&self, index: usize, steps: usize) -> (f64, f64) {
        let (lo, hi) = self.model.window(index, self.origin, steps);
        let space = self.model.space();
        (lo.max(space.lo), hi.min(space.hi))
    }

    /// `x ↦ Σ_{a ∈ labels} ∫ prev dP_a(x, ·)`, sampled on the window for
    /// functions evaluated `steps` transitions after the origin.
    fn lift(&self, prev: &SuffixFn, labels: &[Letter], steps: usize) -> Result<SuffixFn, TraceError> {
        let model = self.model;
        let n = model.space().indices;
        let mut err: f64 = 0.0;
        let mut pieces = Vec::with_capacity(n);
        for i in 0..n {
            let window = self.window(i, steps);
            if !(window.0.is_finite() && window.1.is_finite()) {
                return Err(TraceError::Numeric {
                    what: format!("unbounded window at index {i}"),
                    err_bound: f64::INFINITY,
                    tol: self.tol,
                });
            }
            let mut list = Vec::new();
            for (lo, hi) in model.smooth_pieces(i, window) {
                let quad = Cell::new(0.0f64);
                let d = NUDGE * (hi - lo).max(1.0);
                let sample = |xs: &[f64]| {
                    let est: Vec<Estimate> = xs
                        .par_iter()
                        .map(|&x| {
                            let s = ContState::new(i, x.clamp(lo + d, hi - d));
                            labels
                                .iter()
                                .map(|&a| model.integrate(a, s, &|y| prev.eval(y), QUAD_TOL))
                                .sum()
                        })
                        .collect();
                    quad.set(est.iter().fold(quad.get(), |m, e| m.max(e.err)));
                    est.into_iter().map(|e| e.value).collect()
                };
                let fit = Chebyshev::fit_with(sample, lo, hi, self.interp_tol, MAX_DEGREE);
                err = err.max(2.0 * fit.residual + quad.get() + ROUNDOFF);
                list.push(Piece { lo, f: fit.interpolant });
            }
            pieces.push(list);
        }
        Ok(SuffixFn {
            pieces,
            err: prev.err + err,
        })
    }

    fn suffix(&mut self, key: &Key) -> Result<Arc<SuffixFn>, TraceError> {
        if let Some(f) = self.table.get(key) {
            return Ok(f.clone());
        }
        let steps = self.horizon.saturating_sub(key.steps());
        let all: Vec<Letter> = self.model.alphabet().letters().collect();
        let f = match key {
            Key::Singleton(w) if w.is_empty() => self.termination_fn()?,
            Key::Level(0) => self.termination_fn()?,
            Key::Cone(w) if w.is_empty() => self.constant(|_| 1.0),
            Key::Alive(0) => self.constant(|_| 1.0),
            Key::Singleton(w) | Key::Cone(w) => {
                let (a, rest) = w.split_first().expect("nonempty");
                let prev_key = match key {
                    Key::Singleton(_) => Key::Singleton(rest),
                    _ => Key::Cone(rest),
                };
                let prev = self.suffix(&prev_key)?;
                self.lift(&prev, &[a], steps)?
            }
            Key::Level(k) => {
                let prev = self.suffix(&Key::Level(k - 1))?;
                self.lift(&prev, &all, steps)?
            }
            Key::Alive(k) => {
                let prev = self.suffix(&Key::Alive(k - 1))?;
                self.lift(&prev, &all, steps)?
            }
        };
        let f = Arc::new(f);
        self.table.insert(key.clone(), f.clone());
        Ok(f)
    }

    fn termination_fn(&self) -> Result<SuffixFn, TraceError> {
        if !self.model.kind().has_termination() {
            return Ok(self.constant(|_| 0.0));
        }
        let model = self.model;
        let n = model.space().indices;
        let mut err: f64 = 0.0;
        let pieces = (0..n)
            .map(|i| {
                let window = self.window(i, self.horizon);
                model
                    .smooth_pieces(i, window)
                    .into_iter()
                    .map(|(lo, hi)| {
                        let d = NUDGE * (hi - lo).max(1.0);
                        let fit = Chebyshev::fit(
                            &|x| model.termination(ContState::new(i, x.clamp(lo + d, hi - d))),
                            lo,
                            hi,
                            self.interp_tol,
                            MAX_DEGREE,
                        );
                        err = err.max(2.0 * fit.residual);
                        Piece { lo, f: fit.interpolant }
                    })
                    .collect()
            })
            .collect();
        Ok(SuffixFn { pieces, err })
    }

    /// Value at the origin of the function stored under `key`, with the
    /// last integral computed by quadrature at the origin itself.
    fn at_origin(&mut self, key: Key, what: impl Fn() -> String) -> Result<TraceValue, TraceError> {
        let (value, err) = match &key {
            Key::Cone(w) if w.is_empty() => return Ok(TraceValue::one()),
            Key::Alive(0) => return Ok(TraceValue::one()),
            Key::Singleton(w) if w.is_empty() => (self.model.termination(self.origin), 0.0),
            Key::Level(0) => (self.model.termination(self.origin), 0.0),
            Key::Singleton(w) | Key::Cone(w) => {
                let (a, rest) = w.split_first().expect("nonempty");
                let prev_key = match key {
                    Key::Singleton(_) => Key::Singleton(rest),
                    _ => Key::Cone(rest),
                };
                self.integrate_at_origin(&[a], &prev_key)?
            }
            Key::Level(k) | Key::Alive(k) => {
                let all: Vec<Letter> = self.model.alphabet().letters().collect();
                let prev_key = match key {
                    Key::Level(_) => Key::Level(k - 1),
                    _ => Key::Alive(k - 1),
                };
                self.integrate_at_origin(&all, &prev_key)?
            }
        };
        if err > self.tol {
            return Err(TraceError::Numeric {
                what: what(),
                err_bound: err,
                tol: self.tol,
            });
        }
        checked(TraceValue::Approx { value, err_bound: err })
    }

    fn integrate_at_origin(&mut self, labels: &[Letter], prev_key: &Key) -> Result<(f64, f64), TraceError> {
        let prev = self.suffix(prev_key)?;
        let mut est = Estimate::default();
        let mut mass = 0.0;
        for &a in labels {
            est = est + self.model.integrate(a, self.origin, &|y| prev.eval(y), QUAD_TOL);
            mass += self.model.mass(a, self.origin);
        }
        let roundoff = ROUNDOFF * est.value.abs().max(1.0);
        Ok((est.value, est.err + prev.err * mass.max(1.0) + roundoff))
    }

    fn describe(&self, s: &BaseSet) -> String {
        format!("{} at {}", s.display(self.space.alphabet()), self.origin)
    }
}

impl TraceMeasure for ContinuousTracer<'_> {
    fn space(&self) -> &WordSpace {
        &self.space
    }

    fn base(&mut self, s: &BaseSet) -> Result<TraceValue, TraceError> {
        require_kind(&self.space, s)?;
        let what = self.describe(s);
        match s {
            BaseSet::Empty => Ok(TraceValue::zero()),
            BaseSet::Singleton(u) => {
                self.reserve(u.len());
                self.at_origin(Key::Singleton(u.clone()), || what.clone())
            }
            BaseSet::Cone(u) => {
                self.reserve(u.len());
                self.at_origin(Key::Cone(u.clone()), || what.clone())
            }
        }
    }

    fn finite_words(&mut self, depth: usize) -> Result<Bracket, TraceError> {
        require_finite_kind(self.space.kind())?;
        self.reserve(depth + 1);
        let mut partial = Vec::with_capacity(depth + 1);
        let mut sum = TraceValue::Approx { value: 0.0, err_bound: 0.0 };
        for k in 0..=depth {
            let level = self.at_origin(Key::Level(k), || format!("words of length {k}"))?;
            sum = sum.add(&level);
            partial.push(sum.clone());
        }
        let alive = self.at_origin(Key::Alive(depth + 1), || format!("mass alive after {} steps", depth + 1))?;
        let upper = sum.add(&alive);
        let upper = TraceValue::Approx {
            value: upper.value().min(1.0),
            err_bound: upper.err_bound(),
        };
        Ok(Bracket {
            depth,
            lower: checked(sum)?,
            upper: checked(upper)?,
            partial,
            limit: None,
        })
    }

    fn infinite_singleton(&mut self, w: &InfiniteWord, depth: usize) -> Result<InfiniteSingleton, TraceError> {
        require_infinite_kind(self.space.kind())?;
        let p = w.period().len();
        let at_depth = self.base(&BaseSet::Cone(w.truncate(depth)))?;
        let next_period = self.base(&BaseSet::Cone(w.truncate(depth + p)))?;
        Ok(InfiniteSingleton {
            depth,
            at_depth,
            next_period,
            limit: None,
        })
    }
}
