//! Sampling runs of a model and estimating trace probabilities.
//!
//! Run `i` of a batch with seed `s` draws from `ChaCha8Rng` seeded with
//! `s` and switched to stream `i`, so every run is reproducible on its own
//! and results do not depend on how runs are spread over threads.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::kernels::{ContState, ContinuousDynamics, DiscreteModel};
use crate::model::{Model, State};
use crate::trace::TraceError;
use crate::wordspace::{BaseSet, Letter, Word, WordError};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Terminated,
    /// Still running when the depth limit was reached.
    Truncated,
    /// Lost to the residual mass of a sub-probability step.
    Dead,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunSample {
    pub prefix: Word,
    pub status: RunStatus,
}

/// Frequency estimate with a Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Estimate {
    pub point_estimate: f64,
    /// Half-width of the 95% interval.
    pub ci95: f64,
    pub lower: f64,
    pub upper: f64,
    pub successes: u64,
    pub n: u64,
}

impl Estimate {
    pub fn wilson(successes: u64, n: u64) -> Self {
        assert!(n >= 1, "estimate needs at least one sample");
        let nf = n as f64;
        let p = successes as f64 / nf;
        let z2 = Z95 * Z95;
        let denom = 1.0 + z2 / nf;
        let center = (p + z2 / (2.0 * nf)) / denom;
        let half = Z95 / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
        Estimate {
            point_estimate: p,
            ci95: half,
            lower: if successes == 0 { 0.0 } else { (center - half).max(0.0) },
            upper: if successes == n { 1.0 } else { (center + half).min(1.0) },
            successes,
            n,
        }
    }

    /// Whether `value ± slack` meets the interval.
    pub fn covers(&self, value: f64, slack: f64) -> bool {
        value + slack >= self.lower && value - slack <= self.upper
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SampleError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("sample count must be at least 1")]
    NoRuns,
}

enum Step<X> {
    Emit(Letter, X),
    Terminate,
    Dead,
}

trait Stepper: Sync {
    type X: Copy + Send + Sync;
    fn step(&self, x: Self::X, rng: &mut dyn RngCore) -> Step<Self::X>;
}

struct DiscreteStepper(DiscreteModel<f64>);

impl Stepper for DiscreteStepper {
    type X = usize;

    fn step(&self, x: usize, rng: &mut dyn RngCore) -> Step<usize> {
        let mut u: f64 = rng.gen();
        let t = *self.0.termination(x);
        if u < t {
            return Step::Terminate;
        }
        u -= t;
        for tr in self.0.transitions(x) {
            if u < tr.weight {
                return Step::Emit(tr.label, tr.target);
            }
            u -= tr.weight;
        }
        Step::Dead
    }
}

struct ContinuousStepper<'m>(&'m dyn ContinuousDynamics);

impl Stepper for ContinuousStepper<'_> {
    type X = ContState;

    fn step(&self, x: ContState, rng: &mut dyn RngCore) -> Step<ContState> {
        let mut u: f64 = rng.gen();
        let t = self.0.termination(x);
        if u < t {
            return Step::Terminate;
        }
        u -= t;
        for a in self.0.alphabet().letters() {
            let m = self.0.mass(a, x);
            if u < m {
                return Step::Emit(a, self.0.sample_successor(a, x, rng));
            }
            u -= m;
        }
        Step::Dead
    }
}

fn run_rng(seed: u64, run: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run);
    rng
}

fn one_run<P: Stepper>(p: &P, x: P::X, max_depth: usize, rng: &mut dyn RngCore) -> RunSample {
    let mut letters = Vec::with_capacity(max_depth);
    let mut x = x;
    loop {
        match p.step(x, rng) {
            Step::Terminate => {
                return RunSample {
                    prefix: Word(letters),
                    status: RunStatus::Terminated,
                }
            }
            Step::Dead => {
                return RunSample {
                    prefix: Word(letters),
                    status: RunStatus::Dead,
                }
            }
            Step::Emit(_, _) if letters.len() == max_depth => {
                return RunSample {
                    prefix: Word(letters),
                    status: RunStatus::Truncated,
                }
            }
            Step::Emit(a, y) => {
                letters.push(a);
                x = y;
            }
        }
    }
}

fn runs<P: Stepper>(p: &P, x: P::X, max_depth: usize, n: u64, seed: u64) -> Vec<RunSample> {
    (0..n)
        .into_par_iter()
        .map(|i| one_run(p, x, max_depth, &mut run_rng(seed, i)))
        .collect()
}

/// `n` independent runs from `x`, each cut off after `max_depth` labels.
///
/// Each step draws `u ~ U[0,1)` and terminates if `u < term(x)`, otherwise
/// emits the first label whose cumulative mass exceeds `u`, otherwise
/// dies. After `max_depth` labels one more draw tells apart terminated,
/// dead and still-running (truncated) runs.
pub fn sample_runs(model: &Model, x: &State, max_depth: usize, n: u64, seed: u64) -> Result<Vec<RunSample>, SampleError> {
    if n == 0 {
        return Err(SampleError::NoRuns);
    }
    match (model, x) {
        (Model::Discrete(m), State::Discrete(i)) => {
            Ok(runs(&DiscreteStepper(m.to_f64()), *i, max_depth, n, seed))
        }
        (Model::Continuous(m), State::Continuous(s)) => {
            let s = m.normalize_state(*s).map_err(TraceError::BadState)?;
            Ok(runs(&ContinuousStepper(m.as_ref()), s, max_depth, n, seed))
        }
        _ => Err(TraceError::BadState(format!("{x} is not a state of this model")).into()),
    }
}

/// Whether a run counts towards `s`: for a cone `↑u` the first `|u|`
/// labels are `u`; for `{u}` the run emitted exactly `u` and terminated.
pub fn run_hits(s: &BaseSet, r: &RunSample) -> bool {
    match s {
        BaseSet::Empty => false,
        BaseSet::Cone(u) => u.is_prefix_of(&r.prefix),
        BaseSet::Singleton(u) => r.prefix == *u && r.status == RunStatus::Terminated,
    }
}

/// Frequency of `s` among `n` runs of depth `|u|`.
pub fn estimate_base(model: &Model, x: &State, s: &BaseSet, n: u64, seed: u64) -> Result<Estimate, SampleError> {
    if n == 0 {
        return Err(SampleError::NoRuns);
    }
    model.space().check(s)?;
    let Some(u) = s.word() else {
        return Ok(Estimate::wilson(0, n));
    };
    let samples = sample_runs(model, x, u.len(), n, seed)?;
    let hits = samples.iter().filter(|r| run_hits(s, r)).count() as u64;
    Ok(Estimate::wilson(hits, n))
}
