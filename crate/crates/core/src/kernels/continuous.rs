use std::fmt;

use rand::RngCore;

use super::Kernel;
use crate::numeric::{self, Estimate};
use crate::wordspace::{Alphabet, Letter, SpaceKind};

/// Point of `I × [lo, hi]` for a finite index set `I = {0..indices}`.
/// Plain interval spaces use index 0 throughout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContState {
    pub index: usize,
    pub x: f64,
}

impl ContState {
    pub fn at(x: f64) -> Self {
        ContState { index: 0, x }
    }

    pub fn new(index: usize, x: f64) -> Self {
        ContState { index, x }
    }
}

impl fmt::Display for ContState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.index, self.x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateSpace {
    pub indices: usize,
    pub lo: f64,
    pub hi: f64,
}

impl StateSpace {
    pub fn interval(lo: f64, hi: f64) -> Self {
        StateSpace { indices: 1, lo, hi }
    }

    pub fn contains(&self, s: ContState) -> bool {
        s.index < self.indices && s.x >= self.lo && s.x <= self.hi
    }
}

/// Lebesgue density of one target piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    Uniform(f64),
    Gaussian { mean: f64, sd: f64 },
}

impl Profile {
    pub fn density(&self, x: f64) -> f64 {
        match *self {
            Profile::Uniform(c) => c,
            Profile::Gaussian { mean, sd } => {
                let t = (x - mean) / sd;
                (-0.5 * t * t).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt())
            }
        }
    }
}

/// `density` on `{index} × [lo, hi]`; breakpoints of the integrand sit at
/// piece boundaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityPiece {
    pub index: usize,
    pub lo: f64,
    pub hi: f64,
    pub profile: Profile,
}

/// Transition structure of a continuous-state generative system.
///
/// For each label `a`, `P_a(x, ·)` is given by density pieces plus atoms;
/// `mass` reports `P_a(x, X)` analytically.
pub trait ContinuousDynamics: Send + Sync + fmt::Debug {
    fn describe(&self) -> String;

    fn alphabet(&self) -> &Alphabet;

    fn kind(&self) -> SpaceKind;

    fn space(&self) -> StateSpace;

    /// Maps a user-supplied state into the space, or explains why it is not
    /// a state.
    fn normalize_state(&self, s: ContState) -> Result<ContState, String> {
        if self.space().contains(s) {
            Ok(s)
        } else {
            Err(format!("state {s} is outside the state space"))
        }
    }

    fn mass(&self, a: Letter, x: ContState) -> f64;

    fn termination(&self, _x: ContState) -> f64 {
        0.0
    }

    fn pieces(&self, a: Letter, x: ContState) -> Vec<DensityPiece>;

    fn atoms(&self, _a: Letter, _x: ContState) -> Vec<(ContState, f64)> {
        Vec::new()
    }

    /// Subintervals of `window` on which functions of the form
    /// `y ↦ ∫ g dP_b(y, ·)` are smooth.
    fn smooth_pieces(&self, _index: usize, window: (f64, f64)) -> Vec<(f64, f64)> {
        vec![window]
    }

    /// Range of the real coordinate at `index` that matters for a query at
    /// `origin` with `steps` further transitions.
    fn window(&self, _index: usize, _origin: ContState, _steps: usize) -> (f64, f64) {
        let s = self.space();
        (s.lo, s.hi)
    }

    /// Draws a successor under the normalized `P_a(x, ·)`.
    fn sample_successor(&self, a: Letter, x: ContState, rng: &mut dyn RngCore) -> ContState;

    /// States probed by validation.
    fn probe_states(&self) -> Vec<ContState>;

    /// Allowed deviation of total mass from its nominal value.
    fn mass_tolerance(&self) -> f64;

    /// `∫ g dP_a(x, ·)` by composite Gauss–Legendre over the density pieces.
    fn integrate(&self, a: Letter, x: ContState, g: &dyn Fn(ContState) -> f64, tol: f64) -> Estimate {
        let pieces = self.pieces(a, x);
        let per_piece = tol / (pieces.len().max(1) as f64);
        let dense: Estimate = pieces
            .iter()
            .map(|p| {
                numeric::integrate(
                    &|y| g(ContState::new(p.index, y)) * p.profile.density(y),
                    p.lo,
                    p.hi,
                    per_piece,
                )
            })
            .sum();
        let atomic: f64 = self.atoms(a, x).iter().map(|&(s, w)| w * g(s)).sum();
        Estimate {
            value: dense.value + atomic,
            err: dense.err,
        }
    }
}

/// `P_a` of a continuous model as a [`Kernel`] over [`ContState`].
#[derive(Debug, Clone, Copy)]
pub struct LabelKernel<'m> {
    pub model: &'m dyn ContinuousDynamics,
    pub label: Letter,
    pub tol: f64,
}

impl<'m> LabelKernel<'m> {
    pub fn new(model: &'m dyn ContinuousDynamics, label: Letter) -> Self {
        LabelKernel { model, label, tol: 1e-13 }
    }
}

impl Kernel<f64> for LabelKernel<'_> {
    type Source = ContState;
    type Target = ContState;

    fn integrate(&self, x: &ContState, g: &dyn Fn(&ContState) -> f64) -> f64 {
        self.model
            .integrate(self.label, *x, &|s| g(&s), self.tol)
            .value
    }

    fn mass(&self, x: &ContState) -> f64 {
        self.model.mass(self.label, *x)
    }
}
