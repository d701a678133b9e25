//! Built-in continuous families.

use rand::{Rng, RngCore};
use rand_distr::{Distribution, Normal};

use super::continuous::{ContState, ContinuousDynamics, DensityPiece, Profile, StateSpace};
use crate::wordspace::{Alphabet, Letter, SpaceKind};

/// Gaussian tails beyond this many standard deviations are dropped.
pub const GAUSSIAN_CUTOFF: f64 = 8.0;

/// Named parametric model families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinFamily {
    JumpGame,
    GaussianJumper { horizon: u32 },
}

impl BuiltinFamily {
    pub fn name(&self) -> &'static str {
        match self {
            BuiltinFamily::JumpGame => "jump-game",
            BuiltinFamily::GaussianJumper { .. } => "gaussian-jumper",
        }
    }

    pub fn instantiate(&self) -> Box<dyn ContinuousDynamics> {
        match *self {
            BuiltinFamily::JumpGame => Box::new(JumpGame::new()),
            BuiltinFamily::GaussianJumper { horizon } => Box::new(GaussianJumper::new(horizon)),
        }
    }
}

/// Player on `[0, 1]` who jumps left with probability `z`, landing
/// uniformly on `[0, z]`, and right otherwise, landing uniformly on `[z, 1]`.
#[derive(Debug, Clone)]
pub struct JumpGame {
    alphabet: Alphabet,
}

impl JumpGame {
    pub const LEFT: Letter = Letter(0);
    pub const RIGHT: Letter = Letter(1);

    pub fn new() -> Self {
        JumpGame {
            alphabet: Alphabet::new(["L", "R"]).expect("static alphabet"),
        }
    }
}

impl Default for JumpGame {
    fn default() -> Self {
        Self::new()
    }
}

impl ContinuousDynamics for JumpGame {
    fn describe(&self) -> String {
        "builtin:jump-game".into()
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn kind(&self) -> SpaceKind {
        SpaceKind::Omega
    }

    fn space(&self) -> StateSpace {
        StateSpace::interval(0.0, 1.0)
    }

    fn mass(&self, a: Letter, x: ContState) -> f64 {
        if a == Self::LEFT {
            x.x
        } else {
            1.0 - x.x
        }
    }

    fn pieces(&self, a: Letter, x: ContState) -> Vec<DensityPiece> {
        let (lo, hi) = if a == Self::LEFT { (0.0, x.x) } else { (x.x, 1.0) };
        vec![DensityPiece {
            index: 0,
            lo,
            hi,
            profile: Profile::Uniform(1.0),
        }]
    }

    fn sample_successor(&self, a: Letter, x: ContState, rng: &mut dyn RngCore) -> ContState {
        let u: f64 = rng.gen();
        if a == Self::LEFT {
            ContState::at(u * x.x)
        } else {
            ContState::at(x.x + u * (1.0 - x.x))
        }
    }

    fn probe_states(&self) -> Vec<ContState> {
        (0..10).map(|k| ContState::at(k as f64 / 9.0)).collect()
    }

    fn mass_tolerance(&self) -> f64 {
        1e-9
    }
}

/// Player on `ℕ0 × ℝ` whose jump from `(t, z)` lands according to the left
/// or right half of a normal density centred at `z` with standard
/// deviation `1/(t+1)`, announcing `L` or `R`; from time `T` on it stays
/// put and announces `N` forever.
///
/// All times `t ≥ T` behave identically and are represented by index `T`.
#[derive(Debug, Clone)]
pub struct GaussianJumper {
    alphabet: Alphabet,
    horizon: u32,
}

impl GaussianJumper {
    pub const LEFT: Letter = Letter(0);
    pub const STAY: Letter = Letter(1);
    pub const RIGHT: Letter = Letter(2);

    pub fn new(horizon: u32) -> Self {
        GaussianJumper {
            alphabet: Alphabet::new(["L", "N", "R"]).expect("static alphabet"),
            horizon,
        }
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    fn sigma(t: usize) -> f64 {
        1.0 / (t as f64 + 1.0)
    }

    fn jumping(&self, x: ContState) -> bool {
        x.index < self.horizon as usize
    }
}

impl ContinuousDynamics for GaussianJumper {
    fn describe(&self) -> String {
        format!("builtin:gaussian-jumper?T={}", self.horizon)
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn kind(&self) -> SpaceKind {
        SpaceKind::Omega
    }

    fn space(&self) -> StateSpace {
        StateSpace {
            indices: self.horizon as usize + 1,
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    fn normalize_state(&self, s: ContState) -> Result<ContState, String> {
        if !s.x.is_finite() {
            return Err(format!("state {s} has a non-finite position"));
        }
        Ok(ContState::new(s.index.min(self.horizon as usize), s.x))
    }

    fn mass(&self, a: Letter, x: ContState) -> f64 {
        match (self.jumping(x), a) {
            (true, Self::LEFT) | (true, Self::RIGHT) => 0.5,
            (false, Self::STAY) => 1.0,
            _ => 0.0,
        }
    }

    fn pieces(&self, a: Letter, x: ContState) -> Vec<DensityPiece> {
        if !self.jumping(x) || a == Self::STAY {
            return Vec::new();
        }
        let sd = Self::sigma(x.index);
        let profile = Profile::Gaussian { mean: x.x, sd };
        let sign = if a == Self::LEFT { -1.0 } else { 1.0 };
        (0..GAUSSIAN_CUTOFF as usize)
            .map(|k| {
                let near = x.x + sign * k as f64 * sd;
                let far = x.x + sign * (k + 1) as f64 * sd;
                DensityPiece {
                    index: x.index + 1,
                    lo: near.min(far),
                    hi: near.max(far),
                    profile,
                }
            })
            .collect()
    }

    fn atoms(&self, a: Letter, x: ContState) -> Vec<(ContState, f64)> {
        if !self.jumping(x) && a == Self::STAY {
            vec![(x, 1.0)]
        } else {
            Vec::new()
        }
    }

    fn window(&self, _index: usize, origin: ContState, steps: usize) -> (f64, f64) {
        let reach = GAUSSIAN_CUTOFF * Self::sigma(origin.index) * (steps as f64 + 1.0);
        (origin.x - reach, origin.x + reach)
    }

    fn sample_successor(&self, a: Letter, x: ContState, rng: &mut dyn RngCore) -> ContState {
        if !self.jumping(x) {
            return x;
        }
        let normal = Normal::new(0.0, Self::sigma(x.index)).expect("positive sd");
        // Rejection from the full normal keeps the exact half-normal law.
        loop {
            let d: f64 = normal.sample(rng);
            let accept = if a == Self::LEFT { d <= 0.0 } else { d >= 0.0 };
            if accept {
                return ContState::new(x.index + 1, x.x + d);
            }
        }
    }

    fn probe_states(&self) -> Vec<ContState> {
        (0..=self.horizon as usize)
            .flat_map(|t| [-4.2, 0.0, 1.7].map(|z| ContState::new(t, z)))
            .collect()
    }

    fn mass_tolerance(&self) -> f64 {
        1e-9
    }
}
