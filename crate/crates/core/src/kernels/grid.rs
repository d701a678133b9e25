use rand::{Rng, RngCore};

use super::continuous::{ContState, ContinuousDynamics, DensityPiece, Profile, StateSpace};
use crate::wordspace::{Alphabet, Letter, SpaceKind};

/// User-defined kernel on `[lo, hi]` split into `cells` equal cells.
///
/// `densities[a][i][j]` is the Lebesgue density of `P_a(x, ·)` on cell `j`
/// for every `x` in cell `i`; `termination[i]` is the termination weight
/// of cell `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridKernel {
    alphabet: Alphabet,
    kind: SpaceKind,
    lo: f64,
    hi: f64,
    densities: Vec<Vec<Vec<f64>>>,
    termination: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GridError {
    #[error("grid interval [{0}, {1}] is empty or not finite")]
    BadInterval(f64, f64),
    #[error("grid needs at least one cell")]
    NoCells,
    #[error("density matrix for `{label}` must be {cells}x{cells}")]
    Shape { label: String, cells: usize },
    #[error("expected one density matrix per label ({expected}), found {found}")]
    LabelCount { expected: usize, found: usize },
    #[error("negative or non-finite density {value} for `{label}`")]
    BadDensity { label: String, value: f64 },
    #[error("termination vector must have one weight in [0,1] per cell")]
    BadTermination,
    #[error("kind {0} has no termination")]
    TerminationNotAllowed(SpaceKind),
}

impl GridKernel {
    pub fn new(
        alphabet: Alphabet,
        kind: SpaceKind,
        interval: (f64, f64),
        densities: Vec<Vec<Vec<f64>>>,
        termination: Option<Vec<f64>>,
    ) -> Result<Self, GridError> {
        let (lo, hi) = interval;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(GridError::BadInterval(lo, hi));
        }
        let cells = densities.first().map_or(0, Vec::len);
        if cells == 0 {
            return Err(GridError::NoCells);
        }
        if densities.len() != alphabet.len() {
            return Err(GridError::LabelCount {
                expected: alphabet.len(),
                found: densities.len(),
            });
        }
        for (a, m) in densities.iter().enumerate() {
            let label = alphabet.symbol(Letter(a)).to_string();
            if m.len() != cells || m.iter().any(|r| r.len() != cells) {
                return Err(GridError::Shape { label, cells });
            }
            if let Some(&value) = m.iter().flatten().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(GridError::BadDensity { label, value });
            }
        }
        let termination = match termination {
            Some(t) => {
                if !kind.has_termination() && t.iter().any(|w| *w != 0.0) {
                    return Err(GridError::TerminationNotAllowed(kind));
                }
                if t.len() != cells || t.iter().any(|w| !(0.0..=1.0).contains(w)) {
                    return Err(GridError::BadTermination);
                }
                t
            }
            None => vec![0.0; cells],
        };
        Ok(GridKernel {
            alphabet,
            kind,
            lo,
            hi,
            densities,
            termination,
        })
    }

    pub fn cells(&self) -> usize {
        self.termination.len()
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn densities(&self) -> &[Vec<Vec<f64>>] {
        &self.densities
    }

    pub fn termination_weights(&self) -> &[f64] {
        &self.termination
    }

    fn width(&self) -> f64 {
        (self.hi - self.lo) / self.cells() as f64
    }

    fn cell_bounds(&self, j: usize) -> (f64, f64) {
        let w = self.width();
        let lo = self.lo + j as f64 * w;
        let hi = if j + 1 == self.cells() { self.hi } else { lo + w };
        (lo, hi)
    }

    /// Cells are half-open `[lo, hi)`, the last one closed.
    pub fn cell_of(&self, x: f64) -> usize {
        let i = ((x - self.lo) / self.width()).floor();
        (i.max(0.0) as usize).min(self.cells() - 1)
    }
}

impl ContinuousDynamics for GridKernel {
    fn describe(&self) -> String {
        format!("grid kernel ({} cells on [{}, {}])", self.cells(), self.lo, self.hi)
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn kind(&self) -> SpaceKind {
        self.kind
    }

    fn space(&self) -> StateSpace {
        StateSpace::interval(self.lo, self.hi)
    }

    fn mass(&self, a: Letter, x: ContState) -> f64 {
        let i = self.cell_of(x.x);
        self.densities[a.0][i]
            .iter()
            .enumerate()
            .map(|(j, d)| {
                let (l, h) = self.cell_bounds(j);
                d * (h - l)
            })
            .sum()
    }

    fn termination(&self, x: ContState) -> f64 {
        self.termination[self.cell_of(x.x)]
    }

    fn pieces(&self, a: Letter, x: ContState) -> Vec<DensityPiece> {
        let i = self.cell_of(x.x);
        self.densities[a.0][i]
            .iter()
            .enumerate()
            .filter(|(_, d)| **d > 0.0)
            .map(|(j, d)| {
                let (lo, hi) = self.cell_bounds(j);
                DensityPiece {
                    index: 0,
                    lo,
                    hi,
                    profile: Profile::Uniform(*d),
                }
            })
            .collect()
    }

    fn smooth_pieces(&self, _index: usize, window: (f64, f64)) -> Vec<(f64, f64)> {
        (0..self.cells())
            .map(|j| self.cell_bounds(j))
            .filter(|(l, h)| *h > window.0 && *l < window.1)
            .map(|(l, h)| (l.max(window.0), h.min(window.1)))
            .collect()
    }

    fn sample_successor(&self, a: Letter, x: ContState, rng: &mut dyn RngCore) -> ContState {
        let i = self.cell_of(x.x);
        let row = &self.densities[a.0][i];
        let total: f64 = row.iter().sum();
        let mut u = rng.gen::<f64>() * total;
        let mut target = row.iter().rposition(|d| *d > 0.0).unwrap_or(0);
        for (j, d) in row.iter().enumerate() {
            if u < *d {
                target = j;
                break;
            }
            u -= d;
        }
        let (lo, hi) = self.cell_bounds(target);
        ContState::at(lo + rng.gen::<f64>() * (hi - lo))
    }

    fn probe_states(&self) -> Vec<ContState> {
        (0..self.cells())
            .map(|j| {
                let (l, h) = self.cell_bounds(j);
                ContState::at(0.5 * (l + h))
            })
            .collect()
    }

    fn mass_tolerance(&self) -> f64 {
        1e-6
    }
}
