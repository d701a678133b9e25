//! Ready-made discrete models.

use crate::kernels::DiscreteModel;
use crate::scalar::{parse_rational, Rational};
use crate::wordspace::{Alphabet, Letter, SpaceKind};

fn q(s: &str) -> Rational {
    parse_rational(s).expect("literal weight")
}

/// Three states over `{a, b}` with both finite and infinite traces:
///
/// ```text
/// 0 --b,1--> 0
/// 1 --b,1/3--> 0    1 --a,1/3--> 2    1 ✓ 1/3
/// 2 --a,2/3--> 2    2 ✓ 1/3
/// ```
pub fn mixed_traces() -> DiscreteModel<Rational> {
    let alphabet = Alphabet::new(["a", "b"]).expect("static alphabet");
    let (a, b) = (Letter(0), Letter(1));
    let mut m = DiscreteModel::with_states(alphabet, SpaceKind::Infty, 3).expect("three states");
    let edges = [(0, b, 0, "1"), (1, b, 0, "1/3"), (1, a, 2, "1/3"), (2, a, 2, "2/3")];
    for (from, l, to, w) in edges {
        m.add_transition(from, l, to, q(w)).expect("valid edge");
    }
    m.set_termination(1, q("1/3")).expect("valid weight");
    m.set_termination(2, q("1/3")).expect("valid weight");
    m
}

/// Finite chain over `{L, N, R}` that is trace equivalent to the Gaussian
/// jumper with horizon `t_max`: states `0..t_max` move to the next state on
/// `L` or `R` with probability 1/2 each, and state `t_max` loops on `N`.
pub fn jumper_chain(t_max: u32) -> DiscreteModel<Rational> {
    let alphabet = Alphabet::new(["L", "N", "R"]).expect("static alphabet");
    let n = t_max as usize + 1;
    let mut m = DiscreteModel::with_states(alphabet, SpaceKind::Omega, n).expect("nonempty chain");
    for t in 0..n - 1 {
        m.add_transition(t, Letter(0), t + 1, q("1/2")).expect("valid edge");
        m.add_transition(t, Letter(2), t + 1, q("1/2")).expect("valid edge");
    }
    m.add_transition(n - 1, Letter(1), n - 1, q("1")).expect("valid edge");
    m
}
