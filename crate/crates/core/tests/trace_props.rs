mod common;

use std::sync::Arc;

use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ptstrace::kernels::{ContState, ContinuousDynamics, GaussianJumper, JumpGame};
use ptstrace::model::{Model, State};
use ptstrace::trace::{DiscreteTracer, TraceMeasure};
use ptstrace::wordspace::{BaseSet, SpaceKind, Word, WordSpace};
use ptstrace::{ExactModel, Rational};

fn model_from(seed: u64) -> ExactModel {
    common::random_model(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// The same system with its states listed in reverse order.
fn reversed(m: &ExactModel) -> ExactModel {
    let n = m.len();
    let mut r = ExactModel::with_states(m.alphabet().clone(), m.kind(), n).unwrap();
    for x in 0..n {
        for t in m.transitions(x) {
            r.add_transition(n - 1 - x, t.label, n - 1 - t.target, t.weight.clone()).unwrap();
        }
        if m.kind().has_termination() {
            r.set_termination(n - 1 - x, m.termination(x).clone()).unwrap();
        }
    }
    r
}

fn generators(sp: &WordSpace, depth: usize) -> Vec<BaseSet> {
    let mut out = Vec::new();
    for u in sp.alphabet().words_up_to(depth) {
        if sp.kind().admits_singletons() {
            out.push(BaseSet::Singleton(u.clone()));
        }
        if sp.kind().admits_cones() {
            out.push(BaseSet::Cone(u));
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mass_balance_is_exact(seed in any::<u64>()) {
        let m = model_from(seed);
        for x in 0..m.len() {
            let total = m.total_mass(x);
            if m.kind().is_probability() {
                prop_assert_eq!(total, Rational::one());
            } else {
                prop_assert!(total <= Rational::one());
            }
        }
    }

    #[test]
    fn normalization_and_monotonicity(seed in any::<u64>()) {
        let m = model_from(seed);
        let mut t = DiscreteTracer::new(&m);
        for x in 0..m.len() {
            if m.kind().admits_cones() {
                prop_assert_eq!(t.base(x, &BaseSet::Cone(Word::empty())).unwrap().exact().cloned(), Some(Rational::one()));
                for u in m.alphabet().words_up_to(3) {
                    let whole = t.base(x, &BaseSet::Cone(u.clone())).unwrap().value();
                    for a in m.alphabet().letters() {
                        prop_assert!(t.base(x, &BaseSet::Cone(u.push(a))).unwrap().value() <= whole);
                    }
                }
            }
            if m.kind().has_termination() {
                let b = t.finite_words(x, 8).unwrap();
                prop_assert!(b.upper.value() <= 1.0);
                prop_assert!(b.partial.windows(2).all(|w| w[0].value() <= w[1].value()));
            }
        }
    }

    #[test]
    fn generators_determine_ring_values(seed in any::<u64>(), picks in prop::collection::vec(any::<prop::sample::Index>(), 1..5)) {
        let m = model_from(seed);
        let r = reversed(&m);
        let sp = WordSpace::new(m.alphabet().clone(), m.kind());
        let gens = generators(&sp, 3);
        let mut ta = DiscreteTracer::new(&m);
        let mut tb = DiscreteTracer::new(&r);
        let parts: Vec<BaseSet> = picks.iter().map(|i| gens[i.index(gens.len())].clone()).collect();
        let ring = sp.normalize(&parts).unwrap();
        for x in 0..m.len() {
            let y = m.len() - 1 - x;
            for g in &gens {
                prop_assert_eq!(ta.base(x, g).unwrap(), tb.base(y, g).unwrap());
            }
            let va = ta.ring(x, &ring).unwrap();
            prop_assert_eq!(&va, &tb.ring(y, &ring).unwrap());
            let sum = ring.parts().iter().fold(Rational::zero(), |s, p| s + ta.base(x, p).unwrap().exact().unwrap());
            prop_assert_eq!(va.exact().cloned(), Some(sum));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn jump_game_cone_additivity(z in 0.0f64..=1.0) {
        let m = Model::Continuous(Arc::new(JumpGame::new()));
        let x = State::Continuous(ContState::at(z));
        let mut t = m.tracer(&x, 1e-6).unwrap();
        for u in m.alphabet().words_up_to(4) {
            let whole = t.base(&BaseSet::Cone(u.clone())).unwrap().value();
            let mut parts = 0.0;
            for a in m.alphabet().letters() {
                parts += t.base(&BaseSet::Cone(u.push(a))).unwrap().value();
            }
            prop_assert!((whole - parts).abs() <= 1e-6, "z={} u={:?}: {} vs {}", z, u, whole, parts);
            prop_assert!(parts <= whole + 1e-9);
        }
    }

    #[test]
    fn integrators_are_monotone(z in -6.0f64..6.0, c in 0.0f64..1.0) {
        let g = GaussianJumper::new(3);
        let j = JumpGame::new();
        let low = |s: ContState| (s.x * 0.7).sin().abs() * c;
        let high = |s: ContState| (s.x * 0.7).sin().abs() * c + 0.1 * (1.0 + s.x.cos());
        for (m, x) in [
            (&g as &dyn ContinuousDynamics, ContState::new(0, z)),
            (&j as &dyn ContinuousDynamics, ContState::at(z.abs() / 6.0)),
        ] {
            for a in m.alphabet().letters() {
                let lo = m.integrate(a, x, &low, 1e-10);
                let hi = m.integrate(a, x, &high, 1e-10);
                prop_assert!(lo.value <= hi.value + lo.err + hi.err + 1e-12);
            }
        }
    }
}

#[test]
fn sub_probability_kinds_stay_below_one() {
    let mut seen = 0;
    for seed in 0..200 {
        let m = model_from(seed);
        if m.kind() != SpaceKind::Star {
            continue;
        }
        seen += 1;
        let mut t = DiscreteTracer::new(&m);
        for x in 0..m.len() {
            let b = t.finite_words(x, 12).unwrap();
            assert!(b.lower.value() <= b.upper.value() + 1e-15);
            assert!(b.upper.value() <= 1.0);
        }
    }
    assert!(seen > 20);
}

#[test]
fn state_trace_matches_tracer() {
    let m = model_from(3);
    let sp = WordSpace::new(m.alphabet().clone(), m.kind());
    for x in 0..m.len() {
        let mut st = DiscreteTracer::new(&m).at(x).unwrap();
        let mut t = DiscreteTracer::new(&m);
        for g in generators(&sp, 2) {
            assert_eq!(st.base(&g).unwrap(), t.base(x, &g).unwrap());
        }
    }
}
