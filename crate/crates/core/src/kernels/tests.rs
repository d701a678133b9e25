use num_traits::{One, Zero};
use proptest::prelude::*;

use super::*;
use crate::catalog;
use crate::scalar::{parse_rational, Rational};
use crate::wordspace::{Alphabet, SpaceKind};

fn q(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

fn matmul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    a.iter()
        .map(|row| {
            (0..b[0].len())
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .fold(Rational::zero(), |acc, (w, brow)| acc + w * &brow[j])
                })
                .collect()
        })
        .collect()
}

fn composite_dense<F, G>(k: &Composed<F, G>, n: usize, m: usize) -> Vec<Vec<Rational>>
where
    F: Kernel<Rational, Source = usize, Target = usize>,
    G: Kernel<Rational, Source = usize, Target = usize>,
{
    (0..n)
        .map(|x| {
            (0..m)
                .map(|y| k.integrate(&x, &|z| if *z == y { Rational::one() } else { Rational::zero() }))
                .collect()
        })
        .collect()
}

fn kernel_strategy(n: usize, m: usize) -> impl Strategy<Value = Vec<Vec<Rational>>> {
    prop::collection::vec(prop::collection::vec(0u32..5, m), n).prop_map(|rows| {
        rows.into_iter()
            .map(|r| {
                let total: u32 = r.iter().sum::<u32>() + 1;
                r.into_iter()
                    .map(|w| Rational::new(w.into(), total.into()))
                    .collect()
            })
            .collect()
    })
}

#[test]
fn dirac_integrates_point_value() {
    let d = dirac(3usize);
    assert_eq!(Measure::<Rational>::integrate(&d, &|_| q("7")), q("7"));
    assert_eq!(Measure::<Rational>::mass(&d), Rational::one());
    assert_eq!(Measure::<f64>::integrate(&d, &|x| *x as f64), 3.0);
}

#[test]
fn matrix_product_matches_dense_oracle() {
    let a = vec![vec![q("1/2"), q("1/2")], vec![q("0"), q("1/3")]];
    let b = vec![vec![q("1/4"), q("3/4")], vec![q("1"), q("0")]];
    let ka = MatrixKernel::from_dense(&a);
    let kb = MatrixKernel::from_dense(&b);
    let expect = vec![vec![q("5/8"), q("3/8")], vec![q("1/3"), q("0")]];
    assert_eq!(ka.then(&kb).unwrap().to_dense(), expect);
    assert_eq!(composite_dense(&kleisli_compose(&ka, &kb), 2, 2), expect);
}

#[test]
fn composing_mismatched_spaces_fails() {
    let a = MatrixKernel::<Rational>::identity(2);
    let b = MatrixKernel::<Rational>::identity(3);
    assert_eq!(
        a.then(&b),
        Err(KernelError::SpaceMismatch { targets: 2, sources: 3 })
    );
    assert!(MatrixKernel::new(2, vec![vec![(2, q("1"))]]).is_err());
}

#[test]
fn labelled_step_puts_nothing_on_termination_or_other_labels() {
    let p = MatrixKernel::from_dense(&[vec![q("1/3"), q("1/6")]]);
    let mu = p.at(0);
    let step = labelled_step(Letter(1), &mu);
    let all_states = |_: &usize| true;
    assert_eq!(step.evaluate::<Rational>(&|a| a == Letter(1), &all_states, true), q("1/2"));
    assert_eq!(step.evaluate::<Rational>(&|a| a == Letter(0), &all_states, true), q("0"));
    assert_eq!(step.evaluate::<Rational>(&|_| true, &|y| *y == 1, false), q("1/6"));
    let on_tick = Measure::<Rational>::integrate(&step, &|o| match o {
        StepOutcome::Terminate => Rational::one(),
        StepOutcome::Emit(..) => Rational::zero(),
    });
    assert_eq!(on_tick, q("0"));
    assert_eq!(Measure::<Rational>::mass(&step), q("1/2"));
}

#[test]
fn example_model_validates() {
    let m = catalog::mixed_traces();
    let r = validate_discrete(&m, "example");
    assert!(r.passed, "{r:?}");
    assert_eq!(r.states.len(), 3);
    assert!(r.states.iter().all(|s| s.exact_total.as_deref() == Some("1")));
}

#[test]
fn perturbed_weight_fails_validation() {
    let alphabet = Alphabet::new(["a", "b"]).unwrap();
    let mut m = DiscreteModel::with_states(alphabet, SpaceKind::Infty, 3).unwrap();
    m.add_transition(0, Letter(1), 0, q("1")).unwrap();
    m.add_transition(1, Letter(1), 0, q("0.2")).unwrap();
    m.add_transition(1, Letter(0), 2, q("1/3")).unwrap();
    m.set_termination(1, q("1/3")).unwrap();
    m.add_transition(2, Letter(0), 2, q("2/3")).unwrap();
    m.set_termination(2, q("1/3")).unwrap();
    let r = validate_discrete(&m, "perturbed");
    assert!(!r.passed);
    let bad: Vec<_> = r.failures().collect();
    assert_eq!(bad.len(), 1);
    assert_eq!(bad[0].state, "1");
    assert!((bad[0].total_mass - 13.0 / 15.0).abs() < 1e-12);
}

#[test]
fn subprobability_kinds_accept_deficit() {
    let alphabet = Alphabet::new(["a"]).unwrap();
    let mut m = DiscreteModel::with_states(alphabet, SpaceKind::Star, 1).unwrap();
    m.add_transition(0, Letter(0), 0, q("1/2")).unwrap();
    assert!(validate_discrete(&m, "m").passed);
    m.add_transition(0, Letter(0), 0, q("2/3")).unwrap();
    assert!(!validate_discrete(&m, "m").passed);
    assert_eq!(
        m.set_termination(0, q("4/3")),
        Err(ModelError::WeightOutOfRange("4/3".into()))
    );
}

#[test]
fn termination_rejected_for_omega() {
    let alphabet = Alphabet::new(["a"]).unwrap();
    let mut m = DiscreteModel::<Rational>::with_states(alphabet, SpaceKind::Omega, 1).unwrap();
    assert!(m.set_termination(0, q("1/2")).is_err());
}

#[test]
fn float_models_validate_with_roundoff() {
    let m = catalog::mixed_traces().to_f64();
    assert!(validate_discrete(&m, "f64").passed);
}

#[test]
fn builtins_validate() {
    assert!(validate_continuous(&JumpGame::new()).passed);
    for t in [2, 3] {
        let r = validate_continuous(&GaussianJumper::new(t));
        assert!(r.passed, "{r:?}");
    }
}

#[test]
fn grid_kernel_masses() {
    let alphabet = Alphabet::new(["a", "b"]).unwrap();
    let g = GridKernel::new(
        alphabet.clone(),
        SpaceKind::Infty,
        (0.0, 2.0),
        vec![
            vec![vec![0.25, 0.25], vec![0.0, 0.5]],
            vec![vec![0.25, 0.0], vec![0.0, 0.0]],
        ],
        Some(vec![0.25, 0.5]),
    )
    .unwrap();
    assert_eq!(g.cell_of(1.0), 1);
    assert_eq!(g.cell_of(2.0), 1);
    assert!(validate_continuous(&g).passed);
    let q = g.integrate(Letter(0), ContState::at(0.5), &|s| s.x, 1e-12);
    assert!((q.value - 0.5).abs() < 1e-12);

    let short = GridKernel::new(alphabet, SpaceKind::Omega, (0.0, 1.0), vec![vec![vec![1.0]]], None);
    assert_eq!(short, Err(GridError::LabelCount { expected: 2, found: 1 }));
}

#[test]
fn gaussian_halves_have_half_mass() {
    let g = GaussianJumper::new(3);
    for a in [GaussianJumper::LEFT, GaussianJumper::RIGHT] {
        let m = g.integrate(a, ContState::new(1, 0.3), &|_| 1.0, 1e-13);
        assert!((m.value - 0.5).abs() < 1e-12);
    }
    let stay = g.integrate(GaussianJumper::STAY, ContState::new(3, 0.3), &|s| s.x, 1e-13);
    assert_eq!(stay.value, 0.3);
}

#[test]
fn jump_game_label_kernel_moments() {
    let jg = JumpGame::new();
    let left = LabelKernel::new(&jg, JumpGame::LEFT);
    let z = ContState::at(0.6);
    assert!((left.integrate(&z, &|s| s.x) - 0.18).abs() < 1e-13);
    assert!((Kernel::<f64>::mass(&left, &z) - 0.6).abs() < 1e-15);
    let ll = kleisli_compose(left, left);
    // ∫∫ 1 = ∫_0^z y dy
    assert!((ll.mass(&z) - 0.18).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kleisli_unit_laws(k in kernel_strategy(3, 3)) {
        let m = MatrixKernel::from_dense(&k);
        let unit = DiracKernel::<usize>::new();
        prop_assert_eq!(composite_dense(&kleisli_compose(&unit, &m), 3, 3), k.clone());
        prop_assert_eq!(composite_dense(&kleisli_compose(&m, &unit), 3, 3), k);
    }

    #[test]
    fn kleisli_associativity(
        a in kernel_strategy(2, 3),
        b in kernel_strategy(3, 4),
        c in kernel_strategy(4, 2),
    ) {
        let (ka, kb, kc) = (MatrixKernel::from_dense(&a), MatrixKernel::from_dense(&b), MatrixKernel::from_dense(&c));
        let left = composite_dense(&kleisli_compose(kleisli_compose(&ka, &kb), &kc), 2, 2);
        let right = composite_dense(&kleisli_compose(&ka, kleisli_compose(&kb, &kc)), 2, 2);
        let oracle = matmul(&matmul(&a, &b), &c);
        prop_assert_eq!(&left, &oracle);
        prop_assert_eq!(&right, &oracle);
        prop_assert_eq!(ka.then(&kb).unwrap().then(&kc).unwrap().to_dense(), oracle);
    }
}
