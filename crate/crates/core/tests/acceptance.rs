//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::sync::Arc;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{cone_by_paths, dense, matmul, matrix, q, random_kernel, random_model, singleton_by_paths};
use ptstrace::catalog;
use ptstrace::kernels::{kleisli_compose, DiracKernel, GaussianJumper, JumpGame};
use ptstrace::model::{equiv_states, Model, State};
use ptstrace::montecarlo::estimate_base;
use ptstrace::trace::{DiscreteTracer, TraceMeasure, TraceValue};
use ptstrace::wordspace::{BaseSet, InfiniteWord, Letter, SpaceKind, Word};
use ptstrace::{ExactModel, Rational};

type Outcome = Result<(), String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);
type ClosedForm = (&'static str, fn(f64) -> f64);

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn exact(v: &TraceValue, expected: &Rational, what: &str) -> Outcome {
    ensure(v.exact() == Some(expected), || format!("{what}: expected {expected}, got {v}"))
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn discrete_exactness() -> Outcome {
    let m = catalog::mixed_traces();
    let w = |s: &str| m.alphabet().parse_word(s).unwrap();
    let b_omega = InfiniteWord::new(Word::empty(), w("b")).unwrap();
    let third = q(1, 3);
    let mut t = DiscreteTracer::new(&m);

    exact(&t.base(1, &BaseSet::Singleton(Word::empty())).map_err(err)?, &third, "tr(1)({ε})")?;
    exact(&t.base(1, &BaseSet::Cone(w("a"))).map_err(err)?, &third, "tr(1)(↑a)")?;
    let s = t.infinite_singleton(1, &b_omega, 30).map_err(err)?;
    exact(&s.value(), &third, "tr(1)({b^ω})")?;
    let s = t.infinite_singleton(0, &b_omega, 30).map_err(err)?;
    exact(&s.value(), &Rational::one(), "tr(0)({b^ω})")?;

    let fw = t.finite_words(1, 30).map_err(err)?;
    exact(&fw.value(), &q(2, 3), "tr(1)(A*)")?;
    ensure(fw.contains(2.0 / 3.0, 0.0), || format!("tr(1)(A*) bracket misses 2/3: {fw:?}"))?;
    let fw0 = t.finite_words(0, 30).map_err(err)?;
    exact(&fw0.value(), &Rational::zero(), "tr(0)(A*)")?;
    let fw2 = t.finite_words(2, 30).map_err(err)?;
    ensure(fw2.lower.value() >= 1.0 - 1e-3, || format!("tr(2)(A*) lower {} at depth 30", fw2.lower))?;

    let inf = DiscreteTracer::new(&m).at(1).map_err(err)?.infinite_words(30).map_err(err)?;
    exact(&inf.value(), &third, "tr(1)(A^ω)")?;
    ensure(inf.contains(1.0 / 3.0, 0.0), || format!("tr(1)(A^ω) bracket misses 1/3: {inf:?}"))?;

    let mut a_k = Word::empty();
    let mut expected = third.clone();
    for k in 0..=10 {
        let v = t.base(2, &BaseSet::Singleton(a_k.clone())).map_err(err)?;
        exact(&v, &expected, &format!("tr(2)({{a^{k}}})"))?;
        a_k = a_k.push(Letter(0));
        expected *= q(2, 3);
    }
    Ok(())
}

fn jump_game_closed_forms() -> Outcome {
    let m = Model::Continuous(Arc::new(JumpGame::new()));
    let sp = m.space();
    let closed: [ClosedForm; 6] = [
        ("L", |z| z),
        ("R", |z| 1.0 - z),
        ("LL", |z| 0.5 * z * z),
        ("LR", |z| z - 0.5 * z * z),
        ("RL", |z| 0.5 - 0.5 * z * z),
        ("RR", |z| 0.5 - z + 0.5 * z * z),
    ];
    let words = m.alphabet().words_up_to(6);
    for z in [0.0, 0.1, 0.25, 0.5, 0.75, 1.0] {
        let x = m.parse_state(&z.to_string()).map_err(err)?;
        let mut t = m.tracer(&x, 1e-9).map_err(err)?;
        for (u, f) in closed {
            let v = t.base(&sp.parse_base(&format!("cone:{u}")).unwrap()).map_err(err)?;
            ensure((v.value() - f(z)).abs() <= 1e-9, || format!("z={z}: tr(↑{u}) = {v}, expected {}", f(z)))?;
        }
        let mut cone = |u: &Word| t.base(&BaseSet::Cone(u.clone())).map(|v| v.value()).map_err(err);
        for u in words.iter().filter(|u| u.len() <= 5) {
            let whole = cone(u)?;
            let parts = cone(&u.push(Letter(0)))? + cone(&u.push(Letter(1)))?;
            ensure((whole - parts).abs() <= 1e-8, || {
                format!("z={z}: additivity fails at ↑{}: {whole} vs {parts}", m.alphabet().format_word(u))
            })?;
        }
    }
    Ok(())
}

/// `(1/2)^k` if `u` jumps (L or R) for its first `min(|u|, k)` letters and
/// then stays (N), else 0.
fn chain_cone(u: &str, jumps: usize) -> f64 {
    let (head, tail) = u.split_at(u.len().min(jumps));
    if head.chars().all(|c| c == 'L' || c == 'R') && tail.chars().all(|c| c == 'N') {
        0.5f64.powi(head.len() as i32)
    } else {
        0.0
    }
}

fn gaussian_reduction() -> Outcome {
    let g = Model::Continuous(Arc::new(GaussianJumper::new(3)));
    let c = Model::Discrete(catalog::jumper_chain(3));
    let words = g.alphabet().words_up_to(5);
    for z in ["-4.2", "0", "1.7"] {
        let x = g.parse_state(&format!("(0,{z})")).map_err(err)?;
        let mut tg = g.tracer(&x, 1e-4).map_err(err)?;
        let mut tc = c.tracer(&State::Discrete(0), 1e-4).map_err(err)?;
        for u in &words {
            let s = BaseSet::Cone(u.clone());
            let a = tg.base(&s).map_err(err)?;
            let b = tc.base(&s).map_err(err)?;
            let name = g.alphabet().format_word(u);
            ensure((a.value() - b.value()).abs() <= 1e-4, || format!("z={z}: ↑{name}: {a} vs chain {b}"))?;
            ensure((b.value() - chain_cone(&name, 3)).abs() <= 1e-12, || format!("chain ↑{name} = {b}"))?;
        }
        let r = equiv_states(&g, &x, &c, &State::Discrete(0), 5, 1e-4).map_err(err)?;
        ensure(r.equivalent, || format!("z={z}: not equivalent, witness {:?}", r.witness()))?;
    }
    Ok(())
}

fn models() -> Vec<ExactModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    (0..200).map(|_| random_model(&mut rng)).collect()
}

fn sigma_additivity() -> Outcome {
    for (i, m) in models().iter().enumerate() {
        let words = m.alphabet().words_up_to(4);
        let mut t = DiscreteTracer::new(m);
        for x in 0..m.len() {
            let mut val = |s: BaseSet| -> Result<Rational, String> {
                Ok(t.base(x, &s).map_err(err)?.exact().cloned().ok_or("inexact value")?)
            };
            match m.kind() {
                SpaceKind::Star => {
                    let mut total = Rational::zero();
                    for u in &words {
                        total += val(BaseSet::Singleton(u.clone()))?;
                    }
                    ensure(total <= Rational::one(), || format!("model {i}, state {x}: singleton mass {total}"))?;
                }
                kind => {
                    for u in &words {
                        let mut parts = if kind == SpaceKind::Infty {
                            val(BaseSet::Singleton(u.clone()))?
                        } else {
                            Rational::zero()
                        };
                        for a in m.alphabet().letters() {
                            parts += val(BaseSet::Cone(u.push(a)))?;
                        }
                        let whole = val(BaseSet::Cone(u.clone()))?;
                        ensure(whole == parts, || {
                            format!("model {i} ({kind}), state {x}, ↑{}: {whole} vs {parts}", m.alphabet().format_word(u))
                        })?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn path_oracle() -> Outcome {
    for (i, m) in models().iter().enumerate() {
        let words = m.alphabet().words_up_to(4);
        let mut t = DiscreteTracer::new(m);
        for x in 0..m.len() {
            for u in &words {
                let mut sets = Vec::new();
                if m.kind().admits_singletons() {
                    sets.push((BaseSet::Singleton(u.clone()), singleton_by_paths(m, x, u)));
                }
                if m.kind().admits_cones() {
                    sets.push((BaseSet::Cone(u.clone()), cone_by_paths(m, x, u)));
                }
                for (s, oracle) in sets {
                    let v = t.base(x, &s).map_err(err)?;
                    ensure(v.exact() == Some(&oracle), || {
                        format!("model {i}, state {x}, {}: {v} vs paths {oracle}", s.display(m.alphabet()))
                    })?;
                }
            }
        }
    }
    Ok(())
}

fn kleisli_laws() -> Outcome {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..100 {
        let n: Vec<usize> = (0..4).map(|_| rng.gen_range(1..=4)).collect();
        let (a, b, c) = (
            random_kernel(&mut rng, n[0], n[1]),
            random_kernel(&mut rng, n[1], n[2]),
            random_kernel(&mut rng, n[2], n[3]),
        );
        let (ka, kb, kc) = (matrix(&a), matrix(&b), matrix(&c));
        let unit = DiracKernel::<usize>::new();
        ensure(dense(&kleisli_compose(&unit, &ka), n[0], n[1]) == a, || format!("triple {i}: left unit"))?;
        ensure(dense(&kleisli_compose(&ka, &unit), n[0], n[1]) == a, || format!("triple {i}: right unit"))?;
        let oracle = matmul(&matmul(&a, &b), &c);
        let left = dense(&kleisli_compose(kleisli_compose(&ka, &kb), &kc), n[0], n[3]);
        let right = dense(&kleisli_compose(&ka, kleisli_compose(&kb, &kc)), n[0], n[3]);
        ensure(left == oracle && right == oracle, || format!("triple {i}: associativity"))?;
    }
    Ok(())
}

fn monte_carlo() -> Outcome {
    let jg = Model::Continuous(Arc::new(JumpGame::new()));
    let ex = Model::Discrete(catalog::mixed_traces());
    let mut checks = Vec::new();
    for u in ["L", "R", "LL", "LR", "RL", "RR"] {
        checks.push((&jg, "0.5", format!("cone:{u}")));
    }
    for s in ["word:", "cone:a", "cone:b"] {
        checks.push((&ex, "1", s.to_string()));
    }
    for (m, state, set) in checks {
        let x = m.parse_state(state).map_err(err)?;
        let s = m.space().parse_base(&set).map_err(err)?;
        let analytic = m.trace_base(&x, &s, 1e-9).map_err(err)?.value();
        let mut inside = 0;
        for seed in 0..20 {
            let e = estimate_base(m, &x, &s, 100_000, seed).map_err(err)?;
            inside += usize::from(e.covers(analytic, 0.0));
        }
        ensure(inside >= 17, || format!("{set} at {state}: only {inside}/20 intervals cover {analytic}"))?;
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("discrete exactness", Duration::from_secs(1), discrete_exactness),
        ("jump-game closed forms", Duration::from_secs(10), jump_game_closed_forms),
        ("gaussian-jumper reduction", Duration::from_secs(60), gaussian_reduction),
        ("sigma-additivity on 200 random models", Duration::MAX, sigma_additivity),
        ("singletons equal path enumeration", Duration::MAX, path_oracle),
        ("Kleisli laws on 100 kernel triples", Duration::MAX, kleisli_laws),
        ("Monte Carlo cross-check", Duration::MAX, monte_carlo),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let mut outcome = run();
        let took = start.elapsed();
        if outcome.is_ok() && took > limit {
            outcome = Err(format!("took {took:.2?}, limit {limit:.0?}"));
        }
        match outcome {
            Ok(()) => println!("PASS  criterion {}: {name} ({took:.2?})", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL  criterion {}: {name} ({took:.2?}): {e}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
