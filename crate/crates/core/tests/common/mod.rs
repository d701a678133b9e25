#![allow(dead_code)]

use num_traits::{One, Zero};
use ptstrace::kernels::{Kernel, MatrixKernel};
use ptstrace::wordspace::{Alphabet, Letter, SpaceKind, Word};
use ptstrace::{ExactModel, Rational};
use rand::Rng;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Splits mass `total` into `parts` random rational shares.
fn shares<R: Rng>(rng: &mut R, parts: usize, total: &Rational) -> Vec<Rational> {
    let raw: Vec<i64> = (0..parts).map(|_| rng.gen_range(1..=6)).collect();
    let sum: i64 = raw.iter().sum();
    raw.iter().map(|&w| total * q(w, sum)).collect()
}

/// Random model with at most 5 states over at most 3 letters, of kind
/// star, omega or infty, with exact rational weights satisfying the mass
/// condition of its kind.
pub fn random_model<R: Rng>(rng: &mut R) -> ExactModel {
    let kind = [SpaceKind::Star, SpaceKind::Omega, SpaceKind::Infty][rng.gen_range(0..3)];
    let letters = rng.gen_range(1..=3);
    let alphabet = Alphabet::new(["a", "b", "c"].into_iter().take(letters)).unwrap();
    let n = rng.gen_range(1..=5);
    let mut m = ExactModel::with_states(alphabet, kind, n).unwrap();
    for x in 0..n {
        let total = match kind {
            SpaceKind::Star if rng.gen_bool(0.2) => Rational::zero(),
            SpaceKind::Star => q(rng.gen_range(1..=4), 4),
            _ => Rational::one(),
        };
        if total.is_zero() {
            continue;
        }
        let edges = match kind {
            SpaceKind::Omega => rng.gen_range(1..=4),
            _ => rng.gen_range(0..=4),
        };
        let has_term = kind.has_termination() && (edges == 0 || rng.gen_bool(0.6));
        let w = shares(rng, edges + usize::from(has_term), &total);
        for share in &w[..edges] {
            let a = Letter(rng.gen_range(0..letters));
            let y = rng.gen_range(0..n);
            m.add_transition(x, a, y, share.clone()).unwrap();
        }
        if has_term {
            m.set_termination(x, w[edges].clone()).unwrap();
        }
    }
    m
}

/// Sum over labelled paths `x = x0 -u1-> x1 ... -un-> xn` of the product
/// of their weights, times `end(xn)`.
pub fn paths(m: &ExactModel, x: usize, u: &[Letter], end: &dyn Fn(usize) -> Rational) -> Rational {
    match u.split_first() {
        None => end(x),
        Some((a, rest)) => m
            .transitions(x)
            .iter()
            .filter(|t| t.label == *a)
            .map(|t| t.weight.clone() * paths(m, t.target, rest, end))
            .fold(Rational::zero(), |s, v| s + v),
    }
}

/// `tr(x)({u})` by enumerating labelled paths.
pub fn singleton_by_paths(m: &ExactModel, x: usize, u: &Word) -> Rational {
    paths(m, x, u.letters(), &|y| m.termination(y).clone())
}

/// `tr(x)(↑u)` by enumerating labelled paths (probability kinds only).
pub fn cone_by_paths(m: &ExactModel, x: usize, u: &Word) -> Rational {
    paths(m, x, u.letters(), &|_| Rational::one())
}

pub fn random_kernel<R: Rng>(rng: &mut R, n: usize, m: usize) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|_| {
            let total = q(rng.gen_range(0..=4), 4);
            let mut row = vec![Rational::zero(); m];
            if total.is_zero() {
                return row;
            }
            let k = rng.gen_range(1..=m);
            for (j, w) in shares(rng, k, &total).into_iter().enumerate() {
                row[(j * 7 + rng.gen_range(0..m)) % m] += w;
            }
            row
        })
        .collect()
}

pub fn matmul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(b).fold(Rational::zero(), |s, (x, r)| s + x * &r[j]))
                .collect()
        })
        .collect()
}

/// `k(x)({y})` for every pair.
pub fn dense<K: Kernel<Rational, Source = usize, Target = usize>>(k: &K, n: usize, m: usize) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|x| {
            (0..m)
                .map(|y| k.integrate(&x, &|t| if *t == y { Rational::one() } else { Rational::zero() }))
                .collect()
        })
        .collect()
}

pub fn matrix(d: &[Vec<Rational>]) -> MatrixKernel<Rational> {
    MatrixKernel::from_dense(d)
}
