#![allow(dead_code)]

use std::path::PathBuf;

use curvegerm::germ::Parametrization;
use curvegerm::poly::UniPoly;
use curvegerm::{parse_instance, Germ, Instance, Rational};
use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/corpus")
        .join(format!("{name}.germ"))
}

pub fn load(name: &str) -> Instance {
    let text = std::fs::read_to_string(corpus_path(name)).expect("corpus file");
    parse_instance(&text).expect("corpus parses")
}

pub fn q(p: i64, d: i64) -> Rational {
    Rational::new(p.into(), d.into())
}

fn coefficient<R: Rng>(rng: &mut R) -> Rational {
    let choices = [(1, 1), (-1, 1), (2, 1), (-2, 1), (1, 2), (-3, 2), (3, 1)];
    let (p, d) = *choices.choose(rng).unwrap();
    q(p, d)
}

/// One branch whose coordinate orders have gcd 1, so every value semigroup
/// generated is primitive; `perturb` adds higher-order terms.
fn random_branch<R: Rng>(rng: &mut R, n: usize, perturb: bool) -> Vec<UniPoly<Rational>> {
    loop {
        let orders: Vec<u32> = (0..n)
            .map(|_| if rng.gen_bool(0.15) { 0 } else { rng.gen_range(1..=7) })
            .collect();
        let g = orders.iter().fold(0u32, |g, &a| g.gcd(&a));
        if g != 1 {
            continue;
        }
        return orders
            .iter()
            .map(|&a| {
                if a == 0 {
                    return UniPoly::zero();
                }
                let mut p = UniPoly::monomial(a, coefficient(rng));
                if perturb {
                    for _ in 0..rng.gen_range(1..=2) {
                        p.add_term(a + rng.gen_range(1..=4), coefficient(rng));
                    }
                }
                p
            })
            .collect();
    }
}

/// Primitive monomial or perturbed-monomial germ with `n` in {2, 3, 4} and
/// one or two branches.
pub fn random_germ<R: Rng>(rng: &mut R) -> Germ {
    let n = rng.gen_range(2..=4);
    let r = if rng.gen_bool(0.75) { 1 } else { 2 };
    let perturb = rng.gen_bool(0.5);
    let coords = (0..r).map(|_| random_branch(rng, n, perturb)).collect();
    Parametrization::from_coords(n, coords).expect("valid germ")
}

/// A random invertible matrix: a unit lower triangular times a permuted
/// diagonal with nonzero entries.
pub fn random_invertible<R: Rng>(rng: &mut R, n: usize) -> Vec<Vec<Rational>> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut lower = vec![vec![q(0, 1); n]; n];
    for i in 0..n {
        lower[i][i] = q(1, 1);
        for j in 0..i {
            lower[i][j] = q(rng.gen_range(-2..=2), 1);
        }
    }
    let diag: Vec<Rational> = (0..n).map(|_| coefficient(rng)).collect();
    let mut out = vec![vec![q(0, 1); n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][perm[j]] = &lower[i][j] * &diag[j];
        }
    }
    out
}
