#![allow(dead_code)]

use std::collections::BTreeMap;

use afalab::automata::{Afa, Alphabet, ComplexMatrix, MatrixAutomaton, Mcqfa, Pfa, Qfa, Transitions};
use afalab::linalg::Matrix;
use afalab::scalar::{Scalar, ScalarMode};
use rand::Rng;

const Q: ScalarMode = ScalarMode::Rational;

pub fn binary() -> Alphabet {
    Alphabet::new(['a', 'b']).unwrap()
}

pub fn rat(rng: &mut impl Rng, bound: i64) -> Scalar {
    let d = rng.gen_range(1..=4);
    Scalar::ratio(rng.gen_range(-bound * d..=bound * d), d)
}

fn from_columns(n: usize, mut col: impl FnMut() -> Vec<Scalar>) -> Matrix {
    let cols: Vec<Vec<Scalar>> = (0..n).map(|_| col()).collect();
    Matrix::from_fn(Q, n, n, |i, j| cols[j][i].clone()).unwrap()
}

/// Random rational matrix whose last row fixes every column sum at 1.
pub fn affine_matrix(rng: &mut impl Rng, n: usize) -> Matrix {
    from_columns(n, || {
        let mut col: Vec<Scalar> = (0..n - 1).map(|_| rat(rng, 2)).collect();
        let sum = col.iter().fold(Scalar::zero(Q), |a, x| a + x);
        col.push(Scalar::one(Q) - &sum);
        col
    })
}

pub fn stochastic_matrix(rng: &mut impl Rng, n: usize) -> Matrix {
    from_columns(n, || {
        let mut w: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=4)).collect();
        if w.iter().all(|&x| x == 0) {
            w[rng.gen_range(0..n)] = 1;
        }
        let total: i64 = w.iter().sum();
        w.into_iter().map(|x| Scalar::ratio(x, total)).collect()
    })
}

fn transitions(alphabet: &Alphabet, mut gen: impl FnMut() -> Matrix) -> Transitions<Matrix> {
    let left = gen();
    let letters: BTreeMap<char, Matrix> = alphabet.letters().iter().map(|&c| (c, gen())).collect();
    Transitions::new(left, letters, gen())
}

fn accept_set(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut acc: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    if acc.is_empty() {
        acc.push(rng.gen_range(0..n));
    }
    acc
}

pub fn random_afa(rng: &mut impl Rng, n: usize, alphabet: &Alphabet) -> Afa {
    let t = transitions(alphabet, || affine_matrix(rng, n));
    let start = rng.gen_range(0..n);
    let accept = accept_set(rng, n);
    Afa::new(MatrixAutomaton::new(alphabet.clone(), t, start, accept).unwrap()).unwrap()
}

pub fn random_pfa(rng: &mut impl Rng, n: usize, alphabet: &Alphabet) -> Pfa {
    let t = transitions(alphabet, || stochastic_matrix(rng, n));
    let start = rng.gen_range(0..n);
    let accept = accept_set(rng, n);
    Pfa::new(MatrixAutomaton::new(alphabet.clone(), t, start, accept).unwrap()).unwrap()
}

const TRIPLES: [(i64, i64, i64); 4] = [(3, 4, 5), (5, 12, 13), (8, 15, 17), (7, 24, 25)];

/// Product of two exact Givens rotations in random planes, optionally
/// followed by a reflection.
fn orthogonal_matrix(rng: &mut impl Rng, n: usize) -> Matrix {
    let mut m = Matrix::identity(Q, n);
    for _ in 0..2 {
        let (a, b, c) = TRIPLES[rng.gen_range(0..TRIPLES.len())];
        let (cos, sin) = (Scalar::ratio(a, c), Scalar::ratio(b, c) * &Scalar::from_int(Q, if rng.gen_bool(0.5) { 1 } else { -1 }));
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let g = Matrix::from_fn(Q, n, n, |r, s| match (r, s) {
            _ if r == i && s == i || r == j && s == j => cos.clone(),
            _ if r == i && s == j => -sin.clone(),
            _ if r == j && s == i => sin.clone(),
            _ if r == s => Scalar::one(Q),
            _ => Scalar::zero(Q),
        })
        .unwrap();
        m = g.mul(&m).unwrap();
    }
    if rng.gen_bool(0.3) {
        let k = rng.gen_range(0..n);
        m = Matrix::from_fn(Q, n, n, |r, s| {
            let x = m.get(r, s).clone();
            if r == k {
                -x
            } else {
                x
            }
        })
        .unwrap();
    }
    m
}

pub fn random_mcqfa(rng: &mut impl Rng, n: usize, alphabet: &Alphabet) -> Mcqfa {
    let t = transitions(alphabet, || orthogonal_matrix(rng, n));
    let start = rng.gen_range(0..n);
    let accept = accept_set(rng, n);
    Mcqfa::new(MatrixAutomaton::new(alphabet.clone(), t, start, accept).unwrap()).unwrap()
}

/// Kraus pair `(K₁, K₂)` read off a random `2n×n` complex isometry.
fn kraus_pair(rng: &mut impl Rng, n: usize) -> Vec<ComplexMatrix> {
    let rows = 2 * n;
    let mut cols: Vec<Vec<(f64, f64)>> = Vec::new();
    for _ in 0..n {
        let mut v: Vec<(f64, f64)> = (0..rows).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        for u in &cols {
            // v -= <u, v> u
            let (mut pr, mut pi) = (0.0, 0.0);
            for (a, b) in u.iter().zip(&v) {
                pr += a.0 * b.0 + a.1 * b.1;
                pi += a.0 * b.1 - a.1 * b.0;
            }
            for (a, b) in u.iter().zip(v.iter_mut()) {
                b.0 -= pr * a.0 - pi * a.1;
                b.1 -= pr * a.1 + pi * a.0;
            }
        }
        let norm = v.iter().map(|x| x.0 * x.0 + x.1 * x.1).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|x| (x.0 / norm, x.1 / norm)).collect());
    }
    let block = |offset: usize| {
        let part = |f: fn(&(f64, f64)) -> f64| {
            Matrix::from_fn(ScalarMode::Float, n, n, |i, j| Scalar::Float(f(&cols[j][offset + i]))).unwrap()
        };
        ComplexMatrix::new(part(|x| x.0), part(|x| x.1)).unwrap()
    };
    vec![block(0), block(n)]
}

pub fn random_qfa(rng: &mut impl Rng, n: usize, alphabet: &Alphabet) -> Qfa {
    let left = kraus_pair(rng, n);
    let letters = alphabet.letters().iter().map(|&c| (c, kraus_pair(rng, n))).collect();
    let right = kraus_pair(rng, n);
    let start = rng.gen_range(0..n);
    let accept = accept_set(rng, n);
    Qfa::new(alphabet.clone(), Transitions::new(left, letters, right), start, accept).unwrap()
}

pub fn random_word(rng: &mut impl Rng, alphabet: &Alphabet, max_len: usize) -> String {
    let letters = alphabet.letters();
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| letters[rng.gen_range(0..letters.len())]).collect()
}
