use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::automata::{Afa, Automaton};
use crate::zoo::UnaryTuple;

/// Eq. (1) weighting of a two-state final configuration `(x, 1−x)`.
pub fn acceptance_value(x: &BigRational) -> BigRational {
    if !x.is_negative() && x <= &BigRational::one() {
        x.clone()
    } else {
        x / (BigRational::from_integer(2.into()) * x - BigRational::one())
    }
}

/// `λ/(2λ−1)`, the second point where the weighting equals `λ`
/// (absent for `λ = 1/2`).
pub fn mirror_threshold(lambda: &BigRational) -> Option<BigRational> {
    let denom = BigRational::from_integer(2.into()) * lambda - BigRational::one();
    (!denom.is_zero()).then(|| lambda / denom)
}

/// Open interval with optional (infinite) ends.
pub type Interval = (Option<BigRational>, Option<BigRational>);

/// `{x : acceptance_value(x) > λ}` as disjoint open intervals.
pub fn accept_region(lambda: &BigRational) -> Vec<Interval> {
    let half = BigRational::new(1.into(), 2.into());
    match (lambda.cmp(&half), mirror_threshold(lambda)) {
        (std::cmp::Ordering::Less, Some(a)) => vec![(None, Some(a)), (Some(lambda.clone()), None)],
        (std::cmp::Ordering::Greater, Some(b)) => vec![(Some(lambda.clone()), Some(b))],
        _ => vec![(Some(half), None)],
    }
}

/// `x` lies in a region of disjoint open intervals.
pub fn in_region(region: &[Interval], x: &BigRational) -> bool {
    region.iter().any(|(lo, hi)| {
        lo.as_ref().is_none_or(|l| x > l) && hi.as_ref().is_none_or(|h| x < h)
    })
}

/// Two-state unary AfA parameters together with the cutpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnaryParams {
    pub p: BigRational,
    pub q: BigRational,
    pub f1: BigRational,
    pub f2: BigRational,
    pub m: BigRational,
    pub lambda: BigRational,
}

/// Closed form of the first final entry `E_j` on `a^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Dynamics {
    /// `p = q = 0`: `A_a` is the identity, `E_j = offset`.
    Identity { offset: BigRational },
    /// `p + q = 0`, `p ≠ 0`: `E_j = offset + j·amplitude`.
    Drift {
        offset: BigRational,
        amplitude: BigRational,
    },
    /// `p + q ≠ 0`: `x_j = r + c·t^j` and `E_j = offset + amplitude·t^j`.
    Geometric {
        r: BigRational,
        t: BigRational,
        c: BigRational,
        offset: BigRational,
        amplitude: BigRational,
    },
}

impl UnaryParams {
    pub fn new(tuple: &UnaryTuple, lambda: BigRational) -> Self {
        UnaryParams {
            p: tuple.p.clone(),
            q: tuple.q.clone(),
            f1: tuple.f1.clone(),
            f2: tuple.f2.clone(),
            m: tuple.m.clone(),
            lambda,
        }
    }

    pub fn from_ratios(v: [(i64, i64); 5], lambda: (i64, i64)) -> Self {
        UnaryParams::new(
            &UnaryTuple::from_ratios(v),
            BigRational::new(lambda.0.into(), lambda.1.into()),
        )
    }

    pub fn tuple(&self) -> UnaryTuple {
        UnaryTuple::new(
            self.p.clone(),
            self.q.clone(),
            self.f1.clone(),
            self.f2.clone(),
            self.m.clone(),
        )
    }

    pub fn dynamics(&self) -> Dynamics {
        let gap = &self.f1 - &self.f2;
        let sum = &self.p + &self.q;
        if self.p.is_zero() && self.q.is_zero() {
            Dynamics::Identity {
                offset: &self.m * &gap + &self.f2,
            }
        } else if sum.is_zero() {
            Dynamics::Drift {
                offset: &self.m * &gap + &self.f2,
                amplitude: &self.p * &gap,
            }
        } else {
            let r = &self.p / &sum;
            let t = BigRational::one() - &sum;
            let c = &self.m - &r;
            Dynamics::Geometric {
                offset: &r * &gap + &self.f2,
                amplitude: &gap * &c,
                r,
                t,
                c,
            }
        }
    }

    /// `E_j` from the closed form.
    pub fn first_entry(&self, j: usize) -> BigRational {
        match self.dynamics() {
            Dynamics::Identity { offset } => offset,
            Dynamics::Drift { offset, amplitude } => {
                offset + amplitude * BigRational::from_integer(j.into())
            }
            Dynamics::Geometric {
                t,
                offset,
                amplitude,
                ..
            } => offset + amplitude * num_traits::pow(t, j),
        }
    }

    /// The `(r, 1−r)` fixed point of `A_a` when `p + q ≠ 0`.
    pub fn fixed_point(&self) -> Option<(BigRational, BigRational)> {
        let sum = &self.p + &self.q;
        (!sum.is_zero()).then(|| (&self.p / &sum, &self.q / &sum))
    }
}

/// How a two-state unary rational AfA reduces to the standard form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extracted {
    /// Accept set is empty or both states: constant value 0 or 1.
    Constant(bool),
    /// `(p, q, f1, f2, m)` with acceptance on the first entry; accepting on
    /// state 1 alone is folded in by replacing `f_i` with `1 − f_i`.
    Tuple(UnaryTuple),
}

/// Reads the parameters off a two-state unary rational AfA.
pub fn extract(m: &Afa) -> Option<Extracted> {
    let machine = m.machine();
    if machine.states() != 2 || !m.alphabet().is_unary() {
        return None;
    }
    let letter = m.alphabet().letters()[0];
    let rat = |s: &crate::scalar::Scalar| s.as_rational().cloned();
    let t = machine.transitions();
    let a = t.letters.get(&letter)?;
    let accept: Vec<usize> = machine.accept().iter().copied().collect();
    let p = rat(a.get(0, 1))?;
    let q = rat(a.get(1, 0))?;
    let mut f1 = rat(t.right.get(0, 0))?;
    let mut f2 = rat(t.right.get(0, 1))?;
    let m0 = rat(t.left.get(0, machine.start()))?;
    match accept.as_slice() {
        [] => return Some(Extracted::Constant(false)),
        [0, 1] => return Some(Extracted::Constant(true)),
        [1] => {
            f1 = BigRational::one() - f1;
            f2 = BigRational::one() - f2;
        }
        _ => {}
    }
    Some(Extracted::Tuple(UnaryTuple::new(p, q, f1, f2, m0)))
}
