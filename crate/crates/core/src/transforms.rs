//! Machine-to-machine constructions: PFA, MCQFA and QFA simulations by AfAs,
//! and parallel-copy amplification.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use thiserror::Error;

use crate::automata::{
    Afa, ComplexMatrix, Construction, Gfa, MatrixAutomaton, Mcqfa, ModelError, Pfa, Qfa,
    Symbol, Transitions,
};
use crate::linalg::{kronecker, kronecker_power, LinalgError, Matrix, Vector};
use crate::scalar::{Scalar, ScalarMode};

/// Default ceiling on the state count of an amplified machine.
pub const DEFAULT_STATE_BOUND: usize = 4096;

#[derive(Debug, Error, PartialEq)]
pub enum TransformError {
    #[error("{0} requires a rational machine")]
    NotRational(&'static str),
    #[error("cutpoint {0} must lie strictly between 0 and 1")]
    Cutpoint(String),
    #[error("amplification needs at least one copy")]
    NoCopies,
    #[error("amplified machine would have {states} states, above the bound {bound}")]
    StateBound { states: String, bound: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn require_rational(m: &MatrixAutomaton, op: &'static str) -> Result<(), TransformError> {
    match m.mode() {
        ScalarMode::Rational => Ok(()),
        ScalarMode::Float => Err(TransformError::NotRational(op)),
    }
}

/// Least common multiple of all entry denominators, end-markers included.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenominatorClearing {
    d: BigInt,
}

impl DenominatorClearing {
    pub fn of(m: &MatrixAutomaton) -> Result<Self, TransformError> {
        require_rational(m, "denominator clearing")?;
        let mut d = BigInt::one();
        for (_, a) in m.transitions().iter() {
            for x in a.entries() {
                let r = x.as_rational().expect("rational mode");
                d = d.lcm(r.denom());
            }
        }
        Ok(DenominatorClearing { d })
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn scalar(&self) -> Scalar {
        Scalar::from_bigint(self.d.clone())
    }
}

/// Relabels states so the start is 0 and folds a 0/1 collapse into `A_$`
/// that routes accept mass to entry 0 and the rest to entry 1. The final
/// configuration is then `(f, 1−f, 0, …, 0)` and the accept set is `{0}`.
pub fn canonicalize_pfa(p: &Pfa) -> Result<Pfa, TransformError> {
    let m = p.machine();
    require_rational(m, "canonicalize_pfa")?;
    let mode = m.mode();
    let n = m.states();

    let mut perm: Vec<usize> = (0..n).collect();
    perm.swap(0, m.start());
    let accept: BTreeSet<usize> = m.accept().iter().map(|&s| perm[s]).collect();
    let mut transitions = m.transitions().map(|_, a| a.permute(&perm));

    let size = n.max(2);
    if n == 1 {
        let pad = |a: &Matrix| {
            Matrix::from_fn(mode, 2, 2, |i, j| match (i, j) {
                (0, 0) => a.get(0, 0).clone(),
                (1, 1) => Scalar::one(mode),
                _ => Scalar::zero(mode),
            })
            .expect("uniform mode")
        };
        transitions = transitions.map(|_, a| pad(a));
    }

    let collapse = Matrix::from_fn(mode, size, size, |i, j| {
        let hit = match i {
            0 => accept.contains(&j),
            1 => !accept.contains(&j),
            _ => false,
        };
        if hit {
            Scalar::one(mode)
        } else {
            Scalar::zero(mode)
        }
    })?;
    transitions.right = collapse.mul(&transitions.right)?;

    let machine = MatrixAutomaton::new(m.alphabet().clone(), transitions, 0, [0])?;
    Ok(Pfa::new(machine)?)
}

/// Reduces cutpoint `λ` to `1/2`: at `¢` the machine enters `P` with
/// probability `α` and a constant gadget state with probability `1−α`, so
/// `f' = α·f + (1−α)·β` with `αλ + (1−α)β = 1/2`.
pub fn shift_cutpoint(p: &Pfa, lambda: &Scalar) -> Result<Pfa, TransformError> {
    let m = p.machine();
    require_rational(m, "shift_cutpoint")?;
    let lambda = lambda
        .as_rational()
        .ok_or(TransformError::NotRational("shift_cutpoint"))?;
    let mode = ScalarMode::Rational;
    let zero = Scalar::zero(mode);
    let one = Scalar::one(mode);
    let lam = Scalar::Rational(lambda.clone());
    if lam.is_negative() || lam.is_zero() || lam.cmp_tol(&one, 0.0).is_ge() {
        return Err(TransformError::Cutpoint(lam.to_string()));
    }
    let half = Scalar::ratio(1, 2);
    let two = Scalar::from_int(mode, 2);
    let (alpha, gadget_accepts) = match lam.cmp_tol(&half, 0.0) {
        std::cmp::Ordering::Equal => return Ok(p.clone()),
        std::cmp::Ordering::Less => (&one / &(&two * &(&one - &lam)), true),
        std::cmp::Ordering::Greater => (&one / &(&two * &lam), false),
    };

    let n = m.states();
    let g = n;
    let start = m.start();
    let extend = |a: &Matrix| {
        Matrix::from_fn(mode, n + 1, n + 1, |i, j| match (i < n, j < n) {
            (true, true) => a.get(i, j).clone(),
            (false, false) => one.clone(),
            _ => zero.clone(),
        })
        .expect("uniform mode")
    };
    let mut transitions = m.transitions().map(|_, a| extend(a));
    let left = &m.transitions().left;
    transitions.left = Matrix::from_fn(mode, n + 1, n + 1, |i, j| {
        if j == start {
            if i < n {
                &alpha * left.get(i, j)
            } else {
                &one - &alpha
            }
        } else {
            transitions.left.get(i, j).clone()
        }
    })?;
    let mut accept: BTreeSet<usize> = m.accept().clone();
    if gadget_accepts {
        accept.insert(g);
    }
    let machine = MatrixAutomaton::new(m.alphabet().clone(), transitions, start, accept)?;
    Ok(Pfa::new(machine)?)
}

/// `(n+1)`-state integer AfA preserving the sign of `f − 1/2`; words with
/// `f = 1/2` get value exactly 0, all others at least 1/3.
pub fn pfa_to_afa(p: &Pfa) -> Result<Afa, TransformError> {
    let canon = canonicalize_pfa(p)?;
    let m = canon.machine();
    let n = m.states();
    let mode = m.mode();
    let d = DenominatorClearing::of(m)?.scalar();

    let mut transitions = m
        .transitions()
        .try_map(|_, a| a.scale(&d).map(|s| s.affine_extension()))?;

    let collector = Matrix::from_fn(mode, n + 1, n + 1, |i, j| match (i, j) {
        (0, 0) => Scalar::one(mode),
        (0, 1) => Scalar::from_int(mode, -1),
        (1, 1) => Scalar::from_int(mode, 2),
        (1, j) if j >= 2 => Scalar::one(mode),
        _ => Scalar::zero(mode),
    })?;
    transitions.right = collector.mul(&transitions.right)?;

    let machine = MatrixAutomaton::new(m.alphabet().clone(), transitions, 0, [0])?;
    Ok(Afa::new(machine)?)
}

/// `t` copies in parallel: Kronecker powers of every transition, accepting
/// every state tuple with at least one accepting component. On every word
/// `f' = 1 − (1 − f)^t`.
pub fn amplify(m: &Afa, t: usize) -> Result<Afa, TransformError> {
    amplify_with_bound(m, t, DEFAULT_STATE_BOUND)
}

pub fn amplify_with_bound(m: &Afa, t: usize, bound: usize) -> Result<Afa, TransformError> {
    if t == 0 {
        return Err(TransformError::NoCopies);
    }
    let base = m.machine();
    let n = base.states();
    let states = u32::try_from(t)
        .ok()
        .and_then(|e| n.checked_pow(e))
        .filter(|&s| s <= bound)
        .ok_or_else(|| TransformError::StateBound {
            states: format!("{n}^{t}"),
            bound,
        })?;

    let transitions = base
        .transitions()
        .try_map(|_, a| kronecker_power(a, t))?;
    let start = (0..t).fold(0, |acc, _| acc * n + base.start());
    let accept = (0..states).filter(|&idx| {
        let mut x = idx;
        (0..t).any(|_| {
            let digit = x % n;
            x /= n;
            base.accept().contains(&digit)
        })
    });
    let machine = MatrixAutomaton::new(base.alphabet().clone(), transitions, start, accept)?;
    Ok(Afa::new(machine)?.with_construction(Construction {
        copies: t,
        base_states: n,
    }))
}

/// `(n²+1)`-state AfA reproducing the MCQFA value on every word. The
/// configuration tracks `v ⊗ v`; the last step sums the diagonal accept
/// amplitudes `(q, q)` into entry 0 and everything else into entry 1.
pub fn mcqfa_to_afa(m: &Mcqfa) -> Result<Afa, TransformError> {
    let base = m.machine();
    let n = base.states();
    let mode = base.mode();
    let size = n * n + 1;

    let mut transitions = base
        .transitions()
        .try_map(|_, u| kronecker(u, u).map(|k| k.affine_extension()))?;

    let diagonal: BTreeSet<usize> = base.accept().iter().map(|&q| q * n + q).collect();
    let collector = Matrix::from_fn(mode, size, size, |i, j| {
        let hit = match i {
            0 => diagonal.contains(&j),
            1 => !diagonal.contains(&j),
            _ => false,
        };
        if hit {
            Scalar::one(mode)
        } else {
            Scalar::zero(mode)
        }
    })?;
    transitions.right = collector.mul(&transitions.right)?;

    let start = base.start() * n + base.start();
    let machine = MatrixAutomaton::new(base.alphabet().clone(), transitions, start, [0])?;
    Ok(Afa::new(machine)?)
}

/// Index `a = i·n + j` of the Hermitian basis: `E_ii` on the diagonal, the
/// symmetric `E_ij + E_ji` above it and `i(E_ji − E_ij)` below it.
#[derive(Clone, Copy)]
enum BasisElement {
    Diagonal(usize),
    Symmetric(usize, usize),
    Antisymmetric(usize, usize),
}

impl BasisElement {
    fn at(n: usize, a: usize) -> Self {
        let (i, j) = (a / n, a % n);
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => BasisElement::Diagonal(i),
            std::cmp::Ordering::Less => BasisElement::Symmetric(i, j),
            std::cmp::Ordering::Greater => BasisElement::Antisymmetric(j, i),
        }
    }

    fn matrix(self, mode: ScalarMode, n: usize, scale: &Scalar) -> ComplexMatrix {
        let unit = |i, j| ComplexMatrix::unit(mode, n, i, j);
        let raw = match self {
            BasisElement::Diagonal(i) => return unit(i, i),
            BasisElement::Symmetric(u, v) => unit(u, v).add(&unit(v, u)),
            BasisElement::Antisymmetric(u, v) => unit(u, v)
                .add(&unit(v, u).scale(&Scalar::from_int(mode, -1)).expect("uniform mode"))
                .map(|d| d.times_i()),
        }
        .expect("uniform shapes");
        raw.scale(scale).expect("uniform mode")
    }

    /// `Re tr(B X)` for this (unscaled) element.
    fn pair(self, x: &ComplexMatrix) -> Scalar {
        match self {
            BasisElement::Diagonal(i) => x.get(i, i).0.clone(),
            BasisElement::Symmetric(u, v) => x.get(u, v).0 + x.get(v, u).0,
            BasisElement::Antisymmetric(u, v) => x.get(u, v).1 - x.get(v, u).1,
        }
    }
}

/// `n²`-dimensional real GFA with `f_G = f_Q`. Each superoperator is written
/// in a Hermitian basis: `T[a][b] = Re tr(D_a Φ(B_b))` with `D` the dual
/// basis. Float machines use the orthonormal basis (off-diagonal elements
/// scaled by `1/√2`); rational machines keep the unscaled basis with dual
/// `B/‖B‖²`, which stays exact.
pub fn qfa_to_gfa(q: &Qfa) -> Result<Gfa, TransformError> {
    let n = crate::automata::Automaton::states(q);
    let mode = crate::automata::Automaton::mode(q);
    let dim = n * n;
    let (basis_scale, dual_scale) = match mode {
        ScalarMode::Float => {
            let s = Scalar::Float(std::f64::consts::FRAC_1_SQRT_2);
            (s.clone(), s)
        }
        ScalarMode::Rational => (Scalar::one(mode), Scalar::ratio(1, 2)),
    };
    let elements: Vec<BasisElement> = (0..dim).map(|a| BasisElement::at(n, a)).collect();
    let basis: Vec<ComplexMatrix> = elements
        .iter()
        .map(|e| match e {
            BasisElement::Diagonal(_) => e.matrix(mode, n, &Scalar::one(mode)),
            _ => e.matrix(mode, n, &basis_scale),
        })
        .collect();

    let transfer = |symbol: Symbol| -> Result<Matrix, TransformError> {
        let mut data = vec![Scalar::zero(mode); dim * dim];
        for (b, bm) in basis.iter().enumerate() {
            let image = q.channel(symbol, bm).expect("symbol present");
            for (a, e) in elements.iter().enumerate() {
                let coeff = match e {
                    BasisElement::Diagonal(_) => e.pair(&image),
                    _ => &dual_scale * &e.pair(&image),
                };
                data[a * dim + b] = coeff;
            }
        }
        Ok(Matrix::new(mode, dim, dim, data)?)
    };

    let kraus = q.kraus();
    let transitions = Transitions::new(
        transfer(Symbol::LeftEnd)?,
        kraus
            .letters
            .keys()
            .map(|&c| transfer(Symbol::Letter(c)).map(|t| (c, t)))
            .collect::<Result<_, _>>()?,
        transfer(Symbol::RightEnd)?,
    );
    let s = q.start_state();
    let initial = Vector::basis(mode, dim, s * n + s);
    let accept: BTreeSet<usize> = q.accept().iter().map(|&j| j * n + j).collect();
    let functional = Vector::new(
        mode,
        (0..dim)
            .map(|a| {
                if accept.contains(&a) {
                    Scalar::one(mode)
                } else {
                    Scalar::zero(mode)
                }
            })
            .collect(),
    )?;
    Ok(Gfa::new(
        crate::automata::Automaton::alphabet(q).clone(),
        transitions,
        initial,
        functional,
    )?)
}

/// `(n+1)`-state AfA whose final configuration is `(f_G, 1−f_G, 0, …, 0)`.
/// Exact whenever `f_G ∈ [0, 1]`.
pub fn gfa_to_afa(g: &Gfa) -> Result<Afa, TransformError> {
    let n = crate::automata::Automaton::states(g);
    let mode = crate::automata::Automaton::mode(g);
    let one = Scalar::one(mode);
    let zero = Scalar::zero(mode);
    let mut transitions = g.transitions().map(|_, a| a.affine_extension());

    let initial = g.initial();
    let unit_start = (0..n).find(|&s| *initial == Vector::basis(mode, n, s));
    let start = match unit_start {
        Some(s) => s,
        None => {
            // Start in the compensation state and let ¢ load the initial
            // vector into the first n coordinates.
            let image = g.transitions().left.apply(initial)?;
            let rest = &one - &image.sum();
            let left = &transitions.left;
            transitions.left = Matrix::from_fn(mode, n + 1, n + 1, |i, j| {
                if j < n {
                    left.get(i, j).clone()
                } else if i < n {
                    image.get(i).clone()
                } else {
                    rest.clone()
                }
            })?;
            n
        }
    };

    let functional = g.functional();
    let collector = Matrix::from_fn(mode, n + 1, n + 1, |i, j| {
        let f = if j < n { functional.get(j).clone() } else { zero.clone() };
        match i {
            0 => f,
            1 => &one - &f,
            _ => zero.clone(),
        }
    })?;
    transitions.right = collector.mul(&transitions.right)?;

    let machine = MatrixAutomaton::new(
        crate::automata::Automaton::alphabet(g).clone(),
        transitions,
        start,
        [0],
    )?;
    Ok(Afa::new(machine)?)
}

/// `gfa_to_afa ∘ qfa_to_gfa`: `n²+1` states.
pub fn qfa_to_afa(q: &Qfa) -> Result<Afa, TransformError> {
    gfa_to_afa(&qfa_to_gfa(q)?)
}
