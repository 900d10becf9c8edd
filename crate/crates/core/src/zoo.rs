//! Concrete machine families: COUNT, the MOD families, LESS, INTERVAL and
//! the general two-state unary AfA.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::automata::{Afa, Machine, MatrixAutomaton, Mcqfa, ModelError};
use crate::linalg::{kronecker, Matrix};
use crate::scalar::{Scalar, ScalarMode};

/// Seed used for default `modp` angle lists when `AFALAB_SEED` is unset.
pub const DEFAULT_SEED: u64 = 0x05EE_DAFA;

#[derive(Debug, Error, PartialEq)]
pub enum ZooError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// `AFALAB_SEED` if set and numeric, else [`DEFAULT_SEED`].
pub fn env_seed() -> u64 {
    std::env::var("AFALAB_SEED")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

#[derive(Clone, Debug, PartialEq)]
pub enum ZooSpec {
    Count(u32),
    ModP { p: u64, ks: Vec<u64> },
    Mod2k(u32),
    Mod4k(u32),
    Less(u64),
    Interval(u64, u64),
    TwoStateUnary(UnaryTuple),
}

impl ZooSpec {
    pub fn build(&self) -> Result<Machine, ZooError> {
        Ok(match self {
            ZooSpec::Count(n) => count_afa(*n)?.into(),
            ZooSpec::ModP { p, ks } => modp_mcqfa(*p, ks)?.into(),
            ZooSpec::Mod2k(k) => mod2k_mcqfa(*k)?.into(),
            ZooSpec::Mod4k(k) => mod4k_afa(*k)?.into(),
            ZooSpec::Less(n) => less_afa(*n)?.into(),
            ZooSpec::Interval(k, l) => interval_afa(*k, *l)?.into(),
            ZooSpec::TwoStateUnary(t) => two_state_unary_afa(t)?.into(),
        })
    }
}

/// Parameters `(p, q, f1, f2, m)` of the two-state unary AfA.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnaryTuple {
    pub p: BigRational,
    pub q: BigRational,
    pub f1: BigRational,
    pub f2: BigRational,
    pub m: BigRational,
}

impl UnaryTuple {
    pub fn new(p: BigRational, q: BigRational, f1: BigRational, f2: BigRational, m: BigRational) -> Self {
        UnaryTuple { p, q, f1, f2, m }
    }

    /// Shorthand from `(num, den)` pairs.
    pub fn from_ratios(v: [(i64, i64); 5]) -> Self {
        let r = |(n, d): (i64, i64)| BigRational::new(n.into(), d.into());
        UnaryTuple::new(r(v[0]), r(v[1]), r(v[2]), r(v[3]), r(v[4]))
    }
}

fn rat(x: &BigRational) -> Scalar {
    Scalar::Rational(x.clone())
}

fn rational_rows(rows: [[BigRational; 2]; 2]) -> Matrix {
    let [[a, b], [c, d]] = rows;
    Matrix::from_rows(
        ScalarMode::Rational,
        vec![vec![rat(&a), rat(&b)], vec![rat(&c), rat(&d)]],
    )
    .expect("2x2 rational")
}

fn float_rotation(theta: f64) -> Matrix {
    let (s, c) = theta.sin_cos();
    Matrix::from_rows(
        ScalarMode::Float,
        vec![
            vec![Scalar::Float(c), Scalar::Float(-s)],
            vec![Scalar::Float(s), Scalar::Float(c)],
        ],
    )
    .expect("2x2 float")
}

/// Two-state AfA accepting `a^n` with value 1 and every other unary word
/// with value at most 2/3.
pub fn count_afa(n: u32) -> Result<Afa, ZooError> {
    if n == 0 {
        return Err(ZooError::Parameter("COUNT needs n >= 1".into()));
    }
    let big = BigRational::from_integer(BigInt::from(2u8).pow(n));
    let one = BigRational::one();
    let zero = BigRational::zero();
    let half = BigRational::new(1.into(), 2.into());
    let left = rational_rows([[big.clone(), zero.clone()], [&one - &big, one.clone()]]);
    let a = rational_rows([[half.clone(), zero], [half, one]]);
    let machine = MatrixAutomaton::unary(left, a, Matrix::identity(ScalarMode::Rational, 2), 0, [0])?;
    Ok(Afa::new(machine)?)
}

/// Two-state MCQFA that rotates by `angle` per letter, accepting on `q_0`.
pub fn rotation_mcqfa_float(angle: f64) -> Result<Mcqfa, ZooError> {
    let id = Matrix::identity(ScalarMode::Float, 2);
    let machine = MatrixAutomaton::unary(id.clone(), float_rotation(angle), id, 0, [0])?;
    Ok(Mcqfa::new(machine)?)
}

/// Exact rotation with `cos² + sin² = 1`, e.g. `(3/5, 4/5)` or the quarter
/// turn `(0, 1)`.
pub fn rotation_mcqfa(cos: &BigRational, sin: &BigRational, accept: usize) -> Result<Mcqfa, ZooError> {
    if cos * cos + sin * sin != BigRational::one() {
        return Err(ZooError::Parameter(format!("({cos}, {sin}) is not on the unit circle")));
    }
    let r = rational_rows([[cos.clone(), -sin.clone()], [sin.clone(), cos.clone()]]);
    let id = Matrix::identity(ScalarMode::Rational, 2);
    let machine = MatrixAutomaton::unary(id.clone(), r, id, 0, [accept])?;
    Ok(Mcqfa::new(machine)?)
}

/// Rotation by `π/2^{k+1}` per letter: each block `a^{2^k}` is a quarter
/// turn, so `f(a^{j·2^k})` is 1 for even `j` and 0 for odd `j`.
pub fn mod2k_mcqfa(k: u32) -> Result<Mcqfa, ZooError> {
    if k == 0 {
        return Err(ZooError::Parameter("MOD2^k needs k >= 1".into()));
    }
    rotation_mcqfa_float(PI / 2f64.powi(k as i32 + 1))
}

/// The same rotation embedded in a 3-state AfA by a compensation row. After
/// `4j` blocks the configuration is `e_0`, after `4j+1` blocks it is `e_1`.
pub fn mod4k_afa(k: u32) -> Result<Afa, ZooError> {
    if k == 0 {
        return Err(ZooError::Parameter("MOD4^k needs k >= 1".into()));
    }
    rotation_afa(float_rotation(PI / 2f64.powi(k as i32 + 1)))
}

/// Exact quarter turn per letter as a 3-state rational AfA (block size 1).
pub fn quarter_turn_afa() -> Result<Afa, ZooError> {
    let m = rotation_mcqfa(&BigRational::zero(), &BigRational::one(), 0)?;
    rotation_afa(m.machine().transitions().letters[&'a'].clone())
}

fn rotation_afa(r: Matrix) -> Result<Afa, ZooError> {
    let mode = r.mode();
    let id = Matrix::identity(mode, 3);
    let machine = MatrixAutomaton::unary(id.clone(), r.affine_extension(), id, 0, [0])?;
    Ok(Afa::new(machine)?)
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// `⌈log₂ p⌉` angle multipliers drawn uniformly from `[1, p−1]`.
pub fn default_ks(p: u64, seed: u64) -> Vec<u64> {
    let count = (64 - (p - 1).leading_zeros()).max(1) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.gen_range(1..p)).collect()
}

/// Tensor product of rotations by `2πk/p`; the all-`q_0` tuple accepts, so
/// `f(a^j) = Π cos²(2πk_i j/p)`.
pub fn modp_mcqfa(p: u64, ks: &[u64]) -> Result<Mcqfa, ZooError> {
    if !is_prime(p) {
        return Err(ZooError::Parameter(format!("{p} is not prime")));
    }
    if ks.is_empty() {
        return Err(ZooError::Parameter("MOD_p needs at least one k".into()));
    }
    if let Some(k) = ks.iter().find(|&&k| k == 0 || k >= p) {
        return Err(ZooError::Parameter(format!("k = {k} outside [1, {}]", p - 1)));
    }
    let mut a = Matrix::identity(ScalarMode::Float, 1);
    for &k in ks {
        let r = float_rotation(2.0 * PI * k as f64 / p as f64);
        a = kronecker(&a, &r).expect("float mode");
    }
    let n = a.rows();
    let id = Matrix::identity(ScalarMode::Float, n);
    let machine = MatrixAutomaton::unary(id.clone(), a, id, 0, [0])?;
    Ok(Mcqfa::new(machine)?)
}

/// Two-state AfA with `A_¢ = [[m,0],[1−m,1]]`, `A_a = [[1−q,p],[q,1−p]]`
/// and `A_$ = [[f1,f2],[1−f1,1−f2]]`, start and accept `e_0`.
pub fn two_state_unary_afa(t: &UnaryTuple) -> Result<Afa, ZooError> {
    let one = BigRational::one();
    let zero = BigRational::zero();
    let left = rational_rows([[t.m.clone(), zero], [&one - &t.m, one.clone()]]);
    let a = rational_rows([[&one - &t.q, t.p.clone()], [t.q.clone(), &one - &t.p]]);
    let right = rational_rows([[t.f1.clone(), t.f2.clone()], [&one - &t.f1, &one - &t.f2]]);
    let machine = MatrixAutomaton::unary(left, a, right, 0, [0])?;
    Ok(Afa::new(machine)?)
}

fn drift_tuple(p: BigRational, m: BigRational) -> UnaryTuple {
    UnaryTuple::new(p.clone(), -p, BigRational::one(), BigRational::zero(), m)
}

/// Parameters recognising `{a^j : j ≤ n}` at cutpoint 3/4: start just
/// below `x = 3/2` and drift left by `3/(4(n+1))`, leaving the window
/// `(3/4, 3/2)` after `n` steps.
pub fn less_tuple(n: u64) -> UnaryTuple {
    let n1 = BigRational::from_integer(BigInt::from(n + 1));
    let three = BigRational::from_integer(3.into());
    let p = -(&three / (BigRational::from_integer(4.into()) * &n1));
    let m = BigRational::new(3.into(), 2.into()) - &three / (BigRational::from_integer(8.into()) * &n1);
    drift_tuple(p, m)
}

pub fn less_afa(n: u64) -> Result<Afa, ZooError> {
    let m = two_state_unary_afa(&less_tuple(n))?;
    #[cfg(debug_assertions)]
    check_window(&m, |j| j <= n, n + 12);
    Ok(m)
}

/// Parameters recognising `{a^j : k ≤ j ≤ l}` at cutpoint 3/4.
pub fn interval_tuple(k: u64, l: u64) -> Result<UnaryTuple, ZooError> {
    if k < 1 || k >= l {
        return Err(ZooError::Parameter(format!("INTERVAL needs 1 <= k < l, got ({k}, {l})")));
    }
    let d = BigInt::from(l - k);
    let step = BigRational::new(3.into(), BigInt::from(4) * d + 8);
    let m = BigRational::new(3.into(), 2.into()) + &step * BigRational::from_integer(BigInt::from(k - 1));
    Ok(drift_tuple(-step, m))
}

pub fn interval_afa(k: u64, l: u64) -> Result<Afa, ZooError> {
    let m = two_state_unary_afa(&interval_tuple(k, l)?)?;
    #[cfg(debug_assertions)]
    check_window(&m, |j| k <= j && j <= l, l + k + 10);
    Ok(m)
}

/// Debug-build oracle: the 3/4-cutpoint language on `j ≤ max` is `member`.
#[cfg(debug_assertions)]
fn check_window(m: &Afa, member: impl Fn(u64) -> bool, max: u64) {
    let lambda = Scalar::ratio(3, 4);
    let values = crate::automata::unary_values(m, 'a', max as usize).expect("unary run");
    for (j, v) in values.iter().enumerate() {
        debug_assert_eq!(
            v.cmp_tol(&lambda, 0.0).is_gt(),
            member(j as u64),
            "window check failed at a^{j}"
        );
    }
}
