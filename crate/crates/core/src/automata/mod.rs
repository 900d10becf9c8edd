//! Machine descriptors for the five automaton models and their evaluation
//! semantics.
//!
//! Every input `w` is read as `¢ w $`; each descriptor therefore carries a
//! transition for both end-markers. Models that have no use for an
//! end-marker store the identity there.

mod complex;
mod gfa;
mod linear;
mod qfa;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::LinalgError;
use crate::scalar::{Scalar, ScalarMode};

pub use complex::ComplexMatrix;
pub use gfa::Gfa;
pub use linear::{Afa, Construction, MatrixAutomaton, Mcqfa, Pfa};
pub use qfa::Qfa;

/// Tape symbol: a letter of the alphabet or one of the end-markers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    LeftEnd,
    Letter(char),
    RightEnd,
}

impl Symbol {
    /// Key in the machine file format: `^` for ¢, `$` for $.
    pub fn key(&self) -> String {
        match self {
            Symbol::LeftEnd => "^".to_string(),
            Symbol::RightEnd => "$".to_string(),
            Symbol::Letter(c) => c.to_string(),
        }
    }

    pub fn from_key(key: &str) -> Option<Symbol> {
        let mut chars = key.chars();
        let c = chars.next()?;
        if chars.next().is_some() {
            return None;
        }
        Some(match c {
            '^' => Symbol::LeftEnd,
            '$' => Symbol::RightEnd,
            c => Symbol::Letter(c),
        })
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::LeftEnd => f.write_str("¢"),
            Symbol::RightEnd => f.write_str("$"),
            Symbol::Letter(c) => write!(f, "{c}"),
        }
    }
}

/// Input alphabet, end-markers excluded. Letters are kept sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet(Vec<char>);

impl Alphabet {
    pub fn new(letters: impl IntoIterator<Item = char>) -> Result<Self, ModelError> {
        let mut letters: Vec<char> = letters.into_iter().collect();
        letters.sort_unstable();
        for w in letters.windows(2) {
            if w[0] == w[1] {
                return Err(ModelError::Alphabet(format!("duplicate letter `{}`", w[0])));
            }
        }
        if let Some(c) = letters.iter().find(|c| matches!(c, '^' | '$')) {
            return Err(ModelError::Alphabet(format!(
                "`{c}` is reserved for an end-marker"
            )));
        }
        Ok(Alphabet(letters))
    }

    pub fn unary() -> Self {
        Alphabet(vec!['a'])
    }

    pub fn letters(&self) -> &[char] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, c: char) -> bool {
        self.0.binary_search(&c).is_ok()
    }

    pub fn is_unary(&self) -> bool {
        self.0.len() == 1
    }

    /// All words of length `0..=max_len`, ordered by length then
    /// lexicographically.
    pub fn words_up_to(&self, max_len: usize) -> Vec<String> {
        let mut out = vec![String::new()];
        let mut level = vec![String::new()];
        for _ in 0..max_len {
            let mut next = Vec::with_capacity(level.len() * self.len());
            for w in &level {
                for &c in &self.0 {
                    let mut x = w.clone();
                    x.push(c);
                    next.push(x);
                }
            }
            out.extend(next.iter().cloned());
            level = next;
        }
        out
    }
}

/// One value per tape symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct Transitions<T> {
    pub left: T,
    pub letters: BTreeMap<char, T>,
    pub right: T,
}

impl<T> Transitions<T> {
    pub fn new(left: T, letters: BTreeMap<char, T>, right: T) -> Self {
        Transitions {
            left,
            letters,
            right,
        }
    }

    pub fn get(&self, symbol: Symbol) -> Option<&T> {
        match symbol {
            Symbol::LeftEnd => Some(&self.left),
            Symbol::RightEnd => Some(&self.right),
            Symbol::Letter(c) => self.letters.get(&c),
        }
    }

    /// `¢`, then letters in order, then `$`.
    pub fn iter(&self) -> impl Iterator<Item = (Symbol, &T)> {
        std::iter::once((Symbol::LeftEnd, &self.left))
            .chain(self.letters.iter().map(|(c, t)| (Symbol::Letter(*c), t)))
            .chain(std::iter::once((Symbol::RightEnd, &self.right)))
    }

    pub fn try_map<U, E>(&self, mut f: impl FnMut(Symbol, &T) -> Result<U, E>) -> Result<Transitions<U>, E> {
        let left = f(Symbol::LeftEnd, &self.left)?;
        let mut letters = BTreeMap::new();
        for (c, t) in &self.letters {
            letters.insert(*c, f(Symbol::Letter(*c), t)?);
        }
        let right = f(Symbol::RightEnd, &self.right)?;
        Ok(Transitions {
            left,
            letters,
            right,
        })
    }

    pub fn map<U>(&self, mut f: impl FnMut(Symbol, &T) -> U) -> Transitions<U> {
        self.try_map::<U, std::convert::Infallible>(|s, t| Ok(f(s, t)))
            .unwrap_or_else(|e| match e {})
    }

    pub(crate) fn check_letters(&self, alphabet: &Alphabet) -> Result<(), ModelError> {
        for c in alphabet.letters() {
            if !self.letters.contains_key(c) {
                return Err(ModelError::MissingTransition(Symbol::Letter(*c)));
            }
        }
        if let Some(c) = self.letters.keys().find(|c| !alphabet.contains(**c)) {
            return Err(ModelError::UnexpectedTransition(*c));
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("invalid alphabet: {0}")]
    Alphabet(String),
    #[error("missing transition for symbol {0}")]
    MissingTransition(Symbol),
    #[error("transition given for letter `{0}` outside the alphabet")]
    UnexpectedTransition(char),
    #[error("transition for {symbol} is {found:?}, expected {expected}x{expected}")]
    Shape {
        symbol: Symbol,
        expected: usize,
        found: (usize, usize),
    },
    #[error("transition for {symbol} uses {found} scalars in a {expected} machine")]
    Mode {
        symbol: Symbol,
        expected: ScalarMode,
        found: ScalarMode,
    },
    #[error("transition for {symbol} is not {required}")]
    Class {
        symbol: Symbol,
        required: &'static str,
    },
    #[error("Kraus operators for {0} do not satisfy Σ K†K = I")]
    KrausIncomplete(Symbol),
    #[error("Kraus set for {0} is empty")]
    EmptyKraus(Symbol),
    #[error("start state {start} out of range for {states} states")]
    StartOutOfRange { start: usize, states: usize },
    #[error("accept state {state} out of range for {states} states")]
    AcceptOutOfRange { state: usize, states: usize },
    #[error("cutpoint {0} outside [0, 1]")]
    Cutpoint(String),
    #[error("machine must have at least one state")]
    NoStates,
    #[error("{name} vector has dimension {found}, expected {expected}")]
    VectorDimension {
        name: &'static str,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Error, PartialEq)]
pub enum RunError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(char),
    #[error("final configuration has zero ℓ₁-norm (degenerate machine)")]
    DegenerateNorm,
    #[error("acceptance value has imaginary part {0:e}")]
    ImaginaryValue(f64),
    #[error("cutpoint is {cutpoint} but machine is {machine}")]
    ModeMismatch {
        cutpoint: ScalarMode,
        machine: ScalarMode,
    },
    #[error("equality comparisons in float mode need a tolerance")]
    MissingTolerance,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Common evaluation interface: `¢` is consumed by [`Automaton::start`],
/// letters by [`Automaton::step`], and `$` plus the acceptance rule by
/// [`Automaton::finish`].
pub trait Automaton {
    type Config: Clone;

    fn alphabet(&self) -> &Alphabet;
    fn mode(&self) -> ScalarMode;
    fn states(&self) -> usize;

    fn start(&self) -> Result<Self::Config, RunError>;
    fn step(&self, config: &Self::Config, letter: char) -> Result<Self::Config, RunError>;
    fn finish(&self, config: &Self::Config) -> Result<Scalar, RunError>;

    /// `f_M(w)`.
    fn run(&self, word: &str) -> Result<Scalar, RunError> {
        let mut config = self.start()?;
        for c in word.chars() {
            config = self.step(&config, c)?;
        }
        self.finish(&config)
    }
}

/// Values on every word of length `0..=max_len`, ordered by length then
/// lexicographically. Prefix configurations are shared.
pub fn values_up_to<A: Automaton>(m: &A, max_len: usize) -> Result<Vec<(String, Scalar)>, RunError> {
    let mut out = Vec::new();
    let mut level = vec![(String::new(), m.start()?)];
    for depth in 0..=max_len {
        for (w, c) in &level {
            out.push((w.clone(), m.finish(c)?));
        }
        if depth == max_len {
            break;
        }
        let mut next = Vec::with_capacity(level.len() * m.alphabet().len());
        for (w, c) in &level {
            for &letter in m.alphabet().letters() {
                let mut x = w.clone();
                x.push(letter);
                next.push((x, m.step(c, letter)?));
            }
        }
        level = next;
    }
    Ok(out)
}

/// `f(a^j)` for `j = 0..=max_len`, computed incrementally.
pub fn unary_values<A: Automaton>(m: &A, letter: char, max_len: usize) -> Result<Vec<Scalar>, RunError> {
    let mut out = Vec::with_capacity(max_len + 1);
    let mut config = m.start()?;
    for j in 0..=max_len {
        out.push(m.finish(&config)?);
        if j < max_len {
            config = m.step(&config, letter)?;
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    StrictlyGreater,
    NotEqual,
    Equal,
}

/// Cutpoint `λ ∈ [0,1]` with its comparison rule.
#[derive(Clone, Debug, PartialEq)]
pub struct CutpointSpec {
    lambda: Scalar,
    comparison: Comparison,
}

impl CutpointSpec {
    pub fn new(lambda: Scalar, comparison: Comparison) -> Result<Self, ModelError> {
        let mode = lambda.mode();
        if lambda.is_negative() || lambda.cmp_tol(&Scalar::one(mode), 0.0).is_gt() {
            return Err(ModelError::Cutpoint(lambda.to_string()));
        }
        Ok(CutpointSpec { lambda, comparison })
    }

    pub fn greater(lambda: Scalar) -> Result<Self, ModelError> {
        CutpointSpec::new(lambda, Comparison::StrictlyGreater)
    }

    pub fn lambda(&self) -> &Scalar {
        &self.lambda
    }

    pub fn comparison(&self) -> Comparison {
        self.comparison
    }

    /// Applies the comparison to an acceptance value. Rational values compare
    /// exactly; float equality needs `tol`.
    pub fn holds(&self, value: &Scalar, tol: Option<f64>) -> Result<bool, RunError> {
        if value.mode() != self.lambda.mode() {
            return Err(RunError::ModeMismatch {
                cutpoint: self.lambda.mode(),
                machine: value.mode(),
            });
        }
        let tol = match (value.mode(), self.comparison, tol) {
            (_, Comparison::StrictlyGreater, _) | (ScalarMode::Rational, _, _) => 0.0,
            (ScalarMode::Float, _, Some(t)) => t,
            (ScalarMode::Float, _, None) => return Err(RunError::MissingTolerance),
        };
        let ord = value.cmp_tol(&self.lambda, tol);
        Ok(match self.comparison {
            Comparison::StrictlyGreater => ord.is_gt(),
            Comparison::NotEqual => ord.is_ne(),
            Comparison::Equal => ord.is_eq(),
        })
    }
}

pub fn accepts<A: Automaton>(
    m: &A,
    word: &str,
    spec: &CutpointSpec,
    tol: Option<f64>,
) -> Result<bool, RunError> {
    spec.holds(&m.run(word)?, tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Pfa,
    Afa,
    Mcqfa,
    Qfa,
    Gfa,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Pfa => "pfa",
            Model::Afa => "afa",
            Model::Mcqfa => "mcqfa",
            Model::Qfa => "qfa",
            Model::Gfa => "gfa",
        })
    }
}

/// Any validated machine.
#[derive(Clone, Debug, PartialEq)]
pub enum Machine {
    Pfa(Pfa),
    Afa(Afa),
    Mcqfa(Mcqfa),
    Qfa(Qfa),
    Gfa(Gfa),
}

macro_rules! dispatch {
    ($self:expr, $m:ident => $body:expr) => {
        match $self {
            Machine::Pfa($m) => $body,
            Machine::Afa($m) => $body,
            Machine::Mcqfa($m) => $body,
            Machine::Qfa($m) => $body,
            Machine::Gfa($m) => $body,
        }
    };
}

impl Machine {
    pub fn model(&self) -> Model {
        match self {
            Machine::Pfa(_) => Model::Pfa,
            Machine::Afa(_) => Model::Afa,
            Machine::Mcqfa(_) => Model::Mcqfa,
            Machine::Qfa(_) => Model::Qfa,
            Machine::Gfa(_) => Model::Gfa,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        dispatch!(self, m => m.alphabet())
    }

    pub fn mode(&self) -> ScalarMode {
        dispatch!(self, m => m.mode())
    }

    pub fn states(&self) -> usize {
        dispatch!(self, m => m.states())
    }

    pub fn run(&self, word: &str) -> Result<Scalar, RunError> {
        dispatch!(self, m => m.run(word))
    }

    pub fn values_up_to(&self, max_len: usize) -> Result<Vec<(String, Scalar)>, RunError> {
        dispatch!(self, m => values_up_to(m, max_len))
    }

    pub fn unary_values(&self, max_len: usize) -> Result<Vec<Scalar>, RunError> {
        let letter = *self
            .alphabet()
            .letters()
            .first()
            .ok_or(RunError::UnknownSymbol('a'))?;
        dispatch!(self, m => unary_values(m, letter, max_len))
    }
}

impl From<Pfa> for Machine {
    fn from(m: Pfa) -> Self {
        Machine::Pfa(m)
    }
}

impl From<Afa> for Machine {
    fn from(m: Afa) -> Self {
        Machine::Afa(m)
    }
}

impl From<Mcqfa> for Machine {
    fn from(m: Mcqfa) -> Self {
        Machine::Mcqfa(m)
    }
}

impl From<Qfa> for Machine {
    fn from(m: Qfa) -> Self {
        Machine::Qfa(m)
    }
}

impl From<Gfa> for Machine {
    fn from(m: Gfa) -> Self {
        Machine::Gfa(m)
    }
}
