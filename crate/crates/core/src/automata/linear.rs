use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Alphabet, Automaton, ModelError, RunError, Symbol, Transitions};
use crate::linalg::{is_affine, is_orthogonal, is_stochastic, matvec, Matrix, Vector};
use crate::scalar::{Scalar, ScalarMode, DEFAULT_TOL};

/// Shared shape of the matrix-driven models (PFA, AfA, MCQFA): one square
/// matrix per tape symbol, a start state and a set of accept states.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixAutomaton {
    alphabet: Alphabet,
    states: usize,
    mode: ScalarMode,
    transitions: Transitions<Matrix>,
    start: usize,
    accept: BTreeSet<usize>,
}

impl MatrixAutomaton {
    pub fn new(
        alphabet: Alphabet,
        transitions: Transitions<Matrix>,
        start: usize,
        accept: impl IntoIterator<Item = usize>,
    ) -> Result<Self, ModelError> {
        transitions.check_letters(&alphabet)?;
        let states = transitions.left.rows();
        if states == 0 {
            return Err(ModelError::NoStates);
        }
        let mode = transitions.left.mode();
        for (symbol, m) in transitions.iter() {
            if m.shape() != (states, states) {
                return Err(ModelError::Shape {
                    symbol,
                    expected: states,
                    found: m.shape(),
                });
            }
            if m.mode() != mode {
                return Err(ModelError::Mode {
                    symbol,
                    expected: mode,
                    found: m.mode(),
                });
            }
        }
        if start >= states {
            return Err(ModelError::StartOutOfRange { start, states });
        }
        let accept: BTreeSet<usize> = accept.into_iter().collect();
        if let Some(&state) = accept.iter().find(|&&s| s >= states) {
            return Err(ModelError::AcceptOutOfRange { state, states });
        }
        Ok(MatrixAutomaton {
            alphabet,
            states,
            mode,
            transitions,
            start,
            accept,
        })
    }

    /// Machine over `{a}`.
    pub fn unary(
        left: Matrix,
        letter: Matrix,
        right: Matrix,
        start: usize,
        accept: impl IntoIterator<Item = usize>,
    ) -> Result<Self, ModelError> {
        MatrixAutomaton::new(
            Alphabet::unary(),
            Transitions::new(left, BTreeMap::from([('a', letter)]), right),
            start,
            accept,
        )
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn mode(&self) -> ScalarMode {
        self.mode
    }

    pub fn transitions(&self) -> &Transitions<Matrix> {
        &self.transitions
    }

    pub fn transition(&self, symbol: Symbol) -> Option<&Matrix> {
        self.transitions.get(symbol)
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn accept(&self) -> &BTreeSet<usize> {
        &self.accept
    }

    pub fn initial_vector(&self) -> Vector {
        Vector::basis(self.mode, self.states, self.start)
    }

    fn apply(&self, symbol: Symbol, v: &Vector) -> Result<Vector, RunError> {
        let m = self.transitions.get(symbol).ok_or_else(|| match symbol {
            Symbol::Letter(c) => RunError::UnknownSymbol(c),
            _ => unreachable!("end-marker transitions are mandatory"),
        })?;
        Ok(matvec(m, v)?)
    }

    /// `v_f` after reading `¢ w $`.
    pub fn final_configuration(&self, word: &str) -> Result<Vector, RunError> {
        Ok(self.trajectory(word)?.pop().expect("non-empty trajectory"))
    }

    /// Configurations `v_0, v_1, …, v_f`, one per scanned tape symbol plus the
    /// initial basis vector.
    pub fn trajectory(&self, word: &str) -> Result<Vec<Vector>, RunError> {
        let mut out = Vec::with_capacity(word.len() + 3);
        let mut v = self.initial_vector();
        out.push(v.clone());
        v = self.apply(Symbol::LeftEnd, &v)?;
        out.push(v.clone());
        for c in word.chars() {
            v = self.apply(Symbol::Letter(c), &v)?;
            out.push(v.clone());
        }
        v = self.apply(Symbol::RightEnd, &v)?;
        out.push(v);
        Ok(out)
    }

    fn check_class(
        &self,
        required: &'static str,
        tol: f64,
        pred: fn(&Matrix, f64) -> bool,
    ) -> Result<(), ModelError> {
        for (symbol, m) in self.transitions.iter() {
            if !pred(m, tol) {
                return Err(ModelError::Class { symbol, required });
            }
        }
        Ok(())
    }

    fn accept_sum(&self, v: &Vector, f: impl Fn(&Scalar) -> Scalar) -> Scalar {
        self.accept
            .iter()
            .fold(Scalar::zero(self.mode), |acc, &k| acc + f(v.get(k)))
    }
}

/// Provenance recorded on constructed machines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Construction {
    /// Number of parallel copies in a tensor-power machine.
    pub copies: usize,
    /// State count of one copy.
    pub base_states: usize,
}

/// Affine finite automaton: every transition has unit column sums.
///
/// The acceptance value is the ℓ₁-normalised mass on the accept states,
/// each entry counted by its absolute value.
#[derive(Clone, Debug, PartialEq)]
pub struct Afa {
    machine: MatrixAutomaton,
    construction: Option<Construction>,
}

impl Afa {
    pub fn new(machine: MatrixAutomaton) -> Result<Self, ModelError> {
        Afa::with_tolerance(machine, DEFAULT_TOL)
    }

    pub fn with_tolerance(machine: MatrixAutomaton, tol: f64) -> Result<Self, ModelError> {
        machine.check_class("affine", tol, is_affine)?;
        Ok(Afa {
            machine,
            construction: None,
        })
    }

    pub fn with_construction(mut self, construction: Construction) -> Self {
        self.construction = Some(construction);
        self
    }

    pub fn construction(&self) -> Option<Construction> {
        self.construction
    }

    pub fn machine(&self) -> &MatrixAutomaton {
        &self.machine
    }
}

impl Automaton for Afa {
    type Config = Vector;

    fn alphabet(&self) -> &Alphabet {
        &self.machine.alphabet
    }

    fn mode(&self) -> ScalarMode {
        self.machine.mode
    }

    fn states(&self) -> usize {
        self.machine.states
    }

    fn start(&self) -> Result<Vector, RunError> {
        self.machine
            .apply(Symbol::LeftEnd, &self.machine.initial_vector())
    }

    fn step(&self, config: &Vector, letter: char) -> Result<Vector, RunError> {
        self.machine.apply(Symbol::Letter(letter), config)
    }

    fn finish(&self, config: &Vector) -> Result<Scalar, RunError> {
        let v = self.machine.apply(Symbol::RightEnd, config)?;
        let norm = v.l1_norm();
        // Entries of an affine configuration sum to 1, so this only fires
        // for machines built with a loose float tolerance.
        if norm.is_zero() {
            return Err(RunError::DegenerateNorm);
        }
        Ok(self.machine.accept_sum(&v, Scalar::abs) / norm)
    }
}

/// Probabilistic finite automaton: every transition is column-stochastic.
#[derive(Clone, Debug, PartialEq)]
pub struct Pfa {
    machine: MatrixAutomaton,
}

impl Pfa {
    pub fn new(machine: MatrixAutomaton) -> Result<Self, ModelError> {
        Pfa::with_tolerance(machine, DEFAULT_TOL)
    }

    pub fn with_tolerance(machine: MatrixAutomaton, tol: f64) -> Result<Self, ModelError> {
        machine.check_class("stochastic", tol, is_stochastic)?;
        Ok(Pfa { machine })
    }

    pub fn machine(&self) -> &MatrixAutomaton {
        &self.machine
    }

    /// The same matrices read as an AfA. Stochastic matrices are affine, and
    /// absolute values are no-ops on nonnegative configurations, so values
    /// agree on every word.
    pub fn to_afa(&self) -> Afa {
        Afa {
            machine: self.machine.clone(),
            construction: None,
        }
    }
}

impl Automaton for Pfa {
    type Config = Vector;

    fn alphabet(&self) -> &Alphabet {
        &self.machine.alphabet
    }

    fn mode(&self) -> ScalarMode {
        self.machine.mode
    }

    fn states(&self) -> usize {
        self.machine.states
    }

    fn start(&self) -> Result<Vector, RunError> {
        self.machine
            .apply(Symbol::LeftEnd, &self.machine.initial_vector())
    }

    fn step(&self, config: &Vector, letter: char) -> Result<Vector, RunError> {
        self.machine.apply(Symbol::Letter(letter), config)
    }

    fn finish(&self, config: &Vector) -> Result<Scalar, RunError> {
        let v = self.machine.apply(Symbol::RightEnd, config)?;
        Ok(self.machine.accept_sum(&v, Scalar::clone))
    }
}

/// Moore-Crutchfield QFA over the reals: one orthogonal matrix per symbol,
/// acceptance by squared amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct Mcqfa {
    machine: MatrixAutomaton,
}

impl Mcqfa {
    pub fn new(machine: MatrixAutomaton) -> Result<Self, ModelError> {
        Mcqfa::with_tolerance(machine, DEFAULT_TOL)
    }

    pub fn with_tolerance(machine: MatrixAutomaton, tol: f64) -> Result<Self, ModelError> {
        machine.check_class("orthogonal", tol, is_orthogonal)?;
        Ok(Mcqfa { machine })
    }

    pub fn machine(&self) -> &MatrixAutomaton {
        &self.machine
    }
}

impl Automaton for Mcqfa {
    type Config = Vector;

    fn alphabet(&self) -> &Alphabet {
        &self.machine.alphabet
    }

    fn mode(&self) -> ScalarMode {
        self.machine.mode
    }

    fn states(&self) -> usize {
        self.machine.states
    }

    fn start(&self) -> Result<Vector, RunError> {
        self.machine
            .apply(Symbol::LeftEnd, &self.machine.initial_vector())
    }

    fn step(&self, config: &Vector, letter: char) -> Result<Vector, RunError> {
        self.machine.apply(Symbol::Letter(letter), config)
    }

    fn finish(&self, config: &Vector) -> Result<Scalar, RunError> {
        let v = self.machine.apply(Symbol::RightEnd, config)?;
        Ok(self.machine.accept_sum(&v, |x| x * x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::values_up_to;

    const Q: ScalarMode = ScalarMode::Rational;

    fn q(rows: &[&[&str]]) -> Matrix {
        Matrix::parse_rows(Q, rows).unwrap()
    }

    fn count3() -> Afa {
        let m = MatrixAutomaton::unary(
            q(&[&["8", "0"], &["-7", "1"]]),
            q(&[&["1/2", "0"], &["1/2", "1"]]),
            Matrix::identity(Q, 2),
            0,
            [0],
        )
        .unwrap();
        Afa::new(m).unwrap()
    }

    fn halving_pfa() -> Pfa {
        let m = MatrixAutomaton::unary(
            Matrix::identity(Q, 2),
            q(&[&["1/2", "0"], &["1/2", "1"]]),
            Matrix::identity(Q, 2),
            0,
            [0],
        )
        .unwrap();
        Pfa::new(m).unwrap()
    }

    fn rotation_mcqfa() -> Mcqfa {
        let m = MatrixAutomaton::unary(
            Matrix::identity(Q, 2),
            q(&[&["3/5", "-4/5"], &["4/5", "3/5"]]),
            Matrix::identity(Q, 2),
            0,
            [1],
        )
        .unwrap();
        Mcqfa::new(m).unwrap()
    }

    #[test]
    fn afa_count_values() {
        let m = count3();
        assert_eq!(m.run("aaa").unwrap(), Scalar::ratio(1, 1));
        assert_eq!(m.run("aa").unwrap(), Scalar::ratio(2, 3));
        assert_eq!(m.run("aaaa").unwrap(), Scalar::ratio(1, 2));
        assert_eq!(
            m.machine().final_configuration("aa").unwrap(),
            Vector::parse(Q, &["2", "-1"]).unwrap()
        );
    }

    #[test]
    fn afa_rejects_unknown_symbol() {
        assert_eq!(count3().run("ab"), Err(RunError::UnknownSymbol('b')));
    }

    #[test]
    fn pfa_values() {
        let p = halving_pfa();
        assert_eq!(p.run("").unwrap(), Scalar::ratio(1, 1));
        for j in 0..8 {
            assert_eq!(p.run(&"a".repeat(j)).unwrap(), Scalar::ratio(1, 1 << j));
        }
        let id = MatrixAutomaton::unary(
            Matrix::identity(Q, 3),
            Matrix::identity(Q, 3),
            Matrix::identity(Q, 3),
            1,
            [1],
        )
        .unwrap();
        let id = Pfa::new(id).unwrap();
        for (_, v) in values_up_to(&id, 4).unwrap() {
            assert_eq!(v, Scalar::ratio(1, 1));
        }
    }

    #[test]
    fn mcqfa_values() {
        let m = rotation_mcqfa();
        assert_eq!(m.run("a").unwrap(), Scalar::ratio(16, 25));
        let first = MatrixAutomaton::unary(
            Matrix::identity(Q, 2),
            q(&[&["3/5", "-4/5"], &["4/5", "3/5"]]),
            Matrix::identity(Q, 2),
            0,
            [0],
        )
        .unwrap();
        assert_eq!(Mcqfa::new(first).unwrap().run("a").unwrap(), Scalar::ratio(9, 25));
    }

    #[test]
    fn validation_errors() {
        let drift = q(&[&["9/8", "1/8"], &["-1/8", "7/8"]]);
        let m = MatrixAutomaton::unary(
            Matrix::identity(Q, 2),
            drift.clone(),
            Matrix::identity(Q, 2),
            0,
            [0],
        )
        .unwrap();
        assert!(matches!(
            Pfa::new(m.clone()),
            Err(ModelError::Class { required: "stochastic", .. })
        ));
        assert!(Afa::new(m.clone()).is_ok());
        assert!(Mcqfa::new(m).is_err());
        assert!(matches!(
            MatrixAutomaton::unary(
                Matrix::identity(Q, 2),
                drift.clone(),
                Matrix::identity(Q, 2),
                2,
                [0]
            ),
            Err(ModelError::StartOutOfRange { .. })
        ));
        assert!(matches!(
            MatrixAutomaton::unary(
                Matrix::identity(Q, 2),
                drift.clone(),
                Matrix::identity(Q, 3),
                0,
                [0]
            ),
            Err(ModelError::Shape { .. })
        ));
        assert!(matches!(
            MatrixAutomaton::unary(
                Matrix::identity(Q, 2),
                drift,
                Matrix::identity(ScalarMode::Float, 2),
                0,
                [0]
            ),
            Err(ModelError::Mode { .. })
        ));
        let missing = MatrixAutomaton::new(
            Alphabet::new(['a', 'b']).unwrap(),
            Transitions::new(
                Matrix::identity(Q, 1),
                BTreeMap::from([('a', Matrix::identity(Q, 1))]),
                Matrix::identity(Q, 1),
            ),
            0,
            [0],
        );
        assert_eq!(
            missing,
            Err(ModelError::MissingTransition(Symbol::Letter('b')))
        );
    }

    #[test]
    fn pfa_as_afa_agrees() {
        let p = halving_pfa();
        let a = p.to_afa();
        for (w, v) in values_up_to(&p, 6).unwrap() {
            assert_eq!(a.run(&w).unwrap(), v);
        }
    }

    #[test]
    fn trajectory_has_one_entry_per_symbol() {
        let t = count3().machine().trajectory("aa").unwrap();
        assert_eq!(t.len(), 5);
        for v in &t {
            assert_eq!(v.sum(), Scalar::ratio(1, 1));
        }
    }
}
