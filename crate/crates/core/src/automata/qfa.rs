use super::{Alphabet, Automaton, ComplexMatrix, ModelError, RunError, Symbol, Transitions};
use crate::scalar::{Scalar, ScalarMode, DEFAULT_TOL};

/// Superoperator QFA in Kraus form. Configurations are density matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct Qfa {
    alphabet: Alphabet,
    states: usize,
    mode: ScalarMode,
    kraus: Transitions<Vec<ComplexMatrix>>,
    start: usize,
    accept: Vec<usize>,
    tol: f64,
}

impl Qfa {
    pub fn new(
        alphabet: Alphabet,
        kraus: Transitions<Vec<ComplexMatrix>>,
        start: usize,
        accept: impl IntoIterator<Item = usize>,
    ) -> Result<Self, ModelError> {
        Qfa::with_tolerance(alphabet, kraus, start, accept, DEFAULT_TOL)
    }

    pub fn with_tolerance(
        alphabet: Alphabet,
        kraus: Transitions<Vec<ComplexMatrix>>,
        start: usize,
        accept: impl IntoIterator<Item = usize>,
        tol: f64,
    ) -> Result<Self, ModelError> {
        kraus.check_letters(&alphabet)?;
        let first = kraus
            .left
            .first()
            .ok_or(ModelError::EmptyKraus(Symbol::LeftEnd))?;
        let states = first.shape().0;
        let mode = first.mode();
        if states == 0 {
            return Err(ModelError::NoStates);
        }
        for (symbol, ops) in kraus.iter() {
            if ops.is_empty() {
                return Err(ModelError::EmptyKraus(symbol));
            }
            let mut total = ComplexMatrix::zeros(mode, states);
            for k in ops {
                if k.shape() != (states, states) {
                    return Err(ModelError::Shape {
                        symbol,
                        expected: states,
                        found: k.shape(),
                    });
                }
                if k.mode() != mode {
                    return Err(ModelError::Mode {
                        symbol,
                        expected: mode,
                        found: k.mode(),
                    });
                }
                total = total.add(&k.adjoint().mul(k)?)?;
            }
            if !total.approx_eq(&ComplexMatrix::identity(mode, states), tol) {
                return Err(ModelError::KrausIncomplete(symbol));
            }
        }
        if start >= states {
            return Err(ModelError::StartOutOfRange { start, states });
        }
        let mut accept: Vec<usize> = accept.into_iter().collect();
        accept.sort_unstable();
        accept.dedup();
        if let Some(&state) = accept.iter().find(|&&s| s >= states) {
            return Err(ModelError::AcceptOutOfRange { state, states });
        }
        Ok(Qfa {
            alphabet,
            states,
            mode,
            kraus,
            start,
            accept,
            tol,
        })
    }

    pub fn kraus(&self) -> &Transitions<Vec<ComplexMatrix>> {
        &self.kraus
    }

    pub fn start_state(&self) -> usize {
        self.start
    }

    pub fn accept(&self) -> &[usize] {
        &self.accept
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// `ρ ↦ Σ K ρ K†` for the operators attached to `symbol`.
    pub fn channel(&self, symbol: Symbol, rho: &ComplexMatrix) -> Result<ComplexMatrix, RunError> {
        let ops = self.kraus.get(symbol).ok_or_else(|| match symbol {
            Symbol::Letter(c) => RunError::UnknownSymbol(c),
            _ => unreachable!("end-marker operators are mandatory"),
        })?;
        let mut out = ComplexMatrix::zeros(self.mode, self.states);
        for k in ops {
            out = out.add(&k.mul(rho)?.mul(&k.adjoint())?)?;
        }
        Ok(out)
    }

    fn initial_density(&self) -> ComplexMatrix {
        ComplexMatrix::unit(self.mode, self.states, self.start, self.start)
    }
}

impl Automaton for Qfa {
    type Config = ComplexMatrix;

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn mode(&self) -> ScalarMode {
        self.mode
    }

    fn states(&self) -> usize {
        self.states
    }

    fn start(&self) -> Result<ComplexMatrix, RunError> {
        self.channel(Symbol::LeftEnd, &self.initial_density())
    }

    fn step(&self, config: &ComplexMatrix, letter: char) -> Result<ComplexMatrix, RunError> {
        self.channel(Symbol::Letter(letter), config)
    }

    fn finish(&self, config: &ComplexMatrix) -> Result<Scalar, RunError> {
        let rho = self.channel(Symbol::RightEnd, config)?;
        let mut re = Scalar::zero(self.mode);
        let mut im = Scalar::zero(self.mode);
        for &j in &self.accept {
            let (a, b) = rho.get(j, j);
            re = re + a;
            im = im + b;
        }
        if im.to_f64().abs() > self.tol {
            return Err(RunError::ImaginaryValue(im.to_f64()));
        }
        Ok(re)
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::automata::{linear::Mcqfa, values_up_to, MatrixAutomaton};
    use crate::linalg::Matrix;

    const Q: ScalarMode = ScalarMode::Rational;

    fn unary(left: Vec<ComplexMatrix>, a: Vec<ComplexMatrix>, right: Vec<ComplexMatrix>) -> Transitions<Vec<ComplexMatrix>> {
        Transitions::new(left, BTreeMap::from([('a', a)]), right)
    }

    #[test]
    fn identity_channel_accepts_everything() {
        let id = || vec![ComplexMatrix::identity(Q, 2)];
        let m = Qfa::new(Alphabet::unary(), unary(id(), id(), id()), 0, [0]).unwrap();
        for (_, v) in values_up_to(&m, 5).unwrap() {
            assert_eq!(v, Scalar::ratio(1, 1));
        }
    }

    #[test]
    fn unitary_channel_matches_mcqfa() {
        let r = Matrix::parse_rows(Q, &[&["3/5", "-4/5"], &["4/5", "3/5"]]).unwrap();
        let id = Matrix::identity(Q, 2);
        let q = Qfa::new(
            Alphabet::unary(),
            unary(
                vec![ComplexMatrix::real(id.clone())],
                vec![ComplexMatrix::real(r.clone())],
                vec![ComplexMatrix::real(id.clone())],
            ),
            0,
            [0],
        )
        .unwrap();
        let mc = Mcqfa::new(MatrixAutomaton::unary(id.clone(), r, id, 0, [0]).unwrap()).unwrap();
        assert_eq!(values_up_to(&q, 6).unwrap(), values_up_to(&mc, 6).unwrap());
    }

    #[test]
    fn measure_and_reset() {
        let ops = || {
            vec![
                ComplexMatrix::unit(Q, 2, 0, 0),
                ComplexMatrix::unit(Q, 2, 0, 1),
            ]
        };
        let m = Qfa::new(Alphabet::unary(), unary(ops(), ops(), ops()), 1, [0]).unwrap();
        for (_, v) in values_up_to(&m, 4).unwrap() {
            assert_eq!(v, Scalar::ratio(1, 1));
        }
    }

    #[test]
    fn incomplete_kraus_rejected() {
        let half = vec![ComplexMatrix::unit(Q, 2, 0, 0)];
        let id = || vec![ComplexMatrix::identity(Q, 2)];
        assert_eq!(
            Qfa::new(Alphabet::unary(), unary(id(), half, id()), 0, [0]),
            Err(ModelError::KrausIncomplete(Symbol::Letter('a')))
        );
    }
}
