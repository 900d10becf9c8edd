use super::{Alphabet, Automaton, ModelError, RunError, Symbol, Transitions};
use crate::linalg::{matvec, Matrix, Vector};
use crate::scalar::{Scalar, ScalarMode};

/// General finite automaton: unrestricted real matrices, an initial vector
/// and a final linear functional. Values are not confined to `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Gfa {
    alphabet: Alphabet,
    states: usize,
    mode: ScalarMode,
    transitions: Transitions<Matrix>,
    initial: Vector,
    functional: Vector,
}

impl Gfa {
    pub fn new(
        alphabet: Alphabet,
        transitions: Transitions<Matrix>,
        initial: Vector,
        functional: Vector,
    ) -> Result<Self, ModelError> {
        transitions.check_letters(&alphabet)?;
        let states = initial.dim();
        if states == 0 {
            return Err(ModelError::NoStates);
        }
        let mode = initial.mode();
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
        if functional.dim() != states {
            return Err(ModelError::VectorDimension {
                name: "final",
                expected: states,
                found: functional.dim(),
            });
        }
        if functional.mode() != mode {
            return Err(ModelError::Mode {
                symbol: Symbol::RightEnd,
                expected: mode,
                found: functional.mode(),
            });
        }
        Ok(Gfa {
            alphabet,
            states,
            mode,
            transitions,
            initial,
            functional,
        })
    }

    pub fn transitions(&self) -> &Transitions<Matrix> {
        &self.transitions
    }

    pub fn initial(&self) -> &Vector {
        &self.initial
    }

    pub fn functional(&self) -> &Vector {
        &self.functional
    }

    fn apply(&self, symbol: Symbol, v: &Vector) -> Result<Vector, RunError> {
        let m = self.transitions.get(symbol).ok_or_else(|| match symbol {
            Symbol::Letter(c) => RunError::UnknownSymbol(c),
            _ => unreachable!("end-marker transitions are mandatory"),
        })?;
        Ok(matvec(m, v)?)
    }
}

impl Automaton for Gfa {
    type Config = Vector;

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn mode(&self) -> ScalarMode {
        self.mode
    }

    fn states(&self) -> usize {
        self.states
    }

    fn start(&self) -> Result<Vector, RunError> {
        self.apply(Symbol::LeftEnd, &self.initial)
    }

    fn step(&self, config: &Vector, letter: char) -> Result<Vector, RunError> {
        self.apply(Symbol::Letter(letter), config)
    }

    fn finish(&self, config: &Vector) -> Result<Scalar, RunError> {
        let v = self.apply(Symbol::RightEnd, config)?;
        Ok(self.functional.dot(&v)?)
    }
}
