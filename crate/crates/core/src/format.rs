//! The JSON machine file format.
//!
//! ```json
//! {
//!   "model": "afa",
//!   "scalar": "rational",
//!   "alphabet": ["a"],
//!   "states": 2,
//!   "start": 0,
//!   "accept": [0],
//!   "transitions": { "$": [["1/1", "0/1"], ["0/1", "1/1"]], "^": …, "a": … }
//! }
//! ```
//!
//! `"^"` is the left end-marker. Rational entries are `"num/den"` strings
//! (bare JSON integers are accepted on input), floats are JSON numbers.
//! QFAs carry `kraus` (symbol → list of matrices of `[re, im]` pairs) and
//! GFAs carry `initial` and `final` in place of `start` and `accept`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::automata::{
    Afa, Alphabet, ComplexMatrix, Construction, Gfa, Machine, MatrixAutomaton, Mcqfa, Model, ModelError, Pfa, Qfa,
    Symbol, Transitions,
};
use crate::linalg::{LinalgError, Matrix, Vector};
use crate::scalar::{format_rational, Scalar, ScalarMode};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn field_err(field: impl Into<String>, message: impl Into<String>) -> FormatError {
    FormatError::Field {
        field: field.into(),
        message: message.into(),
    }
}

type Rows = Vec<Vec<Value>>;
type ComplexRows = Vec<Vec<[Value; 2]>>;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMachine {
    model: Model,
    scalar: String,
    alphabet: Vec<String>,
    states: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    start: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    accept: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    transitions: Option<BTreeMap<String, Rows>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kraus: Option<BTreeMap<String, Vec<ComplexRows>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    initial: Option<Vec<Value>>,
    #[serde(default, rename = "final", skip_serializing_if = "Option::is_none")]
    functional: Option<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<Construction>,
}

/// Parses and validates a machine; `tol` is the float tolerance used by the
/// class checks.
pub fn from_json(text: &str, tol: f64) -> Result<Machine, FormatError> {
    let raw: RawMachine = serde_json::from_str(text)?;
    let mode = match raw.scalar.as_str() {
        "rational" => ScalarMode::Rational,
        "float" => ScalarMode::Float,
        other => return Err(field_err("scalar", format!("unknown scalar mode `{other}`"))),
    };
    let alphabet = parse_alphabet(&raw.alphabet)?;
    let n = raw.states;

    let machine = match raw.model {
        Model::Qfa => {
            let kraus = raw.kraus.as_ref().ok_or_else(|| field_err("kraus", "required for qfa"))?;
            let sets = symbol_map(kraus, "kraus", |name, ops| {
                ops.iter()
                    .map(|op| complex_matrix(mode, n, op, name))
                    .collect::<Result<Vec<_>, _>>()
            })?;
            Machine::Qfa(Qfa::with_tolerance(
                alphabet,
                sets,
                required(raw.start, "start")?,
                required(raw.accept, "accept")?,
                tol,
            )?)
        }
        Model::Gfa => {
            let transitions = matrices(mode, n, &raw)?;
            let initial = vector(mode, required(raw.initial.as_deref(), "initial")?, "initial")?;
            let functional = vector(mode, required(raw.functional.as_deref(), "final")?, "final")?;
            Machine::Gfa(Gfa::new(alphabet, transitions, initial, functional)?)
        }
        model => {
            let transitions = matrices(mode, n, &raw)?;
            let m = MatrixAutomaton::new(
                alphabet,
                transitions,
                required(raw.start, "start")?,
                required(raw.accept.clone(), "accept")?,
            )?;
            match model {
                Model::Afa => {
                    let afa = Afa::with_tolerance(m, tol)?;
                    Machine::Afa(match raw.meta {
                        Some(c) => afa.with_construction(c),
                        None => afa,
                    })
                }
                Model::Pfa => Machine::Pfa(Pfa::with_tolerance(m, tol)?),
                _ => Machine::Mcqfa(Mcqfa::with_tolerance(m, tol)?),
            }
        }
    };
    if machine.states() != n {
        return Err(field_err(
            "states",
            format!("declared {n} but the matrices have {}", machine.states()),
        ));
    }
    Ok(machine)
}

/// Canonical pretty-printed form, newline-terminated.
pub fn to_json(machine: &Machine) -> String {
    let mode = machine.mode();
    let mut raw = RawMachine {
        model: machine.model(),
        scalar: mode.to_string(),
        alphabet: machine.alphabet().letters().iter().map(|c| c.to_string()).collect(),
        states: machine.states(),
        start: None,
        accept: None,
        transitions: None,
        kraus: None,
        initial: None,
        functional: None,
        meta: None,
    };
    let linear = match machine {
        Machine::Pfa(m) => Some(m.machine()),
        Machine::Afa(m) => {
            raw.meta = m.construction();
            Some(m.machine())
        }
        Machine::Mcqfa(m) => Some(m.machine()),
        Machine::Qfa(q) => {
            raw.start = Some(q.start_state());
            raw.accept = Some(q.accept().to_vec());
            raw.kraus = Some(
                q.kraus()
                    .iter()
                    .map(|(s, ops)| (s.key(), ops.iter().map(complex_rows).collect()))
                    .collect(),
            );
            None
        }
        Machine::Gfa(g) => {
            raw.transitions = Some(matrix_map(g.transitions()));
            raw.initial = Some(g.initial().entries().iter().map(encode).collect());
            raw.functional = Some(g.functional().entries().iter().map(encode).collect());
            None
        }
    };
    if let Some(m) = linear {
        raw.start = Some(m.start());
        raw.accept = Some(m.accept().iter().copied().collect());
        raw.transitions = Some(matrix_map(m.transitions()));
    }
    let pretty = serde_json::to_string_pretty(&raw).expect("plain data serialises");
    let mut out = compact_rows(&pretty);
    out.push('\n');
    out
}

/// Puts every array of plain values (a matrix row, an accept list) on one
/// line of the pretty-printed text.
fn compact_rows(pretty: &str) -> String {
    let lines: Vec<&str> = pretty.lines().collect();
    let is_item = |l: &str| {
        let t = l.trim();
        !(t.ends_with('[') || t.ends_with('{') || t.starts_with(']') || t.starts_with('}'))
    };
    let mut out = Vec::with_capacity(lines.len());
    let mut i = 0;
    while i < lines.len() {
        let line = lines[i];
        if line.ends_with('[') {
            let end = (i + 1..lines.len()).find(|&j| !is_item(lines[j]));
            if let Some(j) = end.filter(|&j| lines[j].trim().starts_with(']')) {
                let items: Vec<&str> = lines[i + 1..j].iter().map(|l| l.trim()).collect();
                out.push(format!("{line}{}{}", items.join(" "), lines[j].trim()));
                i = j + 1;
                continue;
            }
        }
        out.push(line.to_string());
        i += 1;
    }
    out.join("\n")
}

fn encode(x: &Scalar) -> Value {
    match x {
        Scalar::Rational(r) => Value::String(format_rational(r)),
        Scalar::Float(f) => serde_json::Number::from_f64(*f).map_or(Value::Null, Value::Number),
    }
}

fn decode(mode: ScalarMode, v: &Value, field: &str) -> Result<Scalar, FormatError> {
    let text = match (mode, v) {
        (_, Value::String(s)) => s.clone(),
        (ScalarMode::Rational, Value::Number(n)) if n.is_i64() || n.is_u64() => n.to_string(),
        (ScalarMode::Float, Value::Number(n)) => {
            return Ok(Scalar::Float(n.as_f64().expect("JSON numbers are finite")));
        }
        _ => {
            return Err(field_err(
                field,
                format!("`{v}` is not a {mode} scalar (rationals are \"num/den\" strings)"),
            ))
        }
    };
    Scalar::parse(mode, &text).map_err(|e| field_err(field, e.to_string()))
}

fn matrix_rows(m: &Matrix) -> Rows {
    (0..m.rows()).map(|i| m.row(i).iter().map(encode).collect()).collect()
}

fn complex_rows(m: &ComplexMatrix) -> ComplexRows {
    let (r, c) = m.shape();
    (0..r)
        .map(|i| {
            (0..c)
                .map(|j| {
                    let (re, im) = m.get(i, j);
                    [encode(re), encode(im)]
                })
                .collect()
        })
        .collect()
}

fn matrix_map(t: &Transitions<Matrix>) -> BTreeMap<String, Rows> {
    t.iter().map(|(s, m)| (s.key(), matrix_rows(m))).collect()
}

fn parse_alphabet(letters: &[String]) -> Result<Alphabet, FormatError> {
    let chars = letters
        .iter()
        .map(|s| {
            let mut it = s.chars();
            match (it.next(), it.next()) {
                (Some(c), None) => Ok(c),
                _ => Err(field_err("alphabet", format!("`{s}` is not a single character"))),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Alphabet::new(chars)?)
}

fn required<T>(v: Option<T>, field: &str) -> Result<T, FormatError> {
    v.ok_or_else(|| field_err(field, "missing"))
}

fn symbol_map<V, T>(
    map: &BTreeMap<String, V>,
    field: &str,
    mut f: impl FnMut(&str, &V) -> Result<T, FormatError>,
) -> Result<Transitions<T>, FormatError> {
    let mut left = None;
    let mut right = None;
    let mut letters = BTreeMap::new();
    for (key, value) in map {
        let name = format!("{field}.{key}");
        let item = f(&name, value)?;
        match Symbol::from_key(key) {
            Some(Symbol::LeftEnd) => left = Some(item),
            Some(Symbol::RightEnd) => right = Some(item),
            Some(Symbol::Letter(c)) => {
                letters.insert(c, item);
            }
            None => return Err(field_err(field, format!("`{key}` is not a symbol"))),
        }
    }
    let left = left.ok_or(ModelError::MissingTransition(Symbol::LeftEnd))?;
    let right = right.ok_or(ModelError::MissingTransition(Symbol::RightEnd))?;
    Ok(Transitions::new(left, letters, right))
}

fn matrices(mode: ScalarMode, n: usize, raw: &RawMachine) -> Result<Transitions<Matrix>, FormatError> {
    let map = raw
        .transitions
        .as_ref()
        .ok_or_else(|| field_err("transitions", "missing"))?;
    symbol_map(map, "transitions", |name, rows| real_matrix(mode, n, rows, name))
}

fn real_matrix(mode: ScalarMode, n: usize, rows: &Rows, field: &str) -> Result<Matrix, FormatError> {
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|v| decode(mode, v, field)).collect())
        .collect::<Result<Vec<Vec<_>>, _>>()?;
    check_square(&rows, n, field)?;
    Ok(Matrix::from_rows(mode, rows)?)
}

fn complex_matrix(mode: ScalarMode, n: usize, rows: &[Vec<[Value; 2]>], field: &str) -> Result<ComplexMatrix, FormatError> {
    let mut re = Vec::new();
    let mut im = Vec::new();
    for row in rows {
        let mut r = Vec::new();
        let mut i = Vec::new();
        for [a, b] in row {
            r.push(decode(mode, a, field)?);
            i.push(decode(mode, b, field)?);
        }
        re.push(r);
        im.push(i);
    }
    check_square(&re, n, field)?;
    Ok(ComplexMatrix::new(
        Matrix::from_rows(mode, re)?,
        Matrix::from_rows(mode, im)?,
    )?)
}

fn check_square(rows: &[Vec<Scalar>], n: usize, field: &str) -> Result<(), FormatError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(field_err(field, format!("expected a {n}x{n} matrix")));
    }
    Ok(())
}

fn vector(mode: ScalarMode, values: &[Value], field: &str) -> Result<Vector, FormatError> {
    let entries = values
        .iter()
        .map(|v| decode(mode, v, field))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Vector::new(mode, entries)?)
}
