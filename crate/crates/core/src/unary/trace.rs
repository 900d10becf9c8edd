use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use super::params::{extract, mirror_threshold, Dynamics, Extracted, UnaryParams};
use super::{first_true, CatalogEntry, UnaryLanguage};
use crate::automata::{unary_values, Afa, Automaton, CutpointSpec, RunError};
use crate::scalar::{Scalar, DEFAULT_TOL};

/// Behaviour of the trace beyond its explicit prefix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tail {
    ConstantFrom { start: usize, bit: bool },
    /// Membership of `a^j` for `j ≥ start` is `even` or `odd` by parity of `j`.
    Period2From { start: usize, even: bool, odd: bool },
    /// No certificate applies (not a two-state rational machine, or the
    /// prefix is too short to reach the certified start).
    Unknown,
}

/// Memberships of `a^0 … a^L` plus a tail certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct MembershipTrace {
    pub values: Vec<Scalar>,
    pub prefix: Vec<bool>,
    pub tail: Tail,
}

#[derive(Debug, Error, PartialEq)]
pub enum TraceError {
    #[error("enumeration needs a unary machine")]
    NotUnary,
    #[error("trace tail is indefinite")]
    IndefiniteTail,
    #[error("prefix bit at length {0} contradicts the tail certificate")]
    InconsistentTail(usize),
    #[error(transparent)]
    Run(#[from] RunError),
}

impl MembershipTrace {
    pub fn max_len(&self) -> usize {
        self.prefix.len() - 1
    }

    /// The eventually periodic language the trace certifies.
    pub fn language(&self) -> Option<UnaryLanguage> {
        let (start, even, odd) = match self.tail {
            Tail::ConstantFrom { start, bit } => (start, bit, bit),
            Tail::Period2From { start, even, odd } => (start, even, odd),
            Tail::Unknown => return None,
        };
        Some(UnaryLanguage::new(self.prefix[..start].to_vec(), even, odd))
    }

    pub fn bit_string(&self) -> String {
        self.prefix.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    /// `length,value,member` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("length,value,member\n");
        for (j, (v, b)) in self.values.iter().zip(&self.prefix).enumerate() {
            let _ = writeln!(out, "{j},{v},{}", u8::from(*b));
        }
        out
    }
}

/// Brute-force memberships of `a^0 … a^L` under `spec`, with a tail
/// certificate when the machine is a two-state rational unary AfA.
pub fn enumerate(m: &Afa, spec: &CutpointSpec, max_len: usize) -> Result<MembershipTrace, TraceError> {
    enumerate_with_tol(m, spec, max_len, DEFAULT_TOL)
}

pub fn enumerate_with_tol(
    m: &Afa,
    spec: &CutpointSpec,
    max_len: usize,
    tol: f64,
) -> Result<MembershipTrace, TraceError> {
    if !m.alphabet().is_unary() {
        return Err(TraceError::NotUnary);
    }
    let letter = m.alphabet().letters()[0];
    let values = unary_values(m, letter, max_len)?;
    let prefix = values
        .iter()
        .map(|v| spec.holds(v, Some(tol)))
        .collect::<Result<Vec<_>, _>>()?;

    let tail = match (tail_start(m, spec), prefix.len()) {
        (Some(Shape::Constant(s)), len) if s < len => Tail::ConstantFrom {
            start: s,
            bit: prefix[s],
        },
        (Some(Shape::Period2(s)), len) if s + 1 < len => {
            let (even, odd) = if s % 2 == 0 {
                (prefix[s], prefix[s + 1])
            } else {
                (prefix[s + 1], prefix[s])
            };
            if even == odd {
                Tail::ConstantFrom { start: s, bit: even }
            } else {
                Tail::Period2From { start: s, even, odd }
            }
        }
        _ => Tail::Unknown,
    };
    let trace = MembershipTrace { values, prefix, tail };
    if let Some(lang) = trace.language() {
        if let Some(j) = (0..trace.prefix.len()).find(|&j| lang.contains(j) != trace.prefix[j]) {
            return Err(TraceError::InconsistentTail(j));
        }
    }
    Ok(trace)
}

/// `true` iff the certified language of `trace` is the one `entry` denotes.
pub fn matches(trace: &MembershipTrace, entry: &CatalogEntry) -> Result<bool, TraceError> {
    let lang = trace.language().ok_or(TraceError::IndefiniteTail)?;
    Ok(lang == entry.language())
}

enum Shape {
    Constant(usize),
    Period2(usize),
}

/// Index after which `E_j` can no longer change its position relative to
/// any point where the weighting equals `λ`. Only the closed form of `E_j`
/// is used; the tail bits themselves come from the brute-force prefix.
fn tail_start(m: &Afa, spec: &CutpointSpec) -> Option<Shape> {
    let lambda = spec.lambda().as_rational()?.clone();
    let tuple = match extract(m)? {
        Extracted::Constant(_) => return Some(Shape::Constant(0)),
        Extracted::Tuple(t) => t,
    };
    let params = UnaryParams::new(&tuple, lambda.clone());
    let mut critical = vec![lambda.clone()];
    critical.extend(mirror_threshold(&lambda));
    let e = |j: usize| params.first_entry(j);

    Some(match params.dynamics() {
        Dynamics::Identity { .. } => Shape::Constant(0),
        Dynamics::Drift { amplitude, .. } if amplitude.is_zero() => Shape::Constant(0),
        Dynamics::Drift { amplitude, .. } => {
            let beyond = if amplitude.is_positive() {
                let top = critical.iter().max().expect("non-empty");
                first_true(|j| &e(j) > top)
            } else {
                let bottom = critical.iter().min().expect("non-empty");
                first_true(|j| &e(j) < bottom)
            };
            Shape::Constant(beyond)
        }
        Dynamics::Geometric { amplitude, .. } if amplitude.is_zero() => Shape::Constant(0),
        Dynamics::Geometric { t, .. } if t.is_zero() => Shape::Constant(1),
        Dynamics::Geometric { t, offset, amplitude, .. } => {
            let one = BigRational::from_integer(1.into());
            let abs_t = t.abs();
            let abs_c = amplitude.abs();
            let shape = |s| {
                if t.is_positive() {
                    Shape::Constant(s)
                } else {
                    Shape::Period2(s)
                }
            };
            let distances = critical.iter().map(|c| (c - &offset).abs());
            if abs_t == one {
                Shape::Period2(0)
            } else if abs_t < one {
                // E_j stays within δ of F, on one side per parity.
                match distances.filter(|d| !d.is_zero()).min() {
                    None => shape(0),
                    Some(delta) => shape(first_true(|j| &abs_c * num_traits::pow(abs_t.clone(), j) < delta)),
                }
            } else {
                let spread = distances.max().expect("non-empty");
                shape(first_true(|j| &abs_c * num_traits::pow(abs_t.clone(), j) > spread))
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::Comparison;
    use crate::zoo::{count_afa, interval_afa, two_state_unary_afa, UnaryTuple};

    fn greater(n: i64, d: i64) -> CutpointSpec {
        CutpointSpec::greater(Scalar::ratio(n, d)).unwrap()
    }

    #[test]
    fn count3_trace() {
        let t = enumerate(&count_afa(3).unwrap(), &greater(3, 4), 10).unwrap();
        assert_eq!(t.bit_string(), "00010000000");
        assert_eq!(t.language(), Some(UnaryLanguage::new(vec![false, false, false, true], false, false)));
        assert!(!matches(&t, &CatalogEntry::plain(super::super::Base::Less(3))).unwrap());
    }

    #[test]
    fn interval_trace() {
        let t = enumerate(&interval_afa(3, 7).unwrap(), &greater(3, 4), 12).unwrap();
        assert_eq!(t.bit_string(), "0001111100000");
        assert!(matches(&t, &CatalogEntry::plain(super::super::Base::Interval(3, 7))).unwrap());
        assert!(t.to_csv().starts_with("length,value,member\n0,"));
        assert!(t.to_csv().contains("\n7,7/8,1\n"));
    }

    #[test]
    fn constant_trace() {
        let m = two_state_unary_afa(&UnaryTuple::from_ratios([(0, 1), (0, 1), (1, 1), (0, 1), (1, 1)])).unwrap();
        let t = enumerate(&m, &greater(9, 10), 5).unwrap();
        assert_eq!(t.bit_string(), "111111");
        assert!(matches(&t, &CatalogEntry::ALL).unwrap());
    }

    #[test]
    fn short_prefix_leaves_tail_unknown() {
        let t = enumerate(&interval_afa(3, 7).unwrap(), &greater(3, 4), 4).unwrap();
        assert_eq!(t.tail, Tail::Unknown);
        assert_eq!(
            matches(&t, &CatalogEntry::EMPTY),
            Err(TraceError::IndefiniteTail)
        );
    }

    #[test]
    fn equal_mode_certificate() {
        let m = interval_afa(3, 7).unwrap();
        let spec = CutpointSpec::new(Scalar::ratio(3, 4), Comparison::Equal).unwrap();
        let t = enumerate(&m, &spec, 20).unwrap();
        assert_eq!(&t.bit_string()[..10], "0010000010");
        assert_eq!(t.language().unwrap().finite_members(), vec![2, 8]);
    }

    #[test]
    fn period_two_tail() {
        // t = −1: E alternates between F + C and F − C.
        let m = two_state_unary_afa(&UnaryTuple::from_ratios([(1, 1), (1, 1), (1, 1), (0, 1), (1, 1)])).unwrap();
        let t = enumerate(&m, &greater(3, 4), 6).unwrap();
        assert_eq!(t.bit_string(), "1010101");
        assert_eq!(t.tail, Tail::Period2From { start: 0, even: true, odd: false });
    }
}
