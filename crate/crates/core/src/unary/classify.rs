use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::params::{accept_region, in_region, mirror_threshold, Dynamics, UnaryParams};
use super::trace::{enumerate, TraceError};
use super::{first_true, CatalogEntry, UnaryLanguage};
use crate::automata::CutpointSpec;
use crate::scalar::Scalar;
use crate::zoo::two_state_unary_afa;

/// Regime of `t = 1 − p − q` in the geometric case.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TRegime {
    /// `t = 0`
    Zero,
    /// `0 < t < 1`
    Contracting,
    /// `t > 1`
    Expanding,
    /// `−1 < t < 0`
    Oscillating,
    /// `t = −1`
    Flip,
    /// `t < −1`
    Alternating,
}

impl TRegime {
    pub const ALL: [TRegime; 6] = [
        TRegime::Zero,
        TRegime::Contracting,
        TRegime::Expanding,
        TRegime::Oscillating,
        TRegime::Flip,
        TRegime::Alternating,
    ];

    pub fn of(t: &BigRational) -> TRegime {
        let one = BigRational::one();
        if t.is_zero() {
            TRegime::Zero
        } else if t.is_positive() {
            if t < &one {
                TRegime::Contracting
            } else {
                TRegime::Expanding
            }
        } else if t > &-one.clone() {
            TRegime::Oscillating
        } else if t == &-one {
            TRegime::Flip
        } else {
            TRegime::Alternating
        }
    }
}

/// Where the drift offset `F` sits relative to `λ` and its mirror point
/// `a` (below, for `λ < 1/2`) or `b` (above, for `λ > 1/2`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DriftZone {
    LowBelowA,
    LowAtA,
    LowBetween,
    LowAtLambda,
    LowAboveLambda,
    HalfAtOrBelow,
    HalfAbove,
    HighAtOrBelow,
    HighBetween,
    HighAtB,
    HighAboveB,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    Negative,
    Positive,
}

/// One case of the drift analysis. Inside `(a, λ)` and `(λ, b)` both drift
/// directions give the same shape of language, so the sign is dropped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DriftLeaf {
    pub zone: DriftZone,
    pub sign: Option<Sign>,
}

impl DriftLeaf {
    pub fn all() -> Vec<DriftLeaf> {
        use DriftZone::*;
        let zones = [
            LowBelowA,
            LowAtA,
            LowBetween,
            LowAtLambda,
            LowAboveLambda,
            HalfAtOrBelow,
            HalfAbove,
            HighAtOrBelow,
            HighBetween,
            HighAtB,
            HighAboveB,
        ];
        let mut out = Vec::new();
        for zone in zones {
            if matches!(zone, LowBetween | HighBetween) {
                out.push(DriftLeaf { zone, sign: None });
            } else {
                for sign in [Sign::Negative, Sign::Positive] {
                    out.push(DriftLeaf { zone, sign: Some(sign) });
                }
            }
        }
        out
    }
}

impl fmt::Display for DriftLeaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            None => write!(f, "{:?}", self.zone),
            Some(Sign::Negative) => write!(f, "{:?}/-", self.zone),
            Some(Sign::Positive) => write!(f, "{:?}/+", self.zone),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Branch {
    /// `A_a` is the identity.
    Identity,
    /// `E_j` does not depend on `j` although `A_a` moves the state.
    ConstantAmplitude,
    Drift(DriftLeaf),
    Geometric(TRegime),
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::Identity => f.write_str("identity"),
            Branch::ConstantAmplitude => f.write_str("constant"),
            Branch::Drift(leaf) => write!(f, "drift:{leaf}"),
            Branch::Geometric(t) => write!(f, "geometric:{t:?}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub entry: CatalogEntry,
    pub language: UnaryLanguage,
    pub branch: Branch,
}

#[derive(Debug, Error, PartialEq)]
pub enum ClassifyError {
    #[error("cutpoint {0} is outside [0, 1)")]
    Cutpoint(String),
    #[error("language {language} ({branch}) is not in the catalog")]
    OutsideCatalog { language: UnaryLanguage, branch: Branch },
    #[error("symbolic language {predicted} disagrees with enumeration {observed}")]
    OracleMismatch { predicted: String, observed: String },
    #[error("enumeration oracle failed: {0}")]
    Oracle(#[from] TraceError),
}

/// Symbolic language of the two-state unary AfA with these parameters at
/// cutpoint `λ`, derived from the closed form of `E_j` alone.
pub fn analyze(params: &UnaryParams) -> Result<(UnaryLanguage, Branch), ClassifyError> {
    let lambda = &params.lambda;
    if lambda.is_negative() || lambda >= &BigRational::one() {
        return Err(ClassifyError::Cutpoint(lambda.to_string()));
    }
    let region = accept_region(lambda);
    let inside = |x: &BigRational| in_region(&region, x);

    Ok(match params.dynamics() {
        Dynamics::Identity { offset } => (UnaryLanguage::constant(inside(&offset)), Branch::Identity),
        Dynamics::Drift { offset, amplitude } if amplitude.is_zero() => {
            (UnaryLanguage::constant(inside(&offset)), Branch::ConstantAmplitude)
        }
        Dynamics::Geometric { offset, amplitude, .. } if amplitude.is_zero() => {
            (UnaryLanguage::constant(inside(&offset)), Branch::ConstantAmplitude)
        }
        Dynamics::Drift { offset, amplitude } => {
            let seq = Monotone {
                offset: offset.clone(),
                amplitude: amplitude.clone(),
                kind: Kind::Linear,
            };
            let ranges = seq.ranges(&region);
            let leaf = drift_leaf(lambda, &offset, &amplitude);
            (ranges.language(), Branch::Drift(leaf))
        }
        Dynamics::Geometric { t, offset, amplitude, .. } => {
            let regime = TRegime::of(&t);
            let lang = match regime {
                TRegime::Zero => {
                    let tail = inside(&offset);
                    UnaryLanguage::new(vec![inside(&(&offset + &amplitude))], tail, tail)
                }
                TRegime::Flip => {
                    UnaryLanguage::new(Vec::new(), inside(&(&offset + &amplitude)), inside(&(&offset - &amplitude)))
                }
                TRegime::Contracting | TRegime::Expanding => Monotone {
                    offset,
                    amplitude,
                    kind: Kind::Power(t),
                }
                .ranges(&region)
                .language(),
                TRegime::Oscillating | TRegime::Alternating => {
                    let s = &t * &t;
                    let even = Monotone {
                        offset: offset.clone(),
                        amplitude: amplitude.clone(),
                        kind: Kind::Power(s.clone()),
                    }
                    .ranges(&region);
                    let odd = Monotone {
                        offset,
                        amplitude: &amplitude * &t,
                        kind: Kind::Power(s),
                    }
                    .ranges(&region);
                    even.interleave(&odd)
                }
            };
            (lang, Branch::Geometric(regime))
        }
    })
}

/// Symbolic classification, cross-checked against brute-force enumeration
/// of the corresponding machine and normalised into the catalog.
pub fn classify(params: &UnaryParams) -> Result<Classification, ClassifyError> {
    classify_with_len(params, 64)
}

/// As [`classify`], enumerating at least `min_len` lengths for the check.
pub fn classify_with_len(params: &UnaryParams, min_len: usize) -> Result<Classification, ClassifyError> {
    let (language, branch) = analyze(params)?;

    let machine = two_state_unary_afa(&params.tuple()).expect("two-state unary tuples are always affine");
    let spec = CutpointSpec::greater(Scalar::Rational(params.lambda.clone()))
        .map_err(|_| ClassifyError::Cutpoint(params.lambda.to_string()))?;
    let len = (language.tail_start() + 8).max(min_len);
    let trace = enumerate(&machine, &spec, len)?;
    let predicted = language.bits(len);
    let consistent = predicted == trace.prefix && trace.language().is_none_or(|l| l == language);
    if !consistent {
        let show = |bits: &[bool]| bits.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
        return Err(ClassifyError::OracleMismatch {
            predicted: format!("{language} [{}]", show(&predicted)),
            observed: format!(
                "{} [{}]",
                trace.language().map_or("?".to_string(), |l| l.to_string()),
                show(&trace.prefix)
            ),
        });
    }

    match CatalogEntry::from_language(&language) {
        Some(entry) => Ok(Classification { entry, language, branch }),
        None => Err(ClassifyError::OutsideCatalog { language, branch }),
    }
}

fn drift_leaf(lambda: &BigRational, f: &BigRational, c: &BigRational) -> DriftLeaf {
    use DriftZone::*;
    let half = BigRational::new(1.into(), 2.into());
    let mirror = mirror_threshold(lambda);
    let zone = if lambda < &half {
        let a = mirror.expect("λ ≠ 1/2");
        if f < &a {
            LowBelowA
        } else if f == &a {
            LowAtA
        } else if f < lambda {
            LowBetween
        } else if f == lambda {
            LowAtLambda
        } else {
            LowAboveLambda
        }
    } else if lambda == &half {
        if f <= lambda {
            HalfAtOrBelow
        } else {
            HalfAbove
        }
    } else {
        let b = mirror.expect("λ ≠ 1/2");
        if f <= lambda {
            HighAtOrBelow
        } else if f < &b {
            HighBetween
        } else if f == &b {
            HighAtB
        } else {
            HighAboveB
        }
    };
    let sign = if matches!(zone, LowBetween | HighBetween) {
        None
    } else if c.is_positive() {
        Some(Sign::Positive)
    } else {
        Some(Sign::Negative)
    };
    DriftLeaf { zone, sign }
}

enum Kind {
    /// `y_i = F + D·i`
    Linear,
    /// `y_i = F + D·s^i` with `s > 0`, `s ≠ 1`
    Power(BigRational),
}

/// A strictly monotone sequence `y_0, y_1, …` with `D ≠ 0`.
struct Monotone {
    offset: BigRational,
    amplitude: BigRational,
    kind: Kind,
}

/// Index ranges `[start, end)`; `end = None` is unbounded.
struct RangeSet(Vec<(usize, Option<usize>)>);

impl Monotone {
    fn value(&self, i: usize) -> BigRational {
        match &self.kind {
            Kind::Linear => &self.offset + &self.amplitude * BigRational::from_integer(i.into()),
            Kind::Power(s) => &self.offset + &self.amplitude * num_traits::pow(s.clone(), i),
        }
    }

    fn increasing(&self) -> bool {
        match &self.kind {
            Kind::Linear => self.amplitude.is_positive(),
            Kind::Power(s) => self.amplitude.is_positive() == (s > &BigRational::one()),
        }
    }

    /// `None` when the sequence is unbounded in its direction of travel.
    fn limit(&self) -> Option<&BigRational> {
        match &self.kind {
            Kind::Power(s) if s < &BigRational::one() => Some(&self.offset),
            _ => None,
        }
    }

    /// First index where `y` has passed `x` in the direction of travel
    /// (`strict`: `y > x` when increasing, `y < x` when decreasing; else
    /// `≥`/`≤`), if it ever does.
    fn first_past(&self, x: &BigRational, strict: bool) -> Option<usize> {
        let up = self.increasing();
        let reachable = match self.limit() {
            None => true,
            Some(l) => {
                if up {
                    l > x
                } else {
                    l < x
                }
            }
        };
        if !reachable {
            return None;
        }
        Some(first_true(|i| {
            let y = self.value(i);
            match (up, strict) {
                (true, true) => &y > x,
                (true, false) => &y >= x,
                (false, true) => &y < x,
                (false, false) => &y <= x,
            }
        }))
    }

    fn ranges(&self, region: &[(Option<BigRational>, Option<BigRational>)]) -> RangeSet {
        let up = self.increasing();
        let mut out = Vec::new();
        for (lo, hi) in region {
            // entry edge / exit edge in the direction of travel
            let (enter, exit) = if up { (lo, hi) } else { (hi, lo) };
            let start = match enter {
                None => Some(0),
                Some(e) => self.first_past(e, true),
            };
            let Some(start) = start else { continue };
            let end = exit.as_ref().and_then(|e| self.first_past(e, false));
            if end.is_none_or(|e| e > start) {
                out.push((start, end));
            }
        }
        RangeSet(out)
    }
}

impl RangeSet {
    fn contains(&self, i: usize) -> bool {
        self.0.iter().any(|&(s, e)| i >= s && e.is_none_or(|e| i < e))
    }

    fn unbounded(&self) -> bool {
        self.0.iter().any(|&(_, e)| e.is_none())
    }

    /// Index past every finite endpoint.
    fn bound(&self) -> usize {
        self.0.iter().map(|&(s, e)| e.unwrap_or(s).max(s)).max().unwrap_or(0)
    }

    fn language(&self) -> UnaryLanguage {
        let tail = self.unbounded();
        UnaryLanguage::from_fn(self.bound(), |j| self.contains(j), tail, tail)
    }

    /// Even lengths `2i` from `self`, odd lengths `2i+1` from `odd`.
    fn interleave(&self, odd: &RangeSet) -> UnaryLanguage {
        let start = 2 * self.bound().max(odd.bound()) + 2;
        let member = |j: usize| {
            if j.is_multiple_of(2) {
                self.contains(j / 2)
            } else {
                odd.contains(j / 2)
            }
        };
        UnaryLanguage::from_fn(start, member, self.unbounded(), odd.unbounded())
    }
}
