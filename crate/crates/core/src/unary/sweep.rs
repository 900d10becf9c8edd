use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::classify::{classify_with_len, Branch, Classification, ClassifyError, DriftLeaf, TRegime};
use super::{UnaryLanguage, UnaryParams};

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Agree(Classification),
    OutsideCatalog { language: UnaryLanguage, branch: Branch },
    Failed(String),
}

#[derive(Clone, Debug, Default)]
pub struct SweepReport {
    pub total: usize,
    pub agreements: usize,
    pub outside: Vec<(UnaryParams, UnaryLanguage, Branch)>,
    pub failures: Vec<(UnaryParams, String)>,
    pub drift_hits: BTreeMap<DriftLeaf, usize>,
    pub regime_hits: BTreeMap<TRegime, usize>,
}

impl SweepReport {
    pub fn missing_leaves(&self) -> Vec<DriftLeaf> {
        DriftLeaf::all()
            .into_iter()
            .filter(|l| !self.drift_hits.contains_key(l))
            .collect()
    }

    pub fn missing_regimes(&self) -> Vec<TRegime> {
        TRegime::ALL
            .into_iter()
            .filter(|r| !self.regime_hits.contains_key(r))
            .collect()
    }

    /// Symbolic and enumerated languages agree on every tuple (catalog
    /// membership aside).
    pub fn oracle_agrees(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn all_in_catalog(&self) -> bool {
        self.outside.is_empty()
    }

    pub fn merge(mut self, other: SweepReport) -> SweepReport {
        self.total += other.total;
        self.agreements += other.agreements;
        self.outside.extend(other.outside);
        self.failures.extend(other.failures);
        for (k, v) in other.drift_hits {
            *self.drift_hits.entry(k).or_default() += v;
        }
        for (k, v) in other.regime_hits {
            *self.regime_hits.entry(k).or_default() += v;
        }
        self
    }
}

/// Classifies every tuple against enumeration up to `max_len`, in parallel.
pub fn run_sweep(params: &[UnaryParams], max_len: usize) -> SweepReport {
    let outcomes: Vec<(Outcome, &UnaryParams)> = params
        .par_iter()
        .map(|p| {
            let outcome = match classify_with_len(p, max_len) {
                Ok(c) => Outcome::Agree(c),
                Err(ClassifyError::OutsideCatalog { language, branch }) => Outcome::OutsideCatalog { language, branch },
                Err(e) => Outcome::Failed(e.to_string()),
            };
            (outcome, p)
        })
        .collect();

    let mut report = SweepReport {
        total: params.len(),
        ..SweepReport::default()
    };
    for (outcome, p) in outcomes {
        let branch = match outcome {
            Outcome::Agree(c) => {
                report.agreements += 1;
                Some(c.branch)
            }
            Outcome::OutsideCatalog { language, branch } => {
                // symbolic and enumerated languages still agreed
                report.agreements += 1;
                report.outside.push((p.clone(), language, branch));
                Some(branch)
            }
            Outcome::Failed(msg) => {
                report.failures.push((p.clone(), msg));
                None
            }
        };
        match branch {
            Some(Branch::Drift(leaf)) => *report.drift_hits.entry(leaf).or_default() += 1,
            Some(Branch::Geometric(t)) => *report.regime_hits.entry(t).or_default() += 1,
            _ => {}
        }
    }
    report
}

#[derive(Clone, Copy)]
enum Stratum {
    General,
    Drift,
    Flip,
    Zero,
}

/// `count` tuples with entries `n/d`, `d ≤ 4`, in `[−3, 3]` and `λ` drawn
/// from `{1/4, 1/2, 3/4}`. Half are unconstrained; the rest force
/// `p + q ∈ {0, 2, 1}` (drift, `t = −1`, `t = 0`), which uniform draws
/// would almost never produce.
pub fn random_params(seed: u64, count: usize) -> Vec<UnaryParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let stratum = match rng.gen_range(0..10) {
                0..=4 => Stratum::General,
                5..=7 => Stratum::Drift,
                8 => Stratum::Flip,
                _ => Stratum::Zero,
            };
            let (p, q) = loop {
                let p = grid(&mut rng);
                let q = match stratum {
                    Stratum::General => grid(&mut rng),
                    Stratum::Drift => -p.clone(),
                    Stratum::Flip => ratio(2, 1) - &p,
                    Stratum::Zero => ratio(1, 1) - &p,
                };
                if q.abs() <= ratio(3, 1) {
                    break (p, q);
                }
            };
            let lambda = [ratio(1, 4), ratio(1, 2), ratio(3, 4)][rng.gen_range(0..3)].clone();
            UnaryParams {
                p,
                q,
                f1: grid(&mut rng),
                f2: grid(&mut rng),
                m: grid(&mut rng),
                lambda,
            }
        })
        .collect()
}

/// Hand-picked tuples reaching every drift leaf and every `t` regime.
pub fn curated_params() -> Vec<UnaryParams> {
    // (λ, m, p)
    let drift: [[(i64, i64); 3]; 20] = [
        [(1, 4), (-1, 1), (-1, 2)],
        [(1, 4), (-1, 1), (1, 4)],
        [(1, 4), (-1, 2), (-1, 1)],
        [(1, 4), (-1, 2), (1, 4)],
        [(1, 4), (0, 1), (1, 8)],
        [(1, 4), (1, 4), (-1, 4)],
        [(1, 4), (1, 4), (1, 4)],
        [(1, 4), (1, 1), (-1, 4)],
        [(1, 4), (1, 1), (1, 1)],
        [(1, 2), (0, 1), (-1, 1)],
        [(1, 2), (0, 1), (1, 4)],
        [(1, 2), (1, 1), (-1, 8)],
        [(1, 2), (1, 1), (1, 1)],
        [(3, 4), (1, 2), (-1, 1)],
        [(3, 4), (1, 2), (1, 8)],
        [(3, 4), (1, 1), (1, 8)],
        [(3, 4), (3, 2), (-1, 8)],
        [(3, 4), (3, 2), (1, 8)],
        [(3, 4), (2, 1), (-1, 8)],
        [(3, 4), (2, 1), (1, 1)],
    ];
    // f1 = 1, f2 = 0 makes F = m and C = p.
    let mut out: Vec<UnaryParams> = drift
        .iter()
        .map(|&[lambda, m, p]| UnaryParams::from_ratios([p, (-p.0, p.1), (1, 1), (0, 1), m], lambda))
        .collect();
    // p = q, so t = 1 − 2p ∈ {0, 1/2, 2, −1/2, −1, −2}
    for p in [(1, 2), (1, 4), (-1, 2), (3, 4), (1, 1), (3, 2)] {
        out.push(UnaryParams::from_ratios([p, p, (1, 1), (0, 1), (1, 1)], (1, 2)));
    }
    out
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn grid(rng: &mut ChaCha8Rng) -> BigRational {
    let d = rng.gen_range(1..=4i64);
    ratio(rng.gen_range(-3 * d..=3 * d), d)
}
