//! Two-state unary AfAs: brute-force language enumeration, the symbolic
//! classifier and the catalog of recognisable languages.

mod catalog;
mod classify;
mod language;
mod params;
mod sweep;
mod trace;

pub use catalog::{Base, CatalogEntry, Parity};
pub use classify::{analyze, classify, classify_with_len, Branch, Classification, ClassifyError, DriftLeaf, DriftZone, Sign, TRegime};
pub use language::UnaryLanguage;
pub use params::{
    accept_region, acceptance_value, extract, in_region, mirror_threshold, Dynamics, Extracted, Interval, UnaryParams,
};
pub use sweep::{curated_params, random_params, run_sweep, Outcome, SweepReport};
pub use trace::{enumerate, enumerate_with_tol, matches, MembershipTrace, Tail, TraceError};

/// Smallest `j` with `pred(j)`, for a predicate that is false up to some
/// index and true from there on. The caller guarantees it turns true.
pub(crate) fn first_true(pred: impl Fn(usize) -> bool) -> usize {
    if pred(0) {
        return 0;
    }
    let mut hi = 1;
    while !pred(hi) {
        hi *= 2;
    }
    let mut lo = hi / 2;
    // pred(lo) is false, pred(hi) is true
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
