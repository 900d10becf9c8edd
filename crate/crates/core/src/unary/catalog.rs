use std::fmt;

use serde::{Deserialize, Serialize};

use super::UnaryLanguage;

/// Base set of a catalog language. `Less(n)` is `{a^j : j ≤ n}`,
/// `Interval(k, l)` is `{a^j : k ≤ j ≤ l}` with `1 ≤ k < l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Base {
    Empty,
    All,
    Less(usize),
    Interval(usize, usize),
}

impl Base {
    fn contains(self, j: usize) -> bool {
        match self {
            Base::Empty => false,
            Base::All => true,
            Base::Less(n) => j <= n,
            Base::Interval(k, l) => k <= j && j <= l,
        }
    }

    fn bound(self) -> usize {
        match self {
            Base::Empty | Base::All => 0,
            Base::Less(n) => n + 1,
            Base::Interval(_, l) => l + 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    None,
    Even,
    Odd,
}

impl Parity {
    fn admits(self, j: usize) -> bool {
        match self {
            Parity::None => true,
            Parity::Even => j.is_multiple_of(2),
            Parity::Odd => j % 2 == 1,
        }
    }

    fn of(j: usize) -> Parity {
        if j.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Smallest length with this parity.
    fn least(self) -> usize {
        match self {
            Parity::Odd => 1,
            _ => 0,
        }
    }
}

/// A language of the two-state unary catalog, denoting
/// `X = (B or its complement) ∩ P`, or the complement of `X` when
/// `complemented` is set.
///
/// Canonical form: `negated_base` only appears together with a parity
/// filter (otherwise it is folded into `complemented`), the complement of
/// `Empty` is `All`, and parity-only languages use `All` as the base.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub base: Base,
    pub negated_base: bool,
    pub parity: Parity,
    pub complemented: bool,
}

impl CatalogEntry {
    pub const EMPTY: CatalogEntry = CatalogEntry::plain(Base::Empty);
    pub const ALL: CatalogEntry = CatalogEntry::plain(Base::All);

    pub const fn plain(base: Base) -> Self {
        CatalogEntry {
            base,
            negated_base: false,
            parity: Parity::None,
            complemented: false,
        }
    }

    pub const fn with_parity(base: Base, parity: Parity) -> Self {
        CatalogEntry {
            base,
            negated_base: false,
            parity,
            complemented: false,
        }
    }

    pub const fn negated_with_parity(base: Base, parity: Parity) -> Self {
        CatalogEntry {
            base,
            negated_base: true,
            parity,
            complemented: false,
        }
    }

    pub fn complement(self) -> Self {
        if self == CatalogEntry::EMPTY {
            CatalogEntry::ALL
        } else if self == CatalogEntry::ALL {
            CatalogEntry::EMPTY
        } else {
            CatalogEntry {
                complemented: !self.complemented,
                ..self
            }
        }
    }

    pub fn contains(&self, j: usize) -> bool {
        let b = self.base.contains(j) != self.negated_base;
        (b && self.parity.admits(j)) != self.complemented
    }

    pub fn language(&self) -> UnaryLanguage {
        let start = self.base.bound();
        let (even, odd) = (self.contains(start + start % 2), self.contains(start + 1 - start % 2));
        UnaryLanguage::from_fn(start, |j| self.contains(j), even, odd)
    }

    /// The canonical catalog entry denoting `lang`, if there is one.
    pub fn from_language(lang: &UnaryLanguage) -> Option<CatalogEntry> {
        positive_form(lang).or_else(|| positive_form(&lang.complement()).map(CatalogEntry::complement))
    }
}

/// Matches the uncomplemented shapes: `All`, the finite shapes
/// (`Empty`, `Less`, `Interval`, and their parity restrictions), and the
/// co-finite-within-a-parity shapes `(All | ¬Less | ¬Interval) ∩ P`.
fn positive_form(lang: &UnaryLanguage) -> Option<CatalogEntry> {
    let n = lang.tail_start();
    match lang.tail() {
        (true, true) => (n == 0).then_some(CatalogEntry::ALL),
        (false, false) => finite_form(&lang.finite_members()),
        (even, _) => {
            let parity = if even { Parity::Even } else { Parity::Odd };
            if (0..n).any(|j| !parity.admits(j) && lang.contains(j)) {
                return None;
            }
            let missing: Vec<usize> = (0..n)
                .filter(|&j| parity.admits(j) && !lang.contains(j))
                .collect();
            let Some((&g1, &g2)) = missing.first().zip(missing.last()) else {
                return Some(CatalogEntry::with_parity(Base::All, parity));
            };
            if !class_block(&missing) {
                return None;
            }
            Some(if g1 == parity.least() {
                CatalogEntry::negated_with_parity(Base::Less(g2), parity)
            } else {
                CatalogEntry::negated_with_parity(Base::Interval(g1, g2.max(g1 + 1)), parity)
            })
        }
    }
}

fn finite_form(members: &[usize]) -> Option<CatalogEntry> {
    let Some((&s, &e)) = members.first().zip(members.last()) else {
        return Some(CatalogEntry::EMPTY);
    };
    let contiguous = e - s + 1 == members.len();
    if contiguous && s == 0 {
        return Some(CatalogEntry::plain(Base::Less(e)));
    }
    if contiguous && e > s {
        return Some(CatalogEntry::plain(Base::Interval(s, e)));
    }
    if !class_block(members) {
        return None;
    }
    let parity = Parity::of(s);
    Some(if s == parity.least() {
        CatalogEntry::with_parity(Base::Less(e), parity)
    } else {
        CatalogEntry::with_parity(Base::Interval(s, e.max(s + 1)), parity)
    })
}

/// `s, s+2, s+4, …, e` with nothing skipped.
fn class_block(xs: &[usize]) -> bool {
    xs.windows(2).all(|w| w[1] == w[0] + 2)
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Base::Empty => f.write_str("EMPTY"),
            Base::All => f.write_str("ALL"),
            Base::Less(n) => write!(f, "LESS({n})"),
            Base::Interval(k, l) => write!(f, "INTERVAL({k},{l})"),
        }
    }
}

/// `LESS(3)`, `!INTERVAL(3,7)`, `!LESS(2) & EVEN`, `!(INTERVAL(1,4) & ODD)`.
impl fmt::Display for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut inner = String::new();
        if self.negated_base {
            inner.push('!');
        }
        inner.push_str(&self.base.to_string());
        match self.parity {
            Parity::None => {}
            Parity::Even => inner.push_str(" & EVEN"),
            Parity::Odd => inner.push_str(" & ODD"),
        }
        match (self.complemented, self.parity, self.negated_base) {
            (false, ..) => f.write_str(&inner),
            (true, Parity::None, false) => write!(f, "!{inner}"),
            (true, ..) => write!(f, "!({inner})"),
        }
    }
}
