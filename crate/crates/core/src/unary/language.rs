use std::fmt;

/// Eventually periodic unary language with period at most 2: explicit bits
/// for `a^0 … a^{N−1}`, then membership depends only on the parity of the
/// length. Stored with the shortest possible prefix, so `==` is language
/// equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UnaryLanguage {
    prefix: Vec<bool>,
    even: bool,
    odd: bool,
}

impl UnaryLanguage {
    pub fn new(mut prefix: Vec<bool>, even: bool, odd: bool) -> Self {
        while let Some(&last) = prefix.last() {
            let j = prefix.len() - 1;
            if last != if j.is_multiple_of(2) { even } else { odd } {
                break;
            }
            prefix.pop();
        }
        UnaryLanguage { prefix, even, odd }
    }

    /// Bits from `member` below `start`, the given tail from `start` on.
    pub fn from_fn(start: usize, member: impl Fn(usize) -> bool, even: bool, odd: bool) -> Self {
        UnaryLanguage::new((0..start).map(member).collect(), even, odd)
    }

    pub fn constant(bit: bool) -> Self {
        UnaryLanguage::new(Vec::new(), bit, bit)
    }

    pub fn contains(&self, j: usize) -> bool {
        match self.prefix.get(j) {
            Some(&b) => b,
            None if j.is_multiple_of(2) => self.even,
            None => self.odd,
        }
    }

    /// First index from which membership is a function of parity alone.
    pub fn tail_start(&self) -> usize {
        self.prefix.len()
    }

    pub fn tail(&self) -> (bool, bool) {
        (self.even, self.odd)
    }

    pub fn complement(&self) -> Self {
        UnaryLanguage {
            prefix: self.prefix.iter().map(|b| !b).collect(),
            even: !self.even,
            odd: !self.odd,
        }
    }

    pub fn bits(&self, upto: usize) -> Vec<bool> {
        (0..=upto).map(|j| self.contains(j)).collect()
    }

    /// Members below the tail start.
    pub fn finite_members(&self) -> Vec<usize> {
        (0..self.prefix.len()).filter(|&j| self.prefix[j]).collect()
    }
}

fn bit(b: bool) -> char {
    if b {
        '1'
    } else {
        '0'
    }
}

/// `0001111100(0)*` or `01(10)*`: the tail group repeats from the end of
/// the explicit bits.
impl fmt::Display for UnaryLanguage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head: String = self.prefix.iter().map(|&b| bit(b)).collect();
        let n = self.prefix.len();
        let (first, second) = if n.is_multiple_of(2) {
            (self.even, self.odd)
        } else {
            (self.odd, self.even)
        };
        if first == second {
            write!(f, "{head}({})*", bit(first))
        } else {
            write!(f, "{head}({}{})*", bit(first), bit(second))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_form_makes_equality_semantic() {
        let a = UnaryLanguage::new(vec![true, false, true, false], true, false);
        let b = UnaryLanguage::new(vec![], true, false);
        assert_eq!(a, b);
        assert_eq!(a.tail_start(), 0);
        assert_ne!(a, UnaryLanguage::constant(true));
    }

    #[test]
    fn display_shows_phase() {
        let l = UnaryLanguage::new(vec![false, false, false, true], false, false);
        assert_eq!(l.to_string(), "0001(0)*");
        let p = UnaryLanguage::new(vec![false], true, false);
        assert_eq!(p.to_string(), "0(01)*");
        assert!(!p.contains(0) && !p.contains(1) && p.contains(2) && !p.contains(3));
    }

    #[test]
    fn complement_flips_everything() {
        let l = UnaryLanguage::new(vec![true, false, false], false, true);
        let c = l.complement();
        for j in 0..10 {
            assert_ne!(l.contains(j), c.contains(j));
        }
    }
}
