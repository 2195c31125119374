use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{parse_err, Error, Result};

/// A finite, sorted, duplicate-free set of positive indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn empty() -> Self {
        IndexSet(Vec::new())
    }

    pub fn new<I: IntoIterator<Item = usize>>(indices: I) -> Result<Self> {
        let mut v: Vec<usize> = indices.into_iter().collect();
        if let Some(&bad) = v.iter().find(|&&i| i == 0) {
            return Err(Error::InvalidIndex(bad));
        }
        v.sort_unstable();
        v.dedup();
        Ok(IndexSet(v))
    }

    /// `[lo, hi]`, empty when `lo > hi`. Panics if `lo == 0`.
    pub fn range(lo: usize, hi: usize) -> Self {
        assert!(lo >= 1, "indices are 1-based");
        IndexSet((lo..=hi).collect())
    }

    pub(crate) fn from_sorted_unchecked(v: Vec<usize>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]) && v.first().is_none_or(|&i| i >= 1));
        IndexSet(v)
    }

    /// Bit `k` of `mask` stands for index `k + 1`.
    pub fn from_mask(mask: u64) -> Self {
        let mut v = Vec::with_capacity(mask.count_ones() as usize);
        let mut m = mask;
        while m != 0 {
            let k = m.trailing_zeros() as usize;
            v.push(k + 1);
            m &= m - 1;
        }
        IndexSet(v)
    }

    pub fn to_mask(&self) -> Option<u64> {
        self.0.iter().try_fold(0u64, |acc, &i| (i <= 64).then(|| acc | (1u64 << (i - 1))))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = usize> + ExactSizeIterator + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        let mut v: Vec<usize> = self.0.iter().chain(other.0.iter()).copied().collect();
        v.sort_unstable();
        v.dedup();
        IndexSet(v)
    }

    pub fn intersection(&self, other: &IndexSet) -> IndexSet {
        IndexSet(self.0.iter().copied().filter(|&i| other.contains(i)).collect())
    }

    pub fn difference(&self, other: &IndexSet) -> IndexSet {
        IndexSet(self.0.iter().copied().filter(|&i| !other.contains(i)).collect())
    }

    pub fn is_disjoint(&self, other: &IndexSet) -> bool {
        self.0.iter().all(|&i| !other.contains(i))
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.0.iter().all(|&i| other.contains(i))
    }

    /// `A < B`: every element of `A` is below every element of `B`. Vacuous if either is empty.
    pub fn precedes(&self, other: &IndexSet) -> bool {
        match (self.last(), other.first()) {
            (Some(a), Some(b)) => a < b,
            _ => true,
        }
    }

    pub fn all_below(&self, bound: usize) -> bool {
        self.last().is_none_or(|m| m < bound)
    }

    pub fn all_above(&self, bound: usize) -> bool {
        self.first().is_none_or(|m| m > bound)
    }
}

impl TryFrom<Vec<usize>> for IndexSet {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        IndexSet::new(v)
    }
}

impl From<IndexSet> for Vec<usize> {
    fn from(s: IndexSet) -> Self {
        s.0
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i)?;
        }
        write!(f, "}}")
    }
}

impl std::str::FromStr for IndexSet {
    type Err = Error;

    /// Accepts `3,5,9`, `{3,5,9}`, ranges `7-12`, or an empty string.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('{').trim_end_matches('}').trim();
        let mut out = Vec::new();
        for part in t.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if let Some((lo, hi)) = part.split_once('-') {
                let lo: usize = lo.trim().parse().map_err(|_| parse_err("index set", s, "bad range"))?;
                let hi: usize = hi.trim().parse().map_err(|_| parse_err("index set", s, "bad range"))?;
                out.extend(lo..=hi);
            } else {
                out.push(part.parse().map_err(|_| parse_err("index set", s, "bad index"))?);
            }
        }
        IndexSet::new(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// Signs indexed by position; every unassigned index reads as `+1`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SignPattern(BTreeMap<usize, Sign>);

impl SignPattern {
    pub fn all_plus() -> Self {
        SignPattern(BTreeMap::new())
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, Sign)>>(pairs: I) -> Self {
        SignPattern(pairs.into_iter().filter(|(_, s)| *s == Sign::Minus).collect())
    }

    /// The `bits`-th of the `2^|set|` patterns on `set`: bit `k` set means a minus at the `k`-th element.
    pub fn from_bits(set: &IndexSet, bits: u64) -> Self {
        SignPattern::from_pairs(
            set.iter()
                .enumerate()
                .filter(|(k, _)| bits >> k & 1 == 1)
                .map(|(_, i)| (i, Sign::Minus)),
        )
    }

    pub fn get(&self, i: usize) -> Sign {
        self.0.get(&i).copied().unwrap_or(Sign::Plus)
    }

    pub fn set(&mut self, i: usize, s: Sign) {
        match s {
            Sign::Plus => {
                self.0.remove(&i);
            }
            Sign::Minus => {
                self.0.insert(i, Sign::Minus);
            }
        }
    }

    /// Restriction to `set`, written as a `+`/`-` string in index order.
    pub fn render_on(&self, set: &IndexSet) -> String {
        set.iter()
            .map(|i| if self.get(i) == Sign::Plus { '+' } else { '-' })
            .collect()
    }

    pub fn parse_on(set: &IndexSet, s: &str) -> Result<Self> {
        if s.chars().count() != set.len() {
            return Err(parse_err("sign pattern", s, format!("expected {} signs", set.len())));
        }
        let mut p = SignPattern::all_plus();
        for (i, c) in set.iter().zip(s.chars()) {
            match c {
                '+' => {}
                '-' => p.set(i, Sign::Minus),
                _ => return Err(parse_err("sign pattern", s, "expected `+` or `-`")),
            }
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_sorts_and_rejects_zero() {
        let s = IndexSet::new([5, 3, 9, 3]).unwrap();
        assert_eq!(s.as_slice(), &[3, 5, 9]);
        assert_eq!((s.first(), s.last()), (Some(3), Some(9)));
        assert!(matches!(IndexSet::new([0, 1]), Err(Error::InvalidIndex(0))));
        assert_eq!(IndexSet::empty().first(), None);
    }

    #[test]
    fn precedence_is_vacuous_for_empty_sets() {
        let a = IndexSet::range(1, 3);
        let b = IndexSet::range(4, 6);
        assert!(a.precedes(&b));
        assert!(!b.precedes(&a));
        assert!(IndexSet::empty().precedes(&a));
        assert!(a.precedes(&IndexSet::empty()));
    }

    #[test]
    fn mask_round_trip() {
        let s = IndexSet::new([1, 4, 7]).unwrap();
        assert_eq!(IndexSet::from_mask(s.to_mask().unwrap()), s);
        assert_eq!(IndexSet::new([65]).unwrap().to_mask(), None);
    }

    #[test]
    fn parses_ranges_and_braces() {
        let s: IndexSet = "{1-3, 7}".parse().unwrap();
        assert_eq!(s.as_slice(), &[1, 2, 3, 7]);
        let e: IndexSet = "".parse().unwrap();
        assert!(e.is_empty());
    }

    #[test]
    fn sign_patterns_default_to_plus() {
        let set = IndexSet::new([2, 4, 6]).unwrap();
        let p = SignPattern::from_bits(&set, 0b101);
        assert_eq!(p.render_on(&set), "-+-");
        assert_eq!(p.get(100), Sign::Plus);
        assert_eq!(SignPattern::parse_on(&set, "-+-").unwrap(), p);
    }
}
