use std::collections::btree_map;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{parse_err, Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::sets::{IndexSet, Sign, SignPattern};

/// A finitely supported coefficient sequence `x = Σ e_n^*(x) e_n`.
///
/// Zero coefficients are never stored, so the key set is exactly `supp(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector<S> {
    entries: BTreeMap<usize, S>,
}

impl<S: Scalar> Default for SparseVector<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: Scalar> SparseVector<S> {
    pub fn zero() -> Self {
        SparseVector {
            entries: BTreeMap::new(),
        }
    }

    pub fn unit(n: usize) -> Result<Self> {
        Self::from_entries([(n, S::one())])
    }

    pub fn from_entries<I: IntoIterator<Item = (usize, S)>>(entries: I) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, c) in entries {
            if i == 0 {
                return Err(Error::InvalidIndex(0));
            }
            if map.contains_key(&i) {
                return Err(Error::DuplicateIndex(i));
            }
            if !c.is_zero() {
                map.insert(i, c);
            }
        }
        Ok(SparseVector { entries: map })
    }

    /// `Σ_{i∈A} c_i e_i` for aligned slices.
    pub fn on_set(set: &IndexSet, coefficients: &[S]) -> Result<Self> {
        if set.len() != coefficients.len() {
            return Err(Error::Invariant(format!(
                "{} coefficients for a set of size {}",
                coefficients.len(),
                set.len()
            )));
        }
        Self::from_entries(set.iter().zip(coefficients.iter().cloned()))
    }

    pub fn coef(&self, i: usize) -> S {
        self.entries.get(&i).cloned().unwrap_or_else(S::zero)
    }

    pub fn get(&self, i: usize) -> Option<&S> {
        self.entries.get(&i)
    }

    pub fn support(&self) -> IndexSet {
        IndexSet::from_sorted_unchecked(self.entries.keys().copied().collect())
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.keys().next_back().copied()
    }

    pub fn iter(&self) -> btree_map::Iter<'_, usize, S> {
        self.entries.iter()
    }

    /// `sup_j |e_j^*(x)|`, zero for the zero vector.
    pub fn max_abs(&self) -> S {
        self.entries
            .values()
            .map(|c| c.abs())
            .fold(S::zero(), S::max_of)
    }

    /// `P_A(x)`.
    pub fn project(&self, set: &IndexSet) -> Self {
        SparseVector {
            entries: self
                .entries
                .iter()
                .filter(|(i, _)| set.contains(**i))
                .map(|(&i, c)| (i, c.clone()))
                .collect(),
        }
    }

    /// `x - P_A(x)`.
    pub fn project_complement(&self, set: &IndexSet) -> Self {
        SparseVector {
            entries: self
                .entries
                .iter()
                .filter(|(i, _)| !set.contains(**i))
                .map(|(&i, c)| (i, c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, factor: &S) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        SparseVector {
            entries: self
                .entries
                .iter()
                .map(|(&i, c)| (i, c.clone() * factor.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a - b)
    }

    fn combine(&self, other: &Self, op: impl Fn(S, S) -> S) -> Self {
        let mut entries = BTreeMap::new();
        let keys: std::collections::BTreeSet<usize> =
            self.entries.keys().chain(other.entries.keys()).copied().collect();
        for i in keys {
            let v = op(self.coef(i), other.coef(i));
            if !v.is_zero() {
                entries.insert(i, v);
            }
        }
        SparseVector { entries }
    }

    /// Overwrites coefficient `i`; storing zero removes it.
    pub fn with_coef(&self, i: usize, c: S) -> Result<Self> {
        if i == 0 {
            return Err(Error::InvalidIndex(0));
        }
        let mut out = self.clone();
        if c.is_zero() {
            out.entries.remove(&i);
        } else {
            out.entries.insert(i, c);
        }
        Ok(out)
    }

    /// Sign of every nonzero coefficient.
    pub fn signs(&self) -> SignPattern {
        SignPattern::from_pairs(
            self.entries
                .iter()
                .map(|(&i, c)| (i, if c.is_negative() { Sign::Minus } else { Sign::Plus })),
        )
    }

    pub fn check_window(&self, window: usize) -> Result<()> {
        match self.max_index() {
            Some(i) if i > window => Err(Error::OutsideWindow { index: i, window }),
            _ => Ok(()),
        }
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> SparseVector<T> {
        SparseVector {
            entries: self
                .entries
                .iter()
                .map(|(&i, c)| (i, f(c)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    /// `⟨f, x⟩ = Σ f_i x_i`.
    pub fn dot(&self, other: &Self) -> S {
        self.entries
            .iter()
            .filter_map(|(i, c)| other.entries.get(i).map(|d| c.clone() * d.clone()))
            .fold(S::zero(), |a, b| a + b)
    }

    /// Canonical text form: `index:value` pairs joined by commas, e.g. `1:3,2:-5` or `1:3/2`.
    pub fn encode(&self) -> String {
        self.entries
            .iter()
            .map(|(i, c)| format!("{}:{}", i, c.encode()))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn decode(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() || t == "0" {
            return Ok(Self::zero());
        }
        let mut pairs = Vec::new();
        for part in t.split(',') {
            let (i, c) = part
                .split_once(':')
                .ok_or_else(|| parse_err("vector", s, "expected index:value pairs"))?;
            let i: usize = i.trim().parse().map_err(|_| parse_err("vector", s, "bad index"))?;
            pairs.push((i, S::decode(c)?));
        }
        Self::from_entries(pairs)
    }
}

impl SparseVector<Rational> {
    pub fn to_float(&self) -> SparseVector<f64> {
        self.map_scalar(Scalar::to_f64)
    }
}

impl<S: Scalar> fmt::Display for SparseVector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

impl<S: Scalar> FromStr for SparseVector<S> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::decode(s)
    }
}

/// `P_A(x)`: the coordinate restriction of `x` to `A`.
pub fn project<S: Scalar>(x: &SparseVector<S>, set: &IndexSet) -> SparseVector<S> {
    x.project(set)
}

/// `t · 1_{εA} = Σ_{i∈A} t ε_i e_i`; rejects `t <= 0`.
pub fn signed_indicator<S: Scalar>(set: &IndexSet, signs: &SignPattern, t: &S) -> Result<SparseVector<S>> {
    if !t.is_positive() {
        return Err(Error::NonPositive {
            what: "indicator height t",
            value: t.encode(),
        });
    }
    SparseVector::from_entries(set.iter().map(|i| {
        let c = match signs.get(i) {
            Sign::Plus => t.clone(),
            Sign::Minus => -t.clone(),
        };
        (i, c)
    }))
}

/// `1_A`.
pub fn indicator<S: Scalar>(set: &IndexSet) -> SparseVector<S> {
    SparseVector {
        entries: set.iter().map(|i| (i, S::one())).collect(),
    }
}
