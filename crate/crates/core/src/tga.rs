//! Thresholding greedy algorithm on finitely supported vectors.

use std::cmp::Ordering;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{parse_err, Error, Result};
use crate::scalar::Scalar;
use crate::sets::IndexSet;
use crate::vector::SparseVector;

/// How ties `|e_i^*(x)| = |e_j^*(x)|` are resolved when choosing `Λ_m(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TiePolicy {
    /// Smaller index first.
    #[default]
    LowestIndex,
    /// Every set of `m` indices that is a legal greedy set.
    EnumerateAll,
}

impl std::str::FromStr for TiePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lowest-index" | "lowest_index" => Ok(TiePolicy::LowestIndex),
            "enumerate-all" | "enumerate_all" | "enumerate" | "all" => Ok(TiePolicy::EnumerateAll),
            _ => Err(parse_err("tie policy", s, "expected lowest-index or enumerate-all")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyStep<S> {
    pub m: usize,
    pub lambda: IndexSet,
    /// `α_m = min Λ_m`, absent for `m = 0`.
    pub alpha: Option<usize>,
    /// `β_m = max Λ_m`
    pub beta: Option<usize>,
    /// `G_m(x) = P_{Λ_m} x`
    pub approximant: SparseVector<S>,
}

impl<S: Scalar> GreedyStep<S> {
    pub fn from_set(x: &SparseVector<S>, lambda: IndexSet) -> Self {
        GreedyStep {
            m: lambda.len(),
            alpha: lambda.first(),
            beta: lambda.last(),
            approximant: x.project(&lambda),
            lambda,
        }
    }
}

/// Support of `x` sorted by decreasing modulus, ties by increasing index.
pub fn greedy_ordering<S: Scalar>(x: &SparseVector<S>) -> Vec<usize> {
    let mut idx: Vec<(usize, S)> = x.iter().map(|(&i, c)| (i, c.abs())).collect();
    idx.sort_by(|(i, a), (j, b)| b.approx_cmp(a).then(i.cmp(j)));
    idx.into_iter().map(|(i, _)| i).collect()
}

/// `|x_i| >= |x_j|` for every `i ∈ set`, `j ∉ set`, with `set ⊆ supp(x)`.
pub fn is_greedy_set<S: Scalar>(x: &SparseVector<S>, set: &IndexSet) -> bool {
    if !set.iter().all(|i| x.get(i).is_some()) {
        return false;
    }
    let inside_min = set.iter().map(|i| x.coef(i).abs()).min_by(|a, b| a.approx_cmp(b));
    let outside_max = x
        .iter()
        .filter(|(i, _)| !set.contains(**i))
        .map(|(_, c)| c.abs())
        .max_by(|a, b| a.approx_cmp(b));
    match (inside_min, outside_max) {
        (Some(lo), Some(hi)) => lo.approx_cmp(&hi) != Ordering::Less,
        _ => true,
    }
}

/// The canonical run `Λ_0 ⊂ Λ_1 ⊂ … ⊂ Λ_{m_max}` under [`TiePolicy::LowestIndex`].
///
/// `m_max` is clamped to `|supp x|`; beyond it every approximant equals `x`.
pub fn greedy_run<S: Scalar>(x: &SparseVector<S>, m_max: usize) -> Vec<GreedyStep<S>> {
    let order = greedy_ordering(x);
    let top = m_max.min(order.len());
    (0..=top)
        .map(|m| {
            let lambda = IndexSet::new(order[..m].iter().copied()).expect("support indices are positive and distinct");
            GreedyStep::from_set(x, lambda)
        })
        .collect()
}

/// Every legal `Λ_m(x)`, sorted. The indices strictly above the `m`-th modulus are forced;
/// the remainder is any subset of the tie class at that modulus.
pub fn greedy_sets<S: Scalar>(x: &SparseVector<S>, m: usize) -> Result<Vec<IndexSet>> {
    let order = greedy_ordering(x);
    if m > order.len() {
        return Err(Error::Invariant(format!("m = {} exceeds |supp x| = {}", m, order.len())));
    }
    if m == 0 {
        return Ok(vec![IndexSet::empty()]);
    }
    let pivot = x.coef(order[m - 1]).abs();
    let mut forced = Vec::new();
    let mut ties = Vec::new();
    for (i, c) in x.iter() {
        match c.abs().approx_cmp(&pivot) {
            Ordering::Greater => forced.push(*i),
            Ordering::Equal => ties.push(*i),
            Ordering::Less => {}
        }
    }
    let need = m - forced.len();
    let mut out: Vec<IndexSet> = ties
        .into_iter()
        .combinations(need)
        .map(|pick| IndexSet::new(forced.iter().copied().chain(pick)).expect("distinct support indices"))
        .collect();
    out.sort();
    Ok(out)
}

pub fn greedy_choices<S: Scalar>(x: &SparseVector<S>, m: usize, policy: TiePolicy) -> Result<Vec<GreedyStep<S>>> {
    match policy {
        TiePolicy::LowestIndex => {
            if m > x.support_len() {
                return Err(Error::Invariant(format!("m = {} exceeds |supp x| = {}", m, x.support_len())));
            }
            Ok(vec![greedy_run(x, m).pop().expect("run has m + 1 steps")])
        }
        TiePolicy::EnumerateAll => Ok(greedy_sets(x, m)?
            .into_iter()
            .map(|l| GreedyStep::from_set(x, l))
            .collect()),
    }
}

/// `T_λ(x) = λ Σ_{|x_i| >= λ} sgn(x_i) e_i + Σ_{|x_i| < λ} x_i e_i`.
pub fn truncate<S: Scalar>(x: &SparseVector<S>, lambda: &S) -> Result<SparseVector<S>> {
    if !lambda.is_positive() {
        return Err(Error::NonPositive {
            what: "truncation level",
            value: lambda.encode(),
        });
    }
    SparseVector::from_entries(x.iter().map(|(&i, c)| {
        let v = if c.abs().approx_cmp(lambda) != Ordering::Less {
            lambda.clone() * c.signum()
        } else {
            c.clone()
        };
        (i, v)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn v(s: &str) -> SparseVector<Rational> {
        s.parse().unwrap()
    }

    fn set(s: &str) -> IndexSet {
        s.parse().unwrap()
    }

    #[test]
    fn worked_run() {
        let x = v("1:3,2:-5,3:1,4:5");
        let run = greedy_run(&x, 4);
        assert_eq!(run[1].lambda, set("2"));
        assert_eq!(run[2].lambda, set("2,4"));
        assert_eq!(run[3].lambda, set("1,2,4"));
        assert_eq!((run[2].alpha, run[2].beta), (Some(2), Some(4)));
        assert_eq!(run[2].approximant, v("2:-5,4:5"));
    }

    #[test]
    fn enumerate_all_splits_ties() {
        let x = v("1:1,2:1,3:1");
        assert_eq!(greedy_sets(&x, 2).unwrap(), vec![set("1,2"), set("1,3"), set("2,3")]);
        let x = v("1:3,2:-5,3:1,4:5");
        assert_eq!(greedy_sets(&x, 1).unwrap(), vec![set("2"), set("4")]);
        assert_eq!(greedy_sets(&x, 2).unwrap(), vec![set("2,4")]);
    }

    #[test]
    fn zero_vector_and_m_zero() {
        let z = SparseVector::<Rational>::zero();
        let run = greedy_run(&z, 3);
        assert_eq!(run.len(), 1);
        assert!(run[0].approximant.is_zero());
        assert!(greedy_sets(&z, 1).is_err());
    }

    #[test]
    fn truncation() {
        let x = v("1:3,2:-1,3:1/2");
        assert_eq!(truncate(&x, &Rational::from_integer(1.into())).unwrap(), v("1:1,2:-1,3:1/2"));
        assert!(truncate(&x, &Rational::from_integer(0.into())).is_err());
    }

    #[test]
    fn greedy_set_predicate() {
        let x = v("1:3,2:-5,3:1,4:5");
        assert!(is_greedy_set(&x, &set("4")));
        assert!(!is_greedy_set(&x, &set("1")));
        assert!(!is_greedy_set(&x, &set("5")));
    }
}
