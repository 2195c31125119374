use serde::Serialize;

use super::Side;
use crate::error::{Error, Result};
use crate::norms::{norm, NormEngine};
use crate::scalar::Scalar;
use crate::sets::IndexSet;
use crate::tga::{greedy_choices, TiePolicy};
use crate::vector::SparseVector;
use crate::weights::WeightSequence;

/// `σ̃(x)` for one greedy set `Λ`: the least `‖x − P_A x‖` over `A` on the chosen
/// side of `Λ` with `w(A) <= w(Λ)`, the empty set included.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "S: Scalar"))]
pub struct SigmaOutcome<S> {
    #[serde(serialize_with = "crate::report::ser_display")]
    pub lambda: IndexSet,
    #[serde(serialize_with = "crate::report::ser_scalar")]
    pub budget: S,
    #[serde(serialize_with = "crate::report::ser_scalar")]
    pub value: S,
    #[serde(serialize_with = "crate::report::ser_display")]
    pub argmin: IndexSet,
    /// Admissible sets whose residual norm was evaluated.
    pub visited: usize,
}

fn side_range(lambda: &IndexSet, side: Side, window: Option<usize>) -> Result<(usize, usize)> {
    let (lo, hi) = match side {
        Side::Left => (1, lambda.first().expect("Λ is nonempty") - 1),
        Side::Right => {
            let beta = lambda.last().expect("Λ is nonempty");
            let top = window.ok_or_else(|| Error::WindowTooSmall {
                window: 0,
                reason: "the right-hand variant needs a finite window".into(),
            })?;
            (beta + 1, top)
        }
    };
    Ok((lo, hi))
}

/// Pruned enumeration. Only `supp(x)` on the relevant side can lower the residual,
/// since extra indices cost weight without changing `x − P_A x`. Candidates are
/// visited in increasing weight, so a branch stops at the first index that would
/// exceed the budget.
pub fn sigma_for_set<S: Scalar>(
    engine: &dyn NormEngine,
    w: &WeightSequence,
    x: &SparseVector<S>,
    lambda: &IndexSet,
    side: Side,
    window: Option<usize>,
) -> Result<SigmaOutcome<S>> {
    if lambda.is_empty() {
        return Err(Error::InvalidConfig {
            field: "m".into(),
            reason: "σ̃ needs a nonempty greedy set (m >= 1)".into(),
        });
    }
    if let Some(win) = window {
        x.check_window(win)?;
    }
    let (lo, hi) = side_range(lambda, side, window)?;
    let budget: S = lambda.iter().map(|i| w.get::<S>(i)).fold(S::zero(), |a, b| a + b);
    let mut cands: Vec<(usize, S)> = x
        .iter()
        .map(|(&i, _)| i)
        .filter(|&i| i >= lo && i <= hi)
        .map(|i| (i, w.get::<S>(i)))
        .collect();
    cands.sort_by(|(i, a), (j, b)| a.partial_cmp(b).expect("ordered").then(i.cmp(j)));

    let mut best = SigmaOutcome {
        lambda: lambda.clone(),
        value: norm(engine, x)?,
        budget: budget.clone(),
        argmin: IndexSet::empty(),
        visited: 1,
    };
    let mut chosen = Vec::new();
    dfs(engine, x, &cands, 0, &mut chosen, S::zero(), &budget, &mut best)?;
    // x = P_A x with A beside Λ ⊆ supp x cannot happen, so σ̃ = 0 forces a zero residual.
    if best.value.is_zero() && !x.project_complement(lambda).is_zero() {
        return Err(Error::Invariant(format!("σ̃ = 0 with a nonzero residual x − P_Λ x, x = {}", x.encode())));
    }
    Ok(best)
}

#[allow(clippy::too_many_arguments)]
fn dfs<S: Scalar>(
    engine: &dyn NormEngine,
    x: &SparseVector<S>,
    cands: &[(usize, S)],
    start: usize,
    chosen: &mut Vec<usize>,
    acc: S,
    budget: &S,
    best: &mut SigmaOutcome<S>,
) -> Result<()> {
    for j in start..cands.len() {
        let nw = acc.clone() + cands[j].1.clone();
        if !nw.le_tol(budget) {
            break;
        }
        chosen.push(cands[j].0);
        let set = IndexSet::new(chosen.iter().copied()).expect("distinct candidates");
        let v = norm(engine, &x.project_complement(&set))?;
        best.visited += 1;
        if v < best.value {
            best.value = v;
            best.argmin = set;
        }
        dfs(engine, x, cands, j + 1, chosen, nw, budget, best)?;
        chosen.pop();
    }
    Ok(())
}

/// `σ̃^L_m(x)` or `σ̃^R_m(x)` for every greedy set allowed by `policy`.
pub fn sigma<S: Scalar>(
    engine: &dyn NormEngine,
    w: &WeightSequence,
    x: &SparseVector<S>,
    m: usize,
    side: Side,
    window: Option<usize>,
    policy: TiePolicy,
) -> Result<Vec<SigmaOutcome<S>>> {
    if m == 0 {
        return Err(Error::InvalidConfig {
            field: "m".into(),
            reason: "σ̃ is defined for m >= 1".into(),
        });
    }
    greedy_choices(x, m, policy)?
        .into_iter()
        .map(|step| sigma_for_set(engine, w, x, &step.lambda, side, window))
        .collect()
}

/// Reference enumerator: every subset of the side interval inside the window, no pruning.
pub fn sigma_brute_force<S: Scalar>(
    engine: &dyn NormEngine,
    w: &WeightSequence,
    x: &SparseVector<S>,
    lambda: &IndexSet,
    side: Side,
    window: usize,
) -> Result<S> {
    let (lo, hi) = side_range(lambda, side, Some(window))?;
    let pool: Vec<usize> = (lo..=hi).collect();
    if pool.len() > 24 {
        return Err(Error::WindowTooSmall {
            window,
            reason: "brute-force σ̃ enumerates at most 2^24 subsets".into(),
        });
    }
    let budget: S = lambda.iter().map(|i| w.get::<S>(i)).fold(S::zero(), |a, b| a + b);
    let mut best: Option<S> = None;
    for mask in 0u64..(1u64 << pool.len()) {
        let set = IndexSet::new((0..pool.len()).filter(|k| mask >> k & 1 == 1).map(|k| pool[k])).expect("distinct");
        let weight: S = set.iter().map(|i| w.get::<S>(i)).fold(S::zero(), |a, b| a + b);
        if !weight.le_tol(&budget) {
            continue;
        }
        let v = norm(engine, &x.project_complement(&set))?;
        if best.as_ref().is_none_or(|b| v < *b) {
            best = Some(v);
        }
    }
    Ok(best.expect("the empty set is always admissible"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::LpSpace;
    use crate::norms::{LpExponent, PartialSumSpace};
    use crate::scalar::Rational;

    fn v(s: &str) -> SparseVector<Rational> {
        s.parse().unwrap()
    }

    #[test]
    fn left_sigma_example() {
        let l1 = LpSpace::new(LpExponent::One);
        let w = WeightSequence::ones();
        let x = v("1:1,2:1,3:3");
        let out = sigma(&l1, &w, &x, 1, Side::Left, Some(3), TiePolicy::EnumerateAll).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].lambda, "3".parse().unwrap());
        assert_eq!(out[0].value, Rational::from_i64(4));
        let out = sigma(&l1, &w, &v("1:3"), 1, Side::Left, Some(3), TiePolicy::EnumerateAll).unwrap();
        assert_eq!(out[0].value, Rational::from_i64(3));
    }

    #[test]
    fn right_sigma_example() {
        let l1 = LpSpace::new(LpExponent::One);
        let w = WeightSequence::ones();
        let out = sigma(&l1, &w, &v("1:3,2:1,3:1"), 1, Side::Right, Some(3), TiePolicy::EnumerateAll).unwrap();
        assert_eq!(out[0].value, Rational::from_i64(4));
    }

    #[test]
    fn pruned_matches_brute_force_on_conditional_norm() {
        let ps = PartialSumSpace::new(Some(8));
        let w = WeightSequence::harmonic();
        let x = v("1:1,2:-1/2,3:1/4,5:-3,6:1,8:1/2");
        for m in 1..=x.support_len() {
            for side in [Side::Left, Side::Right] {
                for o in sigma(&ps, &w, &x, m, side, Some(8), TiePolicy::EnumerateAll).unwrap() {
                    let b = sigma_brute_force(&ps, &w, &x, &o.lambda, side, 8).unwrap();
                    assert_eq!(o.value, b, "m={} side={:?}", m, side);
                }
            }
        }
    }

    #[test]
    fn m_zero_is_rejected() {
        let l1 = LpSpace::new(LpExponent::One);
        let w = WeightSequence::ones();
        assert!(sigma(&l1, &w, &v("1:1"), 0, Side::Left, Some(2), TiePolicy::LowestIndex).is_err());
    }
}
