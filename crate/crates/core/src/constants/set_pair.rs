use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{parse_err, Error, Result};
use crate::estimate::{BoundKind, ConstantEstimate, ConstantName, Witness};
use crate::norms::{norm, NormEngine};
use crate::sampler::{subset_of_size, SamplerSpec};
use crate::scalar::Scalar;
use crate::sets::IndexSet;
use crate::vector::indicator;
use crate::weights::WeightSequence;

/// Constraint tying `A` to `B` in `sup ‖1_A‖/‖1_B‖` over `w(A) <= w(B)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetRelation {
    /// `A < B`
    Precedes,
    /// `B < A`
    Follows,
    Disjoint,
    Unrestricted,
}

impl std::str::FromStr for SetRelation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "precedes" | "A<B" => Ok(SetRelation::Precedes),
            "follows" | "B<A" => Ok(SetRelation::Follows),
            "disjoint" => Ok(SetRelation::Disjoint),
            "unrestricted" | "any" => Ok(SetRelation::Unrestricted),
            _ => Err(parse_err("set relation", s, "expected precedes, follows, disjoint or unrestricted")),
        }
    }
}

impl SetRelation {
    pub fn holds(self, a: &IndexSet, b: &IndexSet) -> bool {
        match self {
            SetRelation::Precedes => a.precedes(b),
            SetRelation::Follows => b.precedes(a),
            SetRelation::Disjoint => a.is_disjoint(b),
            SetRelation::Unrestricted => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SetPairOptions {
    /// Windows up to this size are exhausted; larger ones are sampled.
    pub max_exact_window: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for SetPairOptions {
    fn default() -> Self {
        SetPairOptions {
            max_exact_window: 14,
            samples: 200_000,
            seed: 0,
        }
    }
}

/// The relation and weight behind each set-pair constant.
pub fn set_pair_shape(name: ConstantName) -> Option<(SetRelation, bool)> {
    Some(match name {
        ConstantName::Democracy => (SetRelation::Unrestricted, false),
        ConstantName::WDemocracy => (SetRelation::Unrestricted, true),
        ConstantName::Conservative => (SetRelation::Precedes, false),
        ConstantName::WConservative => (SetRelation::Precedes, true),
        ConstantName::ReverseConservative => (SetRelation::Follows, false),
        ConstantName::WReverseConservative => (SetRelation::Follows, true),
        _ => return None,
    })
}

struct Best<S> {
    value: S,
    a: u64,
    b: u64,
}

/// `sup { ‖1_A‖/‖1_B‖ : A, B ⊆ [1, N], B ≠ ∅, w(A) <= w(B), relation(A, B) }`.
///
/// Up to `max_exact_window` every pair is covered, enumerating `B` by increasing
/// mask and keeping the first strict maximum, so the witness is reproducible.
pub fn set_pair_constant<S: Scalar>(
    name: ConstantName,
    engine: &dyn NormEngine,
    w: &WeightSequence,
    relation: SetRelation,
    window: usize,
    opts: &SetPairOptions,
) -> Result<ConstantEstimate<S>> {
    if window == 0 {
        return Err(Error::WindowTooSmall {
            window,
            reason: "set-pair constants need a nonempty window".into(),
        });
    }
    if let Some(top) = engine.window() {
        if window > top {
            return Err(Error::WindowTooSmall {
                window,
                reason: format!("engine {} is only defined on [1, {}]", engine.name(), top),
            });
        }
    }
    if window > opts.max_exact_window || window > 24 {
        return sampled(name, engine, w, relation, window, opts);
    }
    let full = (1u64 << window) - 1;
    let wt = w.table::<S>(window);
    let norms: Vec<S> = (0..=full)
        .into_par_iter()
        .map(|mask| norm(engine, &indicator::<S>(&IndexSet::from_mask(mask))))
        .collect::<Result<_>>()?;
    let weights: Vec<S> = (0..=full).into_par_iter().map(|mask| wt.of_mask(mask)).collect();

    // For each B, the best admissible A (first maximum in increasing mask order).
    let per_b: Vec<Option<(u64, usize)>> = match relation {
        SetRelation::Unrestricted => {
            let mut order: Vec<u64> = (0..=full).collect();
            order.sort_by(|&p, &q| weights[p as usize].partial_cmp(&weights[q as usize]).expect("ordered").then(p.cmp(&q)));
            let mut prefix: Vec<u64> = Vec::with_capacity(order.len());
            for (k, &mask) in order.iter().enumerate() {
                let keep = match k {
                    0 => mask,
                    _ => {
                        let prev = prefix[k - 1];
                        if norms[mask as usize] > norms[prev as usize] {
                            mask
                        } else {
                            prev
                        }
                    }
                };
                prefix.push(keep);
            }
            (1..=full)
                .into_par_iter()
                .map(|b| {
                    let wb = &weights[b as usize];
                    let cut = order.partition_point(|&m| weights[m as usize].le_tol(wb));
                    (cut > 0).then(|| (prefix[cut - 1], 0))
                })
                .collect()
        }
        _ => (1..=full)
            .into_par_iter()
            .map(|b| {
                let region = match relation {
                    SetRelation::Precedes => (1u64 << b.trailing_zeros()) - 1,
                    SetRelation::Follows => full & !((1u64 << (64 - b.leading_zeros())) - 1),
                    _ => full & !b,
                };
                let wb = &weights[b as usize];
                let mut best: Option<u64> = None;
                let mut count = 0usize;
                let mut sub = 0u64;
                loop {
                    if weights[sub as usize].le_tol(wb) {
                        count += 1;
                        if best.is_none_or(|cur| norms[sub as usize] > norms[cur as usize]) {
                            best = Some(sub);
                        }
                    }
                    sub = sub.wrapping_sub(region) & region;
                    if sub == 0 {
                        break;
                    }
                }
                best.map(|a| (a, count))
            })
            .collect(),
    };

    let mut best: Option<Best<S>> = None;
    let mut evaluated = 0usize;
    for (k, entry) in per_b.into_iter().enumerate() {
        let b = k as u64 + 1;
        let Some((a, count)) = entry else { continue };
        evaluated += count.max(1);
        let ratio = norms[a as usize].clone() / norms[b as usize].clone();
        if best.as_ref().is_none_or(|cur| ratio > cur.value) {
            best = Some(Best { value: ratio, a, b });
        }
    }
    let best = best.expect("B = [1, N] always admits A = ∅");
    Ok(ConstantEstimate {
        name,
        weight: w.describe(),
        engine: engine.name(),
        value: best.value,
        kind: BoundKind::WindowExact,
        witness: Witness::SetPair {
            a: IndexSet::from_mask(best.a),
            b: IndexSet::from_mask(best.b),
        },
        window,
        evaluated,
        skipped: 0,
        seed: None,
        budget_exhausted: false,
        best_choice_value: None,
    })
}

fn sampled<S: Scalar>(
    name: ConstantName,
    engine: &dyn NormEngine,
    w: &WeightSequence,
    relation: SetRelation,
    window: usize,
    opts: &SetPairOptions,
) -> Result<ConstantEstimate<S>> {
    let spec = SamplerSpec::with_seed(opts.seed);
    let mut rng = spec.rng(11);
    let wt = w.table::<S>(window);
    let pairs: Vec<(IndexSet, IndexSet)> = (0..opts.samples)
        .map(|_| {
            let cut = rng.random_range(1..=window);
            let (b_pool, a_pool): (Vec<usize>, Vec<usize>) = match relation {
                SetRelation::Precedes => ((cut..=window).collect(), (1..cut).collect()),
                SetRelation::Follows => ((1..=cut).collect(), (cut + 1..=window).collect()),
                _ => ((1..=window).collect(), (1..=window).collect()),
            };
            let kb = rng.random_range(1..=b_pool.len());
            let b = subset_of_size(&mut rng, &b_pool, kb);
            let a_pool: Vec<usize> = match relation {
                SetRelation::Disjoint => a_pool.into_iter().filter(|i| !b.contains(*i)).collect(),
                _ => a_pool,
            };
            let ka = rng.random_range(0..=a_pool.len().min(kb + 2));
            let mut a = subset_of_size(&mut rng, &a_pool, ka);
            // Shed the heaviest elements of A until the weight constraint holds.
            while !wt.of(&a).le_tol(&wt.of(&b)) {
                let heaviest = a
                    .iter()
                    .max_by(|&p, &q| wt.get(p).partial_cmp(wt.get(q)).expect("ordered"))
                    .expect("A is nonempty while heavier than B");
                a = a.difference(&IndexSet::new([heaviest]).expect("positive"));
            }
            (a, b)
        })
        .collect();
    let ratios: Vec<S> = pairs
        .par_iter()
        .map(|(a, b)| Ok(norm(engine, &indicator::<S>(a))? / norm(engine, &indicator::<S>(b))?))
        .collect::<Result<_>>()?;
    let mut best = 0usize;
    for (k, r) in ratios.iter().enumerate() {
        if *r > ratios[best] {
            best = k;
        }
    }
    let (a, b) = pairs[best].clone();
    Ok(ConstantEstimate {
        name,
        weight: w.describe(),
        engine: engine.name(),
        value: ratios[best].clone(),
        kind: BoundKind::WitnessLowerBound,
        witness: Witness::SetPair { a, b },
        window,
        evaluated: pairs.len(),
        skipped: 0,
        seed: Some(opts.seed),
        budget_exhausted: true,
        best_choice_value: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::{LpExponent, LpSpace, SpreadingFamily};
    use crate::scalar::Rational;

    #[test]
    fn l1_democracy_is_one_under_unit_weights() {
        let l1 = LpSpace::new(LpExponent::One);
        let w = WeightSequence::ones();
        for rel in [SetRelation::Precedes, SetRelation::Follows, SetRelation::Disjoint, SetRelation::Unrestricted] {
            let e: ConstantEstimate<Rational> =
                set_pair_constant(ConstantName::Democracy, &l1, &w, rel, 6, &SetPairOptions::default()).unwrap();
            assert_eq!(e.value, Rational::from_i64(1), "{:?}", rel);
            assert_eq!(e.kind, BoundKind::WindowExact);
        }
    }

    #[test]
    fn spreading_disjoint_democracy_witness() {
        let s = SpreadingFamily::new(3).unwrap();
        let w = WeightSequence::ones();
        let e: ConstantEstimate<Rational> =
            set_pair_constant(ConstantName::Democracy, &s, &w, SetRelation::Disjoint, 12, &SetPairOptions::default())
                .unwrap();
        assert_eq!(e.value, Rational::from_i64(3));
        assert_eq!(
            e.witness,
            Witness::SetPair {
                a: IndexSet::range(7, 12),
                b: IndexSet::range(1, 6)
            }
        );
    }

    #[test]
    fn large_windows_fall_back_to_sampling() {
        let l1 = LpSpace::new(LpExponent::One);
        let w = WeightSequence::ones();
        let opts = SetPairOptions {
            max_exact_window: 4,
            samples: 500,
            seed: 3,
        };
        let e: ConstantEstimate<Rational> =
            set_pair_constant(ConstantName::Conservative, &l1, &w, SetRelation::Precedes, 10, &opts).unwrap();
        assert_eq!(e.kind, BoundKind::WitnessLowerBound);
        assert!(e.budget_exhausted);
        assert!(e.value <= Rational::from_i64(1));
    }
}
