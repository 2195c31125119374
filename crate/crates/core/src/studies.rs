//! Fixed experiments with a pass/fail outcome: the interleaved left-Property-(A)
//! family, the spreading democracy pair, σ̃ against brute force, and greedy-set
//! and truncation checks. Each is a pure function of its parameters.

use itertools::Itertools;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{
    interleaved_tuple, property_a_lower_bound, set_pair_constant, sigma_brute_force, sigma_for_set, PropertyVariant,
    SetPairOptions, SetRelation, Side,
};
use crate::error::Result;
use crate::estimate::{ConstantName, EstimateRecord, Witness};
use crate::norms::{norm, LpExponent, LpSpace, NormEngine, PartialSumSpace, SpreadingFamily};
use crate::sampler::{random_eighth, subset_of_size, SamplerSpec};
use crate::scalar::{Rational, Scalar};
use crate::sets::IndexSet;
use crate::tga::{greedy_sets, truncate};
use crate::vector::{indicator, SparseVector};
use crate::weights::WeightSequence;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyPoint {
    pub n: usize,
    pub window: usize,
    /// `‖x + 1_A‖` for the interleaved tuple.
    pub lhs: String,
    /// `‖x + 1_B‖`
    pub rhs: String,
    pub ratio: String,
    /// The search restricted to the interleaved tuples on `[1, 4n]`.
    pub family_bound: EstimateRecord,
    /// The full seeded search, interleaved tuples included.
    pub search_bound: EstimateRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeftPropertyStudy {
    pub space: String,
    pub points: Vec<FamilyPoint>,
    pub strictly_increasing: bool,
    pub passed: bool,
}

/// Only the structured candidates, no sampled layers and no refinement.
pub fn family_only(spec: &SamplerSpec) -> SamplerSpec {
    SamplerSpec {
        sign_vectors: 0,
        grid: 0,
        random: 0,
        refine_rounds: 0,
        ..spec.clone()
    }
}

/// Lower bounds for `C_la` on `partial_sum@4n`, even `n` with `4n <= max_window`.
pub fn left_property_study(max_window: usize, spec: &SamplerSpec) -> Result<LeftPropertyStudy> {
    let w = WeightSequence::ones();
    let mut points = Vec::new();
    let mut passed = true;
    for n in (2..=max_window / 4).step_by(2) {
        let window = 4 * n;
        let engine = PartialSumSpace::new(Some(window));
        let tuple = interleaved_tuple::<Rational>(n);
        let (l, r) = tuple.sides()?;
        let lhs: Rational = norm(&engine, &l)?;
        let rhs: Rational = norm(&engine, &r)?;
        let ratio = lhs.clone() / rhs.clone();
        let family = property_a_lower_bound::<Rational>(&engine, &w, PropertyVariant::Left, window, &family_only(spec))?;
        let search = property_a_lower_bound::<Rational>(&engine, &w, PropertyVariant::Left, window, spec)?;
        passed &= family.value == ratio && search.value >= ratio;
        points.push(FamilyPoint {
            n,
            window,
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            ratio: ratio.to_string(),
            family_bound: family.record(),
            search_bound: search.record(),
        });
    }
    let strictly_increasing = points.windows(2).all(|p| p[1].family_bound.value_f64 > p[0].family_bound.value_f64);
    Ok(LeftPropertyStudy {
        space: "partial_sum".into(),
        strictly_increasing,
        passed: passed && strictly_increasing && !points.is_empty(),
        points,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemocracyStudy {
    pub space: String,
    pub window: usize,
    pub relation: SetRelation,
    pub estimate: EstimateRecord,
    /// `‖1_{[n!+1, 2n!]}‖ / ‖1_{[1, n!]}‖`
    pub block_ratio: String,
    pub witness_is_block_pair: bool,
    pub passed: bool,
}

/// Democracy on `spreading:n` over disjoint pairs, compared with the two consecutive blocks of length `n!`.
pub fn democracy_study(n: u32) -> Result<DemocracyStudy> {
    let engine = SpreadingFamily::new(n)?;
    let window = engine.window().expect("spreading windows are finite");
    let block = window / 2;
    let low = IndexSet::range(1, block);
    let high = IndexSet::range(block + 1, window);
    let est = set_pair_constant::<Rational>(
        ConstantName::Democracy,
        &engine,
        &WeightSequence::ones(),
        SetRelation::Disjoint,
        window,
        &SetPairOptions::default(),
    )?;
    let block_ratio: Rational = norm(&engine, &indicator::<Rational>(&high))? / norm(&engine, &indicator::<Rational>(&low))?;
    let witness_is_block_pair = matches!(&est.witness, Witness::SetPair { a, b } if *a == high && *b == low);
    Ok(DemocracyStudy {
        space: engine.name(),
        window,
        relation: SetRelation::Disjoint,
        passed: est.value >= Rational::from_i64(n as i64) && witness_is_block_pair,
        block_ratio: block_ratio.to_string(),
        estimate: est.record(),
        witness_is_block_pair,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SigmaOracleSpec {
    pub window: usize,
    /// Every vector with at most this many nonzero coefficients is checked.
    pub exhaustive_support: usize,
    pub max_support: usize,
    /// Seeded vectors per support size above `exhaustive_support`.
    pub samples_per_support: usize,
    pub seed: u64,
}

impl Default for SigmaOracleSpec {
    fn default() -> Self {
        SigmaOracleSpec {
            window: 12,
            exhaustive_support: 2,
            max_support: 8,
            samples_per_support: 200,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaMismatch {
    pub engine: String,
    pub weight: String,
    pub x: String,
    pub lambda: String,
    pub side: Side,
    pub pruned: String,
    pub brute_force: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaOracleStudy {
    pub spec: SigmaOracleSpec,
    pub engines: Vec<String>,
    pub weights: Vec<String>,
    pub vectors: usize,
    pub comparisons: usize,
    pub mismatches: Vec<SigmaMismatch>,
    pub passed: bool,
}

const SIGMA_GRID: [i64; 6] = [1, -1, 2, -2, 3, -3];

fn sigma_vectors(spec: &SigmaOracleSpec) -> Vec<SparseVector<Rational>> {
    let window: Vec<usize> = (1..=spec.window).collect();
    let mut out = Vec::new();
    for k in 1..=spec.exhaustive_support.min(spec.window) {
        for supp in window.iter().copied().combinations(k) {
            for coeffs in (0..k).map(|_| SIGMA_GRID.iter()).multi_cartesian_product() {
                out.push(
                    SparseVector::from_entries(supp.iter().zip(coeffs).map(|(&i, &c)| (i, Rational::from_i64(c)))).expect("distinct"),
                );
            }
        }
    }
    let mut rng = SamplerSpec::with_seed(spec.seed).rng(0x5167);
    for k in spec.exhaustive_support + 1..=spec.max_support.min(spec.window) {
        for _ in 0..spec.samples_per_support {
            let supp = subset_of_size(&mut rng, &window, k);
            let coeffs: Vec<Rational> = supp
                .iter()
                .map(|_| Rational::from_i64(SIGMA_GRID[rng.random_range(0..SIGMA_GRID.len())]))
                .collect();
            out.push(SparseVector::on_set(&supp, &coeffs).expect("aligned"));
        }
    }
    out
}

/// Pruned `σ̃^L`, `σ̃^R` against the unpruned enumerator, for every `m` and every legal greedy set.
pub fn sigma_oracle_study(spec: &SigmaOracleSpec) -> Result<SigmaOracleStudy> {
    let engines: Vec<Box<dyn NormEngine>> = vec![
        Box::new(PartialSumSpace::new(Some(spec.window))),
        Box::new(LpSpace::new(LpExponent::One)),
    ];
    let weights = [WeightSequence::ones(), WeightSequence::harmonic()];
    let vectors = sigma_vectors(spec);
    let mut comparisons = 0;
    let mut mismatches = Vec::new();
    for engine in &engines {
        for w in &weights {
            let per: Vec<(usize, Vec<SigmaMismatch>)> = vectors
                .par_iter()
                .map(|x| -> Result<(usize, Vec<SigmaMismatch>)> {
                    let mut count = 0;
                    let mut bad = Vec::new();
                    for m in 1..=x.support_len() {
                        for lambda in greedy_sets(x, m)? {
                            for side in [Side::Left, Side::Right] {
                                let pruned = sigma_for_set(engine.as_ref(), w, x, &lambda, side, Some(spec.window))?.value;
                                let brute = sigma_brute_force(engine.as_ref(), w, x, &lambda, side, spec.window)?;
                                count += 1;
                                if pruned != brute {
                                    bad.push(SigmaMismatch {
                                        engine: engine.name(),
                                        weight: w.describe(),
                                        x: x.encode(),
                                        lambda: lambda.to_string(),
                                        side,
                                        pruned: pruned.to_string(),
                                        brute_force: brute.to_string(),
                                    });
                                }
                            }
                        }
                    }
                    Ok((count, bad))
                })
                .collect::<Result<_>>()?;
            for (c, b) in per {
                comparisons += c;
                mismatches.extend(b);
            }
        }
    }
    Ok(SigmaOracleStudy {
        spec: spec.clone(),
        engines: engines.iter().map(|e| e.name()).collect(),
        weights: weights.iter().map(WeightSequence::describe).collect(),
        vectors: vectors.len(),
        comparisons,
        passed: mismatches.is_empty(),
        mismatches,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TgaStudySpec {
    /// Supports `[1, k]` with every sign and modulus in `{1, 2}` up to this `k`.
    pub exhaustive_support: usize,
    /// Above `exhaustive_support`, every modulus pattern with one seeded sign pattern.
    pub max_support: usize,
    pub truncation_samples: usize,
    pub window: usize,
    pub seed: u64,
}

impl Default for TgaStudySpec {
    fn default() -> Self {
        TgaStudySpec {
            exhaustive_support: 8,
            max_support: 10,
            truncation_samples: 10_000,
            window: 12,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TgaStudy {
    pub spec: TgaStudySpec,
    pub vectors: usize,
    pub greedy_set_mismatches: Vec<String>,
    pub truncation_engines: Vec<String>,
    pub idempotence_failures: Vec<String>,
    pub contraction_failures: Vec<String>,
    pub passed: bool,
}

/// All `m`-subsets `Λ` of the support with `min_{Λ}|x| >= max_{supp∖Λ}|x|`, by direct filtering.
fn brute_greedy_sets(moduli: &[i64], m: usize) -> Vec<Vec<usize>> {
    (0..moduli.len())
        .combinations(m)
        .filter(|pick| {
            let inside = pick.iter().map(|&j| moduli[j]).min().unwrap_or(i64::MAX);
            let outside = (0..moduli.len()).filter(|j| !pick.contains(j)).map(|j| moduli[j]).max().unwrap_or(i64::MIN);
            inside >= outside
        })
        .map(|pick| pick.into_iter().map(|j| j + 1).collect())
        .collect()
}

fn tga_vectors(spec: &TgaStudySpec) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for k in 1..=spec.exhaustive_support {
        out.extend((0..k).map(|_| [1i64, -1, 2, -2]).multi_cartesian_product());
    }
    let mut rng = SamplerSpec::with_seed(spec.seed).rng(0x76a);
    for k in spec.exhaustive_support + 1..=spec.max_support {
        for moduli in (0..k).map(|_| [1i64, 2]).multi_cartesian_product() {
            out.push(moduli.into_iter().map(|c| if rng.random_bool(0.5) { c } else { -c }).collect());
        }
    }
    out
}

pub fn tga_study(spec: &TgaStudySpec) -> Result<TgaStudy> {
    let vectors = tga_vectors(spec);
    let greedy_set_mismatches: Vec<String> = vectors
        .par_iter()
        .map(|coeffs| -> Result<Vec<String>> {
            let x = SparseVector::from_entries(coeffs.iter().enumerate().map(|(j, &c)| (j + 1, c as f64)))?;
            let moduli: Vec<i64> = coeffs.iter().map(|c| c.abs()).collect();
            let mut bad = Vec::new();
            for m in 0..=coeffs.len() {
                let got: Vec<Vec<usize>> = greedy_sets(&x, m)?.into_iter().map(|s| s.as_slice().to_vec()).collect();
                if got != brute_greedy_sets(&moduli, m) {
                    bad.push(format!("x = {}, m = {}", x.encode(), m));
                }
            }
            Ok(bad)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let engines: Vec<Box<dyn NormEngine>> = vec![
        Box::new(LpSpace::new(LpExponent::One)),
        Box::new(LpSpace::new(LpExponent::Infinity)),
        Box::new(SpreadingFamily::new(3)?),
    ];
    let window = spec.window.min(12);
    let mut rng = SamplerSpec::with_seed(spec.seed).rng(0x7a);
    let pool: Vec<usize> = (1..=window).collect();
    let samples: Vec<(SparseVector<Rational>, Rational)> = (0..spec.truncation_samples)
        .map(|_| {
            let k = rng.random_range(1..=window.min(8));
            let supp = subset_of_size(&mut rng, &pool, k);
            let coeffs: Vec<Rational> = supp.iter().map(|_| random_eighth(&mut rng)).collect();
            let lambda: Rational = num_traits::Signed::abs(&random_eighth::<Rational, _>(&mut rng));
            (SparseVector::on_set(&supp, &coeffs).expect("aligned"), lambda)
        })
        .collect();
    let mut idempotence_failures = Vec::new();
    let mut contraction_failures = Vec::new();
    for (x, lambda) in &samples {
        let t = truncate(x, lambda)?;
        if truncate(&t, lambda)? != t {
            idempotence_failures.push(format!("x = {}, λ = {}", x.encode(), lambda));
        }
        for e in &engines {
            let (nt, nx): (Rational, Rational) = (norm(e.as_ref(), &t)?, norm(e.as_ref(), x)?);
            if nt > nx {
                contraction_failures.push(format!("{}: x = {}, λ = {}", e.name(), x.encode(), lambda));
            }
        }
    }
    Ok(TgaStudy {
        spec: spec.clone(),
        vectors: vectors.len(),
        passed: greedy_set_mismatches.is_empty() && idempotence_failures.is_empty() && contraction_failures.is_empty(),
        greedy_set_mismatches,
        truncation_engines: engines.iter().map(|e| e.name()).collect(),
        idempotence_failures,
        contraction_failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_filter_splits_ties() {
        assert_eq!(brute_greedy_sets(&[1, 2, 2], 1), vec![vec![2], vec![3]]);
        assert_eq!(brute_greedy_sets(&[1, 2, 2], 2), vec![vec![2, 3]]);
        assert_eq!(brute_greedy_sets(&[1, 1], 1), vec![vec![1], vec![2]]);
    }

    #[test]
    fn small_studies_pass() {
        let tga = tga_study(&TgaStudySpec {
            exhaustive_support: 4,
            max_support: 5,
            truncation_samples: 200,
            ..Default::default()
        })
        .unwrap();
        assert!(tga.passed, "{:?}", tga.greedy_set_mismatches);
        let sigma = sigma_oracle_study(&SigmaOracleSpec {
            window: 6,
            exhaustive_support: 1,
            max_support: 4,
            samples_per_support: 10,
            seed: 3,
        })
        .unwrap();
        assert!(sigma.passed);
        assert!(sigma.comparisons > sigma.vectors);
    }
}
