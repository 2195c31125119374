//! Estimators for the constants attached to a basis: set-pair constants are
//! exhausted on small windows, x-quantified ones are bounded from below by search.

mod property_a;
pub mod search;
mod set_pair;
mod sigma;

use serde::{Deserialize, Serialize};

pub(crate) use property_a::random_signs;
pub use property_a::{interleaved_tuple, property_a_lower_bound, tuple_candidates, PropertyTuple, PropertyVariant};
pub use search::{partially_greedy_lower_bound, partially_greedy_ratio, quasi_greedy_lower_bound, quasi_greedy_ratio};
pub use set_pair::{set_pair_constant, set_pair_shape, SetPairOptions, SetRelation};
pub use sigma::{sigma, sigma_brute_force, sigma_for_set, SigmaOutcome};

use crate::error::{parse_err, Error, Result};
use crate::estimate::{ConstantEstimate, ConstantName, Witness};
use crate::norms::{basis_constant, effective_window, norm, BasisSearch, NormEngine};
use crate::sampler::SamplerSpec;
use crate::scalar::Scalar;
use crate::sets::IndexSet;
use crate::tga::is_greedy_set;
use crate::vector::indicator;
use crate::weights::WeightSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" | "L" => Ok(Side::Left),
            "right" | "R" => Ok(Side::Right),
            _ => Err(parse_err("side", s, "expected left or right")),
        }
    }
}

/// Window used when neither the engine nor the caller fixes one.
pub const DEFAULT_WINDOW: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimateOptions {
    pub window: Option<usize>,
    /// Window for the x-quantified searches, which cost far more per index than set pairs.
    pub search_window: Option<usize>,
    pub sampler: SamplerSpec,
    pub set_pairs: SetPairOptions,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            window: None,
            search_window: Some(10),
            sampler: SamplerSpec::default(),
            set_pairs: SetPairOptions::default(),
        }
    }
}

impl EstimateOptions {
    pub fn search_window(&self, engine: &dyn NormEngine) -> usize {
        let base = effective_window(engine, self.window).unwrap_or(DEFAULT_WINDOW);
        self.search_window.map_or(base, |s| s.min(base))
    }
}

/// Estimate one named constant. Unweighted constants ignore `w`.
pub fn estimate<S: Scalar>(
    name: ConstantName,
    engine: &dyn NormEngine,
    w: &WeightSequence,
    opts: &EstimateOptions,
) -> Result<ConstantEstimate<S>> {
    let unit = WeightSequence::ones();
    let w = if name.uses_weight() { w } else { &unit };
    if let Some((relation, weighted)) = set_pair_shape(name) {
        let weight = if weighted { w } else { &unit };
        let window = effective_window(engine, opts.window).unwrap_or(DEFAULT_WINDOW);
        return set_pair_constant(name, engine, weight, relation, window, &opts.set_pairs);
    }
    let window = opts.search_window(engine);
    let spec = &opts.sampler;
    match name {
        ConstantName::QuasiGreedy => quasi_greedy_lower_bound(engine, window, spec),
        ConstantName::PartiallyGreedy => partially_greedy_lower_bound(engine, w, Side::Left, window, spec),
        ConstantName::ReversePartiallyGreedy => partially_greedy_lower_bound(engine, w, Side::Right, window, spec),
        ConstantName::PropertyA => property_a_lower_bound(engine, w, PropertyVariant::Full, window, spec),
        ConstantName::LeftPropertyA => property_a_lower_bound(engine, w, PropertyVariant::Left, window, spec),
        ConstantName::RightPropertyA => property_a_lower_bound(engine, w, PropertyVariant::Right, window, spec),
        ConstantName::Basis => basis_constant(
            engine,
            &BasisSearch {
                window,
                sampler: spec.clone(),
            },
        ),
        _ => unreachable!("set-pair constants handled above"),
    }
}

/// Recomputes the ratio a witness certifies, checking its side conditions on the way.
pub fn replay<S: Scalar>(
    estimate: &ConstantEstimate<S>,
    engine: &dyn NormEngine,
    w: &WeightSequence,
) -> Result<S> {
    let unit = WeightSequence::ones();
    let w = if estimate.name.uses_weight() { w } else { &unit };
    let bad = |why: &str| Error::Invariant(format!("witness for {} is not admissible: {}", estimate.name, why));
    match &estimate.witness {
        Witness::SetPair { a, b } => {
            let (relation, _) = set_pair_shape(estimate.name)
                .unwrap_or((SetRelation::Disjoint, false));
            if estimate.name.is_set_pair() && !relation.holds(a, b) {
                return Err(bad("set relation fails"));
            }
            let wa: S = a.iter().map(|i| w.get::<S>(i)).fold(S::zero(), |p, q| p + q);
            let wb: S = b.iter().map(|i| w.get::<S>(i)).fold(S::zero(), |p, q| p + q);
            if !wa.le_tol(&wb) {
                return Err(bad("w(A) exceeds w(B)"));
            }
            Ok(norm(engine, &indicator::<S>(a))? / norm(engine, &indicator::<S>(b))?)
        }
        Witness::Tuple(t) => {
            let variant = match estimate.name {
                ConstantName::LeftPropertyA => PropertyVariant::Left,
                ConstantName::RightPropertyA => PropertyVariant::Right,
                _ => PropertyVariant::Full,
            };
            t.validate(variant, w, Some(estimate.window)).map_err(bad)?;
            t.ratio(engine)?.ok_or_else(|| bad("degenerate tuple"))
        }
        Witness::Greedy { x, lambda } => {
            if !is_greedy_set(x, lambda) {
                return Err(bad("Λ is not a greedy set"));
            }
            Ok(norm(engine, &x.project(lambda))? / norm(engine, x)?)
        }
        Witness::PartiallyGreedy { x, lambda, side } => {
            if !is_greedy_set(x, lambda) {
                return Err(bad("Λ is not a greedy set"));
            }
            let sig = sigma_for_set(engine, w, x, lambda, *side, Some(estimate.window))?;
            Ok(norm(engine, &x.project_complement(lambda))? / sig.value)
        }
        Witness::Prefix { x, m } => Ok(norm(engine, &x.project(&IndexSet::range(1, *m)))? / norm(engine, x)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::{LpExponent, LpSpace, PartialSumSpace, SpreadingFamily};
    use crate::scalar::Rational;

    fn quick() -> EstimateOptions {
        EstimateOptions {
            window: Some(6),
            search_window: Some(6),
            sampler: SamplerSpec::with_seed(5).scaled(0.1),
            set_pairs: SetPairOptions::default(),
        }
    }

    #[test]
    fn every_constant_replays_to_its_value() {
        let engines: Vec<Box<dyn NormEngine>> = vec![
            Box::new(SpreadingFamily::new(3).unwrap()),
            Box::new(PartialSumSpace::new(Some(6))),
            Box::new(LpSpace::new(LpExponent::One)),
        ];
        let w = WeightSequence::parse("alternating_half").unwrap();
        for e in &engines {
            for name in ConstantName::ALL {
                let est: ConstantEstimate<Rational> = estimate(name, e.as_ref(), &w, &quick()).unwrap();
                assert_eq!(replay(&est, e.as_ref(), &w).unwrap(), est.value, "{} on {}", name, e.name());
            }
        }
    }

    #[test]
    fn unconditional_spaces_have_trivial_greedy_constants() {
        let l1 = LpSpace::new(LpExponent::One);
        let est: ConstantEstimate<Rational> =
            estimate(ConstantName::QuasiGreedy, &l1, &WeightSequence::ones(), &quick()).unwrap();
        assert_eq!(est.value, Rational::from_i64(1));
    }
}
