use serde::{Deserialize, Serialize};

use super::{norm, NormEngine};
use crate::constants::search::{finish, search_vectors, Scored};
use crate::error::Result;
use crate::estimate::{BoundKind, ConstantEstimate, ConstantName, Witness};
use crate::sampler::SamplerSpec;
use crate::scalar::Scalar;
use crate::sets::IndexSet;
use crate::vector::SparseVector;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisSearch {
    pub window: usize,
    pub sampler: SamplerSpec,
}

/// `K_b = sup_m ‖P_{[1,m]}‖`. Exactly 1 for 1-unconditional engines; otherwise
/// the best prefix ratio over the sampler stream.
pub fn basis_constant<S: Scalar>(engine: &dyn NormEngine, search: &BasisSearch) -> Result<ConstantEstimate<S>> {
    if engine.is_one_unconditional() {
        return Ok(ConstantEstimate {
            name: ConstantName::Basis,
            weight: "constant:1".into(),
            engine: engine.name(),
            value: S::one(),
            kind: BoundKind::WindowExact,
            witness: Witness::Prefix {
                x: SparseVector::unit(1)?,
                m: 1,
            },
            window: search.window,
            evaluated: 0,
            skipped: 0,
            seed: None,
            budget_exhausted: false,
            best_choice_value: None,
        });
    }
    let found = search_vectors(search.window, &search.sampler, |x| {
        let nx: S = norm(engine, x)?;
        if nx.is_zero() {
            return Ok(None);
        }
        let top = x.max_index().expect("nonzero");
        let mut best: Option<Scored<S>> = None;
        for m in 1..top {
            let r = norm(engine, &x.project(&IndexSet::range(1, m)))? / nx.clone();
            if best.as_ref().is_none_or(|b| r > b.value) {
                best = Some(Scored {
                    value: r,
                    witness: Witness::Prefix { x: x.clone(), m },
                    best_choice: None,
                });
            }
        }
        Ok(best.or(Some(Scored {
            value: S::one(),
            witness: Witness::Prefix { x: x.clone(), m: top },
            best_choice: None,
        })))
    })?;
    Ok(finish(ConstantName::Basis, "constant:1".into(), engine, search.window, &search.sampler, found))
}
