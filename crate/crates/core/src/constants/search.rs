use rayon::prelude::*;

use super::sigma::sigma_for_set;
use super::Side;
use crate::error::{Error, Result};
use crate::estimate::{BoundKind, ConstantEstimate, ConstantName, Witness};
use crate::norms::{norm, NormEngine};
use crate::sampler::{hill_climb, vector_moves, SamplerSpec};
use crate::scalar::Scalar;
use crate::sets::IndexSet;
use crate::tga::greedy_sets;
use crate::vector::SparseVector;
use crate::weights::WeightSequence;

/// Positions of the `k` largest scores, larger first, earlier position first on ties.
pub fn top_indices<S: Scalar>(scores: &[Option<S>], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).filter(|&i| scores[i].is_some()).collect();
    idx.sort_by(|&i, &j| {
        let (a, b) = (scores[i].as_ref().expect("some"), scores[j].as_ref().expect("some"));
        b.partial_cmp(a).expect("ordered").then(i.cmp(&j))
    });
    idx.truncate(k);
    idx
}

/// Ratio attained at one vector together with the configuration that attains it.
#[derive(Debug, Clone)]
pub struct Scored<S> {
    pub value: S,
    pub witness: Witness<S>,
    pub best_choice: Option<S>,
}

pub struct VectorSearch<S> {
    pub best: Scored<S>,
    pub evaluated: usize,
    pub skipped: usize,
}

/// Scans the sampler stream, then hill-climbs from the best few vectors.
pub fn search_vectors<S, F>(window: usize, spec: &SamplerSpec, score: F) -> Result<VectorSearch<S>>
where
    S: Scalar,
    F: Fn(&SparseVector<S>) -> Result<Option<Scored<S>>> + Sync,
{
    let cands = spec.vectors::<S>(window);
    let scored: Vec<Option<Scored<S>>> = cands.par_iter().map(&score).collect::<Result<_>>()?;
    let values: Vec<Option<S>> = scored.iter().map(|s| s.as_ref().map(|s| s.value.clone())).collect();
    let skipped = values.iter().filter(|v| v.is_none()).count();
    let mut evaluated = cands.len() - skipped;
    let top = top_indices(&values, spec.refine_top.max(1));
    let Some(&first) = top.first() else {
        return Err(Error::EmptyInstanceStream(format!("no admissible vectors on [1, {}]", window)));
    };
    let mut best = scored[first].clone().expect("scored");
    for k in top {
        let quick = |x: &SparseVector<S>| score(x).ok().flatten().map(|s| s.value);
        let (x, v, n) = hill_climb(cands[k].clone(), values[k].clone().expect("scored"), spec.refine_rounds, quick, |x| {
            vector_moves(x, window)
        });
        evaluated += n;
        if v > best.value {
            best = score(&x)?.expect("climb only visits scored vectors");
        }
    }
    Ok(VectorSearch {
        best,
        evaluated,
        skipped,
    })
}

/// Worst and best ratio over the legal greedy sets of size `m`, keeping the
/// argmax of the worst.
fn over_choices<S: Scalar>(
    x: &SparseVector<S>,
    m: usize,
    mut ratio: impl FnMut(&IndexSet) -> Result<Option<S>>,
) -> Result<Option<(S, IndexSet, S)>> {
    let mut worst: Option<(S, IndexSet)> = None;
    let mut best: Option<S> = None;
    for lambda in greedy_sets(x, m)? {
        let Some(r) = ratio(&lambda)? else { continue };
        if best.as_ref().is_none_or(|b| r < *b) {
            best = Some(r.clone());
        }
        if worst.as_ref().is_none_or(|(w, _)| r > *w) {
            worst = Some((r, lambda));
        }
    }
    Ok(worst.map(|(w, l)| (w, l, best.expect("set with worst"))))
}

fn keep_max<S: Scalar>(acc: &mut Option<Scored<S>>, cand: Scored<S>) {
    if acc.as_ref().is_none_or(|a| cand.value > a.value) {
        *acc = Some(cand);
    }
}

pub fn quasi_greedy_ratio<S: Scalar>(engine: &dyn NormEngine, x: &SparseVector<S>) -> Result<Option<(S, IndexSet, S)>> {
    let nx = norm(engine, x)?;
    if nx.is_zero() {
        return Ok(None);
    }
    let mut out: Option<(S, IndexSet, S)> = None;
    for m in 1..=x.support_len() {
        if let Some(r) = over_choices(x, m, |l| Ok(Some(norm(engine, &x.project(l))? / nx.clone())))? {
            if out.as_ref().is_none_or(|o| r.0 > o.0) {
                out = Some(r);
            }
        }
    }
    Ok(out)
}

/// Lower bound for `C_q = sup ‖G_m(x)‖/‖x‖`, maximizing over tie-breaking choices.
pub fn quasi_greedy_lower_bound<S: Scalar>(
    engine: &dyn NormEngine,
    window: usize,
    spec: &SamplerSpec,
) -> Result<ConstantEstimate<S>> {
    let found = search_vectors(window, spec, |x| {
        Ok(quasi_greedy_ratio(engine, x)?.map(|(value, lambda, best)| Scored {
            value,
            witness: Witness::Greedy { x: x.clone(), lambda },
            best_choice: Some(best),
        }))
    })?;
    Ok(finish(ConstantName::QuasiGreedy, "constant:1".into(), engine, window, spec, found))
}

pub fn partially_greedy_ratio<S: Scalar>(
    engine: &dyn NormEngine,
    w: &WeightSequence,
    x: &SparseVector<S>,
    side: Side,
    window: usize,
) -> Result<Option<Scored<S>>> {
    let mut out: Option<Scored<S>> = None;
    // m = |supp x| leaves no residual.
    for m in 1..x.support_len() {
        let r = over_choices(x, m, |l| {
            let sig = sigma_for_set(engine, w, x, l, side, Some(window))?;
            if sig.value.is_zero() {
                return Err(Error::Invariant("σ̃ vanished for a nonzero residual".into()));
            }
            Ok(Some(norm(engine, &x.project_complement(l))? / sig.value))
        })?;
        if let Some((value, lambda, best)) = r {
            keep_max(
                &mut out,
                Scored {
                    value,
                    witness: Witness::PartiallyGreedy {
                        x: x.clone(),
                        lambda,
                        side,
                    },
                    best_choice: Some(best),
                },
            );
        }
    }
    Ok(out)
}

/// Lower bound for `C_p` (left) or `C_rp` (right).
pub fn partially_greedy_lower_bound<S: Scalar>(
    engine: &dyn NormEngine,
    w: &WeightSequence,
    side: Side,
    window: usize,
    spec: &SamplerSpec,
) -> Result<ConstantEstimate<S>> {
    let found = search_vectors(window, spec, |x| partially_greedy_ratio(engine, w, x, side, window))?;
    let name = match side {
        Side::Left => ConstantName::PartiallyGreedy,
        Side::Right => ConstantName::ReversePartiallyGreedy,
    };
    Ok(finish(name, w.describe(), engine, window, spec, found))
}

pub fn finish<S: Scalar>(
    name: ConstantName,
    weight: String,
    engine: &dyn NormEngine,
    window: usize,
    spec: &SamplerSpec,
    found: VectorSearch<S>,
) -> ConstantEstimate<S> {
    ConstantEstimate {
        name,
        weight,
        engine: engine.name(),
        value: found.best.value,
        kind: BoundKind::WitnessLowerBound,
        witness: found.best.witness,
        window,
        evaluated: found.evaluated,
        skipped: found.skipped,
        seed: Some(spec.seed),
        budget_exhausted: true,
        best_choice_value: found.best.best_choice,
    }
}
