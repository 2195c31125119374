use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::search::top_indices;
use crate::error::{parse_err, Error, Result};
use crate::estimate::{BoundKind, ConstantEstimate, ConstantName, Witness};
use crate::norms::{norm, NormEngine};
use crate::sampler::{hill_climb, random_eighth, subset_of_size, SamplerSpec};
use crate::scalar::Scalar;
use crate::sets::{IndexSet, Sign, SignPattern};
use crate::vector::{signed_indicator, SparseVector};
use crate::weights::{WeightSequence, WeightTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PropertyVariant {
    /// `A`, `B` disjoint.
    Full,
    /// `A < B`
    Left,
    /// `B < A`
    Right,
}

impl PropertyVariant {
    pub fn constant(self) -> ConstantName {
        match self {
            PropertyVariant::Full => ConstantName::PropertyA,
            PropertyVariant::Left => ConstantName::LeftPropertyA,
            PropertyVariant::Right => ConstantName::RightPropertyA,
        }
    }
}

impl std::str::FromStr for PropertyVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(PropertyVariant::Full),
            "left" => Ok(PropertyVariant::Left),
            "right" => Ok(PropertyVariant::Right),
            _ => Err(parse_err("property variant", s, "expected full, left or right")),
        }
    }
}

/// `(x, t, A, B, ε, η)` compared through `‖x + t1_{εA}‖ <= C ‖x + t1_{ηB}‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyTuple<S> {
    pub x: SparseVector<S>,
    pub t: S,
    pub a: IndexSet,
    pub b: IndexSet,
    pub eps: SignPattern,
    pub eta: SignPattern,
}

impl<S: Scalar> PropertyTuple<S> {
    /// Side conditions shared by the three variants, plus the ordering of the variant.
    pub fn validate(&self, variant: PropertyVariant, w: &WeightSequence, window: Option<usize>) -> std::result::Result<(), &'static str> {
        if !self.t.is_positive() {
            return Err("t must be positive");
        }
        if !self.x.max_abs().le_tol(&self.t) {
            return Err("sup |x| exceeds t");
        }
        if !self.a.is_disjoint(&self.b) {
            return Err("A and B intersect");
        }
        let both = self.a.union(&self.b);
        if self.x.iter().any(|(&i, _)| both.contains(i)) {
            return Err("supp x meets A ∪ B");
        }
        let wa: S = self.a.iter().map(|i| w.get::<S>(i)).fold(S::zero(), |p, q| p + q);
        let wb: S = self.b.iter().map(|i| w.get::<S>(i)).fold(S::zero(), |p, q| p + q);
        if !wa.le_tol(&wb) {
            return Err("w(A) exceeds w(B)");
        }
        match variant {
            PropertyVariant::Left if !self.a.precedes(&self.b) => return Err("A < B fails"),
            PropertyVariant::Right if !self.b.precedes(&self.a) => return Err("B < A fails"),
            _ => {}
        }
        if let Some(n) = window {
            let top = [self.x.max_index(), self.a.last(), self.b.last()].into_iter().flatten().max();
            if top.is_some_and(|m| m > n) {
                return Err("tuple leaves the window");
            }
        }
        Ok(())
    }

    pub fn sides(&self) -> Result<(SparseVector<S>, SparseVector<S>)> {
        Ok((
            self.x.add(&signed_indicator(&self.a, &self.eps, &self.t)?),
            self.x.add(&signed_indicator(&self.b, &self.eta, &self.t)?),
        ))
    }

    /// `‖x + t1_{εA}‖ / ‖x + t1_{ηB}‖`; `None` for degenerate tuples (zero
    /// denominator, or `x = 0` with `A = ∅`).
    pub fn ratio(&self, engine: &dyn NormEngine) -> Result<Option<S>> {
        if self.a.is_empty() && self.x.is_zero() {
            return Ok(None);
        }
        let (lhs, rhs) = self.sides()?;
        let den = norm(engine, &rhs)?;
        if den.is_zero() {
            return Ok(None);
        }
        Ok(Some(norm(engine, &lhs)? / den))
    }
}

/// `A = [n+1, 2n]`, `B = {2n+2, 2n+4, …, 4n}`, `x = −Σ e_j` over odd `j ∈ [2n+1, 4n−1]`, `t = 1`.
/// Under the partial-sum norm the left side grows quadratically in `n` while the
/// right side telescopes to `2n`.
pub fn interleaved_tuple<S: Scalar>(n: usize) -> PropertyTuple<S> {
    assert!(n >= 1);
    let a = IndexSet::range(n + 1, 2 * n);
    let b = IndexSet::new((1..=n).map(|k| 2 * n + 2 * k)).expect("positive");
    let x = SparseVector::from_entries((0..n).map(|k| (2 * n + 1 + 2 * k, -S::one()))).expect("distinct");
    PropertyTuple {
        x,
        t: S::one(),
        a,
        b,
        eps: SignPattern::all_plus(),
        eta: SignPattern::all_plus(),
    }
}

pub(crate) fn random_signs<R: Rng>(rng: &mut R, set: &IndexSet) -> SignPattern {
    SignPattern::from_pairs(set.iter().map(|i| (i, if rng.random_bool(0.5) { Sign::Plus } else { Sign::Minus })))
}

pub(crate) fn shed_to_budget<S: Scalar>(mut a: IndexSet, b: &IndexSet, wt: &WeightTable<S>) -> IndexSet {
    while !wt.of(&a).le_tol(&wt.of(b)) {
        let heaviest = a
            .iter()
            .max_by(|&p, &q| wt.get(p).partial_cmp(wt.get(q)).expect("ordered"))
            .expect("nonempty while over budget");
        a = a.difference(&IndexSet::new([heaviest]).expect("positive"));
    }
    a
}

fn random_pair<S: Scalar, R: Rng>(rng: &mut R, variant: PropertyVariant, window: usize, wt: &WeightTable<S>) -> (IndexSet, IndexSet) {
    let all: Vec<usize> = (1..=window).collect();
    let (a, b) = match variant {
        PropertyVariant::Full => {
            let kb = rng.random_range(1..=window.min(5));
            let b = subset_of_size(rng, &all, kb);
            let rest: Vec<usize> = all.iter().copied().filter(|i| !b.contains(*i)).collect();
            let ka = rng.random_range(0..=rest.len().min(5));
            (subset_of_size(rng, &rest, ka), b)
        }
        PropertyVariant::Left | PropertyVariant::Right => {
            let cut = rng.random_range(1..window.max(2));
            let low: Vec<usize> = (1..=cut).collect();
            let high: Vec<usize> = (cut + 1..=window).collect();
            let (a_pool, b_pool) = if variant == PropertyVariant::Left { (low, high) } else { (high, low) };
            let kb = rng.random_range(1..=b_pool.len().clamp(1, 5));
            let ka = rng.random_range(0..=a_pool.len().min(5));
            (subset_of_size(rng, &a_pool, ka), subset_of_size(rng, &b_pool, kb))
        }
    };
    (shed_to_budget(a, &b, wt), b)
}

/// Candidate tuples: structured families, `x = 0` pairs, `x` on the grid
/// `{±1, ±1/2}` with `t = 1`, and random `x` with `t = sup|x|`.
pub fn tuple_candidates<S: Scalar>(
    variant: PropertyVariant,
    w: &WeightSequence,
    window: usize,
    spec: &SamplerSpec,
) -> Vec<PropertyTuple<S>> {
    let wt = w.table::<S>(window);
    let mut out = Vec::new();
    if variant == PropertyVariant::Left {
        out.extend((1..=window / 4).map(interleaved_tuple::<S>));
    }
    let salt = match variant {
        PropertyVariant::Full => 20,
        PropertyVariant::Left => 21,
        PropertyVariant::Right => 22,
    };
    let mut rng = spec.rng(salt);
    let layers = [(spec.sign_vectors, 0u8), (spec.grid, 1), (spec.random, 2)];
    for (count, layer) in layers {
        for _ in 0..count {
            let (a, b) = random_pair(&mut rng, variant, window, &wt);
            let free: Vec<usize> = (1..=window).filter(|i| !a.contains(*i) && !b.contains(*i)).collect();
            let (x, t) = match layer {
                0 => (SparseVector::zero(), S::one()),
                _ if free.is_empty() => (SparseVector::zero(), S::one()),
                1 => {
                    let k = rng.random_range(1..=free.len().min(spec.grid_max_support.max(1)));
                    let supp = subset_of_size(&mut rng, &free, k);
                    let coeffs: Vec<S> = supp
                        .iter()
                        .map(|_| [S::one(), -S::one(), S::ratio(1, 2), S::ratio(-1, 2)][rng.random_range(0..4)].clone())
                        .collect();
                    (SparseVector::on_set(&supp, &coeffs).expect("aligned"), S::one())
                }
                _ => {
                    let k = rng.random_range(1..=free.len().min(spec.max_support.max(1)));
                    let supp = subset_of_size(&mut rng, &free, k);
                    let coeffs: Vec<S> = supp.iter().map(|_| random_eighth(&mut rng)).collect();
                    let x = SparseVector::on_set(&supp, &coeffs).expect("aligned");
                    let t = x.max_abs();
                    (x, t)
                }
            };
            let eps = random_signs(&mut rng, &a);
            let eta = random_signs(&mut rng, &b);
            out.push(PropertyTuple { x, t, a, b, eps, eta });
        }
    }
    out
}

fn tuple_moves<S: Scalar>(p: &PropertyTuple<S>, window: usize) -> Vec<PropertyTuple<S>> {
    let mut out = Vec::new();
    let t = p.t.clone();
    let half = t.clone() * S::ratio(1, 2);
    for (&i, c) in p.x.iter() {
        for v in [-c.clone(), S::zero(), c.clone() * S::ratio(1, 2), t.clone(), -t.clone()] {
            if v != *c {
                let mut q = p.clone();
                q.x = p.x.with_coef(i, v).expect("positive");
                out.push(q);
            }
        }
    }
    for j in 1..=window {
        if p.x.get(j).is_none() && !p.a.contains(j) && !p.b.contains(j) {
            for v in [t.clone(), -t.clone(), half.clone(), -half.clone()] {
                let mut q = p.clone();
                q.x = p.x.with_coef(j, v).expect("positive");
                out.push(q);
            }
        }
    }
    let flip = |s: Sign| if s == Sign::Plus { Sign::Minus } else { Sign::Plus };
    for i in p.a.iter() {
        let mut q = p.clone();
        q.eps.set(i, flip(p.eps.get(i)));
        out.push(q);
        let mut q = p.clone();
        q.a = p.a.difference(&IndexSet::new([i]).expect("positive"));
        out.push(q);
    }
    for i in p.b.iter() {
        let mut q = p.clone();
        q.eta.set(i, flip(p.eta.get(i)));
        out.push(q);
    }
    out
}

fn search<S: Scalar>(
    engine: &dyn NormEngine,
    w: &WeightSequence,
    variant: PropertyVariant,
    window: usize,
    spec: &SamplerSpec,
) -> Result<(PropertyTuple<S>, S, usize, usize)> {
    let cands = tuple_candidates::<S>(variant, w, window, spec);
    let scored: Vec<Option<S>> = cands
        .par_iter()
        .map(|p| match p.validate(variant, w, Some(window)) {
            Ok(()) => p.ratio(engine),
            Err(_) => Ok(None),
        })
        .collect::<Result<_>>()?;
    let skipped = scored.iter().filter(|s| s.is_none()).count();
    let mut evaluated = cands.len() - skipped;
    let top = top_indices(&scored, spec.refine_top.max(1));
    let Some(&first) = top.first() else {
        return Err(Error::EmptyInstanceStream(format!("no admissible {:?} tuples on [1, {}]", variant, window)));
    };
    let mut best = (cands[first].clone(), scored[first].clone().expect("scored"));
    let score = |p: &PropertyTuple<S>| match p.validate(variant, w, Some(window)) {
        Ok(()) => p.ratio(engine).ok().flatten(),
        Err(_) => None,
    };
    for k in top {
        let (p, v, n) = hill_climb(cands[k].clone(), scored[k].clone().expect("scored"), spec.refine_rounds, score, |p| {
            tuple_moves(p, window)
        });
        evaluated += n;
        if v > best.1 {
            best = (p, v);
        }
    }
    Ok((best.0, best.1, evaluated, skipped))
}

/// Lower bound for `C_a`, `C_la` or `C_ra` from the best tuple found.
/// The full variant also runs the one-sided searches, so its value dominates theirs.
pub fn property_a_lower_bound<S: Scalar>(
    engine: &dyn NormEngine,
    w: &WeightSequence,
    variant: PropertyVariant,
    window: usize,
    spec: &SamplerSpec,
) -> Result<ConstantEstimate<S>> {
    let runs = match variant {
        PropertyVariant::Full => vec![PropertyVariant::Full, PropertyVariant::Left, PropertyVariant::Right],
        v => vec![v],
    };
    let mut best: Option<(PropertyTuple<S>, S)> = None;
    let (mut evaluated, mut skipped) = (0, 0);
    for v in runs {
        let (p, value, e, s) = search(engine, w, v, window, spec)?;
        evaluated += e;
        skipped += s;
        if best.as_ref().is_none_or(|b| value > b.1) {
            best = Some((p, value));
        }
    }
    let (tuple, value) = best.expect("at least one run");
    Ok(ConstantEstimate {
        name: variant.constant(),
        weight: w.describe(),
        engine: engine.name(),
        value,
        kind: BoundKind::WitnessLowerBound,
        witness: Witness::Tuple(tuple),
        window,
        evaluated,
        skipped,
        seed: Some(spec.seed),
        budget_exhausted: true,
        best_choice_value: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::{LpExponent, LpSpace, PartialSumSpace};
    use crate::scalar::{parse_rational, Rational};

    #[test]
    fn interleaved_family_ratios() {
        let ps = PartialSumSpace::default();
        let w = WeightSequence::ones();
        for (n, r) in [(4, "7/4"), (6, "5/2"), (8, "13/4")] {
            let p = interleaved_tuple::<Rational>(n);
            assert!(p.validate(PropertyVariant::Left, &w, None).is_ok());
            assert_eq!(p.ratio(&ps).unwrap().unwrap(), parse_rational(r).unwrap());
        }
    }

    #[test]
    fn validation_rejects_overlap_and_order() {
        let w = WeightSequence::ones();
        let mut p = interleaved_tuple::<Rational>(2);
        p.x = p.x.with_coef(3, Rational::from_i64(1)).unwrap();
        assert_eq!(p.validate(PropertyVariant::Left, &w, None), Err("supp x meets A ∪ B"));
        let p = interleaved_tuple::<Rational>(2);
        assert_eq!(p.validate(PropertyVariant::Right, &w, None), Err("B < A fails"));
    }

    #[test]
    fn l1_property_a_is_one() {
        let l1 = LpSpace::new(LpExponent::One);
        let w = WeightSequence::ones();
        let spec = SamplerSpec::with_seed(1).scaled(0.1);
        let e: ConstantEstimate<Rational> = property_a_lower_bound(&l1, &w, PropertyVariant::Full, 8, &spec).unwrap();
        assert_eq!(e.value, Rational::from_i64(1));
    }
}
