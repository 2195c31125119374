//! Instance streams for the claim templates: proposal, side-condition checks,
//! and evaluation of the two sides of each inequality.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::claims::{Anchor, Budget, Template};
use crate::constants::{random_signs, sigma_for_set, PropertyTuple, PropertyVariant, Side};
use crate::error::{parse_err, Result};
use crate::norms::{norm, NormEngine};
use crate::sampler::{random_eighth, subset_of_size, SamplerSpec};
use crate::scalar::Scalar;
use crate::sets::{IndexSet, SignPattern};
use crate::tga::{greedy_sets, is_greedy_set, truncate};
use crate::vector::{indicator, signed_indicator, SparseVector};
use crate::weights::{WeightProfile, WeightSequence, WeightTable};

#[derive(Debug, Clone, PartialEq)]
pub enum Instance<S> {
    Vector { x: SparseVector<S> },
    Greedy { x: SparseVector<S>, lambda: IndexSet },
    Residual { x: SparseVector<S>, lambda: IndexSet, a: IndexSet },
    Reformulation { x: SparseVector<S>, a: IndexSet, b: IndexSet, eta: SignPattern },
    Truncation { x: SparseVector<S>, level: S },
    Tuple(PropertyTuple<S>),
    Signed { a: IndexSet, eps: SignPattern, anchor: IndexSet },
    SetPair { a: IndexSet, b: IndexSet },
}

/// Text form of an [`Instance`], for reports and replay.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct InstanceRecord {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub a: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub b: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub eps: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub eta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub anchor: Option<String>,
}

impl<S: Scalar> Instance<S> {
    pub fn record(&self) -> InstanceRecord {
        let s = |v: &dyn std::fmt::Display| Some(v.to_string());
        match self {
            Instance::Vector { x } => InstanceRecord {
                kind: "vector".into(),
                x: Some(x.encode()),
                ..Default::default()
            },
            Instance::Greedy { x, lambda } => InstanceRecord {
                kind: "greedy".into(),
                x: Some(x.encode()),
                lambda: s(lambda),
                ..Default::default()
            },
            Instance::Residual { x, lambda, a } => InstanceRecord {
                kind: "residual".into(),
                x: Some(x.encode()),
                lambda: s(lambda),
                a: s(a),
                ..Default::default()
            },
            Instance::Reformulation { x, a, b, eta } => InstanceRecord {
                kind: "reformulation".into(),
                x: Some(x.encode()),
                a: s(a),
                b: s(b),
                eta: Some(eta.render_on(b)),
                ..Default::default()
            },
            Instance::Truncation { x, level } => InstanceRecord {
                kind: "truncation".into(),
                x: Some(x.encode()),
                t: Some(level.encode()),
                ..Default::default()
            },
            Instance::Tuple(p) => InstanceRecord {
                kind: "tuple".into(),
                x: Some(p.x.encode()),
                a: s(&p.a),
                b: s(&p.b),
                t: Some(p.t.encode()),
                eps: Some(p.eps.render_on(&p.a)),
                eta: Some(p.eta.render_on(&p.b)),
                ..Default::default()
            },
            Instance::Signed { a, eps, anchor } => InstanceRecord {
                kind: "signed".into(),
                a: s(a),
                eps: Some(eps.render_on(a)),
                anchor: s(anchor),
                ..Default::default()
            },
            Instance::SetPair { a, b } => InstanceRecord {
                kind: "set-pair".into(),
                a: s(a),
                b: s(b),
                ..Default::default()
            },
        }
    }
}

impl InstanceRecord {
    pub fn to_instance<S: Scalar>(&self) -> Result<Instance<S>> {
        let need = |o: &Option<String>, f: &'static str| {
            o.clone().ok_or_else(|| parse_err("instance", &self.kind, format!("missing field `{}`", f)))
        };
        let set = |o: &Option<String>, f: &'static str| -> Result<IndexSet> { need(o, f)?.parse() };
        let vec = || -> Result<SparseVector<S>> { need(&self.x, "x")?.parse() };
        Ok(match self.kind.as_str() {
            "vector" => Instance::Vector { x: vec()? },
            "greedy" => Instance::Greedy {
                x: vec()?,
                lambda: set(&self.lambda, "lambda")?,
            },
            "residual" => Instance::Residual {
                x: vec()?,
                lambda: set(&self.lambda, "lambda")?,
                a: set(&self.a, "a")?,
            },
            "reformulation" => {
                let b = set(&self.b, "b")?;
                Instance::Reformulation {
                    x: vec()?,
                    a: set(&self.a, "a")?,
                    eta: SignPattern::parse_on(&b, &need(&self.eta, "eta")?)?,
                    b,
                }
            }
            "truncation" => Instance::Truncation {
                x: vec()?,
                level: S::decode(&need(&self.t, "t")?)?,
            },
            "tuple" => {
                let a = set(&self.a, "a")?;
                let b = set(&self.b, "b")?;
                Instance::Tuple(PropertyTuple {
                    x: vec()?,
                    t: S::decode(&need(&self.t, "t")?)?,
                    eps: SignPattern::parse_on(&a, &need(&self.eps, "eps")?)?,
                    eta: SignPattern::parse_on(&b, &need(&self.eta, "eta")?)?,
                    a,
                    b,
                })
            }
            "signed" => {
                let a = set(&self.a, "a")?;
                Instance::Signed {
                    eps: SignPattern::parse_on(&a, &need(&self.eps, "eps")?)?,
                    anchor: set(&self.anchor, "anchor")?,
                    a,
                }
            }
            "set-pair" => Instance::SetPair {
                a: set(&self.a, "a")?,
                b: set(&self.b, "b")?,
            },
            other => return Err(parse_err("instance", other, "unknown instance kind")),
        })
    }
}

/// Window, weights and their asymptotics, shared by proposal and validation.
pub struct Context<'a, S> {
    pub window: usize,
    pub w: &'a WeightSequence,
    pub table: WeightTable<S>,
    pub profile: WeightProfile,
}

impl<'a, S: Scalar> Context<'a, S> {
    pub fn new(w: &'a WeightSequence, window: usize) -> Self {
        Context {
            window,
            w,
            table: w.table(window),
            profile: w.profile(),
        }
    }

    fn weight(&self, set: &IndexSet) -> S {
        self.table.of(set)
    }

    fn limsup(&self) -> Option<S> {
        self.profile.limsup.as_ref().map(S::from_rational)
    }
}

type Check = std::result::Result<(), &'static str>;

fn require(ok: bool, why: &'static str) -> Check {
    if ok {
        Ok(())
    } else {
        Err(why)
    }
}

fn in_window(window: usize, sets: &[&IndexSet]) -> Check {
    require(sets.iter().all(|s| s.last().is_none_or(|m| m <= window)), "instance leaves the window")
}

/// Side conditions of `template` on `inst`; the reason string is tallied on rejection.
pub fn validate<S: Scalar>(template: Template, inst: &Instance<S>, ctx: &Context<'_, S>) -> Check {
    let n = ctx.window;
    match (template, inst) {
        (Template::CoefficientSpread, Instance::Vector { x }) | (Template::Truncation, Instance::Vector { x }) => {
            require(!x.is_zero(), "x = 0")?;
            in_window(n, &[&x.support()])
        }
        (Template::Truncation, Instance::Truncation { x, level }) => {
            require(level.is_positive(), "λ must be positive")?;
            in_window(n, &[&x.support()])
        }
        (Template::GreedyThreshold, Instance::Greedy { x, lambda })
        | (Template::ResidualVsSigma { .. }, Instance::Greedy { x, lambda }) => {
            require(!lambda.is_empty(), "m = 0")?;
            require(is_greedy_set(x, lambda), "Λ is not a greedy set")?;
            in_window(n, &[&x.support()])
        }
        (Template::ResidualVsProjection { side }, Instance::Residual { x, lambda, a }) => {
            require(!lambda.is_empty(), "m = 0")?;
            require(is_greedy_set(x, lambda), "Λ is not a greedy set")?;
            let ok = match side {
                Side::Left => a.precedes(lambda),
                Side::Right => lambda.precedes(a),
            };
            require(ok, "A is not beyond Λ on the required side")?;
            require(ctx.weight(a).le_tol(&ctx.weight(lambda)), "w(A) exceeds w(Λ)")?;
            in_window(n, &[&x.support(), a])
        }
        (Template::Reformulation, Instance::Reformulation { x, a, b, .. }) => {
            require(x.max_abs().le_tol(&S::one()), "sup |x| exceeds 1")?;
            require(a.precedes(b), "A < B fails")?;
            require(ctx.weight(a).le_tol(&ctx.weight(b)), "w(A) exceeds w(B)")?;
            require(x.support().is_disjoint(b), "supp x meets B")?;
            in_window(n, &[&x.support(), a, b])
        }
        (Template::PropertyA { order, budget }, Instance::Tuple(p)) => {
            let unit = WeightSequence::ones();
            let w = if budget == Budget::Weighted { ctx.w } else { &unit };
            p.validate(order, w, Some(n))?;
            if budget == Budget::EqualCardinality {
                require(p.a.len() == p.b.len(), "|A| differs from |B|")?;
            }
            Ok(())
        }
        (Template::SignedIndicator { anchor }, Instance::Signed { a, anchor: d, .. }) => {
            in_window(n, &[a, d])?;
            let wa = ctx.weight(a);
            match anchor {
                Anchor::PairAbove => {
                    require(d.len() == 2 && a.precedes(d), "needs n_1 > n_0 > A")?;
                    require(wa < ctx.weight(d), "w(A) >= w_{n_0} + w_{n_1}")?;
                    require(ctx.limsup().is_none_or(|l| wa.le_tol(&l)), "w(A) exceeds limsup w")
                }
                Anchor::HeavierAbove => {
                    require(d.len() == 1 && a.precedes(d), "needs n > A")?;
                    require(wa.le_tol(&ctx.weight(d)), "w(A) exceeds w_n")
                }
                Anchor::LighterBelow => {
                    require(d.as_slice() == [1] && d.precedes(a), "needs 1 < A")?;
                    require(wa.le_tol(&ctx.weight(d)), "w(A) exceeds w_1")
                }
                Anchor::SparseTail => {
                    require(!a.is_empty(), "A = ∅")?;
                    require(a.precedes(d) && d.len() >= a.len(), "needs D > A with |D| >= |A|")?;
                    require(!d.contains(1), "D contains 1")?;
                    let w1 = ctx.weight(&IndexSet::range(1, 1));
                    require(ctx.weight(d).le_tol(&w1), "w(D) exceeds w_1")
                }
            }
        }
        (Template::SetPair, Instance::SetPair { a, b }) => {
            require(ctx.weight(a).le_tol(&ctx.weight(b)), "w(A) exceeds w(B)")?;
            in_window(n, &[a, b])
        }
        _ => Err("instance kind does not fit the template"),
    }
}

/// `(left, right)` of the inequality at `inst`.
pub fn sides<S: Scalar>(
    template: Template,
    inst: &Instance<S>,
    engine: &dyn NormEngine,
    w: &WeightSequence,
    window: usize,
) -> Result<(S, S)> {
    let nrm = |v: &SparseVector<S>| norm(engine, v);
    Ok(match inst {
        Instance::Vector { x } => match template {
            Template::Truncation => unreachable!("truncation instances carry their level"),
            _ => (nrm(x)?, x.max_abs() * nrm(&indicator(&x.support()))?),
        },
        Instance::Greedy { x, lambda } => match template {
            Template::ResidualVsSigma { side } => {
                let sig = sigma_for_set(engine, w, x, lambda, side, Some(window))?;
                (nrm(&x.project_complement(lambda))?, sig.value)
            }
            _ => {
                let low = lambda
                    .iter()
                    .map(|i| x.coef(i).abs())
                    .min_by(|p, q| p.approx_cmp(q))
                    .expect("Λ nonempty");
                (low * nrm(&indicator(lambda))?, nrm(x)?)
            }
        },
        Instance::Residual { x, lambda, a } => (nrm(&x.project_complement(lambda))?, nrm(&x.project_complement(a))?),
        Instance::Reformulation { x, a, b, eta } => {
            let rhs = x.project_complement(a).add(&signed_indicator(b, eta, &S::one())?);
            (nrm(x)?, nrm(&rhs)?)
        }
        Instance::Truncation { x, level } => (nrm(&truncate(x, level)?)?, nrm(x)?),
        Instance::Tuple(p) => {
            let (l, r) = p.sides()?;
            (nrm(&l)?, nrm(&r)?)
        }
        Instance::Signed { a, eps, anchor } => {
            let left = nrm(&signed_indicator(a, eps, &S::one())?)?;
            let right = match template {
                Template::SignedIndicator {
                    anchor: Anchor::HeavierAbove | Anchor::LighterBelow,
                } => nrm(&indicator(anchor))?,
                _ => S::one(),
            };
            (left, right)
        }
        Instance::SetPair { a, b } => (nrm(&indicator(a))?, nrm(&indicator(b))?),
    })
}

fn grid_coef<S: Scalar>(rng: &mut ChaCha8Rng) -> S {
    if rng.random_bool(0.7) {
        let v = [S::one(), S::from_i64(2), S::from_i64(3), S::ratio(1, 2)][rng.random_range(0..4)].clone();
        if rng.random_bool(0.5) {
            v
        } else {
            -v
        }
    } else {
        random_eighth(rng)
    }
}

fn random_vector<S: Scalar>(rng: &mut ChaCha8Rng, pool: &[usize], max_support: usize) -> SparseVector<S> {
    if pool.is_empty() {
        return SparseVector::zero();
    }
    let k = rng.random_range(1..=pool.len().min(max_support.max(1)));
    let supp = subset_of_size(rng, pool, k);
    let coeffs: Vec<S> = supp.iter().map(|_| grid_coef(rng)).collect();
    SparseVector::on_set(&supp, &coeffs).expect("aligned")
}

/// Adds pool elements in random order while `w(A)` stays within `budget`.
fn fill_to_budget<S: Scalar>(rng: &mut ChaCha8Rng, pool: &[usize], budget: &S, ctx: &Context<'_, S>, max: usize) -> IndexSet {
    let mut order = pool.to_vec();
    order.shuffle(rng);
    let target = rng.random_range(0..=order.len().min(max));
    let mut picked = Vec::new();
    let mut total = S::zero();
    for i in order {
        if picked.len() == target {
            break;
        }
        let next = total.clone() + ctx.table.get(i).clone();
        if next.le_tol(budget) {
            total = next;
            picked.push(i);
        }
    }
    IndexSet::new(picked).expect("distinct")
}

fn range(lo: usize, hi: usize) -> Vec<usize> {
    (lo..=hi).collect()
}

const MAX_SET: usize = 6;

/// One round of candidate instances; several for greedy templates, one per tie choice.
pub fn propose<S: Scalar>(template: Template, rng: &mut ChaCha8Rng, ctx: &Context<'_, S>, spec: &SamplerSpec) -> Vec<Instance<S>> {
    let n = ctx.window;
    let all = range(1, n);
    let vec_support = spec.max_support;
    match template {
        Template::CoefficientSpread => vec![Instance::Vector {
            x: random_vector(rng, &all, vec_support),
        }],
        Template::Truncation => {
            let x: SparseVector<S> = random_vector(rng, &all, vec_support);
            let mut levels: Vec<S> = x.iter().map(|(_, c)| c.abs()).collect();
            levels.push(x.max_abs() + S::one());
            levels.push(random_eighth::<S, _>(rng).abs() + S::ratio(1, 8));
            let level = levels[rng.random_range(0..levels.len())].clone();
            let level = if rng.random_bool(0.3) { level * S::ratio(3, 4) } else { level };
            vec![Instance::Truncation { x, level }]
        }
        Template::GreedyThreshold | Template::ResidualVsSigma { .. } => {
            let x: SparseVector<S> = random_vector(rng, &all, vec_support);
            if x.is_zero() {
                return Vec::new();
            }
            let top = match template {
                Template::GreedyThreshold => x.support_len(),
                // m = |supp x| leaves no residual.
                _ => x.support_len().saturating_sub(1),
            };
            if top == 0 {
                return Vec::new();
            }
            let m = rng.random_range(1..=top);
            greedy_sets(&x, m)
                .expect("m within support")
                .into_iter()
                .take(8)
                .map(|lambda| Instance::Greedy { x: x.clone(), lambda })
                .collect()
        }
        Template::ResidualVsProjection { side } => {
            let x: SparseVector<S> = random_vector(rng, &all, vec_support);
            if x.is_zero() {
                return Vec::new();
            }
            let m = rng.random_range(1..=x.support_len());
            let choices = greedy_sets(&x, m).expect("m within support");
            let lambda = choices[rng.random_range(0..choices.len())].clone();
            let pool = match side {
                Side::Left => range(1, lambda.first().expect("nonempty") - 1),
                Side::Right => range(lambda.last().expect("nonempty") + 1, n),
            };
            let a = fill_to_budget(rng, &pool, &ctx.weight(&lambda), ctx, MAX_SET);
            vec![Instance::Residual { x, lambda, a }]
        }
        Template::Reformulation => {
            if n < 2 {
                return Vec::new();
            }
            let cut = rng.random_range(1..n);
            let high = range(cut + 1, n);
            let kb = rng.random_range(1..=high.len().min(MAX_SET));
            let b = subset_of_size(rng, &high, kb);
            let a = fill_to_budget(rng, &range(1, cut), &ctx.weight(&b), ctx, MAX_SET);
            let free: Vec<usize> = all.iter().copied().filter(|i| !b.contains(*i)).collect();
            let x: SparseVector<S> = random_vector(rng, &free, vec_support);
            let top = x.max_abs();
            let x = if top > S::one() { x.scale(&(S::one() / top)) } else { x };
            let eta = random_signs(rng, &b);
            vec![Instance::Reformulation { x, a, b, eta }]
        }
        Template::PropertyA { order, budget } => {
            let (a, b) = tuple_sets(rng, order, budget, ctx);
            let free: Vec<usize> = all.iter().copied().filter(|i| !a.contains(*i) && !b.contains(*i)).collect();
            let x: SparseVector<S> = if rng.random_bool(0.15) {
                SparseVector::zero()
            } else {
                random_vector(rng, &free, vec_support)
            };
            let t = if x.is_zero() {
                S::one()
            } else if rng.random_bool(0.5) {
                x.max_abs()
            } else {
                x.max_abs() * S::ratio(3, 2)
            };
            let eps = random_signs(rng, &a);
            let eta = random_signs(rng, &b);
            vec![Instance::Tuple(PropertyTuple { x, t, a, b, eps, eta })]
        }
        Template::SignedIndicator { anchor } => {
            let (a, anchor_set) = match anchor {
                Anchor::PairAbove => {
                    if n < 3 {
                        return Vec::new();
                    }
                    let n0 = rng.random_range(2..n);
                    let n1 = rng.random_range(n0 + 1..=n);
                    let d = IndexSet::new([n0, n1]).expect("distinct");
                    let mut budget = ctx.weight(&d);
                    if let Some(l) = ctx.limsup() {
                        budget = S::max_of(S::zero(), if l < budget { l } else { budget });
                    }
                    let a = fill_to_budget(rng, &range(1, n0 - 1), &budget, ctx, MAX_SET);
                    (a, d)
                }
                Anchor::HeavierAbove => {
                    if n < 2 {
                        return Vec::new();
                    }
                    let top = rng.random_range(2..=n);
                    let d = IndexSet::new([top]).expect("positive");
                    let a = fill_to_budget(rng, &range(1, top - 1), &ctx.weight(&d), ctx, MAX_SET);
                    (a, d)
                }
                Anchor::LighterBelow => {
                    let d = IndexSet::range(1, 1);
                    let a = fill_to_budget(rng, &range(2, n), &ctx.weight(&d), ctx, MAX_SET);
                    (a, d)
                }
                Anchor::SparseTail => {
                    if n < 3 {
                        return Vec::new();
                    }
                    let cut = rng.random_range(1..n);
                    let k = rng.random_range(1..=cut.min(4));
                    let a = subset_of_size(rng, &range(1, cut), k);
                    let above = a.last().expect("nonempty") + 1;
                    let mut tail = range(above.max(2), n);
                    tail.sort_by(|p, q| ctx.table.get(*p).partial_cmp(ctx.table.get(*q)).expect("ordered").then(p.cmp(q)));
                    tail.truncate(a.len());
                    (a, IndexSet::new(tail).expect("distinct"))
                }
            };
            let eps = random_signs(rng, &a);
            vec![Instance::Signed { a, eps, anchor: anchor_set }]
        }
        Template::SetPair => {
            let kb = rng.random_range(0..=n.min(MAX_SET));
            let b = subset_of_size(rng, &all, kb);
            let a = fill_to_budget(rng, &all, &ctx.weight(&b), ctx, MAX_SET);
            vec![Instance::SetPair { a, b }]
        }
    }
}

fn tuple_sets<S: Scalar>(rng: &mut ChaCha8Rng, order: PropertyVariant, budget: Budget, ctx: &Context<'_, S>) -> (IndexSet, IndexSet) {
    let n = ctx.window;
    let all = range(1, n);
    let (a_pool, b_pool): (Vec<usize>, Vec<usize>) = match order {
        PropertyVariant::Full => {
            let kb = rng.random_range(1..=(n / 2).clamp(1, MAX_SET));
            let b = subset_of_size(rng, &all, kb);
            let rest = all.iter().copied().filter(|i| !b.contains(*i)).collect();
            (rest, b.iter().collect())
        }
        PropertyVariant::Left | PropertyVariant::Right => {
            let cut = rng.random_range(1..n.max(2));
            let (low, high) = (range(1, cut), range(cut + 1, n));
            if order == PropertyVariant::Left {
                (low, high)
            } else {
                (high, low)
            }
        }
    };
    let kb = if order == PropertyVariant::Full {
        b_pool.len()
    } else {
        rng.random_range(1..=b_pool.len().clamp(1, MAX_SET))
    };
    let b = subset_of_size(rng, &b_pool, kb.min(b_pool.len()));
    let a = match budget {
        Budget::Weighted => fill_to_budget(rng, &a_pool, &ctx.weight(&b), ctx, MAX_SET),
        Budget::Cardinality => {
            let k = rng.random_range(0..=b.len().min(a_pool.len()));
            subset_of_size(rng, &a_pool, k)
        }
        Budget::EqualCardinality => {
            let k = b.len().min(a_pool.len());
            let a = subset_of_size(rng, &a_pool, k);
            return (a, subset_of_size(rng, &b.iter().collect::<Vec<_>>(), k));
        }
    };
    (a, b)
}

/// Valid instances with the tally of rejected proposals.
#[derive(Debug, Clone)]
pub struct InstanceBatch<S> {
    pub instances: Vec<Instance<S>>,
    pub proposed: usize,
    pub rejected: BTreeMap<String, usize>,
}

/// Proposes until `samples` instances pass validation or `50·samples` proposals or rounds were made.
/// The result depends only on the arguments.
pub fn generate<S: Scalar>(template: Template, ctx: &Context<'_, S>, samples: usize, spec: &SamplerSpec) -> InstanceBatch<S> {
    let mut rng = spec.rng(0x7e57);
    let mut batch = InstanceBatch {
        instances: Vec::with_capacity(samples),
        proposed: 0,
        rejected: BTreeMap::new(),
    };
    let cap = samples.saturating_mul(50).max(100);
    let mut rounds = 0;
    while batch.instances.len() < samples && batch.proposed < cap && rounds < cap {
        rounds += 1;
        for inst in propose(template, &mut rng, ctx, spec) {
            batch.proposed += 1;
            match validate(template, &inst, ctx) {
                Ok(()) if batch.instances.len() < samples => batch.instances.push(inst),
                Ok(()) => {}
                Err(why) => *batch.rejected.entry(why.to_string()).or_default() += 1,
            }
        }
    }
    batch
}
