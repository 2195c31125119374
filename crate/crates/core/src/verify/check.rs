use std::collections::BTreeMap;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::claims::{Claim, ClaimCase, Template};
use super::coefficient::{ConstantRef, ConstantSet, WeightRef};
use super::instances::{generate, sides, validate, Context, Instance, InstanceBatch, InstanceRecord};
use crate::constants::{estimate, EstimateOptions, SetPairOptions, DEFAULT_WINDOW};
use crate::error::{Error, Result};
use crate::estimate::{ConstantEstimate, EstimateRecord};
use crate::norms::{effective_window, NormEngine, Normalized};
use crate::sampler::SamplerSpec;
use crate::scalar::{ArithmeticMode, Rational, Scalar};
use crate::sets::IndexSet;
use crate::weights::WeightSequence;

/// Violations kept verbatim in a report; the count is always exact.
pub const MAX_VIOLATIONS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub instance: InstanceRecord,
    pub left: String,
    pub right: String,
    /// `left / (coefficient · right)`; absent when the right side vanishes.
    pub slack: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantUse {
    pub symbol: String,
    #[serde(flatten)]
    pub estimate: EstimateRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub claim: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub case: Option<String>,
    pub statement: String,
    pub coefficient_formula: String,
    pub coefficient: String,
    pub coefficient_f64: f64,
    pub engine: String,
    pub weight: String,
    pub mode: ArithmeticMode,
    pub window: usize,
    pub seed: u64,
    pub instances: usize,
    pub proposed: usize,
    pub rejected: BTreeMap<String, usize>,
    pub degenerate: usize,
    pub max_slack: Option<String>,
    pub max_slack_f64: Option<f64>,
    pub max_slack_instance: Option<InstanceRecord>,
    pub violation_count: usize,
    pub violations: Vec<Violation>,
    pub constants: Vec<ConstantUse>,
    /// Some coefficient constant is only a lower bound: a pass is evidence, a violation is still a disproof
    /// of the constant value used.
    pub soundness_caveat: bool,
    pub passed: bool,
    pub notes: Vec<String>,
    /// Per-instance slack in instance order, for CSV export.
    #[serde(skip)]
    pub slacks: Vec<Option<f64>>,
}

pub struct CheckInput<'a, S> {
    pub claim: &'static Claim,
    pub case: &'static ClaimCase,
    pub engine: &'a dyn NormEngine,
    pub w: &'a WeightSequence,
    pub window: usize,
    pub seed: u64,
    pub constants: &'a ConstantSet<S>,
}

fn alpha<S: Scalar>(w: &WeightSequence) -> Option<S> {
    w.profile().alpha().map(|a| S::from_rational(&a))
}

/// Evaluates `left <= coefficient · right` on every valid instance of `batch`.
pub fn check<S: Scalar>(input: &CheckInput<'_, S>, batch: InstanceBatch<S>) -> Result<CheckReport> {
    let CheckInput {
        claim,
        case,
        engine,
        w,
        window,
        ..
    } = *input;
    let coef = case.coefficient.eval(claim.id, input.constants, alpha::<S>(w).as_ref())?;
    if !coef.is_positive() {
        return Err(Error::Invariant(format!("coefficient of {} is not positive", claim.id)));
    }
    let ctx = Context::new(w, window);
    let mut rejected = batch.rejected;
    let mut valid = Vec::with_capacity(batch.instances.len());
    for inst in batch.instances {
        match validate(case.template, &inst, &ctx) {
            Ok(()) => valid.push(inst),
            Err(why) => *rejected.entry(why.to_string()).or_default() += 1,
        }
    }
    if valid.is_empty() {
        return Err(Error::EmptyInstanceStream(claim.id.to_string()));
    }
    let evaluated: Vec<(S, S)> = valid
        .par_iter()
        .map(|inst| sides(case.template, inst, engine, w, window))
        .collect::<Result<_>>()?;

    let mut degenerate = 0;
    let mut violation_count = 0;
    let mut violations = Vec::new();
    let mut best: Option<(S, usize)> = None;
    let mut slacks = Vec::with_capacity(valid.len());
    for (k, (left, right)) in evaluated.iter().enumerate() {
        let bound = coef.clone() * right.clone();
        if right.is_zero() {
            slacks.push(None);
            if left.is_zero() {
                degenerate += 1;
                continue;
            }
            violation_count += 1;
            if violations.len() < MAX_VIOLATIONS {
                violations.push(Violation {
                    instance: valid[k].record(),
                    left: left.encode(),
                    right: right.encode(),
                    slack: None,
                });
            }
            continue;
        }
        let slack = left.clone() / bound.clone();
        slacks.push(Some(slack.to_f64()));
        if !left.le_tol(&bound) {
            violation_count += 1;
            if violations.len() < MAX_VIOLATIONS {
                violations.push(Violation {
                    instance: valid[k].record(),
                    left: left.encode(),
                    right: right.encode(),
                    slack: Some(slack.encode()),
                });
            }
        }
        if best.as_ref().is_none_or(|(b, _)| slack > *b) {
            best = Some((slack, k));
        }
    }

    let mut constants = Vec::new();
    for r in case.coefficient.references() {
        let est = input.constants.get(r).expect("coefficient evaluated, so every constant is present");
        constants.push(ConstantUse {
            symbol: r.to_string(),
            estimate: est.record(),
        });
    }
    let soundness_caveat = case
        .coefficient
        .references()
        .into_iter()
        .any(|r| input.constants.get(r).is_some_and(|e| e.kind == crate::estimate::BoundKind::WitnessLowerBound));

    let mut notes = Vec::new();
    if let Some(n) = claim.note {
        notes.push(n.to_string());
    }
    if claim.id == "T317" {
        notes.push(construction_note(w, window, &valid));
    }
    Ok(CheckReport {
        claim: claim.id.to_string(),
        case: (!case.label.is_empty()).then(|| case.label.to_string()),
        statement: claim.statement.to_string(),
        coefficient_formula: case.coefficient.to_string(),
        coefficient: coef.encode(),
        coefficient_f64: coef.to_f64(),
        engine: engine.name(),
        weight: w.describe(),
        mode: S::MODE,
        window,
        seed: input.seed,
        instances: valid.len(),
        proposed: batch.proposed,
        rejected,
        degenerate,
        max_slack: best.as_ref().map(|(s, _)| s.encode()),
        max_slack_f64: best.as_ref().map(|(s, _)| s.to_f64()),
        max_slack_instance: best.as_ref().map(|(_, k)| valid[*k].record()),
        violation_count,
        passed: violation_count == 0,
        violations,
        constants,
        soundness_caveat,
        notes,
        slacks,
    })
}

/// `F = {n} ∪ E` with `F > A ∪ B ∪ supp x` and `w(E) < w(B) <= w(F)`, built from
/// consecutive indices above everything in use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FConstruction {
    pub e: IndexSet,
    pub n: usize,
}

impl FConstruction {
    pub fn set(&self) -> IndexSet {
        self.e.union(&IndexSet::range(self.n, self.n))
    }
}

pub fn f_construction(w: &WeightSequence, a: &IndexSet, b: &IndexSet, used: &IndexSet, window: usize) -> Result<FConstruction> {
    let start = [a.last(), b.last(), used.last()].into_iter().flatten().max().unwrap_or(0) + 1;
    let target: Rational = b.iter().map(|i| w.exact(i)).sum();
    let mut e = Vec::new();
    let mut total = Rational::from_i64(0);
    for k in start..=window {
        let next = total.clone() + w.exact(k);
        if next >= target {
            return Ok(FConstruction {
                e: IndexSet::new(e).expect("increasing"),
                n: k,
            });
        }
        total = next;
        e.push(k);
    }
    Err(Error::WindowTooSmall {
        window,
        reason: format!("no F above index {} reaches w(B) = {}", start - 1, target),
    })
}

fn construction_note<S: Scalar>(w: &WeightSequence, window: usize, valid: &[Instance<S>]) -> String {
    let limsup = w.profile().limsup;
    let (mut small, mut built, mut exhausted) = (0, 0, 0);
    for inst in valid {
        let Instance::Tuple(p) = inst else { continue };
        let wb: Rational = p.b.iter().map(|i| w.exact(i)).sum();
        if limsup.as_ref().is_some_and(|l| wb <= *l) {
            small += 1;
            continue;
        }
        let used = p.x.support().union(&p.a).union(&p.b);
        match f_construction(w, &p.a, &p.b, &used, window) {
            Ok(_) => built += 1,
            Err(_) => exhausted += 1,
        }
    }
    format!(
        "F construction: {} instances with w(B) <= limsup w, {} with F found in the window, {} with the window exhausted",
        small, built, exhausted
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClaimOptions {
    pub window: Option<usize>,
    pub samples: usize,
    pub seed: u64,
    /// Budget for the constant searches and the instance generator's support sizes.
    pub sampler: SamplerSpec,
    pub set_pairs: SetPairOptions,
}

impl Default for ClaimOptions {
    fn default() -> Self {
        ClaimOptions {
            window: None,
            samples: 1000,
            seed: 0,
            sampler: SamplerSpec::default(),
            set_pairs: SetPairOptions::default(),
        }
    }
}

/// Estimates shared between claims of one run. Entries are keyed by everything
/// the estimate depends on, so a hit returns exactly what a fresh search would.
#[derive(Debug, Default)]
pub struct ConstantCache {
    entries: Mutex<BTreeMap<String, EstimateRecord>>,
}

impl ConstantCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get_or_estimate<S: Scalar>(
        &self,
        r: ConstantRef,
        engine: &dyn NormEngine,
        w: &WeightSequence,
        opts: &EstimateOptions,
    ) -> Result<ConstantEstimate<S>> {
        let key = format!(
            "{}|{}|{}|{}|{}",
            S::MODE.as_str(),
            r.name,
            engine.name(),
            w.describe(),
            serde_json::to_string(opts).expect("options serialize")
        );
        if let Some(hit) = self.entries.lock().expect("cache lock").get(&key) {
            return hit.to_estimate();
        }
        let est = estimate::<S>(r.name, engine, w, opts)?;
        self.entries.lock().expect("cache lock").insert(key, est.record());
        Ok(est)
    }
}

/// Measures the constants a claim's coefficient needs, then checks it on a generated stream.
pub fn run_claim<S: Scalar>(claim: &'static Claim, engine: &dyn NormEngine, w: &WeightSequence, opts: &ClaimOptions) -> Result<CheckReport> {
    run_claim_cached::<S>(claim, engine, w, opts, &ConstantCache::new())
}

pub fn run_claim_cached<S: Scalar>(
    claim: &'static Claim,
    engine: &dyn NormEngine,
    w: &WeightSequence,
    opts: &ClaimOptions,
    cache: &ConstantCache,
) -> Result<CheckReport> {
    let profile = w.profile();
    let case = claim.case_for(&profile).ok_or_else(|| Error::NotApplicable {
        claim: claim.id.to_string(),
        reason: format!(
            "weight {} satisfies none of: {}",
            w.describe(),
            claim.cases.iter().map(|c| c.weights.describe()).collect::<Vec<_>>().join("; ")
        ),
    })?;
    let rescaled;
    let engine: &dyn NormEngine = if case.normalized && !engine.is_normalized() {
        rescaled = Normalized::over(engine);
        &rescaled
    } else {
        engine
    };
    let window = effective_window(engine, opts.window).unwrap_or(DEFAULT_WINDOW);
    let sampler = SamplerSpec {
        seed: opts.seed,
        ..opts.sampler.clone()
    };
    let est_opts = EstimateOptions {
        window: Some(window),
        search_window: Some(window),
        sampler: sampler.clone(),
        set_pairs: SetPairOptions {
            seed: opts.seed,
            ..opts.set_pairs.clone()
        },
    };
    let unit = WeightSequence::ones();
    let mut constants = ConstantSet::default();
    for r in case.coefficient.references() {
        let weight = match r.weight {
            WeightRef::Given => w,
            WeightRef::Unit => &unit,
        };
        let weight = if r.name.uses_weight() { weight } else { &unit };
        constants.insert(r, cache.get_or_estimate::<S>(r, engine, weight, &est_opts)?);
    }
    let ctx = Context::new(w, window);
    let batch = generate(case.template, &ctx, opts.samples, &sampler);
    let mut report = check(
        &CheckInput {
            claim,
            case,
            engine,
            w,
            window,
            seed: opts.seed,
            constants: &constants,
        },
        batch,
    )?;
    if case.normalized && engine.name().starts_with("normalized:") {
        report
            .notes
            .push("the bound assumes ‖e_n‖ = 1, so it is checked on the rescaled basis e_n/‖e_n‖".into());
    }
    Ok(report)
}

/// [`run_claim`] in exact arithmetic when the engine supports it and `mode` asks for it, in `f64` otherwise.
pub fn run_claim_in(mode: ArithmeticMode, claim: &'static Claim, engine: &dyn NormEngine, w: &WeightSequence, opts: &ClaimOptions) -> Result<CheckReport> {
    run_claim_in_cached(mode, claim, engine, w, opts, &ConstantCache::new())
}

pub fn run_claim_in_cached(
    mode: ArithmeticMode,
    claim: &'static Claim,
    engine: &dyn NormEngine,
    w: &WeightSequence,
    opts: &ClaimOptions,
    cache: &ConstantCache,
) -> Result<CheckReport> {
    if mode == ArithmeticMode::Exact && engine.supports_exact() {
        run_claim_cached::<Rational>(claim, engine, w, opts, cache)
    } else {
        run_claim_cached::<f64>(claim, engine, w, opts, cache)
    }
}

/// Recomputes `(left, right)` for a reported instance after re-checking its side conditions.
pub fn replay_instance<S: Scalar>(
    template: Template,
    record: &InstanceRecord,
    engine: &dyn NormEngine,
    w: &WeightSequence,
    window: usize,
) -> Result<(S, S)> {
    let inst: Instance<S> = record.to_instance()?;
    validate(template, &inst, &Context::new(w, window)).map_err(|why| Error::Invariant(format!("replayed instance is not admissible: {}", why)))?;
    sides(template, &inst, engine, w, window)
}

/// A constant stand-in, for checks with caller-chosen constant values.
pub fn fixed_constant<S: Scalar>(r: ConstantRef, value: S, engine: &dyn NormEngine, window: usize) -> ConstantEstimate<S> {
    ConstantEstimate {
        name: r.name,
        weight: "fixed".into(),
        engine: engine.name(),
        value,
        kind: crate::estimate::BoundKind::WitnessLowerBound,
        witness: crate::estimate::Witness::SetPair {
            a: IndexSet::empty(),
            b: IndexSet::empty(),
        },
        window,
        evaluated: 0,
        skipped: 0,
        seed: None,
        budget_exhausted: false,
        best_choice_value: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::ConstantName;
    use crate::norms::{LpExponent, LpSpace, SpreadingFamily};
    use crate::verify::find_claim;

    #[test]
    fn f_construction_spans_the_budget() {
        let w = WeightSequence::parse("alternating_half").unwrap();
        let a: IndexSet = "1,2".parse().unwrap();
        let b: IndexSet = "3,5,6".parse().unwrap();
        let f = f_construction(&w, &a, &b, &IndexSet::range(1, 6), 20).unwrap();
        let wb: Rational = b.iter().map(|i| w.exact(i)).sum();
        let we: Rational = f.e.iter().map(|i| w.exact(i)).sum();
        assert!(we < wb && wb <= we + w.exact(f.n));
        assert!(f.set().first().unwrap() > 6);
        assert!(matches!(f_construction(&w, &a, &b, &IndexSet::range(1, 6), 7), Err(Error::WindowTooSmall { .. })));
    }

    #[test]
    fn undersized_constant_produces_replayable_violations() {
        let claim = find_claim("L1").unwrap();
        let case = &claim.cases[0];
        let engine = SpreadingFamily::new(3).unwrap();
        let w = WeightSequence::ones();
        let mut constants = ConstantSet::default();
        let cq = ConstantRef::unit(ConstantName::QuasiGreedy);
        // 2·C_q = 1/2 is too small for ‖x‖ <= 2C_q·max|x|·‖1_A‖ at x = e_1.
        constants.insert(cq, fixed_constant(cq, Rational::new(1.into(), 4.into()), &engine, 12));
        let ctx = Context::<Rational>::new(&w, 12);
        let batch = generate(case.template, &ctx, 200, &SamplerSpec::with_seed(1));
        let input = CheckInput {
            claim,
            case,
            engine: &engine,
            w: &w,
            window: 12,
            seed: 1,
            constants: &constants,
        };
        let report = check(&input, batch).unwrap();
        assert!(!report.passed && report.violation_count > 0);
        assert!(report.soundness_caveat);
        for v in &report.violations {
            let (l, r): (Rational, Rational) = replay_instance(case.template, &v.instance, &engine, &w, 12).unwrap();
            assert_eq!(l.encode(), v.left);
            assert_eq!(r.encode(), v.right);
        }
    }

    #[test]
    fn truncation_on_sup_norm_has_half_slack() {
        let claim = find_claim("L38").unwrap();
        let opts = ClaimOptions {
            window: Some(8),
            samples: 2000,
            seed: 7,
            sampler: SamplerSpec::with_seed(7).scaled(0.1),
            ..Default::default()
        };
        let r = run_claim::<Rational>(claim, &LpSpace::new(LpExponent::Infinity), &WeightSequence::ones(), &opts).unwrap();
        assert!(r.passed);
        assert_eq!(r.instances, 2000);
        assert!(r.max_slack_f64.unwrap() <= 0.5);
        assert!(r.soundness_caveat);
    }

    #[test]
    fn missing_constants_and_empty_streams_are_errors() {
        let claim = find_claim("T47").unwrap();
        let engine = LpSpace::new(LpExponent::One);
        let w = WeightSequence::parse("alternating_half").unwrap();
        let constants = ConstantSet::<Rational>::default();
        let input = CheckInput {
            claim,
            case: &claim.cases[0],
            engine: &engine,
            w: &w,
            window: 6,
            seed: 0,
            constants: &constants,
        };
        let empty = InstanceBatch {
            instances: Vec::new(),
            proposed: 0,
            rejected: BTreeMap::new(),
        };
        assert!(matches!(check(&input, empty.clone()), Err(Error::MissingConstant { .. })));
        let mut constants = ConstantSet::default();
        let dem = ConstantRef::unit(ConstantName::Democracy);
        constants.insert(dem, fixed_constant(dem, Rational::from_i64(1), &engine, 6));
        let input = CheckInput {
            constants: &constants,
            ..input
        };
        assert!(matches!(check(&input, empty), Err(Error::EmptyInstanceStream(_))));
    }

    #[test]
    fn weight_conditions_gate_claims() {
        let claim = find_claim("P43").unwrap();
        let e = LpSpace::new(LpExponent::One);
        let r = run_claim::<Rational>(claim, &e, &WeightSequence::ones(), &ClaimOptions::default());
        assert!(matches!(r, Err(Error::NotApplicable { .. })));
    }
}
