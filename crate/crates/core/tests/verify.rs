use greedy_lab::estimate::ConstantName;
use greedy_lab::norms::{LpExponent, LpSpace, SpreadingFamily};
use greedy_lab::verify::{check, find_claim, fixed_constant, run_claim, run_claim_in, CheckInput, ClaimOptions, ConstantRef, ConstantSet};
use greedy_lab::verify::{Instance, InstanceBatch};
use greedy_lab::*;
use std::collections::BTreeMap;

#[test]
fn l1_spreading_example() {
    let claim = find_claim("L1").unwrap();
    let case = &claim.cases[0];
    let engine = SpreadingFamily::new(3).unwrap();
    let w = WeightSequence::ones();
    let cq = ConstantRef::unit(ConstantName::QuasiGreedy);
    let mut constants = ConstantSet::default();
    constants.insert(cq, fixed_constant(cq, Rational::from_i64(1), &engine, 12));
    let coefs: Vec<Rational> = (3..=8).map(Rational::from_i64).collect();
    let x = SparseVector::on_set(&IndexSet::range(7, 12), &coefs).unwrap();
    let batch = InstanceBatch {
        instances: vec![Instance::Vector { x }],
        proposed: 1,
        rejected: BTreeMap::new(),
    };
    let input = CheckInput {
        claim,
        case,
        engine: &engine,
        w: &w,
        window: 12,
        seed: 0,
        constants: &constants,
    };
    let report = check(&input, batch).unwrap();
    assert!(report.passed);
    assert_eq!(report.max_slack.as_deref(), Some("11/32"));
}

#[test]
fn p41a_is_trivial_above_one() {
    let claim = find_claim("P41a").unwrap();
    let w = WeightSequence::parse("one_plus_harmonic").unwrap();
    let opts = ClaimOptions {
        window: Some(8),
        samples: 200,
        seed: 3,
        ..Default::default()
    };
    let r = run_claim_in(ArithmeticMode::Exact, claim, &LpSpace::new(LpExponent::Finite(2.0)), &w, &opts);
    match r {
        Ok(rep) => {
            assert!(rep.passed);
            assert!(rep.max_slack_f64.unwrap_or(0.0) <= 1.0);
        }
        Err(Error::EmptyInstanceStream(_)) => {}
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn l38_sup_norm_slack_at_ten_thousand_samples() {
    let claim = find_claim("L38").unwrap();
    let opts = ClaimOptions {
        window: Some(10),
        samples: 10_000,
        seed: 7,
        ..Default::default()
    };
    let r = run_claim::<Rational>(claim, &LpSpace::new(LpExponent::Infinity), &WeightSequence::ones(), &opts).unwrap();
    assert!(r.passed);
    assert_eq!(r.instances, 10_000);
    assert!(r.max_slack_f64.unwrap() <= 0.5);
}
