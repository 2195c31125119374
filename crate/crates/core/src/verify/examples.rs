use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::constants::{interleaved_tuple, random_signs};
use crate::error::Result;
use crate::norms::{dual_norm_polyhedral, norm, ModularSpace, NormEngine, PartialSumSpace, SpreadingFamily};
use crate::sampler::{random_eighth, subset_of_size, SamplerSpec};
use crate::scalar::{Rational, Scalar};
use crate::sets::IndexSet;
use crate::vector::{indicator, signed_indicator, SparseVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleCheck {
    pub space: String,
    pub n: usize,
    pub quantity: String,
    /// `=` or `>=`
    pub relation: String,
    pub expected: String,
    pub computed: String,
    pub passed: bool,
}

/// `‖x + t1_{εA}‖ <= ‖x + t1_{ηB}‖` on the modular space for `B < A`, `|A| <= |B|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RightPropertyCheck {
    pub space: String,
    pub seed: u64,
    pub instances: usize,
    pub max_ratio: f64,
    pub violations: usize,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExamplesReport {
    pub checks: Vec<ExampleCheck>,
    pub right_property: RightPropertyCheck,
    pub passed: bool,
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

fn exact(space: &str, n: usize, quantity: String, expected: Rational, computed: Rational) -> ExampleCheck {
    ExampleCheck {
        space: space.into(),
        n,
        quantity,
        relation: "=".into(),
        passed: computed == expected,
        expected: expected.to_string(),
        computed: computed.to_string(),
    }
}

fn int(v: usize) -> Rational {
    Rational::from_i64(v as i64)
}

/// Exact values of the spreading, dual and partial-sum examples, plus a sampled
/// check of the modular right-side comparison.
pub fn reproduce_examples(seed: u64, modular_samples: usize) -> Result<ExamplesReport> {
    let mut checks = Vec::new();
    for n in [2usize, 3] {
        let e = SpreadingFamily::new(n as u32)?;
        let f = factorial(n);
        let low: Rational = norm(&e, &indicator(&IndexSet::range(1, f)))?;
        let high: Rational = norm(&e, &indicator(&IndexSet::range(f + 1, 2 * f)))?;
        checks.push(exact(&e.name(), n, format!("‖1_[1,{}]‖", f), int(factorial(n - 1)), low));
        checks.push(exact(&e.name(), n, format!("‖1_[{},{}]‖", f + 1, 2 * f), int(f), high));
    }
    {
        let n = 2;
        let e = SpreadingFamily::new(n as u32)?;
        let f = factorial(n);
        let low = dual_norm_polyhedral(&e, &indicator(&IndexSet::range(1, f)))?.value;
        checks.push(ExampleCheck {
            space: format!("dual of {}", e.name()),
            n,
            quantity: format!("‖1_[1,{}]‖*", f),
            relation: ">=".into(),
            expected: n.to_string(),
            passed: low >= int(n),
            computed: low.to_string(),
        });
        let high = dual_norm_polyhedral(&e, &indicator(&IndexSet::range(f + 1, 2 * f)))?.value;
        checks.push(exact(&format!("dual of {}", e.name()), n, format!("‖1_[{},{}]‖*", f + 1, 2 * f), int(1), high));
    }
    for n in [2usize, 4, 6, 8] {
        let e = PartialSumSpace::new(Some(4 * n));
        let tuple = interleaved_tuple::<Rational>(n);
        let (lhs, rhs) = tuple.sides()?;
        let expected_left = int(n / 2) * int(3 * n / 2 + 1);
        checks.push(exact(&e.name(), n, "‖x + 1_A‖".into(), expected_left, norm(&e, &lhs)?));
        checks.push(exact(&e.name(), n, "‖x + 1_B‖".into(), int(2 * n), norm(&e, &rhs)?));
    }
    let right_property = modular_right_property(seed, modular_samples)?;
    let passed = checks.iter().all(|c| c.passed) && right_property.passed;
    Ok(ExamplesReport {
        checks,
        right_property,
        passed,
    })
}

const MODULAR_WINDOW: usize = 10;

fn modular_right_property(seed: u64, samples: usize) -> Result<RightPropertyCheck> {
    let e = ModularSpace::arithmetic(MODULAR_WINDOW);
    let tol = 1e3 * e.tolerance();
    let mut rng = SamplerSpec::with_seed(seed).rng(0x5a);
    let (mut violations, mut max_ratio) = (0, 0.0f64);
    for _ in 0..samples {
        let cut = rng.random_range(1..MODULAR_WINDOW);
        let low: Vec<usize> = (1..=cut).collect();
        let high: Vec<usize> = (cut + 1..=MODULAR_WINDOW).collect();
        let kb = rng.random_range(1..=low.len());
        let b = subset_of_size(&mut rng, &low, kb);
        let ka = rng.random_range(0..=b.len().min(high.len()));
        let a = subset_of_size(&mut rng, &high, ka);
        let free: Vec<usize> = (1..=MODULAR_WINDOW).filter(|i| !a.contains(*i) && !b.contains(*i)).collect();
        let k = rng.random_range(0..=free.len().min(4));
        let supp = subset_of_size(&mut rng, &free, k);
        let coeffs: Vec<f64> = supp.iter().map(|_| random_eighth::<f64, _>(&mut rng)).collect();
        let x = SparseVector::on_set(&supp, &coeffs)?;
        let t = x.max_abs().max(1.0) * if rng.random_bool(0.5) { 1.0 } else { 1.5 };
        let lhs = x.add(&signed_indicator(&a, &random_signs(&mut rng, &a), &t)?);
        let rhs = x.add(&signed_indicator(&b, &random_signs(&mut rng, &b), &t)?);
        let (l, r) = (e.norm_float(&lhs)?, e.norm_float(&rhs)?);
        max_ratio = max_ratio.max(l / r);
        if l > r * (1.0 + tol) {
            violations += 1;
        }
    }
    Ok(RightPropertyCheck {
        space: e.name(),
        seed,
        instances: samples,
        max_ratio,
        violations,
        tolerance: tol,
        passed: violations == 0,
    })
}
