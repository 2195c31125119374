//! Checks of constant-bearing inequalities on instance streams, and exact
//! reproduction of the reference values of the example spaces.

mod check;
mod claims;
mod coefficient;
mod examples;
mod instances;

pub use check::{
    check, f_construction, fixed_constant, replay_instance, run_claim, run_claim_cached, run_claim_in, run_claim_in_cached, CheckInput, ConstantCache, CheckReport,
    ClaimOptions, ConstantUse, FConstruction, Violation, MAX_VIOLATIONS,
};
pub use claims::{filter_claims, find_claim, Anchor, Budget, Claim, ClaimCase, OutOfScope, Template, WeightCondition, CLAIMS, OUT_OF_SCOPE};
pub use coefficient::{Coef, ConstantRef, ConstantSet, WeightRef};
pub use examples::{reproduce_examples, ExampleCheck, ExamplesReport, RightPropertyCheck};
pub use instances::{generate, propose, sides, validate, Context, Instance, InstanceBatch, InstanceRecord};
