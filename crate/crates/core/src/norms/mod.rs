//! Norm evaluators for finite windows of sequence spaces.
//!
//! Every engine implements [`NormEngine`]; the scalar type picks the
//! evaluation path through [`Scalar::norm_in`], so generic code calls
//! [`norm`] and never matches on the arithmetic mode itself.

mod basis;
mod dual;
mod lp;
mod modular;
mod normalized;
mod partial_sum;
mod registry;
mod spreading;

use std::fmt::Debug;

pub use basis::{basis_constant, BasisSearch};
pub use dual::{dual_norm_polyhedral, DualSolution};
pub use lp::{LpExponent, LpSpace};
pub use modular::{ModularSpace, DEFAULT_TOL_MOD};
pub use normalized::Normalized;
pub use partial_sum::PartialSumSpace;
pub use registry::{EngineFactory, EngineRegistry, SpaceSpec};
pub use spreading::SpreadingFamily;

use crate::error::Result;
use crate::scalar::{Rational, Scalar};
use crate::vector::SparseVector;

pub trait NormEngine: Send + Sync + Debug {
    /// Short form that [`EngineRegistry::parse`] accepts back, e.g. `lp:2` or `spreading:3`.
    fn name(&self) -> String;

    /// Largest index the engine can evaluate, if the space is realized on a finite window.
    fn window(&self) -> Option<usize>;

    fn supports_exact(&self) -> bool;

    fn norm_exact(&self, x: &SparseVector<Rational>) -> Result<Rational>;

    fn norm_float(&self, x: &SparseVector<f64>) -> Result<f64>;

    /// `‖Σ a_n e_n‖` depends only on `|a_n|` and is monotone in each of them.
    fn is_one_unconditional(&self) -> bool;

    /// `‖e_n‖ = 1` for every `n`.
    fn is_normalized(&self) -> bool {
        true
    }

    fn as_spreading(&self) -> Option<&SpreadingFamily> {
        None
    }
}

/// `‖x‖` in the arithmetic of `S`.
pub fn norm<S: Scalar>(engine: &dyn NormEngine, x: &SparseVector<S>) -> Result<S> {
    S::norm_in(engine, x)
}

/// The window to enumerate on: the engine's own window, capped by `requested`.
pub fn effective_window(engine: &dyn NormEngine, requested: Option<usize>) -> Option<usize> {
    match (engine.window(), requested) {
        (Some(e), Some(r)) => Some(e.min(r)),
        (e, r) => e.or(r),
    }
}
