//! Exact and floating-point experiments with the thresholding greedy algorithm
//! on finite windows of sequence spaces: norm engines, greedy approximants,
//! greedy-type constants, and a checker for inequalities between them.

pub mod cli;
pub mod config;
pub mod constants;
pub mod error;
pub mod estimate;
pub mod norms;
pub mod report;
pub mod sampler;
pub mod scalar;
pub mod sets;
pub mod simplex;
pub mod studies;
pub mod tga;
pub mod vector;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
pub use estimate::{BoundKind, ConstantEstimate, ConstantName, Witness};
pub use norms::{norm, EngineRegistry, NormEngine};
pub use scalar::{ArithmeticMode, Rational, Scalar};
pub use sets::{IndexSet, Sign, SignPattern};
pub use tga::TiePolicy;
pub use vector::SparseVector;
pub use weights::WeightSequence;
