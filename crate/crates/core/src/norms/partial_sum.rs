use super::NormEngine;
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::vector::SparseVector;

/// `‖x‖ = sup_k |Σ_{i<=k} a_i x_i|` with `a_i = ⌈i/2⌉`.
///
/// Not normalized: `‖e_n‖ = a_n`. Conditional, so signs matter.
#[derive(Debug, Clone, Default)]
pub struct PartialSumSpace {
    window: Option<usize>,
}

impl PartialSumSpace {
    pub fn new(window: Option<usize>) -> Self {
        PartialSumSpace { window }
    }

    pub fn multiplier(i: usize) -> usize {
        i.div_ceil(2)
    }

    fn eval<S: Scalar>(&self, x: &SparseVector<S>) -> Result<S> {
        if let Some(w) = self.window {
            x.check_window(w)?;
        }
        let mut running = S::zero();
        let mut best = S::zero();
        // Zero coordinates leave the partial sum unchanged, so only the support is visited.
        for (&i, c) in x.iter() {
            running = running + S::from_i64(Self::multiplier(i) as i64) * c.clone();
            best = S::max_of(best, running.abs());
        }
        Ok(best)
    }
}

impl NormEngine for PartialSumSpace {
    fn name(&self) -> String {
        match self.window {
            Some(w) => format!("partial_sum@{}", w),
            None => "partial_sum".into(),
        }
    }

    fn window(&self) -> Option<usize> {
        self.window
    }

    fn supports_exact(&self) -> bool {
        true
    }

    fn norm_exact(&self, x: &SparseVector<Rational>) -> Result<Rational> {
        self.eval(x)
    }

    fn norm_float(&self, x: &SparseVector<f64>) -> Result<f64> {
        self.eval(x)
    }

    fn is_one_unconditional(&self) -> bool {
        false
    }

    fn is_normalized(&self) -> bool {
        false
    }
}

impl PartialSumSpace {
    pub fn checked(window: usize) -> Result<Self> {
        if window == 0 {
            return Err(Error::InvalidConfig {
                field: "window".into(),
                reason: "window must be positive".into(),
            });
        }
        Ok(Self::new(Some(window)))
    }
}
