use itertools::Itertools;

use super::NormEngine;
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::sets::IndexSet;
use crate::vector::SparseVector;

/// Norm given by the family `F = ∪_n F_n`, `F_n = {A : |A| <= n!, min A >= n!}`,
/// realized on the window `[1, N]`: `‖x‖ = max_{A∈F} Σ_{i∈A} |x_i|`.
///
/// For a fixed `n` the best member of `F_n` takes the `n!` largest moduli among
/// indices `>= n!`, so the norm is a maximum of top-k sums and the family itself
/// is never enumerated.
#[derive(Debug, Clone)]
pub struct SpreadingFamily {
    n_max: u32,
    window: usize,
    /// `(n!, n)` for every `n` with `n! <= window`.
    levels: Vec<(usize, u32)>,
}

pub(crate) fn factorial(n: u32) -> usize {
    (1..=n as usize).product()
}

impl SpreadingFamily {
    /// Window `[1, 2·n_max!]`, the smallest one holding both `[1, n!]` and `[n!+1, 2n!]`.
    pub fn new(n_max: u32) -> Result<Self> {
        if !(1..=6).contains(&n_max) {
            return Err(Error::InvalidConfig {
                field: "n_max".into(),
                reason: "n_max must lie in 1..=6".into(),
            });
        }
        Self::with_window(n_max, 2 * factorial(n_max))
    }

    pub fn with_window(n_max: u32, window: usize) -> Result<Self> {
        if window == 0 || window > 1440 {
            return Err(Error::InvalidConfig {
                field: "window".into(),
                reason: "window must lie in 1..=1440".into(),
            });
        }
        let levels = (1..)
            .map(|n| (factorial(n), n))
            .take_while(|&(f, _)| f <= window)
            .collect();
        Ok(SpreadingFamily {
            n_max,
            window,
            levels,
        })
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    /// `A ∈ F(N)`: some `n` has `|A| <= n!` and `min A >= n!`, with `A ⊆ [1, N]`.
    pub fn contains(&self, set: &IndexSet) -> bool {
        if set.last().is_some_and(|m| m > self.window) {
            return false;
        }
        match set.first() {
            None => true,
            Some(lo) => self.levels.iter().any(|&(f, _)| set.len() <= f && lo >= f),
        }
    }

    /// Members of `F(N)` that are maximal under inclusion within each level:
    /// `{i}` for `n = 1`, and every `min(n!, N-n!+1)`-subset of `[n!, N]` above that.
    /// Dominated members add only redundant constraints for nonnegative vectors.
    pub fn maximal_members(&self, limit: usize) -> Result<Vec<IndexSet>> {
        let mut out = Vec::new();
        for &(f, _) in &self.levels {
            let k = f.min(self.window + 1 - f);
            for combo in (f..=self.window).combinations(k) {
                if out.len() >= limit {
                    return Err(Error::WindowTooSmall {
                        window: self.window,
                        reason: format!("the family has more than {} maximal members", limit),
                    });
                }
                out.push(IndexSet::from_sorted_unchecked(combo));
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    fn eval<S: Scalar>(&self, x: &SparseVector<S>) -> Result<S> {
        x.check_window(self.window)?;
        let mut best = S::zero();
        for &(f, _) in &self.levels {
            let mut moduli: Vec<S> = x
                .iter()
                .filter(|(&i, _)| i >= f)
                .map(|(_, c)| c.abs())
                .collect();
            if moduli.is_empty() {
                break;
            }
            moduli.sort_by(|a, b| b.partial_cmp(a).expect("scalars are totally ordered"));
            let sum = moduli.into_iter().take(f).fold(S::zero(), |a, b| a + b);
            best = S::max_of(best, sum);
        }
        Ok(best)
    }
}

impl NormEngine for SpreadingFamily {
    fn name(&self) -> String {
        if self.window == 2 * factorial(self.n_max) {
            format!("spreading:{}", self.n_max)
        } else {
            format!("spreading:{}@{}", self.n_max, self.window)
        }
    }

    fn window(&self) -> Option<usize> {
        Some(self.window)
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
        true
    }

    fn as_spreading(&self) -> Option<&SpreadingFamily> {
        Some(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::norm;
    use crate::vector::indicator;

    type Q = Rational;

    #[test]
    fn block_values_for_n_three() {
        let s = SpreadingFamily::new(3).unwrap();
        assert_eq!(s.window(), Some(12));
        let low: SparseVector<Q> = indicator(&IndexSet::range(1, 6));
        let high: SparseVector<Q> = indicator(&IndexSet::range(7, 12));
        assert_eq!(norm(&s, &low).unwrap(), Q::from_i64(2));
        assert_eq!(norm(&s, &high).unwrap(), Q::from_i64(6));
    }

    #[test]
    fn top_k_sum_example() {
        let s = SpreadingFamily::new(3).unwrap();
        let x: SparseVector<Q> = "2:3,3:4,4:5".parse().unwrap();
        assert_eq!(norm(&s, &x).unwrap(), Q::from_i64(9));
    }

    #[test]
    fn rejects_support_outside_window() {
        let s = SpreadingFamily::new(2).unwrap();
        let x: SparseVector<Q> = "5:1".parse().unwrap();
        assert!(matches!(norm(&s, &x), Err(Error::OutsideWindow { index: 5, window: 4 })));
    }

    #[test]
    fn membership_follows_the_definition() {
        let s = SpreadingFamily::new(3).unwrap();
        let set = |v: &[usize]| IndexSet::new(v.iter().copied()).unwrap();
        assert!(s.contains(&set(&[1])));
        assert!(!s.contains(&set(&[1, 2])));
        assert!(s.contains(&set(&[2, 9])));
        assert!(!s.contains(&set(&[2, 3, 9])));
        assert!(s.contains(&set(&[6, 7, 8, 9, 10, 11])));
        assert!(!s.contains(&set(&[5, 7, 8])));
        assert!(s.contains(&IndexSet::empty()));
    }

    #[test]
    fn maximal_members_for_small_window() {
        let s = SpreadingFamily::new(2).unwrap();
        let members = s.maximal_members(1000).unwrap();
        // four singletons plus the three pairs inside [2, 4]
        assert_eq!(members.len(), 7);
        assert!(members.iter().all(|m| s.contains(m)));
    }
}
