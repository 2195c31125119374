use num_traits::{Signed, Zero};

use super::NormEngine;
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::vector::SparseVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LpExponent {
    One,
    Finite(f64),
    Infinity,
}

impl LpExponent {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            Ok(LpExponent::Infinity)
        } else if p == 1.0 {
            Ok(LpExponent::One)
        } else if p.is_finite() && p > 1.0 {
            Ok(LpExponent::Finite(p))
        } else {
            Err(Error::InvalidConfig {
                field: "p".into(),
                reason: format!("ℓ_p needs p in [1, ∞], got {}", p),
            })
        }
    }
}

/// The canonical basis of `ℓ_p`, `1 <= p <= ∞`.
#[derive(Debug, Clone)]
pub struct LpSpace {
    p: LpExponent,
}

impl LpSpace {
    pub fn new(p: LpExponent) -> Self {
        LpSpace { p }
    }

    pub fn exponent(&self) -> LpExponent {
        self.p
    }

    fn eval<S: Scalar>(&self, x: &SparseVector<S>) -> Option<S> {
        match self.p {
            LpExponent::One => Some(x.iter().map(|(_, c)| c.abs()).fold(S::zero(), |a, b| a + b)),
            LpExponent::Infinity => Some(x.max_abs()),
            LpExponent::Finite(_) => None,
        }
    }
}

impl NormEngine for LpSpace {
    fn name(&self) -> String {
        match self.p {
            LpExponent::One => "lp:1".into(),
            LpExponent::Infinity => "lp:inf".into(),
            LpExponent::Finite(p) => format!("lp:{}", p),
        }
    }

    fn window(&self) -> Option<usize> {
        None
    }

    fn supports_exact(&self) -> bool {
        !matches!(self.p, LpExponent::Finite(_))
    }

    fn norm_exact(&self, x: &SparseVector<Rational>) -> Result<Rational> {
        self.eval(x).ok_or_else(|| Error::ModeUnsupported {
            engine: self.name(),
            mode: "exact",
        })
    }

    fn norm_float(&self, x: &SparseVector<f64>) -> Result<f64> {
        if let Some(v) = self.eval(x) {
            return Ok(v);
        }
        let LpExponent::Finite(p) = self.p else { unreachable!() };
        let scale = x.max_abs();
        if scale.is_zero() {
            return Ok(0.0);
        }
        let sum: f64 = x.iter().map(|(_, c)| (c.abs() / scale).powf(p)).sum();
        Ok(scale * sum.powf(1.0 / p))
    }

    fn is_one_unconditional(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::norm;

    #[test]
    fn exact_mode_only_for_polyhedral_exponents() {
        let x: SparseVector<Rational> = "1:3,2:-4".parse().unwrap();
        let l1 = LpSpace::new(LpExponent::One);
        let linf = LpSpace::new(LpExponent::Infinity);
        let l2 = LpSpace::new(LpExponent::new(2.0).unwrap());
        assert_eq!(norm(&l1, &x).unwrap(), Rational::from_i64(7));
        assert_eq!(norm(&linf, &x).unwrap(), Rational::from_i64(4));
        assert!(matches!(norm(&l2, &x), Err(Error::ModeUnsupported { .. })));
        assert!((norm(&l2, &x.to_float()).unwrap() - 5.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_p_below_one() {
        assert!(LpExponent::new(0.5).is_err());
        assert!(LpExponent::new(f64::NAN).is_err());
        assert_eq!(LpExponent::new(f64::INFINITY).unwrap(), LpExponent::Infinity);
    }

    #[test]
    fn large_coefficients_do_not_overflow() {
        let l3 = LpSpace::new(LpExponent::new(3.0).unwrap());
        let x: SparseVector<f64> = "1:1e200,2:1e200".parse().unwrap();
        let v = norm(&l3, &x).unwrap();
        assert!((v / 1e200 - 2f64.powf(1.0 / 3.0)).abs() < 1e-12);
    }
}
