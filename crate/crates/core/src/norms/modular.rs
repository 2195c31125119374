use super::NormEngine;
use crate::error::{Error, Result};
use crate::scalar::Rational;
use crate::vector::SparseVector;

pub const DEFAULT_TOL_MOD: f64 = 1e-12;

/// Modular sequence space with `M_n(t) = t^{p_n}`:
/// `‖x‖ = inf{λ > 0 : Σ (|x_n|/λ)^{p_n} <= 1}`.
///
/// The exponent list fixes the window; index `n` uses `p[n-1]`.
#[derive(Debug, Clone)]
pub struct ModularSpace {
    exponents: Vec<u32>,
    tol: f64,
}

impl ModularSpace {
    pub fn new(exponents: Vec<u32>, tol: f64) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::EmptyExponents);
        }
        if exponents[0] == 0 || exponents.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::ExponentsNotIncreasing);
        }
        if !(tol > 0.0 && tol < 1e-3) {
            return Err(Error::InvalidConfig {
                field: "tol".into(),
                reason: "modular tolerance must lie in (0, 1e-3)".into(),
            });
        }
        Ok(ModularSpace { exponents, tol })
    }

    /// `p_n = n` for `n = 1..=window`.
    pub fn arithmetic(window: usize) -> Self {
        ModularSpace {
            exponents: (1..=window as u32).collect(),
            tol: DEFAULT_TOL_MOD,
        }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// `Σ (|x_n|/λ)^{p_n}`.
    pub fn modular(&self, x: &SparseVector<f64>, lambda: f64) -> f64 {
        x.iter()
            .map(|(&n, c)| (c.abs() / lambda).powi(self.exponents[n - 1] as i32))
            .sum()
    }
}

impl NormEngine for ModularSpace {
    fn name(&self) -> String {
        format!(
            "modular:{}",
            self.exponents.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
        )
    }

    fn window(&self) -> Option<usize> {
        Some(self.exponents.len())
    }

    fn supports_exact(&self) -> bool {
        false
    }

    fn norm_exact(&self, _x: &SparseVector<Rational>) -> Result<Rational> {
        Err(Error::ModeUnsupported {
            engine: self.name(),
            mode: "exact",
        })
    }

    fn norm_float(&self, x: &SparseVector<f64>) -> Result<f64> {
        x.check_window(self.exponents.len())?;
        let top = x.max_abs();
        match x.support_len() {
            0 => return Ok(0.0),
            1 => return Ok(top),
            _ => {}
        }
        // The largest coordinate alone reaches 1 at λ = top; at λ = top·|supp| every
        // term is at most 1/|supp| because p_n >= 1.
        let mut lo = top;
        let mut hi = top * x.support_len() as f64;
        for _ in 0..400 {
            if self.modular(x, hi) >= 1.0 - self.tol || hi - lo <= 2.0 * f64::EPSILON * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.modular(x, mid) <= 1.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
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
    fn single_coordinate_is_its_modulus() {
        let m = ModularSpace::arithmetic(5);
        let x: SparseVector<f64> = "4:-2.5".parse().unwrap();
        assert_eq!(norm(&m, &x).unwrap(), 2.5);
    }

    #[test]
    fn two_coordinates_solve_golden_ratio_equation() {
        // 1/λ + 1/λ² = 1  ⇒  λ² - λ - 1 = 0, positive root from the quadratic formula.
        let expected = (1.0 + 5f64.sqrt()) / 2.0;
        let m = ModularSpace::arithmetic(4);
        let x: SparseVector<f64> = "1:1,2:1".parse().unwrap();
        let got = norm(&m, &x).unwrap();
        assert!((got - expected).abs() <= 1e-11, "{} vs {}", got, expected);
        let s = m.modular(&x, got);
        assert!(s <= 1.0 && s >= 1.0 - 10.0 * m.tolerance());
    }

    #[test]
    fn validation() {
        assert!(matches!(ModularSpace::new(vec![], 1e-12), Err(Error::EmptyExponents)));
        assert!(matches!(ModularSpace::new(vec![1, 3, 3], 1e-12), Err(Error::ExponentsNotIncreasing)));
        assert!(matches!(ModularSpace::new(vec![0, 1], 1e-12), Err(Error::ExponentsNotIncreasing)));
        let m = ModularSpace::new(vec![1, 2], 1e-12).unwrap();
        let x: SparseVector<f64> = "3:1".parse().unwrap();
        assert!(matches!(norm(&m, &x), Err(Error::OutsideWindow { .. })));
        assert!(norm(&m, &SparseVector::<Rational>::unit(1).unwrap()).is_err());
    }
}
