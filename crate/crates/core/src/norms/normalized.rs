use super::{norm, NormEngine};
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::vector::SparseVector;

#[derive(Debug)]
enum Inner<'a> {
    Borrowed(&'a dyn NormEngine),
    Owned(Box<dyn NormEngine>),
}

/// The rescaled basis `e_n / ‖e_n‖` of another engine: `‖Σ a_n e_n‖' = ‖Σ (a_n/‖e_n‖) e_n‖`.
#[derive(Debug)]
pub struct Normalized<'a> {
    inner: Inner<'a>,
}

impl<'a> Normalized<'a> {
    pub fn over(inner: &'a dyn NormEngine) -> Self {
        Normalized {
            inner: Inner::Borrowed(inner),
        }
    }

    fn inner(&self) -> &dyn NormEngine {
        match &self.inner {
            Inner::Borrowed(e) => *e,
            Inner::Owned(e) => e.as_ref(),
        }
    }

    fn rescale<S: Scalar>(&self, x: &SparseVector<S>) -> Result<SparseVector<S>> {
        let e = self.inner();
        SparseVector::from_entries(
            x.iter()
                .map(|(&i, c)| {
                    let u: S = norm(e, &SparseVector::unit(i)?)?;
                    if u.is_zero() {
                        return Err(Error::Invariant(format!("‖e_{}‖ vanishes in {}", i, e.name())));
                    }
                    Ok((i, c.clone() / u))
                })
                .collect::<Result<Vec<_>>>()?,
        )
    }
}

impl Normalized<'static> {
    pub fn owning(inner: Box<dyn NormEngine>) -> Self {
        Normalized {
            inner: Inner::Owned(inner),
        }
    }
}

impl NormEngine for Normalized<'_> {
    fn name(&self) -> String {
        format!("normalized:{}", self.inner().name())
    }

    fn window(&self) -> Option<usize> {
        self.inner().window()
    }

    fn supports_exact(&self) -> bool {
        self.inner().supports_exact()
    }

    fn norm_exact(&self, x: &SparseVector<Rational>) -> Result<Rational> {
        self.inner().norm_exact(&self.rescale(x)?)
    }

    fn norm_float(&self, x: &SparseVector<f64>) -> Result<f64> {
        self.inner().norm_float(&self.rescale(x)?)
    }

    fn is_one_unconditional(&self) -> bool {
        self.inner().is_one_unconditional()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::PartialSumSpace;

    #[test]
    fn unit_vectors_have_norm_one() {
        let ps = PartialSumSpace::new(Some(12));
        let n = Normalized::over(&ps);
        for i in 1..=12 {
            let u: Rational = norm(&n, &SparseVector::unit(i).unwrap()).unwrap();
            assert_eq!(u, Rational::from_i64(1));
        }
        // a = (1,1,2,2): e_3 - e_4 in the rescaled basis is (e_3 - e_4)/2.
        let x: SparseVector<Rational> = "1:1,3:1,4:-1".parse().unwrap();
        assert_eq!(norm::<Rational>(&n, &x).unwrap(), Rational::from_i64(2));
        assert_eq!(n.name(), "normalized:partial_sum@12");
    }
}
