//! Coefficient formulas as small static expression trees.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimate::{BoundKind, ConstantEstimate, ConstantName};
use crate::scalar::Scalar;

/// Which weight a constant is measured with: the claim's own `w`, or `w ≡ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightRef {
    Given,
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ConstantRef {
    pub name: ConstantName,
    pub weight: WeightRef,
}

impl ConstantRef {
    pub const fn given(name: ConstantName) -> Self {
        ConstantRef {
            name,
            weight: WeightRef::Given,
        }
    }

    pub const fn unit(name: ConstantName) -> Self {
        ConstantRef {
            name,
            weight: WeightRef::Unit,
        }
    }

    /// Constants that ignore the weight collapse onto their unit-weight key.
    pub fn key(self) -> ConstantRef {
        if self.name.uses_weight() {
            self
        } else {
            ConstantRef::unit(self.name)
        }
    }
}

impl fmt::Display for ConstantRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.key().weight {
            WeightRef::Unit if self.name.uses_weight() => write!(f, "{}[w=1]", self.name),
            _ => write!(f, "{}", self.name),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Coef {
    Num(i64),
    K(ConstantRef),
    /// `inf w / sup w`
    Alpha,
    Add(&'static [Coef]),
    Mul(&'static [Coef]),
    Div(&'static Coef, &'static Coef),
    Pow(&'static Coef, u32),
    Max(&'static [Coef]),
}

/// Measured constants keyed by [`ConstantRef::key`].
#[derive(Debug, Clone)]
pub struct ConstantSet<S> {
    pub estimates: BTreeMap<ConstantRef, ConstantEstimate<S>>,
}

impl<S> Default for ConstantSet<S> {
    fn default() -> Self {
        ConstantSet {
            estimates: BTreeMap::new(),
        }
    }
}

impl<S: Scalar> ConstantSet<S> {
    pub fn insert(&mut self, r: ConstantRef, estimate: ConstantEstimate<S>) {
        self.estimates.insert(r.key(), estimate);
    }

    pub fn get(&self, r: ConstantRef) -> Option<&ConstantEstimate<S>> {
        self.estimates.get(&r.key())
    }

    pub fn any_lower_bound(&self) -> bool {
        self.estimates.values().any(|e| e.kind == BoundKind::WitnessLowerBound)
    }
}

impl Coef {
    pub fn eval<S: Scalar>(&self, claim: &str, constants: &ConstantSet<S>, alpha: Option<&S>) -> Result<S> {
        Ok(match self {
            Coef::Num(v) => S::from_i64(*v),
            Coef::K(r) => constants
                .get(*r)
                .ok_or_else(|| Error::MissingConstant {
                    claim: claim.into(),
                    name: r.to_string(),
                })?
                .value
                .clone(),
            Coef::Alpha => alpha
                .cloned()
                .ok_or_else(|| Error::NotApplicable {
                    claim: claim.into(),
                    reason: "the coefficient needs 0 < inf w <= sup w < ∞".into(),
                })?,
            Coef::Add(xs) => xs
                .iter()
                .map(|c| c.eval(claim, constants, alpha))
                .try_fold(S::zero(), |acc, v| v.map(|v| acc + v))?,
            Coef::Mul(xs) => xs
                .iter()
                .map(|c| c.eval(claim, constants, alpha))
                .try_fold(S::one(), |acc, v| v.map(|v| acc * v))?,
            Coef::Div(a, b) => a.eval(claim, constants, alpha)? / b.eval(claim, constants, alpha)?,
            Coef::Pow(a, k) => {
                let base = a.eval(claim, constants, alpha)?;
                (0..*k).fold(S::one(), |acc, _| acc * base.clone())
            }
            Coef::Max(xs) => {
                let mut it = xs.iter().map(|c| c.eval(claim, constants, alpha));
                let first = it.next().expect("max of at least one term")?;
                it.try_fold(first, |acc, v| v.map(|v| S::max_of(acc, v)))?
            }
        })
    }

    /// Constants the formula reads, deduplicated, in first-use order.
    pub fn references(&self) -> Vec<ConstantRef> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut Vec<ConstantRef>) {
        match self {
            Coef::K(r) => {
                if !out.contains(&r.key()) {
                    out.push(r.key());
                }
            }
            Coef::Add(xs) | Coef::Mul(xs) | Coef::Max(xs) => xs.iter().for_each(|c| c.collect(out)),
            Coef::Div(a, b) => {
                a.collect(out);
                b.collect(out);
            }
            Coef::Pow(a, _) => a.collect(out),
            Coef::Num(_) | Coef::Alpha => {}
        }
    }

    pub fn uses_alpha(&self) -> bool {
        match self {
            Coef::Alpha => true,
            Coef::Add(xs) | Coef::Mul(xs) | Coef::Max(xs) => xs.iter().any(Coef::uses_alpha),
            Coef::Div(a, b) => a.uses_alpha() || b.uses_alpha(),
            Coef::Pow(a, _) => a.uses_alpha(),
            Coef::Num(_) | Coef::K(_) => false,
        }
    }

    fn atomic(&self) -> bool {
        matches!(self, Coef::Num(_) | Coef::K(_) | Coef::Alpha | Coef::Max(_) | Coef::Pow(..))
    }
}

impl fmt::Display for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, xs: &[Coef], sep: &str, paren: bool| -> fmt::Result {
            for (i, c) in xs.iter().enumerate() {
                if i > 0 {
                    f.write_str(sep)?;
                }
                if paren && !c.atomic() && !matches!(c, Coef::Mul(_)) {
                    write!(f, "({})", c)?;
                } else {
                    write!(f, "{}", c)?;
                }
            }
            Ok(())
        };
        match self {
            Coef::Num(v) => write!(f, "{}", v),
            Coef::K(r) => write!(f, "{}", r),
            Coef::Alpha => f.write_str("α"),
            Coef::Add(xs) => join(f, xs, " + ", false),
            Coef::Mul(xs) => join(f, xs, "·", true),
            Coef::Div(a, b) => {
                let wrap = |c: &Coef| if c.atomic() { format!("{}", c) } else { format!("({})", c) };
                write!(f, "{}/{}", wrap(a), wrap(b))
            }
            Coef::Pow(a, k) => {
                if a.atomic() {
                    write!(f, "{}^{}", a, k)
                } else {
                    write!(f, "({})^{}", a, k)
                }
            }
            Coef::Max(xs) => {
                f.write_str("max(")?;
                join(f, xs, ", ", false)?;
                f.write_str(")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::Witness;
    use crate::scalar::Rational;
    use crate::sets::IndexSet;

    const CQ: Coef = Coef::K(ConstantRef::unit(ConstantName::QuasiGreedy));
    const CW: Coef = Coef::K(ConstantRef::given(ConstantName::WConservative));
    const F: Coef = Coef::Add(&[Coef::Num(1), CQ, Coef::Mul(&[Coef::Num(8), Coef::Pow(&CQ, 4), CW])]);

    fn est(name: ConstantName, v: i64) -> ConstantEstimate<Rational> {
        ConstantEstimate {
            name,
            weight: "constant:1".into(),
            engine: "test".into(),
            value: Rational::from_i64(v),
            kind: BoundKind::WindowExact,
            witness: Witness::SetPair {
                a: IndexSet::empty(),
                b: IndexSet::empty(),
            },
            window: 1,
            evaluated: 0,
            skipped: 0,
            seed: None,
            budget_exhausted: false,
            best_choice_value: None,
        }
    }

    #[test]
    fn evaluates_and_renders() {
        let mut cs = ConstantSet::default();
        cs.insert(ConstantRef::unit(ConstantName::QuasiGreedy), est(ConstantName::QuasiGreedy, 2));
        cs.insert(ConstantRef::given(ConstantName::WConservative), est(ConstantName::WConservative, 3));
        assert_eq!(F.eval::<Rational>("T", &cs, None).unwrap(), Rational::from_i64(1 + 2 + 8 * 16 * 3));
        assert_eq!(F.to_string(), "1 + C_q + 8·C_q^4·w-conservative");
        assert_eq!(F.references().len(), 2);
        let half = Coef::Div(&Coef::Num(1), &Coef::Alpha);
        assert!(half.uses_alpha());
        assert!(matches!(half.eval::<Rational>("T", &cs, None), Err(Error::NotApplicable { .. })));
        assert!(matches!(
            Coef::K(ConstantRef::unit(ConstantName::Basis)).eval::<Rational>("T", &cs, None),
            Err(Error::MissingConstant { .. })
        ));
    }
}
