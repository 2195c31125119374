use num_traits::{Signed, Zero};
use serde::Serialize;

use super::SpreadingFamily;
use crate::error::{Error, Result};
use crate::scalar::{rational_one, Rational};
use crate::sets::IndexSet;
use crate::simplex;
use crate::vector::SparseVector;

/// Upper limit on the number of family members turned into constraints.
pub const MAX_DUAL_CONSTRAINTS: usize = 20_000;

/// `‖f‖_* = max{f(x) : ‖x‖ <= 1}` for the spreading norm, with certificates.
#[derive(Debug, Clone, Serialize)]
pub struct DualSolution {
    #[serde(serialize_with = "ser_rational")]
    pub value: Rational,
    /// A maximizer: `‖primal‖ <= 1` and `f(primal) = value`.
    #[serde(serialize_with = "ser_vector")]
    pub primal: SparseVector<Rational>,
    /// Family members with nonnegative multipliers whose weighted indicators dominate `|f|`
    /// coordinatewise and whose multipliers sum to `value`.
    #[serde(serialize_with = "ser_cover")]
    pub cover: Vec<(IndexSet, Rational)>,
    pub constraints: usize,
    pub pivots: usize,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn ser_vector<S: serde::Serializer>(v: &SparseVector<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.encode())
}

fn ser_cover<S: serde::Serializer>(c: &[(IndexSet, Rational)], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(c.len()))?;
    for (set, y) in c {
        seq.serialize_element(&(set.to_string(), y.to_string()))?;
    }
    seq.end()
}

/// The norm is 1-unconditional, so only `|f|` matters and the dual becomes
/// `max Σ |f_i| x_i` over `x >= 0` with `Σ_{i∈A} x_i <= 1` for every `A ∈ F(N)`.
/// Only maximal members restricted to `supp f` are needed as constraints.
pub fn dual_norm_polyhedral(space: &SpreadingFamily, f: &SparseVector<Rational>) -> Result<DualSolution> {
    let window = crate::norms::NormEngine::window(space).expect("spreading spaces carry a window");
    f.check_window(window)?;
    if f.is_zero() {
        return Ok(DualSolution {
            value: Rational::zero(),
            primal: SparseVector::zero(),
            cover: Vec::new(),
            constraints: 0,
            pivots: 0,
        });
    }
    let support = f.support();
    let mut rows: Vec<IndexSet> = space
        .maximal_members(MAX_DUAL_CONSTRAINTS)?
        .into_iter()
        .map(|a| a.intersection(&support))
        .filter(|a| !a.is_empty())
        .collect();
    rows.sort();
    rows.dedup();
    // Drop rows contained in another row; they never bind more tightly.
    let keep: Vec<IndexSet> = rows
        .iter()
        .filter(|r| !rows.iter().any(|o| o != *r && r.is_subset(o)))
        .cloned()
        .collect();

    let vars: Vec<usize> = support.iter().collect();
    let a: Vec<Vec<Rational>> = keep
        .iter()
        .map(|row| {
            vars.iter()
                .map(|&i| if row.contains(i) { rational_one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    let b = vec![rational_one(); keep.len()];
    let c: Vec<Rational> = vars.iter().map(|&i| f.coef(i).abs()).collect();
    let sol = simplex::maximize(&a, &b, &c)?;

    let primal = SparseVector::from_entries(
        vars.iter()
            .zip(&sol.primal)
            .map(|(&i, xi)| (i, if f.coef(i).is_negative() { -xi.clone() } else { xi.clone() })),
    )?;
    let cover = keep
        .into_iter()
        .zip(sol.dual)
        .filter(|(_, y)| !y.is_zero())
        .collect::<Vec<_>>();
    if cover.iter().any(|(_, y)| y.is_negative()) {
        return Err(Error::Invariant("negative dual multiplier at optimum".into()));
    }
    Ok(DualSolution {
        value: sol.value,
        primal,
        cover,
        constraints: a.len(),
        pivots: sol.pivots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::norm;
    use crate::scalar::{parse_rational, Scalar};
    use crate::vector::indicator;

    fn dual(n_max: u32, f: &SparseVector<Rational>) -> DualSolution {
        dual_norm_polyhedral(&SpreadingFamily::new(n_max).unwrap(), f).unwrap()
    }

    #[test]
    fn small_window_values() {
        assert_eq!(dual(2, &indicator(&IndexSet::range(1, 2))).value, Rational::from_i64(2));
        assert_eq!(dual(2, &indicator(&IndexSet::range(3, 4))).value, Rational::from_i64(1));
        assert_eq!(dual(2, &SparseVector::unit(1).unwrap()).value, Rational::from_i64(1));
        assert_eq!(dual(3, &indicator(&IndexSet::range(1, 6))).value, parse_rational("7/2").unwrap());
    }

    #[test]
    fn certificates_are_consistent() {
        let s = SpreadingFamily::new(3).unwrap();
        let f: SparseVector<Rational> = "1:2,3:-1,6:1/2,7:3,12:-1".parse().unwrap();
        let d = dual_norm_polyhedral(&s, &f).unwrap();
        assert!(norm(&s, &d.primal).unwrap() <= rational_one());
        assert_eq!(f.dot(&d.primal), d.value);
        let total: Rational = d.cover.iter().map(|(_, y)| y.clone()).sum();
        assert_eq!(total, d.value);
    }

    #[test]
    fn outside_window_is_rejected() {
        let s = SpreadingFamily::new(2).unwrap();
        let f: SparseVector<Rational> = "9:1".parse().unwrap();
        assert!(matches!(dual_norm_polyhedral(&s, &f), Err(Error::OutsideWindow { .. })));
    }
}
