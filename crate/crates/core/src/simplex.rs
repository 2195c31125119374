//! Exact rational simplex for `max cᵀx  s.t.  Ax <= b, x >= 0` with `b >= 0`.
//!
//! Dense tableau, Bland's rule, so it terminates on degenerate problems. The
//! slack basis is feasible because `b >= 0`, which keeps this a one-phase method.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::Rational;

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub value: Rational,
    pub primal: Vec<Rational>,
    /// Optimal multipliers, one per constraint row. They satisfy `Aᵀy >= c`, `y >= 0`, `bᵀy = value`.
    pub dual: Vec<Rational>,
    pub pivots: usize,
}

pub fn maximize(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> Result<LpSolution> {
    let m = a.len();
    let n = c.len();
    if b.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(Error::LinearProgram("constraint matrix has inconsistent dimensions"));
    }
    if b.iter().any(|v| v.is_negative()) {
        return Err(Error::LinearProgram("right-hand side must be nonnegative"));
    }
    let width = n + m + 1;
    let rhs = n + m;
    let mut rows: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(i, (row, bi))| {
            let mut r = vec![Rational::zero(); width];
            r[..n].clone_from_slice(row);
            r[n + i] = Rational::from_integer(1.into());
            r[rhs] = bi.clone();
            r
        })
        .collect();
    let mut obj = vec![Rational::zero(); width];
    for (j, cj) in c.iter().enumerate() {
        obj[j] = -cj.clone();
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut pivots = 0usize;

    while let Some(enter) = (0..n + m).find(|&j| obj[j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for (i, row) in rows.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[rhs] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((pr, _)) = leave else {
            return Err(Error::LinearProgram("objective is unbounded"));
        };
        pivot(&mut rows, &mut obj, pr, enter);
        basis[pr] = enter;
        pivots += 1;
    }

    let mut primal = vec![Rational::zero(); n];
    for (i, &bj) in basis.iter().enumerate() {
        if bj < n {
            primal[bj] = rows[i][rhs].clone();
        }
    }
    let dual = (0..m).map(|i| obj[n + i].clone()).collect();
    Ok(LpSolution {
        value: obj[rhs].clone(),
        primal,
        dual,
        pivots,
    })
}

fn pivot(rows: &mut [Vec<Rational>], obj: &mut [Rational], pr: usize, pc: usize) {
    let p = rows[pr][pc].clone();
    for v in rows[pr].iter_mut() {
        if !v.is_zero() {
            *v = &*v / &p;
        }
    }
    let pivot_row = rows[pr].clone();
    let eliminate = |target: &mut [Rational]| {
        let f = target[pc].clone();
        if f.is_zero() {
            return;
        }
        for (t, pv) in target.iter_mut().zip(&pivot_row) {
            if !pv.is_zero() {
                *t = &*t - &(&f * pv);
            }
        }
    };
    for (i, row) in rows.iter_mut().enumerate() {
        if i != pr {
            eliminate(row);
        }
    }
    eliminate(obj);
}
