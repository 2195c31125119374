//! Deterministic candidate streams for x-quantified suprema.
//!
//! Three layers: signed indicators `±1` on subsets, small-support vectors on
//! the grid `{±1, ±1/2, ±2}`, and seeded random vectors with coefficients in
//! `(1/8)ℤ`. A layer is enumerated completely when it fits its cap and sampled
//! otherwise. Everything is a pure function of the seed.

use itertools::Itertools;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;
use crate::sets::IndexSet;
use crate::vector::SparseVector;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerSpec {
    pub seed: u64,
    pub sign_vectors: usize,
    pub grid: usize,
    pub grid_max_support: usize,
    pub random: usize,
    pub max_support: usize,
    /// Number of best candidates handed to local refinement.
    pub refine_top: usize,
    pub refine_rounds: usize,
}

impl Default for SamplerSpec {
    fn default() -> Self {
        SamplerSpec {
            seed: 0,
            sign_vectors: 4096,
            grid: 4096,
            grid_max_support: 4,
            random: 2048,
            max_support: 8,
            refine_top: 4,
            refine_rounds: 12,
        }
    }
}

impl SamplerSpec {
    pub fn with_seed(seed: u64) -> Self {
        SamplerSpec {
            seed,
            ..Self::default()
        }
    }

    /// Scales every layer budget by `factor`, keeping at least one draw per layer.
    pub fn scaled(&self, factor: f64) -> Self {
        let f = |n: usize| ((n as f64 * factor).round() as usize).max(1);
        SamplerSpec {
            sign_vectors: f(self.sign_vectors),
            grid: f(self.grid),
            random: f(self.random),
            ..self.clone()
        }
    }

    pub fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    pub fn vectors<S: Scalar>(&self, window: usize) -> Vec<SparseVector<S>> {
        let mut out = self.sign_layer(window);
        out.extend(self.grid_layer(window));
        out.extend(self.random_layer(window));
        out
    }

    /// `1_{εA}` for nonempty `A ⊆ [1, N]`.
    pub fn sign_layer<S: Scalar>(&self, window: usize) -> Vec<SparseVector<S>> {
        let total = 3f64.powi(window as i32) - 1.0;
        if total <= self.sign_vectors as f64 {
            let total = total as u64;
            return (1..=total)
                .map(|mut code| {
                    let mut entries = Vec::new();
                    for i in 1..=window {
                        match code % 3 {
                            1 => entries.push((i, S::one())),
                            2 => entries.push((i, -S::one())),
                            _ => {}
                        }
                        code /= 3;
                    }
                    SparseVector::from_entries(entries).expect("distinct indices")
                })
                .collect();
        }
        let mut rng = self.rng(1);
        (0..self.sign_vectors)
            .map(|_| {
                let set = random_subset(&mut rng, window, window.min(self.max_support));
                let coeffs: Vec<S> = set
                    .iter()
                    .map(|_| if rng.random_bool(0.5) { S::one() } else { -S::one() })
                    .collect();
                SparseVector::on_set(&set, &coeffs).expect("aligned")
            })
            .collect()
    }

    pub fn grid_layer<S: Scalar>(&self, window: usize) -> Vec<SparseVector<S>> {
        let grid: Vec<S> = [(1, 1), (-1, 1), (1, 2), (-1, 2), (2, 1), (-2, 1)]
            .iter()
            .map(|&(p, q)| S::ratio(p, q))
            .collect();
        let kmax = self.grid_max_support.min(window);
        let total: f64 = (1..=kmax)
            .map(|k| binomial(window, k) * 6f64.powi(k as i32))
            .sum();
        if total <= self.grid as f64 {
            let mut out = Vec::new();
            for k in 1..=kmax {
                for support in (1..=window).combinations(k) {
                    for values in (0..k).map(|_| 0..6).multi_cartesian_product() {
                        out.push(
                            SparseVector::from_entries(support.iter().zip(values).map(|(&i, v)| (i, grid[v].clone())))
                                .expect("distinct indices"),
                        );
                    }
                }
            }
            return out;
        }
        let mut rng = self.rng(2);
        (0..self.grid)
            .map(|_| {
                let set = random_subset(&mut rng, window, kmax);
                let coeffs: Vec<S> = set.iter().map(|_| grid[rng.random_range(0..6)].clone()).collect();
                SparseVector::on_set(&set, &coeffs).expect("aligned")
            })
            .collect()
    }

    pub fn random_layer<S: Scalar>(&self, window: usize) -> Vec<SparseVector<S>> {
        let mut rng = self.rng(3);
        (0..self.random)
            .map(|_| {
                let set = random_subset(&mut rng, window, window.min(self.max_support));
                let coeffs: Vec<S> = set.iter().map(|_| random_eighth(&mut rng)).collect();
                SparseVector::on_set(&set, &coeffs).expect("aligned")
            })
            .collect()
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Nonempty subset of `[1, window]` with size uniform in `1..=max_size`.
pub fn random_subset<R: Rng>(rng: &mut R, window: usize, max_size: usize) -> IndexSet {
    let k = rng.random_range(1..=max_size.max(1).min(window));
    subset_of_size(rng, &(1..=window).collect::<Vec<_>>(), k)
}

/// Uniform `k`-subset of `pool`.
pub fn subset_of_size<R: Rng>(rng: &mut R, pool: &[usize], k: usize) -> IndexSet {
    let k = k.min(pool.len());
    IndexSet::new(index::sample(rng, pool.len(), k).into_iter().map(|j| pool[j])).expect("pool holds positive distinct indices")
}

/// Nonzero multiple of `1/8` in `[-3, 3]`.
pub fn random_eighth<S: Scalar, R: Rng>(rng: &mut R) -> S {
    let k = rng.random_range(1..=24i64);
    let s = if rng.random_bool(0.5) { k } else { -k };
    S::ratio(s, 8)
}

/// Single-coordinate moves around `x` inside `[1, window]`: scale one coefficient
/// by `3/2` or `1/2`, flip or zero it, shift it by `±max|x|/4`, or switch on a new
/// coordinate at `±max|x|/2`.
pub fn vector_moves<S: Scalar>(x: &SparseVector<S>, window: usize) -> Vec<SparseVector<S>> {
    let scale = x.max_abs();
    if scale.is_zero() {
        return Vec::new();
    }
    let quarter = scale.clone() * S::ratio(1, 4);
    let half = scale * S::ratio(1, 2);
    let mut out = Vec::new();
    for (&i, c) in x.iter() {
        for v in [
            c.clone() * S::ratio(3, 2),
            c.clone() * S::ratio(1, 2),
            -c.clone(),
            S::zero(),
            c.clone() + quarter.clone(),
            c.clone() - quarter.clone(),
        ] {
            out.push(x.with_coef(i, v).expect("positive index"));
        }
    }
    for j in 1..=window {
        if x.get(j).is_none() {
            out.push(x.with_coef(j, half.clone()).expect("positive index"));
            out.push(x.with_coef(j, -half.clone()).expect("positive index"));
        }
    }
    out
}

/// Steepest-ascent hill climbing: repeatedly moves to the best strictly improving
/// neighbour, keeping the first one on ties so the result is deterministic.
pub fn hill_climb<T, S, F, N>(start: T, start_score: S, rounds: usize, score: F, neighbours: N) -> (T, S, usize)
where
    T: Clone + Send + Sync,
    S: Scalar,
    F: Fn(&T) -> Option<S> + Sync,
    N: Fn(&T) -> Vec<T>,
{
    let mut cur = start;
    let mut cur_score = start_score;
    let mut evaluated = 0usize;
    for _ in 0..rounds {
        let cands = neighbours(&cur);
        evaluated += cands.len();
        let scored: Vec<Option<S>> = cands.par_iter().map(&score).collect();
        let mut best: Option<(usize, S)> = None;
        for (k, s) in scored.into_iter().enumerate() {
            if let Some(s) = s {
                if s.approx_cmp(&cur_score).is_gt() && best.as_ref().is_none_or(|(_, b)| s > *b) {
                    best = Some((k, s));
                }
            }
        }
        match best {
            Some((k, s)) => {
                cur = cands[k].clone();
                cur_score = s;
            }
            None => break,
        }
    }
    (cur, cur_score, evaluated)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn small_windows_are_enumerated() {
        let spec = SamplerSpec::default();
        let signs: Vec<SparseVector<Rational>> = spec.sign_layer(3);
        assert_eq!(signs.len(), 26);
        let grid: Vec<SparseVector<Rational>> = spec.grid_layer(2);
        assert_eq!(grid.len(), 2 * 6 + 36);
    }

    #[test]
    fn streams_depend_only_on_the_seed() {
        let a: Vec<SparseVector<Rational>> = SamplerSpec::with_seed(7).vectors(12);
        let b: Vec<SparseVector<Rational>> = SamplerSpec::with_seed(7).vectors(12);
        let c: Vec<SparseVector<Rational>> = SamplerSpec::with_seed(8).vectors(12);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.iter().all(|x| x.check_window(12).is_ok() && !x.is_zero()));
    }
}
