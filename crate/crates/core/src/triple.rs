//! Ordered real 3-tuples with cyclic index access.
//!
//! Every per-direction quantity of a diagonal metric (`f`, `L`, `R`, the
//! connection coefficients `A`, `B` and the curvature eigenvalues `a`, `b`)
//! is carried as a [`Triple`]. Indices are zero-based in code; the cyclic
//! triples are `(0,1,2)`, `(1,2,0)`, `(2,0,1)`.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Triple(pub [f64; 3]);

/// The cyclic completion `(i, j, k)` of a zero-based index `i`.
#[inline]
pub const fn cyclic(i: usize) -> (usize, usize, usize) {
    (i % 3, (i + 1) % 3, (i + 2) % 3)
}

impl Triple {
    pub const ZERO: Triple = Triple([0.0; 3]);

    #[inline]
    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Triple([x1, x2, x3])
    }

    #[inline]
    pub const fn splat(x: f64) -> Self {
        Triple([x; 3])
    }

    /// Builds a triple by evaluating `g` at each cyclic completion `(i, j, k)`.
    #[inline]
    pub fn from_cyclic(mut g: impl FnMut(usize, usize, usize) -> f64) -> Self {
        Triple([g(0, 1, 2), g(1, 2, 0), g(2, 0, 1)])
    }

    #[inline]
    pub fn map(self, g: impl Fn(f64) -> f64) -> Self {
        Triple(self.0.map(g))
    }

    #[inline]
    pub fn zip_map(self, other: Triple, g: impl Fn(f64, f64) -> f64) -> Self {
        Triple([g(self.0[0], other.0[0]), g(self.0[1], other.0[1]), g(self.0[2], other.0[2])])
    }

    #[inline]
    pub fn sum(self) -> f64 {
        self.0[0] + self.0[1] + self.0[2]
    }

    #[inline]
    pub fn product(self) -> f64 {
        self.0[0] * self.0[1] * self.0[2]
    }

    pub fn max_abs(self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn min(self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max_{i,j} |x_i - x_j|`.
    pub fn spread(self) -> f64 {
        self.max() - self.min()
    }

    pub fn is_finite(self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    /// Cyclic relabeling `(1,2,3) -> (2,3,1)`: the new first entry is the old
    /// second one.
    #[inline]
    pub fn rotate(self) -> Self {
        Triple([self.0[1], self.0[2], self.0[0]])
    }

    /// Reorders entries so that `out[i] = self[perm[i]]`.
    pub fn permute(self, perm: [usize; 3]) -> Self {
        Triple([self.0[perm[0]], self.0[perm[1]], self.0[perm[2]]])
    }

    pub fn dist_inf(self, other: Triple) -> f64 {
        (self - other).max_abs()
    }

    #[inline]
    pub fn as_array(&self) -> &[f64; 3] {
        &self.0
    }
}

impl Index<usize> for Triple {
    type Output = f64;
    #[inline]
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Triple {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for Triple {
    type Output = Triple;
    #[inline]
    fn add(self, o: Triple) -> Triple {
        self.zip_map(o, |a, b| a + b)
    }
}

impl Sub for Triple {
    type Output = Triple;
    #[inline]
    fn sub(self, o: Triple) -> Triple {
        self.zip_map(o, |a, b| a - b)
    }
}

impl Neg for Triple {
    type Output = Triple;
    #[inline]
    fn neg(self) -> Triple {
        self.map(|a| -a)
    }
}

impl Mul<f64> for Triple {
    type Output = Triple;
    #[inline]
    fn mul(self, c: f64) -> Triple {
        self.map(|a| a * c)
    }
}

impl From<[f64; 3]> for Triple {
    fn from(v: [f64; 3]) -> Self {
        Triple(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_completion_is_total() {
        assert_eq!(cyclic(0), (0, 1, 2));
        assert_eq!(cyclic(1), (1, 2, 0));
        assert_eq!(cyclic(2), (2, 0, 1));
        assert_eq!(cyclic(4), cyclic(1));
    }

    #[test]
    fn rotate_three_times_is_identity() {
        let t = Triple::new(1.0, 2.0, 3.0);
        assert_eq!(t.rotate(), Triple::new(2.0, 3.0, 1.0));
        assert_eq!(t.rotate().rotate().rotate(), t);
    }

    #[test]
    fn from_cyclic_matches_index_pattern() {
        let t = Triple::from_cyclic(|i, j, k| (100 * i + 10 * j + k) as f64);
        assert_eq!(t, Triple::new(12.0, 120.0, 201.0));
    }

    #[test]
    fn spread_and_extrema() {
        let t = Triple::new(-1.0, 4.0, 2.0);
        assert_eq!(t.spread(), 5.0);
        assert_eq!(t.max_abs(), 4.0);
        assert_eq!(t.sum(), 5.0);
        assert_eq!(t.product(), -8.0);
    }
}
