use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::curve::{GroundSet, SeparatedSystem};

/// Exact integer type used for curve sums. `i128` is chosen whenever every
/// partial sum provably fits, `BigInt` otherwise.
pub(crate) trait Value: Clone + Eq + Ord + Hash + Send + Sync + Debug {
    fn from_big(v: &BigInt) -> Self;
    fn to_big(&self) -> BigInt;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn vanishes(&self) -> bool;
}

impl Value for i128 {
    fn from_big(v: &BigInt) -> Self {
        v.to_i128().expect("value range checked before choosing i128")
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn vanishes(&self) -> bool {
        *self == 0
    }
}

impl Value for BigInt {
    fn from_big(v: &BigInt) -> Self {
        v.clone()
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
}

/// `gamma(x)` for every element of the ground set, in ground-set order.
pub(crate) struct CurveTable<V> {
    rows: Vec<Vec<V>>,
    r: usize,
}

impl<V: Value> CurveTable<V> {
    pub fn new(sys: &SeparatedSystem, ground: &GroundSet) -> Self {
        let rows = ground
            .elements()
            .iter()
            .map(|&x| sys.evaluate_curve_i64(x).iter().map(V::from_big).collect())
            .collect();
        CurveTable { rows, r: sys.r() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn value(&self, i: usize) -> &[V] {
        &self.rows[i]
    }

    pub fn tuple_sum(&self, idx: &[usize]) -> Vec<V> {
        let mut acc = self.rows[idx[0]].clone();
        for &i in &idx[1..] {
            for j in 0..self.r {
                acc[j] = acc[j].add(&self.rows[i][j]);
            }
        }
        acc
    }
}

/// Upper bound on every intermediate: `k * max |phi_j(x)| + |a_j|`.
pub(crate) fn magnitude_bound(sys: &SeparatedSystem, ground: &GroundSet, k: usize, a: &[BigInt]) -> BigInt {
    let mut bound = BigInt::zero();
    for &x in ground.elements() {
        for v in sys.evaluate_curve_i64(x) {
            bound = bound.max(v.abs());
        }
    }
    let amax = a.iter().map(|v| v.abs()).max().unwrap_or_default();
    bound * BigInt::from(k.max(1) * 2) + amax
}

pub(crate) fn fits_i128(bound: &BigInt) -> bool {
    bound.bits() < 120
}
