//! The lattice-ordered group `Z^d`: vectors, boxes and cones.
//!
//! Coordinates are stored as `i64`. All arithmetic is checked and panics with
//! `lattice coordinate overflow` rather than wrapping; point counts are
//! returned as [`BigUint`] since they grow as products of side lengths.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("lattice vectors must have dimension at least 1")]
    ZeroDimension,
}

/// An element of `Z^d`, ordered componentwise for lattice operations.
///
/// The derived `Ord` is lexicographic and only used for canonical storage
/// (sorted sets, polynomial keys); it is not the lattice order. Use
/// [`LatticeVector::le`] for the componentwise partial order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVector(Vec<i64>);

impl LatticeVector {
    pub fn new(coords: Vec<i64>) -> Result<Self, LatticeError> {
        if coords.is_empty() {
            return Err(LatticeError::ZeroDimension);
        }
        Ok(Self(coords))
    }

    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1, "lattice vectors must have dimension at least 1");
        Self(vec![0; dim])
    }

    /// The vector with every coordinate equal to `value`.
    pub fn splat(dim: usize, value: i64) -> Self {
        assert!(dim >= 1, "lattice vectors must have dimension at least 1");
        Self(vec![value; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    fn check_dim(&self, other: &Self) -> Result<(), LatticeError> {
        if self.dim() == other.dim() {
            Ok(())
        } else {
            Err(LatticeError::DimensionMismatch { left: self.dim(), right: other.dim() })
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(i64, i64) -> i64) -> Self {
        assert_eq!(self.dim(), other.dim(), "lattice vector dimension mismatch");
        Self(self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn try_join(&self, other: &Self) -> Result<Self, LatticeError> {
        self.check_dim(other)?;
        Ok(self.join(other))
    }

    pub fn try_meet(&self, other: &Self) -> Result<Self, LatticeError> {
        self.check_dim(other)?;
        Ok(self.meet(other))
    }

    /// Componentwise maximum. Panics on dimension mismatch; see [`Self::try_join`].
    pub fn join(&self, other: &Self) -> Self {
        self.zip_with(other, i64::max)
    }

    /// Componentwise minimum. Panics on dimension mismatch; see [`Self::try_meet`].
    pub fn meet(&self, other: &Self) -> Self {
        self.zip_with(other, i64::min)
    }

    /// `x^+`, the componentwise maximum with zero.
    pub fn positive_part(&self) -> Self {
        Self(self.0.iter().map(|&c| c.max(0)).collect())
    }

    /// `x^-`, the componentwise `-min(x, 0)`, so that `x = x^+ - x^-`.
    pub fn negative_part(&self) -> Self {
        Self(self.0.iter().map(|&c| checked_neg(c.min(0))).collect())
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &Self) -> bool {
        assert_eq!(self.dim(), other.dim(), "lattice vector dimension mismatch");
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// The partial order, `None` for incomparable vectors.
    pub fn partial_cmp_lattice(&self, other: &Self) -> Option<Ordering> {
        match (self.le(other), other.le(self)) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => None,
        }
    }

    pub fn add_scalar(&self, value: i64) -> Self {
        Self(self.0.iter().map(|&c| checked_add(c, value)).collect())
    }
}

fn checked_add(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("lattice coordinate overflow")
}

fn checked_sub(a: i64, b: i64) -> i64 {
    a.checked_sub(b).expect("lattice coordinate overflow")
}

fn checked_neg(a: i64) -> i64 {
    a.checked_neg().expect("lattice coordinate overflow")
}

impl Add for &LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: &LatticeVector) -> LatticeVector {
        self.zip_with(rhs, checked_add)
    }
}

impl Sub for &LatticeVector {
    type Output = LatticeVector;
    fn sub(self, rhs: &LatticeVector) -> LatticeVector {
        self.zip_with(rhs, checked_sub)
    }
}

impl Neg for &LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        LatticeVector(self.0.iter().map(|&c| checked_neg(c)).collect())
    }
}

impl Add for LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: LatticeVector) -> LatticeVector {
        &self + &rhs
    }
}

impl Sub for LatticeVector {
    type Output = LatticeVector;
    fn sub(self, rhs: LatticeVector) -> LatticeVector {
        &self - &rhs
    }
}

impl Neg for LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        -&self
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<Vec<i64>> for LatticeVector {
    /// Panics on an empty vector.
    fn from(coords: Vec<i64>) -> Self {
        Self::new(coords).expect("lattice vectors must have dimension at least 1")
    }
}

impl<const D: usize> From<[i64; D]> for LatticeVector {
    fn from(coords: [i64; D]) -> Self {
        Self::from(coords.to_vec())
    }
}

/// Join of a nonempty family.
pub fn join_all<'a>(mut items: impl Iterator<Item = &'a LatticeVector>) -> Option<LatticeVector> {
    let first = items.next()?.clone();
    Some(items.fold(first, |acc, x| acc.join(x)))
}

/// Meet of a nonempty family.
pub fn meet_all<'a>(mut items: impl Iterator<Item = &'a LatticeVector>) -> Option<LatticeVector> {
    let first = items.next()?.clone();
    Some(items.fold(first, |acc, x| acc.meet(x)))
}

/// The integer interval `[lo, hi]` of `Z^d`. Empty when `lo` is not `<= hi`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct LatticeBox {
    pub lo: LatticeVector,
    pub hi: LatticeVector,
}

impl LatticeBox {
    pub fn new(lo: LatticeVector, hi: LatticeVector) -> Result<Self, LatticeError> {
        lo.check_dim(&hi)?;
        Ok(Self { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.coords().iter().zip(self.hi.coords()).any(|(l, h)| l > h)
    }

    /// Side lengths `(hi_k - lo_k + 1)^+`.
    pub fn side_lengths(&self) -> Vec<u64> {
        self.lo
            .coords()
            .iter()
            .zip(self.hi.coords())
            .map(|(&l, &h)| {
                let len = (h as i128) - (l as i128) + 1;
                len.max(0) as u64
            })
            .collect()
    }

    /// Number of lattice points, `prod_k (hi_k - lo_k + 1)^+`.
    pub fn count(&self) -> BigUint {
        self.side_lengths()
            .into_iter()
            .fold(BigUint::one(), |acc, len| acc * BigUint::from(len))
    }

    pub fn contains(&self, x: &LatticeVector) -> bool {
        self.lo.le(x) && x.le(&self.hi)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        Self { lo: self.lo.join(&other.lo), hi: self.hi.meet(&other.hi) }
    }

    pub fn translate(&self, g: &LatticeVector) -> Self {
        Self { lo: &self.lo + g, hi: &self.hi + g }
    }

    /// Every lattice point, in lexicographic order.
    pub fn points(&self) -> BoxPoints {
        BoxPoints {
            lo: self.lo.coords().to_vec(),
            hi: self.hi.coords().to_vec(),
            next: if self.is_empty() { None } else { Some(self.lo.coords().to_vec()) },
        }
    }
}

/// Free function form of [`LatticeBox::count`].
pub fn box_count(b: &LatticeBox) -> BigUint {
    if b.is_empty() {
        BigUint::zero()
    } else {
        b.count()
    }
}

pub struct BoxPoints {
    lo: Vec<i64>,
    hi: Vec<i64>,
    next: Option<Vec<i64>>,
}

impl Iterator for BoxPoints {
    type Item = LatticeVector;

    fn next(&mut self) -> Option<LatticeVector> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut k = succ.len();
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            if succ[k] < self.hi[k] {
                succ[k] += 1;
                self.next = Some(succ);
                break;
            }
            succ[k] = self.lo[k];
        }
        Some(LatticeVector(current))
    }
}

/// The principal dual order ideal `<apex>* = { x : x >= apex }`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Cone {
    pub apex: LatticeVector,
}

impl Cone {
    pub fn new(apex: LatticeVector) -> Self {
        Self { apex }
    }

    pub fn contains(&self, x: &LatticeVector) -> bool {
        self.apex.le(x)
    }

    /// `<a>* ∩ <b>* = <a ∨ b>*`.
    pub fn intersect(&self, other: &Self) -> Self {
        Self { apex: self.apex.join(&other.apex) }
    }
}
