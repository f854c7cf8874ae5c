//! Vertex weight semigroups with a translation action of the gain group, and
//! the color-set regions used as lists and filters.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{LatticeBox, LatticeVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeightError {
    #[error("exclusion {point} lies outside the cone at {apex}")]
    ExclusionOutsideCone { point: LatticeVector, apex: LatticeVector },
    #[error("weight has dimension {found}, expected {expected}")]
    Dimension { expected: usize, found: usize },
}

/// A commutative semigroup `(W, +)` with a right action of `(Z^d, +)`
/// satisfying `(w + w')g = wg + w'g`, `(wg)g' = w(g + g')` and `w0 = w`.
///
/// `Ord` provides the canonical key used for polynomial variables.
pub trait Weight: Clone + Ord + fmt::Debug + fmt::Display + Serialize {
    /// Semigroup name used in file formats.
    const TAG: &'static str;

    fn combine(&self, other: &Self) -> Self;

    fn act(&self, g: &LatticeVector) -> Self;

    /// Lattice dimension of the weight, if it has one.
    fn dim(&self) -> Option<usize>;
}

/// Sum of a non-empty sequence of weights.
pub fn combine_all<'a, W: Weight + 'a>(mut items: impl Iterator<Item = &'a W>) -> Option<W> {
    let first = items.next()?.clone();
    Some(items.fold(first, |acc, w| acc.combine(w)))
}

/// `Z^d` under componentwise maximum.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MaxZd(pub LatticeVector);

impl Weight for MaxZd {
    const TAG: &'static str = "max-zd";

    fn combine(&self, other: &Self) -> Self {
        MaxZd(self.0.join(&other.0))
    }

    fn act(&self, g: &LatticeVector) -> Self {
        MaxZd(&self.0 + g)
    }

    fn dim(&self) -> Option<usize> {
        Some(self.0.dim())
    }
}

impl fmt::Display for MaxZd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `Z^d` under vector addition, carrying the number of vertex weights summed.
///
/// Translating a sum of `k` vertex weights by `g` adds `k g`, which is the
/// translation distributed over the summands; a bare vector sum with plain
/// translation would violate `(w + w')g = wg + w'g`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct SumZd {
    pub sum: LatticeVector,
    pub count: u64,
}

impl SumZd {
    /// A single vertex weight.
    pub fn new(w: LatticeVector) -> Self {
        Self { sum: w, count: 1 }
    }
}

impl Weight for SumZd {
    const TAG: &'static str = "sum-zd";

    fn combine(&self, other: &Self) -> Self {
        Self { sum: &self.sum + &other.sum, count: self.count + other.count }
    }

    fn act(&self, g: &LatticeVector) -> Self {
        let k = i64::try_from(self.count).expect("multiplicity fits in i64");
        let shift = LatticeVector::from(g.coords().iter().map(|x| x.checked_mul(k).expect("lattice coordinate overflow")).collect::<Vec<_>>());
        Self { sum: &self.sum + &shift, count: self.count }
    }

    fn dim(&self) -> Option<usize> {
        Some(self.sum.dim())
    }
}

impl fmt::Display for SumZd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.count == 1 {
            self.sum.fmt(f)
        } else {
            write!(f, "{}#{}", self.sum, self.count)
        }
    }
}

/// Finite color lists under intersection.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FiniteList(pub BTreeSet<LatticeVector>);

impl FiniteList {
    pub fn new(points: impl IntoIterator<Item = LatticeVector>) -> Self {
        FiniteList(points.into_iter().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_color_set(&self, dim: usize) -> ColorSet {
        ColorSet::finite(dim, self.0.iter().cloned())
    }
}

impl Weight for FiniteList {
    const TAG: &'static str = "finite-list";

    fn combine(&self, other: &Self) -> Self {
        FiniteList(self.0.intersection(&other.0).cloned().collect())
    }

    fn act(&self, g: &LatticeVector) -> Self {
        FiniteList(self.0.iter().map(|x| x + g).collect())
    }

    fn dim(&self) -> Option<usize> {
        self.0.iter().next().map(LatticeVector::dim)
    }
}

impl fmt::Display for FiniteList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_point_set(f, &self.0)
    }
}

fn write_point_set(f: &mut fmt::Formatter<'_>, points: &BTreeSet<LatticeVector>) -> fmt::Result {
    write!(f, "{{")?;
    for (i, p) in points.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{p}")?;
    }
    write!(f, "}}")
}

/// A principal dual order ideal `<apex>*` minus finitely many points of it.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct ConeMinusFinite {
    apex: LatticeVector,
    exclusions: BTreeSet<LatticeVector>,
}

impl ConeMinusFinite {
    pub fn new(
        apex: LatticeVector,
        exclusions: impl IntoIterator<Item = LatticeVector>,
    ) -> Result<Self, WeightError> {
        let exclusions: BTreeSet<LatticeVector> = exclusions.into_iter().collect();
        for x in &exclusions {
            if x.dim() != apex.dim() {
                return Err(WeightError::Dimension { expected: apex.dim(), found: x.dim() });
            }
            if !apex.le(x) {
                return Err(WeightError::ExclusionOutsideCone { point: x.clone(), apex: apex.clone() });
            }
        }
        Ok(Self { apex, exclusions })
    }

    pub fn cone(apex: LatticeVector) -> Self {
        Self { apex, exclusions: BTreeSet::new() }
    }

    pub fn apex(&self) -> &LatticeVector {
        &self.apex
    }

    pub fn exclusions(&self) -> &BTreeSet<LatticeVector> {
        &self.exclusions
    }

    /// Join of the exclusions, or `apex - 1` when there are none. Every point
    /// of the cone above this vector belongs to the weight.
    pub fn hat(&self) -> LatticeVector {
        let mut it = self.exclusions.iter();
        match it.next() {
            Some(first) => it.fold(first.clone(), |acc, x| acc.join(x)),
            None => self.apex.add_scalar(-1),
        }
    }

    pub fn to_color_set(&self) -> ColorSet {
        ColorSet {
            dim: self.apex.dim(),
            lower: Some(self.apex.clone()),
            upper: None,
            members: None,
            excluded: self.exclusions.clone(),
        }
    }
}

impl Weight for ConeMinusFinite {
    const TAG: &'static str = "cone-minus-finite";

    fn combine(&self, other: &Self) -> Self {
        let apex = self.apex.join(&other.apex);
        let exclusions =
            self.exclusions.iter().chain(other.exclusions.iter()).filter(|x| apex.le(x)).cloned().collect();
        Self { apex, exclusions }
    }

    fn act(&self, g: &LatticeVector) -> Self {
        Self { apex: &self.apex + g, exclusions: self.exclusions.iter().map(|x| x + g).collect() }
    }

    fn dim(&self) -> Option<usize> {
        Some(self.apex.dim())
    }
}

impl fmt::Display for ConeMinusFinite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>*", self.apex)?;
        if !self.exclusions.is_empty() {
            write!(f, "\\")?;
            write_point_set(f, &self.exclusions)?;
        }
        Ok(())
    }
}

/// A subset of `Z^d` of the form `{x : lower <= x <= upper, x in members,
/// x not in excluded}`, where each constraint is optional.
///
/// Kept in a normal form: an explicit member list absorbs all other
/// constraints, an empty box becomes the empty member list, and `excluded`
/// holds only points satisfying the bounds.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct ColorSet {
    dim: usize,
    lower: Option<LatticeVector>,
    upper: Option<LatticeVector>,
    members: Option<BTreeSet<LatticeVector>>,
    excluded: BTreeSet<LatticeVector>,
}

impl ColorSet {
    /// All of `Z^d`.
    pub fn full(dim: usize) -> Self {
        Self { dim, lower: None, upper: None, members: None, excluded: BTreeSet::new() }
    }

    pub fn finite(dim: usize, points: impl IntoIterator<Item = LatticeVector>) -> Self {
        Self { dim, lower: None, upper: None, members: Some(points.into_iter().collect()), excluded: BTreeSet::new() }
    }

    /// The principal order ideal `<m>`.
    pub fn ideal(m: LatticeVector) -> Self {
        Self { dim: m.dim(), lower: None, upper: Some(m), members: None, excluded: BTreeSet::new() }
    }

    /// The principal dual order ideal `<a>*`.
    pub fn cone(a: LatticeVector) -> Self {
        Self { dim: a.dim(), lower: Some(a), upper: None, members: None, excluded: BTreeSet::new() }
    }

    pub fn interval(lo: LatticeVector, hi: LatticeVector) -> Self {
        Self { dim: lo.dim(), lower: Some(lo), upper: Some(hi), members: None, excluded: BTreeSet::new() }
            .normalized()
    }

    /// The region with finitely many points removed.
    pub fn without(&self, points: impl IntoIterator<Item = LatticeVector>) -> Self {
        let mut out = self.clone();
        out.excluded.extend(points);
        out.normalized()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn contains(&self, x: &LatticeVector) -> bool {
        self.lower.as_ref().is_none_or(|l| l.le(x))
            && self.upper.as_ref().is_none_or(|u| x.le(u))
            && self.members.as_ref().is_none_or(|m| m.contains(x))
            && !self.excluded.contains(x)
    }

    fn normalized(mut self) -> Self {
        if let Some(members) = self.members.take() {
            let kept: BTreeSet<LatticeVector> = members
                .into_iter()
                .filter(|x| {
                    self.lower.as_ref().is_none_or(|l| l.le(x))
                        && self.upper.as_ref().is_none_or(|u| x.le(u))
                        && !self.excluded.contains(x)
                })
                .collect();
            return Self { dim: self.dim, lower: None, upper: None, members: Some(kept), excluded: BTreeSet::new() };
        }
        if let (Some(lo), Some(hi)) = (&self.lower, &self.upper) {
            if !lo.le(hi) {
                return Self::finite(self.dim, []);
            }
        }
        let lower = self.lower.clone();
        let upper = self.upper.clone();
        self.excluded.retain(|x| lower.as_ref().is_none_or(|l| l.le(x)) && upper.as_ref().is_none_or(|u| x.le(u)));
        self
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let lower = match (&self.lower, &other.lower) {
            (Some(a), Some(b)) => Some(a.join(b)),
            (a, b) => a.clone().or_else(|| b.clone()),
        };
        let upper = match (&self.upper, &other.upper) {
            (Some(a), Some(b)) => Some(a.meet(b)),
            (a, b) => a.clone().or_else(|| b.clone()),
        };
        let members = match (&self.members, &other.members) {
            (Some(a), Some(b)) => Some(a.intersection(b).cloned().collect()),
            (a, b) => a.clone().or_else(|| b.clone()),
        };
        let excluded = self.excluded.union(&other.excluded).cloned().collect();
        Self { dim: self.dim, lower, upper, members, excluded }.normalized()
    }

    pub fn translate(&self, g: &LatticeVector) -> Self {
        Self {
            dim: self.dim,
            lower: self.lower.as_ref().map(|x| x + g),
            upper: self.upper.as_ref().map(|x| x + g),
            members: self.members.as_ref().map(|m| m.iter().map(|x| x + g).collect()),
            excluded: self.excluded.iter().map(|x| x + g).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.members.is_some() || (self.lower.is_some() && self.upper.is_some())
    }

    /// Number of points, or `None` for an infinite region.
    pub fn count(&self) -> Option<BigUint> {
        if let Some(m) = &self.members {
            return Some(BigUint::from(m.len()));
        }
        match (&self.lower, &self.upper) {
            (Some(lo), Some(hi)) => {
                let b = LatticeBox::new(lo.clone(), hi.clone()).expect("bounds share the region dimension");
                let total = b.count();
                if total.is_zero() {
                    return Some(total);
                }
                Some(total - BigUint::from(self.excluded.len()))
            }
            _ => None,
        }
    }

    /// Explicit point list of a finite region, in lexicographic order.
    pub fn points(&self) -> Option<Vec<LatticeVector>> {
        if let Some(m) = &self.members {
            return Some(m.iter().cloned().collect());
        }
        match (&self.lower, &self.upper) {
            (Some(lo), Some(hi)) => {
                let b = LatticeBox::new(lo.clone(), hi.clone()).expect("bounds share the region dimension");
                Some(b.points().filter(|x| !self.excluded.contains(x)).collect())
            }
            _ => None,
        }
    }
}

impl Weight for ColorSet {
    const TAG: &'static str = "region";

    fn combine(&self, other: &Self) -> Self {
        self.intersect(other)
    }

    fn act(&self, g: &LatticeVector) -> Self {
        self.translate(g)
    }

    fn dim(&self) -> Option<usize> {
        Some(self.dim)
    }
}

impl fmt::Display for ColorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(m) = &self.members {
            return write_point_set(f, m);
        }
        let lo = self.lower.as_ref().map_or("-inf".to_string(), |x| x.to_string());
        let hi = self.upper.as_ref().map_or("+inf".to_string(), |x| x.to_string());
        write!(f, "[{lo},{hi}]")?;
        if !self.excluded.is_empty() {
            write!(f, "\\")?;
            write_point_set(f, &self.excluded)?;
        }
        Ok(())
    }
}

/// A list together with a filter; both combine by intersection and move by
/// translation. The variable `u_(h,M)` of the doubly weighted polynomial.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct DoubleWeight {
    pub list: ColorSet,
    pub filter: ColorSet,
}

impl DoubleWeight {
    pub fn new(list: ColorSet, filter: ColorSet) -> Self {
        Self { list, filter }
    }

    /// `|h ∩ M|`, if finite.
    pub fn effective_count(&self) -> Option<BigUint> {
        self.list.intersect(&self.filter).count()
    }
}

impl Weight for DoubleWeight {
    const TAG: &'static str = "pair";

    fn combine(&self, other: &Self) -> Self {
        Self { list: self.list.intersect(&other.list), filter: self.filter.intersect(&other.filter) }
    }

    fn act(&self, g: &LatticeVector) -> Self {
        Self { list: self.list.translate(g), filter: self.filter.translate(g) }
    }

    fn dim(&self) -> Option<usize> {
        Some(self.list.dim())
    }
}

impl fmt::Display for DoubleWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};{}", self.list, self.filter)
    }
}
