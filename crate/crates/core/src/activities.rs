//! The semimatroid of graph balance: rank in the complete lift matroid,
//! fundamental circuits and cocircuits, activities, greedy bases, and the
//! spanning-forest expansion of the balanced dichromatic polynomial.

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::dichromatic::{Monomial, QPolynomial};
use crate::gain_graph::{EdgeSet, GainGraph};
use crate::switching::WeightedGainGraph;
use crate::weights::Weight;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActivityError {
    #[error("{0} is not independent")]
    NotIndependent(EdgeSet),
    #[error("{0} is not balanced")]
    Unbalanced(EdgeSet),
    #[error("edge e{} is not in the closure of the set minus the set", .0 + 1)]
    NotInClosure(usize),
    #[error("edge e{} is not in the set", .0 + 1)]
    NotInSet(usize),
    #[error("ordering is not a permutation of {0} edges")]
    BadOrdering(usize),
}

/// A linear order on the edges, smallest first. The extra point `e0` is
/// placed above every edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeOrdering {
    order: Vec<usize>,
    position: Vec<usize>,
}

impl EdgeOrdering {
    pub fn identity(m: usize) -> Self {
        Self { order: (0..m).collect(), position: (0..=m).collect() }
    }

    /// `order` lists 0-based edge indices from smallest to largest.
    pub fn new(order: Vec<usize>) -> Result<Self, ActivityError> {
        let m = order.len();
        let mut position = vec![usize::MAX; m + 1];
        for (p, &e) in order.iter().enumerate() {
            if e >= m || position[e] != usize::MAX {
                return Err(ActivityError::BadOrdering(m));
            }
            position[e] = p;
        }
        position[m] = m;
        Ok(Self { order, position })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Edges from smallest to largest.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn position(&self, e: usize) -> usize {
        self.position[e]
    }

    /// Largest element of a non-empty set.
    pub fn largest(&self, s: EdgeSet) -> Option<usize> {
        s.iter().max_by_key(|&e| self.position[e])
    }

    /// `E0` from smallest to largest.
    fn ground_order(&self) -> impl DoubleEndedIterator<Item = usize> + '_ {
        self.order.iter().copied().chain(std::iter::once(self.order.len()))
    }
}

/// The complete lift matroid `L0(Φ)` on `E ∪ {e0}`, where `e0` is the bit
/// with index `|E|`.
#[derive(Clone, Copy, Debug)]
pub struct LiftMatroid<'a> {
    graph: &'a GainGraph,
}

impl<'a> LiftMatroid<'a> {
    pub fn new(graph: &'a GainGraph) -> Self {
        Self { graph }
    }

    pub fn e0(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn ground(&self) -> EdgeSet {
        EdgeSet::full(self.graph.edge_count() + 1)
    }

    pub fn rank(&self, s: EdgeSet) -> usize {
        let e0 = self.e0();
        let real = s.remove(e0);
        let partition = self.graph.components(real);
        let base = self.graph.vertex_count() - partition.component_count();
        if s.contains(e0) || !partition.is_balanced() {
            base + 1
        } else {
            base
        }
    }

    pub fn is_independent(&self, s: EdgeSet) -> bool {
        self.rank(s) == s.len()
    }

    pub fn closure(&self, s: EdgeSet) -> EdgeSet {
        let r = self.rank(s);
        self.ground().iter().filter(|&e| s.contains(e) || self.rank(s.insert(e)) == r).fold(EdgeSet::EMPTY, EdgeSet::insert)
    }

    /// Balanced in the semimatroid sense: the closure avoids `e0`.
    pub fn is_balanced(&self, s: EdgeSet) -> bool {
        !self.closure(s).contains(self.e0())
    }

    pub fn is_circuit(&self, c: EdgeSet) -> bool {
        !c.is_empty() && !self.is_independent(c) && c.iter().all(|x| self.is_independent(c.remove(x)))
    }

    /// `C_F(e)`, the unique circuit in `F ∪ e`.
    pub fn fundamental_circuit(&self, f: EdgeSet, e: usize) -> Result<EdgeSet, ActivityError> {
        if !self.is_independent(f) {
            return Err(ActivityError::NotIndependent(f));
        }
        if f.contains(e) || !self.closure(f).contains(e) {
            return Err(ActivityError::NotInClosure(e));
        }
        let with_e = f.insert(e);
        Ok(f.iter().filter(|&x| self.is_independent(with_e.remove(x))).fold(EdgeSet::singleton(e), EdgeSet::insert))
    }

    /// `D_F(x) = clos0(F) \ clos0(F \ x)`.
    pub fn fundamental_cocircuit(&self, f: EdgeSet, x: usize) -> Result<EdgeSet, ActivityError> {
        if !self.is_independent(f) {
            return Err(ActivityError::NotIndependent(f));
        }
        if !f.contains(x) {
            return Err(ActivityError::NotInSet(x));
        }
        Ok(self.closure(f).minus(self.closure(f.remove(x))))
    }

    /// Activities of an independent set of `L0`, computed in `clos0(F)`.
    pub fn activities0(&self, f: EdgeSet, ord: &EdgeOrdering) -> Result<ActivityReport, ActivityError> {
        if !self.is_independent(f) {
            return Err(ActivityError::NotIndependent(f));
        }
        let mut report = ActivityReport::default();
        for e in self.closure(f).minus(f).iter() {
            let c = self.fundamental_circuit(f, e)?;
            if ord.largest(c) == Some(e) {
                report.ea = report.ea.insert(e);
            } else {
                report.ei = report.ei.insert(e);
            }
        }
        for x in f.iter() {
            let d = self.fundamental_cocircuit(f, x)?;
            if ord.largest(d) == Some(x) {
                report.ia = report.ia.insert(x);
            } else {
                report.ii = report.ii.insert(x);
            }
        }
        report.epsilon = report.ea.len();
        report.iota = report.ia.len();
        Ok(report)
    }

    /// Greedy basis of `L0|s` in the order `ord`.
    pub fn minimal_basis(&self, s: EdgeSet, ord: &EdgeOrdering) -> EdgeSet {
        let mut basis = EdgeSet::EMPTY;
        for e in ord.ground_order().filter(|&e| s.contains(e)) {
            if self.is_independent(basis.insert(e)) {
                basis = basis.insert(e);
            }
        }
        basis
    }
}

/// `rk(S)` in the complete lift matroid, or `rk(S ∪ e0)` when `with_e0`.
pub fn lift_rank(g: &GainGraph, s: EdgeSet, with_e0: bool) -> usize {
    let m = LiftMatroid::new(g);
    if with_e0 {
        m.rank(s.insert(m.e0()))
    } else {
        m.rank(s)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ActivityReport {
    pub ea: EdgeSet,
    pub ia: EdgeSet,
    pub ii: EdgeSet,
    pub ei: EdgeSet,
    pub epsilon: usize,
    pub iota: usize,
}

fn check_balanced_independent(g: &GainGraph, f: EdgeSet) -> Result<LiftMatroid<'_>, ActivityError> {
    let m = LiftMatroid::new(g);
    if !m.is_independent(f) {
        return Err(ActivityError::NotIndependent(f));
    }
    if !g.is_balanced(f) {
        return Err(ActivityError::Unbalanced(f));
    }
    Ok(m)
}

pub fn fundamental_circuit(g: &GainGraph, f: EdgeSet, e: usize) -> Result<EdgeSet, ActivityError> {
    LiftMatroid::new(g).fundamental_circuit(f, e)
}

pub fn fundamental_cocircuit(g: &GainGraph, f: EdgeSet, x: usize) -> Result<EdgeSet, ActivityError> {
    LiftMatroid::new(g).fundamental_cocircuit(f, x)
}

/// Activities of a spanning forest (balanced independent set).
pub fn activities(g: &GainGraph, f: EdgeSet, ord: &EdgeOrdering) -> Result<ActivityReport, ActivityError> {
    check_balanced_independent(g, f)?.activities0(f, ord)
}

/// Greedy maximal independent subset of `s ⊆ E`.
pub fn minimal_basis(g: &GainGraph, s: EdgeSet, ord: &EdgeOrdering) -> EdgeSet {
    LiftMatroid::new(g).minimal_basis(s, ord)
}

/// `T(F)`: scan `E \ F` from the largest edge down, keeping each edge that
/// leaves the set independent and balanced.
pub fn reverse_greedy_extension(g: &GainGraph, f: EdgeSet, ord: &EdgeOrdering) -> Result<EdgeSet, ActivityError> {
    let m = check_balanced_independent(g, f)?;
    let mut t = f;
    for &e in ord.order().iter().rev() {
        if t.contains(e) {
            continue;
        }
        let candidate = t.insert(e);
        if m.is_independent(candidate) && g.is_balanced(candidate) {
            t = candidate;
        }
    }
    Ok(t)
}

/// All spanning forests: balanced independent edge sets.
pub fn spanning_forests(g: &GainGraph) -> Vec<EdgeSet> {
    let m = LiftMatroid::new(g);
    g.all_edges().subsets().filter(|&f| g.is_balanced(f) && m.is_independent(f)).collect()
}

/// `Σ_F y^{ε(F)} ∏_{W ∈ π(F)} u_{h/F(W)}` with `y` stored in the `v` slot.
pub fn forest_expansion<W: Weight>(wg: &WeightedGainGraph<W>, ord: &EdgeOrdering) -> QPolynomial<W> {
    let g = wg.graph();
    let m = LiftMatroid::new(g);
    let mut out = QPolynomial::zero();
    for f in spanning_forests(g) {
        let report = m.activities0(f, ord).expect("forests are independent");
        let partition = g.components(f);
        out.add_term(Monomial::new(wg.block_weights(&partition), report.epsilon as u32, 0), BigInt::one());
    }
    out
}
