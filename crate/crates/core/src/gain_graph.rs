//! Gain graphs over `Z^d`: edge taxonomy, components, balance, balanced
//! closure and the semilattice of closed balanced sets with its Möbius
//! function.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::LatticeVector;

/// Largest supported edge count. One bit of the `u64` mask is kept free for
/// the extra point of the complete lift matroid.
pub const MAX_EDGES: usize = 63;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("edge {edge} has gain of dimension {found}, expected {expected}")]
    GainDimension { edge: usize, expected: usize, found: usize },
    #[error("graph dimension must be at least 1")]
    ZeroDimension,
    #[error("{0} edges exceed the supported maximum of {MAX_EDGES}")]
    TooManyEdges(usize),
    #[error("edge index {0} out of range")]
    EdgeOutOfRange(usize),
    #[error("walk step {step} does not start where the previous step ended")]
    NotIncident { step: usize },
    #[error("walk step {step} uses a half or loose edge")]
    GainlessEdgeInWalk { step: usize },
    #[error("edge set {0} is not balanced")]
    Unbalanced(EdgeSet),
    #[error("edge set {0} is not closed")]
    NotClosed(EdgeSet),
}

/// An edge of a gain graph. Links store one orientation; traversing a link
/// from `head` to `tail` has the negated gain.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Edge {
    Link { tail: usize, head: usize, gain: LatticeVector },
    Loop { vertex: usize, gain: LatticeVector },
    Half { vertex: usize },
    Loose,
}

impl Edge {
    pub fn is_link(&self) -> bool {
        matches!(self, Edge::Link { .. })
    }

    pub fn vertices(&self) -> Vec<usize> {
        match self {
            Edge::Link { tail, head, .. } => vec![*tail, *head],
            Edge::Loop { vertex, .. } | Edge::Half { vertex } => vec![*vertex],
            Edge::Loose => vec![],
        }
    }
}

/// A subset of the edge indices of some host graph.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct EdgeSet(pub u64);

impl EdgeSet {
    pub const EMPTY: EdgeSet = EdgeSet(0);

    /// All of `0..m`.
    pub fn full(m: usize) -> Self {
        assert!(m <= 64);
        if m == 64 {
            EdgeSet(u64::MAX)
        } else {
            EdgeSet((1u64 << m) - 1)
        }
    }

    pub fn singleton(e: usize) -> Self {
        EdgeSet(1u64 << e)
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        EdgeSet(indices.into_iter().fold(0u64, |acc, e| acc | (1u64 << e)))
    }

    pub fn contains(self, e: usize) -> bool {
        e < 64 && self.0 & (1u64 << e) != 0
    }

    pub fn insert(self, e: usize) -> Self {
        EdgeSet(self.0 | (1u64 << e))
    }

    pub fn remove(self, e: usize) -> Self {
        EdgeSet(self.0 & !(1u64 << e))
    }

    pub fn union(self, other: Self) -> Self {
        EdgeSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        EdgeSet(self.0 & other.0)
    }

    pub fn minus(self, other: Self) -> Self {
        EdgeSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let e = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(e)
            }
        })
    }

    /// Every subset of `self`, starting with the empty set.
    pub fn subsets(self) -> impl Iterator<Item = EdgeSet> {
        let mask = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let current = next?;
            next = if current == mask { None } else { Some((current.wrapping_sub(mask)) & mask) };
            Some(EdgeSet(current))
        })
    }

    /// Re-index through `map`, where `map[new] = old`. Old indices without an
    /// image are dropped.
    pub fn reindex(self, map: &[usize]) -> EdgeSet {
        EdgeSet::from_indices(
            map.iter().enumerate().filter(|(_, &old)| self.contains(old)).map(|(new, _)| new),
        )
    }
}

impl fmt::Display for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "e{}", e + 1)?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An edge traversed in a chosen direction. For loops `forward` selects the
/// sign of the gain.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct OrientedEdge {
    pub edge: usize,
    pub forward: bool,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct GainGraph {
    dim: usize,
    n: usize,
    edges: Vec<Edge>,
}

impl GainGraph {
    pub fn new(dim: usize, n: usize, edges: Vec<Edge>) -> Result<Self, GraphError> {
        if dim == 0 {
            return Err(GraphError::ZeroDimension);
        }
        if edges.len() > MAX_EDGES {
            return Err(GraphError::TooManyEdges(edges.len()));
        }
        for (idx, edge) in edges.iter().enumerate() {
            for v in edge.vertices() {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, n });
                }
            }
            if let Edge::Link { gain, .. } | Edge::Loop { gain, .. } = edge {
                if gain.dim() != dim {
                    return Err(GraphError::GainDimension { edge: idx, expected: dim, found: gain.dim() });
                }
            }
        }
        Ok(Self { dim, n, edges })
    }

    pub fn edgeless(dim: usize, n: usize) -> Self {
        Self::new(dim, n, vec![]).expect("edgeless graph is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn all_edges(&self) -> EdgeSet {
        EdgeSet::full(self.edges.len())
    }

    /// Gain of link `e` read from `from` to the other endpoint.
    pub fn gain_from(&self, e: usize, from: usize) -> Option<LatticeVector> {
        match &self.edges[e] {
            Edge::Link { tail, head, gain } if *tail == from => Some(gain.clone()),
            Edge::Link { tail: _, head, gain } if *head == from => Some(-gain),
            Edge::Loop { vertex, gain } if *vertex == from => Some(gain.clone()),
            _ => None,
        }
    }

    pub fn links(&self) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().enumerate().filter(|(_, e)| e.is_link()).map(|(i, _)| i)
    }

    pub fn has_half_edges(&self) -> bool {
        self.edges.iter().any(|e| matches!(e, Edge::Half { .. }))
    }

    /// True when some loop has zero gain or some edge is loose; either makes
    /// the empty set non-closed.
    pub fn has_balanced_loop_or_loose(&self) -> bool {
        self.edges.iter().any(|e| match e {
            Edge::Loop { gain, .. } => gain.is_zero(),
            Edge::Loose => true,
            _ => false,
        })
    }

    /// Same graph with every gain replaced by zero.
    pub fn with_zero_gains(&self) -> Self {
        let zero = LatticeVector::zero(self.dim);
        let edges = self
            .edges
            .iter()
            .map(|e| match e {
                Edge::Link { tail, head, .. } => Edge::Link { tail: *tail, head: *head, gain: zero.clone() },
                Edge::Loop { vertex, .. } => Edge::Loop { vertex: *vertex, gain: zero.clone() },
                other => other.clone(),
            })
            .collect();
        Self { dim: self.dim, n: self.n, edges }
    }

    /// Keep only the edges of `keep`, in index order. Returns the new graph and
    /// the old index of every new edge.
    pub fn retain_edges(&self, keep: EdgeSet) -> (GainGraph, Vec<usize>) {
        let map: Vec<usize> = keep.iter().filter(|&e| e < self.edges.len()).collect();
        let edges = map.iter().map(|&e| self.edges[e].clone()).collect();
        (Self { dim: self.dim, n: self.n, edges }, map)
    }

    /// Disjoint union; vertices and edges of `other` are shifted after ours.
    pub fn disjoint_union(&self, other: &GainGraph) -> Result<GainGraph, GraphError> {
        let shift = self.n;
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|e| match e {
            Edge::Link { tail, head, gain } => {
                Edge::Link { tail: tail + shift, head: head + shift, gain: gain.clone() }
            }
            Edge::Loop { vertex, gain } => Edge::Loop { vertex: vertex + shift, gain: gain.clone() },
            Edge::Half { vertex } => Edge::Half { vertex: vertex + shift },
            Edge::Loose => Edge::Loose,
        }));
        GainGraph::new(self.dim, self.n + other.n, edges)
    }

    fn check_subset(&self, s: EdgeSet) {
        assert!(s.is_subset(self.all_edges()), "edge set {s} not contained in the graph");
    }

    /// Partition of `V` by the components of `(V, s)`, with balance data.
    pub fn components(&self, s: EdgeSet) -> SpanningPartition {
        self.check_subset(s);
        let n = self.n;
        let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for e in s.iter() {
            if let Edge::Link { tail, head, .. } = &self.edges[e] {
                adjacency[*tail].push((e, *head));
                adjacency[*head].push((e, *tail));
            }
        }

        let zero = LatticeVector::zero(self.dim);
        let mut block_of = vec![usize::MAX; n];
        let mut potential = vec![zero.clone(); n];
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for root in 0..n {
            if block_of[root] != usize::MAX {
                continue;
            }
            let id = blocks.len();
            block_of[root] = id;
            let mut members = vec![root];
            let mut stack = vec![root];
            while let Some(v) = stack.pop() {
                for &(e, w) in &adjacency[v] {
                    if block_of[w] == usize::MAX {
                        block_of[w] = id;
                        potential[w] = &potential[v] + &self.gain_from(e, v).expect("incident link");
                        members.push(w);
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            blocks.push(members);
        }

        let mut balanced = vec![true; blocks.len()];
        for e in s.iter() {
            match &self.edges[e] {
                Edge::Link { tail, head, gain } => {
                    if potential[*head] != &potential[*tail] + gain {
                        balanced[block_of[*tail]] = false;
                    }
                }
                Edge::Loop { vertex, gain } => {
                    if !gain.is_zero() {
                        balanced[block_of[*vertex]] = false;
                    }
                }
                Edge::Half { vertex } => balanced[block_of[*vertex]] = false,
                Edge::Loose => {}
            }
        }

        SpanningPartition { block_of, blocks, balanced, potential }
    }

    /// Gain of an oriented walk; consecutive steps must share endpoints.
    pub fn walk_gain(&self, walk: &[OrientedEdge]) -> Result<LatticeVector, GraphError> {
        let mut total = LatticeVector::zero(self.dim);
        let mut position: Option<usize> = None;
        for (step, oe) in walk.iter().enumerate() {
            let edge = self.edges.get(oe.edge).ok_or(GraphError::EdgeOutOfRange(oe.edge))?;
            let (start, end, gain) = match edge {
                Edge::Link { tail, head, gain } => {
                    if oe.forward {
                        (*tail, *head, gain.clone())
                    } else {
                        (*head, *tail, -gain)
                    }
                }
                Edge::Loop { vertex, gain } => {
                    (*vertex, *vertex, if oe.forward { gain.clone() } else { -gain })
                }
                Edge::Half { .. } | Edge::Loose => return Err(GraphError::GainlessEdgeInWalk { step }),
            };
            if let Some(p) = position {
                if p != start {
                    return Err(GraphError::NotIncident { step });
                }
            }
            total = &total + &gain;
            position = Some(end);
        }
        Ok(total)
    }

    /// No half edges and every circle has zero gain.
    pub fn is_balanced(&self, s: EdgeSet) -> bool {
        self.components(s).is_balanced()
    }

    /// `s` plus every edge closing a balanced circle with `s`, together with
    /// all zero-gain loops and loose edges.
    pub fn balanced_closure(&self, s: EdgeSet) -> Result<EdgeSet, GraphError> {
        let partition = self.components(s);
        if !partition.is_balanced() {
            return Err(GraphError::Unbalanced(s));
        }
        Ok(self.closure_with(s, &partition))
    }

    fn closure_with(&self, s: EdgeSet, partition: &SpanningPartition) -> EdgeSet {
        let mut closed = s;
        for (e, edge) in self.edges.iter().enumerate() {
            if s.contains(e) {
                continue;
            }
            let joins = match edge {
                Edge::Link { tail, head, gain } => {
                    partition.block_of[*tail] == partition.block_of[*head]
                        && partition.potential[*head] == &partition.potential[*tail] + gain
                }
                Edge::Loop { gain, .. } => gain.is_zero(),
                Edge::Loose => true,
                Edge::Half { .. } => false,
            };
            if joins {
                closed = closed.insert(e);
            }
        }
        closed
    }

    pub fn is_closed_balanced(&self, s: EdgeSet) -> bool {
        matches!(self.balanced_closure(s), Ok(c) if c == s)
    }

    /// The semilattice of closed balanced sets with `μ(∅, ·)`.
    pub fn lat_b(&self) -> BalancedClosedLattice {
        let mut closed: BTreeSet<(usize, u64)> = BTreeSet::new();
        for s in self.all_edges().subsets() {
            let partition = self.components(s);
            if partition.is_balanced() {
                let c = self.closure_with(s, &partition);
                closed.insert((c.len(), c.0));
            }
        }
        let elements: Vec<EdgeSet> = closed.into_iter().map(|(_, bits)| EdgeSet(bits)).collect();
        let empty_closed = elements.first() == Some(&EdgeSet::EMPTY);
        let mut mobius = vec![0i64; elements.len()];
        if empty_closed {
            for i in 0..elements.len() {
                if i == 0 {
                    mobius[0] = 1;
                    continue;
                }
                let b = elements[i];
                let below: i64 = (0..i)
                    .filter(|&j| elements[j] != b && elements[j].is_subset(b))
                    .map(|j| mobius[j])
                    .sum();
                mobius[i] = -below;
            }
        }
        let index = elements.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        BalancedClosedLattice { elements, mobius, empty_closed, index }
    }

    /// `μ(∅, b)` as the signed count of balanced sets whose closure is `b`.
    pub fn mobius_alternating(&self, b: EdgeSet) -> Result<i64, GraphError> {
        let closure = self.balanced_closure(b)?;
        if closure != b {
            return Err(GraphError::NotClosed(b));
        }
        let mut total = 0i64;
        for sub in b.subsets() {
            let partition = self.components(sub);
            if partition.is_balanced() && self.closure_with(sub, &partition) == b {
                total += if sub.len() % 2 == 0 { 1 } else { -1 };
            }
        }
        Ok(total)
    }
}

/// The partition `π(S)` with balance flags and, per vertex, the gain of a
/// path in `S` from the smallest vertex of its block. The potential is only
/// meaningful inside balanced blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningPartition {
    pub block_of: Vec<usize>,
    /// Blocks ordered by smallest vertex; each block sorted.
    pub blocks: Vec<Vec<usize>>,
    pub balanced: Vec<bool>,
    pub potential: Vec<LatticeVector>,
}

impl SpanningPartition {
    /// `c(S)`.
    pub fn component_count(&self) -> usize {
        self.blocks.len()
    }

    /// `b(S)`.
    pub fn balanced_count(&self) -> usize {
        self.balanced.iter().filter(|&&b| b).count()
    }

    pub fn is_balanced(&self) -> bool {
        self.balanced.iter().all(|&b| b)
    }

    /// Indices of balanced blocks, in block order.
    pub fn balanced_blocks(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.blocks.len()).filter(|&i| self.balanced[i])
    }

    /// `V_0(S)`: vertices lying in unbalanced blocks.
    pub fn unbalanced_vertices(&self) -> Vec<usize> {
        (0..self.block_of.len()).filter(|&v| !self.balanced[self.block_of[v]]).collect()
    }

    /// Gain of any path from `v` to `w` inside a balanced block.
    pub fn path_gain(&self, v: usize, w: usize) -> Option<LatticeVector> {
        let block = self.block_of[v];
        if block != self.block_of[w] || !self.balanced[block] {
            return None;
        }
        Some(&self.potential[w] - &self.potential[v])
    }
}

#[derive(Clone, Debug)]
pub struct BalancedClosedLattice {
    /// Closed balanced sets sorted by size then mask, so every set appears
    /// after all of its subsets.
    pub elements: Vec<EdgeSet>,
    /// `μ(∅, B)` aligned with `elements`; identically zero when `∅` is not closed.
    pub mobius: Vec<i64>,
    pub empty_closed: bool,
    index: HashMap<EdgeSet, usize>,
}

impl BalancedClosedLattice {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn mobius_of(&self, b: EdgeSet) -> Option<i64> {
        self.index.get(&b).map(|&i| self.mobius[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeSet, i64)> + '_ {
        self.elements.iter().copied().zip(self.mobius.iter().copied())
    }

    /// Elements with nonzero Möbius value, the only ones contributing to
    /// inversion sums.
    pub fn support(&self) -> impl Iterator<Item = (EdgeSet, i64)> + '_ {
        self.iter().filter(|&(_, mu)| mu != 0)
    }
}
