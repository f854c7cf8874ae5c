//! Switching functions, the top switching function of a balanced set, and
//! deletion, restriction and contraction of weighted gain graphs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gain_graph::{Edge, EdgeSet, GainGraph, GraphError, SpanningPartition};
use crate::lattice::LatticeVector;
use crate::weights::{combine_all, Weight};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeightedGraphError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("expected {expected} vertex weights, found {found}")]
    WeightCount { expected: usize, found: usize },
    #[error("weight of vertex {vertex} has dimension {found}, expected {expected}")]
    WeightDimension { vertex: usize, expected: usize, found: usize },
}

/// A function `V -> Z^d`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SwitchingFunction(pub Vec<LatticeVector>);

impl SwitchingFunction {
    pub fn zero(n: usize, dim: usize) -> Self {
        SwitchingFunction(vec![LatticeVector::zero(dim); n])
    }

    pub fn value(&self, v: usize) -> &LatticeVector {
        &self.0[v]
    }

    pub fn negated(&self) -> Self {
        SwitchingFunction(self.0.iter().map(|x| -x).collect())
    }

    /// Gain of `edge` after switching.
    pub fn switched_edge(&self, edge: &Edge) -> Edge {
        match edge {
            Edge::Link { tail, head, gain } => {
                Edge::Link { tail: *tail, head: *head, gain: &(gain - &self.0[*tail]) + &self.0[*head] }
            }
            other => other.clone(),
        }
    }
}

/// `η_S` on every balanced block of `partition`, zero on unbalanced blocks:
/// `η(v)` is the join of the gains of paths from `v` to the vertices of its block.
pub fn top_switching_of(partition: &SpanningPartition, dim: usize) -> SwitchingFunction {
    let n = partition.block_of.len();
    let mut eta = SwitchingFunction::zero(n, dim);
    for b in partition.balanced_blocks() {
        let block = &partition.blocks[b];
        let top = block
            .iter()
            .map(|&w| &partition.potential[w])
            .fold(None::<LatticeVector>, |acc, p| Some(acc.map_or_else(|| p.clone(), |a| a.join(p))))
            .expect("blocks are non-empty");
        for &v in block {
            eta.0[v] = &top - &partition.potential[v];
        }
    }
    eta
}

/// The top switching function of a balanced edge set.
pub fn top_switching(g: &GainGraph, s: EdgeSet) -> Result<SwitchingFunction, GraphError> {
    let partition = g.components(s);
    if !partition.is_balanced() {
        return Err(GraphError::Unbalanced(s));
    }
    Ok(top_switching_of(&partition, g.dim()))
}

/// A gain graph with a weight from the semigroup `W` on every vertex.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeightedGainGraph<W> {
    graph: GainGraph,
    weights: Vec<W>,
}

/// Result of contracting an edge set.
#[derive(Clone, Debug)]
pub struct Contraction<W> {
    pub graph: WeightedGainGraph<W>,
    /// Original index of every edge of the contracted graph.
    pub edge_map: Vec<usize>,
    /// Original vertices merged into each new vertex.
    pub blocks: Vec<Vec<usize>>,
}

impl<W: Weight> WeightedGainGraph<W> {
    pub fn new(graph: GainGraph, weights: Vec<W>) -> Result<Self, WeightedGraphError> {
        if weights.len() != graph.vertex_count() {
            return Err(WeightedGraphError::WeightCount { expected: graph.vertex_count(), found: weights.len() });
        }
        for (vertex, w) in weights.iter().enumerate() {
            if let Some(found) = w.dim() {
                if found != graph.dim() {
                    return Err(WeightedGraphError::WeightDimension { vertex, expected: graph.dim(), found });
                }
            }
        }
        Ok(Self { graph, weights })
    }

    pub fn graph(&self) -> &GainGraph {
        &self.graph
    }

    pub fn weights(&self) -> &[W] {
        &self.weights
    }

    pub fn weight(&self, v: usize) -> &W {
        &self.weights[v]
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// `h^η` and `φ^η`.
    pub fn switch(&self, eta: &SwitchingFunction) -> Self {
        let edges = self.graph.edges().iter().map(|e| eta.switched_edge(e)).collect();
        let graph = GainGraph::new(self.graph.dim(), self.graph.vertex_count(), edges).expect("switching keeps validity");
        let weights = self.weights.iter().zip(&eta.0).map(|(w, g)| w.act(g)).collect();
        Self { graph, weights }
    }

    /// Remove the edges of `s`.
    pub fn delete(&self, s: EdgeSet) -> (Self, Vec<usize>) {
        self.restrict(self.graph.all_edges().minus(s))
    }

    /// Keep only the edges of `s`.
    pub fn restrict(&self, s: EdgeSet) -> (Self, Vec<usize>) {
        let (graph, map) = self.graph.retain_edges(s);
        (Self { graph, weights: self.weights.clone() }, map)
    }

    /// `h/S(W)` for each balanced block of `partition`, in block order.
    pub fn block_weights(&self, partition: &SpanningPartition) -> Vec<W> {
        let eta = top_switching_of(partition, self.graph.dim());
        partition
            .balanced_blocks()
            .map(|b| {
                let shifted: Vec<W> =
                    partition.blocks[b].iter().map(|&v| self.weights[v].act(eta.value(v))).collect();
                combine_all(shifted.iter()).expect("blocks are non-empty")
            })
            .collect()
    }

    /// `(Φ, h)/S`: delete the vertices of unbalanced blocks, switch by `η_S`,
    /// merge each balanced block, and delete `S`. New vertices follow block
    /// order (smallest original vertex first).
    pub fn contract(&self, s: EdgeSet) -> Contraction<W> {
        let partition = self.graph.components(s);
        let eta = top_switching_of(&partition, self.graph.dim());
        let mut new_index = vec![None; self.graph.vertex_count()];
        let mut blocks = Vec::new();
        for (k, b) in partition.balanced_blocks().enumerate() {
            for &v in &partition.blocks[b] {
                new_index[v] = Some(k);
            }
            blocks.push(partition.blocks[b].clone());
        }
        let weights = self.block_weights(&partition);

        let mut edges = Vec::new();
        let mut edge_map = Vec::new();
        for (e, edge) in self.graph.edges().iter().enumerate() {
            if s.contains(e) {
                continue;
            }
            let contracted = match eta.switched_edge(edge) {
                Edge::Link { tail, head, gain } => match (new_index[tail], new_index[head]) {
                    (Some(t), Some(h)) if t == h => Edge::Loop { vertex: t, gain },
                    (Some(t), Some(h)) => Edge::Link { tail: t, head: h, gain },
                    (Some(x), None) | (None, Some(x)) => Edge::Half { vertex: x },
                    (None, None) => Edge::Loose,
                },
                Edge::Loop { vertex, gain } => match new_index[vertex] {
                    Some(x) => Edge::Loop { vertex: x, gain },
                    None => Edge::Loose,
                },
                Edge::Half { vertex } => match new_index[vertex] {
                    Some(x) => Edge::Half { vertex: x },
                    None => Edge::Loose,
                },
                Edge::Loose => Edge::Loose,
            };
            edges.push(contracted);
            edge_map.push(e);
        }
        let graph = GainGraph::new(self.graph.dim(), blocks.len(), edges).expect("contraction keeps validity");
        Contraction { graph: WeightedGainGraph { graph, weights }, edge_map, blocks }
    }

    /// Disjoint union, with the vertices of `other` after ours.
    pub fn disjoint_union(&self, other: &Self) -> Result<Self, WeightedGraphError> {
        let graph = self.graph.disjoint_union(&other.graph)?;
        let mut weights = self.weights.clone();
        weights.extend(other.weights.iter().cloned());
        Self::new(graph, weights)
    }

    /// Same graph and gains with weights replaced through `f`.
    pub fn map_weights<W2: Weight>(&self, f: impl Fn(&W) -> W2) -> WeightedGainGraph<W2> {
        WeightedGainGraph { graph: self.graph.clone(), weights: self.weights.iter().map(f).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{MaxZd, SumZd};
    use proptest::prelude::*;

    fn v(c: &[i64]) -> LatticeVector {
        LatticeVector::from(c.to_vec())
    }

    fn phi_star() -> WeightedGainGraph<MaxZd> {
        let edges = vec![
            Edge::Link { tail: 0, head: 1, gain: v(&[0, 0]) },
            Edge::Link { tail: 0, head: 1, gain: v(&[2, 0]) },
            Edge::Link { tail: 0, head: 1, gain: v(&[-1, 2]) },
        ];
        WeightedGainGraph::new(GainGraph::new(2, 2, edges).unwrap(), vec![MaxZd(v(&[2, 0])), MaxZd(v(&[-1, 3]))])
            .unwrap()
    }

    #[test]
    fn top_switching_examples() {
        let g = phi_star();
        let eta = top_switching(g.graph(), EdgeSet::singleton(1)).unwrap();
        assert_eq!(eta.0, vec![v(&[2, 0]), v(&[0, 0])]);
        let eta = top_switching(g.graph(), EdgeSet::singleton(2)).unwrap();
        assert_eq!(eta.0, vec![v(&[0, 2]), v(&[1, 0])]);
        let eta = top_switching(g.graph(), EdgeSet::EMPTY).unwrap();
        assert_eq!(eta, SwitchingFunction::zero(2, 2));
        assert!(top_switching(g.graph(), EdgeSet::from_indices([0, 1])).is_err());
    }

    #[test]
    fn switch_examples() {
        let g = phi_star();
        let eta = top_switching(g.graph(), EdgeSet::singleton(2)).unwrap();
        let s = g.switch(&eta);
        assert_eq!(s.weights(), &[MaxZd(v(&[2, 2])), MaxZd(v(&[0, 3]))]);
        match s.graph().edge(2) {
            Edge::Link { gain, .. } => assert!(gain.is_zero()),
            _ => unreachable!(),
        }
        assert_eq!(g.switch(&SwitchingFunction::zero(2, 2)), g);
        assert_eq!(s.switch(&eta.negated()), g);
    }

    #[test]
    fn contraction_examples() {
        let g = phi_star();
        let c = g.contract(EdgeSet::singleton(0));
        assert_eq!(c.graph.weights(), &[MaxZd(v(&[2, 3]))]);
        assert_eq!(c.edge_map, vec![1, 2]);
        assert_eq!(
            c.graph.graph().edges(),
            &[Edge::Loop { vertex: 0, gain: v(&[2, 0]) }, Edge::Loop { vertex: 0, gain: v(&[-1, 2]) }]
        );
        assert_eq!(g.contract(EdgeSet::singleton(1)).graph.weights(), &[MaxZd(v(&[4, 3]))]);
        assert_eq!(g.contract(EdgeSet::singleton(2)).graph.weights(), &[MaxZd(v(&[2, 3]))]);

        let c = g.contract(EdgeSet::from_indices([0, 1]));
        assert_eq!(c.graph.vertex_count(), 0);
        assert!(c.graph.weights().is_empty());
        assert_eq!(c.graph.graph().edges(), &[Edge::Loose]);
    }

    #[test]
    fn delete_and_restrict_identities() {
        let g = phi_star();
        assert_eq!(g.delete(EdgeSet::EMPTY).0, g);
        assert_eq!(g.restrict(g.graph().all_edges()).0, g);
        let (d, map) = g.delete(EdgeSet::singleton(1));
        assert_eq!(map, vec![0, 2]);
        assert_eq!(d.edge_count(), 2);
    }

    #[test]
    fn contraction_degrades_edges_at_deleted_vertices() {
        let edges = vec![
            Edge::Link { tail: 0, head: 1, gain: v(&[1]) },
            Edge::Half { vertex: 0 },
            Edge::Link { tail: 1, head: 2, gain: v(&[0]) },
            Edge::Loop { vertex: 0, gain: v(&[3]) },
        ];
        let g = WeightedGainGraph::new(
            GainGraph::new(1, 3, edges).unwrap(),
            vec![SumZd::new(v(&[0])), SumZd::new(v(&[1])), SumZd::new(v(&[5]))],
        )
        .unwrap();
        let c = g.contract(EdgeSet::singleton(1));
        assert_eq!(c.blocks, vec![vec![1], vec![2]]);
        assert_eq!(
            c.graph.graph().edges(),
            &[Edge::Half { vertex: 0 }, Edge::Link { tail: 0, head: 1, gain: v(&[0]) }, Edge::Loose]
        );
        assert_eq!(c.graph.weights(), &[SumZd::new(v(&[1])), SumZd::new(v(&[5]))]);
    }

    fn random_graph() -> impl Strategy<Value = WeightedGainGraph<MaxZd>> {
        (1usize..=4, 1usize..=2).prop_flat_map(|(n, d)| {
            let edge = (0..n, 0..n, prop::collection::vec(-2i64..=2, d)).prop_map(|(t, h, g)| {
                if t == h {
                    Edge::Loop { vertex: t, gain: LatticeVector::from(g) }
                } else {
                    Edge::Link { tail: t, head: h, gain: LatticeVector::from(g) }
                }
            });
            (
                prop::collection::vec(edge, 0..=6),
                prop::collection::vec(prop::collection::vec(-3i64..=3, d), n),
            )
                .prop_map(move |(edges, ws)| {
                    WeightedGainGraph::new(
                        GainGraph::new(d, n, edges).unwrap(),
                        ws.into_iter().map(|w| MaxZd(LatticeVector::from(w))).collect(),
                    )
                    .unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn top_switching_kills_gains_with_meet_zero(g in random_graph(), mask in any::<u64>()) {
            let s = EdgeSet(mask).intersection(g.graph().all_edges());
            let partition = g.graph().components(s);
            prop_assume!(partition.is_balanced());
            let eta = top_switching(g.graph(), s).unwrap();
            let switched = g.switch(&eta);
            for e in s.iter() {
                if let Edge::Link { gain, .. } | Edge::Loop { gain, .. } = switched.graph().edge(e) {
                    prop_assert!(gain.is_zero());
                }
            }
            for block in &partition.blocks {
                let meet = block.iter().map(|&v| eta.value(v).clone()).reduce(|a, b| a.meet(&b)).unwrap();
                prop_assert!(meet.is_zero());
            }
        }

        #[test]
        fn repeated_contraction(g in random_graph(), mask in any::<u64>(), split in any::<u64>()) {
            let all = g.graph().all_edges();
            let s = EdgeSet(mask).intersection(all);
            let q = s.intersection(EdgeSet(split));
            let r = s.minus(q);
            let first = g.contract(q);
            let r_new = r.reindex(&first.edge_map);
            let twice = first.graph.contract(r_new);
            let once = g.contract(s);
            prop_assert_eq!(&twice.graph, &once.graph);
            let composed: Vec<usize> = twice.edge_map.iter().map(|&e| first.edge_map[e]).collect();
            prop_assert_eq!(composed, once.edge_map);
        }
    }
}
