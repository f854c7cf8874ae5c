//! Proper colorations of gain graphs with color lists and filters: improper
//! edge sets, brute-force counts, Möbius inversion over `Lat_b`, and the
//! evaluation of the doubly weighted dichromatic polynomial.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::dichromatic::q_total_subset;
use crate::gain_graph::{Edge, EdgeSet, GainGraph};
use crate::lattice::LatticeVector;
use crate::switching::{top_switching_of, SwitchingFunction, WeightedGainGraph};
use crate::weights::{ColorSet, ConeMinusFinite, DoubleWeight, FiniteList};

/// Largest number of colorations the brute-force oracle will enumerate.
pub const DEFAULT_BRUTE_FORCE_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("graph has half edges; colorations are defined only without them")]
    HalfEdges,
    #[error("graph has loose edges; the inversion formulas need the empty set to be closed without them")]
    LooseEdges,
    #[error("effective list of vertex {} is infinite", .0 + 1)]
    InfiniteList(usize),
    #[error("edge set {0} is not balanced")]
    Unbalanced(EdgeSet),
    #[error("expected {expected} per-vertex entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("{count} colorations exceed the enumeration limit {limit}")]
    TooManyColorations { count: BigUint, limit: u64 },
    #[error("Möbius sum {mobius} disagrees with alternating sum {alternating}")]
    Inconsistent { mobius: BigInt, alternating: BigInt },
}

/// A color assignment `V -> Z^d`.
pub type Coloration = Vec<LatticeVector>;

/// Per-vertex filters `M_i`.
pub type ColorFilter = Vec<ColorSet>;

/// The filter that admits every color.
pub fn full_filter(n: usize, dim: usize) -> ColorFilter {
    vec![ColorSet::full(dim); n]
}

/// Principal ideals `<m_i>`.
pub fn ideal_filter(m: &[LatticeVector]) -> ColorFilter {
    m.iter().cloned().map(ColorSet::ideal).collect()
}

/// Weights usable as color lists.
pub trait ListWeight {
    fn to_list(&self, dim: usize) -> ColorSet;
}

impl ListWeight for FiniteList {
    fn to_list(&self, dim: usize) -> ColorSet {
        self.to_color_set(dim)
    }
}

impl ListWeight for ConeMinusFinite {
    fn to_list(&self, _dim: usize) -> ColorSet {
        self.to_color_set()
    }
}

impl ListWeight for ColorSet {
    fn to_list(&self, _dim: usize) -> ColorSet {
        self.clone()
    }
}

/// Lists of a weighted graph whose weights are color sets.
pub fn lists_of<W: ListWeight + crate::weights::Weight>(wg: &WeightedGainGraph<W>) -> Vec<ColorSet> {
    wg.weights().iter().map(|w| w.to_list(wg.graph().dim())).collect()
}

fn reject_half_edges(g: &GainGraph) -> Result<(), ColoringError> {
    if g.has_half_edges() {
        Err(ColoringError::HalfEdges)
    } else {
        Ok(())
    }
}

fn reject_half_and_loose(g: &GainGraph) -> Result<(), ColoringError> {
    reject_half_edges(g)?;
    if g.edges().iter().any(|e| matches!(e, Edge::Loose)) {
        return Err(ColoringError::LooseEdges);
    }
    Ok(())
}

fn check_len(n: usize, found: usize) -> Result<(), ColoringError> {
    if n == found {
        Ok(())
    } else {
        Err(ColoringError::LengthMismatch { expected: n, found })
    }
}

/// `I(x)`: links with `x_head = x_tail + φ(e)` and zero-gain loops.
pub fn improper_set(g: &GainGraph, x: &[LatticeVector]) -> Result<EdgeSet, ColoringError> {
    reject_half_edges(g)?;
    check_len(g.vertex_count(), x.len())?;
    let mut out = EdgeSet::EMPTY;
    for (e, edge) in g.edges().iter().enumerate() {
        let improper = match edge {
            Edge::Link { tail, head, gain } => x[*head] == &x[*tail] + gain,
            Edge::Loop { gain, .. } => gain.is_zero(),
            Edge::Half { .. } | Edge::Loose => false,
        };
        if improper {
            out = out.insert(e);
        }
    }
    Ok(out)
}

/// Effective lists `h_i ∩ M_i`, each required to be finite.
fn effective_lists(g: &GainGraph, lists: &[ColorSet], filter: &[ColorSet]) -> Result<Vec<ColorSet>, ColoringError> {
    reject_half_and_loose(g)?;
    check_len(g.vertex_count(), lists.len())?;
    check_len(g.vertex_count(), filter.len())?;
    lists
        .iter()
        .zip(filter)
        .enumerate()
        .map(|(i, (h, m))| {
            let eff = h.intersect(m);
            if eff.is_finite() {
                Ok(eff)
            } else {
                Err(ColoringError::InfiniteList(i))
            }
        })
        .collect()
}

/// Count colorations drawn from the effective lists whose improper set is
/// `target`, by exhaustive enumeration.
pub fn count_improper_exactly_bruteforce(
    g: &GainGraph,
    lists: &[ColorSet],
    filter: &[ColorSet],
    target: EdgeSet,
    limit: u64,
) -> Result<BigUint, ColoringError> {
    let effective = effective_lists(g, lists, filter)?;
    let points: Vec<Vec<LatticeVector>> =
        effective.iter().map(|s| s.points().expect("effective lists are finite")).collect();
    let total: BigUint = points.iter().map(|p| BigUint::from(p.len())).product();
    if total > BigUint::from(limit) {
        return Err(ColoringError::TooManyColorations { count: total, limit });
    }
    if points.iter().any(Vec::is_empty) {
        return Ok(BigUint::zero());
    }
    let n = points.len();
    let mut index = vec![0usize; n];
    let mut count = 0u64;
    loop {
        let x: Coloration = (0..n).map(|i| points[i][index[i]].clone()).collect();
        if improper_set(g, &x)? == target {
            count += 1;
        }
        let mut k = 0;
        loop {
            if k == n {
                return Ok(BigUint::from(count));
            }
            index[k] += 1;
            if index[k] < points[k].len() {
                break;
            }
            index[k] = 0;
            k += 1;
        }
    }
}

/// Number of proper colorations, by exhaustive enumeration.
pub fn count_proper_bruteforce(g: &GainGraph, lists: &[ColorSet], filter: &[ColorSet]) -> Result<BigUint, ColoringError> {
    count_improper_exactly_bruteforce(g, lists, filter, EdgeSet::EMPTY, DEFAULT_BRUTE_FORCE_LIMIT)
}

/// One element of an inversion sum: an edge set with its coefficient, the
/// blocks of its balanced partition and its top switching function.
#[derive(Clone, Debug)]
pub struct InversionTerm {
    pub set: EdgeSet,
    pub coefficient: i64,
    pub blocks: Vec<Vec<usize>>,
    pub eta: SwitchingFunction,
}

/// The precomputed terms of a counting formula.
#[derive(Clone, Debug)]
pub struct InversionSum {
    pub terms: Vec<InversionTerm>,
}

impl InversionSum {
    fn term(g: &GainGraph, set: EdgeSet, coefficient: i64) -> InversionTerm {
        let partition = g.components(set);
        let eta = top_switching_of(&partition, g.dim());
        InversionTerm { set, coefficient, blocks: partition.blocks, eta }
    }

    /// `Σ_{B ∈ Lat_b} μ(∅, B) [...]`, keeping only nonzero `μ`.
    pub fn mobius(g: &GainGraph) -> Self {
        let lat = g.lat_b();
        Self { terms: lat.support().map(|(b, mu)| Self::term(g, b, mu)).collect() }
    }

    /// `Σ_{B balanced} (-1)^{|B|} [...]`.
    pub fn alternating(g: &GainGraph) -> Self {
        Self {
            terms: g
                .all_edges()
                .subsets()
                .filter(|&b| g.is_balanced(b))
                .map(|b| Self::term(g, b, if b.len() % 2 == 0 { 1 } else { -1 }))
                .collect(),
        }
    }

    /// `Σ c_B ∏_{W ∈ π(B)} |⋂_{v_i ∈ W} (E_i + η_B(v_i))|` over finite effective lists `E_i`.
    pub fn evaluate(&self, effective: &[ColorSet]) -> BigInt {
        let mut total = BigInt::zero();
        for term in &self.terms {
            let mut product = BigInt::from(term.coefficient);
            for block in &term.blocks {
                let region = block
                    .iter()
                    .map(|&v| effective[v].translate(term.eta.value(v)))
                    .reduce(|a, b| a.intersect(&b))
                    .expect("blocks are non-empty");
                let count = region.count().expect("intersections of finite lists are finite");
                if count.is_zero() {
                    product = BigInt::zero();
                    break;
                }
                product *= BigInt::from(count);
            }
            total += product;
        }
        total
    }
}

/// The list chromatic function with a precomputed inversion sum.
pub fn list_chromatic_with(
    sum: &InversionSum,
    g: &GainGraph,
    lists: &[ColorSet],
    filter: &[ColorSet],
) -> Result<BigInt, ColoringError> {
    let effective = effective_lists(g, lists, filter)?;
    Ok(sum.evaluate(&effective))
}

/// `Σ_{B ∈ Lat_b} μ(∅,B) ∏_W |h/B(W) ∩ M/B(W)|`.
pub fn list_chromatic(g: &GainGraph, lists: &[ColorSet], filter: &[ColorSet]) -> Result<BigInt, ColoringError> {
    let effective = effective_lists(g, lists, filter)?;
    Ok(InversionSum::mobius(g).evaluate(&effective))
}

/// The same count as an alternating sum over all balanced edge sets.
pub fn list_chromatic_alternating(g: &GainGraph, lists: &[ColorSet], filter: &[ColorSet]) -> Result<BigInt, ColoringError> {
    let effective = effective_lists(g, lists, filter)?;
    Ok(InversionSum::alternating(g).evaluate(&effective))
}

/// Proper colorations with finite lists, computed both over `Lat_b` and over
/// balanced sets; the two must agree.
pub fn count_proper_mobius(wg: &WeightedGainGraph<FiniteList>) -> Result<BigInt, ColoringError> {
    let g = wg.graph();
    let lists = lists_of(wg);
    let filter = full_filter(g.vertex_count(), g.dim());
    let mobius = list_chromatic(g, &lists, &filter)?;
    let alternating = list_chromatic_alternating(g, &lists, &filter)?;
    if mobius != alternating {
        return Err(ColoringError::Inconsistent { mobius, alternating });
    }
    Ok(mobius)
}

/// Colorations whose improper set is exactly `b`, as the proper count of the
/// contraction by `b`.
pub fn count_with_improper_exactly(wg: &WeightedGainGraph<FiniteList>, b: EdgeSet) -> Result<BigInt, ColoringError> {
    reject_half_and_loose(wg.graph())?;
    if !wg.graph().is_balanced(b) {
        return Err(ColoringError::Unbalanced(b));
    }
    count_proper_mobius(&wg.contract(b).graph)
}

/// `(-1)^n Q(u, -1, 0)` for the doubly weighted graph, with
/// `u_{(h',M')} = -|h' ∩ M'|`.
pub fn chi_from_q(g: &GainGraph, lists: &[ColorSet], filter: &[ColorSet]) -> Result<BigInt, ColoringError> {
    effective_lists(g, lists, filter)?;
    let weights: Vec<DoubleWeight> =
        lists.iter().zip(filter).map(|(h, m)| DoubleWeight::new(h.clone(), m.clone())).collect();
    let wg = WeightedGainGraph::new(g.clone(), weights).expect("weights match the graph");
    let q = q_total_subset(&wg);
    let value = q
        .evaluate(
            |w| w.effective_count().map(|c| -BigRational::from_integer(BigInt::from(c))),
            &-BigRational::one(),
            &BigRational::zero(),
        )
        .expect("contracted effective lists are finite");
    debug_assert!(value.is_integer());
    let value = value.to_integer();
    Ok(if g.vertex_count().is_multiple_of(2) { value } else { -value })
}

/// Count of a coloring formula as a nonnegative integer.
pub fn to_count(value: &BigInt) -> BigUint {
    assert!(!value.is_negative(), "colorations cannot be negative in number");
    value.magnitude().clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[i64]) -> LatticeVector {
        LatticeVector::from(c.to_vec())
    }

    fn ints(xs: &[i64]) -> ColorSet {
        ColorSet::finite(1, xs.iter().map(|&x| v(&[x])))
    }

    fn k2(gain: i64) -> GainGraph {
        GainGraph::new(1, 2, vec![Edge::Link { tail: 0, head: 1, gain: v(&[gain]) }]).unwrap()
    }

    fn phi_star() -> GainGraph {
        GainGraph::new(
            2,
            2,
            vec![
                Edge::Link { tail: 0, head: 1, gain: v(&[0, 0]) },
                Edge::Link { tail: 0, head: 1, gain: v(&[2, 0]) },
                Edge::Link { tail: 0, head: 1, gain: v(&[-1, 2]) },
            ],
        )
        .unwrap()
    }

    fn all_four(g: &GainGraph, lists: &[ColorSet], filter: &[ColorSet]) -> BigInt {
        let brute = BigInt::from(count_proper_bruteforce(g, lists, filter).unwrap());
        assert_eq!(list_chromatic(g, lists, filter).unwrap(), brute);
        assert_eq!(list_chromatic_alternating(g, lists, filter).unwrap(), brute);
        assert_eq!(chi_from_q(g, lists, filter).unwrap(), brute);
        brute
    }

    #[test]
    fn improper_examples() {
        let g = phi_star();
        assert_eq!(improper_set(&g, &[v(&[0, 0]), v(&[0, 0])]).unwrap(), EdgeSet::singleton(0));
        assert_eq!(improper_set(&g, &[v(&[0, 0]), v(&[5, 5])]).unwrap(), EdgeSet::EMPTY);
        let looped = GainGraph::new(1, 1, vec![Edge::Loop { vertex: 0, gain: v(&[0]) }]).unwrap();
        assert_eq!(improper_set(&looped, &[v(&[3])]).unwrap(), EdgeSet::singleton(0));
        let half = GainGraph::new(1, 1, vec![Edge::Half { vertex: 0 }]).unwrap();
        assert_eq!(improper_set(&half, &[v(&[3])]), Err(ColoringError::HalfEdges));
    }

    #[test]
    fn finite_list_examples() {
        let g = k2(0);
        let lists = vec![ints(&[0, 1, 2]), ints(&[0, 1, 2])];
        let filter = full_filter(2, 1);
        assert_eq!(all_four(&g, &lists, &filter), BigInt::from(6));

        let wg = WeightedGainGraph::new(g.clone(), vec![FiniteList::new([v(&[0]), v(&[1]), v(&[2])]); 2]).unwrap();
        assert_eq!(count_proper_mobius(&wg).unwrap(), BigInt::from(6));
        assert_eq!(count_with_improper_exactly(&wg, EdgeSet::singleton(0)).unwrap(), BigInt::from(3));
        assert_eq!(count_with_improper_exactly(&wg, EdgeSet::EMPTY).unwrap(), BigInt::from(6));

        let edgeless = GainGraph::edgeless(1, 2);
        assert_eq!(all_four(&edgeless, &[ints(&[1, 2, 3]), ints(&[5, 9])], &filter), BigInt::from(6));

        let looped = GainGraph::new(1, 1, vec![Edge::Loop { vertex: 0, gain: v(&[0]) }]).unwrap();
        assert_eq!(all_four(&looped, &[ints(&[1, 2])], &full_filter(1, 1)), BigInt::zero());
    }

    #[test]
    fn path_contraction_keeps_constants() {
        let path = GainGraph::new(
            1,
            3,
            vec![Edge::Link { tail: 0, head: 1, gain: v(&[0]) }, Edge::Link { tail: 1, head: 2, gain: v(&[0]) }],
        )
        .unwrap();
        let list = FiniteList::new((0..=4).map(|x| v(&[x])));
        let wg = WeightedGainGraph::new(path, vec![list; 3]).unwrap();
        assert_eq!(count_with_improper_exactly(&wg, EdgeSet::from_indices([0, 1])).unwrap(), BigInt::from(5));
    }

    #[test]
    fn filtered_examples() {
        let g = k2(1);
        let lists = vec![ColorSet::cone(v(&[0])), ColorSet::cone(v(&[0]))];
        let filter = ideal_filter(&[v(&[1]), v(&[1])]);
        assert_eq!(all_four(&g, &lists, &filter), BigInt::from(3));

        let g = phi_star();
        let lists = vec![ColorSet::cone(v(&[2, 0])), ColorSet::cone(v(&[-1, 3]))];
        let filter = ideal_filter(&[v(&[5, 5]), v(&[5, 5])]);
        all_four(&g, &lists, &filter);

        let lists = vec![ColorSet::interval(v(&[0, 0]), v(&[2, 2])); 2];
        let wg = WeightedGainGraph::new(
            g.clone(),
            vec![FiniteList::new(lists[0].points().unwrap()), FiniteList::new(lists[1].points().unwrap())],
        )
        .unwrap();
        let brute = all_four(&g, &lists, &full_filter(2, 2));
        assert_eq!(count_proper_mobius(&wg).unwrap(), brute);
    }

    #[test]
    fn infinite_lists_are_rejected() {
        let g = k2(0);
        let lists = vec![ColorSet::cone(v(&[0])), ints(&[1])];
        assert_eq!(list_chromatic(&g, &lists, &full_filter(2, 1)), Err(ColoringError::InfiniteList(0)));
        assert_eq!(chi_from_q(&g, &lists, &full_filter(2, 1)), Err(ColoringError::InfiniteList(0)));
    }

    #[test]
    fn enumeration_limit() {
        let g = GainGraph::edgeless(1, 2);
        let big = ColorSet::interval(v(&[0]), v(&[99]));
        let r = count_improper_exactly_bruteforce(&g, &[big.clone(), big], &full_filter(2, 1), EdgeSet::EMPTY, 100);
        assert!(matches!(r, Err(ColoringError::TooManyColorations { .. })));
    }
}
