//! Affinographic arrangements as gain graphs: lattice points of orthotopes
//! and lists outside the arrangement, the piecewise polynomial list chromatic
//! function of cone-minus-finite weights, and row-affinographic matrix counts.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coloring::{ideal_filter, list_chromatic, ColoringError, InversionSum, InversionTerm};
use crate::gain_graph::{Edge, GainGraph, GraphError};
use crate::lattice::{LatticeBox, LatticeVector};
use crate::mpoly::MPoly;
use crate::switching::WeightedGainGraph;
use crate::weights::{ColorSet, ConeMinusFinite};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrthotopeError {
    #[error("hyperplane {index} is x_{i} = x_{i} + 0, which is the whole space", i = .vertex + 1)]
    DegenerateHyperplane { index: usize, vertex: usize },
    #[error("hyperplane {index} names coordinate {coordinate}, but n = {n}")]
    CoordinateOutOfRange { index: usize, coordinate: usize, n: usize },
    #[error("expected dimension {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("this count is defined only for scalar hyperplanes (d = 1)")]
    NotScalar,
    #[error("bound m_{} = {value} is negative", .index + 1)]
    NegativeBound { index: usize, value: i64 },
    #[error("graph has a balanced loop or a loose edge")]
    BalancedLoopOrLoose,
    #[error("graph has half edges")]
    HalfEdges,
    #[error("graph is not simple: {0}")]
    NotSimple(&'static str),
    #[error("edge {0} has a nonzero gain")]
    NonzeroGain(usize),
    #[error("lower matrix row {} is not below the upper row", .0 + 1)]
    LowerAboveUpper(usize),
    #[error("{count} candidate points exceed the enumeration limit {limit}")]
    TooManyPoints { count: BigUint, limit: u64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
}

/// Largest number of candidate points the brute-force oracles will scan.
pub const BRUTE_FORCE_LIMIT: u64 = 10_000_000;

/// The hyperplane (or row subspace) `x_j = x_i + a`, with 0-based `i`, `j`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Hyperplane {
    pub i: usize,
    pub j: usize,
    pub a: LatticeVector,
}

impl Hyperplane {
    pub fn contains(&self, x: &[LatticeVector]) -> bool {
        x[self.j] == &x[self.i] + &self.a
    }
}

/// A finite family of affinographic hyperplanes in `(Z^d)^n`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct AffinographicArrangement {
    n: usize,
    d: usize,
    hyperplanes: Vec<Hyperplane>,
}

impl AffinographicArrangement {
    /// Validates indices and dimensions. `i = j` is accepted only with
    /// `a != 0`; such a constraint is empty and becomes an unbalanced loop.
    pub fn new(n: usize, d: usize, hyperplanes: Vec<Hyperplane>) -> Result<Self, OrthotopeError> {
        if d == 0 {
            return Err(GraphError::ZeroDimension.into());
        }
        for (index, h) in hyperplanes.iter().enumerate() {
            for coordinate in [h.i, h.j] {
                if coordinate >= n {
                    return Err(OrthotopeError::CoordinateOutOfRange { index, coordinate: coordinate + 1, n });
                }
            }
            if h.a.dim() != d {
                return Err(OrthotopeError::Dimension { expected: d, found: h.a.dim() });
            }
            if h.i == h.j && h.a.is_zero() {
                return Err(OrthotopeError::DegenerateHyperplane { index, vertex: h.i });
            }
        }
        Ok(Self { n, d, hyperplanes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn hyperplanes(&self) -> &[Hyperplane] {
        &self.hyperplanes
    }

    /// True when `x` lies on no hyperplane.
    pub fn avoids(&self, x: &[LatticeVector]) -> bool {
        !self.hyperplanes.iter().any(|h| h.contains(x))
    }

    pub fn to_gain_graph(&self) -> GainGraph {
        let edges = self
            .hyperplanes
            .iter()
            .map(|h| {
                if h.i == h.j {
                    Edge::Loop { vertex: h.i, gain: h.a.clone() }
                } else {
                    Edge::Link { tail: h.i, head: h.j, gain: h.a.clone() }
                }
            })
            .collect();
        GainGraph::new(self.d, self.n, edges).expect("validated arrangement")
    }
}

pub fn arrangement_to_gain_graph(arr: &AffinographicArrangement) -> GainGraph {
    arr.to_gain_graph()
}

fn check_len(expected: usize, found: usize) -> Result<(), OrthotopeError> {
    if expected == found {
        Ok(())
    } else {
        Err(OrthotopeError::LengthMismatch { expected, found })
    }
}

fn check_dims(d: usize, vs: &[LatticeVector]) -> Result<(), OrthotopeError> {
    match vs.iter().find(|v| v.dim() != d) {
        Some(v) => Err(OrthotopeError::Dimension { expected: d, found: v.dim() }),
        None => Ok(()),
    }
}

/// Number of points of `C_1 x ... x C_n` outside the arrangement, by scanning
/// every tuple.
pub fn count_avoiding_bruteforce(
    arr: &AffinographicArrangement,
    candidates: &[Vec<LatticeVector>],
) -> Result<BigUint, OrthotopeError> {
    check_len(arr.n, candidates.len())?;
    let total = candidates.iter().fold(BigUint::one(), |acc, c| acc * BigUint::from(c.len()));
    if total > BigUint::from(BRUTE_FORCE_LIMIT) {
        return Err(OrthotopeError::TooManyPoints { count: total, limit: BRUTE_FORCE_LIMIT });
    }
    if candidates.iter().any(|c| c.is_empty()) {
        return Ok(BigUint::zero());
    }
    let n = arr.n;
    let mut idx = vec![0usize; n];
    let mut x: Vec<LatticeVector> = candidates.iter().map(|c| c[0].clone()).collect();
    let mut count = 0u64;
    loop {
        if arr.avoids(&x) {
            count += 1;
        }
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(BigUint::from(count));
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < candidates[k].len() {
                x[k] = candidates[k][idx[k]].clone();
                break;
            }
            idx[k] = 0;
            x[k] = candidates[k][0].clone();
        }
    }
}

fn scalar_interval(lo: i64, hi: i64) -> Vec<LatticeVector> {
    (lo..=hi).map(|t| LatticeVector::from(vec![t])).collect()
}

fn check_scalar_bounds(arr: &AffinographicArrangement, m: &[i64]) -> Result<(), OrthotopeError> {
    if arr.d != 1 {
        return Err(OrthotopeError::NotScalar);
    }
    check_len(arr.n, m.len())?;
    match m.iter().position(|&v| v < 0) {
        Some(index) => Err(OrthotopeError::NegativeBound { index, value: m[index] }),
        None => Ok(()),
    }
}

/// Lattice points of `[0,m_1] x ... x [0,m_n]` outside a scalar arrangement:
/// `Σ_B μ(∅,B) ∏_k (1 + min_{v ∈ W_k} [m_v + φ(B_{v t_k})] - g_k)^+`, where
/// `t_k` is a top vertex of the block and `g_k` the largest such path gain.
pub fn count_orthotope(arr: &AffinographicArrangement, m: &[i64]) -> Result<BigUint, OrthotopeError> {
    check_scalar_bounds(arr, m)?;
    let g = arr.to_gain_graph();
    let lat = g.lat_b();
    let mut total = BigInt::zero();
    for (b, mu) in lat.support() {
        let partition = g.components(b);
        let mut product = BigInt::from(mu);
        for block in &partition.blocks {
            let top = *block
                .iter()
                .max_by_key(|&&v| partition.potential[v].coords()[0])
                .expect("blocks are non-empty");
            let shift = |v: usize| partition.path_gain(v, top).expect("balanced block").coords()[0];
            let upper = block.iter().map(|&v| m[v] + shift(v)).min().expect("non-empty");
            let g_k = block.iter().map(|&v| shift(v)).max().expect("non-empty");
            let side = (1 + upper - g_k).max(0);
            product *= side;
            if product.is_zero() {
                break;
            }
        }
        total += product;
    }
    Ok(crate::coloring::to_count(&total))
}

pub fn count_orthotope_bruteforce(arr: &AffinographicArrangement, m: &[i64]) -> Result<BigUint, OrthotopeError> {
    check_scalar_bounds(arr, m)?;
    let candidates: Vec<_> = m.iter().map(|&mi| scalar_interval(0, mi)).collect();
    count_avoiding_bruteforce(arr, &candidates)
}

/// Points of `L_1 x ... x L_n` outside the arrangement, as
/// `Σ_{B balanced} (-1)^{|B|} ∏_W |⋂_{v_i ∈ W} (L_i + η_B(v_i))|`.
pub fn count_lists(arr: &AffinographicArrangement, lists: &[BTreeSet<LatticeVector>]) -> Result<BigUint, OrthotopeError> {
    check_len(arr.n, lists.len())?;
    for l in lists {
        check_dims(arr.d, &l.iter().cloned().collect::<Vec<_>>())?;
    }
    let g = arr.to_gain_graph();
    let effective: Vec<ColorSet> = lists.iter().map(|l| ColorSet::finite(arr.d, l.iter().cloned())).collect();
    Ok(crate::coloring::to_count(&InversionSum::alternating(&g).evaluate(&effective)))
}

pub fn count_lists_bruteforce(
    arr: &AffinographicArrangement,
    lists: &[BTreeSet<LatticeVector>],
) -> Result<BigUint, OrthotopeError> {
    let candidates: Vec<Vec<_>> = lists.iter().map(|l| l.iter().cloned().collect()).collect();
    count_avoiding_bruteforce(arr, &candidates)
}

fn bounded_lists(arr: &AffinographicArrangement, lists: &[ColorSet], m: &[i64]) -> Result<Vec<ColorSet>, OrthotopeError> {
    check_scalar_bounds(arr, m)?;
    check_len(arr.n, lists.len())?;
    if let Some(l) = lists.iter().find(|l| l.dim() != 1) {
        return Err(OrthotopeError::Dimension { expected: 1, found: l.dim() });
    }
    Ok(lists
        .iter()
        .zip(m)
        .map(|(l, &mi)| l.intersect(&ColorSet::interval(LatticeVector::from(vec![0]), LatticeVector::from(vec![mi]))))
        .collect())
}

/// Points of `P ∩ (L_1 x ... x L_n)` outside a scalar arrangement, where
/// `P = [0,m_1] x ... x [0,m_n]` and the lists may be infinite.
pub fn count_lists_bounded(arr: &AffinographicArrangement, lists: &[ColorSet], m: &[i64]) -> Result<BigUint, OrthotopeError> {
    let effective = bounded_lists(arr, lists, m)?;
    let g = arr.to_gain_graph();
    Ok(crate::coloring::to_count(&InversionSum::mobius(&g).evaluate(&effective)))
}

pub fn count_lists_bounded_bruteforce(
    arr: &AffinographicArrangement,
    lists: &[ColorSet],
    m: &[i64],
) -> Result<BigUint, OrthotopeError> {
    let effective = bounded_lists(arr, lists, m)?;
    let candidates: Vec<Vec<_>> = effective.iter().map(|l| l.points().expect("bounded")).collect();
    count_avoiding_bruteforce(arr, &candidates)
}

fn check_matrix(arr: &AffinographicArrangement, h: &[LatticeVector], m: &[LatticeVector]) -> Result<(), OrthotopeError> {
    check_len(arr.n, h.len())?;
    check_len(arr.n, m.len())?;
    check_dims(arr.d, h)?;
    check_dims(arr.d, m)?;
    match h.iter().zip(m).position(|(a, b)| !a.le(b)) {
        Some(row) => Err(OrthotopeError::LowerAboveUpper(row)),
        None => Ok(()),
    }
}

/// Integer `n x d` matrices `X` with `H <= X <= M` lying in no subspace
/// `x_j = x_i + a`: the list chromatic function of the graph with cone
/// weights `<h_i>*` at the bounds `m_i`.
pub fn count_matrix(arr: &AffinographicArrangement, h: &[LatticeVector], m: &[LatticeVector]) -> Result<BigUint, OrthotopeError> {
    check_matrix(arr, h, m)?;
    let g = arr.to_gain_graph();
    let lists: Vec<ColorSet> = h.iter().cloned().map(ColorSet::cone).collect();
    let value = list_chromatic(&g, &lists, &ideal_filter(m))?;
    Ok(crate::coloring::to_count(&value))
}

pub fn count_matrix_bruteforce(
    arr: &AffinographicArrangement,
    h: &[LatticeVector],
    m: &[LatticeVector],
) -> Result<BigUint, OrthotopeError> {
    check_matrix(arr, h, m)?;
    let candidates: Vec<Vec<_>> = h
        .iter()
        .zip(m)
        .map(|(lo, hi)| LatticeBox::new(lo.clone(), hi.clone()).expect("same dimension").points().collect())
        .collect();
    count_avoiding_bruteforce(arr, &candidates)
}

/// `α_{ji}`: join of the gains of all simple paths from `j` to `i` along
/// links, `Some(0)` for `j = i`, `None` when `i` is unreachable.
pub fn alpha(g: &GainGraph, j: usize, i: usize) -> Option<LatticeVector> {
    alpha_table(g)[j][i].clone()
}

/// `α_{ji}` for every ordered pair, indexed `[j][i]`.
pub fn alpha_table(g: &GainGraph) -> Vec<Vec<Option<LatticeVector>>> {
    let n = g.vertex_count();
    let mut adjacency: Vec<Vec<(usize, LatticeVector)>> = vec![Vec::new(); n];
    for e in g.links() {
        if let Edge::Link { tail, head, gain } = g.edge(e) {
            adjacency[*tail].push((*head, gain.clone()));
            adjacency[*head].push((*tail, -gain));
        }
    }

    fn dfs(
        v: usize,
        gain: LatticeVector,
        adjacency: &[Vec<(usize, LatticeVector)>],
        visited: &mut Vec<bool>,
        row: &mut [Option<LatticeVector>],
    ) {
        row[v] = Some(match row[v].take() {
            Some(best) => best.join(&gain),
            None => gain.clone(),
        });
        for (w, step) in &adjacency[v] {
            if !visited[*w] {
                visited[*w] = true;
                dfs(*w, &gain + step, adjacency, visited, row);
                visited[*w] = false;
            }
        }
    }

    (0..n)
        .map(|j| {
            let mut row = vec![None; n];
            let mut visited = vec![false; n];
            visited[j] = true;
            dfs(j, LatticeVector::zero(g.dim()), &adjacency, &mut visited, &mut row);
            row[j] = Some(LatticeVector::zero(g.dim()));
            row
        })
        .collect()
}

/// `α_j`: join of `α_{ji}` over the vertices `i` reachable from `j`.
pub fn alpha_from(g: &GainGraph, j: usize) -> LatticeVector {
    alpha_table(g)[j].iter().flatten().fold(LatticeVector::zero(g.dim()), |acc, a| acc.join(a))
}

/// The ordering data that selects the polynomial piece: for every term `B`,
/// block `W` and coordinate `k`, the vertices of `W` attaining
/// `min_{v_i ∈ W} (m_{ik} + η_B(v_i)_k)`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct ChamberSignature(pub Vec<Vec<usize>>);

#[derive(Clone, Debug, Serialize)]
pub struct PiecewiseEvaluation {
    pub value: BigInt,
    pub threshold: Vec<LatticeVector>,
    pub above_threshold: bool,
    pub signature: ChamberSignature,
}

/// One factor of the term of `B`: the exact count `|h/B(W) ∩ M/B(W)|`.
#[derive(Clone, Debug)]
pub struct TermBreakdown {
    pub set: crate::gain_graph::EdgeSet,
    pub mu: i64,
    pub blocks: Vec<Vec<usize>>,
    pub factors: Vec<BigUint>,
    /// `m̄(Φ|B)`: the bound below which some factor must vanish.
    pub bound: Vec<LatticeVector>,
}

/// The list chromatic function of a `Z^d`-gain graph whose weights are cones
/// minus finite sets, with upper-bound filters `<m_i>`.
#[derive(Clone, Debug)]
pub struct PiecewiseChi {
    graph: GainGraph,
    weights: Vec<ConeMinusFinite>,
    sum: InversionSum,
    threshold: Vec<LatticeVector>,
}

impl PiecewiseChi {
    pub fn new(wg: &WeightedGainGraph<ConeMinusFinite>) -> Result<Self, OrthotopeError> {
        let g = wg.graph();
        if g.has_balanced_loop_or_loose() {
            return Err(OrthotopeError::BalancedLoopOrLoose);
        }
        if g.has_half_edges() {
            return Err(OrthotopeError::HalfEdges);
        }
        let alphas = alpha_table(g);
        let hats: Vec<LatticeVector> = wg.weights().iter().map(ConeMinusFinite::hat).collect();
        let threshold = (0..g.vertex_count())
            .map(|i| {
                (0..g.vertex_count())
                    .filter_map(|j| alphas[j][i].as_ref().map(|a| &hats[j] + a))
                    .reduce(|a, b| a.join(&b))
                    .expect("alpha_ii is defined")
            })
            .collect();
        Ok(Self { graph: g.clone(), weights: wg.weights().to_vec(), sum: InversionSum::mobius(g), threshold })
    }

    pub fn graph(&self) -> &GainGraph {
        &self.graph
    }

    pub fn weights(&self) -> &[ConeMinusFinite] {
        &self.weights
    }

    pub fn threshold(&self) -> &[LatticeVector] {
        &self.threshold
    }

    pub fn terms(&self) -> &[InversionTerm] {
        &self.sum.terms
    }

    fn check_m(&self, m: &[LatticeVector]) -> Result<(), OrthotopeError> {
        check_len(self.graph.vertex_count(), m.len())?;
        check_dims(self.graph.dim(), m)
    }

    pub fn is_above_threshold(&self, m: &[LatticeVector]) -> bool {
        self.threshold.iter().zip(m).all(|(t, mi)| t.le(mi))
    }

    /// `⋁_{v_i ∈ W} (h_i + η_B(v_i))`.
    fn lower_corner(&self, term: &InversionTerm, block: &[usize]) -> LatticeVector {
        block
            .iter()
            .map(|&v| self.weights[v].apex() + term.eta.value(v))
            .reduce(|a, b| a.join(&b))
            .expect("blocks are non-empty")
    }

    /// Shifted exclusions `⋃ (H̄_i + η_B(v_i))`, optionally only those inside
    /// the cone of the lower corner.
    fn exclusions(&self, term: &InversionTerm, block: &[usize], inside_cone: bool) -> usize {
        let lower = self.lower_corner(term, block);
        let points: BTreeSet<LatticeVector> = block
            .iter()
            .flat_map(|&v| self.weights[v].exclusions().iter().map(move |x| x + term.eta.value(v)))
            .filter(|x| !inside_cone || lower.le(x))
            .collect();
        points.len()
    }

    /// `q_k(B, W)` for every `k`, unclamped.
    fn sides(&self, term: &InversionTerm, block: &[usize], m: &[LatticeVector]) -> Vec<i64> {
        let lower = self.lower_corner(term, block);
        (0..self.graph.dim())
            .map(|k| {
                let upper = block.iter().map(|&v| m[v].coords()[k] + term.eta.value(v).coords()[k]).min().expect("non-empty");
                upper - lower.coords()[k] + 1
            })
            .collect()
    }

    fn value_with(&self, m: &[LatticeVector], inside_cone: bool) -> BigInt {
        let mut total = BigInt::zero();
        for term in &self.sum.terms {
            let mut product = BigInt::from(term.coefficient);
            for block in &term.blocks {
                let volume: BigInt = self.sides(term, block, m).into_iter().map(BigInt::from).product();
                product *= volume - BigInt::from(self.exclusions(term, block, inside_cone));
                if product.is_zero() {
                    break;
                }
            }
            total += product;
        }
        total
    }

    /// `p(m) = Σ_B μ(∅,B) ∏_W (∏_k q_k(B,W) - |⋃(H̄_i + η_B(v_i)) ∩ <⋁(h_i + η_B(v_i))>*|)`.
    ///
    /// Only shifted exclusions that lie above the lower corner of the block's
    /// orthotope are subtracted; the others were never counted.
    pub fn value(&self, m: &[LatticeVector]) -> Result<BigInt, OrthotopeError> {
        self.check_m(m)?;
        Ok(self.value_with(m, true))
    }

    /// The same sum subtracting every shifted exclusion, whether or not it
    /// lies in the block's orthotope.
    pub fn value_uncorrected(&self, m: &[LatticeVector]) -> Result<BigInt, OrthotopeError> {
        self.check_m(m)?;
        Ok(self.value_with(m, false))
    }

    /// The list chromatic function itself, by inversion over `Lat_b`.
    pub fn exact(&self, m: &[LatticeVector]) -> Result<BigInt, OrthotopeError> {
        self.check_m(m)?;
        let lists: Vec<ColorSet> = self.weights.iter().map(ConeMinusFinite::to_color_set).collect();
        Ok(crate::coloring::list_chromatic_with(&self.sum, &self.graph, &lists, &ideal_filter(m))?)
    }

    pub fn signature(&self, m: &[LatticeVector]) -> Result<ChamberSignature, OrthotopeError> {
        self.check_m(m)?;
        let mut out = Vec::new();
        for term in &self.sum.terms {
            for block in &term.blocks {
                for k in 0..self.graph.dim() {
                    let shifted = |v: usize| m[v].coords()[k] + term.eta.value(v).coords()[k];
                    let low = block.iter().map(|&v| shifted(v)).min().expect("non-empty");
                    out.push(block.iter().copied().filter(|&v| shifted(v) == low).collect());
                }
            }
        }
        Ok(ChamberSignature(out))
    }

    pub fn evaluate(&self, m: &[LatticeVector]) -> Result<PiecewiseEvaluation, OrthotopeError> {
        Ok(PiecewiseEvaluation {
            value: self.value(m)?,
            threshold: self.threshold.clone(),
            above_threshold: self.is_above_threshold(m),
            signature: self.signature(m)?,
        })
    }

    /// Names `m{i}_{k}` (1-based), or `m{i}` when `d = 1`.
    pub fn variable_names(&self) -> Vec<String> {
        let d = self.graph.dim();
        (0..self.graph.vertex_count())
            .flat_map(|i| (0..d).map(move |k| if d == 1 { format!("m{}", i + 1) } else { format!("m{}_{}", i + 1, k + 1) }))
            .collect()
    }

    /// The polynomial that agrees with `p` on the chamber containing `m`.
    /// Ties in the minimum are resolved towards the smallest vertex index.
    pub fn chamber_polynomial(&self, m: &[LatticeVector]) -> Result<MPoly, OrthotopeError> {
        self.check_m(m)?;
        let d = self.graph.dim();
        let names = self.variable_names();
        let mut total = MPoly::zero(&names);
        for term in &self.sum.terms {
            let mut product = MPoly::constant(&names, term.coefficient);
            for block in &term.blocks {
                let lower = self.lower_corner(term, block);
                let mut volume = MPoly::constant(&names, 1);
                for k in 0..d {
                    let shifted = |v: usize| m[v].coords()[k] + term.eta.value(v).coords()[k];
                    let arg = *block.iter().min_by_key(|&&v| (shifted(v), v)).expect("non-empty");
                    let offset = term.eta.value(arg).coords()[k] - lower.coords()[k] + 1;
                    volume = volume.mul(&MPoly::linear(&names, arg * d + k, offset));
                }
                let excl = self.exclusions(term, block, true) as i64;
                product = product.mul(&volume.sub(&MPoly::constant(&names, excl)));
            }
            total = total.add(&product);
        }
        Ok(total)
    }

    /// `m̄_i(Φ|B) = ⋁_{v_j ∈ W(i)} (h_j + φ(B_{ji}))`.
    pub fn term_bound(&self, term: &InversionTerm) -> Vec<LatticeVector> {
        let partition = self.graph.components(term.set);
        (0..self.graph.vertex_count())
            .map(|i| {
                let block = &partition.blocks[partition.block_of[i]];
                block
                    .iter()
                    .map(|&j| self.weights[j].apex() + &partition.path_gain(j, i).expect("balanced block"))
                    .reduce(|a, b| a.join(&b))
                    .expect("non-empty")
            })
            .collect()
    }

    /// Every term of the inversion sum with its exact factors at `m`.
    pub fn breakdown(&self, m: &[LatticeVector]) -> Result<Vec<TermBreakdown>, OrthotopeError> {
        self.check_m(m)?;
        Ok(self
            .sum
            .terms
            .iter()
            .map(|term| {
                let factors = term
                    .blocks
                    .iter()
                    .map(|block| {
                        block
                            .iter()
                            .map(|&v| self.weights[v].to_color_set().intersect(&ColorSet::ideal(m[v].clone())).translate(term.eta.value(v)))
                            .reduce(|a, b| a.intersect(&b))
                            .expect("non-empty")
                            .count()
                            .expect("bounded above and below")
                    })
                    .collect();
                TermBreakdown {
                    set: term.set,
                    mu: term.coefficient,
                    blocks: term.blocks.clone(),
                    factors,
                    bound: self.term_bound(term),
                }
            })
            .collect())
    }

    /// The specialization `m_i = m'` for all `i`: a polynomial in `d`
    /// variables, equal to `χ(m', ..., m')` for `m' >= ⋁_j (ĥ_j + α_j)`.
    pub fn common_bound(&self, m_prime: &LatticeVector) -> Result<CommonBoundEvaluation, OrthotopeError> {
        let d = self.graph.dim();
        if m_prime.dim() != d {
            return Err(OrthotopeError::Dimension { expected: d, found: m_prime.dim() });
        }
        let names: Vec<String> =
            (0..d).map(|k| if d == 1 { "m".to_string() } else { format!("m_{}", k + 1) }).collect();
        let mut poly = MPoly::zero(&names);
        for term in &self.sum.terms {
            let mut product = MPoly::constant(&names, term.coefficient);
            for block in &term.blocks {
                let lower = self.lower_corner(term, block);
                let mut volume = MPoly::constant(&names, 1);
                for k in 0..d {
                    let low_eta = block.iter().map(|&v| term.eta.value(v).coords()[k]).min().expect("non-empty");
                    volume = volume.mul(&MPoly::linear(&names, k, low_eta - lower.coords()[k] + 1));
                }
                let excl = self.exclusions(term, block, true) as i64;
                product = product.mul(&volume.sub(&MPoly::constant(&names, excl)));
            }
            poly = poly.add(&product);
        }
        let hats: Vec<LatticeVector> = self.weights.iter().map(ConeMinusFinite::hat).collect();
        let threshold = (0..self.graph.vertex_count())
            .map(|j| &hats[j] + &alpha_from(&self.graph, j))
            .reduce(|a, b| a.join(&b))
            .unwrap_or_else(|| LatticeVector::splat(d, i64::MIN / 4));
        let value = poly.eval(m_prime.coords());
        let above_threshold = threshold.le(m_prime);
        Ok(CommonBoundEvaluation { value, threshold, above_threshold, polynomial: poly })
    }
}

#[derive(Clone, Debug)]
pub struct CommonBoundEvaluation {
    pub value: BigInt,
    pub threshold: LatticeVector,
    pub above_threshold: bool,
    pub polynomial: MPoly,
}

pub fn chi_piecewise(
    wg: &WeightedGainGraph<ConeMinusFinite>,
    m: &[LatticeVector],
) -> Result<PiecewiseEvaluation, OrthotopeError> {
    PiecewiseChi::new(wg)?.evaluate(m)
}

pub fn chi_common_bound(
    wg: &WeightedGainGraph<ConeMinusFinite>,
    m_prime: &LatticeVector,
) -> Result<CommonBoundEvaluation, OrthotopeError> {
    PiecewiseChi::new(wg)?.common_bound(m_prime)
}

/// The gain-free case on a simple graph. The threshold reported is
/// `⋁_j ĥ_j` in every coordinate block.
pub fn chi_graph_no_gains(
    g: &GainGraph,
    weights: &[ConeMinusFinite],
    m: &[LatticeVector],
) -> Result<PiecewiseEvaluation, OrthotopeError> {
    let mut seen = BTreeSet::new();
    for (e, edge) in g.edges().iter().enumerate() {
        match edge {
            Edge::Link { tail, head, gain } => {
                if !gain.is_zero() {
                    return Err(OrthotopeError::NonzeroGain(e));
                }
                if !seen.insert((*tail.min(head), *tail.max(head))) {
                    return Err(OrthotopeError::NotSimple("parallel edges"));
                }
            }
            Edge::Loop { .. } => return Err(OrthotopeError::NotSimple("loop")),
            Edge::Half { .. } => return Err(OrthotopeError::NotSimple("half edge")),
            Edge::Loose => return Err(OrthotopeError::NotSimple("loose edge")),
        }
    }
    let wg = WeightedGainGraph::new(g.clone(), weights.to_vec())
        .map_err(|_| OrthotopeError::LengthMismatch { expected: g.vertex_count(), found: weights.len() })?;
    let chi = PiecewiseChi::new(&wg)?;
    let mut eval = chi.evaluate(m)?;
    if let Some(top) = weights.iter().map(ConeMinusFinite::hat).reduce(|a, b| a.join(&b)) {
        eval.threshold = vec![top; g.vertex_count()];
        eval.above_threshold = eval.threshold.iter().zip(m).all(|(t, mi)| t.le(mi));
    }
    Ok(eval)
}

/// Second finite difference of `f` in the given coordinate slot.
pub fn second_difference(
    f: impl Fn(&[LatticeVector]) -> BigInt,
    m: &[LatticeVector],
    slot: (usize, usize),
) -> BigInt {
    let at = |t: i64| f(&bump(m, slot, t));
    at(2) - BigInt::from(2) * at(1) + at(0)
}

/// `Σ_{ε ∈ {0,1}^{nd}} (-1)^{nd - |ε|} f(m + ε)`.
pub fn mixed_difference(f: impl Fn(&[LatticeVector]) -> BigInt, m: &[LatticeVector]) -> BigInt {
    let slots = unit_slots(m);
    let mut total = BigInt::zero();
    for mask in 0u64..(1u64 << slots.len()) {
        let point = cube_corner(m, &slots, mask);
        let sign = (slots.len() as u32 - mask.count_ones()).is_multiple_of(2);
        let v = f(&point);
        if sign {
            total += v;
        } else {
            total -= v;
        }
    }
    total
}

/// All `(i, k)` coordinate slots of a bound vector.
pub fn unit_slots(m: &[LatticeVector]) -> Vec<(usize, usize)> {
    m.iter().enumerate().flat_map(|(i, v)| (0..v.dim()).map(move |k| (i, k))).collect()
}

/// `m` with slot `(i, k)` increased by `t`.
pub fn bump(m: &[LatticeVector], (i, k): (usize, usize), t: i64) -> Vec<LatticeVector> {
    let mut out = m.to_vec();
    let mut coords = out[i].coords().to_vec();
    coords[k] += t;
    out[i] = LatticeVector::from(coords);
    out
}

/// The corner of the unit cube at `m` selected by the bits of `mask`.
pub fn cube_corner(m: &[LatticeVector], slots: &[(usize, usize)], mask: u64) -> Vec<LatticeVector> {
    let mut point = m.to_vec();
    for (bit, &slot) in slots.iter().enumerate() {
        if mask >> bit & 1 == 1 {
            point = bump(&point, slot, 1);
        }
    }
    point
}

/// Every `m` with `lo_i <= m_i <= lo_i + span` in each coordinate.
pub fn bound_grid(lo: &[LatticeVector], span: i64) -> Vec<Vec<LatticeVector>> {
    let slots = unit_slots(lo);
    let side = (span + 1) as usize;
    let total = side.pow(slots.len() as u32);
    (0..total)
        .map(|mut code| {
            let mut point = lo.to_vec();
            for &slot in &slots {
                point = bump(&point, slot, (code % side) as i64);
                code /= side;
            }
            point
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::count_proper_bruteforce;

    fn lv(c: &[i64]) -> LatticeVector {
        LatticeVector::from(c.to_vec())
    }

    fn hp(i: usize, j: usize, a: &[i64]) -> Hyperplane {
        Hyperplane { i, j, a: lv(a) }
    }

    fn arr(n: usize, d: usize, hs: Vec<Hyperplane>) -> AffinographicArrangement {
        AffinographicArrangement::new(n, d, hs).unwrap()
    }

    fn star() -> AffinographicArrangement {
        arr(2, 2, vec![hp(0, 1, &[0, 0]), hp(0, 1, &[2, 0]), hp(0, 1, &[-1, 2])])
    }

    #[test]
    fn arrangement_graph() {
        let g = arr(2, 1, vec![hp(0, 1, &[0])]).to_gain_graph();
        assert_eq!(g.edges(), &[Edge::Link { tail: 0, head: 1, gain: lv(&[0]) }]);
        assert_eq!(star().to_gain_graph().edge_count(), 3);
        let twice = arr(2, 1, vec![hp(0, 1, &[2]), hp(1, 0, &[-2])]).to_gain_graph();
        assert_eq!(twice.gain_from(0, 0), twice.gain_from(1, 0));
        assert!(matches!(
            AffinographicArrangement::new(2, 1, vec![hp(1, 1, &[0])]),
            Err(OrthotopeError::DegenerateHyperplane { index: 0, vertex: 1 })
        ));
        let looped = arr(1, 1, vec![hp(0, 0, &[3])]).to_gain_graph();
        assert_eq!(looped.edges(), &[Edge::Loop { vertex: 0, gain: lv(&[3]) }]);
        assert!(AffinographicArrangement::new(2, 1, vec![hp(0, 2, &[0])]).is_err());
    }

    #[test]
    fn orthotope_counts() {
        let a = arr(2, 1, vec![hp(0, 1, &[0])]);
        assert_eq!(count_orthotope(&a, &[2, 3]).unwrap(), BigUint::from(9u32));
        assert_eq!(count_orthotope_bruteforce(&a, &[2, 3]).unwrap(), BigUint::from(9u32));
        let b = arr(2, 1, vec![hp(0, 1, &[1])]);
        assert_eq!(count_orthotope(&b, &[1, 1]).unwrap(), BigUint::from(3u32));
        let empty = arr(3, 1, vec![]);
        assert_eq!(count_orthotope(&empty, &[1, 2, 3]).unwrap(), BigUint::from(24u32));
        assert!(matches!(count_orthotope(&a, &[-1, 2]), Err(OrthotopeError::NegativeBound { index: 0, value: -1 })));
        assert!(matches!(count_orthotope(&star(), &[1, 1]), Err(OrthotopeError::NotScalar)));
    }

    #[test]
    fn orthotope_top_vertex_matches_eta_form() {
        let a = arr(3, 1, vec![hp(0, 1, &[1]), hp(1, 2, &[-2]), hp(0, 2, &[3]), hp(2, 0, &[1])]);
        let wg = WeightedGainGraph::new(a.to_gain_graph(), vec![ConeMinusFinite::cone(lv(&[0])); 3]).unwrap();
        let chi = PiecewiseChi::new(&wg).unwrap();
        for m in bound_grid(&[lv(&[0]), lv(&[0]), lv(&[0])], 4) {
            let scalar: Vec<i64> = m.iter().map(|v| v.coords()[0]).collect();
            let direct = count_orthotope(&a, &scalar).unwrap();
            assert_eq!(direct, count_orthotope_bruteforce(&a, &scalar).unwrap());
            assert_eq!(BigInt::from(direct), chi.exact(&m).unwrap());
        }
    }

    #[test]
    fn list_counts() {
        let a = arr(2, 1, vec![hp(0, 1, &[0])]);
        let l: BTreeSet<_> = [0, 2, 5].iter().map(|&t| lv(&[t])).collect();
        assert_eq!(count_lists(&a, &[l.clone(), l.clone()]).unwrap(), BigUint::from(6u32));
        assert_eq!(count_lists_bruteforce(&a, &[l.clone(), l]).unwrap(), BigUint::from(6u32));
        let s1: BTreeSet<_> = [lv(&[0])].into();
        let s2: BTreeSet<_> = [lv(&[7])].into();
        assert_eq!(count_lists(&arr(2, 1, vec![hp(0, 1, &[1])]), &[s1.clone(), s2.clone()]).unwrap(), BigUint::from(1u32));
        assert_eq!(count_lists(&arr(2, 1, vec![hp(0, 1, &[7])]), &[s1, s2]).unwrap(), BigUint::zero());

        let l1 = ColorSet::finite(1, [lv(&[0]), lv(&[2])]);
        let l2 = ColorSet::finite(1, [lv(&[1]), lv(&[2])]);
        assert_eq!(count_lists_bounded(&a, &[l1.clone(), l2.clone()], &[2, 2]).unwrap(), BigUint::from(3u32));
        assert_eq!(count_lists_bounded_bruteforce(&a, &[l1, l2], &[2, 2]).unwrap(), BigUint::from(3u32));
        let all = ColorSet::cone(lv(&[0]));
        assert_eq!(
            count_lists_bounded(&a, &[all.clone(), all], &[2, 3]).unwrap(),
            count_orthotope(&a, &[2, 3]).unwrap()
        );
    }

    #[test]
    fn matrix_counts() {
        let zero = vec![lv(&[0, 0]); 2];
        let ones = vec![lv(&[1, 1]); 2];
        let a = arr(2, 2, vec![hp(0, 1, &[0, 0])]);
        assert_eq!(count_matrix(&a, &zero, &ones).unwrap(), BigUint::from(12u32));
        assert_eq!(count_matrix_bruteforce(&a, &zero, &ones).unwrap(), BigUint::from(12u32));
        assert_eq!(count_matrix(&arr(2, 2, vec![]), &zero, &ones).unwrap(), BigUint::from(16u32));
        let h = vec![lv(&[2, 0]), lv(&[-1, 3])];
        let m: Vec<_> = h.iter().map(|r| r.add_scalar(3)).collect();
        assert_eq!(count_matrix(&star(), &h, &m).unwrap(), count_matrix_bruteforce(&star(), &h, &m).unwrap());
        assert!(matches!(count_matrix(&a, &ones, &zero), Err(OrthotopeError::LowerAboveUpper(0))));
    }

    #[test]
    fn alpha_values() {
        let g = star().to_gain_graph();
        assert_eq!(alpha(&g, 0, 1), Some(lv(&[2, 2])));
        assert_eq!(alpha(&g, 1, 0), Some(lv(&[1, 0])));
        assert_eq!(alpha(&g, 1, 1), Some(lv(&[0, 0])));
        assert_eq!(alpha(&GainGraph::edgeless(1, 2), 0, 1), None);
        assert_eq!(alpha_from(&g, 0), lv(&[2, 2]));
        let path = arr(3, 1, vec![hp(0, 1, &[2]), hp(1, 2, &[-5]), hp(0, 2, &[1])]).to_gain_graph();
        assert_eq!(alpha(&path, 0, 2), Some(lv(&[1])));
        assert_eq!(alpha(&path, 2, 0), Some(lv(&[3])));
    }

    #[test]
    fn single_edge_piecewise() {
        let g = arr(2, 1, vec![hp(0, 1, &[1])]).to_gain_graph();
        let wg = WeightedGainGraph::new(g, vec![ConeMinusFinite::cone(lv(&[0])); 2]).unwrap();
        let chi = PiecewiseChi::new(&wg).unwrap();
        assert_eq!(chi.threshold(), &[lv(&[-1]), lv(&[0])]);
        for m in bound_grid(chi.threshold(), 3) {
            let (m1, m2) = (m[0].coords()[0], m[1].coords()[0]);
            let expected = (m1 + 1) * (m2 + 1) - (m1 + 1).min(m2);
            assert_eq!(chi.value(&m).unwrap(), BigInt::from(expected));
            assert_eq!(chi.exact(&m).unwrap(), BigInt::from(expected));
        }
        let m = [lv(&[5]), lv(&[9])];
        assert_eq!(chi.chamber_polynomial(&m).unwrap().to_string(), "m1*m2 + m2");
    }

    #[test]
    fn order_two_example_empty_term() {
        let g = star().to_gain_graph();
        let c1 = lv(&[2, 1]);
        let c2 = lv(&[1, 4]);
        let weights = vec![
            ConeMinusFinite::new(lv(&[1, 0]), [c1]).unwrap(),
            ConeMinusFinite::new(lv(&[0, 3]), [c2]).unwrap(),
        ];
        let chi = PiecewiseChi::new(&WeightedGainGraph::new(g, weights).unwrap()).unwrap();
        let m = [lv(&[10, 12]), lv(&[11, 13])];
        let empty = chi.terms().iter().find(|t| t.set.is_empty()).unwrap();
        let mut product = BigInt::one();
        for block in &empty.blocks {
            let volume: i64 = chi.sides(empty, block, &m).iter().product();
            product *= volume - chi.exclusions(empty, block, true) as i64;
        }
        let expected = (10 * (12 + 1) - 1) * ((11 + 1) * (13 - 2) - 1);
        assert_eq!(product, BigInt::from(expected));
        let poly = chi.chamber_polynomial(&m).unwrap();
        assert_eq!(poly.coefficient(&[1; 4]), BigInt::one());
        assert!((0..4).all(|i| poly.degree_in(i) == 1));
        for point in bound_grid(chi.threshold(), 2) {
            assert_eq!(chi.value(&point).unwrap(), chi.exact(&point).unwrap(), "at {point:?}");
        }
    }

    #[test]
    fn uncorrected_exclusions_overcount() {
        let g = arr(2, 1, vec![hp(0, 1, &[0])]).to_gain_graph();
        let weights = vec![ConeMinusFinite::new(lv(&[0]), [lv(&[0])]).unwrap(), ConeMinusFinite::cone(lv(&[5]))];
        let chi = PiecewiseChi::new(&WeightedGainGraph::new(g.clone(), weights.clone()).unwrap()).unwrap();
        assert_eq!(chi.threshold(), &[lv(&[4]), lv(&[4])]);
        let m = [lv(&[4]), lv(&[4])];
        assert_eq!(chi.exact(&m).unwrap(), BigInt::zero());
        assert_eq!(chi.value(&m).unwrap(), BigInt::zero());
        assert_eq!(chi.value_uncorrected(&m).unwrap(), BigInt::one());
        let lists: Vec<_> = weights.iter().map(ConeMinusFinite::to_color_set).collect();
        assert_eq!(count_proper_bruteforce(&g, &lists, &ideal_filter(&m)).unwrap(), BigUint::zero());
    }

    #[test]
    fn zero_terms_below_bound() {
        let g = star().to_gain_graph();
        let weights = vec![
            ConeMinusFinite::new(lv(&[1, 0]), [lv(&[2, 1])]).unwrap(),
            ConeMinusFinite::new(lv(&[0, 3]), [lv(&[1, 4])]).unwrap(),
        ];
        let chi = PiecewiseChi::new(&WeightedGainGraph::new(g, weights).unwrap()).unwrap();
        for m in bound_grid(&[lv(&[-1, -1]), lv(&[-1, 1])], 4) {
            for t in chi.breakdown(&m).unwrap() {
                for (block, factor) in t.blocks.iter().zip(&t.factors) {
                    if block.iter().any(|&v| !t.bound[v].le(&m[v])) {
                        assert!(factor.is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn common_bound_examples() {
        let k2 = arr(2, 1, vec![hp(0, 1, &[0])]).to_gain_graph();
        let wg = WeightedGainGraph::new(k2.clone(), vec![ConeMinusFinite::cone(lv(&[0])); 2]).unwrap();
        let eval = chi_common_bound(&wg, &lv(&[4])).unwrap();
        assert_eq!(eval.polynomial.to_string(), "m^2 + m");
        assert_eq!(eval.value, BigInt::from(20));
        assert_eq!(eval.threshold, lv(&[-1]));

        let weights = vec![ConeMinusFinite::cone(lv(&[1])); 2];
        for k in 1..6 {
            let m = vec![lv(&[k]); 2];
            assert_eq!(chi_graph_no_gains(&k2, &weights, &m).unwrap().value, BigInt::from(k * k - k));
        }
        let excl = vec![
            ConeMinusFinite::new(lv(&[1]), [lv(&[2])]).unwrap(),
            ConeMinusFinite::new(lv(&[1]), [lv(&[3])]).unwrap(),
        ];
        for k in 5..9 {
            let m = vec![lv(&[k]); 2];
            let eval = chi_graph_no_gains(&k2, &excl, &m).unwrap();
            assert!(eval.above_threshold);
            let brute = count_proper_bruteforce(
                &k2,
                &excl.iter().map(ConeMinusFinite::to_color_set).collect::<Vec<_>>(),
                &ideal_filter(&m),
            )
            .unwrap();
            assert_eq!(eval.value, BigInt::from(brute));
            assert_eq!(eval.value, BigInt::from((k - 1) * (k - 1) - (k - 2)));
        }
        let with_gain = arr(2, 1, vec![hp(0, 1, &[1])]).to_gain_graph();
        assert!(matches!(chi_graph_no_gains(&with_gain, &weights, &[lv(&[2]), lv(&[2])]), Err(OrthotopeError::NonzeroGain(0))));
        let parallel = arr(2, 1, vec![hp(0, 1, &[0]), hp(1, 0, &[0])]).to_gain_graph();
        assert!(chi_graph_no_gains(&parallel, &weights, &[lv(&[2]), lv(&[2])]).is_err());
    }

    #[test]
    fn edgeless_piecewise() {
        let g = GainGraph::edgeless(2, 2);
        let weights = vec![ConeMinusFinite::cone(lv(&[1, -1])), ConeMinusFinite::cone(lv(&[0, 2]))];
        let chi = PiecewiseChi::new(&WeightedGainGraph::new(g, weights).unwrap()).unwrap();
        assert_eq!(chi.threshold(), &[lv(&[0, -2]), lv(&[-1, 1])]);
        let m = [lv(&[3, 4]), lv(&[5, 6])];
        assert_eq!(chi.value(&m).unwrap(), BigInt::from(3 * 6 * 6 * 5));
        assert_eq!(mixed_difference(|x| chi.value(x).unwrap(), &m), BigInt::one());
        assert_eq!(second_difference(|x| chi.value(x).unwrap(), &m, (1, 0)), BigInt::zero());
    }

    #[test]
    fn rejects_balanced_loops() {
        let g = GainGraph::new(1, 1, vec![Edge::Loop { vertex: 0, gain: lv(&[0]) }]).unwrap();
        let wg = WeightedGainGraph::new(g, vec![ConeMinusFinite::cone(lv(&[0]))]).unwrap();
        assert!(matches!(PiecewiseChi::new(&wg), Err(OrthotopeError::BalancedLoopOrLoose)));
    }
}
