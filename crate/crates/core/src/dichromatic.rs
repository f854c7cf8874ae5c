//! Sparse exact polynomials in weight-indexed variables `u_w`, `v` and `z`,
//! and the total dichromatic polynomial of a weighted gain graph.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::gain_graph::{Edge, EdgeSet, GainGraph};
use crate::switching::WeightedGainGraph;
use crate::weights::{combine_all, Weight};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolynomialError {
    #[error("no value assigned to u[{0}]")]
    MissingKey(String),
    #[error("graph has half or loose edges")]
    NotAGraph,
}

/// A monomial `z^z v^v ∏ u_w`. The derived order compares `z`, then `v`,
/// then the sorted multiset of `u` keys.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Monomial<W> {
    pub z: u32,
    pub v: u32,
    pub u: Vec<W>,
}

impl<W: Ord + Clone> Monomial<W> {
    pub fn one() -> Self {
        Self { z: 0, v: 0, u: Vec::new() }
    }

    pub fn new(mut u: Vec<W>, v: u32, z: u32) -> Self {
        u.sort();
        Self { z, v, u }
    }

    fn mul(&self, other: &Self) -> Self {
        let mut u = self.u.clone();
        u.extend(other.u.iter().cloned());
        Self::new(u, self.v + other.v, self.z + other.z)
    }
}

/// A polynomial with integer coefficients; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QPolynomial<W> {
    terms: BTreeMap<Monomial<W>, BigInt>,
}

impl<W: Ord + Clone> Default for QPolynomial<W> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<W: Ord + Clone> QPolynomial<W> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::monomial(Monomial::one(), BigInt::one())
    }

    pub fn monomial(m: Monomial<W>, coeff: BigInt) -> Self {
        let mut p = Self::zero();
        p.add_term(m, coeff);
        p
    }

    pub fn u(w: W) -> Self {
        Self::monomial(Monomial::new(vec![w], 0, 0), BigInt::one())
    }

    pub fn v() -> Self {
        Self::monomial(Monomial::new(vec![], 1, 0), BigInt::one())
    }

    pub fn z() -> Self {
        Self::monomial(Monomial::new(vec![], 0, 1), BigInt::one())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(Monomial::one(), c.into())
    }

    pub fn add_term(&mut self, m: Monomial<W>, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(BigInt::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial<W>, &BigInt)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial<W>) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let mut out = Self::zero();
        for (m, k) in &self.terms {
            out.add_term(m.clone(), k * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.mul(b), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// The balanced part `Q(u, v, 0)`.
    pub fn balanced_part(&self) -> Self {
        Self { terms: self.terms.iter().filter(|(m, _)| m.z == 0).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }

    /// Substitute `v ↦ v + c`.
    pub fn shift_v(&self, c: i64) -> Self {
        let shift = Self::v().add(&Self::constant(c));
        let mut out = Self::zero();
        for (m, coeff) in &self.terms {
            let base = Self::monomial(Monomial { z: m.z, v: 0, u: m.u.clone() }, coeff.clone());
            out = out.add(&base.mul(&shift.pow(m.v)));
        }
        out
    }

    /// Substitute `z ↦ c`.
    pub fn set_z(&self, c: i64) -> Self {
        let mut out = Self::zero();
        let c = BigInt::from(c);
        for (m, coeff) in &self.terms {
            let factor = num_traits::pow(c.clone(), m.z as usize);
            out.add_term(Monomial { z: 0, v: m.v, u: m.u.clone() }, coeff * factor);
        }
        out
    }

    /// Rename the `u` variables.
    pub fn map_u<W2: Ord + Clone>(&self, f: impl Fn(&W) -> W2) -> QPolynomial<W2> {
        let mut out = QPolynomial::zero();
        for (m, c) in &self.terms {
            out.add_term(Monomial::new(m.u.iter().map(&f).collect(), m.v, m.z), c.clone());
        }
        out
    }

    /// Exact substitution of rational values.
    pub fn evaluate(
        &self,
        u: impl Fn(&W) -> Option<BigRational>,
        v: &BigRational,
        z: &BigRational,
    ) -> Result<BigRational, PolynomialError>
    where
        W: fmt::Display,
    {
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut term = BigRational::from_integer(c.clone());
            term *= num_traits::pow(v.clone(), m.v as usize);
            term *= num_traits::pow(z.clone(), m.z as usize);
            for w in &m.u {
                term *= u(w).ok_or_else(|| PolynomialError::MissingKey(w.to_string()))?;
            }
            total += term;
        }
        Ok(total)
    }
}

impl<W: Weight> QPolynomial<W> {
    /// Machine format: semigroup tag and the term list in canonical order.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(m, c)| {
                json!({
                    "u": m.u.iter().map(|w| serde_json::to_value(w).expect("weights serialize")).collect::<Vec<_>>(),
                    "v": m.v,
                    "z": m.z,
                    "coeff": c.to_string(),
                })
            })
            .collect();
        json!({ "semigroup": W::TAG, "terms": terms })
    }
}

impl<W: Ord + Clone + fmt::Display> fmt::Display for QPolynomial<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let mut factors: Vec<String> = m.u.iter().map(|w| format!("u[{w}]")).collect();
            match m.v {
                0 => {}
                1 => factors.push("v".into()),
                k => factors.push(format!("v^{k}")),
            }
            match m.z {
                0 => {}
                1 => factors.push("z".into()),
                k => factors.push(format!("z^{k}")),
            }
            let magnitude = c.abs();
            let body = if factors.is_empty() {
                magnitude.to_string()
            } else if magnitude.is_one() {
                factors.join("*")
            } else {
                format!("{magnitude}*{}", factors.join("*"))
            };
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                write!(f, "{body}")?;
            } else {
                write!(f, " {} {body}", if c.is_negative() { "-" } else { "+" })?;
            }
        }
        Ok(())
    }
}

/// The term of one edge set in the subset expansion.
fn subset_term<W: Weight>(wg: &WeightedGainGraph<W>, s: EdgeSet) -> Monomial<W> {
    let g = wg.graph();
    let partition = g.components(s);
    let c = partition.component_count();
    let b = partition.balanced_count();
    let v_exp = (s.len() + b) as i64 - g.vertex_count() as i64;
    assert!(v_exp >= 0, "rank bound violated");
    Monomial::new(wg.block_weights(&partition), v_exp as u32, (c - b) as u32)
}

/// `Σ_S v^{|S|-n+b(S)} z^{c(S)-b(S)} ∏_{W ∈ π_b(S)} u_{h/S(W)}`.
pub fn q_total_subset<W: Weight>(wg: &WeightedGainGraph<W>) -> QPolynomial<W> {
    let mut q = QPolynomial::zero();
    for s in wg.graph().all_edges().subsets() {
        q.add_term(subset_term(wg, s), BigInt::one());
    }
    q
}

/// Deletion-contraction on links with `pick` choosing the link from the
/// current graph's link indices; link-free graphs are expanded directly.
pub fn q_total_delcon_with<W: Weight>(
    wg: &WeightedGainGraph<W>,
    pick: &mut impl FnMut(&GainGraph, &[usize]) -> usize,
) -> QPolynomial<W> {
    let links: Vec<usize> = wg.graph().links().collect();
    if links.is_empty() {
        return q_total_subset(wg);
    }
    let e = pick(wg.graph(), &links);
    debug_assert!(wg.graph().edge(e).is_link());
    let (deleted, _) = wg.delete(EdgeSet::singleton(e));
    let contracted = wg.contract(EdgeSet::singleton(e)).graph;
    q_total_delcon_with(&deleted, pick).add(&q_total_delcon_with(&contracted, pick))
}

/// Deletion-contraction always removing the first link.
pub fn q_total_delcon<W: Weight>(wg: &WeightedGainGraph<W>) -> QPolynomial<W> {
    q_total_delcon_with(wg, &mut |_, links| links[0])
}

/// The gain-free polynomial `Σ_S v^{|S|-n+c(S)} ∏_{W ∈ π(S)} u_{h(W)}`,
/// with block weights summed without switching.
pub fn q_graph<W: Weight>(wg: &WeightedGainGraph<W>) -> Result<QPolynomial<W>, PolynomialError> {
    let g = wg.graph();
    if g.edges().iter().any(|e| matches!(e, Edge::Half { .. } | Edge::Loose)) {
        return Err(PolynomialError::NotAGraph);
    }
    let plain = g.with_zero_gains();
    let mut q = QPolynomial::zero();
    for s in plain.all_edges().subsets() {
        let partition = plain.components(s);
        let c = partition.component_count();
        let u: Vec<W> = partition
            .blocks
            .iter()
            .map(|block| combine_all(block.iter().map(|&v| wg.weight(v))).expect("blocks are non-empty"))
            .collect();
        let v_exp = (s.len() + c) - g.vertex_count();
        q.add_term(Monomial::new(u, v_exp as u32, 0), BigInt::one());
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeVector;
    use crate::weights::{MaxZd, SumZd};

    fn v(c: &[i64]) -> LatticeVector {
        LatticeVector::from(c.to_vec())
    }

    fn phi_star_edges() -> GainGraph {
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

    fn mono<W: Ord + Clone>(u: Vec<W>, vv: u32, z: u32) -> Monomial<W> {
        Monomial::new(u, vv, z)
    }

    #[test]
    fn phi_star_max() {
        let wg = WeightedGainGraph::new(phi_star_edges(), vec![MaxZd(v(&[2, 0])), MaxZd(v(&[-1, 3]))]).unwrap();
        let q = q_total_subset(&wg);
        let mut expected = QPolynomial::zero();
        expected.add_term(mono(vec![MaxZd(v(&[2, 0])), MaxZd(v(&[-1, 3]))], 0, 0), 1.into());
        expected.add_term(mono(vec![MaxZd(v(&[2, 3]))], 0, 0), 2.into());
        expected.add_term(mono(vec![MaxZd(v(&[4, 3]))], 0, 0), 1.into());
        expected.add_term(mono(vec![], 0, 1), 3.into());
        expected.add_term(mono(vec![], 1, 1), 1.into());
        assert_eq!(q, expected);
        assert_eq!(q_total_delcon(&wg), q);
        assert_eq!(q.to_string(), "u[(-1,3)]*u[(2,0)] + 2*u[(2,3)] + u[(4,3)] + 3*z + v*z");
    }

    #[test]
    fn phi_star_sum() {
        let wg = WeightedGainGraph::new(phi_star_edges(), vec![SumZd::new(v(&[2, 0])), SumZd::new(v(&[-1, 3]))]).unwrap();
        let q = q_total_subset(&wg);
        for w in [[1, 3], [3, 3], [2, 5]] {
            let key = SumZd { sum: v(&w), count: 2 };
            assert_eq!(q.coefficient(&mono(vec![key], 0, 0)), BigInt::from(1));
        }
        assert_eq!(q_total_delcon(&wg), q);
    }

    #[test]
    fn initial_and_loop_rules() {
        let g = GainGraph::edgeless(1, 2);
        let wg = WeightedGainGraph::new(g, vec![SumZd::new(v(&[1])), SumZd::new(v(&[4]))]).unwrap();
        assert_eq!(q_total_subset(&wg), QPolynomial::u(SumZd::new(v(&[1]))).mul(&QPolynomial::u(SumZd::new(v(&[4])))));

        let g = GainGraph::new(1, 1, vec![Edge::Loose]).unwrap();
        let wg = WeightedGainGraph::new(g, vec![SumZd::new(v(&[7]))]).unwrap();
        let expected = QPolynomial::v().add(&QPolynomial::one()).mul(&QPolynomial::u(SumZd::new(v(&[7]))));
        assert_eq!(q_total_subset(&wg), expected);

        let empty = WeightedGainGraph::<SumZd>::new(GainGraph::edgeless(1, 0), vec![]).unwrap();
        assert_eq!(q_total_delcon(&empty), QPolynomial::one());
    }

    #[test]
    fn gain_free_examples() {
        let k2 = GainGraph::new(1, 2, vec![Edge::Link { tail: 0, head: 1, gain: v(&[5]) }]).unwrap();
        let wg = WeightedGainGraph::new(k2, vec![SumZd::new(v(&[2])), SumZd::new(v(&[3]))]).unwrap();
        let expected = QPolynomial::u(SumZd::new(v(&[2])))
            .mul(&QPolynomial::u(SumZd::new(v(&[3]))))
            .add(&QPolynomial::u(SumZd::new(v(&[2])).combine(&SumZd::new(v(&[3])))));
        assert_eq!(q_graph(&wg).unwrap(), expected);

        let looped = GainGraph::new(1, 1, vec![Edge::Loop { vertex: 0, gain: v(&[3]) }]).unwrap();
        let wg = WeightedGainGraph::new(looped, vec![SumZd::new(v(&[2]))]).unwrap();
        let expected = QPolynomial::v().add(&QPolynomial::one()).mul(&QPolynomial::u(SumZd::new(v(&[2]))));
        assert_eq!(q_graph(&wg).unwrap(), expected);
    }

    #[test]
    fn evaluation_and_substitution() {
        let wg = WeightedGainGraph::new(phi_star_edges(), vec![MaxZd(v(&[2, 0])), MaxZd(v(&[-1, 3]))]).unwrap();
        let q = q_total_subset(&wg);
        let one = BigRational::one();
        assert_eq!(q.evaluate(|_| Some(BigRational::one()), &one, &one).unwrap(), BigRational::from_integer(8.into()));
        assert!(q.evaluate(|_| None, &one, &one).is_err());
        assert_eq!(QPolynomial::<MaxZd>::one().evaluate(|_| None, &one, &one).unwrap(), one);

        let p = QPolynomial::<MaxZd>::v().pow(2);
        let shifted = p.shift_v(-1);
        assert_eq!(shifted.to_string(), "1 - 2*v + v^2");
        assert_eq!(q.set_z(0), q.balanced_part());
    }
}
