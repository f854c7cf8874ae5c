//! Seeded randomized suites comparing every formula with an independent
//! oracle. Each suite reports how many cases ran and how many agreed.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::activities::{activities, reverse_greedy_extension, spanning_forests, EdgeOrdering, LiftMatroid};
use crate::activities::forest_expansion;
use crate::coloring::{
    chi_from_q, count_improper_exactly_bruteforce, count_proper_bruteforce, count_proper_mobius,
    count_with_improper_exactly, full_filter, ideal_filter, improper_set, list_chromatic, list_chromatic_alternating,
    lists_of, DEFAULT_BRUTE_FORCE_LIMIT,
};
use crate::dichromatic::{q_graph, q_total_delcon_with, q_total_subset, Monomial, QPolynomial};
use crate::gain_graph::{Edge, EdgeSet, GainGraph};
use crate::lattice::LatticeVector;
use crate::orthotope::{
    bound_grid, count_lists, count_lists_bounded, count_lists_bounded_bruteforce, count_lists_bruteforce,
    count_matrix, count_matrix_bruteforce, count_orthotope, count_orthotope_bruteforce, cube_corner,
    mixed_difference, second_difference, unit_slots, AffinographicArrangement, Hyperplane, PiecewiseChi,
};
use crate::switching::{top_switching, WeightedGainGraph};
use crate::weights::{ColorSet, ConeMinusFinite, FiniteList, MaxZd, SumZd, Weight};

pub const DEFAULT_SEED: u64 = 20070101;

/// Size caps for the random instances. Suites with tighter caps of their own
/// use the smaller value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Limits {
    pub max_n: usize,
    pub max_e: usize,
    pub max_d: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self { max_n: 4, max_e: 5, max_d: 2 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub criterion: u8,
    pub name: String,
    pub cases: usize,
    pub passed: usize,
    /// Cases the suite must run for the result to count.
    pub required: usize,
    pub first_failure: Option<String>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn failed(&self) -> usize {
        self.cases - self.passed
    }

    pub fn ok(&self) -> bool {
        self.passed == self.cases && self.cases >= self.required
    }
}

struct Tally {
    report: SuiteReport,
}

impl Tally {
    fn new(criterion: u8, name: &str, required: usize) -> Self {
        Self {
            report: SuiteReport {
                criterion,
                name: name.to_string(),
                cases: 0,
                passed: 0,
                required,
                first_failure: None,
                notes: Vec::new(),
            },
        }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.report.cases += 1;
        if ok {
            self.report.passed += 1;
        } else if self.report.first_failure.is_none() {
            self.report.first_failure = Some(describe());
        }
    }

    /// Record a case whose computation may fail; an error counts as a failure.
    fn check_result(&mut self, outcome: Result<bool, String>, describe: impl FnOnce() -> String) {
        match outcome {
            Ok(ok) => self.check(ok, describe),
            Err(e) => self.check(false, || format!("{}: {e}", describe())),
        }
    }

    fn note(&mut self, text: String) {
        self.report.notes.push(text);
    }

    fn finish(self) -> SuiteReport {
        self.report
    }
}

fn rng_for(seed: u64, suite: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ suite.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Shape of a random gain graph.
#[derive(Clone, Copy, Debug)]
struct Shape {
    min_n: usize,
    max_n: usize,
    max_e: usize,
    max_d: usize,
    gain: i64,
    loops: bool,
    balanced_loops: bool,
    half: bool,
    loose: bool,
}

impl Shape {
    fn links(limits: Limits) -> Self {
        Self {
            min_n: 1,
            max_n: limits.max_n,
            max_e: limits.max_e,
            max_d: limits.max_d,
            gain: 2,
            loops: false,
            balanced_loops: true,
            half: false,
            loose: false,
        }
    }

    fn with_loops(self) -> Self {
        Self { loops: true, ..self }
    }

    fn with_all_kinds(self) -> Self {
        Self { loops: true, half: true, loose: true, ..self }
    }
}

fn random_vector(rng: &mut ChaCha8Rng, d: usize, lo: i64, hi: i64) -> LatticeVector {
    LatticeVector::from((0..d).map(|_| rng.gen_range(lo..=hi)).collect::<Vec<_>>())
}

fn random_gain_graph(rng: &mut ChaCha8Rng, shape: Shape) -> GainGraph {
    let n = rng.gen_range(shape.min_n..=shape.max_n.max(shape.min_n));
    let d = rng.gen_range(1..=shape.max_d.max(1));
    random_graph_on(rng, shape, n, d)
}

fn random_graph_on(rng: &mut ChaCha8Rng, shape: Shape, n: usize, d: usize) -> GainGraph {
    let m = rng.gen_range(0..=shape.max_e);
    let mut edges = Vec::with_capacity(m);
    while edges.len() < m {
        let kind = rng.gen_range(0..12);
        let edge = match kind {
            0..=7 if n >= 2 => {
                let tail = rng.gen_range(0..n);
                let mut head = rng.gen_range(0..n - 1);
                if head >= tail {
                    head += 1;
                }
                Some(Edge::Link { tail, head, gain: random_vector(rng, d, -shape.gain, shape.gain) })
            }
            8 | 9 if shape.loops && n >= 1 => {
                let mut gain = random_vector(rng, d, -shape.gain, shape.gain);
                while !shape.balanced_loops && gain.is_zero() {
                    gain = random_vector(rng, d, -shape.gain, shape.gain);
                }
                Some(Edge::Loop { vertex: rng.gen_range(0..n), gain })
            }
            10 if shape.half && n >= 1 => Some(Edge::Half { vertex: rng.gen_range(0..n) }),
            11 if shape.loose => Some(Edge::Loose),
            _ => None,
        };
        if let Some(edge) = edge {
            edges.push(edge);
        } else if n < 2 && !shape.loops && !shape.half && !shape.loose {
            break;
        }
    }
    GainGraph::new(d, n, edges).expect("generated graph is valid")
}

fn random_max(rng: &mut ChaCha8Rng, g: &GainGraph) -> WeightedGainGraph<MaxZd> {
    let w = (0..g.vertex_count()).map(|_| MaxZd(random_vector(rng, g.dim(), -3, 3))).collect();
    WeightedGainGraph::new(g.clone(), w).expect("one weight per vertex")
}

fn random_sum(rng: &mut ChaCha8Rng, g: &GainGraph) -> WeightedGainGraph<SumZd> {
    let w = (0..g.vertex_count()).map(|_| SumZd::new(random_vector(rng, g.dim(), -3, 3))).collect();
    WeightedGainGraph::new(g.clone(), w).expect("one weight per vertex")
}

fn random_finite_lists(rng: &mut ChaCha8Rng, g: &GainGraph, max_size: usize, span: i64) -> WeightedGainGraph<FiniteList> {
    let w = (0..g.vertex_count())
        .map(|_| {
            let size = rng.gen_range(1..=max_size);
            FiniteList::new((0..size).map(|_| random_vector(rng, g.dim(), -span, span)))
        })
        .collect();
    WeightedGainGraph::new(g.clone(), w).expect("one weight per vertex")
}

fn random_ordering(rng: &mut ChaCha8Rng, m: usize) -> EdgeOrdering {
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    EdgeOrdering::new(order).expect("a permutation")
}

fn random_subset(rng: &mut ChaCha8Rng, m: usize) -> EdgeSet {
    EdgeSet((0..m).filter(|_| rng.gen_bool(0.5)).fold(0u64, |acc, e| acc | 1 << e))
}

/// The worked example graph: two vertices and three parallel links.
pub fn worked_example_graph() -> GainGraph {
    let lv = |c: [i64; 2]| LatticeVector::from(c);
    GainGraph::new(
        2,
        2,
        vec![
            Edge::Link { tail: 0, head: 1, gain: lv([0, 0]) },
            Edge::Link { tail: 0, head: 1, gain: lv([2, 0]) },
            Edge::Link { tail: 0, head: 1, gain: lv([-1, 2]) },
        ],
    )
    .expect("valid graph")
}

pub const WORKED_EXAMPLE_MAX: &str = "u[(-1,3)]*u[(2,0)] + 2*u[(2,3)] + u[(4,3)] + 3*z + v*z";

/// Criterion 1: the worked example under both semigroups.
pub fn suite_worked_example() -> SuiteReport {
    let mut t = Tally::new(1, "worked example", 2);
    let g = worked_example_graph();
    let lv = |c: [i64; 2]| LatticeVector::from(c);

    let wg = WeightedGainGraph::new(g.clone(), vec![MaxZd(lv([2, 0])), MaxZd(lv([-1, 3]))]).expect("valid");
    let q = q_total_subset(&wg);
    let mut expected = QPolynomial::zero();
    expected.add_term(Monomial::new(vec![MaxZd(lv([2, 0])), MaxZd(lv([-1, 3]))], 0, 0), BigInt::one());
    expected.add_term(Monomial::new(vec![MaxZd(lv([2, 3]))], 0, 0), BigInt::from(2));
    expected.add_term(Monomial::new(vec![MaxZd(lv([4, 3]))], 0, 0), BigInt::one());
    expected.add_term(Monomial::new(vec![], 0, 1), BigInt::from(3));
    expected.add_term(Monomial::new(vec![], 1, 1), BigInt::one());
    t.check(q == expected && q.to_string() == WORKED_EXAMPLE_MAX, || format!("max-zd: got {q}"));

    let wg = WeightedGainGraph::new(g, vec![SumZd::new(lv([2, 0])), SumZd::new(lv([-1, 3]))]).expect("valid");
    let q = q_total_subset(&wg);
    let keys = [[1, 3], [3, 3], [2, 5]];
    let ok = keys.iter().all(|&k| {
        q.coefficient(&Monomial::new(vec![SumZd { sum: lv(k), count: 2 }], 0, 0)) == BigInt::one()
    });
    t.check(ok, || format!("sum-zd: got {q}"));
    t.finish()
}

/// Criterion 2: subset expansion against deletion-contraction with a random
/// choice of link at every step.
pub fn suite_expansions(seed: u64, limits: Limits) -> SuiteReport {
    const CASES: usize = 200;
    let mut t = Tally::new(2, "subset expansion equals deletion-contraction", CASES);
    let mut rng = rng_for(seed, 2);
    let shape = Shape::links(limits).with_all_kinds();
    for case in 0..CASES {
        let g = random_gain_graph(&mut rng, shape);
        let mut pick_rng = ChaCha8Rng::seed_from_u64(rng.gen());
        let mut pick = |_: &GainGraph, links: &[usize]| links[pick_rng.gen_range(0..links.len())];
        let ok = if case % 2 == 0 {
            let wg = random_max(&mut rng, &g);
            q_total_subset(&wg) == q_total_delcon_with(&wg, &mut pick)
        } else {
            let wg = random_sum(&mut rng, &g);
            q_total_subset(&wg) == q_total_delcon_with(&wg, &mut pick)
        };
        t.check(ok, || format!("case {case}: {g:?}"));
    }
    t.finish()
}

fn forest_matches<W: Weight>(wg: &WeightedGainGraph<W>, ord: &EdgeOrdering) -> bool {
    forest_expansion(wg, ord).shift_v(1) == q_total_subset(wg).balanced_part()
}

/// Criterion 3: the forest expansion under random orderings.
pub fn suite_forest_expansion(seed: u64, limits: Limits) -> SuiteReport {
    const GRAPHS: usize = 100;
    const ORDERINGS: usize = 5;
    let mut t = Tally::new(3, "forest expansion equals Q(u, y-1, 0)", GRAPHS * ORDERINGS);
    let mut rng = rng_for(seed, 3);
    let shape = Shape::links(limits).with_all_kinds();
    for case in 0..GRAPHS {
        let g = random_gain_graph(&mut rng, shape);
        let max = random_max(&mut rng, &g);
        let sum = random_sum(&mut rng, &g);
        for k in 0..ORDERINGS {
            let ord = random_ordering(&mut rng, g.edge_count());
            let ok = if k % 2 == 0 { forest_matches(&max, &ord) } else { forest_matches(&sum, &ord) };
            t.check(ok, || format!("case {case}, order {:?}: {g:?}", ord.order()));
        }
    }
    t.finish()
}

/// Criterion 4: proper colorations with finite lists, four ways.
pub fn suite_coloring(seed: u64, limits: Limits) -> SuiteReport {
    const CASES: usize = 200;
    let mut t = Tally::new(4, "brute force equals Möbius, alternating and Q forms", CASES);
    let mut rng = rng_for(seed, 4);
    let shape = Shape::links(limits).with_loops();
    for case in 0..CASES {
        let g = random_gain_graph(&mut rng, shape);
        let wg = random_finite_lists(&mut rng, &g, 4, 2);
        let lists = lists_of(&wg);
        let filter = full_filter(g.vertex_count(), g.dim());
        let outcome = (|| -> Result<bool, String> {
            let brute = BigInt::from(count_proper_bruteforce(&g, &lists, &filter).map_err(|e| e.to_string())?);
            let mobius = list_chromatic(&g, &lists, &filter).map_err(|e| e.to_string())?;
            let alternating = list_chromatic_alternating(&g, &lists, &filter).map_err(|e| e.to_string())?;
            let both = count_proper_mobius(&wg).map_err(|e| e.to_string())?;
            let from_q = chi_from_q(&g, &lists, &filter).map_err(|e| e.to_string())?;
            Ok(brute == mobius && brute == alternating && brute == both && brute == from_q)
        })();
        t.check_result(outcome, || format!("case {case}: {g:?} lists {:?}", wg.weights()));
    }
    t.finish()
}

/// Criterion 5: colorations with a prescribed improper set.
pub fn suite_improper_exactly(seed: u64, limits: Limits) -> SuiteReport {
    const INSTANCES: usize = 50;
    let mut t = Tally::new(5, "improper set exactly B equals proper count of the contraction", INSTANCES);
    let mut rng = rng_for(seed, 5);
    let shape = Shape::links(limits).with_loops();
    let mut sets = 0usize;
    for case in 0..INSTANCES {
        let g = random_gain_graph(&mut rng, shape);
        let wg = random_finite_lists(&mut rng, &g, 4, 2);
        let lists = lists_of(&wg);
        let filter = full_filter(g.vertex_count(), g.dim());
        let outcome = (|| -> Result<bool, String> {
            let mut ok = true;
            for b in g.all_edges().subsets().filter(|&b| g.is_balanced(b)) {
                sets += 1;
                let brute = count_improper_exactly_bruteforce(&g, &lists, &filter, b, DEFAULT_BRUTE_FORCE_LIMIT)
                    .map_err(|e| e.to_string())?;
                let formula = count_with_improper_exactly(&wg, b).map_err(|e| e.to_string())?;
                ok &= BigInt::from(brute) == formula;
            }
            Ok(ok)
        })();
        t.check_result(outcome, || format!("case {case}: {g:?} lists {:?}", wg.weights()));
    }
    t.note(format!("{sets} balanced sets compared"));
    t.finish()
}

fn random_arrangement(rng: &mut ChaCha8Rng, n: usize, d: usize, max_h: usize, max_a: i64) -> AffinographicArrangement {
    let count = rng.gen_range(0..=max_h);
    let mut hyperplanes = Vec::with_capacity(count);
    while hyperplanes.len() < count {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        let a = random_vector(rng, d, -max_a, max_a);
        if i == j && a.is_zero() {
            continue;
        }
        hyperplanes.push(Hyperplane { i, j, a });
    }
    AffinographicArrangement::new(n, d, hyperplanes).expect("generated arrangement is valid")
}

fn random_scalar_list(rng: &mut ChaCha8Rng) -> ColorSet {
    let s = |x: i64| LatticeVector::from(vec![x]);
    match rng.gen_range(0..3) {
        0 => ColorSet::finite(1, (0..rng.gen_range(0..=5)).map(|_| s(rng.gen_range(-1..=7)))),
        1 => {
            let apex = rng.gen_range(-1..=3);
            let excluded: Vec<_> = (0..rng.gen_range(0..=2)).map(|_| s(apex + rng.gen_range(0..=3))).collect();
            ConeMinusFinite::new(s(apex), excluded).expect("exclusions inside the cone").to_color_set()
        }
        _ => ColorSet::full(1),
    }
}

/// Criterion 6: lattice-point counts outside random arrangements.
pub fn suite_geometry(seed: u64, limits: Limits) -> SuiteReport {
    const CASES: usize = 100;
    let mut t = Tally::new(6, "arrangement counts equal lattice enumeration", CASES);
    let mut rng = rng_for(seed, 6);
    let max_n = limits.max_n.clamp(1, 4);
    let max_h = limits.max_e.min(5);
    let max_d = limits.max_d.clamp(1, 2);
    for case in 0..CASES {
        let n = rng.gen_range(1..=max_n);
        let scalar = random_arrangement(&mut rng, n, 1, max_h, 3);
        let m: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=6)).collect();
        let bounded: Vec<ColorSet> = (0..n).map(|_| random_scalar_list(&mut rng)).collect();

        let d = rng.gen_range(1..=max_d);
        let general = random_arrangement(&mut rng, n, d, max_h, 3);
        let lists: Vec<BTreeSet<LatticeVector>> = (0..n)
            .map(|_| (0..rng.gen_range(0..=4)).map(|_| random_vector(&mut rng, d, -2, 3)).collect())
            .collect();

        let mn = rng.gen_range(1..=max_n.min(3));
        let md = rng.gen_range(1..=max_d);
        let matrix = random_arrangement(&mut rng, mn, md, max_h, 3);
        let h: Vec<LatticeVector> = (0..mn).map(|_| random_vector(&mut rng, md, -2, 2)).collect();
        let upper: Vec<LatticeVector> = h.iter().map(|hi| hi + &random_vector(&mut rng, md, 0, 3)).collect();

        let outcome = (|| -> Result<bool, String> {
            let e = |x: crate::orthotope::OrthotopeError| x.to_string();
            let orth = count_orthotope(&scalar, &m).map_err(e)? == count_orthotope_bruteforce(&scalar, &m).map_err(e)?;
            let list = count_lists(&general, &lists).map_err(e)? == count_lists_bruteforce(&general, &lists).map_err(e)?;
            let bnd = count_lists_bounded(&scalar, &bounded, &m).map_err(e)?
                == count_lists_bounded_bruteforce(&scalar, &bounded, &m).map_err(e)?;
            let mat = count_matrix(&matrix, &h, &upper).map_err(e)?
                == count_matrix_bruteforce(&matrix, &h, &upper).map_err(e)?;
            Ok(orth && list && bnd && mat)
        })();
        t.check_result(outcome, || {
            format!("case {case}: scalar {:?} m {m:?}; general {:?}; matrix {:?} H {h:?} M {upper:?}", scalar.hyperplanes(), general.hyperplanes(), matrix.hyperplanes())
        });
    }
    t.finish()
}

fn random_cone_weights(rng: &mut ChaCha8Rng, g: &GainGraph) -> WeightedGainGraph<ConeMinusFinite> {
    let d = g.dim();
    let w = (0..g.vertex_count())
        .map(|_| {
            let apex = random_vector(rng, d, -2, 2);
            let excluded: Vec<LatticeVector> =
                (0..rng.gen_range(0..=2)).map(|_| &apex + &random_vector(rng, d, 0, 2)).collect();
            ConeMinusFinite::new(apex, excluded).expect("exclusions inside the cone")
        })
        .collect();
    WeightedGainGraph::new(g.clone(), w).expect("one weight per vertex")
}

fn piecewise_instances(seed: u64, limits: Limits, count: usize) -> Vec<PiecewiseChi> {
    let mut rng = rng_for(seed, 7);
    let shape = Shape {
        max_n: limits.max_n.clamp(1, 3),
        max_e: limits.max_e.min(4),
        max_d: limits.max_d.clamp(1, 2),
        balanced_loops: false,
        ..Shape::links(limits).with_loops()
    };
    (0..count)
        .map(|_| {
            let g = random_gain_graph(&mut rng, shape);
            PiecewiseChi::new(&random_cone_weights(&mut rng, &g)).expect("no balanced loops, half or loose edges")
        })
        .collect()
}

fn shifted(base: &[LatticeVector], by: i64) -> Vec<LatticeVector> {
    base.iter().map(|v| v.add_scalar(by)).collect()
}

const PIECEWISE_INSTANCES: usize = 30;

/// Criterion 7: the piecewise polynomial above its threshold.
pub fn suite_piecewise(seed: u64, limits: Limits) -> Vec<SuiteReport> {
    let instances = piecewise_instances(seed, limits, PIECEWISE_INSTANCES);
    let mut values = Tally::new(7, "p(m) equals the list chromatic function on threshold + [0,3]", PIECEWISE_INSTANCES);
    let mut chambers = Tally::new(7, "chamber polynomial agrees with p", PIECEWISE_INSTANCES);
    let mut second = Tally::new(7, "second differences vanish inside chambers", PIECEWISE_INSTANCES);
    let mut mixed = Tally::new(7, "mixed difference equals 1 inside chambers", PIECEWISE_INSTANCES);
    let mut zeros = Tally::new(7, "terms vanish below their bound", PIECEWISE_INSTANCES);
    let mut common = Tally::new(7, "common-bound polynomial", PIECEWISE_INSTANCES);
    let (mut points, mut literal_off, mut brute_checked) = (0usize, 0usize, 0usize);
    let (mut stencils, mut flat_stencils, mut cubes, mut flat_cubes) = (0usize, 0usize, 0usize, 0usize);

    for (case, chi) in instances.iter().enumerate() {
        let threshold = chi.threshold().to_vec();
        let p = |m: &[LatticeVector]| chi.value(m).expect("dimensions match");
        let describe = || format!("case {case}: {:?} weights {:?}", chi.graph(), chi.weights());

        let outcome = (|| -> Result<bool, String> {
            let mut ok = true;
            for m in bound_grid(&threshold, 3) {
                points += 1;
                let exact = chi.exact(&m).map_err(|e| e.to_string())?;
                ok &= p(&m) == exact;
                if chi.value_uncorrected(&m).map_err(|e| e.to_string())? != exact {
                    literal_off += 1;
                }
            }
            let lists: Vec<ColorSet> = chi.weights().iter().map(ConeMinusFinite::to_color_set).collect();
            let corner = shifted(&threshold, 1);
            if let Ok(brute) = count_proper_bruteforce(chi.graph(), &lists, &ideal_filter(&corner)) {
                brute_checked += 1;
                ok &= BigInt::from(brute) == p(&corner);
            }
            Ok(ok)
        })();
        values.check_result(outcome, describe);

        let outcome = (|| -> Result<bool, String> {
            let mut ok = true;
            for m in bound_grid(&threshold, 3) {
                let poly = chi.chamber_polynomial(&m).map_err(|e| e.to_string())?;
                let flat: Vec<i64> = m.iter().flat_map(|v| v.coords().to_vec()).collect();
                ok &= poly.eval(&flat) == p(&m);
                let full = vec![1u32; flat.len()];
                ok &= poly.coefficient(&full) == BigInt::one();
                ok &= (0..flat.len()).all(|i| poly.degree_in(i) <= 1);
            }
            Ok(ok)
        })();
        chambers.check_result(outcome, describe);

        let outcome = (|| -> Result<bool, String> {
            let mut ok = true;
            for m in bound_grid(&threshold, 3) {
                for slot in unit_slots(&m) {
                    stencils += 1;
                    let sig = chi.signature(&m).map_err(|e| e.to_string())?;
                    let same = (1..=2).all(|k| chi.signature(&crate::orthotope::bump(&m, slot, k)).ok() == Some(sig.clone()));
                    if same {
                        flat_stencils += 1;
                        ok &= second_difference(p, &m, slot).is_zero();
                    }
                }
            }
            Ok(ok)
        })();
        second.check_result(outcome, describe);

        let outcome = (|| -> Result<bool, String> {
            let mut ok = true;
            for m in bound_grid(&threshold, 2) {
                cubes += 1;
                let slots = unit_slots(&m);
                let sig = chi.signature(&m).map_err(|e| e.to_string())?;
                let same = (0u64..1 << slots.len())
                    .all(|mask| chi.signature(&cube_corner(&m, &slots, mask)).ok() == Some(sig.clone()));
                if same {
                    flat_cubes += 1;
                    ok &= mixed_difference(p, &m) == BigInt::one();
                }
            }
            Ok(ok)
        })();
        mixed.check_result(outcome, describe);

        let outcome = (|| -> Result<bool, String> {
            let mut ok = true;
            for m in bound_grid(&shifted(&threshold, -2), 2) {
                for term in chi.breakdown(&m).map_err(|e| e.to_string())? {
                    for (block, factor) in term.blocks.iter().zip(&term.factors) {
                        if block.iter().any(|&v| !term.bound[v].le(&m[v])) {
                            ok &= factor.is_zero();
                        }
                    }
                }
            }
            Ok(ok)
        })();
        zeros.check_result(outcome, describe);

        let outcome = (|| -> Result<bool, String> {
            let d = chi.graph().dim();
            let n = chi.graph().vertex_count();
            let probe = chi.common_bound(&LatticeVector::zero(d)).map_err(|e| e.to_string())?;
            let mut ok = probe.polynomial.coefficient(&vec![n as u32; d]) == BigInt::one();
            for m in bound_grid(std::slice::from_ref(&probe.threshold), 3) {
                let eval = chi.common_bound(&m[0]).map_err(|e| e.to_string())?;
                ok &= eval.above_threshold;
                ok &= eval.value == chi.exact(&vec![m[0].clone(); n]).map_err(|e| e.to_string())?;
            }
            Ok(ok)
        })();
        common.check_result(outcome, describe);
    }
    values.note(format!("{points} bound vectors compared; {brute_checked} corners also checked by enumeration"));
    values.note(format!("literal exclusion term differs from the count at {literal_off} of {points} bound vectors"));
    second.note(format!("{flat_stencils} of {stencils} stencils lie inside one chamber"));
    mixed.note(format!("{flat_cubes} of {cubes} unit cubes lie inside one chamber"));
    vec![values.finish(), chambers.finish(), second.finish(), mixed.finish(), zeros.finish(), common.finish()]
}

fn compose(outer: &[usize], inner: &[usize]) -> Vec<usize> {
    inner.iter().map(|&e| outer[e]).collect()
}

fn repeated_ops_hold<W: Weight>(wg: &WeightedGainGraph<W>, q: EdgeSet, r: EdgeSet) -> bool {
    let s = q.union(r);
    let first = wg.contract(q);
    let r_new = r.reindex(&first.edge_map);
    let twice = first.graph.contract(r_new);
    let once = wg.contract(s);
    let merged: Vec<Vec<usize>> = twice
        .blocks
        .iter()
        .map(|bs| {
            let mut block: Vec<usize> = bs.iter().flat_map(|&b| first.blocks[b].iter().copied()).collect();
            block.sort_unstable();
            block
        })
        .collect();
    let contract_ok = twice.graph == once.graph
        && compose(&first.edge_map, &twice.edge_map) == once.edge_map
        && merged == once.blocks;

    let (left, left_map) = first.graph.delete(r_new);
    let (deleted, del_map) = wg.delete(r);
    let right = deleted.contract(q.reindex(&del_map));
    let mixed_ok = left == right.graph && compose(&first.edge_map, &left_map) == compose(&del_map, &right.edge_map);

    let (dq, dq_map) = wg.delete(q);
    let (dqr, dqr_map) = dq.delete(r.reindex(&dq_map));
    let (ds, ds_map) = wg.delete(s);
    let delete_ok = dqr == ds && compose(&dq_map, &dqr_map) == ds_map;

    contract_ok && mixed_ok && delete_ok
}

fn random_disjoint_pair(rng: &mut ChaCha8Rng, m: usize) -> (EdgeSet, EdgeSet) {
    let (mut q, mut r) = (EdgeSet::EMPTY, EdgeSet::EMPTY);
    for e in 0..m {
        match rng.gen_range(0..3) {
            0 => q = q.insert(e),
            1 => r = r.insert(e),
            _ => {}
        }
    }
    (q, r)
}

fn has_balanced_digon(g: &GainGraph) -> bool {
    let links: Vec<usize> = g.links().collect();
    links.iter().enumerate().any(|(k, &a)| links[k + 1..].iter().any(|&b| g.is_balanced(EdgeSet::from_indices([a, b])) && {
        let (Edge::Link { tail: t1, head: h1, .. }, Edge::Link { tail: t2, head: h2, .. }) = (g.edge(a), g.edge(b)) else {
            return false;
        };
        (t1, h1) == (t2, h2) || (t1, h1) == (h2, t2)
    }))
}

/// Criterion 8: structural properties on small random graphs.
pub fn suite_structure(seed: u64, limits: Limits) -> Vec<SuiteReport> {
    const CASES: usize = 100;
    let mut rng = rng_for(seed, 8);
    let small = Limits { max_n: limits.max_n.clamp(1, 5), max_e: limits.max_e.min(6), max_d: limits.max_d.max(1) };
    let mut reports = Vec::new();

    let mut t = Tally::new(8, "repeated deletion and contraction", CASES);
    let shape = Shape::links(small).with_all_kinds();
    for case in 0..CASES {
        let g = random_gain_graph(&mut rng, shape);
        let (q, r) = random_disjoint_pair(&mut rng, g.edge_count());
        let ok = if case % 2 == 0 {
            repeated_ops_hold(&random_max(&mut rng, &g), q, r)
        } else {
            repeated_ops_hold(&random_sum(&mut rng, &g), q, r)
        };
        t.check(ok, || format!("case {case}: Q {q} R {r} in {g:?}"));
    }
    reports.push(t.finish());

    let mut t = Tally::new(8, "top switching: meet zero and gains killed", CASES);
    let shape = Shape::links(small).with_loops();
    for case in 0..CASES {
        let g = random_gain_graph(&mut rng, shape);
        let s = random_subset(&mut rng, g.edge_count());
        let s = if g.is_balanced(s) { s } else { EdgeSet::EMPTY };
        let Ok(eta) = top_switching(&g, s) else {
            t.check(false, || format!("case {case}: balanced set {s} rejected"));
            continue;
        };
        let partition = g.components(s);
        let meet_zero = partition.blocks.iter().all(|block| {
            crate::lattice::meet_all(block.iter().map(|&v| eta.value(v))).is_some_and(|m| m.is_zero())
        });
        let killed = s.iter().all(|e| match eta.switched_edge(g.edge(e)) {
            Edge::Link { gain, .. } | Edge::Loop { gain, .. } => gain.is_zero(),
            _ => true,
        });
        t.check(meet_zero && killed, || format!("case {case}: S {s} in {g:?}"));
    }
    reports.push(t.finish());

    let mut t = Tally::new(8, "improper sets are balanced and closed", CASES);
    for case in 0..CASES {
        let g = random_gain_graph(&mut rng, shape);
        let x: Vec<LatticeVector> = (0..g.vertex_count()).map(|_| random_vector(&mut rng, g.dim(), -1, 1)).collect();
        let outcome = improper_set(&g, &x).map(|i| g.is_balanced(i) && g.is_closed_balanced(i)).map_err(|e| e.to_string());
        t.check_result(outcome, || format!("case {case}: x {x:?} in {g:?}"));
    }
    reports.push(t.finish());

    let mut t = Tally::new(8, "minimal bases partition the power set into intervals", CASES);
    for case in 0..CASES {
        let g = random_gain_graph(&mut rng, shape);
        let ord = random_ordering(&mut rng, g.edge_count());
        let m = LiftMatroid::new(&g);
        let ground = m.ground();
        let mut ok = true;
        let mut covered = BigUint::zero();
        for s in ground.subsets() {
            if s.is_subset(g.all_edges()) {
                ok &= m.is_balanced(s) == g.is_balanced(s);
            }
            let f = m.minimal_basis(s, &ord);
            let Ok(report) = m.activities0(f, &ord) else {
                ok = false;
                continue;
            };
            ok &= f.is_subset(s) && s.is_subset(f.union(report.ea));
            if m.is_independent(s) {
                let report = m.activities0(s, &ord).expect("independent");
                covered += BigUint::one() << report.ea.len();
                ok &= m.is_balanced(s.union(report.ea)) == m.is_balanced(s);
                ok &= report.ea.subsets().all(|x| m.minimal_basis(s.union(x), &ord) == s);
            }
        }
        ok &= covered == BigUint::one() << ground.len();
        t.check(ok, || format!("case {case}: order {:?} in {g:?}", ord.order()));
    }
    reports.push(t.finish());

    let mut t = Tally::new(8, "reverse greedy extension: semibasis, activities and external activity", CASES);
    for case in 0..CASES {
        let g = random_gain_graph(&mut rng, shape);
        let ord = random_ordering(&mut rng, g.edge_count());
        let m = LiftMatroid::new(&g);
        let outcome = (|| -> Result<bool, String> {
            let err = |e: crate::activities::ActivityError| e.to_string();
            let mut ok = true;
            for f in spanning_forests(&g) {
                let tf = reverse_greedy_extension(&g, f, &ord).map_err(err)?;
                let semibasis = g
                    .all_edges()
                    .minus(tf)
                    .iter()
                    .all(|e| !(m.is_independent(tf.insert(e)) && g.is_balanced(tf.insert(e))));
                ok &= f.is_subset(tf) && semibasis && reverse_greedy_extension(&g, tf, &ord).map_err(err)? == tf;
                let af = activities(&g, f, &ord).map_err(err)?;
                let at = activities(&g, tf, &ord).map_err(err)?;
                ok &= at.ii.is_subset(f) && tf.minus(f).is_subset(at.ia);
                ok &= af.ii.is_subset(at.ii);
                ok &= af.ea.is_subset(m.closure(at.ii));
                let aii = activities(&g, at.ii, &ord).map_err(err)?;
                ok &= af.ea == aii.ea && af.ea == at.ea;
            }
            Ok(ok)
        })();
        t.check_result(outcome, || format!("case {case}: order {:?} in {g:?}", ord.order()));
    }
    reports.push(t.finish());

    let mut t = Tally::new(8, "external activity on graphs without balanced digons", CASES);
    let mut case = 0;
    let mut attempts = 0;
    while case < CASES && attempts < 50 * CASES {
        attempts += 1;
        let g = random_gain_graph(&mut rng, shape);
        if has_balanced_digon(&g) {
            continue;
        }
        let ord = random_ordering(&mut rng, g.edge_count());
        let m = LiftMatroid::new(&g);
        let broken_balanced_circle = |d: EdgeSet| {
            g.all_edges().minus(d).iter().any(|x| {
                let c = d.insert(x);
                m.is_circuit(c) && g.is_balanced(c) && ord.largest(c) == Some(x)
            })
        };
        let outcome = (|| -> Result<bool, String> {
            let mut ok = true;
            for f in spanning_forests(&g) {
                let report = activities(&g, f, &ord).map_err(|e| e.to_string())?;
                let mut expected = EdgeSet::EMPTY;
                for e in m.closure(f).minus(f).iter().filter(|&e| e < g.edge_count()) {
                    let c = m.fundamental_circuit(f, e).map_err(|e| e.to_string())?;
                    if broken_balanced_circle(c.remove(e)) {
                        expected = expected.insert(e);
                    }
                }
                ok &= report.ea == expected;
            }
            Ok(ok)
        })();
        t.check_result(outcome, || format!("case {case}: order {:?} in {g:?}", ord.order()));
        case += 1;
    }
    reports.push(t.finish());

    let mut t = Tally::new(8, "lift rank satisfies the matroid rank axioms", CASES);
    let shape = Shape::links(small).with_all_kinds();
    for case in 0..CASES {
        let g = random_gain_graph(&mut rng, shape);
        let m = LiftMatroid::new(&g);
        let ground = m.ground();
        let subsets: Vec<EdgeSet> = ground.subsets().collect();
        let rank: std::collections::HashMap<EdgeSet, usize> = subsets.iter().map(|&s| (s, m.rank(s))).collect();
        let mut ok = m.rank(EdgeSet::singleton(m.e0())) == 1;
        for &a in &subsets {
            ok &= rank[&a] <= a.len();
            ok &= ground.minus(a).iter().all(|e| rank[&a] <= rank[&a.insert(e)] && rank[&a.insert(e)] <= rank[&a] + 1);
            for &b in &subsets {
                ok &= rank[&a.union(b)] + rank[&a.intersection(b)] <= rank[&a] + rank[&b];
            }
            let real = a.remove(m.e0());
            let p = g.components(real);
            let expected = g.vertex_count() - p.component_count() + usize::from(a.contains(m.e0()) || !p.is_balanced());
            ok &= rank[&a] == expected;
        }
        t.check(ok, || format!("case {case}: {g:?}"));
    }
    reports.push(t.finish());
    reports
}

fn tutte_axioms_hold<W: Weight>(wg: &WeightedGainGraph<W>, other: &WeightedGainGraph<W>) -> Result<bool, String> {
    let err = |e: crate::dichromatic::PolynomialError| e.to_string();
    let g = wg.graph();
    let q = q_graph(wg).map_err(err)?;
    let plain = WeightedGainGraph::new(g.with_zero_gains(), wg.weights().to_vec()).map_err(|e| e.to_string())?;
    let mut ok = q_graph(&plain).map_err(err)? == q;

    for e in g.links() {
        let (deleted, _) = plain.delete(EdgeSet::singleton(e));
        let contracted = plain.contract(EdgeSet::singleton(e)).graph;
        ok &= q == q_graph(&deleted).map_err(err)?.add(&q_graph(&contracted).map_err(err)?);
    }

    let union = wg.disjoint_union(other).map_err(|e| e.to_string())?;
    ok &= q_graph(&union).map_err(err)? == q.mul(&q_graph(other).map_err(err)?);

    let empty = WeightedGainGraph::<W>::new(GainGraph::edgeless(g.dim(), 0), vec![]).map_err(|e| e.to_string())?;
    ok &= q_graph(&empty).map_err(err)? == QPolynomial::one();

    let (edgeless, _) = wg.delete(g.all_edges());
    let product = wg.weights().iter().fold(QPolynomial::one(), |acc, w| acc.mul(&QPolynomial::u(w.clone())));
    ok &= q_graph(&edgeless).map_err(err)? == product;
    ok &= q_total_subset(&edgeless) == product;

    let v_plus_one = QPolynomial::v().add(&QPolynomial::one());
    for (e, edge) in g.edges().iter().enumerate() {
        if let Edge::Loop { gain, .. } = edge {
            let (rest, _) = wg.delete(EdgeSet::singleton(e));
            ok &= q == v_plus_one.mul(&q_graph(&rest).map_err(err)?);
            if gain.is_zero() {
                ok &= q_total_subset(wg) == v_plus_one.mul(&q_total_subset(&rest));
            }
        }
    }
    if g.vertex_count() > 0 {
        let mut edges = g.edges().to_vec();
        edges.push(Edge::Loose);
        let loose = WeightedGainGraph::new(GainGraph::new(g.dim(), g.vertex_count(), edges).map_err(|e| e.to_string())?, wg.weights().to_vec())
            .map_err(|e| e.to_string())?;
        ok &= q_total_subset(&loose) == v_plus_one.mul(&q_total_subset(wg));
    }
    Ok(ok)
}

/// Criterion 9: the Tutte axioms for the gain-free polynomial.
pub fn suite_tutte_axioms(seed: u64, limits: Limits) -> SuiteReport {
    const CASES: usize = 100;
    let mut t = Tally::new(9, "Tutte axioms for the gain-free polynomial", CASES);
    let mut rng = rng_for(seed, 9);
    let shape = Shape::links(limits).with_loops();
    for case in 0..CASES {
        let g = random_gain_graph(&mut rng, shape);
        let other_n = rng.gen_range(1..=2);
        let h = random_graph_on(&mut rng, Shape { max_e: 3, ..shape }, other_n, g.dim());
        let outcome = if case % 2 == 0 {
            tutte_axioms_hold(&random_max(&mut rng, &g), &random_max(&mut rng, &h))
        } else {
            tutte_axioms_hold(&random_sum(&mut rng, &g), &random_sum(&mut rng, &h))
        };
        t.check_result(outcome, || format!("case {case}: {g:?} with {h:?}"));
    }
    t.finish()
}

/// Every suite, in criterion order.
pub fn run_all(seed: u64, limits: Limits) -> Vec<SuiteReport> {
    let mut out = vec![
        suite_worked_example(),
        suite_expansions(seed, limits),
        suite_forest_expansion(seed, limits),
        suite_coloring(seed, limits),
        suite_improper_exactly(seed, limits),
        suite_geometry(seed, limits),
    ];
    out.extend(suite_piecewise(seed, limits));
    out.extend(suite_structure(seed, limits));
    out.push(suite_tutte_axioms(seed, limits));
    out
}
