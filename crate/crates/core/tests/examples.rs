use num_bigint::{BigInt, BigUint};

use wgg_core::activities::{forest_expansion, EdgeOrdering};
use wgg_core::coloring::{count_proper_bruteforce, ideal_filter, list_chromatic};
use wgg_core::orthotope::{bound_grid, count_orthotope, AffinographicArrangement, Hyperplane, PiecewiseChi};
use wgg_core::verify::worked_example_graph;
use wgg_core::{q_total_delcon, q_total_subset, ConeMinusFinite, Edge, GainGraph, LatticeVector, MaxZd, SumZd, WeightedGainGraph};

fn lv(c: &[i64]) -> LatticeVector {
    LatticeVector::from(c.to_vec())
}

fn order2_weights() -> Vec<ConeMinusFinite> {
    vec![
        ConeMinusFinite::new(lv(&[1, 0]), [lv(&[2, 1])]).unwrap(),
        ConeMinusFinite::new(lv(&[0, 3]), [lv(&[1, 4])]).unwrap(),
    ]
}

#[test]
fn worked_example_both_expansions() {
    let wg = WeightedGainGraph::new(worked_example_graph(), vec![MaxZd(lv(&[2, 0])), MaxZd(lv(&[-1, 3]))]).unwrap();
    let q = q_total_subset(&wg);
    assert_eq!(q, q_total_delcon(&wg));
    assert_eq!(q.to_string(), "u[(-1,3)]*u[(2,0)] + 2*u[(2,3)] + u[(4,3)] + 3*z + v*z");

    let ord = EdgeOrdering::new(vec![2, 0, 1]).unwrap();
    assert_eq!(forest_expansion(&wg, &ord).shift_v(1), q.balanced_part());
}

#[test]
fn worked_example_sum_semigroup_contracts_to_three_keys() {
    let wg = WeightedGainGraph::new(worked_example_graph(), vec![SumZd::new(lv(&[2, 0])), SumZd::new(lv(&[-1, 3]))]).unwrap();
    let q = q_total_subset(&wg);
    assert_eq!(q.to_string(), "u[(-1,3)]*u[(2,0)] + u[(1,3)#2] + u[(2,5)#2] + u[(3,3)#2] + 3*z + v*z");
}

#[test]
fn order_two_piecewise_against_enumeration() {
    let wg = WeightedGainGraph::new(worked_example_graph(), order2_weights()).unwrap();
    let chi = PiecewiseChi::new(&wg).unwrap();
    let lists: Vec<_> = order2_weights().iter().map(ConeMinusFinite::to_color_set).collect();
    for m in bound_grid(chi.threshold(), 1) {
        let brute = count_proper_bruteforce(wg.graph(), &lists, &ideal_filter(&m)).unwrap();
        assert_eq!(chi.value(&m).unwrap(), BigInt::from(brute.clone()));
        assert_eq!(list_chromatic(wg.graph(), &lists, &ideal_filter(&m)).unwrap(), BigInt::from(brute));
    }
    // Below the threshold the polynomial form is not claimed; the count is.
    let low = vec![lv(&[1, 0]), lv(&[0, 3])];
    let brute = count_proper_bruteforce(wg.graph(), &lists, &ideal_filter(&low)).unwrap();
    assert_eq!(chi.exact(&low).unwrap(), BigInt::from(brute));
}

#[test]
fn zero_gain_triangle_counts() {
    let z = lv(&[0]);
    let g = GainGraph::new(
        1,
        3,
        vec![
            Edge::Link { tail: 0, head: 1, gain: z.clone() },
            Edge::Link { tail: 1, head: 2, gain: z.clone() },
            Edge::Link { tail: 0, head: 2, gain: z },
        ],
    )
    .unwrap();
    let weights = vec![ConeMinusFinite::cone(lv(&[1])); 3];
    let chi = PiecewiseChi::new(&WeightedGainGraph::new(g, weights).unwrap()).unwrap();
    for k in 1..7 {
        let m = vec![lv(&[k]); 3];
        assert_eq!(chi.exact(&m).unwrap(), BigInt::from(k * (k - 1) * (k - 2)));
    }
    let common = chi.common_bound(&lv(&[5])).unwrap();
    assert_eq!(common.value, BigInt::from(60));
}

#[test]
fn diagonal_orthotope() {
    let arr = AffinographicArrangement::new(2, 1, vec![Hyperplane { i: 0, j: 1, a: lv(&[0]) }]).unwrap();
    assert_eq!(count_orthotope(&arr, &[2, 3]).unwrap(), BigUint::from(9u32));
}
