use num_bigint::BigInt;
use proptest::prelude::*;

use wgg_core::coloring::{count_proper_bruteforce, full_filter, list_chromatic, list_chromatic_alternating};
use wgg_core::orthotope::{count_orthotope, count_orthotope_bruteforce, AffinographicArrangement, Hyperplane};
use wgg_core::{q_total_delcon, q_total_subset, ColorSet, Edge, EdgeSet, GainGraph, LatticeVector, SumZd, WeightedGainGraph};

fn lv(x: i64) -> LatticeVector {
    LatticeVector::from(vec![x])
}

/// Scalar gain graphs on 1 to 4 vertices; `kind` 0 makes a loop.
fn scalar_graph() -> impl Strategy<Value = GainGraph> {
    (1usize..=4).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n, -2i64..=2, 0u8..4), 0..=5).prop_map(move |raw| {
            let edges = raw
                .into_iter()
                .map(|(t, h, g, kind)| {
                    if t == h || kind == 0 {
                        Edge::Loop { vertex: t, gain: lv(g) }
                    } else {
                        Edge::Link { tail: t, head: h, gain: lv(g) }
                    }
                })
                .collect();
            GainGraph::new(1, n, edges).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn expansions_agree(g in scalar_graph(), w in prop::collection::vec(-3i64..=3, 4)) {
        let weights = (0..g.vertex_count()).map(|i| SumZd::new(lv(w[i]))).collect();
        let wg = WeightedGainGraph::new(g, weights).unwrap();
        prop_assert_eq!(q_total_subset(&wg), q_total_delcon(&wg));
    }

    #[test]
    fn coloring_formulas_match_enumeration(
        g in scalar_graph(),
        lists in prop::collection::vec(prop::collection::btree_set(-2i64..=3, 0..=3), 4),
    ) {
        let lists: Vec<ColorSet> = (0..g.vertex_count()).map(|i| ColorSet::finite(1, lists[i].iter().map(|&x| lv(x)))).collect();
        let filter = full_filter(g.vertex_count(), 1);
        let brute = BigInt::from(count_proper_bruteforce(&g, &lists, &filter).unwrap());
        prop_assert_eq!(list_chromatic(&g, &lists, &filter).unwrap(), brute.clone());
        prop_assert_eq!(list_chromatic_alternating(&g, &lists, &filter).unwrap(), brute);
    }

    #[test]
    fn contraction_keeps_one_vertex_per_balanced_block(g in scalar_graph(), mask in any::<u64>()) {
        let s = EdgeSet(mask & g.all_edges().0);
        let weights = vec![SumZd::new(lv(0)); g.vertex_count()];
        let wg = WeightedGainGraph::new(g.clone(), weights).unwrap();
        let partition = g.components(s);
        let c = wg.contract(s);
        prop_assert_eq!(c.graph.vertex_count(), partition.balanced_count());
        prop_assert_eq!(c.graph.edge_count() + s.len(), g.edge_count());
    }

    #[test]
    fn orthotope_count_matches_enumeration(
        n in 1usize..=3,
        planes in prop::collection::vec((0usize..3, 0usize..3, -3i64..=3), 0..=4),
        m in prop::collection::vec(0i64..=5, 3),
    ) {
        let hyperplanes: Vec<Hyperplane> = planes
            .into_iter()
            .filter(|&(i, j, a)| i < n && j < n && !(i == j && a == 0))
            .map(|(i, j, a)| Hyperplane { i, j, a: lv(a) })
            .collect();
        let arr = AffinographicArrangement::new(n, 1, hyperplanes).unwrap();
        prop_assert_eq!(count_orthotope(&arr, &m[..n]).unwrap(), count_orthotope_bruteforce(&arr, &m[..n]).unwrap());
    }
}
