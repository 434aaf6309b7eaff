//! Randomised properties of the graph layer and the constructions built on it.

use arcade_core::algebra::ra_validate;
use arcade_core::graph::{chromatic_number, Graph};
use arcade_core::monk::alpha_of_graph;
use proptest::prelude::*;

fn graph(max: usize) -> impl Strategy<Value = Graph> {
    (1..=max).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
            Graph::from_edges(n, pairs.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e)).unwrap()
        })
    })
}

/// Smallest k admitting a proper colouring, by trying every assignment.
fn brute_chromatic(g: &Graph) -> usize {
    let n = g.vertex_count();
    let edges = g.edges();
    (1..=n)
        .find(|&k| {
            (0..k.pow(n as u32)).any(|code| {
                let c = |v: usize| code / k.pow(v as u32) % k;
                edges.iter().all(|&(u, v)| c(u) != c(v))
            })
        })
        .unwrap_or(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chromatic_number_matches_exhaustive_colouring(g in graph(7)) {
        prop_assert_eq!(chromatic_number(&g).unwrap(), brute_chromatic(&g));
    }

    #[test]
    fn text_formats_round_trip(g in graph(9)) {
        prop_assert_eq!(Graph::from_dimacs(&g.to_dimacs()).unwrap(), g.clone());
        prop_assert_eq!(Graph::from_json(&g.to_json()).unwrap(), g);
    }

    #[test]
    fn alpha_structures_validate(g in graph(5)) {
        let r = alpha_of_graph(&g, 3).unwrap();
        let report = ra_validate(&r);
        prop_assert!(report.is_valid(), "{:?}: {}", g.edges(), report.summary());
    }
}
