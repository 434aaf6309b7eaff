//! Round, budget and omega coherence of the game solvers, and independence
//! from the worker count, over seeded micro structures and the constructed
//! rainbow and pebble instances.

mod common;

use arcade_core::algebra::ca_validate;
use arcade_core::games::{solve_bounded, EfConfig, EfGame, Player, RainbowGame, RainbowGameConfig, RainbowOpening, Rounds, SolverOptions};
use arcade_core::graph::OrderedStructure;
use arcade_core::matrices::{ca_from_matrices, enumerate_basic_matrices};
use arcade_core::rainbow::RainbowSignature;
use common::coherence::{check, check_arena, group_ra, micro, network_game};

#[test]
fn seeded_micro_structures() {
    let mut shapes = std::collections::BTreeSet::new();
    for seed in 0..24 {
        let c = micro(seed);
        assert!(c.len() <= 12);
        assert!(ca_validate(&c).is_valid(), "seed {seed}");
        shapes.insert((c.dimension(), c.len()));
        let n = c.dimension();
        let label = format!("micro seed {seed}");
        check(&label, &|b| network_game(&c, b, false), &[n, n + 1], 3);
        check_arena(&label, &network_game(&c, n + 1, true), 3);
    }
    assert!(shapes.len() >= 5, "{shapes:?}");
}

#[test]
fn matrix_structures_of_small_groups() {
    for k in 1..=3 {
        let r = group_ra(k);
        let mats = enumerate_basic_matrices(&r, 3, 1000).unwrap();
        let c = ca_from_matrices(&r, 3, &mats).unwrap();
        assert!(c.len() <= 12 && ca_validate(&c).is_valid());
        let label = format!("Mat3(Z{k})");
        check(&label, &|b| network_game(&c, b, false), &[3, 4], 3);
        check_arena(&label, &network_game(&c, 4, true), 3);
    }
}

#[test]
fn pebble_instances() {
    let cases = [
        (OrderedStructure::chain(3), OrderedStructure::chain(2)),
        (OrderedStructure::chain(4), OrderedStructure::chain(3)),
        (OrderedStructure::complete(3), OrderedStructure::complete(2)),
        (OrderedStructure::chain(3), OrderedStructure::complete(3)),
        (OrderedStructure::antichain(2), OrderedStructure::chain(3)),
    ];
    for (a, b) in cases {
        let label = format!("ef {:?} -> {:?}", a.pairs(), b.pairs());
        let make = |p: usize| {
            EfGame::new(&EfConfig { a: a.clone(), b: b.clone(), pebbles: p, rounds: Rounds::Omega }).unwrap()
        };
        // More pebbles only help the spoiler.
        let mut prev: Option<Vec<bool>> = None;
        for p in 1..=3 {
            let g = make(p);
            let wins: Vec<bool> = (0..=4)
                .map(|k| solve_bounded(&g, Rounds::Finite(k), SolverOptions::with_workers(1)).unwrap().winner == Player::Exists)
                .collect();
            assert!(wins.windows(2).all(|w| w[0] || !w[1]), "{label}");
            if let Some(prev) = &prev {
                assert!(prev.iter().zip(&wins).all(|(x, y)| *x || !*y), "{label}: pebble monotonicity");
            }
            prev = Some(wins);
            check_arena(&label, &g, 4);
        }
    }
}

#[test]
fn rainbow_instance() {
    let sig = RainbowSignature::new(3, OrderedStructure::chain(3), OrderedStructure::chain(1)).unwrap();
    let make = |b: usize| {
        RainbowGame::new(&RainbowGameConfig {
            signature: sig.clone(),
            node_budget: b,
            rounds: Rounds::Omega,
            reuse: false,
            opening: RainbowOpening::Cone,
        })
        .unwrap()
    };
    check("rainbow chain3/chain1", &make, &[3, 4, 5], 3);
}
