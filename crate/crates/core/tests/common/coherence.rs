//! Round, budget and omega coherence checks for the game solvers.

use arcade_core::algebra::{close_peircean, Accessibility, CaAtomStructure, RaAtomStructure};
use arcade_core::games::{
    solve, solve_arena, solve_bounded, AtomicGameConfig, CaNetworkGame, Game, GameOutcome, Player, Rounds, SolverOptions,
};
use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Disjoint cubes `U_b^n` of random side, atoms shuffled.
pub fn micro(seed: u64) -> CaAtomStructure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = if rng.random_bool(0.6) { 2 } else { 3 };
    let max_side = if n == 2 { 3 } else { 2 };
    let mut tuples: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut block = 0;
    loop {
        let side: usize = rng.random_range(1..=max_side);
        let size = side.pow(n as u32);
        if tuples.len() + size > 12 || (block > 0 && rng.random_bool(0.3)) {
            break;
        }
        for code in 0..size {
            tuples.push((block, (0..n).map(|i| code / side.pow(i as u32) % side).collect()));
        }
        block += 1;
    }
    tuples.shuffle(&mut rng);
    let len = tuples.len();
    let names = tuples.iter().map(|(b, t)| format!("{b}:{t:?}")).collect();
    let ti = (0..n)
        .map(|i| {
            Accessibility::from_keys(tuples.iter().map(|(b, t)| {
                let mut t = t.clone();
                t[i] = usize::MAX;
                (*b, t)
            }))
        })
        .collect();
    let mut eij = Vec::new();
    let mut pij = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let mut e = FixedBitSet::with_capacity(len);
            for (a, (_, t)) in tuples.iter().enumerate() {
                e.set(a, t[i] == t[j]);
            }
            eij.push(e);
            pij.push(
                tuples
                    .iter()
                    .map(|(b, t)| {
                        let mut s = t.clone();
                        s.swap(i, j);
                        tuples.iter().position(|(c, u)| c == b && *u == s).unwrap() as u32
                    })
                    .collect(),
            );
        }
    }
    CaAtomStructure::new(n, names, ti, eij, Some(pij)).unwrap()
}

pub fn group_ra(k: usize) -> RaAtomStructure {
    let conv: Vec<usize> = (0..k).map(|a| (k - a) % k).collect();
    let cycles = close_peircean((0..k).flat_map(|a| (0..k).map(move |b| (a, b, (a + b) % k))), &conv);
    RaAtomStructure::new((0..k).map(|a| a.to_string()).collect(), [0], conv, cycles).unwrap()
}

pub fn key(o: &GameOutcome) -> (Player, Rounds, &[arcade_core::games::StrategyEntry]) {
    (o.winner, o.horizon, &o.strategy)
}

/// Per budget, the `∃`-winning round counts up to `max_rounds` must form an
/// initial segment, shrinking as the budget grows; omega must agree with the
/// finite games; one worker and two must agree.
pub fn check<G: Game>(label: &str, make: &dyn Fn(usize) -> G, budgets: &[usize], max_rounds: u32) {
    let one = SolverOptions::with_workers(1);
    let two = SolverOptions::with_workers(2);
    let mut last: Option<Vec<bool>> = None;
    for &b in budgets {
        let g = make(b);
        let wins: Vec<bool> = (0..=max_rounds)
            .map(|k| {
                let o1 = solve_bounded(&g, Rounds::Finite(k), one).unwrap();
                let o2 = solve_bounded(&g, Rounds::Finite(k), two).unwrap();
                assert_eq!(key(&o1), key(&o2), "{label}: workers differ at budget {b}, {k} rounds");
                o1.winner == Player::Exists
            })
            .collect();
        assert!(wins[0], "{label}: zero rounds lost");
        assert!(wins.windows(2).all(|w| w[0] || !w[1]), "{label}: not round monotone at budget {b}: {wins:?}");
        if let Some(prev) = &last {
            assert!(
                prev.iter().zip(&wins).all(|(p, w)| *p || !*w),
                "{label}: not budget monotone at {b}: {prev:?} then {wins:?}"
            );
        }
        let omega = solve(&g, Rounds::Omega, one).unwrap();
        assert_eq!(key(&omega), key(&solve(&g, Rounds::Omega, two).unwrap()), "{label}: omega workers differ");
        match (omega.winner, omega.horizon) {
            (Player::Exists, _) => assert!(wins.iter().all(|&w| w), "{label}: omega won but a finite game lost"),
            (Player::Forall, Rounds::Finite(h)) => {
                for k in 0..=max_rounds {
                    assert_eq!(wins[k as usize], k < h, "{label}: omega horizon {h} vs {k} rounds");
                }
            }
            (Player::Forall, Rounds::Omega) => panic!("{label}: forall cannot win at omega"),
        }
        last = Some(wins);
    }
}

/// Omega by the arena fixpoint against the bounded solver, on a game whose positions repeat.
pub fn check_arena<G: Game>(label: &str, g: &G, max_rounds: u32) {
    let one = SolverOptions::with_workers(1);
    let arena = solve_arena(g, Rounds::Omega, one).unwrap();
    assert_eq!(key(&arena), key(&solve_arena(g, Rounds::Omega, SolverOptions::with_workers(2)).unwrap()));
    for k in 0..=max_rounds {
        let finite = solve_bounded(g, Rounds::Finite(k), one).unwrap().winner;
        let expected = match arena.horizon {
            Rounds::Finite(h) if arena.winner == Player::Forall => {
                if k < h {
                    Player::Exists
                } else {
                    Player::Forall
                }
            }
            _ => Player::Exists,
        };
        assert_eq!(finite, expected, "{label}: arena {:?}/{} vs {k} rounds", arena.winner, arena.horizon);
    }
}

pub fn network_game(c: &CaAtomStructure, budget: usize, reuse: bool) -> CaNetworkGame {
    let cfg = AtomicGameConfig { structure: c.clone(), node_budget: budget, rounds: Rounds::Omega, reuse };
    CaNetworkGame::new(&cfg).unwrap()
}
