use serde::{Deserialize, Serialize};

use super::{solve, Game, GameOutcome, Rounds, SolverOptions};
use crate::error::{Error, Result};
use crate::graph::OrderedStructure;

/// Pebble game from `A` to `B`: `∀` pebbles points of `A`, `∃` answers in
/// `B`, and `∀` wins once the pebbled pairs are not a partial homomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EfConfig {
    pub a: OrderedStructure,
    pub b: OrderedStructure,
    pub pebbles: usize,
    pub rounds: Rounds,
}

/// Pebbled pairs `(a, b)`, sorted.
pub type Pebbles = Vec<(u8, u8)>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum EfMove {
    Start,
    /// Optionally lift the pair at `lift`, then pebble `element` of `A`.
    Place { lift: Option<usize>, element: usize },
}

pub struct EfGame {
    a: OrderedStructure,
    b: OrderedStructure,
    pebbles: usize,
}

impl EfGame {
    pub fn new(cfg: &EfConfig) -> Result<Self> {
        if cfg.pebbles == 0 {
            return Err(Error::InvalidParameter("at least one pebble is needed".into()));
        }
        if cfg.a.size() > 255 || cfg.b.size() > 255 {
            return Err(Error::InvalidParameter("structures are limited to 255 points".into()));
        }
        Ok(EfGame { a: cfg.a.clone(), b: cfg.b.clone(), pebbles: cfg.pebbles })
    }

    fn partial_hom(&self, pairs: &[(u8, u8)]) -> bool {
        pairs.iter().all(|&(a, b)| {
            pairs.iter().all(|&(c, d)| {
                let (a, b, c, d) = (a as usize, b as usize, c as usize, d as usize);
                (a != c || b == d) && (!self.a.less(a, c) || self.b.less(b, d))
            })
        })
    }
}

impl Game for EfGame {
    type State = Pebbles;
    type Move = EfMove;

    fn openings(&self) -> Vec<EfMove> {
        vec![EfMove::Start]
    }

    fn opening_replies(&self, _: &EfMove) -> Vec<Pebbles> {
        vec![Vec::new()]
    }

    fn moves(&self, s: &Pebbles) -> Vec<EfMove> {
        let mut lifts: Vec<Option<usize>> = Vec::new();
        if s.len() < self.pebbles {
            lifts.push(None);
        }
        lifts.extend((0..s.len()).filter(|&i| i == 0 || s[i] != s[i - 1]).map(Some));
        lifts
            .into_iter()
            .flat_map(|lift| (0..self.a.size()).map(move |element| EfMove::Place { lift, element }))
            .collect()
    }

    fn replies(&self, s: &Pebbles, m: &EfMove) -> Vec<Pebbles> {
        let EfMove::Place { lift, element } = *m else { return Vec::new() };
        let mut out = Vec::new();
        for b in 0..self.b.size() {
            let mut t = s.clone();
            if let Some(i) = lift {
                t.remove(i);
            }
            t.push((element as u8, b as u8));
            t.sort_unstable();
            if self.partial_hom(&t) {
                out.push(t);
            }
        }
        out.dedup();
        out
    }

    fn describe_state(&self, s: &Pebbles) -> String {
        let pairs: Vec<String> = s.iter().map(|(a, b)| format!("{a}->{b}")).collect();
        format!("{{{}}}", pairs.join(", "))
    }

    fn describe_move(&self, m: &EfMove) -> String {
        match m {
            EfMove::Start => "start".into(),
            EfMove::Place { lift: None, element } => format!("pebble {element}"),
            EfMove::Place { lift: Some(i), element } => format!("lift pair {i}, pebble {element}"),
        }
    }
}

pub fn ef_winner(cfg: &EfConfig, opts: SolverOptions) -> Result<GameOutcome> {
    let game = EfGame::new(cfg)?;
    let space = ((cfg.a.size() * cfg.b.size() + 1) as u128).saturating_pow(cfg.pebbles as u32);
    if space > opts.max_states as u128 * 64 {
        return Err(Error::CapExceeded { what: "pebble positions", size: space, cap: opts.max_states as u128 * 64 });
    }
    solve(&game, cfg.rounds, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::Player;

    fn cfg(a: OrderedStructure, b: OrderedStructure, pebbles: usize, rounds: Rounds) -> EfConfig {
        EfConfig { a, b, pebbles, rounds }
    }

    #[test]
    fn identical_structures_favour_exists() {
        let a = OrderedStructure::chain(3);
        for rounds in [Rounds::Finite(3), Rounds::Omega] {
            let out = ef_winner(&cfg(a.clone(), a.clone(), 2, rounds), SolverOptions::with_workers(2)).unwrap();
            assert_eq!(out.winner, Player::Exists);
        }
    }

    #[test]
    fn long_chain_into_short_chain() {
        let out = ef_winner(
            &cfg(OrderedStructure::chain(3), OrderedStructure::chain(2), 2, Rounds::Omega),
            SolverOptions::with_workers(2),
        )
        .unwrap();
        assert_eq!(out.winner, Player::Forall);
        assert_eq!(out.horizon, Rounds::Finite(2));
        assert!(!out.strategy.is_empty());
    }

    #[test]
    fn complete_two_point_graphs() {
        let k2 = OrderedStructure::complete(2);
        let out = ef_winner(&cfg(k2.clone(), k2, 2, Rounds::Omega), SolverOptions::with_workers(1)).unwrap();
        assert_eq!(out.winner, Player::Exists);
        assert_eq!(out.horizon, Rounds::Omega);
    }
}
