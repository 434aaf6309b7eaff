use std::collections::{HashMap, HashSet};
use std::sync::atomic::{AtomicBool, Ordering};

use dashmap::DashMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Game, GameOutcome, Player, Rounds, StrategyEntry};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_STATES: usize = 5_000_000;
pub const MAX_STRATEGY_ENTRIES: usize = 2_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub workers: usize,
    pub max_states: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            workers: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            max_states: DEFAULT_MAX_STATES,
        }
    }
}

impl SolverOptions {
    pub fn with_workers(workers: usize) -> Self {
        SolverOptions { workers, ..Self::default() }
    }

    fn run<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers.max(1))
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        Ok(pool.install(f))
    }
}

fn dec(r: Rounds) -> Rounds {
    match r {
        Rounds::Finite(k) => Rounds::Finite(k.saturating_sub(1)),
        Rounds::Omega => Rounds::Omega,
    }
}

/// Memoised minimax for a fixed number of rounds.
pub struct BoundedSolver<'g, G: Game> {
    game: &'g G,
    /// Per state: rounds known survivable, rounds known losing.
    memo: DashMap<G::State, (u32, u32)>,
    max_states: usize,
    overflow: AtomicBool,
}

impl<'g, G: Game> BoundedSolver<'g, G> {
    pub fn new(game: &'g G, max_states: usize) -> Self {
        BoundedSolver { game, memo: DashMap::new(), max_states, overflow: AtomicBool::new(false) }
    }

    pub fn states(&self) -> usize {
        self.memo.len()
    }

    fn check(&self) -> Result<()> {
        if self.overflow.load(Ordering::Relaxed) {
            return Err(Error::CapExceeded {
                what: "game states",
                size: self.memo.len() as u128,
                cap: self.max_states as u128,
            });
        }
        Ok(())
    }

    /// Whether `∃` survives `k` more rounds from `s`.
    pub fn survives(&self, s: &G::State, k: u32) -> bool {
        let k = self.game.depth_left(s).map_or(k, |d| k.min(d));
        if k == 0 || self.overflow.load(Ordering::Relaxed) {
            return true;
        }
        if let Some(b) = self.memo.get(s) {
            if k <= b.0 {
                return true;
            }
            if k >= b.1 {
                return false;
            }
        }
        let moves = self.ordered_moves(s, k);
        let ok = if k >= 2 && moves.len() > 1 {
            moves.par_iter().all(|m| self.answerable(s, m, k - 1))
        } else {
            moves.iter().all(|m| self.answerable(s, m, k - 1))
        };
        let mut e = self.memo.entry(s.clone()).or_insert((0, u32::MAX));
        if ok {
            e.0 = e.0.max(k);
        } else {
            e.1 = e.1.min(k);
        }
        drop(e);
        if self.memo.len() > self.max_states {
            self.overflow.store(true, Ordering::Relaxed);
        }
        ok
    }

    /// Moves from `s`, the most constrained first when the search goes deep.
    fn ordered_moves(&self, s: &G::State, k: u32) -> Vec<G::Move> {
        let moves = self.game.moves(s);
        if k < 2 || moves.len() < 2 {
            return moves;
        }
        let mut keyed: Vec<(usize, G::Move)> =
            moves.into_par_iter().map(|m| (self.game.replies(s, &m).len(), m)).collect();
        keyed.sort_by_key(|(n, _)| *n);
        keyed.into_iter().map(|(_, m)| m).collect()
    }

    /// Whether `∃` has a reply to `m` from which she survives `k` more rounds.
    pub fn answerable(&self, s: &G::State, m: &G::Move, k: u32) -> bool {
        if k == 0 {
            return self.game.has_reply(s, m);
        }
        !self.game.for_each_reply(s, m, &mut |r| !self.survives(&r, k))
    }

    /// Whether `∃` wins the `k`-round game, openings included.
    pub fn exists_wins(&self, k: u32) -> bool {
        self.game
            .openings()
            .par_iter()
            .all(|o| self.game.opening_replies(o).iter().any(|r| self.survives(r, k)))
    }

    /// First `∀` move from `s` that wins within `k` rounds.
    pub fn winning_move(&self, s: &G::State, k: u32) -> Option<G::Move> {
        let k = self.game.depth_left(s).map_or(k, |d| k.min(d));
        if k == 0 {
            return None;
        }
        self.ordered_moves(s, k).into_par_iter().find_first(|m| !self.answerable(s, m, k - 1))
    }

    /// First reply to `m` after which `∃` survives `k` more rounds.
    pub fn surviving_reply(&self, s: &G::State, m: &G::Move, k: u32) -> Option<G::State> {
        let mut found = None;
        self.game.for_each_reply(s, m, &mut |r| {
            if self.survives(&r, k) {
                found = Some(r);
                return false;
            }
            true
        });
        found
    }
}

pub fn solve_bounded<G: Game>(game: &G, rounds: Rounds, opts: SolverOptions) -> Result<GameOutcome> {
    let r = match rounds {
        Rounds::Finite(k) => k,
        Rounds::Omega => game
            .depth_bound()
            .ok_or_else(|| Error::Precondition("omega rounds on a game with repeating positions needs the arena solver".into()))?,
    };
    opts.run(|| {
        let solver = BoundedSolver::new(game, opts.max_states);
        let wins = solver.exists_wins(r);
        solver.check()?;
        let (winner, horizon) = if wins {
            (Player::Exists, rounds)
        } else {
            let h = (0..=r).find(|&k| !solver.exists_wins(k)).unwrap();
            (Player::Forall, Rounds::Finite(h))
        };
        solver.check()?;
        let (strategy, strategy_truncated) = extract(game, &(&solver, r), winner, horizon);
        solver.check()?;
        Ok(GameOutcome { winner, rounds, horizon, strategy, strategy_truncated, states: solver.states() as u64 })
    })?
}

/// The reachable position graph with, per position, the fewest rounds in which `∀` wins from it.
pub struct Arena<G: Game> {
    pub states: Vec<G::State>,
    index: HashMap<G::State, u32>,
    /// Per state, per `∀` move, the reply states.
    edges: Vec<Vec<Vec<u32>>>,
    openings: Vec<Vec<u32>>,
    lose_at: Vec<u32>,
}

impl<G: Game> Arena<G> {
    pub fn build(game: &G, max_states: usize) -> Result<Self> {
        let mut index: HashMap<G::State, u32> = HashMap::new();
        let mut states: Vec<G::State> = Vec::new();
        let intern = |s: G::State, index: &mut HashMap<G::State, u32>, states: &mut Vec<G::State>| -> u32 {
            *index.entry(s.clone()).or_insert_with(|| {
                states.push(s);
                (states.len() - 1) as u32
            })
        };
        let mut openings = Vec::new();
        for o in game.openings() {
            let rs = game.opening_replies(&o);
            openings.push(rs.into_iter().map(|r| intern(r, &mut index, &mut states)).collect());
        }
        let mut edges: Vec<Vec<Vec<u32>>> = Vec::new();
        let mut done = 0;
        while done < states.len() {
            let layer: Vec<Vec<Vec<G::State>>> = states[done..]
                .par_iter()
                .map(|s| game.moves(s).iter().map(|m| game.replies(s, m)).collect())
                .collect();
            done = states.len();
            for per_move in layer {
                let e = per_move
                    .into_iter()
                    .map(|rs| rs.into_iter().map(|r| intern(r, &mut index, &mut states)).collect())
                    .collect();
                edges.push(e);
            }
            if states.len() > max_states {
                return Err(Error::CapExceeded { what: "game states", size: states.len() as u128, cap: max_states as u128 });
            }
        }
        let mut lose_at = vec![u32::MAX; states.len()];
        let mut alive = vec![true; states.len()];
        for k in 1.. {
            let next: Vec<bool> = (0..states.len())
                .into_par_iter()
                .map(|s| alive[s] && edges[s].iter().all(|rs| rs.iter().any(|&r| alive[r as usize])))
                .collect();
            let mut changed = false;
            for s in 0..states.len() {
                if alive[s] && !next[s] {
                    lose_at[s] = k;
                    changed = true;
                }
            }
            alive = next;
            if !changed {
                break;
            }
        }
        Ok(Arena { states, index, edges, openings, lose_at })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Fewest rounds in which `∀` wins from `s`, `Omega` if never.
    pub fn lose_at(&self, s: &G::State) -> Option<Rounds> {
        self.index.get(s).map(|&i| to_rounds(self.lose_at[i as usize]))
    }

    pub(crate) fn survives(&self, s: &G::State, k: Rounds) -> bool {
        let at = to_rounds(self.lose_at[self.index[s] as usize]);
        at == Rounds::Omega || k < at
    }

    /// Fewest rounds in which `∀` wins the game, `Omega` if `∃` survives forever.
    pub fn value(&self) -> Rounds {
        self.openings
            .iter()
            .map(|rs| rs.iter().map(|&r| to_rounds(self.lose_at[r as usize])).max().unwrap_or(Rounds::Finite(0)))
            .min()
            .unwrap_or(Rounds::Omega)
    }

    pub fn exists_wins(&self, rounds: Rounds) -> bool {
        let v = self.value();
        v == Rounds::Omega || rounds < v
    }

    /// Number of `∀` moves summed over all positions.
    pub fn move_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }
}

fn to_rounds(k: u32) -> Rounds {
    if k == u32::MAX {
        Rounds::Omega
    } else {
        Rounds::Finite(k)
    }
}

pub fn solve_arena<G: Game>(game: &G, rounds: Rounds, opts: SolverOptions) -> Result<GameOutcome> {
    opts.run(|| {
        let arena = Arena::build(game, opts.max_states)?;
        let value = arena.value();
        let (winner, horizon) =
            if arena.exists_wins(rounds) { (Player::Exists, rounds) } else { (Player::Forall, value) };
        let (strategy, strategy_truncated) = extract(game, &(&arena, game), winner, horizon);
        Ok(GameOutcome { winner, rounds, horizon, strategy, strategy_truncated, states: arena.len() as u64 })
    })?
}

/// Bounded search where it is exact, the arena otherwise.
pub fn solve<G: Game>(game: &G, rounds: Rounds, opts: SolverOptions) -> Result<GameOutcome> {
    if rounds == Rounds::Omega && game.depth_bound().is_none() {
        solve_arena(game, rounds, opts)
    } else {
        solve_bounded(game, rounds, opts)
    }
}

/// Largest `k <= cap` such that `∃` wins the `k`-round game; `None` if she
/// cannot even answer the opening.
pub fn max_survivable_rounds<G: Game>(game: &G, cap: u32, opts: SolverOptions) -> Result<Option<u32>> {
    opts.run(|| {
        let solver = BoundedSolver::new(game, opts.max_states);
        let mut best = None;
        for k in 0..=cap {
            if !solver.exists_wins(k) {
                break;
            }
            best = Some(k);
        }
        solver.check()?;
        Ok(best)
    })?
}

/// What strategy extraction needs from a solved game.
trait Oracle<G: Game> {
    fn survives(&self, s: &G::State, k: Rounds) -> bool;
    /// A `∀` move from `s` that wins within `k` rounds.
    fn winning_move(&self, s: &G::State, k: Rounds) -> Option<G::Move>;
    /// An `∃` reply to `m` from which she survives `k` more rounds.
    fn keep(&self, s: &G::State, m: &G::Move, k: Rounds) -> Option<G::State>;
}

/// A bounded solver together with the round count standing in for `ω`.
impl<G: Game> Oracle<G> for (&BoundedSolver<'_, G>, u32) {
    fn survives(&self, s: &G::State, k: Rounds) -> bool {
        self.0.survives(s, self.fin(k))
    }

    fn winning_move(&self, s: &G::State, k: Rounds) -> Option<G::Move> {
        self.0.winning_move(s, self.fin(k))
    }

    fn keep(&self, s: &G::State, m: &G::Move, k: Rounds) -> Option<G::State> {
        self.0.surviving_reply(s, m, self.fin(k))
    }
}

trait Fin {
    fn fin(&self, k: Rounds) -> u32;
}

impl<G: Game> Fin for (&BoundedSolver<'_, G>, u32) {
    fn fin(&self, k: Rounds) -> u32 {
        match k {
            Rounds::Finite(k) => k,
            Rounds::Omega => self.1,
        }
    }
}

impl<G: Game> Oracle<G> for (&Arena<G>, &G) {
    fn survives(&self, s: &G::State, k: Rounds) -> bool {
        self.0.survives(s, k)
    }

    fn winning_move(&self, s: &G::State, k: Rounds) -> Option<G::Move> {
        let next = dec(k);
        self.1.moves(s).into_iter().find(|m| self.1.replies(s, m).iter().all(|r| !self.0.survives(r, next)))
    }

    fn keep(&self, s: &G::State, m: &G::Move, k: Rounds) -> Option<G::State> {
        self.1.replies(s, m).into_iter().find(|r| self.0.survives(r, k))
    }
}

struct Extract<'a, G: Game> {
    game: &'a G,
    oracle: &'a dyn Oracle<G>,
    out: Vec<StrategyEntry>,
    seen: HashSet<(G::State, Rounds)>,
    truncated: bool,
}

fn left(r: Rounds) -> u32 {
    match r {
        Rounds::Finite(k) => k,
        Rounds::Omega => u32::MAX,
    }
}

impl<G: Game> Extract<'_, G> {
    fn push(&mut self, e: StrategyEntry) -> bool {
        if self.out.len() >= MAX_STRATEGY_ENTRIES {
            self.truncated = true;
            return false;
        }
        self.out.push(e);
        true
    }

    /// `∃` to move after every `∀` move from `s`, with `k` rounds left.
    fn exists(&mut self, s: &G::State, k: Rounds) {
        if k == Rounds::Finite(0) || !self.seen.insert((s.clone(), k)) {
            return;
        }
        for m in self.game.moves(s) {
            let Some(r) = self.oracle.keep(s, &m, dec(k)) else {
                continue;
            };
            let e = StrategyEntry {
                player: Player::Exists,
                state: self.game.describe_state(s),
                rounds_left: left(k),
                challenge: Some(self.game.describe_move(&m)),
                play: self.game.describe_state(&r),
            };
            if !self.push(e) {
                return;
            }
            self.exists(&r, dec(k));
        }
    }

    /// `∀` to move from `s`, winning within `k` rounds.
    fn forall(&mut self, s: &G::State, k: Rounds) {
        if k == Rounds::Finite(0) || !self.seen.insert((s.clone(), k)) {
            return;
        }
        let next = dec(k);
        let Some(m) = self.oracle.winning_move(s, k) else { return };
        let e = StrategyEntry {
            player: Player::Forall,
            state: self.game.describe_state(s),
            rounds_left: left(k),
            challenge: None,
            play: self.game.describe_move(&m),
        };
        if !self.push(e) {
            return;
        }
        for r in self.game.replies(s, &m) {
            self.forall(&r, next);
        }
    }
}

fn extract<G: Game>(
    game: &G,
    oracle: &dyn Oracle<G>,
    winner: Player,
    horizon: Rounds,
) -> (Vec<StrategyEntry>, bool) {
    let mut x = Extract { game, oracle, out: Vec::new(), seen: HashSet::new(), truncated: false };
    let openings = game.openings();
    match winner {
        Player::Exists => {
            for o in &openings {
                let Some(r) = game.opening_replies(o).into_iter().find(|r| oracle.survives(r, horizon)) else { continue };
                let e = StrategyEntry {
                    player: Player::Exists,
                    state: "start".into(),
                    rounds_left: left(horizon),
                    challenge: Some(game.describe_move(o)),
                    play: game.describe_state(&r),
                };
                if !x.push(e) {
                    break;
                }
                x.exists(&r, horizon);
            }
        }
        Player::Forall => {
            if let Some(o) = openings.iter().find(|o| game.opening_replies(o).iter().all(|r| !oracle.survives(r, horizon))) {
                x.push(StrategyEntry {
                    player: Player::Forall,
                    state: "start".into(),
                    rounds_left: left(horizon),
                    challenge: None,
                    play: game.describe_move(o),
                });
                for r in game.opening_replies(o) {
                    x.forall(&r, horizon);
                }
            }
        }
    }
    (x.out, x.truncated)
}
