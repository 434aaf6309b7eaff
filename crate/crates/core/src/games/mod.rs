//! Exact solvers for the two-player games played over ordered structures,
//! cylindric atom structures and rainbow coloured graphs.
//!
//! All games share one shape: `∀` opens, `∃` answers the opening, and each
//! later round is one `∀` move followed by one `∃` reply. `∃` loses as soon as
//! she has no reply and wins if the rounds run out or `∀` has nothing to play.

mod atomic;
mod canon;
mod ef;
mod play;
mod rainbow_game;
mod solver;

use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use atomic::{atomic_game_winner, AtomicGameConfig, CaNetworkGame, Network, NetworkMove};
pub use ef::{ef_winner, EfConfig, EfGame, EfMove, Pebbles};
pub use play::{interactive_play, replay, Step, Transcript};
pub use rainbow_game::{cone_opening, rainbow_game_winner, RainbowGame, RainbowGameConfig, RainbowMove, RainbowOpening};
pub use solver::{
    max_survivable_rounds, solve, solve_arena, solve_bounded, Arena, BoundedSolver, SolverOptions,
    DEFAULT_MAX_STATES, MAX_STRATEGY_ENTRIES,
};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Player {
    #[serde(rename = "forall")]
    Forall,
    #[serde(rename = "exists")]
    Exists,
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Forall => "forall",
            Player::Exists => "exists",
        })
    }
}

impl FromStr for Player {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "forall" | "A" | "∀" => Ok(Player::Forall),
            "exists" | "E" | "∃" => Ok(Player::Exists),
            _ => Err(Error::Parse(format!("player `{s}`"))),
        }
    }
}

/// A number of rounds, possibly `ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rounds {
    Finite(u32),
    Omega,
}

impl fmt::Display for Rounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rounds::Finite(k) => write!(f, "{k}"),
            Rounds::Omega => f.write_str("omega"),
        }
    }
}

impl FromStr for Rounds {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "inf" | "omega" | "ω" => Ok(Rounds::Omega),
            _ => s.parse().map(Rounds::Finite).map_err(|_| Error::Parse(format!("rounds `{s}`"))),
        }
    }
}

impl Serialize for Rounds {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Rounds::Finite(k) => s.serialize_u32(*k),
            Rounds::Omega => s.serialize_str("omega"),
        }
    }
}

impl<'de> Deserialize<'de> for Rounds {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u32),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(k) => Ok(Rounds::Finite(k)),
            Raw::S(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// One line of an extracted strategy. For `∀` lines `challenge` is empty and
/// `play` is his move; for `∃` lines `play` is her reply to `challenge`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyEntry {
    pub player: Player,
    pub state: String,
    pub rounds_left: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub challenge: Option<String>,
    pub play: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameOutcome {
    pub winner: Player,
    pub rounds: Rounds,
    /// For `∀`: the fewest rounds in which he forces a win. For `∃`: the
    /// rounds she survives, `omega` when she survives forever.
    pub horizon: Rounds,
    pub strategy: Vec<StrategyEntry>,
    pub strategy_truncated: bool,
    pub states: u64,
}

/// A game in the common shape. States must be canonical: two positions that
/// are isomorphic compare equal.
pub trait Game: Sync {
    type State: Clone + Eq + Hash + Ord + Send + Sync;
    type Move: Clone + Send + Sync;

    fn openings(&self) -> Vec<Self::Move>;
    fn opening_replies(&self, m: &Self::Move) -> Vec<Self::State>;
    fn moves(&self, s: &Self::State) -> Vec<Self::Move>;
    /// Distinct replies, sorted.
    fn replies(&self, s: &Self::State, m: &Self::Move) -> Vec<Self::State>;

    /// Feeds replies to `f` until it returns `false`; returns `false` if stopped.
    /// Replies may repeat.
    fn for_each_reply(&self, s: &Self::State, m: &Self::Move, f: &mut dyn FnMut(Self::State) -> bool) -> bool {
        for r in self.replies(s, m) {
            if !f(r) {
                return false;
            }
        }
        true
    }

    fn has_reply(&self, s: &Self::State, m: &Self::Move) -> bool {
        !self.for_each_reply(s, m, &mut |_| false)
    }

    /// Upper bound on the length of any play, when positions never repeat.
    fn depth_bound(&self) -> Option<u32> {
        None
    }

    /// Upper bound on the rounds still playable from `s`.
    fn depth_left(&self, _s: &Self::State) -> Option<u32> {
        None
    }

    fn describe_state(&self, s: &Self::State) -> String;
    fn describe_move(&self, m: &Self::Move) -> String;
}
