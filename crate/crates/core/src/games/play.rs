use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::solver::{Arena, BoundedSolver};
use super::{Game, Player, Rounds, SolverOptions};
use crate::error::{Error, Result};

/// One choice made during play. `options` is the menu offered, `choice` the
/// index picked from it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub round: u32,
    pub player: Player,
    pub engine: bool,
    pub options: Vec<String>,
    pub choice: usize,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub human: Player,
    pub rounds: Rounds,
    pub steps: Vec<Step>,
    /// `None` when the human quit before the game was decided.
    pub winner: Option<Player>,
    pub final_state: String,
}

enum Judge<'g, G: Game> {
    Bounded(BoundedSolver<'g, G>, u32),
    Arena(Arena<G>),
}

impl<'g, G: Game> Judge<'g, G> {
    fn new(game: &'g G, rounds: Rounds, opts: SolverOptions) -> Result<Self> {
        let bound = match rounds {
            Rounds::Finite(k) => Some(k),
            Rounds::Omega => game.depth_bound(),
        };
        Ok(match bound {
            Some(k) => Judge::Bounded(BoundedSolver::new(game, opts.max_states), k),
            None => Judge::Arena(Arena::build(game, opts.max_states)?),
        })
    }

    /// Rounds to search with when `left` rounds remain.
    fn horizon(&self, left: Rounds) -> Rounds {
        match (self, left) {
            (Judge::Bounded(_, k), Rounds::Omega) => Rounds::Finite(*k),
            _ => left,
        }
    }

    fn survives(&self, s: &G::State, left: Rounds) -> bool {
        match (self, self.horizon(left)) {
            (Judge::Bounded(b, _), Rounds::Finite(k)) => b.survives(s, k),
            (Judge::Bounded(..), Rounds::Omega) => unreachable!(),
            (Judge::Arena(a), k) => a.survives(s, k),
        }
    }
}

fn dec(r: Rounds) -> Rounds {
    match r {
        Rounds::Finite(k) => Rounds::Finite(k.saturating_sub(1)),
        Rounds::Omega => Rounds::Omega,
    }
}

enum Pick {
    Index(usize),
    Quit,
}

struct Session<'a, G: Game> {
    game: &'a G,
    judge: Judge<'a, G>,
    human: Player,
    input: &'a mut dyn BufRead,
    output: &'a mut dyn Write,
    steps: Vec<Step>,
}

impl<G: Game> Session<'_, G> {
    fn ask(&mut self, round: u32, player: Player, prompt: &str, options: Vec<String>, best: usize) -> Result<Pick> {
        let engine = player != self.human;
        let choice = if engine {
            best
        } else {
            writeln!(self.output, "{prompt}")?;
            for (i, o) in options.iter().enumerate() {
                writeln!(self.output, "  {}) {o}", i + 1)?;
            }
            loop {
                write!(self.output, "{player}> ")?;
                self.output.flush()?;
                let mut line = String::new();
                if self.input.read_line(&mut line)? == 0 {
                    return Ok(Pick::Quit);
                }
                match line.trim() {
                    "q" | "quit" => return Ok(Pick::Quit),
                    "?" => writeln!(self.output, "hint: {}", best + 1)?,
                    "*" => break best,
                    t => match t.parse::<usize>() {
                        Ok(i) if (1..=options.len()).contains(&i) => break i - 1,
                        _ => writeln!(self.output, "pick a number from 1 to {}, ? for a hint, q to quit", options.len())?,
                    },
                }
            }
        };
        let text = options[choice].clone();
        if engine {
            writeln!(self.output, "{player} plays: {text}")?;
        }
        self.steps.push(Step { round, player, engine, options, choice, text });
        Ok(Pick::Index(choice))
    }

    fn finish(self, rounds: Rounds, winner: Option<Player>, state: Option<&G::State>) -> Result<Transcript> {
        let final_state = state.map(|s| self.game.describe_state(s)).unwrap_or_else(|| "start".into());
        match winner {
            Some(w) => writeln!(self.output, "{w} wins")?,
            None => writeln!(self.output, "stopped")?,
        }
        Ok(Transcript { human: self.human, rounds, steps: self.steps, winner, final_state })
    }
}

/// Play `game` over `rounds` at the terminal: the human takes `human`, the
/// engine plays the other side optimally. Bad input re-prompts; `?` prints
/// the engine's recommendation, `*` plays it, `q` or end of input stops.
pub fn interactive_play<G: Game>(
    game: &G,
    rounds: Rounds,
    human: Player,
    opts: SolverOptions,
    input: &mut dyn BufRead,
    output: &mut dyn Write,
) -> Result<Transcript> {
    let judge = Judge::new(game, rounds, opts)?;
    let mut ses = Session { game, judge, human, input, output, steps: Vec::new() };

    let openings = game.openings();
    if openings.is_empty() {
        return Err(Error::Precondition("the game has no opening".into()));
    }
    let best = openings
        .iter()
        .position(|o| game.opening_replies(o).iter().all(|r| !ses.judge.survives(r, rounds)))
        .unwrap_or(0);
    let menu = openings.iter().map(|o| game.describe_move(o)).collect();
    let Pick::Index(i) = ses.ask(0, Player::Forall, "opening:", menu, best)? else {
        return ses.finish(rounds, None, None);
    };
    let replies = game.opening_replies(&openings[i]);
    if replies.is_empty() {
        return ses.finish(rounds, Some(Player::Forall), None);
    }
    let best = replies.iter().position(|r| ses.judge.survives(r, rounds)).unwrap_or(0);
    let menu = replies.iter().map(|r| game.describe_state(r)).collect();
    let Pick::Index(j) = ses.ask(0, Player::Exists, "answer the opening:", menu, best)? else {
        return ses.finish(rounds, None, None);
    };
    let mut state = replies[j].clone();
    let mut left = rounds;
    let mut round = 0;
    loop {
        writeln!(ses.output, "position: {}", game.describe_state(&state))?;
        if left == Rounds::Finite(0) {
            return ses.finish(rounds, Some(Player::Exists), Some(&state));
        }
        let moves = game.moves(&state);
        if moves.is_empty() {
            return ses.finish(rounds, Some(Player::Exists), Some(&state));
        }
        round += 1;
        let next = dec(left);
        let best = moves
            .iter()
            .position(|m| game.replies(&state, m).iter().all(|r| !ses.judge.survives(r, next)))
            .unwrap_or(0);
        let menu = moves.iter().map(|m| game.describe_move(m)).collect();
        let Pick::Index(i) = ses.ask(round, Player::Forall, "move:", menu, best)? else {
            return ses.finish(rounds, None, Some(&state));
        };
        let replies = game.replies(&state, &moves[i]);
        if replies.is_empty() {
            return ses.finish(rounds, Some(Player::Forall), Some(&state));
        }
        let best = replies.iter().position(|r| ses.judge.survives(r, next)).unwrap_or(0);
        let menu = replies.iter().map(|r| game.describe_state(r)).collect();
        let Pick::Index(j) = ses.ask(round, Player::Exists, "reply:", menu, best)? else {
            return ses.finish(rounds, None, Some(&state));
        };
        state = replies[j].clone();
        left = next;
    }
}

/// Re-run the choices of `t`, checking every menu, and return the final
/// position's description.
pub fn replay<G: Game>(game: &G, t: &Transcript) -> Result<String> {
    let mismatch = |i: usize, what: &str| Error::SchemaMismatch(format!("transcript step {i}: {what}"));
    let check = |i: usize, step: &Step, menu: Vec<String>| -> Result<usize> {
        if step.options != menu {
            return Err(mismatch(i, "menu differs"));
        }
        if step.choice >= menu.len() {
            return Err(mismatch(i, "choice out of range"));
        }
        Ok(step.choice)
    };
    let mut steps = t.steps.iter().enumerate();
    let openings = game.openings();
    let Some((i, s)) = steps.next() else { return Ok("start".into()) };
    let o = &openings[check(i, s, openings.iter().map(|o| game.describe_move(o)).collect())?];
    let replies = game.opening_replies(o);
    let Some((i, s)) = steps.next() else { return Ok("start".into()) };
    let mut state = replies[check(i, s, replies.iter().map(|r| game.describe_state(r)).collect())?].clone();
    while let Some((i, s)) = steps.next() {
        let moves = game.moves(&state);
        let m = &moves[check(i, s, moves.iter().map(|m| game.describe_move(m)).collect())?];
        let replies = game.replies(&state, m);
        let Some((i, s)) = steps.next() else { break };
        state = replies[check(i, s, replies.iter().map(|r| game.describe_state(r)).collect())?].clone();
    }
    Ok(game.describe_state(&state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{ef_winner, EfConfig, EfGame};
    use crate::graph::OrderedStructure;

    fn game(a: usize, b: usize) -> (EfGame, EfConfig) {
        let cfg = EfConfig {
            a: OrderedStructure::chain(a),
            b: OrderedStructure::chain(b),
            pebbles: 2,
            rounds: Rounds::Finite(3),
        };
        (EfGame::new(&cfg).unwrap(), cfg)
    }

    fn run(g: &EfGame, human: Player, script: &str) -> (Transcript, String) {
        let mut out = Vec::new();
        let t = interactive_play(g, Rounds::Finite(3), human, SolverOptions::with_workers(1), &mut script.as_bytes(), &mut out)
            .unwrap();
        (t, String::from_utf8(out).unwrap())
    }

    #[test]
    fn engine_exists_holds_a_winning_game() {
        let (g, _) = game(3, 3);
        for script in ["1\n1\n1\n1\n", "3\n2\n1\n", "6\n5\n4\n"] {
            let (t, _) = run(&g, Player::Forall, script);
            assert_ne!(t.winner, Some(Player::Forall));
        }
    }

    #[test]
    fn bad_input_reprompts() {
        let (g, _) = game(3, 3);
        let (t, out) = run(&g, Player::Forall, "x\n99\n?\n1\nq\n");
        assert!(out.contains("pick a number"));
        assert!(out.contains("hint:"));
        assert_eq!(t.winner, None);
        assert_eq!(t.steps.iter().filter(|s| !s.engine).count(), 1);
    }

    #[test]
    fn following_hints_wins_for_the_winner() {
        let (g, cfg) = game(3, 2);
        let solved = ef_winner(&cfg, SolverOptions::with_workers(1)).unwrap();
        let (t, _) = run(&g, solved.winner, &"*\n".repeat(8));
        assert_eq!(t.winner, Some(solved.winner));
    }

    #[test]
    fn replay_reaches_the_same_position() {
        let (g, _) = game(3, 2);
        let (t, _) = run(&g, Player::Forall, "1\n2\n3\n4\n");
        let json = serde_json::to_string(&t).unwrap();
        let back: Transcript = serde_json::from_str(&json).unwrap();
        assert_eq!(replay(&g, &back).unwrap(), t.final_state);
    }
}
