use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use arcade_core::algebra::{ca_validate, ra_validate, AtomStructure, RaAtomStructure};
use arcade_core::games::{
    atomic_game_winner, ef_winner, interactive_play, rainbow_game_winner, replay, AtomicGameConfig, CaNetworkGame,
    EfConfig, EfGame, Game, Player, RainbowGame, RainbowGameConfig, RainbowOpening, Rounds, Transcript,
};
use arcade_core::graph::{chromatic_number_with_cap, parse_graph_spec, Graph, OrderedStructure};
use arcade_core::matrices::{enumerate_basic_matrices, is_cylindric_basis};
use arcade_core::monk::{alpha_of_graph, blow_up, maddux_a, BlowUpRule, BlurSchema};
use arcade_core::rainbow::{enumerate_atoms_with_cap, split_reds, RainbowSignature};
use arcade_core::report::{emit, run_grid_resuming, Caps, ExperimentGrid, Format, Report};
use arcade_core::{Error, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

/// Atom structures, rainbow constructions and exact game solvers.
#[derive(Parser)]
#[command(name = "arcade", version)]
struct Cli {
    /// Caps file with `key = value` lines (max_atoms, max_states, max_vertices).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a relation algebra atom structure.
    Construct {
        #[command(subcommand)]
        what: Construction,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Split every non-identity atom of a structure into copies.
    Blowup {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        copies: usize,
        /// Blur labels, comma separated.
        #[arg(long, value_delimiter = ',')]
        blurs: Vec<String>,
        #[arg(long, default_value = "copy-agnostic")]
        rule: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate the atoms of a rainbow signature.
    Rainbow {
        #[command(flatten)]
        sig: SigArgs,
        /// Also run the cylindric validator.
        #[arg(long)]
        validate: bool,
        /// Write the atom structure here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that the basic matrices of a structure form a cylindric basis.
    Basis {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Run the relation or cylindric algebra validator on a structure file.
    Validate {
        #[arg(long)]
        structure: PathBuf,
    },
    /// Exact chromatic number.
    Chromatic {
        /// Spec such as `band:6,3`, or a DIMACS or JSON file.
        graph: String,
    },
    /// Decide a game.
    Solve {
        #[command(subcommand)]
        game: GameArgs,
    },
    /// Play a game at the terminal against the engine.
    Play {
        #[command(subcommand)]
        game: GameArgs,
        /// The side you take.
        #[arg(long = "as", default_value = "forall", global = true)]
        human: Player,
        /// Save the transcript here.
        #[arg(long, global = true)]
        transcript: Option<PathBuf>,
        /// Replay a saved transcript instead of playing.
        #[arg(long, global = true)]
        replay: Option<PathBuf>,
    },
    /// Run an experiment grid, resuming from an existing output file.
    Grid {
        grid: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a report as json, csv or markdown.
    Emit {
        report: PathBuf,
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Construction {
    /// Monk-style algebra from a graph.
    Alpha {
        /// Spec such as `cliques:3,3`, or a DIMACS or JSON file.
        #[arg(long)]
        graph: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Maddux's algebra.
    Maddux {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        psi: usize,
    },
}

#[derive(Args, Clone)]
struct SigArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Ordered structure indexing the greens, e.g. `chain:3`.
    #[arg(long)]
    greens: String,
    /// Ordered structure indexing the reds.
    #[arg(long)]
    reds: String,
    /// Split every red into this many copies.
    #[arg(long)]
    copies: Option<usize>,
}

#[derive(Subcommand, Clone)]
enum GameArgs {
    /// Pebble game between ordered structures.
    Ef {
        #[arg(long = "A")]
        a: String,
        #[arg(long = "B")]
        b: String,
        #[arg(long, default_value_t = 2)]
        pebbles: usize,
        #[arg(long, default_value = "omega")]
        rounds: Rounds,
    },
    /// Network game on a cylindric atom structure.
    Atomic {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        nodes: usize,
        #[arg(long, default_value = "omega")]
        rounds: Rounds,
        #[arg(long)]
        reuse: bool,
    },
    /// Graph game on rainbow coloured graphs.
    Rainbow {
        #[command(flatten)]
        sig: SigArgs,
        #[arg(long)]
        nodes: usize,
        #[arg(long, default_value = "omega")]
        rounds: Rounds,
        #[arg(long)]
        reuse: bool,
        /// Let the opening be any atom instead of the fixed cone.
        #[arg(long)]
        any_opening: bool,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut o = io::stdout().lock();
            o.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                o.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("values serialise")
}

fn graph_arg(s: &str) -> Result<Graph> {
    if Path::new(s).is_file() {
        Graph::parse(&read(Path::new(s))?)
    } else {
        parse_graph_spec(s)
    }
}

fn order_arg(s: &str) -> Result<OrderedStructure> {
    if Path::new(s).is_file() {
        OrderedStructure::from_json(&read(Path::new(s))?)
    } else {
        OrderedStructure::parse_spec(s)
    }
}

fn ra_file(path: &Path) -> Result<RaAtomStructure> {
    match AtomStructure::from_json(&read(path)?)? {
        AtomStructure::Ra(r) => Ok(r),
        AtomStructure::Ca(_) => Err(Error::Precondition("expected a relation algebra structure".into())),
    }
}

fn signature(a: &SigArgs) -> Result<RainbowSignature> {
    let sig = RainbowSignature::new(a.n, order_arg(&a.greens)?, order_arg(&a.reds)?)?;
    match a.copies {
        Some(k) => split_reds(&sig, k),
        None => Ok(sig),
    }
}

fn ef_config(a: &str, b: &str, pebbles: usize, rounds: Rounds) -> Result<EfConfig> {
    Ok(EfConfig { a: order_arg(a)?, b: order_arg(b)?, pebbles, rounds })
}

fn atomic_config(structure: &Path, nodes: usize, rounds: Rounds, reuse: bool) -> Result<AtomicGameConfig> {
    match AtomStructure::from_json(&read(structure)?)? {
        AtomStructure::Ca(c) => Ok(AtomicGameConfig { structure: c, node_budget: nodes, rounds, reuse }),
        AtomStructure::Ra(_) => Err(Error::Precondition("atomic games need a cylindric structure".into())),
    }
}

fn rainbow_config(sig: &SigArgs, nodes: usize, rounds: Rounds, reuse: bool, any: bool) -> Result<RainbowGameConfig> {
    Ok(RainbowGameConfig {
        signature: signature(sig)?,
        node_budget: nodes,
        rounds,
        reuse,
        opening: if any { RainbowOpening::Any } else { RainbowOpening::Cone },
    })
}

fn rounds_of(g: &GameArgs) -> Rounds {
    match g {
        GameArgs::Ef { rounds, .. } | GameArgs::Atomic { rounds, .. } | GameArgs::Rainbow { rounds, .. } => *rounds,
    }
}

fn play_game<G: Game>(
    game: &G,
    rounds: Rounds,
    human: Player,
    caps: &Caps,
    save: Option<&Path>,
    replay_from: Option<&Path>,
) -> Result<()> {
    if let Some(p) = replay_from {
        let t: Transcript = serde_json::from_str(&read(p)?)?;
        let end = replay(game, &t)?;
        let same = end == t.final_state;
        return write_or_print(None, &pretty(&json!({ "final_state": end, "matches_transcript": same })));
    }
    let stdin = io::stdin();
    let mut input = stdin.lock();
    let mut output = io::stdout();
    let t = interactive_play(game, rounds, human, caps.solver(), &mut input as &mut dyn BufRead, &mut output)?;
    if let Some(p) = save {
        write_or_print(Some(p), &pretty(&t))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let caps = match &cli.config {
        Some(p) => Caps::parse_config(&read(p)?)?,
        None => Caps::default(),
    }
    .with_env()?;
    match cli.command {
        Command::Construct { what, out } => {
            let r = match what {
                Construction::Alpha { graph, n } => {
                    let g = graph_arg(&graph)?;
                    if g.vertex_count() > caps.max_vertices {
                        return Err(Error::TooLargeForExact { vertices: g.vertex_count(), cap: caps.max_vertices });
                    }
                    alpha_of_graph(&g, n)?
                }
                Construction::Maddux { n, r, psi } => maddux_a(n, r, psi)?,
            };
            write_or_print(out.as_deref(), &AtomStructure::Ra(r).to_json())
        }
        Command::Blowup { structure, copies, blurs, rule, out } => {
            let base = ra_file(&structure)?;
            let schema = BlurSchema::new(copies, blurs, BlowUpRule::by_name(&rule)?)?;
            let b = blow_up(&base, &schema)?;
            write_or_print(out.as_deref(), &AtomStructure::Ra(b.structure).to_json())
        }
        Command::Rainbow { sig, validate, out } => {
            let atoms = enumerate_atoms_with_cap(&signature(&sig)?, caps.max_atoms)?;
            let mut summary = json!({ "atoms": atoms.len() });
            if validate {
                let report = ca_validate(atoms.structure());
                summary["valid"] = json!(report.is_valid());
                summary["violations"] = json!(report.violations.iter().take(20).map(|v| v.to_string()).collect::<Vec<_>>());
            }
            if let Some(p) = out {
                write_or_print(Some(&p), &AtomStructure::Ca(atoms.structure().clone()).to_json())?;
            }
            write_or_print(None, &pretty(&summary))
        }
        Command::Basis { structure, n } => {
            let r = ra_file(&structure)?;
            let b = enumerate_basic_matrices(&r, n, caps.max_atoms)?;
            let report = is_cylindric_basis(&r, n, &b)?;
            write_or_print(None, &pretty(&json!({ "matrices": b.len(), "report": report })))
        }
        Command::Validate { structure } => {
            let s = AtomStructure::from_json(&read(&structure)?)?;
            let report = match &s {
                AtomStructure::Ra(r) => ra_validate(r),
                AtomStructure::Ca(c) => ca_validate(c),
            };
            let lines: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
            let out = json!({
                "kind": s.kind(),
                "atoms": s.len(),
                "valid": report.is_valid(),
                "summary": report.summary(),
                "violations": report.violations,
                "messages": lines,
            });
            write_or_print(None, &pretty(&out))
        }
        Command::Chromatic { graph } => {
            let g = graph_arg(&graph)?;
            let chi = chromatic_number_with_cap(&g, caps.max_vertices)?;
            write_or_print(None, &pretty(&json!({ "vertices": g.vertex_count(), "chromatic_number": chi })))
        }
        Command::Solve { game } => {
            let opts = caps.solver();
            let out = match game {
                GameArgs::Ef { a, b, pebbles, rounds } => ef_winner(&ef_config(&a, &b, pebbles, rounds)?, opts)?,
                GameArgs::Atomic { structure, nodes, rounds, reuse } => {
                    atomic_game_winner(&atomic_config(&structure, nodes, rounds, reuse)?, opts)?
                }
                GameArgs::Rainbow { sig, nodes, rounds, reuse, any_opening } => {
                    rainbow_game_winner(&rainbow_config(&sig, nodes, rounds, reuse, any_opening)?, opts)?
                }
            };
            write_or_print(None, &pretty(&out))
        }
        Command::Play { game, human, transcript, replay } => {
            let rounds = rounds_of(&game);
            let (save, from) = (transcript.as_deref(), replay.as_deref());
            match game {
                GameArgs::Ef { a, b, pebbles, rounds } => {
                    play_game(&EfGame::new(&ef_config(&a, &b, pebbles, rounds)?)?, rounds, human, &caps, save, from)
                }
                GameArgs::Atomic { structure, nodes, rounds, reuse } => {
                    let g = CaNetworkGame::new(&atomic_config(&structure, nodes, rounds, reuse)?)?;
                    play_game(&g, rounds, human, &caps, save, from)
                }
                GameArgs::Rainbow { sig, nodes, reuse, any_opening, .. } => {
                    let g = RainbowGame::new(&rainbow_config(&sig, nodes, rounds, reuse, any_opening)?)?;
                    play_game(&g, rounds, human, &caps, save, from)
                }
            }
        }
        Command::Grid { grid, out } => {
            let mut g = ExperimentGrid::from_json(&read(&grid)?)?;
            g.caps = caps_for_grid(&cli.config, g.caps)?;
            let path = out.or_else(|| g.output.clone().map(PathBuf::from));
            let previous = match &path {
                Some(p) if p.is_file() => Report::from_json(&read(p)?).ok(),
                _ => None,
            };
            let report = run_grid_resuming(&g, previous.as_ref())?;
            write_or_print(path.as_deref(), &emit(&report, Format::Json)?)
        }
        Command::Emit { report, format, out } => {
            let f: Format = format.parse()?;
            let r = Report::from_json(&read(&report)?)?;
            write_or_print(out.as_deref(), &emit(&r, f)?)
        }
    }
}

/// Caps in the grid file, then the config file, then `ARCADE_CAPS`.
fn caps_for_grid(config: &Option<PathBuf>, grid: Caps) -> Result<Caps> {
    let mut caps = grid;
    if let Some(p) = config {
        let text = read(p)?;
        let list: Vec<String> =
            text.lines().map(|l| l.split('#').next().unwrap().trim().to_string()).filter(|l| !l.is_empty()).collect();
        caps = caps.with_overrides(&list.join(","))?;
    }
    caps.with_env()
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
