//! Experiment grids and the reports they produce.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::{ca_validate, ra_validate};
use crate::error::{Error, Result};
use crate::games::{
    ef_winner, max_survivable_rounds, rainbow_game_winner, EfConfig, RainbowGame, RainbowGameConfig, RainbowOpening,
    Rounds, SolverOptions, DEFAULT_MAX_STATES,
};
use crate::graph::{parse_graph_spec, OrderedStructure, EXACT_VERTEX_CAP};
use crate::monk::alpha_of_graph;
use crate::rainbow::{enumerate_atoms_with_cap, split_reds, RainbowSignature, DEFAULT_ATOM_CAP};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Environment variable whose `key=value,...` list overrides configured caps.
pub const CAPS_ENV: &str = "ARCADE_CAPS";

/// Size limits applied to every solver run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Caps {
    pub max_atoms: usize,
    pub max_states: usize,
    pub max_vertices: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { max_atoms: DEFAULT_ATOM_CAP, max_states: DEFAULT_MAX_STATES, max_vertices: EXACT_VERTEX_CAP }
    }
}

impl Caps {
    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v: usize = value.trim().parse().map_err(|_| Error::Parse(format!("cap `{key}` = `{value}`")))?;
        match key.trim() {
            "max_atoms" => self.max_atoms = v,
            "max_states" => self.max_states = v,
            "max_vertices" => self.max_vertices = v,
            k => return Err(Error::Parse(format!("unknown cap `{k}`"))),
        }
        Ok(())
    }

    /// Reads `key = value` lines over the defaults. `#` starts a comment.
    pub fn parse_config(text: &str) -> Result<Caps> {
        let mut caps = Caps::default();
        for line in text.lines() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse(format!("config line `{line}`")))?;
            caps.set(k, v)?;
        }
        Ok(caps)
    }

    /// Applies a `key=value,key=value` override list.
    pub fn with_overrides(mut self, list: &str) -> Result<Caps> {
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| Error::Parse(format!("cap override `{item}`")))?;
            self.set(k, v)?;
        }
        Ok(self)
    }

    /// Applies `ARCADE_CAPS` when set.
    pub fn with_env(self) -> Result<Caps> {
        match std::env::var(CAPS_ENV) {
            Ok(list) => self.with_overrides(&list),
            Err(_) => Ok(self),
        }
    }

    pub fn solver(&self) -> SolverOptions {
        SolverOptions { max_states: self.max_states, ..SolverOptions::default() }
    }
}

fn default_n() -> usize {
    3
}

fn cone() -> String {
    "cone".into()
}

/// What a grid varies. Every list is one axis of the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Experiment {
    /// Validate `alpha_of_graph` over graph specs such as `band:6,3`.
    Alpha { graphs: Vec<String>, n: Vec<usize> },
    /// Count and validate rainbow atoms.
    RainbowAtoms {
        #[serde(default = "default_n")]
        n: usize,
        greens: Vec<String>,
        reds: Vec<String>,
        copies: Vec<usize>,
    },
    /// Decide the rainbow graph game.
    RainbowGame {
        #[serde(default = "default_n")]
        n: usize,
        greens: Vec<String>,
        reds: Vec<String>,
        copies: Vec<usize>,
        budgets: Vec<usize>,
        rounds: Vec<Rounds>,
        #[serde(default)]
        reuse: bool,
        #[serde(default = "cone")]
        opening: String,
    },
    /// Largest number of rounds `∃` survives, up to `cap`.
    RainbowHorizon {
        #[serde(default = "default_n")]
        n: usize,
        greens: Vec<String>,
        reds: Vec<String>,
        copies: Vec<usize>,
        budgets: Vec<usize>,
        cap: u32,
        #[serde(default)]
        reuse: bool,
        #[serde(default = "cone")]
        opening: String,
    },
    /// Pebble games between ordered structures.
    Ef { a: Vec<String>, b: Vec<String>, pebbles: Vec<usize>, rounds: Vec<Rounds> },
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Alpha { .. } => "alpha",
            Experiment::RainbowAtoms { .. } => "rainbow_atoms",
            Experiment::RainbowGame { .. } => "rainbow_game",
            Experiment::RainbowHorizon { .. } => "rainbow_horizon",
            Experiment::Ef { .. } => "ef",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentGrid {
    pub experiment: Experiment,
    #[serde(default)]
    pub caps: Caps,
    /// Record wall-clock time per row. Off by default so reports are reproducible byte for byte.
    #[serde(default)]
    pub timing: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl ExperimentGrid {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Grid points in row order: the last axis varies fastest.
    pub fn points(&self) -> Result<Vec<IndexMap<String, Value>>> {
        fn axis<T: Serialize>(name: &str, xs: &[T]) -> Result<(String, Vec<Value>)> {
            if xs.is_empty() {
                return Err(Error::Precondition(format!("empty range for `{name}`")));
            }
            Ok((name.to_string(), xs.iter().map(|x| serde_json::to_value(x).unwrap()).collect()))
        }
        let one = |v: Value| vec![v];
        let axes: Vec<(String, Vec<Value>)> = match &self.experiment {
            Experiment::Alpha { graphs, n } => vec![axis("graph", graphs)?, axis("n", n)?],
            Experiment::RainbowAtoms { n, greens, reds, copies } => vec![
                ("n".into(), one(Value::from(*n))),
                axis("greens", greens)?,
                axis("reds", reds)?,
                axis("copies", copies)?,
            ],
            Experiment::RainbowGame { n, greens, reds, copies, budgets, rounds, reuse, opening } => vec![
                ("n".into(), one(Value::from(*n))),
                axis("greens", greens)?,
                axis("reds", reds)?,
                axis("copies", copies)?,
                axis("budget", budgets)?,
                axis("rounds", rounds)?,
                ("reuse".into(), one(Value::from(*reuse))),
                ("opening".into(), one(Value::from(opening.as_str()))),
            ],
            Experiment::RainbowHorizon { n, greens, reds, copies, budgets, cap, reuse, opening } => vec![
                ("n".into(), one(Value::from(*n))),
                axis("greens", greens)?,
                axis("reds", reds)?,
                axis("copies", copies)?,
                axis("budget", budgets)?,
                ("cap".into(), one(Value::from(*cap))),
                ("reuse".into(), one(Value::from(*reuse))),
                ("opening".into(), one(Value::from(opening.as_str()))),
            ],
            Experiment::Ef { a, b, pebbles, rounds } => {
                vec![axis("a", a)?, axis("b", b)?, axis("pebbles", pebbles)?, axis("rounds", rounds)?]
            }
        };
        let mut points = vec![IndexMap::new()];
        for (name, values) in axes {
            points = points
                .into_iter()
                .flat_map(|p| {
                    let name = &name;
                    values.iter().map(move |v| {
                        let mut q = p.clone();
                        q.insert(name.clone(), v.clone());
                        q
                    })
                })
                .collect();
        }
        Ok(points)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub engine_version: String,
    pub experiment: String,
    pub caps: Caps,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub index: usize,
    pub params: IndexMap<String, Value>,
    pub outcome: Option<String>,
    pub horizon: Option<Rounds>,
    pub count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub metadata: Metadata,
    pub rows: Vec<Row>,
}

impl Report {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Default)]
struct Found {
    outcome: Option<String>,
    horizon: Option<Rounds>,
    count: Option<u64>,
}

fn param<'a>(p: &'a IndexMap<String, Value>, key: &str) -> Result<&'a Value> {
    p.get(key).ok_or_else(|| Error::Precondition(format!("missing parameter `{key}`")))
}

fn text<'a>(p: &'a IndexMap<String, Value>, key: &str) -> Result<&'a str> {
    param(p, key)?.as_str().ok_or_else(|| Error::Parse(format!("parameter `{key}` is not a string")))
}

fn num(p: &IndexMap<String, Value>, key: &str) -> Result<usize> {
    param(p, key)?
        .as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::Parse(format!("parameter `{key}` is not a number")))
}

fn rounds(p: &IndexMap<String, Value>, key: &str) -> Result<Rounds> {
    Ok(serde_json::from_value(param(p, key)?.clone())?)
}

fn signature(p: &IndexMap<String, Value>) -> Result<RainbowSignature> {
    let sig = RainbowSignature::new(
        num(p, "n")?,
        OrderedStructure::parse_spec(text(p, "greens")?)?,
        OrderedStructure::parse_spec(text(p, "reds")?)?,
    )?;
    split_reds(&sig, num(p, "copies")?)
}

fn opening(p: &IndexMap<String, Value>) -> Result<RainbowOpening> {
    match text(p, "opening")? {
        "cone" => Ok(RainbowOpening::Cone),
        "any" => Ok(RainbowOpening::Any),
        o => Err(Error::Parse(format!("opening `{o}`"))),
    }
}

fn run_point(kind: &str, p: &IndexMap<String, Value>, caps: &Caps) -> Result<Found> {
    let opts = caps.solver();
    match kind {
        "alpha" => {
            let g = parse_graph_spec(text(p, "graph")?)?;
            if g.vertex_count() > caps.max_vertices {
                return Err(Error::TooLargeForExact { vertices: g.vertex_count(), cap: caps.max_vertices });
            }
            let r = alpha_of_graph(&g, num(p, "n")?)?;
            let report = ra_validate(&r);
            let outcome = if report.is_valid() { "valid" } else { "invalid" };
            Ok(Found { outcome: Some(outcome.into()), horizon: None, count: Some(r.len() as u64) })
        }
        "rainbow_atoms" => {
            let atoms = enumerate_atoms_with_cap(&signature(p)?, caps.max_atoms)?;
            let outcome = if ca_validate(atoms.structure()).is_valid() { "valid" } else { "invalid" };
            Ok(Found { outcome: Some(outcome.into()), horizon: None, count: Some(atoms.len() as u64) })
        }
        "rainbow_game" => {
            let cfg = RainbowGameConfig {
                signature: signature(p)?,
                node_budget: num(p, "budget")?,
                rounds: rounds(p, "rounds")?,
                reuse: param(p, "reuse")?.as_bool().unwrap_or(false),
                opening: opening(p)?,
            };
            let out = rainbow_game_winner(&cfg, opts)?;
            Ok(Found { outcome: Some(out.winner.to_string()), horizon: Some(out.horizon), count: Some(out.states) })
        }
        "rainbow_horizon" => {
            let cap = num(p, "cap")? as u32;
            let cfg = RainbowGameConfig {
                signature: signature(p)?,
                node_budget: num(p, "budget")?,
                rounds: Rounds::Finite(cap),
                reuse: param(p, "reuse")?.as_bool().unwrap_or(false),
                opening: opening(p)?,
            };
            let game = RainbowGame::new(&cfg)?;
            let h = max_survivable_rounds(&game, cap, opts)?;
            let outcome = if h == Some(cap) { "exists" } else { "forall" };
            Ok(Found { outcome: Some(outcome.into()), horizon: h.map(Rounds::Finite), count: None })
        }
        "ef" => {
            let cfg = EfConfig {
                a: OrderedStructure::parse_spec(text(p, "a")?)?,
                b: OrderedStructure::parse_spec(text(p, "b")?)?,
                pebbles: num(p, "pebbles")?,
                rounds: rounds(p, "rounds")?,
            };
            let out = ef_winner(&cfg, opts)?;
            Ok(Found { outcome: Some(out.winner.to_string()), horizon: Some(out.horizon), count: Some(out.states) })
        }
        k => Err(Error::Parse(format!("experiment kind `{k}`"))),
    }
}

pub fn run_grid(grid: &ExperimentGrid) -> Result<Report> {
    run_grid_resuming(grid, None)
}

/// Runs the grid, copying rows that `previous` already completed for the
/// same parameters, engine version and caps.
pub fn run_grid_resuming(grid: &ExperimentGrid, previous: Option<&Report>) -> Result<Report> {
    let points = grid.points()?;
    let metadata =
        Metadata { engine_version: ENGINE_VERSION.into(), experiment: grid.experiment.kind().into(), caps: grid.caps };
    let done: IndexMap<usize, &Row> = match previous {
        Some(r) if r.metadata == metadata => {
            r.rows.iter().filter(|row| row.error.is_none()).map(|row| (row.index, row)).collect()
        }
        _ => IndexMap::new(),
    };
    let kind = grid.experiment.kind();
    let rows: Vec<Row> = points
        .into_par_iter()
        .enumerate()
        .map(|(index, params)| {
            if let Some(&row) = done.get(&index).filter(|r| r.params == params) {
                return row.clone();
            }
            let start = Instant::now();
            let found = run_point(kind, &params, &grid.caps);
            let millis = grid.timing.then(|| start.elapsed().as_millis() as u64);
            match found {
                Ok(f) => Row { index, params, outcome: f.outcome, horizon: f.horizon, count: f.count, millis, error: None },
                Err(e) => {
                    Row { index, params, outcome: None, horizon: None, count: None, millis, error: Some(e.to_string()) }
                }
            }
        })
        .collect();
    Ok(Report { metadata, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Markdown,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "markdown" | "md" | "markdown-table" => Ok(Format::Markdown),
            _ => Err(Error::UnknownFormat(s.to_string())),
        }
    }
}

fn param_columns(report: &Report) -> Vec<String> {
    let mut cols: IndexMap<String, ()> = IndexMap::new();
    for row in &report.rows {
        for k in row.params.keys() {
            cols.insert(k.clone(), ());
        }
    }
    cols.into_keys().collect()
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(v) => v.to_string(),
    }
}

fn table(report: &Report) -> (Vec<String>, Vec<Vec<String>>) {
    let params = param_columns(report);
    let timing = report.rows.iter().any(|r| r.millis.is_some());
    let mut header: Vec<String> = vec!["index".into()];
    header.extend(params.iter().cloned());
    header.extend(["outcome", "horizon", "count"].map(String::from));
    if timing {
        header.push("millis".into());
    }
    header.push("error".into());
    let rows = report
        .rows
        .iter()
        .map(|r| {
            let mut line = vec![r.index.to_string()];
            line.extend(params.iter().map(|p| cell(r.params.get(p))));
            line.push(r.outcome.clone().unwrap_or_default());
            line.push(r.horizon.map(|h| h.to_string()).unwrap_or_default());
            line.push(r.count.map(|c| c.to_string()).unwrap_or_default());
            if timing {
                line.push(r.millis.map(|c| c.to_string()).unwrap_or_default());
            }
            line.push(r.error.clone().unwrap_or_default());
            line
        })
        .collect();
    (header, rows)
}

pub fn emit(report: &Report, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        Format::Csv => {
            let (header, rows) = table(report);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&header).map_err(|e| Error::Io(e.to_string()))?;
            for r in rows {
                w.write_record(&r).map_err(|e| Error::Io(e.to_string()))?;
            }
            String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?)
                .map_err(|e| Error::Io(e.to_string()))
        }
        Format::Markdown => {
            let (header, rows) = table(report);
            let esc = |s: &str| s.replace('|', "\\|");
            let mut out = String::new();
            writeln!(out, "| {} |", header.join(" | ")).unwrap();
            writeln!(out, "|{}", "---|".repeat(header.len())).unwrap();
            for r in rows {
                let r: Vec<String> = r.iter().map(|c| esc(c)).collect();
                writeln!(out, "| {} |", r.join(" | ")).unwrap();
            }
            Ok(out)
        }
    }
}

/// Reads rows back from CSV written by [`emit`]. Parameter cells are read as
/// JSON where they parse and as strings otherwise.
pub fn rows_from_csv(text: &str) -> Result<Vec<Row>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers().map_err(|e| Error::Parse(e.to_string()))?.iter().map(String::from).collect();
    let fixed = ["index", "outcome", "horizon", "count", "millis", "error"];
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let get = |name: &str| header.iter().position(|h| h == name).and_then(|i| rec.get(i)).filter(|s| !s.is_empty());
        let parse_num = |name: &str| -> Result<Option<u64>> {
            get(name).map(|s| s.parse().map_err(|_| Error::Parse(format!("{name} `{s}`")))).transpose()
        };
        let params = header
            .iter()
            .zip(rec.iter())
            .filter(|(h, _)| !fixed.contains(&h.as_str()))
            .map(|(h, v)| (h.clone(), serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()))))
            .collect();
        rows.push(Row {
            index: parse_num("index")?.ok_or_else(|| Error::Parse("row without index".into()))? as usize,
            params,
            outcome: get("outcome").map(String::from),
            horizon: get("horizon").map(str::parse).transpose()?,
            count: parse_num("count")?,
            millis: parse_num("millis")?,
            error: get("error").map(String::from),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ef_grid() -> ExperimentGrid {
        ExperimentGrid {
            experiment: Experiment::Ef {
                a: vec!["chain:3".into(), "chain:2".into()],
                b: vec!["chain:2".into()],
                pebbles: vec![1, 2],
                rounds: vec![Rounds::Finite(2), Rounds::Omega],
            },
            caps: Caps::default(),
            timing: false,
            output: None,
        }
    }

    #[test]
    fn one_row_per_point_in_order() {
        let report = run_grid(&ef_grid()).unwrap();
        assert_eq!(report.rows.len(), 8);
        assert!(report.rows.iter().enumerate().all(|(i, r)| r.index == i && r.error.is_none()));
        assert_eq!(report.rows[0].params["rounds"], Value::from(2));
        assert_eq!(report.rows[1].params["rounds"], Value::from("omega"));
    }

    #[test]
    fn empty_range_is_a_precondition_failure() {
        let mut g = ef_grid();
        if let Experiment::Ef { pebbles, .. } = &mut g.experiment {
            pebbles.clear();
        }
        assert!(matches!(run_grid(&g), Err(Error::Precondition(_))));
    }

    #[test]
    fn bad_rows_are_recorded_not_fatal() {
        let mut g = ef_grid();
        if let Experiment::Ef { a, .. } = &mut g.experiment {
            a.push("nonsense".into());
        }
        let report = run_grid(&g).unwrap();
        assert_eq!(report.rows.len(), 12);
        assert!(report.rows[8].error.is_some());
    }

    #[test]
    fn rerun_is_identical() {
        let g = ef_grid();
        let first = run_grid(&g).unwrap();
        let again = run_grid_resuming(&g, Some(&first)).unwrap();
        assert_eq!(first, again);
        assert_eq!(emit(&first, Format::Json).unwrap(), emit(&run_grid(&g).unwrap(), Format::Json).unwrap());
    }

    #[test]
    fn formats_round_trip() {
        let report = run_grid(&ef_grid()).unwrap();
        let json = emit(&report, Format::Json).unwrap();
        assert_eq!(Report::from_json(&json).unwrap(), report);
        let csv = emit(&report, Format::Csv).unwrap();
        let back = rows_from_csv(&csv).unwrap();
        assert_eq!(back.iter().map(|r| r.horizon).collect::<Vec<_>>(), report.rows.iter().map(|r| r.horizon).collect::<Vec<_>>());
        assert_eq!(back, report.rows);
        let md = emit(&report, Format::Markdown).unwrap();
        assert_eq!(md.lines().filter(|l| l.starts_with("|---")).count(), 1);
        assert_eq!(md.lines().count(), report.rows.len() + 2);
        assert!(matches!("yaml".parse::<Format>(), Err(Error::UnknownFormat(_))));
    }

    #[test]
    fn caps_from_config_and_overrides() {
        let caps = Caps::parse_config("# caps\nmax_states = 10\n\nmax_atoms=5 # small\n").unwrap();
        assert_eq!((caps.max_states, caps.max_atoms, caps.max_vertices), (10, 5, EXACT_VERTEX_CAP));
        let caps = caps.with_overrides("max_states=7, max_vertices=3").unwrap();
        assert_eq!((caps.max_states, caps.max_vertices), (7, 3));
        assert!(Caps::parse_config("speed = 3").is_err());
    }

    #[test]
    fn grid_json_defaults() {
        let g = ExperimentGrid::from_json(
            r#"{"experiment":{"kind":"rainbow_horizon","greens":["chain:2"],"reds":["chain:1"],"copies":[1],"budgets":[4],"cap":2}}"#,
        )
        .unwrap();
        assert_eq!(g.caps, Caps::default());
        let p = g.points().unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0]["opening"], Value::from("cone"));
    }
}
