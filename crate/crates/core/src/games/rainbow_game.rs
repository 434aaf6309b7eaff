use std::fmt::Write as _;

use super::canon::canonical_order;
use super::{solve, Game, GameOutcome, Rounds, SolverOptions};
use crate::error::{Error, Result};
use crate::rainbow::{
    check_coloured_graph, enumerate_atoms, extend_graph, Colour, ColouredGraph, EdgeChoice, RainbowSignature,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RainbowOpening {
    /// The fixed opening used when replicating the published strategy.
    Cone,
    /// `∀` opens with any graph on at most `n` nodes.
    Any,
}

#[derive(Debug, Clone)]
pub struct RainbowGameConfig {
    pub signature: RainbowSignature,
    pub node_budget: usize,
    pub rounds: Rounds,
    pub reuse: bool,
    pub opening: RainbowOpening,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RainbowMove {
    Open(ColouredGraph),
    /// Extend the face `face` (nodes of the graph after `drop` is discarded)
    /// by a new node, as prescribed by `phi`: `phi` has the face as nodes
    /// `0..face.len()` and the new node last.
    Extend { drop: Option<usize>, face: Vec<usize>, phi: ColouredGraph },
}

/// `Γ(i, j) = w` for `i < j < n-1`, the last node an apex joined by `g_i` to
/// node `i` and by `g_0^0` to node 0, and the base shaded with the full shade.
pub fn cone_opening(sig: &RainbowSignature) -> Result<ColouredGraph> {
    let n = sig.dimension();
    let mut g = ColouredGraph::new(n);
    for i in 0..n - 1 {
        for j in i + 1..n - 1 {
            g.set_edge(i, j, Colour::White)?;
        }
    }
    g.set_edge(0, n - 1, Colour::Green0(0))?;
    for i in 1..n - 1 {
        g.set_edge(i, n - 1, Colour::Green(i as u8))?;
    }
    g.set_shade(&(0..n - 1).collect::<Vec<_>>(), sig.full_shade())?;
    let report = check_coloured_graph(sig, &g);
    if !report.is_valid() {
        return Err(Error::Invalid(format!("opening graph: {:?}", report.violations[0])));
    }
    Ok(g)
}

/// Graph game on rainbow coloured graphs.
pub struct RainbowGame {
    sig: RainbowSignature,
    budget: usize,
    reuse: bool,
    openings: Vec<ColouredGraph>,
}

impl RainbowGame {
    pub fn new(cfg: &RainbowGameConfig) -> Result<Self> {
        let sig = cfg.signature.clone();
        let n = sig.dimension();
        if cfg.node_budget < n || cfg.node_budget > 16 {
            return Err(Error::InvalidParameter(format!("node budget {} outside {n}..=16", cfg.node_budget)));
        }
        let mut game = RainbowGame { sig, budget: cfg.node_budget, reuse: cfg.reuse, openings: Vec::new() };
        game.openings = match cfg.opening {
            RainbowOpening::Cone => vec![game.canonical(&cone_opening(&game.sig)?)],
            RainbowOpening::Any => {
                let atoms = enumerate_atoms(&game.sig)?;
                let mut gs: Vec<ColouredGraph> = atoms.atoms().iter().map(|a| game.canonical(&a.graph)).collect();
                gs.sort_unstable();
                gs.dedup();
                gs
            }
        };
        Ok(game)
    }

    pub fn signature(&self) -> &RainbowSignature {
        &self.sig
    }

    pub fn canonical(&self, g: &ColouredGraph) -> ColouredGraph {
        let pal = self.sig.palette();
        let k = g.node_count();
        let code = |u: usize, v: usize| pal.code(g.edge(u, v).unwrap()).unwrap() as u32;
        let shaded: Vec<u64> = (0..k)
            .map(|v| g.shades().iter().filter(|&&(m, _)| m >> v & 1 == 1).map(|&(_, s)| 1 + s as u64).sum())
            .collect();
        let (order, _) = canonical_order(k, shaded, |u, v| code(u, v) as u64, |order| {
            let mut out = Vec::with_capacity(k * k + 2 * g.shades().len());
            for i in 0..k {
                for j in i + 1..k {
                    out.push(code(order[i], order[j]));
                }
            }
            let mut pos = [0usize; 64];
            for (i, &v) in order.iter().enumerate() {
                pos[v] = i;
            }
            let mut sh: Vec<(u32, u32)> = g
                .shades()
                .iter()
                .map(|&(m, s)| ((0..k).filter(|&v| m >> v & 1 == 1).fold(0u32, |a, v| a | 1 << pos[v]), s))
                .collect();
            sh.sort_unstable();
            out.extend(sh.into_iter().flat_map(|(m, s)| [m, s]));
            out
        });
        g.induced(&order)
    }

    fn without(&self, g: &ColouredGraph, drop: Option<usize>) -> ColouredGraph {
        match drop {
            None => g.clone(),
            Some(z) => g.induced(&(0..g.node_count()).filter(|&v| v != z).collect::<Vec<_>>()),
        }
    }

    /// Some node outside `face` already plays the part of the new node of `phi`.
    fn witnessed(&self, g: &ColouredGraph, face: &[usize], phi: &ColouredGraph) -> bool {
        let f = face.len();
        let shades_of_new: Vec<(u64, u32)> = phi.shades().iter().copied().filter(|&(m, _)| m >> f & 1 == 1).collect();
        (0..g.node_count()).filter(|z| !face.contains(z)).any(|z| {
            (0..f).all(|i| g.edge(face[i], z) == phi.edge(i, f))
                && self.face_sets(f).into_iter().all(|m| {
                    let image = (0..f).filter(|&i| m >> i & 1 == 1).fold(1u64 << z, |a, i| a | 1 << face[i]);
                    let want = shades_of_new.iter().find(|&&(k, _)| k == m).map(|&(_, s)| s);
                    g.shade_of_mask(image) == want
                })
        })
    }

    /// `∃`'s extensions answering `m`, before canonical relabelling.
    fn raw_replies(&self, s: &ColouredGraph, m: &RainbowMove, f: &mut dyn FnMut(ColouredGraph) -> bool) -> bool {
        let RainbowMove::Extend { drop, face, phi } = m else { return true };
        let g = self.without(s, *drop);
        let k = g.node_count();
        let fsize = face.len();
        let edges: Vec<EdgeChoice> = (0..k)
            .map(|u| match face.iter().position(|&v| v == u) {
                Some(i) => EdgeChoice::Fixed(phi.edge(i, fsize).unwrap()),
                None => EdgeChoice::Free,
            })
            .collect();
        let lift = |m: u64| {
            (0..=fsize).filter(|&i| m >> i & 1 == 1).fold(0u64, |a, i| a | 1 << if i == fsize { k } else { face[i] })
        };
        let region = lift((1u64 << (fsize + 1)) - 1);
        let fixed: Vec<(u64, u32)> =
            phi.shades().iter().filter(|&&(m, _)| m >> fsize & 1 == 1).map(|&(m, s)| (lift(m), s)).collect();
        extend_graph(&self.sig, &g, &edges, region, &fixed, f)
    }

    /// Node sets of size `n-1` inside `phi` that contain its new node `f`.
    fn face_sets(&self, f: usize) -> Vec<u64> {
        let n = self.sig.dimension();
        (0u64..1 << f)
            .filter(|m| m.count_ones() as usize == n - 2)
            .map(|m| m | 1 << f)
            .collect()
    }
}

fn subsets(m: usize, size: usize) -> Vec<Vec<usize>> {
    (0u64..1 << m)
        .filter(|x| x.count_ones() as usize == size)
        .map(|x| (0..m).filter(|&v| x >> v & 1 == 1).collect())
        .collect()
}

impl Game for RainbowGame {
    type State = ColouredGraph;
    type Move = RainbowMove;

    fn openings(&self) -> Vec<RainbowMove> {
        self.openings.iter().cloned().map(RainbowMove::Open).collect()
    }

    fn opening_replies(&self, m: &RainbowMove) -> Vec<ColouredGraph> {
        match m {
            RainbowMove::Open(g) => vec![self.canonical(g)],
            _ => Vec::new(),
        }
    }

    fn moves(&self, s: &ColouredGraph) -> Vec<RainbowMove> {
        let k = s.node_count();
        let drops: Vec<Option<usize>> = if k < self.budget {
            vec![None]
        } else if self.reuse {
            (0..k).map(Some).collect()
        } else {
            return Vec::new();
        };
        let n = self.sig.dimension();
        let mut out = Vec::new();
        for drop in drops {
            let g = self.without(s, drop);
            for size in 1..n.min(g.node_count() + 1) {
                for face in subsets(g.node_count(), size) {
                    let base = g.induced(&face);
                    extend_graph(&self.sig, &base, &vec![EdgeChoice::Free; size], 0, &[], &mut |phi| {
                        if !self.witnessed(&g, &face, &phi) {
                            out.push(RainbowMove::Extend { drop, face: face.clone(), phi });
                        }
                        true
                    });
                }
            }
        }
        out
    }

    fn replies(&self, s: &ColouredGraph, m: &RainbowMove) -> Vec<ColouredGraph> {
        let mut out = Vec::new();
        self.for_each_reply(s, m, &mut |r| {
            out.push(r);
            true
        });
        out.sort_unstable();
        out.dedup();
        out
    }

    fn for_each_reply(&self, s: &ColouredGraph, m: &RainbowMove, f: &mut dyn FnMut(ColouredGraph) -> bool) -> bool {
        self.raw_replies(s, m, &mut |h| f(self.canonical(&h)))
    }

    fn has_reply(&self, s: &ColouredGraph, m: &RainbowMove) -> bool {
        !self.raw_replies(s, m, &mut |_| false)
    }

    fn depth_bound(&self) -> Option<u32> {
        (!self.reuse).then_some(self.budget as u32)
    }

    fn depth_left(&self, s: &ColouredGraph) -> Option<u32> {
        (!self.reuse).then(|| self.budget.saturating_sub(s.node_count()) as u32)
    }

    fn describe_state(&self, s: &ColouredGraph) -> String {
        describe_graph(s)
    }

    fn describe_move(&self, m: &RainbowMove) -> String {
        match m {
            RainbowMove::Open(g) => format!("open with {}", describe_graph(g)),
            RainbowMove::Extend { drop, face, phi } => {
                let mut s = String::new();
                if let Some(z) = drop {
                    write!(s, "discard node {z}, then ").unwrap();
                }
                let f = face.len();
                let joins: Vec<String> = (0..f).map(|i| format!("{}:{}", face[i], phi.edge(i, f).unwrap())).collect();
                write!(s, "new node joined {}", joins.join(",")).unwrap();
                let shades: Vec<String> = phi
                    .shades()
                    .iter()
                    .filter(|&&(m, _)| m >> f & 1 == 1)
                    .map(|&(m, sh)| {
                        let ns: Vec<String> = (0..f).filter(|&i| m >> i & 1 == 1).map(|i| face[i].to_string()).collect();
                        format!("{{{}+new}}:{}", ns.join(","), shade_set(sh))
                    })
                    .collect();
                if !shades.is_empty() {
                    write!(s, " shaded {}", shades.join(",")).unwrap();
                }
                s
            }
        }
    }
}

fn shade_set(s: u32) -> String {
    let xs: Vec<String> = (0..32).filter(|&a| s >> a & 1 == 1).map(|a: u32| a.to_string()).collect();
    format!("y{{{}}}", xs.join(","))
}

fn describe_graph(g: &ColouredGraph) -> String {
    let k = g.node_count();
    let mut edges = Vec::new();
    for u in 0..k {
        for v in u + 1..k {
            edges.push(format!("{u}{v}:{}", g.edge(u, v).unwrap()));
        }
    }
    let shades: Vec<String> = g
        .shades()
        .iter()
        .map(|&(m, s)| {
            let ns: String = (0..k).filter(|&v| m >> v & 1 == 1).map(|v| v.to_string()).collect();
            format!("{ns}:{}", shade_set(s))
        })
        .collect();
    format!("{k} nodes [{}] [{}]", edges.join(" "), shades.join(" "))
}

/// Winner of the graph game over a rainbow signature.
pub fn rainbow_game_winner(cfg: &RainbowGameConfig, opts: SolverOptions) -> Result<GameOutcome> {
    solve(&RainbowGame::new(cfg)?, cfg.rounds, opts)
}
