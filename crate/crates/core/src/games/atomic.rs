use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::canon::canonical_order;
use super::{solve, Game, GameOutcome, Rounds, SolverOptions};
use crate::algebra::{ca_validate, CaAtomStructure};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct AtomicGameConfig {
    pub structure: CaAtomStructure,
    pub node_budget: usize,
    pub rounds: Rounds,
    pub reuse: bool,
}

/// An atomic network in canonical form: one atom per `n`-tuple of nodes,
/// tuples in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Network {
    pub nodes: u8,
    pub labels: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum NetworkMove {
    /// Opening: a network whose tuple `kernel(atom)` carries `atom`.
    Atom(usize),
    /// Demand a node `w` with `N(tuple[index/w]) = atom`, optionally on the
    /// place of a discarded node.
    Witness { tuple: Vec<usize>, index: usize, atom: usize, reuse: Option<usize> },
}

const UNSET: u32 = u32::MAX;

/// Atomic game `G^n_k` (or `F^m` with reuse) over a cylindric atom structure.
pub struct CaNetworkGame {
    n: usize,
    budget: usize,
    reuse: bool,
    names: Vec<String>,
    /// `T_i` class per atom, per `i`.
    class: Vec<Vec<u32>>,
    /// Atoms by `(i, class)`.
    members: Vec<HashMap<u32, Vec<u32>>>,
    kernel: Vec<Vec<u8>>,
    by_pattern: HashMap<Vec<u8>, Vec<u32>>,
}

fn growth(t: &[usize]) -> Vec<u8> {
    let mut seen: Vec<usize> = Vec::new();
    t.iter()
        .map(|v| match seen.iter().position(|u| u == v) {
            Some(k) => k as u8,
            None => {
                seen.push(*v);
                (seen.len() - 1) as u8
            }
        })
        .collect()
}

fn unrank(mut k: usize, nodes: usize, n: usize) -> Vec<usize> {
    let mut t = vec![0; n];
    for slot in t.iter_mut().rev() {
        *slot = k % nodes;
        k /= nodes;
    }
    t
}

fn rank(t: &[usize], nodes: usize) -> usize {
    t.iter().fold(0, |k, &v| k * nodes + v)
}

impl CaNetworkGame {
    pub fn new(cfg: &AtomicGameConfig) -> Result<Self> {
        let c = &cfg.structure;
        let report = ca_validate(c);
        if !report.is_valid() {
            return Err(Error::Invalid(report.summary()));
        }
        let n = c.dimension();
        if cfg.node_budget < n || cfg.node_budget > 16 {
            return Err(Error::InvalidParameter(format!("node budget {} outside {n}..=16", cfg.node_budget)));
        }
        let class: Vec<Vec<u32>> = (0..n).map(|i| c.ti(i).class_ids().expect("validated")).collect();
        let members = class
            .iter()
            .map(|ids| {
                let mut m: HashMap<u32, Vec<u32>> = HashMap::new();
                for (a, &k) in ids.iter().enumerate() {
                    m.entry(k).or_default().push(a as u32);
                }
                m
            })
            .collect();
        let kernel: Vec<Vec<u8>> = (0..c.len())
            .map(|a| {
                let mut k = vec![0u8; n];
                let mut next = 0;
                for i in 0..n {
                    match (0..i).find(|&j| c.in_diagonal(a, i, j)) {
                        Some(j) => k[i] = k[j],
                        None => {
                            k[i] = next;
                            next += 1;
                        }
                    }
                }
                k
            })
            .collect();
        let mut by_pattern: HashMap<Vec<u8>, Vec<u32>> = HashMap::new();
        for (a, k) in kernel.iter().enumerate() {
            by_pattern.entry(k.clone()).or_default().push(a as u32);
        }
        Ok(CaNetworkGame {
            n,
            budget: cfg.node_budget,
            reuse: cfg.reuse,
            names: c.names().to_vec(),
            class,
            members,
            kernel,
            by_pattern,
        })
    }

    fn canonical(&self, nodes: usize, labels: &[u32]) -> Network {
        let n = self.n;
        let at = |t: &[usize]| labels[rank(t, nodes)];
        let diag = |v: usize| at(&vec![v; n]) as u64;
        let pair = |u: usize, v: usize| {
            let mut t = vec![v; n];
            t[0] = u;
            let mut s = vec![u; n];
            s[0] = v;
            (at(&t) as u64) << 32 | at(&s) as u64
        };
        let (_, code) = canonical_order(nodes, (0..nodes).map(diag).collect(), pair, |order| {
            (0..labels.len()).map(|k| at(&unrank(k, nodes, n).iter().map(|&i| order[i]).collect::<Vec<_>>())).collect()
        });
        Network { nodes: nodes as u8, labels: code }
    }

    /// Fills every unset tuple consistently, calling `f` on each completion.
    fn complete(&self, nodes: usize, labels: &mut Vec<u32>, f: &mut dyn FnMut(&[u32]) -> bool) -> bool {
        let open: Vec<usize> = (0..labels.len()).filter(|&k| labels[k] == UNSET).collect();
        self.fill(nodes, labels, &open, 0, f)
    }

    fn fill(&self, nodes: usize, labels: &mut Vec<u32>, open: &[usize], at: usize, f: &mut dyn FnMut(&[u32]) -> bool) -> bool {
        if at == open.len() {
            return f(labels);
        }
        let k = open[at];
        let t = unrank(k, nodes, self.n);
        let Some(cands) = self.by_pattern.get(&growth(&t)) else { return true };
        for &a in cands {
            if self.fits(nodes, labels, &t, a) {
                labels[k] = a;
                if !self.fill(nodes, labels, open, at + 1, f) {
                    labels[k] = UNSET;
                    return false;
                }
            }
        }
        labels[k] = UNSET;
        true
    }

    /// `a` at `t` agrees with every labelled tuple that differs from `t` in one place.
    fn fits(&self, nodes: usize, labels: &[u32], t: &[usize], a: u32) -> bool {
        let mut s = t.to_vec();
        for i in 0..self.n {
            for v in 0..nodes {
                if v == t[i] {
                    continue;
                }
                s[i] = v;
                let b = labels[rank(&s, nodes)];
                if b != UNSET && self.class[i][b as usize] != self.class[i][a as usize] {
                    return false;
                }
            }
            s[i] = t[i];
        }
        true
    }

    /// The network of `s` with `drop` removed and an unlabelled new last node.
    fn with_new_node(&self, s: &Network, drop: Option<usize>) -> (usize, Vec<usize>, Vec<u32>) {
        let old = s.nodes as usize;
        let kept: Vec<usize> = (0..old).filter(|&v| Some(v) != drop).collect();
        let mut new_of = vec![usize::MAX; old];
        for (k, &v) in kept.iter().enumerate() {
            new_of[v] = k;
        }
        let nodes = kept.len() + 1;
        let mut labels = vec![UNSET; nodes.pow(self.n as u32)];
        for (k, slot) in labels.iter_mut().enumerate() {
            let t = unrank(k, nodes, self.n);
            if t.iter().all(|&v| v < kept.len()) {
                let o: Vec<usize> = t.iter().map(|&v| kept[v]).collect();
                *slot = s.labels[rank(&o, old)];
            }
        }
        (nodes, new_of, labels)
    }
}

impl Game for CaNetworkGame {
    type State = Network;
    type Move = NetworkMove;

    fn openings(&self) -> Vec<NetworkMove> {
        (0..self.kernel.len()).map(NetworkMove::Atom).collect()
    }

    fn opening_replies(&self, m: &NetworkMove) -> Vec<Network> {
        let NetworkMove::Atom(a) = *m else { return Vec::new() };
        let t: Vec<usize> = self.kernel[a].iter().map(|&k| k as usize).collect();
        let nodes = *t.iter().max().unwrap() + 1;
        let mut labels = vec![UNSET; nodes.pow(self.n as u32)];
        labels[rank(&t, nodes)] = a as u32;
        let mut out = Vec::new();
        self.complete(nodes, &mut labels, &mut |l| {
            out.push(self.canonical(nodes, l));
            true
        });
        out.sort_unstable();
        out.dedup();
        out
    }

    fn moves(&self, s: &Network) -> Vec<NetworkMove> {
        let nodes = s.nodes as usize;
        let targets: Vec<Option<usize>> = if nodes < self.budget {
            vec![None]
        } else if self.reuse {
            (0..nodes).map(Some).collect()
        } else {
            return Vec::new();
        };
        let n = self.n;
        let mut out = Vec::new();
        for k in 0..s.labels.len() {
            let t = unrank(k, nodes, n);
            let here = s.labels[k];
            for l in 0..n {
                // Pattern of the demanded tuple with a fresh node at `l`.
                let mut fresh = t.clone();
                fresh[l] = usize::MAX;
                let pattern = growth(&fresh);
                for &b in &self.members[l][&self.class[l][here as usize]] {
                    if self.kernel[b as usize] != pattern {
                        continue;
                    }
                    let mut w = t.clone();
                    let witnessed = (0..nodes).any(|z| {
                        w[l] = z;
                        s.labels[rank(&w, nodes)] == b
                    });
                    if witnessed {
                        continue;
                    }
                    for &reuse in &targets {
                        if let Some(z) = reuse {
                            if (0..n).any(|j| j != l && t[j] == z) {
                                continue;
                            }
                        }
                        out.push(NetworkMove::Witness { tuple: t.clone(), index: l, atom: b as usize, reuse });
                    }
                }
            }
        }
        out
    }

    fn replies(&self, s: &Network, m: &NetworkMove) -> Vec<Network> {
        let mut out = Vec::new();
        self.for_each_reply(s, m, &mut |r| {
            out.push(r);
            true
        });
        out.sort_unstable();
        out.dedup();
        out
    }

    fn for_each_reply(&self, s: &Network, m: &NetworkMove, f: &mut dyn FnMut(Network) -> bool) -> bool {
        let NetworkMove::Witness { tuple, index, atom, reuse } = m else { return true };
        let (nodes, new_of, mut labels) = self.with_new_node(s, *reuse);
        let mut t: Vec<usize> = tuple.iter().map(|&v| new_of[v]).collect();
        t[*index] = nodes - 1;
        let k = rank(&t, nodes);
        if !self.fits(nodes, &labels, &t, *atom as u32) {
            return true;
        }
        labels[k] = *atom as u32;
        self.complete(nodes, &mut labels, &mut |l| f(self.canonical(nodes, l)))
    }

    fn depth_bound(&self) -> Option<u32> {
        (!self.reuse).then(|| self.budget as u32)
    }

    fn depth_left(&self, s: &Network) -> Option<u32> {
        (!self.reuse).then(|| self.budget.saturating_sub(s.nodes as usize) as u32)
    }

    fn describe_state(&self, s: &Network) -> String {
        let nodes = s.nodes as usize;
        let parts: Vec<String> = (0..s.labels.len())
            .map(|k| {
                let t: Vec<String> = unrank(k, nodes, self.n).iter().map(|v| v.to_string()).collect();
                format!("{}:{}", t.join(""), self.names[s.labels[k] as usize])
            })
            .collect();
        format!("{} nodes [{}]", nodes, parts.join(" "))
    }

    fn describe_move(&self, m: &NetworkMove) -> String {
        match m {
            NetworkMove::Atom(a) => format!("open with {}", self.names[*a]),
            NetworkMove::Witness { tuple, index, atom, reuse } => {
                let t: Vec<String> = tuple.iter().map(|v| v.to_string()).collect();
                let target = match reuse {
                    None => "a new node".to_string(),
                    Some(z) => format!("node {z} (reused)"),
                };
                format!("witness for ({}) at place {index} with {}, on {target}", t.join(","), self.names[*atom])
            }
        }
    }
}

pub fn atomic_game_winner(cfg: &AtomicGameConfig, opts: SolverOptions) -> Result<GameOutcome> {
    let game = CaNetworkGame::new(cfg)?;
    solve(&game, cfg.rounds, opts)
}
