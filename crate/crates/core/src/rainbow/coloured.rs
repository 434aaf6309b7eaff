use serde::{Deserialize, Serialize};

use super::{Colour, RainbowSignature};
use crate::error::{Error, Result};

/// A complete graph with coloured edges and shades of yellow on node sets of
/// size `n-1`. Shades are bitmasks over `A`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColouredGraph {
    nodes: usize,
    edges: Vec<Option<Colour>>,
    /// Sorted by node mask.
    shades: Vec<(u64, u32)>,
}

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    nodes: usize,
    colours: Vec<Vec<Option<String>>>,
    yellow: Vec<ShadeDoc>,
}

#[derive(Serialize, Deserialize)]
struct ShadeDoc {
    nodes: Vec<usize>,
    shade: Vec<usize>,
}

pub(crate) fn mask_nodes(mask: u64) -> Vec<usize> {
    (0..64).filter(|&i| mask >> i & 1 == 1).collect()
}

fn nodes_mask(nodes: &[usize]) -> u64 {
    nodes.iter().fold(0, |m, &v| m | 1 << v)
}

/// Every `size`-element subset of `0..m`, as masks in increasing order of their elements.
pub(crate) fn subsets(m: usize, size: usize) -> Vec<u64> {
    fn go(start: usize, m: usize, left: usize, acc: u64, out: &mut Vec<u64>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for v in start..m {
            if m - v < left {
                break;
            }
            go(v + 1, m, left - 1, acc | 1 << v, out);
        }
    }
    let mut out = Vec::new();
    if size <= m {
        go(0, m, size, 0, &mut out);
    }
    out
}

impl ColouredGraph {
    pub fn new(nodes: usize) -> Self {
        assert!(nodes <= 64, "coloured graphs are limited to 64 nodes");
        ColouredGraph { nodes, edges: vec![None; nodes * nodes], shades: Vec::new() }
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn edge(&self, u: usize, v: usize) -> Option<Colour> {
        self.edges[u * self.nodes + v]
    }

    /// Colours `(u, v)` with `c` and `(v, u)` with its converse.
    pub fn set_edge(&mut self, u: usize, v: usize, c: Colour) -> Result<()> {
        if u == v || u >= self.nodes || v >= self.nodes {
            return Err(Error::InvalidParameter(format!("edge ({u},{v}) in a graph on {} nodes", self.nodes)));
        }
        self.edges[u * self.nodes + v] = Some(c);
        self.edges[v * self.nodes + u] = Some(c.converse());
        Ok(())
    }

    pub fn shade(&self, nodes: &[usize]) -> Option<u32> {
        self.shade_of_mask(nodes_mask(nodes))
    }

    pub fn shade_of_mask(&self, mask: u64) -> Option<u32> {
        self.shades.binary_search_by_key(&mask, |&(m, _)| m).ok().map(|i| self.shades[i].1)
    }

    pub fn set_shade(&mut self, nodes: &[usize], shade: u32) -> Result<()> {
        if nodes.iter().any(|&v| v >= self.nodes) {
            return Err(Error::InvalidParameter(format!("shade on {nodes:?} outside the graph")));
        }
        let mask = nodes_mask(nodes);
        match self.shades.binary_search_by_key(&mask, |&(m, _)| m) {
            Ok(i) => self.shades[i].1 = shade,
            Err(i) => self.shades.insert(i, (mask, shade)),
        }
        Ok(())
    }

    /// `(node mask, shade mask)` pairs, sorted by node mask.
    pub fn shades(&self) -> &[(u64, u32)] {
        &self.shades
    }

    /// The subgraph on `order`, with `order[k]` becoming node `k`.
    pub fn induced(&self, order: &[usize]) -> ColouredGraph {
        let mut g = ColouredGraph::new(order.len());
        let mut new_of = [usize::MAX; 64];
        for (k, &v) in order.iter().enumerate() {
            new_of[v] = k;
            for (l, &w) in order.iter().enumerate() {
                g.edges[k * g.nodes + l] = self.edge(v, w);
            }
        }
        for &(mask, s) in &self.shades {
            let nodes = mask_nodes(mask);
            if nodes.iter().all(|&v| new_of[v] != usize::MAX) {
                g.shades.push((nodes.iter().fold(0, |m, &v| m | 1 << new_of[v]), s));
            }
        }
        g.shades.sort_unstable();
        g
    }

    /// Applies `f` to every edge colour.
    pub fn map_colours(&self, f: impl Fn(Colour) -> Colour) -> ColouredGraph {
        ColouredGraph { nodes: self.nodes, edges: self.edges.iter().map(|c| c.map(&f)).collect(), shades: self.shades.clone() }
    }

    pub fn to_json(&self) -> String {
        let doc = GraphDoc {
            nodes: self.nodes,
            colours: (0..self.nodes)
                .map(|u| (0..self.nodes).map(|v| self.edge(u, v).map(|c| c.to_string())).collect())
                .collect(),
            yellow: self
                .shades
                .iter()
                .map(|&(m, s)| ShadeDoc { nodes: mask_nodes(m), shade: mask_nodes(s as u64) })
                .collect(),
        };
        serde_json::to_string(&doc).unwrap()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GraphDoc = serde_json::from_str(text)?;
        if doc.nodes > 64 || doc.colours.len() != doc.nodes || doc.colours.iter().any(|r| r.len() != doc.nodes) {
            return Err(Error::Malformed("colour matrix must be nodes x nodes".into()));
        }
        let mut g = ColouredGraph::new(doc.nodes);
        for (u, row) in doc.colours.iter().enumerate() {
            for (v, c) in row.iter().enumerate() {
                g.edges[u * doc.nodes + v] = c.as_deref().map(str::parse).transpose()?;
            }
        }
        for y in doc.yellow {
            if y.shade.iter().any(|&a| a >= 32) {
                return Err(Error::Malformed("shade index too large".into()));
            }
            g.set_shade(&y.nodes, y.shade.iter().fold(0, |s, &a| s | 1 << a))?;
        }
        Ok(g)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphViolation {
    MissingEdge { u: usize, v: usize },
    /// Colour outside the signature, or `(v,u)` not the converse of `(u,v)`.
    BadColour { u: usize, v: usize, colour: String },
    ForbiddenTriangle { nodes: [usize; 3], colours: [String; 3], rule: &'static str },
    MissingShade { nodes: Vec<usize> },
    UnexpectedShade { nodes: Vec<usize> },
    BadShade { nodes: Vec<usize>, shade: Vec<usize> },
    /// An `i`-cone over a base whose shade does not contain `i`.
    Cone { apex: usize, base: Vec<usize>, tint: usize, shade: Vec<usize> },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct GraphReport {
    pub violations: Vec<GraphViolation>,
}

impl GraphReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Tint of the cone with apex `apex` over `base`, if it is one: exactly one
/// base node sees the apex through some `g_0^i`, and the rest through
/// `g_1, ..., g_{n-2}` once each.
fn cone_tint(n: usize, colour: impl Fn(usize, usize) -> Option<Colour>, apex: usize, base: u64) -> Option<usize> {
    let mut tint = None;
    let mut seen = 0u32;
    for d in mask_nodes(base) {
        match colour(apex, d)? {
            Colour::Green0(a) if tint.is_none() => tint = Some(a as usize),
            Colour::Green(i) if (1..=n - 2).contains(&(i as usize)) && seen >> i & 1 == 0 => seen |= 1 << i,
            _ => return None,
        }
    }
    tint
}

pub fn check_coloured_graph(sig: &RainbowSignature, g: &ColouredGraph) -> GraphReport {
    let n = sig.dimension();
    let m = g.node_count();
    let mut out = GraphReport::default();
    let mut complete = true;
    for u in 0..m {
        for v in u + 1..m {
            match (g.edge(u, v), g.edge(v, u)) {
                (Some(c), Some(d)) => {
                    if !sig.contains(c) || d != c.converse() {
                        out.violations.push(GraphViolation::BadColour { u, v, colour: c.to_string() });
                        complete = false;
                    }
                }
                _ => {
                    out.violations.push(GraphViolation::MissingEdge { u, v });
                    complete = false;
                }
            }
        }
    }
    if !complete {
        return out;
    }
    let e = |u: usize, v: usize| g.edge(u, v).unwrap();
    for x in 0..m {
        for y in x + 1..m {
            for z in y + 1..m {
                if let Some(rule) = sig.forbidden_triangle(e(x, y), e(y, z), e(x, z)) {
                    out.violations.push(GraphViolation::ForbiddenTriangle {
                        nodes: [x, y, z],
                        colours: [e(x, y).to_string(), e(y, z).to_string(), e(x, z).to_string()],
                        rule,
                    });
                }
            }
        }
    }
    let green_free = |mask: u64| {
        let ns = mask_nodes(mask);
        ns.iter().all(|&u| ns.iter().all(|&v| u == v || !e(u, v).is_green()))
    };
    for &(mask, s) in g.shades() {
        let ns = mask_nodes(mask);
        if ns.len() != n - 1 || !green_free(mask) {
            out.violations.push(GraphViolation::UnexpectedShade { nodes: ns });
        } else if s & !sig.full_shade() != 0 {
            out.violations.push(GraphViolation::BadShade { nodes: ns, shade: mask_nodes(s as u64) });
        }
    }
    for mask in subsets(m, n - 1) {
        if green_free(mask) && g.shade_of_mask(mask).is_none() {
            out.violations.push(GraphViolation::MissingShade { nodes: mask_nodes(mask) });
        }
    }
    for mask in subsets(m, n) {
        for apex in mask_nodes(mask) {
            let base = mask & !(1 << apex);
            let (Some(tint), Some(s)) = (cone_tint(n, |u, v| g.edge(u, v), apex, base), g.shade_of_mask(base)) else {
                continue;
            };
            if s >> tint & 1 == 0 {
                out.violations.push(GraphViolation::Cone {
                    apex,
                    base: mask_nodes(base),
                    tint,
                    shade: mask_nodes(s as u64),
                });
            }
        }
    }
    out
}

/// How the edge from an existing node to a new node is coloured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum EdgeChoice {
    Fixed(Colour),
    Free,
}

const NONE: u16 = u16::MAX;

/// Every valid graph obtained from the valid graph `g` by adding node
/// `m = g.node_count()`.
///
/// `edges[u]` prescribes the edge `(u, m)`; free edges range over every colour
/// except `rho`. Shades of new node sets inside `region` (a node mask) are
/// taken from `fixed_shades` (absent means unshaded); all other new shades are
/// free. `visit` returns `false` to stop; the return value is `false` if it did.
pub(crate) fn extend_graph(
    sig: &RainbowSignature,
    g: &ColouredGraph,
    edges: &[EdgeChoice],
    region: u64,
    fixed_shades: &[(u64, u32)],
    visit: &mut dyn FnMut(ColouredGraph) -> bool,
) -> bool {
    let pal = sig.palette();
    let n = sig.dimension();
    let m = g.node_count();
    let w = m + 1;
    assert_eq!(edges.len(), m);
    let mut col = vec![NONE; w * w];
    for u in 0..m {
        for v in 0..m {
            if u != v {
                col[u * w + v] = pal.code(g.edge(u, v).expect("extend_graph needs a complete graph")).unwrap();
            }
        }
    }
    let mut cands: Vec<Vec<u16>> = Vec::with_capacity(m);
    for c in edges {
        cands.push(match c {
            EdgeChoice::Fixed(c) => match pal.code(*c) {
                Some(k) => vec![k],
                None => return true,
            },
            EdgeChoice::Free => (0..pal.len() as u16).filter(|&k| Some(k) != pal.rho).collect(),
        });
    }
    let mut st = Extend { sig, g, region, fixed_shades, col, w, n, visit, stopped: false };
    st.assign(0, &cands);
    !st.stopped
}

struct Extend<'a> {
    sig: &'a RainbowSignature,
    g: &'a ColouredGraph,
    region: u64,
    fixed_shades: &'a [(u64, u32)],
    col: Vec<u16>,
    w: usize,
    n: usize,
    visit: &'a mut dyn FnMut(ColouredGraph) -> bool,
    stopped: bool,
}

impl Extend<'_> {
    fn c(&self, u: usize, v: usize) -> u16 {
        self.col[u * self.w + v]
    }

    fn assign(&mut self, u: usize, cands: &[Vec<u16>]) {
        let m = self.w - 1;
        if u == m {
            self.shade();
            return;
        }
        let pal = self.sig.palette();
        for &k in &cands[u] {
            if (0..u).any(|x| pal.forbidden(self.c(x, u), k, self.c(x, m))) {
                continue;
            }
            self.col[u * self.w + m] = k;
            self.col[m * self.w + u] = pal.conv[k as usize];
            self.assign(u + 1, cands);
            if self.stopped {
                return;
            }
        }
        self.col[u * self.w + m] = NONE;
        self.col[m * self.w + u] = NONE;
    }

    fn colour(&self, u: usize, v: usize) -> Option<Colour> {
        let k = self.c(u, v);
        (k != NONE).then(|| self.sig.palette().colours[k as usize])
    }

    fn green_free(&self, mask: u64) -> bool {
        let pal = self.sig.palette();
        let ns = mask_nodes(mask);
        ns.iter().all(|&u| ns.iter().all(|&v| u == v || !pal.green[self.c(u, v) as usize]))
    }

    /// Tints of all cones over `base` with apex anywhere in the new graph.
    fn required(&self, base: u64) -> u32 {
        (0..self.w)
            .filter(|&apex| base >> apex & 1 == 0)
            .filter_map(|apex| cone_tint(self.n, |u, v| self.colour(u, v), apex, base))
            .fold(0, |s, t| s | 1 << t)
    }

    fn shade(&mut self) {
        let m = self.w - 1;
        let full = self.sig.full_shade();
        // Cones with the new node as apex over an old base.
        for &(base, s) in self.g.shades() {
            if let Some(t) = cone_tint(self.n, |u, v| self.colour(u, v), m, base) {
                if s >> t & 1 == 0 {
                    return;
                }
            }
        }
        let mut fixed = Vec::new();
        let mut free: Vec<(u64, Vec<u32>)> = Vec::new();
        for rest in subsets(m, self.n - 2) {
            let mask = rest | 1 << m;
            let gf = self.green_free(mask);
            let need = if gf { self.required(mask) } else { 0 };
            if mask & !self.region == 0 {
                let given = self.fixed_shades.iter().find(|&&(k, _)| k == mask).map(|&(_, s)| s);
                match (gf, given) {
                    (false, None) => {}
                    (true, Some(s)) if s & need == need && s & !full == 0 => fixed.push((mask, s)),
                    _ => return,
                }
            } else if gf {
                // Supersets of the required tints.
                let rest = full & !need;
                let mut opts = Vec::new();
                let mut sub = rest;
                loop {
                    opts.push(need | sub);
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & rest;
                }
                opts.reverse();
                free.push((mask, opts));
            }
        }
        let mut base = self.g.clone();
        base.nodes = self.w;
        base.edges = self
            .col
            .iter()
            .map(|&k| (k != NONE).then(|| self.sig.palette().colours[k as usize]))
            .collect();
        base.shades.extend(fixed);
        let mut pick = vec![0usize; free.len()];
        loop {
            let mut out = base.clone();
            out.shades.extend(free.iter().zip(&pick).map(|((mask, opts), &i)| (*mask, opts[i])));
            out.shades.sort_unstable();
            if !(self.visit)(out) {
                self.stopped = true;
                return;
            }
            let mut k = 0;
            while k < pick.len() {
                pick[k] += 1;
                if pick[k] < free[k].1.len() {
                    break;
                }
                pick[k] = 0;
                k += 1;
            }
            if k == pick.len() {
                return;
            }
        }
    }
}
