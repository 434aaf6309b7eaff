//! Undirected simple graphs, irreflexive ordered structures, and exact
//! invariants (chromatic number, girth).

use std::collections::VecDeque;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default vertex cap for the exact chromatic solver.
pub const EXACT_VERTEX_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<FixedBitSet>,
}

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    vertices: usize,
    edges: Vec<[usize; 2]>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![FixedBitSet::with_capacity(n); n] }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Graph::empty(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let n = self.vertex_count();
        if u >= n || v >= n {
            return Err(Error::InvalidParameter(format!("edge ({u},{v}) outside {n} vertices")));
        }
        if u == v {
            return Err(Error::InvalidParameter(format!("loop at vertex {u}")));
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|s| s.count_ones(..)).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].ones()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones(..)
    }

    pub fn max_degree(&self) -> usize {
        (0..self.vertex_count()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.vertex_count())
            .flat_map(|u| self.adj[u].ones().filter(move |&v| v > u).map(move |v| (u, v)))
            .collect()
    }

    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let off = self.vertex_count();
        let edges = self.edges().into_iter().chain(other.edges().into_iter().map(|(u, v)| (u + off, v + off)));
        Graph::from_edges(off + other.vertex_count(), edges).expect("edges stay in range")
    }

    pub fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
    }

    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3, "a cycle needs at least 3 vertices");
        Graph::from_edges(n, (0..n).map(|u| (u, (u + 1) % n))).unwrap()
    }

    pub fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|v| (v - 1, v))).unwrap()
    }

    /// `p <n> <m>` header followed by `e <u> <v>` lines, 0-based.
    pub fn to_dimacs(&self) -> String {
        let edges = self.edges();
        let mut out = format!("p {} {}\n", self.vertex_count(), edges.len());
        for (u, v) in edges {
            out.push_str(&format!("e {u} {v}\n"));
        }
        out
    }

    pub fn from_dimacs(text: &str) -> Result<Graph> {
        let mut graph: Option<(Graph, usize)> = None;
        let mut seen = 0;
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let bad = || Error::Parse(format!("line {}: `{line}`", no + 1));
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts.as_slice() {
                ["p", n, m] | ["p", "edge", n, m] => {
                    if graph.is_some() {
                        return Err(bad());
                    }
                    let n = n.parse().map_err(|_| bad())?;
                    let m = m.parse().map_err(|_| bad())?;
                    graph = Some((Graph::empty(n), m));
                }
                ["e", u, v] => {
                    let (g, _) = graph.as_mut().ok_or_else(bad)?;
                    let u = u.parse().map_err(|_| bad())?;
                    let v = v.parse().map_err(|_| bad())?;
                    g.add_edge(u, v)?;
                    seen += 1;
                }
                _ => return Err(bad()),
            }
        }
        let (g, m) = graph.ok_or_else(|| Error::Parse("missing `p` line".into()))?;
        if seen != m {
            return Err(Error::Parse(format!("header promises {m} edges, found {seen}")));
        }
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        let doc = GraphDoc { vertices: self.vertex_count(), edges: self.edges().into_iter().map(|(u, v)| [u, v]).collect() };
        serde_json::to_string(&doc).unwrap()
    }

    pub fn from_json(text: &str) -> Result<Graph> {
        let doc: GraphDoc = serde_json::from_str(text)?;
        Graph::from_edges(doc.vertices, doc.edges.into_iter().map(|[u, v]| (u, v)))
    }

    /// Reads either format, deciding by the first non-blank character.
    pub fn parse(text: &str) -> Result<Graph> {
        if text.trim_start().starts_with('{') {
            Graph::from_json(text)
        } else {
            Graph::from_dimacs(text)
        }
    }
}

/// Parses `complete:n`, `cycle:n`, `path:n`, `empty:n`, `cliques:count,size`
/// or `band:length,width`.
pub fn parse_graph_spec(spec: &str) -> Result<Graph> {
    let bad = || Error::Parse(format!("graph spec `{spec}`"));
    let (kind, arg) = spec.split_once(':').ok_or_else(bad)?;
    let nums: Vec<usize> = arg.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?;
    match (kind, nums.as_slice()) {
        ("complete", &[n]) => Ok(Graph::complete(n)),
        ("cycle", &[n]) if n >= 3 => Ok(Graph::cycle(n)),
        ("path", &[n]) => Ok(Graph::path(n)),
        ("empty", &[n]) => Ok(Graph::empty(n)),
        ("cliques", &[c, s]) => gen_disjoint_cliques(c, s),
        ("band", &[l, w]) => gen_band(l, w),
        _ => Err(bad()),
    }
}

pub fn gen_disjoint_cliques(count: usize, size: usize) -> Result<Graph> {
    if count == 0 || size == 0 {
        return Err(Error::InvalidParameter("count and size must be positive".into()));
    }
    let edges = (0..count).flat_map(|b| {
        (0..size).flat_map(move |i| (i + 1..size).map(move |j| (b * size + i, b * size + j)))
    });
    Graph::from_edges(count * size, edges)
}

pub fn gen_band(length: usize, width: usize) -> Result<Graph> {
    if length == 0 || width == 0 {
        return Err(Error::InvalidParameter("length and width must be positive".into()));
    }
    let edges = (0..length).flat_map(|i| (i + 1..length.min(i + width)).map(move |j| (i, j)));
    Graph::from_edges(length, edges)
}

/// Exact chromatic number with the default vertex cap.
pub fn chromatic_number(g: &Graph) -> Result<usize> {
    chromatic_number_with_cap(g, EXACT_VERTEX_CAP)
}

/// DSATUR branch and bound, pruned by an exact maximum clique.
pub fn chromatic_number_with_cap(g: &Graph, cap: usize) -> Result<usize> {
    let n = g.vertex_count();
    if n > cap || n > 64 {
        return Err(Error::TooLargeForExact { vertices: n, cap: cap.min(64) });
    }
    if n == 0 {
        return Ok(0);
    }
    let adj: Vec<u64> = (0..n).map(|v| g.neighbours(v).fold(0u64, |m, u| m | 1 << u)).collect();
    let lower = max_clique(&adj);
    let mut search = Dsatur { adj: &adj, colour: vec![usize::MAX; n], best: n, lower };
    search.best = search.greedy();
    if search.best > lower {
        search.branch(0);
    }
    Ok(search.best)
}

/// Size of a maximum clique in a graph given by adjacency masks.
pub fn max_clique(adj: &[u64]) -> usize {
    fn expand(adj: &[u64], cand: u64, size: usize, best: &mut usize) {
        if cand == 0 {
            *best = (*best).max(size);
            return;
        }
        if size + cand.count_ones() as usize <= *best {
            return;
        }
        let mut rest = cand;
        while rest != 0 {
            if size + rest.count_ones() as usize <= *best {
                return;
            }
            let v = rest.trailing_zeros() as usize;
            rest &= !(1 << v);
            expand(adj, rest & adj[v], size + 1, best);
        }
    }
    let all = if adj.len() == 64 { u64::MAX } else { (1u64 << adj.len()) - 1 };
    let mut best = 0;
    expand(adj, all, 0, &mut best);
    best
}

struct Dsatur<'a> {
    adj: &'a [u64],
    colour: Vec<usize>,
    best: usize,
    lower: usize,
}

impl Dsatur<'_> {
    fn neighbour_colours(&self, v: usize) -> u64 {
        let mut used = 0u64;
        let mut m = self.adj[v];
        while m != 0 {
            let u = m.trailing_zeros() as usize;
            m &= m - 1;
            if self.colour[u] != usize::MAX {
                used |= 1 << self.colour[u];
            }
        }
        used
    }

    /// Uncoloured vertex of maximum saturation, ties by uncoloured degree.
    fn pick(&self) -> Option<usize> {
        let n = self.colour.len();
        let uncoloured = (0..n).filter(|&v| self.colour[v] == usize::MAX).fold(0u64, |m, v| m | 1 << v);
        (0..n)
            .filter(|&v| self.colour[v] == usize::MAX)
            .max_by_key(|&v| {
                let sat = self.neighbour_colours(v).count_ones();
                let deg = (self.adj[v] & uncoloured).count_ones();
                (sat, deg, std::cmp::Reverse(v))
            })
    }

    fn greedy(&mut self) -> usize {
        let mut used = 0;
        while let Some(v) = self.pick() {
            let taken = self.neighbour_colours(v);
            let c = (!taken).trailing_zeros() as usize;
            self.colour[v] = c;
            used = used.max(c + 1);
        }
        self.colour.iter_mut().for_each(|c| *c = usize::MAX);
        used
    }

    fn branch(&mut self, used: usize) {
        if self.best == self.lower {
            return;
        }
        let Some(v) = self.pick() else {
            self.best = self.best.min(used);
            return;
        };
        let taken = self.neighbour_colours(v);
        for c in 0..=used {
            if c + 1 >= self.best {
                break;
            }
            if taken & (1 << c) != 0 {
                continue;
            }
            self.colour[v] = c;
            self.branch(used.max(c + 1));
            self.colour[v] = usize::MAX;
            if self.best == self.lower {
                return;
            }
        }
    }
}

/// Girth of a graph: a finite length, or infinite for forests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Girth {
    Finite(usize),
    Infinite,
}

impl fmt::Display for Girth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Girth::Finite(k) => write!(f, "{k}"),
            Girth::Infinite => write!(f, "inf"),
        }
    }
}

/// BFS from every vertex; a non-tree edge at depths (d1, d2) closes a cycle of
/// length at most d1 + d2 + 1, and the minimum over all roots is exact.
pub fn girth(g: &Graph) -> Girth {
    let n = g.vertex_count();
    let mut best = usize::MAX;
    for root in 0..n {
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        dist[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            if 2 * dist[u] + 1 >= best {
                break;
            }
            for v in g.neighbours(u) {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    parent[v] = u;
                    queue.push_back(v);
                } else if parent[u] != v {
                    best = best.min(dist[u] + dist[v] + 1);
                }
            }
        }
    }
    if best == usize::MAX {
        Girth::Infinite
    } else {
        Girth::Finite(best)
    }
}

/// A finite set with an irreflexive binary relation `<`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderedStructure {
    less: Vec<FixedBitSet>,
}

#[derive(Serialize, Deserialize)]
struct OrderDoc {
    size: usize,
    less: Vec<[usize; 2]>,
}

impl OrderedStructure {
    pub fn new(size: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut less = vec![FixedBitSet::with_capacity(size); size];
        for (a, b) in pairs {
            if a >= size || b >= size {
                return Err(Error::InvalidParameter(format!("pair ({a},{b}) outside {size} elements")));
            }
            if a == b {
                return Err(Error::InvalidParameter(format!("relation is not irreflexive at {a}")));
            }
            less[a].insert(b);
        }
        Ok(OrderedStructure { less })
    }

    /// `0 < 1 < ... < k-1`, transitively closed.
    pub fn chain(k: usize) -> Self {
        Self::new(k, (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j)))).unwrap()
    }

    /// Complete irreflexive relation: every two distinct points related both ways.
    pub fn complete(k: usize) -> Self {
        Self::new(k, (0..k).flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)))).unwrap()
    }

    pub fn antichain(k: usize) -> Self {
        Self::new(k, []).unwrap()
    }

    pub fn size(&self) -> usize {
        self.less.len()
    }

    pub fn less(&self, a: usize, b: usize) -> bool {
        self.less[a].contains(b)
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.size()).flat_map(|a| self.less[a].ones().map(move |b| (a, b))).collect()
    }

    pub fn to_json(&self) -> String {
        let doc = OrderDoc { size: self.size(), less: self.pairs().into_iter().map(|(a, b)| [a, b]).collect() };
        serde_json::to_string(&doc).unwrap()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: OrderDoc = serde_json::from_str(text)?;
        Self::new(doc.size, doc.less.into_iter().map(|[a, b]| (a, b)))
    }

    /// Parses `chain:k`, `complete:k`, `empty:k` or `mpI:p,<inner>`.
    pub fn parse_spec(spec: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("ordered structure spec `{spec}`"));
        let (kind, arg) = spec.split_once(':').ok_or_else(bad)?;
        match kind {
            "chain" => Ok(Self::chain(arg.parse().map_err(|_| bad())?)),
            "complete" => Ok(Self::complete(arg.parse().map_err(|_| bad())?)),
            "empty" | "antichain" => Ok(Self::antichain(arg.parse().map_err(|_| bad())?)),
            "mpI" => {
                let (p, inner) = arg.split_once(',').ok_or_else(bad)?;
                Ok(gen_mpi(p.parse().map_err(|_| bad())?, &Self::parse_spec(inner)?))
            }
            _ => Err(bad()),
        }
    }
}

/// `M[p, I]`: `I` followed by `p` fresh points forming `K_p`, with every
/// point of `I` related both ways to every point of `K_p`.
pub fn gen_mpi(p: usize, inner: &OrderedStructure) -> OrderedStructure {
    let m = inner.size();
    let k = m..m + p;
    let pairs = inner
        .pairs()
        .into_iter()
        .chain(k.clone().flat_map(|a| k.clone().filter(move |&b| b != a).map(move |b| (a, b))))
        .chain((0..m).flat_map(|a| k.clone().flat_map(move |b| [(a, b), (b, a)])));
    OrderedStructure::new(m + p, pairs).unwrap()
}
