use std::collections::HashMap;
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use super::coloured::{extend_graph, mask_nodes, subsets, EdgeChoice};
use super::{check_coloured_graph, Colour, ColouredGraph, RainbowSignature};
use crate::algebra::{Accessibility, CaAtomStructure};
use crate::error::{Error, Result};

pub const DEFAULT_ATOM_CAP: usize = 2_000_000;

/// A surjection from `n` onto a coloured graph, in its canonical form: the
/// kernel is a restricted growth string, so node `k` of the graph is the
/// `k`-th distinct value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RainbowAtom {
    pub kernel: Vec<u8>,
    pub graph: ColouredGraph,
}

impl RainbowAtom {
    /// Canonical form of the map `i -> nodes[i]` into `g`.
    pub fn from_tuple(g: &ColouredGraph, nodes: &[usize]) -> RainbowAtom {
        let mut order: Vec<usize> = Vec::new();
        let kernel = nodes
            .iter()
            .map(|&v| match order.iter().position(|&u| u == v) {
                Some(k) => k as u8,
                None => {
                    order.push(v);
                    (order.len() - 1) as u8
                }
            })
            .collect();
        RainbowAtom { kernel, graph: g.induced(&order) }
    }

    pub fn name(&self) -> String {
        let mut s = String::from("[");
        for k in &self.kernel {
            write!(s, "{k}").unwrap();
        }
        let m = self.graph.node_count();
        let mut sep = '|';
        for u in 0..m {
            for v in u + 1..m {
                write!(s, "{sep}{u}{v}:{}", self.graph.edge(u, v).unwrap()).unwrap();
                sep = ',';
            }
        }
        let mut sep = '|';
        for &(mask, shade) in self.graph.shades() {
            s.push(sep);
            for v in mask_nodes(mask) {
                write!(s, "{v}").unwrap();
            }
            let elems: Vec<String> = mask_nodes(shade as u64).iter().map(|a| a.to_string()).collect();
            write!(s, ":{{{}}}", elems.join(",")).unwrap();
            sep = ',';
        }
        s.push(']');
        s
    }
}

/// The atoms of a rainbow signature together with the induced cylindric atom structure.
#[derive(Debug, Clone)]
pub struct RainbowAtoms {
    sig: RainbowSignature,
    atoms: Vec<RainbowAtom>,
    index: HashMap<RainbowAtom, usize>,
    structure: CaAtomStructure,
}

impl RainbowAtoms {
    pub fn signature(&self) -> &RainbowSignature {
        &self.sig
    }

    pub fn atoms(&self) -> &[RainbowAtom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn index_of(&self, atom: &RainbowAtom) -> Option<usize> {
        self.index.get(atom).copied()
    }

    pub fn structure(&self) -> &CaAtomStructure {
        &self.structure
    }
}

fn growth_strings(n: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![0u8]];
    for _ in 1..n {
        out = out
            .into_iter()
            .flat_map(|s| {
                let top = *s.iter().max().unwrap();
                (0..=top + 1).map(move |k| {
                    let mut t = s.clone();
                    t.push(k);
                    t
                })
            })
            .collect();
    }
    out
}

/// All valid graphs on `0..m`, for each `m <= n`.
fn valid_graphs(sig: &RainbowSignature, cap: usize) -> Result<Vec<Vec<ColouredGraph>>> {
    let mut levels = vec![vec![ColouredGraph::new(0)]];
    for m in 1..=sig.dimension() {
        let next: Vec<ColouredGraph> = levels[m - 1]
            .par_iter()
            .flat_map_iter(|g| {
                let mut out = Vec::new();
                extend_graph(sig, g, &vec![EdgeChoice::Free; m - 1], 0, &[], &mut |h| {
                    out.push(h);
                    out.len() <= cap
                });
                out
            })
            .collect();
        if next.len() > cap {
            return Err(Error::CapExceeded { what: "rainbow graphs", size: next.len() as u128, cap: cap as u128 });
        }
        levels.push(next);
    }
    Ok(levels)
}

pub fn enumerate_atoms(sig: &RainbowSignature) -> Result<RainbowAtoms> {
    enumerate_atoms_with_cap(sig, DEFAULT_ATOM_CAP)
}

pub fn enumerate_atoms_with_cap(sig: &RainbowSignature, cap: usize) -> Result<RainbowAtoms> {
    let n = sig.dimension();
    let levels = valid_graphs(sig, cap)?;
    let kernels = growth_strings(n);
    let total: usize = kernels.iter().map(|k| levels[*k.iter().max().unwrap() as usize + 1].len()).sum();
    if total > cap {
        return Err(Error::CapExceeded { what: "rainbow atoms", size: total as u128, cap: cap as u128 });
    }
    let mut atoms = Vec::with_capacity(total);
    for kernel in &kernels {
        let m = *kernel.iter().max().unwrap() as usize + 1;
        atoms.extend(levels[m].iter().map(|g| RainbowAtom { kernel: kernel.clone(), graph: g.clone() }));
    }
    let index: HashMap<RainbowAtom, usize> = atoms.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();

    let pal = sig.palette();
    let ti = (0..n)
        .map(|i| {
            let keys: Vec<Vec<u32>> = atoms.par_iter().map(|a| restriction_key(sig, pal, a, i)).collect();
            Accessibility::from_keys(keys)
        })
        .collect();
    let mut eij = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut bits = FixedBitSet::with_capacity(atoms.len());
            for (x, a) in atoms.iter().enumerate() {
                if a.kernel[i] == a.kernel[j] {
                    bits.insert(x);
                }
            }
            eij.push(bits);
        }
    }
    let mut pij = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let map: Vec<u32> = atoms
                .par_iter()
                .map(|a| {
                    let nodes: Vec<usize> = (0..n)
                        .map(|x| {
                            let y = if x == i { j } else if x == j { i } else { x };
                            a.kernel[y] as usize
                        })
                        .collect();
                    index[&RainbowAtom::from_tuple(&a.graph, &nodes)] as u32
                })
                .collect();
            pij.push(map);
        }
    }
    let names = atoms.par_iter().map(|a| a.name()).collect();
    let structure = CaAtomStructure::new(n, names, ti, eij, Some(pij))?;
    Ok(RainbowAtoms { sig: sig.clone(), atoms, index, structure })
}

/// Everything the atom says about the indices other than `i`.
fn restriction_key(sig: &RainbowSignature, pal: &super::Palette, a: &RainbowAtom, i: usize) -> Vec<u32> {
    let n = sig.dimension();
    let rest: Vec<usize> = (0..n).filter(|&x| x != i).collect();
    let mut key = Vec::with_capacity(n * n);
    let mut seen: Vec<u8> = Vec::new();
    for &x in &rest {
        let v = a.kernel[x];
        let k = seen.iter().position(|&u| u == v).unwrap_or_else(|| {
            seen.push(v);
            seen.len() - 1
        });
        key.push(k as u32);
    }
    for (p, &x) in rest.iter().enumerate() {
        for &y in &rest[p + 1..] {
            let (u, v) = (a.kernel[x] as usize, a.kernel[y] as usize);
            key.push(if u == v { u32::MAX } else { pal.code(a.graph.edge(u, v).unwrap()).unwrap() as u32 });
        }
    }
    let mask = rest.iter().fold(0u64, |m, &x| m | 1 << a.kernel[x]);
    key.push(if mask.count_ones() as usize == n - 1 { a.graph.shade_of_mask(mask).unwrap_or(u32::MAX) } else { u32::MAX });
    key
}

/// For each atom of the unsplit structure, the atoms of the split one that
/// forget to it.
pub fn red_copy_map(unsplit: &RainbowAtoms, split: &RainbowAtoms) -> Result<Vec<Vec<usize>>> {
    if unsplit.sig.copies().is_some() || split.sig.copies().is_none() || split.sig.base() != unsplit.sig {
        return Err(Error::Precondition("expected an unsplit signature and its split".into()));
    }
    let mut map = vec![Vec::new(); unsplit.len()];
    for (x, a) in split.atoms.iter().enumerate() {
        let forgot = RainbowAtom { kernel: a.kernel.clone(), graph: a.graph.map_colours(Colour::uncopied) };
        let y = unsplit
            .index_of(&forgot)
            .ok_or_else(|| Error::Provenance(format!("split atom {} has no unsplit image", a.name())))?;
        map[y].push(x);
    }
    Ok(map)
}

/// An atomic network: one atom per `n`-tuple of nodes, tuples in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AtomicNetwork {
    pub nodes: usize,
    pub labels: Vec<u32>,
}

impl AtomicNetwork {
    pub fn label(&self, tuple: &[usize]) -> u32 {
        self.labels[tuple.iter().fold(0, |k, &v| k * self.nodes + v)]
    }
}

fn tuples(nodes: usize, n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..nodes.pow(n as u32)).map(move |mut k| {
        let mut t = vec![0; n];
        for slot in t.iter_mut().rev() {
            *slot = k % nodes;
            k /= nodes;
        }
        t
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphOrNetwork {
    Graph(ColouredGraph),
    Network(AtomicNetwork),
}

/// Coloured graph to atomic network and back.
pub fn graph_network_translation(atoms: &RainbowAtoms, input: &GraphOrNetwork) -> Result<GraphOrNetwork> {
    match input {
        GraphOrNetwork::Graph(g) => network_of_graph(atoms, g).map(GraphOrNetwork::Network),
        GraphOrNetwork::Network(net) => graph_of_network(atoms, net).map(GraphOrNetwork::Graph),
    }
}

fn network_of_graph(atoms: &RainbowAtoms, g: &ColouredGraph) -> Result<AtomicNetwork> {
    let report = check_coloured_graph(&atoms.sig, g);
    if !report.is_valid() || g.node_count() == 0 {
        return Err(Error::Invalid(format!("not a nonempty valid coloured graph: {:?}", report.violations.first())));
    }
    let n = atoms.sig.dimension();
    let labels = tuples(g.node_count(), n)
        .map(|t| {
            let a = RainbowAtom::from_tuple(g, &t);
            atoms.index_of(&a).map(|x| x as u32).ok_or_else(|| Error::UnknownAtom(a.name()))
        })
        .collect::<Result<_>>()?;
    Ok(AtomicNetwork { nodes: g.node_count(), labels })
}

fn graph_of_network(atoms: &RainbowAtoms, net: &AtomicNetwork) -> Result<ColouredGraph> {
    let n = atoms.sig.dimension();
    if net.nodes == 0 || net.nodes > 64 || net.labels.len() != net.nodes.pow(n as u32) {
        return Err(Error::Malformed("network label count does not match its nodes".into()));
    }
    let mut g = ColouredGraph::new(net.nodes);
    let mut shades: HashMap<u64, u32> = HashMap::new();
    for t in tuples(net.nodes, n) {
        let a = atoms.atoms.get(net.label(&t) as usize).ok_or(Error::AtomOutOfRange {
            index: net.label(&t) as usize,
            len: atoms.len(),
        })?;
        for i in 0..n {
            for j in 0..n {
                let (x, y) = (t[i], t[j]);
                let same = a.kernel[i] == a.kernel[j];
                if (x == y) != same {
                    return Err(Error::Invalid(format!("tuple {t:?} labelled against its diagonal")));
                }
                if same {
                    continue;
                }
                let c = a.graph.edge(a.kernel[i] as usize, a.kernel[j] as usize).unwrap();
                match g.edge(x, y) {
                    Some(d) if d != c => return Err(Error::Invalid(format!("edge ({x},{y}) coloured {d} and {c}"))),
                    _ => g.set_edge(x, y, c)?,
                }
            }
        }
        for mask in subsets(n, n - 1) {
            let idx = mask_nodes(mask);
            let image = idx.iter().fold(0u64, |m, &i| m | 1 << a.kernel[i]);
            if image.count_ones() as usize != n - 1 {
                continue;
            }
            if let Some(s) = a.graph.shade_of_mask(image) {
                let nodes = idx.iter().fold(0u64, |m, &i| m | 1 << t[i]);
                if *shades.entry(nodes).or_insert(s) != s {
                    return Err(Error::Invalid(format!("node set {:?} carries two shades", mask_nodes(nodes))));
                }
            }
        }
    }
    for (mask, s) in shades {
        g.set_shade(&mask_nodes(mask), s)?;
    }
    let report = check_coloured_graph(&atoms.sig, &g);
    if !report.is_valid() {
        return Err(Error::Invalid(format!("translated graph is not valid: {:?}", report.violations[0])));
    }
    Ok(g)
}
