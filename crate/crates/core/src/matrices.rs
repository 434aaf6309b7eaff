//! Basic matrices and hypernetworks over a relation algebra atom structure,
//! the basis conditions on sets of them, and the induced cylindric atom
//! structures.
//!
//! Triangle convention: `M(i,j) <= M(i,k) ; M(k,j)`, i.e. the stored cycle
//! `(M(i,k), M(k,j), M(i,j))`, matching [`RaAtomStructure::is_cycle`].

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Accessibility, CaAtomStructure, RaAtomStructure};
use crate::error::{Error, Result};

/// Default cap on the number of matrices or hypernetworks enumerated.
pub const DEFAULT_ENUMERATION_CAP: usize = 2_000_000;

/// `n x n` atom matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BasicMatrix {
    pub n: usize,
    pub entries: Vec<u32>,
}

impl BasicMatrix {
    pub fn get(&self, i: usize, j: usize) -> usize {
        self.entries[i * self.n + j] as usize
    }

    /// Checks the three defining invariants against `r`.
    pub fn is_basic(&self, r: &RaAtomStructure) -> bool {
        let n = self.n;
        (0..n).all(|i| r.is_identity(self.get(i, i)))
            && (0..n).all(|i| (0..n).all(|j| self.get(j, i) == r.converse(self.get(i, j))))
            && (0..n).all(|i| {
                (0..n).all(|j| (0..n).all(|k| r.is_cycle(self.get(i, k), self.get(k, j), self.get(i, j))))
            })
    }

    /// `M o sigma`: entry `(x, y)` is `M(sigma x, sigma y)`.
    pub fn compose_map(&self, sigma: &[usize]) -> BasicMatrix {
        let n = self.n;
        let entries = (0..n * n).map(|p| self.entries[sigma[p / n] * n + sigma[p % n]]).collect();
        BasicMatrix { n, entries }
    }

    pub fn name(&self, r: &RaAtomStructure) -> String {
        let parts: Vec<&str> = self.entries.iter().map(|&a| r.name(a as usize)).collect();
        format!("[{}]", parts.join(" "))
    }
}

/// All `n x n` basic matrices over `r`, sorted.
pub fn enumerate_basic_matrices(r: &RaAtomStructure, n: usize, cap: usize) -> Result<Vec<BasicMatrix>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("dimension must be at least 2, got {n}")));
    }
    let ids: Vec<u32> = r.identity_atoms().map(|a| a as u32).collect();
    let len = r.len() as u32;
    // Upper-triangle cells in an order where each new cell closes triangles early.
    let cells: Vec<(usize, usize)> = (1..n).flat_map(|j| (0..j).rev().map(move |i| (i, j))).collect();

    let mut diagonals = vec![Vec::new()];
    for _ in 0..n {
        diagonals = diagonals
            .into_iter()
            .flat_map(|d: Vec<u32>| ids.iter().map(move |&e| [d.clone(), vec![e]].concat()))
            .collect();
    }
    let mut starts = Vec::new();
    for d in &diagonals {
        for a in 0..len {
            starts.push((d.clone(), a));
        }
    }
    let results: Vec<Result<Vec<BasicMatrix>>> = starts
        .into_par_iter()
        .map(|(diag, first)| {
            let mut m = vec![u32::MAX; n * n];
            for (i, &e) in diag.iter().enumerate() {
                m[i * n + i] = e;
            }
            let mut out = Vec::new();
            let (i, j) = cells[0];
            m[i * n + j] = first;
            m[j * n + i] = r.converse(first as usize) as u32;
            if triangles_ok(r, &m, n, i, j) {
                fill(r, &cells, 1, &mut m, n, &mut out, cap)?;
            }
            Ok(out)
        })
        .collect();
    let mut all = Vec::new();
    for part in results {
        all.extend(part?);
        if all.len() > cap {
            return Err(Error::CapExceeded { what: "basic matrices", size: all.len() as u128, cap: cap as u128 });
        }
    }
    all.sort();
    Ok(all)
}

fn triangles_ok(r: &RaAtomStructure, m: &[u32], n: usize, i: usize, j: usize) -> bool {
    let get = |x: usize, y: usize| m[x * n + y];
    for &(p, q) in &[(i, j), (j, i)] {
        for k in 0..n {
            for (x, y, z) in [(p, q, k), (p, k, q), (k, p, q)] {
                let (a, b, c) = (get(x, z), get(z, y), get(x, y));
                if a != u32::MAX && b != u32::MAX && c != u32::MAX && !r.is_cycle(a as usize, b as usize, c as usize) {
                    return false;
                }
            }
        }
    }
    true
}

fn fill(
    r: &RaAtomStructure,
    cells: &[(usize, usize)],
    at: usize,
    m: &mut Vec<u32>,
    n: usize,
    out: &mut Vec<BasicMatrix>,
    cap: usize,
) -> Result<()> {
    if at == cells.len() {
        out.push(BasicMatrix { n, entries: m.clone() });
        if out.len() > cap {
            return Err(Error::CapExceeded { what: "basic matrices", size: out.len() as u128, cap: cap as u128 });
        }
        return Ok(());
    }
    let (i, j) = cells[at];
    for a in 0..r.len() {
        m[i * n + j] = a as u32;
        m[j * n + i] = r.converse(a) as u32;
        if triangles_ok(r, m, n, i, j) {
            fill(r, cells, at + 1, m, n, out, cap)?;
        }
    }
    m[i * n + j] = u32::MAX;
    m[j * n + i] = u32::MAX;
    Ok(())
}

/// Tuples of length at most `n_wide` over `m` nodes, ordered by length then
/// lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperShape {
    pub m: usize,
    pub n_wide: usize,
    tuples: Vec<Vec<usize>>,
    masks: Vec<u64>,
    /// First index of each tuple length; empty for the pairs-only shape.
    offsets: Vec<usize>,
}

impl HyperShape {
    pub fn new(m: usize, n_wide: usize) -> Result<Self> {
        if m == 0 || m > 64 || n_wide < 2 {
            return Err(Error::InvalidParameter(format!("hypernetwork shape m={m}, width={n_wide}")));
        }
        let mut tuples = Vec::new();
        let mut offsets = Vec::new();
        let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..=n_wide {
            offsets.push(tuples.len());
            tuples.extend(layer.iter().cloned());
            layer = layer
                .into_iter()
                .flat_map(|t| (0..m).map(move |x| [t.clone(), vec![x]].concat()))
                .collect();
        }
        let masks = tuples.iter().map(|t| t.iter().fold(0u64, |acc, &x| acc | 1 << x)).collect();
        Ok(HyperShape { m, n_wide, tuples, masks, offsets })
    }

    /// Shape whose only positions are the `n x n` pairs, as in a basic matrix.
    fn pairs_only(n: usize) -> Self {
        let tuples: Vec<Vec<usize>> = (0..n * n).map(|p| vec![p / n, p % n]).collect();
        let masks = tuples.iter().map(|t| t.iter().fold(0u64, |acc, &x| acc | 1 << x)).collect();
        HyperShape { m: n, n_wide: 2, tuples, masks, offsets: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    pub fn index(&self, t: &[usize]) -> usize {
        if self.offsets.is_empty() {
            return t[0] * self.m + t[1];
        }
        self.offsets[t.len()] + t.iter().fold(0, |acc, &x| acc * self.m + x)
    }

    pub fn pair(&self, x: usize, y: usize) -> usize {
        self.index(&[x, y])
    }
}

/// Hypernetwork labels in [`HyperShape`] order: atom indices on pairs,
/// indices into `Lambda` elsewhere.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Hypernetwork {
    pub labels: Vec<u32>,
}

impl Hypernetwork {
    pub fn atom(&self, shape: &HyperShape, x: usize, y: usize) -> usize {
        self.labels[shape.pair(x, y)] as usize
    }

    pub fn compose_map(&self, shape: &HyperShape, sigma: &[usize]) -> Hypernetwork {
        let labels = shape
            .tuples
            .iter()
            .map(|t| {
                let image: Vec<usize> = t.iter().map(|&x| sigma[x]).collect();
                self.labels[shape.index(&image)]
            })
            .collect();
        Hypernetwork { labels }
    }

    /// Checks the three hypernetwork clauses.
    pub fn is_valid(&self, r: &RaAtomStructure, shape: &HyperShape) -> bool {
        let m = shape.m;
        let a = |x: usize, y: usize| self.atom(shape, x, y);
        if !(0..m).all(|x| r.is_identity(a(x, x))) {
            return false;
        }
        for x in 0..m {
            for y in 0..m {
                for z in 0..m {
                    if !r.is_cycle(a(x, z), a(z, y), a(x, y)) {
                        return false;
                    }
                }
            }
        }
        for (p, s) in shape.tuples.iter().enumerate() {
            for (q, t) in shape.tuples.iter().enumerate().skip(p + 1) {
                if s.len() == t.len() && s.len() != 2 && s.iter().zip(t).all(|(&x, &y)| r.is_identity(a(x, y))) {
                    if self.labels[p] != self.labels[q] {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// All `n_wide`-wide `m`-dimensional hypernetworks with `lambda` hyperlabels.
pub fn enumerate_hypernetworks(
    r: &RaAtomStructure,
    m: usize,
    n_wide: usize,
    lambda: usize,
    cap: usize,
) -> Result<(HyperShape, Vec<Hypernetwork>)> {
    if lambda == 0 {
        return Err(Error::InvalidParameter("Lambda must be nonempty".into()));
    }
    let shape = HyperShape::new(m, n_wide)?;
    // Pair labellings: every m x m cell independently, with N(x,x) <= Id and
    // the triangle law; converse symmetry is not assumed.
    let mut pair_maps = Vec::new();
    let mut cur = vec![u32::MAX; m * m];
    pair_labellings(r, m, 0, &mut cur, &mut pair_maps, cap)?;

    let mut out = Vec::new();
    for pm in pair_maps {
        let same = |x: usize, y: usize| r.is_identity(pm[x * m + y] as usize);
        // Identification classes of the non-pair tuples.
        let mut class_of = vec![usize::MAX; shape.len()];
        let mut classes = 0;
        for (p, s) in shape.tuples.iter().enumerate() {
            if s.len() == 2 || class_of[p] != usize::MAX {
                continue;
            }
            for (q, t) in shape.tuples.iter().enumerate().skip(p) {
                if class_of[q] == usize::MAX && t.len() == s.len() && s.iter().zip(t).all(|(&x, &y)| same(x, y)) {
                    class_of[q] = classes;
                }
            }
            classes += 1;
        }
        let count = (lambda as u128).checked_pow(classes as u32).unwrap_or(u128::MAX);
        if count.saturating_add(out.len() as u128) > cap as u128 {
            return Err(Error::CapExceeded {
                what: "hypernetworks",
                size: count.saturating_add(out.len() as u128),
                cap: cap as u128,
            });
        }
        let mut choice = vec![0u32; classes];
        loop {
            let labels = shape
                .tuples
                .iter()
                .enumerate()
                .map(|(p, t)| if t.len() == 2 { pm[t[0] * m + t[1]] } else { choice[class_of[p]] })
                .collect();
            out.push(Hypernetwork { labels });
            let mut k = 0;
            while k < classes {
                choice[k] += 1;
                if (choice[k] as usize) < lambda {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == classes {
                break;
            }
        }
    }
    out.sort();
    Ok((shape, out))
}

fn pair_labellings(
    r: &RaAtomStructure,
    m: usize,
    at: usize,
    cur: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
    cap: usize,
) -> Result<()> {
    if at == m * m {
        out.push(cur.clone());
        if out.len() > cap {
            return Err(Error::CapExceeded { what: "hypernetworks", size: out.len() as u128, cap: cap as u128 });
        }
        return Ok(());
    }
    let (x, y) = (at / m, at % m);
    for a in 0..r.len() {
        if x == y && !r.is_identity(a) {
            continue;
        }
        cur[at] = a as u32;
        // all triangles whose cells are now assigned
        let ok = (0..m).all(|u| {
            (0..m).all(|v| {
                (0..m).all(|w| {
                    let (p, q, s) = (cur[u * m + w], cur[w * m + v], cur[u * m + v]);
                    let involved = [(u, w), (w, v), (u, v)].contains(&(x, y));
                    !involved || p == u32::MAX || q == u32::MAX || s == u32::MAX || r.is_cycle(p as usize, q as usize, s as usize)
                })
            })
        });
        if ok {
            pair_labellings(r, m, at + 1, cur, out, cap)?;
        }
    }
    cur[at] = u32::MAX;
    Ok(())
}

/// Which basis clause failed, with a concrete witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BasisFailure {
    pub condition: u8,
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BasisReport {
    pub holds: bool,
    pub checked_items: usize,
    pub failure: Option<BasisFailure>,
}

/// Basis and hyperbasis conditions over a labelled family, with the class
/// keys precomputed so that sub-families can be checked cheaply.
pub struct BasisChecker<'a> {
    r: &'a RaAtomStructure,
    shape: HyperShape,
    labels: Vec<Vec<u32>>,
    names: Vec<String>,
    /// `key_z[z][item]`: class id of the item under `==_z`.
    key_z: Vec<Vec<u32>>,
    /// `key_xy[(x, y)][item]` for `x < y`.
    key_xy: HashMap<(usize, usize), Vec<u32>>,
    /// `req[c]`: the pairs `(a, b)` with `c <= a;b`.
    req: Vec<Vec<(u32, u32)>>,
}

fn key_ids(shape: &HyperShape, labels: &[Vec<u32>], excluded: u64) -> Vec<u32> {
    let keep: Vec<usize> = (0..shape.len()).filter(|&p| shape.masks[p] & excluded == 0).collect();
    let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
    labels
        .iter()
        .map(|l| {
            let key: Vec<u32> = keep.iter().map(|&p| l[p]).collect();
            let next = ids.len() as u32;
            *ids.entry(key).or_insert(next)
        })
        .collect()
}

impl<'a> BasisChecker<'a> {
    pub fn for_matrices(r: &'a RaAtomStructure, n: usize, b: &[BasicMatrix]) -> Result<Self> {
        if let Some(m) = b.iter().find(|m| m.n != n) {
            return Err(Error::InvalidParameter(format!("matrix of size {} in a family of size {n}", m.n)));
        }
        let labels = b.iter().map(|m| m.entries.clone()).collect();
        let names = b.iter().map(|m| m.name(r)).collect();
        Ok(Self::build(r, HyperShape::pairs_only(n), labels, names))
    }

    pub fn for_hypernetworks(r: &'a RaAtomStructure, shape: &HyperShape, h: &[Hypernetwork]) -> Self {
        let labels = h.iter().map(|x| x.labels.clone()).collect();
        let names = (0..h.len()).map(|i| format!("N{i}")).collect();
        Self::build(r, shape.clone(), labels, names)
    }

    fn build(r: &'a RaAtomStructure, shape: HyperShape, labels: Vec<Vec<u32>>, names: Vec<String>) -> Self {
        let m = shape.m;
        let key_z = (0..m).map(|z| key_ids(&shape, &labels, 1 << z)).collect();
        let mut key_xy = HashMap::new();
        for x in 0..m {
            for y in x + 1..m {
                key_xy.insert((x, y), key_ids(&shape, &labels, (1 << x) | (1 << y)));
            }
        }
        let mut req = vec![Vec::new(); r.len()];
        for (a, b, c) in r.cycles() {
            req[c].push((a as u32, b as u32));
        }
        BasisChecker { r, shape, labels, names, key_z, key_xy, req }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    fn buckets(keys: &[u32], alive: &dyn Fn(usize) -> bool) -> Vec<Vec<usize>> {
        let count = keys.iter().map(|&k| k as usize + 1).max().unwrap_or(0);
        let mut out = vec![Vec::new(); count];
        for (item, &k) in keys.iter().enumerate() {
            if alive(item) {
                out[k as usize].push(item);
            }
        }
        out.retain(|b| !b.is_empty());
        out
    }

    pub fn check(&self) -> BasisReport {
        self.check_filtered(&|_| true)
    }

    /// The full check on the family with item `removed` deleted.
    pub fn check_without(&self, removed: usize) -> BasisReport {
        self.check_filtered(&|i| i != removed)
    }

    fn check_filtered(&self, alive: &dyn Fn(usize) -> bool) -> BasisReport {
        let checked_items = (0..self.len()).filter(|&i| alive(i)).count();
        let fail = |condition, witness| BasisReport { holds: false, checked_items, failure: Some(BasisFailure { condition, witness }) };
        let r = self.r;
        let m = self.shape.m;
        let p01 = self.shape.pair(0, 1);

        let mut seen = FixedBitSet::with_capacity(r.len());
        for i in (0..self.len()).filter(|&i| alive(i)) {
            seen.insert(self.labels[i][p01] as usize);
        }
        if let Some(a) = (0..r.len()).find(|&a| !seen.contains(a)) {
            return fail(1, format!("no member has entry (0,1) = {}", r.name(a)));
        }

        let len = r.len();
        for z in 0..m {
            for class in Self::buckets(&self.key_z[z], alive) {
                let rep = &self.labels[class[0]];
                for x in (0..m).filter(|&x| x != z) {
                    for y in (0..m).filter(|&y| y != z) {
                        let (pxz, pzy) = (self.shape.pair(x, z), self.shape.pair(z, y));
                        let mut present = FixedBitSet::with_capacity(len * len);
                        for &i in &class {
                            let l = &self.labels[i];
                            present.insert(l[pxz] as usize * len + l[pzy] as usize);
                        }
                        let c = rep[self.shape.pair(x, y)] as usize;
                        if let Some(&(a, b)) = self.req[c].iter().find(|&&(a, b)| !present.contains(a as usize * len + b as usize)) {
                            return fail(
                                2,
                                format!(
                                    "{} with (x,y,z)=({x},{y},{z}): {} <= {};{} but no ={z} witness",
                                    self.names[class[0]],
                                    r.name(c),
                                    r.name(a as usize),
                                    r.name(b as usize)
                                ),
                            );
                        }
                    }
                }
            }
        }

        for x in 0..m {
            for y in x + 1..m {
                let kx = &self.key_z[x];
                let ky = &self.key_z[y];
                for group in Self::buckets(&self.key_xy[&(x, y)], alive) {
                    let mut pairs: Vec<(u32, u32)> = group.iter().map(|&i| (kx[i], ky[i])).collect();
                    pairs.sort_unstable();
                    pairs.dedup();
                    let mut xs: Vec<u32> = pairs.iter().map(|p| p.0).collect();
                    let mut ys: Vec<u32> = pairs.iter().map(|p| p.1).collect();
                    xs.sort_unstable();
                    xs.dedup();
                    ys.sort_unstable();
                    ys.dedup();
                    if pairs.len() == xs.len() * ys.len() {
                        continue;
                    }
                    for &a in &xs {
                        for &b in &ys {
                            if pairs.binary_search(&(a, b)).is_err() {
                                let mm = group.iter().find(|&&i| kx[i] == a).unwrap();
                                let nn = group.iter().find(|&&i| ky[i] == b).unwrap();
                                return fail(
                                    3,
                                    format!(
                                        "{} ={x}{y} {} but no L with M ={x} L ={y} N",
                                        self.names[*mm], self.names[*nn]
                                    ),
                                );
                            }
                        }
                    }
                }
            }
        }
        BasisReport { holds: true, checked_items, failure: None }
    }

    /// Items that are the only witness in their `==_z` class for some
    /// required `(a, b)`; deleting any of them must break clause (ii).
    pub fn unique_witnesses(&self) -> Vec<usize> {
        let m = self.shape.m;
        let len = self.r.len();
        let mut out = FixedBitSet::with_capacity(self.len());
        for z in 0..m {
            for class in Self::buckets(&self.key_z[z], &|_| true) {
                let rep = &self.labels[class[0]];
                for x in (0..m).filter(|&x| x != z) {
                    for y in (0..m).filter(|&y| y != z) {
                        let (pxz, pzy) = (self.shape.pair(x, z), self.shape.pair(z, y));
                        let c = rep[self.shape.pair(x, y)] as usize;
                        let mut count: HashMap<usize, (usize, usize)> = HashMap::new();
                        for &i in &class {
                            let l = &self.labels[i];
                            let e = count.entry(l[pxz] as usize * len + l[pzy] as usize).or_insert((0, i));
                            e.0 += 1;
                        }
                        for (key, (k, item)) in count {
                            if k == 1 && self.r.is_cycle(key / len, key % len, c) {
                                out.insert(item);
                            }
                        }
                    }
                }
            }
        }
        out.ones().collect()
    }

    fn partitions(&self) -> Vec<Accessibility> {
        (0..self.shape.m).map(|i| Accessibility::partition(&self.key_z[i])).collect()
    }

    fn diagonals(&self) -> Vec<FixedBitSet> {
        let m = self.shape.m;
        let mut out = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                let p = self.shape.pair(i, j);
                let mut e = FixedBitSet::with_capacity(self.len());
                for (k, l) in self.labels.iter().enumerate() {
                    if self.r.is_identity(l[p] as usize) {
                        e.insert(k);
                    }
                }
                out.push(e);
            }
        }
        out
    }
}

pub fn is_cylindric_basis(r: &RaAtomStructure, n: usize, b: &[BasicMatrix]) -> Result<BasisReport> {
    Ok(BasisChecker::for_matrices(r, n, b)?.check())
}

pub fn is_hyperbasis(r: &RaAtomStructure, shape: &HyperShape, h: &[Hypernetwork]) -> BasisReport {
    BasisChecker::for_hypernetworks(r, shape, h).check()
}

fn transposition(m: usize, i: usize, j: usize) -> Vec<usize> {
    (0..m).map(|x| if x == i { j } else if x == j { i } else { x }).collect()
}

/// Cylindric atom structure on a cylindric basis; substitutions are added
/// when the family is closed under transposing indices.
pub fn ca_from_matrices(r: &RaAtomStructure, n: usize, b: &[BasicMatrix]) -> Result<CaAtomStructure> {
    let checker = BasisChecker::for_matrices(r, n, b)?;
    let report = checker.check();
    if let Some(f) = report.failure {
        return Err(Error::Invalid(format!("not a cylindric basis: clause ({}) {}", f.condition, f.witness)));
    }
    let index: HashMap<&BasicMatrix, usize> = b.iter().enumerate().map(|(k, m)| (m, k)).collect();
    let mut maps = Vec::with_capacity(n * n);
    let mut closed = true;
    'outer: for i in 0..n {
        for j in 0..n {
            let sigma = transposition(n, i, j);
            let mut map = Vec::with_capacity(b.len());
            for m in b {
                match index.get(&m.compose_map(&sigma)) {
                    Some(&k) => map.push(k as u32),
                    None => {
                        closed = false;
                        break 'outer;
                    }
                }
            }
            maps.push(map);
        }
    }
    let names = b.iter().map(|m| m.name(r)).collect();
    CaAtomStructure::new(n, names, checker.partitions(), checker.diagonals(), closed.then_some(maps))
}

/// Polyadic-equality atom structure on a symmetric hyperbasis.
pub fn pea_from_hyperbasis(r: &RaAtomStructure, shape: &HyperShape, h: &[Hypernetwork]) -> Result<CaAtomStructure> {
    let m = shape.m;
    let index: HashMap<&Hypernetwork, usize> = h.iter().enumerate().map(|(k, x)| (x, k)).collect();
    // symmetric: closed under N o sigma for every sigma: m -> m
    let total = (m as u128).pow(m as u32);
    for code in 0..total {
        let mut sigma = Vec::with_capacity(m);
        let mut c = code;
        for _ in 0..m {
            sigma.push((c % m as u128) as usize);
            c /= m as u128;
        }
        if let Some(k) = h.iter().position(|x| !index.contains_key(&x.compose_map(shape, &sigma))) {
            return Err(Error::Precondition(format!("family is not symmetric: N{k} o {sigma:?} is missing")));
        }
    }
    let checker = BasisChecker::for_hypernetworks(r, shape, h);
    let report = checker.check();
    if let Some(f) = report.failure {
        return Err(Error::Invalid(format!("not a hyperbasis: clause ({}) {}", f.condition, f.witness)));
    }
    let mut maps = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let sigma = transposition(m, i, j);
            maps.push(h.iter().map(|x| index[&x.compose_map(shape, &sigma)] as u32).collect());
        }
    }
    let names = (0..h.len()).map(|i| format!("N{i}")).collect();
    CaAtomStructure::new(m, names, checker.partitions(), checker.diagonals(), Some(maps))
}
