use std::collections::{HashMap, HashSet, VecDeque};
use std::hash::{DefaultHasher, Hash, Hasher};

use fixedbitset::FixedBitSet;

use super::report::{ValidationReport, Violation};
use super::CmElement;
use crate::error::{Error, Result};

/// The accessibility relation `T_i` of one cylindrifier.
///
/// Every construction in this crate produces equivalences, stored as a class id
/// per atom. Arbitrary relations are kept for input that has not been checked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Accessibility {
    /// Class id per atom, normalised to first-occurrence order.
    Partition(Vec<u32>),
    /// Sorted successor list per atom.
    Relation(Vec<Vec<u32>>),
}

impl Accessibility {
    pub fn partition(ids: &[u32]) -> Self {
        let mut remap = HashMap::new();
        let norm = ids
            .iter()
            .map(|id| {
                let next = remap.len() as u32;
                *remap.entry(*id).or_insert(next)
            })
            .collect();
        Accessibility::Partition(norm)
    }

    /// Partition from any hashable per-atom key.
    pub fn from_keys<K: Hash + Eq>(keys: impl IntoIterator<Item = K>) -> Self {
        let mut remap: HashMap<K, u32> = HashMap::new();
        let ids = keys
            .into_iter()
            .map(|k| {
                let next = remap.len() as u32;
                *remap.entry(k).or_insert(next)
            })
            .collect();
        Accessibility::Partition(ids)
    }

    pub fn relation(len: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut rows = vec![Vec::new(); len];
        for (a, b) in pairs {
            rows[a].push(b as u32);
        }
        for r in &mut rows {
            r.sort_unstable();
            r.dedup();
        }
        Accessibility::Relation(rows)
    }

    pub fn len(&self) -> usize {
        match self {
            Accessibility::Partition(ids) => ids.len(),
            Accessibility::Relation(rows) => rows.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        match self {
            Accessibility::Partition(ids) => ids[a] == ids[b],
            Accessibility::Relation(rows) => rows[a].binary_search(&(b as u32)).is_ok(),
        }
    }

    /// `{a : exists b in x, a T b}`.
    pub fn saturate(&self, x: &FixedBitSet) -> FixedBitSet {
        let n = self.len();
        let mut out = FixedBitSet::with_capacity(n);
        match self {
            Accessibility::Partition(ids) => {
                let mut hit = HashSet::new();
                for b in x.ones() {
                    hit.insert(ids[b]);
                }
                for a in 0..n {
                    if hit.contains(&ids[a]) {
                        out.insert(a);
                    }
                }
            }
            Accessibility::Relation(rows) => {
                for (a, row) in rows.iter().enumerate() {
                    if row.iter().any(|&b| x.contains(b as usize)) {
                        out.insert(a);
                    }
                }
            }
        }
        out
    }

    /// The class of `a`, or its successor set for a general relation.
    pub fn class_of(&self, a: usize) -> Vec<usize> {
        match self {
            Accessibility::Partition(ids) => {
                (0..ids.len()).filter(|&b| ids[b] == ids[a]).collect()
            }
            Accessibility::Relation(rows) => rows[a].iter().map(|&b| b as usize).collect(),
        }
    }

    /// Class ids when the relation is an equivalence.
    pub fn class_ids(&self) -> Option<Vec<u32>> {
        match self {
            Accessibility::Partition(ids) => Some(ids.clone()),
            Accessibility::Relation(rows) => {
                if equivalence_failures(rows, 0, |_| String::new()).is_empty() {
                    Some(
                        rows.iter()
                            .map(|r| r.first().copied().unwrap_or(u32::MAX))
                            .collect(),
                    )
                } else {
                    None
                }
            }
        }
    }

    /// All related pairs, sorted.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        match self {
            Accessibility::Partition(ids) => {
                let mut classes: HashMap<u32, Vec<usize>> = HashMap::new();
                for (a, &c) in ids.iter().enumerate() {
                    classes.entry(c).or_default().push(a);
                }
                let mut out = Vec::new();
                for a in 0..ids.len() {
                    for &b in &classes[&ids[a]] {
                        out.push((a, b));
                    }
                }
                out
            }
            Accessibility::Relation(rows) => rows
                .iter()
                .enumerate()
                .flat_map(|(a, r)| r.iter().map(move |&b| (a, b as usize)))
                .collect(),
        }
    }
}

/// Finite `n`-dimensional cylindric atom structure, optionally with the
/// transposition substitutions `p_ij` of the polyadic-equality signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaAtomStructure {
    dimension: usize,
    names: Vec<String>,
    ti: Vec<Accessibility>,
    eij: Vec<FixedBitSet>,
    pij: Option<Vec<Vec<u32>>>,
    fingerprint: u64,
}

impl CaAtomStructure {
    pub fn new(
        dimension: usize,
        names: Vec<String>,
        ti: Vec<Accessibility>,
        eij: Vec<FixedBitSet>,
        pij: Option<Vec<Vec<u32>>>,
    ) -> Result<Self> {
        let len = names.len();
        if dimension == 0 {
            return Err(Error::Malformed("dimension must be positive".into()));
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateAtom(name.clone()));
            }
        }
        if ti.len() != dimension {
            return Err(Error::Malformed(format!("{} t_i relations for dimension {dimension}", ti.len())));
        }
        for t in &ti {
            if t.len() != len {
                return Err(Error::Malformed("t_i relation over the wrong atom count".into()));
            }
            if let Accessibility::Relation(rows) = t {
                for &b in rows.iter().flatten() {
                    if b as usize >= len {
                        return Err(Error::AtomOutOfRange { index: b as usize, len });
                    }
                }
            }
        }
        if eij.len() != dimension * dimension || eij.iter().any(|e| e.len() != len) {
            return Err(Error::Malformed("diagonal table has the wrong shape".into()));
        }
        if let Some(maps) = &pij {
            if maps.len() != dimension * dimension {
                return Err(Error::Malformed("substitution table has the wrong shape".into()));
            }
            for m in maps {
                if m.len() != len {
                    return Err(Error::Malformed("substitution map over the wrong atom count".into()));
                }
                if let Some(&b) = m.iter().find(|&&b| b as usize >= len) {
                    return Err(Error::AtomOutOfRange { index: b as usize, len });
                }
            }
        }
        let mut h = DefaultHasher::new();
        dimension.hash(&mut h);
        names.hash(&mut h);
        for t in &ti {
            t.hash_into(&mut h);
        }
        for e in &eij {
            e.as_slice().hash(&mut h);
        }
        pij.hash(&mut h);
        let fingerprint = h.finish();
        Ok(CaAtomStructure { dimension, names, ti, eij, pij, fingerprint })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn ti(&self, i: usize) -> &Accessibility {
        &self.ti[i]
    }

    pub fn eij(&self, i: usize, j: usize) -> &FixedBitSet {
        &self.eij[i * self.dimension + j]
    }

    pub fn in_diagonal(&self, a: usize, i: usize, j: usize) -> bool {
        self.eij(i, j).contains(a)
    }

    pub fn pij(&self, i: usize, j: usize) -> Option<&[u32]> {
        self.pij.as_ref().map(|m| m[i * self.dimension + j].as_slice())
    }

    pub fn has_substitutions(&self) -> bool {
        self.pij.is_some()
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn element<I: IntoIterator<Item = usize>>(&self, atoms: I) -> CmElement {
        CmElement::from_atoms(self.fingerprint, self.len(), atoms)
    }

    pub fn empty_element(&self) -> CmElement {
        CmElement::empty(self.fingerprint, self.len())
    }

    pub fn top(&self) -> CmElement {
        self.element(0..self.len())
    }

    /// Copy with `t_i` replaced; used to build negative controls.
    pub fn with_ti(&self, i: usize, t: Accessibility) -> Result<Self> {
        let mut ti = self.ti.clone();
        ti[i] = t;
        CaAtomStructure::new(self.dimension, self.names.clone(), ti, self.eij.clone(), self.pij.clone())
    }

    /// Copy with `e_ij` replaced.
    pub fn with_eij(&self, i: usize, j: usize, e: FixedBitSet) -> Result<Self> {
        let mut eij = self.eij.clone();
        eij[i * self.dimension + j] = e;
        CaAtomStructure::new(self.dimension, self.names.clone(), self.ti.clone(), eij, self.pij.clone())
    }
}

impl Accessibility {
    fn hash_into(&self, h: &mut DefaultHasher) {
        match self {
            Accessibility::Partition(ids) => {
                0u8.hash(h);
                ids.hash(h);
            }
            Accessibility::Relation(rows) => {
                1u8.hash(h);
                rows.hash(h);
            }
        }
    }
}

/// `c_i X`: the `T_i`-saturation of `X`.
pub fn cm_cylindrify(c: &CaAtomStructure, i: usize, x: &CmElement) -> Result<CmElement> {
    if i >= c.dimension {
        return Err(Error::IndexOutOfRange { index: i, dimension: c.dimension });
    }
    x.check_owner(c.fingerprint, c.len())?;
    Ok(CmElement::from_bits(c.fingerprint, c.ti[i].saturate(x.bits())))
}

fn equivalence_failures(
    rows: &[Vec<u32>],
    index: usize,
    name: impl Fn(usize) -> String,
) -> Vec<Violation> {
    let mut out = Vec::new();
    for (a, row) in rows.iter().enumerate() {
        if row.binary_search(&(a as u32)).is_err() {
            out.push(Violation::NotEquivalence { index, property: "reflexive", atoms: vec![name(a)] });
        }
        for &b in row {
            let rb = &rows[b as usize];
            if rb.binary_search(&(a as u32)).is_err() {
                out.push(Violation::NotEquivalence {
                    index,
                    property: "symmetric",
                    atoms: vec![name(a), name(b as usize)],
                });
            }
            if let Some(&c) = rb.iter().find(|c| row.binary_search(c).is_err()) {
                out.push(Violation::NotEquivalence {
                    index,
                    property: "transitive",
                    atoms: vec![name(a), name(b as usize), name(c as usize)],
                });
            }
        }
    }
    out
}

/// Exhaustive check of the cylindric (and, when substitutions are present,
/// polyadic-equality) correspondents on atoms.
pub fn ca_validate(c: &CaAtomStructure) -> ValidationReport {
    let n = c.dimension;
    let len = c.len();
    let name = |a: usize| c.names[a].clone();
    let mut report = ValidationReport::default();

    let mut classes: Vec<Option<Vec<u32>>> = Vec::with_capacity(n);
    for (i, t) in c.ti.iter().enumerate() {
        match t {
            Accessibility::Partition(ids) => classes.push(Some(ids.clone())),
            Accessibility::Relation(rows) => {
                let fails = equivalence_failures(rows, i, name);
                if fails.is_empty() {
                    classes.push(t.class_ids());
                } else {
                    for v in fails {
                        report.push(v);
                    }
                    classes.push(None);
                }
            }
        }
    }

    for i in 0..n {
        for j in i + 1..n {
            let witness = match (&classes[i], &classes[j]) {
                (Some(p), Some(q)) => commute_witness_partitions(p, q),
                _ => commute_witness_relations(&c.ti[i], &c.ti[j], len),
            };
            if let Some((a, b)) = witness {
                report.push(Violation::NotCommuting { i, j, pair: [name(a), name(b)] });
            }
        }
    }

    for i in 0..n {
        for a in 0..len {
            if !c.in_diagonal(a, i, i) {
                report.push(Violation::DiagonalNotFull { i, atom: name(a) });
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let diff = c.eij(i, j).symmetric_difference(c.eij(j, i)).next();
            if let Some(a) = diff {
                report.push(Violation::DiagonalSymmetry { i, j, atom: name(a) });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let sat = c.ti[i].saturate(c.eij(i, j));
            for a in 0..len {
                if !sat.contains(a) {
                    report.push(Violation::DiagonalWitness { i, j, atom: name(a) });
                }
            }
            // Each T_i-class meets E_ij at most once.
            match &classes[i] {
                Some(ids) => {
                    let mut first: HashMap<u32, usize> = HashMap::new();
                    for a in c.eij(i, j).ones() {
                        if let Some(&b) = first.get(&ids[a]) {
                            report.push(Violation::SubstitutionUnique { i, j, atoms: [name(b), name(a)] });
                        } else {
                            first.insert(ids[a], a);
                        }
                    }
                }
                None => {
                    for a in 0..len {
                        let hits: Vec<usize> =
                            c.ti[i].class_of(a).into_iter().filter(|&b| c.in_diagonal(b, i, j)).collect();
                        if hits.len() > 1 {
                            report.push(Violation::SubstitutionUnique { i, j, atoms: [name(hits[0]), name(hits[1])] });
                        }
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i == j || i == k {
                    continue;
                }
                let mut meet = c.eij(j, i).clone();
                meet.intersect_with(c.eij(i, k));
                let rhs = c.ti[i].saturate(&meet);
                if let Some(a) = rhs.symmetric_difference(c.eij(j, k)).next() {
                    report.push(Violation::DiagonalCorrespondent { i, j, k, atom: name(a) });
                }
            }
        }
    }

    if let Some(maps) = &c.pij {
        check_substitutions(c, maps, &classes, &mut report);
    }
    report
}

fn check_substitutions(
    c: &CaAtomStructure,
    maps: &[Vec<u32>],
    classes: &[Option<Vec<u32>>],
    report: &mut ValidationReport,
) {
    let n = c.dimension;
    let len = c.len();
    for i in 0..n {
        let p = &maps[i * n + i];
        if let Some(a) = (0..len).find(|&a| p[a] as usize != a) {
            report.push(Violation::Substitution { i, j: i, detail: format!("not the identity at {}", c.names[a]) });
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let p = &maps[i * n + j];
            if p != &maps[j * n + i] {
                report.push(Violation::Substitution { i, j, detail: "p_ij != p_ji".into() });
            }
            if let Some(a) = (0..len).find(|&a| p[p[a] as usize] as usize != a) {
                report.push(Violation::Substitution { i, j, detail: format!("not an involution at {}", c.names[a]) });
            }
            let sigma = |k: usize| if k == i { j } else if k == j { i } else { k };
            for k in 0..n {
                for l in 0..n {
                    let src = c.eij(k, l);
                    let dst = c.eij(sigma(k), sigma(l));
                    if let Some(a) = (0..len).find(|&a| src.contains(a) != dst.contains(p[a] as usize)) {
                        report.push(Violation::Substitution {
                            i,
                            j,
                            detail: format!(
                                "e{k}{l} not carried onto e{}{} at {}",
                                sigma(k),
                                sigma(l),
                                c.names[a]
                            ),
                        });
                    }
                }
            }
            for k in 0..n {
                let target = sigma(k);
                let ok = match (&classes[k], &classes[target]) {
                    (Some(src), Some(dst)) => {
                        let mut image: HashMap<u32, u32> = HashMap::new();
                        let mut bad = None;
                        for a in 0..len {
                            let want = dst[p[a] as usize];
                            match image.insert(src[a], want) {
                                Some(prev) if prev != want => {
                                    bad = Some(a);
                                    break;
                                }
                                _ => {}
                            }
                        }
                        bad
                    }
                    _ => c.ti[k]
                        .pairs()
                        .into_iter()
                        .find(|&(a, b)| !c.ti[target].related(p[a] as usize, p[b] as usize))
                        .map(|(a, _)| a),
                };
                if let Some(a) = ok {
                    report.push(Violation::Substitution {
                        i,
                        j,
                        detail: format!("t{k} not carried onto t{target} at {}", c.names[a]),
                    });
                }
            }
        }
    }
}

/// For equivalences with class ids `p` (T_i) and `q` (T_j): returns a pair in
/// `T_j . T_i` but not in `T_i . T_j` when they fail to commute.
fn commute_witness_partitions(p: &[u32], q: &[u32]) -> Option<(usize, usize)> {
    let mut rep: HashMap<(u32, u32), usize> = HashMap::new();
    let mut p_adj: HashMap<u32, Vec<u32>> = HashMap::new();
    let mut q_adj: HashMap<u32, Vec<u32>> = HashMap::new();
    for a in 0..p.len() {
        if let std::collections::hash_map::Entry::Vacant(e) = rep.entry((p[a], q[a])) {
            e.insert(a);
            p_adj.entry(p[a]).or_default().push(q[a]);
            q_adj.entry(q[a]).or_default().push(p[a]);
        }
    }
    // Components of the class-intersection graph must be complete bipartite.
    let mut seen_p: HashSet<u32> = HashSet::new();
    let mut p_keys: Vec<u32> = p_adj.keys().copied().collect();
    p_keys.sort_unstable();
    for &start in &p_keys {
        if seen_p.contains(&start) {
            continue;
        }
        let mut comp_p = Vec::new();
        let mut comp_q: HashSet<u32> = HashSet::new();
        let mut queue = VecDeque::from([start]);
        seen_p.insert(start);
        while let Some(pc) = queue.pop_front() {
            comp_p.push(pc);
            for &qc in &p_adj[&pc] {
                if comp_q.insert(qc) {
                    for &pn in &q_adj[&qc] {
                        if seen_p.insert(pn) {
                            queue.push_back(pn);
                        }
                    }
                }
            }
        }
        let edges: usize = comp_p.iter().map(|pc| p_adj[pc].len()).sum();
        if edges == comp_p.len() * comp_q.len() {
            continue;
        }
        for &p0 in &comp_p {
            let near: HashSet<u32> = p_adj[&p0].iter().copied().collect();
            for &q1 in &p_adj[&p0] {
                for &p1 in &q_adj[&q1] {
                    for &q2 in &p_adj[&p1] {
                        if !near.contains(&q2) {
                            return Some((rep[&(p0, q1)], rep[&(p1, q2)]));
                        }
                    }
                }
            }
        }
    }
    None
}

fn commute_witness_relations(ti: &Accessibility, tj: &Accessibility, len: usize) -> Option<(usize, usize)> {
    let rows = |t: &Accessibility| -> Vec<FixedBitSet> {
        (0..len)
            .map(|a| {
                let mut s = FixedBitSet::with_capacity(len);
                for b in t.class_of(a) {
                    s.insert(b);
                }
                s
            })
            .collect()
    };
    let ri = rows(ti);
    let rj = rows(tj);
    let compose = |x: &[FixedBitSet], y: &[FixedBitSet], a: usize| {
        let mut s = FixedBitSet::with_capacity(len);
        for b in x[a].ones() {
            s.union_with(&y[b]);
        }
        s
    };
    for a in 0..len {
        let ij = compose(&ri, &rj, a);
        let ji = compose(&rj, &ri, a);
        if let Some(b) = ij.symmetric_difference(&ji).next() {
            return Some((a, b));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dimension-2 structure on a p x p grid: T_0 keeps the column, T_1 the row,
    /// E_01 is the main diagonal.
    fn grid(p: usize) -> CaAtomStructure {
        let len = p * p;
        let names = (0..len).map(|a| format!("g{}_{}", a / p, a % p)).collect();
        let t0 = Accessibility::from_keys((0..len).map(|a| a % p));
        let t1 = Accessibility::from_keys((0..len).map(|a| a / p));
        let mut full = FixedBitSet::with_capacity(len);
        full.insert_range(..);
        let mut diag = FixedBitSet::with_capacity(len);
        for r in 0..p {
            diag.insert(r * p + r);
        }
        CaAtomStructure::new(2, names, vec![t0, t1], vec![full.clone(), diag.clone(), diag, full], None).unwrap()
    }

    #[test]
    fn grid_is_valid() {
        let report = ca_validate(&grid(3));
        assert!(report.is_valid(), "{:?}", report.violations);
    }

    #[test]
    fn non_transitive_t0_is_flagged() {
        let c = grid(2);
        let bad = Accessibility::relation(4, [(0, 0), (1, 1), (2, 2), (3, 3), (0, 1), (1, 0), (1, 2), (2, 1)]);
        let c = c.with_ti(0, bad).unwrap();
        let report = ca_validate(&c);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NotEquivalence { property: "transitive", .. })));
    }

    #[test]
    fn partial_e00_is_flagged() {
        let c = grid(2);
        let mut e = FixedBitSet::with_capacity(4);
        e.insert(0);
        let c = c.with_eij(0, 0, e).unwrap();
        let report = ca_validate(&c);
        assert!(report.violations.iter().any(|v| matches!(v, Violation::DiagonalNotFull { .. })));
    }

    #[test]
    fn non_commuting_partitions_give_a_witness() {
        // T_0 = {0,1}{2}, T_1 = {0}{1,2}: t0.t1 relates 0 to 2, t1.t0 does not.
        let p = [0, 0, 1];
        let q = [0, 1, 1];
        let (a, b) = commute_witness_partitions(&p, &q).expect("must not commute");
        let ti = Accessibility::Partition(p.to_vec());
        let tj = Accessibility::Partition(q.to_vec());
        let rel = commute_witness_relations(&ti, &tj, 3);
        assert!(rel.is_some());
        // The witness is in t_j.t_i but not in t_i.t_j.
        let in_ji = (0..3).any(|m| tj.related(a, m) && ti.related(m, b));
        let in_ij = (0..3).any(|m| ti.related(a, m) && tj.related(m, b));
        assert!(in_ji && !in_ij);
    }

    #[test]
    fn cylindrify_class_and_errors() {
        let c = grid(3);
        let x = c.element([4]);
        let got = cm_cylindrify(&c, 0, &x).unwrap();
        assert_eq!(got.atoms().collect::<Vec<_>>(), vec![1, 4, 7]);
        assert!(cm_cylindrify(&c, 0, &c.empty_element()).unwrap().is_empty());
        assert_eq!(cm_cylindrify(&c, 1, &c.top()).unwrap(), c.top());
        assert!(matches!(
            cm_cylindrify(&c, 2, &x),
            Err(Error::IndexOutOfRange { index: 2, dimension: 2 })
        ));
    }
}
