//! Monk-style relation algebra atom structures: graph algebras, Maddux's
//! `A(n, r)`, and the blow-up-and-blur frame.

use std::collections::BTreeSet;

use crate::algebra::{close_peircean, embed_ra_by_copies, EmbeddingReport, RaAtomStructure};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// `alpha(G)` with `n` colours. Atom `0` is `1'`; atom `1 + v*n + i` is `(v, i)`.
pub fn alpha_of_graph(g: &Graph, n: usize) -> Result<RaAtomStructure> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("need at least 3 colours, got {n}")));
    }
    let v = g.vertex_count();
    if v == 0 {
        return Err(Error::InvalidParameter("graph has no vertices".into()));
    }
    let len = 1 + v * n;
    let mut names = vec!["1'".to_string()];
    for vert in 0..v {
        for i in 0..n {
            names.push(format!("({vert},{i})"));
        }
    }
    let split = |a: usize| ((a - 1) / n, (a - 1) % n);
    let consistent = |a: usize, b: usize, c: usize| -> bool {
        match (a, b, c) {
            // one of them is 1' and the other two are equal
            (0, x, y) | (x, 0, y) | (x, y, 0) => return x == y,
            _ => {}
        }
        let (pa, pb, pc) = (split(a), split(b), split(c));
        if pa.1 != pb.1 || pb.1 != pc.1 {
            return true;
        }
        g.has_edge(pa.0, pb.0) || g.has_edge(pb.0, pc.0) || g.has_edge(pa.0, pc.0)
    };
    let mut cycles = Vec::new();
    for a in 0..len {
        for b in 0..len {
            for c in 0..len {
                if consistent(a, b, c) {
                    cycles.push((a, b, c));
                }
            }
        }
    }
    let converse: Vec<usize> = (0..len).collect();
    let closed = close_peircean(cycles, &converse);
    RaAtomStructure::new(names, [0], converse, closed)
}

/// Maddux's `A(n, r)` with `psi` copies of each non-identity colour.
/// Atom `0` is `id`; `a^k(i,j)` sits at `1 + (i*r + j)*psi + k`.
pub fn maddux_a(n: usize, r: usize, psi: usize) -> Result<RaAtomStructure> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("n must be at least 3, got {n}")));
    }
    if n > psi || r > psi {
        return Err(Error::InvalidParameter(format!("need n, r <= psi, got n={n} r={r} psi={psi}")));
    }
    let len = 1 + (n - 1) * r * psi;
    let mut names = vec!["id".to_string()];
    for i in 0..n - 1 {
        for j in 0..r {
            for k in 0..psi {
                names.push(format!("a{k}({i},{j})"));
            }
        }
    }
    let decode = |a: usize| {
        let x = a - 1;
        (x / (r * psi), (x / psi) % r)
    };
    let consistent = |a: usize, b: usize, c: usize| -> bool {
        match (a, b, c) {
            (0, x, y) | (x, 0, y) | (x, y, 0) => x == y,
            _ => {
                let (ia, ja) = decode(a);
                let (ib, jb) = decode(b);
                let (ic, jc) = decode(c);
                if ia != ib || ib != ic {
                    return true;
                }
                let mut js = [ja, jb, jc];
                js.sort_unstable();
                // two share j and the third has j' >= j
                js[0] != js[1]
            }
        }
    };
    let mut cycles = Vec::new();
    for a in 0..len {
        for b in 0..len {
            for c in 0..len {
                if consistent(a, b, c) {
                    cycles.push((a, b, c));
                }
            }
        }
    }
    RaAtomStructure::new(names, [0], (0..len).collect(), cycles)
}

/// Consistency rule for a blown-up structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlowUpRule {
    /// A triple is consistent iff its base triple is; copies and blurs are
    /// ignored except that identity triples need an exact match.
    CopyAgnostic,
    /// `red[a] = Some((i, j))` marks base atom `a` as the red `r_ij`. Three reds
    /// are consistent iff `(r_ij, r_j'k', r_i*k*)` has `i = i*, j = j', k' = k*`;
    /// every other triple follows [`BlowUpRule::CopyAgnostic`].
    RedIndexMatch { red: Vec<Option<(usize, usize)>> },
}

impl BlowUpRule {
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "copy-agnostic" | "COPY_AGNOSTIC" => Ok(BlowUpRule::CopyAgnostic),
            _ => Err(Error::UnknownRule(name.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlurSchema {
    pub copies: usize,
    /// Blur labels; empty means the unit blur.
    pub blurs: Vec<String>,
    pub rule: BlowUpRule,
}

impl BlurSchema {
    pub fn new(copies: usize, blurs: Vec<String>, rule: BlowUpRule) -> Result<Self> {
        if copies == 0 {
            return Err(Error::InvalidParameter("copy count must be at least 1".into()));
        }
        Ok(BlurSchema { copies, blurs, rule })
    }
}

/// The blur family `J = {(X, t) : X a subset of I with |X| = l, t < mu}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FLMuSchema {
    pub i_atoms: Vec<usize>,
    pub l: usize,
    pub mu: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Blur {
    pub atoms: Vec<usize>,
    pub tag: usize,
}

impl FLMuSchema {
    pub fn new(i_atoms: Vec<usize>, l: usize, mu: usize) -> Result<Self> {
        if l < 2 {
            return Err(Error::InvalidParameter(format!("l must be at least 2, got {l}")));
        }
        if mu == 0 {
            return Err(Error::InvalidParameter("mu must be nonzero".into()));
        }
        if i_atoms.len() < 3 * l {
            return Err(Error::InvalidParameter(format!("|I| = {} < 3l = {}", i_atoms.len(), 3 * l)));
        }
        Ok(FLMuSchema { i_atoms, l, mu })
    }

    pub fn blurs(&self) -> Vec<Blur> {
        let mut out = Vec::new();
        for x in subsets(&self.i_atoms, self.l) {
            for tag in 0..self.mu {
                out.push(Blur { atoms: x.clone(), tag });
            }
        }
        out
    }

    pub fn blur_names(&self) -> Vec<String> {
        self.blurs()
            .iter()
            .map(|b| {
                let xs: Vec<String> = b.atoms.iter().map(|a| a.to_string()).collect();
                format!("{{{}}}:{}", xs.join(","), b.tag)
            })
            .collect()
    }
}

fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut with: Vec<Vec<usize>> = subsets(&items[1..], k - 1)
        .into_iter()
        .map(|mut s| {
            s.insert(0, items[0]);
            s
        })
        .collect();
    with.extend(subsets(&items[1..], k));
    with
}

/// `(forall V_2..V_n, W_2..W_n in J)(exists T in J)(forall i)(forall a in V_i,
/// b in W_i, c in T) a <= b;c`, decided by brute force.
pub fn blurs_adequate(r: &RaAtomStructure, blurs: &[Vec<usize>], n: usize) -> bool {
    let good = good_pairs(r, blurs);
    let pairs = blurs.len() * blurs.len();
    let width = n.saturating_sub(1);
    let mut tuple = vec![0usize; width];
    loop {
        if !good.iter().any(|g| tuple.iter().all(|&p| g[p])) {
            return false;
        }
        let mut k = 0;
        while k < width {
            tuple[k] += 1;
            if tuple[k] < pairs {
                break;
            }
            tuple[k] = 0;
            k += 1;
        }
        if k == width {
            return true;
        }
    }
}

/// As [`blurs_adequate`] with the existential over `T` made universal.
pub fn blurs_strongly_adequate(r: &RaAtomStructure, blurs: &[Vec<usize>]) -> bool {
    good_pairs(r, blurs).iter().all(|g| g.iter().all(|&x| x))
}

/// `good[t][v * |J| + w]`: every `a in V, b in W, c in T` has `a <= b;c`.
fn good_pairs(r: &RaAtomStructure, blurs: &[Vec<usize>]) -> Vec<Vec<bool>> {
    blurs
        .iter()
        .map(|t| {
            let mut row = Vec::with_capacity(blurs.len() * blurs.len());
            for v in blurs {
                for w in blurs {
                    row.push(v.iter().all(|&a| w.iter().all(|&b| t.iter().all(|&c| r.is_cycle(b, c, a)))));
                }
            }
            row
        })
        .collect()
}

/// A blown-up structure together with its provenance.
#[derive(Debug, Clone)]
pub struct BlownUp {
    pub structure: RaAtomStructure,
    pub base_of: Vec<usize>,
    pub copy_of: Vec<usize>,
    pub blur_of: Vec<usize>,
    pub base_fingerprint: u64,
}

pub fn blow_up(base: &RaAtomStructure, schema: &BlurSchema) -> Result<BlownUp> {
    if schema.copies == 0 {
        return Err(Error::InvalidParameter("copy count must be at least 1".into()));
    }
    if let BlowUpRule::RedIndexMatch { red } = &schema.rule {
        if red.len() != base.len() {
            return Err(Error::InvalidParameter("red index map must cover every base atom".into()));
        }
        if let Some(e) = base.identity_atoms().find(|&e| red[e].is_some()) {
            return Err(Error::InvalidParameter(format!("identity atom {} marked red", base.name(e))));
        }
    }
    let unit = schema.blurs.is_empty();
    let blur_count = schema.blurs.len().max(1);
    let mut names = Vec::new();
    let (mut base_of, mut copy_of, mut blur_of) = (Vec::new(), Vec::new(), Vec::new());
    // slot[a] = first blown index of base atom a
    let mut slot = vec![0usize; base.len()];
    for a in 0..base.len() {
        slot[a] = names.len();
        if base.is_identity(a) {
            names.push(base.name(a).to_string());
            base_of.push(a);
            copy_of.push(0);
            blur_of.push(0);
            continue;
        }
        for l in 0..schema.copies {
            for t in 0..blur_count {
                names.push(if unit {
                    format!("{}#{l}", base.name(a))
                } else {
                    format!("{}#{l}/{}", base.name(a), schema.blurs[t])
                });
                base_of.push(a);
                copy_of.push(l);
                blur_of.push(t);
            }
        }
    }
    let len = names.len();
    let converse: Vec<usize> = (0..len)
        .map(|x| {
            let ca = base.converse(base_of[x]);
            if base.is_identity(ca) {
                slot[ca]
            } else {
                slot[ca] + copy_of[x] * blur_count + blur_of[x]
            }
        })
        .collect();
    let identity: Vec<usize> = (0..len).filter(|&x| base.is_identity(base_of[x])).collect();

    let consistent = |x: usize, y: usize, z: usize| -> bool {
        let (a, b, c) = (base_of[x], base_of[y], base_of[z]);
        if !base.is_cycle(a, b, c) {
            if let BlowUpRule::RedIndexMatch { red } = &schema.rule {
                if let (Some(_), Some(_), Some(_)) = (red[a], red[b], red[c]) {
                    return red_match(red, a, b, c);
                }
            }
            return false;
        }
        if base.is_identity(a) {
            return y == z;
        }
        if base.is_identity(b) {
            return x == z;
        }
        if base.is_identity(c) {
            return y == converse[x];
        }
        if let BlowUpRule::RedIndexMatch { red } = &schema.rule {
            if red[a].is_some() && red[b].is_some() && red[c].is_some() {
                return red_match(red, a, b, c);
            }
        }
        true
    };
    let mut cycles = Vec::new();
    for x in 0..len {
        for y in 0..len {
            let cands = base.compose_atoms(base_of[x], base_of[y]);
            let all_reds = matches!(&schema.rule, BlowUpRule::RedIndexMatch { .. });
            for z in 0..len {
                if (all_reds || cands.contains(base_of[z])) && consistent(x, y, z) {
                    cycles.push((x, y, z));
                }
            }
        }
    }
    let structure = RaAtomStructure::new(names, identity, converse, cycles)?;
    Ok(BlownUp { structure, base_of, copy_of, blur_of, base_fingerprint: base.fingerprint() })
}

fn red_match(red: &[Option<(usize, usize)>], a: usize, b: usize, c: usize) -> bool {
    let (i, j) = red[a].unwrap();
    let (j2, k2) = red[b].unwrap();
    let (i3, k3) = red[c].unwrap();
    i == i3 && j == j2 && k2 == k3
}

impl BlownUp {
    /// `copy_map(a)` = all blown atoms over base atom `a`.
    pub fn copy_map(&self, base_len: usize) -> Vec<Vec<usize>> {
        let mut map = vec![Vec::new(); base_len];
        for (x, &a) in self.base_of.iter().enumerate() {
            map[a].push(x);
        }
        map
    }

    /// Same provenance, different cycles; used for negative controls.
    pub fn with_structure(&self, structure: RaAtomStructure) -> Result<Self> {
        if structure.len() != self.structure.len() {
            return Err(Error::InvalidParameter("replacement has a different atom count".into()));
        }
        Ok(BlownUp { structure, ..self.clone() })
    }
}

/// Runs the copy embedding `a -> join of its copies` from `base` into `blown`.
pub fn collapse_map_check(blown: &BlownUp, base: &RaAtomStructure) -> Result<EmbeddingReport> {
    if blown.base_fingerprint != base.fingerprint() || blown.base_of.iter().any(|&a| a >= base.len()) {
        return Err(Error::Provenance("structure was not blown up from this base".into()));
    }
    embed_ra_by_copies(base, &blown.structure, &blown.copy_map(base.len()))
}

/// Distinct colours present in a set of cycles; handy for reporting.
pub fn cycle_atoms(r: &RaAtomStructure) -> BTreeSet<usize> {
    r.cycles().flat_map(|(a, b, c)| [a, b, c]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{ra_validate, Violation};
    use crate::graph::gen_disjoint_cliques;

    fn at(v: usize, i: usize, n: usize) -> usize {
        1 + v * n + i
    }

    #[test]
    fn alpha_rules() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let r = alpha_of_graph(&g, 3).unwrap();
        assert_eq!(r.len(), 10);
        assert!(r.is_cycle(0, at(0, 0, 3), at(0, 0, 3)));
        assert!(!r.is_cycle(0, at(0, 0, 3), at(1, 0, 3)));
        assert!(r.is_cycle(at(0, 0, 3), at(1, 1, 3), at(2, 2, 3)));
        assert!(r.is_cycle(at(0, 0, 3), at(1, 0, 3), at(2, 0, 3)));
        assert!(!r.is_cycle(at(2, 1, 3), at(2, 1, 3), at(2, 1, 3)));
        let empty = Graph::empty(3);
        let r = alpha_of_graph(&empty, 3).unwrap();
        assert!(!r.is_cycle(at(0, 0, 3), at(1, 0, 3), at(2, 0, 3)));
    }

    #[test]
    fn alpha_parameter_errors() {
        assert!(alpha_of_graph(&Graph::complete(3), 2).is_err());
        assert!(alpha_of_graph(&Graph::empty(0), 3).is_err());
    }

    #[test]
    fn maddux_inventory() {
        let r = maddux_a(3, 1, 3).unwrap();
        assert_eq!(r.len(), 7);
        let a = |k: usize, i: usize, j: usize| 1 + (i * 1 + j) * 3 + k;
        assert!(!r.is_cycle(a(0, 0, 0), a(1, 0, 0), a(2, 0, 0)));
        assert!(r.is_cycle(a(0, 0, 0), a(0, 1, 0), a(0, 0, 0)));
        assert!(!r.is_cycle(0, a(0, 0, 0), a(1, 0, 0)));
        // Two colours with independent classes: composition is not associative.
        let report = ra_validate(&r);
        assert!(!report.violations.is_empty());
        assert!(report.violations.iter().all(|v| matches!(v, Violation::Associativity { .. })));
        assert!(ra_validate(&maddux_a(4, 1, 4).unwrap()).is_valid());
        assert!(maddux_a(2, 1, 3).is_err());
        assert!(maddux_a(4, 1, 3).is_err());
        assert!(maddux_a(3, 4, 3).is_err());
    }

    #[test]
    fn maddux_second_index_rule() {
        // r = 2: a pair at j = 0 with a third at j' = 1 is forbidden, the
        // reverse (pair at j = 1, third at 0) is not.
        let r = maddux_a(3, 2, 3).unwrap();
        let a = |k: usize, i: usize, j: usize| 1 + (i * 2 + j) * 3 + k;
        assert!(!r.is_cycle(a(0, 0, 0), a(1, 0, 0), a(2, 0, 1)));
        assert!(r.is_cycle(a(0, 0, 1), a(1, 0, 1), a(2, 0, 0)));
        assert!(ra_validate(&maddux_a(4, 2, 4).unwrap()).is_valid());
    }

    #[test]
    fn single_copy_blow_up_is_isomorphic() {
        let base = alpha_of_graph(&Graph::complete(3), 3).unwrap();
        let schema = BlurSchema::new(1, vec![], BlowUpRule::CopyAgnostic).unwrap();
        let b = blow_up(&base, &schema).unwrap();
        assert_eq!(b.structure.len(), base.len());
        let renamed: Vec<_> = b.structure.cycles().map(|(x, y, z)| (b.base_of[x], b.base_of[y], b.base_of[z])).collect();
        assert_eq!(renamed, base.cycles().collect::<Vec<_>>());
        assert!(collapse_map_check(&b, &base).unwrap().holds);
    }

    #[test]
    fn copies_compose_like_the_base() {
        let base = alpha_of_graph(&gen_disjoint_cliques(1, 3).unwrap(), 3).unwrap();
        let schema = BlurSchema::new(2, vec![], BlowUpRule::CopyAgnostic).unwrap();
        let b = blow_up(&base, &schema).unwrap();
        assert!(ra_validate(&b.structure).is_valid());
        let r = &b.structure;
        let x = r.index_of("(0,0)#1").unwrap();
        let y = r.index_of("(1,0)#0").unwrap();
        let got: BTreeSet<usize> = r.compose_atoms(x, y).ones().map(|z| b.base_of[z]).collect();
        let want: BTreeSet<usize> = base.compose_atoms(b.base_of[x], b.base_of[y]).ones().collect();
        assert_eq!(got, want);
    }

    #[test]
    fn provenance_and_negative_control() {
        let base = alpha_of_graph(&Graph::complete(3), 3).unwrap();
        let other = alpha_of_graph(&Graph::path(3), 3).unwrap();
        let schema = BlurSchema::new(2, vec![], BlowUpRule::CopyAgnostic).unwrap();
        let b = blow_up(&base, &schema).unwrap();
        assert!(matches!(collapse_map_check(&b, &other), Err(Error::Provenance(_))));
        // Drop every copy of one base cycle: the embedding must now fail.
        let (x, y) = (at(0, 0, 3), at(1, 1, 3));
        let mut broken = b.structure.clone();
        for z in b.copy_map(base.len())[at(2, 2, 3)].clone() {
            for &xx in &b.copy_map(base.len())[x] {
                for &yy in &b.copy_map(base.len())[y] {
                    broken = broken.without_cycle(xx, yy, z);
                }
            }
        }
        let bad = b.with_structure(broken).unwrap();
        let rep = collapse_map_check(&bad, &base).unwrap();
        assert!(!rep.holds);
        assert!(rep.counterexample.unwrap().contains("composition"));
    }

    #[test]
    fn flmu_blur_count() {
        let s = FLMuSchema::new((1..7).collect(), 2, 1).unwrap();
        assert_eq!(s.blurs().len(), 15);
        assert_eq!(FLMuSchema::new((1..7).collect(), 2, 2).unwrap().blurs().len(), 30);
        assert!(FLMuSchema::new((1..6).collect(), 2, 1).is_err());
        assert!(FLMuSchema::new((1..7).collect(), 1, 1).is_err());
    }

    #[test]
    fn unknown_rule() {
        assert_eq!(BlowUpRule::by_name("nope").unwrap_err(), Error::UnknownRule("nope".into()));
    }

    #[test]
    fn adequacy_predicates() {
        // In alpha(K3, 3) the only forbidden non-identity triples are (x, x, x),
        // so singleton blurs are adequate but not strongly adequate.
        let r = alpha_of_graph(&Graph::complete(3), 3).unwrap();
        let all: Vec<Vec<usize>> = (1..r.len()).map(|a| vec![a]).collect();
        assert!(blurs_adequate(&r, &all, 3));
        assert!(!blurs_strongly_adequate(&r, &all));
        assert!(!blurs_adequate(&r, &[vec![at(0, 0, 3)]], 3));
    }
}
