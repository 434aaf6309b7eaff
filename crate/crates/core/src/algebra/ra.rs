use std::collections::{BTreeSet, HashMap};
use std::hash::{DefaultHasher, Hash, Hasher};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use super::report::{ValidationReport, Violation};
use super::CmElement;
use crate::error::{Error, Result};

/// Finite relation-algebra atom structure.
///
/// A cycle `(a, b, c)` is stored with the orientation `c <= a ; b`, so the
/// composition table row for `(a, b)` is exactly the set of such `c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RaAtomStructure {
    names: Vec<String>,
    identity: FixedBitSet,
    converse: Vec<usize>,
    table: Vec<FixedBitSet>,
    fingerprint: u64,
}

impl RaAtomStructure {
    /// Builds a structure from explicit data. Only structural well-formedness is
    /// checked here; the relation-algebra laws are the job of [`ra_validate`].
    pub fn new(
        names: Vec<String>,
        identity: impl IntoIterator<Item = usize>,
        converse: Vec<usize>,
        cycles: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Result<Self> {
        let n = names.len();
        let mut seen = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if seen.insert(name.clone(), i).is_some() {
                return Err(Error::DuplicateAtom(name.clone()));
            }
        }
        if converse.len() != n {
            return Err(Error::Malformed(format!(
                "converse has {} entries for {n} atoms",
                converse.len()
            )));
        }
        for &c in &converse {
            check_index(c, n)?;
        }
        let mut id = FixedBitSet::with_capacity(n);
        for e in identity {
            check_index(e, n)?;
            id.insert(e);
        }
        let mut table = vec![FixedBitSet::with_capacity(n); n * n];
        for (a, b, c) in cycles {
            check_index(a, n)?;
            check_index(b, n)?;
            check_index(c, n)?;
            table[a * n + b].insert(c);
        }
        let fingerprint = fingerprint(&names, &id, &converse, &table);
        Ok(RaAtomStructure { names, identity: id, converse, table, fingerprint })
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

    pub fn is_identity(&self, a: usize) -> bool {
        self.identity.contains(a)
    }

    pub fn identity_atoms(&self) -> impl Iterator<Item = usize> + '_ {
        self.identity.ones()
    }

    pub fn converse(&self, a: usize) -> usize {
        self.converse[a]
    }

    pub fn converse_map(&self) -> &[usize] {
        &self.converse
    }

    /// `c <= a ; b`.
    pub fn is_cycle(&self, a: usize, b: usize, c: usize) -> bool {
        self.table[a * self.len() + b].contains(c)
    }

    /// The atoms below `a ; b`.
    pub fn compose_atoms(&self, a: usize, b: usize) -> &FixedBitSet {
        &self.table[a * self.len() + b]
    }

    /// All stored cycles in lexicographic order.
    pub fn cycles(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let n = self.len();
        (0..n * n).flat_map(move |ab| self.table[ab].ones().map(move |c| (ab / n, ab % n, c)))
    }

    pub fn cycle_count(&self) -> usize {
        self.table.iter().map(|s| s.count_ones(..)).sum()
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

    pub fn identity_element(&self) -> CmElement {
        self.element(self.identity.ones())
    }

    pub fn top(&self) -> CmElement {
        self.element(0..self.len())
    }

    /// Composition of two atom sets, as raw bitsets.
    pub fn compose_sets(&self, x: &FixedBitSet, y: &FixedBitSet) -> FixedBitSet {
        let n = self.len();
        let mut out = FixedBitSet::with_capacity(n);
        for a in x.ones() {
            for b in y.ones() {
                out.union_with(&self.table[a * n + b]);
            }
        }
        out
    }

    pub fn converse_set(&self, x: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.len());
        for a in x.ones() {
            out.insert(self.converse[a]);
        }
        out
    }

    /// Returns a copy with one cycle removed. Used for negative controls.
    pub fn without_cycle(&self, a: usize, b: usize, c: usize) -> Self {
        let mut table = self.table.clone();
        table[a * self.len() + b].set(c, false);
        let fingerprint = fingerprint(&self.names, &self.identity, &self.converse, &table);
        RaAtomStructure { table, fingerprint, ..self.clone() }
    }
}

fn check_index(i: usize, len: usize) -> Result<()> {
    if i < len {
        Ok(())
    } else {
        Err(Error::AtomOutOfRange { index: i, len })
    }
}

fn fingerprint(names: &[String], id: &FixedBitSet, conv: &[usize], table: &[FixedBitSet]) -> u64 {
    let mut h = DefaultHasher::new();
    names.hash(&mut h);
    id.ones().collect::<Vec<_>>().hash(&mut h);
    conv.hash(&mut h);
    for row in table {
        row.as_slice().hash(&mut h);
    }
    h.finish()
}

/// Closes a set of cycles under the Peircean transforms
/// `(a,b,c) -> (a˘,c,b)` and `(a,b,c) -> (c,b˘,a)`.
pub fn close_peircean(
    cycles: impl IntoIterator<Item = (usize, usize, usize)>,
    converse: &[usize],
) -> BTreeSet<(usize, usize, usize)> {
    let mut out = BTreeSet::new();
    let mut stack: Vec<_> = cycles.into_iter().collect();
    while let Some(t) = stack.pop() {
        if out.insert(t) {
            let (a, b, c) = t;
            stack.push((converse[a], c, b));
            stack.push((c, converse[b], a));
        }
    }
    out
}

/// Composition in the complex algebra.
pub fn ra_compose(r: &RaAtomStructure, x: &CmElement, y: &CmElement) -> Result<CmElement> {
    x.check_owner(r.fingerprint, r.len())?;
    y.check_owner(r.fingerprint, r.len())?;
    Ok(CmElement::from_bits(r.fingerprint, r.compose_sets(x.bits(), y.bits())))
}

/// Exhaustive check of the relation-algebra atom-structure laws.
pub fn ra_validate(r: &RaAtomStructure) -> ValidationReport {
    let n = r.len();
    let mut report = ValidationReport::default();

    for a in 0..n {
        let c = r.converse(a);
        if r.converse(c) != a {
            report.push(Violation::ConverseNotInvolution { atom: r.name(a).into() });
        }
    }
    for e in r.identity_atoms() {
        if !r.is_identity(r.converse(e)) {
            report.push(Violation::IdentityConverse { atom: r.name(e).into() });
        }
    }

    for (a, b, c) in r.cycles() {
        let first = (r.converse(a), c, b);
        let second = (c, r.converse(b), a);
        for (label, t) in [("(a˘,c,b)", first), ("(c,b˘,a)", second)] {
            if !r.is_cycle(t.0, t.1, t.2) {
                report.push(Violation::PeirceanClosure {
                    cycle: [r.name(a).into(), r.name(b).into(), r.name(c).into()],
                    missing: format!(
                        "{label} = ({}, {}, {})",
                        r.name(t.0),
                        r.name(t.1),
                        r.name(t.2)
                    ),
                });
            }
        }
    }

    let id = r.identity_element();
    for a in 0..n {
        let single = r.element([a]);
        let left = r.compose_sets(id.bits(), single.bits());
        let right = r.compose_sets(single.bits(), id.bits());
        if &left != single.bits() {
            report.push(Violation::IdentityLaw { atom: r.name(a).into(), side: "1';a" });
        }
        if &right != single.bits() {
            report.push(Violation::IdentityLaw { atom: r.name(a).into(), side: "a;1'" });
        }
    }

    // (a;b);c versus a;(b;c) over all atom triples, i.e. the quadruple witness
    // condition: d <= (a;b);c iff d <= a;(b;c).
    let assoc: Vec<Violation> = (0..n)
        .into_par_iter()
        .flat_map_iter(|a| {
            let mut found = Vec::new();
            for b in 0..n {
                let ab = r.compose_atoms(a, b);
                for c in 0..n {
                    let mut left = FixedBitSet::with_capacity(n);
                    for e in ab.ones() {
                        left.union_with(r.compose_atoms(e, c));
                    }
                    let bc = r.compose_atoms(b, c);
                    let mut right = FixedBitSet::with_capacity(n);
                    for f in bc.ones() {
                        right.union_with(r.compose_atoms(a, f));
                    }
                    if left != right {
                        let d = left.symmetric_difference(&right).next().unwrap();
                        found.push(Violation::Associativity {
                            atoms: [
                                r.name(a).into(),
                                r.name(b).into(),
                                r.name(c).into(),
                                r.name(d).into(),
                            ],
                            in_left: left.contains(d),
                        });
                    }
                }
            }
            found
        })
        .collect();
    for v in assoc {
        report.push(v);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trivial() -> RaAtomStructure {
        RaAtomStructure::new(vec!["1'".into()], [0], vec![0], [(0, 0, 0)]).unwrap()
    }

    #[test]
    fn one_atom_structure_is_valid() {
        assert!(ra_validate(&trivial()).is_valid());
    }

    #[test]
    fn non_involutive_converse_is_flagged() {
        let names = vec!["1'".to_string(), "a".into(), "b".into(), "c".into()];
        let r = RaAtomStructure::new(names, [0], vec![0, 2, 3, 1], [(0, 0, 0)]).unwrap();
        let report = ra_validate(&r);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::ConverseNotInvolution { .. })));
    }

    #[test]
    fn unknown_atom_in_cycles_is_structural() {
        let err = RaAtomStructure::new(vec!["1'".into()], [0], vec![0], [(0, 0, 3)]).unwrap_err();
        assert!(matches!(err, Error::AtomOutOfRange { index: 3, len: 1 }));
    }

    #[test]
    fn compose_with_identity_and_empty() {
        let r = trivial();
        let id = r.identity_element();
        let e = r.empty_element();
        assert_eq!(ra_compose(&r, &id, &id).unwrap(), id);
        assert_eq!(ra_compose(&r, &e, &id).unwrap(), e);
    }

    #[test]
    fn foreign_element_is_rejected() {
        let r = trivial();
        let other = RaAtomStructure::new(vec!["e".into()], [0], vec![0], [(0, 0, 0)]).unwrap();
        let x = other.identity_element();
        assert_eq!(ra_compose(&r, &x, &x).unwrap_err(), Error::OwnershipMismatch);
    }

    #[test]
    fn peircean_closure_of_single_cycle() {
        // a, b mutually converse; (a,a,b) generates its two transforms.
        let closed = close_peircean([(1, 1, 2)], &[0, 2, 1]);
        assert!(closed.contains(&(2, 2, 1)));
        assert!(closed.contains(&(2, 2, 1)) && closed.contains(&(1, 1, 2)));
        for &(a, b, c) in &closed {
            let conv = [0, 2, 1];
            assert!(closed.contains(&(conv[a], c, b)));
            assert!(closed.contains(&(c, conv[b], a)));
        }
    }

    #[test]
    fn missing_variant_is_reported() {
        // Two-element group Z2 = {e, a}, with one Peircean variant dropped.
        let names = vec!["e".to_string(), "a".into()];
        let full = close_peircean([(0, 0, 0), (0, 1, 1), (1, 1, 0)], &[0, 1]);
        let r = RaAtomStructure::new(names.clone(), [0], vec![0, 1], full.iter().copied()).unwrap();
        assert!(ra_validate(&r).is_valid());
        let broken = r.without_cycle(1, 0, 1);
        let report = ra_validate(&broken);
        assert!(report.violations.iter().any(|v| matches!(v, Violation::PeirceanClosure { .. })));
    }
}
