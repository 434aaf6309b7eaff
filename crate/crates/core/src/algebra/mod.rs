//! Atom structures of relation and cylindric algebras and their complex
//! algebras.
//!
//! Elements of a complex algebra are sets of atoms ([`CmElement`]); every
//! operation is computed atom-wise and extended by additivity. Validation is
//! exhaustive over the finite atom set.

mod ca;
mod embed;
mod fincof;
mod json;
mod ra;
mod report;

pub use ca::{ca_validate, cm_cylindrify, Accessibility, CaAtomStructure};
pub use embed::{embed_by_copies, embed_ca_by_copies, embed_ra_by_copies, EmbeddingReport};
pub use fincof::{fincof_ops, ClassPart, FinCofOp, FinCofSet};
pub use json::AtomStructure;
pub use ra::{close_peircean, ra_compose, ra_validate, RaAtomStructure};
pub use report::{ValidationReport, Violation, MAX_VIOLATIONS};

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// Element of the complex algebra of a fixed atom structure: a set of atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CmElement {
    owner: u64,
    bits: FixedBitSet,
}

impl CmElement {
    pub(crate) fn empty(owner: u64, len: usize) -> Self {
        CmElement { owner, bits: FixedBitSet::with_capacity(len) }
    }

    pub(crate) fn from_atoms<I: IntoIterator<Item = usize>>(owner: u64, len: usize, atoms: I) -> Self {
        let mut bits = FixedBitSet::with_capacity(len);
        for a in atoms {
            bits.insert(a);
        }
        CmElement { owner, bits }
    }

    pub(crate) fn from_bits(owner: u64, bits: FixedBitSet) -> Self {
        CmElement { owner, bits }
    }

    pub(crate) fn check_owner(&self, owner: u64, len: usize) -> Result<()> {
        if self.owner != owner || self.bits.len() != len {
            Err(Error::OwnershipMismatch)
        } else {
            Ok(())
        }
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.bits
    }

    pub fn atoms(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn contains(&self, atom: usize) -> bool {
        self.bits.contains(atom)
    }

    pub fn count(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn is_subset(&self, other: &CmElement) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn union(&self, other: &CmElement) -> CmElement {
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        CmElement { owner: self.owner, bits }
    }

    pub fn intersection(&self, other: &CmElement) -> CmElement {
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        CmElement { owner: self.owner, bits }
    }

    pub fn complement(&self) -> CmElement {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        CmElement { owner: self.owner, bits }
    }
}
