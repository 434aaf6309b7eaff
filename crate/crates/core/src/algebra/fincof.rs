use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One class of a split family: either finitely many of its countably many
/// atoms, or all but finitely many.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassPart {
    Finite(BTreeSet<u64>),
    Cofinite(BTreeSet<u64>),
}

impl ClassPart {
    pub fn contains(&self, index: u64) -> bool {
        match self {
            ClassPart::Finite(s) => s.contains(&index),
            ClassPart::Cofinite(s) => !s.contains(&index),
        }
    }

    fn complement(&self) -> ClassPart {
        match self {
            ClassPart::Finite(s) => ClassPart::Cofinite(s.clone()),
            ClassPart::Cofinite(s) => ClassPart::Finite(s.clone()),
        }
    }

    fn union(&self, other: &ClassPart) -> ClassPart {
        use ClassPart::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a | b),
            (Cofinite(a), Cofinite(b)) => Cofinite(a & b),
            (Finite(f), Cofinite(c)) | (Cofinite(c), Finite(f)) => Cofinite(c - f),
        }
    }

    fn intersect(&self, other: &ClassPart) -> ClassPart {
        self.complement().union(&other.complement()).complement()
    }
}

/// Element of the term algebra over a split atom structure: finite or
/// cofinite inside each class of the partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinCofSet {
    classes: Vec<(String, ClassPart)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FinCofOp {
    Union,
    Intersect,
    /// Complement of the first operand; the second only has to share its schema.
    Complement,
}

impl FinCofSet {
    pub fn new(classes: Vec<(String, ClassPart)>) -> Result<Self> {
        for (k, (name, _)) in classes.iter().enumerate() {
            if classes[..k].iter().any(|(n, _)| n == name) {
                return Err(Error::Malformed(format!("class `{name}` listed twice")));
            }
        }
        Ok(FinCofSet { classes })
    }

    /// Empty element over the given schema.
    pub fn empty<S: Into<String>>(schema: impl IntoIterator<Item = S>) -> Result<Self> {
        Self::new(schema.into_iter().map(|s| (s.into(), ClassPart::Finite(BTreeSet::new()))).collect())
    }

    pub fn classes(&self) -> &[(String, ClassPart)] {
        &self.classes
    }

    pub fn class(&self, name: &str) -> Option<&ClassPart> {
        self.classes.iter().find(|(n, _)| n == name).map(|(_, p)| p)
    }

    pub fn contains(&self, class: &str, index: u64) -> bool {
        self.class(class).is_some_and(|p| p.contains(index))
    }

    /// Members among the first `prefix` atoms of every class, as (class position, index).
    pub fn materialize(&self, prefix: u64) -> BTreeSet<(usize, u64)> {
        let mut out = BTreeSet::new();
        for (k, (_, part)) in self.classes.iter().enumerate() {
            for i in 0..prefix {
                if part.contains(i) {
                    out.insert((k, i));
                }
            }
        }
        out
    }

    fn same_schema(&self, other: &FinCofSet) -> bool {
        self.classes.len() == other.classes.len()
            && self.classes.iter().zip(&other.classes).all(|((a, _), (b, _))| a == b)
    }
}

pub fn fincof_ops(a: &FinCofSet, b: &FinCofSet, op: FinCofOp) -> Result<FinCofSet> {
    if !a.same_schema(b) {
        let names = |s: &FinCofSet| s.classes.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>();
        return Err(Error::SchemaMismatch(format!("{:?} vs {:?}", names(a), names(b))));
    }
    let classes = a
        .classes
        .iter()
        .zip(&b.classes)
        .map(|((name, x), (_, y))| {
            let part = match op {
                FinCofOp::Union => x.union(y),
                FinCofOp::Intersect => x.intersect(y),
                FinCofOp::Complement => x.complement(),
            };
            (name.clone(), part)
        })
        .collect();
    Ok(FinCofSet { classes })
}
