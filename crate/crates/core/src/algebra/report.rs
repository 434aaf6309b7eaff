use std::fmt;

use serde::Serialize;

/// Upper bound on the violations kept in one report.
pub const MAX_VIOLATIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum Violation {
    ConverseNotInvolution { atom: String },
    IdentityConverse { atom: String },
    PeirceanClosure { cycle: [String; 3], missing: String },
    IdentityLaw { atom: String, side: &'static str },
    /// `d` lies in exactly one of `(a;b);c` and `a;(b;c)`.
    Associativity { atoms: [String; 4], in_left: bool },
    NotEquivalence { index: usize, property: &'static str, atoms: Vec<String> },
    NotCommuting { i: usize, j: usize, pair: [String; 2] },
    DiagonalNotFull { i: usize, atom: String },
    DiagonalSymmetry { i: usize, j: usize, atom: String },
    DiagonalWitness { i: usize, j: usize, atom: String },
    DiagonalCorrespondent { i: usize, j: usize, k: usize, atom: String },
    SubstitutionUnique { i: usize, j: usize, atoms: [String; 2] },
    Substitution { i: usize, j: usize, detail: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ConverseNotInvolution { atom } => {
                write!(f, "involution: converse(converse({atom})) != {atom}")
            }
            Violation::IdentityConverse { atom } => {
                write!(f, "identity: converse of identity atom {atom} is not an identity atom")
            }
            Violation::PeirceanClosure { cycle, missing } => {
                write!(f, "peircean: ({}, {}, {}) present but {missing} absent", cycle[0], cycle[1], cycle[2])
            }
            Violation::IdentityLaw { atom, side } => write!(f, "identity: {side} != a for a = {atom}"),
            Violation::Associativity { atoms, in_left } => {
                let [a, b, c, d] = atoms;
                if *in_left {
                    write!(f, "associativity: {d} <= ({a};{b});{c} but not {a};({b};{c})")
                } else {
                    write!(f, "associativity: {d} <= {a};({b};{c}) but not ({a};{b});{c}")
                }
            }
            Violation::NotEquivalence { index, property, atoms } => {
                write!(f, "equivalence: t{index} not {property} at {atoms:?}")
            }
            Violation::NotCommuting { i, j, pair } => {
                write!(f, "commutativity: t{i}.t{j} != t{j}.t{i} at ({}, {})", pair[0], pair[1])
            }
            Violation::DiagonalNotFull { i, atom } => write!(f, "diagonal: {atom} not in e{i}{i}"),
            Violation::DiagonalSymmetry { i, j, atom } => {
                write!(f, "diagonal: {atom} separates e{i}{j} from e{j}{i}")
            }
            Violation::DiagonalWitness { i, j, atom } => {
                write!(f, "diagonal: {atom} has no t{i}-neighbour in e{i}{j}")
            }
            Violation::DiagonalCorrespondent { i, j, k, atom } => {
                write!(f, "diagonal: e{j}{k} != c{i}(e{j}{i}.e{i}{k}) at {atom}")
            }
            Violation::SubstitutionUnique { i, j, atoms } => write!(
                f,
                "diagonal: t{i}-class holds two atoms of e{i}{j}: {} and {}",
                atoms[0], atoms[1]
            ),
            Violation::Substitution { i, j, detail } => write!(f, "substitution p{i}{j}: {detail}"),
        }
    }
}

/// Outcome of an exhaustive law check. An empty violation list means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub truncated: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty() && !self.truncated
    }

    pub fn push(&mut self, v: Violation) {
        if self.violations.len() < MAX_VIOLATIONS {
            self.violations.push(v);
        } else {
            self.truncated = true;
        }
    }

    pub fn summary(&self) -> String {
        if self.is_valid() {
            "valid".to_string()
        } else {
            format!(
                "{} violation(s){}",
                self.violations.len(),
                if self.truncated { " (truncated)" } else { "" }
            )
        }
    }
}
