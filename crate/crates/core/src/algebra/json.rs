use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::ca::{Accessibility, CaAtomStructure};
use super::ra::RaAtomStructure;
use crate::error::{Error, Result};

/// Either kind of atom structure, as read from or written to JSON.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AtomStructure {
    Ra(RaAtomStructure),
    Ca(CaAtomStructure),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind")]
enum Doc {
    #[serde(rename = "RA")]
    Ra {
        atoms: Vec<String>,
        identity: Vec<String>,
        converse: IndexMap<String, String>,
        cycles: Vec<[String; 3]>,
    },
    #[serde(rename = "CA")]
    Ca {
        dimension: usize,
        atoms: Vec<String>,
        ti: Vec<TiDoc>,
        eij: Vec<Vec<Vec<String>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pij: Option<Vec<Vec<Vec<String>>>>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TiDoc {
    Classes { classes: Vec<Vec<String>> },
    Pairs { pairs: Vec<[String; 2]> },
}

struct Names<'a> {
    index: HashMap<&'a str, usize>,
}

impl<'a> Names<'a> {
    fn new(atoms: &'a [String]) -> Self {
        Names { index: atoms.iter().enumerate().map(|(i, a)| (a.as_str(), i)).collect() }
    }

    fn get(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownAtom(name.to_string()))
    }
}

impl AtomStructure {
    pub fn kind(&self) -> &'static str {
        match self {
            AtomStructure::Ra(_) => "RA",
            AtomStructure::Ca(_) => "CA",
        }
    }

    pub fn len(&self) -> usize {
        match self {
            AtomStructure::Ra(r) => r.len(),
            AtomStructure::Ca(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("atom structure documents always serialise")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Doc = serde_json::from_str(text)?;
        Self::from_doc(doc)
    }

    fn to_doc(&self) -> Doc {
        match self {
            AtomStructure::Ra(r) => {
                let name = |a: usize| r.name(a).to_string();
                Doc::Ra {
                    atoms: r.names().to_vec(),
                    identity: r.identity_atoms().map(name).collect(),
                    converse: (0..r.len()).map(|a| (name(a), name(r.converse(a)))).collect(),
                    cycles: r.cycles().map(|(a, b, c)| [name(a), name(b), name(c)]).collect(),
                }
            }
            AtomStructure::Ca(c) => {
                let name = |a: usize| c.name(a).to_string();
                let n = c.dimension();
                let ti = (0..n)
                    .map(|i| match c.ti(i) {
                        Accessibility::Partition(ids) => {
                            let count = ids.iter().map(|&k| k as usize + 1).max().unwrap_or(0);
                            let mut classes = vec![Vec::new(); count];
                            for (a, &k) in ids.iter().enumerate() {
                                classes[k as usize].push(name(a));
                            }
                            TiDoc::Classes { classes }
                        }
                        t @ Accessibility::Relation(_) => TiDoc::Pairs {
                            pairs: t.pairs().into_iter().map(|(a, b)| [name(a), name(b)]).collect(),
                        },
                    })
                    .collect();
                let eij = (0..n)
                    .map(|i| (0..n).map(|j| c.eij(i, j).ones().map(name).collect()).collect())
                    .collect();
                let pij = c.has_substitutions().then(|| {
                    (0..n)
                        .map(|i| {
                            (0..n)
                                .map(|j| c.pij(i, j).unwrap().iter().map(|&b| name(b as usize)).collect())
                                .collect()
                        })
                        .collect()
                });
                Doc::Ca { dimension: n, atoms: c.names().to_vec(), ti, eij, pij }
            }
        }
    }

    fn from_doc(doc: Doc) -> Result<Self> {
        match doc {
            Doc::Ra { atoms, identity, converse, cycles } => {
                let names = Names::new(&atoms);
                let id = identity.iter().map(|a| names.get(a)).collect::<Result<Vec<_>>>()?;
                let mut conv = vec![usize::MAX; atoms.len()];
                for (a, b) in &converse {
                    conv[names.get(a)?] = names.get(b)?;
                }
                if let Some(a) = conv.iter().position(|&c| c == usize::MAX) {
                    return Err(Error::Malformed(format!("no converse for `{}`", atoms[a])));
                }
                let cyc = cycles
                    .iter()
                    .map(|[a, b, c]| Ok((names.get(a)?, names.get(b)?, names.get(c)?)))
                    .collect::<Result<Vec<_>>>()?;
                let r = RaAtomStructure::new(atoms.clone(), id, conv, cyc)?;
                Ok(AtomStructure::Ra(r))
            }
            Doc::Ca { dimension, atoms, ti, eij, pij } => {
                let names = Names::new(&atoms);
                let len = atoms.len();
                let mut t = Vec::with_capacity(ti.len());
                for doc in ti {
                    t.push(match doc {
                        TiDoc::Classes { classes } => {
                            let mut ids = vec![u32::MAX; len];
                            for (k, class) in classes.iter().enumerate() {
                                for a in class {
                                    let a = names.get(a)?;
                                    if ids[a] != u32::MAX {
                                        return Err(Error::Malformed(format!("`{}` in two classes", atoms[a])));
                                    }
                                    ids[a] = k as u32;
                                }
                            }
                            if let Some(a) = ids.iter().position(|&k| k == u32::MAX) {
                                return Err(Error::Malformed(format!("`{}` in no class", atoms[a])));
                            }
                            Accessibility::partition(&ids)
                        }
                        TiDoc::Pairs { pairs } => {
                            let p = pairs
                                .iter()
                                .map(|[a, b]| Ok((names.get(a)?, names.get(b)?)))
                                .collect::<Result<Vec<_>>>()?;
                            Accessibility::relation(len, p)
                        }
                    });
                }
                if eij.len() != dimension || eij.iter().any(|row| row.len() != dimension) {
                    return Err(Error::Malformed("eij must be a dimension x dimension table".into()));
                }
                let mut e = Vec::with_capacity(dimension * dimension);
                for row in &eij {
                    for cell in row {
                        let mut bits = FixedBitSet::with_capacity(len);
                        for a in cell {
                            bits.insert(names.get(a)?);
                        }
                        e.push(bits);
                    }
                }
                let p = match pij {
                    None => None,
                    Some(table) => {
                        if table.len() != dimension || table.iter().any(|row| row.len() != dimension) {
                            return Err(Error::Malformed("pij must be a dimension x dimension table".into()));
                        }
                        let mut maps = Vec::with_capacity(dimension * dimension);
                        for row in &table {
                            for cell in row {
                                if cell.len() != len {
                                    return Err(Error::Malformed("pij map must be total".into()));
                                }
                                maps.push(cell.iter().map(|a| names.get(a).map(|i| i as u32)).collect::<Result<Vec<_>>>()?);
                            }
                        }
                        Some(maps)
                    }
                };
                let c = CaAtomStructure::new(dimension, atoms.clone(), t, e, p)?;
                Ok(AtomStructure::Ca(c))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::close_peircean;

    #[test]
    fn ra_round_trip_is_bit_exact() {
        let cycles = close_peircean([(0, 0, 0), (0, 1, 1), (1, 1, 0)], &[0, 1]);
        let r = RaAtomStructure::new(vec!["e".into(), "a".into()], [0], vec![0, 1], cycles).unwrap();
        let s = AtomStructure::Ra(r);
        let text = s.to_json();
        let back = AtomStructure::from_json(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_json(), text);
        assert!(text.trim_start().starts_with("{\n  \"kind\": \"RA\""));
    }

    #[test]
    fn ca_round_trip_with_substitutions() {
        let names = vec!["x".to_string(), "y".into()];
        let mut full = FixedBitSet::with_capacity(2);
        full.insert_range(..);
        let mut d = FixedBitSet::with_capacity(2);
        d.insert(0);
        let t0 = Accessibility::Partition(vec![0, 0]);
        let t1 = Accessibility::relation(2, [(0, 0), (1, 1), (0, 1), (1, 0)]);
        let p = vec![vec![0, 1], vec![0, 1], vec![0, 1], vec![0, 1]];
        let c = CaAtomStructure::new(2, names, vec![t0, t1], vec![full.clone(), d.clone(), d, full], Some(p)).unwrap();
        let s = AtomStructure::Ca(c);
        let text = s.to_json();
        let back = AtomStructure::from_json(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn unknown_atom_is_reported() {
        let text = r#"{"kind":"RA","atoms":["e"],"identity":["e"],"converse":{"e":"e"},"cycles":[["e","e","f"]]}"#;
        assert_eq!(AtomStructure::from_json(text).unwrap_err(), Error::UnknownAtom("f".into()));
    }
}
