use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ca::{Accessibility, CaAtomStructure};
use super::json::AtomStructure;
use super::ra::RaAtomStructure;
use crate::error::{Error, Result};

/// Result of checking that `a -> join(copy_map(a))` is a homomorphism of
/// complex algebras. `checked` counts the atom-level obligations examined.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub holds: bool,
    pub checked: u64,
    pub counterexample: Option<String>,
}

impl EmbeddingReport {
    fn ok(checked: u64) -> Self {
        EmbeddingReport { holds: true, checked, counterexample: None }
    }

    fn fail(checked: u64, why: String) -> Self {
        EmbeddingReport { holds: false, checked, counterexample: Some(why) }
    }
}

pub fn embed_by_copies(
    small: &AtomStructure,
    big: &AtomStructure,
    copy_map: &[Vec<usize>],
) -> Result<EmbeddingReport> {
    match (small, big) {
        (AtomStructure::Ra(s), AtomStructure::Ra(b)) => embed_ra_by_copies(s, b, copy_map),
        (AtomStructure::Ca(s), AtomStructure::Ca(b)) => embed_ca_by_copies(s, b, copy_map),
        _ => Err(Error::Precondition("small and big structures are of different kinds".into())),
    }
}

/// Checks images are in range, nonempty and pairwise disjoint; returns the
/// preimage of every big atom (`usize::MAX` when uncovered).
fn preimages(small_len: usize, big_len: usize, copy_map: &[Vec<usize>]) -> Result<Vec<usize>> {
    if copy_map.len() != small_len {
        return Err(Error::Precondition(format!(
            "copy map has {} entries for {small_len} atoms",
            copy_map.len()
        )));
    }
    let mut pre = vec![usize::MAX; big_len];
    for (a, image) in copy_map.iter().enumerate() {
        if image.is_empty() {
            return Err(Error::Precondition(format!("atom {a} has an empty image")));
        }
        for &x in image {
            if x >= big_len {
                return Err(Error::AtomOutOfRange { index: x, len: big_len });
            }
            if pre[x] != usize::MAX {
                return Err(Error::Precondition(format!(
                    "images of atoms {} and {a} overlap at {x}",
                    pre[x]
                )));
            }
            pre[x] = a;
        }
    }
    Ok(pre)
}

fn image_bits(copy_map: &[Vec<usize>], big_len: usize) -> Vec<FixedBitSet> {
    copy_map
        .iter()
        .map(|img| {
            let mut s = FixedBitSet::with_capacity(big_len);
            for &x in img {
                s.insert(x);
            }
            s
        })
        .collect()
}

fn uncovered(pre: &[usize]) -> Option<usize> {
    pre.iter().position(|&p| p == usize::MAX)
}

pub fn embed_ra_by_copies(
    small: &RaAtomStructure,
    big: &RaAtomStructure,
    copy_map: &[Vec<usize>],
) -> Result<EmbeddingReport> {
    let n = small.len();
    let pre = preimages(n, big.len(), copy_map)?;
    let h = image_bits(copy_map, big.len());
    let mut checked = 0u64;

    checked += 1;
    if let Some(x) = uncovered(&pre) {
        return Ok(EmbeddingReport::fail(checked, format!("top not preserved: {} is in no image", big.name(x))));
    }

    let join = |set: &FixedBitSet| {
        let mut out = FixedBitSet::with_capacity(big.len());
        for a in set.ones() {
            out.union_with(&h[a]);
        }
        out
    };

    checked += 1;
    let mut small_id = FixedBitSet::with_capacity(n);
    small_id.extend(small.identity_atoms());
    let mut big_id = FixedBitSet::with_capacity(big.len());
    big_id.extend(big.identity_atoms());
    if join(&small_id) != big_id {
        return Ok(EmbeddingReport::fail(checked, "identity not preserved".into()));
    }

    for a in 0..n {
        checked += 1;
        let conv = big.converse_set(&h[a]);
        if conv != h[small.converse(a)] {
            return Ok(EmbeddingReport::fail(
                checked,
                format!("converse not preserved at {}", small.name(a)),
            ));
        }
    }

    let failure = (0..n).into_par_iter().find_map_first(|a| {
        for b in 0..n {
            let lhs = big.compose_sets(&h[a], &h[b]);
            let rhs = join(small.compose_atoms(a, b));
            if lhs != rhs {
                let x = lhs.symmetric_difference(&rhs).next().unwrap();
                return Some(format!(
                    "composition not preserved: h({0});h({1}) and h({0};{1}) differ at {2}",
                    small.name(a),
                    small.name(b),
                    big.name(x)
                ));
            }
        }
        None
    });
    checked += (n * n) as u64;
    Ok(match failure {
        Some(why) => EmbeddingReport::fail(checked, why),
        None => EmbeddingReport::ok(checked),
    })
}

pub fn embed_ca_by_copies(
    small: &CaAtomStructure,
    big: &CaAtomStructure,
    copy_map: &[Vec<usize>],
) -> Result<EmbeddingReport> {
    if small.dimension() != big.dimension() {
        return Err(Error::Precondition(format!(
            "dimensions differ: {} and {}",
            small.dimension(),
            big.dimension()
        )));
    }
    let dim = small.dimension();
    let pre = preimages(small.len(), big.len(), copy_map)?;
    let mut checked = 0u64;

    checked += 1;
    if let Some(x) = uncovered(&pre) {
        return Ok(EmbeddingReport::fail(checked, format!("top not preserved: {} is in no image", big.name(x))));
    }

    for i in 0..dim {
        for j in 0..dim {
            checked += 1;
            let bad = (0..big.len())
                .into_par_iter()
                .find_first(|&x| big.in_diagonal(x, i, j) != small.in_diagonal(pre[x], i, j));
            if let Some(x) = bad {
                return Ok(EmbeddingReport::fail(
                    checked,
                    format!("diagonal d{i}{j} not preserved at {}", big.name(x)),
                ));
            }
        }
    }

    for i in 0..dim {
        checked += small.len() as u64;
        if let Some(why) = check_cylindrifier(small, big, copy_map, &pre, i) {
            return Ok(EmbeddingReport::fail(checked, why));
        }
    }

    if small.has_substitutions() {
        if !big.has_substitutions() {
            return Ok(EmbeddingReport::fail(checked, "big structure has no substitutions".into()));
        }
        for i in 0..dim {
            for j in 0..dim {
                checked += 1;
                let ps = small.pij(i, j).unwrap();
                let pb = big.pij(i, j).unwrap();
                let bad = (0..big.len()).find(|&x| pre[pb[x] as usize] != ps[pre[x]] as usize);
                if let Some(x) = bad {
                    return Ok(EmbeddingReport::fail(
                        checked,
                        format!("substitution p{i}{j} not preserved at {}", big.name(x)),
                    ));
                }
                let size = (0..small.len()).find(|&a| copy_map[a].len() != copy_map[ps[a] as usize].len());
                if let Some(a) = size {
                    return Ok(EmbeddingReport::fail(
                        checked,
                        format!("substitution p{i}{j} changes the copy count at {}", small.name(a)),
                    ));
                }
            }
        }
    }
    Ok(EmbeddingReport::ok(checked))
}

/// `c_i(h(a)) = h(c_i(a))` for every small atom `a`.
fn check_cylindrifier(
    small: &CaAtomStructure,
    big: &CaAtomStructure,
    copy_map: &[Vec<usize>],
    pre: &[usize],
    i: usize,
) -> Option<String> {
    if let (Accessibility::Partition(sc), Accessibility::Partition(bc)) = (small.ti(i), big.ti(i)) {
        // Each big class must project onto exactly one whole small class.
        let mut small_size: HashMap<u32, usize> = HashMap::new();
        for &c in sc {
            *small_size.entry(c).or_default() += 1;
        }
        let mut proj: HashMap<u32, (u32, Vec<usize>)> = HashMap::new();
        for x in 0..big.len() {
            let a = pre[x];
            let entry = proj.entry(bc[x]).or_insert_with(|| (sc[a], Vec::new()));
            if entry.0 != sc[a] {
                return Some(format!(
                    "c{i} not preserved: {} and {} share a t{i}-class above different classes",
                    big.name(x),
                    big.name(copy_map[entry.1[0]][0])
                ));
            }
            entry.1.push(a);
        }
        let mut classes: Vec<_> = proj.into_iter().collect();
        classes.sort_by_key(|(c, _)| *c);
        for (_, (k, mut atoms)) in classes {
            atoms.sort_unstable();
            atoms.dedup();
            if atoms.len() != small_size[&k] {
                let missing = (0..small.len()).find(|&a| sc[a] == k && atoms.binary_search(&a).is_err()).unwrap();
                return Some(format!(
                    "c{i} not preserved: a t{i}-class over {} misses every copy of {}",
                    small.name(atoms[0]),
                    small.name(missing)
                ));
            }
        }
        return None;
    }
    let h = image_bits(copy_map, big.len());
    (0..small.len()).into_par_iter().find_map_first(|a| {
        let lhs = big.ti(i).saturate(&h[a]);
        let mut rhs = FixedBitSet::with_capacity(big.len());
        for b in small.ti(i).class_of(a) {
            rhs.union_with(&h[b]);
        }
        (lhs != rhs).then(|| format!("c{i} not preserved at {}", small.name(a)))
    })
}
