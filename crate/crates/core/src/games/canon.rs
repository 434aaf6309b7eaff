//! Canonical relabelling of small node-labelled structures.

/// Returns the node order (`order[new] = old`) whose encoding is least among
/// all orders compatible with colour refinement, together with that encoding.
///
/// `init` is an isomorphism-invariant colour per node and `pair(u, v)` an
/// invariant of the ordered pair; `encode` must be injective on structures
/// up to the given order.
pub(crate) fn canonical_order(
    k: usize,
    init: Vec<u64>,
    pair: impl Fn(usize, usize) -> u64,
    encode: impl Fn(&[usize]) -> Vec<u32>,
) -> (Vec<usize>, Vec<u32>) {
    let mut colour = rank(&init);
    loop {
        let sigs: Vec<(u64, Vec<(u64, u64)>)> = (0..k)
            .map(|v| {
                let mut around: Vec<(u64, u64)> =
                    (0..k).filter(|&u| u != v).map(|u| (pair(v, u), colour[u])).collect();
                around.sort_unstable();
                (colour[v], around)
            })
            .collect();
        let next = rank(&sigs);
        let classes = |c: &[u64]| {
            let mut d = c.to_vec();
            d.sort_unstable();
            d.dedup();
            d.len()
        };
        let done = classes(&next) == classes(&colour);
        colour = next;
        if done {
            break;
        }
    }
    // Cells in colour order; every order is a choice of permutation per cell.
    let mut nodes: Vec<usize> = (0..k).collect();
    nodes.sort_by_key(|&v| colour[v]);
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for v in nodes {
        match cells.last_mut() {
            Some(c) if colour[c[0]] == colour[v] => c.push(v),
            _ => cells.push(vec![v]),
        }
    }
    let mut best: Option<(Vec<usize>, Vec<u32>)> = None;
    let mut order = Vec::with_capacity(k);
    search(&cells, 0, &mut order, &encode, &mut best);
    best.unwrap_or_default()
}

fn search(
    cells: &[Vec<usize>],
    at: usize,
    order: &mut Vec<usize>,
    encode: &impl Fn(&[usize]) -> Vec<u32>,
    best: &mut Option<(Vec<usize>, Vec<u32>)>,
) {
    if at == cells.len() {
        let code = encode(order);
        if best.as_ref().is_none_or(|(_, b)| code < *b) {
            *best = Some((order.clone(), code));
        }
        return;
    }
    let mut cell = cells[at].clone();
    permute(&mut cell, 0, &mut |p| {
        let len = order.len();
        order.extend_from_slice(p);
        search(cells, at + 1, order, encode, best);
        order.truncate(len);
    });
}

fn permute(xs: &mut [usize], k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == xs.len() {
        f(xs);
        return;
    }
    for i in k..xs.len() {
        xs.swap(k, i);
        permute(xs, k + 1, f);
        xs.swap(k, i);
    }
}

/// Dense ranks of the values, in sorted order.
fn rank<T: Ord + Clone>(xs: &[T]) -> Vec<u64> {
    let mut sorted = xs.to_vec();
    sorted.sort();
    sorted.dedup();
    xs.iter().map(|x| sorted.binary_search(x).unwrap() as u64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isomorphic_digraphs_get_one_code() {
        // A directed path 0 -> 1 -> 2 and the same path relabelled 2 -> 0 -> 1.
        let canon = |edges: &[(usize, usize)]| {
            let has = |u, v| edges.contains(&(u, v));
            canonical_order(
                3,
                vec![0; 3],
                |u, v| has(u, v) as u64 * 2 + has(v, u) as u64,
                |o| {
                    let mut c = Vec::new();
                    for &u in o {
                        for &v in o {
                            c.push(has(u, v) as u32);
                        }
                    }
                    c
                },
            )
            .1
        };
        assert_eq!(canon(&[(0, 1), (1, 2)]), canon(&[(2, 0), (0, 1)]));
        assert_ne!(canon(&[(0, 1), (1, 2)]), canon(&[(0, 1), (0, 2)]));
    }
}
