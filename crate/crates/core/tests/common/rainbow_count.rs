//! Rainbow atoms counted by brute force, with a checker written from scratch:
//! every map from three coordinates onto a coloured graph on its image, every
//! colouring and shading of that graph, quotiented by relabelling the image.

use std::collections::HashSet;

const GREENS: usize = 3; // A = complete irreflexive graph on 3 points
const REDS: usize = 2; // B = chain(2)

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum C {
    G1,
    G0(usize),
    W,
    W0,
    Y,
    R(usize, usize),
}

fn palette() -> Vec<C> {
    let mut p = vec![C::G1, C::W, C::W0, C::Y];
    p.extend((0..GREENS).map(C::G0));
    for i in 0..REDS {
        for j in 0..REDS {
            p.push(C::R(i, j));
        }
    }
    p
}

fn flip(c: C) -> C {
    match c {
        C::R(i, j) => C::R(j, i),
        c => c,
    }
}

fn green(c: C) -> bool {
    matches!(c, C::G1 | C::G0(_))
}

fn a_less(i: usize, j: usize) -> bool {
    i != j
}

fn b_less(k: usize, l: usize) -> bool {
    k < l
}

/// Colour of the directed edge `u -> v` in a graph stored as an upper triangle.
fn col(g: &[[Option<C>; 3]; 3], u: usize, v: usize) -> C {
    if u < v {
        g[u][v].unwrap()
    } else {
        flip(g[v][u].unwrap())
    }
}

fn bad_triangle(g: &[[Option<C>; 3]; 3], t: [usize; 3]) -> bool {
    let [x, y, z] = t;
    let es = [col(g, x, y), col(g, y, z), col(g, x, z)];
    let has = |p: &dyn Fn(C) -> bool| es.iter().filter(|&&c| p(c)).count();
    if has(&green) == 3 || has(&|c| c == C::Y) == 3 {
        return true;
    }
    if has(&|c| c == C::G1) == 2 && has(&|c| c == C::W) == 1 {
        return true;
    }
    let g0 = has(&|c| matches!(c, C::G0(_)));
    if g0 >= 1 && has(&|c| c == C::Y) >= 1 && has(&|c| c == C::W0) >= 1 {
        return true;
    }
    if g0 == 2 && has(&|c| c == C::W0) == 1 {
        return true;
    }
    // Two g_0 edges meeting at d, red on the opposite side p -> q.
    for d in t {
        let others: Vec<usize> = t.iter().copied().filter(|&v| v != d).collect();
        for (p, q) in [(others[0], others[1]), (others[1], others[0])] {
            if let (C::G0(i), C::G0(j), C::R(k, l)) = (col(g, d, p), col(g, d, q), col(g, p, q)) {
                let hom = if i == j {
                    k == l
                } else {
                    (!a_less(i, j) || b_less(k, l)) && (!a_less(j, i) || b_less(l, k))
                };
                if !hom {
                    return true;
                }
            }
        }
    }
    // Three reds: every node reads one index off all its outgoing reds.
    if es.iter().all(|c| matches!(c, C::R(..))) {
        for v in t {
            let idx: HashSet<usize> = t
                .iter()
                .filter(|&&u| u != v)
                .map(|&u| match col(g, v, u) {
                    C::R(a, _) => a,
                    _ => unreachable!(),
                })
                .collect();
            if idx.len() > 1 {
                return true;
            }
        }
    }
    false
}

fn valid(k: usize, g: &[[Option<C>; 3]; 3], shade: &[[Option<u32>; 3]; 3]) -> bool {
    if k == 3 && bad_triangle(g, [0, 1, 2]) {
        return false;
    }
    for u in 0..k {
        for v in u + 1..k {
            if green(col(g, u, v)) != shade[u][v].is_none() {
                return false;
            }
        }
    }
    if k == 3 {
        for apex in 0..3 {
            let base: Vec<usize> = (0..3).filter(|&v| v != apex).collect();
            let (p, q) = (base[0], base[1]);
            let tint = match (col(g, apex, p), col(g, apex, q)) {
                (C::G0(a), C::G1) | (C::G1, C::G0(a)) => a,
                _ => continue,
            };
            if let Some(s) = shade[p][q] {
                if s >> tint & 1 == 0 {
                    return false;
                }
            }
        }
    }
    true
}

type Key = (Vec<usize>, Vec<C>, Vec<Option<u32>>);

/// Atoms for `n = 3`, greens the complete graph on 3 points, reds `chain(2)`.
pub fn count() -> usize {
    let pal = palette();
    let mut keys: HashSet<Key> = HashSet::new();
    for code in 0..27usize {
        let f = [code % 3, code / 3 % 3, code / 9];
        // Relabel the image by first occurrence.
        let mut order: Vec<usize> = Vec::new();
        for &x in &f {
            if !order.contains(&x) {
                order.push(x);
            }
        }
        let k = order.len();
        let kernel: Vec<usize> = f.iter().map(|x| order.iter().position(|y| y == x).unwrap()).collect();
        let pairs: Vec<(usize, usize)> = (0..k).flat_map(|u| (u + 1..k).map(move |v| (u, v))).collect();
        let mut colouring = vec![0usize; pairs.len()];
        loop {
            let mut g = [[None; 3]; 3];
            for (e, &(u, v)) in pairs.iter().enumerate() {
                g[u][v] = Some(pal[colouring[e]]);
            }
            let free: Vec<usize> = (0..pairs.len()).filter(|&e| !green(pal[colouring[e]])).collect();
            for shades in 0..1usize << (GREENS * free.len()) {
                let mut sh = [[None; 3]; 3];
                for (t, &e) in free.iter().enumerate() {
                    let (u, v) = pairs[e];
                    sh[u][v] = Some((shades >> (GREENS * t) & 7) as u32);
                }
                if valid(k, &g, &sh) {
                    let cols = pairs.iter().map(|&(u, v)| g[u][v].unwrap()).collect();
                    let shs = pairs.iter().map(|&(u, v)| sh[u][v]).collect();
                    keys.insert((kernel.clone(), cols, shs));
                }
            }
            // Next colouring.
            let mut e = 0;
            while e < colouring.len() {
                colouring[e] += 1;
                if colouring[e] < pal.len() {
                    break;
                }
                colouring[e] = 0;
                e += 1;
            }
            if e == colouring.len() {
                break;
            }
        }
    }
    keys.len()
}
