//! Plain game-tree search for the pebble game, and the small partial orders it runs over.

use std::collections::{HashMap, HashSet};

use arcade_core::games::{ef_winner, EfConfig, Player, Rounds, SolverOptions};
use arcade_core::graph::OrderedStructure;

/// Strict partial orders on `n` points, one per isomorphism class, as relation bitmasks.
pub fn posets(n: usize) -> Vec<Vec<(usize, usize)>> {
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b))).collect();
    let perms = permutations(n);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 0u32..1 << cells.len() {
        let rel: Vec<(usize, usize)> = cells.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &c)| c).collect();
        let has = |a: usize, b: usize| rel.contains(&(a, b));
        let antisym = rel.iter().all(|&(a, b)| !has(b, a));
        let trans = rel.iter().all(|&(a, b)| (0..n).all(|c| !has(b, c) || has(a, c)));
        if !antisym || !trans {
            continue;
        }
        let canon = perms
            .iter()
            .map(|p| {
                let mut r: Vec<(usize, usize)> = rel.iter().map(|&(a, b)| (p[a], p[b])).collect();
                r.sort();
                r
            })
            .min()
            .unwrap();
        if seen.insert(canon.clone()) {
            out.push(canon);
        }
    }
    out
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

pub struct Tree<'a> {
    pub a: &'a [Vec<bool>],
    pub b: &'a [Vec<bool>],
    pub memo: HashMap<(Vec<Option<(usize, usize)>>, u32), bool>,
}

impl Tree<'_> {
    fn consistent(&self, peb: &[Option<(usize, usize)>]) -> bool {
        let placed: Vec<(usize, usize)> = peb.iter().flatten().copied().collect();
        placed.iter().all(|&(x, y)| {
            placed.iter().all(|&(u, v)| (x != u || y == v) && (!self.a[x][u] || self.b[y][v]))
        })
    }

    /// Does the duplicator survive `r` more rounds?
    pub fn survives(&mut self, peb: Vec<Option<(usize, usize)>>, r: u32) -> bool {
        if r == 0 {
            return true;
        }
        if let Some(&w) = self.memo.get(&(peb.clone(), r)) {
            return w;
        }
        let mut ok = true;
        'outer: for i in 0..peb.len() {
            for x in 0..self.a.len() {
                let mut answered = false;
                for y in 0..self.b.len() {
                    let mut next = peb.clone();
                    next[i] = Some((x, y));
                    if self.consistent(&next) && self.survives(next, r - 1) {
                        answered = true;
                        break;
                    }
                }
                if !answered {
                    ok = false;
                    break 'outer;
                }
            }
        }
        self.memo.insert((peb, r), ok);
        ok
    }
}

pub fn matrix(s: &OrderedStructure) -> Vec<Vec<bool>> {
    (0..s.size()).map(|x| (0..s.size()).map(|y| s.less(x, y)).collect()).collect()
}

/// Every poset on 1 to 4 points up to isomorphism, then the complete graphs on 2 to 4.
pub fn structures() -> Vec<OrderedStructure> {
    let mut out: Vec<OrderedStructure> = Vec::new();
    for n in 1..=4 {
        for rel in posets(n) {
            out.push(OrderedStructure::new(n, rel).unwrap());
        }
    }
    out.extend((2..=4).map(OrderedStructure::complete));
    out
}

pub struct Sweep {
    pub checked: usize,
    pub forall_wins: usize,
    pub mismatches: Vec<String>,
}

/// The solver against the tree search on every pair, 1 to 3 pebbles, 0 to 4 rounds.
pub fn sweep() -> Sweep {
    let structures = structures();
    let opts = SolverOptions::with_workers(1);
    let mut s = Sweep { checked: 0, forall_wins: 0, mismatches: Vec::new() };
    for a in &structures {
        for b in &structures {
            let (ma, mb) = (matrix(a), matrix(b));
            for p in 1..=3 {
                let mut tree = Tree { a: &ma, b: &mb, memo: HashMap::new() };
                for r in 0..=4 {
                    let want = if tree.survives(vec![None; p], r) { Player::Exists } else { Player::Forall };
                    let cfg = EfConfig { a: a.clone(), b: b.clone(), pebbles: p, rounds: Rounds::Finite(r) };
                    let got = ef_winner(&cfg, opts).unwrap().winner;
                    s.checked += 1;
                    s.forall_wins += (want == Player::Forall) as usize;
                    if got != want {
                        s.mismatches.push(format!("{:?} vs {:?}, {p} pebbles, {r} rounds: {got:?} not {want:?}", a.pairs(), b.pairs()));
                    }
                }
            }
        }
    }
    s
}
