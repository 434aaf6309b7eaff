//! Rainbow cylindric atom structures built from coloured graphs.
//!
//! Colours are indexed by two ordered structures: `A` indexes the greens
//! `g_0^a` and the shades `y_S` (`S ⊆ A`), `B` indexes the reds `r_{bb'}`.

mod atoms;
mod coloured;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

pub use atoms::{
    enumerate_atoms, enumerate_atoms_with_cap, graph_network_translation, red_copy_map, AtomicNetwork,
    GraphOrNetwork, RainbowAtom, RainbowAtoms, DEFAULT_ATOM_CAP,
};
pub use coloured::{check_coloured_graph, ColouredGraph, GraphReport, GraphViolation};
pub(crate) use coloured::{extend_graph, EdgeChoice};

use crate::error::{Error, Result};
use crate::graph::OrderedStructure;

/// Largest green index structure accepted; shades are subsets of `A` stored as bitmasks.
pub const MAX_GREEN_INDEX: usize = 12;

/// An edge colour. Reds are oriented: if `(x, y)` is `r_{bb'}` then `(y, x)` is `r_{b'b}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Colour {
    /// `g_i` for `1 <= i <= n-2`.
    Green(u8),
    /// `g_0^a` for `a` in `A`.
    Green0(u8),
    White,
    /// `w_i` for `i < n-2`.
    WhiteI(u8),
    Yellow,
    /// `r_{from,to}`, with a copy index once reds are split.
    Red { from: u8, to: u8, copy: Option<u8> },
    Rho,
}

impl Colour {
    pub fn converse(self) -> Colour {
        match self {
            Colour::Red { from, to, copy } => Colour::Red { from: to, to: from, copy },
            c => c,
        }
    }

    pub fn is_green(self) -> bool {
        matches!(self, Colour::Green(_) | Colour::Green0(_))
    }

    pub fn is_red(self) -> bool {
        matches!(self, Colour::Red { .. })
    }

    /// Forgets the copy index of a red.
    pub fn uncopied(self) -> Colour {
        match self {
            Colour::Red { from, to, .. } => Colour::Red { from, to, copy: None },
            c => c,
        }
    }
}

impl fmt::Display for Colour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Colour::Green(i) => write!(f, "g{i}"),
            Colour::Green0(a) => write!(f, "g0({a})"),
            Colour::White => write!(f, "w"),
            Colour::WhiteI(i) => write!(f, "w{i}"),
            Colour::Yellow => write!(f, "y"),
            Colour::Red { from, to, copy: None } => write!(f, "r({from},{to})"),
            Colour::Red { from, to, copy: Some(l) } => write!(f, "r({from},{to})^{l}"),
            Colour::Rho => write!(f, "rho"),
        }
    }
}

impl FromStr for Colour {
    type Err = Error;

    fn from_str(s: &str) -> Result<Colour> {
        let bad = || Error::Parse(format!("colour `{s}`"));
        let num = |t: &str| t.parse::<u8>().map_err(|_| bad());
        match s {
            "w" => return Ok(Colour::White),
            "y" => return Ok(Colour::Yellow),
            "rho" => return Ok(Colour::Rho),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("g0(") {
            return Ok(Colour::Green0(num(rest.strip_suffix(')').ok_or_else(bad)?)?));
        }
        if let Some(rest) = s.strip_prefix("r(") {
            let (pair, copy) = match rest.split_once(")^") {
                Some((p, l)) => (p, Some(num(l)?)),
                None => (rest.strip_suffix(')').ok_or_else(bad)?, None),
            };
            let (from, to) = pair.split_once(',').ok_or_else(bad)?;
            return Ok(Colour::Red { from: num(from)?, to: num(to)?, copy });
        }
        if let Some(i) = s.strip_prefix('g') {
            return Ok(Colour::Green(num(i)?));
        }
        if let Some(i) = s.strip_prefix('w') {
            return Ok(Colour::WhiteI(num(i)?));
        }
        Err(bad())
    }
}

/// Colour inventory and forbidden triangles of one rainbow construction.
#[derive(Clone)]
pub struct RainbowSignature {
    n: usize,
    a: OrderedStructure,
    b: OrderedStructure,
    copies: Option<usize>,
    palette: Palette,
}

impl PartialEq for RainbowSignature {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.a == other.a && self.b == other.b && self.copies == other.copies
    }
}

impl Eq for RainbowSignature {}

impl fmt::Debug for RainbowSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RainbowSignature")
            .field("n", &self.n)
            .field("a", &self.a.pairs())
            .field("b", &self.b.pairs())
            .field("copies", &self.copies)
            .finish()
    }
}

impl RainbowSignature {
    pub fn new(n: usize, a: OrderedStructure, b: OrderedStructure) -> Result<Self> {
        Self::build(n, a, b, None)
    }

    fn build(n: usize, a: OrderedStructure, b: OrderedStructure, copies: Option<usize>) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("rainbow dimension must be at least 3, got {n}")));
        }
        if a.size() == 0 || b.size() == 0 {
            return Err(Error::InvalidParameter("A and B must be nonempty".into()));
        }
        if a.size() > MAX_GREEN_INDEX {
            return Err(Error::CapExceeded { what: "green index size", size: a.size() as u128, cap: MAX_GREEN_INDEX as u128 });
        }
        if b.size() > 64 || n > 16 || copies.unwrap_or(1) > 64 {
            return Err(Error::InvalidParameter("red index, dimension or copy count too large".into()));
        }
        let mut sig = RainbowSignature { n, a, b, copies, palette: Palette::default() };
        sig.palette = Palette::new(&sig);
        Ok(sig)
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn greens(&self) -> &OrderedStructure {
        &self.a
    }

    pub fn reds(&self) -> &OrderedStructure {
        &self.b
    }

    /// Number of red copies, `None` when reds are not split.
    pub fn copies(&self) -> Option<usize> {
        self.copies
    }

    /// The same signature with reds unsplit.
    pub fn base(&self) -> RainbowSignature {
        Self::build(self.n, self.a.clone(), self.b.clone(), None).unwrap()
    }

    /// Every edge colour of the signature, in a fixed order.
    pub fn colours(&self) -> &[Colour] {
        &self.palette.colours
    }

    pub fn contains(&self, c: Colour) -> bool {
        self.palette.index.contains_key(&c)
    }

    /// Bitmask of the full shade `y_A`.
    pub fn full_shade(&self) -> u32 {
        (1u32 << self.a.size()) - 1
    }

    /// Name of the forbidden-triangle clause hit by a triangle `x, y, z` whose
    /// edges `(x,y)`, `(y,z)`, `(x,z)` carry the given colours.
    pub fn forbidden_triangle(&self, xy: Colour, yz: Colour, xz: Colour) -> Option<&'static str> {
        let p = &self.palette;
        match (p.index.get(&xy), p.index.get(&yz), p.index.get(&xz)) {
            (Some(&a), Some(&b), Some(&c)) => p.rule(a, b, c),
            _ => self.triangle_rule(xy, yz, xz),
        }
    }

    pub(crate) fn palette(&self) -> &Palette {
        &self.palette
    }

    /// `{(i,k),(j,l)}` is a partial homomorphism from `A` to `B`.
    fn partial_hom(&self, i: u8, k: u8, j: u8, l: u8) -> bool {
        let (i, j, k, l) = (i as usize, j as usize, k as usize, l as usize);
        if i == j {
            return k == l;
        }
        (!self.a.less(i, j) || self.b.less(k, l)) && (!self.a.less(j, i) || self.b.less(l, k))
    }

    fn triangle_rule(&self, xy: Colour, yz: Colour, xz: Colour) -> Option<&'static str> {
        let all = [xy, yz, xz];
        let count = |f: &dyn Fn(Colour) -> bool| all.iter().filter(|&&c| f(c)).count();
        if count(&|c| c.is_green()) == 3 {
            return Some("green triangle");
        }
        if (1..=self.n - 2).any(|i| count(&|c| c == Colour::Green(i as u8)) == 2) && count(&|c| c == Colour::White) == 1 {
            return Some("(g_i, g_i, w)");
        }
        let green0 = count(&|c| matches!(c, Colour::Green0(_)));
        if green0 >= 1 && count(&|c| c == Colour::Yellow) >= 1 && count(&|c| matches!(c, Colour::WhiteI(_))) >= 1 {
            return Some("(g_0, y, w_i)");
        }
        if green0 == 2 && count(&|c| c == Colour::WhiteI(0)) == 1 {
            return Some("(g_0, g_0, w_0)");
        }
        let edge = |u: usize, v: usize| match (u, v) {
            (0, 1) => xy,
            (1, 0) => xy.converse(),
            (1, 2) => yz,
            (2, 1) => yz.converse(),
            (0, 2) => xz,
            _ => xz.converse(),
        };
        if green0 == 2 {
            for (d, p, q) in [(0, 1, 2), (1, 0, 2), (2, 0, 1)] {
                if let (Colour::Green0(i), Colour::Green0(j), Colour::Red { from, to, .. }) = (edge(d, p), edge(d, q), edge(p, q)) {
                    if !self.partial_hom(i, from, j, to) {
                        return Some("(g_0, g_0, r)");
                    }
                }
            }
        }
        if count(&|c| c == Colour::Yellow) == 3 {
            return Some("(y, y, y)");
        }
        let reds = count(&|c| c.is_red());
        if reds == 3 {
            let ends = |c: Colour| match c {
                Colour::Red { from, to, .. } => (from, to),
                _ => unreachable!(),
            };
            let ((i, j), (j2, k2), (i2, k)) = (ends(xy), ends(yz), ends(xz));
            if !(i == i2 && j == j2 && k2 == k) {
                return Some("red matching");
            }
        }
        let rho = count(&|c| c == Colour::Rho);
        if rho == 1 && reds == 2 {
            return Some("(r, r, rho)");
        }
        if rho == 2 && reds == 1 {
            return Some("(r, rho, rho)");
        }
        None
    }
}

/// Splits every red into `k` copies and adds the shade of red `rho`.
pub fn split_reds(sig: &RainbowSignature, k: usize) -> Result<RainbowSignature> {
    if k == 0 {
        return Err(Error::InvalidParameter("split needs at least one copy".into()));
    }
    if sig.copies.is_some() {
        return Err(Error::Precondition("reds are already split".into()));
    }
    RainbowSignature::build(sig.n, sig.a.clone(), sig.b.clone(), Some(k))
}

/// Colours numbered densely, with converses and the forbidden-triangle table precomputed.
#[derive(Clone, Default)]
pub(crate) struct Palette {
    pub colours: Vec<Colour>,
    pub index: HashMap<Colour, u16>,
    pub conv: Vec<u16>,
    pub green: Vec<bool>,
    pub rho: Option<u16>,
    forbid: Vec<u8>,
}

const RULES: [&str; 10] = [
    "",
    "green triangle",
    "(g_i, g_i, w)",
    "(g_0, y, w_i)",
    "(g_0, g_0, w_0)",
    "(g_0, g_0, r)",
    "(y, y, y)",
    "red matching",
    "(r, r, rho)",
    "(r, rho, rho)",
];

impl Palette {
    fn new(sig: &RainbowSignature) -> Palette {
        let n = sig.n;
        let mut colours = Vec::new();
        colours.extend((1..=n - 2).map(|i| Colour::Green(i as u8)));
        colours.extend((0..sig.a.size()).map(|a| Colour::Green0(a as u8)));
        colours.push(Colour::White);
        colours.extend((0..n - 2).map(|i| Colour::WhiteI(i as u8)));
        colours.push(Colour::Yellow);
        let copies: Vec<Option<u8>> = match sig.copies {
            None => vec![None],
            Some(k) => (0..k).map(|l| Some(l as u8)).collect(),
        };
        for from in 0..sig.b.size() {
            for to in 0..sig.b.size() {
                for &copy in &copies {
                    colours.push(Colour::Red { from: from as u8, to: to as u8, copy });
                }
            }
        }
        if sig.copies.is_some() {
            colours.push(Colour::Rho);
        }
        let index: HashMap<Colour, u16> = colours.iter().enumerate().map(|(i, &c)| (c, i as u16)).collect();
        let conv = colours.iter().map(|c| index[&c.converse()]).collect();
        let green = colours.iter().map(|c| c.is_green()).collect();
        let p = colours.len();
        let mut forbid = vec![0u8; p * p * p];
        for (x, &cx) in colours.iter().enumerate() {
            for (y, &cy) in colours.iter().enumerate() {
                for (z, &cz) in colours.iter().enumerate() {
                    if let Some(rule) = sig.triangle_rule(cx, cy, cz) {
                        forbid[(x * p + y) * p + z] = RULES.iter().position(|r| *r == rule).unwrap() as u8;
                    }
                }
            }
        }
        let rho = index.get(&Colour::Rho).copied();
        Palette { colours, index, conv, green, rho, forbid }
    }

    pub fn len(&self) -> usize {
        self.colours.len()
    }

    pub fn code(&self, c: Colour) -> Option<u16> {
        self.index.get(&c).copied()
    }

    pub fn rule(&self, xy: u16, yz: u16, xz: u16) -> Option<&'static str> {
        let p = self.colours.len();
        match self.forbid[(xy as usize * p + yz as usize) * p + xz as usize] {
            0 => None,
            r => Some(RULES[r as usize]),
        }
    }

    pub fn forbidden(&self, xy: u16, yz: u16, xz: u16) -> bool {
        let p = self.colours.len();
        self.forbid[(xy as usize * p + yz as usize) * p + xz as usize] != 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> RainbowSignature {
        RainbowSignature::new(3, OrderedStructure::complete(3), OrderedStructure::chain(2)).unwrap()
    }

    fn red(from: u8, to: u8) -> Colour {
        Colour::Red { from, to, copy: None }
    }

    #[test]
    fn colour_names_round_trip() {
        let s = split_reds(&sig(), 2).unwrap();
        for &c in s.colours() {
            assert_eq!(c.to_string().parse::<Colour>().unwrap(), c);
        }
        assert_eq!(s.colours().len(), 1 + 3 + 2 + 1 + 8 + 1);
    }

    #[test]
    fn listed_triangles() {
        let s = sig();
        assert_eq!(s.forbidden_triangle(Colour::Green(1), Colour::Green(1), Colour::White), Some("(g_i, g_i, w)"));
        assert_eq!(s.forbidden_triangle(Colour::Yellow, Colour::Yellow, Colour::Yellow), Some("(y, y, y)"));
        assert_eq!(s.forbidden_triangle(red(0, 1), red(1, 1), red(0, 1)), None);
        assert_eq!(s.forbidden_triangle(red(0, 1), red(0, 1), red(0, 1)), Some("red matching"));
        assert_eq!(
            s.forbidden_triangle(Colour::Green0(2), Colour::Yellow, Colour::WhiteI(0)),
            Some("(g_0, y, w_i)")
        );
        assert_eq!(s.forbidden_triangle(Colour::Green0(0), Colour::Green(1), Colour::White), None);
    }

    #[test]
    fn green_apexes_joined_by_red_need_a_partial_hom() {
        // A = chain(2), B = chain(2): x is the shared base node, y and z the apexes.
        let s = RainbowSignature::new(3, OrderedStructure::chain(2), OrderedStructure::chain(2)).unwrap();
        let (g0, g1) = (Colour::Green0(0), Colour::Green0(1));
        assert_eq!(s.forbidden_triangle(g0, red(0, 1), g1), None);
        assert_eq!(s.forbidden_triangle(g0, red(1, 0), g1), Some("(g_0, g_0, r)"));
        assert_eq!(s.forbidden_triangle(g0, red(1, 1), g0), None);
        assert_eq!(s.forbidden_triangle(g0, red(0, 1), g0), Some("(g_0, g_0, r)"));
    }

    #[test]
    fn split_rules_use_base_indices() {
        let s = split_reds(&sig(), 3).unwrap();
        let r = |from, to, l| Colour::Red { from, to, copy: Some(l) };
        assert_eq!(s.forbidden_triangle(r(0, 1, 0), r(1, 1, 1), r(0, 1, 2)), None);
        assert_eq!(s.forbidden_triangle(r(0, 1, 0), Colour::Rho, Colour::Rho), Some("(r, rho, rho)"));
        assert_eq!(s.forbidden_triangle(r(0, 1, 0), r(1, 0, 2), Colour::Rho), Some("(r, r, rho)"));
        assert_eq!(s.forbidden_triangle(Colour::Rho, Colour::Rho, Colour::Rho), None);
    }

    #[test]
    fn one_copy_erases_to_the_unsplit_rules() {
        let base = sig();
        let s = split_reds(&base, 1).unwrap();
        let cs: Vec<Colour> = s.colours().iter().copied().filter(|&c| c != Colour::Rho).collect();
        for &x in &cs {
            for &y in &cs {
                for &z in &cs {
                    assert_eq!(
                        s.forbidden_triangle(x, y, z).is_some(),
                        base.forbidden_triangle(x.uncopied(), y.uncopied(), z.uncopied()).is_some()
                    );
                }
            }
        }
    }

    #[test]
    fn more_reds_never_forbid_old_triangles() {
        let small = RainbowSignature::new(3, OrderedStructure::chain(2), OrderedStructure::chain(2)).unwrap();
        let big = RainbowSignature::new(3, OrderedStructure::chain(2), OrderedStructure::chain(3)).unwrap();
        for &x in small.colours() {
            for &y in small.colours() {
                for &z in small.colours() {
                    if small.forbidden_triangle(x, y, z).is_none() {
                        assert!(big.forbidden_triangle(x, y, z).is_none());
                    }
                }
            }
        }
    }
}
