//! Combinatorial addresses of cells and oriented edges of `K_inf`.
//!
//! A cell `(n, i_1 ... i_k)` is `w_0^{-n} w_{i_1} ... w_{i_k}(K)`, with `w_{i_1}`
//! the outermost map. The corner of a cell (the image of `v_0`) has integer
//! lattice coordinates `(A, B)` at the cell's own scale, and the word can be
//! read off their binary digits: digit `t` is 1 if bit `t` of `A` is set, 2 if
//! bit `t` of `B` is set, 0 otherwise. Cells of the gasket are exactly the
//! corners with `A & B == 0`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::point::TrianglePoint;
use crate::dyadic::DyadicScalar;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellAddress {
    level: u32,
    word: Vec<u8>,
}

impl CellAddress {
    pub fn new(level: u32, word: Vec<u8>) -> Result<Self> {
        if let Some(&d) = word.iter().find(|&&d| d > 2) {
            return Err(Error::Malformed(format!("cell digit {d} not in {{0,1,2}}")));
        }
        Ok(CellAddress { level, word })
    }

    /// `K_n` itself.
    pub fn tower(n: u32) -> Self {
        CellAddress {
            level: n,
            word: Vec::new(),
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    /// Exponent `j` with `size = 2^j`.
    pub fn size_exp(&self) -> i32 {
        self.level as i32 - self.word.len() as i32
    }

    pub fn is_canonical(&self) -> bool {
        self.level == 0 || self.word.first() != Some(&0)
    }

    /// Minimal-level representative: strips leading zeros while the level allows.
    pub fn canonicalize(&self) -> CellAddress {
        let strip = self
            .word
            .iter()
            .take_while(|&&d| d == 0)
            .count()
            .min(self.level as usize);
        CellAddress {
            level: self.level - strip as u32,
            word: self.word[strip..].to_vec(),
        }
    }

    /// Lattice coordinates `(A, B)` of the corner in units of the cell size.
    fn corner_units(&self) -> (BigInt, BigInt) {
        let mut a = BigInt::zero();
        let mut b = BigInt::zero();
        for &d in &self.word {
            a <<= 1;
            b <<= 1;
            match d {
                1 => a += 1,
                2 => b += 1,
                _ => {}
            }
        }
        (a, b)
    }

    /// Image of `v_0`.
    pub fn corner(&self) -> TrianglePoint {
        let (a, b) = self.corner_units();
        let j = self.size_exp() as i64;
        TrianglePoint::new(DyadicScalar::new(a, j), DyadicScalar::new(b, j))
    }

    /// Images of `(v_0, v_1, v_2)`.
    pub fn vertices(&self) -> [TrianglePoint; 3] {
        let c = self.corner();
        let s = DyadicScalar::pow2(self.size_exp() as i64);
        let v1 = TrianglePoint::new(&c.alpha + &s, c.beta.clone());
        let v2 = TrianglePoint::new(c.alpha.clone(), &c.beta + &s);
        [c, v1, v2]
    }

    pub fn vertex(&self, i: u8) -> TrianglePoint {
        self.vertices()[i as usize].clone()
    }

    /// The canonical cell of size `2^size_exp` whose corner is `corner`.
    pub fn from_corner(corner: &TrianglePoint, size_exp: i32) -> Result<CellAddress> {
        let j = size_exp as i64;
        let not_cell = || Error::NotInGasket(format!("{corner} at size 2^{size_exp}"));
        let a = corner.alpha.to_integer_at(j).ok_or_else(not_cell)?;
        let b = corner.beta.to_integer_at(j).ok_or_else(not_cell)?;
        if a.is_negative() || b.is_negative() || !(&a & &b).is_zero() {
            return Err(not_cell());
        }
        let bits = (&a | &b).bits() as i64;
        let level = (j + bits).max(0);
        let len = (level - j) as usize;
        let mut word = Vec::with_capacity(len);
        for t in (0..len).rev() {
            let d = if a.bit(t as u64) {
                1
            } else if b.bit(t as u64) {
                2
            } else {
                0
            };
            word.push(d);
        }
        Ok(CellAddress {
            level: level as u32,
            word,
        })
    }

    /// Recovers the cell from its three vertices given in any order.
    pub fn from_vertex_set(points: &[TrianglePoint; 3]) -> Result<CellAddress> {
        let alpha = points.iter().map(|p| &p.alpha).min().unwrap().clone();
        let beta = points.iter().map(|p| &p.beta).min().unwrap().clone();
        let corner = TrianglePoint::new(alpha, beta);
        let side2 = points[0].squared_distance(&points[1]);
        let j = exponent_of_square(&side2)
            .ok_or_else(|| Error::Malformed(format!("{points:?} is not a gasket cell")))?;
        let cell = CellAddress::from_corner(&corner, j)?;
        let verts = cell.vertices();
        if points.iter().all(|p| verts.contains(p)) {
            Ok(cell)
        } else {
            Err(Error::Malformed(format!("{points:?} is not a gasket cell")))
        }
    }

    /// The word of this cell written at level `level >= self.level`.
    pub fn word_at_level(&self, level: u32) -> Option<Vec<u8>> {
        if level < self.level {
            return None;
        }
        let mut w = vec![0u8; (level - self.level) as usize];
        w.extend_from_slice(&self.word);
        Some(w)
    }

    /// Whether `other` is a subset of `self` (both canonical).
    pub fn contains(&self, other: &CellAddress) -> bool {
        if other.size_exp() > self.size_exp() {
            return false;
        }
        let level = self.level.max(other.level);
        let outer = self.word_at_level(level).unwrap();
        let inner = other.word_at_level(level).unwrap();
        inner.starts_with(&outer)
    }

    /// The cell of size `2^size_exp` containing this one, if the size is not smaller.
    pub fn ancestor(&self, size_exp: i32) -> Option<CellAddress> {
        if size_exp < self.size_exp() {
            return None;
        }
        let level = (self.level as i32).max(size_exp) as u32;
        let w = self.word_at_level(level).unwrap();
        let keep = (level as i32 - size_exp) as usize;
        Some(
            CellAddress {
                level,
                word: w[..keep].to_vec(),
            }
            .canonicalize(),
        )
    }

    /// Whether the dyadic point lies in this cell.
    pub fn contains_point(&self, p: &TrianglePoint) -> bool {
        let local = p.sub(&self.corner()).shl(-(self.size_exp() as i64));
        super::in_unit_gasket(&local)
    }
}

/// `j` with `x = 4^j`, if `x` is an even power of two.
pub(crate) fn exponent_of_square(x: &DyadicScalar) -> Option<i32> {
    if x.mantissa() != &BigInt::one() || x.exponent() % 2 != 0 {
        return None;
    }
    Some((x.exponent() / 2) as i32)
}

impl fmt::Display for CellAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.level)?;
        for d in &self.word {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CellAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for CellAddress {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl FromStr for CellAddress {
    type Err = Error;

    /// `level:word`, e.g. `2:01`; `0:` is the base gasket.
    fn from_str(s: &str) -> Result<Self> {
        let (l, w) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::Malformed(format!("expected `level:word`, got {s:?}")))?;
        let level: u32 = l
            .parse()
            .map_err(|_| Error::Malformed(format!("bad level in {s:?}")))?;
        let word = w
            .chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1),
                '2' => Ok(2),
                _ => Err(Error::Malformed(format!("bad digit {c:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        CellAddress::new(level, word)
    }
}

/// Ordered vertex-index pairs of `E_0`, in enumeration order.
pub const BASE_PAIRS: [(u8, u8); 6] = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)];

/// An oriented edge: the image of the `E_0` edge `(v_i, v_j)` under a cell map.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeAddress {
    pub cell: CellAddress,
    pub base: (u8, u8),
}

impl EdgeAddress {
    pub fn new(cell: CellAddress, base: (u8, u8)) -> Result<Self> {
        let (i, j) = base;
        if i > 2 || j > 2 || i == j {
            return Err(Error::Malformed(format!("edge base pair ({i},{j})")));
        }
        Ok(EdgeAddress { cell, base })
    }

    pub fn is_canonical(&self) -> bool {
        self.cell.is_canonical()
    }

    pub fn canonicalize(&self) -> EdgeAddress {
        EdgeAddress {
            cell: self.cell.canonicalize(),
            base: self.base,
        }
    }

    /// `length = 2^len_exp`.
    pub fn len_exp(&self) -> i32 {
        self.cell.size_exp()
    }

    pub fn reversed(&self) -> EdgeAddress {
        EdgeAddress {
            cell: self.cell.clone(),
            base: (self.base.1, self.base.0),
        }
    }

    /// `(e^-, e^+)`.
    pub fn endpoints(&self) -> (TrianglePoint, TrianglePoint) {
        let v = self.cell.vertices();
        (
            v[self.base.0 as usize].clone(),
            v[self.base.1 as usize].clone(),
        )
    }

    pub fn source(&self) -> TrianglePoint {
        self.cell.vertex(self.base.0)
    }

    pub fn target(&self) -> TrianglePoint {
        self.cell.vertex(self.base.1)
    }

    /// The unique canonical edge from `from` to `to`.
    pub fn from_endpoints(from: &TrianglePoint, to: &TrianglePoint) -> Result<EdgeAddress> {
        let len2 = from.squared_distance(to);
        let j = exponent_of_square(&len2)
            .ok_or_else(|| Error::Malformed(format!("{from} -> {to} is not a gasket edge")))?;
        let corner = TrianglePoint::new(
            from.alpha.clone().min(to.alpha.clone()),
            from.beta.clone().min(to.beta.clone()),
        );
        let cell = CellAddress::from_corner(&corner, j)?;
        let v = cell.vertices();
        let i = v.iter().position(|p| p == from);
        let k = v.iter().position(|p| p == to);
        match (i, k) {
            (Some(i), Some(k)) if i != k => EdgeAddress::new(cell, (i as u8, k as u8)),
            _ => Err(Error::Malformed(format!(
                "{from} -> {to} is not a gasket edge"
            ))),
        }
    }
}

impl fmt::Display for EdgeAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}{}", self.cell, self.base.0, self.base.1)
    }
}

impl FromStr for EdgeAddress {
    type Err = Error;

    /// `level:word/ij`, e.g. `1:2/01`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Malformed(format!("expected `level:word/ij`, got {s:?}"));
        let (c, b) = s.trim().split_once('/').ok_or_else(bad)?;
        let d: Vec<u8> = b
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(bad))
            .collect::<Result<_>>()?;
        match d[..] {
            [i, j] => EdgeAddress::new(c.parse()?, (i, j)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Debug for EdgeAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(s: &str) -> CellAddress {
        s.parse().unwrap()
    }

    fn pt(a: &str, b: &str) -> TrianglePoint {
        TrianglePoint::new(a.parse().unwrap(), b.parse().unwrap())
    }

    #[test]
    fn canonicalize_strips_leading_zeros() {
        assert_eq!(cell("2:01").canonicalize(), cell("1:1"));
        assert_eq!(cell("0:012").canonicalize(), cell("0:012"));
        assert_eq!(cell("3:001").canonicalize(), cell("1:1"));
        assert_eq!(cell("2:00").canonicalize(), cell("0:"));
        let c = cell("3:0012");
        assert_eq!(c.canonicalize().canonicalize(), c.canonicalize());
    }

    #[test]
    fn vertices_of_small_cells() {
        assert_eq!(
            cell("0:").vertices(),
            [pt("0", "0"), pt("1", "0"), pt("0", "1")]
        );
        assert_eq!(
            cell("0:0").vertices(),
            [pt("0", "0"), pt("1/2", "0"), pt("0", "1/2")]
        );
        assert_eq!(
            cell("1:1").vertices(),
            [pt("1", "0"), pt("2", "0"), pt("1", "1")]
        );
    }

    #[test]
    fn corner_roundtrip() {
        for s in ["0:", "0:0", "1:1", "2:12", "3:210", "0:0120", "4:1"] {
            let c = cell(s).canonicalize();
            assert_eq!(
                CellAddress::from_corner(&c.corner(), c.size_exp()).unwrap(),
                c
            );
            let mut v = c.vertices();
            v.rotate_left(1);
            assert_eq!(CellAddress::from_vertex_set(&v).unwrap(), c);
        }
        // (1/2, 1/2) is the corner of no size-1/2 cell
        assert!(CellAddress::from_corner(&pt("1/2", "1/2"), -1).is_err());
    }

    #[test]
    fn containment() {
        assert!(cell("1:").contains(&cell("0:")));
        assert!(cell("1:").contains(&cell("1:1")));
        assert!(cell("1:1").contains(&cell("1:12")));
        assert!(!cell("1:1").contains(&cell("1:2")));
        assert!(!cell("0:").contains(&cell("1:")));
        assert_eq!(cell("2:12").ancestor(1), Some(cell("2:1")));
        assert_eq!(cell("0:01").ancestor(0), Some(cell("0:")));
        assert_eq!(cell("0:01").ancestor(2), Some(cell("2:")));
    }

    #[test]
    fn edge_endpoints_examples() {
        let e = EdgeAddress::new(cell("0:"), (0, 1)).unwrap();
        assert_eq!(e.endpoints(), (pt("0", "0"), pt("1", "0")));
        let e = EdgeAddress::new(cell("0:0"), (1, 2)).unwrap();
        let (a, b) = e.endpoints();
        assert_eq!((a.clone(), b.clone()), (pt("1/2", "0"), pt("0", "1/2")));
        assert_eq!(a.squared_distance(&b), "1/4".parse().unwrap());
        let r = e.reversed();
        assert_eq!(r.endpoints(), (b, a));
    }

    #[test]
    fn edge_lookup_from_endpoints() {
        for s in ["0:", "0:0", "1:1", "2:21", "0:1202"] {
            for &base in &BASE_PAIRS {
                let e = EdgeAddress::new(cell(s).canonicalize(), base).unwrap();
                let (a, b) = e.endpoints();
                assert_eq!(EdgeAddress::from_endpoints(&a, &b).unwrap(), e);
            }
        }
        // (0,0) -> (1,1) is not an edge
        assert!(EdgeAddress::from_endpoints(&pt("0", "0"), &pt("1", "1")).is_err());
    }

    #[test]
    fn parse_display() {
        assert_eq!(cell("2:01").to_string(), "2:01");
        assert_eq!(cell("0:").to_string(), "0:");
        assert!("x:1".parse::<CellAddress>().is_err());
        assert!("1:3".parse::<CellAddress>().is_err());
    }
}
