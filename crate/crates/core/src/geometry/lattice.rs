//! Integer lattice view of the gasket at a fixed resolution.
//!
//! At resolution `r` every vertex of `K_n` has coordinates `(a, b) * 2^-r` with
//! integer `a, b`. Working in these units keeps the hot loops (quadrature,
//! shortest paths, seminorms) free of big-integer arithmetic.

use std::collections::HashMap;

use crate::dyadic::DyadicScalar;
use crate::error::{Error, Result};

use super::point::TrianglePoint;

/// Largest `n + r` accepted by the lattice routines (coordinates stay far below `i64::MAX`).
pub const MAX_LATTICE_BITS: u32 = 40;

/// Corners `(A, B)`, in units of the cell size, of all cells of size `2^-bits`
/// relative to `K`. Ordered lexicographically by address word.
pub fn lattice_corners(bits: u32) -> Vec<(i64, i64)> {
    let mut cur = vec![(0i64, 0i64)];
    for _ in 0..bits {
        let mut next = Vec::with_capacity(cur.len() * 3);
        for &(a, b) in &cur {
            next.push((2 * a, 2 * b));
            next.push((2 * a + 1, 2 * b));
            next.push((2 * a, 2 * b + 1));
        }
        cur = next;
    }
    cur
}

/// Whether `(a, b)` is the corner of a unit cell of the lattice gasket of side `2^bits`.
pub fn is_corner(a: i64, b: i64, bits: u32) -> bool {
    a >= 0 && b >= 0 && a & b == 0 && (a | b) < (1i64 << bits)
}

/// Whether `(a, b)` is a vertex of the lattice gasket of side `2^bits`.
pub fn is_vertex(a: i64, b: i64, bits: u32) -> bool {
    is_corner(a, b, bits) || is_corner(a - 1, b, bits) || is_corner(a, b - 1, bits)
}

/// Vertices of `K_n` joined by edges of length `2^-r`.
#[derive(Clone, Debug)]
pub struct VertexSet {
    level: u32,
    resolution: i32,
    coords: Vec<(i64, i64)>,
    index: HashMap<(i64, i64), usize>,
    adjacency: Vec<Vec<usize>>,
}

impl VertexSet {
    pub fn new(level: u32, resolution: i32) -> Result<Self> {
        let bits = level as i32 + resolution;
        if bits < 0 {
            return Err(Error::InvalidRange {
                min: -resolution,
                max: level as i32,
            });
        }
        let bits = bits as u32;
        if bits > MAX_LATTICE_BITS {
            return Err(Error::Malformed(format!(
                "level + resolution = {bits} exceeds {MAX_LATTICE_BITS}"
            )));
        }
        let corners = lattice_corners(bits);
        let mut coords: Vec<(i64, i64)> = Vec::with_capacity(corners.len() * 3 / 2 + 3);
        for &(a, b) in &corners {
            coords.push((a, b));
        }
        coords.push((1i64 << bits, 0));
        coords.push((0, 1i64 << bits));
        for &(a, b) in &corners {
            coords.push((a + 1, b));
            coords.push((a, b + 1));
        }
        coords.sort_unstable();
        coords.dedup();
        let index: HashMap<_, _> = coords.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut adjacency = vec![Vec::with_capacity(4); coords.len()];
        for &(a, b) in &corners {
            let v = [index[&(a, b)], index[&(a + 1, b)], index[&(a, b + 1)]];
            for (x, y) in [(0, 1), (0, 2), (1, 2)] {
                adjacency[v[x]].push(v[y]);
                adjacency[v[y]].push(v[x]);
            }
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        Ok(VertexSet {
            level,
            resolution,
            coords,
            index,
            adjacency,
        })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn resolution(&self) -> i32 {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Lattice coordinates in units of `2^-r`, sorted.
    pub fn coords(&self) -> &[(i64, i64)] {
        &self.coords
    }

    pub fn index_of(&self, a: i64, b: i64) -> Option<usize> {
        self.index.get(&(a, b)).copied()
    }

    /// Index of an exact point, if it is one of the sampled vertices.
    pub fn index_of_point(&self, p: &TrianglePoint) -> Option<usize> {
        let e = -(self.resolution as i64);
        let a = p.alpha.to_i64_at(e)?;
        let b = p.beta.to_i64_at(e)?;
        self.index_of(a, b)
    }

    pub fn point(&self, i: usize) -> TrianglePoint {
        let (a, b) = self.coords[i];
        let e = -(self.resolution as i64);
        TrianglePoint::new(DyadicScalar::new(a, e), DyadicScalar::new(b, e))
    }

    pub fn points(&self) -> Vec<TrianglePoint> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    /// Number of undirected finest-level edges.
    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corner_counts() {
        for bits in 0..7 {
            let c = lattice_corners(bits);
            assert_eq!(c.len(), 3usize.pow(bits));
            assert!(c.iter().all(|&(a, b)| is_corner(a, b, bits)));
        }
    }

    #[test]
    fn small_vertex_sets() {
        let v = VertexSet::new(0, 0).unwrap();
        assert_eq!((v.len(), v.edge_count()), (3, 3));
        assert_eq!(VertexSet::new(0, 1).unwrap().len(), 6);
        assert_eq!(VertexSet::new(0, 2).unwrap().len(), 15);
        assert_eq!(VertexSet::new(1, 0).unwrap().len(), 6);
        assert!(VertexSet::new(0, -1).is_err());
    }

    #[test]
    fn vertex_count_formula_and_degrees() {
        for m in 0..8u32 {
            let v = VertexSet::new(0, m as i32).unwrap();
            assert_eq!(v.len(), 3 * (3usize.pow(m) + 1) / 2);
            assert_eq!(v.edge_count(), 3usize.pow(m + 1));
            let corners = (0..v.len()).filter(|&i| v.neighbors(i).len() == 2).count();
            assert_eq!(corners, 3);
            assert!((0..v.len()).all(|i| matches!(v.neighbors(i).len(), 2 | 4)));
        }
    }

    #[test]
    fn vertex_membership_matches_set() {
        let bits = 4;
        let v = VertexSet::new(0, bits as i32).unwrap();
        let side = 1i64 << bits;
        for a in -1..=side + 1 {
            for b in -1..=side + 1 {
                assert_eq!(
                    is_vertex(a, b, bits),
                    v.index_of(a, b).is_some(),
                    "({a},{b})"
                );
            }
        }
    }
}
