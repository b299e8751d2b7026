use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{enumerate_edges, lattice_corners, CellAddress, EdgeAddress, BASE_PAIRS};
use crate::groupoid::LocalIsometry;

type Lattice = (i64, i64);

/// The edges `E^{k,p}_n` of `K_n` with `2^k <= length <= 2^p`, in canonical order.
///
/// Besides the addresses, every edge carries integer data in units of `2^k`:
/// the corner of its cell and its two endpoints. Operators index rows and
/// columns by position in `basis`.
#[derive(Clone, Debug)]
pub struct EdgeWindow {
    level: u32,
    min_exp: i32,
    max_exp: i32,
    basis: Vec<EdgeAddress>,
    len_exp: Vec<i32>,
    corner: Vec<Lattice>,
    ends: Vec<(Lattice, Lattice)>,
    cell_level: Vec<u32>,
    by_ends: HashMap<(Lattice, Lattice), usize>,
}

fn vertex_offset(i: u8) -> Lattice {
    match i {
        0 => (0, 0),
        1 => (1, 0),
        _ => (0, 1),
    }
}

impl EdgeWindow {
    pub fn new(level: u32, min_exp: i32, max_exp: i32) -> Result<Self> {
        if min_exp > max_exp || max_exp > level as i32 {
            return Err(Error::InvalidRange {
                min: min_exp,
                max: max_exp,
            });
        }
        if level as i32 - min_exp > 20 {
            return Err(Error::Malformed(format!(
                "window ({level}, {min_exp}, {max_exp}) is too large"
            )));
        }
        let basis = enumerate_edges(level, min_exp, max_exp)?;
        let mut len_exp = Vec::with_capacity(basis.len());
        let mut corner = Vec::with_capacity(basis.len());
        let mut ends = Vec::with_capacity(basis.len());
        for j in (min_exp..=max_exp).rev() {
            let unit = 1i64 << (j - min_exp);
            for (a, b) in lattice_corners((level as i32 - j) as u32) {
                let c = (a * unit, b * unit);
                for &(s, t) in &BASE_PAIRS {
                    let (sa, sb) = vertex_offset(s);
                    let (ta, tb) = vertex_offset(t);
                    len_exp.push(j);
                    corner.push(c);
                    ends.push((
                        (c.0 + sa * unit, c.1 + sb * unit),
                        (c.0 + ta * unit, c.1 + tb * unit),
                    ));
                }
            }
        }
        debug_assert_eq!(ends.len(), basis.len());
        let cell_level = basis.iter().map(|e| e.cell.level()).collect();
        let by_ends = ends.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        Ok(EdgeWindow {
            level,
            min_exp,
            max_exp,
            basis,
            len_exp,
            corner,
            ends,
            cell_level,
            by_ends,
        })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn min_exp(&self) -> i32 {
        self.min_exp
    }

    pub fn max_exp(&self) -> i32 {
        self.max_exp
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[EdgeAddress] {
        &self.basis
    }

    pub fn edge(&self, i: usize) -> &EdgeAddress {
        &self.basis[i]
    }

    pub fn len_exp(&self, i: usize) -> i32 {
        self.len_exp[i]
    }

    /// `(e-, e+)` in units of `2^min_exp`.
    pub fn ends(&self, i: usize) -> (Lattice, Lattice) {
        self.ends[i]
    }

    /// Smallest tower level containing the edge.
    pub fn cell_level(&self, i: usize) -> u32 {
        self.cell_level[i]
    }

    pub fn index_of(&self, e: &EdgeAddress) -> Option<usize> {
        let (a, b) = e.endpoints();
        let k = self.min_exp as i64;
        let a = (a.alpha.to_i64_at(k)?, a.beta.to_i64_at(k)?);
        let b = (b.alpha.to_i64_at(k)?, b.beta.to_i64_at(k)?);
        self.index_by_ends(a, b)
    }

    pub fn index_by_ends(&self, from: Lattice, to: Lattice) -> Option<usize> {
        self.by_ends.get(&(from, to)).copied()
    }

    pub fn reversed(&self, i: usize) -> usize {
        let (a, b) = self.ends[i];
        self.by_ends[&(b, a)]
    }

    /// Corner of the size-`2^m` cell containing edge `i`, in units of `2^m`;
    /// `None` when the edge is longer than `2^m`.
    pub fn ancestor(&self, i: usize, m: i32) -> Option<Lattice> {
        if self.len_exp[i] > m {
            return None;
        }
        if m < self.min_exp {
            return None;
        }
        let s = (m - self.min_exp) as u32;
        let (a, b) = self.corner[i];
        Some((a >> s, b >> s))
    }

    /// Whether edge `i` lies in `cell`.
    pub fn edge_in_cell(&self, i: usize, cell: &CellAddress) -> bool {
        let m = cell.size_exp();
        let Some(anc) = self.ancestor(i, m) else {
            return false;
        };
        let c = cell.corner();
        match (c.alpha.to_i64_at(m as i64), c.beta.to_i64_at(m as i64)) {
            (Some(a), Some(b)) => anc == (a, b),
            _ => false,
        }
    }

    /// Index of `γ(e)` when `e` lies in the source of `γ` and its image is in the window.
    pub fn map_edge(&self, g: &LocalIsometry, i: usize) -> Option<usize> {
        if !self.edge_in_cell(i, &g.source) {
            return None;
        }
        let k = self.min_exp as i64;
        match (
            g.translation.alpha.to_i64_at(k),
            g.translation.beta.to_i64_at(k),
        ) {
            (Some(ta), Some(tb)) => {
                let (a, b) = self.ends[i];
                let m = |p: Lattice| {
                    let q = g.rotation.apply_i64(p);
                    (q.0 + ta, q.1 + tb)
                };
                self.index_by_ends(m(a), m(b))
            }
            _ => g
                .apply_edge(&self.basis[i])
                .ok()
                .and_then(|e| self.index_of(&e)),
        }
    }

    pub fn same_shape(&self, other: &EdgeWindow) -> bool {
        (self.level, self.min_exp, self.max_exp) == (other.level, other.min_exp, other.max_exp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::generator;

    #[test]
    fn lattice_data_matches_addresses() {
        let w = EdgeWindow::new(2, -1, 2).unwrap();
        assert_eq!(w.dim(), 6 * (27 + 9 + 3 + 1));
        for i in 0..w.dim() {
            assert_eq!(w.index_of(w.edge(i)), Some(i));
            assert_eq!(w.len_exp(i), w.edge(i).len_exp());
            let r = w.reversed(i);
            assert_eq!(w.edge(r), &w.edge(i).reversed());
        }
    }

    #[test]
    fn mapping_edges_by_generators() {
        let w = EdgeWindow::new(1, -1, 1).unwrap();
        let g = generator(0, 1, 0).unwrap();
        let mut mapped = 0;
        for i in 0..w.dim() {
            if let Some(j) = w.map_edge(&g, i) {
                assert_eq!(w.edge(j), &g.apply_edge(w.edge(i)).unwrap());
                mapped += 1;
            }
        }
        assert_eq!(mapped, 6 + 18);
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!(EdgeWindow::new(1, 1, 0).is_err());
        assert!(EdgeWindow::new(1, 0, 2).is_err());
    }
}
