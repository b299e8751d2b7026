//! The gasket `K`, the tower `K_n = w_0^{-n} K`, its cells and oriented edges.

mod address;
mod lattice;
mod point;

use std::io::Write;

use num_traits::Signed;

pub use address::{CellAddress, EdgeAddress, BASE_PAIRS};
pub use lattice::{is_corner, is_vertex, lattice_corners, VertexSet, MAX_LATTICE_BITS};
pub use point::TrianglePoint;

use crate::error::{Error, Result};

/// Whether a dyadic point lies in `K`.
pub fn in_unit_gasket(p: &TrianglePoint) -> bool {
    if p.alpha.is_negative() || p.beta.is_negative() {
        return false;
    }
    let e = p.finest_exponent();
    let bits = (-e) as u32;
    let (a, b) = match (p.alpha.to_integer_at(e), p.beta.to_integer_at(e)) {
        (Some(a), Some(b)) => (a, b),
        _ => return false,
    };
    let one = num_bigint::BigInt::from(1);
    let side = &one << bits;
    let corner = |a: &num_bigint::BigInt, b: &num_bigint::BigInt| {
        !a.is_negative()
            && !b.is_negative()
            && num_traits::Zero::is_zero(&(a & b))
            && (a | b) < side
    };
    corner(&a, &b) || corner(&(&a - &one), &b) || corner(&a, &(&b - &one))
}

/// Whether a dyadic point lies in `K_n`.
pub fn in_gasket(p: &TrianglePoint, level: u32) -> bool {
    in_unit_gasket(&p.shl(-(level as i64)))
}

/// `sum_{j=k}^{p} 6 * 3^(n-j)`, the number of edges of `K_n` with lengths in `[2^k, 2^p]`.
pub fn edge_count(level: u32, min_exp: i32, max_exp: i32) -> Result<u128> {
    if min_exp > max_exp {
        return Err(Error::InvalidRange {
            min: min_exp,
            max: max_exp,
        });
    }
    let top = max_exp.min(level as i32);
    Ok((min_exp..=top)
        .map(|j| 6 * 3u128.pow((level as i32 - j) as u32))
        .sum())
}

/// All canonical edges of `K_n` with `2^k <= length <= 2^p`.
///
/// Ordered by length exponent (descending), then by the address word written
/// at level `n`, then by base pair. Lengths above `2^n` do not occur in `K_n`.
pub fn enumerate_edges(level: u32, min_exp: i32, max_exp: i32) -> Result<Vec<EdgeAddress>> {
    let total = edge_count(level, min_exp, max_exp)?;
    let mut out = Vec::with_capacity(total as usize);
    for j in (min_exp..=max_exp.min(level as i32)).rev() {
        let depth = (level as i32 - j) as usize;
        let mut word = vec![0u8; depth];
        loop {
            let cell = CellAddress::new(level, word.clone())?.canonicalize();
            for &base in &BASE_PAIRS {
                out.push(EdgeAddress {
                    cell: cell.clone(),
                    base,
                });
            }
            if !next_word(&mut word) {
                break;
            }
        }
    }
    Ok(out)
}

/// Advances a word over `{0,1,2}` in lexicographic order; false after the last one.
fn next_word(word: &mut [u8]) -> bool {
    for d in word.iter_mut().rev() {
        if *d < 2 {
            *d += 1;
            return true;
        }
        *d = 0;
    }
    false
}

/// All cells of size `2^j` in `K_n`, in word order.
pub fn enumerate_cells(level: u32, size_exp: i32) -> Result<Vec<CellAddress>> {
    if size_exp > level as i32 {
        return Err(Error::InvalidRange {
            min: size_exp,
            max: level as i32,
        });
    }
    let mut word = vec![0u8; (level as i32 - size_exp) as usize];
    let mut out = Vec::new();
    loop {
        out.push(CellAddress::new(level, word.clone())?.canonicalize());
        if !next_word(&mut word) {
            break;
        }
    }
    Ok(out)
}

/// Writes edges as CSV with exact endpoint coordinates.
pub fn write_edges_csv<W: Write>(edges: &[EdgeAddress], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Malformed(format!("csv output: {e}"));
    w.write_record([
        "level", "word", "i", "j", "len_exp", "ax_mant", "ax_exp", "ay_mant", "ay_exp", "bx_mant",
        "bx_exp", "by_mant", "by_exp",
    ])
    .map_err(io)?;
    for e in edges {
        let (a, b) = e.endpoints();
        let word: String = e.cell.word().iter().map(|d| char::from(b'0' + d)).collect();
        w.write_record([
            e.cell.level().to_string(),
            word,
            e.base.0.to_string(),
            e.base.1.to_string(),
            e.len_exp().to_string(),
            a.alpha.mantissa().to_string(),
            a.alpha.exponent().to_string(),
            a.beta.mantissa().to_string(),
            a.beta.exponent().to_string(),
            b.alpha.mantissa().to_string(),
            b.alpha.exponent().to_string(),
            b.beta.mantissa().to_string(),
            b.beta.exponent().to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::Malformed(format!("csv output: {e}")))?;
    Ok(())
}

/// Writes a vertex set as CSV: exact coordinates and finest-level degree.
pub fn write_vertices_csv<W: Write>(vs: &VertexSet, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Malformed(format!("csv output: {e}"));
    w.write_record(["x_mant", "x_exp", "y_mant", "y_exp", "degree"])
        .map_err(io)?;
    for i in 0..vs.len() {
        let p = vs.point(i);
        w.write_record([
            p.alpha.mantissa().to_string(),
            p.alpha.exponent().to_string(),
            p.beta.mantissa().to_string(),
            p.beta.exponent().to_string(),
            vs.neighbors(i).len().to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::Malformed(format!("csv output: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn small_edge_counts() {
        assert_eq!(enumerate_edges(0, 0, 0).unwrap().len(), 6);
        let e = enumerate_edges(1, 0, 1).unwrap();
        assert_eq!(e.len(), 24);
        assert_eq!(e.iter().filter(|e| e.len_exp() == 1).count(), 6);
        assert_eq!(e.iter().filter(|e| e.len_exp() == 0).count(), 18);
        assert_eq!(enumerate_edges(0, -2, 0).unwrap().len(), 78);
        assert!(enumerate_edges(2, 1, 0).is_err());
    }

    #[test]
    fn enumeration_order_is_length_then_word() {
        let e = enumerate_edges(1, 0, 1).unwrap();
        assert_eq!(e[0].to_string(), "1:/01");
        assert_eq!(e[6].to_string(), "0:/01");
        assert_eq!(e[12].to_string(), "1:1/01");
        assert_eq!(e[18].to_string(), "1:2/01");
    }

    #[test]
    fn enumeration_is_canonical_and_roundtrips() {
        let edges = enumerate_edges(2, -2, 2).unwrap();
        let set: HashSet<_> = edges.iter().collect();
        assert_eq!(set.len(), edges.len());
        for e in &edges {
            assert!(e.is_canonical());
            let (a, b) = e.endpoints();
            assert_eq!(&EdgeAddress::from_endpoints(&a, &b).unwrap(), e);
            let len = crate::dyadic::DyadicScalar::pow2(2 * e.len_exp() as i64);
            assert_eq!(a.squared_distance(&b), len);
            assert!(in_gasket(&a, 2) && in_gasket(&b, 2));
        }
    }

    #[test]
    fn nesting_of_tower() {
        let small: HashSet<_> = enumerate_edges(1, -1, 1).unwrap().into_iter().collect();
        let big: HashSet<_> = enumerate_edges(2, -1, 2).unwrap().into_iter().collect();
        assert!(small.is_subset(&big));
    }

    #[test]
    fn membership() {
        let p = |s: &str| s.parse::<TrianglePoint>().unwrap();
        assert!(in_unit_gasket(&p("1/2,1/2")));
        assert!(in_unit_gasket(&p("1/4,1/4")));
        assert!(!in_unit_gasket(&p("1/4,3/8")));
        assert!(!in_unit_gasket(&p("1,1")));
        assert!(in_gasket(&p("1,1"), 1));
        assert!(in_gasket(&p("3/2,0"), 1));
        assert!(!in_gasket(&p("-1/2,0"), 3));
    }

    #[test]
    fn cell_point_containment() {
        let c: CellAddress = "1:1".parse().unwrap();
        assert!(c.contains_point(&"3/2,1/2".parse().unwrap()));
        assert!(!c.contains_point(&"1/2,1/2".parse().unwrap()));
        assert_eq!(enumerate_cells(2, 0).unwrap().len(), 9);
    }

    #[test]
    fn csv_has_one_row_per_edge() {
        let edges = enumerate_edges(1, 0, 1).unwrap();
        let mut buf = Vec::new();
        write_edges_csv(&edges, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 25);
        assert!(text.starts_with("level,word,i,j,len_exp,"));
    }
}
