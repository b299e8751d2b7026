//! The ramified covering `p_n: K_{n+1} -> K_n`.

use super::generator::{upper_cell, GeneratorSymbol};
use super::isometry::scaled;
use crate::error::{Error, Result};
use crate::geometry::{in_gasket, CellAddress, TrianglePoint};

/// Values of every branch of `p_n` whose cell contains `x`, in the order
/// `K_n`, `C^n_1`, `C^n_2`.
pub fn covering_branches(x: &TrianglePoint, scale: u32) -> Result<Vec<TrianglePoint>> {
    if !in_gasket(x, scale + 1) {
        return Err(Error::NotInGasket(format!(
            "{x} (expected a point of K_{})",
            scale + 1
        )));
    }
    let mut out = Vec::with_capacity(2);
    if CellAddress::tower(scale).contains_point(x) {
        out.push(x.clone());
    }
    for i in [1u8, 2] {
        if upper_cell(scale, i).contains_point(x) {
            let g = GeneratorSymbol {
                scale,
                to: 0,
                from: i,
            };
            out.push(g.isometry().map_point(x));
        }
    }
    Ok(out)
}

/// `p_n(x)`: identity on `K_n`, `R^n_{0,i}` on `C^n_i`.
pub fn covering_map(x: &TrianglePoint, scale: u32) -> Result<TrianglePoint> {
    Ok(covering_branches(x, scale)?.swap_remove(0))
}

/// The three points `x^n_{i,i+1}` where two branches meet.
pub fn ramification_points(scale: u32) -> [TrianglePoint; 3] {
    [(1, 0), (1, 1), (0, 1)].map(|p| scaled(p, scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(s: &str) -> TrianglePoint {
        s.parse().unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(covering_map(&pt("3/2,0"), 0).unwrap(), pt("1/2,1/2"));
        let b = covering_branches(&pt("1,0"), 0).unwrap();
        assert_eq!(b, vec![pt("1,0"), pt("1,0")]);
        assert_eq!(covering_map(&pt("1/4,1/2"), 0).unwrap(), pt("1/4,1/2"));
        assert!(covering_map(&pt("3,0"), 0).is_err());
    }

    #[test]
    fn branches_agree_at_ramification_points() {
        for n in 0..=5 {
            for x in ramification_points(n) {
                let b = covering_branches(&x, n).unwrap();
                assert_eq!(b.len(), 2, "{x} at scale {n}");
                assert_eq!(b[0], b[1]);
            }
        }
    }
}
