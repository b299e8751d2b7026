use std::fmt;

use serde::Serialize;

use crate::dyadic::DyadicScalar;
use crate::error::{Error, Result};
use crate::geometry::{CellAddress, EdgeAddress, TrianglePoint};

/// Rotation part of a local isometry, as an integer matrix in the triangular basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Rotation {
    Id,
    Rot120,
    Rot240,
}

impl Rotation {
    fn steps(self) -> u8 {
        match self {
            Rotation::Id => 0,
            Rotation::Rot120 => 1,
            Rotation::Rot240 => 2,
        }
    }

    fn from_steps(k: u8) -> Self {
        match k % 3 {
            0 => Rotation::Id,
            1 => Rotation::Rot120,
            _ => Rotation::Rot240,
        }
    }

    pub fn matrix(self) -> [[i64; 2]; 2] {
        match self {
            Rotation::Id => [[1, 0], [0, 1]],
            Rotation::Rot120 => [[-1, -1], [1, 0]],
            Rotation::Rot240 => [[0, 1], [-1, -1]],
        }
    }

    /// `self` after `other`.
    pub fn then(self, other: Rotation) -> Rotation {
        Rotation::from_steps(self.steps() + other.steps())
    }

    pub fn inverse(self) -> Rotation {
        Rotation::from_steps(3 - self.steps())
    }

    pub fn degrees(self) -> u32 {
        120 * self.steps() as u32
    }

    pub fn apply(self, p: &TrianglePoint) -> TrianglePoint {
        let (a, b) = (&p.alpha, &p.beta);
        match self {
            Rotation::Id => p.clone(),
            Rotation::Rot120 => TrianglePoint::new(-&(a + b), a.clone()),
            Rotation::Rot240 => TrianglePoint::new(b.clone(), -&(a + b)),
        }
    }

    /// Integer version used by the lattice fast paths.
    pub fn apply_i64(self, (a, b): (i64, i64)) -> (i64, i64) {
        match self {
            Rotation::Id => (a, b),
            Rotation::Rot120 => (-a - b, a),
            Rotation::Rot240 => (b, -a - b),
        }
    }
}

/// An element of the groupoid: `x -> M x + t` from `source` onto `target`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct LocalIsometry {
    pub rotation: Rotation,
    pub translation: TrianglePoint,
    pub source: CellAddress,
    pub target: CellAddress,
}

impl LocalIsometry {
    /// Builds the map and checks that it sends `source` onto `target`.
    pub fn new(
        rotation: Rotation,
        translation: TrianglePoint,
        source: CellAddress,
    ) -> Result<Self> {
        let source = source.canonicalize();
        let mut g = LocalIsometry {
            rotation,
            translation,
            target: source.clone(),
            source,
        };
        g.target = g.image_of_cell_unchecked(&g.source)?;
        Ok(g)
    }

    pub fn identity(cell: &CellAddress) -> Self {
        let cell = cell.canonicalize();
        LocalIsometry {
            rotation: Rotation::Id,
            translation: TrianglePoint::origin(),
            source: cell.clone(),
            target: cell,
        }
    }

    /// Rotation by `rotation` about `center`, restricted to `source`.
    pub fn rotation_about(
        rotation: Rotation,
        center: &TrianglePoint,
        source: CellAddress,
    ) -> Result<Self> {
        let t = center.sub(&rotation.apply(center));
        Self::new(rotation, t, source)
    }

    pub fn map_point(&self, p: &TrianglePoint) -> TrianglePoint {
        self.rotation.apply(p).add(&self.translation)
    }

    pub fn apply_point(&self, p: &TrianglePoint) -> Result<TrianglePoint> {
        if !self.source.contains_point(p) {
            return Err(Error::DomainViolation {
                point: p.to_string(),
                cell: self.source.to_string(),
            });
        }
        Ok(self.map_point(p))
    }

    pub fn apply_edge(&self, e: &EdgeAddress) -> Result<EdgeAddress> {
        let e = e.canonicalize();
        if !self.source.contains(&e.cell) {
            return Err(Error::DomainViolation {
                point: e.to_string(),
                cell: self.source.to_string(),
            });
        }
        let (a, b) = e.endpoints();
        EdgeAddress::from_endpoints(&self.map_point(&a), &self.map_point(&b))
    }

    pub fn apply_cell(&self, c: &CellAddress) -> Result<CellAddress> {
        let c = c.canonicalize();
        if !self.source.contains(&c) {
            return Err(Error::DomainViolation {
                point: c.to_string(),
                cell: self.source.to_string(),
            });
        }
        self.image_of_cell_unchecked(&c)
    }

    fn image_of_cell_unchecked(&self, c: &CellAddress) -> Result<CellAddress> {
        let v = c.vertices().map(|p| self.map_point(&p));
        CellAddress::from_vertex_set(&v)
    }

    pub fn inverse(&self) -> LocalIsometry {
        let r = self.rotation.inverse();
        let t = r.apply(&self.translation);
        LocalIsometry {
            rotation: r,
            translation: TrianglePoint::new(-&t.alpha, -&t.beta),
            source: self.target.clone(),
            target: self.source.clone(),
        }
    }

    /// `self ∘ first`, defined when one of `target(first)`, `source(self)` contains the other.
    pub fn compose(&self, first: &LocalIsometry) -> Result<LocalIsometry> {
        let rotation = self.rotation.then(first.rotation);
        let translation = self.map_point(&first.translation);
        if self.source.contains(&first.target) {
            Ok(LocalIsometry {
                rotation,
                translation,
                source: first.source.clone(),
                target: self.image_of_cell_unchecked(&first.target)?,
            })
        } else if first.target.contains(&self.source) {
            Ok(LocalIsometry {
                rotation,
                translation,
                source: first.inverse().image_of_cell_unchecked(&self.source)?,
                target: self.target.clone(),
            })
        } else {
            Err(Error::IncompatibleDomains(format!(
                "target {} and source {} are not nested",
                first.target, self.source
            )))
        }
    }

    /// Equality of the affine parts, ignoring domains.
    pub fn same_action(&self, other: &LocalIsometry) -> bool {
        self.rotation == other.rotation && self.translation == other.translation
    }

    pub fn is_identity_map(&self) -> bool {
        self.rotation == Rotation::Id
            && self.translation.alpha.is_zero()
            && self.translation.beta.is_zero()
    }

    /// Restriction to a subcell of the source.
    pub fn restrict(&self, cell: &CellAddress) -> Result<LocalIsometry> {
        let target = self.apply_cell(cell)?;
        Ok(LocalIsometry {
            rotation: self.rotation,
            translation: self.translation.clone(),
            source: cell.canonicalize(),
            target,
        })
    }

    /// Translation in lattice units of `2^-r` (exact when `r` is fine enough).
    pub fn translation_i64(&self, resolution: i32) -> Option<(i64, i64)> {
        let e = -(resolution as i64);
        Some((
            self.translation.alpha.to_i64_at(e)?,
            self.translation.beta.to_i64_at(e)?,
        ))
    }
}

impl fmt::Display for LocalIsometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} -> {}: rot {} + {}",
            self.source,
            self.target,
            self.rotation.degrees(),
            self.translation
        )
    }
}

impl fmt::Debug for LocalIsometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub(crate) fn scaled(p: (i64, i64), n: u32) -> TrianglePoint {
    TrianglePoint::new(
        DyadicScalar::new(p.0, n as i64),
        DyadicScalar::new(p.1, n as i64),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_matrices_agree_with_apply() {
        let p = TrianglePoint::from_ints(3, -5);
        for r in [Rotation::Id, Rotation::Rot120, Rotation::Rot240] {
            let m = r.matrix();
            let expect = (3 * m[0][0] - 5 * m[0][1], 3 * m[1][0] - 5 * m[1][1]);
            assert_eq!(r.apply(&p), TrianglePoint::from_ints(expect.0, expect.1));
            assert_eq!(r.apply_i64((3, -5)), expect);
            assert_eq!(r.then(r.inverse()), Rotation::Id);
        }
        assert_eq!(Rotation::Rot120.then(Rotation::Rot120), Rotation::Rot240);
    }

    #[test]
    fn rotation_preserves_lengths() {
        let a = TrianglePoint::from_ratios(1, 4, 3, 8).unwrap();
        let b = TrianglePoint::from_ratios(-1, 2, 5, 8).unwrap();
        for r in [Rotation::Rot120, Rotation::Rot240] {
            assert_eq!(
                r.apply(&a).squared_distance(&r.apply(&b)),
                a.squared_distance(&b)
            );
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let g = LocalIsometry::rotation_about(
            Rotation::Rot240,
            &TrianglePoint::from_ints(1, 0),
            "0:".parse().unwrap(),
        )
        .unwrap();
        assert_eq!(g.target.to_string(), "1:1");
        let id = g.inverse().compose(&g).unwrap();
        assert!(id.is_identity_map());
        assert_eq!(id.source, g.source);
        assert_eq!(id.target, g.source);
    }
}
