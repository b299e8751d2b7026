use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::isometry::{scaled, LocalIsometry, Rotation};
use crate::error::{Error, Result};
use crate::geometry::CellAddress;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    Ascending,
    Descending,
    ConstantLevel,
}

/// `R^n_{to,from}`, mapping `C^n_from` onto `C^n_to`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneratorSymbol {
    pub scale: u32,
    pub to: u8,
    pub from: u8,
}

/// The midpoint `x_{i,i+1}` of `K_1` at scale 0.
fn midpoint(i: u8) -> (i64, i64) {
    match i {
        0 => (1, 0),
        1 => (1, 1),
        _ => (0, 1),
    }
}

/// `C^n_i = w_0^{-n-1} w_i K`, in canonical form.
pub fn upper_cell(scale: u32, i: u8) -> CellAddress {
    CellAddress::new(scale + 1, vec![i]).unwrap().canonicalize()
}

impl GeneratorSymbol {
    pub fn new(scale: u32, to: u8, from: u8) -> Result<Self> {
        if to > 2 || from > 2 || to == from {
            return Err(Error::Malformed(format!(
                "generator indices ({to},{from}) must be distinct and in 0..3"
            )));
        }
        Ok(GeneratorSymbol { scale, to, from })
    }

    pub fn kind(&self) -> GeneratorKind {
        if self.from == 0 {
            GeneratorKind::Ascending
        } else if self.to == 0 {
            GeneratorKind::Descending
        } else {
            GeneratorKind::ConstantLevel
        }
    }

    pub fn inverse(&self) -> GeneratorSymbol {
        GeneratorSymbol {
            scale: self.scale,
            to: self.from,
            from: self.to,
        }
    }

    pub fn source(&self) -> CellAddress {
        upper_cell(self.scale, self.from)
    }

    pub fn target(&self) -> CellAddress {
        upper_cell(self.scale, self.to)
    }

    /// The exact map: 240 degrees about `x_{i,i+1}` for `R_{i+1,i}`, 120 for the inverse.
    pub fn isometry(&self) -> LocalIsometry {
        let (rotation, center) = if self.to == (self.from + 1) % 3 {
            (Rotation::Rot240, midpoint(self.from))
        } else {
            (Rotation::Rot120, midpoint(self.to))
        };
        let c = scaled(center, self.scale);
        LocalIsometry::rotation_about(rotation, &c, self.source())
            .expect("generators map cells onto cells")
    }
}

/// `R^n_{j,i}`.
pub fn generator(scale: u32, to: u8, from: u8) -> Result<LocalIsometry> {
    Ok(GeneratorSymbol::new(scale, to, from)?.isometry())
}

impl fmt::Display for GeneratorSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R{}_{}{}", self.scale, self.to, self.from)
    }
}

impl fmt::Debug for GeneratorSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for GeneratorSymbol {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl FromStr for GeneratorSymbol {
    type Err = Error;

    /// `R<scale>_<to><from>`, e.g. `R0_21`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Malformed(format!("expected generator like R0_21, got {s:?}"));
        let rest = s.trim().strip_prefix('R').ok_or_else(bad)?;
        let (scale, idx) = rest.split_once('_').ok_or_else(bad)?;
        let scale: u32 = scale.parse().map_err(|_| bad())?;
        let idx: Vec<u8> = idx
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(bad))
            .collect::<Result<_>>()?;
        match idx[..] {
            [to, from] => GeneratorSymbol::new(scale, to, from),
            _ => Err(bad()),
        }
    }
}

/// Parses a comma separated word, leftmost factor first.
pub fn parse_word(s: &str) -> Result<Vec<GeneratorSymbol>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(str::parse).collect()
}

pub fn format_word(word: &[GeneratorSymbol]) -> String {
    word.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TrianglePoint;

    #[test]
    fn r10_rotates_about_v1() {
        let g = generator(0, 1, 0).unwrap();
        assert_eq!(g.rotation, Rotation::Rot240);
        assert_eq!(
            g.apply_point(&TrianglePoint::origin()).unwrap(),
            TrianglePoint::from_ints(1, 1)
        );
        assert_eq!(g.target.to_string(), "1:1");
        let fixed = TrianglePoint::from_ints(1, 0);
        assert_eq!(g.apply_point(&fixed).unwrap(), fixed);
    }

    #[test]
    fn r21_maps_upper_cells() {
        let g = generator(0, 2, 1).unwrap();
        assert_eq!(g.source.to_string(), "1:1");
        assert_eq!(g.target.to_string(), "1:2");
        let g = generator(3, 1, 2).unwrap();
        assert_eq!(g.source, upper_cell(3, 2));
        assert_eq!(g.target, upper_cell(3, 1));
    }

    #[test]
    fn inverse_pair() {
        let g = generator(0, 1, 0).unwrap();
        let h = generator(0, 0, 1).unwrap();
        assert!(h.same_action(&g.inverse()));
        assert!(h.compose(&g).unwrap().is_identity_map());
    }

    #[test]
    fn cocycle_on_upper_cells() {
        for n in 0..6 {
            let g = generator(n, 0, 2)
                .unwrap()
                .compose(&generator(n, 2, 1).unwrap())
                .unwrap()
                .compose(&generator(n, 1, 0).unwrap())
                .unwrap();
            assert!(g.is_identity_map());
            assert_eq!(g.source, CellAddress::tower(n));
        }
    }

    #[test]
    fn classification() {
        let k = |s: &str| s.parse::<GeneratorSymbol>().unwrap().kind();
        assert_eq!(k("R0_10"), GeneratorKind::Ascending);
        assert_eq!(k("R2_01"), GeneratorKind::Descending);
        assert_eq!(k("R1_21"), GeneratorKind::ConstantLevel);
        assert!("R0_11".parse::<GeneratorSymbol>().is_err());
        assert!("Q0_10".parse::<GeneratorSymbol>().is_err());
        assert_eq!(
            format_word(&parse_word("R0_21,R0_10").unwrap()),
            "R0_21,R0_10"
        );
    }
}
