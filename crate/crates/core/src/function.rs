//! Groupoid-invariant functions on `K_inf`, sampled on the vertices of a tower level.
//!
//! A function of invariance level `n` is determined by its values on `K_n`;
//! anywhere else it is evaluated by pushing the point down the tower with the
//! descending generators.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{in_gasket, lattice_corners, TrianglePoint, VertexSet};
use crate::groupoid::Rotation;
use crate::numeric::NeumaierSum;

/// Symbolic description of a built-in function, or `Tabulated` for external data.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionFamily {
    Constant(f64),
    /// `c0 + ca * alpha + cb * beta`.
    Affine {
        c0: f64,
        ca: f64,
        cb: f64,
    },
    /// Product of affine factors `(c0, ca, cb)`.
    Product(Vec<(f64, f64, f64)>),
    Tabulated,
    Pullback {
        from_level: u32,
        inner: Box<FunctionFamily>,
    },
}

impl FunctionFamily {
    pub fn alpha() -> Self {
        FunctionFamily::Affine {
            c0: 0.0,
            ca: 1.0,
            cb: 0.0,
        }
    }

    pub fn beta() -> Self {
        FunctionFamily::Affine {
            c0: 0.0,
            ca: 0.0,
            cb: 1.0,
        }
    }

    pub fn alpha_squared() -> Self {
        FunctionFamily::Product(vec![(0.0, 1.0, 0.0), (0.0, 1.0, 0.0)])
    }

    /// Pointwise formula on `K_n` (`None` for tabulated data).
    pub fn formula(&self, alpha: f64, beta: f64) -> Option<f64> {
        match self {
            FunctionFamily::Constant(c) => Some(*c),
            FunctionFamily::Affine { c0, ca, cb } => Some(c0 + ca * alpha + cb * beta),
            FunctionFamily::Product(fs) => Some(
                fs.iter()
                    .map(|(c0, ca, cb)| c0 + ca * alpha + cb * beta)
                    .product(),
            ),
            FunctionFamily::Tabulated | FunctionFamily::Pullback { .. } => None,
        }
    }
}

impl FromStr for FunctionFamily {
    type Err = Error;

    /// `alpha`, `beta`, `alpha2`, a number, `affine:c0,ca,cb`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "alpha" => return Ok(FunctionFamily::alpha()),
            "beta" => return Ok(FunctionFamily::beta()),
            "alpha2" | "alpha^2" => return Ok(FunctionFamily::alpha_squared()),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("affine:") {
            let c: Vec<f64> = rest
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Malformed(format!("bad affine coefficients {rest:?}")))?;
            if let [c0, ca, cb] = c[..] {
                return Ok(FunctionFamily::Affine { c0, ca, cb });
            }
            return Err(Error::Malformed(format!(
                "affine needs 3 coefficients, got {rest:?}"
            )));
        }
        s.parse::<f64>()
            .map(FunctionFamily::Constant)
            .map_err(|_| Error::Malformed(format!("unknown function {s:?}")))
    }
}

impl fmt::Display for FunctionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionFamily::Constant(c) => write!(f, "{c}"),
            FunctionFamily::Affine { c0, ca, cb } => write!(f, "affine:{c0},{ca},{cb}"),
            FunctionFamily::Product(fs) => {
                let parts: Vec<_> = fs
                    .iter()
                    .map(|(a, b, c)| format!("({a},{b},{c})"))
                    .collect();
                write!(f, "product:{}", parts.join("*"))
            }
            FunctionFamily::Tabulated => write!(f, "tabulated"),
            FunctionFamily::Pullback { from_level, inner } => {
                write!(f, "pullback({inner}, {from_level})")
            }
        }
    }
}

/// An element of `A_n` sampled on the vertices of `K_L` (`L >= n`) at resolution `r`.
#[derive(Clone, Debug)]
pub struct SampledFunction {
    invariance_level: u32,
    vertices: Arc<VertexSet>,
    values: Vec<f64>,
    family: FunctionFamily,
}

impl SampledFunction {
    /// Samples a built-in family on `K_n`.
    pub fn from_family(family: FunctionFamily, level: u32, resolution: i32) -> Result<Self> {
        let vertices = Arc::new(VertexSet::new(level, resolution)?);
        let scale = (-(resolution as f64)).exp2();
        let values = vertices
            .coords()
            .iter()
            .map(|&(a, b)| {
                family
                    .formula(a as f64 * scale, b as f64 * scale)
                    .ok_or_else(|| Error::Malformed(format!("{family} has no closed form")))
            })
            .collect::<Result<_>>()?;
        Ok(SampledFunction {
            invariance_level: level,
            vertices,
            values,
            family,
        })
    }

    pub fn constant(c: f64, level: u32, resolution: i32) -> Result<Self> {
        Self::from_family(FunctionFamily::Constant(c), level, resolution)
    }

    /// External values, one per vertex of `vertex_set(level, resolution)` in its order.
    pub fn tabulated(level: u32, resolution: i32, values: Vec<f64>) -> Result<Self> {
        let vertices = Arc::new(VertexSet::new(level, resolution)?);
        if values.len() != vertices.len() {
            return Err(Error::Malformed(format!(
                "expected {} values, got {}",
                vertices.len(),
                values.len()
            )));
        }
        Ok(SampledFunction {
            invariance_level: level,
            vertices,
            values,
            family: FunctionFamily::Tabulated,
        })
    }

    /// Tabulated function with values given by `g(alpha, beta)` on `K_n`.
    pub fn from_fn(level: u32, resolution: i32, g: impl Fn(&TrianglePoint) -> f64) -> Result<Self> {
        let vertices = VertexSet::new(level, resolution)?;
        let values = (0..vertices.len()).map(|i| g(&vertices.point(i))).collect();
        Self::tabulated(level, resolution, values)
    }

    /// Random dyadic values `k/1024`, `|k| <= 1024`, so sums and products stay exact.
    pub fn random<R: Rng>(level: u32, resolution: i32, rng: &mut R) -> Result<Self> {
        let vertices = VertexSet::new(level, resolution)?;
        let values = (0..vertices.len())
            .map(|_| rng.gen_range(-1024i32..=1024) as f64 / 1024.0)
            .collect();
        Self::tabulated(level, resolution, values)
    }

    pub fn invariance_level(&self) -> u32 {
        self.invariance_level
    }

    /// Level of the tower on which values are stored.
    pub fn sample_level(&self) -> u32 {
        self.vertices.level()
    }

    pub fn resolution(&self) -> i32 {
        self.vertices.resolution()
    }

    pub fn family(&self) -> &FunctionFamily {
        &self.family
    }

    pub fn vertices(&self) -> &VertexSet {
        &self.vertices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Value at lattice coordinates `(a, b) * 2^-r` of any point of `K_inf`.
    ///
    /// Points outside `K_L` are moved into it by the unique descending generator
    /// of their level, repeatedly.
    pub fn value_at_lattice(&self, a: i64, b: i64) -> Option<f64> {
        let (a, b) = reduce_to_level(a, b, self.sample_level(), self.resolution())?;
        self.vertices.index_of(a, b).map(|i| self.values[i])
    }

    pub fn evaluate(&self, x: &TrianglePoint, ambient_level: u32) -> Result<f64> {
        if !in_gasket(x, ambient_level) {
            return Err(Error::NotInGasket(format!("{x} in K_{ambient_level}")));
        }
        let e = -(self.resolution() as i64);
        let not_sampled = || Error::NotSampled(format!("{x} at resolution {}", self.resolution()));
        let a = x.alpha.to_i64_at(e).ok_or_else(not_sampled)?;
        let b = x.beta.to_i64_at(e).ok_or_else(not_sampled)?;
        self.value_at_lattice(a, b).ok_or_else(not_sampled)
    }

    /// Re-samples on `K_m`, keeping the invariance level.
    pub fn pullback(&self, target_level: u32) -> Result<SampledFunction> {
        let vertices = Arc::new(VertexSet::new(target_level, self.resolution())?);
        let values = vertices
            .coords()
            .iter()
            .map(|&(a, b)| {
                self.value_at_lattice(a, b)
                    .expect("K_m vertices reduce to samples")
            })
            .collect();
        Ok(SampledFunction {
            invariance_level: self.invariance_level.min(target_level),
            vertices,
            values,
            family: FunctionFamily::Pullback {
                from_level: self.sample_level(),
                inner: Box::new(self.family.clone()),
            },
        })
    }

    /// The values on `K_l` for `invariance_level <= l`.
    pub fn restrict(&self, level: u32) -> Result<SampledFunction> {
        if level < self.invariance_level {
            return Err(Error::InvalidRange {
                min: self.invariance_level as i32,
                max: level as i32,
            });
        }
        let mut f = self.pullback(level)?;
        f.family = self.family.clone();
        Ok(f)
    }

    /// Pointwise product (same sampling grid required).
    pub fn mul(&self, other: &SampledFunction) -> Result<SampledFunction> {
        self.check_same_grid(other)?;
        Ok(SampledFunction {
            invariance_level: self.invariance_level.max(other.invariance_level),
            vertices: self.vertices.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| x * y)
                .collect(),
            family: FunctionFamily::Tabulated,
        })
    }

    fn check_same_grid(&self, other: &SampledFunction) -> Result<()> {
        if self.sample_level() != other.sample_level() || self.resolution() != other.resolution() {
            return Err(Error::Malformed(format!(
                "sampling grids differ: (K_{}, r={}) vs (K_{}, r={})",
                self.sample_level(),
                self.resolution(),
                other.sample_level(),
                other.resolution()
            )));
        }
        Ok(())
    }

    /// `sup |f(e+) - f(e-)| / length(e)` over edges of `K_L` with `2^-p <= length <= 2^L`.
    pub fn lipschitz_seminorm(&self, min_len_exp: i32) -> Result<f64> {
        let r = self.resolution();
        let level = self.sample_level() as i32;
        if min_len_exp < -r {
            return Err(Error::InvalidRange {
                min: min_len_exp,
                max: -r,
            });
        }
        let mut best = 0.0f64;
        for j in min_len_exp..=level {
            best = best.max(self.max_quotient_at_scale(j));
        }
        Ok(best)
    }

    /// Largest difference quotient over edges of length `2^j` in `K_L`.
    pub fn max_quotient_at_scale(&self, j: i32) -> f64 {
        let r = self.resolution();
        let level = self.sample_level() as i32;
        let unit = 1i64 << (j + r);
        let len = (j as f64).exp2();
        lattice_corners((level - j) as u32)
            .par_iter()
            .map(|&(a, b)| {
                let v = [
                    (a * unit, b * unit),
                    ((a + 1) * unit, b * unit),
                    (a * unit, (b + 1) * unit),
                ];
                let f = v.map(|(x, y)| self.values[self.vertices.index_of(x, y).unwrap()]);
                let d = (f[0] - f[1])
                    .abs()
                    .max((f[0] - f[2]).abs())
                    .max((f[1] - f[2]).abs());
                d / len
            })
            .reduce(|| 0.0, f64::max)
    }
}

/// Moves lattice coordinates `(a, b)` (units `2^-r`) into `K_level` along descending generators.
pub(crate) fn reduce_to_level(mut a: i64, mut b: i64, level: u32, r: i32) -> Option<(i64, i64)> {
    if a < 0 || b < 0 {
        return None;
    }
    loop {
        let s = a + b;
        // minimal l >= 0 with s <= 2^(l + r)
        let fits = |l: i32| {
            if l + r >= 0 {
                s <= 1i64 << (l + r)
            } else {
                s == 0
            }
        };
        let mut l = 0i32;
        while !fits(l) {
            l += 1;
            if l + r > 62 {
                return None;
            }
        }
        if l as u32 <= level {
            return Some((a, b));
        }
        let half = 1i64 << (l - 1 + r);
        let (rot, c) = if a >= half {
            (Rotation::Rot120, (half, 0))
        } else {
            (Rotation::Rot240, (0, half))
        };
        let (x, y) = rot.apply_i64((a - c.0, b - c.1));
        a = x + c.0;
        b = y + c.1;
    }
}

/// Self-similar quadrature of `f` over `K_n` at resolution `r` (normalized so `vol(K) = 1`).
#[derive(Clone, Debug, Serialize)]
pub struct Quadrature {
    pub value: f64,
    pub level: u32,
    pub resolution: i32,
    pub error_bound: f64,
}

/// `∫_{K_n} f dvol`: sum over cells of size `2^-r` of `3^-r` times the vertex mean.
pub fn integrate(f: &SampledFunction, level: u32, resolution: i32) -> Result<Quadrature> {
    if resolution > f.resolution() {
        return Err(Error::InvalidRange {
            min: -resolution,
            max: -f.resolution(),
        });
    }
    let bits = level as i32 + resolution;
    if bits < 0 {
        return Err(Error::InvalidRange {
            min: -resolution,
            max: level as i32,
        });
    }
    let unit = 1i64 << (f.resolution() - resolution);
    let corners = lattice_corners(bits as u32);
    let partials: Vec<NeumaierSum> = corners
        .par_chunks(4096)
        .map(|chunk| {
            let mut s = NeumaierSum::new();
            for &(a, b) in chunk {
                let v0 = f.value_at_lattice(a * unit, b * unit).unwrap();
                let v1 = f.value_at_lattice((a + 1) * unit, b * unit).unwrap();
                let v2 = f.value_at_lattice(a * unit, (b + 1) * unit).unwrap();
                s.add((v0 + v1 + v2) / 3.0);
            }
            s
        })
        .collect();
    let mut total = NeumaierSum::new();
    for p in &partials {
        total.merge(p);
    }
    let value = total.value() * 3f64.powi(-resolution);
    let lip = f.lipschitz_seminorm(-resolution)?;
    Ok(Quadrature {
        value,
        level,
        resolution,
        error_bound: lip * (-(resolution as f64)).exp2() * 3f64.powi(level as i32),
    })
}

/// The normalized integrals `(6/log 3) ∫_{K_m} f / 3^m` for `m = n ..= M`.
#[derive(Clone, Debug, Serialize)]
pub struct FolnerMean {
    pub value: f64,
    pub sequence: Vec<(u32, f64)>,
}

pub fn folner_mean(f: &SampledFunction, max_level: u32) -> Result<FolnerMean> {
    let n = f.invariance_level();
    if max_level < n {
        return Err(Error::InvalidRange {
            min: n as i32,
            max: max_level as i32,
        });
    }
    let c = 6.0 / 3f64.ln();
    let sequence = (n..=max_level)
        .map(|m| integrate(f, m, f.resolution()).map(|q| (m, c * q.value / 3f64.powi(m as i32))))
        .collect::<Result<Vec<_>>>()?;
    Ok(FolnerMean {
        value: sequence.last().unwrap().1,
        sequence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{morphisms_within, LocalIsometry};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pt(s: &str) -> TrianglePoint {
        s.parse().unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let alpha = SampledFunction::from_family(FunctionFamily::alpha(), 0, 4).unwrap();
        assert_eq!(alpha.evaluate(&pt("3/2,0"), 1).unwrap(), 0.5);
        assert_eq!(alpha.evaluate(&pt("1/4,1/2"), 0).unwrap(), 0.25);
        assert!(matches!(
            alpha.evaluate(&pt("1/32,0"), 0),
            Err(Error::NotSampled(_))
        ));
        let one = SampledFunction::constant(1.0, 0, 2).unwrap();
        assert_eq!(one.evaluate(&pt("5/4,3/4"), 3).unwrap(), 1.0);
        assert_eq!(one.evaluate(&pt("6,2"), 3).unwrap(), 1.0);
    }

    #[test]
    fn pullback_examples() {
        let alpha = SampledFunction::from_family(FunctionFamily::alpha(), 0, 2).unwrap();
        let p = alpha.pullback(1).unwrap();
        assert_eq!(p.evaluate(&pt("2,0"), 1).unwrap(), 0.0);
        let c = SampledFunction::constant(2.5, 0, 2)
            .unwrap()
            .pullback(2)
            .unwrap();
        assert!(c.values().iter().all(|&v| v == 2.5));
    }

    #[test]
    fn pullback_restrict_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 0..20 {
            let n = k % 3;
            let f = SampledFunction::random(n, 2, &mut rng).unwrap();
            let back = f.pullback(n + 2).unwrap().restrict(n).unwrap();
            assert_eq!(back.values(), f.values());
        }
    }

    #[test]
    fn invariance_under_groupoid() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = SampledFunction::random(1, 2, &mut rng).unwrap();
        let maps: Vec<LocalIsometry> = morphisms_within(1, 3).unwrap();
        for (k, g) in maps.iter().cycle().take(100).enumerate() {
            let verts = g.source.vertices();
            let x = &verts[k % 3];
            let y = g.apply_point(x).unwrap();
            assert_eq!(f.evaluate(x, 3).unwrap(), f.evaluate(&y, 3).unwrap());
        }
    }

    #[test]
    fn seminorm_examples() {
        let one = SampledFunction::constant(1.0, 0, 4).unwrap();
        assert_eq!(one.lipschitz_seminorm(-4).unwrap(), 0.0);
        for r in 0..=8 {
            let alpha = SampledFunction::from_family(FunctionFamily::alpha(), 0, r).unwrap();
            for p in 0..=r {
                assert_eq!(alpha.lipschitz_seminorm(-p).unwrap(), 1.0);
            }
        }
    }

    #[test]
    fn seminorm_monotone_and_pullback_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let f = SampledFunction::random(1, 3, &mut rng).unwrap();
            let mut last = 0.0;
            for p in 0..=3 {
                let l = f.lipschitz_seminorm(-p).unwrap();
                assert!(l >= last);
                last = l;
            }
            let g = f.pullback(3).unwrap();
            assert_eq!(g.lipschitz_seminorm(-3).unwrap(), last);
        }
    }

    #[test]
    fn integrals() {
        let one = SampledFunction::constant(1.0, 0, 6).unwrap();
        assert!((integrate(&one, 0, 6).unwrap().value - 1.0).abs() < 1e-14);
        let alpha = SampledFunction::from_family(FunctionFamily::alpha(), 0, 8).unwrap();
        assert!((integrate(&alpha, 0, 8).unwrap().value - 1.0 / 3.0).abs() < 1e-14);
        let a2 = SampledFunction::from_family(FunctionFamily::alpha_squared(), 0, 10).unwrap();
        let q = integrate(&a2, 0, 10).unwrap();
        assert!((q.value - 5.0 / 27.0).abs() < q.error_bound);
        assert!((q.value - 5.0 / 27.0).abs() < 1e-5);
    }

    #[test]
    fn quadrature_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = SampledFunction::random(0, 6, &mut rng).unwrap();
        let lip = f.lipschitz_seminorm(-6).unwrap();
        for r in 0..6 {
            let a = integrate(&f, 0, r).unwrap().value;
            let b = integrate(&f, 0, r + 1).unwrap().value;
            assert!((a - b).abs() <= lip * (-(r as f64)).exp2());
        }
    }

    #[test]
    fn folner_examples() {
        let c = 6.0 / 3f64.ln();
        let one = SampledFunction::constant(1.0, 0, 4).unwrap();
        let m = folner_mean(&one, 3).unwrap();
        assert!((m.value - c).abs() < 1e-12);
        let alpha = SampledFunction::from_family(FunctionFamily::alpha(), 0, 4).unwrap();
        let m = folner_mean(&alpha, 4).unwrap();
        for &(_, v) in &m.sequence {
            assert!((v - 2.0 / 3f64.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn family_parsing() {
        assert_eq!(
            "alpha".parse::<FunctionFamily>().unwrap(),
            FunctionFamily::alpha()
        );
        assert_eq!(
            "1".parse::<FunctionFamily>().unwrap(),
            FunctionFamily::Constant(1.0)
        );
        assert!("gamma".parse::<FunctionFamily>().is_err());
    }
}
