use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::entry::Entry;
use super::matrix::{partial_isometry_in, GeometricOperator};
use super::window::EdgeWindow;
use crate::error::{Error, Result};
use crate::function::SampledFunction;
use crate::geometry::CellAddress;
use crate::groupoid::LocalIsometry;

/// The projections of the edge/projection table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Projection {
    /// `P_n`: edges inside `K_n`.
    Level(u32),
    /// `P^k`: edges of length `2^k`.
    Scale(i32),
    /// `P^{k,p}`: lengths in `[2^k, 2^p]`.
    ScaleRange(i32, i32),
    /// `P^k_n`.
    ScaleLevel(i32, u32),
    /// `P^{k,p}_n`.
    ScaleRangeLevel(i32, i32, u32),
    /// `P^{-p,inf}`: lengths at least `2^-p`, continued above the window.
    From(i32),
    /// `P_C`: edges inside a cell.
    Cell(CellAddress),
}

impl Projection {
    fn contains(&self, w: &EdgeWindow, i: usize) -> bool {
        let len = w.len_exp(i);
        let lvl = w.cell_level(i);
        match self {
            Projection::Level(n) => lvl <= *n,
            Projection::Scale(k) => len == *k,
            Projection::ScaleRange(k, p) => *k <= len && len <= *p,
            Projection::ScaleLevel(k, n) => len == *k && lvl <= *n,
            Projection::ScaleRangeLevel(k, p, n) => *k <= len && len <= *p && lvl <= *n,
            Projection::From(p) => len >= -*p,
            Projection::Cell(c) => w.edge_in_cell(i, c),
        }
    }

    /// Projections commuting with every `V_γ` are in `B_0`; the others are not geometric.
    fn invariance_level(&self) -> Option<u32> {
        match self {
            Projection::Scale(_) | Projection::ScaleRange(..) | Projection::From(_) => Some(0),
            _ => None,
        }
    }

    fn validate(&self, w: &EdgeWindow) -> Result<()> {
        let (lo, hi) = (w.min_exp(), w.max_exp());
        let bad = |min, max| Err(Error::InvalidRange { min, max });
        match *self {
            Projection::ScaleRange(k, p) | Projection::ScaleRangeLevel(k, p, _) if k > p => {
                bad(k, p)
            }
            Projection::Scale(k) | Projection::ScaleLevel(k, _) if k < lo || k > hi => bad(k, k),
            Projection::ScaleRange(k, p) | Projection::ScaleRangeLevel(k, p, _)
                if p < lo || k > hi =>
            {
                bad(k, p)
            }
            Projection::From(p) if -p < lo || -p > hi => bad(-p, hi),
            _ => Ok(()),
        }
    }
}

impl FromStr for Projection {
    type Err = Error;

    /// `P^k`, `P^k,p`, `P^-p,inf` (with a literal `p` resolved by the caller),
    /// `P_n`, `P^k_n`, `P^k,p_n`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().replace(['{', '}', ' '], "");
        let bad = || Error::Malformed(format!("unrecognized projection {s:?}"));
        let int = |x: &str| x.parse::<i32>().map_err(|_| bad());
        if let Some(rest) = s.strip_prefix("P_") {
            return rest.parse().map(Projection::Level).map_err(|_| bad());
        }
        let rest = s.strip_prefix("P^").ok_or_else(bad)?;
        let (sup, sub) = match rest.split_once('_') {
            Some((a, b)) => (a, Some(b.parse::<u32>().map_err(|_| bad())?)),
            None => (rest, None),
        };
        if let Some(k) = sup.strip_suffix(",inf") {
            return match sub {
                None => Ok(Projection::From(-int(k)?)),
                Some(_) => Err(bad()),
            };
        }
        match (sup.split_once(','), sub) {
            (None, None) => Ok(Projection::Scale(int(sup)?)),
            (None, Some(n)) => Ok(Projection::ScaleLevel(int(sup)?, n)),
            (Some((k, p)), None) => Ok(Projection::ScaleRange(int(k)?, int(p)?)),
            (Some((k, p)), Some(n)) => Ok(Projection::ScaleRangeLevel(int(k)?, int(p)?, n)),
        }
    }
}

impl fmt::Display for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Projection::Level(n) => write!(f, "P_{n}"),
            Projection::Scale(k) => write!(f, "P^{k}"),
            Projection::ScaleRange(k, p) => write!(f, "P^{k},{p}"),
            Projection::ScaleLevel(k, n) => write!(f, "P^{k}_{n}"),
            Projection::ScaleRangeLevel(k, p, n) => write!(f, "P^{k},{p}_{n}"),
            Projection::From(p) => write!(f, "P^{},inf", -p),
            Projection::Cell(c) => write!(f, "P_C[{c}]"),
        }
    }
}

/// Diagonal 0/1 operator of a projection on the window.
pub fn projection<S: Entry>(
    kind: &Projection,
    window: &Arc<EdgeWindow>,
) -> Result<GeometricOperator<S>> {
    kind.validate(window)?;
    let d = (0..window.dim())
        .map(|i| {
            if kind.contains(window, i) {
                S::one()
            } else {
                S::zero()
            }
        })
        .collect();
    let op = GeometricOperator::diagonal(window.clone(), kind.invariance_level(), d);
    match kind {
        Projection::From(_) => op.with_tail(S::one()),
        _ => Ok(op),
    }
}

pub fn identity<S: Entry>(window: &Arc<EdgeWindow>) -> GeometricOperator<S> {
    GeometricOperator::diagonal(window.clone(), Some(0), vec![S::one(); window.dim()])
}

/// `ρ(f) e = f(e+) e`.
pub fn mult_operator<S: Entry>(
    f: &SampledFunction,
    window: &Arc<EdgeWindow>,
) -> Result<GeometricOperator<S>> {
    let shift = window.min_exp() + f.resolution();
    if shift < 0 {
        return Err(Error::NotSampled(format!(
            "window edges of length 2^{} are finer than resolution {}",
            window.min_exp(),
            f.resolution()
        )));
    }
    let d = (0..window.dim())
        .map(|i| {
            let (_, (a, b)) = window.ends(i);
            f.value_at_lattice(a << shift, b << shift)
                .map(S::from_f64)
                .ok_or_else(|| Error::NotSampled(window.edge(i).to_string()))
        })
        .collect::<Result<_>>()?;
    Ok(GeometricOperator::diagonal(
        window.clone(),
        Some(f.invariance_level()),
        d,
    ))
}

/// `F e = reversed(e)`.
pub fn edge_reversal<S: Entry>(window: &Arc<EdgeWindow>) -> GeometricOperator<S> {
    let trip = (0..window.dim()).map(|i| (window.reversed(i), i, S::one()));
    GeometricOperator::from_triplets(window.clone(), Some(0), trip)
}

/// `V_γ e = γ(e)` for `e ⊂ s(γ)`, zero elsewhere (truncated to the window).
pub fn partial_isometry<S: Entry>(
    g: &LocalIsometry,
    window: &Arc<EdgeWindow>,
) -> GeometricOperator<S> {
    partial_isometry_in(window.clone(), g)
}

/// `|D| = sum_k 2^-k P^k`.
pub fn dirac_modulus<S: Entry>(window: &Arc<EdgeWindow>) -> GeometricOperator<S> {
    let d = (0..window.dim())
        .map(|i| S::pow2(-window.len_exp(i)))
        .collect();
    GeometricOperator::diagonal(window.clone(), Some(0), d)
}

/// `D = F |D|`.
pub fn dirac<S: Entry>(window: &Arc<EdgeWindow>) -> GeometricOperator<S> {
    edge_reversal(window)
        .mul(&dirac_modulus(window))
        .expect("same window")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::FunctionFamily;
    use crate::groupoid::{generator, morphism_between};
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    fn edge(s: &str) -> crate::geometry::EdgeAddress {
        s.parse().unwrap()
    }

    fn win(n: u32, k: i32, p: i32) -> Arc<EdgeWindow> {
        Arc::new(EdgeWindow::new(n, k, p).unwrap())
    }

    #[test]
    fn projection_traces() {
        let w = win(1, 0, 1);
        let p = projection::<Q>(&Projection::ScaleLevel(0, 1), &w).unwrap();
        assert_eq!(p.trace_where(|_| true), q(18));
        let p0 = projection::<Q>(&Projection::Scale(0), &w).unwrap();
        assert_eq!(p0.renormalized_trace().unwrap(), q(6));
        let c: CellAddress = "1:1".parse().unwrap();
        let pc = projection::<Q>(&Projection::Cell(c), &w).unwrap();
        assert_eq!(pc.trace_where(|_| true), q(6));
        assert!(matches!(pc.renormalized_trace(), Err(Error::NotGeometric)));
    }

    #[test]
    fn tail_projection_closed_form() {
        let w = win(4, -2, 4);
        let p = projection::<Q>(&Projection::From(2), &w).unwrap();
        assert_eq!(p.renormalized_trace().unwrap(), q(81));
    }

    #[test]
    fn projection_algebra() {
        let w = win(2, -1, 2);
        let pr = projection::<Q>(&Projection::ScaleRange(-1, 1), &w).unwrap();
        let mut sum = GeometricOperator::zeros(w.clone(), Some(0));
        for j in -1..=1 {
            let pj = projection::<Q>(&Projection::Scale(j), &w).unwrap();
            sum = sum.add(&pj).unwrap();
            for i in -1..=1 {
                let pi = projection::<Q>(&Projection::Scale(i), &w).unwrap();
                let prod = pj.mul(&pi).unwrap();
                if i == j {
                    assert_eq!(prod.max_abs_diff(&pj).unwrap(), 0.0);
                } else {
                    assert_eq!(prod.nnz(), 0);
                }
            }
        }
        assert_eq!(sum.max_abs_diff(&pr).unwrap(), 0.0);
    }

    #[test]
    fn parse_projection() {
        assert_eq!(
            "P^-2,inf".parse::<Projection>().unwrap(),
            Projection::From(2)
        );
        assert_eq!("P^0".parse::<Projection>().unwrap(), Projection::Scale(0));
        assert_eq!(
            "P^0_1".parse::<Projection>().unwrap(),
            Projection::ScaleLevel(0, 1)
        );
        assert_eq!("P_3".parse::<Projection>().unwrap(), Projection::Level(3));
        assert_eq!(
            "P^-1,2".parse::<Projection>().unwrap(),
            Projection::ScaleRange(-1, 2)
        );
        assert!("Q^1".parse::<Projection>().is_err());
    }

    #[test]
    fn multiplication_operator() {
        let w = win(0, -2, 0);
        let one = SampledFunction::constant(1.0, 0, 2).unwrap();
        let r1 = mult_operator::<Q>(&one, &w).unwrap();
        assert_eq!(r1.max_abs_diff(&identity(&w)).unwrap(), 0.0);
        let alpha = SampledFunction::from_family(FunctionFamily::alpha(), 0, 2).unwrap();
        let ra = mult_operator::<Q>(&alpha, &w).unwrap();
        let e = w.index_of(&edge("0:/01")).unwrap();
        assert_eq!(ra.get(e, e), q(1));
        let a2 = SampledFunction::from_family(FunctionFamily::alpha_squared(), 0, 2).unwrap();
        let ra2 = mult_operator::<Q>(&a2, &w).unwrap();
        assert_eq!(ra.mul(&ra).unwrap().max_abs_diff(&ra2).unwrap(), 0.0);
        let k0 = win(0, 0, 0);
        let t = mult_operator::<Q>(&alpha, &k0)
            .unwrap()
            .mul(&projection(&Projection::Scale(0), &k0).unwrap())
            .unwrap();
        assert_eq!(t.renormalized_trace().unwrap(), q(2));
    }

    #[test]
    fn reversal_and_dirac() {
        let w = win(2, -1, 2);
        let f = edge_reversal::<Q>(&w);
        assert_eq!(f.mul(&f).unwrap().max_abs_diff(&identity(&w)).unwrap(), 0.0);
        assert_eq!(f.adjoint().max_abs_diff(&f).unwrap(), 0.0);
        assert!((0..w.dim()).all(|i| f.row(i).len() == 1 && f.row(i)[0].1 == q(1)));
        for j in -1..=2 {
            let pj = projection::<Q>(&Projection::Scale(j), &w).unwrap();
            assert_eq!(f.commutator(&pj).unwrap().nnz(), 0);
        }
        let m = dirac_modulus::<Q>(&w);
        let unit = w.index_of(&edge("0:/01")).unwrap();
        assert_eq!(m.get(unit, unit), q(1));
        let long = w.index_of(&edge("1:/01")).unwrap();
        assert_eq!(m.get(long, long), Q::new(1.into(), 2.into()));
        let d = dirac::<Q>(&w);
        assert_eq!(d.adjoint().max_abs_diff(&d).unwrap(), 0.0);
        let d2 = d.mul(&d).unwrap();
        assert_eq!(d2.max_abs_diff(&m.mul(&m).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn partial_isometry_relations() {
        let w = win(2, -1, 2);
        let id_cell: CellAddress = "1:1".parse().unwrap();
        let v = partial_isometry::<Q>(&LocalIsometry::identity(&id_cell), &w);
        let pc = projection::<Q>(&Projection::Cell(id_cell.clone()), &w).unwrap();
        assert_eq!(v.max_abs_diff(&pc).unwrap(), 0.0);

        let a: CellAddress = "2:12".parse().unwrap();
        let b: CellAddress = "2:21".parse().unwrap();
        let g = morphism_between(&a, &b).unwrap();
        let v = partial_isometry::<Q>(&g, &w);
        let ps = projection::<Q>(&Projection::Cell(a), &w).unwrap();
        let pt = projection::<Q>(&Projection::Cell(b), &w).unwrap();
        assert_eq!(v.adjoint().mul(&v).unwrap().max_abs_diff(&ps).unwrap(), 0.0);
        assert_eq!(v.mul(&v.adjoint()).unwrap().max_abs_diff(&pt).unwrap(), 0.0);
        for i in 0..w.dim() {
            for (j, _) in v.row(i) {
                assert_eq!(w.len_exp(i), w.len_exp(*j));
            }
        }

        let g1 = generator(1, 2, 1).unwrap();
        let g2 = generator(1, 1, 0).unwrap();
        let v12 = partial_isometry::<Q>(&g1.compose(&g2).unwrap(), &w);
        let prod = partial_isometry::<Q>(&g1, &w)
            .mul(&partial_isometry(&g2, &w))
            .unwrap();
        assert_eq!(v12.max_abs_diff(&prod).unwrap(), 0.0);
    }
}
