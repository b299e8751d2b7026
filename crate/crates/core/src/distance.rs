//! Geodesic and Connes distances between vertices, and the commutator norms
//! `‖[D P^{-p,∞}, ρ(f)]‖`.

use std::collections::VecDeque;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::SampledFunction;
use crate::geometry::{lattice_corners, TrianglePoint, VertexSet};
use crate::operators::{dirac, mult_operator, operator_norm, EdgeWindow};

/// Two vertices of `vertex_set(level, resolution)`.
#[derive(Clone, Debug)]
pub struct DistanceQuery {
    pub x: TrianglePoint,
    pub y: TrianglePoint,
    pub level: u32,
    pub resolution: i32,
}

/// Hop distances from `source` in the finest graph, with BFS parents.
///
/// All finest edges have the same length `2^-r`, so breadth-first order is
/// Dijkstra order and distances stay exact integers.
pub fn distance_field(vs: &VertexSet, source: usize) -> (Vec<u64>, Vec<usize>) {
    let mut dist = vec![u64::MAX; vs.len()];
    let mut parent = vec![usize::MAX; vs.len()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    parent[source] = source;
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        for &v in vs.neighbors(u) {
            if dist[v] == u64::MAX {
                dist[v] = dist[u] + 1;
                parent[v] = u;
                queue.push_back(v);
            }
        }
    }
    (dist, parent)
}

fn locate(vs: &VertexSet, p: &TrianglePoint) -> Result<usize> {
    vs.index_of_point(p).ok_or_else(|| {
        Error::NotSampled(format!(
            "{p} is not a vertex of K_{} at resolution {}",
            vs.level(),
            vs.resolution()
        ))
    })
}

fn unit(resolution: i32) -> f64 {
    (-(resolution as f64)).exp2()
}

/// Shortest-path distance in the finest graph of `K_m` (edge weight `2^-r`), in units of `2^-r`.
pub fn graph_distance_units(vs: &VertexSet, x: usize, y: usize) -> u64 {
    distance_field(vs, x).0[y]
}

pub fn graph_distance(q: &DistanceQuery) -> Result<f64> {
    let vs = VertexSet::new(q.level, q.resolution)?;
    let (x, y) = (locate(&vs, &q.x)?, locate(&vs, &q.y)?);
    Ok(graph_distance_units(&vs, x, y) as f64 * unit(q.resolution))
}

/// Undirected edges of `K_m` of every length `2^-r ..= 2^m`, as vertex-index pairs
/// with lengths in units of `2^-r`.
pub fn all_edges(vs: &VertexSet) -> Vec<(usize, usize, u64)> {
    let r = vs.resolution();
    let m = vs.level() as i32;
    let mut out = Vec::new();
    for j in -r..=m {
        let u = 1i64 << (j + r);
        for (a, b) in lattice_corners((m - j) as u32) {
            let v = [(a * u, b * u), ((a + 1) * u, b * u), (a * u, (b + 1) * u)];
            let idx = v.map(|(x, y)| vs.index_of(x, y).expect("cell vertex"));
            for (s, t) in [(0, 1), (0, 2), (1, 2)] {
                out.push((idx[s], idx[t], u as u64));
            }
        }
    }
    out
}

/// Whether `|f(u) - f(v)| <= length` on every edge (integer units).
fn feasible(f: &[i64], edges: &[(usize, usize, u64)]) -> bool {
    edges
        .iter()
        .all(|&(u, v, w)| (f[u] - f[v]).unsigned_abs() <= w)
}

#[derive(Clone, Debug, Serialize)]
pub struct DistanceCertificate {
    pub value: f64,
    /// `value` in units of `2^-r`.
    pub units: u64,
    pub resolution: i32,
    /// `f*(v) = min(dist(v, y), value)`, one entry per vertex.
    #[serde(skip)]
    pub witness: SampledFunction,
    /// Vertices from `x` to `y` realizing `value`.
    pub path: Vec<TrianglePoint>,
    /// Number of edge constraints the witness was checked against.
    pub constraints: usize,
}

/// `sup {|f(x) - f(y)| : ‖[D, ρ(f)]‖ <= 1}` with a verified optimal witness.
///
/// The value is the graph distance; the witness is checked against every
/// edge of `K_m` from length `2^-r` to `2^m`, and the path against the value.
pub fn connes_distance(q: &DistanceQuery) -> Result<DistanceCertificate> {
    let vs = VertexSet::new(q.level, q.resolution)?;
    let (x, y) = (locate(&vs, &q.x)?, locate(&vs, &q.y)?);
    let (dist, parent) = distance_field(&vs, y);
    let value = dist[x];
    let f: Vec<i64> = dist.iter().map(|&d| d.min(value) as i64).collect();
    let edges = all_edges(&vs);
    let fail = |what: &str| Error::CertificateFailure(format!("{} -> {}: {what}", q.x, q.y));
    if !feasible(&f, &edges) {
        return Err(fail("witness violates an edge constraint"));
    }
    if (f[x] - f[y]).unsigned_abs() != value {
        return Err(fail("witness does not attain the value"));
    }
    let mut path = vec![x];
    let mut cur = x;
    while cur != y {
        cur = parent[cur];
        path.push(cur);
    }
    let adjacent = path.windows(2).all(|w| vs.neighbors(w[0]).contains(&w[1]));
    if !adjacent || path.len() as u64 != value + 1 {
        return Err(fail("path does not realize the value"));
    }
    let h = unit(q.resolution);
    let witness = SampledFunction::tabulated(
        q.level,
        q.resolution,
        f.iter().map(|&v| v as f64 * h).collect(),
    )?;
    Ok(DistanceCertificate {
        value: value as f64 * h,
        units: value,
        resolution: q.resolution,
        witness,
        path: path.iter().map(|&i| vs.point(i)).collect(),
        constraints: edges.len(),
    })
}

/// Checks that `f = min_i (c_i + dist(·, z_i))`-type functions (1-Lipschitz for
/// the graph metric) are feasible and never separate `x` and `y` by more than
/// the certified value. Returns the number of functions tried.
pub fn check_random_feasible<R: rand::Rng>(
    q: &DistanceQuery,
    value_units: u64,
    trials: usize,
    rng: &mut R,
) -> Result<usize> {
    let vs = VertexSet::new(q.level, q.resolution)?;
    let (x, y) = (locate(&vs, &q.x)?, locate(&vs, &q.y)?);
    let edges = all_edges(&vs);
    for _ in 0..trials {
        let k = rng.gen_range(1..=3);
        let mut f = vec![i64::MAX; vs.len()];
        for _ in 0..k {
            let z = rng.gen_range(0..vs.len());
            let c = rng.gen_range(0..=(value_units as i64 + 2));
            let (d, _) = distance_field(&vs, z);
            for (fv, dv) in f.iter_mut().zip(&d) {
                *fv = (*fv).min(c + *dv as i64);
            }
        }
        if !feasible(&f, &edges) {
            return Err(Error::CertificateFailure(
                "a 1-Lipschitz perturbation failed the edge constraints".into(),
            ));
        }
        if (f[x] - f[y]).unsigned_abs() > value_units {
            return Err(Error::CertificateFailure(format!(
                "feasible function separates {} and {} beyond the value",
                q.x, q.y
            )));
        }
    }
    Ok(trials)
}

#[derive(Clone, Debug, Serialize)]
pub struct RefinementRow {
    pub resolution: i32,
    pub value: f64,
}

/// `graph_distance` at each resolution in `resolutions`.
pub fn resolution_table(
    x: &TrianglePoint,
    y: &TrianglePoint,
    level: u32,
    resolutions: impl IntoIterator<Item = i32>,
) -> Result<Vec<RefinementRow>> {
    resolutions
        .into_iter()
        .map(|r| {
            let q = DistanceQuery {
                x: x.clone(),
                y: y.clone(),
                level,
                resolution: r,
            };
            graph_distance(&q).map(|value| RefinementRow {
                resolution: r,
                value,
            })
        })
        .collect()
}

/// `sup |f(e+) - f(e-)| / length(e)` over edges of `K_n` with `2^-p <= length <= 2^n`.
pub fn quotient_sup(f: &SampledFunction, p: i32) -> Result<f64> {
    let n = f.invariance_level() as i32;
    let r = f.resolution();
    if p > r || -p > n {
        return Err(Error::InvalidRange { min: -p, max: n });
    }
    let mut best = 0.0f64;
    for j in -p..=n {
        let u = 1i64 << (j + r);
        let len = (j as f64).exp2();
        let m = lattice_corners((n - j) as u32)
            .par_iter()
            .map(|&(a, b)| {
                let v = [(a * u, b * u), ((a + 1) * u, b * u), (a * u, (b + 1) * u)]
                    .map(|(x, y)| f.value_at_lattice(x, y).expect("sampled vertex"));
                (v[0] - v[1])
                    .abs()
                    .max((v[0] - v[2]).abs())
                    .max((v[1] - v[2]).abs())
                    / len
            })
            .reduce(|| 0.0, f64::max);
        best = best.max(m);
    }
    Ok(best)
}

/// `‖[D P^{-p,∞}, ρ(f)]‖` on the window `(n, -p, n)`, by the operator norm.
pub fn commutator_operator_norm(f: &SampledFunction, p: i32) -> Result<f64> {
    let n = f.invariance_level();
    let w = Arc::new(EdgeWindow::new(n, -p, n as i32)?);
    let d = dirac::<Complex64>(&w);
    let rho = mult_operator::<Complex64>(f, &w)?;
    Ok(operator_norm(&d.commutator(&rho)?))
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutatorRow {
    pub p: i32,
    pub quotient_route: f64,
    pub operator_route: f64,
}

/// Both routes to the truncated commutator norm for each cutoff `p`.
pub fn commutator_norm(f: &SampledFunction, ps: &[i32]) -> Result<Vec<CommutatorRow>> {
    ps.iter()
        .map(|&p| {
            Ok(CommutatorRow {
                p,
                quotient_route: quotient_sup(f, p)?,
                operator_route: commutator_operator_norm(f, p)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::FunctionFamily;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pt(s: &str) -> TrianglePoint {
        s.parse().unwrap()
    }

    fn query(x: &str, y: &str, level: u32, r: i32) -> DistanceQuery {
        DistanceQuery {
            x: pt(x),
            y: pt(y),
            level,
            resolution: r,
        }
    }

    #[test]
    fn corner_distance_is_one() {
        for r in 0..8 {
            assert_eq!(graph_distance(&query("0,0", "1,0", 0, r)).unwrap(), 1.0);
        }
        assert_eq!(graph_distance(&query("1/2,0", "0,1/2", 0, 4)).unwrap(), 0.5);
        assert_eq!(graph_distance(&query("1/2,0", "1/2,0", 0, 4)).unwrap(), 0.0);
    }

    #[test]
    fn refinement_is_monotone() {
        let t = resolution_table(&pt("0,1"), &pt("1/2,0"), 0, 1..=8).unwrap();
        assert!(t.windows(2).all(|w| w[1].value <= w[0].value));
        let last = t.last().unwrap().value;
        assert!(last >= 3f64.sqrt() / 2.0 && last <= 1.0);
    }

    #[test]
    fn certificate_and_oracles() {
        let c = connes_distance(&query("0,0", "1,0", 0, 3)).unwrap();
        assert_eq!(c.value, 1.0);
        assert_eq!(c.path.len(), 9);
        let z = connes_distance(&query("1/2,1/2", "1/2,1/2", 0, 2)).unwrap();
        assert_eq!(z.value, 0.0);
        assert!(z.witness.values().iter().all(|&v| v == 0.0));

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        check_random_feasible(&query("0,1", "1/2,0", 1, 3), 8, 20, &mut rng).unwrap();
    }

    #[test]
    fn commutator_routes_agree() {
        let a = SampledFunction::from_family(FunctionFamily::alpha(), 0, 5).unwrap();
        let rows = commutator_norm(&a, &[0, 1, 3, 5]).unwrap();
        for r in &rows {
            assert!((r.quotient_route - 1.0).abs() < 1e-12);
            assert!((r.operator_route - r.quotient_route).abs() < 1e-10);
        }
        let c = SampledFunction::constant(2.0, 1, 4).unwrap();
        assert!(commutator_norm(&c, &[0, 4])
            .unwrap()
            .iter()
            .all(|r| r.operator_route == 0.0 && r.quotient_route == 0.0));
    }
}
