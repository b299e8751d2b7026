//! Independent reference computations used by the acceptance checks.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};

use crate::distance::all_edges;
use crate::error::{Error, Result};
use crate::geometry::{enumerate_cells, is_corner, CellAddress, VertexSet};
use crate::groupoid::{GeneratorSymbol, LocalIsometry};

/// Edges of length `2^j` in `K_n`, counted by scanning the integer grid of side
/// `2^(n-j)` for cell corners (six oriented edges per cell).
pub fn grid_edge_count(n: u32, j: i32) -> u64 {
    let bits = (n as i32 - j) as u32;
    let side = 1i64 << bits;
    let mut cells = 0u64;
    for a in 0..side {
        for b in 0..side - a {
            if is_corner(a, b, bits) {
                cells += 1;
            }
        }
    }
    6 * cells
}

/// Moments `E[alpha^a beta^b]` of the normalized measure on `K`, `a + b <= order`.
///
/// Self-similarity under the three contractions `x -> (x + v_i)/2` gives
/// `M_ab (1 - 2^-(a+b)) = 2^-(a+b)/3 * sum_i sum_{(p,q) != (a,b)} C(a,p) C(b,q) v_i^(a-p, b-q) M_pq`.
pub fn moments(order: u32) -> HashMap<(u32, u32), BigRational> {
    let binom =
        |n: u32, k: u32| -> BigInt { (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1)) };
    let corners = [(0u32, 0u32), (1, 0), (0, 1)];
    let mut m: HashMap<(u32, u32), BigRational> = HashMap::new();
    m.insert((0, 0), BigRational::one());
    for total in 1..=order {
        for a in 0..=total {
            let b = total - a;
            let mut acc = BigRational::zero();
            for &(va, vb) in &corners {
                for p in 0..=a {
                    for q in 0..=b {
                        if (p, q) == (a, b) {
                            continue;
                        }
                        // v^(a-p) with v in {0, 1}
                        let pa = if a - p == 0 || va == 1 { 1 } else { 0 };
                        let pb = if b - q == 0 || vb == 1 { 1 } else { 0 };
                        if pa * pb == 0 {
                            continue;
                        }
                        acc += BigRational::from_integer(binom(a, p) * binom(b, q)) * &m[&(p, q)];
                    }
                }
            }
            let scale = BigRational::new(BigInt::one(), BigInt::from(3) << total as usize);
            let denom = BigRational::one()
                - BigRational::new(BigInt::one(), BigInt::one() << total as usize);
            m.insert((a, b), acc * scale / denom);
        }
    }
    m
}

/// Distinct maps reached from each cell of size `2^size_exp` in `K_level` by
/// generator words of length `<= max_len` using scales `<= max_scale`,
/// grouped by target. Only images of the whole source cell are followed.
pub fn groupoid_maps_by_words(
    level: u32,
    size_exp: i32,
    max_scale: u32,
    max_len: usize,
) -> Result<HashMap<(CellAddress, CellAddress), Vec<LocalIsometry>>> {
    let gens: Vec<LocalIsometry> = (0..=max_scale)
        .flat_map(|n| {
            [(1, 0), (2, 0), (0, 1), (2, 1), (0, 2), (1, 2)]
                .map(|(to, from)| GeneratorSymbol { scale: n, to, from }.isometry())
        })
        .collect();
    let cells = enumerate_cells(level, size_exp)?;
    let inside: HashSet<CellAddress> = cells.iter().cloned().collect();
    let mut out: HashMap<(CellAddress, CellAddress), Vec<LocalIsometry>> = HashMap::new();
    for c in &cells {
        let start = LocalIsometry::identity(c);
        let mut seen: HashSet<LocalIsometry> = HashSet::from([start.clone()]);
        let mut frontier = vec![start];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for g in &frontier {
                for r in &gens {
                    if r.source.contains(&g.target) {
                        let h = r.compose(g)?;
                        if seen.insert(h.clone()) {
                            next.push(h);
                        }
                    }
                }
            }
            frontier = next;
        }
        for g in seen {
            if inside.contains(&g.target) {
                let slot = out.entry((c.clone(), g.target.clone())).or_default();
                if !slot.iter().any(|h| h.same_action(&g)) {
                    slot.push(g);
                }
            }
        }
    }
    Ok(out)
}

/// Exact maximum of `f(x) - f(y)` subject to `f(u) - f(v) <= w` on every edge,
/// by Bellman-Ford on the difference-constraint graph (every edge length).
pub fn lp_distance_bellman_ford(vs: &VertexSet, x: usize, y: usize) -> u64 {
    let edges = all_edges(vs);
    let mut d = vec![u64::MAX; vs.len()];
    d[y] = 0;
    for _ in 0..vs.len() {
        let mut changed = false;
        for &(u, v, w) in &edges {
            for (a, b) in [(u, v), (v, u)] {
                if d[a] != u64::MAX && d[a] + w < d[b] {
                    d[b] = d[a] + w;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    d[x]
}

/// The same linear program solved by a dense exact simplex (Bland's rule).
///
/// Variables `g(v) >= 0`, maximize `g(x) - g(y)` subject to
/// `g(u) - g(v) <= w` for both orientations of every edge. The objective is
/// translation invariant, so the sign constraint loses nothing.
pub fn lp_distance_simplex(vs: &VertexSet, x: usize, y: usize) -> Result<Rational64> {
    use Rational64 as R;
    let edges = all_edges(vs);
    let nv = vs.len();
    let rows = 2 * edges.len();
    let cols = nv + rows;
    // tableau rows: constraints, last row: objective (reduced costs, negated)
    let mut t = vec![vec![R::zero(); cols + 1]; rows + 1];
    let mut basis: Vec<usize> = (nv..cols).collect();
    for (k, &(u, v, w)) in edges.iter().enumerate() {
        for (s, (a, b)) in [(u, v), (v, u)].into_iter().enumerate() {
            let r = 2 * k + s;
            t[r][a] = R::one();
            t[r][b] = -R::one();
            t[r][nv + r] = R::one();
            t[r][cols] = R::from_integer(w as i64);
        }
    }
    if x != y {
        t[rows][x] = -R::one();
        t[rows][y] = R::one();
    }
    while let Some(enter) = (0..cols).find(|&j| t[rows][j] < R::zero()) {
        let mut leave: Option<(usize, R)> = None;
        for (i, row) in t.iter().enumerate().take(rows) {
            if row[enter] > R::zero() {
                let ratio = row[cols] / row[enter];
                let better = match &leave {
                    None => true,
                    Some((l, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (pr, _) = leave.ok_or_else(|| Error::Malformed("unbounded linear program".into()))?;
        let piv = t[pr][enter];
        for v in t[pr].iter_mut() {
            *v /= piv;
        }
        let prow = t[pr].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != pr && !row[enter].is_zero() {
                let c = row[enter];
                for (v, p) in row.iter_mut().zip(&prow) {
                    if !p.is_zero() {
                        *v -= c * p;
                    }
                }
            }
        }
        basis[pr] = enter;
    }
    Ok(t[rows][cols])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::graph_distance_units;
    use crate::geometry::edge_count;

    #[test]
    fn grid_counts_match_formula() {
        for n in 0..=3 {
            for j in 0..=n as i32 {
                assert_eq!(grid_edge_count(n, j) as u128, edge_count(n, j, j).unwrap());
            }
        }
        assert_eq!(grid_edge_count(0, -2), 6 * 9);
    }

    #[test]
    fn first_moments() {
        let m = moments(2);
        let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        assert_eq!(m[&(1, 0)], q(1, 3));
        assert_eq!(m[&(0, 1)], q(1, 3));
        assert_eq!(m[&(2, 0)], q(5, 27));
        assert_eq!(m[&(1, 1)], q(2, 27));
    }

    #[test]
    fn lp_oracles_agree_with_shortest_paths() {
        let vs = VertexSet::new(0, 2).unwrap();
        assert_eq!(vs.len(), 15);
        for x in 0..vs.len() {
            for y in 0..vs.len() {
                let g = graph_distance_units(&vs, x, y);
                assert_eq!(lp_distance_bellman_ford(&vs, x, y), g);
                if x < y && (x + y) % 5 == 0 {
                    assert_eq!(lp_distance_simplex(&vs, x, y).unwrap(), (g as i64).into());
                }
            }
        }
    }

    #[test]
    fn words_give_one_map_in_k1() {
        let maps = groupoid_maps_by_words(1, 0, 2, 6).unwrap();
        assert_eq!(maps.len(), 9);
        assert!(maps.values().all(|v| v.len() == 1));
    }
}
