use std::sync::Arc;

use num_rational::BigRational;
use rand::Rng;

use super::matrix::GeometricOperator;
use super::window::EdgeWindow;
use crate::error::{Error, Result};
use crate::geometry::{enumerate_cells, CellAddress};
use crate::groupoid::morphism_between;

type Q = BigRational;

fn small_rational<R: Rng>(rng: &mut R) -> Q {
    Q::new(rng.gen_range(-8i64..=8).into(), 8.into())
}

/// Copies `kernel` (entries between edges of `K_j`) into every cell of size `2^j`.
fn replicate(
    window: &Arc<EdgeWindow>,
    j: u32,
    kernel: &[(usize, usize, Q)],
    out: &mut Vec<(usize, usize, Q)>,
) -> Result<()> {
    let base = CellAddress::tower(j);
    for cell in enumerate_cells(window.level(), j as i32)? {
        let g = morphism_between(&base, &cell)?;
        for (e, f, v) in kernel {
            match (window.map_edge(&g, *e), window.map_edge(&g, *f)) {
                (Some(a), Some(b)) => out.push((a, b, v.clone())),
                _ => {
                    return Err(Error::Malformed(format!(
                        "window is not closed under the map onto {cell}"
                    )))
                }
            }
        }
    }
    Ok(())
}

/// A random element of `B_n` on the window with support `2^support`.
///
/// Entries between edges of `K_n` are arbitrary (each present with probability
/// `density`) and are copied to every cell of size `2^n`; each scale `j` in
/// `(n, support]` contributes an arbitrary 6x6 block on the top edges of
/// `K_j`, copied to every cell of size `2^j`. Entries are multiples of 1/8
/// in `[-1, 1]`.
pub fn random_invariant<R: Rng>(
    window: &Arc<EdgeWindow>,
    n: u32,
    support: i32,
    density: f64,
    rng: &mut R,
) -> Result<GeometricOperator<Q>> {
    let top = window.level();
    if n > top || support > top as i32 || support < window.min_exp() {
        return Err(Error::WindowTooSmall(format!(
            "B_{n} with support 2^{support} in a window of level {top}"
        )));
    }
    let cap = (n as i32).min(support);
    let inner: Vec<usize> = (0..window.dim())
        .filter(|&i| window.cell_level(i) <= n && window.len_exp(i) <= cap)
        .collect();
    let mut kernel = Vec::new();
    for &e in &inner {
        for &f in &inner {
            if rng.gen_bool(density) {
                kernel.push((e, f, small_rational(rng)));
            }
        }
    }
    let mut trip = Vec::new();
    replicate(window, n, &kernel, &mut trip)?;
    for j in (n as i32 + 1)..=support {
        let top_edges: Vec<usize> = (0..window.dim())
            .filter(|&i| window.len_exp(i) == j && window.cell_level(i) <= j as u32)
            .collect();
        let block: Vec<_> = top_edges
            .iter()
            .flat_map(|&e| top_edges.iter().map(move |&f| (e, f)))
            .map(|(e, f)| (e, f, small_rational(rng)))
            .collect();
        replicate(window, j as u32, &block, &mut trip)?;
    }
    Ok(GeometricOperator::from_triplets(
        window.clone(),
        Some(n),
        trip,
    ))
}
