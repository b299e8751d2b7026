use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::entry::Entry;
use super::matrix::GeometricOperator;

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Operator norm on the window, `sqrt(max eig(A* A))`.
///
/// `A* A` is split into connected components (edges joined by a shared row
/// of `A`) and each block is diagonalized densely. A tail contributes its
/// modulus.
pub fn operator_norm<S: Entry>(op: &GeometricOperator<S>) -> f64 {
    let dim = op.dim();
    let mut parent: Vec<usize> = (0..dim).collect();
    for i in 0..dim {
        let row = op.row(i);
        if let Some(&(first, _)) = row.first() {
            let r = find(&mut parent, first);
            for &(j, _) in &row[1..] {
                let s = find(&mut parent, j);
                parent[s] = r;
            }
        }
    }
    let mut blocks: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut used = vec![false; dim];
    for i in 0..dim {
        for &(j, _) in op.row(i) {
            used[j] = true;
        }
    }
    for (j, &u) in used.iter().enumerate() {
        if u {
            let r = find(&mut parent, j);
            blocks.entry(r).or_default().push(j);
        }
    }
    let mut local = vec![usize::MAX; dim];
    let mut rows_of: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..dim {
        if let Some(&(first, _)) = op.row(i).first() {
            rows_of.entry(find(&mut parent, first)).or_default().push(i);
        }
    }
    let mut best = op.tail().map_or(0.0, Entry::magnitude);
    for (root, cols) in blocks {
        for (k, &j) in cols.iter().enumerate() {
            local[j] = k;
        }
        let rows = &rows_of[&root];
        let mut a = DMatrix::<Complex64>::zeros(rows.len(), cols.len());
        for (r, &i) in rows.iter().enumerate() {
            for (j, v) in op.row(i) {
                a[(r, local[*j])] = v.to_complex();
            }
        }
        let ata = a.adjoint() * &a;
        let top = ata
            .symmetric_eigenvalues()
            .iter()
            .fold(0.0f64, |m, &x| m.max(x));
        best = best.max(top.max(0.0).sqrt());
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{dirac_modulus, edge_reversal, EdgeWindow};
    use num_rational::BigRational;
    use std::sync::Arc;

    #[test]
    fn norms_of_simple_operators() {
        let w = Arc::new(EdgeWindow::new(1, -1, 1).unwrap());
        assert!((operator_norm(&edge_reversal::<BigRational>(&w)) - 1.0).abs() < 1e-12);
        assert!((operator_norm(&dirac_modulus::<BigRational>(&w)) - 2.0).abs() < 1e-12);
        let t = GeometricOperator::<BigRational>::from_triplets(
            w.clone(),
            None,
            [
                (0, 0, BigRational::from_integer(1.into())),
                (0, 1, BigRational::from_integer(1.into())),
                (1, 0, BigRational::from_integer(1.into())),
                (1, 1, BigRational::from_integer(1.into())),
            ],
        );
        assert!((operator_norm(&t) - 2.0).abs() < 1e-12);
    }
}
