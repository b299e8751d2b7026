use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use super::entry::Entry;
use super::window::EdgeWindow;
use crate::error::{Error, Result};
use crate::groupoid::{GeneratorSymbol, LocalIsometry};

/// Largest length exponent carrying a nonzero entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Support {
    Empty,
    Bounded(i32),
    /// The operator acts as a scalar on every scale above the window.
    Unbounded,
}

/// A finite-window operator on `l^2(E_inf)` with a declared invariance level.
///
/// Entries outside the window are zero, except for an optional scalar `tail`:
/// when present the operator acts as `tail * P^j` for every `j` above the
/// window's top scale, which must then be the window level.
#[derive(Clone, Debug)]
pub struct GeometricOperator<S: Entry> {
    window: Arc<EdgeWindow>,
    rows: Vec<Vec<(usize, S)>>,
    invariance_level: Option<u32>,
    tail: Option<S>,
}

impl<S: Entry> GeometricOperator<S> {
    pub fn zeros(window: Arc<EdgeWindow>, invariance_level: Option<u32>) -> Self {
        let dim = window.dim();
        GeometricOperator {
            window,
            rows: vec![Vec::new(); dim],
            invariance_level,
            tail: None,
        }
    }

    /// Sums duplicate positions and drops zeros.
    pub fn from_triplets(
        window: Arc<EdgeWindow>,
        invariance_level: Option<u32>,
        triplets: impl IntoIterator<Item = (usize, usize, S)>,
    ) -> Self {
        let mut acc: Vec<BTreeMap<usize, S>> = vec![BTreeMap::new(); window.dim()];
        for (i, j, v) in triplets {
            let slot = acc[i].entry(j).or_insert_with(S::zero);
            *slot = slot.clone() + v;
        }
        let rows = acc
            .into_iter()
            .map(|r| r.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        GeometricOperator {
            window,
            rows,
            invariance_level,
            tail: None,
        }
    }

    pub fn diagonal(window: Arc<EdgeWindow>, invariance_level: Option<u32>, d: Vec<S>) -> Self {
        let rows = d
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                if v.is_zero() {
                    Vec::new()
                } else {
                    vec![(i, v)]
                }
            })
            .collect();
        GeometricOperator {
            window,
            rows,
            invariance_level,
            tail: None,
        }
    }

    pub fn window(&self) -> &Arc<EdgeWindow> {
        &self.window
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row(&self, i: usize) -> &[(usize, S)] {
        &self.rows[i]
    }

    pub fn invariance_level(&self) -> Option<u32> {
        self.invariance_level
    }

    /// Replaces the declared invariance level (verified lazily by the trace).
    pub fn with_invariance_level(mut self, level: Option<u32>) -> Self {
        self.invariance_level = level;
        self
    }

    pub fn tail(&self) -> Option<&S> {
        self.tail.as_ref()
    }

    pub fn with_tail(mut self, tail: S) -> Result<Self> {
        if self.window.max_exp() != self.window.level() as i32 {
            return Err(Error::Malformed(
                "a tail needs a window reaching the top scale of its level".into(),
            ));
        }
        self.tail = if tail.is_zero() { None } else { Some(tail) };
        Ok(self)
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        match self.rows[i].binary_search_by_key(&j, |(c, _)| *c) {
            Ok(k) => self.rows[i][k].1.clone(),
            Err(_) => S::zero(),
        }
    }

    pub fn support(&self) -> Support {
        if self.tail.is_some() {
            return Support::Unbounded;
        }
        let w = &self.window;
        let mut best: Option<i32> = None;
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, _) in row {
                let s = w.len_exp(i).max(w.len_exp(j));
                best = Some(best.map_or(s, |b: i32| b.max(s)));
            }
        }
        best.map_or(Support::Empty, Support::Bounded)
    }

    fn check_window(&self, other: &GeometricOperator<S>) -> Result<()> {
        if Arc::ptr_eq(&self.window, &other.window) || self.window.same_shape(&other.window) {
            Ok(())
        } else {
            Err(Error::Malformed(
                "operators live on different windows".into(),
            ))
        }
    }

    fn joint_level(a: Option<u32>, b: Option<u32>) -> Option<u32> {
        Some(a?.max(b?))
    }

    fn combine(&self, other: &Self, sign: S) -> Result<Self> {
        self.check_window(other)?;
        let rows = self
            .rows
            .par_iter()
            .zip(other.rows.par_iter())
            .map(|(a, b)| {
                let mut out = Vec::with_capacity(a.len() + b.len());
                let (mut p, mut q) = (0, 0);
                while p < a.len() || q < b.len() {
                    let take_a = q >= b.len() || (p < a.len() && a[p].0 < b[q].0);
                    let take_b = p >= a.len() || (q < b.len() && b[q].0 < a[p].0);
                    if take_a {
                        out.push(a[p].clone());
                        p += 1;
                    } else if take_b {
                        out.push((b[q].0, sign.clone() * b[q].1.clone()));
                        q += 1;
                    } else {
                        let v = a[p].1.clone() + sign.clone() * b[q].1.clone();
                        if !v.is_zero() {
                            out.push((a[p].0, v));
                        }
                        p += 1;
                        q += 1;
                    }
                }
                out
            })
            .collect();
        let tail = match (&self.tail, &other.tail) {
            (None, None) => None,
            (a, b) => {
                let a = a.clone().unwrap_or_else(S::zero);
                let b = b.clone().unwrap_or_else(S::zero);
                Some(a + sign * b).filter(|t| !t.is_zero())
            }
        };
        Ok(GeometricOperator {
            window: self.window.clone(),
            rows,
            invariance_level: Self::joint_level(self.invariance_level, other.invariance_level),
            tail,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, S::one())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -S::one())
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zeros(self.window.clone(), self.invariance_level);
        }
        GeometricOperator {
            window: self.window.clone(),
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|(j, v)| (*j, c.clone() * v.clone())).collect())
                .collect(),
            invariance_level: self.invariance_level,
            tail: self.tail.clone().map(|t| c.clone() * t),
        }
    }

    /// `self * other` on the window.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_window(other)?;
        let rows = self
            .rows
            .par_iter()
            .map(|row| {
                let mut acc: BTreeMap<usize, S> = BTreeMap::new();
                for (k, a) in row {
                    for (j, b) in &other.rows[*k] {
                        let slot = acc.entry(*j).or_insert_with(S::zero);
                        *slot = slot.clone() + a.clone() * b.clone();
                    }
                }
                acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        let tail = match (&self.tail, &other.tail) {
            (Some(a), Some(b)) => Some(a.clone() * b.clone()),
            _ => None,
        };
        Ok(GeometricOperator {
            window: self.window.clone(),
            rows,
            invariance_level: Self::joint_level(self.invariance_level, other.invariance_level),
            tail,
        })
    }

    pub fn adjoint(&self) -> Self {
        let mut trip = Vec::with_capacity(self.nnz());
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                trip.push((*j, i, v.conj()));
            }
        }
        let mut out = Self::from_triplets(self.window.clone(), self.invariance_level, trip);
        out.tail = self.tail.as_ref().map(Entry::conj);
        out
    }

    /// `[self, other] = self*other - other*self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn map<T: Entry>(&self, f: impl Fn(&S) -> T + Sync) -> GeometricOperator<T> {
        GeometricOperator {
            window: self.window.clone(),
            rows: self
                .rows
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|(j, v)| (*j, f(v)))
                        .filter(|(_, v)| !v.is_zero())
                        .collect()
                })
                .collect(),
            invariance_level: self.invariance_level,
            tail: self.tail.as_ref().map(f),
        }
    }

    pub fn max_abs_entry(&self) -> f64 {
        let m = self
            .rows
            .iter()
            .flatten()
            .map(|(_, v)| v.magnitude())
            .fold(0.0, f64::max);
        m.max(self.tail.as_ref().map_or(0.0, Entry::magnitude))
    }

    /// Largest entrywise difference (tails included).
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs_entry())
    }

    /// `sum_i T_ii` over the window edges selected by `keep`.
    pub fn trace_where(&self, keep: impl Fn(usize) -> bool) -> S {
        let mut s = S::zero();
        for (i, row) in self.rows.iter().enumerate() {
            if keep(i) {
                if let Ok(k) = row.binary_search_by_key(&i, |(c, _)| *c) {
                    s = s + row[k].1.clone();
                }
            }
        }
        s
    }

    /// `tr(P_m T)`.
    pub fn trace_level(&self, m: u32) -> S {
        let w = self.window.clone();
        self.trace_where(|i| w.cell_level(i) <= m)
    }

    /// `tr(P^j_m T)`.
    pub fn trace_scale_level(&self, j: i32, m: u32) -> S {
        let w = self.window.clone();
        self.trace_where(|i| w.len_exp(i) == j && w.cell_level(i) <= m)
    }

    /// Checks membership in `B_n` on the window.
    ///
    /// Two conditions are verified: every nonzero entry couples edges lying in
    /// the same cell of size `2^m` (or both longer than `2^m`) for `n <= m < L`,
    /// and the operator commutes with `V_R` for every generator `R^m`,
    /// `n <= m < L`. Together they give commutation with all `V_γ`,
    /// `γ ∈ G_m`, `m >= n`, restricted to the window.
    pub fn verify_invariance(&self, n: u32) -> Result<()> {
        let w = &self.window;
        let top = w.level();
        if n > top {
            return Err(Error::WindowTooSmall(format!(
                "invariance level {n} above window level {top}"
            )));
        }
        let fail = |detail: String| Error::InvarianceViolation { level: n, detail };
        for (i, row) in self.rows.iter().enumerate() {
            for (j, _) in row {
                for m in n as i32..top as i32 {
                    if w.ancestor(i, m) != w.ancestor(*j, m) {
                        return Err(fail(format!(
                            "entry ({}, {}) couples different cells of size 2^{m}",
                            w.edge(i),
                            w.edge(*j)
                        )));
                    }
                }
            }
        }
        let tol = 1e-12 * self.max_abs_entry().max(1.0);
        for m in n..top {
            for (to, from) in [(1, 0), (2, 0), (0, 1), (2, 1), (0, 2), (1, 2)] {
                let g = GeneratorSymbol { scale: m, to, from }.isometry();
                let v = partial_isometry_in(w.clone(), &g);
                let c = self.commutator(&v)?;
                if c.max_abs_entry() > tol {
                    return Err(fail(format!("does not commute with V of R{m}_{to}{from}")));
                }
            }
        }
        Ok(())
    }

    /// `τ_0(T) = tr(P_m T) / 3^m` with `m = max(n, support, 0)`.
    ///
    /// An operator with a tail adds `tail * sum_{j > L} 6 * 3^-j = tail * 3^(1-L)`.
    pub fn renormalized_trace(&self) -> Result<S> {
        let n = self.invariance_level.ok_or(Error::NotGeometric)?;
        let top = self.window.level();
        self.verify_invariance(n)?;
        if let Some(t) = &self.tail {
            let base = self.trace_level(top) * S::pow3(-(top as i32));
            return Ok(base + t.clone() * S::pow3(1 - top as i32));
        }
        let s = match self.support() {
            Support::Empty => return Ok(S::zero()),
            Support::Bounded(s) => s,
            Support::Unbounded => unreachable!(),
        };
        if s > top as i32 {
            return Err(Error::SupportExceedsWindow {
                support: s,
                level: top,
            });
        }
        let m = (n as i32).max(s).max(0) as u32;
        Ok(self.trace_level(m) * S::pow3(-(m as i32)))
    }

    /// Both sides of `tr(P_{m+1} T) = 3 tr(P_m T) + tr(P^{m+1}_{m+1} T)`.
    pub fn trace_recursion_check(&self, m: u32) -> Result<(S, S)> {
        let n = self.invariance_level.ok_or(Error::NotGeometric)?;
        if m < n {
            return Err(Error::InvalidRange {
                min: n as i32,
                max: m as i32,
            });
        }
        if m + 1 > self.window.level() {
            return Err(Error::WindowTooSmall(format!(
                "need K_{} inside a window of level {}",
                m + 1,
                self.window.level()
            )));
        }
        let lhs = self.trace_level(m + 1);
        let rhs =
            S::from_i64(3) * self.trace_level(m) + self.trace_scale_level(m as i32 + 1, m + 1);
        Ok((lhs, rhs))
    }

    /// Both sides of `tr(P^j_m T)/3^m = tr(P^j_n T)/3^n` for `j <= n <= m`.
    pub fn scale_trace_check(&self, j: i32, n: u32, m: u32) -> Result<(S, S)> {
        let inv = self.invariance_level.ok_or(Error::NotGeometric)?;
        if j > n as i32 || n > m || n < inv {
            return Err(Error::InvalidRange {
                min: j,
                max: m as i32,
            });
        }
        if m > self.window.level() {
            return Err(Error::WindowTooSmall(format!(
                "level {m} above window level {}",
                self.window.level()
            )));
        }
        Ok((
            self.trace_scale_level(j, m) * S::pow3(-(m as i32)),
            self.trace_scale_level(j, n) * S::pow3(-(n as i32)),
        ))
    }
}

/// `V_γ` truncated to the window: `e -> γ(e)` for window edges inside `s(γ)`.
pub(crate) fn partial_isometry_in<S: Entry>(
    window: Arc<EdgeWindow>,
    g: &LocalIsometry,
) -> GeometricOperator<S> {
    let trip: Vec<_> = (0..window.dim())
        .filter_map(|i| window.map_edge(g, i).map(|j| (j, i, S::one())))
        .collect();
    GeometricOperator::from_triplets(window, None, trip)
}
