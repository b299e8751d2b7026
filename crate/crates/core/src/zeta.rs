//! The zeta function `ζ(s) = τ_0((I + D^2)^{-s/2})`, its residue at the metric
//! dimension, and the noncommutative integral.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::{integrate, SampledFunction};
use crate::geometry::{enumerate_edges, lattice_corners};
use crate::numeric::{dimension, NeumaierSum};

/// Truncation of `ζ(s)` at `N` terms in each of its two series.
#[derive(Clone, Debug, Serialize)]
pub struct ZetaSeries {
    pub s: f64,
    pub cutoff: u32,
    pub value: f64,
    pub tail_bound: f64,
}

/// `6 * 3^n * (1 + 4^n)^(-s/2)`, the contribution of edges of length `2^-n`.
fn fine_term(n: u32, s: f64) -> f64 {
    let x = n as f64;
    let log = x * 3f64.ln() - 0.5 * s * (x * 4f64.ln() + (-2.0 * x).exp2().ln_1p());
    6.0 * log.exp()
}

/// `6 * 3^-j * (1 + 4^-j)^(-s/2)`, the contribution of edges of length `2^j`.
fn coarse_term(j: u32, s: f64) -> f64 {
    let x = j as f64;
    6.0 * (-x * 3f64.ln() - 0.5 * s * (-2.0 * x).exp2().ln_1p()).exp()
}

fn check_abscissa(s: f64) -> Result<()> {
    let d = dimension();
    if s.is_nan() || s <= d {
        return Err(Error::Divergent { s, abscissa: d });
    }
    Ok(())
}

/// Bound on the terms discarded by [`zeta`]: `6 q^(N+1)/(1-q) + 3^(1-N)` with `q = 3 * 2^-s`.
pub fn tail_bound(s: f64, cutoff: u32) -> Result<f64> {
    check_abscissa(s)?;
    let q = 3.0 * (-s).exp2();
    let n = cutoff as f64;
    Ok(6.0 * ((n + 1.0) * q.ln()).exp() / (1.0 - q) + 3.0 * (-n * 3f64.ln()).exp())
}

/// Smallest cutoff whose tail bound is at most `target`.
pub fn cutoff_for(s: f64, target: f64) -> Result<u32> {
    check_abscissa(s)?;
    if target.is_nan() || target <= 0.0 {
        return Err(Error::Malformed(format!(
            "tail target {target} must be positive"
        )));
    }
    let (mut lo, mut hi) = (0u32, 1u32);
    while tail_bound(s, hi)? > target {
        lo = hi;
        hi = hi.checked_mul(2).ok_or_else(|| {
            Error::Malformed(format!("no cutoff reaches tail {target} at s = {s}"))
        })?;
    }
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if tail_bound(s, mid)? <= target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(hi)
}

/// `6 Σ_{n=0}^N (1+4^n)^(-s/2) 3^n + 6 Σ_{j=1}^N 3^-j (1+4^-j)^(-s/2)`.
pub fn zeta(s: f64, cutoff: u32) -> Result<ZetaSeries> {
    let tail_bound = tail_bound(s, cutoff)?;
    let mut sum = NeumaierSum::new();
    for n in 0..=cutoff {
        sum.add(fine_term(n, s));
    }
    for j in 1..=cutoff {
        sum.add(coarse_term(j, s));
    }
    Ok(ZetaSeries {
        s,
        cutoff,
        value: sum.value(),
        tail_bound,
    })
}

/// `Σ_e (1 + length(e)^-2)^(-s/2) / 3^m` over the edges of `K_m` with length
/// at least `2^-r`, by explicit enumeration.
///
/// Returns the sum and a bound on the part of `ζ(s)` it leaves out (edges
/// shorter than `2^-r` and longer edges of larger `K`s).
pub fn window_sum(s: f64, level: u32, resolution: u32) -> Result<(f64, f64)> {
    check_abscissa(s)?;
    let edges = enumerate_edges(level, -(resolution as i32), level as i32)?;
    let mut sum = NeumaierSum::new();
    for e in &edges {
        let len = (e.len_exp() as f64).exp2();
        sum.add((1.0 + len.powi(-2)).powf(-0.5 * s));
    }
    let value = sum.value() / 3f64.powi(level as i32);
    let q = 3.0 * (-s).exp2();
    let missing =
        6.0 * q.powi(resolution as i32 + 1) / (1.0 - q) + 3.0 * 3f64.powi(-(level as i32));
    Ok((value, missing))
}

/// Closed-form partial sum over the scales `-r..=m` (the range of [`window_sum`]).
pub fn partial_sum(s: f64, level: u32, resolution: u32) -> Result<f64> {
    check_abscissa(s)?;
    let mut sum = NeumaierSum::new();
    for n in 0..=resolution {
        sum.add(fine_term(n, s));
    }
    for j in 1..=level {
        sum.add(coarse_term(j, s));
    }
    Ok(sum.value())
}

/// Linear extrapolation to `ε = 0` through the two smallest samples.
fn extrapolate(samples: &[(f64, f64)]) -> f64 {
    let mut v = samples.to_vec();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (e1, r1) = v[0];
    let (e2, r2) = v[1];
    r1 - e1 * (r2 - r1) / (e2 - e1)
}

fn check_eps(eps: &[f64]) -> Result<()> {
    if eps.len() < 2 {
        return Err(Error::TooFewSamples(eps.len()));
    }
    if eps.iter().any(|e| e.is_nan() || *e <= 0.0) {
        return Err(Error::Malformed("eps values must be positive".into()));
    }
    let mut sorted = eps.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Malformed("eps values must be distinct".into()));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidueSample {
    pub eps: f64,
    pub cutoff: u32,
    /// `ε ζ(d + ε)`.
    pub scaled: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidueEstimate {
    pub residue: f64,
    pub samples: Vec<ResidueSample>,
}

/// `Res_{s=d} ζ(s)` from `R(ε) = ε ζ(d + ε)`, extrapolated linearly to 0.
///
/// Each cutoff makes the certified tail at most `ε^2`.
pub fn residue_estimate(eps: &[f64]) -> Result<ResidueEstimate> {
    check_eps(eps)?;
    let d = dimension();
    let samples = eps
        .iter()
        .map(|&e| {
            let n = cutoff_for(d + e, e * e)?;
            let z = zeta(d + e, n)?;
            Ok(ResidueSample {
                eps: e,
                cutoff: n,
                scaled: e * z.value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pts: Vec<_> = samples.iter().map(|r| (r.eps, r.scaled)).collect();
    Ok(ResidueEstimate {
        residue: extrapolate(&pts),
        samples,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct NcIntegral {
    pub level: u32,
    pub resolution: i32,
    /// `(1/d) Res_{s=d} tr(ρ(f) |D_n|^-s) / 3^n`.
    pub residue_route: f64,
    /// `(6/log 3) ∫_{K_n} f / 3^n`.
    pub quadrature_route: f64,
    pub quadrature_error: f64,
    /// Share of `R(ε)` at the smallest `ε` carried by the extrapolated
    /// sub-resolution scales, bounded in size by `‖f‖_∞` times the same
    /// geometric series.
    pub tail_share: f64,
}

/// `Σ_{e ⊂ K_n, length 2^k} f(e+)` for `k = -r ..= n`, indexed by `k + r`.
fn scale_sums(f: &SampledFunction, level: u32, resolution: i32) -> Result<Vec<f64>> {
    let shift = f.resolution() - resolution;
    if shift < 0 {
        return Err(Error::NotSampled(format!(
            "resolution {resolution} is finer than the samples ({})",
            f.resolution()
        )));
    }
    (-resolution..=level as i32)
        .map(|k| {
            let unit = 1i64 << (k + resolution);
            let mut sum = NeumaierSum::new();
            for (a, b) in lattice_corners((level as i32 - k) as u32) {
                for (da, db) in [(0, 0), (1, 0), (0, 1)] {
                    let (x, y) = ((a + da) * unit, (b + db) * unit);
                    let v = f
                        .value_at_lattice(x << shift, y << shift)
                        .ok_or_else(|| Error::NotSampled(format!("({x}, {y})")))?;
                    // each vertex of a cell is the target of two of its six edges
                    sum.add(2.0 * v);
                }
            }
            Ok(sum.value())
        })
        .collect()
}

/// Both routes to `∮ f` for `f ∈ 𝒜_n`, at resolution `r`.
///
/// The residue route evaluates `ε tr(ρ(f)|D_n|^-(d+ε)) / 3^n`, continuing the
/// scale sums below `2^-r` geometrically from the finest one, and
/// extrapolates to `ε = 0`.
pub fn nc_integral(
    f: &SampledFunction,
    level: u32,
    eps: &[f64],
    resolution: i32,
) -> Result<NcIntegral> {
    check_eps(eps)?;
    if level < f.invariance_level() {
        return Err(Error::InvalidRange {
            min: f.invariance_level() as i32,
            max: level as i32,
        });
    }
    if level as i32 + resolution < 0 {
        return Err(Error::InvalidRange {
            min: -resolution,
            max: level as i32,
        });
    }
    let d = dimension();
    let sums = scale_sums(f, level, resolution)?;
    let norm = 3f64.powi(level as i32);
    let smallest = eps.iter().copied().fold(f64::INFINITY, f64::min);
    let mut share = 0.0;
    let mut pts = Vec::with_capacity(eps.len());
    for &e in eps {
        let s = d + e;
        let q = 3.0 * (-s).exp2();
        let mut acc = NeumaierSum::new();
        for (i, v) in sums.iter().enumerate() {
            let k = i as i32 - resolution;
            acc.add(v * (k as f64 * s).exp2());
        }
        let tail = sums[0] * (-(resolution as f64) * s).exp2() * q / (1.0 - q);
        acc.add(tail);
        let total = acc.value();
        if e == smallest {
            share = tail / total;
        }
        pts.push((e, e * total / norm));
    }
    let quad = integrate(f, level, resolution)?;
    let c = 6.0 / 3f64.ln();
    Ok(NcIntegral {
        level,
        resolution,
        residue_route: extrapolate(&pts) / d,
        quadrature_route: c * quad.value / norm,
        quadrature_error: c * quad.error_bound / norm,
        tail_share: share,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceClassGap {
    pub level: u32,
    pub terms: Vec<(i32, f64)>,
    pub partial_sum: f64,
    pub tail_bound: f64,
}

/// `τ((I + D^2)^(-d/2) - |D_n|^-d)` summed scale by scale over `2^-r ..= 2^m`.
///
/// Scale `k` contributes `6 * 3^-k * |(1+4^-k)^(-d/2) - [k <= n] 3^k|`.
/// Scales above `2^m` add at most `3^(1-m)`, scales below `2^-r` at most `d 4^-r`.
pub fn trace_class_gap(level: u32, max_exp: i32, resolution: u32) -> Result<TraceClassGap> {
    if max_exp <= level as i32 {
        return Err(Error::InvalidRange {
            min: level as i32,
            max: max_exp,
        });
    }
    let d = dimension();
    let terms: Vec<(i32, f64)> = (-(resolution as i32)..=max_exp)
        .map(|k| {
            let kf = k as f64;
            let a = (-2.0 * kf).exp2().ln_1p() * (-0.5 * d);
            let a = a.exp();
            let b = if k <= level as i32 { 3f64.powi(k) } else { 0.0 };
            (k, 6.0 * 3f64.powi(-k) * (a - b).abs())
        })
        .collect();
    let partial_sum = terms.iter().map(|t| t.1).collect::<NeumaierSum>().value();
    Ok(TraceClassGap {
        level,
        terms,
        partial_sum,
        tail_bound: 3.0 * 3f64.powi(-max_exp) + d * 4f64.powi(-(resolution as i32)),
    })
}
