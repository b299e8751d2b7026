//! C ABI over `gasket-solenoid`.
//!
//! Every fallible function returns a [`GsStatus`]; results go through out
//! pointers. After a non-`Ok` status, [`gs_last_error_message`] returns the
//! message for the calling thread. Handles are opaque and owned by the caller,
//! who releases them with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gasket_solenoid::distance::{connes_distance, graph_distance_units, DistanceQuery};
use gasket_solenoid::function::{integrate, FunctionFamily, SampledFunction};
use gasket_solenoid::geometry::{edge_count, TrianglePoint, VertexSet};
use gasket_solenoid::zeta::{nc_integral, residue_estimate, zeta};
use gasket_solenoid::Error;

/// Status codes returned by every fallible `gs_` function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GsStatus {
    Ok = 0,
    NullPointer = 1,
    /// Unparseable text, bad ranges, or a point that is not sampled.
    InvalidArgument = 2,
    /// Groupoid or domain mismatch.
    DomainError = 3,
    /// The zeta series diverges at the requested `s`.
    Divergent = 4,
    /// A certificate or verification check failed.
    VerificationFailed = 5,
    /// Operator-level failure (not geometric, window too small).
    OperatorError = 6,
    /// A Rust panic was caught at the boundary.
    Panic = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> GsStatus {
    match e {
        Error::Malformed(_)
        | Error::InvalidRange { .. }
        | Error::NotInGasket(_)
        | Error::NotSampled(_)
        | Error::TooFewSamples(_) => GsStatus::InvalidArgument,
        Error::DomainViolation { .. }
        | Error::IncompatibleDomains(_)
        | Error::SizeMismatch(..)
        | Error::NonComposable(_)
        | Error::NotReducible(_) => GsStatus::DomainError,
        Error::Divergent { .. } => GsStatus::Divergent,
        Error::CertificateFailure(_)
        | Error::CheckFailed(_)
        | Error::InvarianceViolation { .. } => GsStatus::VerificationFailed,
        _ => GsStatus::OperatorError,
    }
}

/// Runs `f`, recording errors and catching panics.
fn guard(f: impl FnOnce() -> Result<(), GsStatus>) -> GsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GsStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            GsStatus::Panic
        }
    }
}

fn lib<T>(r: gasket_solenoid::Result<T>) -> Result<T, GsStatus> {
    r.map_err(|e| {
        let s = status_of(&e);
        set_error(e.to_string());
        s
    })
}

fn null() -> GsStatus {
    set_error("null pointer argument".into());
    GsStatus::NullPointer
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, GsStatus> {
    p.as_mut().ok_or_else(null)
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, GsStatus> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8".into());
        GsStatus::InvalidArgument
    })
}

unsafe fn slice<'a>(p: *const f64, n: usize) -> Result<&'a [f64], GsStatus> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn point(p: *const c_char) -> Result<TrianglePoint, GsStatus> {
    lib(text(p)?.parse())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL, or 0
/// when there is no error.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn gs_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Number of oriented edges of `K_level` with lengths `2^min_exp ..= 2^max_exp`.
///
/// # Safety
/// `count` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gs_edge_count(
    level: u32,
    min_exp: i32,
    max_exp: i32,
    count: *mut u64,
) -> GsStatus {
    guard(|| {
        let out = out(count)?;
        let n = lib(edge_count(level, min_exp, max_exp))?;
        *out = u64::try_from(n).map_err(|_| {
            set_error(format!("edge count {n} overflows u64"));
            GsStatus::InvalidArgument
        })?;
        Ok(())
    })
}

/// Truncated `zeta_D(s)` with `cutoff` terms per series, and a bound on the
/// omitted tail.
///
/// # Safety
/// `value` and `tail_bound` must be valid for writes; `tail_bound` may be null.
#[no_mangle]
pub unsafe extern "C" fn gs_zeta(
    s: f64,
    cutoff: u32,
    value: *mut f64,
    tail_bound: *mut f64,
) -> GsStatus {
    guard(|| {
        let v = out(value)?;
        let z = lib(zeta(s, cutoff))?;
        *v = z.value;
        if let Some(t) = tail_bound.as_mut() {
            *t = z.tail_bound;
        }
        Ok(())
    })
}

/// Residue of `zeta_D` at the metric dimension, extrapolated from `eps[0..n]`.
///
/// # Safety
/// `eps` must be valid for `n` reads and `residue` for writes.
#[no_mangle]
pub unsafe extern "C" fn gs_residue(eps: *const f64, n: usize, residue: *mut f64) -> GsStatus {
    guard(|| {
        let r = out(residue)?;
        *r = lib(residue_estimate(slice(eps, n)?))?.residue;
        Ok(())
    })
}

/// A function sampled on the vertices of `K_level` at spacing `2^-resolution`.
pub struct GsFunction(SampledFunction);

/// Builds a function from a family name: `alpha`, `beta`, `alpha2`, a
/// constant, or `affine:c0,ca,cb`.
///
/// # Safety
/// `family` must be a NUL-terminated string and `handle` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gs_function_new(
    family: *const c_char,
    level: u32,
    resolution: i32,
    handle: *mut *mut GsFunction,
) -> GsStatus {
    guard(|| {
        let h = out(handle)?;
        *h = ptr::null_mut();
        let family: FunctionFamily = lib(text(family)?.parse())?;
        let f = lib(SampledFunction::from_family(family, level, resolution))?;
        *h = Box::into_raw(Box::new(GsFunction(f)));
        Ok(())
    })
}

/// Builds a function from `n` values in vertex order of the sample graph.
///
/// # Safety
/// `values` must be valid for `n` reads and `handle` for writes.
#[no_mangle]
pub unsafe extern "C" fn gs_function_from_values(
    level: u32,
    resolution: i32,
    values: *const f64,
    n: usize,
    handle: *mut *mut GsFunction,
) -> GsStatus {
    guard(|| {
        let h = out(handle)?;
        *h = ptr::null_mut();
        let v = slice(values, n)?.to_vec();
        let f = lib(SampledFunction::tabulated(level, resolution, v))?;
        *h = Box::into_raw(Box::new(GsFunction(f)));
        Ok(())
    })
}

/// # Safety
/// `f` must be null or a handle from `gs_function_new`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gs_function_free(f: *mut GsFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Value at a point `"alpha,beta"` of `K_ambient_level`.
///
/// # Safety
/// `f` must be a live handle, `point` NUL-terminated, `value` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gs_function_evaluate(
    f: *const GsFunction,
    pt: *const c_char,
    ambient_level: u32,
    value: *mut f64,
) -> GsStatus {
    guard(|| {
        let f = f.as_ref().ok_or_else(null)?;
        let v = out(value)?;
        *v = lib(f.0.evaluate(&point(pt)?, ambient_level))?;
        Ok(())
    })
}

/// Integral against the normalized Hausdorff measure of `K_level`, with an
/// error bound.
///
/// # Safety
/// `f` must be a live handle; `value` valid for writes; `error_bound` may be null.
#[no_mangle]
pub unsafe extern "C" fn gs_function_integrate(
    f: *const GsFunction,
    level: u32,
    value: *mut f64,
    error_bound: *mut f64,
) -> GsStatus {
    guard(|| {
        let f = f.as_ref().ok_or_else(null)?;
        let v = out(value)?;
        let q = lib(integrate(&f.0, level, f.0.resolution()))?;
        *v = q.value;
        if let Some(e) = error_bound.as_mut() {
            *e = q.error_bound;
        }
        Ok(())
    })
}

/// Noncommutative integral of `f` by the residue route.
///
/// # Safety
/// `f` must be a live handle, `eps` valid for `n` reads, `value` for writes.
#[no_mangle]
pub unsafe extern "C" fn gs_function_nc_integral(
    f: *const GsFunction,
    level: u32,
    eps: *const f64,
    n: usize,
    value: *mut f64,
) -> GsStatus {
    guard(|| {
        let f = f.as_ref().ok_or_else(null)?;
        let v = out(value)?;
        let r = lib(nc_integral(&f.0, level, slice(eps, n)?, f.0.resolution()))?;
        *v = r.residue_route;
        Ok(())
    })
}

/// The vertex graph of `K_level` at spacing `2^-resolution`.
pub struct GsGraph(VertexSet);

/// # Safety
/// `handle` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gs_graph_new(
    level: u32,
    resolution: i32,
    handle: *mut *mut GsGraph,
) -> GsStatus {
    guard(|| {
        let h = out(handle)?;
        *h = ptr::null_mut();
        let vs = lib(VertexSet::new(level, resolution))?;
        *h = Box::into_raw(Box::new(GsGraph(vs)));
        Ok(())
    })
}

/// # Safety
/// `g` must be null or a handle from `gs_graph_new`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gs_graph_free(g: *mut GsGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of vertices, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gs_graph_vertex_count(g: *const GsGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.len())
}

/// Index of the vertex at `"alpha,beta"`.
///
/// # Safety
/// `g` must be a live handle, `pt` NUL-terminated, `index` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gs_graph_vertex_index(
    g: *const GsGraph,
    pt: *const c_char,
    index: *mut usize,
) -> GsStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(null)?;
        let i = out(index)?;
        let p = point(pt)?;
        *i = g.0.index_of_point(&p).ok_or_else(|| {
            set_error(format!("vertex {p} is not sampled"));
            GsStatus::InvalidArgument
        })?;
        Ok(())
    })
}

/// Geodesic distance between two vertex indices.
///
/// # Safety
/// `g` must be a live handle and `distance` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gs_graph_distance(
    g: *const GsGraph,
    from: usize,
    to: usize,
    distance: *mut f64,
) -> GsStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(null)?;
        let d = out(distance)?;
        let n = g.0.len();
        if from >= n || to >= n {
            set_error(format!(
                "vertex index out of range (graph has {n} vertices)"
            ));
            return Err(GsStatus::InvalidArgument);
        }
        let units = graph_distance_units(&g.0, from, to);
        *d = units as f64 * (-g.0.resolution() as f64).exp2();
        Ok(())
    })
}

/// Connes distance between two points, with the dual witness verified.
/// Returns `VerificationFailed` when the certificate does not check.
///
/// # Safety
/// `from` and `to` must be NUL-terminated and `distance` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gs_connes_distance(
    from: *const c_char,
    to: *const c_char,
    level: u32,
    resolution: i32,
    distance: *mut f64,
) -> GsStatus {
    guard(|| {
        let d = out(distance)?;
        let q = DistanceQuery {
            x: point(from)?,
            y: point(to)?,
            level,
            resolution,
        };
        *d = lib(connes_distance(&q))?.value;
        Ok(())
    })
}
