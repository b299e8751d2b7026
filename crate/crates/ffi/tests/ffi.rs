use std::ffi::{c_char, CStr, CString};
use std::ptr;

use gasket_solenoid_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    let n = unsafe { gs_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }
        .to_str()
        .unwrap()
        .to_owned()
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(gs_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn edge_count_and_range_error() {
    let mut n = 0u64;
    assert_eq!(unsafe { gs_edge_count(1, 0, 1, &mut n) }, GsStatus::Ok);
    assert_eq!(n, 24);
    assert_eq!(
        unsafe { gs_edge_count(1, 2, 1, &mut n) },
        GsStatus::InvalidArgument
    );
    assert!(last_error().contains("min 2 > max 1"));
    assert_eq!(
        unsafe { gs_edge_count(1, 0, 1, ptr::null_mut()) },
        GsStatus::NullPointer
    );
}

#[test]
fn zeta_and_residue() {
    let (mut v, mut t) = (0.0, 0.0);
    assert_eq!(unsafe { gs_zeta(2.0, 80, &mut v, &mut t) }, GsStatus::Ok);
    assert!(v > 22.0 && v < 23.0 && t < 1e-8);
    assert_eq!(
        unsafe { gs_zeta(1.5, 80, &mut v, ptr::null_mut()) },
        GsStatus::Divergent
    );
    let eps = [1e-1, 1e-2, 1e-3];
    let mut r = 0.0;
    assert_eq!(
        unsafe { gs_residue(eps.as_ptr(), eps.len(), &mut r) },
        GsStatus::Ok
    );
    assert!((r - 6.0 / 2f64.ln()).abs() < 1e-2);
    assert_eq!(
        unsafe { gs_residue(eps.as_ptr(), 1, &mut r) },
        GsStatus::InvalidArgument
    );
}

#[test]
fn function_handle_lifecycle() {
    let mut f = ptr::null_mut();
    let name = c("alpha");
    assert_eq!(
        unsafe { gs_function_new(name.as_ptr(), 0, 8, &mut f) },
        GsStatus::Ok
    );
    let mut v = 0.0;
    let pt = c("1/2,0/1");
    assert_eq!(
        unsafe { gs_function_evaluate(f, pt.as_ptr(), 0, &mut v) },
        GsStatus::Ok
    );
    assert_eq!(v, 0.5);
    let (mut i, mut e) = (0.0, 0.0);
    assert_eq!(
        unsafe { gs_function_integrate(f, 0, &mut i, &mut e) },
        GsStatus::Ok
    );
    assert!((i - 1.0 / 3.0).abs() <= e + 1e-12);
    unsafe { gs_function_free(f) };

    let bad = c("gamma");
    assert_eq!(
        unsafe { gs_function_new(bad.as_ptr(), 0, 8, &mut f) },
        GsStatus::InvalidArgument
    );
    assert!(f.is_null());
    unsafe { gs_function_free(ptr::null_mut()) };
}

#[test]
fn graph_and_connes_distance_agree() {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { gs_graph_new(0, 4, &mut g) }, GsStatus::Ok);
    assert_eq!(
        unsafe { gs_graph_vertex_count(g) },
        3 * (3usize.pow(4) + 1) / 2
    );
    let (x, y) = (c("0/1,0/1"), c("1/1,0/1"));
    let (mut i, mut j) = (0usize, 0usize);
    assert_eq!(
        unsafe { gs_graph_vertex_index(g, x.as_ptr(), &mut i) },
        GsStatus::Ok
    );
    assert_eq!(
        unsafe { gs_graph_vertex_index(g, y.as_ptr(), &mut j) },
        GsStatus::Ok
    );
    let mut d = 0.0;
    assert_eq!(unsafe { gs_graph_distance(g, i, j, &mut d) }, GsStatus::Ok);
    assert_eq!(d, 1.0);
    assert_eq!(
        unsafe { gs_graph_distance(g, i, 1 << 20, &mut d) },
        GsStatus::InvalidArgument
    );
    let mut cd = 0.0;
    assert_eq!(
        unsafe { gs_connes_distance(x.as_ptr(), y.as_ptr(), 0, 4, &mut cd) },
        GsStatus::Ok
    );
    assert_eq!(cd, d);
    unsafe { gs_graph_free(g) };
}

#[test]
fn errors_are_thread_local() {
    let mut n = 0u64;
    assert_eq!(
        unsafe { gs_edge_count(1, 2, 1, &mut n) },
        GsStatus::InvalidArgument
    );
    let other = std::thread::spawn(|| unsafe { gs_last_error_message(ptr::null_mut(), 0) })
        .join()
        .unwrap();
    assert_eq!(other, 0);
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/gasket_solenoid.h");
    for name in [
        "gs_version",
        "gs_last_error_message",
        "gs_edge_count",
        "gs_zeta",
        "gs_residue",
        "gs_function_new",
        "gs_function_from_values",
        "gs_function_free",
        "gs_function_evaluate",
        "gs_function_integrate",
        "gs_function_nc_integral",
        "gs_graph_new",
        "gs_graph_free",
        "gs_graph_vertex_count",
        "gs_graph_vertex_index",
        "gs_graph_distance",
        "gs_connes_distance",
    ] {
        assert!(
            header.contains(&format!("{name}(")),
            "{name} missing from header"
        );
    }
}

/// Compiles the C smoke program against the generated header and the static
/// library. Skipped when no C compiler is on PATH.
#[test]
fn c_program_links_and_runs() {
    use std::path::PathBuf;
    use std::process::Command;

    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler");
        return;
    }
    let here = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // tests run from target/<profile>/deps
    let profile_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let lib = profile_dir.join("libgasket_solenoid_ffi.a");
    if !lib.exists() {
        eprintln!("skipping: {} not built", lib.display());
        return;
    }
    let exe = std::env::temp_dir().join(format!("gs-smoke-{}", std::process::id()));
    let status = Command::new(&cc)
        .arg(here.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(here.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    let _ = std::fs::remove_file(&exe);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        out.status.success(),
        "{stdout}{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout.starts_with("ok "), "{stdout}");
}
