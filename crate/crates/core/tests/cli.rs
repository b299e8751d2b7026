use std::process::Command;

use serde_json::Value;

fn solenoid(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_solenoid"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(stdout: &str) -> Value {
    serde_json::from_str(stdout).expect("JSON on stdout")
}

#[test]
fn edges_csv_has_24_rows_and_sidecar_manifest() {
    let dir = std::env::temp_dir().join(format!("solenoid-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("edges.csv");
    let p = path.to_str().unwrap();
    let (code, _, _) = solenoid(&[
        "--out",
        p,
        "edges",
        "--level",
        "1",
        "--min-exp",
        "0",
        "--max-exp",
        "1",
        "--format",
        "csv",
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 25);
    let manifest = json(&std::fs::read_to_string(format!("{p}.manifest.json")).unwrap());
    assert_eq!(manifest["parameters"]["command"]["edges"]["level"], 1);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn residue_json_is_near_six_over_log_two() {
    let (code, out, _) = solenoid(&["residue", "--eps", "1e-1,1e-2,1e-3"]);
    assert_eq!(code, 0);
    let doc = json(&out);
    let r = doc["result"]["residue"].as_f64().unwrap();
    assert!((r - 6.0 / 2f64.ln()).abs() < 1e-2, "{r}");
    let m = &doc["manifest"];
    for key in [
        "command_line",
        "parameters",
        "library_version",
        "tolerances",
        "wall_time_seconds",
    ] {
        assert!(!m[key].is_null(), "manifest lacks {key}");
    }
}

#[test]
fn trace_reports_exact_rationals() {
    let (code, out, _) = solenoid(&[
        "trace",
        "--projection",
        "P^-p,inf",
        "--p",
        "2",
        "--level",
        "4",
    ]);
    assert_eq!(code, 0);
    let r = &json(&out)["result"];
    assert_eq!(r["value_num"], "81");
    assert_eq!(r["value_den"], "1");
}

#[test]
fn distance_certificate_verifies() {
    let (code, out, _) = solenoid(&[
        "distance",
        "--from",
        "0/1,0/1",
        "--to",
        "1/1,0/1",
        "--resolution",
        "4",
        "--certificate",
    ]);
    assert_eq!(code, 0);
    let r = &json(&out)["result"];
    assert_eq!(r["value"].as_f64(), Some(1.0));
    assert_eq!(r["certificate_ok"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(solenoid(&["--version"]).0, 0);
    assert_eq!(solenoid(&["frobnicate"]).0, 2);
    assert_eq!(solenoid(&["zeta", "--s", "1.5"]).0, 2);
    assert_eq!(solenoid(&["trace", "--projection", "Q^0"]).0, 2);
    assert_eq!(solenoid(&["verify", "--quick"]).0, 0);
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let strip = |s: &str| {
        let mut v = json(s);
        v["manifest"] = Value::Null;
        v.to_string()
    };
    let args = ["integral", "--function", "alpha", "--method", "residue"];
    let one = solenoid(&[&["--threads", "1"][..], &args[..]].concat()).1;
    let four = solenoid(&[&["--threads", "4"][..], &args[..]].concat()).1;
    assert_eq!(strip(&one), strip(&four));
}
