use serde_json::Value;
use std::process::{Command, Output};

const SQRT2: &str = "1.4142135623730951";

fn kgwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kgwave"))
        .args(args)
        .output()
        .expect("spawn kgwave")
}

fn json_stdout(args: &[&str]) -> Value {
    let out = kgwave(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn csv_rows(text: &[u8]) -> (csv::StringRecord, Vec<csv::StringRecord>) {
    let mut rdr = csv::Reader::from_reader(text);
    let header = rdr.headers().unwrap().clone();
    (header, rdr.records().map(Result::unwrap).collect())
}

fn field<'a>(header: &csv::StringRecord, row: &'a csv::StringRecord, name: &str) -> &'a str {
    &row[header.iter().position(|h| h == name).unwrap()]
}

#[test]
fn report_subluminal_rotational_is_stable() {
    let r = json_stdout(&["report", "-E", "-2", "-c", "0.5"]);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["verdict"], "spectrally stable");
    assert!(r["certificates"].as_array().unwrap().is_empty());
    assert!(r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["pass"] == true));
}

#[test]
fn report_subluminal_librational_is_unstable() {
    let r = json_stdout(&["report", "-E", "0", "-c", "0.5"]);
    assert_eq!(r["verdict"], "spectrally unstable");
    assert_eq!(r["indices"]["gamma"], -1);
    assert_eq!(r["indices"]["rho"], -1);
    assert_eq!(
        r["real_eigenvalues"]["periodic"].as_array().unwrap().len(),
        1
    );
}

#[test]
fn report_superluminal_rotational_has_g_certificate() {
    let r = json_stdout(&["report", "-E", "2", "-c", SQRT2]);
    assert_eq!(r["verdict"], "spectrally unstable");
    assert_eq!(r["modulational"], "WeakInstabilityPossible");
    let certs = r["certificates"].as_array().unwrap();
    assert!(certs.iter().any(|c| c["kind"] == "GSignChange"));
}

#[test]
fn report_embeds_health_checks() {
    let r = json_stdout(&["report", "-E", "0", "-c", SQRT2]);
    let names: Vec<&str> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    for name in ["abel_identity", "delta_identity", "w_e_equals_period"] {
        assert!(names.contains(&name), "{name} missing from {names:?}");
    }
}

#[test]
fn report_is_reproducible_across_thread_counts() {
    let a = kgwave(&["report", "-E", "0", "-c", "0.5", "--threads", "1"]);
    let b = kgwave(&["report", "-E", "0", "-c", "0.5", "--threads", "4"]);
    assert!(a.status.success() && b.status.success());
    let strip = |o: &Output| {
        let mut v: Value = serde_json::from_slice(&o.stdout).unwrap();
        v["config"]["threads"] = Value::Null;
        v
    };
    assert_eq!(strip(&a), strip(&b));
    let c = kgwave(&["report", "-E", "0", "-c", "0.5", "--threads", "1"]);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn domain_error_exit_code_and_json() {
    let out = kgwave(&["report", "-E", "1", "-c", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["schema"], 1);
    assert_eq!(err["error"]["kind"], "OnSeparatrix");
    assert_eq!(err["error"]["exit_code"], 2);
}

#[test]
fn bad_inputs_exit_two() {
    assert_eq!(
        kgwave(&["report", "-E", "0", "-c", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        kgwave(&[
            "report",
            "-E",
            "0",
            "-c",
            "2",
            "--potential",
            "/nonexistent.json"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        kgwave(&["report", "-E", "0", "-c", "2", "--tol-quad", "-1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        kgwave(&["nls", "--u0", "0.3", "--k", "1"]).status.code(),
        Some(2)
    );
}

#[test]
fn potential_file_with_unknown_key_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"name":"x","kind":"poly","poly":[0,0,0.5],"colour":1}"#,
    )
    .unwrap();
    let out = kgwave(&[
        "whitham",
        "-E",
        "0.1",
        "-c",
        "2",
        "--potential",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn quartic_potential_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("quartic.json");
    std::fs::write(
        &path,
        r#"{"name":"quartic","kind":"poly","poly":[0,0,0.5,0,-0.25]}"#,
    )
    .unwrap();
    let r = json_stdout(&[
        "nls",
        "--u0",
        "0",
        "--k",
        "1",
        "--potential",
        path.to_str().unwrap(),
    ]);
    assert_eq!(r["kind_label"], "focusing");
    assert_eq!(r["rho_consistent"], true);
    let r = json_stdout(&[
        "report",
        "-E",
        "0.1",
        "-c",
        "2",
        "--potential",
        path.to_str().unwrap(),
    ]);
    assert_eq!(r["indices"]["rho"], -1);
}

#[test]
fn scan_grid_rows() {
    let out = kgwave(&[
        "scan",
        "-E",
        "-3,-2,-1.5,-0.5,0,0.5,1,1.5,2,3",
        "-c",
        "0.5,2",
    ]);
    assert!(out.status.success());
    let (h, rows) = csv_rows(&out.stdout);
    // E = 1 is a separatrix value and is dropped
    assert_eq!(rows.len(), 18);
    let mut seen = 0;
    for row in &rows {
        let region = field(&h, row, "region");
        if region.is_empty() {
            assert!(!field(&h, row, "error").is_empty());
            continue;
        }
        seen += 1;
        let (rho, kind) = (field(&h, row, "rho"), field(&h, row, "whitham_kind"));
        if region.ends_with("librational") {
            assert_eq!((rho, kind), ("-1", "elliptic"));
        } else {
            assert_eq!((rho, kind), ("1", "hyperbolic"));
        }
    }
    assert_eq!(seen, 12);
    let energies: Vec<f64> = rows
        .iter()
        .map(|r| field(&h, r, "E").parse().unwrap())
        .collect();
    assert!(energies.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn scan_empty_grid_is_header_only() {
    let out = kgwave(&["scan"]);
    assert!(out.status.success());
    let (h, rows) = csv_rows(&out.stdout);
    assert!(rows.is_empty());
    assert_eq!(&h[0], "E");
}

#[test]
fn trace_subluminal_rotational_stays_on_axis() {
    let out = kgwave(&["trace", "-E", "-2", "-c", "0.5", "--steps", "64"]);
    assert!(out.status.success());
    let (h, rows) = csv_rows(&out.stdout);
    assert_eq!(
        h.iter().collect::<Vec<_>>(),
        ["theta", "re_lambda", "im_lambda", "branch", "abs_evans"]
    );
    assert_eq!(rows.len(), 2 * 65);
    let max_re = rows
        .iter()
        .map(|r| field(&h, r, "re_lambda").parse::<f64>().unwrap().abs())
        .fold(0.0, f64::max);
    assert!(max_re <= 1e-6);
}

#[test]
fn hill_rotational_top_eigenvalue() {
    let r = json_stdout(&["hill", "-E", "2", "-c", SQRT2]);
    for key in ["bands", "periodic", "antiperiodic", "gaps"] {
        assert!(r[key].is_array(), "{key}");
    }
    assert!(r["periodic"][0].as_f64().unwrap().abs() <= 1e-6);
}

#[test]
fn nls_sine_gordon_focusing() {
    let r = json_stdout(&["nls", "--u0", "0", "--k", "1"]);
    assert_eq!(r["kind_label"], "focusing");
    assert!((r["omega"].as_f64().unwrap() - 2f64.sqrt()).abs() <= 1e-15);
}

#[test]
fn whitham_labels() {
    assert_eq!(
        json_stdout(&["whitham", "-E", "0", "-c", SQRT2])["kind_label"],
        "elliptic"
    );
    assert_eq!(
        json_stdout(&["whitham", "-E", "2", "-c", SQRT2])["kind_label"],
        "hyperbolic"
    );
}

#[test]
fn profile_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.csv");
    let out = kgwave(&[
        "profile",
        "-E",
        "0",
        "-c",
        "1.5",
        "--samples",
        "32",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read(&path).unwrap();
    let (h, rows) = csv_rows(&text);
    assert_eq!(rows.len(), 33);
    for row in &rows {
        assert!(
            field(&h, row, "energy_residual")
                .parse::<f64>()
                .unwrap()
                .abs()
                <= 1e-9
        );
    }
}
