use std::io::Write as _;
use std::process::{Command, Output, Stdio};

fn cvsep(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_cvsep"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn analyze_reads_files_and_stdin_alike() {
    let doc = r#"{"standard_form":{"a":1,"b":1,"c1":0.5,"c2":-0.25}}"#;
    let path = std::env::temp_dir().join(format!("cvsep-analyze-{}.json", std::process::id()));
    std::fs::write(&path, doc).unwrap();
    let from_file = cvsep(&["analyze", path.to_str().unwrap()], "");
    let from_stdin = cvsep(&["analyze", "-"], doc);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(from_file.status.code(), Some(0));
    assert_eq!(from_file.stdout, from_stdin.stdout);
    let report = json(&from_file);
    assert!(report["duan_root"].as_f64().unwrap() >= 1.0);
    assert_eq!(report["input"]["standard_form"]["c2"], -0.25);
}

#[test]
fn unphysical_matrix_exits_with_two() {
    let doc = r#"{"matrix":[[0.4,0,0,0],[0,0.4,0,0],[0,0,1,0],[0,0,0,1]]}"#;
    let out = cvsep(&["analyze", "-"], doc);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["verdict"]["classification"], "Unphysical");
}

#[test]
fn malformed_documents_exit_with_three_and_say_where() {
    let out = cvsep(&["analyze", "-"], "{\n  \"matrix\": [[1, 2],\n");
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));

    let out = cvsep(&["analyze", "-"], r#"{"standard_form":{"a":1,"b":1,"c1":0.5}}"#);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("c2"));

    let asym = r#"{"matrix":[[1,0.5,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]}"#;
    assert_eq!(cvsep(&["analyze", "-"], asym).status.code(), Some(3));
    assert_eq!(cvsep(&["analyze", "/nonexistent/input.json"], "").status.code(), Some(3));
    assert_eq!(cvsep(&["squeeze", "0.4", "1", "0.5"], "").status.code(), Some(3));
    assert_eq!(cvsep(&["no-such-command"], "").status.code(), Some(3));
}

#[test]
fn text_report_carries_the_same_numbers() {
    let doc = r#"{"standard_form":{"a":1,"b":1,"c1":0.7,"c2":-0.35}}"#;
    let out = cvsep(&["analyze", "-", "--format", "text"], doc);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Entangled"), "{text}");
    let det = json(&cvsep(&["analyze", "-"], doc))["verdict"]["det_margin"].as_f64().unwrap();
    assert!(text.contains(&cvsep::cli::fmt_float(det)), "{text}");
}

#[test]
fn scan_csv_rows() {
    let out = cvsep(&["scan", "1", "1", "--steps", "3", "--csv"], "");
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,c1_max,c2_max,r1,r2,identity_residual"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 3);
    let c1: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    assert!((c1[0] - 0.75).abs() < 1e-15);
    assert!((c1[1] - 0.633_974_596_215_561_3).abs() < 1e-15);
    assert!((c1[2] - 0.5).abs() < 1e-15);
    assert_eq!((rows[2][3], rows[2][4]), (1.0, 1.0));
    assert!(rows.iter().all(|r| r[5] <= 1e-10));
    // 17 significant digits on every field
    assert!(text.lines().nth(2).unwrap().split(',').all(|f| f.split('e').next().unwrap().len() == 18));
}

#[test]
fn scan_format_flag_matches_csv_switch() {
    let a = cvsep(&["scan", "2", "0.7", "--steps", "5", "--csv"], "");
    let b = cvsep(&["--format", "csv", "scan", "2", "0.7", "--steps", "5"], "");
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(cvsep(&["scan", "1", "1", "--steps", "1"], "").status.code(), Some(3));
}

#[test]
fn squeeze_reports_the_analytic_pair() {
    let out = cvsep(&["squeeze", "1", "1", "0.5"], "");
    let doc = json(&out);
    assert!((doc["r1"].as_f64().unwrap() - 1.366_025_403_784_438_6).abs() < 1e-15);
    assert!((doc["c1sq_max"].as_f64().unwrap() - 0.401_923_788_646_684).abs() < 1e-12);
}

#[test]
fn verify_summary_is_reproducible() {
    let run = |seed: &str| cvsep(&["verify", "--grid", "8", "--samples", "300", "--seed", seed], "");
    let (a, b) = (run("5"), run("5"));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let doc = json(&a);
    assert_eq!(doc["passed"], true);
    assert!(doc["checks"].as_array().unwrap().len() >= 20);
}

#[test]
fn random_draws_follow_the_generator_document() {
    let spec = r#"{"seed":3,"a_range":[0.5,2],"b_range":[1,1],"t_range":[0,1],"fraction_boundary":1}"#;
    let path = std::env::temp_dir().join(format!("cvsep-random-{}.json", std::process::id()));
    std::fs::write(&path, spec).unwrap();
    let out = cvsep(&["random", "--spec", path.to_str().unwrap(), "--count", "5"], "");
    let again = cvsep(&["random", "--spec", path.to_str().unwrap(), "--count", "5"], "");
    std::fs::write(&path, r#"{"seed":3,"a_range":[0.2,2],"b_range":[1,1],"t_range":[0,1],"fraction_boundary":1}"#)
        .unwrap();
    let bad = cvsep(&["random", "--spec", path.to_str().unwrap()], "");
    std::fs::remove_file(&path).unwrap();

    assert_eq!(out.status.code(), Some(0));
    assert_eq!(out.stdout, again.stdout);
    let samples = json(&out);
    let samples = samples.as_array().unwrap();
    assert_eq!(samples.len(), 5);
    for s in samples {
        assert_eq!(s["kind"], "Boundary");
        assert_eq!(s["standard_form"]["b"], 1.0);
    }
    assert_eq!(bad.status.code(), Some(3));
}
