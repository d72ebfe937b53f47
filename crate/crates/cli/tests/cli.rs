use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const INTERVAL: &str = r#"{"type":"hpolytope","A":[[1],[-1]],"b":[1,0]}"#;
const DISK: &str = r#"{"type":"ball","center":[0,0],"radius":1}"#;
const HALFLINE: &str = r#"{"type":"hpolytope","A":[[-1]],"b":[0]}"#;
const SQUARE: &str = r#"{"type":"vpolytope","vertices":[[1,1],[1,-1],[-1,1],[-1,-1]]}"#;

struct Fixtures {
    dir: TempDir,
}

impl Fixtures {
    fn new() -> Self {
        Fixtures {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn file(&self, name: &str, contents: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        fs::write(&path, contents).unwrap();
        path
    }
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvxmetric"))
        .args(args)
        .env_remove("CVXMETRIC_SEED")
        .output()
        .unwrap()
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn tau_on_the_interval() {
    let fx = Fixtures::new();
    let body = fx.file("interval.json", INTERVAL);
    let doc = json_of(&run(&["tau", "--body", p(&body), "--x", "0.25", "--y", "0.5"]));
    assert_eq!(doc["tau"], 3.0);
}

#[test]
fn tau_at_equal_points_is_inf() {
    let fx = Fixtures::new();
    let body = fx.file("interval.json", INTERVAL);
    let doc = json_of(&run(&["tau", "--body", p(&body), "--x", "0.4", "--y", "0.4"]));
    assert_eq!(doc["tau"], "inf");
    let out = run(&["tau", "--body", p(&body), "--x", "0.4", "--y", "0.4", "--format", "csv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "tau\ninf\n");
}

#[test]
fn hilbert_on_the_disk() {
    let fx = Fixtures::new();
    let body = fx.file("disk.json", DISK);
    let doc = json_of(&run(&["hilbert", "--body", p(&body), "--x", "0,0", "--y", "0.5,0"]));
    let h = doc["hilbert"].as_f64().unwrap();
    assert!((h - 0.5 * 3f64.ln()).abs() <= 1e-12);
}

#[test]
fn funk_along_a_recession_direction_is_zero() {
    let fx = Fixtures::new();
    let body = fx.file("halfline.json", HALFLINE);
    let doc = json_of(&run(&["funk", "--body", p(&body), "--x", "1", "--y", "2"]));
    assert_eq!(doc["funk"], 0.0);
    let doc = json_of(&run(&["thompson", "--body", p(&body), "--x", "1", "--y", "2"]));
    assert!((doc["thompson"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-15);
}

#[test]
fn csv_numbers_carry_seventeen_digits() {
    let fx = Fixtures::new();
    let body = fx.file("interval.json", INTERVAL);
    let out = run(&["funk", "--body", p(&body), "--x", "0.25", "--y", "0.5", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let mantissa = row[0].split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17);
    assert_eq!(row[0].parse::<f64>().unwrap(), 1.5f64.ln());
}

#[test]
fn matrix_from_point_file() {
    let fx = Fixtures::new();
    let body = fx.file("disk.json", DISK);
    let pts = fx.file("pts.csv", "0,0\n0.5,0\n0,-0.25\n");
    let doc = json_of(&run(&["matrix", "--body", p(&body), "--points", p(&pts), "--metric", "hilbert"]));
    let m = doc["matrix"].as_array().unwrap();
    assert_eq!(m.len(), 3);
    for (i, row) in m.iter().enumerate() {
        assert_eq!(row[i], 0.0);
        for (j, v) in row.as_array().unwrap().iter().enumerate() {
            assert_eq!(v, &m[j][i]);
        }
    }
    assert!((m[0][1].as_f64().unwrap() - 0.5 * 3f64.ln()).abs() < 1e-12);

    let out = run(&["matrix", "--body", p(&body), "--points", p(&pts), "--metric", "funk", "--format", "csv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 3);
}

#[test]
fn matrix_names_the_offending_row() {
    let fx = Fixtures::new();
    let body = fx.file("disk.json", DISK);
    let pts = fx.file("pts.csv", "0,0\n1,0\n");
    let out = run(&["matrix", "--body", p(&body), "--points", p(&pts)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 2"));
}

#[test]
fn bounds_report() {
    let fx = Fixtures::new();
    let body = fx.file("interval.json", INTERVAL);
    let doc = json_of(&run(&[
        "bounds", "--body", p(&body), "--x", "0.25", "--y", "0.5", "--m", "0", "--M", "1",
    ]));
    assert!((doc["upper"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-15);
    assert!((doc["lower"].as_f64().unwrap() + 0.5).abs() < 1e-15);
    assert!((doc["funk_form"]["upper"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
    assert_eq!(doc["M"], 1.0);
}

#[test]
fn extremal_grid_on_the_interval() {
    let fx = Fixtures::new();
    let body = fx.file("interval.json", INTERVAL);
    let args = ["extremal", "--body", p(&body), "--x", "0.25", "--y", "0.5", "--m", "0", "--M", "1"];
    let out = run(&[&args[..], &["--grid", "5"]].concat());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let (z, f) = l.split_once(',').unwrap();
            (z.parse().unwrap(), f.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 5);
    for w in rows.windows(2) {
        assert!(w[0].0 < w[1].0 && w[0].1 <= w[1].1);
    }
    assert!(rows.iter().all(|&(_, f)| (0.0..=1.0).contains(&f)));

    let out = run(&[&args[..], &["--grid", "1"]].concat());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("5.0000000000000000e-1,"));
}

#[test]
fn extremal_grid_rejects_three_dimensions() {
    let fx = Fixtures::new();
    let body = fx.file("ball3.json", r#"{"type":"ball","center":[0,0,0],"radius":1}"#);
    let out = run(&[
        "extremal", "--body", p(&body), "--x", "0,0,0", "--y", "0.5,0,0", "--m", "0", "--M", "1", "--grid", "4",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gridding limited to dim ≤ 2"));
}

#[test]
fn extremal_summary_attains_both_bounds() {
    let fx = Fixtures::new();
    let body = fx.file("square.json", SQUARE);
    let doc = json_of(&run(&[
        "extremal", "--body", p(&body), "--x", "0.1,0.2", "--y", "-0.3,0.4", "--m", "-1", "--M", "2",
    ]));
    assert_eq!(doc["attainment"]["upper_attained"], true);
    assert_eq!(doc["attainment"]["lower_attained"], true);
}

#[test]
fn gauge_and_subdiff() {
    let fx = Fixtures::new();
    let disk = fx.file("disk.json", DISK);
    let doc = json_of(&run(&["gauge", "--body", p(&disk), "--x", "0,0", "--y", "0.5,0"]));
    assert_eq!(doc["gauge"], 0.5);

    let square = fx.file("square.json", SQUARE);
    let sub = |zeta: &str| {
        json_of(&run(&[
            "subdiff", "--body", p(&square), "--x", "0,0", "--zeta", zeta, "--m", "0", "--M", "1",
        ]))
    };
    assert_eq!(sub("0.5,0.5")["member"], true);
    assert_eq!(sub("0.5,0.5")["support_value"], 1.0);
    assert_eq!(sub("0.6,0.5")["member"], false);
}

#[test]
fn certify_generated_fixture_passes() {
    let fx = Fixtures::new();
    let body = cvxmetric::random_body(2, cvxmetric::BodyKind::VPolytope, 4).unwrap();
    let f = cvxmetric::random_convex_fn(&body, 0.0, 1.0, 4, 5).unwrap();
    let doc = cvxmetric::oracles::fixture_json(&body, &f);
    let path = fx.file("fixture.json", &doc.to_string());
    let out = run(&["certify", "--body", p(&path), "--pairs", "100", "--seed", "3"]);
    let doc = json_of(&out);
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["pairs"], 100);
}

#[test]
fn certify_sin_fixture_exits_two() {
    let fx = Fixtures::new();
    let path = fx.file(
        "sin.json",
        r#"{"type":"hpolytope","A":[[1],[-1]],"b":[1,0],"fn":{"builtin":"sin","frequency":6,"m":0,"M":1}}"#,
    );
    let out = run(&["certify", "--body", p(&path), "--pairs", "500"]);
    assert_eq!(out.status.code(), Some(2));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["passed"], false);
    assert!(doc["failures"].as_u64().unwrap() >= 1);
}

#[test]
fn certify_hand_written_pieces() {
    let fx = Fixtures::new();
    // f = max(0, 0.5 − (1 − z)) on [0, 1]
    let path = fx.file(
        "pieces.json",
        r#"{"type":"hpolytope","A":[[1],[-1]],"b":[1,0],"fn":{"pieces":[[[1.0],0.0]],"m":0,"M":0.5,"scale":1.0}}"#,
    );
    let doc = json_of(&run(&["certify", "--body", p(&path), "--x", "0.6", "--y", "0.9"]));
    assert_eq!(doc["passed"], true);
    let tight = &doc["tightest"];
    assert!((tight["observed"].as_f64().unwrap() - 0.3).abs() < 1e-15);
    let doc = json_of(&run(&["certify", "--body", p(&path), "--pairs", "50"]));
    assert_eq!(doc["failures"], 0);
}

#[test]
fn seed_comes_from_the_environment() {
    let fx = Fixtures::new();
    let path = fx.file(
        "sin.json",
        r#"{"type":"hpolytope","A":[[1],[-1]],"b":[1,0],"fn":{"builtin":"sin","frequency":6,"m":0,"M":1}}"#,
    );
    let base = ["certify", "--body", p(&path), "--pairs", "20", "--format", "csv"];
    let with_env = Command::new(env!("CARGO_BIN_EXE_cvxmetric"))
        .args(base)
        .env("CVXMETRIC_SEED", "7")
        .output()
        .unwrap();
    let with_flag = run(&[&base[..], &["--seed", "7"]].concat());
    let default = run(&base);
    assert_eq!(with_env.stdout, with_flag.stdout);
    assert_ne!(with_env.stdout, default.stdout);
}

#[test]
fn malformed_json_reports_line_and_column() {
    let fx = Fixtures::new();
    let body = fx.file("bad.json", "{\"type\": \"ball\",\n \"center\": [0, 0], \"radius\": }");
    let out = run(&["tau", "--body", p(&body), "--x", "0,0", "--y", "0.5,0"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2 column"), "{err}");
}

#[test]
fn boundary_points_are_named() {
    let fx = Fixtures::new();
    let disk = fx.file("disk.json", DISK);
    let out = run(&["hilbert", "--body", p(&disk), "--x", "0,0", "--y", "1,0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--y"));

    // interior with margin, but the exit lies within 1e-12 relative of y
    let half = fx.file("half.json", r#"{"type":"hpolytope","A":[[1]],"b":[1]}"#);
    let out = run(&["tau", "--body", p(&half), "--x", "-1e6", "--y", "0.99999999"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--y") && err.contains("boundary"), "{err}");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["tau"]).status.code(), Some(1));
    assert_eq!(run(&["nonsense"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let fx = Fixtures::new();
    let body = fx.file("disk.json", DISK);
    let out = run(&["tau", "--body", p(&body), "--x", "0,0,0", "--y", "0.5,0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--x"));
}

#[test]
fn output_file_is_written() {
    let fx = Fixtures::new();
    let body = fx.file("interval.json", INTERVAL);
    let out_path = fx.dir.path().join("out.json");
    let out = run(&["tau", "--body", p(&body), "--x", "0.25", "--y", "0.5", "--out", p(&out_path)]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&fs::read_to_string(out_path).unwrap()).unwrap();
    assert_eq!(doc["tau"], 3.0);
}
