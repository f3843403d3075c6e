use std::process::{Command, Output};

fn sepfront(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sepfront"))
        .args(args)
        .env_remove("SEPFRONT_PARALLEL")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Parses CSV output into a header and rows of strings.
fn table(out: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(out);
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn column<'a>(header: &[String], row: &'a [String], name: &str) -> &'a str {
    let i = header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    &row[i]
}

#[test]
fn eval_thermal_product_state() {
    let (h, rows) = table(&sepfront(&[
        "eval", "--x", "0", "--y", "0", "--T", "1", "--alpha", "1", "--q", "2",
    ]));
    let s: f64 = column(&h, &rows[0], "s_conditional").parse().unwrap();
    assert!((s - 0.5).abs() < 1e-12);
    assert_eq!(column(&h, &rows[0], "s_conditional_sign"), "nonnegative");
}

#[test]
fn eval_singlet_is_negative() {
    let (h, rows) = table(&sepfront(&[
        "eval", "--x", "0", "--y", "1", "--T", "0", "--alpha", "1", "--q", "2",
    ]));
    let s: f64 = column(&h, &rows[0], "s_conditional").parse().unwrap();
    assert!((s + 1.0).abs() < 1e-12);
    assert_eq!(column(&h, &rows[0], "s_conditional_sign"), "negative");
}

#[test]
fn eval_at_infinity_reports_sign_only() {
    let (h, rows) = table(&sepfront(&[
        "eval", "--x", "0", "--y", "1", "--T", "0", "--alpha", "1", "--q", "inf",
    ]));
    assert_eq!(column(&h, &rows[0], "q"), "inf");
    assert_eq!(column(&h, &rows[0], "s_conditional"), "");
    assert_eq!(column(&h, &rows[0], "s_conditional_sign"), "negative");
}

#[test]
fn domain_errors_exit_with_code_two() {
    let out = sepfront(&[
        "eval", "--x", "0.5", "--y", "0.6", "--T", "0", "--alpha", "1", "--q", "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("x+y exceeds 1"));
    assert!(out.stdout.is_empty());

    let out = sepfront(&[
        "eval", "--x", "0", "--y", "0", "--T", "-1", "--alpha", "1", "--q", "2",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = sepfront(&["--parallel", "0", "t-critical", "--x", "0", "--alpha", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn truncation_failure_exits_with_code_three() {
    let out = sepfront(&[
        "dump-matrix",
        "--x",
        "0",
        "--y",
        "0.3",
        "--T",
        "0.5",
        "--alpha",
        "1",
        "--levels",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn zero_temperature_frontier_is_a_third_of_one_minus_x() {
    let (h, rows) = table(&sepfront(&[
        "frontier", "--T", "0", "--alpha", "1", "--x-grid", "0:0.9:10",
    ]));
    assert_eq!(rows.len(), 10);
    for row in &rows {
        let x: f64 = column(&h, row, "x").parse().unwrap();
        let y: f64 = column(&h, row, "y_frontier").parse().unwrap();
        assert!((y - (1.0 - x) / 3.0).abs() < 1e-6, "x={x}: {y}");
        assert_eq!(column(&h, row, "branch"), "linear");
    }
}

#[test]
fn temperature_line_loses_the_region_above_critical_temperature() {
    let (h, rows) = table(&sepfront(&[
        "frontier",
        "--x",
        "0",
        "--alpha",
        "1",
        "--T-grid",
        "0:1.6:17",
        "--no-vertices",
    ]));
    assert_eq!(rows.len(), 17);
    assert!(!h.contains(&"vertex_x".to_string()));
    for row in &rows {
        let t: f64 = column(&h, row, "t").parse().unwrap();
        let status = column(&h, row, "status");
        if t > std::f64::consts::LOG2_E {
            assert_eq!(status, "no_entangled_region", "T={t}");
        } else {
            assert_eq!(status, "boundary", "T={t}");
        }
    }
}

#[test]
fn single_node_grid() {
    let (h, rows) = table(&sepfront(&[
        "sweep",
        "--x-grid",
        "0.2:0.2:1",
        "--T-grid",
        "0.5:0.5:1",
        "--alpha",
        "1",
    ]));
    assert_eq!(rows.len(), 1);
    assert_eq!(column(&h, &rows[0], "status"), "boundary");
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let args = [
        "sweep", "--x-grid", "0:0.9:6", "--T-grid", "0:1.5:4", "--alpha", "1",
    ];
    let one = sepfront(&[&["--parallel", "1"][..], &args].concat());
    let two = sepfront(&[&["--parallel", "2"][..], &args].concat());
    let again = sepfront(&[&["--parallel", "2"][..], &args].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, two.stdout);
    assert_eq!(two.stdout, again.stdout);
}

#[test]
fn critical_temperature_at_x_zero() {
    let (h, rows) = table(&sepfront(&["t-critical", "--x", "0", "--alpha", "1"]));
    let tc: f64 = column(&h, &rows[0], "t_critical").parse().unwrap();
    assert!((tc - 1.0 / 2f64.ln()).abs() < 1e-5);
    let (h, rows) = table(&sepfront(&["t-critical", "--x", "1", "--alpha", "1"]));
    assert_eq!(column(&h, &rows[0], "status"), "never_entangled");
}

#[test]
fn scan_q_marks_the_minimum() {
    let (h, rows) = table(&sepfront(&[
        "scan-q", "--x", "0", "--y", "0.5", "--T", "0.3", "--alpha", "1",
    ]));
    assert_eq!(
        rows.iter()
            .filter(|r| column(&h, r, "is_q_min") == "true")
            .count(),
        1
    );
    assert_eq!(rows.iter().filter(|r| column(&h, r, "q") == "1").count(), 1);
    assert_eq!(column(&h, rows.last().unwrap(), "q"), "inf");
}

#[test]
fn json_output_is_an_array_of_objects() {
    let out = sepfront(&[
        "--format", "json", "frontier", "--x", "0", "--T", "0.5", "--alpha", "1",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let obj = &v.as_array().unwrap()[0];
    assert_eq!(obj["status"], "boundary");
    assert_eq!(obj["q_min"], "inf");
    assert!(obj["error"].is_null());
    assert!(obj["y_frontier"].as_f64().unwrap() > 1.0 / 3.0);
}

#[test]
fn output_flag_writes_a_file() {
    let dir = std::env::temp_dir().join(format!("sepfront-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("fig.csv");
    let out = sepfront(&["figure", "--id", "2", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("t,x,y,s_conditional\n"));
    assert!(text.lines().count() > 10);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn unknown_figure_is_rejected() {
    assert_eq!(sepfront(&["figure", "--id", "9"]).status.code(), Some(2));
}

#[test]
fn verify_small_suite_passes() {
    let (h, rows) = table(&sepfront(&["verify", "--samples", "1", "--seed", "7"]));
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| column(&h, r, "status") == "pass"));
}

#[test]
fn dump_matrix_writes_triplets() {
    let out = sepfront(&[
        "dump-matrix",
        "--x",
        "0",
        "--y",
        "0.3",
        "--T",
        "0.2",
        "--alpha",
        "1",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut trace = 0.0;
    for line in text.lines() {
        let f: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(f.len(), 3);
        if f[0] == f[1] {
            trace += f[2].parse::<f64>().unwrap();
        }
    }
    assert!(trace > 0.999 && trace <= 1.0 + 1e-12, "{trace}");
}

#[test]
fn scan_q_minimum_is_interior_at_large_x() {
    let (h, rows) = table(&sepfront(&["scan-q", "--x", "0.8", "--y", "0.19", "--T", "0.5", "--alpha", "1"]));
    let flagged: Vec<_> = rows.iter().filter(|r| column(&h, r, "is_q_min") == "true").collect();
    assert_eq!(flagged.len(), 1);
    let q: f64 = column(&h, flagged[0], "q").parse().unwrap();
    assert!(q > 1.0 && q < 2.0, "{q}");
}
