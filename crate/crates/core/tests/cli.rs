use std::path::Path;
use std::process::{Command, Output};

fn bicoeff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bicoeff"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn bounds_csv_grid() {
    let o = bicoeff(&["bounds", "--class", "real-part", "--beta", "0:0.5:0.5", "--lambda", "1,", "--k", "3"]);
    // "1," is not a number
    assert_eq!(code(&o), 1);

    let o = bicoeff(&["bounds", "--class", "real-part", "--beta", "0:0.5:0.5", "--lambda", "1:2:1", "--k", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("class,k,mean_order,rule,"));
    assert_eq!(lines.len(), 1 + 2 * 2 * 2);
    assert!(lines[1].contains(",real-part-a2,"));
}

#[test]
fn empty_range_prints_header_only() {
    let o = bicoeff(&["bounds", "--class", "strong", "--alpha", "1:0:0.1", "--lambda", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 1);
    let o = bicoeff(&["search", "--class", "strong", "--alpha", "1:0:0.1", "--lambda", "1", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 0);
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["bounds", "--class", "nope"],
        vec!["bounds", "--no-such-flag"],
        vec!["bounds", "--class", "strong", "--alpha", "2", "--lambda", "1"],
        vec!["bounds", "--class", "real-part", "--lambda", "1"],
        vec!["search", "--class", "real-part", "--beta", "0", "--lambda", "1", "--k", "2"],
        vec!["search", "--class", "real-part", "--beta", "0", "--lambda", "1", "--grid-density", "1"],
        vec!["invert", "--coeffs", "1,abc"],
        vec![],
    ] {
        let o = bicoeff(&args);
        assert_eq!(code(&o), 1, "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&bicoeff(&["--help"])), 0);
    assert_eq!(code(&bicoeff(&["--version"])), 0);
    assert_eq!(code(&bicoeff(&["search", "--help"])), 0);
}

#[test]
fn strict_mode_flags_exceedance() {
    let args = ["search", "--class", "strong", "--alpha", "0.5", "--lambda", "1", "--grid-density", "8", "--restarts", "2"];
    let lenient = bicoeff(&args);
    assert_eq!(code(&lenient), 0);
    assert!(stdout(&lenient).contains("oracle_exceeds"));
    let mut strict = args.to_vec();
    strict.push("--strict");
    let o = bicoeff(&strict);
    assert_eq!(code(&o), 2);
    assert_eq!(o.stdout, lenient.stdout);
}

#[test]
fn unwritable_output_exits_three() {
    let o = bicoeff(&["invert", "--coeffs", "2,3", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(code(&o), 3);
    let o = bicoeff(&["bounds", "--config", "/nonexistent-dir/cfg.json"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn invert_koebe() {
    let o = bicoeff(&["invert", "--coeffs", "2,3,4,5,6,7,8", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["tool_version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["command"], "invert");
    let got: Vec<f64> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["coefficient"][0].as_f64().unwrap())
        .collect();
    assert_eq!(got, [0.0, 1.0, -2.0, 5.0, -14.0, 42.0, -132.0, 429.0, -1430.0]);
}

#[test]
fn cesaro_from_input_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("coeffs.json");
    std::fs::write(&input, "[2, [3, 1]]").unwrap();
    let o = bicoeff(&["cesaro", "--input", input.to_str().unwrap(), "--k", "2", "--mean-order", "0"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "n,coefficient\n0,0+0i\n1,1+0i\n2,2+0i\n3,0+0i\n");
}

#[test]
fn config_file_with_flag_override_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"classes": ["real-part"], "beta": 0.5, "lambda": {"start": 1, "stop": 2, "step": 1}, "format": "json"}"#,
    )
    .unwrap();
    let out = dir.path().join("bounds.csv");
    let o = bicoeff(&[
        "bounds",
        "--config",
        cfg.to_str().unwrap(),
        "--beta",
        "0",
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 5);
    // beta comes from the flag, lambda from the file
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(8) == Some("0")));
    assert!(no_temp_files(dir.path()));
}

fn no_temp_files(dir: &Path) -> bool {
    std::fs::read_dir(dir)
        .unwrap()
        .all(|e| !e.unwrap().file_name().to_string_lossy().starts_with(".tmp"))
}

#[test]
fn bad_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"clases": ["psi"]}"#).unwrap();
    assert_eq!(code(&bicoeff(&["bounds", "--config", cfg.to_str().unwrap()])), 1);
}

#[test]
fn verify_reports_one_row() {
    let o = bicoeff(&[
        "verify", "--class", "psi", "--b1", "1", "--b2", "0.5", "--prefix1", "0.1+0.1i", "--prefix2", "-0.2i",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().contains(",true,"));

    let o = bicoeff(&["verify", "--class", "real-part", "--beta", "0", "--lambda", "1", "--prefix1", "3"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn search_json_is_reproducible() {
    let args = [
        "search", "--class", "psi,real-part", "--b1", "1", "--b2", "0.5", "--beta", "0.25", "--lambda", "1",
        "--grid-density", "8", "--restarts", "4", "--seed", "9", "--format", "json",
    ];
    let a = bicoeff(&args);
    let b = bicoeff(&args);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
}
