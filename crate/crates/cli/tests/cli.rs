use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dstbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dstbench"))
        .args(args)
        .env_remove("DSTBENCH_THREADS")
        .output()
        .expect("spawn dstbench")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const MINIMAL: &str = r#"{"d": 2, "state": {"kind": "spin-coherent", "alpha_re": 2}, "method": "pure-dst",
  "pointer": "qubit", "phi": 0.1, "n_list": [1000, 10000], "repetitions": 3}"#;

#[test]
fn minimal_config_writes_rows_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "minimal.json", MINIMAL);
    let out = dir.path().join("out");
    let o = dstbench(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let mut names: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["minimal.csv", "minimal_summary.csv"]);
    let rows = fs::read_to_string(out.join("minimal.csv")).unwrap();
    assert_eq!(rows.lines().count(), 1 + 6);
    assert_eq!(
        fs::read_to_string(out.join("minimal_summary.csv"))
            .unwrap()
            .lines()
            .count(),
        1 + 2
    );
}

#[test]
fn shipped_minimal_config_parses() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/minimal.json");
    let configs = dstbench_core::harness::load_configs(&path).unwrap();
    assert!(!configs.is_empty());
    for c in &configs {
        c.validate().unwrap();
    }
}

#[test]
fn malformed_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", "{\"d\": 2, ");
    let o = dstbench(&["run", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let cfg = write(dir.path(), "bad_d.json", &MINIMAL.replace("\"d\": 2", "\"d\": 1"));
    assert_eq!(dstbench(&["run", "--config", &cfg]).status.code(), Some(2));
}

#[test]
fn orthogonal_state_exits_3_and_keeps_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "orth.json",
        r#"{"d": 2, "state": {"kind": "complementary", "index": 1}, "method": "pure-dst",
            "pointer": "qubit", "phi": 0.1, "n_list": [100], "repetitions": 1, "exact": true}"#,
    );
    let out = dir.path().join("o");
    let o = dstbench(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("row failed"));
    let csv = fs::read_to_string(out.join("orth.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().contains("degenerate_normalization"));
}

#[test]
fn existing_output_needs_force() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "m.json", MINIMAL);
    let out = dir.path().join("out");
    let base = ["run", "--config", &cfg, "--out", out.to_str().unwrap()];
    assert_eq!(dstbench(&base).status.code(), Some(0));
    let first = fs::read(out.join("m.csv")).unwrap();
    assert_eq!(dstbench(&base).status.code(), Some(2));
    let mut forced = base.to_vec();
    forced.push("--force");
    assert_eq!(dstbench(&forced).status.code(), Some(0));
    assert_eq!(fs::read(out.join("m.csv")).unwrap(), first);
}

#[test]
fn resume_reproduces_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "m.json", MINIMAL);
    let out = dir.path().join("out");
    let base = [
        "run",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--threads",
        "2",
    ];
    assert_eq!(dstbench(&base).status.code(), Some(0));
    let full = fs::read_to_string(out.join("m.csv")).unwrap();

    // an interrupted run leaves a partial file with some rows already done
    fs::remove_file(out.join("m.csv")).unwrap();
    let partial: Vec<&str> = full.lines().take(4).collect();
    fs::write(out.join("m.csv.partial"), partial.join("\n") + "\n").unwrap();
    let mut resumed = base.to_vec();
    resumed.push("--resume");
    assert_eq!(dstbench(&resumed).status.code(), Some(0));
    assert_eq!(fs::read_to_string(out.join("m.csv")).unwrap(), full);
    assert!(!out.join("m.csv.partial").exists());
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "m.json", MINIMAL);
    let mut outputs = Vec::new();
    for t in ["1", "3"] {
        let out = dir.path().join(format!("t{t}"));
        let o = dstbench(&["run", "--config", &cfg, "--out", out.to_str().unwrap(), "--threads", t]);
        assert_eq!(o.status.code(), Some(0));
        outputs.push(fs::read(out.join("m.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn figure_preset_writes_plot_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig");
    let o = dstbench(&["figure", "fig3b", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["fig3b.csv", "fig3b_summary.csv", "fig3b.svg"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let svg = fs::read_to_string(out.join("fig3b.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert_eq!(
        dstbench(&["figure", "fig9", "--out", out.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn help_lists_subcommands() {
    let o = dstbench(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for cmd in ["run", "figure", "bias", "extrapolate", "state"] {
        assert!(text.contains(cmd), "{cmd}");
    }
    assert_eq!(dstbench(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn bias_tables() {
    let o = dstbench(&["bias", "--alpha", "2", "--phi", "0,0.05,0.1", "--pointer", "both"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.matches("# pointer:").count(), 2);
    assert_eq!(
        text.lines().filter(|l| l.contains("invalid (invalid_coupling")).count(),
        2
    );
    let pinned = dstbench(&["bias", "--alpha", "2", "--phi", "0.1"]);
    let line = stdout(&pinned).lines().nth(2).unwrap().to_string();
    let v: f64 = line.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((v - 6.681138193054179e-4).abs() < 1e-12, "{line}");
}

#[test]
fn extrapolate_checks_points_and_writes_state() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = dstbench(&["extrapolate", "--alpha", "2", "--phis", "0.05,0.1", "--out", out]);
    assert_eq!(o.status.code(), Some(2));
    let o = dstbench(&[
        "extrapolate",
        "--alpha",
        "2",
        "--phis",
        "0.05,0.1,0.15",
        "--degree",
        "1",
        "--out",
        out,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("extrapolated_qubit.json")).unwrap()).unwrap();
    assert_eq!(json["d"], 2);
    assert_eq!(json["re"].as_array().unwrap().len(), 2);
}

#[test]
fn state_prints_json() {
    let o = dstbench(&["state", "--d", "3", "--alpha", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["d"], 3);
    let re: Vec<f64> = json["re"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    // amplitudes ∝ sqrt(C(2,m)) 2^m = 1, 2√2, 4
    let norm = (1.0f64 + 8.0 + 16.0).sqrt();
    for (got, want) in re.iter().zip([1.0, 8f64.sqrt(), 4.0]) {
        assert!((got - want / norm).abs() < 1e-12);
    }
}
