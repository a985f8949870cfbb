use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cdcqed"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_scenario(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("scenario.json");
    std::fs::write(&path, body).unwrap();
    path
}

const RESONANT_LOSSLESS: &str = r#""params": {
    "omega_e": 0.0, "omega_o": 0.0, "omega_a": 0.0,
    "kappa_e0": 0.0, "kappa_o0": 0.0, "kappa_e1": 0.0, "kappa_o1": 0.0,
    "g_e": [0.0, 0.0], "g_o": [0.0, 0.0], "gamma_s": 0.0, "gamma_p": 0.0 }"#;

#[test]
fn spectrum_reflection_peaks_at_resonance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = run(&[
        "spectrum",
        "--config",
        scenario("reflection_spectrum.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("spectrum:"));
    assert_eq!(stdout(&o).lines().count(), 1);

    let mut reader = csv::Reader::from_path(&out).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["delta", "T", "R", "L"]);
    let rows: Vec<[f64; 4]> = reader.deserialize().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 801);
    let best = rows.iter().max_by(|a, b| a[2].total_cmp(&b[2])).unwrap();
    assert_eq!(best[0], 0.0);
    assert!((best[2] - 0.87).abs() < 5e-3, "{}", best[2]);
}

#[test]
fn fidelity_sweep_case_one_reaches_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.csv");
    let o = run(&[
        "fidelity-sweep",
        "--case",
        "I",
        "--points",
        "41",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut reader = csv::Reader::from_path(&out).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["x", "F"]);
    let rows: Vec<[f64; 2]> = reader.deserialize().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 41);
    assert_eq!(rows[0][0], 3.0);
    assert_eq!(rows[40][0], 300.0);
    assert!(rows.iter().map(|r| r[1]).fold(0.0, f64::max) >= 0.98);
}

#[test]
fn ideal_truth_table_has_exact_signs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.json");
    let o = run(&["truth-table", "--ideal", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let amps: Vec<(f64, f64)> = doc["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            (
                r["amplitude"][0].as_f64().unwrap(),
                r["amplitude"][1].as_f64().unwrap(),
            )
        })
        .collect();
    assert_eq!(amps, vec![(1.0, 0.0), (-1.0, 0.0), (1.0, 0.0), (1.0, 0.0)]);
    assert_eq!(doc["max_deviation"], 0.0);
}

#[test]
fn gate_report_contains_matrix_and_fidelity() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.json");
    let o = run(&[
        "gate",
        "--config",
        scenario("gate_case1.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!((doc["fidelity"].as_f64().unwrap() - 0.9803).abs() < 5e-4);
    assert_eq!(doc["gate"]["matrix"].as_array().unwrap().len(), 4);
    assert_eq!(doc["gate"]["matrix"][2][2], serde_json::json!([1.0, 0.0]));
}

#[test]
fn pulse_scenario_writes_time_series() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    let o = run(&[
        "pulse",
        "--config",
        scenario("pulse_case1.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("t,re_in,im_in,re_out_t,im_out_t,re_out_r,im_out_r\n"));
    assert_eq!(text.lines().count(), 4097);
}

#[test]
fn case_list_prints_all_presets() {
    let o = run(&["case-list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for id in ["I ", "II ", "III ", "IV ", "V ", "VI ", "VII "] {
        assert!(text.lines().any(|l| l.starts_with(id)), "{id}");
    }
}

#[test]
fn selftest_passes_and_negative_control_fails() {
    let o = run(&["selftest", "--seed", "5"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("seed 5"));
    let o = run(&["selftest", "--corrupt-sign"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o)
        .lines()
        .any(|l| l.starts_with("FAIL reflection-nullity")));
}

#[test]
fn bad_configuration_exits_two_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        r#"{"params": {"omega_e": 0, "omega_o": 0, "omega_a": 0, "kappa_e0": 0.1, "kappa_o0": 0.1,
            "kappa_e1": -3, "kappa_o1": 1, "g_e": [1, 0], "g_o": [0, -1], "gamma_s": 0, "gamma_p": 1},
            "gate": {}}"#,
    );
    let o = run(&["gate", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("kappa_e1"), "{}", stderr(&o));

    let path = write_scenario(dir.path(), r#"{"case": "I", "gate": {"omega": 1}}"#);
    let o = run(&["gate", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("omega"), "{}", stderr(&o));

    let path = write_scenario(
        dir.path(),
        r#"{"case": "I", "pulse": {"spin": "up", "samples": 1000}}"#,
    );
    let o = run(&[
        "pulse",
        "--config",
        path.to_str().unwrap(),
        "--out",
        dir.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));

    let o = run(&["spectrum"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["fidelity-sweep", "--case", "VIII"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gate_off_branch_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        r#"{"params": {"omega_e": 0, "omega_o": 0, "omega_a": 0, "kappa_e0": 0.1, "kappa_o0": 0.1,
            "kappa_e1": 3, "kappa_o1": 3, "g_e": [1, 0], "g_o": [0, 0], "gamma_s": 0, "gamma_p": 1}}"#,
    );
    let o = run(&[
        "gate",
        "--config",
        path.to_str().unwrap(),
        "--out",
        dir.path().join("g.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("g_o"), "{}", stderr(&o));
}

#[test]
fn singular_system_exits_one_and_echoes_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        &format!(
            r#"{{ {RESONANT_LOSSLESS}, "spectrum": {{"spin": "down", "delta_min": -1, "delta_max": 1, "points": 3}} }}"#
        ),
    );
    let o = run(&[
        "spectrum",
        "--config",
        path.to_str().unwrap(),
        "--out",
        dir.path().join("s.csv").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("singular"), "{err}");
    assert!(err.contains("\"kappa_e1\":0.0"), "{err}");
}
