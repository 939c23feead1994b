use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn eitsim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eitsim"))
        .args(args)
        .current_dir(dir)
        .env("RUST_LOG", "off")
        .output()
        .expect("run eitsim")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    std::fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Cheap SLP run layered on the shipped preset.
const FAST_SLP: &str = r#"
preset = "fig3c_slp"

[grid]
nz = 48
dt = 0.02
t_end = 50.0
"#;

#[test]
fn spectrum_on_fig2b_has_161_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = eitsim(&["spectrum", "--preset", "fig2b", "--out", "o"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("o/spectrum.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "delta_p_over_gamma,transmission");
    assert_eq!(lines.len(), 162);
    assert!(lines[1].starts_with("-8,") && lines[161].starts_with("8,"));
    assert!(!text.contains('\r'));
    let resolved = std::fs::read_to_string(dir.path().join("o/resolved_config.toml")).unwrap();
    assert!(resolved.contains("format_version = 1"));
    assert!(resolved.contains("\"spectrum.points\" = \"preset\""));
}

#[test]
fn storage_result_has_efficiency() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.toml", "preset = \"fig3b\"\n[grid]\nnz = 64\ndt = 0.02\n");
    let o = eitsim(&["storage", "--config", &cfg, "--out", "o"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let r = read_json(&dir.path().join("o/result.json"));
    assert_eq!(r["format_version"], 1);
    assert_eq!(r["command"], "storage");
    let eta = r["result"]["efficiency"].as_f64().unwrap();
    assert!(eta > 0.0 && eta < 1.0);
    assert_eq!(r["config"]["medium"]["od"], 145.0);
    assert!(dir.path().join("o/trace.csv").exists());
}

#[test]
fn config_errors_exit_with_2_and_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "[medium]\nod = -1.0\n[spectrum]\n");
    let o = eitsim(&["spectrum", "--config", &cfg, "--out", "o"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("medium.od"), "{}", stderr(&o));

    let cfg = write(dir.path(), "typo.toml", "[mediun]\nod = 1.0\n");
    let o = eitsim(&["spectrum", "--config", &cfg, "--out", "o"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("mediun"), "{}", stderr(&o));

    let o = eitsim(&["slp", "--preset", "fig9", "--out", "o"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "unstable.toml",
        "preset = \"fig3a\"\n[grid]\nnz = 48\ndt = 1.5\nt_end = 60.0\n",
    );
    let o = eitsim(&["slowlight", "--config", &cfg, "--out", "o"], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("instability"));
}

#[test]
fn sweep_writes_one_run_per_tuple_and_an_index() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "{FAST_SLP}\n[sweep]\ncommand = \"slp\"\naxes = [{{ param = \"slp.omega_c_minus\", values = [2.6, 3.2, 3.8, 4.4, 5.0] }}]\n"
    );
    let cfg = write(dir.path(), "sweep.toml", &text);
    let o = eitsim(&["sweep", "--config", &cfg, "--out", "o", "--threads", "2"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let index = read_json(&dir.path().join("o/index.json"));
    let runs = index["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 5);
    let mut seen = std::collections::HashSet::new();
    for (i, run) in runs.iter().enumerate() {
        let name = run["run"].as_str().unwrap();
        assert!(seen.insert(name.to_string()));
        let r = read_json(&dir.path().join("o").join(name).join("result.json"));
        assert_eq!(r["config"]["slp"]["omega_c_minus"], run["params"]["slp.omega_c_minus"]);
        assert_eq!(run["params"]["slp.omega_c_minus"], [2.6, 3.2, 3.8, 4.4, 5.0][i]);
    }
}

#[test]
fn identical_configs_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "slp.toml", FAST_SLP);
    for out in ["a", "b"] {
        let o = eitsim(
            &["slp", "--config", &cfg, "--out", out, "--snapshot-stride", "500"],
            dir.path(),
        );
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let names = [
        "result.json",
        "trace.csv",
        "resolved_config.toml",
        "snapshots/snapshot_00000.csv",
    ];
    for name in names {
        let a = std::fs::read(dir.path().join("a").join(name)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(name)).unwrap();
        assert!(a == b, "{name} differs");
    }
    let snap = std::fs::read_to_string(dir.path().join("a/snapshots/snapshot_00001.csv")).unwrap();
    assert_eq!(snap.lines().count(), 49);
}

#[test]
fn thread_count_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_eitsim"))
        .args(["spectrum", "--preset", "fig2b", "--out", "o"])
        .current_dir(dir.path())
        .env("EITSIM_THREADS", "0")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let o = Command::new(env!("CARGO_BIN_EXE_eitsim"))
        .args(["spectrum", "--preset", "fig2b", "--out", "o"])
        .current_dir(dir.path())
        .env("EITSIM_THREADS", "two")
        .output()
        .unwrap();
    assert!(!o.status.success());
}

#[test]
fn presets_are_listed() {
    let dir = tempfile::tempdir().unwrap();
    let o = eitsim(&["presets"], dir.path());
    let list = String::from_utf8(o.stdout).unwrap();
    assert!(list.lines().any(|l| l == "fig3c_slp"));
    let o = eitsim(&["presets", "fig3c_slp"], dir.path());
    assert!(String::from_utf8(o.stdout).unwrap().contains("delta_c_minus = -2.5"));
}
