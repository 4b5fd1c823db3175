use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;
use std::process::{Command, Output};

fn submaslov(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_submaslov"))
        .args(args)
        .current_dir(cwd)
        .env_remove("SUBMASLOV_TOL_SYMPL")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t_focal,kernel_dim,contribution_num,contribution_den,level,flags"));
    lines.map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn flat_scenario_passes_with_empty_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "flat.toml", "scenario = \"flat-product\"\n[output]\ndir = \"out\"\n");
    let out = submaslov(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/flat-product.csv")).unwrap();
    assert!(csv_rows(&csv).is_empty());
    let summary = std::fs::read_to_string(dir.path().join("out/flat-product.summary.txt")).unwrap();
    assert!(summary.contains("mu_Q(gamma)     0") && summary.contains("mu_P(x)         0"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/flat-product.json")).unwrap()).unwrap();
    assert_eq!(json["pass"], serde_json::Value::Bool(true));
}

#[test]
fn hopf_rows_sit_at_base_conjugate_instants() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "hopf.toml", "scenario = \"hopf\"\n[output]\ndir = \"out\"\n");
    let out = submaslov(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/hopf.csv")).unwrap();
    let base: Vec<f64> = csv_rows(&csv)
        .iter()
        .filter(|r| r[4] == "base")
        .map(|r| r[0].parse().unwrap())
        .collect();
    // geodesics of S^2(1/2) at unit speed 1/2 · 2: conjugate where sin(2t) = 0
    let oracle = [FRAC_PI_2, PI];
    assert_eq!(base.len(), oracle.len());
    for (t, o) in base.iter().zip(oracle) {
        assert!((t - o).abs() < 1e-6, "{t} vs {o}");
    }
    for r in csv_rows(&csv) {
        assert_eq!((r[2].as_str(), r[3].as_str(), r[5].as_str()), ("1", "1", ""));
    }
}

#[test]
fn csv_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "scenario = \"flat-circle\"\n[seed]\npoint = [1.0, 0.0, 0.5]\nbase_velocity = [-1.0, 0.0]\ninterval = [0.0, 1.8]\nsteps = 600\n",
    );
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let out = submaslov(&["run", &cfg, "--out", d.to_str().unwrap()], dir.path());
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let ca = std::fs::read(a.join("flat-circle.csv")).unwrap();
    let cb = std::fs::read(b.join("flat-circle.csv")).unwrap();
    assert_eq!(ca, cb);
    let text = String::from_utf8(ca).unwrap();
    assert!(!text.contains('\r'));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 2);
    // 12 significant digits: d.ddddddddddd
    let mantissa = rows[0][0].split('e').next().unwrap();
    assert_eq!(mantissa.trim_start_matches('-').len(), 13);
}

#[test]
fn corrupted_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "scenario = \"hopf\"\n[seed\npoint = [0.0]\n");
    let out = submaslov(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
    let out = submaslov(&["check", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = submaslov(&["run", "does-not-exist.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = submaslov(&["frobnicate"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn negative_beta_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "neg.toml",
        "[model]\nkind = \"stationary\"\n[model.base]\nshape = \"plane\"\nd = [0.0, 0.0]\nbeta = -2.0\n[seed]\npoint = [0.0, 0.0, 0.0]\nbase_velocity = [1.0, 0.0]\ninterval = [0.0, 1.0]\n",
    );
    let out = submaslov(&["check", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("`model.base`") && err.contains("invalid stationary data"), "{err}");
}

#[test]
fn failed_check_exits_one_with_reproduction_config() {
    let dir = tempfile::tempdir().unwrap();
    // the base metric is not the one the projection induces
    let cfg = write(
        dir.path(),
        "wrong.toml",
        r#"name = "wrong-base"
[model]
kind = "custom"
total_metric = [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]
base_metric = [["1", "0"], ["0", "2"]]
projection = ["x0", "x1"]
[seed]
point = [0.0, 0.0, 0.0]
base_velocity = [1.0, 0.5]
interval = [0.0, 2.0]
steps = 200
[output]
dir = "out"
"#,
    );
    let out = submaslov(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("horizontal_isometry"), "{err}");
    assert!(err.contains("wrong-base.repro.toml"));
    let repro = dir.path().join("out/wrong-base.repro.toml");
    let text = std::fs::read_to_string(&repro).unwrap();
    assert!(text.contains("kind = \"custom\""));
    assert!(dir.path().join("out/wrong-base.csv").exists());
    // the reproduction config is itself a valid run configuration
    let out = submaslov(&["check", repro.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn environment_overrides_config_tolerances() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "scenario = \"hopf\"\n[seed]\npoint = [0.7853981633974483, 0.0, 0.0]\nbase_velocity = [0.0, 2.0]\ninterval = [0.0, 1.0]\nsteps = 200\n[tolerances]\nsympl = 0.0\n",
    );
    // zero drift allowance aborts the flow: a numerical failure
    let out = submaslov(&["run", &cfg, "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let out = Command::new(env!("CARGO_BIN_EXE_submaslov"))
        .args(["run", &cfg, "--out", "o"])
        .current_dir(dir.path())
        .env("SUBMASLOV_TOL_SYMPL", "1e-8")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn list_and_fuzz_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let out = submaslov(&["list-scenarios"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = text.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort_unstable();
    assert_eq!(names, sorted);
    assert!(names.contains(&"hopf") && names.contains(&"kk-toy"));

    let out = submaslov(&["fuzz", "2", "--seed", "5", "--steps", "400"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("fuzz-000") && text.contains("fuzz-001"));
    assert!(text.contains("2 of 2 cases"));
    let out = submaslov(&["fuzz", "2"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn example_configs_validate() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in std::fs::read_dir(&root).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "toml") {
            let out = submaslov(&["check", p.to_str().unwrap()], &root);
            assert_eq!(out.status.code(), Some(0), "{}: {}", p.display(), String::from_utf8_lossy(&out.stderr));
            n += 1;
        }
    }
    assert!(n >= 4);
}
