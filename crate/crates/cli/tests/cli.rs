//! End-to-end runs of the `soliton-forge` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn forge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_soliton-forge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn text(out: &Output) -> String {
    format!(
        "{}{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    )
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bowl_smoke_run_writes_profile_mesh_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = forge(&[
        "soliton",
        "bowl",
        "--K",
        "-1",
        "--n",
        "2",
        "--c",
        "1",
        "--r-max",
        "10",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", text(&out));
    for f in ["bowl.csv", "bowl.json", "bowl.obj", "bowl_diagnostics.json"] {
        assert!(dir.path().join(f).exists(), "missing {f}");
    }
    let obj = fs::read_to_string(dir.path().join("bowl.obj")).unwrap();
    assert!(obj.starts_with("# soliton: bowl c=1 n=2"));
    assert!(obj.contains("# chart: poincare_disk"));
    let report: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("bowl_diagnostics.json")).unwrap(),
    )
    .unwrap();
    assert!(report
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["pass"] == true || r["applicable"] == false));
}

#[test]
fn verify_accepts_clean_and_rejects_perturbed_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = forge(&["soliton", "bowl", "--r-max", "5", "--out", s(dir.path())]);
    assert_eq!(code(&out), 0, "{}", text(&out));
    let csv = dir.path().join("bowl.csv");
    let ok = forge(&["verify", "--input", s(&csv), "--out", s(dir.path())]);
    assert_eq!(code(&ok), 0, "{}", text(&ok));

    // shift the radii of a slab of rows
    let original = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = original.lines().collect();
    let m = lines.len();
    let mut edited = Vec::with_capacity(m);
    for (i, line) in lines.iter().enumerate() {
        if i > m / 3 && i < m / 2 {
            let mut cols: Vec<String> = line.split(',').map(str::to_string).collect();
            let r: f64 = cols[1].parse().unwrap();
            cols[1] = format!("{:.16e}", r + 1e-3);
            edited.push(cols.join(","));
        } else {
            edited.push(line.to_string());
        }
    }
    let bad = dir.path().join("perturbed.csv");
    fs::write(&bad, edited.join("\n") + "\n").unwrap();
    fs::copy(
        dir.path().join("bowl.json"),
        dir.path().join("perturbed.json"),
    )
    .unwrap();
    let out = forge(&["verify", "--input", s(&bad), "--out", s(dir.path())]);
    assert_eq!(code(&out), 2, "{}", text(&out));
}

#[test]
fn zero_epsilon_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = forge(&["soliton", "wing", "--epsilon", "0", "--out", s(dir.path())]);
    assert_eq!(code(&out), 1, "{}", text(&out));
    assert!(text(&out).contains("ε must be positive"));
}

#[test]
fn unknown_flags_are_rejected_with_usage() {
    let out = forge(&["soliton", "bowl", "--warp-speed", "9"]);
    assert_eq!(code(&out), 1);
    assert!(text(&out).contains("Usage"));
    assert_eq!(code(&forge(&["--help"])), 0);
}

#[test]
fn identical_runs_give_identical_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = forge(&[
            "soliton",
            "wing",
            "--epsilon",
            "0.5",
            "--r-max",
            "4",
            "--segments",
            "16",
            "--out",
            s(d.path()),
        ]);
        assert_eq!(code(&out), 0, "{}", text(&out));
    }
    for f in [
        "wing_upper.csv",
        "wing_lower.csv",
        "wing.obj",
        "wing_diagnostics.json",
        "wing_lower.json",
    ] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"c": 2.0, "n": 3, "r_max": 3.0, "name": "from_config"}"#,
    )
    .unwrap();
    let out = forge(&[
        "soliton",
        "bowl",
        "--config",
        s(&cfg),
        "--c",
        "0.5",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", text(&out));
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("from_config.json")).unwrap())
            .unwrap();
    assert_eq!(meta["spec"]["c"], 0.5);
    assert_eq!(meta["spec"]["n"], 3);
    let obj = fs::read_to_string(dir.path().join("from_config.obj")).unwrap();
    assert!(obj.contains("# equatorial slice"));
}

#[test]
fn flow_writes_trajectory_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let out = forge(&[
        "flow",
        "--c",
        "1",
        "--radius",
        "4",
        "--nodes",
        "81",
        "--horizon",
        "0.05",
        "--bc",
        "soliton-slope",
        "--initial",
        "soliton+bump:0.3,0.5,1",
        "--snapshot-every",
        "20",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", text(&out));
    let traj = fs::read_to_string(dir.path().join("flow_trajectory.csv")).unwrap();
    assert!(traj.starts_with("tau,F,D,dF/dtau"));
    let f: Vec<f64> = traj
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(f.windows(2).all(|w| w[1] <= w[0]));
    assert!(dir.path().join("flow_index.csv").exists());
    assert!(dir.path().join("flow_0000.csv").exists());
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("flow_summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["max_f_increase"], 0.0);

    // restarting from a snapshot
    let snap = dir.path().join("flow_0000.csv");
    let init = format!("csv:{}", s(&snap));
    let out = forge(&[
        "flow",
        "--radius",
        "4",
        "--nodes",
        "81",
        "--horizon",
        "0.01",
        "--initial",
        &init,
        "--name",
        "again",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", text(&out));
}

#[test]
fn isometry_moves_points_and_meshes() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.csv");
    let (ch, sh) = (1f64.cosh(), 1f64.sinh());
    fs::write(&pts, format!("x0,x1,x2\n1,0,0\n{ch:.17},{sh:.17},0\n")).unwrap();
    let out = forge(&[
        "isometry",
        "--map",
        r#"{"type":"hyperbolic","param":1.0}"#,
        "--points",
        s(&pts),
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", text(&out));
    let moved = fs::read_to_string(dir.path().join("isometry.csv")).unwrap();
    let rows: Vec<Vec<f64>> = moved
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    for row in &rows {
        let q = -row[0] * row[0] + row[1] * row[1] + row[2] * row[2];
        assert!((q + 1.0).abs() < 1e-12);
    }
    // one of the two points is sent to the origin
    assert!(rows.iter().any(|r| (r[0] - 1.0).abs() < 1e-12));

    let out = forge(&[
        "soliton",
        "bowl",
        "--r-max",
        "2",
        "--segments",
        "12",
        "--chart",
        "hyperboloid",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", text(&out));
    let out = forge(&[
        "isometry",
        "--map",
        r#"{"type":"parabolic","param":0.5}"#,
        "--mesh",
        s(&dir.path().join("bowl.obj")),
        "--name",
        "moved",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", text(&out));
    assert!(dir.path().join("moved.obj").exists());

    let out = forge(&[
        "isometry",
        "--map",
        "{\"type\":\"elliptic\",\"param\":1}",
        "--points",
        s(&pts),
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn epsilon_sweep_is_monotone_and_thread_count_independent() {
    let one = tempfile::tempdir().unwrap();
    let many = tempfile::tempdir().unwrap();
    for (d, threads) in [(&one, "1"), (&many, "4")] {
        let out = Command::new(env!("CARGO_BIN_EXE_soliton-forge"))
            .args([
                "sweep",
                "--param",
                "epsilon",
                "--values",
                "0.05,0.1,0.5,1",
                "--r-max",
                "6",
                "--out",
                s(d.path()),
            ])
            .env("SOLITON_FORGE_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(code(&out), 0, "{}", text(&out));
        assert!(text(&out).contains("gap strictly increasing"));
    }
    for f in [
        "sweep_summary.csv",
        "sweep_summary.json",
        "sweep_000.csv",
        "sweep_003.csv",
    ] {
        assert_eq!(
            fs::read(one.path().join(f)).unwrap(),
            fs::read(many.path().join(f)).unwrap(),
            "{f}"
        );
    }
}
