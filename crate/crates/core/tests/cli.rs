use std::path::PathBuf;
use std::process::{Command, Output};

fn r1n(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_r1n")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("r1n-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn without_timestamp(text: &str) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(text).unwrap();
    v.as_object_mut().unwrap().remove("timestamp");
    v
}

#[test]
fn ball_prints_eigenvalue_json() {
    let o = r1n(&["ball", "--space", "K2_n1_c", "--radius", "0.7853981633974483"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["mu1"].as_f64().unwrap() - 8.0).abs() < 1e-7);
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn radius_beyond_quarter_injectivity_is_a_usage_error() {
    let o = r1n(&["ball", "--space", "K2_n2_c", "--radius", "0.9"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("radius"));
}

#[test]
fn malformed_input_exits_two() {
    assert_eq!(code(&r1n(&["ball", "--space", "K3_n2_c", "--radius", "0.5"])), 2);
    assert_eq!(code(&r1n(&["verify", "--space", "K1_n2_nc", "--domain", "blob:1"])), 2);
    assert_eq!(code(&r1n(&[])), 2);
    // FEM needs a two-dimensional space
    assert_eq!(code(&r1n(&["verify", "--space", "K2_n2_c", "--domain", "ellipse:0.3,0.2"])), 2);
}

#[test]
fn lemma_checks_pass_and_a_corrupted_count_fails() {
    let ok = r1n(&["check-lemmas", "--space", "K2_n2_c,K1_n3_nc", "--points", "200", "--radii", "4"]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stderr));
    let bad = r1n(&["check-lemmas", "--space", "K1_n3_nc", "--points", "200", "--radii", "4", "--corrupt-count"]);
    assert_eq!(code(&bad), 1);
    let v: serde_json::Value = serde_json::from_slice(&bad.stdout).unwrap();
    assert!(v["summary"]["failed"].as_u64().unwrap() > 0);
}

#[test]
fn verify_writes_artifacts_sharing_the_config_hash() {
    let dir = scratch("artifacts");
    let o = r1n(&[
        "verify", "--space", "K1_n2_nc", "--domain", "ellipse:0.5,0.3", "--h", "0.08", "-o", dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    let hash = report["config_hash"].as_str().unwrap().to_string();
    for name in ["ball.json", "g.csv", "mesh.txt", "spectrum.json"] {
        let text = std::fs::read_to_string(dir.join(name)).unwrap();
        assert!(text.contains(&hash), "{name} lacks the config hash");
    }
    let mesh = rank1_neumann::fem2d::Mesh::read(&dir.join("mesh.txt")).unwrap();
    assert!(!mesh.triangles.is_empty());
    let csv = std::fs::read_to_string(dir.join("g.csv")).unwrap();
    let g = rank1_neumann::radial::RadialProfile::from_csv(rank1_neumann::radial::ProfileKind::BallEigenfunction, &csv).unwrap();
    assert_eq!(g.values[0], 0.0);
    for key in ["tool", "config", "config_hash", "timestamp", "checks", "summary"] {
        assert!(report.get(key).is_some(), "{key}");
    }
    for c in report["checks"].as_array().unwrap() {
        assert!(c["tol"].as_f64().unwrap() >= 0.0);
    }
}

#[test]
fn same_config_gives_identical_reports_and_replays() {
    let dir = scratch("determinism");
    let args = ["verify", "--space", "K2_n1_nc", "--domain", "peanut:0.4,0.3,0.5", "--h", "0.08"];
    let a = r1n(&args);
    let b = r1n(&[&args[..], &["--jobs", "1"]].concat());
    assert_eq!(code(&a), 0);
    let (ja, jb) = (String::from_utf8_lossy(&a.stdout), String::from_utf8_lossy(&b.stdout));
    assert_eq!(without_timestamp(&ja), without_timestamp(&jb));

    let path = dir.join("report.json");
    std::fs::write(&path, ja.as_bytes()).unwrap();
    let fresh = dir.join("fresh.json");
    let r = r1n(&["--replay", path.to_str().unwrap(), "-o", fresh.to_str().unwrap()]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(without_timestamp(&ja), without_timestamp(&std::fs::read_to_string(&fresh).unwrap()));

    // a tampered config no longer matches its hash
    let mut v: serde_json::Value = serde_json::from_str(&ja).unwrap();
    v["config"]["target_h"] = 0.07.into();
    std::fs::write(&path, v.to_string()).unwrap();
    assert_eq!(code(&r1n(&["--replay", path.to_str().unwrap()])), 2);
}

#[test]
fn config_file_matches_flags() {
    let dir = scratch("config");
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "# ball run\ncommand = ball\nspace = K1_n3_nc\nradius = 1.2\n").unwrap();
    let a = r1n(&["--config", cfg.to_str().unwrap()]);
    let b = r1n(&["ball", "--space", "K1_n3_nc", "--radius", "1.2"]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
}
