use std::process::{Command, Output};

use serde_json::Value;

fn gvs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gvs"))
        .args(args)
        .env_remove("GVS_GRID_SCALE")
        .output()
        .expect("gvs runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn strip_wall_time(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("wall_time");
            m.values_mut().for_each(strip_wall_time);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_wall_time),
        _ => {}
    }
}

#[test]
fn lp_norm_of_h1_is_one() {
    let out = gvs(&["norm", "--space", "lp", "--f", "h:1", "--p", "const:2"]);
    assert!(out.status.success());
    let v = json(&out)["norm"]["value"].as_f64().unwrap();
    assert!((v - 1.0).abs() < 1e-12, "{v}");
}

#[test]
fn besov_norm_of_h2_matches_closed_form() {
    let out = gvs(&[
        "norm", "--space", "besov", "--f", "h:2", "--p", "const:2", "--q", "const:2", "--alpha",
        "0.5",
    ]);
    assert!(out.status.success());
    let total = json(&out)["report"]["total"].as_f64().unwrap();
    // √2 · (Γ(1) / (2√2))^{1/2}
    let expected = 1.0 + 2f64.sqrt() * (1.0 / (2.0 * 2f64.sqrt())).sqrt();
    assert!(
        (total - expected).abs() < 1e-7 * expected,
        "{total} vs {expected}"
    );
}

#[test]
fn missing_alpha_is_a_usage_error() {
    let out = gvs(&[
        "norm", "--space", "besov", "--f", "h:2", "--p", "const:2", "--q", "const:2",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn order_not_above_alpha_is_rejected() {
    let out = gvs(&[
        "norm", "--space", "triebel", "--f", "h:2", "--p", "const:2", "--q", "const:2", "--alpha",
        "1.5", "--k", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("hypothesis"));
}

#[test]
fn bad_literal_is_rejected() {
    let out = gvs(&["norm", "--space", "lp", "--f", "h:x", "--p", "const:2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = gvs(&["norm", "--space", "lp", "--f", "h:1", "--p", "const:0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_suite_exits_two() {
    assert_eq!(gvs(&["verify", "no-such-suite"]).status.code(), Some(2));
}

#[test]
fn semigroup_paths_agree() {
    let run = |path: &str| {
        let out = gvs(&[
            "semigroup",
            "--f",
            "expand:[(1,0.5),(3,-1)]",
            "--t",
            "0.7",
            "--k",
            "2",
            "--x",
            "-0.4",
            "--path",
            path,
        ]);
        assert!(out.status.success());
        json(&out)["value"].as_f64().unwrap()
    };
    let (a, b) = (run("expansion"), run("kernel"));
    assert!((a - b).abs() <= 1e-6 * a.abs().max(1e-3), "{a} vs {b}");
}

#[test]
fn verify_is_deterministic() {
    let run = || {
        let out = gvs(&["verify", "holder", "--seed", "5"]);
        assert!(out.status.success());
        let mut v = json(&out);
        strip_wall_time(&mut v);
        v
    };
    let v = run();
    assert_eq!(v["suite_id"], "holder");
    assert_eq!(v["pass"], true);
    assert_eq!(v, run());
}

#[test]
fn verify_lemma_moment_writes_csv() {
    let dir = std::env::temp_dir().join(format!("gvs-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("moment.csv");
    let out = gvs(&["verify", "lemma-moment", "--csv", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("suite_id,case_id,alpha,k,p_desc,q_desc,lhs,rhs,ratio,pass")
    );
    assert!(lines.all(|l| l.starts_with("lemma-moment,") && l.ends_with(",true")));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = std::env::temp_dir().join(format!("gvs-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"norm": {"space": "lp", "f": "h:1", "p": "const:2"}}"#,
    )
    .unwrap();
    let out = gvs(&["norm", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(json(&out)["p"], "const:2");
    let out = gvs(&["norm", "--config", cfg.to_str().unwrap(), "--p", "const:3"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["p"], "const:3");
    std::fs::write(&cfg, r#"{"bogus": 1}"#).unwrap();
    assert_eq!(
        gvs(&["norm", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn report_prints_a_table() {
    let out = gvs(&["report", "--suites", "lemma-moment,stable-derivatives"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().next().unwrap().starts_with("suite"));
    assert!(text.contains("stable-derivatives"));
}
