use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn scas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scas")).args(args).env_remove("SCAS_SCOPE_CAP").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn provider() -> String {
    fixture("provider.arcs").display().to_string()
}

#[test]
fn validate_reports_sizes() {
    let o = scas(&["validate", &provider()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "34 features, 24 arcs\n");
    let o = scas(&["validate", &fixture("saas_app.xml").display().to_string()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn validate_emits_json_diagnostic() {
    let o = scas(&["validate", &fixture("empty_heads.arcs").display().to_string()]);
    assert_eq!(o.status.code(), Some(2));
    let diag: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(diag["error"], "EmptyHeadSet");
    assert_eq!(diag["line"], 5);
    assert_eq!(diag["column"], 1);
}

#[test]
fn format_override() {
    let dir = tempfile::tempdir().unwrap();
    let copy = dir.path().join("model.txt");
    std::fs::copy(fixture("provider.arcs"), &copy).unwrap();
    let path = copy.display().to_string();
    assert_eq!(scas(&["validate", &path]).status.code(), Some(2));
    assert_eq!(scas(&["validate", &path, "--format", "arcs"]).status.code(), Some(0));
    assert_eq!(scas(&["validate", &path, "--format", "xml"]).status.code(), Some(2));
}

#[test]
fn io_errors_exit_3() {
    assert_eq!(scas(&["validate", "/no/such/model.arcs"]).status.code(), Some(3));
}

#[test]
fn enumerate_lines_and_counts() {
    let o = scas(&["enumerate", &provider(), "--scope", "PDB"]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), 6);
    assert!(lines.iter().all(|l| l.starts_with("PDB,")));
    for (scope, k) in [("PGUI", "24"), ("PBP", "16"), ("PS", "3"), ("PDB", "6"), ("Provider", "6912")] {
        let o = scas(&["enumerate", &provider(), "--scope", scope, "--count-only"]);
        assert_eq!(stdout(&o).trim(), k, "{scope}");
    }
    let o = scas(&["enumerate", &provider(), "--scope", "Provider", "--limit", "5"]);
    assert_eq!(stdout(&o).lines().count(), 5);
    assert_eq!(scas(&["enumerate", &provider(), "--scope", "nope"]).status.code(), Some(2));
}

#[test]
fn scope_cap_from_environment() {
    let run = |extra: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_scas"))
            .args(["enumerate", &provider(), "--scope", "Provider"])
            .args(extra)
            .env("SCAS_SCOPE_CAP", "10")
            .output()
            .unwrap()
    };
    let o = run(&["--count-only"]);
    assert_eq!(o.status.code(), Some(2));
    let diag: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(diag["error"], "ScopeTooLarge");
    let o = run(&["--limit", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 3);
}

#[test]
fn metrics_json() {
    let o = scas(&["metrics", &provider(), "--scope", "PGUI"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let s = &v["scopes"][0];
    assert_eq!(s["k"], 24);
    assert_eq!(s["n"], 8);
    assert_eq!(s["variability"]["fraction"], "24/255");
    assert_eq!(s["variability"]["reduced"], "8/85");
    assert_eq!(s["variability"]["decimal"], "0.0941176");
    assert_eq!(v["variability_denominator"], "2^n - 1");
    let digest = v["input_sha256"].as_str().unwrap();
    assert_eq!(digest.len(), 64);

    let o = scas(&["metrics", &provider(), "--all-layers"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let layers: Vec<&str> = v["scopes"].as_array().unwrap().iter().map(|s| s["layer"].as_str().unwrap()).collect();
    assert_eq!(layers.len(), 4);
    assert_eq!(scas(&["metrics", &provider()]).status.code(), Some(2));
}

#[test]
fn select_and_infeasible() {
    let o = scas(&["select", &provider(), "--scope", "PGUI", "--require", "tree"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "PGUI,menu,page,tree\ncost: 4\n");
    let o = scas(&["select", &provider(), "--scope", "PGUI", "--require", "tree,standard"]);
    assert_eq!(o.status.code(), Some(4));
    let o = scas(&["select", &provider(), "--scope", "PGUI", "--require", "tree", "--exclude", "tree"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn select_with_weights() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.txt");
    std::fs::write(&w, "# prices\nmenu 10\ntree 1/2\n").unwrap();
    let o =
        scas(&["select", &provider(), "--scope", "PGUI", "--require", "tree", "--weights", &w.display().to_string()]);
    assert_eq!(stdout(&o), "PGUI,menu,page,tree\ncost: 25/2\n");
    std::fs::write(&w, "menu lots\n").unwrap();
    let o = scas(&["select", &provider(), "--scope", "PGUI", "--weights", &w.display().to_string()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reconfigure_plan() {
    let dir = tempfile::tempdir().unwrap();
    let cur = dir.path().join("current.txt");
    std::fs::write(&cur, "PGUI,tree\n").unwrap();
    let o = scas(&["reconfigure", &provider(), "--scope", "PGUI", "--current", &cur.display().to_string()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "target: PGUI,menu,page,tree\nadd: page,menu\nremove: \ndelta_size: 2\ncost: 4\n");
    let o = scas(&[
        "reconfigure",
        &provider(),
        "--scope",
        "PGUI",
        "--current",
        &cur.display().to_string(),
        "--require",
        "standard",
        "--exclude",
        "tree",
    ]);
    assert_eq!(
        stdout(&o),
        "target: PGUI,menu,page,standard\nadd: page,menu,standard\nremove: tree\ndelta_size: 4\ncost: 4\n"
    );
}

#[test]
fn listing_agrees_with_count_only() {
    let xml = fixture("saas_app.xml").display().to_string();
    for (input, scope) in [(provider(), "PGUI"), (provider(), "Provider"), (xml.clone(), "PGUI"), (xml, "SaaS_APP")] {
        let listed = stdout(&scas(&["enumerate", &input, "--scope", scope])).lines().count();
        let counted: usize =
            stdout(&scas(&["enumerate", &input, "--scope", scope, "--count-only"])).trim().parse().unwrap();
        assert_eq!(listed, counted, "{input} {scope}");
    }
}

#[test]
fn output_is_deterministic() {
    let a = scas(&["metrics", &provider(), "--all-layers"]);
    let b = scas(&["metrics", &provider(), "--all-layers"]);
    assert_eq!(a.stdout, b.stdout);
}
