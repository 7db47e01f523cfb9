use std::path::Path;
use std::process::{Command, Output};

fn pqdec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pqdec"))
        .args(args)
        .env_remove("PQDEC_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn version_lists_library_and_formats() {
    let out = pqdec(&["--version"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("library 0.1.0"), "{text}");
    assert!(text.contains("instance json 1") && text.contains("state dump 1"), "{text}");
}

#[test]
fn field_addition_in_f16() {
    let out = pqdec(&["field", "--p", "2", "--m", "4", "--op", "add", "--a", "1", "--b", "3"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["result"], 2);
}

#[test]
fn gen_then_decode_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let inst = inst.to_str().unwrap();
    // seed 6 draws a code with d = 4 > n, so sigma = 1 is inside the window
    let gen = pqdec(&["gen", "--p", "2", "--m", "4", "--n", "2", "--k", "1", "--seed", "6", "--out", inst]);
    assert!(gen.status.success(), "{}", String::from_utf8_lossy(&gen.stderr));
    let decoded = || pqdec(&["decode", "--instance", inst, "--backend", "dense", "--seed", "7", "--no-timing"]);
    let (a, b) = (decoded(), decoded());
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let result = json(&a);
    let planted: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(inst).unwrap()).unwrap();
    assert_eq!(result["s_hat"], planted["s_true"]);
    assert_eq!(result["verified"], true);
    assert_eq!(result["seed"], 7);
    assert!(result["wall_ms"].is_null());

    let timed = pqdec(&["decode", "--instance", inst]);
    assert!(json(&timed)["wall_ms"].is_number());
}

#[test]
fn seed_flag_beats_environment() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_pqdec"));
        cmd.args(["stats", "--p", "2", "--t", "3", "--trials", "50"]);
        cmd.env_remove("PQDEC_SEED");
        if let Some(e) = env {
            cmd.env("PQDEC_SEED", e);
        }
        if let Some(f) = flag {
            cmd.args(["--seed", f]);
        }
        json(&cmd.output().unwrap())["seed"].as_u64().unwrap()
    };
    assert_eq!(run(None, None), 0);
    assert_eq!(run(Some("11"), None), 11);
    assert_eq!(run(Some("11"), Some("5")), 5);
}

#[test]
fn decode_failure_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    // t is off the code and the promise w = 1 cannot hold at sigma = 1
    let inst = write(
        dir.path(),
        "bad.json",
        r#"{"field":{"p":2,"m":2,"poly":[1,1]},"n":3,"k":1,"A":[[1],[2],[3]],"t":[0,3,0],"w":1,"d":4}"#,
    );
    let out = pqdec(&["decode", "--instance", &inst]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("promise violated"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(pqdec(&["decode"]).status.code(), Some(2));
    assert_eq!(pqdec(&["nonsense"]).status.code(), Some(2));
    let out = pqdec(&["decode", "--instance", "/nonexistent/inst.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("reading"));
    assert_eq!(pqdec(&["field", "--p", "4", "--m", "1"]).status.code(), Some(2));
}

#[test]
fn baseline_reports_status() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(
        dir.path(),
        "inst.json",
        r#"{"field":{"p":2,"m":2,"poly":[1,1]},"n":3,"k":1,"A":[[1],[2],[3]],"t":[2,3,1],"w":0,"s_true":[2]}"#,
    );
    let out = pqdec(&["baseline", "--instance", &inst, "--r", "0", "--rows", "all"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["status"], "recovered");
    assert_eq!(v["s_hat"], serde_json::json!([2]));
    assert_eq!(v["system_shape"], serde_json::json!([6, 2]));
}

#[test]
fn hardness_reports_yes_gap() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write(dir.path(), "sc.json", r#"{"universe":3,"sets":[[0,1],[2],[0],[1,2]],"K":2,"c":2}"#);
    let out = pqdec(&["hardness", "--sc", &sc, "--p", "2", "--m", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["case"], "yes");
    assert_eq!(v["opt"], 2);
    assert_eq!(v["bound"], 2);
    assert_eq!(v["pass"], true);
}

#[test]
fn separation_csv_is_deterministic() {
    let args = ["separation", "--m", "8", "--n", "8", "--trials", "20", "--seed", "3"];
    let (a, b) = (pqdec(&args), pqdec(&args));
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("p,m,n,k,level"));
    assert!(lines[1].contains(",tight,"));
}
