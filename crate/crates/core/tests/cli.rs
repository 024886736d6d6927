use std::process::Command;

use serde_json::Value;

fn braidord(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_braidord")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out) = braidord(args);
    assert_eq!(code, 0, "{args:?}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn certify_outputs_json() {
    let v = json(&["certify", "d_5 s1^2", "--strands", "5"]);
    assert_eq!(v["verdict"], "NOT_OP");
    assert_eq!(v["reasons"][0]["criterion"], "saturation");
    let v = json(&["certify", "--matrix", "[[2,1],[1,1]]"]);
    assert_eq!(v["verdict"], "OP");
    let v = json(&["certify", "--endo", r#"{"images": {"x1": "x1^-1 x2^-1 x1^-1", "x2": "x1^-1 x2^-1"}}"#]);
    assert_eq!(v["verdict"], "NOT_OP");
}

#[test]
fn table_mode_and_small_commands() {
    assert_eq!(braidord(&["--table", "certify", "s1^2", "-n", "2"]).1.trim(), "OP(DeltaSquareReduction(1), PureBraid)");
    assert_eq!(braidord(&["--table", "sign", "x1^-1 x2"]).1.trim(), "negative");
    assert_eq!(braidord(&["--table", "compare", "x1", "x2 x1"]).1.trim(), "x1 < x2 x1");
    assert_eq!(braidord(&["--table", "min-degree", "x1 x2 x1^-1 x2^-1"]).1.trim(), "2");
    assert_eq!(braidord(&["--table", "explicit-order", "--n", "3", "embed", "x1 x2"]).1.trim(), "v u^2");
    let v = json(&["act", "s1", "-n", "2", "--convention", "boundary"]);
    assert_eq!(v["images"]["x1"], "x1 x2 x1^-1");
    let v = json(&["charpoly", "--matrix", "[[1,1,0],[0,1,1],[0,0,1]]"]);
    assert_eq!(v["char_poly"], "t^3 - 3t^2 + 3t - 1");
    let v = json(&["linkinfo", "s1 s2^-1", "-n", "3"]);
    assert_eq!(v["component_count"], 2);
}

#[test]
fn refute_then_verify() {
    let dir = std::env::temp_dir().join(format!("braidord-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cert.json");
    let (code, out) = braidord(&["refute", "--braid", "s1 s2^-1", "--strands", "3"]);
    assert_eq!(code, 0);
    std::fs::write(&path, out).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(braidord(&["verify", p, "s1 s2^-1", "-n", "3"]).0, 0);
    assert_eq!(braidord(&["verify", p, "s1 s2", "-n", "3"]).0, 1);
}

#[test]
fn corpus_exit_status() {
    let dir = std::env::temp_dir().join(format!("braidord-corpus-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("good.json");
    std::fs::write(&good, r#"[{"name": "s1", "braid": "s1", "strands": 3, "expected": "NOT_OP"}]"#).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"[{"name": "s1", "braid": "s1", "strands": 3, "expected": "OP"}]"#).unwrap();
    let (code, out) = braidord(&["corpus", good.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["rows"][0]["verdict"], "NOT_OP");
    assert_eq!(braidord(&["corpus", bad.to_str().unwrap()]).0, 1);
    let schema = dir.join("schema.json");
    std::fs::write(&schema, r#"[{"name": "x", "expected": "MAYBE"}]"#).unwrap();
    assert_eq!(braidord(&["corpus", schema.to_str().unwrap()]).0, 2);
}
