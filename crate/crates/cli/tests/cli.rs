use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn semitor(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_semitor")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn json_run(cmd: &str, file: &Path, extra: &[&str]) -> (i32, Value) {
    let mut args = vec![cmd, file.to_str().unwrap(), "--json"];
    args.extend_from_slice(extra);
    let (code, out, err) = semitor(&args);
    let v: Value = serde_json::from_str(&out).unwrap_or_else(|e| panic!("bad json ({e}): {out}\n{err}"));
    (code, v)
}

fn verified(cmd: &str, name: &str, extra: &[&str]) -> Value {
    let file = data(name);
    let (code, v) = json_run(cmd, &file, extra);
    assert_eq!(code, 0, "{cmd} {name}: {v}");
    let input = std::fs::read_to_string(&file).unwrap();
    let checks = semitor_cli::verify::verify(&input, &v).unwrap_or_else(|e| panic!("{cmd} {name}: {e}"));
    assert!(checks > 0);
    v
}

fn tmp_doc(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("semitor-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn classify_fixtures() {
    let s = verified("classify", "split.json", &[]);
    assert_eq!(s["result"]["classification"]["tag"], "SplitProduct");
    assert_eq!(s["result"]["classification"]["e_tau"]["coords"], serde_json::json!(["0", "1"]));
    let c = verified("classify", "cubic.json", &[]);
    assert_eq!(c["result"]["classification"]["tag"], "CubicArithmetic");
    let g = verified("classify", "generic.json", &[]);
    assert_eq!(g["result"]["classification"]["tag"], "Generic");
    assert_eq!(g["result"]["classification"]["witness"]["triples"], serde_json::json!([[0, 1, 0], [1, 0, 0]]));
}

#[test]
fn validate_rejects_non_discrete() {
    let (code, v) = json_run("validate", &data("nondiscrete.json"), &[]);
    assert_eq!(code, 3);
    assert_eq!(v["error"]["kind"], "NotDiscreteOrRankDeficient");
    let (code, out, _) = semitor(&["validate", data("cubic.json").to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("valid"));
}

#[test]
fn quotient_count() {
    let v = verified("quotients", "cubic.json", &["--height", "1"]);
    assert_eq!(v["result"]["quotients"].as_array().unwrap().len(), 13);
    let v = verified("quotients", "split.json", &["--height", "1"]);
    assert_eq!(v["result"]["quotients"].as_array().unwrap().len(), 9);
}

#[test]
fn reports_verify_and_agree() {
    let r = verified("report", "cubic.json", &["--height", "2"]);
    assert_eq!(r["result"]["all_isogenous"], true);
    let r = verified("report", "split.json", &["--height", "2"]);
    assert_eq!(r["result"]["all_isogenous"], true);
    let r = verified("report", "generic.json", &["--height", "1"]);
    assert_eq!(r["result"]["all_isogenous"], false);
    assert_eq!(r["result"]["first_failing_pair"], serde_json::json!([[0, 1, 0], [1, 0, 0]]));
}

#[test]
fn pair_commands() {
    let v = verified("isogeny", "pair_cubic.json", &[]);
    assert_eq!(v["result"]["isogenous"], true);
    let v = verified("orbit", "pair_cubic.json", &[]);
    assert_eq!(v["result"]["same_orbit"], true);
    assert_eq!(v["result"]["witness"], serde_json::json!(["0", "2", "1", "0"]));
    verified("reduce", "pair_cubic.json", &[]);
    let v = verified("witness", "split.json", &[]);
    assert!(v["result"]["isogeny"].is_array());
    verified("witness", "generic.json", &[]);
}

#[test]
fn deterministic_across_runs_and_jobs() {
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("diagnostics");
        v
    };
    let a = strip(json_run("report", &data("generic.json"), &["--height", "2"]).1);
    let b = strip(json_run("report", &data("generic.json"), &["--height", "2", "--jobs", "1"]).1);
    assert_eq!(a, b);
    let c = strip(json_run("classify", &data("split.json"), &["--jobs", "3"]).1);
    let d = strip(json_run("classify", &data("split.json"), &[]).1);
    assert_eq!(c, d);
}

#[test]
fn exhausted_searches_exit_4() {
    let (code, v) = json_run("classify", &data("split.json"), &["--norm-height", "0"]);
    assert_eq!(code, 4);
    assert_eq!(v["error"]["kind"], "SearchExhausted");
    let (code, v) = json_run("classify", &data("generic.json"), &["--witness-cap", "0"]);
    assert_eq!(code, 4);
    assert!(v["result"]["classification"]["witness"].is_null());
}

#[test]
fn input_errors_carry_positions() {
    let p = tmp_doc("broken.json", "{\n  \"schema\": 1,\n  \"field\": [\n");
    let (code, _, err) = semitor(&["classify", p.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line 4"), "{err}");

    let text = std::fs::read_to_string(data("split.json")).unwrap().replace("[[\"0\", \"0\"], [\"0\", \"1\"]]", "[[\"0\", \"0\"], [\"0\", \"0.5\"]]");
    let p = tmp_doc("decimal.json", &text);
    let (code, _, err) = semitor(&["classify", p.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("generators[2][1][1]"), "{err}");

    let text = std::fs::read_to_string(data("split.json")).unwrap().replace("\"schema\": 1", "\"schema\": 2");
    let p = tmp_doc("schema.json", &text);
    assert_eq!(semitor(&["classify", p.to_str().unwrap()]).0, 2);

    let text = std::fs::read_to_string(data("split.json")).unwrap().replace("\"-1/2\", \"1/2\", \"1/2\", \"3/2\"", "\"-2\", \"2\", \"-2\", \"2\"");
    let p = tmp_doc("rect.json", &text);
    let (code, v) = json_run("classify", &p, &[]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "RectNotIsolating");
}

#[test]
fn decimal_literals_are_exact() {
    let text = std::fs::read_to_string(data("split.json")).unwrap().replace("[[\"0\", \"0\"], [\"0\", \"1\"]]", "[[\"0\", \"0\"], [\"0\", \"dec:1.0\"]]");
    let p = tmp_doc("dec.json", &text);
    let (code, v) = json_run("classify", &p, &[]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["classification"]["tag"], "SplitProduct");
}

#[test]
fn reducible_modulus_is_split() {
    // (t^2 + 1)(t - 3) with the embedding around i
    let text = r#"{
      "schema": 1,
      "field": { "min_poly": ["-3", "1", "-3", "1"], "embedding": ["-1/2", "1/2", "1/2", "3/2"] },
      "generators": [[["1","0","0"],["0","0","0"]], [["0","0","0"],["1","0","0"]], [["0","0","0"],["0","1","0"]]]
    }"#;
    let p = tmp_doc("reducible.json", text);
    let (code, v) = json_run("classify", &p, &[]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["field"]["min_poly"], serde_json::json!(["1", "0", "1"]));
    assert_eq!(v["result"]["classification"]["tag"], "SplitProduct");
    semitor_cli::verify::verify(text, &v).unwrap();
}
