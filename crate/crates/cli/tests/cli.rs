use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn corpus(file: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(file).display().to_string()
}

fn cfc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfc")).args(args).env("CFC_COLOR", "0").output().unwrap()
}

fn cfc_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_cfc"))
        .args(args)
        .env("CFC_COLOR", "0")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

/// Checks the fields every JSON object carries.
fn envelope(v: &Value, command: &str, exit: i64) {
    assert_eq!(v["command"], command);
    assert_eq!(v["exit_code"], exit);
    assert_eq!(v["ok"], exit == 0);
    for d in v["diagnostics"].as_array().unwrap() {
        assert!(d["code"].is_string() && d["message"].is_string() && d["file"].is_string(), "{d}");
    }
}

#[test]
fn check_plus_succeeds() {
    let o = cfc(&["check", &corpus("plus.cfc")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("main : Int"));
}

#[test]
fn normalize_equ_is_false() {
    let o = cfc(&["normalize", &corpus("equ.cfc"), "--type", "Equ Int Bool"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "False");
}

#[test]
fn unguarded_loop_is_a_semantic_error() {
    let o = cfc(&["check", &corpus("loop_bad.cfc")]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("error[FamilyInRHS]"), "{err}");
    assert!(err.contains("loop_bad.cfc:4:1"), "{err}");
}

#[test]
fn parse_errors_exit_with_two_and_a_position() {
    let o = cfc_stdin(&["check", "-"], "data Z : 0\nfamily F : 1 maybe\n");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("<stdin>:2:"), "{}", stderr(&o));
}

#[test]
fn stdin_is_accepted() {
    let o = cfc_stdin(
        &["normalize", "-", "--type", "F Z"],
        "data Z : 0\nfamily F : 1 total\naxiom f : F { forall a. F a ~ Z }\n",
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "Z");
}

#[test]
fn stuck_types_print_unchanged() {
    let o = cfc(&["--json", "normalize", &corpus("onlyint.cfc"), "--type", "OnlyInt Bool"]);
    let v = json(&o);
    envelope(&v, "normalize", 0);
    assert_eq!(v["normal_form"], "OnlyInt Bool");
    assert_eq!(v["stuck"], true);
    assert_eq!(v["steps"], 0);
}

#[test]
fn type_parse_errors_point_into_the_type() {
    let o = cfc(&["--json", "normalize", &corpus("equ.cfc"), "--type", "Equ Int ("]);
    let v = json(&o);
    envelope(&v, "normalize", 2);
    assert_eq!(v["diagnostics"][0]["file"], "<type>");
    assert_eq!(v["diagnostics"][0]["code"], "ParseError");
}

#[test]
fn eval_traces_steps() {
    let o = cfc(&["--json", "eval", &corpus("plus.cfc"), "--main", "main", "--trace"]);
    let v = json(&o);
    envelope(&v, "eval", 0);
    assert_eq!(v["outcome"], "value");
    assert_eq!(v["result"], "MkInt");
    assert_eq!(v["trace"][0]["rule"], "S_Resolve");
    assert_eq!(v["steps"], v["trace"].as_array().unwrap().len());
}

#[test]
fn eval_reports_unknown_terms_and_fuel() {
    let o = cfc(&["eval", &corpus("plus.cfc"), "--main", "nope"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("UnknownTerm"));
    let o = cfc(&["eval", &corpus("plus.cfc"), "--fuel", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("FuelExhausted"));
}

#[test]
fn infer_collects() {
    let o = cfc(&["infer", &corpus("collects.cfc"), "--type", "Elem c -> c -> c"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "Collects c => Elem c -> c -> c");
    let o = cfc(&["--json", "infer", &corpus("collects.cfc"), "--type", "Elem [a] -> [a] -> [a]"]);
    let v = json(&o);
    envelope(&v, "infer", 0);
    assert_eq!(v["constraints"], Value::Array(vec![]));
}

#[test]
fn elaborate_shows_both_layers() {
    let o = cfc(&["--json", "elaborate", &corpus("loopy.cfc")]);
    let v = json(&o);
    envelope(&v, "elaborate", 0);
    let surface: Vec<&str> = v["surface"].as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect();
    assert!(surface.contains(&"instance Loopy => Loopy where type Loop = List Loop"), "{surface:?}");
    assert!(v["core"].as_array().unwrap().iter().any(|d| d.as_str().unwrap().starts_with("family Loop : 0")));
}

#[test]
fn json_diagnostics_carry_codes_and_spans() {
    let o = cfc(&["--json", "check", &corpus("total_bad.cfc")]);
    let v = json(&o);
    envelope(&v, "check", 1);
    let d = &v["diagnostics"][0];
    assert_eq!(d["code"], "NotTotal");
    assert!(d["line"].is_u64() && d["column"].is_u64());
}

#[test]
fn fuzz_runs_a_suite_deterministically() {
    let args = ["--json", "fuzz", "--suite", "strategy", "--seed", "3", "--cases", "50", "--worlds", "2"];
    let a = json(&cfc(&args));
    let b = json(&cfc(&args));
    envelope(&a, "fuzz", 0);
    assert_eq!(a, b);
    assert_eq!(a["reports"][0]["suite"], "strategy");
    assert_eq!(a["reports"][0]["cases"], 50);
}

#[test]
fn unknown_suites_are_usage_errors() {
    let o = cfc(&["fuzz", "--suite", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn no_ansi_when_color_is_off() {
    let o = cfc(&["check", &corpus("loop_bad.cfc")]);
    assert!(!stderr(&o).contains('\x1b'));
}
