use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jetcomplex")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON report")
}

#[test]
fn analyze_cauchy_fueter() {
    let o = run(&["analyze", "cauchy-fueter", "--samples", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("not involutive (40 < 42)"), "{text}");
    assert!(text.contains("q=2   dim=100"), "{text}");
}

#[test]
fn analyze_file_alias_json() {
    let o = run(&["analyze", &data("cauchy_fueter.json"), "--samples", "3", "--seed", "9", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["metadata"]["seed"], 9);
    let inv = v["sections"].as_array().unwrap().iter().find(|s| s["kind"] == "involution").unwrap();
    assert_eq!(inv["seed"], 9);
    assert_eq!(inv["verdict"], "not_involutive");
    assert_eq!(inv["samples"].as_array().unwrap().len(), 3);
}

#[test]
fn reports_are_deterministic() {
    let args = ["analyze", "wfamily:3,3,[(3,3),(2,2)]", "--samples", "4", "--seed", "5", "--json"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn gradient_complex_is_grad_curl_div() {
    let o = run(&["complex", &data("gradient.json"), "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    let sec = &v["sections"][0];
    assert_eq!(sec["sizes"], serde_json::json!([1, 3, 3, 1]));
    assert_eq!(sec["orders"], serde_json::json!([1, 1, 1]));
    assert_eq!(sec["end"], "terminated");
}

#[test]
fn complex_cauchy_fueter_rows_and_cutoff() {
    let o = run(&["complex", "cauchy-fueter", "--max-degree", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("2 -> 4 -> 4 -> 2"), "{text}");
    assert!(text.contains("phi0_{z00}"), "{text}");
    let cut = run(&["complex", "cauchy-fueter", "--max-degree", "1"]);
    assert_eq!(cut.status.code(), Some(0));
    assert!(stdout(&cut).contains("cutoff reached"));
    assert_eq!(run(&["complex", "cauchy-fueter", "--max-degree", "1", "--strict"]).status.code(), Some(3));
    assert_eq!(run(&["complex", "cauchy-fueter", "--max-length", "10"]).status.code(), Some(2));
}

#[test]
fn hilbert_series_examples() {
    let o = run(&["hp", "cauchy-fueter", "--terms", "14"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("(12 - 20z + 20z^2 - 10z^3 + 2z^4) / (1-z)^5"), "{}", stdout(&o));
    let ode = run(&["hp", &data("single_ode.json")]);
    assert_eq!(ode.status.code(), Some(0));
    assert!(stdout(&ode).contains("series: (0) / 1"), "{}", stdout(&ode));
    let w = run(&["hp", "wfamily:3,3,[(3,3),(2,2)]", "--json"]);
    let v = json(&w);
    assert_eq!(v["status"], "pass");
    assert!(v["sections"][0]["verified_terms"].as_u64().unwrap() >= 12);
    // four terms allow only recurrences of order 1: the fit fails and says so
    let short = run(&["hp", "cauchy-fueter", "--terms", "4"]);
    assert_eq!(short.status.code(), Some(1));
    assert!(stdout(&short).contains("no rational fit within bound"), "{}", stdout(&short));
}

#[test]
fn verify_cf() {
    let o = run(&["verify-cf", "--kmax", "1", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["sections"][0]["rows"][0]["ranks"], serde_json::json!([450, 30, 2]));
    assert_eq!(v["sections"][0]["rows"][1]["ranks"][2], 16);
    assert_eq!(v["sections"][1]["values"], serde_json::json!([0, 0, 0, 0, 0, 0, 0, 0]));
    let forced = run(&["verify-cf", "--kmax", "1", "--modular-threshold", "1", "--prime-trials", "3"]);
    assert_eq!(forced.status.code(), Some(0));
    assert!(stdout(&forced).contains("mod-p, 3 primes"), "{}", stdout(&forced));
    let rejected = run(&["verify-cf", "--kmax", "9"]);
    assert_eq!(rejected.status.code(), Some(2));
    assert!(stderr(&rejected).contains("exceeds 7"));
}

#[test]
fn wfamily_command() {
    let o = run(&["wfamily", "--n", "4", "--m", "4", "--pairs", "(1,1);(2,2);(3,3)", "--max-degree", "2", "--samples", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("torsion conditions (1)"), "{text}");
    assert!(text.contains("closed form="), "{text}");
    let dup = run(&["wfamily", "--n", "3", "--m", "3", "--pairs", "(1,2);(2,2)"]);
    assert_eq!(dup.status.code(), Some(2));
    assert!(stderr(&dup).contains("share j=2"));
}

#[test]
fn input_errors_exit_2_with_position() {
    let o = run(&["analyze", &data("bad_coefficient.json")]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("equation 2, term 2") && err.contains("line 9"), "{err}");
    let e = run(&["analyze", &data("empty_equation.json")]);
    assert_eq!(e.status.code(), Some(2));
    assert!(stderr(&e).contains("no terms"));
    assert_eq!(run(&["analyze", "no-such-file.json"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "wfamily:2,2,[(3,1)]"]).status.code(), Some(2));
}

#[test]
fn print_round_trips_rationals() {
    let o = run(&["print", &data("rational_pair.json")]);
    assert_eq!(o.status.code(), Some(0));
    let printed = stdout(&o);
    assert!(printed.contains("\"-3/4\""), "{printed}");
    let again = run(&["print", printed.trim()]);
    assert_eq!(stdout(&again), printed);
}
