use std::process::Command;

use serde_json::Value;
use twisted_eulerian::algebra::{CyclotomicNumber, Rational};
use twisted_eulerian::characters::{enumerate_characters, DirichletCharacter};
use twisted_eulerian::twisted::{twisted_a_values, TwistedConfig};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cli(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_twisted-eulerian"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json(run: &Run) -> Value {
    serde_json::from_str(&run.stdout).unwrap_or_else(|e| panic!("{e}: {}", run.stdout))
}

#[test]
fn classic_output_is_exact() {
    let run = cli(&["classic", "--n", "3"]);
    assert_eq!(run.code, 0);
    assert_eq!(run.stdout.trim_end(), r#"{"n":3,"coeffs":["1/1","4/1","1/1"]}"#);
    let run = cli(&["classic", "--n", "6", "--check-oracle"]);
    assert_eq!(json(&run)["oracle_match"], Value::Bool(true));
}

#[test]
fn chars_lists_phi_of_d() {
    let run = cli(&["chars", "--d", "3"]);
    assert_eq!(run.code, 0);
    let doc = json(&run);
    assert_eq!(doc["count"], 2);
    assert_eq!(doc["characters"].as_array().unwrap().len(), 2);
    assert_eq!(json(&cli(&["chars", "--d", "15"]))["count"], 8);
    assert_eq!(cli(&["chars", "--d", "4"]).code, 3);
}

#[test]
fn twisted_values_round_trip() {
    let args = ["twisted", "--q", "5/2", "--d", "5", "--char", "index:1", "--zeta-order", "3", "--zeta-k", "2", "--n", "0-3"];
    let run = cli(&args);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let doc = json(&run);
    let chi = enumerate_characters(5).unwrap().remove(1);
    let cfg = TwistedConfig::new(chi, 3, 2, Rational::frac(5, 2)).unwrap();
    let expected = twisted_a_values(&cfg, 3).unwrap();
    for (entry, value) in doc["values"].as_array().unwrap().iter().zip(&expected) {
        let parsed: CyclotomicNumber = serde_json::from_value(entry["cyclotomic"].clone()).unwrap();
        assert_eq!(&parsed, value);
        let z = value.embed(1).unwrap();
        let re = entry["complex"][0].as_f64().unwrap();
        assert!((re - z.re).abs() <= 1e-12 * (1.0 + z.re.abs()));
    }
    assert_eq!(cli(&args).stdout, run.stdout);
}

#[test]
fn twisted_anchor_and_csv() {
    let doc = json(&cli(&["twisted", "--q", "2", "--d", "3", "--char", "quadratic", "--n", "0,1,2"]));
    let values: Vec<&str> = doc["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["cyclotomic"]["coeffs"][0].as_str().unwrap())
        .collect();
    assert_eq!(values, ["-4/1", "12/1", "-12/1"]);
    let run = cli(&["twisted", "--q", "2", "--d", "3", "--char", "quadratic", "--n", "1", "--format", "csv"]);
    let mut lines = run.stdout.lines();
    assert_eq!(lines.next(), Some("n,field_order,coeffs,re,im"));
    assert!(lines.next().unwrap().starts_with("1,2,12/1,"));
}

#[test]
fn character_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chi.json");
    let chi = DirichletCharacter::quadratic(5).unwrap();
    std::fs::write(&path, serde_json::to_string(&chi.to_file()).unwrap()).unwrap();
    let spec = format!("file:{}", path.display());
    let from_file = cli(&["twisted", "--q", "3", "--d", "5", "--char", &spec, "--n", "2"]);
    let builtin = cli(&["twisted", "--q", "3", "--d", "5", "--char", "quadratic", "--n", "2"]);
    assert_eq!(from_file.code, 0, "{}", from_file.stderr);
    assert_eq!(from_file.stdout, builtin.stdout);
    assert_eq!(cli(&["twisted", "--q", "3", "--d", "3", "--char", &spec, "--n", "2"]).code, 2);
    std::fs::write(&path, r#"{"modulus":5,"order":2,"values":{"0":null,"1":0,"2":0,"3":1,"4":1}}"#).unwrap();
    let bad = cli(&["twisted", "--q", "3", "--d", "5", "--char", &spec, "--n", "2"]);
    assert_eq!(bad.code, 3);
    assert!(bad.stderr.contains("InvalidCharacter"), "{}", bad.stderr);
}

#[test]
fn integral_reports() {
    let run = cli(&["integral", "--n", "1", "--q", "4", "--p", "3", "--levels", "3", "--format", "csv"]);
    assert_eq!(run.code, 0);
    let lines: Vec<&str> = run.stdout.lines().collect();
    assert_eq!(lines[0], "N,S_N,valuation");
    assert_eq!(lines[2], "1,-2/13,1");
    let doc = json(&cli(&["integral", "--n", "2", "--q", "6", "--p", "5", "--levels", "2", "--d", "3", "--char", "quadratic"]));
    assert_eq!(doc["converges"], Value::Bool(true));
    let zero = json(&cli(&["integral", "--n", "0", "--q", "4", "--p", "3", "--levels", "2"]));
    assert_eq!(zero["levels"][0]["S_N"], "1/1");
    assert_eq!(zero["levels"][2]["valuation"], "inf");
    let bad = cli(&["integral", "--n", "1", "--q", "2", "--p", "3", "--levels", "2"]);
    assert_eq!(bad.code, 3);
    assert!(bad.stderr.contains("NotPadicallyConvergent"));
}

#[test]
fn lfun_anchor() {
    let doc = json(&cli(&["lfun", "--q", "2", "--d", "3", "--char", "quadratic", "--s", "-2"]));
    assert!((doc["value"][0].as_f64().unwrap() + 12.0).abs() < 1e-9);
    assert!(doc["tail_bound"].as_f64().unwrap() < 1e-12);
    let complex = json(&cli(&["lfun", "--q", "3", "--d", "5", "--char", "quadratic", "--s", "0.5,-1.25"]));
    assert_eq!(complex["s"][1].as_f64().unwrap(), -1.25);
    assert_eq!(cli(&["lfun", "--q", "1", "--d", "3", "--char", "quadratic", "--s", "0"]).code, 3);
    let stalled = cli(&["lfun", "--q", "2", "--d", "3", "--char", "quadratic", "--s", "-4", "--max-terms", "3"]);
    assert_eq!(stalled.code, 3);
    assert!(stalled.stderr.contains("NotConverged"));
}

#[test]
fn check_relations_and_grids() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, r#"{"n":[]}"#).unwrap();
    let spec = format!("file:{}", empty.display());
    let run = cli(&["check", "--relation", "eq15", "--grid", &spec]);
    assert_eq!(run.code, 0);
    assert_eq!(json(&run)["summary"]["points"], 0);

    let singular = dir.path().join("singular.json");
    std::fs::write(&singular, r#"{"n":[1],"q":["-1"]}"#).unwrap();
    let run = cli(&["check", "--relation", "eq15", "--grid", &format!("file:{}", singular.display())]);
    assert_eq!(run.code, 1);
    assert_eq!(json(&run)["points"][0]["verdict"], "fail");

    let run = cli(&["check", "--relation", "cor3"]);
    assert_eq!(run.code, 0);
    assert_eq!(json(&run)["summary"]["failed"], 0);
    let run = cli(&["check", "--relation", "thm1-residual"]);
    for point in json(&run)["points"].as_array().unwrap() {
        let q: Rational = point["key"].as_str().unwrap().split("q=").nth(1).unwrap().split(' ').next().unwrap().parse().unwrap();
        assert_eq!(point["residual"].as_str().unwrap(), q.powu(2).to_string());
    }
}

#[test]
fn usage_errors_and_output_file() {
    assert_eq!(cli(&["check", "--relation", "thm9"]).code, 2);
    assert_eq!(cli(&["check", "--relation", "eq15", "--grid", "nowhere"]).code, 2);
    assert_eq!(cli(&["twisted", "--q", "2", "--d", "3", "--char", "quadratic", "--n", "2-1"]).code, 2);
    assert_eq!(cli(&["twisted", "--q", "2/0", "--d", "3", "--char", "quadratic", "--n", "1"]).code, 2);
    assert_eq!(cli(&["twisted", "--q", "2", "--d", "3", "--char", "quadratic", "--zeta-order", "9", "--zeta-k", "3", "--n", "1"]).code, 2);
    assert_eq!(cli(&["twisted", "--q", "2", "--d", "3", "--char", "index:7", "--n", "1"]).code, 2);
    assert_eq!(cli(&["twisted", "--q", "2", "--d", "3", "--char", "cubic", "--n", "1"]).code, 2);
    assert_eq!(cli(&["--help"]).code, 0);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let run = cli(&["--output", path.to_str().unwrap(), "classic", "--n", "4"]);
    assert_eq!(run.code, 0);
    assert!(run.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), cli(&["classic", "--n", "4"]).stdout);
}
