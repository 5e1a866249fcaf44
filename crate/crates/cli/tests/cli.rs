use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const HEADER: &str = "function,dimension,algorithm,trial,status,fe_used,ev_final";

const CONFIG: &str = r#"
[[function]]
id = "f1"
dimension = 10
ev_min = 1e-8
fe_max = 1000

[[function]]
id = "f2"
dimension = 20
ev_min = 1e-8
fe_max = 2000
"#;

fn uscore(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uscore")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "failed: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    assert!(!o.status.success(), "expected failure, got {}", String::from_utf8_lossy(&o.stdout));
    String::from_utf8(o.stderr.clone()).unwrap()
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new(rows: &[String]) -> Self {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("config.toml"), CONFIG).unwrap();
        let mut body = String::from(HEADER);
        for r in rows {
            body.push('\n');
            body.push_str(r);
        }
        body.push('\n');
        std::fs::write(dir.path().join("trials.csv"), body).unwrap();
        Fixture { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn args<'a>(&'a self, cmd: &'a str, input: &'a Path, config: &'a Path) -> Vec<&'a str> {
        vec![cmd, "--input", input.to_str().unwrap(), "--config", config.to_str().unwrap()]
    }

    fn run(&self, cmd: &str, extra: &[&str]) -> Output {
        let (input, config) = (self.path("trials.csv"), self.path("config.toml"));
        let mut args = self.args(cmd, &input, &config);
        args.extend_from_slice(extra);
        uscore(&args)
    }
}

/// (function, dimension, fe_max, algorithm, trial, success, fe, ev)
type Spec = (&'static str, u32, u64, &'static str, u32, bool, u64, f64);

/// 2 functions × 3 algorithms × 5 trials with exact ties and mixed outcomes.
fn well_formed() -> Vec<Spec> {
    let mut v = Vec::new();
    let algs = ["A", "B", "C"];
    for (f, d, fe_max) in [("f1", 10, 1000u64), ("f2", 20, 2000)] {
        for (j, a) in algs.iter().enumerate() {
            for t in 1..=5u32 {
                let k = (j as u64 * 7 + t as u64 * 3) % 6;
                if k < 4 {
                    v.push((f, d, fe_max, *a, t, true, 100 * (k + 1) + (d as u64 % 3), 0.0));
                } else {
                    v.push((f, d, fe_max, *a, t, false, fe_max, (k as f64) * 0.5 + j as f64));
                }
            }
        }
    }
    v
}

fn to_rows(specs: &[Spec]) -> Vec<String> {
    specs
        .iter()
        .map(|(f, d, _, a, t, ok, fe, ev)| {
            let status = if *ok { "success" } else { "exhausted" };
            format!("{f},{d},{a},{t},{status},{fe},{ev}")
        })
        .collect()
}

/// Wins per algorithm summed over functions, by direct pair comparison.
fn hand_totals(specs: &[Spec]) -> Vec<(String, f64)> {
    let key = |s: &Spec| if s.5 { (0, s.6 as f64) } else { (1, s.7) };
    let mut out: Vec<(String, f64)> = Vec::new();
    for a in ["A", "B", "C"] {
        let mut wins = 0.0;
        for x in specs.iter().filter(|s| s.3 == a) {
            for y in specs.iter().filter(|s| s.3 != a && s.0 == x.0 && s.1 == x.1) {
                let (kx, ky) = (key(x), key(y));
                wins += if kx < ky { 1.0 } else if kx == ky { 0.5 } else { 0.0 };
            }
        }
        out.push((a.to_string(), wins));
    }
    out
}

#[test]
fn scores_two_functions_against_hand_counts() {
    let specs = well_formed();
    let fx = Fixture::new(&to_rows(&specs));
    let json: Value = serde_json::from_str(&stdout(&fx.run("score", &["--format", "json"]))).unwrap();
    let functions = json["functions"].as_array().unwrap();
    assert_eq!(functions.len(), 2);
    for f in functions {
        assert_eq!(f["scores"]["algorithms"].as_array().unwrap().len(), 3);
        assert_eq!(f["scores"]["n"], 5);
    }
    assert_eq!(json["groups"], serde_json::json!(["10-D", "20-D"]));
    let algs = json["algorithms"].as_array().unwrap();
    let totals = json["totals"].as_array().unwrap();
    for (alg, expected) in hand_totals(&specs) {
        let j = algs.iter().position(|a| a == alg.as_str()).unwrap();
        assert_eq!(totals[j].as_f64().unwrap(), expected, "{alg}");
    }
    let sum: f64 = totals.iter().map(|t| t.as_f64().unwrap()).sum();
    assert_eq!(sum, 2.0 * 25.0 * 3.0);
}

#[test]
fn rejects_success_above_target_with_row_number() {
    let mut rows = to_rows(&well_formed());
    rows[1] = "f1,10,A,2,success,300,0.5".into();
    let err = stderr(&Fixture::new(&rows).run("score", &[]));
    assert!(err.starts_with("error[invalid-trial]"), "{err}");
    // header is row 1
    assert!(err.contains("row 3"), "{err}");
}

#[test]
fn missing_trial_is_inconsistent_n() {
    let mut rows = to_rows(&well_formed());
    rows.remove(7);
    let err = stderr(&Fixture::new(&rows).run("score", &[]));
    assert!(err.starts_with("error[inconsistent-n]"), "{err}");
}

#[test]
fn unknown_function_and_bad_header_have_distinct_classes() {
    let mut rows = to_rows(&well_formed());
    rows.push("f9,10,A,1,success,10,0".into());
    let err = stderr(&Fixture::new(&rows).run("score", &[]));
    assert!(err.starts_with("error[unknown-function]"), "{err}");

    let fx = Fixture::new(&[]);
    std::fs::write(fx.path("trials.csv"), "function,dim,algorithm\nf1,10,A\n").unwrap();
    let err = stderr(&fx.run("score", &[]));
    assert!(err.starts_with("error[schema]"), "{err}");
}

#[test]
fn output_is_byte_identical_across_runs() {
    let fx = Fixture::new(&to_rows(&well_formed()));
    for fmt in ["text", "csv", "json"] {
        let a = fx.run("score", &["--format", fmt]);
        let b = fx.run("score", &["--format", fmt]);
        assert_eq!(stdout(&a), stdout(&b), "{fmt}");
    }
    let out = fx.path("report.txt");
    let first = stdout(&fx.run("pairwise", &[]));
    stdout(&fx.run("pairwise", &["--out", out.to_str().unwrap()]));
    assert_eq!(std::fs::read_to_string(out).unwrap(), first);
}

#[test]
fn json_input_matches_csv_input() {
    let specs = well_formed();
    let fx = Fixture::new(&to_rows(&specs));
    let records: Vec<Value> = specs
        .iter()
        .map(|(f, d, _, a, t, ok, fe, ev)| {
            serde_json::json!({
                "function": f, "dimension": d, "algorithm": a, "trial": t,
                "status": if *ok { "success" } else { "exhausted" }, "fe_used": fe, "ev_final": ev,
            })
        })
        .collect();
    let json_path = fx.path("trials.json");
    std::fs::write(&json_path, serde_json::to_string(&records).unwrap()).unwrap();
    let config = fx.path("config.toml");
    let from_json = uscore(&["score", "--input", json_path.to_str().unwrap(), "--config", config.to_str().unwrap()]);
    assert_eq!(stdout(&from_json), stdout(&fx.run("score", &[])));
}

fn subtotals_file(dir: &TempDir) -> PathBuf {
    let path = dir.path().join("subtotals.csv");
    let body = "algorithm,10-D,20-D
EA4,92239,94139.5
NL-LBC,95230.5,86685
NL-MID,80283,75188.5
S-DP,65823.5,78219.5
jSObin,65348,77421
MTT,71860.5,69258.5
IUMO,77085.5,62444
IMPML,57460,65457
NLSOMA,53927,59696.5
ZOCMAES,50027,57687
OMCSO,48571.5,51877
Co-PPSO,38092.5,34195.5
SPHH,40337,14738
";
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn competition_subtotals_text_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = subtotals_file(&dir);
    let text = stdout(&uscore(&["score", "--subtotals", path.to_str().unwrap()]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "Rank  Algorithm  10-D     20-D     Total");
    assert_eq!(lines[1], "1     EA4        92239    94139.5  186378.5");
    assert_eq!(lines[13], "13    SPHH       40337    14738    55075");
    assert_eq!(lines.len(), 14);
}

#[test]
fn weight_sweep_reports_three_crossovers() {
    let dir = tempfile::tempdir().unwrap();
    let path = subtotals_file(&dir);
    let csv = stdout(&uscore(&["weights", "--subtotals", path.to_str().unwrap(), "--format", "csv"]));
    assert_eq!(
        csv,
        "weight,first,second\n4.7705,NL-MID,S-DP\n6.5136,IUMO,IMPML\n6.6898,NL-MID,jSObin\n"
    );
    let weighted = stdout(&uscore(&["score", "--subtotals", path.to_str().unwrap(), "--weight", "20-D=7"]));
    assert!(weighted.contains("weights: 20-D=7"), "{weighted}");
    let order: Vec<&str> = weighted.lines().skip(1).take(5).map(|l| l.split_whitespace().nth(1).unwrap()).collect();
    assert_eq!(order, ["EA4", "NL-LBC", "S-DP", "jSObin", "NL-MID"]);
}

#[test]
fn sig_pairwise_difficulty_and_ties() {
    let fx = Fixture::new(&to_rows(&well_formed()));
    let sig: Value =
        serde_json::from_str(&stdout(&fx.run("sig", &["--a", "A", "--b", "B", "--format", "json"]))).unwrap();
    assert_eq!(sig.as_array().unwrap().len(), 2);
    let r = &sig[0]["result"];
    assert_eq!(r["u_a"].as_f64().unwrap() + r["u_b"].as_f64().unwrap(), 25.0);

    let one = stdout(&fx.run("pairwise", &["--function", "f2", "--format", "csv"]));
    assert_eq!(one.lines().count(), 4);
    assert!(one.starts_with("function,dimension,algorithm,vs A,vs B,vs C,U\n"));

    let diff = stdout(&fx.run("difficulty", &["--format", "csv"]));
    assert_eq!(diff.lines().next(), Some("rank,function,dimension,score"));

    let ties: Value = serde_json::from_str(&stdout(&uscore(&["ties", "--m", "2", "--n", "5", "--format", "json"]))).unwrap();
    assert_eq!(ties["tie_free"], true);
    let rec = stdout(&uscore(&["ties", "--m", "10", "--n-min", "1", "--n-max", "10", "--format", "csv"]));
    let ns: Vec<&str> = rec.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ns, ["1", "3", "5", "9"]);

    let err = stderr(&fx.run("sig", &["--a", "A", "--b", "Z"]));
    assert!(err.starts_with("error[invalid-input]"), "{err}");
}

#[test]
fn legacy_reports_ecdf_only_with_histories() {
    let fx = Fixture::new(&to_rows(&well_formed()));
    let text = stdout(&fx.run("legacy", &[]));
    assert!(text.contains("ECDF unavailable"), "{text}");
    assert!(text.lines().next().unwrap().contains("ERT"));

    let hist = fx.path("hist.csv");
    std::fs::write(&hist, "function,dimension,algorithm,trial,fe,ev\nf1,10,A,1,10,5.0\nf1,10,A,1,50,0.5\nf1,10,A,2,10,2.0\n")
        .unwrap();
    let with = stdout(&fx.run(
        "legacy",
        &["--history", hist.to_str().unwrap(), "--targets", "1,0.1", "--budgets", "10,50", "--format", "json"],
    ));
    let v: Value = serde_json::from_str(&with).unwrap();
    let a = v["metrics"].as_array().unwrap().iter().find(|m| m["algorithm"] == "A" && m["function"] == "f1").unwrap();
    // (trial, target) pairs: trial 1 reaches 1 at fe 50, trial 2 never
    assert_eq!(a["ecdf"]["points"], serde_json::json!([[10, 0.0], [50, 0.25]]));
    assert!(v.get("ecdf_note").is_none());
}

#[test]
fn simulate_is_seeded_csv() {
    let args = ["simulate", "--n", "11", "--runs", "500", "--seed", "3", "--s", "0:0.5:0.25"];
    let a = stdout(&uscore(&args));
    assert_eq!(a, stdout(&uscore(&args)));
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines[0], "s,miss_uscore,miss_dominance,tie_rate,runs,n,seed");
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("0.50,") && lines[3].ends_with(",500,11,3"));
    let other = stdout(&uscore(&["simulate", "--n", "11", "--runs", "500", "--seed", "4", "--s", "0:0.5:0.25"]));
    assert_ne!(a, other);
}

#[test]
fn usage_errors_exit_nonzero() {
    assert!(!uscore(&["score"]).status.success());
    assert!(!uscore(&["score", "--subtotals", "x.csv", "--format", "yaml"]).status.success());
    let err = stderr(&uscore(&["score", "--subtotals", "/nonexistent/x.csv"]));
    assert!(err.starts_with("error[io]: /nonexistent/x.csv"), "{err}");
}
