//! One line per acceptance criterion, each run through the binary with
//! `--json`. Criteria known to fail print FAIL with their numbers and are
//! checked against `EXPECTED` rather than asserted to pass.

use std::process::Command;
use std::time::{Duration, Instant};

use serde_json::Value;

const EXPECTED: [(u32, bool); 11] = [
    (1, true),
    (2, true),
    (3, true),
    // Exact expansion blows up on a quarter of the sequences; see the ledger.
    (4, false),
    (5, true),
    (6, true),
    (7, true),
    (8, true),
    // Flips next to a self-folded loop do not follow matrix mutation.
    (9, false),
    (10, true),
    (11, true),
];

struct Run {
    code: i32,
    report: Value,
    elapsed: Duration,
}

fn run(args: &[&str]) -> Run {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_orbiteich"))
        .args(args)
        .arg("--json")
        .output()
        .expect("binary runs");
    let elapsed = start.elapsed();
    let code = out.status.code().expect("exit code");
    assert!(
        code == 0 || code == 1,
        "{args:?} exited {code}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = serde_json::from_slice(&out.stdout).expect("json report");
    Run { code, report, elapsed }
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

fn cycle(kind: &str, limit: f64) -> (bool, String) {
    let r = run(&["rank2-cycles", "--type", kind]);
    let c = &r.report[0];
    let matched = c["steps"].as_array().unwrap().iter().filter(|s| s["matches"] == true).count();
    let secs = r.elapsed.as_secs_f64();
    let pass = r.code == 0 && secs < limit;
    (pass, format!("period {}, {matched} printed intermediates matched, {secs:.2} s (limit {limit} s)", c["period"]))
}

fn criterion(n: u32) -> (&'static str, bool, String) {
    match n {
        1 => {
            let (p, d) = cycle("B2", 1.0);
            ("B2 golden cycle", p, d)
        }
        2 => {
            let (p, d) = cycle("G2", 5.0);
            ("G2 golden cycle", p, d)
        }
        3 => {
            let (p, d) = cycle("A2", 1.0);
            ("A2 golden cycle", p, d)
        }
        4 => {
            let r = run(&["check-laurent"]);
            let j = &r.report;
            let secs = r.elapsed.as_secs_f64();
            let pass = r.code == 0 && secs < 60.0;
            let detail = format!(
                "{} sequences, {} inexact divisions, {} truncated at exponent budget {}, {secs:.1} s",
                j["sequences"], j["inexact_divisions"], j["truncated"], j["budget"]
            );
            ("Laurent sweep", pass, detail)
        }
        5 => {
            let r = run(&["check-positivity"]);
            let rows = r.report.as_array().unwrap();
            let counter: usize = rows.iter().map(|x| x["counterexamples"].as_array().unwrap().len()).sum();
            let cone = rows.iter().all(|x| x["all_integer_cone"] == true);
            let detail = format!("{} seeds, {counter} negative coefficients, integer cone {cone}", rows.len());
            ("positivity search", r.code == 0, detail)
        }
        6 => {
            let r = run(&["cc-prime"]);
            let worst = r.report.as_array().unwrap().iter().map(|x| f(&x["max_residual"])).fold(0.0, f64::max);
            ("cc' lambda-length relation", r.code == 0, format!("max relative residual {worst:.2e}"))
        }
        7 => {
            let r = run(&["verify-identities"]);
            let rows = r.report.as_array().unwrap();
            let worst = rows.iter().map(|x| f(&x["max_residual"])).fold(0.0, f64::max);
            let exact = rows.iter().all(|x| x["fp_power_exact"] == true);
            ("p-gon identities", r.code == 0, format!("max residual {worst:.2e}, F_p^p exact {exact}"))
        }
        8 => {
            let r = run(&["invariance"]);
            let spines = r.report.as_array().unwrap();
            let mut moves = 0;
            let mut words = 0;
            let mut worst = 0.0f64;
            let mut via = 0.0f64;
            for s in spines {
                for m in s["moves"].as_array().unwrap() {
                    moves += 1;
                    for w in m["words"].as_array().unwrap() {
                        words += 1;
                        worst = worst.max(f(&w["max_rel_err"]));
                    }
                }
                for v in s["via_hole"].as_array().unwrap() {
                    via = via.max(f(&v["max_diff"]));
                }
            }
            let detail = format!(
                "{} spines, {moves} moves, {words} word checks, max relative error {worst:.2e}, via hole {via:.2e}",
                spines.len()
            );
            ("move invariance", r.code == 0, detail)
        }
        9 => {
            let r = run(&["poisson", "--samples", "10"]);
            let rows = r.report.as_array().unwrap();
            let center = rows.iter().all(|x| x["center_pass"] == true);
            let bracket = rows.iter().all(|x| x["bracket_pass"] == true);
            let regular = rows.iter().all(|x| x["mutation_pass_regular"] == true);
            let flips: Vec<&Value> = rows.iter().flat_map(|x| x["flips"].as_array().unwrap()).collect();
            let off = flips.iter().filter(|x| x["matrix_mutation"] == false).count();
            let folded = flips.iter().filter(|x| x["matrix_mutation"] == false && x["self_folded"] == true).count();
            let detail = format!(
                "center and boundary vectors {center}; {off} of {} flips break matrix mutation, {folded} of them \
                 self-folded; mutation elsewhere {regular}; bracket preserved {bracket}",
                flips.len()
            );
            ("Poisson structure", r.code == 0, detail)
        }
        10 => {
            let r = run(&["poisson", "--counts"]);
            let rows = r.report.as_array().unwrap();
            let tree = rows.iter().find(|x| x["name"] == "treegraph").unwrap();
            let detail = format!("{} library spines, treegraph E = {}", rows.len(), tree["edges"]);
            ("structural counts", r.code == 0, detail)
        }
        11 => {
            let r = run(&["geodesic", "--samples", "1000"]);
            let j = &r.report;
            let detail = format!(
                "{} words, min trace {:.6}, {} findings",
                j["words"],
                f(&j["min_trace"]),
                j["findings"].as_array().unwrap().len()
            );
            ("hyperbolicity sampling", r.code == 0, detail)
        }
        _ => unreachable!(),
    }
}

#[test]
fn acceptance() {
    let mut mismatched = Vec::new();
    for (n, expected) in EXPECTED {
        let (name, pass, detail) = criterion(n);
        let status = if pass { "PASS" } else { "FAIL" };
        let note = if pass == expected { "" } else { " (UNEXPECTED)" };
        println!("criterion {n:>2} {name}: {status}{note}: {detail}");
        if pass != expected {
            mismatched.push(n);
        }
    }
    assert!(mismatched.is_empty(), "criteria {mismatched:?} changed status");
}
