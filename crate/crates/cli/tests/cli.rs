use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn orbiteich(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbiteich")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn empty_mutation_reproduces_the_seed() {
    for seed in ["seed-a2.json", "seed-b2.json", "seed-g2.json"] {
        let path = data(seed);
        let o = orbiteich(&["mutate", "--input", path.to_str().unwrap()]);
        assert!(o.status.success());
        assert_eq!(stdout(&o), std::fs::read_to_string(&path).unwrap());
    }
}

#[test]
fn mutating_twice_in_one_direction_is_the_identity() {
    let path = data("seed-b2.json");
    let once = orbiteich(&["mutate", "--input", path.to_str().unwrap(), "--dirs", "0"]);
    let text = stdout(&once);
    assert!(text.contains("\"cluster\""));
    let tmp = std::env::temp_dir().join(format!("orbiteich-b2-{}.json", std::process::id()));
    std::fs::write(&tmp, &text).unwrap();
    let back = orbiteich(&["mutate", "--input", tmp.to_str().unwrap(), "--dirs", "0"]);
    std::fs::remove_file(&tmp).unwrap();
    assert_eq!(stdout(&back), std::fs::read_to_string(&path).unwrap());
}

#[test]
fn move_script_on_a_spine() {
    let tmp = std::env::temp_dir().join(format!("orbiteich-moves-{}.json", std::process::id()));
    std::fs::write(&tmp, r#"[{"kind": "pending-flip", "target": 1}, {"kind": "pending-flip", "target": 1}]"#).unwrap();
    let spine = data("treegraph.json");
    let o = orbiteich(&["mutate", "--input", spine.to_str().unwrap(), "--moves", tmp.to_str().unwrap(), "--json"]);
    let inv = orbiteich(&["invariance", "--input", spine.to_str().unwrap(), "--moves", tmp.to_str().unwrap()]);
    std::fs::remove_file(&tmp).unwrap();
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["moves"].as_array().unwrap().len(), 2);
    // Flipping twice returns the shears.
    let z0: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&spine).unwrap()).unwrap();
    for (a, b) in z0["edges"].as_array().unwrap().iter().zip(v["spine"]["edges"].as_array().unwrap()) {
        assert!((a["Z"].as_f64().unwrap() - b["Z"].as_f64().unwrap()).abs() < 1e-12);
    }
    assert!(inv.status.success(), "{}", stdout(&inv));
}

#[test]
fn same_seed_same_report() {
    for args in [&["geodesic", "--samples", "50", "--json"][..], &["poisson", "--samples", "3", "--json"]] {
        let a = orbiteich(&[args, &["--seed", "7"]].concat());
        let b = orbiteich(&[args, &["--seed", "7"]].concat());
        assert_eq!(a.stdout, b.stdout);
        let c = orbiteich(&[args, &["--seed", "8"]].concat());
        assert_ne!(a.stdout, c.stdout);
    }
}

#[test]
fn evaluates_a_word() {
    let o = orbiteich(&["geodesic", "--spine", "theta", "--word", "1 R 2 R", "--symbolic", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v[0]["value"]["trace"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn finite_types() {
    for (t, n) in [("A2", 5), ("B2", 6), ("G2", 8)] {
        let o = orbiteich(&["finite-type", "--type", t, "--json"]);
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["finite"], true);
        assert_eq!(v["variable_count"], n);
    }
}

#[test]
fn bad_input_exits_2() {
    assert_eq!(orbiteich(&["geodesic", "--spine", "klein-bottle", "--word", "1"]).status.code(), Some(2));
    assert_eq!(orbiteich(&["mutate", "--input", "/nonexistent"]).status.code(), Some(2));
    let seed = data("seed-a2.json");
    assert_eq!(orbiteich(&["mutate", "--input", seed.to_str().unwrap(), "--dirs", "5"]).status.code(), Some(2));
}
