use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quadtwist"))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

#[test]
fn disparity_reproduces_the_sextic_fractions() {
    let path = data("kappa_sextic.json");
    let out = run(&["disparity", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["fraction_even"], "19/32");
    assert_eq!(v["fraction_odd"], "13/32");
    assert_eq!(v["product"], "-3/16");
    assert_eq!(v["brute_force_agrees"], true);

    let skipped = run(&["--no-oracle", "disparity", "--input", path.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_slice(&skipped.stdout).unwrap();
    assert!(v["brute_force_fraction_even"].is_null());

    let capped = run(&["--cap", "100", "disparity", "--input", path.to_str().unwrap()]);
    assert_eq!(capped.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&capped.stdout).unwrap();
    assert!(v["brute_force_agrees"].is_null());
}

#[test]
fn trivial_ledger_gives_parity() {
    let path = data("delta_one.json");
    let out = run(&["disparity", "--input", path.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("row,label,kind,characters,value\n"));
    assert!(text.contains("fraction_even,,,,1/1\n"));
    assert!(!text.contains('\r'));
}

#[test]
fn schema_errors_exit_two_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    let text = std::fs::read_to_string(data("kappa_sextic.json")).unwrap().replacen("\"chi_delta\": 1", "\"chi_delta\": 7", 1);
    std::fs::write(&bad, text).unwrap();
    let out = run(&["disparity", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("places[0].characters[0].chi_delta"), "{err}");

    let missing = run(&["disparity", "--input", dir.path().join("absent.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(run(&["frobenius", "x^^2", "--primes", "3..10"]).status.code(), Some(2));
    assert_eq!(run(&["frobenius", "x^2+1", "--primes", "3..99999999999"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--dim", "6"]).status.code(), Some(2));
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn frobenius_flags_ramified_five() {
    let out = run(&["frobenius", "x^6+x^4+x+3", "--primes", "3..101"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("prime,cycle_type,epsilon,ramified"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 24);
    let five = rows.iter().find(|r| r[0] == "5").unwrap();
    assert_eq!(five[3], "true");
    assert!(rows.iter().filter(|r| r[0] != "5").all(|r| r[3] == "false" && !r[1].is_empty()));
    assert_eq!(stdout(&run(&["frobenius", "x^2+1", "--primes", "3..4"])), "prime,cycle_type,epsilon,ramified\n3,2,,false\n");
}

#[test]
fn epsilon_examples() {
    let sextic = run(&["epsilon", "x^6+x^4+x+3", "--group", "symmetric", "--format", "json"]);
    assert_eq!(sextic.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&sextic.stdout).unwrap();
    assert_eq!(v["classification"]["kind"], "NotHomomorphism");
    assert_eq!(v["theta"]["generates"], true);

    let quintic = run(&["epsilon", "x^5-x+1", "--group", "symmetric", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&quintic.stdout).unwrap();
    assert_eq!(v["classification"]["kind"], "HomomorphismNontrivial");
    assert_eq!(v["group_order"], 120);
    assert_eq!(v["kernel_order"], 60);

    let path = data("orthogonal_plus.json");
    let orth = run(&["epsilon", "--input", path.to_str().unwrap(), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&orth.stdout).unwrap();
    assert_eq!(v["group_order"], 72);
    assert_eq!(v["classification"]["kind"], "HomomorphismNontrivial");
    assert_eq!(v["kernel_order"], 36);
    assert_eq!(v["theta"]["generates"], false);
}

#[test]
fn markov_examples() {
    let path = data("markov_scalar.json");
    let out = run(&["markov", "--input", path.to_str().unwrap(), "--steps", "10"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let norms: Vec<String> = v["norm_squares"].as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect();
    let expected: Vec<String> = (0..=10u32).map(|k| format!("1/{}", 9u64.pow(k))).collect();
    assert_eq!(norms, expected);

    let path = data("markov_constant.json");
    let v: serde_json::Value =
        serde_json::from_slice(&run(&["markov", "--input", path.to_str().unwrap(), "--steps", "5"]).stdout).unwrap();
    assert!(v["norm_squares"].as_array().unwrap().iter().all(|x| x == "25/4"));
    assert_eq!(v["decays"], false);

    let path = data("markov_mixed.json");
    let v: serde_json::Value =
        serde_json::from_slice(&run(&["markov", "--input", path.to_str().unwrap(), "--steps", "200"]).stdout).unwrap();
    assert_eq!(v["bound_holds"], true);
    assert_eq!(v["decays"], true);
}

#[test]
fn same_seed_same_bytes() {
    let path = data("markov_mixed.json");
    let p = path.to_str().unwrap();
    let a = run(&["--seed", "11", "markov", "--input", p, "--steps", "40", "--format", "csv"]);
    let b = run(&["--seed", "11", "markov", "--input", p, "--steps", "40", "--format", "csv"]);
    let c = run(&["--seed", "12", "markov", "--input", p, "--steps", "40", "--format", "csv"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let e1 = run(&["epsilon", "x^6+x^4+x+3"]);
    let e2 = run(&["epsilon", "x^6+x^4+x+3"]);
    assert_eq!(e1.stdout, e2.stdout);
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.csv");
    let out = run(&["--output", target.to_str().unwrap(), "frobenius", "x^2+1", "--primes", "3..14"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&target).unwrap();
    assert_eq!(written, "prime,cycle_type,epsilon,ramified\n3,2,,false\n5,1-1,,false\n7,2,,false\n11,2,,false\n13,1-1,,false\n");
}

#[test]
fn verify_dim_two_all_suites() {
    let out = run(&["verify", "all", "--dim", "2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["suites"].as_array().unwrap().len(), 3);
    let text = stdout(&run(&["verify", "quadform", "--dim", "2"]));
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 5, "{text}");
}
