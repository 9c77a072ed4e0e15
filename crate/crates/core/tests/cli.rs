//! End-to-end runs of the `nonex` binary.

use std::path::Path;
use std::process::{Command, Output};

fn nonex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonex"))
        .args(args)
        .env_remove("NONEX_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(o: &Output, key: &str) -> String {
    let prefix = format!("{key}: ");
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix(&prefix).map(str::to_string))
        .unwrap_or_else(|| panic!("no `{key}` in:\n{}", stdout(o)))
}

#[test]
fn eval_examples() {
    let o = nonex(&[
        "eval",
        "--copula",
        "cstar",
        "--dim",
        "4",
        "--point",
        "3/5,3/5,4/5,1",
    ]);
    assert!(o.status.success());
    assert_eq!(field(&o, "value"), "0");
    let o = nonex(&[
        "eval",
        "--copula",
        "cstar",
        "--dim",
        "4",
        "--point",
        "1,4/5,3/5,3/5",
    ]);
    assert_eq!(field(&o, "value"), "3/5");
    assert_eq!(field(&o, "decimal"), "0.6");
    let o = nonex(&[
        "eval",
        "--copula",
        "independence",
        "--dim",
        "2",
        "--point",
        "1/2,1/2",
    ]);
    assert_eq!(field(&o, "value"), "1/4");
    let o = nonex(&[
        "eval",
        "--copula",
        "manifold",
        "--dim",
        "4",
        "--delta",
        "0.05,0.15",
        "--point",
        "0.6,0.6,0.85,0.95",
    ]);
    assert_eq!(field(&o, "value"), "0");
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| nonex(args).status.code().unwrap();
    assert_eq!(
        code(&["eval", "--copula", "cstar", "--dim", "3", "--point", "1/2,x,1"]),
        2
    );
    assert_eq!(
        code(&["eval", "--copula", "cstar", "--dim", "3", "--point", "1/2,1/2"]),
        3
    );
    assert_eq!(
        code(&["search", "--copula", "cstar", "--dim", "3", "--step", "1/5"]),
        4
    );
    assert_eq!(
        code(&["surface", "--copula", "cstar", "--dim", "3", "--step", "1/4"]),
        5
    );
    assert_eq!(
        code(&["eval", "--copula", "manifold", "--dim", "3", "--point", "1,1,1"]),
        5
    );
    assert_eq!(
        code(&[
            "verify",
            "--copula",
            "w",
            "--dim",
            "3",
            "--boxes",
            "100",
            "--samples",
            "100"
        ]),
        1
    );
    assert_eq!(code(&["bogus"]), 2);
}

#[test]
fn diff_reports_both_orientations() {
    let o = nonex(&[
        "diff",
        "--copula",
        "cstar",
        "--dim",
        "4",
        "--point",
        "3/5,3/5,4/5,1",
    ]);
    assert_eq!(field(&o, "permuted_point"), "(1, 4/5, 3/5, 3/5)");
    assert_eq!(field(&o, "difference"), "3/5");
}

#[test]
fn search_examples() {
    let o = nonex(&[
        "search", "--copula", "cstar", "--dim", "2", "--perm", "reverse", "--step", "1/30",
    ]);
    assert_eq!(field(&o, "best_value"), "1/3");
    assert_eq!(field(&o, "best_point"), "(1/3, 2/3)");
    assert_eq!(field(&o, "certified_upper"), "2/5");
    let o = nonex(&[
        "search", "--copula", "mdim", "--dim", "3", "--perm", "reverse", "--step", "1/8",
    ]);
    assert_eq!(field(&o, "best_value"), "0");
    let o = nonex(&[
        "search", "--copula", "cstar", "--dim", "5", "--perm", "reverse", "--step", "1/12",
    ]);
    assert_eq!(field(&o, "best_value"), "2/3");
    for key in ["best_perm", "gap", "evaluations"] {
        field(&o, key);
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let args = |t: &'static str| {
        [
            "--threads",
            t,
            "search",
            "--copula",
            "cstar",
            "--dim",
            "3",
            "--step",
            "1/8",
        ]
    };
    let one = nonex(&args("1"));
    let four = nonex(&args("4"));
    assert_eq!(one.stdout, four.stdout);
    let again = nonex(&args("1"));
    assert_eq!(one.stdout, again.stdout);
}

#[test]
fn mu_examples() {
    let o = nonex(&["mu", "--copula", "cstar", "--dim", "3", "--step", "1/8"]);
    assert_eq!(field(&o, "mu"), "1");
    assert_eq!(field(&o, "exhaustive"), "true");
    let o = nonex(&["mu", "--copula", "mdim", "--dim", "4", "--step", "1/5"]);
    assert_eq!(field(&o, "mu"), "0");
    let o = nonex(&[
        "mu", "--copula", "cstar", "--dim", "3", "--step", "1/4", "--budget", "2",
    ]);
    assert_eq!(field(&o, "exhaustive"), "false");
}

#[test]
fn verify_examples() {
    let o = nonex(&[
        "verify", "--copula", "w", "--dim", "3", "--boxes", "10000", "--seed", "42",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(field(&o, "d_increasing").contains("volume -1/2"));
    let o = nonex(&[
        "verify",
        "--copula",
        "w",
        "--dim",
        "2",
        "--boxes",
        "2000",
        "--samples",
        "2000",
    ]);
    assert!(o.status.success());
    let o = nonex(&[
        "verify",
        "--copula",
        "cstar",
        "--dim",
        "5",
        "--boxes",
        "500",
        "--samples",
        "500",
        "--margins",
        "1",
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert_eq!(field(&o, "margin_audit_bound"), "2/3");
}

#[test]
fn seed_comes_from_the_environment() {
    let run = |seed: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_nonex"));
        cmd.args(["manifold", "--dim", "4", "--samples", "3"])
            .args(extra)
            .env_remove("NONEX_SEED");
        if let Some(s) = seed {
            cmd.env("NONEX_SEED", s);
        }
        cmd.output().unwrap().stdout
    };
    assert_eq!(run(Some("5"), &[]), run(None, &["--seed", "5"]));
    assert_eq!(
        run(Some("5"), &["--seed", "6"]),
        run(None, &["--seed", "6"])
    );
}

#[test]
fn manifold_examples() {
    let o = nonex(&["manifold", "--dim", "3"]);
    assert_eq!(stdout(&o), "point: (1/2, 1/2, 1)\n");
    let o = nonex(&["manifold", "--dim", "4", "--samples", "5", "--seed", "1"]);
    let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(lines.len(), 5);
    for l in &lines {
        assert!(l.starts_with("point: (3/5, 3/5, "), "{l}");
    }
    let o = nonex(&["manifold", "--dim", "2"]);
    assert_eq!(stdout(&o).lines().count(), 1);
    assert!(stdout(&o).starts_with("point: (1/3, 2/3)"));
}

#[test]
fn bound_examples() {
    let o = nonex(&["bound", "--point", "3/5,3/5,4/5,1", "--perm", "reverse"]);
    assert_eq!(field(&o, "combined"), "3/5");
    let o = nonex(&["bound", "--point", "0,1/2,1", "--perm", "reverse"]);
    assert_eq!(field(&o, "combined"), "0");
    let o = nonex(&["bound", "--point", "1/3,2/3", "--perm", "2,1"]);
    assert_eq!(field(&o, "combined"), "1/3");
    assert_eq!(field(&o, "transposition_bound"), "1/3");
}

#[test]
fn surface_examples() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("surface.csv");
    let o = nonex(&[
        "surface",
        "--copula",
        "cstar",
        "--dim",
        "2",
        "--step",
        "1/3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 16);
    assert!(rows.contains(&"1/3,2/3,0,1/3,1/3"));
    assert!(rows.contains(&"2/3,1/3,1/3,0,1/3"));
    let o = nonex(&["surface", "--copula", "mdim", "--dim", "2", "--step", "1/2"]);
    for row in stdout(&o).lines().skip(1) {
        assert!(row.ends_with(",0"), "{row}");
    }
    assert_eq!(stdout(&o).lines().nth(2), Some("0,0.5,0,0,0"));
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn shuffle_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(
        dir.path(),
        "good.json",
        r#"{"dim":2,"cells":[
            {"intervals":[["0","2/3"],["1/3","1"]],"base":"min"},
            {"intervals":[["2/3","1"],["0","1/3"]],"base":"min"}]}"#,
    );
    let o = nonex(&["validate", "--file", &good]);
    assert!(o.status.success(), "{}", stdout(&o));
    let o = nonex(&["verify", "--file", &good, "--boxes", "10000", "--seed", "7"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let o = nonex(&["eval", "--file", &good, "--point", "1/3,2/3"]);
    assert_eq!(field(&o, "value"), "1/3");

    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"dim":2,"cells":[{"intervals":[["0","3/5"],["0","3/5"]],"base":"min"},
            {"intervals":[["2/5","1"],["2/5","1"]],"base":"min"}]}"#,
    );
    let o = nonex(&["validate", "--file", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(field(&o, "overlap").starts_with("fail"));
    assert_eq!(
        nonex(&["eval", "--file", &bad, "--point", "1,1"])
            .status
            .code(),
        Some(2)
    );

    let decimal = write(
        dir.path(),
        "dec.json",
        r#"{"dim":2,"cells":[{"intervals":[["0","1.0"],["0","1"]],"base":"min"}]}"#,
    );
    assert_eq!(
        nonex(&["validate", "--file", &decimal]).status.code(),
        Some(2)
    );
}
