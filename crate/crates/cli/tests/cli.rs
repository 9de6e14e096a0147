use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn freeprod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freeprod"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn reduce_examples() {
    let o = freeprod(&["reduce", "z2:s z3:t z3:t z3:t z2:s"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "ε\nlength 0\n");

    let o = freeprod(&["reduce", "q:1/2 z2:s q:-1/2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "q:1/2 z2:s q:-1/2\nlength 3\n");

    let o = freeprod(&["reduce", "z2:s q:one"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("token 1"), "{}", stderr(&o));
}

#[test]
fn machine_output_is_json() {
    let o = freeprod(&["reduce", "s3:r s3:r", "--format", "machine"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["reduced"][0], "s3:r2");
    assert_eq!(v["length"], 1);
    assert_eq!(v["version"], 1);
}

#[test]
fn separate_matches_golden_files() {
    let dir = tempfile::tempdir().unwrap();
    for (word, file) in [("z3:t z3:t", "z3-t-t.json"), ("q:3/2 z2:s q:-3/2", "q-z2-q.json")] {
        let out = dir.path().join(file);
        let o = freeprod(&["separate", word, "--out", path_str(&out)]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(golden(file)).unwrap(), "{word}");
    }
    let o = freeprod(&["separate", "q:3/2 z2:s q:-3/2", "--out", path_str(&dir.path().join("x.json"))]);
    let text = stdout(&o);
    assert!(text.contains("q: (3/4, 9/4) minus 1"), "{text}");
    assert!(text.contains("q: (-9/4, -3/4) minus 1"), "{text}");
}

#[test]
fn separate_error_codes() {
    let o = freeprod(&["separate", "z2:s z2:s"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("word is the identity"));

    let long = vec!["z2:s z3:t"; 10].join(" ");
    assert_eq!(code(&freeprod(&["separate", &long])), 3);
    assert_eq!(code(&freeprod(&["separate", &long, "--cap", "20"])), 0);
}

#[test]
fn check_round_trip_and_modes() {
    let cert = golden("q-z2-q.json");
    let o = freeprod(&["check", path_str(&cert), "-k", "1000", "--seed", "42"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("selections checked: 1000"));

    let o = freeprod(&["check", path_str(&cert), "--exhaustive"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("finite"));

    assert_eq!(code(&freeprod(&["check", path_str(&cert), "--symbolic"])), 0);
    assert_eq!(code(&freeprod(&["check", path_str(&golden("z3-t-t.json")), "--exhaustive"])), 0);
}

#[test]
fn check_is_deterministic() {
    let cert = golden("q-z2-q.json");
    let args = ["check", path_str(&cert), "-k", "300", "--seed", "5"];
    assert_eq!(stdout(&freeprod(&args)), stdout(&freeprod(&args)));
}

#[test]
fn tampered_certificate_is_rejected_with_a_reparsable_selection() {
    let mut cert: Value = serde_json::from_str(&std::fs::read_to_string(golden("z3-t-t.json")).unwrap()).unwrap();
    cert["neighborhoods"][1]["set"]["members"] = serde_json::json!(["t", "t2"]);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tampered.json");
    std::fs::write(&path, serde_json::to_string_pretty(&cert).unwrap()).unwrap();

    for mode in ["--exhaustive", "--symbolic"] {
        let o = freeprod(&["check", path_str(&path), mode]);
        assert_eq!(code(&o), 1, "{mode}");
        let text = stdout(&o);
        let line = text.lines().find(|l| l.starts_with("violation:")).expect("violation reported");
        let selection = line.split('`').nth(1).unwrap();
        assert_eq!(selection, "z3:t z3:t2");
        let again = freeprod(&["reduce", selection]);
        assert_eq!(stdout(&again), "ε\nlength 0\n");
    }

    // A cleared puncture is a structural fault even when nothing reaches 1.
    let mut cert: Value = serde_json::from_str(&std::fs::read_to_string(golden("z3-t-t.json")).unwrap()).unwrap();
    cert["neighborhoods"][0]["set"]["punctured"] = Value::Bool(false);
    std::fs::write(&path, serde_json::to_string(&cert).unwrap()).unwrap();
    let o = freeprod(&["check", path_str(&path), "--exhaustive"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("not punctured"), "{}", stderr(&o));
}

#[test]
fn format_and_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(golden("z3-t-t.json")).unwrap();

    let path = dir.path().join("v2.json");
    std::fs::write(&path, text.replacen("\"version\": 1", "\"version\": 2", 1)).unwrap();
    assert_eq!(code(&freeprod(&["check", path_str(&path)])), 2);

    let path = dir.path().join("digest.json");
    std::fs::write(&path, text.replacen("\"config_digest\": \"e", "\"config_digest\": \"f", 1)).unwrap();
    let o = freeprod(&["check", path_str(&path)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("configuration"));

    let groups = dir.path().join("groups.toml");
    std::fs::write(&groups, "version = 1\n[[group]]\nid = \"z2\"\nkind = \"finite_table\"\nelements = [\"1\", \"s\"]\ntable = [[\"1\", \"s\"], [\"s\", \"s\"]]\n").unwrap();
    let o = freeprod(&["reduce", "z2:s", "--groups", path_str(&groups)]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("row"), "{}", stderr(&o));

    assert_eq!(code(&freeprod(&["check", "/nonexistent/cert.json"])), 2);
}

#[test]
fn custom_groups_file() {
    let dir = tempfile::tempdir().unwrap();
    let groups = dir.path().join("groups.toml");
    std::fs::write(
        &groups,
        "version = 1\n[[group]]\nid = \"a\"\nkind = \"finite_table\"\nelements = [\"1\", \"x\"]\ntable = [[\"1\", \"x\"], [\"x\", \"1\"]]\n\n[[group]]\nid = \"p3\"\nkind = \"rational_padic\"\np = 3\n",
    )
    .unwrap();
    let g = path_str(&groups);
    let o = freeprod(&["reduce", "a:x p3:1 p3:2 a:x", "--groups", g]);
    assert_eq!(stdout(&o), "a:x p3:3 a:x\nlength 3\n");
    let cert = dir.path().join("c.json");
    assert_eq!(code(&freeprod(&["separate", "p3:1 p3:2", "--groups", g, "--out", path_str(&cert)])), 0);
    assert_eq!(code(&freeprod(&["check", path_str(&cert), "--groups", g, "--symbolic"])), 0);
    // The standard configuration has a different digest.
    assert_eq!(code(&freeprod(&["check", path_str(&cert)])), 2);
}

#[test]
fn lemma_commands() {
    let o = freeprod(&["lemma31", "z2:s z3:t z3:t2 z2:s"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("reduces to 1: true"));

    let o = freeprod(&["lemma32", "z3:t z3:t", "z3:t z3:t2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("condition (ii): false"));

    let o = freeprod(&["lemma32", "z3:t", "z3:t z3:t"]);
    assert_eq!(code(&o), 2);

    let o = freeprod(&["subterms", "z2:s q:1 z2:s", "--nonidentity"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "z2 [0] s\nz2 [2] s\nq [1] 1\n3 subterms\n");
}

#[test]
fn proptest_suites() {
    let o = freeprod(&["proptest", "lemma31", "--exhaustive-len", "6"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("lemma31: 5461 cases, 0 failures"), "{}", stdout(&o));

    let o = freeprod(&["proptest", "all", "-k", "40", "--seed", "3", "--format", "machine"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["suites"].as_array().unwrap().len(), 7);

    assert_eq!(code(&freeprod(&["proptest", "nonsense"])), 2);
}

#[test]
fn x0check_examples() {
    let dir = tempfile::tempdir().unwrap();
    let witnesses = dir.path().join("w.txt");
    let excluded = dir.path().join("x.txt");
    let empty = dir.path().join("empty.txt");
    std::fs::write(&witnesses, "z2:s\nq:1 q2:1\n1 z3:t\n# comment\ns3:r z2:s s3:f\n").unwrap();
    std::fs::write(&excluded, "ε\nz2:s q:1\n").unwrap();
    std::fs::write(&empty, "").unwrap();
    let out = dir.path().join("certs");

    let o = freeprod(&["x0check", path_str(&witnesses), path_str(&excluded), "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    assert_eq!(std::fs::read_dir(&out).unwrap().count(), 4);
    for i in 0..4 {
        let cert = out.join(format!("certificate-{i}.json"));
        assert_eq!(code(&freeprod(&["check", path_str(&cert), "--symbolic"])), 0);
    }

    assert_eq!(code(&freeprod(&["x0check", path_str(&witnesses), path_str(&empty)])), 0);

    std::fs::write(&witnesses, "q:1 z2:s\nz2:s q:1\n").unwrap();
    let o = freeprod(&["x0check", path_str(&witnesses), path_str(&excluded)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("witness 1"));
}
