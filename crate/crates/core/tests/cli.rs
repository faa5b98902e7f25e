use std::path::PathBuf;
use std::process::Command;

use hvb::cli::{run, EXIT_INPUT, EXIT_OK};

fn golden(name: &str) -> String {
    golden_dir().join(name).to_string_lossy().into_owned()
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

const CASES: [(&[&str], &str); 5] = [
    (&["end", "o_f2.hb"], "end_o_f2.json"),
    (&["hom", "o_f2.hb", "shifted_f3.hb"], "hom_disjoint.json"),
    (&["verify", "trivial2.hb"], "verify_trivial2.json"),
    (&["verify", "square_zero.hb"], "verify_square_zero.json"),
    (&["decompose", "mixed.hb"], "decompose_mixed.json"),
];

fn args(case: &[&str]) -> Vec<String> {
    let mut out = vec![case[0].to_string()];
    out.extend(case[1..].iter().map(|f| golden(f)));
    out.extend(["--format".to_string(), "json".to_string()]);
    out
}

#[test]
fn binary_matches_golden_outputs() {
    for (case, expected) in CASES {
        let output = Command::new(env!("CARGO_BIN_EXE_hvb")).args(args(case)).output().unwrap();
        assert_eq!(output.status.code(), Some(EXIT_OK), "{case:?}");
        let frozen = std::fs::read_to_string(golden_dir().join(expected)).unwrap();
        assert_eq!(String::from_utf8(output.stdout).unwrap(), frozen, "{case:?}");
    }
}

#[test]
fn end_of_unipotent_rank_two() {
    let (code, out) = run(args(&["end", "o_f2.hb"]));
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["rank"], 2);
    assert_eq!(v["fingerprint"]["template"], "TruncatedPoly(2)");
}

#[test]
fn trivial_bundle_verifies() {
    let (code, out) = run(args(&["verify", "trivial2.hb"]));
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let check = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "trivial_bundle_criterion").unwrap();
    assert_eq!(check["pass"], true);
    assert_eq!(check["witness"]["end_dim"], 4);
    assert_eq!(check["witness"]["radical_dim"], 0);
}

#[test]
fn suites_split_the_checks() {
    let file = golden("mixed.hb");
    let count = |suite: &str| {
        let (code, out) = run(["verify", file.as_str(), "--suite", suite, "--format", "json"]);
        assert_eq!(code, EXIT_OK, "{out}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        v["checks"].as_array().unwrap().len()
    };
    assert_eq!(count("ranks") + count("algebras"), count("all") + 1);
}

#[test]
fn input_errors_exit_with_two() {
    let dir = std::env::temp_dir().join(format!("hvb-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.hb");
    std::fs::write(&bad, "context g=1 labels=1\nlabel L=(1)\nsummand L * jordan(0)\n").unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_hvb")).arg("info").arg(&bad).output().unwrap();
    assert_eq!(output.status.code(), Some(EXIT_INPUT));
    assert!(String::from_utf8_lossy(&output.stderr).contains("summand 1"));
    std::fs::write(&bad, "context g=1 labels=1\nsummand O * jordan(2\n").unwrap();
    let (code, out) = run([std::ffi::OsStr::new("info"), bad.as_os_str()]);
    assert_eq!(code, EXIT_INPUT);
    assert!(out.contains("line 2, column 21: expected `)`, found end of line"), "{out}");
    let (code, _) = run(["verify", golden("o_f2.hb").as_str(), "--suite", "everything"]);
    assert_eq!(code, EXIT_INPUT);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn hom_requires_matching_contexts() {
    let (code, out) = run(["hom", golden("o_f2.hb").as_str(), golden("square_zero.hb").as_str()]);
    assert_eq!(code, EXIT_INPUT);
    assert!(out.starts_with("error:"), "{out}");
}

#[test]
fn text_and_csv_formats() {
    let file = golden("mixed.hb");
    let (code, out) = run(["info", file.as_str()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("g = 2, labels = 2, field = q\nrank 8\n"), "{out}");
    let (_, out) = run(["decompose", file.as_str(), "--format", "csv"]);
    assert_eq!(out.lines().next(), Some("label,dim,partition"));
    assert_eq!(out.lines().count(), 5);
}

#[test]
fn prime_field_runs() {
    let (code, out) = run(["end", golden("shifted_f3.hb").as_str(), "--field", "fp:5", "--format", "json"]);
    assert_eq!(code, EXIT_OK, "{out}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["fingerprint"]["template"], "TruncatedPoly(3)");
    let (code, out) = run(["end", golden("shifted_f3.hb").as_str(), "--field", "fp:3"]);
    assert_eq!(code, EXIT_INPUT);
    assert!(out.contains("characteristic"), "{out}");
}
