use std::path::Path;
use std::process::{Command, Output};

fn entpoly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entpoly"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn first_line(args: &[&str]) -> String {
    let out = entpoly(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    stdout(&out).lines().next().unwrap().to_string()
}

#[test]
fn named_state_lines() {
    assert_eq!(first_line(&["poly", "zero"]), "zero: 1 + x | irreducible");
    assert_eq!(first_line(&["poly", "bell"]), "bell: 1 + 3x | irreducible");
    assert_eq!(first_line(&["poly", "w"]), "w: 1 + 6x + x^2 | irreducible");
    assert_eq!(first_line(&["poly", "ghz"]), "ghz: 1 + 7x | irreducible");
}

#[test]
fn product_state_lines() {
    assert_eq!(
        first_line(&["poly", "zero(2)"]),
        "zero(2): 1 + 2x + x^2 | (1+x)^2"
    );
    assert_eq!(
        first_line(&["poly", "zero(3)"]),
        "zero(3): 1 + 3x + 3x^2 + x^3 | (1+x)^3"
    );
    assert_eq!(
        first_line(&["poly", "zero,bell"]),
        "zero,bell: 1 + 4x + 3x^2 | (1+x)(1+3x)"
    );
}

#[test]
fn methods_agree_on_output() {
    for method in ["rank", "oracle", "both"] {
        assert_eq!(
            first_line(&["poly", "w", "--method", method]),
            "w: 1 + 6x + x^2 | irreducible"
        );
    }
}

#[test]
fn explicit_state_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.json");
    let s = 1.0 / 3f64.sqrt();
    std::fs::write(
        &path,
        format!(
            r#"{{"d": 2, "N": 3, "amplitudes": [
                {{"index": "100", "re": {s}, "im": 0.0}},
                {{"index": "010", "re": {s}, "im": 0.0}},
                {{"index": "001", "re": {s}, "im": 0.0}}]}}"#
        ),
    )
    .unwrap();
    let line = first_line(&["poly", path.to_str().unwrap()]);
    assert!(line.ends_with(": 1 + 6x + x^2 | irreducible"), "{line}");
}

#[test]
fn json_output_uses_canonical_strings() {
    let out = entpoly(&["poly", "zero*bell", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v[0]["polynomial"], "1 + 4x + 3x^2");
    assert_eq!(v[0]["factorization"], "(1+x)(1+3x)");
    assert_eq!(v[0]["coefficients"], serde_json::json!([1, 4, 3]));
}

#[test]
fn oracle_and_fuzz_pass() {
    assert_eq!(
        first_line(&["oracle", "ghz"]),
        "PASS ghz: |W_k| rank [1, 8, 8, 8], oracle [1, 8, 8, 8] -> 1 + 7x"
    );
    let out = entpoly(&["fuzz", "w", "--trials", "20", "--seed", "7"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(
        text.contains("slocc: 20 trials (seed 7), 0 mismatches"),
        "{text}"
    );
    assert!(
        text.contains("permutations: 6 checked, 0 mismatches"),
        "{text}"
    );
}

#[test]
fn runs_are_deterministic() {
    let a = entpoly(&[
        "fuzz",
        "random(3)",
        "--seed",
        "3",
        "--trials",
        "5",
        "--json",
    ]);
    let b = Command::new(env!("CARGO_BIN_EXE_entpoly"))
        .args([
            "fuzz",
            "random(3)",
            "--seed",
            "3",
            "--trials",
            "5",
            "--json",
        ])
        .env("ENTPOLY_THREADS", "1")
        .output()
        .unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

fn atlas(store: &Path, args: &[&str]) -> Output {
    let mut full: Vec<&str> = vec!["atlas"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--store", store.to_str().unwrap()]);
    entpoly(&full)
}

#[test]
fn atlas_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("atlas.json");
    assert!(atlas(&store, &["add", "bell"]).status.success());
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&store).unwrap()).unwrap();
    assert_eq!(parsed["entries"][0]["polynomial"], "1 + 3x");

    assert!(atlas(&store, &["add", "w", "zero,bell"]).status.success());
    assert!(atlas(&store, &["add", "ket(0)", "--d", "4"])
        .status
        .success());
    let text = stdout(&atlas(&store, &["query", "1 + 3x"]));
    assert!(
        text.contains("1 + 3x | irreducible | d = 2, N = 2 | bell"),
        "{text}"
    );
    assert!(text.contains("d = 4, N = 1 | ket(0)"), "{text}");
    assert_eq!(stdout(&atlas(&store, &["query", "1+3x"])), text);

    let by_state = stdout(&atlas(&store, &["query", "zero*bell"]));
    assert!(by_state.contains("(1+x)(1+3x)"), "{by_state}");
    assert!(stdout(&atlas(&store, &["list"])).ends_with("4 entries\n"));
    assert_eq!(
        stdout(&atlas(&store, &["query", "1 + 7x"])),
        "no entries for 1 + 7x\n"
    );
}

#[test]
fn exit_codes() {
    assert_eq!(entpoly(&["poly", "nonsense"]).status.code(), Some(2));
    assert_eq!(entpoly(&["poly", "w", "--d", "3"]).status.code(), Some(2));
    assert_eq!(entpoly(&["poly"]).status.code(), Some(2));
    assert_eq!(
        entpoly(&["poly", "/no/such/state.json"]).status.code(),
        Some(4)
    );
    assert_eq!(
        entpoly(&["size", "zero(3)", "--op", "E01:0"]).status.code(),
        Some(2)
    );
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("atlas.json");
    std::fs::write(&store, "not json").unwrap();
    assert_eq!(atlas(&store, &["list"]).status.code(), Some(4));
    let bad = Command::new(env!("CARGO_BIN_EXE_entpoly"))
        .args(["poly", "bell"])
        .env("ENTPOLY_THREADS", "x")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn size_command() {
    let text = stdout(&entpoly(&["size", "ghz", "--op", "X:0", "--relative", "w"]));
    assert!(
        text.starts_with("ghz: N_psi = 1, |dW_k| = [1, 7]\n"),
        "{text}"
    );
    assert!(text.contains("size(X:0) = 1.000000"), "{text}");
    assert!(text.contains("size of w = 1.000000"), "{text}");
}
