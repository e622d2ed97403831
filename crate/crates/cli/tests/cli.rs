//! End-to-end checks of the command-line surface: exit codes, the JSON
//! schemas, and byte-identical reports for identical inputs and seed.

use std::process::{Command, Output};

fn torelli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torelli"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 output")
}

const STD_A: &str = "[[1,0,0,0,0,0],[0,1,0,0,0,0],[0,0,1,0,0,0]]";

#[test]
fn supersets_enumeration_counts_102() {
    let out = torelli(&["--format", "json", "enumerate", "supersets", "--A", STD_A]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["count"], 102);
    assert_eq!(doc["supersets"].as_array().unwrap().len(), 102);
    // every multiset is six classes of six coordinates
    let first = &doc["supersets"][0];
    assert_eq!(first.as_array().unwrap().len(), 6);
    assert_eq!(first[0].as_array().unwrap().len(), 6);
}

#[test]
fn h2prime_enumeration_over_a() {
    let out = torelli(&["--format", "json", "enumerate", "h2prime", "--A", STD_A]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(doc["count"].as_u64().unwrap() > 0);
}

#[test]
fn verify_suite_exit_codes() {
    let ok = torelli(&["verify", "boolalg-dims"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("[pass]"));
    let unknown = torelli(&["verify", "no-such-suite"]);
    assert_eq!(unknown.status.code(), Some(1));
}

#[test]
fn bad_flags_exit_2() {
    let out = torelli(&["enumerate", "supersets", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical_for_equal_seeds() {
    let run = || {
        let out = torelli(&["--format", "json", "--seed", "7", "verify", "form-family"]);
        assert!(out.status.success());
        stdout(&out)
    };
    assert_eq!(run(), run());
}

#[test]
fn eval_sigma_on_a_separating_twist() {
    let dir = std::env::temp_dir().join("torelli-cli-test-sigma");
    std::fs::create_dir_all(&dir).unwrap();
    let word = dir.join("word.json");
    std::fs::write(
        &word,
        r#"[{"kind":"sep_twist","side":[["001000","000001"]]}]"#,
    )
    .unwrap();
    let out = torelli(&[
        "--format",
        "json",
        "eval",
        "sigma",
        "--word",
        word.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["in_kernel"], false);
    let hex = doc["sigma"].as_str().unwrap();
    assert_eq!(hex.len(), 9);
    // squaring the twist lands in the kernel
    std::fs::write(
        &word,
        r#"[{"kind":"sep_twist","side":[["001000","000001"]],"exponent":2}]"#,
    )
    .unwrap();
    let out = torelli(&[
        "--format",
        "json",
        "eval",
        "sigma",
        "--word",
        word.to_str().unwrap(),
    ]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["in_kernel"], true);
}

#[test]
fn eval_psi_on_a_square() {
    let dir = std::env::temp_dir().join("torelli-cli-test-psi");
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("decomposition.json");
    std::fs::write(&file, r#"[{"sq":{"word":[["z1",1]]}}]"#).unwrap();
    let out = torelli(&[
        "--format",
        "json",
        "eval",
        "psi",
        "--decomposition",
        file.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["psi"], 1);
}

#[test]
fn eval_nu_with_side_tags() {
    let dir = std::env::temp_dir().join("torelli-cli-test-nu");
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("word.json");
    std::fs::write(
        &file,
        r#"[{"kind":"sep_twist","side":[["001000","000001"]],
            "tags":{"sep_sides":{"[1,0,0,0,0,0]":"Genus2"}}}]"#,
    )
    .unwrap();
    let out = torelli(&[
        "--format",
        "json",
        "eval",
        "nu",
        "--word",
        file.to_str().unwrap(),
        "--gamma",
        "[1,0,0,0,0,0]",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["nu"], 1);
}

#[test]
fn verify_d1_identities_accepts_an_instances_file() {
    let dir = std::env::temp_dir().join("torelli-cli-test-instances");
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("instances.json");
    let instances: Vec<torelli_core::suites::IdentityInstance> =
        torelli_core::suites::identity_instances()
            .unwrap()
            .into_iter()
            .take(2)
            .collect();
    std::fs::write(&file, serde_json::to_string(&instances).unwrap()).unwrap();
    let out = torelli(&[
        "verify",
        "d1-identities",
        "--instances",
        file.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn descent_subcommands_succeed_on_the_standard_instance() {
    let sigma = torelli(&["descent", "sigma", "--A0", STD_A]);
    assert_eq!(sigma.status.code(), Some(0), "{}", stdout(&sigma));
    assert!(stdout(&sigma).contains("derivation complete"));
    let lambda = torelli(&["--format", "json", "descent", "lambda", "--A0", STD_A]);
    assert_eq!(lambda.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&lambda)).unwrap();
    assert_eq!(doc["ok"], true);
    assert_eq!(doc["targets"].as_array().unwrap().len(), 14);
}
