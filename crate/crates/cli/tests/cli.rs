//! End-to-end tests driving the compiled `misstep` binary.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn misstep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_misstep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn misstep_with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_misstep"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .take()
        .expect("stdin piped")
        .write_all(input.as_bytes())
        .expect("stdin accepts input");
    child.wait_with_output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 output")
}

fn json_lines(output: &Output) -> Vec<serde_json::Value> {
    stdout(output)
        .lines()
        .map(|l| serde_json::from_str(l).expect("every line is JSON"))
        .collect()
}

#[test]
fn check_partitions_outcomes_into_exit_codes() {
    let diagnosed = misstep(&[
        "check", "--premise", "~p", "--premise", "p -> q", "--claim", "~q",
    ]);
    assert_eq!(diagnosed.status.code(), Some(3));
    assert!(stdout(&diagnosed).contains("denying_antecedent"));

    let verified = misstep(&["check", "--claim", "1/2 + 1/2 = 1"]);
    assert_eq!(verified.status.code(), Some(0));
    assert!(stdout(&verified).contains("equality_chain"));

    let unknown = misstep(&["check", "--claim", "p -> (q -> p)"]);
    assert_eq!(unknown.status.code(), Some(4));

    let parse_error = misstep(&["check", "--claim", "1 + = 2"]);
    assert_eq!(parse_error.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&parse_error.stderr).contains("claim"));

    let usage_error = misstep(&["check", "--no-such-flag"]);
    assert_eq!(usage_error.status.code(), Some(2));
}

#[test]
fn check_json_reports_have_the_fixed_fields() {
    let output = misstep(&[
        "check", "--json", "--claim", "1/2 + 1/2 = 2/4", "--id", "demo",
    ]);
    assert_eq!(output.status.code(), Some(3));
    let records = json_lines(&output);
    assert_eq!(records.len(), 1);
    let record = &records[0];
    assert_eq!(record["id"], "demo");
    assert_eq!(record["verdict"], "diagnosed");
    assert_eq!(record["rule_index"], "fraction_componentwise_add");
    assert_eq!(record["position"], serde_json::json!([]));
    assert_eq!(record["bindings"]["a"], "1");
    assert!(record["message"].as_str().unwrap().contains("component-wise"));
    assert!(!record["caveats"].as_array().unwrap().is_empty());
    assert!(record["alternatives"].is_array());
}

#[test]
fn config_file_narrows_the_admissible_rules() {
    let args = [
        "check", "--premise", "p", "--premise", "p | q", "--premise", "p -> ~q", "--claim", "~q",
    ];
    let permissive = misstep(&args);
    assert_eq!(permissive.status.code(), Some(0), "modus ponens applies");

    let dir = tempfile::tempdir().expect("tempdir");
    let config = dir.path().join("exercise.toml");
    std::fs::write(
        &config,
        "admissible_sound_rules = [\"and_intro\", \"equality_chain\"]\n",
    )
    .expect("config written");
    let narrowed = misstep(&[
        "check", "--config", config.to_str().unwrap(),
        "--premise", "p", "--premise", "p | q", "--premise", "p -> ~q", "--claim", "~q",
    ]);
    assert_eq!(narrowed.status.code(), Some(3));
    assert!(stdout(&narrowed).contains("exclusive_or"));

    let invalid = dir.path().join("broken.toml");
    std::fs::write(&invalid, "admissible_sound_rules = [\"nope\"]\n").expect("config written");
    let rejected = misstep(&[
        "check", "--config", invalid.to_str().unwrap(), "--claim", "1 = 1",
    ]);
    assert_eq!(rejected.status.code(), Some(1), "invalid config is an input error");
}

#[test]
fn generate_is_deterministic_under_seed() {
    let dir = tempfile::tempdir().expect("tempdir");
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    let c = dir.path().join("c.jsonl");
    for (path, seed) in [(&a, "11"), (&b, "11"), (&c, "12")] {
        let output = misstep(&[
            "generate", "base_cancellation", "8", "--seed", seed,
            "--out", path.to_str().unwrap(),
        ]);
        assert_eq!(output.status.code(), Some(0));
    }
    let bytes_a = std::fs::read(&a).expect("file a");
    assert_eq!(bytes_a, std::fs::read(&b).expect("file b"), "same seed, same file");
    assert_ne!(bytes_a, std::fs::read(&c).expect("file c"), "seed changes content");

    let unknown = misstep(&["generate", "no_such_rule", "1"]);
    assert_eq!(unknown.status.code(), Some(1));
}

#[test]
fn generate_batch_roundtrip_recovers_the_label() {
    let dir = tempfile::tempdir().expect("tempdir");
    let corpus = dir.path().join("corpus.jsonl");
    let generated = misstep(&[
        "generate", "denying_antecedent", "6", "--seed", "3",
        "--out", corpus.to_str().unwrap(),
    ]);
    assert_eq!(generated.status.code(), Some(0));

    let batch = misstep(&["batch", "--json", corpus.to_str().unwrap()]);
    assert_eq!(batch.status.code(), Some(0));
    let lines = json_lines(&batch);
    assert_eq!(lines.len(), 7, "six records plus one summary");
    for record in &lines[..6] {
        assert_eq!(record["verdict"], "diagnosed");
        assert_eq!(record["rule_index"], "denying_antecedent");
    }
    let summary = &lines[6]["summary"];
    assert_eq!(summary["records"], 6);
    assert_eq!(summary["diagnosed"], 6);
    assert_eq!(summary["accuracy"]["denying_antecedent"]["primary"], 6);
    assert_eq!(summary["accuracy"]["denying_antecedent"]["missed"], 0);
}

#[test]
fn batch_skips_malformed_lines_with_a_nonzero_exit() {
    let dir = tempfile::tempdir().expect("tempdir");
    let corpus = dir.path().join("mixed.jsonl");
    std::fs::write(
        &corpus,
        "this is not json\n{\"id\":\"ok\",\"premises\":[],\"claim\":\"1 + 1 = 2\"}\n\
         {\"id\":\"bad-formula\",\"premises\":[],\"claim\":\"1 + = 2\"}\n",
    )
    .expect("corpus written");

    let output = misstep(&["batch", "--json", corpus.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1), "malformed lines fail the run");
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("line 1"), "stderr names the line: {stderr}");
    assert!(stderr.contains("line 3"), "stderr names the line: {stderr}");
    let lines = json_lines(&output);
    assert_eq!(lines[0]["id"], "ok");
    assert_eq!(lines[0]["verdict"], "verified");
    assert_eq!(lines[1]["summary"]["malformed"], 2);
}

#[test]
fn batch_json_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().expect("tempdir");
    let corpus = dir.path().join("corpus.jsonl");
    misstep(&[
        "generate", "distributive_exponentiation", "10", "--seed", "21",
        "--out", corpus.to_str().unwrap(),
    ]);
    let first = misstep(&["batch", "--json", "--seed", "7", corpus.to_str().unwrap()]);
    let second = misstep(&["batch", "--json", "--seed", "7", corpus.to_str().unwrap()]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout, "reports are reproducible");
}

#[test]
fn repl_reads_steps_until_quit() {
    let output = misstep_with_stdin(
        &["repl"],
        "~p ; p -> q |- ~q\n1 + = 2\n(a + b)^2 = a^2 + b^2\n:quit\n",
    );
    assert_eq!(output.status.code(), Some(0));
    let text = stdout(&output);
    assert!(text.contains("denying_antecedent"), "first step diagnosed: {text}");
    assert!(text.contains("parse error"), "bad line echoes an error: {text}");
    assert!(
        text.contains("distributive_exponentiation"),
        "session continues after the error: {text}"
    );
}
