use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn echo(&self) -> &str {
        self.stdout.lines().next().expect("echo line")
    }

    fn json(&self) -> Value {
        serde_json::from_str(self.stdout.lines().last().expect("json line")).expect("valid JSON")
    }
}

fn discrarr(dir: &Path, args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_discrarr"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn workspace() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    let files = [
        (
            "crapo_lm1.json",
            r#"{"k":2,"normals":[[1,0],[2,1],[1,1],[1,2],[0,1],[-1,1]]}"#,
        ),
        (
            "crapo_l3.json",
            r#"{"k":2,"normals":[[1,0],[2,1],[1,1],[1,2],[0,1],[3,1]]}"#,
        ),
        ("t.json", r#"{"t":["0","1","1","1","0","0"]}"#),
        ("zero.json", r#"{"t":[0,0,0,0,0,0]}"#),
        (
            "planes.json",
            r#"{"k":3,"normals":[[1,0,0],[0,1,0],[0,0,1],[1,1,1]]}"#,
        ),
        ("broken.json", "{\"k\": 2, \"normals\": [[1, 0],, [0, 1]]}"),
    ];
    for (name, body) in files {
        fs::write(dir.path().join(name), body).unwrap();
    }
    dir
}

#[test]
fn rank_of_the_crapo_wheel() {
    let dir = workspace();
    let run = discrarr(
        dir.path(),
        &[
            "rank",
            "--input",
            "crapo_lm1.json",
            "--family",
            "123,156,246,345",
        ],
    );
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(run.stdout.lines().nth(1).unwrap().starts_with("rank 3 "));
    assert_eq!(run.json()["rank"], 3);
    assert_eq!(run.json()["nu"], 4);
}

#[test]
fn membership_fails_off_the_variety() {
    let dir = workspace();
    let run = discrarr(
        dir.path(),
        &[
            "membership",
            "--input",
            "crapo_l3.json",
            "--family",
            "W6",
            "--r",
            "3",
        ],
    );
    assert_eq!(run.code, 1);
    assert!(run
        .stdout
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("false (rank certificate 4"));
    assert_eq!(run.json()["member"], false);
    assert_eq!(run.json()["rank_certificate"], 4);
    let run = discrarr(
        dir.path(),
        &["membership", "--input", "crapo_lm1.json", "--family", "W6"],
    );
    assert_eq!(run.code, 0);
    assert_eq!(
        (run.json()["member"].clone(), run.json()["r"].clone()),
        (Value::Bool(true), Value::from(3))
    );
}

#[test]
fn prime_field_membership() {
    let dir = workspace();
    let args = [
        "membership",
        "--input",
        "crapo_l3.json",
        "--family",
        "W6",
        "--r",
        "3",
        "--field",
        "Fp:1000000007",
    ];
    let run = discrarr(dir.path(), &args);
    assert_eq!(run.code, 1);
    assert_eq!(run.json()["field"], "Fp:1000000007");
    let run = discrarr(
        dir.path(),
        &[
            "membership",
            "--input",
            "crapo_l3.json",
            "--family",
            "W6",
            "--field",
            "Fp:12",
        ],
    );
    assert_eq!(run.code, 2);
}

#[test]
fn degeneration_of_the_seven_line_family() {
    let dir = workspace();
    let run = discrarr(
        dir.path(),
        &[
            "degenerate",
            "--family",
            "123,147,156,246,357",
            "--from",
            "7",
            "--to",
            "4",
        ],
    );
    assert_eq!(run.code, 0);
    assert_eq!(
        run.stdout.lines().nth(1).unwrap(),
        "123,156,246,345 (gamma = 1)"
    );
    assert_eq!(run.json()["presentation"], "123,156,246,345");
    assert_eq!(run.json()["gamma"], 1);
    let run = discrarr(
        dir.path(),
        &["degenerate", "--family", "W8", "--from", "8", "--to", "4"],
    );
    assert_eq!(run.json()["presentation"], "123,147,246,345,567");
}

#[test]
fn bba_answers_yes_or_no() {
    let dir = workspace();
    let run = discrarr(dir.path(), &["bba", "--family", "W6"]);
    assert_eq!(run.code, 1);
    assert_eq!(run.json()["witness"], "123,156,246,345");
    let run = discrarr(
        dir.path(),
        &["bba", "--family", "123,456,789,147,258,369", "--n", "9"],
    );
    assert_eq!(run.code, 0);
    assert_eq!(run.json()["r"], 6);
}

fn marked(svg: &str) -> usize {
    svg.matches(r#"class="point""#).count()
}

#[test]
fn render_marks_the_four_triple_points() {
    let dir = workspace();
    let run = discrarr(
        dir.path(),
        &[
            "render",
            "--input",
            "crapo_lm1.json",
            "--translation",
            "t.json",
            "--output",
            "a.svg",
        ],
    );
    assert_eq!(run.code, 0, "{}", run.stderr);
    let svg = fs::read_to_string(dir.path().join("a.svg")).unwrap();
    assert!(svg.starts_with("<svg "));
    assert_eq!(marked(&svg), 4);
    assert_eq!(run.json()["concurrent"].as_array().unwrap().len(), 4);
    for i in 1..=6 {
        assert!(svg.contains(&format!(">H_{i}<")));
    }
}

#[test]
fn render_of_zero_translation_has_one_point() {
    let dir = workspace();
    let run = discrarr(
        dir.path(),
        &[
            "render",
            "--input",
            "crapo_lm1.json",
            "--translation",
            "zero.json",
            "--json",
        ],
    );
    assert_eq!(run.code, 0);
    assert_eq!(run.json()["concurrent"], serde_json::json!(["123456"]));
    let run = discrarr(dir.path(), &["render", "--input", "crapo_lm1.json"]);
    assert_eq!(marked(&run.stdout), 1);
}

#[test]
fn render_is_byte_identical_across_runs() {
    let dir = workspace();
    for name in ["x.svg", "y.svg"] {
        let run = discrarr(
            dir.path(),
            &[
                "render",
                "--input",
                "crapo_lm1.json",
                "--family",
                "123,345",
                "--seed",
                "5",
                "--output",
                name,
            ],
        );
        assert_eq!(run.code, 0, "{}", run.stderr);
    }
    let x = fs::read(dir.path().join("x.svg")).unwrap();
    assert_eq!(x, fs::read(dir.path().join("y.svg")).unwrap());
    assert!(marked(&String::from_utf8(x).unwrap()) >= 2);
}

#[test]
fn render_rejects_planes() {
    let dir = workspace();
    let run = discrarr(dir.path(), &["render", "--input", "planes.json"]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("k = 2"));
}

#[test]
fn parse_errors_name_the_byte_offset() {
    let dir = workspace();
    let run = discrarr(dir.path(), &["circuits", "--input", "broken.json"]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("byte 28"), "{}", run.stderr);
    let run = discrarr(
        dir.path(),
        &["rank", "--input", "crapo_lm1.json", "--family", "12x,345"],
    );
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("byte 2"), "{}", run.stderr);
}

#[test]
fn usage_errors_and_budgets() {
    let dir = workspace();
    assert_eq!(discrarr(dir.path(), &["rank", "--family", "W6"]).code, 2);
    assert_eq!(discrarr(dir.path(), &["frobnicate"]).code, 2);
    assert_eq!(
        discrarr(dir.path(), &["degenerate", "--family", "W6", "--from", "6"]).code,
        2
    );
    assert_eq!(
        discrarr(dir.path(), &["sample", "--n", "5", "--budget", "0"]).code,
        3
    );
    assert_eq!(
        discrarr(dir.path(), &["sample", "--family", "W8", "--budget", "0"]).code,
        3
    );
    assert_eq!(discrarr(dir.path(), &["enumerate", "--n", "10"]).code, 2);
    assert_eq!(discrarr(dir.path(), &["--help"]).code, 0);
}

#[test]
fn sampled_witness_is_a_member() {
    let dir = workspace();
    let run = discrarr(
        dir.path(),
        &[
            "sample", "--family", "DW10", "--seed", "3", "--output", "dw.json",
        ],
    );
    assert_eq!(run.code, 0, "{}", run.stderr);
    let run = discrarr(
        dir.path(),
        &["membership", "--input", "dw.json", "--family", "DW10"],
    );
    assert_eq!(run.code, 0);
    assert_eq!(run.json()["r"], 5);
    let run = discrarr(
        dir.path(),
        &["sample", "--n", "8", "--seed", "3", "--output", "g.json"],
    );
    assert_eq!(run.code, 0);
    assert_eq!(
        discrarr(
            dir.path(),
            &["membership", "--input", "g.json", "--family", "DW10"]
        )
        .code,
        1
    );
}

#[test]
fn echo_reproduces_the_run() {
    let dir = workspace();
    let runs = [
        vec!["sample", "--family", "W8", "--seed", "11"],
        vec![
            "rank",
            "--input",
            "crapo_lm1.json",
            "--family",
            "[1 2 3],[3 4 5]",
        ],
        vec![
            "render",
            "--input",
            "crapo_lm1.json",
            "--family",
            "123,345",
            "--seed",
            "2",
        ],
    ];
    for args in runs {
        let first = discrarr(dir.path(), &args);
        let echo = first
            .echo()
            .strip_prefix("# discrarr ")
            .expect("echo prefix");
        let again: Vec<String> = shlex::split(echo).expect("shell words");
        let again: Vec<&str> = again.iter().map(String::as_str).collect();
        let second = discrarr(dir.path(), &again);
        assert_eq!(first.stdout, second.stdout);
        assert_eq!(first.code, second.code);
    }
}

#[test]
fn classify_report_round_trips() {
    let dir = workspace();
    let run = discrarr(
        dir.path(),
        &[
            "classify",
            "--input",
            "crapo_lm1.json",
            "--output",
            "report.json",
        ],
    );
    assert_eq!(run.code, 0, "{}", run.stderr);
    let text = fs::read_to_string(dir.path().join("report.json")).unwrap();
    let report = discrarr::io::report_from_json(&text).unwrap();
    let header = run.stdout.lines().nth(1).unwrap();
    assert!(header.starts_with(&format!("{} hits", report.hits.len())));
    assert_eq!(report.hits.len(), 8);
    for (hit, line) in report.hits.iter().zip(run.stdout.lines().skip(2)) {
        assert!(line.starts_with(&format!("{} ", hit.family)));
        assert!(line.contains(&format!("rank {} r {}", hit.rank, hit.r)));
    }
    assert_eq!(run.json(), serde_json::from_str::<Value>(&text).unwrap());
}

#[test]
fn enumerate_lists_the_eight_line_classes() {
    let dir = workspace();
    let run = discrarr(dir.path(), &["enumerate", "--n", "8"]);
    assert_eq!(run.code, 0);
    let mut names: Vec<String> = run.json()["classes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap().to_string())
        .collect();
    names.sort();
    assert_eq!(names, ["DW10", "L8", "W6", "W8", "Wd8_4"]);
}

#[test]
fn circuits_of_a_parallel_pair() {
    let dir = workspace();
    let path: PathBuf = dir.path().join("multi.json");
    fs::write(&path, r#"{"k":2,"normals":[[1,0],[2,0],[0,1],[1,1]]}"#).unwrap();
    let run = discrarr(dir.path(), &["circuits", "--input", "multi.json"]);
    assert_eq!(run.code, 0);
    assert_eq!(
        run.json()["circuits"],
        serde_json::json!([[1, 2], [1, 3, 4], [2, 3, 4]])
    );
    assert_eq!(run.json()["generic"], false);
}
