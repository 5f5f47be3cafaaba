use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const PAIR: &str = "2\n0 2\n2 0\n";
const TWO_TRIANGLES: &str = "6 7\n0 1 1\n1 2 1\n0 2 1\n3 4 1\n4 5 1\n3 5 1\n2 3 0.1\n";

struct Scratch(PathBuf);

impl Scratch {
    fn new(name: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("spincube-cli-{name}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Self(dir)
    }

    fn file(&self, name: &str, contents: &str) -> PathBuf {
        let p = self.0.join(name);
        std::fs::write(&p, contents).unwrap();
        p
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn run(args: &[&str], input: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spincube"))
        .args(args)
        .arg(input)
        .env_remove("SPINCUBE_BUDGET")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// The first line of the given record kind, split into `key=value` fields.
fn record(text: &str, kind: &str) -> Vec<(String, String)> {
    let line = text
        .lines()
        .find(|l| l.split(' ').next() == Some(kind))
        .unwrap_or_else(|| panic!("no {kind} record in:\n{text}"));
    line.split(' ')
        .skip(1)
        .map(|kv| {
            let (k, v) = kv.split_once('=').unwrap();
            (k.to_string(), v.to_string())
        })
        .collect()
}

fn field(fields: &[(String, String)], key: &str) -> String {
    fields.iter().find(|(k, _)| k == key).unwrap().1.clone()
}

#[test]
fn heuristic_on_the_pair_reaches_the_optimum() {
    let dir = Scratch::new("heuristic");
    let o = run(&["heuristic"], &dir.file("pair.txt", PAIR));
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# provenance "));
    let h = record(&text, "heuristic");
    assert_eq!(field(&h, "state"), "++");
    assert_eq!(field(&h, "energy"), "4");
    assert_eq!(field(&h, "stable"), "true");
    let exact = record(&text, "exact");
    assert_eq!(field(&exact, "optimum"), "4");
    assert_eq!(field(&exact, "attained"), "true");
    assert_eq!(field(&exact, "relative_gap"), "0");
}

#[test]
fn brute_lists_canonical_optimizers() {
    let dir = Scratch::new("brute");
    let o = run(&["brute"], &dir.file("pair.txt", PAIR));
    let text = stdout(&o);
    assert_eq!(field(&record(&text, "optimum"), "value"), "4");
    assert_eq!(field(&record(&text, "optimizer"), "vector"), "++");

    let o = run(&["brute", "--sense", "min"], &dir.file("pair.txt", PAIR));
    let text = stdout(&o);
    assert_eq!(field(&record(&text, "optimum"), "value"), "-4");
    assert_eq!(field(&record(&text, "optimizer"), "vector"), "+-");
}

#[test]
fn mincut_scopes_on_two_triangles() {
    let dir = Scratch::new("mincut");
    let g = dir.file("g.txt", TWO_TRIANGLES);
    let all = stdout(&run(&["mincut", "--exact"], &g));
    assert_eq!(field(&record(&all, "exact"), "weight"), "0");
    let nontrivial = stdout(&run(&["mincut", "--exact", "--nontrivial"], &g));
    let exact = record(&nontrivial, "exact");
    assert_eq!(field(&exact, "weight"), "0.1");
    assert_eq!(field(&exact, "partition"), "+++---");
}

#[test]
fn output_is_deterministic_for_a_seed() {
    let dir = Scratch::new("determinism");
    let m = dir.file("m.txt", "4\n0 1 -2 0.5\n1 0 1 -1\n-2 1 0 3\n0.5 -1 3 0\n");
    let args = ["--seed", "7", "dynamics", "--mode", "random"];
    let a = run(&args, &m);
    let b = run(&args, &m);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["--seed", "7", "heuristic", "--mode", "random"], &m);
    let d = run(&["--seed", "7", "heuristic", "--mode", "random"], &m);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn json_lines_parse() {
    let dir = Scratch::new("json");
    let o = run(&["--format", "json-lines", "heuristic"], &dir.file("pair.txt", PAIR));
    let records: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(records[0]["record"], "provenance");
    assert_eq!(records[0]["seed"], 0);
    let h = records.iter().find(|r| r["record"] == "heuristic").unwrap();
    assert_eq!(h["energy"], 4.0);
    assert_eq!(h["state"], "++");
}

#[test]
fn dynamics_export_has_one_line_per_sweep() {
    let dir = Scratch::new("export");
    let pair = dir.file("pair.txt", PAIR);
    let export = dir.0.join("trace.txt");
    let o = run(
        &["dynamics", "--start", "+-", "--export", export.to_str().unwrap()],
        &pair,
    );
    assert!(o.status.success());
    let trace = std::fs::read_to_string(&export).unwrap();
    assert_eq!(trace, "0, -4, +-\n1, 4, --\n2, 4, --\n");
}

#[test]
fn memory_matrix_round_trips_into_brute() {
    let dir = Scratch::new("memory");
    let o = run(&["memory"], &dir.file("p.txt", "++++\n+-+-\n"));
    assert!(o.status.success());
    let w = dir.file("w.txt", &stdout(&o));
    let text = stdout(&run(&["brute"], &w));
    assert_eq!(field(&record(&text, "optimum"), "value"), "8");
}

#[test]
fn exit_codes_separate_input_and_budget_failures() {
    let dir = Scratch::new("exit");
    let pair = dir.file("pair.txt", PAIR);
    assert_eq!(run(&["brute"], &dir.0.join("missing.txt")).status.code(), Some(1));
    assert_eq!(run(&["brute"], &dir.file("bad.txt", "2\n0 1\n")).status.code(), Some(1));
    assert_eq!(
        run(&["brute"], &dir.file("asym.txt", "2\n0 1\n2 0\n")).status.code(),
        Some(1)
    );
    assert_eq!(run(&["--budget", "1", "brute"], &pair).status.code(), Some(2));

    let o = Command::new(env!("CARGO_BIN_EXE_spincube"))
        .args(["brute"])
        .arg(&pair)
        .env("SPINCUBE_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget of 1"));
}
