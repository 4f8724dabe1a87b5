use std::path::PathBuf;
use std::process::{Command, Output};

fn ni(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ni")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ni-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

const X: &str = "A<C<B<C<B<A<B<A<C";

#[test]
fn solve_prints_the_minimal_dice() {
    let o = ni(&["solve", X]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "A: 1 6 8\nB: 3 5 7\nC: 2 4 9\n");
}

#[test]
fn enum_line_count_matches_the_oracle() {
    let listed = ni(&["enum", "--descriptor", "[3D3S]", "--mode", "irreducible"]);
    let oracle = ni(&["oracle", "--dice", "3", "--sides", "3", "--max", "9"]);
    assert!(listed.status.success() && oracle.status.success());
    assert_eq!(stdout(&listed).lines().count(), 25);
    let mut a: Vec<String> = stdout(&listed).lines().map(String::from).collect();
    let mut b: Vec<String> = stdout(&oracle).lines().map(String::from).collect();
    a.sort();
    b.sort();
    assert_eq!(a, b);
}

#[test]
fn enum_output_is_byte_stable_across_job_counts() {
    let one = ni(&["enum", "--descriptor", "[3D4S]", "--format", "csv", "--jobs", "1"]);
    let four = ni(&["enum", "--descriptor", "[3D4S]", "--format", "csv", "--jobs", "4"]);
    assert_eq!(one.stdout, four.stdout);
    let text = stdout(&one);
    let mut rows = text.lines();
    assert_eq!(rows.next(), Some("index,viable_index,gap,identity"));
    assert_eq!(rows.count(), 522);
}

#[test]
fn json_records_carry_gaps() {
    let o = ni(&["enum", "--descriptor", "[3D3S]", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let records = v.as_array().unwrap();
    assert_eq!(records.len(), 25);
    assert_eq!(records[0]["viable_index"], 4412);
    assert!(records[0]["gap"].is_null());
    assert_eq!(records[1]["gap"], 42);
}

#[test]
fn list_files_feed_other_commands() {
    let path = scratch("three.txt");
    let o = ni(&["enum", "--descriptor", "[3D3S]", "--out", path.to_str().unwrap()]);
    assert!(o.status.success() && o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# [3D3S] irreducible\n"));
    let parsed = ni(&["parse", "--input", path.to_str().unwrap()]);
    assert_eq!(stdout(&parsed).lines().count(), 25);
    assert!(stdout(&parsed).lines().all(|l| l.ends_with("[3D3S]\tirreducible")));
    let zero = ni(&["expand", "add-zero", "--input", path.to_str().unwrap()]);
    assert!(zero.status.success(), "{}", stderr(&zero));
    assert_eq!(stdout(&zero).lines().count(), 25);
}

#[test]
fn check_reports_a_pattern_mismatch() {
    let standard = scratch("standard.txt");
    std::fs::write(&standard, "A: 1 2 3 4 5 6\nB: 1 2 3 4 5 6\nC: 1 2 3 4 5 6\n").unwrap();
    let o = ni(&["check", standard.to_str().unwrap(), "--descriptor", "[3D6S]"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("win pattern mismatch"));

    let good = scratch("good.txt");
    std::fs::write(&good, "A: 1 10 14\nB: 7 9 13\nC: 4 8 22\n").unwrap();
    let o = ni(&["check", good.to_str().unwrap(), "--descriptor", "[3D3S]"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), format!("{X}\n"));
}

#[test]
fn usage_and_domain_errors_exit_differently() {
    assert_eq!(ni(&["solve", "A<<B"]).status.code(), Some(2));
    assert_eq!(ni(&["enum", "--descriptor", "[3D3S]", "--mode", "sideways"]).status.code(), Some(2));
    assert_eq!(ni(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(ni(&["solve", "A<B<B"]).status.code(), Some(1));
    assert_eq!(ni(&["compose", "--spec", "/nonexistent/spec.txt"]).status.code(), Some(1));
}

#[test]
fn large_universes_need_the_long_run_flag() {
    let o = ni(&["enum", "--descriptor", "[5D3S:]"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--long-run"));
    let o = ni(&["enum", "--descriptor", "[5D3S:]", "--long-run", "--jobs", "4"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 325);
}

#[test]
fn expansions_verify_their_output() {
    let o = ni(&["expand", "mul-one", X]);
    assert_eq!(stdout(&o), "A=A<C=C<B=B<C=C<B=B<A=A<B=B<A=A<C=C\n");
    let o = ni(&["expand", "--raw", "mul-one", "--joiner", "<", X]);
    assert_eq!(stdout(&o), "A<A<C<C<B<B<C<C<B<B<A<A<B<B<A<A<C<C\n");
    let o = ni(&["expand", "add", X, X, "--joiners", "="]);
    assert_eq!(stdout(&o), "A<C<B<C<B<A<B<A<A=C<C<B<C<B<A<B<A<C\n");
    let o = ni(&["expand", "nest-faces", X, X]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim().matches(['<', '=']).count(), 80);
    // a transitive identity cannot be expanded
    let o = ni(&["expand", "add-zero", "A<A<A<B<B<B<C<C<C"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn decompose_output_composes_back() {
    let five = "A<D<B<E<C<E<D<C<B<A<C<B<A<E<D";
    let spec = scratch("spec.txt");
    let o = ni(&["decompose", five]);
    assert!(stdout(&o).contains("BDE@D: A<C<B<B<A<C<C<B<A"));
    std::fs::write(&spec, o.stdout).unwrap();
    let o = ni(&["compose", "--spec", spec.to_str().unwrap()]);
    assert_eq!(stdout(&o), format!("{five}\n"));
    let moved = ni(&["relabel", five]);
    let back = ni(&["relabel", "--from", "[5D:1]", "--to", "[5D:]", stdout(&moved).trim()]);
    assert_eq!(stdout(&back), format!("{five}\n"));
}

#[test]
fn analyze_finds_the_gap_motif() {
    let o = ni(&["analyze", "gaps", "--descriptor", "[3D3S]"]);
    assert!(stdout(&o).starts_with("42, 10, 7, 7, 1282"));
    let o = ni(&["analyze", "repeats", "--descriptor", "[3D3S]", "--min-reps", "3"]);
    assert!(stdout(&o).starts_with("42,10,7,7\trepeats 3\tpartial 2"));
    let o = ni(&["analyze", "repeats", "--descriptor", "[3D3S]", "--mode", "duplicative", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["repetitions"], 13);
    assert_eq!(v[0]["preceded_by"]["32"], 10);
}

#[test]
fn oracle_respects_the_budget() {
    let o = Command::new(env!("CARGO_BIN_EXE_ni")).args(["oracle"]).env("NI_BUDGET", "100").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("NI_BUDGET"));
}
