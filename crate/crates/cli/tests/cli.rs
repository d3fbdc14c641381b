use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn program(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../programs").join(name)
}

fn loopmatch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loopmatch")).args(args).output().expect("run loopmatch")
}

fn repl(input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_loopmatch"))
        .arg("repl")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .current_dir(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../.."))
        .spawn()
        .expect("start repl");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn run_prints_one_value_per_expression() {
    let out = loopmatch(&["run", program("four-queens.egi").to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "{{2 4 1 3} {3 1 4 2}}\n");

    let out = loopmatch(&["run", program("comb.egi").to_str().unwrap()]);
    assert_eq!(stdout(&out), "{{1 2} {1 3} {2 3} {1 4} {2 4} {3 4}}\n{{1 2 3} {1 2 4} {1 3 4} {2 3 4}}\n");
}

#[test]
fn run_twin_primes() {
    let out = loopmatch(&["run", program("twin-primes.egi").to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "{[3 5] [5 7] [11 13] [17 19] [29 31] [41 43]}\n");
}

#[test]
fn errors_name_the_variable_and_set_exit_status() {
    let path = std::env::temp_dir().join(format!("loopmatch-unbound-{}.egi", std::process::id()));
    std::fs::write(&path, "(+ 1 2)\n(+ 1 missing)\n(* 2 3)\n").unwrap();
    let out = loopmatch(&["run", path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "3\n6\n");
    assert_eq!(stderr(&out), "error at 2:1: unbound variable 'missing'\n");
}

#[test]
fn missing_file_fails() {
    let out = loopmatch(&["run", "no/such/file.egi"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("cannot read"));
}

#[test]
fn eval_expressions() {
    assert_eq!(stdout(&loopmatch(&["eval", "(between 1 4)"])), "{1 2 3 4}\n");
    assert_eq!(
        stdout(&loopmatch(&["eval", "(match-all {1 2 3} (list integer) [<join $xs $ys> [xs ys]])"])),
        "{[{} {1 2 3}] [{1} {2 3}] [{1 2} {3}] [{1 2 3} {}]}\n"
    );
}

#[test]
fn take_truncates_infinite_collections() {
    let out = loopmatch(&["eval", "(from 1)", "--take", "3"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "{1 2 3 ...}\n");
}

#[test]
fn parse_errors_report_position() {
    let out = loopmatch(&["eval", "(+ 1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error at 1:5: "), "{}", stderr(&out));
}

#[test]
fn trace_goes_to_standard_error() {
    let out = loopmatch(&["eval", "(match-all {1 2} (list integer) [<cons $x _> x])", "--trace"]);
    assert_eq!(stdout(&out), "{1}\n");
    assert!(stderr(&out).lines().any(|l| l.starts_with("sweep 0 ")));
}

#[test]
fn dump_ast_prints_without_evaluating() {
    let src = "(car {}) (match-all xs (list integer) [(loop $i [1 2] <cons $x_i ...> _) x])";
    let out = loopmatch(&["eval", src, "--dump-ast"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "(car {})\n(match-all xs (list integer) [(loop $i [1 {2} _] <cons $x_i ...> _) x])\n"
    );
}

#[test]
fn no_prelude_leaves_only_builtins() {
    let out = loopmatch(&["eval", "(take 2 {1 2 3})", "--no-prelude"]);
    assert_eq!(stdout(&out), "{1 2}\n");
    let out = loopmatch(&["eval", "(list integer)", "--no-prelude"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("'list'"));
}

#[test]
fn schedule_changes_only_result_order() {
    let src = "(comb 2 {1 2 3 4})";
    assert_eq!(stdout(&loopmatch(&["eval", src])), "{{1 2} {1 3} {2 3} {1 4} {2 4} {3 4}}\n");
    assert_eq!(
        stdout(&loopmatch(&["eval", src, "--schedule", "spawned-first"])),
        "{{1 2} {2 3} {1 3} {3 4} {2 4} {1 4}}\n"
    );
}

#[test]
fn repl_balances_brackets_across_lines() {
    let out = repl("(+ 1\n2)\n(define $sq (lambda [$x] (* x x)))\n(sq 7)\n:quit\n(sq 8)\n");
    assert!(out.status.success());
    assert_eq!(stdout(&out), "3\n49\n");
}

#[test]
fn repl_loads_files() {
    let out = repl(":load programs/comb.egi\n(comb 2 {1 2 3 4})\n");
    let lines: Vec<String> = stdout(&out).lines().map(String::from).collect();
    assert_eq!(lines.last().unwrap(), "{{1 2} {1 3} {2 3} {1 4} {2 4} {3 4}}");

    let out = repl(":load programs/nqueens.egi\n(n-queens 4)\n");
    assert_eq!(stdout(&out).lines().last().unwrap(), "{{|[1 2] [2 4] [3 1] [4 3]|} {|[1 3] [2 1] [3 4] [4 2]|}}");
}

#[test]
fn repl_continues_after_errors() {
    let out = repl("(car {})\n(+ 2 2)\n)\n(+ 3 3)\n");
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "4\n6\n");
    assert_eq!(stderr(&out).lines().count(), 2);
}
