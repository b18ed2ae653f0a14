//! Command-line behavior: exit codes, diagnostics format, traces, dumps.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fungen() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fungen"))
}

fn write_spec(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn check_reports_inexhaustive_warning_and_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "basic.lex", fungen_core::corpus::ABC_LEX);
    let output = fungen().arg("check").arg(&spec).output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    let err = stderr(&output);
    let warnings: Vec<&str> = err.lines().collect();
    assert_eq!(warnings.len(), 1, "exactly one warning expected: {err}");
    assert!(warnings[0].contains("warning: inexhaustive function `f`"));
    // Diagnostics carry the editor-friendly file:line:col: prefix.
    assert!(warnings[0].starts_with(&format!("{}:5:1:", spec.display())));
}

#[test]
fn check_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "bad.lex",
        "rust\nname L\nalphabet 999\nfunction f : t =\n  epsilon => fin\n",
    );
    let output = fungen().arg("check").arg(&spec).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("error: alphabet 999 outside [1, 256]"));
}

#[test]
fn usage_errors_exit_2() {
    let output = fungen().arg("nonsense").output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    let output = fungen().arg("run").arg("x.lex").output().unwrap();
    assert_eq!(output.status.code(), Some(2), "run requires --input");
}

#[test]
fn yacc_without_precedence_is_refused_with_conflict_report() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "arith.yacc", fungen_core::corpus::ARITH_PARSE);
    let output = fungen()
        .current_dir(dir.path())
        .arg("yacc")
        .arg(&spec)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let err = stderr(&output);
    assert!(err.contains("unresolved shift-reduce conflict"));
    assert!(err.contains("on `PLUS`"));
    assert!(err.contains("on `TIMES`"));
    assert!(!dir.path().join("arith_parse_fun.rs").exists());
}

#[test]
fn yacc_with_precedence_writes_module() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "arith.yacc", fungen_core::corpus::ARITH_PREC_PARSE);
    let output = fungen()
        .current_dir(dir.path())
        .arg("yacc")
        .arg(&spec)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    assert!(dir.path().join("arith_parse_fun.rs").exists());
}

#[test]
fn yacc_default_flag_applies_classic_resolution_with_warnings() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "arith.yacc", fungen_core::corpus::ARITH_PARSE);
    let output = fungen()
        .current_dir(dir.path())
        .arg("yacc")
        .arg(&spec)
        .arg("--yacc-default")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    assert!(stderr(&output).contains("warning: shift-reduce conflict"));
    assert!(dir.path().join("arith_parse_fun.rs").exists());
}

#[test]
fn backend_mismatch_warns_on_generation() {
    let dir = tempfile::tempdir().unwrap();
    let sml_spec = fungen_core::corpus::ABC_LEX.replacen("rust\n", "sml\n", 1);
    let spec = write_spec(dir.path(), "basic.lex", &sml_spec);
    let output = fungen()
        .current_dir(dir.path())
        .arg("lex")
        .arg(&spec)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert!(stderr(&output).contains("warning: spec requests backend `sml`; generating `rust`"));
    // `check` validates only; it selects no backend and so never warns here.
    let output = fungen().arg("check").arg(&spec).output().unwrap();
    assert!(!stderr(&output).contains("backend"));

    let output = fungen()
        .arg("lex")
        .arg(&spec)
        .arg("--backend")
        .arg("ocaml")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn run_traces_calc_lexer() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "calc.lex", fungen_core::corpus::CALC_LEX);
    let input = write_spec(dir.path(), "input.txt", "1+2*3");
    let output = fungen()
        .arg("run")
        .arg(&spec)
        .arg("--input")
        .arg(&input)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(
        stdout(&output),
        "number \"1\"\nplus \"+\"\nnumber \"2\"\ntimes \"*\"\nnumber \"3\"\neof \"\"\n"
    );
}

#[test]
fn run_traces_parser_reductions() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "calc.yacc", fungen_core::corpus::CALC_PARSE);
    let input = write_spec(dir.path(), "tokens.txt", "NUMBER:5");
    let output = fungen()
        .arg("run")
        .arg(&spec)
        .arg("--input")
        .arg(&input)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    assert_eq!(stdout(&output), "number_atom\natom_factor\nfactor_term\naccept\n");

    let input = write_spec(dir.path(), "bad.txt", "PLUS");
    let output = fungen()
        .arg("run")
        .arg(&spec)
        .arg("--input")
        .arg(&input)
        .output()
        .unwrap();
    assert_eq!(stdout(&output), "!syntax-error\n");
}

#[test]
fn run_selects_lexing_function() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "two.lex", fungen_core::corpus::TWO_TYPES_LEX);
    let input = write_spec(dir.path(), "input.txt", "bd");
    let output = fungen()
        .arg("run")
        .arg(&spec)
        .arg("--input")
        .arg(&input)
        .arg("--function")
        .arg("g")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(stdout(&output), "bcbd \"bd\"\nerror \"\"\n");
}

#[test]
fn run_overrides_start_symbol_for_parsers() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "calc.yacc", fungen_core::corpus::CALC_PARSE);
    // NUMBER TIMES NUMBER is a Factor but not an Atom.
    let input = write_spec(dir.path(), "tokens.txt", "NUMBER:2 TIMES NUMBER:3");
    let output = fungen()
        .arg("run")
        .arg(&spec)
        .arg("--input")
        .arg(&input)
        .arg("--function")
        .arg("Factor")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    assert!(stdout(&output).ends_with("times_factor\naccept\n"));

    let output = fungen()
        .arg("run")
        .arg(&spec)
        .arg("--input")
        .arg(&input)
        .arg("--function")
        .arg("Atom")
        .output()
        .unwrap();
    assert_eq!(stdout(&output), "number_atom\n!syntax-error\n");
}

#[test]
fn dump_dfa_is_stable_text() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "basic.lex", fungen_core::corpus::ABC_LEX);
    let output = fungen().arg("dump-dfa").arg(&spec).output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(
        stdout(&output),
        "function f\n0 - 97->1\n1 - 97->2 98->3 99->4\n2 0\n3 - 98->3 99->4\n4 1\n"
    );
}

#[test]
fn dump_lr_lists_states_and_conflicts() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "arith.yacc", fungen_core::corpus::ARITH_PARSE);
    let output = fungen().arg("dump-lr").arg(&spec).output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    let text = stdout(&output);
    assert!(text.contains("state 0\n  kernel: Term' -> . Term"));
    assert!(text.contains("conflicts: 4"));
    assert!(text.contains("shift-reduce"));
    assert!(text.contains("unresolved"));
}
