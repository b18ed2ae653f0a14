//! The `fungen` command line: check specs, dump automata and tables,
//! generate modules, and run the interpreter path used as a testing oracle.
//!
//! Exit codes: 0 on success, 1 when a spec carries error diagnostics (or a
//! file cannot be read), 2 on usage errors. Diagnostics print to stderr as
//! `file:line:col: severity: message`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fungen_core::automata::{self, MatchResult};
use fungen_core::codegen::{backend_by_name, Backend, GeneratedModule};
use fungen_core::diag::{has_errors, Diagnostic};
use fungen_core::lr::{self, Token};
use fungen_core::spec::{self, LexSpec, ParseSpec, SpecKind};
use fungen_stream::{from_list, front, Front};

mod trace;

#[derive(Parser)]
#[command(name = "fungen", version, about = "Lexer and parser generation as closed parameterized modules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GenerateArgs {
    /// Specification file.
    spec: PathBuf,
    /// Output path (default: derived from the spec's `name` directive).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Target backend; the spec's backend line is advisory metadata.
    #[arg(long, default_value = "rust")]
    backend: String,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a spec, printing its diagnostics.
    Check {
        /// Specification file (kind detected from its directives).
        spec: PathBuf,
    },
    /// Generate a lexer module from a lexer spec.
    Lex {
        #[command(flatten)]
        args: GenerateArgs,
    },
    /// Generate a parser module from a parser spec.
    Yacc {
        #[command(flatten)]
        args: GenerateArgs,
        /// Resolve remaining conflicts the classic way (shift wins, earliest
        /// production wins) with a warning-level report.
        #[arg(long)]
        yacc_default: bool,
    },
    /// Print the minimized DFA of each lexing function.
    DumpDfa {
        spec: PathBuf,
    },
    /// Print the LALR(1) states, tables, and conflict report.
    DumpLr {
        spec: PathBuf,
        #[arg(long)]
        yacc_default: bool,
    },
    /// Interpret a spec against an input file and print the action trace.
    Run {
        spec: PathBuf,
        /// Input data: raw bytes for lexers, whitespace-separated
        /// `NAME` / `NAME:payload` tokens for parsers.
        #[arg(long)]
        input: PathBuf,
        /// Lexing function to drive, or start nonterminal for parser specs
        /// (defaults: the first function declared / the spec's `start`).
        #[arg(long)]
        function: Option<String>,
        #[arg(long)]
        yacc_default: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}

const FAIL: ExitCode = ExitCode::FAILURE;

fn run(cli: Cli) -> Result<(), ExitCode> {
    match cli.command {
        Command::Check { spec } => check(&spec),
        Command::Lex { args } => generate_lexer(&args),
        Command::Yacc { args, yacc_default } => generate_parser(&args, yacc_default),
        Command::DumpDfa { spec } => dump_dfa(&spec),
        Command::DumpLr { spec, yacc_default } => dump_lr(&spec, yacc_default),
        Command::Run {
            spec,
            input,
            function,
            yacc_default,
        } => run_interpreter(&spec, &input, function.as_deref(), yacc_default),
    }
}

fn read_file(path: &Path) -> Result<String, ExitCode> {
    std::fs::read_to_string(path).map_err(|err| {
        eprintln!("fungen: error: cannot read {}: {err}", path.display());
        FAIL
    })
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, ExitCode> {
    std::fs::read(path).map_err(|err| {
        eprintln!("fungen: error: cannot read {}: {err}", path.display());
        FAIL
    })
}

fn report(path: &Path, diags: &[Diagnostic]) {
    for diag in diags {
        eprintln!("{}:{diag}", path.display());
    }
}

fn detect(path: &Path, text: &str) -> Result<SpecKind, ExitCode> {
    spec::detect_kind(text).ok_or_else(|| {
        eprintln!(
            "{}:1:1: error: cannot tell whether this is a lexer or parser spec (no kind-specific directive found)",
            path.display()
        );
        FAIL
    })
}

/// Parse + resolve + validate a lexer spec, including backend name checks.
/// Error diagnostics abort; warnings are printed and tolerated.
fn load_lex_spec(path: &Path, backend: &dyn Backend) -> Result<LexSpec, ExitCode> {
    let text = read_file(path)?;
    let parsed = spec::parse_lex_spec(&text).map_err(|diags| {
        report(path, &diags);
        FAIL
    })?;
    let resolved = spec::resolve_sets(&parsed).map_err(|diags| {
        report(path, &diags);
        FAIL
    })?;
    let mut diags = spec::validate_lex_spec(&resolved);
    diags.extend(backend.check_lex_names(&resolved));
    report(path, &diags);
    if has_errors(&diags) {
        return Err(FAIL);
    }
    Ok(resolved)
}

fn load_parse_spec(path: &Path, backend: &dyn Backend) -> Result<ParseSpec, ExitCode> {
    let text = read_file(path)?;
    let parsed = spec::parse_parse_spec(&text).map_err(|diags| {
        report(path, &diags);
        FAIL
    })?;
    let mut diags = spec::validate_parse_spec(&parsed);
    diags.extend(backend.check_parse_names(&parsed));
    report(path, &diags);
    if has_errors(&diags) {
        return Err(FAIL);
    }
    Ok(parsed)
}

fn check(path: &Path) -> Result<(), ExitCode> {
    let text = read_file(path)?;
    let backend = fungen_core::codegen::default_backend();
    match detect(path, &text)? {
        SpecKind::Lex => load_lex_spec(path, backend).map(|_| ()),
        SpecKind::Parse => load_parse_spec(path, backend).map(|_| ()),
    }
}

fn select_backend(path: &Path, name: &str, spec_backend: &str) -> Result<&'static dyn Backend, ExitCode> {
    let backend = backend_by_name(name).ok_or_else(|| {
        eprintln!("fungen: error: unknown backend `{name}` (available: rust)");
        ExitCode::from(2)
    })?;
    if spec_backend != backend.name() {
        eprintln!(
            "{}:1:1: warning: spec requests backend `{spec_backend}`; generating `{}`",
            path.display(),
            backend.name()
        );
    }
    Ok(backend)
}

fn write_module(output: Option<&Path>, module: &GeneratedModule) -> Result<(), ExitCode> {
    let out_path = output
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from(module.file_name()));
    std::fs::write(&out_path, &module.source).map_err(|err| {
        eprintln!("fungen: error: cannot write {}: {err}", out_path.display());
        FAIL
    })?;
    eprintln!("fungen: wrote {}", out_path.display());
    Ok(())
}

fn generate_lexer(args: &GenerateArgs) -> Result<(), ExitCode> {
    let text = read_file(&args.spec)?;
    let parsed = spec::parse_lex_spec(&text).map_err(|diags| {
        report(&args.spec, &diags);
        FAIL
    })?;
    let backend = select_backend(&args.spec, &args.backend, &parsed.backend)?;
    let resolved = load_lex_spec(&args.spec, backend)?;
    let dfas = automata::build_function_dfas(&resolved);
    let module = backend.render_lexer(&resolved, &dfas);
    write_module(args.output.as_deref(), &module)
}

/// Builds conflict-resolved tables for a parser spec; unresolved conflicts
/// are fatal unless the classic defaults were requested.
fn build_tables(
    path: &Path,
    parsed: &ParseSpec,
    yacc_default: bool,
) -> Result<(lr::Grammar, lr::LrTables), ExitCode> {
    let grammar = lr::to_grammar(parsed);
    let tables = lr::build_lalr(&grammar);
    let tables = lr::apply_precedence(&tables, &grammar, &parsed.precedences);
    if !tables.has_unresolved_conflicts() {
        return Ok((grammar, tables));
    }
    if yacc_default {
        for conflict in tables.unresolved_conflicts() {
            eprintln!(
                "{}:1:1: warning: {} conflict in state {} on `{}` resolved by default rule",
                path.display(),
                conflict_kind_name(conflict.kind),
                conflict.state,
                grammar.lookahead_name(conflict.lookahead)
            );
        }
        let tables = lr::apply_yacc_defaults(&tables);
        Ok((grammar, tables))
    } else {
        for conflict in tables.unresolved_conflicts() {
            eprintln!(
                "{}:1:1: error: unresolved {} conflict in state {} on `{}`; declare precedences or refactor the grammar",
                path.display(),
                conflict_kind_name(conflict.kind),
                conflict.state,
                grammar.lookahead_name(conflict.lookahead)
            );
        }
        Err(FAIL)
    }
}

fn conflict_kind_name(kind: lr::ConflictKind) -> &'static str {
    match kind {
        lr::ConflictKind::ShiftReduce => "shift-reduce",
        lr::ConflictKind::ReduceReduce => "reduce-reduce",
    }
}

fn generate_parser(args: &GenerateArgs, yacc_default: bool) -> Result<(), ExitCode> {
    let text = read_file(&args.spec)?;
    let parsed = spec::parse_parse_spec(&text).map_err(|diags| {
        report(&args.spec, &diags);
        FAIL
    })?;
    let backend = select_backend(&args.spec, &args.backend, &parsed.backend)?;
    let parsed = load_parse_spec(&args.spec, backend)?;
    let (grammar, tables) = build_tables(&args.spec, &parsed, yacc_default)?;
    let module = backend.render_parser(&parsed, &grammar, &tables).map_err(|diags| {
        report(&args.spec, &diags);
        FAIL
    })?;
    write_module(args.output.as_deref(), &module)
}

fn dump_dfa(path: &Path) -> Result<(), ExitCode> {
    let backend = fungen_core::codegen::default_backend();
    let resolved = load_lex_spec(path, backend)?;
    let dfas = automata::build_function_dfas(&resolved);
    for (function, dfa) in resolved.functions.iter().zip(dfas.iter()) {
        println!("function {}", function.name);
        print!("{}", automata::dump_dfa(dfa));
    }
    Ok(())
}

fn dump_lr(path: &Path, yacc_default: bool) -> Result<(), ExitCode> {
    let backend = fungen_core::codegen::default_backend();
    let parsed = load_parse_spec(path, backend)?;
    let grammar = lr::to_grammar(&parsed);
    let tables = lr::build_lalr(&grammar);
    let mut tables = lr::apply_precedence(&tables, &grammar, &parsed.precedences);
    if yacc_default {
        tables = lr::apply_yacc_defaults(&tables);
    }
    print!("{}", lr::dump_lr(&tables, &grammar));
    Ok(())
}

fn run_interpreter(
    path: &Path,
    input: &Path,
    function: Option<&str>,
    yacc_default: bool,
) -> Result<(), ExitCode> {
    let text = read_file(path)?;
    let backend = fungen_core::codegen::default_backend();
    match detect(path, &text)? {
        SpecKind::Lex => {
            let resolved = load_lex_spec(path, backend)?;
            let dfas = automata::build_function_dfas(&resolved);
            let index = match function {
                Some(name) => resolved
                    .functions
                    .iter()
                    .position(|f| f.name == name)
                    .ok_or_else(|| {
                        eprintln!("{}:1:1: error: no lexing function named `{name}`", path.display());
                        FAIL
                    })?,
                None => 0,
            };
            let data = read_bytes(input)?;
            print!("{}", lex_trace(&resolved, &dfas[index], index, data));
            Ok(())
        }
        SpecKind::Parse => {
            let mut parsed = load_parse_spec(path, backend)?;
            if let Some(name) = function {
                if !parsed.nonterminals.iter().any(|nt| nt.name == name) {
                    eprintln!("{}:1:1: error: no nonterminal named `{name}`", path.display());
                    return Err(FAIL);
                }
                parsed.start = name.to_string();
            }
            let (grammar, tables) = build_tables(path, &parsed, yacc_default)?;
            let data = read_file(input)?;
            let tokens = parse_token_text(path, &parsed, &data)?;
            print!("{}", parse_trace(&grammar, &tables, tokens));
            Ok(())
        }
    }
}

/// Drives repeated longest matches over the whole input and renders one line
/// per action invocation. A zero-length match (an epsilon arm) ends the
/// trace, since continuing from the same position would loop forever.
/// `NoMatch` at the very end of input ends the trace silently; mid-input it
/// is the synthesized lexical error.
fn lex_trace(spec: &LexSpec, dfa: &automata::Dfa, function: usize, data: Vec<u8>) -> String {
    let arms = &spec.functions[function].arms;
    let mut out = String::new();
    let mut cur = from_list(data);
    loop {
        let at_end = matches!(front(&cur), Front::Nil);
        match automata::run_longest(dfa, &cur) {
            MatchResult::NoMatch => {
                if !at_end {
                    out.push_str("!lexical-error\n");
                }
                break;
            }
            MatchResult::Matched(m) => {
                out.push_str(&format!(
                    "{} \"{}\"\n",
                    arms[m.arm as usize].action,
                    trace::escape_bytes(&m.consumed)
                ));
                if m.consumed.is_empty() {
                    break;
                }
                cur = m.follow;
            }
        }
    }
    out
}

/// `NAME` or `NAME:payload` per whitespace-separated word.
fn parse_token_text(
    path: &Path,
    spec: &ParseSpec,
    text: &str,
) -> Result<Vec<Token<String>>, ExitCode> {
    let mut tokens = Vec::new();
    for word in text.split_whitespace() {
        let (name, payload) = match word.split_once(':') {
            Some((name, payload)) => (name, Some(payload.to_string())),
            None => (word, None),
        };
        let Some(terminal) = spec.terminals.iter().position(|t| t.name == name) else {
            eprintln!("{}:1:1: error: unknown terminal `{name}` in input", path.display());
            return Err(FAIL);
        };
        let has_payload = spec.terminals[terminal].payload_type.is_some();
        match (&payload, has_payload) {
            (Some(_), false) => {
                eprintln!(
                    "{}:1:1: error: terminal `{name}` carries no payload but one was given",
                    path.display()
                );
                return Err(FAIL);
            }
            (None, true) => {
                eprintln!(
                    "{}:1:1: error: terminal `{name}` needs a payload (`{name}:<text>`)",
                    path.display()
                );
                return Err(FAIL);
            }
            _ => {}
        }
        tokens.push(Token {
            terminal,
            value: payload,
        });
    }
    Ok(tokens)
}

/// One line per reduction (the action name), then `accept` or
/// `!syntax-error`.
fn parse_trace(grammar: &lr::Grammar, tables: &lr::LrTables, tokens: Vec<Token<String>>) -> String {
    let mut lines = String::new();
    let result = lr::simulate_parse(
        tables,
        grammar,
        &from_list(tokens),
        |prod, _args| {
            lines.push_str(&grammar.productions[prod as usize].action);
            lines.push('\n');
            String::new()
        },
        |_rest| (),
    );
    match result {
        Ok(_) => lines.push_str("accept\n"),
        Err(()) => lines.push_str("!syntax-error\n"),
    }
    lines
}
