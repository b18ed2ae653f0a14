//! Emission of closed parameterized modules.
//!
//! A generated module depends on nothing but the stream runtime and an
//! explicit action interface; user actions are plugged in by implementing
//! that interface in ordinary code, where the host compiler checks them.
//! The emitted source is byte-deterministic for a given spec, embeds its
//! automaton or parse tables as integer-array literals, and keeps every
//! internal name behind the reserved `hyg_` prefix.
//!
//! One host backend ships (Rust); the [`Backend`] seam keeps the pipeline
//! independent of the target language.

mod rust;
mod scan;

pub use rust::RustBackend;
pub use scan::hygiene_scan;

use crate::automata::Dfa;
use crate::diag::Diagnostic;
use crate::lr::{Grammar, LrTables};
use crate::spec::{LexSpec, ParseSpec};

/// The typed interface a generated module abstracts over: one abstract type
/// per distinct result/payload type, one field per distinct action, plus the
/// pieces specific to lexers (the `self` record) and parsers (the terminal
/// type and the `error` action).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ActionInterface {
    /// Distinct type identifiers, in first-occurrence order.
    pub abstract_types: Vec<String>,
    /// Lexers: one entry per lexing function, name to result type; the shape
    /// of the `self` record every action receives.
    pub self_shape: Vec<(String, String)>,
    /// Lexers: action name to result type.
    pub lex_actions: Vec<(String, String)>,
    /// Parsers: declared terminals with payload types.
    pub terminals: Vec<(String, Option<String>)>,
    /// Parsers: action name to (argument types in slot order, result type).
    pub parse_actions: Vec<(String, Vec<String>, String)>,
    /// Parsers always carry the synthesized `error` action.
    pub has_error_action: bool,
}

/// An emitted module: its source text plus the interface it declares.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedModule {
    pub source: String,
    pub interface: ActionInterface,
    /// Exported entry points with human-readable signatures.
    pub exports: Vec<(String, String)>,
    /// Library the source depends on, and nothing else.
    pub required_runtime: String,
    /// The `name` directive, verbatim.
    pub module_name: String,
    /// Snake-case file stem it should be written to (`mod <this>;`).
    pub file_module: String,
}

impl GeneratedModule {
    pub fn file_name(&self) -> String {
        format!("{}.rs", self.file_module)
    }
}

/// A host-language backend behind the emission seam.
pub trait Backend {
    fn name(&self) -> &'static str;

    /// Rejects spec identifiers that cannot be host identifiers or would
    /// collide with the generated surface.
    fn check_lex_names(&self, spec: &LexSpec) -> Vec<Diagnostic>;
    fn check_parse_names(&self, spec: &ParseSpec) -> Vec<Diagnostic>;

    fn render_lexer(&self, spec: &LexSpec, dfas: &[Dfa]) -> GeneratedModule;

    /// Refuses with diagnostics while any conflict is unresolved.
    fn render_parser(
        &self,
        spec: &ParseSpec,
        grammar: &Grammar,
        tables: &LrTables,
    ) -> Result<GeneratedModule, Vec<Diagnostic>>;

    /// A minimal instantiation whose actions return defaults; compiling it
    /// against the module must produce zero host-compiler diagnostics.
    fn render_lexer_stub(&self, module: &GeneratedModule) -> String;
    fn render_parser_stub(&self, module: &GeneratedModule) -> String;
}

pub fn backend_by_name(name: &str) -> Option<&'static dyn Backend> {
    match name {
        "rust" => Some(&RustBackend),
        _ => None,
    }
}

/// The backend every release ships.
pub fn default_backend() -> &'static dyn Backend {
    &RustBackend
}

/// Renders a lexer module with the default backend. The spec must be
/// resolved and validated; `dfas` holds one minimized DFA per function in
/// declaration order.
pub fn render_lexer(spec: &LexSpec, dfas: &[Dfa]) -> GeneratedModule {
    RustBackend.render_lexer(spec, dfas)
}

/// Renders a parser module with the default backend; refuses if the tables
/// still carry unresolved conflicts.
pub fn render_parser(
    spec: &ParseSpec,
    grammar: &Grammar,
    tables: &LrTables,
) -> Result<GeneratedModule, Vec<Diagnostic>> {
    RustBackend.render_parser(spec, grammar, tables)
}

/// Hash of the canonical spec text, recorded in the generated header so the
/// output can be audited against the spec that produced it.
pub fn spec_hash(canonical_spec: &str) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(canonical_spec.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// `CalcLexFun` becomes `calc_lex_fun`: the module file stem.
pub fn snake_case(name: &str) -> String {
    let mut out = String::new();
    let mut prev_lower = false;
    for c in name.chars() {
        if c.is_ascii_uppercase() {
            if prev_lower {
                out.push('_');
            }
            out.push(c.to_ascii_lowercase());
            prev_lower = false;
        } else {
            out.push(c);
            prev_lower = c.is_ascii_lowercase() || c.is_ascii_digit();
        }
    }
    out
}
