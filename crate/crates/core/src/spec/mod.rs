//! The specification frontend: parsing and validation of the two spec file
//! kinds (lexer and parser), with positioned diagnostics.
//!
//! Both formats begin with a backend identifier line and a `name` directive.
//! Lexer specs then declare an `alphabet`, optional named `set`s, and one or
//! more lexing `function`s whose arms pair an SRE regular expression with an
//! action name. Parser specs declare `terminal`s (optionally carrying a
//! payload type), `nonterminal`s with productions whose numbered right-hand
//! sides select and order action arguments, optional precedence lines, and a
//! `start` symbol. Specs never contain action code, only action names.
//!
//! ```
//! use fungen_core::spec;
//!
//! let parsed = spec::parse_lex_spec(fungen_core::corpus::WORDS_LEX).unwrap();
//! let resolved = spec::resolve_sets(&parsed).unwrap();
//! assert_eq!(resolved.alphabet, 128);
//! assert_eq!(resolved.functions[0].arms.len(), 2);
//!
//! // No arm matches the empty prefix: inexhaustive, a warning rather than
//! // an error. Generation will synthesize a lexical-error handler.
//! let diags = spec::validate_lex_spec(&resolved);
//! assert!(diags.iter().all(|d| !d.is_error()));
//! assert!(diags[0].message.starts_with("inexhaustive function `f`"));
//! ```

mod cursor;
mod lexspec;
mod parsespec;
mod token;

pub use token::{tokenize, Tok};

use crate::diag::{Diagnostic, Pos};
use crate::sre::{CharSet, SRegex};

pub use lexspec::{parse_lex_spec, print_lex_spec, resolve_sets, validate_lex_spec};
pub use parsespec::{parse_parse_spec, print_parse_spec, validate_parse_spec};

/// Words with directive meaning at the top level of a spec file. They cannot
/// be used as user identifiers inside specs.
pub const KEYWORDS: &[&str] = &[
    "name",
    "alphabet",
    "set",
    "function",
    "terminal",
    "nonterminal",
    "start",
    "left",
    "right",
    "nonassoc",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

/// A validated lexer specification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexSpec {
    /// Backend identifier from the first line; advisory metadata.
    pub backend: String,
    pub module_name: String,
    /// Symbol codes run over `[0, alphabet)`; between 1 and 256.
    pub alphabet: u16,
    /// Named character sets in declaration order.
    pub sets: Vec<(String, CharSet)>,
    pub functions: Vec<LexFn>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexFn {
    pub name: String,
    pub result_type: String,
    pub arms: Vec<Arm>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arm {
    pub regex: SRegex,
    pub action: String,
    pub pos: Pos,
}

/// A validated parser specification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseSpec {
    pub backend: String,
    pub module_name: String,
    pub terminals: Vec<TerminalDecl>,
    pub nonterminals: Vec<NonterminalDecl>,
    pub start: String,
    pub start_pos: Pos,
    /// Precedence lines in declaration order; later lines bind tighter.
    pub precedences: Vec<PrecDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerminalDecl {
    pub name: String,
    pub payload_type: Option<String>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonterminalDecl {
    pub name: String,
    pub result_type: String,
    pub productions: Vec<ProductionDecl>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductionDecl {
    pub rhs: Vec<RhsItem>,
    pub action: String,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhsItem {
    pub symbol: String,
    /// 1-based argument slot, for symbols whose value is passed to the action.
    pub position: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assoc {
    Left,
    Right,
    NonAssoc,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrecDecl {
    pub assoc: Assoc,
    pub terminals: Vec<String>,
    pub pos: Pos,
}

/// Which kind of specification a file contains, judged from its directives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecKind {
    Lex,
    Parse,
}

/// Classifies a spec source by its first kind-specific directive.
pub fn detect_kind(text: &str) -> Option<SpecKind> {
    let tokens = match tokenize(text) {
        Ok(src) => src.tokens,
        Err(_) => return detect_kind_raw(text),
    };
    for spanned in &tokens {
        if let Tok::Ident(word) = &spanned.tok {
            match word.as_str() {
                "alphabet" | "function" | "set" => return Some(SpecKind::Lex),
                "terminal" | "nonterminal" | "start" => return Some(SpecKind::Parse),
                _ => {}
            }
        }
    }
    None
}

fn detect_kind_raw(text: &str) -> Option<SpecKind> {
    for word in text.split_whitespace() {
        match word {
            "alphabet" | "function" | "set" => return Some(SpecKind::Lex),
            "terminal" | "nonterminal" | "start" => return Some(SpecKind::Parse),
            _ => {}
        }
    }
    None
}

pub(crate) fn err(
    diags: &mut Vec<Diagnostic>,
    message: impl Into<String>,
    pos: Pos,
) {
    diags.push(Diagnostic::error(message, pos));
}
