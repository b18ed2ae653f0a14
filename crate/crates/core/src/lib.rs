//! Lexer and parser generation without disembodied code.
//!
//! Classic generator tools splice user-written action snippets into their
//! output, so the host compiler first sees that code torn out of context,
//! buried in generated source. This library takes the opposite route: from a
//! specification that names actions but never contains code, it emits a
//! single closed module parameterized over an action interface. Users
//! instantiate the module with ordinary code in their own files, where the
//! host compiler checks every action against its declared signature and
//! reports errors at the instantiation site.
//!
//! The pipeline:
//!
//! 1. [`spec`] parses and validates the two specification formats.
//! 2. [`automata`] compiles lexing functions to prioritized DFAs and defines
//!    longest-match execution.
//! 3. [`lr`] builds LALR(1) tables with a conflict ledger and Yacc-style
//!    precedence resolution.
//! 4. [`codegen`] renders the parameterized module, backed by the lazy
//!    stream runtime in `fungen_stream`.
//!
//! ```
//! use fungen_core::{automata, codegen, spec};
//!
//! let parsed = spec::parse_lex_spec(fungen_core::corpus::CALC_LEX).unwrap();
//! let resolved = spec::resolve_sets(&parsed).unwrap();
//! assert!(spec::validate_lex_spec(&resolved).iter().all(|d| !d.is_error()));
//!
//! let dfas = automata::build_function_dfas(&resolved);
//! let module = codegen::render_lexer(&resolved, &dfas);
//! assert_eq!(codegen::hygiene_scan(&module), Vec::<String>::new());
//! ```

pub mod automata;
pub mod codegen;
pub mod corpus;
pub mod diag;
pub mod lr;
pub mod spec;
pub mod sre;
