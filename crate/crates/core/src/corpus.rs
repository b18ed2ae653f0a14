//! The example specifications shipped with the tool, embedded for use in
//! tests, documentation, and the guide. The files live under `specs/`.

/// One lexing function `f : t` with arms `aa` and `ab*c`; inexhaustive, so
/// generation synthesizes a lexical-error handler.
pub const ABC_LEX: &str = include_str!("../specs/abc.lex");

/// Two lexing functions of distinct result types; `g` carries an epsilon arm
/// acting as its error handler.
pub const TWO_TYPES_LEX: &str = include_str!("../specs/two_types.lex");

/// Splits letter words on whitespace; its actions reinvoke the lexer through
/// the `self` record.
pub const WORDS_LEX: &str = include_str!("../specs/words.lex");

/// The calculator lexer: numbers, operators, whitespace, and an epsilon arm
/// that stops at the first illegal character.
pub const CALC_LEX: &str = include_str!("../specs/calc.lex");

/// The calculator grammar, layered so precedence needs no declarations.
pub const CALC_PARSE: &str = include_str!("../specs/calc.yacc");

/// A deliberately ambiguous arithmetic grammar; table construction reports
/// shift-reduce conflicts on PLUS and TIMES.
pub const ARITH_PARSE: &str = include_str!("../specs/arith.yacc");

/// The same grammar with `left PLUS` / `left TIMES`, which resolves every
/// conflict.
pub const ARITH_PREC_PARSE: &str = include_str!("../specs/arith_prec.yacc");
