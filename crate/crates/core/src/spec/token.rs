//! Tokenizer for specification files.
//!
//! The lexical grammar: identifiers are `[A-Za-z_][A-Za-z0-9_']*`; a
//! character literal `'c` denotes the code of the single following printable
//! non-space ASCII character; bare integers denote symbol codes; `/* */`
//! comments do not nest. Whitespace (including newlines) only separates
//! tokens.

use crate::diag::{Diagnostic, Pos};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(u32),
    CharLit(u16),
    LParen,
    RParen,
    Colon,
    Equals,
    Arrow,
    Star,
    Plus,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(name) => format!("identifier `{name}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::CharLit(c) => format!("character literal `{}`", crate::sre::print_code(*c)),
            Tok::LParen => "`(`".to_string(),
            Tok::RParen => "`)`".to_string(),
            Tok::Colon => "`:`".to_string(),
            Tok::Equals => "`=`".to_string(),
            Tok::Arrow => "`=>`".to_string(),
            Tok::Star => "`*`".to_string(),
            Tok::Plus => "`+`".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spanned {
    pub tok: Tok,
    pub pos: Pos,
}

#[derive(Debug)]
pub struct TokenizedSource {
    pub tokens: Vec<Spanned>,
    /// Position just past the last character, for end-of-input diagnostics.
    pub eof_pos: Pos,
}

pub fn tokenize(text: &str) -> Result<TokenizedSource, Vec<Diagnostic>> {
    let mut tokens = Vec::new();
    let mut diags = Vec::new();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let mut chars = text.chars().peekable();

    macro_rules! bump {
        () => {{
            let c = chars.next();
            match c {
                Some('\n') => {
                    line += 1;
                    col = 1;
                }
                Some(_) => col += 1,
                None => {}
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let pos = Pos::new(line, col);
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump!();
            }
            '/' => {
                bump!();
                if chars.peek() == Some(&'*') {
                    bump!();
                    let mut closed = false;
                    while let Some(c) = bump!() {
                        if c == '*' && chars.peek() == Some(&'/') {
                            bump!();
                            closed = true;
                            break;
                        }
                    }
                    if !closed {
                        diags.push(Diagnostic::error("unterminated comment", pos));
                    }
                } else {
                    diags.push(Diagnostic::error("unexpected character `/`", pos));
                }
            }
            '(' => {
                bump!();
                tokens.push(Spanned { tok: Tok::LParen, pos });
            }
            ')' => {
                bump!();
                tokens.push(Spanned { tok: Tok::RParen, pos });
            }
            ':' => {
                bump!();
                tokens.push(Spanned { tok: Tok::Colon, pos });
            }
            '*' => {
                bump!();
                tokens.push(Spanned { tok: Tok::Star, pos });
            }
            '+' => {
                bump!();
                tokens.push(Spanned { tok: Tok::Plus, pos });
            }
            '=' => {
                bump!();
                if chars.peek() == Some(&'>') {
                    bump!();
                    tokens.push(Spanned { tok: Tok::Arrow, pos });
                } else {
                    tokens.push(Spanned { tok: Tok::Equals, pos });
                }
            }
            '\'' => {
                bump!();
                match bump!() {
                    Some(lit) if (33..=126).contains(&(lit as u32)) => tokens.push(Spanned {
                        tok: Tok::CharLit(lit as u16),
                        pos,
                    }),
                    _ => diags.push(Diagnostic::error(
                        "character literal must be followed by a printable non-space ASCII character",
                        pos,
                    )),
                }
            }
            '0'..='9' => {
                let mut value: u64 = 0;
                let mut overflow = false;
                while let Some(&d) = chars.peek() {
                    if let Some(digit) = d.to_digit(10) {
                        bump!();
                        value = value.saturating_mul(10).saturating_add(digit as u64);
                        if value > u32::MAX as u64 {
                            overflow = true;
                        }
                    } else {
                        break;
                    }
                }
                if overflow {
                    diags.push(Diagnostic::error("integer literal too large", pos));
                } else {
                    tokens.push(Spanned {
                        tok: Tok::Int(value as u32),
                        pos,
                    });
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' || d == '\'' {
                        name.push(d);
                        bump!();
                    } else {
                        break;
                    }
                }
                tokens.push(Spanned {
                    tok: Tok::Ident(name),
                    pos,
                });
            }
            other => {
                bump!();
                diags.push(Diagnostic::error(
                    format!("unexpected character `{other}`"),
                    pos,
                ));
            }
        }
    }

    if diags.is_empty() {
        Ok(TokenizedSource {
            tokens,
            eof_pos: Pos::new(line, col),
        })
    } else {
        Err(diags)
    }
}
