//! Token cursor shared by the two spec parsers, including the SRE reader.

use super::token::{Spanned, Tok, TokenizedSource};
use super::{err, is_keyword};
use crate::diag::{Diagnostic, Pos};
use crate::sre::SRegex;

pub struct Cursor {
    tokens: Vec<Spanned>,
    index: usize,
    pub eof_pos: Pos,
    pub diags: Vec<Diagnostic>,
}

impl Cursor {
    pub fn new(src: TokenizedSource) -> Cursor {
        Cursor {
            tokens: src.tokens,
            index: 0,
            eof_pos: src.eof_pos,
            diags: Vec::new(),
        }
    }

    pub fn peek(&self) -> Option<&Spanned> {
        self.tokens.get(self.index)
    }

    pub fn next(&mut self) -> Option<Spanned> {
        let spanned = self.tokens.get(self.index).cloned();
        if spanned.is_some() {
            self.index += 1;
        }
        spanned
    }

    pub fn at_end(&self) -> bool {
        self.index >= self.tokens.len()
    }

    pub fn here(&self) -> Pos {
        self.peek().map(|s| s.pos).unwrap_or(self.eof_pos)
    }

    /// True when the next token is a top-level directive keyword, which ends
    /// arm and production lists.
    pub fn at_keyword(&self) -> bool {
        matches!(self.peek(), Some(Spanned { tok: Tok::Ident(word), .. }) if is_keyword(word))
    }

    pub fn eat_ident(&mut self, what: &str) -> Option<(String, Pos)> {
        match self.peek() {
            Some(Spanned { tok: Tok::Ident(name), pos }) if !is_keyword(name) => {
                let out = (name.clone(), *pos);
                self.index += 1;
                Some(out)
            }
            Some(spanned) => {
                let msg = format!("expected {what}, found {}", spanned.tok.describe());
                let pos = spanned.pos;
                err(&mut self.diags, msg, pos);
                None
            }
            None => {
                err(&mut self.diags, format!("expected {what}, found end of input"), self.eof_pos);
                None
            }
        }
    }

    pub fn eat_tok(&mut self, want: &Tok, what: &str) -> bool {
        match self.peek() {
            Some(spanned) if &spanned.tok == want => {
                self.index += 1;
                true
            }
            Some(spanned) => {
                let msg = format!("expected {what}, found {}", spanned.tok.describe());
                let pos = spanned.pos;
                err(&mut self.diags, msg, pos);
                false
            }
            None => {
                err(&mut self.diags, format!("expected {what}, found end of input"), self.eof_pos);
                false
            }
        }
    }

    /// Skips tokens until the next top-level keyword (or end of input), used
    /// to resynchronize after a malformed construct.
    pub fn sync_to_keyword(&mut self) {
        while !self.at_end() && !self.at_keyword() {
            self.index += 1;
        }
    }

    /// Reads one SRE regular expression. On failure a diagnostic is recorded
    /// and `None` returned; the caller resynchronizes.
    pub fn parse_sre(&mut self) -> Option<SRegex> {
        let spanned = match self.next() {
            Some(s) => s,
            None => {
                err(&mut self.diags, "expected regular expression, found end of input", self.eof_pos);
                return None;
            }
        };
        match spanned.tok {
            Tok::CharLit(code) => Some(SRegex::Sym(code)),
            Tok::Int(n) => {
                if n > 255 {
                    err(
                        &mut self.diags,
                        format!("symbol code {n} outside [0, 255]"),
                        spanned.pos,
                    );
                    None
                } else {
                    Some(SRegex::Sym(n as u16))
                }
            }
            Tok::Ident(name) if name == "epsilon" => Some(SRegex::Epsilon),
            Tok::Ident(name) if !is_keyword(&name) => Some(SRegex::SetRef(name)),
            Tok::LParen => self.parse_sre_form(spanned.pos),
            other => {
                err(
                    &mut self.diags,
                    format!("malformed regular expression: unexpected {}", other.describe()),
                    spanned.pos,
                );
                None
            }
        }
    }

    fn parse_sre_form(&mut self, open_pos: Pos) -> Option<SRegex> {
        let head = match self.next() {
            Some(s) => s,
            None => {
                err(&mut self.diags, "unterminated regular expression", open_pos);
                return None;
            }
        };
        match head.tok {
            Tok::Star => {
                let child = self.parse_sre()?;
                self.close_paren()?;
                Some(SRegex::Star(Box::new(child)))
            }
            Tok::Plus => {
                let child = self.parse_sre()?;
                self.close_paren()?;
                Some(SRegex::Plus(Box::new(child)))
            }
            Tok::Ident(op) if op == "seq" || op == "or" => {
                let mut children = Vec::new();
                loop {
                    match self.peek() {
                        Some(Spanned { tok: Tok::RParen, .. }) => {
                            self.index += 1;
                            break;
                        }
                        Some(_) => children.push(self.parse_sre()?),
                        None => {
                            err(&mut self.diags, "unterminated regular expression", open_pos);
                            return None;
                        }
                    }
                }
                if children.is_empty() {
                    err(
                        &mut self.diags,
                        format!("`({op})` needs at least one operand"),
                        open_pos,
                    );
                    return None;
                }
                if op == "seq" {
                    Some(SRegex::Seq(children))
                } else {
                    Some(SRegex::Alt(children))
                }
            }
            Tok::Ident(op) if op == "range" => {
                let lo = self.parse_code_atom()?;
                let hi = self.parse_code_atom()?;
                self.close_paren()?;
                if lo > hi {
                    err(
                        &mut self.diags,
                        format!("empty range: {lo} > {hi}"),
                        open_pos,
                    );
                    return None;
                }
                Some(SRegex::Range(lo, hi))
            }
            other => {
                err(
                    &mut self.diags,
                    format!(
                        "malformed regular expression: unknown operator {}",
                        other.describe()
                    ),
                    head.pos,
                );
                None
            }
        }
    }

    fn parse_code_atom(&mut self) -> Option<u16> {
        let spanned = match self.next() {
            Some(s) => s,
            None => {
                err(&mut self.diags, "expected symbol code, found end of input", self.eof_pos);
                return None;
            }
        };
        match spanned.tok {
            Tok::CharLit(code) => Some(code),
            Tok::Int(n) if n <= 255 => Some(n as u16),
            Tok::Int(n) => {
                err(
                    &mut self.diags,
                    format!("symbol code {n} outside [0, 255]"),
                    spanned.pos,
                );
                None
            }
            other => {
                err(
                    &mut self.diags,
                    format!("`range` bounds must be symbol codes, found {}", other.describe()),
                    spanned.pos,
                );
                None
            }
        }
    }

    fn close_paren(&mut self) -> Option<()> {
        if self.eat_tok(&Tok::RParen, "`)`") {
            Some(())
        } else {
            None
        }
    }
}
