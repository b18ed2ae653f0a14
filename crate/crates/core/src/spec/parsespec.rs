//! Parser-specification parsing, validation, and printing.

use std::collections::{BTreeMap, BTreeSet};

use super::cursor::Cursor;
use super::token::{tokenize, Tok};
use super::{err, Assoc, NonterminalDecl, ParseSpec, PrecDecl, ProductionDecl, RhsItem, TerminalDecl};
use crate::diag::{has_errors, sort_diagnostics, Diagnostic, Pos};

pub fn parse_parse_spec(text: &str) -> Result<ParseSpec, Vec<Diagnostic>> {
    let src = tokenize(text)?;
    let mut cur = Cursor::new(src);

    let backend = match cur.peek() {
        Some(spanned) => {
            if let Tok::Ident(name) = &spanned.tok {
                let name = name.clone();
                cur.next();
                name
            } else {
                let pos = spanned.pos;
                err(&mut cur.diags, "missing backend line", pos);
                return Err(cur.diags);
            }
        }
        None => {
            err(&mut cur.diags, "missing backend line", Pos::START);
            return Err(cur.diags);
        }
    };

    let mut module_name: Option<String> = None;
    let mut terminals: Vec<TerminalDecl> = Vec::new();
    let mut nonterminals: Vec<NonterminalDecl> = Vec::new();
    let mut start: Option<(String, Pos)> = None;
    let mut precedences: Vec<PrecDecl> = Vec::new();
    let mut symbols_seen: BTreeMap<String, Pos> = BTreeMap::new();

    while let Some(spanned) = cur.peek() {
        let pos = spanned.pos;
        let word = match &spanned.tok {
            Tok::Ident(word) => word.clone(),
            other => {
                let msg = format!("unknown directive: expected a directive, found {}", other.describe());
                err(&mut cur.diags, msg, pos);
                cur.next();
                cur.sync_to_keyword();
                continue;
            }
        };
        cur.next();
        match word.as_str() {
            "name" => {
                if let Some((name, _)) = cur.eat_ident("module name") {
                    if module_name.is_some() {
                        err(&mut cur.diags, "duplicate `name` directive", pos);
                    } else {
                        module_name = Some(name);
                    }
                }
            }
            "terminal" => {
                let Some((term_name, name_pos)) = cur.eat_ident("terminal name") else {
                    cur.sync_to_keyword();
                    continue;
                };
                let payload_type = match cur.peek() {
                    Some(s) if s.tok == Tok::Ident("of".to_string()) => {
                        cur.next();
                        cur.eat_ident("payload type").map(|(ty, _)| ty)
                    }
                    _ => None,
                };
                if symbols_seen.insert(term_name.clone(), name_pos).is_some() {
                    err(
                        &mut cur.diags,
                        format!("duplicate symbol name `{term_name}`"),
                        name_pos,
                    );
                    continue;
                }
                terminals.push(TerminalDecl {
                    name: term_name,
                    payload_type,
                    pos: name_pos,
                });
            }
            "nonterminal" => {
                let Some((nt_name, name_pos)) = cur.eat_ident("nonterminal name") else {
                    cur.sync_to_keyword();
                    continue;
                };
                if !cur.eat_tok(&Tok::Colon, "`:`") {
                    cur.sync_to_keyword();
                    continue;
                }
                let Some((result_type, _)) = cur.eat_ident("result type") else {
                    cur.sync_to_keyword();
                    continue;
                };
                if !cur.eat_tok(&Tok::Equals, "`=`") {
                    cur.sync_to_keyword();
                    continue;
                }
                if symbols_seen.insert(nt_name.clone(), name_pos).is_some() {
                    err(
                        &mut cur.diags,
                        format!("duplicate symbol name `{nt_name}`"),
                        name_pos,
                    );
                }
                let productions = parse_productions(&mut cur);
                nonterminals.push(NonterminalDecl {
                    name: nt_name,
                    result_type,
                    productions,
                    pos: name_pos,
                });
            }
            "start" => {
                if let Some((name, name_pos)) = cur.eat_ident("start symbol") {
                    if start.is_some() {
                        err(&mut cur.diags, "duplicate `start` directive", pos);
                    } else {
                        start = Some((name, name_pos));
                    }
                }
            }
            "left" | "right" | "nonassoc" => {
                let assoc = match word.as_str() {
                    "left" => Assoc::Left,
                    "right" => Assoc::Right,
                    _ => Assoc::NonAssoc,
                };
                let mut names = Vec::new();
                while let Some((name, _)) = match cur.peek() {
                    Some(s) if matches!(&s.tok, Tok::Ident(w) if !super::is_keyword(w)) => {
                        cur.eat_ident("terminal name")
                    }
                    _ => None,
                } {
                    names.push(name);
                }
                if names.is_empty() {
                    err(
                        &mut cur.diags,
                        format!("`{word}` needs at least one terminal"),
                        pos,
                    );
                } else {
                    precedences.push(PrecDecl {
                        assoc,
                        terminals: names,
                        pos,
                    });
                }
            }
            other => {
                err(&mut cur.diags, format!("unknown directive `{other}`"), pos);
                cur.sync_to_keyword();
            }
        }
    }

    let module_name = match module_name {
        Some(name) => name,
        None => {
            let at = cur.eof_pos;
            err(&mut cur.diags, "missing `name` directive", at);
            String::new()
        }
    };
    let (start, start_pos) = match start {
        Some((name, name_pos)) => {
            if !nonterminals.iter().any(|nt| nt.name == name) {
                err(
                    &mut cur.diags,
                    "start symbol not a declared nonterminal",
                    name_pos,
                );
            }
            (name, name_pos)
        }
        None => {
            let at = cur.eof_pos;
            err(&mut cur.diags, "missing `start` declaration", at);
            (String::new(), cur.eof_pos)
        }
    };

    if has_errors(&cur.diags) {
        sort_diagnostics(&mut cur.diags);
        Err(cur.diags)
    } else {
        Ok(ParseSpec {
            backend,
            module_name,
            terminals,
            nonterminals,
            start,
            start_pos,
            precedences,
        })
    }
}

fn parse_productions(cur: &mut Cursor) -> Vec<ProductionDecl> {
    let mut productions = Vec::new();
    while !cur.at_end() && !cur.at_keyword() {
        let prod_pos = cur.here();
        let mut rhs = Vec::new();
        let mut ok = true;
        loop {
            match cur.peek().map(|s| s.tok.clone()) {
                Some(Tok::Arrow) => {
                    cur.next();
                    break;
                }
                Some(Tok::Int(n)) => {
                    let int_pos = cur.here();
                    cur.next();
                    if !cur.eat_tok(&Tok::Colon, "`:` after position number") {
                        cur.sync_to_keyword();
                        ok = false;
                        break;
                    }
                    let Some((symbol, _)) = cur.eat_ident("symbol name") else {
                        cur.sync_to_keyword();
                        ok = false;
                        break;
                    };
                    if n == 0 {
                        err(
                            &mut cur.diags,
                            "malformed position prefix: positions are 1-based",
                            int_pos,
                        );
                        ok = false;
                    }
                    rhs.push(RhsItem {
                        symbol,
                        position: Some(n),
                    });
                }
                Some(Tok::Ident(word)) if !super::is_keyword(&word) => {
                    cur.next();
                    rhs.push(RhsItem {
                        symbol: word,
                        position: None,
                    });
                }
                Some(_) | None => {
                    if !rhs.is_empty() {
                        let at = cur.here();
                        err(&mut cur.diags, "missing `=>` in production", at);
                    }
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            if rhs.is_empty() {
                break;
            }
            continue;
        }
        let Some((action, _)) = cur.eat_ident("action name") else {
            cur.sync_to_keyword();
            break;
        };
        productions.push(ProductionDecl {
            rhs,
            action,
            pos: prod_pos,
        });
    }
    productions
}

/// Checks every `ParseSpec` invariant. Unreachable and unproductive
/// nonterminals are warnings; everything else is an error.
pub fn validate_parse_spec(spec: &ParseSpec) -> Vec<Diagnostic> {
    let mut diags = Vec::new();

    let terminal_of: BTreeMap<&str, &TerminalDecl> =
        spec.terminals.iter().map(|t| (t.name.as_str(), t)).collect();
    let nonterminal_of: BTreeMap<&str, &NonterminalDecl> =
        spec.nonterminals.iter().map(|nt| (nt.name.as_str(), nt)).collect();

    // One derived signature per action: argument types in slot order, then
    // the result type of the producing nonterminal.
    let mut action_sigs: BTreeMap<&str, (Vec<String>, &str, Pos)> = BTreeMap::new();

    for nt in &spec.nonterminals {
        if nt.productions.is_empty() {
            err(
                &mut diags,
                format!("nonterminal `{}` has no productions", nt.name),
                nt.pos,
            );
        }
        for prod in &nt.productions {
            let mut undeclared = false;
            for item in &prod.rhs {
                if !terminal_of.contains_key(item.symbol.as_str())
                    && !nonterminal_of.contains_key(item.symbol.as_str())
                {
                    err(
                        &mut diags,
                        format!("undeclared symbol `{}` in production", item.symbol),
                        prod.pos,
                    );
                    undeclared = true;
                }
            }

            let mut slots: BTreeMap<u32, &RhsItem> = BTreeMap::new();
            let mut dup = false;
            for item in &prod.rhs {
                if let Some(n) = item.position {
                    if slots.insert(n, item).is_some() {
                        err(&mut diags, format!("duplicate position {n}"), prod.pos);
                        dup = true;
                    }
                    if let Some(term) = terminal_of.get(item.symbol.as_str()) {
                        if term.payload_type.is_none() {
                            err(
                                &mut diags,
                                format!(
                                    "numbered symbol carries no value: terminal `{}` has no payload",
                                    item.symbol
                                ),
                                prod.pos,
                            );
                        }
                    }
                }
            }
            let k = slots.len() as u32;
            let contiguous = slots.keys().copied().eq(1..=k);
            if !dup && !contiguous {
                err(
                    &mut diags,
                    format!(
                        "positions must be exactly 1..{} with no gaps",
                        slots.keys().max().copied().unwrap_or(0)
                    ),
                    prod.pos,
                );
            }

            if undeclared || dup || !contiguous {
                continue;
            }
            let arg_types: Vec<String> = slots
                .values()
                .map(|item| {
                    if let Some(term) = terminal_of.get(item.symbol.as_str()) {
                        term.payload_type.clone().unwrap_or_default()
                    } else {
                        nonterminal_of[item.symbol.as_str()].result_type.clone()
                    }
                })
                .collect();
            match action_sigs.get(prod.action.as_str()) {
                Some((args, result, _)) => {
                    if args != &arg_types || *result != nt.result_type {
                        err(
                            &mut diags,
                            format!(
                                "action `{}` used with conflicting signatures: ({}) -> {} vs ({}) -> {}",
                                prod.action,
                                args.join(", "),
                                result,
                                arg_types.join(", "),
                                nt.result_type
                            ),
                            prod.pos,
                        );
                    }
                }
                None => {
                    action_sigs.insert(&prod.action, (arg_types, &nt.result_type, prod.pos));
                }
            }
        }
    }

    let mut prec_seen: BTreeMap<&str, Pos> = BTreeMap::new();
    for decl in &spec.precedences {
        for name in &decl.terminals {
            if !terminal_of.contains_key(name.as_str()) {
                err(
                    &mut diags,
                    format!("unknown terminal `{name}` in precedence declaration"),
                    decl.pos,
                );
            } else if prec_seen.insert(name, decl.pos).is_some() {
                err(
                    &mut diags,
                    format!("terminal `{name}` appears in multiple precedence declarations"),
                    decl.pos,
                );
            }
        }
    }

    // Reachability from the start symbol.
    let mut reachable: BTreeSet<&str> = BTreeSet::new();
    if nonterminal_of.contains_key(spec.start.as_str()) {
        let mut work = vec![spec.start.as_str()];
        while let Some(name) = work.pop() {
            if !reachable.insert(name) {
                continue;
            }
            for prod in &nonterminal_of[name].productions {
                for item in &prod.rhs {
                    if nonterminal_of.contains_key(item.symbol.as_str()) {
                        work.push(&item.symbol);
                    }
                }
            }
        }
        for nt in &spec.nonterminals {
            if !reachable.contains(nt.name.as_str()) {
                diags.push(Diagnostic::warning(
                    format!("unreachable nonterminal `{}`", nt.name),
                    nt.pos,
                ));
            }
        }
    }

    // Productivity: a nonterminal must derive some terminal string.
    let mut productive: BTreeSet<&str> = BTreeSet::new();
    loop {
        let mut grew = false;
        for nt in &spec.nonterminals {
            if productive.contains(nt.name.as_str()) {
                continue;
            }
            let derives = nt.productions.iter().any(|prod| {
                prod.rhs.iter().all(|item| {
                    terminal_of.contains_key(item.symbol.as_str())
                        || productive.contains(item.symbol.as_str())
                })
            });
            if derives {
                productive.insert(&nt.name);
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    for nt in &spec.nonterminals {
        if !nt.productions.is_empty() && !productive.contains(nt.name.as_str()) {
            diags.push(Diagnostic::warning(
                format!("nonterminal `{}` derives no terminal string", nt.name),
                nt.pos,
            ));
        }
    }

    sort_diagnostics(&mut diags);
    diags
}

/// Canonical printed form; reparsing yields a structurally equal spec.
pub fn print_parse_spec(spec: &ParseSpec) -> String {
    let mut out = String::new();
    out.push_str(&spec.backend);
    out.push('\n');
    out.push_str(&format!("name {}\n\n", spec.module_name));
    for term in &spec.terminals {
        match &term.payload_type {
            Some(ty) => out.push_str(&format!("terminal {} of {}\n", term.name, ty)),
            None => out.push_str(&format!("terminal {}\n", term.name)),
        }
    }
    for decl in &spec.precedences {
        let word = match decl.assoc {
            Assoc::Left => "left",
            Assoc::Right => "right",
            Assoc::NonAssoc => "nonassoc",
        };
        out.push_str(&format!("{} {}\n", word, decl.terminals.join(" ")));
    }
    for nt in &spec.nonterminals {
        out.push_str(&format!("\nnonterminal {} : {} =\n", nt.name, nt.result_type));
        for prod in &nt.productions {
            let rhs = prod
                .rhs
                .iter()
                .map(|item| match item.position {
                    Some(n) => format!("{}:{}", n, item.symbol),
                    None => item.symbol.clone(),
                })
                .collect::<Vec<_>>()
                .join(" ");
            if rhs.is_empty() {
                out.push_str(&format!("  => {}\n", prod.action));
            } else {
                out.push_str(&format!("  {} => {}\n", rhs, prod.action));
            }
        }
    }
    out.push_str(&format!("\nstart {}\n", spec.start));
    out
}
