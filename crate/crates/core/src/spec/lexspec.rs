//! Lexer-specification parsing, set resolution, validation, and printing.

use std::collections::BTreeMap;

use super::cursor::Cursor;
use super::token::{tokenize, Tok};
use super::{err, Arm, LexFn, LexSpec};
use crate::diag::{has_errors, sort_diagnostics, Diagnostic, Pos};
use crate::sre::{CharSet, SRegex};

/// Parses a lexer specification. Set declarations are evaluated to character
/// sets as they are read (each may refer only to earlier sets); `SetRef`
/// nodes inside function arms are left for [`resolve_sets`].
pub fn parse_lex_spec(text: &str) -> Result<LexSpec, Vec<Diagnostic>> {
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
    let mut alphabet: Option<(u16, Pos)> = None;
    let mut sets: Vec<(String, CharSet)> = Vec::new();
    let mut functions: Vec<LexFn> = Vec::new();

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
            "alphabet" => match cur.next() {
                Some(spanned) => match spanned.tok {
                    Tok::Int(n) if (1..=256).contains(&n) => {
                        if alphabet.is_some() {
                            err(&mut cur.diags, "duplicate `alphabet` directive", pos);
                        } else {
                            alphabet = Some((n as u16, spanned.pos));
                        }
                    }
                    Tok::Int(n) => {
                        err(
                            &mut cur.diags,
                            format!("alphabet {n} outside [1, 256]"),
                            spanned.pos,
                        );
                    }
                    other => {
                        let msg = format!("expected alphabet size, found {}", other.describe());
                        err(&mut cur.diags, msg, spanned.pos);
                    }
                },
                None => {
                    let at = cur.eof_pos;
                    err(&mut cur.diags, "expected alphabet size, found end of input", at);
                }
            },
            "set" => {
                let Some((set_name, name_pos)) = cur.eat_ident("set name") else {
                    cur.sync_to_keyword();
                    continue;
                };
                if !cur.eat_tok(&Tok::Equals, "`=`") {
                    cur.sync_to_keyword();
                    continue;
                }
                let Some(body) = cur.parse_sre() else {
                    cur.sync_to_keyword();
                    continue;
                };
                let Some((alpha, _)) = alphabet else {
                    err(
                        &mut cur.diags,
                        "`alphabet` must be declared before `set` declarations",
                        pos,
                    );
                    continue;
                };
                if sets.iter().any(|(existing, _)| existing == &set_name) {
                    err(
                        &mut cur.diags,
                        format!("duplicate set name `{set_name}`"),
                        name_pos,
                    );
                    continue;
                }
                match eval_charset(&body, &sets, alpha) {
                    Ok(cs) => sets.push((set_name, cs)),
                    Err(msg) => err(&mut cur.diags, msg, name_pos),
                }
            }
            "function" => {
                let Some((fn_name, _)) = cur.eat_ident("function name") else {
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
                let mut arms = Vec::new();
                while !cur.at_end() && !cur.at_keyword() {
                    let arm_pos = cur.here();
                    let Some(regex) = cur.parse_sre() else {
                        cur.sync_to_keyword();
                        break;
                    };
                    if !cur.eat_tok(&Tok::Arrow, "`=>`") {
                        cur.sync_to_keyword();
                        break;
                    }
                    let Some((action, _)) = cur.eat_ident("action name") else {
                        cur.sync_to_keyword();
                        break;
                    };
                    arms.push(Arm {
                        regex,
                        action,
                        pos: arm_pos,
                    });
                }
                functions.push(LexFn {
                    name: fn_name,
                    result_type,
                    arms,
                    pos,
                });
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
    let alphabet = match alphabet {
        Some((n, _)) => n,
        None => {
            let at = cur.eof_pos;
            err(&mut cur.diags, "missing `alphabet` directive", at);
            0
        }
    };

    if has_errors(&cur.diags) {
        sort_diagnostics(&mut cur.diags);
        Err(cur.diags)
    } else {
        Ok(LexSpec {
            backend,
            module_name,
            alphabet,
            sets,
            functions,
        })
    }
}

/// Evaluates a set-declaration body to the character set it denotes. Only
/// symbol codes, ranges, references to earlier sets, and `or` combinations
/// of those denote sets.
fn eval_charset(
    body: &SRegex,
    sets: &[(String, CharSet)],
    alphabet: u16,
) -> Result<CharSet, String> {
    match body {
        SRegex::Sym(code) => {
            if *code >= alphabet {
                return Err(format!("symbol code {code} outside alphabet {alphabet}"));
            }
            let mut cs = CharSet::new();
            cs.insert(*code);
            Ok(cs)
        }
        SRegex::Range(lo, hi) => {
            if *hi >= alphabet {
                return Err(format!("symbol code {hi} outside alphabet {alphabet}"));
            }
            let mut cs = CharSet::new();
            cs.insert_range(*lo, *hi);
            Ok(cs)
        }
        SRegex::SetRef(name) => sets
            .iter()
            .find(|(existing, _)| existing == name)
            .map(|(_, cs)| cs.clone())
            .ok_or_else(|| format!("set `{name}` is undefined here; sets may only reference earlier sets")),
        SRegex::Alt(children) => {
            let mut cs = CharSet::new();
            for child in children {
                cs.union_with(&eval_charset(child, sets, alphabet)?);
            }
            Ok(cs)
        }
        SRegex::Epsilon | SRegex::Seq(_) | SRegex::Star(_) | SRegex::Plus(_) => {
            Err("set definition must denote a character set (codes, ranges, sets, and `or` of those)".to_string())
        }
    }
}

/// Replaces every `SetRef` inside function arms by the regex form of the
/// named set. Idempotent: a spec without references is returned unchanged.
pub fn resolve_sets(spec: &LexSpec) -> Result<LexSpec, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut out = spec.clone();
    for function in &mut out.functions {
        for arm in &mut function.arms {
            arm.regex = resolve_regex(&arm.regex, &spec.sets, arm.pos, &mut diags);
        }
    }
    if has_errors(&diags) {
        sort_diagnostics(&mut diags);
        Err(diags)
    } else {
        Ok(out)
    }
}

fn resolve_regex(
    re: &SRegex,
    sets: &[(String, CharSet)],
    pos: Pos,
    diags: &mut Vec<Diagnostic>,
) -> SRegex {
    match re {
        SRegex::SetRef(name) => match sets.iter().find(|(existing, _)| existing == name) {
            Some((_, cs)) => cs.to_regex(),
            None => {
                err(diags, format!("undefined set `{name}`"), pos);
                re.clone()
            }
        },
        SRegex::Epsilon | SRegex::Sym(_) | SRegex::Range(_, _) => re.clone(),
        SRegex::Seq(children) => SRegex::Seq(
            children.iter().map(|c| resolve_regex(c, sets, pos, diags)).collect(),
        ),
        SRegex::Alt(children) => SRegex::Alt(
            children.iter().map(|c| resolve_regex(c, sets, pos, diags)).collect(),
        ),
        SRegex::Star(child) => SRegex::Star(Box::new(resolve_regex(child, sets, pos, diags))),
        SRegex::Plus(child) => SRegex::Plus(Box::new(resolve_regex(child, sets, pos, diags))),
    }
}

/// Checks every `LexSpec` invariant, assuming sets are resolved. Returns the
/// diagnostics in source-position order; empty means the spec is valid.
/// Inexhaustive functions (no arm matches the empty prefix situation) are a
/// warning: generation synthesizes a lexical-error handler for them.
pub fn validate_lex_spec(spec: &LexSpec) -> Vec<Diagnostic> {
    let mut diags = Vec::new();

    let mut seen_fns: BTreeMap<&str, Pos> = BTreeMap::new();
    for function in &spec.functions {
        if seen_fns.insert(&function.name, function.pos).is_some() {
            err(
                &mut diags,
                format!("duplicate function name `{}`", function.name),
                function.pos,
            );
        }
        if function.arms.is_empty() {
            err(
                &mut diags,
                format!("function `{}` has no arms", function.name),
                function.pos,
            );
        }
    }

    // An action may be shared only between functions of one result type; it
    // denotes a single interface field.
    let mut action_types: BTreeMap<&str, (&str, Pos)> = BTreeMap::new();
    for function in &spec.functions {
        for arm in &function.arms {
            match action_types.get(arm.action.as_str()) {
                Some((ty, _)) if *ty != function.result_type => {
                    err(
                        &mut diags,
                        format!(
                            "action `{}` shared across result types `{}` and `{}`",
                            arm.action, ty, function.result_type
                        ),
                        arm.pos,
                    );
                }
                Some(_) => {}
                None => {
                    action_types.insert(&arm.action, (&function.result_type, arm.pos));
                }
            }
        }
    }

    for function in &spec.functions {
        for arm in &function.arms {
            if arm.regex.has_set_refs() {
                err(
                    &mut diags,
                    format!("unresolved set reference in function `{}`", function.name),
                    arm.pos,
                );
            }
            let mut leaf_err: Option<String> = None;
            arm.regex.for_each_leaf(&mut |_, hi| {
                if hi >= spec.alphabet && leaf_err.is_none() {
                    leaf_err = Some(format!(
                        "symbol code {hi} outside alphabet {}",
                        spec.alphabet
                    ));
                }
            });
            if let Some(msg) = leaf_err {
                err(&mut diags, msg, arm.pos);
            }
        }
        if !function.arms.is_empty() && !function.arms.iter().any(|arm| arm.regex.nullable()) {
            diags.push(Diagnostic::warning(
                format!(
                    "inexhaustive function `{}`: no arm matches when the input fails every pattern; a lexical-error handler will be synthesized",
                    function.name
                ),
                function.pos,
            ));
        }
    }

    sort_diagnostics(&mut diags);
    diags
}

/// Canonical printed form; reparsing yields a structurally equal spec.
pub fn print_lex_spec(spec: &LexSpec) -> String {
    let mut out = String::new();
    out.push_str(&spec.backend);
    out.push('\n');
    out.push_str(&format!("name {}\n", spec.module_name));
    out.push_str(&format!("alphabet {}\n", spec.alphabet));
    for (name, cs) in &spec.sets {
        out.push_str(&format!("\nset {} = {}\n", name, cs.to_regex().to_sexpr()));
    }
    for function in &spec.functions {
        out.push_str(&format!(
            "\nfunction {} : {} =\n",
            function.name, function.result_type
        ));
        for arm in &function.arms {
            out.push_str(&format!("   {} => {}\n", arm.regex.to_sexpr(), arm.action));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::Severity;

    const BASIC: &str = "sml\nname LexerFun\nalphabet 128\n\nfunction f : t =\n   (seq 'a 'a) => aa\n   (seq 'a (* 'b) 'c) => abc\n";

    #[test]
    fn parses_basic_spec() {
        let spec = parse_lex_spec(BASIC).unwrap();
        assert_eq!(spec.backend, "sml");
        assert_eq!(spec.module_name, "LexerFun");
        assert_eq!(spec.alphabet, 128);
        assert!(spec.sets.is_empty());
        assert_eq!(spec.functions.len(), 1);
        let f = &spec.functions[0];
        assert_eq!((f.name.as_str(), f.result_type.as_str()), ("f", "t"));
        assert_eq!(f.arms.len(), 2);
        assert_eq!(f.arms[0].regex, SRegex::Seq(vec![SRegex::Sym(97), SRegex::Sym(97)]));
        assert_eq!(f.arms[0].action, "aa");
        assert_eq!(
            f.arms[1].regex,
            SRegex::Seq(vec![
                SRegex::Sym(97),
                SRegex::Star(Box::new(SRegex::Sym(98))),
                SRegex::Sym(99)
            ])
        );
    }

    #[test]
    fn empty_input_is_missing_backend() {
        let diags = parse_lex_spec("").unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].message, "missing backend line");
        assert_eq!(diags[0].pos, Pos::new(1, 1));
    }

    #[test]
    fn set_evaluation_and_ordering() {
        let text = "sml\nname W\nalphabet 128\nset whitechar = (or 32 9 10) /* space, tab, lf */\nset ws2 = whitechar\nfunction f : t =\n   (+ whitechar) => white\n";
        let spec = parse_lex_spec(text).unwrap();
        assert_eq!(spec.sets.len(), 2);
        let (name, cs) = &spec.sets[0];
        assert_eq!(name, "whitechar");
        assert_eq!(cs.iter().collect::<Vec<_>>(), vec![9, 10, 32]);
        assert_eq!(spec.sets[1].1, spec.sets[0].1);
    }

    #[test]
    fn forward_set_reference_rejected() {
        let text = "sml\nname W\nalphabet 128\nset a = b\nset b = 'x\nfunction f : t =\n   a => act\n";
        let diags = parse_lex_spec(text).unwrap_err();
        assert!(diags[0].message.contains("set `b` is undefined here"));
    }

    #[test]
    fn duplicate_set_rejected() {
        let text = "sml\nname W\nalphabet 4\nset a = 1\nset a = 2\nfunction f : t =\n 1 => x\n";
        let diags = parse_lex_spec(text).unwrap_err();
        assert!(diags.iter().any(|d| d.message == "duplicate set name `a`"));
    }

    #[test]
    fn unknown_directive_rejected() {
        let text = "sml\nname L\nalphabet 8\nfrobnicate 3\nfunction f : t =\n epsilon => e\n";
        let diags = parse_lex_spec(text).unwrap_err();
        assert!(diags.iter().any(|d| d.message == "unknown directive `frobnicate`"));
        assert_eq!(diags[0].pos, Pos::new(4, 1));
    }

    #[test]
    fn malformed_sexpr_rejected() {
        for bad in ["(frob 'a)", "(seq 'a", "(range 'z 'a)", "(or)", "(* )"] {
            let text = format!("sml\nname L\nalphabet 128\nfunction f : t =\n   {bad} => x\n");
            assert!(parse_lex_spec(&text).is_err(), "{bad} must be rejected");
        }
    }

    #[test]
    fn alphabet_range_enforced() {
        for bad in ["0", "257"] {
            let text = format!("sml\nname X\nalphabet {bad}\nfunction f : t =\n epsilon => e\n");
            let diags = parse_lex_spec(&text).unwrap_err();
            assert!(diags.iter().any(|d| d.message.contains("outside [1, 256]")), "{bad}");
        }
    }

    #[test]
    fn resolve_expands_set_refs() {
        let text = "sml\nname W\nalphabet 128\nset whitechar = (or 32 9 10)\nfunction f : t =\n   (+ whitechar) => white\n";
        let spec = parse_lex_spec(text).unwrap();
        let resolved = resolve_sets(&spec).unwrap();
        assert_eq!(
            resolved.functions[0].arms[0].regex,
            SRegex::Plus(Box::new(SRegex::Alt(vec![
                SRegex::Range(9, 10),
                SRegex::Sym(32)
            ])))
        );
        // Idempotence, and identity on reference-free regexes.
        assert_eq!(resolve_sets(&resolved).unwrap(), resolved);
    }

    #[test]
    fn resolve_digit_range() {
        let text = "sml\nname D\nalphabet 128\nset digit = (range '0 '9)\nfunction f : t =\n   (+ digit) => num\n";
        let resolved = resolve_sets(&parse_lex_spec(text).unwrap()).unwrap();
        assert_eq!(
            resolved.functions[0].arms[0].regex,
            SRegex::Plus(Box::new(SRegex::Range(48, 57)))
        );
    }

    #[test]
    fn resolve_reports_undefined_set() {
        let text = "sml\nname W\nalphabet 128\nfunction f : t =\n   (+ nosuch) => x\n";
        let spec = parse_lex_spec(text).unwrap();
        let diags = resolve_sets(&spec).unwrap_err();
        assert_eq!(diags[0].message, "undefined set `nosuch`");
    }

    #[test]
    fn validate_flags_inexhaustive() {
        let spec = resolve_sets(&parse_lex_spec(BASIC).unwrap()).unwrap();
        let diags = validate_lex_spec(&spec);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].severity, Severity::Warning);
        assert!(diags[0].message.starts_with("inexhaustive function `f`"));
    }

    #[test]
    fn epsilon_arm_is_exhaustive() {
        let text = "sml\nname L\nalphabet 128\nfunction g : u =\n  (or (seq 'b 'c) (seq 'b 'd)) => bcbd\n  epsilon => error\n";
        let spec = resolve_sets(&parse_lex_spec(text).unwrap()).unwrap();
        assert!(validate_lex_spec(&spec).is_empty());
    }

    #[test]
    fn mixed_functions_warn_only_on_inexhaustive_one() {
        let text = "sml\nname L\nalphabet 128\nfunction f : t =\n   (seq 'a 'a) => aa\nfunction g : u =\n  epsilon => error\n";
        let spec = resolve_sets(&parse_lex_spec(text).unwrap()).unwrap();
        let diags = validate_lex_spec(&spec);
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("function `f`"));
    }

    #[test]
    fn action_shared_across_types_rejected() {
        let text = "sml\nname L\nalphabet 128\nfunction f : t =\n   (seq 'a 'a) => aa\nfunction g : u =\n   'b => aa\n   epsilon => e\n";
        let spec = resolve_sets(&parse_lex_spec(text).unwrap()).unwrap();
        let diags = validate_lex_spec(&spec);
        assert!(diags
            .iter()
            .any(|d| d.is_error() && d.message.contains("action `aa` shared across result types `t` and `u`")));
    }

    #[test]
    fn action_shared_within_same_type_allowed() {
        let text = "sml\nname L\nalphabet 128\nfunction f : t =\n   'a => tok\n   epsilon => fin\nfunction g : t =\n   'b => tok\n   epsilon => fin\n";
        let spec = resolve_sets(&parse_lex_spec(text).unwrap()).unwrap();
        assert!(validate_lex_spec(&spec).iter().all(|d| !d.is_error()));
    }

    #[test]
    fn out_of_alphabet_leaf_rejected() {
        let text = "sml\nname L\nalphabet 97\nfunction f : t =\n   'a => x\n   epsilon => e\n";
        let spec = resolve_sets(&parse_lex_spec(text).unwrap()).unwrap();
        let diags = validate_lex_spec(&spec);
        assert!(diags.iter().any(|d| d.message == "symbol code 97 outside alphabet 97"));
    }

    #[test]
    fn calculator_spec_shape() {
        let spec = parse_lex_spec(crate::corpus::CALC_LEX).unwrap();
        assert_eq!(spec.module_name, "CalcLexFun");
        assert_eq!(
            spec.sets.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>(),
            vec!["digit", "whitechar"]
        );
        let lex = &spec.functions[0];
        assert_eq!((lex.name.as_str(), lex.result_type.as_str()), ("lex", "t"));
        assert_eq!(lex.arms.len(), 7);
        let last = lex.arms.last().unwrap();
        assert_eq!((&last.regex, last.action.as_str()), (&SRegex::Epsilon, "eof"));
        // Exhaustive thanks to the epsilon arm: validation is clean.
        let resolved = resolve_sets(&spec).unwrap();
        assert!(validate_lex_spec(&resolved).is_empty());
    }

    #[test]
    fn roundtrip_canonical_form() {
        let text = "sml\nname W\nalphabet 128\nset whitechar = (or 32 9 10)\nset letter = (range 'a 'z)\nfunction f : t =\n   (+ whitechar) => whitespace\n   (+ letter) => word\n";
        let spec = parse_lex_spec(text).unwrap();
        let printed = print_lex_spec(&spec);
        let reparsed = parse_lex_spec(&printed).unwrap();
        assert_eq!(strip(&spec), strip(&reparsed));
    }

    fn strip(spec: &LexSpec) -> LexSpec {
        let mut s = spec.clone();
        for f in &mut s.functions {
            f.pos = Pos::START;
            for arm in &mut f.arms {
                arm.pos = Pos::START;
            }
        }
        s
    }
}
