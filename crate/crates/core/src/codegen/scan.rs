//! The hygiene audit: a lexical scan of generated source that flags every
//! identifier not defined by the module itself, not part of its action
//! interface, not the stream runtime, and not the host language's standard
//! vocabulary. An empty result means the module makes no demands on the
//! surrounding code.
//!
//! The scan is deliberately lexical. Path tails (`x::y`, `x.y`) resolve
//! through their head, so only head identifiers are audited; `use` items
//! must lead with the runtime or the standard library and bind the rest.

use std::collections::BTreeSet;

use super::rust::is_rust_keyword;
use super::GeneratedModule;

const STD_ROOTS: &[&str] = &["std", "core", "alloc"];

const PRELUDE: &[&str] = &[
    // primitive types
    "bool", "char", "str", "u8", "u16", "u32", "u64", "u128", "usize", "i8", "i16", "i32", "i64",
    "i128", "isize", "f32", "f64",
    // prelude types, traits, variants
    "String", "Vec", "Box", "Option", "Some", "None", "Result", "Ok", "Err", "Clone", "Copy",
    "Default", "Drop", "Fn", "FnMut", "FnOnce", "Iterator", "IntoIterator", "Extend", "From",
    "Into", "TryFrom", "TryInto", "AsRef", "AsMut", "ToOwned", "ToString", "PartialEq", "Eq",
    "PartialOrd", "Ord", "Hash", "Debug", "Display", "Send", "Sync", "Sized", "Unpin", "drop",
    // macros the standard library always provides
    "panic", "vec", "format", "println", "print", "eprintln", "matches", "assert", "assert_eq",
    "assert_ne", "debug_assert", "unreachable", "write", "writeln",
    // attribute vocabulary
    "allow", "derive", "dead_code", "non_camel_case_types", "non_snake_case",
    "non_upper_case_globals", "doc",
];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Lex {
    Ident(String),
    Punct(char),
}

/// Tokenizes enough of Rust to audit identifiers: comments, strings,
/// character literals, lifetimes, raw identifiers, and numbers are consumed
/// and discarded.
fn lex_source(source: &str) -> Vec<Lex> {
    let mut out = Vec::new();
    let chars: Vec<char> = source.chars().collect();
    let mut i = 0usize;
    let n = chars.len();
    while i < n {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '/' && i + 1 < n && chars[i + 1] == '/' {
            while i < n && chars[i] != '\n' {
                i += 1;
            }
        } else if c == '/' && i + 1 < n && chars[i + 1] == '*' {
            let mut depth = 1;
            i += 2;
            while i < n && depth > 0 {
                if chars[i] == '/' && i + 1 < n && chars[i + 1] == '*' {
                    depth += 1;
                    i += 2;
                } else if chars[i] == '*' && i + 1 < n && chars[i + 1] == '/' {
                    depth -= 1;
                    i += 2;
                } else {
                    i += 1;
                }
            }
        } else if c == '"' {
            i += 1;
            while i < n {
                if chars[i] == '\\' {
                    i += 2;
                } else if chars[i] == '"' {
                    i += 1;
                    break;
                } else {
                    i += 1;
                }
            }
        } else if c == '\'' {
            // Lifetime or character literal.
            if i + 1 < n && (chars[i + 1].is_alphanumeric() || chars[i + 1] == '_') {
                let mut j = i + 1;
                while j < n && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                if j < n && chars[j] == '\'' {
                    i = j + 1; // 'a'
                } else {
                    i = j; // 'lifetime
                }
            } else if i + 2 < n && chars[i + 1] == '\\' {
                let mut j = i + 2;
                while j < n && chars[j] != '\'' {
                    j += 1;
                }
                i = j + 1;
            } else if i + 2 < n && chars[i + 2] == '\'' {
                i += 3;
            } else {
                i += 1;
            }
        } else if c == 'r' && i + 1 < n && chars[i + 1] == '#' {
            // Raw identifier: audit the underlying name.
            let mut j = i + 2;
            let mut name = String::new();
            while j < n && (chars[j].is_alphanumeric() || chars[j] == '_') {
                name.push(chars[j]);
                j += 1;
            }
            out.push(Lex::Ident(name));
            i = j;
        } else if c.is_ascii_digit() {
            while i < n && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
        } else if c.is_alphanumeric() || c == '_' {
            let mut name = String::new();
            while i < n && (chars[i].is_alphanumeric() || chars[i] == '_') {
                name.push(chars[i]);
                i += 1;
            }
            out.push(Lex::Ident(name));
        } else {
            out.push(Lex::Punct(c));
            i += 1;
        }
    }
    out
}

/// Returns every free reference in the module source, sorted and deduplicated;
/// empty means hygienic.
pub fn hygiene_scan(module: &GeneratedModule) -> Vec<String> {
    let tokens = lex_source(&module.source);

    let mut allowed: BTreeSet<String> = BTreeSet::new();
    for name in PRELUDE.iter().chain(STD_ROOTS) {
        allowed.insert((*name).to_string());
    }
    allowed.insert(module.required_runtime.clone());
    // The interface parameter and the module's public surface.
    allowed.insert("A".to_string());
    for fixed in ["Arg", "Info", "Self_", "Terminal", "Error", "error", "parse", "new", "follow", "self_"] {
        allowed.insert(fixed.to_string());
    }
    allowed.insert(module.module_name.clone());
    for ty in &module.interface.abstract_types {
        allowed.insert(ty.clone());
    }
    for (name, _) in &module.interface.lex_actions {
        allowed.insert(name.clone());
    }
    for (name, _) in &module.interface.self_shape {
        allowed.insert(name.clone());
    }
    for (name, payload) in &module.interface.terminals {
        allowed.insert(name.clone());
        if let Some(ty) = payload {
            allowed.insert(ty.clone());
        }
    }
    for (name, _, _) in &module.interface.parse_actions {
        allowed.insert(name.clone());
    }

    // Declarations and imports found in the source itself.
    let mut declared: BTreeSet<String> = BTreeSet::new();
    let mut use_state = 0u8; // 1: before the head, 2: binding the rest
    for (idx, token) in tokens.iter().enumerate() {
        if use_state > 0 {
            if let Lex::Ident(name) = token {
                if use_state == 1 {
                    // The head stays auditable; it must be the runtime or std.
                    use_state = 2;
                } else {
                    declared.insert(name.clone());
                }
            }
            if token == &Lex::Punct(';') {
                use_state = 0;
            }
            continue;
        }
        match token {
            Lex::Ident(word) if word == "use" => {
                use_state = 1;
            }
            Lex::Ident(word)
                if matches!(
                    word.as_str(),
                    "fn" | "struct" | "enum" | "trait" | "type" | "mod" | "static" | "const"
                        | "let" | "union"
                ) =>
            {
                let mut j = idx + 1;
                if let Some(Lex::Ident(next)) = tokens.get(j) {
                    if next == "mut" {
                        j += 1;
                    }
                }
                if let Some(Lex::Ident(name)) = tokens.get(j) {
                    declared.insert(name.clone());
                }
            }
            Lex::Ident(name) => {
                // `name :` (single colon) binds: parameters, fields, struct
                // literal fields, generic bounds.
                if tokens.get(idx + 1) == Some(&Lex::Punct(':'))
                    && tokens.get(idx + 2) != Some(&Lex::Punct(':'))
                {
                    declared.insert(name.clone());
                }
            }
            Lex::Punct(_) => {}
        }
    }

    let mut free: BTreeSet<String> = BTreeSet::new();
    for (idx, token) in tokens.iter().enumerate() {
        let Lex::Ident(name) = token else {
            continue;
        };
        if is_rust_keyword(name) || allowed.contains(name) || declared.contains(name) || name.starts_with("hyg_") {
            continue;
        }
        // Path tails and field/method selections resolve through their head.
        let prev_two: Vec<&Lex> = tokens[..idx].iter().rev().take(2).collect();
        let after_path = prev_two.len() == 2
            && prev_two[0] == &Lex::Punct(':')
            && prev_two[1] == &Lex::Punct(':');
        let after_dot = prev_two.first() == Some(&&Lex::Punct('.'));
        if after_path || after_dot {
            continue;
        }
        free.insert(name.clone());
    }
    free.into_iter().collect()
}
