//! The Rust backend.
//!
//! The functor becomes a generic struct: the action interface is a trait
//! with one associated type per abstract type and one method per action, and
//! applying the functor is `Module::new(arg)`. Info fields keep their
//! interface names (`r#match`, `follow`); the `self` record is `self_`,
//! since `self` cannot be a Rust field. Terminal payload types carry a
//! `Clone` bound: the memoizing stream hands out owned tokens by cloning.

use std::collections::BTreeSet;

use super::{snake_case, spec_hash, ActionInterface, Backend, GeneratedModule};
use crate::automata::{Dfa, DEAD};
use crate::diag::{Diagnostic, Pos};
use crate::lr::{Action, Grammar, LrTables};
use crate::spec::{print_lex_spec, print_parse_spec, LexSpec, ParseSpec};

pub struct RustBackend;

const RUNTIME: &str = "fungen_stream";
const DEAD_U16: u32 = 65535;

/// Panic message of the synthesized handler for inexhaustive lexing
/// functions; stable so instantiations can recognize the condition.
pub const LEXICAL_ERROR_MESSAGE: &str = "lexical error: no arm matches the input";

const RUST_KEYWORDS: &[&str] = &[
    "as", "break", "const", "continue", "crate", "dyn", "else", "enum", "extern", "false", "fn",
    "for", "if", "impl", "in", "let", "loop", "match", "mod", "move", "mut", "pub", "ref",
    "return", "self", "Self", "static", "struct", "super", "trait", "true", "type", "unsafe",
    "use", "where", "while", "async", "await", "abstract", "become", "box", "do", "final",
    "macro", "override", "priv", "try", "typeof", "unsized", "virtual", "yield", "union", "_",
];

pub(crate) fn is_rust_keyword(name: &str) -> bool {
    RUST_KEYWORDS.contains(&name)
}

fn is_legal_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    let legal_start = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_');
    legal_start
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !is_rust_keyword(name)
        && !name.starts_with("hyg_")
}

fn check_name(
    diags: &mut Vec<Diagnostic>,
    name: &str,
    what: &str,
    pos: Pos,
    reserved: &[&str],
) {
    if !is_legal_identifier(name) {
        diags.push(Diagnostic::error(
            format!("{what} `{name}` is not a legal generated-code identifier (ASCII word shape, no keywords, no `hyg_` prefix)"),
            pos,
        ));
    } else if reserved.contains(&name) {
        diags.push(Diagnostic::error(
            format!("{what} `{name}` collides with a name the generated module defines"),
            pos,
        ));
    }
}

impl Backend for RustBackend {
    fn name(&self) -> &'static str {
        "rust"
    }

    fn check_lex_names(&self, spec: &LexSpec) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        check_name(
            &mut diags,
            &spec.module_name,
            "module name",
            Pos::START,
            &["Arg", "Info", "Self_"],
        );
        for function in &spec.functions {
            check_name(&mut diags, &function.name, "function name", function.pos, &["new"]);
            check_name(&mut diags, &function.result_type, "result type", function.pos, &[]);
            for arm in &function.arms {
                check_name(&mut diags, &arm.action, "action name", arm.pos, &[]);
            }
        }
        diags
    }

    fn check_parse_names(&self, spec: &ParseSpec) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        check_name(
            &mut diags,
            &spec.module_name,
            "module name",
            Pos::START,
            &["Arg", "Terminal"],
        );
        for terminal in &spec.terminals {
            check_name(&mut diags, &terminal.name, "terminal name", terminal.pos, &[]);
            if let Some(ty) = &terminal.payload_type {
                check_name(&mut diags, ty, "payload type", terminal.pos, &["Error"]);
            }
        }
        for nt in &spec.nonterminals {
            check_name(&mut diags, &nt.result_type, "result type", nt.pos, &["Error"]);
            for prod in &nt.productions {
                check_name(&mut diags, &prod.action, "action name", prod.pos, &["error"]);
            }
        }
        // A terminal sharing an abstract type's name would make the variant
        // shadow the enum's type parameter.
        let types: BTreeSet<&str> = parse_abstract_types(spec).into_iter().collect();
        for terminal in &spec.terminals {
            if types.contains(terminal.name.as_str()) {
                diags.push(Diagnostic::error(
                    format!(
                        "terminal name `{}` collides with an abstract type of the same name",
                        terminal.name
                    ),
                    terminal.pos,
                ));
            }
        }
        crate::diag::sort_diagnostics(&mut diags);
        diags
    }

    fn render_lexer(&self, spec: &LexSpec, dfas: &[Dfa]) -> GeneratedModule {
        render_lexer_module(spec, dfas)
    }

    fn render_parser(
        &self,
        spec: &ParseSpec,
        grammar: &Grammar,
        tables: &LrTables,
    ) -> Result<GeneratedModule, Vec<Diagnostic>> {
        if tables.has_unresolved_conflicts() {
            let diags = tables
                .unresolved_conflicts()
                .map(|c| {
                    Diagnostic::error(
                        format!(
                            "unresolved {} conflict in state {} on `{}`; declare precedences or refactor the grammar",
                            match c.kind {
                                crate::lr::ConflictKind::ShiftReduce => "shift-reduce",
                                crate::lr::ConflictKind::ReduceReduce => "reduce-reduce",
                            },
                            c.state,
                            grammar.lookahead_name(c.lookahead)
                        ),
                        Pos::START,
                    )
                })
                .collect();
            return Err(diags);
        }
        Ok(render_parser_module(spec, grammar, tables))
    }

    fn render_lexer_stub(&self, module: &GeneratedModule) -> String {
        lexer_stub(module)
    }

    fn render_parser_stub(&self, module: &GeneratedModule) -> String {
        parser_stub(module)
    }
}

fn push_header(out: &mut String, module_name: &str, hash: &str) {
    out.push_str(&format!(
        "// Generated by fungen {} (module {module_name}, spec sha256 {hash}).\n\
         // Do not edit; regenerate from the specification instead.\n\n",
        env!("CARGO_PKG_VERSION")
    ));
    out.push_str("#![allow(dead_code)]\n");
    out.push_str("#![allow(non_camel_case_types)]\n");
    out.push_str("#![allow(non_snake_case)]\n");
    out.push_str("#![allow(non_upper_case_globals)]\n\n");
}

fn push_int_array(out: &mut String, name: &str, ty: &str, values: &[u32]) {
    out.push_str(&format!("static {name}: [{ty}; {}] = [\n", values.len()));
    for chunk in values.chunks(16) {
        let row: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!("    {},\n", row.join(", ")));
    }
    out.push_str("];\n");
}

fn lex_interface(spec: &LexSpec) -> ActionInterface {
    let mut abstract_types: Vec<String> = Vec::new();
    let mut lex_actions: Vec<(String, String)> = Vec::new();
    let mut self_shape: Vec<(String, String)> = Vec::new();
    for function in &spec.functions {
        if !abstract_types.contains(&function.result_type) {
            abstract_types.push(function.result_type.clone());
        }
        self_shape.push((function.name.clone(), function.result_type.clone()));
        for arm in &function.arms {
            if !lex_actions.iter().any(|(name, _)| name == &arm.action) {
                lex_actions.push((arm.action.clone(), function.result_type.clone()));
            }
        }
    }
    ActionInterface {
        abstract_types,
        self_shape,
        lex_actions,
        ..ActionInterface::default()
    }
}

fn render_lexer_module(spec: &LexSpec, dfas: &[Dfa]) -> GeneratedModule {
    assert_eq!(spec.functions.len(), dfas.len(), "one DFA per lexing function");
    let interface = lex_interface(spec);
    let module_name = &spec.module_name;
    let hash = spec_hash(&print_lex_spec(spec));
    let alphabet = spec.alphabet as usize;

    let mut out = String::new();
    push_header(&mut out, module_name, &hash);
    out.push_str("use std::rc::Rc;\n\n");
    out.push_str(&format!("use {RUNTIME}::{{front, Front, Stream}};\n\n"));

    // The action interface.
    out.push_str("/// Everything an instantiation must provide.\npub trait Arg {\n");
    for ty in &interface.abstract_types {
        out.push_str(&format!("    type {ty};\n"));
    }
    out.push('\n');
    for (action, ty) in &interface.lex_actions {
        out.push_str(&format!("    fn {action}(&self, info: Info<Self>) -> Self::{ty};\n"));
    }
    out.push_str("}\n\n");

    // Matching information.
    out.push_str(
        "/// Passed to every action: the matched symbols, the stream right after\n\
         /// them, and the record of lexing functions for reinvocation.\n\
         pub struct Info<A: Arg + ?Sized> {\n    pub r#match: Vec<u8>,\n    pub follow: Stream<u8>,\n    pub self_: Self_<A>,\n}\n\n",
    );

    // The self record.
    out.push_str("/// The generated lexing functions, as passed to actions.\npub struct Self_<A: Arg + ?Sized> {\n    hyg_arg: Rc<A>,\n}\n\n");
    out.push_str("impl<A: Arg + ?Sized> Clone for Self_<A> {\n    fn clone(&self) -> Self_<A> {\n        Self_ { hyg_arg: Rc::clone(&self.hyg_arg) }\n    }\n}\n\n");
    out.push_str("impl<A: Arg + ?Sized> Self_<A> {\n");
    for (function, ty) in &interface.self_shape {
        out.push_str(&format!(
            "    pub fn {function}(&self, input: Stream<u8>) -> A::{ty} {{\n        hyg_run_{function}(&self.hyg_arg, input)\n    }}\n"
        ));
    }
    out.push_str("}\n\n");

    // The module itself; `new` is the functor application.
    out.push_str(&format!(
        "/// The generated lexer; `new` instantiates it with an action\n/// implementation.\npub struct {module_name}<A: Arg> {{\n    hyg_arg: Rc<A>,\n}}\n\n"
    ));
    out.push_str(&format!("impl<A: Arg> {module_name}<A> {{\n    pub fn new(arg: A) -> {module_name}<A> {{\n        {module_name} {{ hyg_arg: Rc::new(arg) }}\n    }}\n"));
    for (function, ty) in &interface.self_shape {
        out.push_str(&format!(
            "\n    pub fn {function}(&self, input: Stream<u8>) -> A::{ty} {{\n        hyg_run_{function}(&self.hyg_arg, input)\n    }}\n"
        ));
    }
    out.push_str("}\n\n");

    out.push_str(&format!("const hyg_ALPHABET: usize = {alphabet};\nconst hyg_DEAD: u16 = {DEAD_U16};\n\n"));

    for (function, dfa) in spec.functions.iter().zip(dfas.iter()) {
        assert!(dfa.state_count < DEAD_U16 as usize, "DFA too large for u16 tables");
        assert_eq!(dfa.alphabet as usize, alphabet);
        let trans: Vec<u32> = dfa
            .trans
            .iter()
            .map(|&t| if t == DEAD { DEAD_U16 } else { t })
            .collect();
        let accept: Vec<u32> = dfa
            .accept
            .iter()
            .map(|tag| match tag {
                Some(arm) => *arm,
                None => u32::MAX,
            })
            .collect();
        // Accept tags fit i32; -1 marks a non-accepting state.
        push_int_array(&mut out, &format!("hyg_TRANS_{}", function.name), "u16", &trans);
        let accept_i32: Vec<String> = accept
            .iter()
            .map(|&tag| if tag == u32::MAX { "-1".to_string() } else { tag.to_string() })
            .collect();
        out.push_str(&format!(
            "static hyg_ACCEPT_{}: [i32; {}] = [{}];\n\n",
            function.name,
            accept_i32.len(),
            accept_i32.join(", ")
        ));
    }

    for function in &spec.functions {
        let name = &function.name;
        let ty = &function.result_type;
        out.push_str(&format!(
            "fn hyg_run_{name}<A: Arg + ?Sized>(hyg_arg: &Rc<A>, hyg_input: Stream<u8>) -> A::{ty} {{\n"
        ));
        out.push_str(&format!(
            "    match hyg_longest_match(&hyg_TRANS_{name}, &hyg_ACCEPT_{name}, hyg_input) {{\n"
        ));
        out.push_str("        Some((hyg_arm, hyg_matched, hyg_follow)) => {\n");
        out.push_str("            let hyg_info = Info {\n                r#match: hyg_matched,\n                follow: hyg_follow,\n                self_: Self_ { hyg_arg: Rc::clone(hyg_arg) },\n            };\n");
        out.push_str("            match hyg_arm {\n");
        for (arm_idx, arm) in function.arms.iter().enumerate() {
            out.push_str(&format!(
                "                {arm_idx} => hyg_arg.{}(hyg_info),\n",
                arm.action
            ));
        }
        out.push_str("                _ => hyg_lexical_error(),\n            }\n        }\n");
        out.push_str("        None => hyg_lexical_error(),\n    }\n}\n\n");
    }

    // Longest-match execution over the memoizing stream: remember the last
    // accepting configuration, stop on end of input, a dead transition, or
    // an out-of-alphabet symbol, then rewind.
    out.push_str(
        "fn hyg_longest_match(\n    hyg_trans: &[u16],\n    hyg_accept: &[i32],\n    hyg_input: Stream<u8>,\n) -> Option<(usize, Vec<u8>, Stream<u8>)> {\n\
         \x20   let mut hyg_state = 0usize;\n\
         \x20   let mut hyg_consumed: Vec<u8> = Vec::new();\n\
         \x20   let mut hyg_cur = hyg_input;\n\
         \x20   let mut hyg_best: Option<(usize, usize, Stream<u8>)> = None;\n\
         \x20   loop {\n\
         \x20       let hyg_tag = hyg_accept[hyg_state];\n\
         \x20       if hyg_tag >= 0 {\n\
         \x20           hyg_best = Some((hyg_tag as usize, hyg_consumed.len(), hyg_cur.clone()));\n\
         \x20       }\n\
         \x20       match front(&hyg_cur) {\n\
         \x20           Front::Nil => break,\n\
         \x20           Front::Cons(hyg_sym, hyg_rest) => {\n\
         \x20               if hyg_sym as usize >= hyg_ALPHABET {\n\
         \x20                   break;\n\
         \x20               }\n\
         \x20               let hyg_next = hyg_trans[hyg_state * hyg_ALPHABET + hyg_sym as usize];\n\
         \x20               if hyg_next == hyg_DEAD {\n\
         \x20                   break;\n\
         \x20               }\n\
         \x20               hyg_state = hyg_next as usize;\n\
         \x20               hyg_consumed.push(hyg_sym);\n\
         \x20               hyg_cur = hyg_rest;\n\
         \x20           }\n\
         \x20       }\n\
         \x20   }\n\
         \x20   hyg_best.map(|(hyg_arm, hyg_len, hyg_follow)| {\n\
         \x20       hyg_consumed.truncate(hyg_len);\n\
         \x20       (hyg_arm, hyg_consumed, hyg_follow)\n\
         \x20   })\n}\n\n",
    );

    out.push_str(&format!(
        "fn hyg_lexical_error<hyg_T>() -> hyg_T {{\n    panic!(\"{LEXICAL_ERROR_MESSAGE}\")\n}}\n"
    ));

    let exports = interface
        .self_shape
        .iter()
        .map(|(function, ty)| (function.clone(), format!("Stream<u8> -> A::{ty}")))
        .collect();
    GeneratedModule {
        source: out,
        interface,
        exports,
        required_runtime: RUNTIME.to_string(),
        module_name: module_name.clone(),
        file_module: snake_case(module_name),
    }
}

fn parse_abstract_types(spec: &ParseSpec) -> Vec<&str> {
    let mut types: Vec<&str> = Vec::new();
    for terminal in &spec.terminals {
        if let Some(ty) = &terminal.payload_type {
            if !types.contains(&ty.as_str()) {
                types.push(ty);
            }
        }
    }
    for nt in &spec.nonterminals {
        if !types.contains(&nt.result_type.as_str()) {
            types.push(&nt.result_type);
        }
    }
    types
}

fn payload_types(spec: &ParseSpec) -> Vec<&str> {
    let mut types: Vec<&str> = Vec::new();
    for terminal in &spec.terminals {
        if let Some(ty) = &terminal.payload_type {
            if !types.contains(&ty.as_str()) {
                types.push(ty);
            }
        }
    }
    types
}

fn parse_interface(spec: &ParseSpec, grammar: &Grammar) -> ActionInterface {
    let abstract_types: Vec<String> = parse_abstract_types(spec)
        .into_iter()
        .map(str::to_string)
        .collect();
    let terminals: Vec<(String, Option<String>)> = spec
        .terminals
        .iter()
        .map(|t| (t.name.clone(), t.payload_type.clone()))
        .collect();
    let mut parse_actions: Vec<(String, Vec<String>, String)> = Vec::new();
    for prod in grammar.productions.iter().skip(1) {
        if parse_actions.iter().any(|(name, _, _)| name == &prod.action) {
            continue;
        }
        let args: Vec<String> = prod
            .value_positions
            .iter()
            .map(|&(rhs_idx, _)| match prod.rhs[rhs_idx] {
                crate::lr::Symbol::Term(t) => grammar.terminals[t]
                    .payload_type
                    .clone()
                    .expect("numbered terminal carries a payload"),
                crate::lr::Symbol::Nonterm(nt) => grammar.nonterminals[nt].result_type.clone(),
            })
            .collect();
        let result = grammar.nonterminals[prod.lhs].result_type.clone();
        parse_actions.push((prod.action.clone(), args, result));
    }
    ActionInterface {
        abstract_types,
        terminals,
        parse_actions,
        has_error_action: true,
        ..ActionInterface::default()
    }
}

/// `Terminal`, `Terminal<t>`, `Terminal<Self::t, Self::u>`, ... depending on
/// the payload types and the naming context.
fn terminal_type(payloads: &[&str], prefix: &str) -> String {
    if payloads.is_empty() {
        "Terminal".to_string()
    } else {
        let args: Vec<String> = payloads.iter().map(|ty| format!("{prefix}{ty}")).collect();
        format!("Terminal<{}>", args.join(", "))
    }
}

fn encode_action(action: Action) -> i32 {
    match action {
        Action::Error => 0,
        Action::Shift(s) => s as i32 + 1,
        Action::Accept => -1,
        Action::Reduce(p) => -(p as i32) - 1,
    }
}

fn render_parser_module(spec: &ParseSpec, grammar: &Grammar, tables: &LrTables) -> GeneratedModule {
    let interface = parse_interface(spec, grammar);
    let module_name = &spec.module_name;
    let hash = spec_hash(&print_parse_spec(spec));
    let payloads = payload_types(spec);
    let n_columns = tables.n_terminals + 1;
    let n_user_nts = grammar.user_nonterminal_count();
    let payload_set: BTreeSet<&str> = payloads.iter().copied().collect();
    assert!(tables.state_count < DEAD_U16 as usize, "too many states for u16 goto");

    let mut out = String::new();
    push_header(&mut out, module_name, &hash);
    out.push_str(&format!("use {RUNTIME}::{{front, Front, Stream}};\n\n"));

    // The terminal type is defined here and exported; instantiations build
    // tokens from it.
    out.push_str("/// Terminal symbols consumed by `parse`.\n#[derive(Clone)]\n");
    let generics = if payloads.is_empty() {
        String::new()
    } else {
        format!("<{}>", payloads.join(", "))
    };
    out.push_str(&format!("pub enum Terminal{generics} {{\n"));
    for (name, payload) in &interface.terminals {
        match payload {
            Some(ty) => out.push_str(&format!("    {name}({ty}),\n")),
            None => out.push_str(&format!("    {name},\n")),
        }
    }
    out.push_str("}\n\n");

    // The action interface.
    out.push_str("/// Everything an instantiation must provide.\npub trait Arg {\n");
    for ty in &interface.abstract_types {
        if payload_set.contains(ty.as_str()) {
            out.push_str(&format!("    type {ty}: Clone;\n"));
        } else {
            out.push_str(&format!("    type {ty};\n"));
        }
    }
    out.push_str("    type Error;\n\n");
    for (action, args, result) in &interface.parse_actions {
        let params: Vec<String> = args
            .iter()
            .enumerate()
            .map(|(i, ty)| format!("a{}: Self::{ty}", i + 1))
            .collect();
        let params = if params.is_empty() {
            String::new()
        } else {
            format!(", {}", params.join(", "))
        };
        out.push_str(&format!("    fn {action}(&self{params}) -> Self::{result};\n"));
    }
    out.push_str(&format!(
        "\n    /// Receives the remaining input (syntax-error lookahead first) and\n    /// produces the error value `parse` returns.\n    fn error(&self, rest: Stream<{}>) -> Self::Error;\n",
        terminal_type(&payloads, "Self::")
    ));
    out.push_str("}\n\n");

    // The module; `new` is the functor application.
    out.push_str(&format!(
        "/// The generated parser; `new` instantiates it with an action\n/// implementation.\npub struct {module_name}<A: Arg> {{\n    hyg_arg: A,\n}}\n\n"
    ));

    // Internal value stack entries: one variant per abstract type.
    out.push_str("enum hyg_Value<A: Arg> {\n    hyg_none,\n");
    for ty in &interface.abstract_types {
        out.push_str(&format!("    hyg_v_{ty}(A::{ty}),\n"));
    }
    out.push_str("}\n\n");

    let action_values: Vec<u32> = (0..tables.state_count as u32)
        .flat_map(|state| {
            (0..n_columns).map(move |col| (state, col))
        })
        .map(|(state, col)| encode_action(tables.action_at(state, col)) as u32)
        .collect();
    // Stored as i32 but formatted via the encode; emit signed literals.
    out.push_str(&format!(
        "const hyg_EOF: usize = {};\nconst hyg_NCOLS: usize = {};\nconst hyg_NOGOTO: u16 = {DEAD_U16};\n\n",
        tables.n_terminals, n_columns
    ));
    {
        let signed: Vec<String> = action_values
            .iter()
            .map(|&bits| (bits as i32).to_string())
            .collect();
        out.push_str(&format!("static hyg_ACTION: [i32; {}] = [\n", signed.len()));
        for chunk in signed.chunks(16) {
            out.push_str(&format!("    {},\n", chunk.join(", ")));
        }
        out.push_str("];\n");
    }
    let goto_values: Vec<u32> = (0..tables.state_count as u32)
        .flat_map(|state| (0..n_user_nts).map(move |nt| (state, nt)))
        .map(|(state, nt)| match tables.goto_at(state, nt, n_user_nts) {
            Some(target) => target,
            None => DEAD_U16,
        })
        .collect();
    push_int_array(&mut out, "hyg_GOTO", "u16", &goto_values);
    out.push('\n');

    // Lookahead classification.
    let column_generics = if payloads.is_empty() {
        String::new()
    } else {
        format!("<{}>", payloads.join(", "))
    };
    out.push_str(&format!(
        "fn hyg_column{column_generics}(hyg_tok: &{}) -> usize {{\n    match hyg_tok {{\n",
        terminal_type(&payloads, "")
    ));
    for (idx, (name, payload)) in interface.terminals.iter().enumerate() {
        let pattern = if payload.is_some() {
            format!("Terminal::{name}(_)")
        } else {
            format!("Terminal::{name}")
        };
        out.push_str(&format!("        {pattern} => {idx},\n"));
    }
    out.push_str("    }\n}\n\n");

    out.push_str("fn hyg_bug<hyg_T>() -> hyg_T {\n    panic!(\"corrupt parser state: generated tables are inconsistent\")\n}\n\n");

    out.push_str("fn hyg_goto_state<A: Arg>(hyg_stack: &[(usize, hyg_Value<A>)], hyg_nt: usize) -> usize {\n");
    out.push_str("    let hyg_state = match hyg_stack.last() {\n        Some(hyg_top) => hyg_top.0,\n        None => hyg_bug(),\n    };\n");
    out.push_str(&format!(
        "    let hyg_next = hyg_GOTO[hyg_state * {n_user_nts} + hyg_nt];\n    if hyg_next == hyg_NOGOTO {{\n        hyg_bug()\n    }} else {{\n        hyg_next as usize\n    }}\n}}\n\n"
    ));

    // The parse engine: shift-reduce over a value stack, peeking each token
    // exactly once per input position.
    out.push_str(&format!("impl<A: Arg> {module_name}<A> {{\n"));
    out.push_str(&format!(
        "    pub fn new(arg: A) -> {module_name}<A> {{\n        {module_name} {{ hyg_arg: arg }}\n    }}\n\n"
    ));
    let term_a = terminal_type(&payloads, "A::");
    out.push_str(&format!(
        "    pub fn parse(&self, input: Stream<{term_a}>) -> Result<A::{start_ty}, A::Error> {{\n",
        start_ty = grammar.nonterminals[grammar.start].result_type
    ));
    out.push_str("        let hyg_arg = &self.hyg_arg;\n");
    out.push_str("        let mut hyg_stack: Vec<(usize, hyg_Value<A>)> = vec![(0, hyg_Value::hyg_none)];\n");
    out.push_str("        let mut hyg_cur = input;\n");
    out.push_str("        loop {\n");
    out.push_str("            let hyg_peek = front(&hyg_cur);\n");
    out.push_str("            let hyg_col = match &hyg_peek {\n                Front::Nil => hyg_EOF,\n                Front::Cons(hyg_tok, _) => hyg_column(hyg_tok),\n            };\n");
    out.push_str("            loop {\n");
    out.push_str("                let hyg_state = match hyg_stack.last() {\n                    Some(hyg_top) => hyg_top.0,\n                    None => hyg_bug(),\n                };\n");
    out.push_str("                let hyg_act = hyg_ACTION[hyg_state * hyg_NCOLS + hyg_col];\n");
    out.push_str("                if hyg_act > 0 {\n");
    out.push_str("                    match hyg_peek {\n");
    out.push_str("                        Front::Cons(hyg_tok, hyg_rest) => {\n");
    out.push_str("                            let hyg_val = match hyg_tok {\n");
    for (name, payload) in &interface.terminals {
        match payload {
            Some(ty) => out.push_str(&format!(
                "                                Terminal::{name}(hyg_x) => hyg_Value::hyg_v_{ty}(hyg_x),\n"
            )),
            None => out.push_str(&format!(
                "                                Terminal::{name} => hyg_Value::hyg_none,\n"
            )),
        }
    }
    out.push_str("                            };\n");
    out.push_str("                            hyg_stack.push(((hyg_act - 1) as usize, hyg_val));\n");
    out.push_str("                            hyg_cur = hyg_rest;\n");
    out.push_str("                        }\n");
    out.push_str("                        Front::Nil => hyg_bug(),\n");
    out.push_str("                    }\n");
    out.push_str("                    break;\n");
    out.push_str("                } else if hyg_act < 0 {\n");
    out.push_str("                    match -hyg_act - 1 {\n");
    // Accept: reduce by the augmented production.
    let start_variant = format!("hyg_v_{}", grammar.nonterminals[grammar.start].result_type);
    out.push_str(&format!(
        "                        0 => {{\n                            let hyg_result = match hyg_stack.pop() {{\n                                Some((_, hyg_Value::{start_variant}(hyg_v))) => hyg_v,\n                                _ => hyg_bug(),\n                            }};\n                            return Ok(hyg_result);\n                        }}\n"
    ));
    for (prod_idx, prod) in grammar.productions.iter().enumerate().skip(1) {
        let k = prod.rhs.len();
        let result_variant = format!("hyg_v_{}", grammar.nonterminals[prod.lhs].result_type);
        out.push_str(&format!("                        {prod_idx} => {{\n"));
        if prod.value_positions.is_empty() {
            if k > 0 {
                out.push_str(&format!(
                    "                            let hyg_base = hyg_stack.len() - {k};\n                            hyg_stack.truncate(hyg_base);\n"
                ));
            }
        } else {
            out.push_str(&format!(
                "                            let hyg_base = hyg_stack.len() - {k};\n                            let mut hyg_vals = hyg_stack.split_off(hyg_base);\n"
            ));
            for (slot_pos, &(rhs_idx, _)) in prod.value_positions.iter().enumerate() {
                let ty = match prod.rhs[rhs_idx] {
                    crate::lr::Symbol::Term(t) => grammar.terminals[t]
                        .payload_type
                        .clone()
                        .expect("numbered terminal carries a payload"),
                    crate::lr::Symbol::Nonterm(nt) => {
                        grammar.nonterminals[nt].result_type.clone()
                    }
                };
                out.push_str(&format!(
                    "                            let hyg_a{} = match std::mem::replace(&mut hyg_vals[{rhs_idx}].1, hyg_Value::hyg_none) {{\n                                hyg_Value::hyg_v_{ty}(hyg_x) => hyg_x,\n                                _ => hyg_bug(),\n                            }};\n",
                    slot_pos + 1
                ));
            }
        }
        let args: Vec<String> = (1..=prod.value_positions.len())
            .map(|i| format!("hyg_a{i}"))
            .collect();
        out.push_str(&format!(
            "                            let hyg_res = hyg_arg.{}({});\n",
            prod.action,
            args.join(", ")
        ));
        out.push_str(&format!(
            "                            let hyg_next = hyg_goto_state(&hyg_stack, {});\n                            hyg_stack.push((hyg_next, hyg_Value::{result_variant}(hyg_res)));\n",
            prod.lhs
        ));
        out.push_str("                        }\n");
    }
    out.push_str("                        _ => hyg_bug(),\n");
    out.push_str("                    }\n");
    out.push_str("                } else {\n");
    out.push_str("                    return Err(hyg_arg.error(hyg_cur));\n");
    out.push_str("                }\n");
    out.push_str("            }\n");
    out.push_str("        }\n");
    out.push_str("    }\n");
    out.push_str("}\n");

    let exports = vec![(
        "parse".to_string(),
        format!(
            "Stream<{term_a}> -> Result<A::{}, A::Error>",
            grammar.nonterminals[grammar.start].result_type
        ),
    )];
    GeneratedModule {
        source: out,
        interface,
        exports,
        required_runtime: RUNTIME.to_string(),
        module_name: module_name.clone(),
        file_module: snake_case(module_name),
    }
}

fn lexer_stub(module: &GeneratedModule) -> String {
    let file_module = &module.file_module;
    let module_name = &module.module_name;
    let mut out = String::new();
    out.push_str(&format!("mod {file_module};\n\nuse {RUNTIME}::from_list;\n\nstruct StubArg;\n\n"));
    out.push_str(&format!("impl {file_module}::Arg for StubArg {{\n"));
    for ty in &module.interface.abstract_types {
        out.push_str(&format!("    type {ty} = ();\n"));
    }
    out.push('\n');
    for (action, ty) in &module.interface.lex_actions {
        out.push_str(&format!(
            "    fn {action}(&self, _info: {file_module}::Info<Self>) -> Self::{ty} {{}}\n"
        ));
    }
    out.push_str("}\n\nfn main() {\n");
    out.push_str(&format!(
        "    let lexer = {file_module}::{module_name}::new(StubArg);\n"
    ));
    for (function, _) in &module.interface.self_shape {
        out.push_str(&format!("    lexer.{function}(from_list(Vec::new()));\n"));
    }
    out.push_str("}\n");
    out
}

fn parser_stub(module: &GeneratedModule) -> String {
    let file_module = &module.file_module;
    let module_name = &module.module_name;
    let payloads: Vec<&str> = {
        let mut seen = Vec::new();
        for (_, payload) in &module.interface.terminals {
            if let Some(ty) = payload {
                if !seen.contains(&ty.as_str()) {
                    seen.push(ty);
                }
            }
        }
        seen
    };
    let unit_terminal = if payloads.is_empty() {
        format!("{file_module}::Terminal")
    } else {
        let units = vec!["()"; payloads.len()].join(", ");
        format!("{file_module}::Terminal<{units}>")
    };
    let mut out = String::new();
    out.push_str(&format!("mod {file_module};\n\nuse {RUNTIME}::{{from_list, Stream}};\n\nstruct StubArg;\n\n"));
    out.push_str(&format!("impl {file_module}::Arg for StubArg {{\n"));
    for ty in &module.interface.abstract_types {
        out.push_str(&format!("    type {ty} = ();\n"));
    }
    out.push_str("    type Error = ();\n\n");
    for (action, args, _) in &module.interface.parse_actions {
        let params: Vec<String> = args
            .iter()
            .enumerate()
            .map(|(i, ty)| format!("_a{}: Self::{ty}", i + 1))
            .collect();
        let params = if params.is_empty() {
            String::new()
        } else {
            format!(", {}", params.join(", "))
        };
        out.push_str(&format!("    fn {action}(&self{params}) -> Self::{} {{}}\n", {
            // result type lives in the interface record
            &module
                .interface
                .parse_actions
                .iter()
                .find(|(name, _, _)| name == action)
                .unwrap()
                .2
        }));
    }
    let self_payloads = if payloads.is_empty() {
        String::new()
    } else {
        let args: Vec<String> = payloads.iter().map(|ty| format!("Self::{ty}")).collect();
        format!("<{}>", args.join(", "))
    };
    out.push_str(&format!(
        "\n    fn error(&self, _rest: Stream<{file_module}::Terminal{self_payloads}>) -> Self::Error {{}}\n"
    ));
    out.push_str("}\n\nfn main() {\n");
    out.push_str(&format!(
        "    let parser = {file_module}::{module_name}::new(StubArg);\n"
    ));
    out.push_str(&format!(
        "    let input: Stream<{unit_terminal}> = from_list(Vec::new());\n    let _ = parser.parse(input);\n"
    ));
    out.push_str("}\n");
    out
}
