//! LALR(1) table construction with a conflict ledger, Yacc-style precedence
//! resolution, a table-driven reference parser, and an Earley recognizer
//! used as an independent oracle.
//!
//! States are numbered in first-discovery (BFS) order over the LR(0) item-set
//! collection, and every internal iteration runs over ordered structures, so
//! identical specs produce identical tables.
//!
//! ```
//! use fungen_core::{lr, spec};
//!
//! let parsed = spec::parse_parse_spec(fungen_core::corpus::ARITH_PREC_PARSE).unwrap();
//! let grammar = lr::to_grammar(&parsed);
//! let tables = lr::build_lalr(&grammar);
//! assert!(tables.has_unresolved_conflicts());
//!
//! let resolved = lr::apply_precedence(&tables, &grammar, &parsed.precedences);
//! assert!(!resolved.has_unresolved_conflicts());
//! ```

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use fungen_stream::{front, Front, Stream};

use crate::spec::{Assoc, ParseSpec, PrecDecl};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Term(usize),
    Nonterm(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerminalInfo {
    pub name: String,
    pub payload_type: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonterminalInfo {
    pub name: String,
    pub result_type: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Production {
    pub lhs: usize,
    pub rhs: Vec<Symbol>,
    pub action: String,
    /// `(rhs index, argument slot)` pairs sorted by slot; slots are 1..k.
    pub value_positions: Vec<(usize, usize)>,
}

/// A grammar augmented with `S' -> start` as production 0; the augmented
/// nonterminal is the last entry of `nonterminals`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    pub terminals: Vec<TerminalInfo>,
    pub nonterminals: Vec<NonterminalInfo>,
    pub productions: Vec<Production>,
    pub start: usize,
}

impl Grammar {
    pub fn augmented_nonterminal(&self) -> usize {
        self.nonterminals.len() - 1
    }

    /// Nonterminals that may appear on a right-hand side (excludes the
    /// augmented start).
    pub fn user_nonterminal_count(&self) -> usize {
        self.nonterminals.len() - 1
    }

    /// The table column for end of input.
    pub fn eof_column(&self) -> usize {
        self.terminals.len()
    }

    pub fn symbol_name(&self, symbol: Symbol) -> &str {
        match symbol {
            Symbol::Term(t) => &self.terminals[t].name,
            Symbol::Nonterm(nt) => &self.nonterminals[nt].name,
        }
    }

    pub fn lookahead_name(&self, column: usize) -> &str {
        if column == self.eof_column() {
            "$"
        } else {
            &self.terminals[column].name
        }
    }

    pub fn display_production(&self, prod: u32) -> String {
        let p = &self.productions[prod as usize];
        let rhs = if p.rhs.is_empty() {
            ".".to_string()
        } else {
            p.rhs
                .iter()
                .map(|&s| self.symbol_name(s).to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        format!("{} -> {}", self.nonterminals[p.lhs].name, rhs)
    }
}

/// Converts a validated spec into the augmented grammar form. The numbered
/// right-hand-side symbols become `value_positions` in slot order.
pub fn to_grammar(spec: &ParseSpec) -> Grammar {
    let terminals: Vec<TerminalInfo> = spec
        .terminals
        .iter()
        .map(|t| TerminalInfo {
            name: t.name.clone(),
            payload_type: t.payload_type.clone(),
        })
        .collect();
    let term_index: BTreeMap<&str, usize> = spec
        .terminals
        .iter()
        .enumerate()
        .map(|(i, t)| (t.name.as_str(), i))
        .collect();
    let nt_index: BTreeMap<&str, usize> = spec
        .nonterminals
        .iter()
        .enumerate()
        .map(|(i, nt)| (nt.name.as_str(), i))
        .collect();

    let start = nt_index[spec.start.as_str()];
    let mut nonterminals: Vec<NonterminalInfo> = spec
        .nonterminals
        .iter()
        .map(|nt| NonterminalInfo {
            name: nt.name.clone(),
            result_type: nt.result_type.clone(),
        })
        .collect();
    let augmented = nonterminals.len();
    nonterminals.push(NonterminalInfo {
        name: format!("{}'", spec.start),
        result_type: spec.nonterminals[start].result_type.clone(),
    });

    let mut productions = vec![Production {
        lhs: augmented,
        rhs: vec![Symbol::Nonterm(start)],
        action: String::new(),
        value_positions: Vec::new(),
    }];
    for (nt_id, nt) in spec.nonterminals.iter().enumerate() {
        for prod in &nt.productions {
            let rhs: Vec<Symbol> = prod
                .rhs
                .iter()
                .map(|item| match term_index.get(item.symbol.as_str()) {
                    Some(&t) => Symbol::Term(t),
                    None => Symbol::Nonterm(nt_index[item.symbol.as_str()]),
                })
                .collect();
            let mut value_positions: Vec<(usize, usize)> = prod
                .rhs
                .iter()
                .enumerate()
                .filter_map(|(idx, item)| item.position.map(|slot| (idx, slot as usize)))
                .collect();
            value_positions.sort_by_key(|&(_, slot)| slot);
            productions.push(Production {
                lhs: nt_id,
                rhs,
                action: prod.action.clone(),
                value_positions,
            });
        }
    }

    Grammar {
        terminals,
        nonterminals,
        productions,
        start,
    }
}

/// One table cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Error,
    Shift(u32),
    Reduce(u32),
    Accept,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConflictKind {
    ShiftReduce,
    ReduceReduce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution {
    Unresolved,
    ByPrecedence(Action),
    DefaultRule(Action),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conflict {
    pub state: u32,
    /// Lookahead column; `eof_column()` means end of input.
    pub lookahead: usize,
    pub kind: ConflictKind,
    pub shift: Option<u32>,
    pub reduces: Vec<u32>,
    pub resolution: Resolution,
}

/// An LR(0) item: production index and dot offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Item {
    pub prod: u32,
    pub dot: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LrTables {
    pub state_count: usize,
    pub n_terminals: usize,
    /// Row-major `state * (n_terminals + 1) + lookahead`; the last column is
    /// end of input.
    pub action: Vec<Action>,
    /// Row-major `state * user_nonterminal_count + nonterminal`.
    pub goto_table: Vec<Option<u32>>,
    pub conflicts: Vec<Conflict>,
    /// Kernel items per state, for dumps and conflict reports.
    pub kernels: Vec<Vec<Item>>,
}

impl LrTables {
    pub fn action_at(&self, state: u32, column: usize) -> Action {
        self.action[state as usize * (self.n_terminals + 1) + column]
    }

    pub fn goto_at(&self, state: u32, nonterminal: usize, n_user_nts: usize) -> Option<u32> {
        self.goto_table[state as usize * n_user_nts + nonterminal]
    }

    pub fn unresolved_conflicts(&self) -> impl Iterator<Item = &Conflict> {
        self.conflicts.iter().filter(|c| c.resolution == Resolution::Unresolved)
    }

    pub fn has_unresolved_conflicts(&self) -> bool {
        self.unresolved_conflicts().next().is_some()
    }
}

/// Terminal bitset (plus one bit for end of input).
#[derive(Debug, Clone, PartialEq, Eq)]
struct LaSet {
    words: Vec<u64>,
}

impl LaSet {
    fn new(n: usize) -> LaSet {
        LaSet {
            words: vec![0; n.div_ceil(64)],
        }
    }

    fn insert(&mut self, i: usize) -> bool {
        let word = i / 64;
        let bit = 1u64 << (i % 64);
        let was = self.words[word] & bit != 0;
        self.words[word] |= bit;
        !was
    }

    fn union_with(&mut self, other: &LaSet) -> bool {
        let mut changed = false;
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            let merged = *a | b;
            if merged != *a {
                *a = merged;
                changed = true;
            }
        }
        changed
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &bits)| {
            (0..64).filter(move |b| bits & (1u64 << b) != 0).map(move |b| w * 64 + b)
        })
    }
}

struct FirstSets {
    nullable: Vec<bool>,
    /// Per nonterminal: terminal columns in FIRST.
    first: Vec<LaSet>,
    n_columns: usize,
}

fn compute_first_sets(grammar: &Grammar) -> FirstSets {
    let n_nts = grammar.nonterminals.len();
    let n_columns = grammar.eof_column() + 1;
    let mut nullable = vec![false; n_nts];
    let mut first: Vec<LaSet> = (0..n_nts).map(|_| LaSet::new(n_columns)).collect();
    loop {
        let mut changed = false;
        for prod in &grammar.productions {
            let mut all_nullable = true;
            for &symbol in &prod.rhs {
                match symbol {
                    Symbol::Term(t) => {
                        if first[prod.lhs].insert(t) {
                            changed = true;
                        }
                        all_nullable = false;
                    }
                    Symbol::Nonterm(nt) => {
                        let other = first[nt].clone();
                        if first[prod.lhs].union_with(&other) {
                            changed = true;
                        }
                        if !nullable[nt] {
                            all_nullable = false;
                        }
                    }
                }
                if !all_nullable {
                    break;
                }
            }
            if all_nullable && !nullable[prod.lhs] {
                nullable[prod.lhs] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    FirstSets {
        nullable,
        first,
        n_columns,
    }
}

impl FirstSets {
    /// FIRST of a symbol sequence, plus whether the whole sequence derives
    /// the empty string.
    fn first_of_seq(&self, symbols: &[Symbol]) -> (LaSet, bool) {
        let mut set = LaSet::new(self.n_columns);
        for &symbol in symbols {
            match symbol {
                Symbol::Term(t) => {
                    set.insert(t);
                    return (set, false);
                }
                Symbol::Nonterm(nt) => {
                    set.union_with(&self.first[nt]);
                    if !self.nullable[nt] {
                        return (set, false);
                    }
                }
            }
        }
        (set, true)
    }
}

/// LR(1)-style closure over `(item, lookahead set, carries-dummy)` seeds.
/// The dummy flag implements the spontaneous/propagated lookahead split.
fn lr1_closure(
    grammar: &Grammar,
    firsts: &FirstSets,
    prods_of: &[Vec<u32>],
    seeds: &[(Item, LaSet, bool)],
) -> BTreeMap<Item, (LaSet, bool)> {
    let mut items: BTreeMap<Item, (LaSet, bool)> = BTreeMap::new();
    let mut work: Vec<Item> = Vec::new();
    for (item, la, dummy) in seeds {
        let entry = items
            .entry(*item)
            .or_insert_with(|| (LaSet::new(firsts.n_columns), false));
        entry.0.union_with(la);
        entry.1 |= dummy;
        work.push(*item);
    }
    while let Some(item) = work.pop() {
        let (la, dummy) = items[&item].clone();
        let prod = &grammar.productions[item.prod as usize];
        let Some(&Symbol::Nonterm(nt)) = prod.rhs.get(item.dot as usize) else {
            continue;
        };
        let beta = &prod.rhs[item.dot as usize + 1..];
        let (mut new_la, beta_nullable) = firsts.first_of_seq(beta);
        let new_dummy = beta_nullable && dummy;
        if beta_nullable {
            new_la.union_with(&la);
        }
        for &q in &prods_of[nt] {
            let key = Item { prod: q, dot: 0 };
            let entry = items
                .entry(key)
                .or_insert_with(|| (LaSet::new(firsts.n_columns), false));
            let grew_bits = entry.0.union_with(&new_la);
            let grew_dummy = new_dummy && !entry.1;
            entry.1 |= new_dummy;
            if grew_bits || grew_dummy {
                work.push(key);
            }
        }
    }
    items
}

/// Builds the canonical LR(0) collection, computes LALR(1) lookaheads by
/// spontaneous generation plus propagation, and fills the ACTION/GOTO
/// tables. Conflicted cells keep a deterministic default entry (the shift if
/// any, else the lowest-numbered reduce) and are recorded as `Unresolved`
/// conflicts; nothing is silently dropped.
pub fn build_lalr(grammar: &Grammar) -> LrTables {
    let n_terminals = grammar.terminals.len();
    let n_columns = n_terminals + 1;
    let eof = grammar.eof_column();
    let n_user_nts = grammar.user_nonterminal_count();
    let firsts = compute_first_sets(grammar);

    let mut prods_of: Vec<Vec<u32>> = vec![Vec::new(); grammar.nonterminals.len()];
    for (i, prod) in grammar.productions.iter().enumerate() {
        prods_of[prod.lhs].push(i as u32);
    }

    // LR(0) collection, BFS over kernels.
    let mut kernels: Vec<Vec<Item>> = vec![vec![Item { prod: 0, dot: 0 }]];
    let mut kernel_ids: HashMap<Vec<Item>, u32> = HashMap::new();
    kernel_ids.insert(kernels[0].clone(), 0);
    let mut goto_maps: Vec<BTreeMap<Symbol, u32>> = Vec::new();
    let mut next_unprocessed = 0usize;
    while next_unprocessed < kernels.len() {
        let kernel = kernels[next_unprocessed].clone();
        next_unprocessed += 1;

        // LR(0) closure.
        let mut closure: BTreeSet<Item> = kernel.iter().copied().collect();
        let mut work: Vec<Item> = closure.iter().copied().collect();
        while let Some(item) = work.pop() {
            let prod = &grammar.productions[item.prod as usize];
            if let Some(&Symbol::Nonterm(nt)) = prod.rhs.get(item.dot as usize) {
                for &q in &prods_of[nt] {
                    let new_item = Item { prod: q, dot: 0 };
                    if closure.insert(new_item) {
                        work.push(new_item);
                    }
                }
            }
        }

        let mut moves: BTreeMap<Symbol, Vec<Item>> = BTreeMap::new();
        for item in &closure {
            let prod = &grammar.productions[item.prod as usize];
            if let Some(&symbol) = prod.rhs.get(item.dot as usize) {
                moves.entry(symbol).or_default().push(Item {
                    prod: item.prod,
                    dot: item.dot + 1,
                });
            }
        }
        let mut goto_map = BTreeMap::new();
        for (symbol, mut target_kernel) in moves {
            target_kernel.sort();
            target_kernel.dedup();
            let id = match kernel_ids.get(&target_kernel) {
                Some(&id) => id,
                None => {
                    let id = kernels.len() as u32;
                    kernel_ids.insert(target_kernel.clone(), id);
                    kernels.push(target_kernel);
                    id
                }
            };
            goto_map.insert(symbol, id);
        }
        goto_maps.push(goto_map);
    }
    let state_count = kernels.len();

    // LALR(1) lookaheads for kernel items.
    let kernel_index: Vec<BTreeMap<Item, usize>> = kernels
        .iter()
        .map(|kernel| kernel.iter().enumerate().map(|(i, &item)| (item, i)).collect())
        .collect();
    let mut la: Vec<Vec<LaSet>> = kernels
        .iter()
        .map(|kernel| kernel.iter().map(|_| LaSet::new(n_columns)).collect())
        .collect();
    la[0][0].insert(eof);

    let mut links: Vec<(usize, usize, usize, usize)> = Vec::new();
    for (state, kernel) in kernels.iter().enumerate() {
        for (k_idx, &kitem) in kernel.iter().enumerate() {
            let seeds = vec![(kitem, LaSet::new(n_columns), true)];
            let closure = lr1_closure(grammar, &firsts, &prods_of, &seeds);
            for (item, (bits, dummy)) in &closure {
                let prod = &grammar.productions[item.prod as usize];
                let Some(&symbol) = prod.rhs.get(item.dot as usize) else {
                    continue;
                };
                let target_state = goto_maps[state][&symbol] as usize;
                let advanced = Item {
                    prod: item.prod,
                    dot: item.dot + 1,
                };
                let target_idx = kernel_index[target_state][&advanced];
                la[target_state][target_idx].union_with(bits);
                if *dummy {
                    links.push((state, k_idx, target_state, target_idx));
                }
            }
        }
    }
    loop {
        let mut changed = false;
        for &(from_state, from_idx, to_state, to_idx) in &links {
            let source = la[from_state][from_idx].clone();
            if la[to_state][to_idx].union_with(&source) {
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    // Table fill.
    let mut action = vec![Action::Error; state_count * n_columns];
    let mut goto_table: Vec<Option<u32>> = vec![None; state_count * n_user_nts];
    let mut conflicts: Vec<Conflict> = Vec::new();
    let mut multi_candidate_cells: BTreeSet<(u32, usize)> = BTreeSet::new();

    for state in 0..state_count {
        // Candidates per lookahead column: optional shift plus reduces.
        let mut shift_on: BTreeMap<usize, u32> = BTreeMap::new();
        for (&symbol, &target) in &goto_maps[state] {
            match symbol {
                Symbol::Term(t) => {
                    shift_on.insert(t, target);
                }
                Symbol::Nonterm(nt) => {
                    goto_table[state * n_user_nts + nt] = Some(target);
                }
            }
        }

        let seeds: Vec<(Item, LaSet, bool)> = kernels[state]
            .iter()
            .enumerate()
            .map(|(i, &item)| (item, la[state][i].clone(), false))
            .collect();
        let closure = lr1_closure(grammar, &firsts, &prods_of, &seeds);
        let mut reduces_on: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
        for (item, (bits, _)) in &closure {
            let prod = &grammar.productions[item.prod as usize];
            if (item.dot as usize) == prod.rhs.len() {
                for column in bits.iter() {
                    reduces_on.entry(column).or_default().push(item.prod);
                }
            }
        }

        for column in 0..n_columns {
            let shift = shift_on.get(&column).copied();
            let mut reduces = reduces_on.get(&column).cloned().unwrap_or_default();
            reduces.sort();
            reduces.dedup();

            let cell = state * n_columns + column;
            let chosen = match (shift, reduces.first()) {
                (Some(s), _) => Action::Shift(s),
                (None, Some(&0)) => Action::Accept,
                (None, Some(&p)) => Action::Reduce(p),
                (None, None) => Action::Error,
            };
            action[cell] = chosen;

            let n_candidates = shift.iter().count() + reduces.len();
            if n_candidates > 1 {
                multi_candidate_cells.insert((state as u32, column));
            }
            if n_candidates > 1 {
                if let Some(s) = shift {
                    conflicts.push(Conflict {
                        state: state as u32,
                        lookahead: column,
                        kind: ConflictKind::ShiftReduce,
                        shift: Some(s),
                        reduces: reduces.clone(),
                        resolution: Resolution::Unresolved,
                    });
                }
                if reduces.len() > 1 {
                    conflicts.push(Conflict {
                        state: state as u32,
                        lookahead: column,
                        kind: ConflictKind::ReduceReduce,
                        shift: None,
                        reduces: reduces.clone(),
                        resolution: Resolution::Unresolved,
                    });
                }
            }
        }
    }

    let tables = LrTables {
        state_count,
        n_terminals,
        action,
        goto_table,
        conflicts,
        kernels,
    };
    audit_conflicts(&tables, &multi_candidate_cells);
    tables
}

/// Conflict soundness: the recorded conflicts cover exactly the cells that
/// had more than one candidate, so an empty list means no such cell exists.
/// Also checks each conflict's shape invariants.
fn audit_conflicts(tables: &LrTables, multi_candidate_cells: &BTreeSet<(u32, usize)>) {
    let reported: BTreeSet<(u32, usize)> = tables
        .conflicts
        .iter()
        .map(|c| (c.state, c.lookahead))
        .collect();
    assert_eq!(
        &reported, multi_candidate_cells,
        "conflict ledger must cover exactly the multi-candidate cells"
    );
    for conflict in &tables.conflicts {
        match conflict.kind {
            ConflictKind::ShiftReduce => {
                assert!(conflict.shift.is_some() && !conflict.reduces.is_empty());
            }
            ConflictKind::ReduceReduce => {
                assert!(conflict.shift.is_none() && conflict.reduces.len() >= 2);
            }
        }
    }
}

fn production_precedence(
    grammar: &Grammar,
    prod: u32,
    levels: &BTreeMap<usize, (usize, Assoc)>,
) -> Option<(usize, Assoc)> {
    grammar.productions[prod as usize]
        .rhs
        .iter()
        .rev()
        .find_map(|&symbol| match symbol {
            Symbol::Term(t) => Some(t),
            Symbol::Nonterm(_) => None,
        })
        .and_then(|t| levels.get(&t).copied())
}

/// Resolves shift-reduce conflicts Yacc-style from the precedence
/// declarations: later declarations bind tighter; a production takes the
/// precedence of its rightmost terminal. Equal levels resolve by
/// associativity (left favors the reduce, right the shift, nonassoc makes
/// the cell an error). Reduce-reduce conflicts are never touched.
pub fn apply_precedence(tables: &LrTables, grammar: &Grammar, decls: &[PrecDecl]) -> LrTables {
    let mut out = tables.clone();
    let mut levels: BTreeMap<usize, (usize, Assoc)> = BTreeMap::new();
    for (level, decl) in decls.iter().enumerate() {
        for name in &decl.terminals {
            if let Some(t) = grammar.terminals.iter().position(|info| &info.name == name) {
                levels.insert(t, (level, decl.assoc));
            }
        }
    }

    let n_columns = tables.n_terminals + 1;
    for conflict in &mut out.conflicts {
        if conflict.kind != ConflictKind::ShiftReduce
            || conflict.resolution != Resolution::Unresolved
            || conflict.reduces.len() != 1
        {
            continue;
        }
        let column = conflict.lookahead;
        if column >= tables.n_terminals {
            continue;
        }
        let Some(&(term_level, assoc)) = levels.get(&column) else {
            continue;
        };
        let reduce = conflict.reduces[0];
        let Some((prod_level, _)) = production_precedence(grammar, reduce, &levels) else {
            continue;
        };
        let choice = if prod_level > term_level {
            Action::Reduce(reduce)
        } else if prod_level < term_level {
            Action::Shift(conflict.shift.expect("shift contender"))
        } else {
            match assoc {
                Assoc::Left => Action::Reduce(reduce),
                Assoc::Right => Action::Shift(conflict.shift.expect("shift contender")),
                Assoc::NonAssoc => Action::Error,
            }
        };
        out.action[conflict.state as usize * n_columns + column] = choice;
        conflict.resolution = Resolution::ByPrecedence(choice);
    }
    out
}

/// The classic silent defaults (shift wins, then the earliest production),
/// applied to every remaining conflict and tagged `DefaultRule`. Offered
/// behind an explicit flag only; unresolved conflicts are otherwise fatal at
/// generation time.
pub fn apply_yacc_defaults(tables: &LrTables) -> LrTables {
    let mut out = tables.clone();
    let n_columns = tables.n_terminals + 1;
    for conflict in &mut out.conflicts {
        if conflict.resolution != Resolution::Unresolved {
            continue;
        }
        let choice = match conflict.shift {
            Some(s) => Action::Shift(s),
            None => Action::Reduce(conflict.reduces[0]),
        };
        out.action[conflict.state as usize * n_columns + conflict.lookahead] = choice;
        conflict.resolution = Resolution::DefaultRule(choice);
    }
    out
}

/// A terminal with an optional payload value, as consumed by
/// [`simulate_parse`].
#[derive(Debug, Clone)]
pub struct Token<V> {
    pub terminal: usize,
    pub value: Option<V>,
}

/// Table-driven shift-reduce execution over a value stack.
///
/// `eval` receives the production index and the values selected by its
/// numbered positions, in slot order. On an error cell, `on_error` receives
/// the remaining token stream (current lookahead first) and its result comes
/// back as the `Err` value; there is no recovery.
///
/// Requires conflict-free tables (all conflicts resolved or none present).
///
/// ```
/// use fungen_core::lr::{self, Token};
/// use fungen_core::spec;
/// use fungen_stream::from_list;
///
/// let parsed = spec::parse_parse_spec(fungen_core::corpus::CALC_PARSE).unwrap();
/// let grammar = lr::to_grammar(&parsed);
/// let tables = lr::build_lalr(&grammar);
/// assert!(tables.conflicts.is_empty());
///
/// // NUMBER(2) TIMES NUMBER(3) PLUS NUMBER(4)
/// let tokens = vec![
///     Token { terminal: 0, value: Some(2i64) },
///     Token { terminal: 2, value: None },
///     Token { terminal: 0, value: Some(3) },
///     Token { terminal: 1, value: None },
///     Token { terminal: 0, value: Some(4) },
/// ];
/// let result = lr::simulate_parse(
///     &tables,
///     &grammar,
///     &from_list(tokens),
///     |prod, args| match grammar.productions[prod as usize].action.as_str() {
///         "times_factor" => args[0] * args[1],
///         "plus_term" => args[0] + args[1],
///         _ => args[0],
///     },
///     |_rest| "syntax error",
/// );
/// assert_eq!(result, Ok(10));
/// ```
pub fn simulate_parse<V, E>(
    tables: &LrTables,
    grammar: &Grammar,
    tokens: &Stream<Token<V>>,
    mut eval: impl FnMut(u32, Vec<V>) -> V,
    on_error: impl FnOnce(Stream<Token<V>>) -> E,
) -> Result<V, E>
where
    V: Clone + 'static,
{
    assert!(
        !tables.has_unresolved_conflicts(),
        "simulate_parse requires conflict-free tables"
    );
    let n_user_nts = grammar.user_nonterminal_count();
    let mut stack: Vec<(u32, Option<V>)> = vec![(0, None)];
    let mut cur = tokens.clone();
    loop {
        let peeked = front(&cur);
        let column = match &peeked {
            Front::Nil => grammar.eof_column(),
            Front::Cons(token, _) => token.terminal,
        };
        loop {
            let state = stack.last().expect("parser stack is never empty").0;
            match tables.action_at(state, column) {
                Action::Shift(target) => {
                    match peeked {
                        Front::Cons(token, rest) => {
                            stack.push((target, token.value));
                            cur = rest;
                        }
                        Front::Nil => unreachable!("shift on end of input"),
                    }
                    break;
                }
                Action::Reduce(prod_idx) => {
                    let prod = &grammar.productions[prod_idx as usize];
                    let base = stack.len() - prod.rhs.len();
                    let mut popped: Vec<Option<V>> =
                        stack.split_off(base).into_iter().map(|(_, v)| v).collect();
                    let args: Vec<V> = prod
                        .value_positions
                        .iter()
                        .map(|&(rhs_idx, _)| {
                            popped[rhs_idx]
                                .take()
                                .expect("numbered symbol carries a value")
                        })
                        .collect();
                    let value = eval(prod_idx, args);
                    let state = stack.last().expect("parser stack is never empty").0;
                    let target = tables
                        .goto_at(state, prod.lhs, n_user_nts)
                        .expect("goto exists after reduce");
                    stack.push((target, Some(value)));
                }
                Action::Accept => {
                    let (_, value) = stack.pop().expect("accept with start value");
                    return Ok(value.expect("start symbol carries a value"));
                }
                Action::Error => {
                    return Err(on_error(cur));
                }
            }
        }
    }
}

/// Outcome of [`earley_accepts`]: recognition plus the number of distinct
/// derivation trees, counted exactly up to [`DERIVATION_CAP`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EarleyResult {
    pub accepted: bool,
    pub derivations: u64,
}

/// Counting saturates here; a result of `DERIVATION_CAP` means "at least
/// this many" (including infinite families from cyclic grammars).
pub const DERIVATION_CAP: u64 = 4096;

/// Earley recognition over the grammar, independent of the LR machinery.
pub fn earley_accepts(grammar: &Grammar, sentence: &[usize]) -> EarleyResult {
    let firsts = compute_first_sets(grammar);
    let mut prods_of: Vec<Vec<u32>> = vec![Vec::new(); grammar.nonterminals.len()];
    for (i, prod) in grammar.productions.iter().enumerate() {
        prods_of[prod.lhs].push(i as u32);
    }

    let n = sentence.len();
    let mut sets: Vec<Vec<(u32, u32, u32)>> = vec![Vec::new(); n + 1];
    let mut seen: Vec<HashSet<(u32, u32, u32)>> = vec![HashSet::new(); n + 1];
    let seed = (0u32, 0u32, 0u32);
    sets[0].push(seed);
    seen[0].insert(seed);

    for i in 0..=n {
        let mut idx = 0;
        while idx < sets[i].len() {
            let (prod_idx, dot, origin) = sets[i][idx];
            idx += 1;
            let prod = &grammar.productions[prod_idx as usize];
            match prod.rhs.get(dot as usize) {
                Some(&Symbol::Term(t)) => {
                    if i < n && sentence[i] == t {
                        let item = (prod_idx, dot + 1, origin);
                        if seen[i + 1].insert(item) {
                            sets[i + 1].push(item);
                        }
                    }
                }
                Some(&Symbol::Nonterm(nt)) => {
                    for &q in &prods_of[nt] {
                        let item = (q, 0, i as u32);
                        if seen[i].insert(item) {
                            sets[i].push(item);
                        }
                    }
                    // Nullable shortcut keeps epsilon completion exact.
                    if firsts.nullable[nt] {
                        let item = (prod_idx, dot + 1, origin);
                        if seen[i].insert(item) {
                            sets[i].push(item);
                        }
                    }
                }
                None => {
                    let lhs = prod.lhs;
                    let source: Vec<(u32, u32, u32)> = sets[origin as usize].clone();
                    for (q, e, o2) in source {
                        let qprod = &grammar.productions[q as usize];
                        if qprod.rhs.get(e as usize) == Some(&Symbol::Nonterm(lhs)) {
                            let item = (q, e + 1, o2);
                            if seen[i].insert(item) {
                                sets[i].push(item);
                            }
                        }
                    }
                }
            }
        }
    }

    let accepted = seen[n].contains(&(0, 1, 0));
    let derivations = if accepted {
        let mut counter = TreeCounter {
            grammar,
            prods_of: &prods_of,
            sentence,
            memo: HashMap::new(),
            in_progress: HashSet::new(),
        };
        counter.count_nt(grammar.start, 0, n)
    } else {
        0
    };
    EarleyResult {
        accepted,
        derivations,
    }
}

struct TreeCounter<'a> {
    grammar: &'a Grammar,
    prods_of: &'a [Vec<u32>],
    sentence: &'a [usize],
    memo: HashMap<(usize, usize, usize), u64>,
    in_progress: HashSet<(usize, usize, usize)>,
}

impl TreeCounter<'_> {
    fn count_nt(&mut self, nt: usize, i: usize, j: usize) -> u64 {
        if let Some(&count) = self.memo.get(&(nt, i, j)) {
            return count;
        }
        if !self.in_progress.insert((nt, i, j)) {
            // A derivation cycle over the same span means unboundedly many trees.
            return DERIVATION_CAP;
        }
        let mut total: u64 = 0;
        for &p in &self.prods_of[nt] {
            total = cap_add(total, self.count_rhs(p, 0, i, j));
        }
        self.in_progress.remove(&(nt, i, j));
        self.memo.insert((nt, i, j), total);
        total
    }

    fn count_rhs(&mut self, prod_idx: u32, k: usize, i: usize, j: usize) -> u64 {
        let prod = &self.grammar.productions[prod_idx as usize];
        match prod.rhs.get(k) {
            None => u64::from(i == j),
            Some(&Symbol::Term(t)) => {
                if i < j && self.sentence[i] == t {
                    self.count_rhs(prod_idx, k + 1, i + 1, j)
                } else {
                    0
                }
            }
            Some(&Symbol::Nonterm(nt)) => {
                let mut total: u64 = 0;
                for m in i..=j {
                    let left = self.count_nt(nt, i, m);
                    if left == 0 {
                        continue;
                    }
                    let right = self.count_rhs(prod_idx, k + 1, m, j);
                    total = cap_add(total, cap_mul(left, right));
                }
                total
            }
        }
    }
}

fn cap_add(a: u64, b: u64) -> u64 {
    a.saturating_add(b).min(DERIVATION_CAP)
}

fn cap_mul(a: u64, b: u64) -> u64 {
    a.saturating_mul(b).min(DERIVATION_CAP)
}

/// Stable textual dump: per state the kernel items, the non-error action
/// cells, and the goto row; then the conflict report.
pub fn dump_lr(tables: &LrTables, grammar: &Grammar) -> String {
    let mut out = String::new();
    let n_user_nts = grammar.user_nonterminal_count();
    for state in 0..tables.state_count as u32 {
        out.push_str(&format!("state {state}\n"));
        for item in &tables.kernels[state as usize] {
            let prod = &grammar.productions[item.prod as usize];
            let mut parts: Vec<String> = prod
                .rhs
                .iter()
                .map(|&s| grammar.symbol_name(s).to_string())
                .collect();
            parts.insert(item.dot as usize, ".".to_string());
            out.push_str(&format!(
                "  kernel: {} -> {}\n",
                grammar.nonterminals[prod.lhs].name,
                parts.join(" ")
            ));
        }
        for column in 0..=tables.n_terminals {
            let entry = match tables.action_at(state, column) {
                Action::Error => continue,
                Action::Shift(s) => format!("shift {s}"),
                Action::Reduce(p) => {
                    format!("reduce {} ({})", p, grammar.display_production(p))
                }
                Action::Accept => "accept".to_string(),
            };
            out.push_str(&format!("  {}: {}\n", grammar.lookahead_name(column), entry));
        }
        for nt in 0..n_user_nts {
            if let Some(target) = tables.goto_at(state, nt, n_user_nts) {
                out.push_str(&format!(
                    "  goto {}: {}\n",
                    grammar.nonterminals[nt].name, target
                ));
            }
        }
    }
    out.push_str(&format!("conflicts: {}\n", tables.conflicts.len()));
    for conflict in &tables.conflicts {
        let kind = match conflict.kind {
            ConflictKind::ShiftReduce => "shift-reduce",
            ConflictKind::ReduceReduce => "reduce-reduce",
        };
        let mut contenders: Vec<String> = Vec::new();
        if let Some(s) = conflict.shift {
            contenders.push(format!("shift {s}"));
        }
        for &p in &conflict.reduces {
            contenders.push(format!("reduce {} ({})", p, grammar.display_production(p)));
        }
        let resolution = match conflict.resolution {
            Resolution::Unresolved => "unresolved".to_string(),
            Resolution::ByPrecedence(a) => format!("resolved by precedence: {}", display_action(a)),
            Resolution::DefaultRule(a) => format!("resolved by default rule: {}", display_action(a)),
        };
        out.push_str(&format!(
            "  state {} on {}: {} [{}]: {}\n",
            conflict.state,
            grammar.lookahead_name(conflict.lookahead),
            kind,
            contenders.join(" vs "),
            resolution
        ));
    }
    out
}

fn display_action(action: Action) -> String {
    match action {
        Action::Error => "error".to_string(),
        Action::Shift(s) => format!("shift {s}"),
        Action::Reduce(p) => format!("reduce {p}"),
        Action::Accept => "accept".to_string(),
    }
}
