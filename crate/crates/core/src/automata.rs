//! Compilation of lexing-function arm lists into prioritized DFAs, the
//! longest-match runtime semantics, and a brute-force regex oracle used by
//! the test suites.
//!
//! Arm priority: when two arms accept the same string, the earlier-declared
//! arm wins. The subset construction realizes this by tagging each DFA state
//! with the minimum arm index among its constituent NFA accept states.

use std::collections::BTreeMap;
use std::collections::HashMap;

use fungen_stream::{front, Front, Stream};

use crate::spec::LexSpec;
use crate::sre::SRegex;

/// Sentinel for "no transition" in dense DFA tables.
pub const DEAD: u32 = u32::MAX;

/// Thompson-style NFA over symbol codes, with range-labelled edges and
/// per-state accept tags carrying arm priority.
#[derive(Debug, Clone)]
pub struct Nfa {
    pub state_count: usize,
    pub start: u32,
    pub eps: Vec<Vec<u32>>,
    /// Per state: `(lo, hi, target)` range edges.
    pub trans: Vec<Vec<(u16, u16, u32)>>,
    pub accept: Vec<Option<u32>>,
    pub alphabet: u16,
}

impl Nfa {
    fn add_state(&mut self) -> u32 {
        self.eps.push(Vec::new());
        self.trans.push(Vec::new());
        self.accept.push(None);
        self.state_count += 1;
        (self.state_count - 1) as u32
    }
}

/// Dense deterministic automaton; state 0 is the start state, transitions
/// are total over `[0, alphabet)` via the [`DEAD`] sentinel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    pub state_count: usize,
    pub alphabet: u16,
    /// Row-major `state * alphabet + symbol`.
    pub trans: Vec<u32>,
    pub accept: Vec<Option<u32>>,
}

impl Dfa {
    pub fn next(&self, state: u32, symbol: u8) -> u32 {
        if (symbol as u16) >= self.alphabet {
            return DEAD;
        }
        self.trans[state as usize * self.alphabet as usize + symbol as usize]
    }

    /// Whole-string acceptance: the accept tag reached after consuming all of
    /// `input`, if the walk stays live.
    pub fn accepts(&self, input: &[u8]) -> Option<u32> {
        let mut state = 0u32;
        for &symbol in input {
            state = self.next(state, symbol);
            if state == DEAD {
                return None;
            }
        }
        self.accept[state as usize]
    }
}

/// Builds one NFA accepting the union of the arm languages, each accept
/// state tagged with its arm index.
pub fn thompson(arms: &[(SRegex, u32)], alphabet: u16) -> Nfa {
    let mut nfa = Nfa {
        state_count: 0,
        start: 0,
        eps: Vec::new(),
        trans: Vec::new(),
        accept: Vec::new(),
        alphabet,
    };
    let start = nfa.add_state();
    nfa.start = start;
    for (regex, arm) in arms {
        let (entry, exit) = build_fragment(&mut nfa, regex);
        nfa.eps[start as usize].push(entry);
        nfa.accept[exit as usize] = Some(*arm);
    }
    nfa
}

fn build_fragment(nfa: &mut Nfa, regex: &SRegex) -> (u32, u32) {
    match regex {
        SRegex::Epsilon => {
            let s = nfa.add_state();
            let e = nfa.add_state();
            nfa.eps[s as usize].push(e);
            (s, e)
        }
        SRegex::Sym(code) => {
            let s = nfa.add_state();
            let e = nfa.add_state();
            nfa.trans[s as usize].push((*code, *code, e));
            (s, e)
        }
        SRegex::Range(lo, hi) => {
            let s = nfa.add_state();
            let e = nfa.add_state();
            nfa.trans[s as usize].push((*lo, *hi, e));
            (s, e)
        }
        SRegex::SetRef(name) => panic!("unresolved set reference `{name}` reached automaton construction"),
        SRegex::Seq(children) => {
            let mut first = None;
            let mut last: Option<u32> = None;
            for child in children {
                let (entry, exit) = build_fragment(nfa, child);
                if let Some(prev_exit) = last {
                    nfa.eps[prev_exit as usize].push(entry);
                } else {
                    first = Some(entry);
                }
                last = Some(exit);
            }
            (first.expect("seq needs children"), last.expect("seq needs children"))
        }
        SRegex::Alt(children) => {
            let s = nfa.add_state();
            let e = nfa.add_state();
            for child in children {
                let (entry, exit) = build_fragment(nfa, child);
                nfa.eps[s as usize].push(entry);
                nfa.eps[exit as usize].push(e);
            }
            (s, e)
        }
        SRegex::Star(child) => {
            let s = nfa.add_state();
            let e = nfa.add_state();
            let (entry, exit) = build_fragment(nfa, child);
            nfa.eps[s as usize].push(entry);
            nfa.eps[s as usize].push(e);
            nfa.eps[exit as usize].push(entry);
            nfa.eps[exit as usize].push(e);
            (s, e)
        }
        SRegex::Plus(child) => {
            let s = nfa.add_state();
            let e = nfa.add_state();
            let (entry, exit) = build_fragment(nfa, child);
            nfa.eps[s as usize].push(entry);
            nfa.eps[exit as usize].push(entry);
            nfa.eps[exit as usize].push(e);
            (s, e)
        }
    }
}

fn eps_closure(nfa: &Nfa, seed: &[u32]) -> Vec<u32> {
    let mut in_set = vec![false; nfa.state_count];
    let mut stack: Vec<u32> = Vec::new();
    for &s in seed {
        if !in_set[s as usize] {
            in_set[s as usize] = true;
            stack.push(s);
        }
    }
    while let Some(s) = stack.pop() {
        for &t in &nfa.eps[s as usize] {
            if !in_set[t as usize] {
                in_set[t as usize] = true;
                stack.push(t);
            }
        }
    }
    (0..nfa.state_count as u32).filter(|&s| in_set[s as usize]).collect()
}

/// Subset construction. States are numbered in first-discovery (BFS) order
/// from the start closure, so identical NFAs yield identical DFAs.
pub fn determinize(nfa: &Nfa) -> Dfa {
    let alphabet = nfa.alphabet as usize;
    let start_set = eps_closure(nfa, &[nfa.start]);
    let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
    let mut subsets: Vec<Vec<u32>> = Vec::new();
    let mut trans: Vec<u32> = Vec::new();
    let mut accept: Vec<Option<u32>> = Vec::new();

    ids.insert(start_set.clone(), 0);
    subsets.push(start_set);
    let mut next_unprocessed = 0usize;
    while next_unprocessed < subsets.len() {
        let subset = subsets[next_unprocessed].clone();
        next_unprocessed += 1;
        accept.push(subset.iter().filter_map(|&s| nfa.accept[s as usize]).min());
        for symbol in 0..alphabet as u16 {
            let mut moved: Vec<u32> = Vec::new();
            for &s in &subset {
                for &(lo, hi, target) in &nfa.trans[s as usize] {
                    if lo <= symbol && symbol <= hi {
                        moved.push(target);
                    }
                }
            }
            if moved.is_empty() {
                trans.push(DEAD);
                continue;
            }
            let closed = eps_closure(nfa, &moved);
            let id = match ids.get(&closed) {
                Some(&id) => id,
                None => {
                    let id = subsets.len() as u32;
                    ids.insert(closed.clone(), id);
                    subsets.push(closed);
                    id
                }
            };
            trans.push(id);
        }
    }

    Dfa {
        state_count: subsets.len(),
        alphabet: nfa.alphabet,
        trans,
        accept,
    }
}

/// Partition-refinement minimization preserving accept tags: two states merge
/// only when they carry the same tag and behave identically on every symbol.
/// Output states are renumbered canonically (BFS from the start).
pub fn minimize(dfa: &Dfa) -> Dfa {
    let alphabet = dfa.alphabet as usize;
    let n = dfa.state_count;
    let total = n + 1; // virtual dead state at index n
    let target = |state: usize, symbol: usize| -> usize {
        if state == n {
            return n;
        }
        match dfa.trans[state * alphabet + symbol] {
            DEAD => n,
            t => t as usize,
        }
    };
    let tag_of = |state: usize| -> Option<u32> {
        if state == n {
            None
        } else {
            dfa.accept[state]
        }
    };

    // Initial partition: one class per accept tag, ids by first occurrence.
    let mut class: Vec<usize> = Vec::with_capacity(total);
    {
        let mut by_tag: BTreeMap<Option<u32>, usize> = BTreeMap::new();
        for state in 0..total {
            let next_id = by_tag.len();
            let id = *by_tag.entry(tag_of(state)).or_insert(next_id);
            class.push(id);
        }
    }

    loop {
        let mut sig_ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let mut new_class = vec![0usize; total];
        for state in 0..total {
            let sig: Vec<usize> = (0..alphabet).map(|sym| class[target(state, sym)]).collect();
            let key = (class[state], sig);
            let next_id = sig_ids.len();
            let id = *sig_ids.entry(key).or_insert(next_id);
            new_class[state] = id;
        }
        let stable = sig_ids.len() == class.iter().copied().collect::<std::collections::BTreeSet<_>>().len();
        class = new_class;
        if stable {
            break;
        }
    }

    let dead_class = class[n];
    let start_class = class[0];
    if start_class == dead_class {
        // Empty language; representable but unreachable from well-formed arms.
        return Dfa {
            state_count: 1,
            alphabet: dfa.alphabet,
            trans: vec![DEAD; alphabet],
            accept: vec![None],
        };
    }

    // Canonical renumbering: BFS over classes from the start class.
    let mut representative: BTreeMap<usize, usize> = BTreeMap::new();
    for state in (0..total).rev() {
        representative.insert(class[state], state);
    }
    let mut new_id: BTreeMap<usize, u32> = BTreeMap::new();
    let mut order: Vec<usize> = Vec::new();
    new_id.insert(start_class, 0);
    order.push(start_class);
    let mut next_unprocessed = 0usize;
    while next_unprocessed < order.len() {
        let cls = order[next_unprocessed];
        next_unprocessed += 1;
        let rep = representative[&cls];
        for symbol in 0..alphabet {
            let tcls = class[target(rep, symbol)];
            if tcls == dead_class || new_id.contains_key(&tcls) {
                continue;
            }
            new_id.insert(tcls, order.len() as u32);
            order.push(tcls);
        }
    }

    let state_count = order.len();
    let mut trans = vec![DEAD; state_count * alphabet];
    let mut accept = vec![None; state_count];
    for (idx, &cls) in order.iter().enumerate() {
        let rep = representative[&cls];
        accept[idx] = tag_of(rep);
        for symbol in 0..alphabet {
            let tcls = class[target(rep, symbol)];
            if tcls != dead_class {
                trans[idx * alphabet + symbol] = new_id[&tcls];
            }
        }
    }

    Dfa {
        state_count,
        alphabet: dfa.alphabet,
        trans,
        accept,
    }
}

/// Builds the minimized DFA for each lexing function of a resolved spec, in
/// declaration order.
pub fn build_function_dfas(spec: &LexSpec) -> Vec<Dfa> {
    spec.functions
        .iter()
        .map(|function| {
            let arms: Vec<(SRegex, u32)> = function
                .arms
                .iter()
                .enumerate()
                .map(|(i, arm)| (arm.regex.clone(), i as u32))
                .collect();
            minimize(&determinize(&thompson(&arms, spec.alphabet)))
        })
        .collect()
}

/// A successful longest-match: the winning arm, the consumed symbols, and
/// the stream positioned immediately after them.
#[derive(Debug, Clone)]
pub struct Match {
    pub arm: u32,
    pub consumed: Vec<u8>,
    pub follow: Stream<u8>,
}

#[derive(Debug, Clone)]
pub enum MatchResult {
    Matched(Match),
    NoMatch,
}

/// Runs the DFA over the stream, preferring the longest accepting prefix;
/// ties between arms were already broken toward the smallest arm index by
/// construction. Symbols at or beyond the alphabet act as dead transitions
/// and are never consumed. Consumes nothing from the caller's point of view:
/// streams are persistent, and on `NoMatch` the input is untouched.
pub fn run_longest(dfa: &Dfa, input: &Stream<u8>) -> MatchResult {
    let mut state = 0u32;
    let mut consumed: Vec<u8> = Vec::new();
    let mut cur = input.clone();
    let mut best: Option<(u32, usize, Stream<u8>)> = None;
    loop {
        if let Some(arm) = dfa.accept[state as usize] {
            best = Some((arm, consumed.len(), cur.clone()));
        }
        match front(&cur) {
            Front::Nil => break,
            Front::Cons(symbol, rest) => {
                let next = dfa.next(state, symbol);
                if next == DEAD {
                    break;
                }
                state = next;
                consumed.push(symbol);
                cur = rest;
            }
        }
    }
    match best {
        Some((arm, len, follow)) => {
            consumed.truncate(len);
            MatchResult::Matched(Match {
                arm,
                consumed,
                follow,
            })
        }
        None => MatchResult::NoMatch,
    }
}

/// Structural-recursion membership test, independent of the automata path.
/// Exponential on purpose; only used at test scales.
pub fn regex_oracle(regex: &SRegex, input: &[u8]) -> bool {
    match regex {
        SRegex::Epsilon => input.is_empty(),
        SRegex::Sym(code) => input.len() == 1 && input[0] as u16 == *code,
        SRegex::Range(lo, hi) => {
            input.len() == 1 && *lo <= input[0] as u16 && input[0] as u16 <= *hi
        }
        SRegex::SetRef(name) => panic!("unresolved set reference `{name}` reached the oracle"),
        SRegex::Seq(children) => seq_oracle(children, input),
        SRegex::Alt(children) => children.iter().any(|child| regex_oracle(child, input)),
        SRegex::Star(child) => {
            input.is_empty()
                || (1..=input.len()).any(|i| {
                    regex_oracle(child, &input[..i]) && regex_oracle(regex, &input[i..])
                })
        }
        SRegex::Plus(child) => (0..=input.len()).any(|i| {
            regex_oracle(child, &input[..i])
                && regex_oracle(&SRegex::Star(Box::new((**child).clone())), &input[i..])
        }),
    }
}

fn seq_oracle(children: &[SRegex], input: &[u8]) -> bool {
    match children {
        [] => input.is_empty(),
        [only] => regex_oracle(only, input),
        [first, rest @ ..] => {
            (0..=input.len()).any(|i| regex_oracle(first, &input[..i]) && seq_oracle(rest, &input[i..]))
        }
    }
}

/// Stable textual dump: one line per state with its id, accept tag (or `-`),
/// and transitions grouped into symbol ranges.
pub fn dump_dfa(dfa: &Dfa) -> String {
    let mut out = String::new();
    for state in 0..dfa.state_count {
        let tag = match dfa.accept[state] {
            Some(arm) => arm.to_string(),
            None => "-".to_string(),
        };
        out.push_str(&format!("{state} {tag}"));
        let row = &dfa.trans[state * dfa.alphabet as usize..(state + 1) * dfa.alphabet as usize];
        let mut symbol = 0usize;
        while symbol < row.len() {
            let target = row[symbol];
            if target == DEAD {
                symbol += 1;
                continue;
            }
            let lo = symbol;
            while symbol + 1 < row.len() && row[symbol + 1] == target {
                symbol += 1;
            }
            if lo == symbol {
                out.push_str(&format!(" {lo}->{target}"));
            } else {
                out.push_str(&format!(" {lo}-{symbol}->{target}"));
            }
            symbol += 1;
        }
        out.push('\n');
    }
    out
}
