//! Exhaustive agreement between the automata path and the brute-force
//! regex oracle: for every arm set and every string up to length 6 over a
//! small alphabet, the DFA's tag equals the earliest arm whose language
//! contains the string. Minimization must preserve that and be idempotent.

use fungen_core::automata::{determinize, minimize, regex_oracle, thompson, Dfa};
use fungen_core::sre::SRegex;

use proptest::prelude::*;

fn seq(parts: Vec<SRegex>) -> SRegex {
    SRegex::Seq(parts)
}

fn alt(parts: Vec<SRegex>) -> SRegex {
    SRegex::Alt(parts)
}

fn star(inner: SRegex) -> SRegex {
    SRegex::Star(Box::new(inner))
}

fn plus(inner: SRegex) -> SRegex {
    SRegex::Plus(Box::new(inner))
}

fn sym(code: u16) -> SRegex {
    SRegex::Sym(code)
}

/// Arm sets exercising every operator, overlapping priorities, epsilon arms,
/// and nullable non-epsilon arms.
fn arm_sets() -> Vec<(&'static str, u16, Vec<SRegex>)> {
    vec![
        (
            "aa_and_abstar_c",
            3,
            vec![seq(vec![sym(0), sym(0)]), seq(vec![sym(0), star(sym(1)), sym(2)])],
        ),
        (
            "bc_bd_with_epsilon",
            4,
            vec![
                alt(vec![seq(vec![sym(1), sym(2)]), seq(vec![sym(1), sym(3)])]),
                SRegex::Epsilon,
            ],
        ),
        (
            "overlapping_priorities",
            4,
            vec![SRegex::Range(0, 2), seq(vec![sym(0), sym(1)]), plus(sym(0))],
        ),
        (
            "nullable_star_arm",
            3,
            vec![star(sym(1)), seq(vec![sym(1), sym(2)])],
        ),
        (
            "charset_runs",
            5,
            vec![plus(alt(vec![SRegex::Range(0, 1), sym(3)])), sym(2)],
        ),
        ("epsilon_only", 2, vec![SRegex::Epsilon]),
        (
            "plus_of_seq",
            3,
            vec![plus(seq(vec![sym(0), sym(1)])), seq(vec![sym(0), sym(1), sym(1)])],
        ),
    ]
}

fn all_strings(alphabet: u16, max_len: usize) -> Vec<Vec<u8>> {
    let mut out: Vec<Vec<u8>> = vec![Vec::new()];
    let mut layer: Vec<Vec<u8>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for prefix in &layer {
            for code in 0..alphabet {
                let mut s = prefix.clone();
                s.push(code as u8);
                next.push(s);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn oracle_tag(arms: &[SRegex], input: &[u8]) -> Option<u32> {
    arms.iter()
        .position(|arm| regex_oracle(arm, input))
        .map(|i| i as u32)
}

fn check_agreement(name: &str, alphabet: u16, arms: &[SRegex], dfa: &Dfa, max_len: usize) {
    for input in all_strings(alphabet, max_len) {
        let expected = oracle_tag(arms, &input);
        let got = dfa.accepts(&input);
        assert_eq!(got, expected, "{name}: disagreement on {input:?}");
    }
}

#[test]
fn dfa_agrees_with_oracle_exhaustively() {
    for (name, alphabet, arms) in arm_sets() {
        let tagged: Vec<(SRegex, u32)> = arms
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, r)| (r, i as u32))
            .collect();
        let dfa = determinize(&thompson(&tagged, alphabet));
        check_agreement(name, alphabet, &arms, &dfa, 6);

        let min = minimize(&dfa);
        check_agreement(name, alphabet, &arms, &min, 6);
        assert!(min.state_count <= dfa.state_count, "{name}");
        assert_eq!(minimize(&min), min, "{name}: minimize must be idempotent");
    }
}

#[test]
fn construction_is_deterministic() {
    for (_, alphabet, arms) in arm_sets() {
        let tagged: Vec<(SRegex, u32)> = arms
            .into_iter()
            .enumerate()
            .map(|(i, r)| (r, i as u32))
            .collect();
        let a = minimize(&determinize(&thompson(&tagged, alphabet)));
        let b = minimize(&determinize(&thompson(&tagged, alphabet)));
        assert_eq!(a, b);
    }
}

/// Forcing discipline: scanning stops at the first dead symbol, so on a DFA
/// whose live states are all accepting the engine forces at most one cell
/// past the match it returns.
#[test]
fn run_longest_forces_at_most_one_cell_past_the_match() {
    use fungen_core::automata::{run_longest, MatchResult};
    use fungen_stream::{lazy, Front, Stream};
    use std::cell::RefCell;
    use std::rc::Rc;

    fn counted(items: Rc<Vec<u8>>, i: usize, counts: Rc<RefCell<Vec<u32>>>) -> Stream<u8> {
        lazy(move || {
            counts.borrow_mut()[i] += 1;
            if i == items.len() {
                Front::Nil
            } else {
                Front::Cons(items[i], counted(items.clone(), i + 1, counts.clone()))
            }
        })
    }

    // (+ digits) over an alphabet where '+' is a dead symbol.
    let dfa = minimize(&determinize(&thompson(
        &[(plus(SRegex::Range(48, 57)), 0)],
        128,
    )));
    let input = b"123+456".to_vec();
    let counts = Rc::new(RefCell::new(vec![0u32; input.len() + 1]));
    let stream = counted(Rc::new(input), 0, counts.clone());
    match run_longest(&dfa, &stream) {
        MatchResult::Matched(m) => assert_eq!(m.consumed, b"123"),
        MatchResult::NoMatch => panic!(),
    }
    let counts = counts.borrow();
    // Cells 0..=3 forced (three digits plus the terminating '+'), nothing past.
    assert_eq!(&counts[..], &[1, 1, 1, 1, 0, 0, 0, 0]);
}

fn arb_regex(alphabet: u16) -> impl Strategy<Value = SRegex> {
    let leaf = prop_oneof![
        Just(SRegex::Epsilon),
        (0..alphabet).prop_map(SRegex::Sym),
        (0..alphabet, 0..alphabet).prop_map(|(a, b)| SRegex::Range(a.min(b), a.max(b))),
    ];
    leaf.prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..3).prop_map(SRegex::Seq),
            prop::collection::vec(inner.clone(), 1..3).prop_map(SRegex::Alt),
            inner.clone().prop_map(|r| SRegex::Star(Box::new(r))),
            inner.prop_map(|r| SRegex::Plus(Box::new(r))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Random regexes agree with the oracle on every string up to length 4.
    #[test]
    fn random_regex_agrees_with_oracle(regex in arb_regex(3)) {
        let dfa = minimize(&determinize(&thompson(&[(regex.clone(), 0)], 3)));
        for input in all_strings(3, 4) {
            let expected = regex_oracle(&regex, &input);
            prop_assert_eq!(dfa.accepts(&input).is_some(), expected, "input {:?}", input);
        }
    }

    /// Printing and reparsing a random regex preserves structure.
    #[test]
    fn regex_print_reparse_roundtrip(regex in arb_regex(200)) {
        let text = format!("x\nname M\nalphabet 256\nfunction f : t =\n   {} => act\n", regex.to_sexpr());
        let spec = fungen_core::spec::parse_lex_spec(&text).unwrap();
        prop_assert_eq!(&spec.functions[0].arms[0].regex, &regex);
    }
}
