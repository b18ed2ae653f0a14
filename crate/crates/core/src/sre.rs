//! Regular expressions in SRE (S-expression) form, over a bounded symbol
//! alphabet of at most 256 codes, plus the character-set values that `set`
//! declarations denote.

/// Largest supported alphabet; symbol codes always lie in `[0, 256)`.
pub const MAX_ALPHABET: u16 = 256;

/// A regular expression over symbol codes.
///
/// `SetRef` nodes refer to named `set` declarations and are eliminated by
/// set resolution before any automaton construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SRegex {
    Epsilon,
    Sym(u16),
    Range(u16, u16),
    SetRef(String),
    Seq(Vec<SRegex>),
    Alt(Vec<SRegex>),
    Star(Box<SRegex>),
    Plus(Box<SRegex>),
}

impl SRegex {
    /// Whether the empty string is in the language. Set references count as
    /// non-nullable: sets are non-empty symbol classes.
    pub fn nullable(&self) -> bool {
        match self {
            SRegex::Epsilon => true,
            SRegex::Sym(_) | SRegex::Range(_, _) | SRegex::SetRef(_) => false,
            SRegex::Seq(children) => children.iter().all(SRegex::nullable),
            SRegex::Alt(children) => children.iter().any(SRegex::nullable),
            SRegex::Star(_) => true,
            SRegex::Plus(child) => child.nullable(),
        }
    }

    pub fn has_set_refs(&self) -> bool {
        match self {
            SRegex::SetRef(_) => true,
            SRegex::Epsilon | SRegex::Sym(_) | SRegex::Range(_, _) => false,
            SRegex::Seq(children) | SRegex::Alt(children) => {
                children.iter().any(SRegex::has_set_refs)
            }
            SRegex::Star(child) | SRegex::Plus(child) => child.has_set_refs(),
        }
    }

    /// Visits every `Sym`/`Range` leaf.
    pub fn for_each_leaf(&self, f: &mut impl FnMut(u16, u16)) {
        match self {
            SRegex::Sym(c) => f(*c, *c),
            SRegex::Range(lo, hi) => f(*lo, *hi),
            SRegex::Epsilon | SRegex::SetRef(_) => {}
            SRegex::Seq(children) | SRegex::Alt(children) => {
                for child in children {
                    child.for_each_leaf(f);
                }
            }
            SRegex::Star(child) | SRegex::Plus(child) => child.for_each_leaf(f),
        }
    }

    /// Canonical S-expression form; reparsing it yields a structurally equal
    /// regex.
    pub fn to_sexpr(&self) -> String {
        match self {
            SRegex::Epsilon => "epsilon".to_string(),
            SRegex::Sym(c) => print_code(*c),
            SRegex::Range(lo, hi) => format!("(range {} {})", print_code(*lo), print_code(*hi)),
            SRegex::SetRef(name) => name.clone(),
            SRegex::Seq(children) => format!("(seq {})", join_sexprs(children)),
            SRegex::Alt(children) => format!("(or {})", join_sexprs(children)),
            SRegex::Star(child) => format!("(* {})", child.to_sexpr()),
            SRegex::Plus(child) => format!("(+ {})", child.to_sexpr()),
        }
    }
}

fn join_sexprs(children: &[SRegex]) -> String {
    children
        .iter()
        .map(SRegex::to_sexpr)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Symbol codes print as `'c` character literals when that reparses to the
/// same code (printable, non-space ASCII), and as bare integers otherwise.
pub fn print_code(code: u16) -> String {
    if (33..=126).contains(&code) {
        format!("'{}", code as u8 as char)
    } else {
        code.to_string()
    }
}

/// A set of symbol codes within `[0, alphabet)`, stored as a bitset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharSet {
    bits: [u64; 4],
}

impl CharSet {
    pub fn new() -> CharSet {
        CharSet { bits: [0; 4] }
    }

    pub fn insert(&mut self, code: u16) {
        debug_assert!(code < MAX_ALPHABET);
        self.bits[(code / 64) as usize] |= 1u64 << (code % 64);
    }

    pub fn insert_range(&mut self, lo: u16, hi: u16) {
        for code in lo..=hi {
            self.insert(code);
        }
    }

    pub fn contains(&self, code: u16) -> bool {
        code < MAX_ALPHABET && self.bits[(code / 64) as usize] & (1u64 << (code % 64)) != 0
    }

    pub fn union_with(&mut self, other: &CharSet) {
        for (a, b) in self.bits.iter_mut().zip(other.bits.iter()) {
            *a |= b;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = u16> + '_ {
        (0..MAX_ALPHABET).filter(|&c| self.contains(c))
    }

    /// Maximal runs of consecutive member codes, ascending.
    pub fn runs(&self) -> Vec<(u16, u16)> {
        let mut runs = Vec::new();
        let mut current: Option<(u16, u16)> = None;
        for code in self.iter() {
            match current {
                Some((lo, hi)) if hi + 1 == code => current = Some((lo, code)),
                Some(run) => {
                    runs.push(run);
                    current = Some((code, code));
                }
                None => current = Some((code, code)),
            }
        }
        if let Some(run) = current {
            runs.push(run);
        }
        runs
    }

    /// The regex denoting exactly this set: a single `Sym`/`Range` leaf when
    /// the set is one run, otherwise an `Alt` of run leaves.
    pub fn to_regex(&self) -> SRegex {
        let leaves: Vec<SRegex> = self
            .runs()
            .into_iter()
            .map(|(lo, hi)| {
                if lo == hi {
                    SRegex::Sym(lo)
                } else {
                    SRegex::Range(lo, hi)
                }
            })
            .collect();
        match leaves.len() {
            0 => panic!("empty character set has no regex form"),
            1 => leaves.into_iter().next().unwrap(),
            _ => SRegex::Alt(leaves),
        }
    }
}

impl Default for CharSet {
    fn default() -> Self {
        CharSet::new()
    }
}
