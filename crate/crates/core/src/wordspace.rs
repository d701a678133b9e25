//! Finite alphabets, words, and the semirings of word sets.
//!
//! A [`WordSpace`] fixes an alphabet and a [`SpaceKind`]; it decides which
//! [`BaseSet`]s are admissible and performs the semiring operations
//! (intersection, difference) plus the ring operations on finite disjoint
//! unions ([`RingSet`]).
//!
//! Words are compared length-first, then lexicographically by letter index.
//! Ring sets are kept in a canonical form: parts disjoint, maximally merged
//! (a full family of children collapses back into its parent cone) and sorted.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WordError {
    #[error("alphabet must contain at least one symbol")]
    EmptyAlphabet,
    #[error("duplicate alphabet symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("alphabet symbol must be non-empty and free of `.`, `+`, `^`, `(`, `)`, `:`: `{0}`")]
    BadSymbol(String),
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("{set} is not admissible in a space of kind {kind}")]
    NotAdmissible { set: String, kind: SpaceKind },
    #[error("ring sets of kinds {0} and {1} cannot be combined")]
    KindMismatch(SpaceKind, SpaceKind),
    #[error("complement in A* of a finite set is not a finite union of singletons")]
    UnrepresentableComplement,
    #[error("malformed set expression `{0}`")]
    Syntax(String),
    #[error("infinite word period must be non-empty")]
    EmptyPeriod,
}

/// Index of a symbol within its [`Alphabet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(pub usize);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<I, T>(symbols: I) -> Result<Self, WordError>
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(WordError::EmptyAlphabet);
        }
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.contains(['.', '+', '^', '(', ')', ':']) || s.contains(char::is_whitespace) {
                return Err(WordError::BadSymbol(s.clone()));
            }
            if symbols[..i].contains(s) {
                return Err(WordError::DuplicateSymbol(s.clone()));
            }
        }
        Ok(Alphabet { symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + Clone {
        (0..self.symbols.len()).map(Letter)
    }

    pub fn letter(&self, symbol: &str) -> Option<Letter> {
        self.symbols.iter().position(|s| s == symbol).map(Letter)
    }

    pub fn symbol(&self, letter: Letter) -> &str {
        &self.symbols[letter.0]
    }

    fn single_char(&self) -> bool {
        self.symbols.iter().all(|s| s.chars().count() == 1)
    }

    /// Parses a word. Single-character alphabets read one letter per
    /// character; otherwise letters are separated by `.`.
    pub fn parse_word(&self, text: &str) -> Result<Word, WordError> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Word::empty());
        }
        let pieces: Vec<String> = if text.contains('.') || !self.single_char() {
            text.split('.').map(str::to_string).collect()
        } else {
            text.chars().map(String::from).collect()
        };
        pieces
            .iter()
            .map(|p| self.letter(p).ok_or_else(|| WordError::UnknownLetter(p.clone())))
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }

    pub fn format_word(&self, w: &Word) -> String {
        let sep = if self.single_char() { "" } else { "." };
        w.0.iter()
            .map(|&l| self.symbol(l))
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// All words of exactly `len` letters, in lexicographic order.
    pub fn words_of_len(&self, len: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..len {
            out = out
                .iter()
                .flat_map(|w| self.letters().map(move |a| w.push(a)))
                .collect();
        }
        out
    }

    /// All words of length at most `max_len`, in length-lexicographic order.
    pub fn words_up_to(&self, max_len: usize) -> Vec<Word> {
        (0..=max_len).flat_map(|n| self.words_of_len(n)).collect()
    }
}

/// Finite word over an alphabet; `Word::empty()` is ε.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: impl IntoIterator<Item = usize>) -> Self {
        Word(letters.into_iter().map(Letter).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn push(&self, a: Letter) -> Word {
        let mut v = self.0.clone();
        v.push(a);
        Word(v)
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.0.len())].to_vec())
    }

    /// Drops the first letter; `None` on ε.
    pub fn split_first(&self) -> Option<(Letter, Word)> {
        self.0
            .split_first()
            .map(|(&a, rest)| (a, Word(rest.to_vec())))
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        is_prefix(self, other)
    }

    pub fn is_over(&self, alphabet: &Alphabet) -> bool {
        self.0.iter().all(|l| l.0 < alphabet.len())
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `u ⊑ v`.
pub fn is_prefix(u: &Word, v: &Word) -> bool {
    u.len() <= v.len() && v.0[..u.len()] == u.0[..]
}

/// Eventually periodic infinite word `prefix · period^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InfiniteWord {
    prefix: Word,
    period: Word,
}

impl InfiniteWord {
    pub fn new(prefix: Word, period: Word) -> Result<Self, WordError> {
        if period.is_empty() {
            return Err(WordError::EmptyPeriod);
        }
        Ok(InfiniteWord { prefix, period })
    }

    pub fn prefix(&self) -> &Word {
        &self.prefix
    }

    pub fn period(&self) -> &Word {
        &self.period
    }

    pub fn letter_at(&self, i: usize) -> Letter {
        if i < self.prefix.len() {
            self.prefix.0[i]
        } else {
            self.period.0[(i - self.prefix.len()) % self.period.len()]
        }
    }

    /// The first `n` letters.
    pub fn truncate(&self, n: usize) -> Word {
        Word((0..n).map(|i| self.letter_at(i)).collect())
    }

    pub fn has_prefix(&self, u: &Word) -> bool {
        u.0.iter().enumerate().all(|(i, &a)| self.letter_at(i) == a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Zero,
    Star,
    Omega,
    Infty,
}

impl SpaceKind {
    pub const ALL: [SpaceKind; 4] = [SpaceKind::Zero, SpaceKind::Star, SpaceKind::Omega, SpaceKind::Infty];

    /// Transitions may terminate (`+1` summand in the transition type).
    pub fn has_termination(self) -> bool {
        matches!(self, SpaceKind::Star | SpaceKind::Infty)
    }

    /// Full probability rather than sub-probability branching.
    pub fn is_probability(self) -> bool {
        matches!(self, SpaceKind::Omega | SpaceKind::Infty)
    }

    pub fn admits_singletons(self) -> bool {
        self.has_termination()
    }

    pub fn admits_cones(self) -> bool {
        self.is_probability()
    }

    pub fn name(self) -> &'static str {
        match self {
            SpaceKind::Zero => "zero",
            SpaceKind::Star => "star",
            SpaceKind::Omega => "omega",
            SpaceKind::Infty => "infty",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        SpaceKind::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Element of a semiring of word sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BaseSet {
    Empty,
    Singleton(Word),
    Cone(Word),
}

impl BaseSet {
    pub fn word(&self) -> Option<&Word> {
        match self {
            BaseSet::Empty => None,
            BaseSet::Singleton(w) | BaseSet::Cone(w) => Some(w),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, BaseSet::Empty)
    }

    fn rank(&self) -> u8 {
        match self {
            BaseSet::Empty => 0,
            BaseSet::Singleton(_) => 1,
            BaseSet::Cone(_) => 2,
        }
    }

    /// Membership of a finite word.
    pub fn contains_word(&self, w: &Word) -> bool {
        match self {
            BaseSet::Empty => false,
            BaseSet::Singleton(u) => u == w,
            BaseSet::Cone(u) => is_prefix(u, w),
        }
    }

    /// Membership of an infinite word.
    pub fn contains_infinite(&self, w: &InfiniteWord) -> bool {
        match self {
            BaseSet::Cone(u) => w.has_prefix(u),
            _ => false,
        }
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> impl fmt::Display + 'a {
        BaseSetDisplay { set: self, alphabet }
    }
}

/// Length-lexicographic on the word, singleton before cone on ties.
impl Ord for BaseSet {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.word(), other.word()) {
            (Some(u), Some(v)) => u.cmp(v).then(self.rank().cmp(&other.rank())),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for BaseSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct BaseSetDisplay<'a> {
    set: &'a BaseSet,
    alphabet: &'a Alphabet,
}

impl fmt::Display for BaseSetDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.set {
            BaseSet::Empty => f.write_str("empty"),
            BaseSet::Singleton(w) => write!(f, "word:{}", self.alphabet.format_word(w)),
            BaseSet::Cone(w) => write!(f, "cone:{}", self.alphabet.format_word(w)),
        }
    }
}

/// Finite disjoint union of base sets, in canonical form.
///
/// The empty set is represented by an empty part list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingSet {
    kind: SpaceKind,
    parts: Vec<BaseSet>,
}

impl RingSet {
    pub fn empty(kind: SpaceKind) -> Self {
        RingSet { kind, parts: Vec::new() }
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn parts(&self) -> &[BaseSet] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains_word(&self, w: &Word) -> bool {
        self.kind != SpaceKind::Omega && self.parts.iter().any(|p| p.contains_word(w))
    }

    pub fn contains_infinite(&self, w: &InfiniteWord) -> bool {
        self.parts.iter().any(|p| p.contains_infinite(w))
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> impl fmt::Display + 'a {
        RingSetDisplay { set: self, alphabet }
    }
}

struct RingSetDisplay<'a> {
    set: &'a RingSet,
    alphabet: &'a Alphabet,
}

impl fmt::Display for RingSetDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.set.parts.is_empty() {
            return f.write_str("empty");
        }
        for (i, p) in self.set.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{}", p.display(self.alphabet))?;
        }
        Ok(())
    }
}

/// An alphabet together with a space kind: the ambient set `A^⋄`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordSpace {
    alphabet: Alphabet,
    kind: SpaceKind,
}

impl WordSpace {
    pub fn new(alphabet: Alphabet, kind: SpaceKind) -> Self {
        WordSpace { alphabet, kind }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn is_admissible(&self, s: &BaseSet) -> bool {
        let letters_ok = s.word().is_none_or(|w| w.is_over(&self.alphabet));
        letters_ok
            && match s {
                BaseSet::Empty => true,
                BaseSet::Singleton(_) => self.kind.admits_singletons(),
                BaseSet::Cone(_) => self.kind.admits_cones(),
            }
    }

    pub fn check(&self, s: &BaseSet) -> Result<(), WordError> {
        if self.is_admissible(s) {
            Ok(())
        } else {
            Err(WordError::NotAdmissible {
                set: s.display(&self.alphabet).to_string(),
                kind: self.kind,
            })
        }
    }

    /// The designated countable cover of `A^⋄`: `↑ε` for omega/infty.
    /// For star the cover is the (infinite) family of all singletons and
    /// for zero it is empty; both return `None`.
    pub fn whole_cone(&self) -> Option<BaseSet> {
        self.kind.admits_cones().then(|| BaseSet::Cone(Word::empty()))
    }

    /// Exact intersection; the result is again a base set.
    pub fn intersect_base(&self, s: &BaseSet, t: &BaseSet) -> Result<BaseSet, WordError> {
        self.check(s)?;
        self.check(t)?;
        use BaseSet::*;
        Ok(match (s, t) {
            (Empty, _) | (_, Empty) => Empty,
            (Singleton(u), Singleton(v)) => {
                if u == v {
                    Singleton(u.clone())
                } else {
                    Empty
                }
            }
            (Cone(u), Singleton(v)) | (Singleton(v), Cone(u)) => {
                if is_prefix(u, v) {
                    Singleton(v.clone())
                } else {
                    Empty
                }
            }
            (Cone(u), Cone(v)) => {
                if is_prefix(u, v) {
                    Cone(v.clone())
                } else if is_prefix(v, u) {
                    Cone(u.clone())
                } else {
                    Empty
                }
            }
        })
    }

    /// `s \ t` as a disjoint union of base sets.
    pub fn difference_base(&self, s: &BaseSet, t: &BaseSet) -> Result<RingSet, WordError> {
        self.check(s)?;
        self.check(t)?;
        let parts = self.raw_difference(s, t);
        Ok(self.canonical(parts))
    }

    /// Uncanonicalized disjoint pieces of `s \ t`.
    fn raw_difference(&self, s: &BaseSet, t: &BaseSet) -> Vec<BaseSet> {
        use BaseSet::*;
        match (s, t) {
            (Empty, _) => vec![],
            (_, Empty) => vec![s.clone()],
            (Singleton(u), Singleton(v)) => {
                if u == v {
                    vec![]
                } else {
                    vec![s.clone()]
                }
            }
            (Singleton(u), Cone(v)) => {
                if is_prefix(v, u) {
                    vec![]
                } else {
                    vec![s.clone()]
                }
            }
            (Cone(u), Cone(v)) => {
                if is_prefix(v, u) {
                    vec![]
                } else if !is_prefix(u, v) {
                    vec![s.clone()]
                } else {
                    self.cone_minus_path(u, v)
                }
            }
            (Cone(u), Singleton(v)) => {
                if !is_prefix(u, v) {
                    vec![s.clone()]
                } else {
                    let mut parts = self.cone_minus_path(u, v);
                    parts.extend(self.alphabet.letters().map(|a| Cone(v.push(a))));
                    parts
                }
            }
        }
    }

    /// `↑u \ ↑v` for `u ⊑ v`: the off-path sibling cones at every level
    /// between `u` and `v`, plus the on-path finite words when the space
    /// contains finite words.
    fn cone_minus_path(&self, u: &Word, v: &Word) -> Vec<BaseSet> {
        let mut parts = Vec::new();
        for i in u.len()..v.len() {
            let node = v.prefix(i);
            if self.kind.admits_singletons() {
                parts.push(BaseSet::Singleton(node.clone()));
            }
            for a in self.alphabet.letters() {
                if a != v.0[i] {
                    parts.push(BaseSet::Cone(node.push(a)));
                }
            }
        }
        parts
    }

    /// Disjointifies an arbitrary finite union of base sets.
    pub fn normalize(&self, parts: &[BaseSet]) -> Result<RingSet, WordError> {
        for p in parts {
            self.check(p)?;
        }
        let mut disjoint: Vec<BaseSet> = Vec::new();
        for p in parts {
            let mut pieces = vec![p.clone()];
            for q in &disjoint {
                pieces = pieces
                    .iter()
                    .flat_map(|piece| self.raw_difference(piece, q))
                    .collect();
                if pieces.is_empty() {
                    break;
                }
            }
            disjoint.extend(pieces);
        }
        Ok(self.canonical(disjoint))
    }

    /// Merges complete child families into their parent cone, then sorts.
    /// Input parts must already be pairwise disjoint.
    fn canonical(&self, parts: Vec<BaseSet>) -> RingSet {
        use std::collections::BTreeSet;
        let mut set: BTreeSet<BaseSet> = parts.into_iter().filter(|p| !p.is_empty()).collect();
        if self.kind.admits_cones() {
            loop {
                let mut merged = None;
                for p in set.iter().rev() {
                    let BaseSet::Cone(w) = p else { continue };
                    let Some(parent) = w.len().checked_sub(1).map(|n| w.prefix(n)) else {
                        continue;
                    };
                    let children_present = self
                        .alphabet
                        .letters()
                        .all(|a| set.contains(&BaseSet::Cone(parent.push(a))));
                    let node_present = !self.kind.admits_singletons()
                        || set.contains(&BaseSet::Singleton(parent.clone()));
                    if children_present && node_present {
                        merged = Some(parent);
                        break;
                    }
                }
                let Some(parent) = merged else { break };
                for a in self.alphabet.letters() {
                    set.remove(&BaseSet::Cone(parent.push(a)));
                }
                set.remove(&BaseSet::Singleton(parent.clone()));
                set.insert(BaseSet::Cone(parent));
            }
        }
        RingSet {
            kind: self.kind,
            parts: set.into_iter().collect(),
        }
    }

    pub fn ring(&self, parts: &[BaseSet]) -> Result<RingSet, WordError> {
        self.normalize(parts)
    }

    fn same_kind(&self, r: &RingSet) -> Result<(), WordError> {
        if r.kind == self.kind {
            Ok(())
        } else {
            Err(WordError::KindMismatch(self.kind, r.kind))
        }
    }

    pub fn union(&self, r: &RingSet, s: &RingSet) -> Result<RingSet, WordError> {
        self.same_kind(r)?;
        self.same_kind(s)?;
        let all: Vec<BaseSet> = r.parts.iter().chain(&s.parts).cloned().collect();
        self.normalize(&all)
    }

    pub fn intersection(&self, r: &RingSet, s: &RingSet) -> Result<RingSet, WordError> {
        self.same_kind(r)?;
        self.same_kind(s)?;
        let mut out = Vec::new();
        for p in &r.parts {
            for q in &s.parts {
                out.push(self.intersect_base(p, q)?);
            }
        }
        Ok(self.canonical(out))
    }

    pub fn difference(&self, r: &RingSet, s: &RingSet) -> Result<RingSet, WordError> {
        self.same_kind(r)?;
        self.same_kind(s)?;
        let mut pieces = r.parts.clone();
        for q in &s.parts {
            pieces = pieces
                .iter()
                .flat_map(|p| self.raw_difference(p, q))
                .collect();
        }
        Ok(self.canonical(pieces))
    }

    /// `A^⋄ \ r`.
    pub fn complement(&self, r: &RingSet) -> Result<RingSet, WordError> {
        self.same_kind(r)?;
        match self.kind {
            SpaceKind::Zero => Ok(RingSet::empty(self.kind)),
            // A finite union of singletons never has a finite complement in
            // the infinite set A*.
            SpaceKind::Star => Err(WordError::UnrepresentableComplement),
            SpaceKind::Omega | SpaceKind::Infty => {
                let whole = RingSet {
                    kind: self.kind,
                    parts: vec![BaseSet::Cone(Word::empty())],
                };
                self.difference(&whole, r)
            }
        }
    }

    pub fn parse_base(&self, text: &str) -> Result<BaseSet, WordError> {
        let text = text.trim();
        let set = if text == "empty" {
            BaseSet::Empty
        } else if let Some(w) = text.strip_prefix("word:") {
            BaseSet::Singleton(self.alphabet.parse_word(w)?)
        } else if let Some(w) = text.strip_prefix("cone:") {
            BaseSet::Cone(self.alphabet.parse_word(w)?)
        } else {
            return Err(WordError::Syntax(text.to_string()));
        };
        self.check(&set)?;
        Ok(set)
    }

    /// `inf:<prefix>^(<period>)`.
    pub fn parse_infinite(&self, text: &str) -> Result<InfiniteWord, WordError> {
        let syntax = || WordError::Syntax(text.to_string());
        let body = text.trim().strip_prefix("inf:").ok_or_else(syntax)?;
        let (prefix, rest) = body.split_once('^').ok_or_else(syntax)?;
        let period = rest
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(syntax)?;
        InfiniteWord::new(self.alphabet.parse_word(prefix)?, self.alphabet.parse_word(period)?)
    }

    pub fn parse_expr(&self, text: &str) -> Result<SetExpr, WordError> {
        let text = text.trim();
        match text {
            "A*" | "Astar" => return Ok(SetExpr::FiniteWords),
            "Aomega" | "A^omega" => return Ok(SetExpr::InfiniteWords),
            _ => {}
        }
        if text.starts_with("inf:") {
            return self.parse_infinite(text).map(SetExpr::Infinite);
        }
        let parts = text
            .split('+')
            .map(|p| self.parse_base(p))
            .collect::<Result<Vec<_>, _>>()?;
        if parts.len() == 1 {
            Ok(SetExpr::Base(parts.into_iter().next().unwrap()))
        } else {
            self.normalize(&parts).map(SetExpr::Ring)
        }
    }
}

/// A query target in the textual set notation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetExpr {
    Base(BaseSet),
    Ring(RingSet),
    Infinite(InfiniteWord),
    /// `A*`, the set of all finite words.
    FiniteWords,
    /// `A^ω`, the set of all infinite words.
    InfiniteWords,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab(kind: SpaceKind) -> WordSpace {
        WordSpace::new(Alphabet::new(["a", "b"]).unwrap(), kind)
    }

    fn w(space: &WordSpace, s: &str) -> Word {
        space.alphabet().parse_word(s).unwrap()
    }

    fn cone(space: &WordSpace, s: &str) -> BaseSet {
        BaseSet::Cone(w(space, s))
    }

    fn single(space: &WordSpace, s: &str) -> BaseSet {
        BaseSet::Singleton(w(space, s))
    }

    #[test]
    fn prefix_relation() {
        let sp = ab(SpaceKind::Infty);
        assert!(is_prefix(&Word::empty(), &w(&sp, "abb")));
        assert!(is_prefix(&w(&sp, "ab"), &w(&sp, "ab")));
        assert!(!is_prefix(&w(&sp, "ab"), &w(&sp, "ba")));
        assert!(!is_prefix(&w(&sp, "abb"), &w(&sp, "ab")));
    }

    #[test]
    fn alphabet_validation() {
        assert_eq!(Alphabet::new(Vec::<String>::new()), Err(WordError::EmptyAlphabet));
        assert!(matches!(Alphabet::new(["a", "a"]), Err(WordError::DuplicateSymbol(_))));
        assert!(matches!(Alphabet::new(["a+"]), Err(WordError::BadSymbol(_))));
    }

    #[test]
    fn multi_char_symbols_use_dots() {
        let alpha = Alphabet::new(["go", "stop"]).unwrap();
        let word = alpha.parse_word("go.stop.go").unwrap();
        assert_eq!(word, Word::from_letters([0, 1, 0]));
        assert_eq!(alpha.format_word(&word), "go.stop.go");
        assert!(alpha.parse_word("gostop").is_err());
    }

    #[test]
    fn intersection_examples() {
        let sp = ab(SpaceKind::Infty);
        assert_eq!(sp.intersect_base(&cone(&sp, "ab"), &cone(&sp, "a")).unwrap(), cone(&sp, "ab"));
        assert_eq!(sp.intersect_base(&cone(&sp, "a"), &single(&sp, "ab")).unwrap(), single(&sp, "ab"));
        assert_eq!(sp.intersect_base(&cone(&sp, "a"), &cone(&sp, "b")).unwrap(), BaseSet::Empty);
    }

    #[test]
    fn difference_examples() {
        let sp = ab(SpaceKind::Infty);
        let d = sp.difference_base(&cone(&sp, ""), &cone(&sp, "a")).unwrap();
        assert_eq!(d.parts(), &[single(&sp, ""), cone(&sp, "b")]);

        let om = ab(SpaceKind::Omega);
        let d = om.difference_base(&cone(&om, ""), &cone(&om, "a")).unwrap();
        assert_eq!(d.parts(), &[cone(&om, "b")]);

        let d = sp.difference_base(&cone(&sp, "a"), &single(&sp, "a")).unwrap();
        assert_eq!(d.parts(), &[cone(&sp, "aa"), cone(&sp, "ab")]);
    }

    #[test]
    fn difference_rejects_inadmissible() {
        let om = ab(SpaceKind::Omega);
        assert!(matches!(
            om.difference_base(&cone(&om, ""), &single(&om, "a")),
            Err(WordError::NotAdmissible { .. })
        ));
        let st = ab(SpaceKind::Star);
        assert!(st.intersect_base(&cone(&st, "a"), &single(&st, "a")).is_err());
    }

    #[test]
    fn normalize_examples() {
        let sp = ab(SpaceKind::Infty);
        assert_eq!(sp.normalize(&[cone(&sp, "a"), cone(&sp, "ab")]).unwrap().parts(), &[cone(&sp, "a")]);
        assert_eq!(sp.normalize(&[cone(&sp, "ab"), cone(&sp, "a")]).unwrap().parts(), &[cone(&sp, "a")]);
        assert_eq!(sp.normalize(&[single(&sp, "a"), single(&sp, "a")]).unwrap().parts(), &[single(&sp, "a")]);
        assert_eq!(sp.normalize(&[cone(&sp, "a"), single(&sp, "a")]).unwrap().parts(), &[cone(&sp, "a")]);
        assert!(sp.normalize(&[BaseSet::Empty]).unwrap().is_empty());
    }

    #[test]
    fn complement_examples() {
        let om = ab(SpaceKind::Omega);
        let r = om.ring(&[cone(&om, "a")]).unwrap();
        assert_eq!(om.complement(&r).unwrap().parts(), &[cone(&om, "b")]);

        let sp = ab(SpaceKind::Infty);
        let whole = sp.ring(&[cone(&sp, "")]).unwrap();
        assert!(sp.complement(&whole).unwrap().is_empty());
        let eps = sp.ring(&[single(&sp, "")]).unwrap();
        assert_eq!(sp.complement(&eps).unwrap().parts(), &[cone(&sp, "a"), cone(&sp, "b")]);

        let st = ab(SpaceKind::Star);
        let r = st.ring(&[single(&st, "a")]).unwrap();
        assert_eq!(st.complement(&r), Err(WordError::UnrepresentableComplement));
    }

    #[test]
    fn ring_kind_mismatch() {
        let sp = ab(SpaceKind::Infty);
        let om = ab(SpaceKind::Omega);
        let r = om.ring(&[cone(&om, "a")]).unwrap();
        assert!(matches!(sp.complement(&r), Err(WordError::KindMismatch(..))));
    }

    #[test]
    fn set_expression_parsing() {
        let sp = ab(SpaceKind::Infty);
        assert_eq!(sp.parse_expr("word:").unwrap(), SetExpr::Base(single(&sp, "")));
        assert_eq!(sp.parse_expr("cone:ab").unwrap(), SetExpr::Base(cone(&sp, "ab")));
        assert_eq!(sp.parse_expr("empty").unwrap(), SetExpr::Base(BaseSet::Empty));
        assert_eq!(sp.parse_expr("A*").unwrap(), SetExpr::FiniteWords);
        assert_eq!(sp.parse_expr("Aomega").unwrap(), SetExpr::InfiniteWords);
        match sp.parse_expr("word: + cone:a").unwrap() {
            SetExpr::Ring(r) => assert_eq!(r.parts(), &[single(&sp, ""), cone(&sp, "a")]),
            other => panic!("{other:?}"),
        }
        match sp.parse_expr("inf:a^(b)").unwrap() {
            SetExpr::Infinite(iw) => assert_eq!(iw.truncate(4), w(&sp, "abbb")),
            other => panic!("{other:?}"),
        }
        assert!(matches!(sp.parse_expr("cone:ac"), Err(WordError::UnknownLetter(_))));
        assert!(matches!(sp.parse_expr("inf:a^()"), Err(WordError::EmptyPeriod)));
        assert!(matches!(sp.parse_expr("bogus"), Err(WordError::Syntax(_))));
    }

    #[test]
    fn length_lex_order() {
        let sp = ab(SpaceKind::Infty);
        let mut v = vec![w(&sp, "b"), w(&sp, "aa"), w(&sp, ""), w(&sp, "a")];
        v.sort();
        assert_eq!(v, vec![w(&sp, ""), w(&sp, "a"), w(&sp, "b"), w(&sp, "aa")]);
        assert_eq!(sp.alphabet().words_up_to(2).len(), 7);
    }
}
