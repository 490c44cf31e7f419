//! Propositional substrate: vocabularies, models as bit-indices, formulas,
//! theories, model sets as bitsets, domain families with verified closure
//! flags, and the definability-closure operator.
//!
//! A model over a vocabulary of `n` atoms is an index in `[0, 2^n)`; bit `i`
//! of the index is the truth value of atom `i`. A [`ModelSet`] is a bitset
//! over an explicit ambient `space` — for logical uses the space is `2^n`,
//! but any finite ambient size is allowed, which lets the same type serve as
//! "subset of an abstract universe" throughout the crate.

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

/// Default cap on vocabulary size; every checker downstream is exponential
/// in the number of atoms by nature.
pub const MAX_ATOMS: usize = 16;

/// Errors raised by the propositional layer.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum LogicError {
    #[error("vocabulary must not be empty")]
    EmptyVocabulary,
    #[error("vocabulary has {0} atoms; at most {MAX_ATOMS} are supported")]
    VocabularyTooLarge(usize),
    #[error("duplicate atom name `{0}`")]
    DuplicateAtom(String),
    #[error("invalid atom name `{0}`")]
    InvalidAtomName(String),
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("model index {index} out of range for space {space}")]
    ModelOutOfRange { index: usize, space: usize },
    #[error("ambient space mismatch: {0} vs {1}")]
    SpaceMismatch(usize, usize),
    #[error("no member of the family contains the given set and the full space is absent")]
    NoEnclosingMember,
}

// ---------------------------------------------------------------------------
// Vocabulary and models
// ---------------------------------------------------------------------------

/// An ordered list of distinct atom names. The order is fixed for the
/// lifetime of a session: model encodings depend on it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Vocabulary {
    atoms: Vec<String>,
}

/// A propositional valuation, encoded as an index in `[0, 2^n)`.
pub type Model = usize;

fn valid_atom_name(name: &str) -> bool {
    let mut chars = name.chars();
    let head_ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_');
    head_ok
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && name != "true"
        && name != "false"
}

impl Vocabulary {
    /// Builds a vocabulary, validating the invariants: non-empty, at most
    /// [`MAX_ATOMS`] atoms, unique identifier-shaped names.
    pub fn new(atoms: Vec<String>) -> Result<Self, LogicError> {
        if atoms.is_empty() {
            return Err(LogicError::EmptyVocabulary);
        }
        if atoms.len() > MAX_ATOMS {
            return Err(LogicError::VocabularyTooLarge(atoms.len()));
        }
        let mut seen = BTreeSet::new();
        for a in &atoms {
            if !valid_atom_name(a) {
                return Err(LogicError::InvalidAtomName(a.clone()));
            }
            if !seen.insert(a.clone()) {
                return Err(LogicError::DuplicateAtom(a.clone()));
            }
        }
        Ok(Vocabulary { atoms })
    }

    /// Convenience constructor from string slices.
    pub fn of(atoms: &[&str]) -> Self {
        Vocabulary::new(atoms.iter().map(|s| s.to_string()).collect())
            .expect("invalid vocabulary literal")
    }

    /// Number of atoms.
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Size of the model space, `2^n`.
    pub fn space(&self) -> usize {
        1usize << self.atoms.len()
    }

    pub fn atom_names(&self) -> &[String] {
        &self.atoms
    }

    pub fn atom_name(&self, i: usize) -> &str {
        &self.atoms[i]
    }

    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == name)
    }

    /// True iff atom `i` holds in model `m`.
    pub fn holds_in(&self, m: Model, i: usize) -> bool {
        (m >> i) & 1 == 1
    }
}

// ---------------------------------------------------------------------------
// Model sets
// ---------------------------------------------------------------------------

/// A subset of a finite ambient space `{0, 1, …, space−1}`, stored as a
/// bitset. Ordering is by ambient space first, then by the bitmask read as
/// an unsigned integer — so over a fixed space, sets enumerate as
/// `∅, {0}, {1}, {0,1}, {2}, …`, which is the canonical order used for
/// deterministic witnesses throughout the crate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModelSet {
    space: usize,
    words: Vec<u64>,
}

fn word_count(space: usize) -> usize {
    space.div_ceil(64).max(1)
}

impl ModelSet {
    /// The empty subset of an ambient space.
    pub fn empty(space: usize) -> Self {
        ModelSet {
            space,
            words: vec![0; word_count(space)],
        }
    }

    /// The full ambient space as a set.
    pub fn full(space: usize) -> Self {
        let mut s = ModelSet::empty(space);
        for i in 0..space {
            s.insert(i);
        }
        s
    }

    /// Builds a set from member indices, validating the range.
    pub fn from_indices(space: usize, members: &[usize]) -> Result<Self, LogicError> {
        let mut s = ModelSet::empty(space);
        for &m in members {
            if m >= space {
                return Err(LogicError::ModelOutOfRange { index: m, space });
            }
            s.insert(m);
        }
        Ok(s)
    }

    /// A one-element set.
    pub fn singleton(space: usize, member: usize) -> Self {
        let mut s = ModelSet::empty(space);
        s.insert(member);
        s
    }

    pub fn space(&self) -> usize {
        self.space
    }

    pub fn insert(&mut self, m: usize) {
        debug_assert!(m < self.space);
        self.words[m / 64] |= 1u64 << (m % 64);
    }

    pub fn remove(&mut self, m: usize) {
        debug_assert!(m < self.space);
        self.words[m / 64] &= !(1u64 << (m % 64));
    }

    pub fn contains(&self, m: usize) -> bool {
        m < self.space && (self.words[m / 64] >> (m % 64)) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn union(&self, other: &ModelSet) -> ModelSet {
        debug_assert_eq!(self.space, other.space);
        ModelSet {
            space: self.space,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a | b)
                .collect(),
        }
    }

    pub fn inter(&self, other: &ModelSet) -> ModelSet {
        debug_assert_eq!(self.space, other.space);
        ModelSet {
            space: self.space,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    /// Set difference `self − other`.
    pub fn minus(&self, other: &ModelSet) -> ModelSet {
        debug_assert_eq!(self.space, other.space);
        ModelSet {
            space: self.space,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & !b)
                .collect(),
        }
    }

    /// Complement relative to `ambient` (which must contain `self`'s bits in
    /// practice; computed as `ambient − self`).
    pub fn complement_in(&self, ambient: &ModelSet) -> ModelSet {
        ambient.minus(self)
    }

    pub fn is_subset(&self, other: &ModelSet) -> bool {
        debug_assert_eq!(self.space, other.space);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &ModelSet) -> bool {
        self.inter(other).is_empty()
    }

    pub fn intersects(&self, other: &ModelSet) -> bool {
        !self.is_disjoint(other)
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.space).filter(move |&m| self.contains(m))
    }

    /// Members in ascending order, collected.
    pub fn members(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Least member, if any.
    pub fn least(&self) -> Option<usize> {
        self.iter().next()
    }

    /// All subsets of `self`, in ascending canonical order (the bitmask
    /// order of [`ModelSet`]'s `Ord`), starting with `∅`.
    pub fn subsets(&self) -> SubsetIter {
        SubsetIter {
            members: self.members(),
            space: self.space,
            next_rank: 0,
            count: 1u128 << self.len(),
        }
    }
}

/// Iterator over all subsets of a fixed set in canonical ascending order.
pub struct SubsetIter {
    members: Vec<usize>,
    space: usize,
    next_rank: u128,
    count: u128,
}

impl Iterator for SubsetIter {
    type Item = ModelSet;

    fn next(&mut self) -> Option<ModelSet> {
        if self.next_rank >= self.count {
            return None;
        }
        let r = self.next_rank;
        self.next_rank += 1;
        let mut s = ModelSet::empty(self.space);
        for (j, &m) in self.members.iter().enumerate() {
            if (r >> j) & 1 == 1 {
                s.insert(m);
            }
        }
        Some(s)
    }
}

impl PartialOrd for ModelSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ModelSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.space
            .cmp(&other.space)
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl fmt::Display for ModelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, m) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for ModelSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.len()))?;
        for m in self.iter() {
            seq.serialize_element(&m)?;
        }
        seq.end()
    }
}

// ---------------------------------------------------------------------------
// Formulas
// ---------------------------------------------------------------------------

/// Abstract syntax of propositional formulas. Atoms are stored as indices
/// into the vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Bottom,
    Top,
    Atom(usize),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }
    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    /// Truth value of the formula in model `m`.
    pub fn eval(&self, m: Model) -> bool {
        match self {
            Formula::Bottom => false,
            Formula::Top => true,
            Formula::Atom(i) => (m >> i) & 1 == 1,
            Formula::Not(f) => !f.eval(m),
            Formula::And(a, b) => a.eval(m) && b.eval(m),
            Formula::Or(a, b) => a.eval(m) || b.eval(m),
            Formula::Implies(a, b) => !a.eval(m) || b.eval(m),
            Formula::Iff(a, b) => a.eval(m) == b.eval(m),
        }
    }

    /// The set of models satisfying the formula.
    pub fn models(&self, vocab: &Vocabulary) -> ModelSet {
        let mut s = ModelSet::empty(vocab.space());
        for m in 0..vocab.space() {
            if self.eval(m) {
                s.insert(m);
            }
        }
        s
    }

    /// Renders the formula in the ASCII grammar, with minimal parentheses.
    /// Round-trips through [`parse_formula`] up to whitespace.
    pub fn print(&self, vocab: &Vocabulary) -> String {
        fn prec(f: &Formula) -> u8 {
            match f {
                Formula::Iff(..) => 1,
                Formula::Implies(..) => 2,
                Formula::Or(..) => 3,
                Formula::And(..) => 4,
                Formula::Not(..) => 5,
                Formula::Atom(..) | Formula::Top | Formula::Bottom => 6,
            }
        }
        fn go(f: &Formula, vocab: &Vocabulary, min_prec: u8, out: &mut String) {
            let p = prec(f);
            let parens = p < min_prec;
            if parens {
                out.push('(');
            }
            match f {
                Formula::Bottom => out.push_str("false"),
                Formula::Top => out.push_str("true"),
                Formula::Atom(i) => out.push_str(vocab.atom_name(*i)),
                Formula::Not(g) => {
                    out.push('~');
                    go(g, vocab, 5, out);
                }
                Formula::And(a, b) => {
                    go(a, vocab, 4, out);
                    out.push_str(" & ");
                    go(b, vocab, 5, out);
                }
                Formula::Or(a, b) => {
                    go(a, vocab, 3, out);
                    out.push_str(" | ");
                    go(b, vocab, 4, out);
                }
                Formula::Implies(a, b) => {
                    // right-associative
                    go(a, vocab, 3, out);
                    out.push_str(" -> ");
                    go(b, vocab, 2, out);
                }
                Formula::Iff(a, b) => {
                    go(a, vocab, 1, out);
                    out.push_str(" <-> ");
                    go(b, vocab, 2, out);
                }
            }
            if parens {
                out.push(')');
            }
        }
        let mut out = String::new();
        go(self, vocab, 0, &mut out);
        out
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Arrow,
    Iff,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, LogicError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '~' => {
                toks.push((Tok::Not, i));
                i += 1;
            }
            '&' => {
                toks.push((Tok::And, i));
                i += 1;
            }
            '|' => {
                toks.push((Tok::Or, i));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            '-' => {
                if i + 1 < bytes.len() && bytes[i + 1] == b'>' {
                    toks.push((Tok::Arrow, i));
                    i += 2;
                } else {
                    return Err(LogicError::Syntax {
                        pos: i,
                        msg: "expected `->`".into(),
                    });
                }
            }
            '<' => {
                if i + 2 < bytes.len() && bytes[i + 1] == b'-' && bytes[i + 2] == b'>' {
                    toks.push((Tok::Iff, i));
                    i += 3;
                } else {
                    return Err(LogicError::Syntax {
                        pos: i,
                        msg: "expected `<->`".into(),
                    });
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let word = &text[start..i];
                toks.push((
                    match word {
                        "true" => Tok::True,
                        "false" => Tok::False,
                        _ => Tok::Ident(word.to_string()),
                    },
                    start,
                ));
            }
            _ => {
                return Err(LogicError::Syntax {
                    pos: i,
                    msg: format!("unexpected character `{c}`"),
                });
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vocab: &'a Vocabulary,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |&(_, p)| p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), LogicError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(LogicError::Syntax {
                pos: self.here(),
                msg: format!("expected {what}"),
            })
        }
    }

    // iff := imp (`<->` imp)*        (left-associative)
    fn parse_iff(&mut self) -> Result<Formula, LogicError> {
        let mut f = self.parse_imp()?;
        while self.peek() == Some(&Tok::Iff) {
            self.pos += 1;
            let rhs = self.parse_imp()?;
            f = Formula::iff(f, rhs);
        }
        Ok(f)
    }

    // imp := or (`->` imp)?          (right-associative)
    fn parse_imp(&mut self) -> Result<Formula, LogicError> {
        let lhs = self.parse_or()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let rhs = self.parse_imp()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_or(&mut self) -> Result<Formula, LogicError> {
        let mut f = self.parse_and()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            let rhs = self.parse_and()?;
            f = Formula::or(f, rhs);
        }
        Ok(f)
    }

    fn parse_and(&mut self) -> Result<Formula, LogicError> {
        let mut f = self.parse_unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            let rhs = self.parse_unary()?;
            f = Formula::and(f, rhs);
        }
        Ok(f)
    }

    fn parse_unary(&mut self) -> Result<Formula, LogicError> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Not) => Ok(Formula::not(self.parse_unary()?)),
            Some(Tok::True) => Ok(Formula::Top),
            Some(Tok::False) => Ok(Formula::Bottom),
            Some(Tok::Ident(name)) => match self.vocab.atom_index(&name) {
                Some(i) => Ok(Formula::Atom(i)),
                None => Err(LogicError::UnknownAtom(name)),
            },
            Some(Tok::LParen) => {
                let f = self.parse_iff()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            _ => Err(LogicError::Syntax {
                pos,
                msg: "expected a formula".into(),
            }),
        }
    }
}

/// Parses a formula in the ASCII grammar: atoms `[a-zA-Z_][a-zA-Z0-9_]*`,
/// `~` not, `&` and, `|` or, `->` implies (right-associative), `<->` iff,
/// `true`/`false`, parentheses. Precedence: `~` > `&` > `|` > `->` > `<->`.
pub fn parse_formula(text: &str, vocab: &Vocabulary) -> Result<Formula, LogicError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        vocab,
        end: text.len(),
    };
    let f = p.parse_iff()?;
    if p.pos < p.toks.len() {
        return Err(LogicError::Syntax {
            pos: p.here(),
            msg: "trailing input".into(),
        });
    }
    Ok(f)
}

// ---------------------------------------------------------------------------
// Theories
// ---------------------------------------------------------------------------

/// A finitely axiomatized theory: a finite set of formulas. At finite
/// vocabulary this loses no generality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theory {
    pub formulas: Vec<Formula>,
}

impl Theory {
    pub fn new(formulas: Vec<Formula>) -> Self {
        Theory { formulas }
    }

    pub fn empty() -> Self {
        Theory { formulas: vec![] }
    }

    /// Union of two axiomatizations.
    pub fn union(&self, other: &Theory) -> Theory {
        let mut formulas = self.formulas.clone();
        formulas.extend(other.formulas.iter().cloned());
        Theory { formulas }
    }

    /// Parses every formula of a textual axiomatization.
    pub fn parse(texts: &[&str], vocab: &Vocabulary) -> Result<Theory, LogicError> {
        let formulas = texts
            .iter()
            .map(|t| parse_formula(t, vocab))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Theory { formulas })
    }
}

/// The set of models satisfying every formula of the theory. The empty
/// theory yields the full space; an inconsistent theory yields `∅`.
pub fn models_of(theory: &Theory, vocab: &Vocabulary) -> ModelSet {
    let mut s = ModelSet::full(vocab.space());
    for f in &theory.formulas {
        s = s.inter(&f.models(vocab));
    }
    s
}

/// A finite axiomatization of `Th(X)`: the canonical full disjunctive normal
/// form of `X` (one full conjunction of literals per model, in ascending
/// model order), or `⊥` for `X = ∅`. Its model set equals `X` exactly,
/// so composing with [`models_of`] is the identity on model sets.
pub fn theory_of(x: &ModelSet, vocab: &Vocabulary) -> Theory {
    if x.is_empty() {
        return Theory::new(vec![Formula::Bottom]);
    }
    let mut disjuncts: Option<Formula> = None;
    for m in x.iter() {
        let mut conj: Option<Formula> = None;
        for i in 0..vocab.len() {
            let lit = if vocab.holds_in(m, i) {
                Formula::Atom(i)
            } else {
                Formula::not(Formula::Atom(i))
            };
            conj = Some(match conj {
                None => lit,
                Some(c) => Formula::and(c, lit),
            });
        }
        let conj = conj.expect("vocabulary is non-empty");
        disjuncts = Some(match disjuncts {
            None => conj,
            Some(d) => Formula::or(d, conj),
        });
    }
    Theory::new(vec![disjuncts.expect("set is non-empty")])
}

/// Classical consequence: true iff every model of `theory` satisfies `phi`.
pub fn entails(theory: &Theory, phi: &Formula, vocab: &Vocabulary) -> bool {
    models_of(theory, vocab).is_subset(&phi.models(vocab))
}

// ---------------------------------------------------------------------------
// Domain families
// ---------------------------------------------------------------------------

/// Closure flags of a [`DomainFamily`], recomputed from the member sets on
/// construction — never trusted from input.
///
/// A family counts as closed under an operation when every result of the
/// operation on members is either a member or empty; this "modulo ∅"
/// convention keeps families like `P(U) ∖ {∅}` intersection-closed, which is
/// how the side conditions of the implication rows are meant to read at this
/// scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClosureFlags {
    pub closed_under_finite_intersection: bool,
    pub closed_under_finite_union: bool,
    pub closed_under_complement: bool,
    pub closed_under_set_difference: bool,
    pub contains_singletons: bool,
}

/// A finite list of distinct model sets over a common ambient space, with
/// verified closure flags. Sets are kept in canonical ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainFamily {
    sets: Vec<ModelSet>,
    space: usize,
    flags: ClosureFlags,
}

impl DomainFamily {
    /// Builds a family from member sets (deduplicated and sorted into
    /// canonical order) and recomputes every closure flag.
    pub fn new(space: usize, sets: Vec<ModelSet>) -> Result<Self, LogicError> {
        for s in &sets {
            if s.space() != space {
                return Err(LogicError::SpaceMismatch(s.space(), space));
            }
        }
        let mut sets: Vec<ModelSet> = sets;
        sets.sort();
        sets.dedup();
        let flags = Self::compute_flags(space, &sets);
        Ok(DomainFamily { sets, space, flags })
    }

    /// The family of all subsets of `universe` (optionally including `∅`),
    /// in canonical order.
    pub fn powerset_of(universe: &ModelSet, include_empty: bool) -> DomainFamily {
        let sets = universe
            .subsets()
            .filter(|s| include_empty || !s.is_empty())
            .collect();
        DomainFamily::new(universe.space(), sets).expect("powerset construction is well-formed")
    }

    fn compute_flags(_space: usize, sets: &[ModelSet]) -> ClosureFlags {
        let member = |s: &ModelSet| -> bool { s.is_empty() || sets.binary_search(s).is_ok() };
        let universe = sets
            .iter()
            .fold(ModelSet::empty(_space), |acc, s| acc.union(s));
        let mut inter_ok = true;
        let mut union_ok = true;
        let mut diff_ok = true;
        for a in sets {
            for b in sets {
                if !member(&a.inter(b)) {
                    inter_ok = false;
                }
                if !member(&a.union(b)) {
                    union_ok = false;
                }
                if !member(&a.minus(b)) {
                    diff_ok = false;
                }
            }
        }
        let complement_ok = sets.iter().all(|a| member(&a.complement_in(&universe)));
        let singletons_ok = universe
            .iter()
            .all(|x| sets.binary_search(&ModelSet::singleton(_space, x)).is_ok());
        ClosureFlags {
            closed_under_finite_intersection: inter_ok,
            closed_under_finite_union: union_ok,
            closed_under_complement: complement_ok,
            closed_under_set_difference: diff_ok,
            contains_singletons: singletons_ok,
        }
    }

    pub fn space(&self) -> usize {
        self.space
    }

    /// Member sets in canonical ascending order.
    pub fn sets(&self) -> &[ModelSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn contains(&self, s: &ModelSet) -> bool {
        self.sets.binary_search(s).is_ok()
    }

    pub fn flags(&self) -> ClosureFlags {
        self.flags
    }

    /// Union of all member sets — the effective universe of the family.
    pub fn universe(&self) -> ModelSet {
        self.sets
            .iter()
            .fold(ModelSet::empty(self.space), |acc, s| acc.union(s))
    }

    /// True iff the family contains every non-empty subset of its universe.
    pub fn is_full_powerset(&self) -> bool {
        let u = self.universe();
        u.subsets().filter(|s| !s.is_empty()).all(|s| self.contains(&s))
    }
}

/// The least superset of `a` expressible in the family: the intersection of
/// all members containing `a`. Errors when no member contains `a` (callers
/// wanting totality include the full space in the family).
pub fn def_closure(family: &DomainFamily, a: &ModelSet) -> Result<ModelSet, LogicError> {
    let mut acc: Option<ModelSet> = None;
    for x in family.sets() {
        if a.is_subset(x) {
            acc = Some(match acc {
                None => x.clone(),
                Some(c) => c.inter(x),
            });
        }
    }
    acc.ok_or(LogicError::NoEnclosingMember)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn pq() -> Vocabulary {
        Vocabulary::of(&["p", "q"])
    }

    #[test]
    fn parse_and_not() {
        let v = pq();
        let f = parse_formula("p & ~q", &v).unwrap();
        assert_eq!(
            f,
            Formula::and(Formula::Atom(0), Formula::not(Formula::Atom(1)))
        );
    }

    #[test]
    fn parse_implies_grouping() {
        let v = Vocabulary::of(&["p", "q", "r"]);
        let f = parse_formula("p -> (q | r)", &v).unwrap();
        assert_eq!(
            f,
            Formula::implies(Formula::Atom(0), Formula::or(Formula::Atom(1), Formula::Atom(2)))
        );
        // `->` is right-associative.
        let g = parse_formula("p -> q -> r", &v).unwrap();
        assert_eq!(
            g,
            Formula::implies(
                Formula::Atom(0),
                Formula::implies(Formula::Atom(1), Formula::Atom(2))
            )
        );
    }

    #[test]
    fn parse_unknown_atom() {
        let v = pq();
        assert_eq!(
            parse_formula("p & s", &v),
            Err(LogicError::UnknownAtom("s".into()))
        );
    }

    #[test]
    fn parse_precedence_chain() {
        let v = Vocabulary::of(&["p", "q", "r", "s"]);
        // ~ > & > | > -> > <->
        let f = parse_formula("~p & q | r -> s <-> p", &v).unwrap();
        let expected = Formula::iff(
            Formula::implies(
                Formula::or(
                    Formula::and(Formula::not(Formula::Atom(0)), Formula::Atom(1)),
                    Formula::Atom(2),
                ),
                Formula::Atom(3),
            ),
            Formula::Atom(0),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn print_round_trips() {
        let v = Vocabulary::of(&["p", "q", "r", "s"]);
        for text in [
            "p & ~q",
            "p -> (q | r)",
            "~(p | q) & r",
            "p -> q -> r",
            "(p -> q) -> r",
            "p <-> q <-> r",
            "true | false",
            "~~p",
            "p & (q | r) & s",
        ] {
            let f = parse_formula(text, &v).unwrap();
            let printed = f.print(&v);
            let g = parse_formula(&printed, &v).unwrap();
            assert_eq!(f, g, "round trip failed for `{text}` -> `{printed}`");
        }
    }

    #[test]
    fn models_of_examples() {
        let v = pq();
        // T = {p}: models where bit 0 is set — indices 1 and 3.
        let t = Theory::parse(&["p"], &v).unwrap();
        assert_eq!(models_of(&t, &v).members(), vec![1, 3]);
        // Inconsistent theory.
        let t = Theory::parse(&["p", "~p"], &v).unwrap();
        assert!(models_of(&t, &v).is_empty());
        // Empty theory: all four models.
        assert_eq!(models_of(&Theory::empty(), &v).len(), 4);
    }

    #[test]
    fn theory_of_round_trips() {
        let v = pq();
        for x in ModelSet::full(v.space()).subsets() {
            let t = theory_of(&x, &v);
            assert_eq!(models_of(&t, &v), x, "round trip failed for {x}");
        }
    }

    #[test]
    fn theory_of_empty_is_bottom() {
        let v = pq();
        let t = theory_of(&ModelSet::empty(v.space()), &v);
        assert_eq!(t.formulas, vec![Formula::Bottom]);
    }

    #[test]
    fn entails_examples() {
        let v = pq();
        let t = Theory::parse(&["p & q"], &v).unwrap();
        assert!(entails(&t, &parse_formula("p", &v).unwrap(), &v));
        assert!(!entails(
            &Theory::empty(),
            &parse_formula("p", &v).unwrap(),
            &v
        ));
        let t = Theory::parse(&["p -> q", "p"], &v).unwrap();
        assert!(entails(&t, &parse_formula("q", &v).unwrap(), &v));
    }

    #[test]
    fn modelset_canonical_order() {
        let space = 4;
        let mut all: Vec<ModelSet> = ModelSet::full(space).subsets().collect();
        let sorted = {
            let mut v = all.clone();
            v.sort();
            v
        };
        // Subset enumeration of the full space is already in canonical order.
        assert_eq!(all, sorted);
        // The order is the bitmask order: ∅, {0}, {1}, {0,1}, {2}, …
        assert_eq!(all.remove(0).members(), Vec::<usize>::new());
        assert_eq!(all[0].members(), vec![0]);
        assert_eq!(all[1].members(), vec![1]);
        assert_eq!(all[2].members(), vec![0, 1]);
        assert_eq!(all[3].members(), vec![2]);
    }

    #[test]
    fn domain_family_flags_full_powerset_without_empty() {
        let u = ModelSet::from_indices(4, &[0, 1, 2]).unwrap();
        let fam = DomainFamily::powerset_of(&u, false);
        let flags = fam.flags();
        // Modulo-∅ reading: {0} ∩ {1} = ∅ does not break intersection closure.
        assert!(flags.closed_under_finite_intersection);
        assert!(flags.closed_under_finite_union);
        assert!(flags.closed_under_complement);
        assert!(flags.closed_under_set_difference);
        assert!(flags.contains_singletons);
        assert!(fam.is_full_powerset());
        assert_eq!(fam.len(), 7);
    }

    #[test]
    fn domain_family_flags_partial() {
        let space = 4;
        let x = ModelSet::from_indices(space, &[0, 1, 2]).unwrap();
        let y = ModelSet::from_indices(space, &[0, 1, 3]).unwrap();
        let fam = DomainFamily::new(space, vec![x, y]).unwrap();
        let flags = fam.flags();
        // {0,1,2} ∩ {0,1,3} = {0,1} is missing and non-empty.
        assert!(!flags.closed_under_finite_intersection);
        assert!(!flags.closed_under_finite_union);
        assert!(!flags.contains_singletons);
    }

    #[test]
    fn def_closure_examples() {
        let space = 4;
        let fam = DomainFamily::new(
            space,
            vec![
                ModelSet::from_indices(space, &[0]).unwrap(),
                ModelSet::from_indices(space, &[0, 1]).unwrap(),
                ModelSet::from_indices(space, &[0, 1, 2]).unwrap(),
            ],
        )
        .unwrap();
        // Least member containing {1} is {0,1}.
        let a = ModelSet::from_indices(space, &[1]).unwrap();
        assert_eq!(def_closure(&fam, &a).unwrap().members(), vec![0, 1]);
        // A member is its own closure.
        let b = ModelSet::from_indices(space, &[0, 1]).unwrap();
        assert_eq!(def_closure(&fam, &b).unwrap(), b);
        // Nothing contains {3}.
        let c = ModelSet::from_indices(space, &[3]).unwrap();
        assert_eq!(def_closure(&fam, &c), Err(LogicError::NoEnclosingMember));
        // ∅ with ∅ in the family closes to ∅.
        let fam2 = DomainFamily::new(
            space,
            vec![
                ModelSet::empty(space),
                ModelSet::from_indices(space, &[0, 1]).unwrap(),
            ],
        )
        .unwrap();
        assert!(def_closure(&fam2, &ModelSet::empty(space)).unwrap().is_empty());
    }

    #[test]
    fn vocabulary_validation() {
        assert_eq!(Vocabulary::new(vec![]), Err(LogicError::EmptyVocabulary));
        assert_eq!(
            Vocabulary::new(vec!["p".into(), "p".into()]),
            Err(LogicError::DuplicateAtom("p".into()))
        );
        assert_eq!(
            Vocabulary::new(vec!["1p".into()]),
            Err(LogicError::InvalidAtomName("1p".into()))
        );
        assert_eq!(
            Vocabulary::new(vec!["true".into()]),
            Err(LogicError::InvalidAtomName("true".into()))
        );
        let too_many: Vec<String> = (0..17).map(|i| format!("a{i}")).collect();
        assert_eq!(
            Vocabulary::new(too_many),
            Err(LogicError::VocabularyTooLarge(17))
        );
    }
}
