//! Propositional syntax and semantics.
//!
//! Interpretations are encoded as bit strings in signature order: the leftmost bit belongs to
//! the lexicographically smallest atom, so over `(a, b, c)` the string `101` sets `a` and `c`.
//! Enumerations walk interpretations in ascending binary order of that encoding.

mod enumerate;
mod eval;
mod parse;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use enumerate::{
    cwa_interpretation, interpretation_at, models, models_with, satisfaction_sequence,
    satisfaction_sequence_with, CompiledKb,
};
pub use eval::{eval2, eval3};
pub use parse::{parse_formula, parse_kb};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("line {line}: {source}")]
    KbLine {
        line: usize,
        #[source]
        source: Box<LogicError>,
    },
    #[error("invalid atom name `{0}`")]
    InvalidAtom(String),
    #[error("atom `{0}` is not in the signature")]
    AtomNotInSignature(String),
    #[error("interpretation has {got} bits but the signature has {expected} atoms")]
    LengthMismatch { expected: usize, got: usize },
    #[error("signature has {atoms} atoms, cap is {cap}")]
    SignatureTooLarge { atoms: usize, cap: usize },
    #[error("knowledge base is inconsistent")]
    InconsistentKb,
    #[error("invalid bit string `{0}`")]
    InvalidBits(String),
}

/// A propositional atom. Names match `[a-zA-Z_][a-zA-Z0-9_]*`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Atom(String);

impl Atom {
    pub fn new(name: impl Into<String>) -> Result<Self, LogicError> {
        let name = name.into();
        if is_atom_name(&name) {
            Ok(Atom(name))
        } else {
            Err(LogicError::InvalidAtom(name))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

fn is_atom_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl TryFrom<String> for Atom {
    type Error = LogicError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        Atom::new(s)
    }
}

impl From<Atom> for String {
    fn from(a: Atom) -> String {
        a.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Ordered, duplicate-free list of atoms shared by both parties.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "Vec<Atom>", into = "Vec<Atom>")]
pub struct Signature {
    atoms: Vec<Atom>,
}

impl Signature {
    /// Sorts and deduplicates.
    pub fn new(atoms: impl IntoIterator<Item = Atom>) -> Self {
        let set: BTreeSet<Atom> = atoms.into_iter().collect();
        Signature {
            atoms: set.into_iter().collect(),
        }
    }

    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Self, LogicError> {
        let atoms = names
            .iter()
            .map(|n| Atom::new(n.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Signature::new(atoms))
    }

    /// Comma- or whitespace-separated atom names.
    pub fn parse_list(src: &str) -> Result<Self, LogicError> {
        let names: Vec<&str> = src
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        Signature::from_names(&names)
    }

    /// Atoms `x1..xn`; zero-padded so lexicographic order matches numeric order.
    pub fn numbered(n: usize) -> Self {
        let width = n.to_string().len();
        Signature::new((1..=n).map(|i| Atom(format!("x{i:0width$}"))))
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn index_of(&self, atom: &Atom) -> Option<usize> {
        self.atoms.binary_search(atom).ok()
    }

    pub fn contains(&self, other: &Signature) -> bool {
        other.atoms.iter().all(|a| self.index_of(a).is_some())
    }

    pub fn union(&self, other: &Signature) -> Signature {
        Signature::new(self.atoms.iter().chain(other.atoms.iter()).cloned())
    }

    /// Number of interpretations, 2^|At|.
    pub fn interpretation_count(&self) -> u64 {
        1u64 << self.atoms.len()
    }

    /// `SignatureTooLarge` when the signature has more than `cap` atoms.
    pub fn check_cap(&self, cap: usize) -> Result<(), LogicError> {
        if self.atoms.len() > cap {
            return Err(LogicError::SignatureTooLarge {
                atoms: self.atoms.len(),
                cap,
            });
        }
        Ok(())
    }
}

impl From<Vec<Atom>> for Signature {
    fn from(atoms: Vec<Atom>) -> Self {
        Signature::new(atoms)
    }
}

impl From<Signature> for Vec<Atom> {
    fn from(s: Signature) -> Self {
        s.atoms
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.atoms.iter().map(Atom::name).collect();
        write!(f, "({})", names.join(", "))
    }
}

/// Propositional formula. Implication is kept as syntax and evaluated as `!a | b`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Self {
        Formula::Atom(Atom::new(name).expect("valid atom name"))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Not(f) => f.collect_atoms(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Not(f) => 1 + f.depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    // Binding strength: higher binds tighter.
    fn precedence(&self) -> u8 {
        match self {
            Formula::Atom(_) | Formula::Not(_) => 4,
            Formula::And(..) => 3,
            Formula::Or(..) => 2,
            Formula::Implies(..) => 1,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, c: &Formula, parens: bool) -> fmt::Result {
            if parens {
                write!(f, "({c})")
            } else {
                write!(f, "{c}")
            }
        }
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(inner) => {
                f.write_str("!")?;
                child(f, inner, inner.precedence() < 4)
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                let p = self.precedence();
                let op = if matches!(self, Formula::And(..)) {
                    "&"
                } else {
                    "|"
                };
                // left-associative: a right child of equal precedence needs parentheses
                child(f, a, a.precedence() < p)?;
                write!(f, " {op} ")?;
                child(f, b, b.precedence() <= p)
            }
            Formula::Implies(a, b) => {
                child(f, a, a.precedence() <= 1)?;
                f.write_str(" -> ")?;
                child(f, b, b.precedence() < 1)
            }
        }
    }
}

impl FromStr for Formula {
    type Err = LogicError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}

/// Finite set of formulas; syntactically equal formulas collapse.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KnowledgeBase {
    formulas: BTreeSet<Formula>,
}

impl KnowledgeBase {
    pub fn new(formulas: impl IntoIterator<Item = Formula>) -> Self {
        KnowledgeBase {
            formulas: formulas.into_iter().collect(),
        }
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.formulas.iter()
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn insert(&mut self, f: Formula) -> bool {
        self.formulas.insert(f)
    }

    pub fn union(&self, other: &KnowledgeBase) -> KnowledgeBase {
        KnowledgeBase {
            formulas: self.formulas.union(&other.formulas).cloned().collect(),
        }
    }

    /// Sorted, deduplicated atoms occurring in the knowledge base.
    pub fn atoms(&self) -> Signature {
        let mut set = BTreeSet::new();
        for f in &self.formulas {
            f.collect_atoms(&mut set);
        }
        Signature {
            atoms: set.into_iter().collect(),
        }
    }
}

impl fmt::Display for KnowledgeBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for formula in &self.formulas {
            writeln!(f, "{formula}")?;
        }
        Ok(())
    }
}

impl FromIterator<Formula> for KnowledgeBase {
    fn from_iter<I: IntoIterator<Item = Formula>>(iter: I) -> Self {
        KnowledgeBase::new(iter)
    }
}

pub fn atoms_of(k: &KnowledgeBase) -> Signature {
    k.atoms()
}

/// Two-valued interpretation as a bit string in signature order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Interpretation {
    bits: Vec<bool>,
}

impl Interpretation {
    pub fn new(bits: Vec<bool>) -> Self {
        Interpretation { bits }
    }

    /// The row with binary value `index` over `n` atoms; first atom is the most significant bit.
    pub fn from_index(index: u64, n: usize) -> Self {
        Interpretation {
            bits: (0..n).map(|j| (index >> (n - 1 - j)) & 1 == 1).collect(),
        }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    /// Position in ascending binary order.
    pub fn index(&self) -> u64 {
        self.bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn check_len(&self, sig: &Signature) -> Result<(), LogicError> {
        if self.bits.len() != sig.len() {
            return Err(LogicError::LengthMismatch {
                expected: sig.len(),
                got: self.bits.len(),
            });
        }
        Ok(())
    }
}

impl FromStr for Interpretation {
    type Err = LogicError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(LogicError::InvalidBits(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Interpretation { bits })
    }
}

impl TryFrom<String> for Interpretation {
    type Error = LogicError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Interpretation> for String {
    fn from(w: Interpretation) -> String {
        w.to_string()
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Truth values of the three-valued logic, ordered `False < Both < True`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TriValue {
    False,
    Both,
    True,
}

impl TriValue {
    pub fn negate(self) -> Self {
        match self {
            TriValue::False => TriValue::True,
            TriValue::Both => TriValue::Both,
            TriValue::True => TriValue::False,
        }
    }

    /// `1` and `both` are designated.
    pub fn is_designated(self) -> bool {
        self != TriValue::False
    }
}

impl From<bool> for TriValue {
    fn from(b: bool) -> Self {
        if b {
            TriValue::True
        } else {
            TriValue::False
        }
    }
}

impl fmt::Display for TriValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TriValue::False => "0",
            TriValue::Both => "B",
            TriValue::True => "1",
        })
    }
}

/// Three-valued assignment, one value per signature atom in signature order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ThreeValuedInterpretation {
    values: Vec<TriValue>,
}

impl ThreeValuedInterpretation {
    pub fn new(values: Vec<TriValue>) -> Self {
        ThreeValuedInterpretation { values }
    }

    pub fn values(&self) -> &[TriValue] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn both_count(&self) -> usize {
        self.values.iter().filter(|&&v| v == TriValue::Both).count()
    }

    pub fn set(&mut self, i: usize, v: TriValue) {
        self.values[i] = v;
    }
}

impl From<&Interpretation> for ThreeValuedInterpretation {
    fn from(w: &Interpretation) -> Self {
        ThreeValuedInterpretation {
            values: w.bits.iter().map(|&b| TriValue::from(b)).collect(),
        }
    }
}

impl fmt::Display for ThreeValuedInterpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.values {
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// A satisfaction sequence: bit `i` tells whether row `i` satisfies a knowledge base.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitSequence {
    bits: Vec<bool>,
}

impl BitSequence {
    pub fn new(bits: Vec<bool>) -> Self {
        BitSequence { bits }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

impl FromStr for BitSequence {
    type Err = LogicError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let w: Interpretation = s.parse()?;
        Ok(BitSequence { bits: w.bits })
    }
}

impl fmt::Display for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atom_names() {
        assert!(Atom::new("banList").is_ok());
        assert!(Atom::new("_x9").is_ok());
        assert!(Atom::new("9x").is_err());
        assert!(Atom::new("").is_err());
        assert!(Atom::new("a-b").is_err());
    }

    #[test]
    fn signature_sorted_and_deduplicated() {
        let sig = Signature::from_names(&["c", "a", "b", "a"]).unwrap();
        assert_eq!(sig.to_string(), "(a, b, c)");
        // case-sensitive: uppercase sorts first
        let sig = Signature::from_names(&["b", "B"]).unwrap();
        assert_eq!(sig.atoms()[0].name(), "B");
    }

    #[test]
    fn numbered_signature_keeps_numeric_order() {
        let sig = Signature::numbered(12);
        assert_eq!(sig.atoms()[1].name(), "x02");
        assert_eq!(sig.atoms()[11].name(), "x12");
    }

    #[test]
    fn interpretation_encoding() {
        let w: Interpretation = "101".parse().unwrap();
        assert_eq!(w.index(), 5);
        assert_eq!(Interpretation::from_index(5, 3), w);
        assert_eq!(Interpretation::from_index(0, 3).to_string(), "000");
        assert!("10x".parse::<Interpretation>().is_err());
    }

    #[test]
    fn tri_order() {
        assert!(TriValue::False < TriValue::Both);
        assert!(TriValue::Both < TriValue::True);
        assert_eq!(TriValue::Both.negate(), TriValue::Both);
    }

    #[test]
    fn atoms_of_examples() {
        let k = parse_kb("a & b").unwrap();
        assert_eq!(atoms_of(&k), Signature::from_names(&["a", "b"]).unwrap());
        let kb = parse_kb("platinumStatus\nplatinumStatus -> creditWorthy\nbanList").unwrap();
        assert_eq!(
            atoms_of(&kb),
            Signature::from_names(&["banList", "creditWorthy", "platinumStatus"]).unwrap()
        );
        assert!(atoms_of(&KnowledgeBase::default()).is_empty());
    }
}
