//! Tracery-style grammars: parsing, serialization and derivation.
//!
//! A grammar document is a JSON object mapping rule names to arrays of
//! alternative strings. Inside an alternative:
//!
//! - `#name#` references a rule (or an earlier binding),
//! - `#name.a.capitalize#` applies a modifier chain, left to right,
//! - `[place:#path#]` expands `path` once and binds the frozen text to `place`
//!   for the rest of the derivation (the binding itself emits nothing),
//! - a trailing `@TAG1,TAG2` attaches feasibility tags to the alternative,
//! - `\` escapes the next character (`\#`, `\[`, `\]`, `\@`, `\\`).
//!
//! Modifiers are only recognized inside the `#...#` delimiters.

mod derive;
mod feasibility;
mod modifier;

pub use derive::{DeriveLimits, ExpandError, InvalidMapping, MappingFailure};
pub use feasibility::{check_feasibility, CompatTable, UnknownTag};
pub use modifier::{apply_modifier, Modifier, ModifierError};

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use thiserror::Error;

/// The serialized form: rule name to alternative strings, keys sorted.
pub type GrammarDocument = BTreeMap<String, Vec<String>>;

pub const DEFAULT_START_SYMBOL: &str = "origin";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolRef {
    pub name: String,
    pub modifiers: Vec<Modifier>,
}

impl SymbolRef {
    pub fn new(name: impl Into<String>, modifiers: Vec<Modifier>) -> Self {
        Self { name: name.into(), modifiers }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Part {
    Literal(String),
    Symbol(SymbolRef),
    Binding { name: String, inner: SymbolRef },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Alternative {
    pub parts: Vec<Part>,
    pub tags: BTreeSet<String>,
}

impl Alternative {
    /// A single literal alternative. `text` is taken verbatim.
    pub fn literal(text: impl Into<String>, tags: BTreeSet<String>) -> Self {
        let text = text.into();
        let parts = if text.is_empty() { Vec::new() } else { vec![Part::Literal(text)] };
        Self { parts, tags }
    }

    /// Concatenated literal text, when the alternative has no references.
    pub fn as_literal(&self) -> Option<String> {
        self.parts.iter().try_fold(String::new(), |mut acc, part| match part {
            Part::Literal(text) => {
                acc.push_str(text);
                Some(acc)
            }
            _ => None,
        })
    }

    fn symbol_refs(&self) -> impl Iterator<Item = &SymbolRef> {
        self.parts.iter().filter_map(|part| match part {
            Part::Literal(_) => None,
            Part::Symbol(sref) => Some(sref),
            Part::Binding { inner, .. } => Some(inner),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("invalid grammar document at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("rule `{rule}`, alternative {alternative}, offset {offset}: {message}")]
    Syntax { rule: String, alternative: usize, offset: usize, message: String },
    #[error("invalid symbol name `{0}`")]
    InvalidSymbolName(String),
    #[error("rule `{0}` has no alternatives")]
    EmptyRule(String),
    #[error("dangling symbol references: {}", .0.join(", "))]
    DanglingSymbols(Vec<String>),
}

/// A parsed grammar. Immutable once built; share it freely across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    rules: BTreeMap<String, Vec<Alternative>>,
    start_symbol: String,
}

impl Grammar {
    /// Parse a JSON grammar document.
    pub fn parse(source: &str) -> Result<Self, GrammarError> {
        let doc: GrammarDocument = serde_json::from_str(source).map_err(|e| GrammarError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::from_document(&doc)
    }

    pub fn from_document(doc: &GrammarDocument) -> Result<Self, GrammarError> {
        let mut rules = BTreeMap::new();
        for (name, alternatives) in doc {
            let parsed = alternatives
                .iter()
                .enumerate()
                .map(|(i, text)| parse_alternative(text, name, i))
                .collect::<Result<Vec<_>, _>>()?;
            rules.insert(name.clone(), parsed);
        }
        Self::from_rules(rules)
    }

    /// Build from already-parsed rules, validating names, non-empty rules and
    /// reference resolution.
    pub fn from_rules(rules: BTreeMap<String, Vec<Alternative>>) -> Result<Self, GrammarError> {
        for (name, alternatives) in &rules {
            if !valid_symbol_name(name) {
                return Err(GrammarError::InvalidSymbolName(name.clone()));
            }
            if alternatives.is_empty() {
                return Err(GrammarError::EmptyRule(name.clone()));
            }
        }
        let grammar = Self { rules, start_symbol: DEFAULT_START_SYMBOL.to_string() };
        let dangling = grammar.dangling_symbols();
        if !dangling.is_empty() {
            return Err(GrammarError::DanglingSymbols(dangling));
        }
        Ok(grammar)
    }

    pub fn with_start_symbol(mut self, symbol: impl Into<String>) -> Self {
        self.start_symbol = symbol.into();
        self
    }

    pub fn start_symbol(&self) -> &str {
        &self.start_symbol
    }

    pub fn rules(&self) -> &BTreeMap<String, Vec<Alternative>> {
        &self.rules
    }

    pub fn rule(&self, name: &str) -> Option<&[Alternative]> {
        self.rules.get(name).map(Vec::as_slice)
    }

    pub fn has_rule(&self, name: &str) -> bool {
        self.rules.contains_key(name)
    }

    /// Names referenced somewhere that are neither rules nor bound anywhere
    /// in the grammar. Sorted, deduplicated.
    fn dangling_symbols(&self) -> Vec<String> {
        let bound: BTreeSet<&str> = self
            .rules
            .values()
            .flatten()
            .flat_map(|alt| alt.parts.iter())
            .filter_map(|part| match part {
                Part::Binding { name, .. } => Some(name.as_str()),
                _ => None,
            })
            .collect();
        let dangling: BTreeSet<String> = self
            .rules
            .values()
            .flatten()
            .flat_map(Alternative::symbol_refs)
            .filter(|sref| !self.rules.contains_key(&sref.name) && !bound.contains(sref.name.as_str()))
            .map(|sref| sref.name.clone())
            .collect();
        dangling.into_iter().collect()
    }

    /// A copy with `symbol`'s alternatives replaced (or the rule added).
    pub fn with_rule(&self, symbol: &str, alternatives: Vec<Alternative>) -> Result<Self, GrammarError> {
        let mut rules = self.rules.clone();
        rules.insert(symbol.to_string(), alternatives);
        Ok(Self::from_rules(rules)?.with_start_symbol(self.start_symbol.clone()))
    }

    pub fn to_document(&self) -> GrammarDocument {
        self.rules.iter().map(|(name, alts)| (name.clone(), alts.iter().map(format_alternative).collect())).collect()
    }

    /// Canonical JSON text of [`Grammar::to_document`].
    pub fn to_json(&self) -> String {
        crate::canonical::to_string(&self.to_document()).expect("grammar documents always serialize")
    }
}

/// Non-empty, and free of `#`, whitespace and the characters the alternative
/// syntax reserves (`.`, `[`, `]`, `:`, `@`, `\`).
pub fn valid_symbol_name(name: &str) -> bool {
    !name.is_empty()
        && !name.chars().any(|c| c.is_whitespace() || matches!(c, '#' | '.' | '[' | ']' | ':' | '@' | '\\'))
}

fn valid_tag(tag: &str) -> bool {
    !tag.is_empty() && tag.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '-')
}

struct AltParser<'a> {
    chars: Vec<char>,
    pos: usize,
    rule: &'a str,
    alternative: usize,
}

impl AltParser<'_> {
    fn error(&self, offset: usize, message: impl Into<String>) -> GrammarError {
        GrammarError::Syntax {
            rule: self.rule.to_string(),
            alternative: self.alternative,
            offset,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    /// Parses `#name.mod...#`; the cursor sits on the opening `#`.
    fn symbol_ref(&mut self) -> Result<SymbolRef, GrammarError> {
        let open = self.pos;
        self.pos += 1;
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c == '#' {
                break;
            }
            self.pos += 1;
        }
        if self.peek() != Some('#') {
            return Err(self.error(open, "unterminated `#` reference"));
        }
        let body: String = self.chars[start..self.pos].iter().collect();
        self.pos += 1;
        let mut pieces = body.split('.');
        let name = pieces.next().unwrap_or_default();
        if !valid_symbol_name(name) {
            return Err(self.error(start, format!("invalid symbol name `{name}`")));
        }
        let modifiers = pieces
            .map(|m| m.parse::<Modifier>().map_err(|e| self.error(start, e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SymbolRef::new(name, modifiers))
    }

    /// Parses `[name:#sym#]`; the cursor sits on `[`.
    fn binding(&mut self) -> Result<Part, GrammarError> {
        let open = self.pos;
        self.pos += 1;
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c == ':' || c == ']' {
                break;
            }
            self.pos += 1;
        }
        if self.peek() != Some(':') {
            return Err(self.error(open, "binding must have the form `[name:#symbol#]`"));
        }
        let name: String = self.chars[start..self.pos].iter().collect();
        if !valid_symbol_name(&name) {
            return Err(self.error(start, format!("invalid binding name `{name}`")));
        }
        self.pos += 1;
        if self.peek() != Some('#') {
            return Err(self.error(self.pos, "binding value must be a single `#symbol#` reference"));
        }
        let inner = self.symbol_ref()?;
        if self.peek() != Some(']') {
            return Err(self.error(self.pos, "expected `]` to close binding"));
        }
        self.pos += 1;
        Ok(Part::Binding { name, inner })
    }

    fn tags(&mut self) -> Result<BTreeSet<String>, GrammarError> {
        let start = self.pos + 1;
        let rest: String = self.chars[start..].iter().collect();
        self.pos = self.chars.len();
        let mut tags = BTreeSet::new();
        for tag in rest.split(',') {
            if !valid_tag(tag) {
                return Err(self.error(start, format!("invalid tag `{tag}`")));
            }
            tags.insert(tag.to_string());
        }
        Ok(tags)
    }

    fn parse(mut self) -> Result<Alternative, GrammarError> {
        let mut parts = Vec::new();
        let mut literal = String::new();
        let mut tags = BTreeSet::new();
        let flush = |literal: &mut String, parts: &mut Vec<Part>| {
            if !literal.is_empty() {
                parts.push(Part::Literal(std::mem::take(literal)));
            }
        };
        while let Some(c) = self.peek() {
            match c {
                '\\' => {
                    let escaped = self
                        .chars
                        .get(self.pos + 1)
                        .copied()
                        .ok_or_else(|| self.error(self.pos, "dangling escape at end of alternative"))?;
                    literal.push(escaped);
                    self.pos += 2;
                }
                '#' => {
                    flush(&mut literal, &mut parts);
                    parts.push(Part::Symbol(self.symbol_ref()?));
                }
                '[' => {
                    flush(&mut literal, &mut parts);
                    parts.push(self.binding()?);
                }
                ']' => return Err(self.error(self.pos, "unmatched `]`")),
                '@' => tags = self.tags()?,
                _ => {
                    literal.push(c);
                    self.pos += 1;
                }
            }
        }
        flush(&mut literal, &mut parts);
        Ok(Alternative { parts, tags })
    }
}

fn parse_alternative(text: &str, rule: &str, alternative: usize) -> Result<Alternative, GrammarError> {
    AltParser { chars: text.chars().collect(), pos: 0, rule, alternative }.parse()
}

fn escape_literal(text: &str, out: &mut String) {
    for c in text.chars() {
        if matches!(c, '\\' | '#' | '[' | ']' | '@') {
            out.push('\\');
        }
        out.push(c);
    }
}

fn format_symbol_ref(sref: &SymbolRef, out: &mut String) {
    out.push('#');
    out.push_str(&sref.name);
    for m in &sref.modifiers {
        let _ = write!(out, ".{m}");
    }
    out.push('#');
}

/// Inverse of alternative parsing.
pub fn format_alternative(alt: &Alternative) -> String {
    let mut out = String::new();
    for part in &alt.parts {
        match part {
            Part::Literal(text) => escape_literal(text, &mut out),
            Part::Symbol(sref) => format_symbol_ref(sref, &mut out),
            Part::Binding { name, inner } => {
                let _ = write!(out, "[{name}:");
                format_symbol_ref(inner, &mut out);
                out.push(']');
            }
        }
    }
    if !alt.tags.is_empty() {
        out.push('@');
        out.push_str(&alt.tags.iter().cloned().collect::<Vec<_>>().join(","));
    }
    out
}

/// A codon genome for grammatical-evolution decoding. Never empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Genome(Vec<u32>);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("a genome needs at least one codon")]
pub struct EmptyGenome;

impl Genome {
    pub fn new(codons: Vec<u32>) -> Result<Self, EmptyGenome> {
        if codons.is_empty() {
            Err(EmptyGenome)
        } else {
            Ok(Self(codons))
        }
    }

    pub fn codons(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn into_codons(self) -> Vec<u32> {
        self.0
    }
}

impl TryFrom<Vec<u32>> for Genome {
    type Error = EmptyGenome;

    fn try_from(codons: Vec<u32>) -> Result<Self, Self::Error> {
        Genome::new(codons)
    }
}

impl From<Genome> for Vec<u32> {
    fn from(genome: Genome) -> Self {
        genome.0
    }
}

/// One derivation's output: the expanded text, the union of tags of every
/// alternative used, and the (symbol, alternative index) choices in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Storylet {
    pub text: String,
    pub tags: BTreeSet<String>,
    pub derivation_choices: Vec<(String, usize)>,
}
