//! Derivation: seeded random expansion, codon decoding and forced replay.
//!
//! All three share one depth-first, left-to-right traversal and differ only in
//! how a choice point picks an alternative.

use super::{Alternative, Genome, Grammar, ModifierError, Part, Storylet, SymbolRef};
use crate::rng::SplitMix64;
use std::collections::{BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeriveLimits {
    /// Deepest allowed nesting of rule expansions; the start symbol is depth 1.
    pub max_depth: usize,
    /// How many times codon decoding may restart from the first codon.
    pub max_wraps: usize,
}

impl Default for DeriveLimits {
    fn default() -> Self {
        Self { max_depth: 32, max_wraps: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpandError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("derivation deeper than {max_depth} levels (runaway recursion?)")]
    DepthExceeded { max_depth: usize },
    #[error("in `{symbol}`: {source}")]
    Modifier {
        symbol: String,
        #[source]
        source: ModifierError,
    },
    #[error("replay diverged at choice {index}: {reason}")]
    ReplayMismatch { index: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MappingFailure {
    WrapsExceeded { max_wraps: usize },
    Expand(ExpandError),
}

/// The genome does not map to a complete storylet; the individual is
/// infeasible.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid genotype mapping: {}", match &.0 {
    MappingFailure::WrapsExceeded { max_wraps } => format!("codons exhausted after {max_wraps} wraps"),
    MappingFailure::Expand(e) => e.to_string(),
})]
pub struct InvalidMapping(pub MappingFailure);

enum Halt {
    Wraps { max_wraps: usize },
    Expand(ExpandError),
}

impl From<ExpandError> for Halt {
    fn from(e: ExpandError) -> Self {
        Halt::Expand(e)
    }
}

trait ChoiceSource {
    fn choose(&mut self, symbol: &str, n: usize) -> Result<usize, Halt>;
}

struct Seeded(SplitMix64);

impl ChoiceSource for Seeded {
    fn choose(&mut self, _symbol: &str, n: usize) -> Result<usize, Halt> {
        Ok(self.0.below(n))
    }
}

struct Codons<'a> {
    codons: &'a [u32],
    cursor: usize,
    wraps: usize,
    max_wraps: usize,
}

impl ChoiceSource for Codons<'_> {
    // Every choice point consumes a codon, including single-alternative ones.
    fn choose(&mut self, _symbol: &str, n: usize) -> Result<usize, Halt> {
        if self.cursor == self.codons.len() {
            self.wraps += 1;
            if self.wraps > self.max_wraps {
                return Err(Halt::Wraps { max_wraps: self.max_wraps });
            }
            self.cursor = 0;
        }
        let codon = self.codons[self.cursor];
        self.cursor += 1;
        Ok((codon as usize) % n)
    }
}

struct Forced<'a> {
    choices: &'a [(String, usize)],
    next: usize,
}

impl ChoiceSource for Forced<'_> {
    fn choose(&mut self, symbol: &str, n: usize) -> Result<usize, Halt> {
        let index = self.next;
        let mismatch = |reason: String| Halt::Expand(ExpandError::ReplayMismatch { index, reason });
        let (expected, alt) =
            self.choices.get(index).ok_or_else(|| mismatch(format!("no recorded choice for `{symbol}`")))?;
        if expected != symbol {
            return Err(mismatch(format!("expected `{expected}`, derivation reached `{symbol}`")));
        }
        if *alt >= n {
            return Err(mismatch(format!("`{symbol}` has {n} alternatives, recorded index {alt}")));
        }
        self.next += 1;
        Ok(*alt)
    }
}

struct Derivation<'g, S> {
    grammar: &'g Grammar,
    source: S,
    max_depth: usize,
    bindings: HashMap<String, String>,
    tags: BTreeSet<String>,
    choices: Vec<(String, usize)>,
}

impl<'g, S: ChoiceSource> Derivation<'g, S> {
    fn new(grammar: &'g Grammar, source: S, limits: &DeriveLimits) -> Self {
        Self {
            grammar,
            source,
            max_depth: limits.max_depth,
            bindings: HashMap::new(),
            tags: BTreeSet::new(),
            choices: Vec::new(),
        }
    }

    fn run(mut self, symbol: &str) -> Result<Storylet, Halt> {
        let text = self.symbol(&SymbolRef::new(symbol, Vec::new()), 1)?;
        Ok(Storylet { text, tags: self.tags, derivation_choices: self.choices })
    }

    fn symbol(&mut self, sref: &SymbolRef, depth: usize) -> Result<String, Halt> {
        // Bindings shadow same-named rules.
        let raw = if let Some(frozen) = self.bindings.get(&sref.name) {
            frozen.clone()
        } else {
            let alternatives =
                self.grammar.rule(&sref.name).ok_or_else(|| ExpandError::UnknownSymbol(sref.name.clone()))?;
            if depth > self.max_depth {
                return Err(ExpandError::DepthExceeded { max_depth: self.max_depth }.into());
            }
            let index = self.source.choose(&sref.name, alternatives.len())?;
            self.choices.push((sref.name.clone(), index));
            self.alternative(&alternatives[index], depth)?
        };
        sref.modifiers.iter().try_fold(raw, |text, m| {
            m.apply(&text).map_err(|source| ExpandError::Modifier { symbol: sref.name.clone(), source }.into())
        })
    }

    fn alternative(&mut self, alt: &Alternative, depth: usize) -> Result<String, Halt> {
        self.tags.extend(alt.tags.iter().cloned());
        let mut out = String::new();
        for part in &alt.parts {
            match part {
                Part::Literal(text) => out.push_str(text),
                Part::Symbol(sref) => out.push_str(&self.symbol(sref, depth + 1)?),
                Part::Binding { name, inner } => {
                    let frozen = self.symbol(inner, depth + 1)?;
                    self.bindings.insert(name.clone(), frozen);
                }
            }
        }
        Ok(out)
    }
}

fn expand_only(result: Result<Storylet, Halt>) -> Result<Storylet, ExpandError> {
    result.map_err(|halt| match halt {
        Halt::Expand(e) => e,
        Halt::Wraps { .. } => unreachable!("only codon decoding wraps"),
    })
}

impl Grammar {
    /// Expand `symbol` with alternatives drawn from a SplitMix64 stream
    /// seeded with `seed`. One draw per choice point, `draw % n`.
    pub fn expand(&self, symbol: &str, seed: u64) -> Result<Storylet, ExpandError> {
        self.expand_with(symbol, seed, &DeriveLimits::default())
    }

    pub fn expand_with(&self, symbol: &str, seed: u64, limits: &DeriveLimits) -> Result<Storylet, ExpandError> {
        expand_only(Derivation::new(self, Seeded(SplitMix64::new(seed)), limits).run(symbol))
    }

    /// Grammatical-evolution mapping: choice point with `n` alternatives takes
    /// `codon % n`, the cursor advances once per choice point and wraps to the
    /// first codon at most `max_wraps` times.
    pub fn decode(&self, symbol: &str, genome: &Genome) -> Result<Storylet, InvalidMapping> {
        self.decode_with(symbol, genome, &DeriveLimits::default())
    }

    pub fn decode_with(
        &self,
        symbol: &str,
        genome: &Genome,
        limits: &DeriveLimits,
    ) -> Result<Storylet, InvalidMapping> {
        let source = Codons { codons: genome.codons(), cursor: 0, wraps: 0, max_wraps: limits.max_wraps };
        Derivation::new(self, source, limits).run(symbol).map_err(|halt| {
            InvalidMapping(match halt {
                Halt::Wraps { max_wraps } => MappingFailure::WrapsExceeded { max_wraps },
                Halt::Expand(e) => MappingFailure::Expand(e),
            })
        })
    }

    /// Re-run a derivation with every choice forced from `choices`.
    pub fn replay(&self, symbol: &str, choices: &[(String, usize)]) -> Result<Storylet, ExpandError> {
        let limits = DeriveLimits { max_depth: usize::MAX, ..DeriveLimits::default() };
        let storylet = expand_only(Derivation::new(self, Forced { choices, next: 0 }, &limits).run(symbol))?;
        if storylet.derivation_choices.len() != choices.len() {
            return Err(ExpandError::ReplayMismatch {
                index: storylet.derivation_choices.len(),
                reason: "recorded choices left over".into(),
            });
        }
        Ok(storylet)
    }
}
