//! The threshold-gated novelty archive.

use super::{EvolutionConfig, Individual};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashSet};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveMember {
    pub text: String,
    pub tags: BTreeSet<String>,
    /// Novelty at the moment of insertion.
    pub novelty: f64,
    pub generation: usize,
}

/// Insertion-ordered archive. Every member scored at least `rho` when it was
/// inserted and no two members share a text.
#[derive(Debug, Clone, PartialEq)]
pub struct NoveltyArchive {
    rho: f64,
    members: Vec<ArchiveMember>,
    texts: HashSet<String>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ArchiveError {
    #[error("invalid archive document: {0}")]
    Document(String),
    #[error("threshold {0} outside [0, 1]")]
    InvalidThreshold(f64),
    #[error("member `{text}` has novelty {novelty} below the threshold {rho}")]
    BelowThreshold { text: String, novelty: f64, rho: f64 },
    #[error("duplicate member text `{0}`")]
    DuplicateText(String),
}

impl NoveltyArchive {
    pub fn new(rho: f64) -> Result<Self, ArchiveError> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(ArchiveError::InvalidThreshold(rho));
        }
        Ok(Self { rho, members: Vec::new(), texts: HashSet::new() })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn members(&self) -> &[ArchiveMember] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains_text(&self, text: &str) -> bool {
        self.texts.contains(text)
    }

    /// Insert iff the individual is feasible, scored at least `rho`, and its
    /// text is new. Returns whether it went in.
    pub fn try_insert(&mut self, individual: &Individual, generation: usize) -> bool {
        let (Some(storylet), Some(novelty)) = (&individual.storylet, individual.novelty) else {
            return false;
        };
        if !individual.feasible || novelty < self.rho || self.texts.contains(&storylet.text) {
            return false;
        }
        self.texts.insert(storylet.text.clone());
        self.members.push(ArchiveMember {
            text: storylet.text.clone(),
            tags: storylet.tags.clone(),
            novelty,
            generation,
        });
        true
    }

    fn push_checked(&mut self, member: ArchiveMember) -> Result<(), ArchiveError> {
        if member.novelty < self.rho {
            return Err(ArchiveError::BelowThreshold { text: member.text, novelty: member.novelty, rho: self.rho });
        }
        if !self.texts.insert(member.text.clone()) {
            return Err(ArchiveError::DuplicateText(member.text));
        }
        self.members.push(member);
        Ok(())
    }

    /// Canonical archive document, with the run's configuration echoed when
    /// given.
    pub fn to_json(&self, config: Option<&EvolutionConfig>) -> String {
        crate::canonical::to_string(&self.to_document(config)).expect("archives always serialize")
    }

    pub fn to_document(&self, config: Option<&EvolutionConfig>) -> ArchiveDocument {
        ArchiveDocument { rho: self.rho, config: config.cloned(), members: self.members.clone() }
    }

    /// Load an archive document, re-checking the threshold and distinctness
    /// invariants.
    pub fn from_json(source: &str) -> Result<(Self, Option<EvolutionConfig>), ArchiveError> {
        let doc: ArchiveDocument = serde_json::from_str(source).map_err(|e| ArchiveError::Document(e.to_string()))?;
        Self::from_document(doc)
    }

    pub fn from_document(doc: ArchiveDocument) -> Result<(Self, Option<EvolutionConfig>), ArchiveError> {
        let mut archive = Self::new(doc.rho)?;
        for member in doc.members {
            archive.push_checked(member)?;
        }
        Ok((archive, doc.config))
    }
}

/// On-disk archive: threshold, optional echo of the run's configuration and
/// the members in insertion order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveDocument {
    pub rho: f64,
    #[serde(default)]
    pub config: Option<EvolutionConfig>,
    pub members: Vec<ArchiveMember>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{Genome, Storylet};

    fn evaluated(text: &str, novelty: f64) -> Individual {
        Individual {
            genome: Genome::new(vec![0]).unwrap(),
            storylet: Some(Storylet { text: text.into(), tags: BTreeSet::new(), derivation_choices: vec![] }),
            feasible: true,
            novelty: Some(novelty),
        }
    }

    #[test]
    fn threshold_gate() {
        let mut archive = NoveltyArchive::new(0.30).unwrap();
        assert!(archive.try_insert(&evaluated("new", 0.31), 0));
        assert!(!archive.try_insert(&evaluated("other", 0.29), 0));
        assert!(archive.try_insert(&evaluated("edge", 0.30), 1));
        assert_eq!(archive.len(), 2);
    }

    #[test]
    fn duplicates_rejected() {
        let mut archive = NoveltyArchive::new(0.30).unwrap();
        assert!(archive.try_insert(&evaluated("same", 0.5), 0));
        assert!(!archive.try_insert(&evaluated("same", 0.9), 3));
        assert_eq!(archive.members()[0].novelty, 0.5);
    }

    #[test]
    fn infeasible_and_unevaluated_rejected() {
        let mut archive = NoveltyArchive::new(0.0).unwrap();
        let mut infeasible = evaluated("x", 1.0);
        infeasible.feasible = false;
        assert!(!archive.try_insert(&infeasible, 0));
        let mut unscored = evaluated("y", 1.0);
        unscored.novelty = None;
        assert!(!archive.try_insert(&unscored, 0));
        let mut invalid = evaluated("z", 1.0);
        invalid.storylet = None;
        assert!(!archive.try_insert(&invalid, 0));
        assert!(archive.is_empty());
    }

    #[test]
    fn rho_must_be_a_probability() {
        assert!(NoveltyArchive::new(1.01).is_err());
        assert!(NoveltyArchive::new(-0.1).is_err());
        assert!(NoveltyArchive::new(f64::NAN).is_err());
    }

    #[test]
    fn document_round_trip_and_validation() {
        let mut archive = NoveltyArchive::new(0.25).unwrap();
        archive.try_insert(&evaluated("a stream gurgles", 0.6), 0);
        archive.try_insert(&evaluated("mist hangs", 1.0 / 3.0), 4);
        let text = archive.to_json(None);
        let (back, config) = NoveltyArchive::from_json(&text).unwrap();
        assert!(config.is_none());
        assert_eq!(back.len(), 2);
        assert_eq!(back.members()[1].generation, 4);
        assert_eq!(back.to_json(None), text);

        let dup = r#"{"rho":0.1,"members":[{"text":"a","tags":[],"novelty":0.5,"generation":0},{"text":"a","tags":[],"novelty":0.5,"generation":1}]}"#;
        assert!(matches!(NoveltyArchive::from_json(dup), Err(ArchiveError::DuplicateText(_))));
        let low = r#"{"rho":0.6,"members":[{"text":"a","tags":[],"novelty":0.5,"generation":0}]}"#;
        assert!(matches!(NoveltyArchive::from_json(low), Err(ArchiveError::BelowThreshold { .. })));
    }
}
