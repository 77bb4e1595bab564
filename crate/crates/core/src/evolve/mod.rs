//! Novelty-search grammatical evolution.
//!
//! Individuals are codon genomes decoded through a grammar into storylets.
//! Selection pressure is novelty alone: there is no fitness and no elitism,
//! and the threshold-gated [`NoveltyArchive`] is the search's memory and its
//! output.

mod archive;
mod novelty;
mod operators;

pub use archive::{ArchiveDocument, ArchiveError, ArchiveMember, NoveltyArchive};
pub use novelty::{novelty_score, population_diversity, population_diversity_with, NoveltyError};
pub use operators::{crossover, crossover_at, mutate, tournament, CrossoverError};

use crate::embedding::EmbeddingModel;
use crate::exec::Exec;
use crate::grammar::{check_feasibility, Alternative, CompatTable, Genome, Grammar, GrammarError, Storylet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub population_size: usize,
    pub generations: usize,
    /// Nearest neighbours averaged by the novelty score.
    pub k_neighbors: usize,
    /// Archive admission threshold on novelty.
    pub rho: f64,
    /// Per-codon resampling probability.
    pub mutation_rate: f64,
    pub crossover_rate: f64,
    pub tournament_size: usize,
    pub genome_length: usize,
    pub room_tag: String,
    pub seed: u64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            population_size: 100,
            generations: 50,
            k_neighbors: 15,
            rho: 0.30,
            mutation_rate: 0.05,
            crossover_rate: 0.9,
            tournament_size: 3,
            genome_length: 64,
            room_tag: "STREAM".into(),
            seed: 0,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<(), EvolveError> {
        let bad = |m: String| Err(EvolveError::InvalidConfig(m));
        if self.population_size < 2 {
            return bad(format!("population_size must be at least 2, got {}", self.population_size));
        }
        if self.k_neighbors < 1 {
            return bad("k_neighbors must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return bad(format!("rho must lie in [0, 1], got {}", self.rho));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return bad(format!("mutation_rate must lie in [0, 1], got {}", self.mutation_rate));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return bad(format!("crossover_rate must lie in [0, 1], got {}", self.crossover_rate));
        }
        if self.tournament_size < 1 {
            return bad("tournament_size must be at least 1".into());
        }
        if self.genome_length < 2 {
            return bad(format!("genome_length must be at least 2, got {}", self.genome_length));
        }
        Ok(())
    }
}

/// A genome and what it decoded to. Invalid mappings have no storylet;
/// infeasible and invalid individuals carry novelty 0 once evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genome: Genome,
    pub storylet: Option<Storylet>,
    pub feasible: bool,
    pub novelty: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvolveError {
    #[error("invalid evolution config: {0}")]
    InvalidConfig(String),
    #[error("grammar has no rule `{0}`")]
    UnknownSymbol(String),
    #[error("tag `{0}` is missing from the compatibility table")]
    UnknownTag(String),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error("archive is empty, nothing to export")]
    EmptyArchive,
}

/// Per-generation summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_novelty: f64,
    /// Over the whole population, infeasible individuals counting as 0.
    pub mean_novelty: f64,
    /// Mean pairwise similarity of the feasible storylets; `None` with fewer
    /// than two.
    pub diversity: Option<f64>,
    pub archive_size: usize,
    pub feasible: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionOutcome {
    pub archive: NoveltyArchive,
    pub telemetry: Vec<GenerationStats>,
    /// Generations in which no individual was feasible.
    pub infeasible_generations: Vec<usize>,
}

impl EvolutionOutcome {
    pub fn telemetry_csv(&self) -> String {
        telemetry_csv(&self.telemetry)
    }
}

pub fn telemetry_csv(stats: &[GenerationStats]) -> String {
    let mut out = String::from("generation,best_novelty,mean_novelty,diversity,archive_size\n");
    for s in stats {
        let diversity = s.diversity.map(|d| format!("{d:.6}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{:.6},{:.6},{},{}",
            s.generation, s.best_novelty, s.mean_novelty, diversity, s.archive_size
        );
    }
    out
}

/// Run novelty search over derivations of the grammar's start symbol.
pub fn evolve(
    grammar: &Grammar,
    cfg: &EvolutionConfig,
    model: &EmbeddingModel,
    compat: &CompatTable,
) -> Result<EvolutionOutcome, EvolveError> {
    evolve_with(grammar, cfg, model, compat, Exec::default())
}

/// [`evolve`] with an explicit execution strategy. The outcome does not
/// depend on `exec`.
pub fn evolve_with(
    grammar: &Grammar,
    cfg: &EvolutionConfig,
    model: &EmbeddingModel,
    compat: &CompatTable,
    exec: Exec,
) -> Result<EvolutionOutcome, EvolveError> {
    cfg.validate()?;
    let symbol = grammar.start_symbol();
    if !grammar.has_rule(symbol) {
        return Err(EvolveError::UnknownSymbol(symbol.to_string()));
    }
    if compat.allowed_rooms(&cfg.room_tag).is_none() {
        return Err(EvolveError::UnknownTag(cfg.room_tag.clone()));
    }
    if let Some(tag) = grammar
        .rules()
        .values()
        .flatten()
        .flat_map(|alt| alt.tags.iter())
        .find(|tag| compat.allowed_rooms(tag).is_none())
    {
        return Err(EvolveError::UnknownTag(tag.clone()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut genomes: Vec<Genome> = (0..cfg.population_size)
        .map(|_| Genome::new((0..cfg.genome_length).map(|_| rng.gen()).collect()).expect("genome_length >= 2"))
        .collect();
    let mut archive = NoveltyArchive::new(cfg.rho).map_err(|e| EvolveError::InvalidConfig(e.to_string()))?;
    let mut archive_vectors: Vec<Vec<f64>> = Vec::new();
    let mut telemetry = Vec::with_capacity(cfg.generations);
    let mut infeasible_generations = Vec::new();

    for generation in 0..cfg.generations {
        let decoded: Vec<(Option<Storylet>, bool, Option<Vec<f64>>)> =
            exec.map(&genomes, |genome| match grammar.decode(symbol, genome) {
                Ok(s) => {
                    let feasible =
                        check_feasibility(&s, &cfg.room_tag, compat).expect("tags checked against the table");
                    let vector = feasible.then(|| model.sentence_vector(&s.text));
                    (Some(s), feasible, vector)
                }
                Err(_) => (None, false, None),
            });
        let vectors: Vec<Option<Vec<f64>>> = decoded.iter().map(|d| d.2.clone()).collect();
        let scores = novelty::score_vectors(&vectors, &archive_vectors, cfg.k_neighbors, exec);

        let population: Vec<Individual> = genomes
            .iter()
            .zip(decoded)
            .zip(&scores)
            .map(|((genome, (storylet, feasible, _)), &novelty)| Individual {
                genome: genome.clone(),
                storylet,
                feasible,
                novelty: Some(novelty),
            })
            .collect();

        // serialized admission, in population order
        for (individual, vector) in population.iter().zip(&vectors) {
            if archive.try_insert(individual, generation) {
                archive_vectors.push(vector.clone().expect("admitted individuals are feasible"));
            }
        }

        let feasible_vectors: Vec<Vec<f64>> = vectors.into_iter().flatten().collect();
        if feasible_vectors.is_empty() {
            infeasible_generations.push(generation);
        }
        telemetry.push(GenerationStats {
            generation,
            best_novelty: scores.iter().cloned().fold(0.0, f64::max),
            mean_novelty: scores.iter().sum::<f64>() / scores.len() as f64,
            diversity: novelty::pairwise_mean_similarity(&feasible_vectors, exec),
            archive_size: archive.len(),
            feasible: feasible_vectors.len(),
        });

        if generation + 1 < cfg.generations {
            genomes = next_generation(&population, &scores, cfg, &mut rng);
        }
    }

    Ok(EvolutionOutcome { archive, telemetry, infeasible_generations })
}

fn next_generation(
    population: &[Individual],
    scores: &[f64],
    cfg: &EvolutionConfig,
    rng: &mut ChaCha8Rng,
) -> Vec<Genome> {
    let mut next = Vec::with_capacity(cfg.population_size);
    while next.len() < cfg.population_size {
        let a = &population[tournament(scores, cfg.tournament_size, rng)].genome;
        let b = &population[tournament(scores, cfg.tournament_size, rng)].genome;
        let (x, y) = if rng.gen_bool(cfg.crossover_rate) {
            crossover(a, b, rng).expect("population genomes share a length >= 2")
        } else {
            (a.clone(), b.clone())
        };
        next.push(mutate(&x, cfg.mutation_rate, rng));
        if next.len() < cfg.population_size {
            next.push(mutate(&y, cfg.mutation_rate, rng));
        }
    }
    next
}

/// Copy of `base` whose `target_symbol` rule lists the archive texts as
/// literal alternatives (with their tags), in archive order.
pub fn export_augmented_grammar(
    base: &Grammar,
    archive: &NoveltyArchive,
    target_symbol: &str,
) -> Result<Grammar, EvolveError> {
    if archive.is_empty() {
        return Err(EvolveError::EmptyArchive);
    }
    let alternatives = archive
        .members()
        .iter()
        .map(|m| Alternative::literal(m.text.clone(), m.tags.iter().cloned().collect::<BTreeSet<_>>()))
        .collect();
    Ok(base.with_rule(target_symbol, alternatives)?)
}
