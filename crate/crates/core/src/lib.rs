//! Grammar-driven storylet generation for a procedurally generated cave world.
//!
//! The crate is organized around five pieces:
//!
//! - [`grammar`]: a Tracery-style grammar engine with seeded random expansion
//!   and codon-driven (grammatical evolution) decoding.
//! - [`worldgen`]: a 2-D simplex-noise grid classified into environment tags,
//!   with entity placement and a text minimap.
//! - [`embedding`]: word vectors (skip-gram trained or loaded from file) and a
//!   mean-pooled cosine sentence similarity on `[0, 1]`.
//! - [`evolve`]: the novelty-search loop that evolves derivations, keeps a
//!   threshold-gated novelty archive and folds it back into a grammar.
//! - [`bundle`] and [`cli`]: persistence and the `storyvolve` command line.
//!
//! Data-parallel inner loops (population decoding, pairwise similarity) run on
//! rayon when the default `parallel` feature is enabled and fall back to plain
//! iterators otherwise. Results are identical either way.

pub mod bundle;
pub mod canonical;
pub mod cli;
pub mod embedding;
pub mod evolve;
pub mod exec;
pub mod grammar;
pub mod rng;
pub mod worldgen;

pub use embedding::EmbeddingModel;
pub use evolve::{EvolutionConfig, NoveltyArchive};
pub use grammar::{Grammar, Storylet};
pub use worldgen::WorldGrid;
