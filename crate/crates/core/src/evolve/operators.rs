//! Variation and selection operators over codon genomes.

use crate::grammar::Genome;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum CrossoverError {
    #[error("parents differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("parents need at least two codons, got {0}")]
    TooShort(usize),
}

/// Replace each codon with a fresh uniform `u32` with probability `rate`.
pub fn mutate<R: Rng + ?Sized>(genome: &Genome, rate: f64, rng: &mut R) -> Genome {
    let codons =
        genome.codons().iter().map(|&c| if rng.gen_bool(rate.clamp(0.0, 1.0)) { rng.gen() } else { c }).collect();
    Genome::new(codons).expect("length is preserved")
}

/// Single-point crossover at a uniform cut in `1..len`.
pub fn crossover<R: Rng + ?Sized>(a: &Genome, b: &Genome, rng: &mut R) -> Result<(Genome, Genome), CrossoverError> {
    check_parents(a, b)?;
    let cut = rng.gen_range(1..a.len());
    crossover_at(a, b, cut)
}

/// Children `a[..cut] + b[cut..]` and `b[..cut] + a[cut..]`.
pub fn crossover_at(a: &Genome, b: &Genome, cut: usize) -> Result<(Genome, Genome), CrossoverError> {
    check_parents(a, b)?;
    let (a, b) = (a.codons(), b.codons());
    let cut = cut.clamp(1, a.len() - 1);
    let first = [&a[..cut], &b[cut..]].concat();
    let second = [&b[..cut], &a[cut..]].concat();
    Ok((Genome::new(first).expect("non-empty"), Genome::new(second).expect("non-empty")))
}

fn check_parents(a: &Genome, b: &Genome) -> Result<(), CrossoverError> {
    if a.len() != b.len() {
        return Err(CrossoverError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(CrossoverError::TooShort(a.len()));
    }
    Ok(())
}

/// Draw `size` contestants with replacement and return the index of the one
/// with the highest score (earliest draw wins ties).
pub fn tournament<R: Rng + ?Sized>(scores: &[f64], size: usize, rng: &mut R) -> usize {
    let mut best = rng.gen_range(0..scores.len());
    for _ in 1..size {
        let challenger = rng.gen_range(0..scores.len());
        if scores[challenger] > scores[best] {
            best = challenger;
        }
    }
    best
}
