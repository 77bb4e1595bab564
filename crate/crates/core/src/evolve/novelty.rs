//! Novelty (sparseness) and population diversity.
//!
//! Novelty of a candidate is the mean dissimilarity `1 - similarity` to its
//! `k` nearest other storylets in population and archive. Population
//! diversity is the mean similarity over all unordered pairs, reported as
//! telemetry (lower means more diverse).

use super::{Individual, NoveltyArchive};
use crate::embedding::{vector_similarity, EmbeddingModel};
use crate::exec::Exec;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NoveltyError {
    #[error("candidate has no decoded storylet")]
    Unevaluated,
    #[error("diversity needs at least two storylets, got {0}")]
    TooFew(usize),
}

/// Mean of the `k` smallest distances; 1 when there are none.
pub(crate) fn sparseness(mut distances: Vec<f64>, k: usize) -> f64 {
    if distances.is_empty() {
        return 1.0;
    }
    let k = k.min(distances.len()).max(1);
    if k < distances.len() {
        distances.select_nth_unstable_by(k - 1, f64::total_cmp);
        distances.truncate(k);
    }
    distances.sort_unstable_by(f64::total_cmp);
    distances.iter().sum::<f64>() / k as f64
}

/// Novelty of every `Some` entry of `candidates` against the other `Some`
/// entries plus `archive`. `None` entries (invalid or infeasible) score 0 and
/// are not neighbours.
pub(crate) fn score_vectors(candidates: &[Option<Vec<f64>>], archive: &[Vec<f64>], k: usize, exec: Exec) -> Vec<f64> {
    exec.map_range(candidates.len(), |i| {
        let Some(me) = &candidates[i] else { return 0.0 };
        let others =
            candidates.iter().enumerate().filter(|&(j, _)| j != i).filter_map(|(_, v)| v.as_ref()).chain(archive);
        sparseness(others.map(|v| 1.0 - vector_similarity(me, v)).collect(), k)
    })
}

/// Novelty of `candidate` against `population` and `archive`.
///
/// If `candidate` is itself an element of `population` (same reference) it
/// is skipped; other members count only when they are feasible and decoded.
pub fn novelty_score(
    candidate: &Individual,
    population: &[Individual],
    archive: &NoveltyArchive,
    k: usize,
    model: &EmbeddingModel,
) -> Result<f64, NoveltyError> {
    let text = &candidate.storylet.as_ref().ok_or(NoveltyError::Unevaluated)?.text;
    let me = model.sentence_vector(text);
    let distances: Vec<f64> = population
        .iter()
        .filter(|other| !std::ptr::eq(*other, candidate) && other.feasible)
        .filter_map(|other| other.storylet.as_ref())
        .map(|s| model.sentence_vector(&s.text))
        .chain(archive.members().iter().map(|m| model.sentence_vector(&m.text)))
        .map(|v| 1.0 - vector_similarity(&me, &v))
        .collect();
    Ok(sparseness(distances, k))
}

pub(crate) fn pairwise_mean_similarity(vectors: &[Vec<f64>], exec: Exec) -> Option<f64> {
    let n = vectors.len();
    if n < 2 {
        return None;
    }
    let rows = exec.map_range(n, |i| vectors[i + 1..].iter().map(|v| vector_similarity(&vectors[i], v)).sum::<f64>());
    Some(rows.iter().sum::<f64>() / (n * (n - 1) / 2) as f64)
}

/// Mean similarity over all unordered pairs of distinct positions.
pub fn population_diversity<S: AsRef<str> + Sync>(
    storylets: &[S],
    model: &EmbeddingModel,
) -> Result<f64, NoveltyError> {
    population_diversity_with(storylets, model, Exec::default())
}

/// [`population_diversity`] with an explicit execution strategy.
pub fn population_diversity_with<S: AsRef<str> + Sync>(
    storylets: &[S],
    model: &EmbeddingModel,
    exec: Exec,
) -> Result<f64, NoveltyError> {
    let vectors = exec.map(storylets, |s| model.sentence_vector(s.as_ref()));
    pairwise_mean_similarity(&vectors, exec).ok_or(NoveltyError::TooFew(storylets.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{Genome, Storylet};
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn model(entries: &[(&str, &[f64])]) -> EmbeddingModel {
        let dim = entries[0].1.len();
        EmbeddingModel::new(dim, entries.iter().map(|(t, v)| (t.to_string(), v.to_vec())).collect()).unwrap()
    }

    fn ind(text: &str) -> Individual {
        Individual {
            genome: Genome::new(vec![0]).unwrap(),
            storylet: Some(Storylet { text: text.into(), tags: BTreeSet::new(), derivation_choices: vec![] }),
            feasible: true,
            novelty: None,
        }
    }

    fn ab() -> EmbeddingModel {
        model(&[("a", &[1.0, 0.0]), ("b", &[0.0, 1.0])])
    }

    #[test]
    fn identical_population_scores_zero() {
        let m = ab();
        let pop: Vec<Individual> = (0..5).map(|_| ind("a b")).collect();
        let archive = NoveltyArchive::new(0.3).unwrap();
        for c in &pop {
            assert_eq!(novelty_score(c, &pop, &archive, 3, &m).unwrap(), 0.0);
        }
        assert_eq!(population_diversity(&["a b"; 5], &m).unwrap(), 1.0);
    }

    #[test]
    fn two_members_half_similar() {
        let m = ab();
        let pop = vec![ind("a"), ind("b")];
        let archive = NoveltyArchive::new(0.3).unwrap();
        for k in [1, 5] {
            for c in &pop {
                assert_eq!(novelty_score(c, &pop, &archive, k, &m).unwrap(), 0.5);
            }
        }
    }

    #[test]
    fn sole_candidate_is_maximally_novel() {
        let pop = vec![ind("a")];
        let archive = NoveltyArchive::new(0.3).unwrap();
        assert_eq!(novelty_score(&pop[0], &pop, &archive, 15, &ab()).unwrap(), 1.0);
        // an outside candidate against an empty population as well
        assert_eq!(novelty_score(&ind("b"), &[], &archive, 15, &ab()).unwrap(), 1.0);
    }

    #[test]
    fn duplicate_of_archive_member_scores_zero() {
        let m = ab();
        let mut archive = NoveltyArchive::new(0.0).unwrap();
        let mut member = ind("a b");
        member.novelty = Some(1.0);
        archive.try_insert(&member, 0);
        let pop = vec![ind("a b"), ind("a"), ind("b")];
        assert_eq!(novelty_score(&pop[0], &pop, &archive, 1, &m).unwrap(), 0.0);
    }

    #[test]
    fn unevaluated_candidate() {
        let mut c = ind("a");
        c.storylet = None;
        let archive = NoveltyArchive::new(0.3).unwrap();
        assert_eq!(novelty_score(&c, &[], &archive, 1, &ab()), Err(NoveltyError::Unevaluated));
    }

    #[test]
    fn infeasible_members_are_not_neighbours() {
        let m = ab();
        let mut pop = vec![ind("a"), ind("a"), ind("b")];
        pop[1].feasible = false;
        let archive = NoveltyArchive::new(0.3).unwrap();
        assert_eq!(novelty_score(&pop[0], &pop, &archive, 1, &m).unwrap(), 0.5);
    }

    #[test]
    fn diversity_hand_values() {
        let m = model(&[("a", &[1.0, 0.0]), ("c", &[-1.0, 0.0])]);
        assert_eq!(population_diversity(&["a", "c"], &m).unwrap(), 0.0);
        let s = (1.0 + std::f64::consts::FRAC_1_SQRT_2) / 2.0;
        let d = population_diversity(&["a", "b", "a b"], &ab()).unwrap();
        assert!((d - (0.5 + 2.0 * s) / 3.0).abs() < 1e-15);
        assert!((d - 0.7357).abs() < 1e-4);
        assert_eq!(population_diversity(&["a"], &ab()), Err(NoveltyError::TooFew(1)));
    }

    #[test]
    fn sparseness_takes_k_smallest() {
        assert_eq!(sparseness(vec![0.9, 0.1, 0.5, 0.3], 2), 0.2);
        assert_eq!(sparseness(vec![0.9, 0.1], 10), 0.5);
        assert_eq!(sparseness(vec![], 3), 1.0);
    }

    fn naive(i: usize, vectors: &[Vec<f64>], archive: &[Vec<f64>], k: usize) -> f64 {
        let mut d = Vec::new();
        for (j, v) in vectors.iter().enumerate() {
            if j != i {
                d.push(1.0 - vector_similarity(&vectors[i], v));
            }
        }
        for v in archive {
            d.push(1.0 - vector_similarity(&vectors[i], v));
        }
        if d.is_empty() {
            return 1.0;
        }
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let k = k.min(d.len());
        d[..k].iter().sum::<f64>() / k as f64
    }

    proptest! {
        #[test]
        fn matches_naive_all_pairs(
            pop in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 3), 1..20),
            archive in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 3), 0..6),
            k in 1usize..25,
        ) {
            let candidates: Vec<Option<Vec<f64>>> = pop.iter().cloned().map(Some).collect();
            let fast = score_vectors(&candidates, &archive, k, Exec::Sequential);
            for (i, score) in fast.iter().enumerate() {
                prop_assert!((score - naive(i, &pop, &archive, k)).abs() <= 1e-12);
                prop_assert!((0.0..=1.0).contains(score));
            }
            prop_assert_eq!(score_vectors(&candidates, &archive, k, Exec::Parallel), fast);
        }
    }
}
