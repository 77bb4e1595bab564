//! Skip-gram with negative sampling (SGNS), single-threaded.
//!
//! Update order is fixed (epochs, then sentences in corpus order, then center
//! positions, then context offsets), so a seed fully determines the result.

use super::{tokenize, EmbeddingError, EmbeddingModel};
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub dim: usize,
    /// Context positions on each side of the center word.
    pub window: usize,
    pub epochs: usize,
    pub negative_samples: usize,
    /// Initial rate, decayed linearly towards zero over the run.
    pub learning_rate: f64,
    pub min_count: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { dim: 50, window: 4, epochs: 5, negative_samples: 5, learning_rate: 0.025, min_count: 1, seed: 0 }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), EmbeddingError> {
        let bad = |m: &str| Err(EmbeddingError::InvalidConfig(m.into()));
        if self.dim < 2 {
            return bad("dim must be at least 2");
        }
        if self.window < 1 {
            return bad("window must be at least 1");
        }
        if self.epochs < 1 {
            return bad("epochs must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        Ok(())
    }
}

const MIN_RATE_FRACTION: f64 = 1e-4;

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Train word vectors on a corpus with one sentence per line.
pub fn train_embeddings(corpus: &str, cfg: &TrainConfig) -> Result<EmbeddingModel, EmbeddingError> {
    cfg.validate()?;
    let sentences: Vec<Vec<String>> = corpus.lines().map(tokenize).collect();

    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for token in sentences.iter().flatten() {
        *counts.entry(token.as_str()).or_default() += 1;
    }
    let vocab: Vec<&str> = counts.iter().filter(|(_, &c)| c >= cfg.min_count).map(|(t, _)| *t).collect();
    let index: BTreeMap<&str, usize> = vocab.iter().enumerate().map(|(i, t)| (*t, i)).collect();
    let encoded: Vec<Vec<usize>> = sentences
        .iter()
        .map(|s| s.iter().filter_map(|t| index.get(t.as_str()).copied()).collect::<Vec<_>>())
        .filter(|s| s.len() >= 2)
        .collect();
    if encoded.is_empty() {
        return Err(EmbeddingError::EmptyCorpus);
    }

    let dim = cfg.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let half = 0.5 / dim as f64;
    let mut input: Vec<f64> = (0..vocab.len() * dim).map(|_| rng.gen_range(-half..half)).collect();
    let mut output = vec![0.0; vocab.len() * dim];
    let noise = WeightedIndex::new(vocab.iter().map(|t| (counts[t] as f64).powf(0.75)))
        .expect("vocabulary counts are positive");

    let total_steps = (cfg.epochs * encoded.iter().map(Vec::len).sum::<usize>()) as f64;
    let mut step = 0usize;
    let mut grad = vec![0.0; dim];
    for _ in 0..cfg.epochs {
        for sentence in &encoded {
            for (pos, &center) in sentence.iter().enumerate() {
                let rate = cfg.learning_rate * (1.0 - step as f64 / total_steps).max(MIN_RATE_FRACTION);
                step += 1;
                let lo = pos.saturating_sub(cfg.window);
                let hi = (pos + cfg.window).min(sentence.len() - 1);
                for ctx_pos in (lo..=hi).filter(|&p| p != pos) {
                    let context = sentence[ctx_pos];
                    grad.iter_mut().for_each(|g| *g = 0.0);
                    let center_vec = center * dim..(center + 1) * dim;
                    for k in 0..=cfg.negative_samples {
                        let (target, label) = if k == 0 {
                            (context, 1.0)
                        } else {
                            let t = noise.sample(&mut rng);
                            if t == context {
                                continue;
                            }
                            (t, 0.0)
                        };
                        let target_vec = target * dim..(target + 1) * dim;
                        let score: f64 =
                            input[center_vec.clone()].iter().zip(&output[target_vec.clone()]).map(|(a, b)| a * b).sum();
                        let g = rate * (label - sigmoid(score));
                        for ((acc, out), inp) in
                            grad.iter_mut().zip(&mut output[target_vec]).zip(&input[center_vec.clone()])
                        {
                            *acc += g * *out;
                            *out += g * inp;
                        }
                    }
                    for (w, g) in input[center_vec].iter_mut().zip(&grad) {
                        *w += g;
                    }
                }
            }
        }
    }

    let vectors =
        vocab.iter().enumerate().map(|(i, t)| (t.to_string(), input[i * dim..(i + 1) * dim].to_vec())).collect();
    let mut model = EmbeddingModel::new(dim, vectors)?;
    model.metadata = Some(cfg.clone());
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vocabulary_contract() {
        let cfg = TrainConfig { dim: 3, ..TrainConfig::default() };
        let m = train_embeddings("a b", &cfg).unwrap();
        assert_eq!(m.tokens().collect::<Vec<_>>(), vec!["a", "b"]);
        assert!(m.vectors().values().all(|v| v.len() == 3));
    }

    #[test]
    fn empty_corpus() {
        let cfg = TrainConfig::default();
        assert_eq!(train_embeddings("", &cfg), Err(EmbeddingError::EmptyCorpus));
        assert_eq!(train_embeddings("one\ntwo\n", &cfg), Err(EmbeddingError::EmptyCorpus));
        let strict = TrainConfig { min_count: 2, ..cfg };
        assert_eq!(train_embeddings("a b\nc d", &strict), Err(EmbeddingError::EmptyCorpus));
    }

    #[test]
    fn min_count_filters_vocabulary() {
        let cfg = TrainConfig { dim: 4, min_count: 2, ..TrainConfig::default() };
        let m = train_embeddings("a b c\na b d", &cfg).unwrap();
        assert_eq!(m.tokens().collect::<Vec<_>>(), vec!["a", "b"]);
    }

    #[test]
    fn deterministic_per_seed() {
        let corpus = "the stream runs cold\nthe river runs deep\nmist hangs over the stream";
        let cfg = TrainConfig { dim: 8, epochs: 3, ..TrainConfig::default() };
        assert_eq!(train_embeddings(corpus, &cfg).unwrap(), train_embeddings(corpus, &cfg).unwrap());
        let other = TrainConfig { seed: 1, ..cfg.clone() };
        assert_ne!(train_embeddings(corpus, &cfg).unwrap(), train_embeddings(corpus, &other).unwrap());
    }

    #[test]
    fn config_validation() {
        for cfg in [
            TrainConfig { dim: 1, ..TrainConfig::default() },
            TrainConfig { window: 0, ..TrainConfig::default() },
            TrainConfig { epochs: 0, ..TrainConfig::default() },
            TrainConfig { learning_rate: 0.0, ..TrainConfig::default() },
        ] {
            assert!(matches!(train_embeddings("a b", &cfg), Err(EmbeddingError::InvalidConfig(_))));
        }
    }

    #[test]
    fn shared_contexts_pull_words_together() {
        let mut corpus = String::new();
        for i in 0..60 {
            let w = if i % 2 == 0 { "red" } else { "crimson" };
            corpus.push_str(&format!("the {w} apple is ripe and sweet\n"));
            corpus.push_str("the cold grey sky hangs over the hill\n");
        }
        let cfg = TrainConfig { dim: 16, epochs: 10, seed: 3, ..TrainConfig::default() };
        let m = train_embeddings(&corpus, &cfg).unwrap();
        assert!(m.similarity("red", "crimson") > m.similarity("red", "sky"));
    }
}
