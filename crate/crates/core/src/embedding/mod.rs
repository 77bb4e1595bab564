//! Word vectors and mean-pooled sentence similarity.
//!
//! Similarity maps cosine onto `[0, 1]` as `(1 + cos) / 2`. A sentence with
//! no in-vocabulary tokens pools to the zero vector, whose cosine with
//! anything is taken as 0 (similarity 0.5).

mod train;

pub use train::{train_embeddings, TrainConfig};

use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EmbeddingError {
    #[error("corpus has no sentence with at least two tokens")]
    EmptyCorpus,
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("vector file line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("vector file line {line}: expected {expected} components, found {found}")]
    DimensionMismatch { line: usize, expected: usize, found: usize },
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

/// Lowercase, split on every run of non-alphanumeric characters, drop empties.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty()).map(str::to_lowercase).collect()
}

/// Token to vector table with a fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    dim: usize,
    vectors: BTreeMap<String, Vec<f64>>,
    /// Parameters of the training run, when the model was trained here.
    pub metadata: Option<TrainConfig>,
}

impl EmbeddingModel {
    pub fn new(dim: usize, vectors: BTreeMap<String, Vec<f64>>) -> Result<Self, EmbeddingError> {
        if dim == 0 {
            return Err(EmbeddingError::InvalidModel("dimension must be positive".into()));
        }
        for (token, v) in &vectors {
            if token.is_empty() || *token != token.to_lowercase() {
                return Err(EmbeddingError::InvalidModel(format!("token `{token}` is not lowercase")));
            }
            if v.len() != dim {
                return Err(EmbeddingError::InvalidModel(format!(
                    "`{token}` has {} components, expected {dim}",
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(EmbeddingError::InvalidModel(format!("`{token}` has a non-finite component")));
            }
        }
        Ok(Self { dim, vectors, metadata: None })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.vectors.get(token).map(Vec::as_slice)
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.vectors.keys().map(String::as_str)
    }

    pub fn vectors(&self) -> &BTreeMap<String, Vec<f64>> {
        &self.vectors
    }

    /// Parse the text vector format: a `<count> <dim>` header, then one
    /// `token c1 .. cdim` line per token.
    pub fn load_vectors(document: &str) -> Result<Self, EmbeddingError> {
        let format = |line: usize, message: String| EmbeddingError::Format { line, message };
        let mut lines = document.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let (_, header) = lines.next().ok_or_else(|| format(1, "missing header".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let (count, dim) = match fields.as_slice() {
            [count, dim] => (
                count.parse::<usize>().map_err(|e| format(1, format!("bad count: {e}")))?,
                dim.parse::<usize>().map_err(|e| format(1, format!("bad dimension: {e}")))?,
            ),
            _ => return Err(format(1, "header must be `<count> <dim>`".into())),
        };
        if dim == 0 {
            return Err(format(1, "dimension must be positive".into()));
        }
        let mut vectors = BTreeMap::new();
        for (line, text) in lines.filter(|(_, l)| !l.is_empty()) {
            let mut fields = text.split_whitespace();
            let token = fields.next().unwrap_or_default();
            if token != token.to_lowercase() {
                return Err(format(line, format!("token `{token}` is not lowercase")));
            }
            let components = fields
                .map(|f| {
                    f.parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| format(line, format!("bad component `{f}`")))
                })
                .collect::<Result<Vec<f64>, _>>()?;
            if components.len() != dim {
                return Err(EmbeddingError::DimensionMismatch { line, expected: dim, found: components.len() });
            }
            if vectors.insert(token.to_string(), components).is_some() {
                return Err(format(line, format!("duplicate token `{token}`")));
            }
        }
        if vectors.len() != count {
            return Err(format(1, format!("header declares {count} tokens, file has {}", vectors.len())));
        }
        Self::new(dim, vectors)
    }

    /// Write the text vector format, tokens sorted, six decimals per component.
    pub fn save_vectors(&self) -> String {
        let mut out = format!("{} {}\n", self.vectors.len(), self.dim);
        for (token, v) in &self.vectors {
            out.push_str(token);
            for x in v {
                let _ = write!(out, " {x:.6}");
            }
            out.push('\n');
        }
        out
    }

    /// Mean of the vectors of in-vocabulary tokens; zero if there are none.
    ///
    /// Tokens are summed in sorted order, so any permutation of a sentence's
    /// tokens yields the bit-identical vector.
    pub fn sentence_vector(&self, text: &str) -> Vec<f64> {
        let mut tokens = tokenize(text);
        tokens.sort_unstable();
        let mut sum = vec![0.0; self.dim];
        let mut n = 0usize;
        for v in tokens.iter().filter_map(|t| self.vectors.get(t)) {
            for (s, x) in sum.iter_mut().zip(v) {
                *s += x;
            }
            n += 1;
        }
        if n > 0 {
            for s in &mut sum {
                *s /= n as f64;
            }
        }
        sum
    }

    /// Sentence similarity on `[0, 1]`.
    pub fn similarity(&self, a: &str, b: &str) -> f64 {
        vector_similarity(&self.sentence_vector(a), &self.sentence_vector(b))
    }

    /// A copy with every vector multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let vectors = self.vectors.iter().map(|(t, v)| (t.clone(), v.iter().map(|x| x * factor).collect())).collect();
        Self { dim: self.dim, vectors, metadata: self.metadata.clone() }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Cosine, with any zero vector giving 0.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (dot(a, a), dot(b, b));
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    // sqrt(na * nb) rather than sqrt(na) * sqrt(nb): self-cosine is exactly 1
    (dot(a, b) / (na * nb).sqrt()).clamp(-1.0, 1.0)
}

/// `(1 + cosine) / 2`.
pub fn vector_similarity(a: &[f64], b: &[f64]) -> f64 {
    (1.0 + cosine(a, b)) / 2.0
}

pub fn similarity(model: &EmbeddingModel, a: &str, b: &str) -> f64 {
    model.similarity(a, b)
}
