//! Normalization of raw noise and classification into environment tags.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FeatureError {
    #[error("raw noise value {0} outside [-1, 1]")]
    OutOfRange(f64),
    #[error("value {0} matches no band of the feature table")]
    Uncovered(f64),
    #[error("band `{tag}` has lo {lo} > hi {hi}")]
    InvertedBand { tag: String, lo: f64, hi: f64 },
}

/// Map raw simplex output from `[-1, 1]` onto `[0, 1]`.
pub fn normalize(raw: f64) -> Result<f64, FeatureError> {
    if !(-1.0..=1.0).contains(&raw) {
        return Err(FeatureError::OutOfRange(raw));
    }
    Ok((raw + 1.0) / 2.0)
}

/// A closed interval `[lo, hi]` mapped to a tag and a display glyph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
    pub tag: String,
    pub glyph: char,
}

impl Band {
    pub fn new(lo: f64, hi: f64, tag: &str, glyph: char) -> Self {
        Self { lo, hi, tag: tag.to_string(), glyph }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

/// Ordered bands; the first band containing a value wins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureTable {
    bands: Vec<Band>,
}

impl FeatureTable {
    pub fn new(bands: Vec<Band>) -> Result<Self, FeatureError> {
        if let Some(b) = bands
            .iter()
            .find(|b| !matches!(b.lo.partial_cmp(&b.hi), Some(std::cmp::Ordering::Less | std::cmp::Ordering::Equal)))
        {
            return Err(FeatureError::InvertedBand { tag: b.tag.clone(), lo: b.lo, hi: b.hi });
        }
        Ok(Self { bands })
    }

    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    pub fn band_for(&self, v: f64) -> Result<&Band, FeatureError> {
        self.bands.iter().find(|b| b.contains(v)).ok_or(FeatureError::Uncovered(v))
    }

    pub fn classify(&self, v: f64) -> Result<&str, FeatureError> {
        self.band_for(v).map(|b| b.tag.as_str())
    }

    pub fn glyph_for_tag(&self, tag: &str) -> Option<char> {
        self.bands.iter().find(|b| b.tag == tag).map(|b| b.glyph)
    }
}

impl Default for FeatureTable {
    /// TUNNEL `[0, 0.2)`, CAVERN `[0.2, 0.35)`, STREAM `[0.35, 0.55]`,
    /// VEGETATION `(0.55, 0.75)`, SNOW `[0.75, 1]`.
    ///
    /// Bands are closed, so the half-open edges come from list order: each
    /// shared endpoint belongs to the band listed first.
    fn default() -> Self {
        Self {
            bands: vec![
                Band::new(0.35, 0.55, "STREAM", '~'),
                Band::new(0.20, 0.35, "CAVERN", '.'),
                Band::new(0.00, 0.20, "TUNNEL", 'Δ'),
                Band::new(0.75, 1.00, "SNOW", '*'),
                Band::new(0.55, 0.75, "VEGETATION", '"'),
            ],
        }
    }
}

pub fn classify(v: f64, table: &FeatureTable) -> Result<&str, FeatureError> {
    table.classify(v)
}
