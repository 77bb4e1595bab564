//! Storylet/room tag compatibility.

use super::Storylet;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("tag `{0}` is not in the compatibility table")]
pub struct UnknownTag(pub String);

/// Maps a storylet tag to the room tags it may appear under.
///
/// Serialized as a JSON object of tag to array of room tags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CompatTable(BTreeMap<String, BTreeSet<String>>);

impl CompatTable {
    pub fn new(entries: BTreeMap<String, BTreeSet<String>>) -> Self {
        Self(entries)
    }

    pub fn allowed_rooms(&self, tag: &str) -> Option<&BTreeSet<String>> {
        self.0.get(tag)
    }

    pub fn tags(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }
}

impl Default for CompatTable {
    /// Table over the default world tags. Each tag is allowed in its own room;
    /// vegetation never grows in snow.
    fn default() -> Self {
        let entries: [(&str, &[&str]); 5] = [
            ("TUNNEL", &["TUNNEL", "CAVERN"]),
            ("CAVERN", &["CAVERN", "TUNNEL", "STREAM"]),
            ("STREAM", &["STREAM", "CAVERN", "VEGETATION"]),
            ("VEGETATION", &["VEGETATION", "STREAM", "CAVERN"]),
            ("SNOW", &["SNOW"]),
        ];
        Self(
            entries
                .iter()
                .map(|(tag, rooms)| (tag.to_string(), rooms.iter().map(|r| r.to_string()).collect()))
                .collect(),
        )
    }
}

/// True iff every tag of `storylet` may appear under `room_tag`. Untagged
/// storylets fit anywhere.
pub fn check_feasibility(storylet: &Storylet, room_tag: &str, compat: &CompatTable) -> Result<bool, UnknownTag> {
    let mut feasible = true;
    for tag in &storylet.tags {
        let rooms = compat.allowed_rooms(tag).ok_or_else(|| UnknownTag(tag.clone()))?;
        feasible &= rooms.contains(room_tag);
    }
    Ok(feasible)
}
