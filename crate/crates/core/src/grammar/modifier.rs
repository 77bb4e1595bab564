//! Text modifiers applied to expanded symbols: `a`, `capitalize`, `s`, `ed`.
//!
//! Only regular English inflection is handled. Irregular plurals and past
//! tenses are the grammar author's job (write the inflected form directly).

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modifier {
    /// Indefinite article, chosen by the first letter only.
    A,
    Capitalize,
    /// Regular plural.
    S,
    /// Regular past tense.
    Ed,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModifierError {
    #[error("modifier `{0}` applied to empty text")]
    EmptyInput(Modifier),
    #[error("unknown modifier `{0}`")]
    Unknown(String),
}

impl Modifier {
    pub const ALL: [Modifier; 4] = [Modifier::A, Modifier::Capitalize, Modifier::S, Modifier::Ed];

    pub fn name(self) -> &'static str {
        match self {
            Modifier::A => "a",
            Modifier::Capitalize => "capitalize",
            Modifier::S => "s",
            Modifier::Ed => "ed",
        }
    }

    pub fn apply(self, text: &str) -> Result<String, ModifierError> {
        apply_modifier(text, self)
    }
}

impl fmt::Display for Modifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Modifier {
    type Err = ModifierError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Modifier::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| ModifierError::Unknown(s.to_string()))
    }
}

/// Apply one modifier to non-empty text.
pub fn apply_modifier(text: &str, m: Modifier) -> Result<String, ModifierError> {
    if text.is_empty() {
        return Err(ModifierError::EmptyInput(m));
    }
    Ok(match m {
        Modifier::A => {
            let first = text.chars().next().unwrap_or(' ').to_ascii_lowercase();
            if matches!(first, 'a' | 'e' | 'i' | 'o' | 'u') {
                format!("an {text}")
            } else {
                format!("a {text}")
            }
        }
        Modifier::Capitalize => {
            let mut chars = text.chars();
            let first = chars.next().unwrap_or_default();
            first.to_uppercase().chain(chars).collect()
        }
        Modifier::S => plural(text),
        Modifier::Ed => past_tense(text),
    })
}

fn is_vowel(c: char) -> bool {
    matches!(c.to_ascii_lowercase(), 'a' | 'e' | 'i' | 'o' | 'u')
}

/// The character before a trailing `y`, when it is a consonant letter.
fn consonant_before_y(text: &str) -> bool {
    let mut rev = text.chars().rev();
    match (rev.next(), rev.next()) {
        (Some('y'), Some(prev)) => prev.is_alphabetic() && !is_vowel(prev),
        _ => false,
    }
}

fn plural(text: &str) -> String {
    if consonant_before_y(text) {
        return format!("{}ies", &text[..text.len() - 1]);
    }
    let sibilant = ["s", "x", "z", "ch", "sh"].iter().any(|end| text.ends_with(end));
    if sibilant {
        format!("{text}es")
    } else {
        format!("{text}s")
    }
}

fn past_tense(text: &str) -> String {
    if text.ends_with('e') {
        format!("{text}d")
    } else if consonant_before_y(text) {
        format!("{}ied", &text[..text.len() - 1])
    } else {
        format!("{text}ed")
    }
}
