//! Fixtures shared by the integration and acceptance tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use storyvolve::grammar::Grammar;
use storyvolve::EmbeddingModel;

/// Two independent choices: a in {x, y}, b in {p, q, r}.
pub const TOY_GRAMMAR: &str = r##"{"origin": ["#a# #b#"], "a": ["x", "y"], "b": ["p", "q", "r"]}"##;

pub fn toy_grammar() -> Grammar {
    Grammar::parse(TOY_GRAMMAR).unwrap()
}

/// 4 x 3 x 2 = 24 distinct texts.
pub const GRID_GRAMMAR: &str = r##"{
    "origin": ["#place# #light# #sound#"],
    "place": ["north", "south", "east", "west"],
    "light": ["dim", "bright", "flicker"],
    "sound": ["hush", "roar"]
}"##;

pub fn grid_grammar() -> Grammar {
    Grammar::parse(GRID_GRAMMAR).unwrap()
}

/// Hand-built vectors for [`GRID_GRAMMAR`]. Three places crowd one direction
/// and `west` opposes them; lights and sounds add smaller orthogonal offsets.
/// The 24 sentence vectors are spread but unevenly, so a uniform sample
/// over-represents the crowded side.
pub fn grid_model() -> EmbeddingModel {
    let vectors: BTreeMap<String, Vec<f64>> = [
        ("north", [1.0, 0.0, 0.0, 0.0]),
        ("south", [0.8, 0.4, 0.0, 0.0]),
        ("east", [0.8, -0.4, 0.0, 0.0]),
        ("west", [-1.0, 0.0, 0.0, 0.0]),
        ("dim", [0.0, 0.0, 0.6, 0.0]),
        ("bright", [0.0, 0.0, -0.6, 0.0]),
        ("flicker", [0.0, 0.6, 0.0, 0.0]),
        ("hush", [0.0, 0.0, 0.0, 0.5]),
        ("roar", [0.0, 0.0, 0.0, -0.5]),
    ]
    .into_iter()
    .map(|(t, v)| (t.to_string(), v.to_vec()))
    .collect();
    EmbeddingModel::new(4, vectors).unwrap()
}

/// Every text derivable from [`GRID_GRAMMAR`], in lexicographic order.
pub fn grid_texts() -> Vec<String> {
    let mut out = Vec::new();
    for p in ["north", "south", "east", "west"] {
        for l in ["dim", "bright", "flicker"] {
            for s in ["hush", "roar"] {
                out.push(format!("{p} {l} {s}"));
            }
        }
    }
    out.sort();
    out
}

/// Mean of `1 - sim` over unordered pairs; 0 for fewer than two texts.
pub fn mean_pairwise_dissimilarity(texts: &[String], model: &EmbeddingModel) -> f64 {
    let mut total = 0.0;
    let mut pairs = 0usize;
    for i in 0..texts.len() {
        for j in i + 1..texts.len() {
            total += 1.0 - model.similarity(&texts[i], &texts[j]);
            pairs += 1;
        }
    }
    if pairs == 0 {
        0.0
    } else {
        total / pairs as f64
    }
}

/// Vocabulary of the fixed similarity vector file.
pub const SIM_VOCAB: [&str; 12] =
    ["stream", "river", "rock", "moss", "snow", "ice", "cave", "tunnel", "light", "mist", "root", "dark"];

/// A fixed 8-dimensional vector file over [`SIM_VOCAB`]; components are
/// `((i * 7 + d * 3) % 11 - 5) / 4`, with one all-zero row.
pub fn sim_vector_file() -> String {
    let mut out = format!("{} 8\n", SIM_VOCAB.len());
    for (i, token) in SIM_VOCAB.iter().enumerate() {
        let row: Vec<String> = (0..8)
            .map(|d| if *token == "dark" { 0.0 } else { (((i * 7 + d * 3) % 11) as f64 - 5.0) / 4.0 })
            .map(|x| format!("{x}"))
            .collect();
        out.push_str(&format!("{token} {}\n", row.join(" ")));
    }
    out
}

/// `n` seeded sentence pairs of 1..=6 tokens drawn from the vocabulary plus
/// two out-of-vocabulary words.
pub fn sentence_pairs(n: usize, seed: u64) -> Vec<(String, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<&str> = SIM_VOCAB.to_vec();
    pool.extend(["zephyr", "quartzite"]);
    let sentence = |rng: &mut ChaCha8Rng| {
        let len = rng.gen_range(1..=6);
        (0..len).map(|_| *pool.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
    };
    (0..n).map(|_| (sentence(&mut rng), sentence(&mut rng))).collect()
}

/// Synthetic corpus in which `red` and `crimson` fill the same slots and
/// every other content word lives in its own contexts.
pub fn colour_corpus(seed: u64, sentences: usize) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let colour_frames = [
        "the {c} apple fell from the tree",
        "she wore a {c} scarf in winter",
        "a {c} sunset burned over the hills",
        "he painted the door {c} and bright",
        "the {c} rose bloomed by the gate",
    ];
    let other_frames = [
        "the river runs cold under the stone bridge",
        "a dog barked at the passing cart",
        "we counted seven boats in the harbour",
        "the clock struck nine in the empty hall",
        "old maps were rolled inside the chest",
        "wind moved the grass along the ridge",
        "the baker sold bread before dawn",
        "snow covered the roof of the mill",
    ];
    let mut out = String::new();
    for _ in 0..sentences {
        let line = if rng.gen_bool(0.5) {
            let colour = if rng.gen_bool(0.5) { "red" } else { "crimson" };
            colour_frames.choose(&mut rng).unwrap().replace("{c}", colour)
        } else {
            other_frames.choose(&mut rng).unwrap().to_string()
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Median of `sim(red, t)` over every vocabulary token other than red and crimson.
pub fn median_random_similarity(model: &EmbeddingModel) -> f64 {
    let mut sims: Vec<f64> =
        model.tokens().filter(|t| *t != "red" && *t != "crimson").map(|t| model.similarity("red", t)).collect();
    sims.sort_by(f64::total_cmp);
    let n = sims.len();
    if n % 2 == 1 {
        sims[n / 2]
    } else {
        (sims[n / 2 - 1] + sims[n / 2]) / 2.0
    }
}
