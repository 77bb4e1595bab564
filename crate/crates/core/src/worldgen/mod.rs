//! Simplex-noise world grids: generation, persistence and the text minimap.

mod features;
mod noise;

pub use features::{classify, normalize, Band, FeatureError, FeatureTable};
pub use noise::{build_permutation, simplex2, PermutationTable};

use crate::exec::Exec;
use crate::rng::SplitMix64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

pub const PLAYER_GLYPH: char = '@';
pub const NPC_GLYPH: char = '&';

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WorldError {
    #[error("world dimensions must be positive, got {width}x{height}")]
    InvalidDimensions { width: usize, height: usize },
    #[error("{npcs} NPCs do not fit in a {width}x{height} world")]
    TooManyNpcs { npcs: usize, width: usize, height: usize },
    #[error("every cell is impassable")]
    NoPassableCell,
    #[error("only {available} passable cells left for {npcs} NPCs")]
    NotEnoughPassableCells { npcs: usize, available: usize },
    #[error("noise scale must be finite, got {0}")]
    InvalidScale(f64),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error("cell ({x}, {y}) is outside the {width}x{height} world")]
    OutOfBounds { x: i64, y: i64, width: usize, height: usize },
    #[error("invalid world document: {0}")]
    Document(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum EntityKind {
    Player,
    Npc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Entity {
    pub kind: EntityKind,
    pub x: usize,
    pub y: usize,
}

/// Inputs of [`generate_world`].
#[derive(Debug, Clone, PartialEq)]
pub struct WorldParams {
    pub seed: u64,
    pub width: usize,
    pub height: usize,
    pub feature_table: FeatureTable,
    pub npc_count: usize,
    pub noise_scale: f64,
    pub impassable: BTreeSet<String>,
}

impl WorldParams {
    /// Default feature table, no NPCs, noise scale 0.1, nothing impassable.
    pub fn new(seed: u64, width: usize, height: usize) -> Self {
        Self {
            seed,
            width,
            height,
            feature_table: FeatureTable::default(),
            npc_count: 0,
            noise_scale: 0.1,
            impassable: BTreeSet::new(),
        }
    }

    pub fn npcs(mut self, npc_count: usize) -> Self {
        self.npc_count = npc_count;
        self
    }

    pub fn noise_scale(mut self, noise_scale: f64) -> Self {
        self.noise_scale = noise_scale;
        self
    }
}

/// A generated world. Cell arrays are row-major: cell `(x, y)` lives at
/// index `y * width + x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldGrid {
    pub width: usize,
    pub height: usize,
    pub seed: u64,
    pub noise_scale: f64,
    pub feature_table: FeatureTable,
    pub impassable: BTreeSet<String>,
    pub values: Vec<f64>,
    pub tags: Vec<String>,
    pub entities: Vec<Entity>,
    /// Per-room seeds, 53 bits wide so they survive a round trip through
    /// JavaScript numbers.
    pub room_seeds: Vec<u64>,
}

impl WorldGrid {
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    pub fn in_bounds(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height
    }

    pub fn value(&self, x: usize, y: usize) -> f64 {
        self.values[self.index(x, y)]
    }

    pub fn tag(&self, x: usize, y: usize) -> &str {
        &self.tags[self.index(x, y)]
    }

    pub fn room_seed(&self, x: usize, y: usize) -> u64 {
        self.room_seeds[self.index(x, y)]
    }

    pub fn player(&self) -> Entity {
        *self.entities.iter().find(|e| e.kind == EntityKind::Player).expect("a validated world has exactly one player")
    }

    pub fn entity_at(&self, x: usize, y: usize) -> Option<&Entity> {
        self.entities.iter().find(|e| e.x == x && e.y == y)
    }

    /// Distinct tags present in the grid, sorted.
    pub fn distinct_tags(&self) -> BTreeSet<&str> {
        self.tags.iter().map(String::as_str).collect()
    }

    pub fn to_json(&self) -> String {
        crate::canonical::to_string(self).expect("world grids always serialize")
    }

    pub fn from_json(source: &str) -> Result<Self, WorldError> {
        let world: WorldGrid = serde_json::from_str(source).map_err(|e| WorldError::Document(e.to_string()))?;
        world.validate()?;
        Ok(world)
    }

    /// Structural checks for a loaded document. Tags are trusted as stored:
    /// values are persisted with six decimals and may round across a band edge.
    pub fn validate(&self) -> Result<(), WorldError> {
        let cells = self.width * self.height;
        if cells == 0 {
            return Err(WorldError::InvalidDimensions { width: self.width, height: self.height });
        }
        let bad = |what: &str| WorldError::Document(format!("{what} has the wrong length"));
        if self.values.len() != cells {
            return Err(bad("values"));
        }
        if self.tags.len() != cells {
            return Err(bad("tags"));
        }
        if self.room_seeds.len() != cells {
            return Err(bad("room_seeds"));
        }
        if let Some(v) = self.values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(WorldError::Document(format!("value {v} outside [0, 1]")));
        }
        for e in &self.entities {
            if !self.in_bounds(e.x as i64, e.y as i64) {
                return Err(self.out_of_bounds(e.x as i64, e.y as i64));
            }
        }
        let players = self.entities.iter().filter(|e| e.kind == EntityKind::Player).count();
        if players != 1 {
            return Err(WorldError::Document(format!("expected exactly one PLAYER, found {players}")));
        }
        Ok(())
    }

    fn out_of_bounds(&self, x: i64, y: i64) -> WorldError {
        WorldError::OutOfBounds { x, y, width: self.width, height: self.height }
    }
}

/// Generate a world deterministically from `params`.
///
/// One SplitMix64 stream seeded with `params.seed` feeds, in order: the
/// permutation shuffle, one room seed per cell (row-major, top 53 bits) and
/// the NPC placement draws.
pub fn generate_world(params: &WorldParams) -> Result<WorldGrid, WorldError> {
    let WorldParams { seed, width, height, npc_count, noise_scale, .. } = *params;
    if width == 0 || height == 0 {
        return Err(WorldError::InvalidDimensions { width, height });
    }
    let cells = width * height;
    if npc_count >= cells {
        return Err(WorldError::TooManyNpcs { npcs: npc_count, width, height });
    }
    if !noise_scale.is_finite() {
        return Err(WorldError::InvalidScale(noise_scale));
    }

    let mut rng = SplitMix64::new(seed);
    let table = PermutationTable::from_rng(&mut rng, seed);

    let values = Exec::default()
        .map_range(cells, |i| {
            let (x, y) = ((i % width) as f64, (i / width) as f64);
            normalize(simplex2(&table, x * noise_scale, y * noise_scale))
        })
        .into_iter()
        .collect::<Result<Vec<f64>, _>>()?;
    let tags =
        values.iter().map(|&v| params.feature_table.classify(v).map(str::to_string)).collect::<Result<Vec<_>, _>>()?;
    let room_seeds: Vec<u64> = (0..cells).map(|_| rng.next_u64() >> 11).collect();

    let mut passable: Vec<usize> = (0..cells).filter(|&i| !params.impassable.contains(&tags[i])).collect();
    if passable.is_empty() {
        return Err(WorldError::NoPassableCell);
    }
    let player = passable.remove(0);
    if passable.len() < npc_count {
        return Err(WorldError::NotEnoughPassableCells { npcs: npc_count, available: passable.len() });
    }
    let at = |i: usize, kind| Entity { kind, x: i % width, y: i / width };
    let mut entities = vec![at(player, EntityKind::Player)];
    // partial Fisher-Yates: pick npc_count distinct cells from the remainder
    for k in 0..npc_count {
        let j = k + rng.below(passable.len() - k);
        passable.swap(k, j);
        entities.push(at(passable[k], EntityKind::Npc));
    }

    Ok(WorldGrid {
        width,
        height,
        seed,
        noise_scale,
        feature_table: params.feature_table.clone(),
        impassable: params.impassable.clone(),
        values,
        tags,
        entities,
        room_seeds,
    })
}

/// Render the `(2 * radius + 1)`-square window centred on `(cx, cy)`.
///
/// Terrain uses the band glyphs, entities override terrain (`@` player,
/// `&` NPC) and cells beyond the world edge are blank. Lines are joined with
/// `\n` and carry no trailing newline.
pub fn render_minimap(world: &WorldGrid, cx: i64, cy: i64, radius: usize) -> Result<String, WorldError> {
    if !world.in_bounds(cx, cy) {
        return Err(world.out_of_bounds(cx, cy));
    }
    let r = radius as i64;
    let mut lines = Vec::with_capacity(2 * radius + 1);
    for y in cy - r..=cy + r {
        let mut line = String::new();
        for x in cx - r..=cx + r {
            line.push(if world.in_bounds(x, y) { cell_glyph(world, x as usize, y as usize) } else { ' ' });
        }
        lines.push(line);
    }
    Ok(lines.join("\n"))
}

fn cell_glyph(world: &WorldGrid, x: usize, y: usize) -> char {
    match world.entity_at(x, y).map(|e| e.kind) {
        Some(EntityKind::Player) => PLAYER_GLYPH,
        Some(EntityKind::Npc) => NPC_GLYPH,
        None => world.feature_table.glyph_for_tag(world.tag(x, y)).unwrap_or('?'),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn deterministic_for_seed() {
        let p = WorldParams::new(7, 16, 16).npcs(3);
        assert_eq!(generate_world(&p).unwrap(), generate_world(&p).unwrap());
        let other = generate_world(&WorldParams::new(8, 16, 16).npcs(3)).unwrap();
        assert_ne!(generate_world(&p).unwrap().values, other.values);
    }

    #[test]
    fn values_normalized_and_tags_consistent() {
        let w = generate_world(&WorldParams::new(1, 64, 64)).unwrap();
        assert_eq!(w.values.len(), 64 * 64);
        for (v, tag) in w.values.iter().zip(&w.tags) {
            assert!((0.0..=1.0).contains(v));
            assert_eq!(w.feature_table.classify(*v).unwrap(), tag);
        }
    }

    #[test]
    fn entities_are_distinct_and_in_bounds() {
        let w = generate_world(&WorldParams::new(7, 16, 16).npcs(3)).unwrap();
        assert_eq!(w.entities.len(), 4);
        assert_eq!(w.entities.iter().filter(|e| e.kind == EntityKind::Player).count(), 1);
        let cells: BTreeSet<(usize, usize)> = w.entities.iter().map(|e| (e.x, e.y)).collect();
        assert_eq!(cells.len(), 4);
        assert!(w.entities.iter().all(|e| e.x < 16 && e.y < 16));
        // nothing impassable: the player starts at the first cell
        assert_eq!((w.player().x, w.player().y), (0, 0));
    }

    #[test]
    fn player_skips_impassable_cells() {
        let mut p = WorldParams::new(7, 16, 16).npcs(2);
        let plain = generate_world(&p).unwrap();
        let first_tag = plain.tag(0, 0).to_string();
        p.impassable.insert(first_tag.clone());
        let w = generate_world(&p).unwrap();
        let player = w.player();
        let first = w.tags.iter().position(|t| *t != first_tag).unwrap();
        assert_eq!(w.index(player.x, player.y), first);
        for e in &w.entities {
            assert_ne!(w.tag(e.x, e.y), first_tag);
        }
    }

    #[test]
    fn generation_errors() {
        assert!(matches!(generate_world(&WorldParams::new(0, 0, 4)), Err(WorldError::InvalidDimensions { .. })));
        assert!(matches!(generate_world(&WorldParams::new(0, 2, 2).npcs(4)), Err(WorldError::TooManyNpcs { .. })));
        let mut p = WorldParams::new(0, 8, 8);
        p.impassable = FeatureTable::default().bands().iter().map(|b| b.tag.clone()).collect();
        assert_eq!(generate_world(&p), Err(WorldError::NoPassableCell));
        assert!(generate_world(&WorldParams::new(0, 8, 8).noise_scale(f64::NAN)).is_err());
    }

    #[test]
    fn every_band_appears_on_large_grid() {
        let w = generate_world(&WorldParams::new(2024, 256, 256)).unwrap();
        let mut histogram: BTreeMap<&str, usize> = BTreeMap::new();
        for tag in &w.tags {
            *histogram.entry(tag.as_str()).or_default() += 1;
        }
        for band in FeatureTable::default().bands() {
            assert!(histogram.get(band.tag.as_str()).copied().unwrap_or(0) > 0, "{histogram:?}");
        }
    }

    #[test]
    fn room_seeds_fit_in_53_bits() {
        let w = generate_world(&WorldParams::new(5, 16, 16)).unwrap();
        assert!(w.room_seeds.iter().all(|&s| s < (1 << 53)));
        assert!(w.room_seeds.iter().collect::<BTreeSet<_>>().len() > 200);
    }

    #[test]
    fn json_round_trip() {
        let w = generate_world(&WorldParams::new(7, 16, 16).npcs(3)).unwrap();
        let text = w.to_json();
        let back = WorldGrid::from_json(&text).unwrap();
        assert_eq!(back.tags, w.tags);
        assert_eq!(back.entities, w.entities);
        assert_eq!(back.room_seeds, w.room_seeds);
        for (a, b) in back.values.iter().zip(&w.values) {
            assert!((a - b).abs() <= 5e-7);
        }
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn rejects_inconsistent_documents() {
        let w = generate_world(&WorldParams::new(7, 4, 4)).unwrap();
        let mut broken = w.clone();
        broken.tags.pop();
        assert!(WorldGrid::from_json(&broken.to_json()).is_err());
        let mut broken = w.clone();
        broken.entities.clear();
        assert!(WorldGrid::from_json(&broken.to_json()).is_err());
        let mut broken = w;
        broken.entities[0].x = 9;
        assert!(WorldGrid::from_json(&broken.to_json()).is_err());
        assert!(WorldGrid::from_json("{").is_err());
    }

    fn find_cell(w: &WorldGrid, tag: &str) -> (usize, usize) {
        (0..w.height)
            .flat_map(|y| (0..w.width).map(move |x| (x, y)))
            .find(|&(x, y)| w.tag(x, y) == tag && w.entity_at(x, y).is_none())
            .unwrap()
    }

    #[test]
    fn minimap_single_cells() {
        let w = generate_world(&WorldParams::new(7, 32, 32).npcs(3)).unwrap();
        let (x, y) = find_cell(&w, "STREAM");
        assert_eq!(render_minimap(&w, x as i64, y as i64, 0).unwrap(), "~");
        let (x, y) = find_cell(&w, "TUNNEL");
        assert_eq!(render_minimap(&w, x as i64, y as i64, 0).unwrap(), "Δ");
        let p = w.player();
        assert_eq!(render_minimap(&w, p.x as i64, p.y as i64, 0).unwrap(), "@");
        let npc = w.entities[1];
        assert_eq!(render_minimap(&w, npc.x as i64, npc.y as i64, 0).unwrap(), "&");
    }

    #[test]
    fn minimap_clips_at_corner() {
        let w = generate_world(&WorldParams::new(7, 16, 16)).unwrap();
        let map = render_minimap(&w, 0, 0, 1).unwrap();
        let lines: Vec<Vec<char>> = map.lines().map(|l| l.chars().collect()).collect();
        assert_eq!(lines.len(), 3);
        assert!(lines.iter().all(|l| l.len() == 3));
        assert_eq!(lines[0], vec![' ', ' ', ' ']);
        assert_eq!((lines[1][0], lines[2][0]), (' ', ' '));
        assert_eq!(lines[1][1], '@');
        let visible = lines.iter().flatten().filter(|c| **c != ' ').count();
        assert_eq!(visible, 4);
    }

    #[test]
    fn minimap_center_must_be_in_bounds() {
        let w = generate_world(&WorldParams::new(7, 4, 4)).unwrap();
        assert!(render_minimap(&w, 4, 0, 1).is_err());
        assert!(render_minimap(&w, -1, 0, 1).is_err());
    }
}
