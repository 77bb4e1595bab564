//! The static web bundle read by the browser explorer.
//!
//! `bundle.json` holds the world, one description grammar (plus an optional
//! title grammar) per room tag, the novelty archives per tag and a manifest.
//! Room storylets are not precomputed: the explorer picks them from the room
//! seeds stored in the world.

use crate::evolve::{ArchiveDocument, ArchiveError, NoveltyArchive};
use crate::grammar::{Grammar, GrammarDocument, GrammarError};
use crate::worldgen::{WorldError, WorldGrid, NPC_GLYPH, PLAYER_GLYPH};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;
pub const BUNDLE_FILE: &str = "bundle.json";

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("no grammar for room tag `{0}`")]
    MissingGrammarForTag(String),
    #[error("unsupported bundle format_version {0}")]
    UnsupportedVersion(u32),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Grammar {
        path: PathBuf,
        #[source]
        source: GrammarError,
    },
    #[error("{path}: {source}")]
    Archive {
        path: PathBuf,
        #[source]
        source: ArchiveError,
    },
    #[error(transparent)]
    World(#[from] WorldError),
    #[error("invalid bundle document: {0}")]
    Document(String),
}

fn io_error(path: &Path) -> impl FnOnce(io::Error) -> BundleError + '_ {
    move |source| BundleError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TagGrammars {
    pub description: GrammarDocument,
    #[serde(default)]
    pub title: Option<GrammarDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    /// `world` plus one `archive:<TAG>` entry per archive that echoes its run.
    pub seeds: BTreeMap<String, u64>,
    /// Glyph to emoji, for the explorer's emoji display mode.
    pub emoji: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bundle {
    pub world: WorldGrid,
    pub grammars: BTreeMap<String, TagGrammars>,
    pub archives: BTreeMap<String, ArchiveDocument>,
    pub manifest: Manifest,
}

pub fn default_emoji() -> BTreeMap<String, String> {
    BTreeMap::from([
        (PLAYER_GLYPH.to_string(), "\u{1F600}".to_string()),
        (NPC_GLYPH.to_string(), "\u{1F642}".to_string()),
    ])
}

impl Bundle {
    /// Assemble and validate: every tag in the world needs a grammar.
    pub fn build(
        world: WorldGrid,
        grammars: BTreeMap<String, TagGrammars>,
        archives: BTreeMap<String, ArchiveDocument>,
    ) -> Result<Self, BundleError> {
        if let Some(tag) = world.distinct_tags().into_iter().find(|t| !grammars.contains_key(*t)) {
            return Err(BundleError::MissingGrammarForTag(tag.to_string()));
        }
        let mut seeds = BTreeMap::from([("world".to_string(), world.seed)]);
        for (tag, doc) in &archives {
            if let Some(cfg) = &doc.config {
                seeds.insert(format!("archive:{tag}"), cfg.seed);
            }
        }
        let manifest = Manifest { format_version: FORMAT_VERSION, seeds, emoji: default_emoji() };
        Ok(Self { world, grammars, archives, manifest })
    }

    pub fn to_json(&self) -> String {
        crate::canonical::to_string(self).expect("bundles always serialize")
    }

    pub fn from_json(source: &str) -> Result<Self, BundleError> {
        let bundle: Bundle = serde_json::from_str(source).map_err(|e| BundleError::Document(e.to_string()))?;
        if bundle.manifest.format_version != FORMAT_VERSION {
            return Err(BundleError::UnsupportedVersion(bundle.manifest.format_version));
        }
        bundle.world.validate()?;
        for (tag, grammars) in &bundle.grammars {
            let context = PathBuf::from(format!("{BUNDLE_FILE}#grammars/{tag}"));
            for doc in std::iter::once(&grammars.description).chain(&grammars.title) {
                Grammar::from_document(doc).map_err(|source| BundleError::Grammar { path: context.clone(), source })?;
            }
        }
        for (tag, doc) in &bundle.archives {
            NoveltyArchive::from_document(doc.clone()).map_err(|source| BundleError::Archive {
                path: PathBuf::from(format!("{BUNDLE_FILE}#archives/{tag}")),
                source,
            })?;
        }
        if let Some(tag) = bundle.world.distinct_tags().into_iter().find(|t| !bundle.grammars.contains_key(*t)) {
            return Err(BundleError::MissingGrammarForTag(tag.to_string()));
        }
        Ok(bundle)
    }
}

fn json_files(dir: &Path) -> Result<Vec<(String, PathBuf)>, BundleError> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_error(dir))? {
        let path = entry.map_err(io_error(dir))?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else { continue };
        if let Some(stem) = name.strip_suffix(".json") {
            if path.is_file() {
                files.push((stem.to_string(), path.clone()));
            }
        }
    }
    files.sort();
    Ok(files)
}

fn read(path: &Path) -> Result<String, BundleError> {
    fs::read_to_string(path).map_err(io_error(path))
}

fn load_grammar_doc(path: &Path) -> Result<GrammarDocument, BundleError> {
    Grammar::parse(&read(path)?)
        .map(|g| g.to_document())
        .map_err(|source| BundleError::Grammar { path: path.to_path_buf(), source })
}

/// Grammars from `<tag>.json` (description) and `<tag>.title.json` (title);
/// file stems are lowercase tags.
pub fn load_grammar_dir(dir: &Path) -> Result<BTreeMap<String, TagGrammars>, BundleError> {
    let mut descriptions = BTreeMap::new();
    let mut titles = BTreeMap::new();
    for (stem, path) in json_files(dir)? {
        match stem.strip_suffix(".title") {
            Some(tag) => titles.insert(tag.to_uppercase(), load_grammar_doc(&path)?),
            None => descriptions.insert(stem.to_uppercase(), load_grammar_doc(&path)?),
        };
    }
    Ok(descriptions
        .into_iter()
        .map(|(tag, description)| {
            let title = titles.remove(&tag);
            (tag, TagGrammars { description, title })
        })
        .collect())
}

/// Archives from `<tag>.json` files.
pub fn load_archive_dir(dir: &Path) -> Result<BTreeMap<String, ArchiveDocument>, BundleError> {
    let mut archives = BTreeMap::new();
    for (stem, path) in json_files(dir)? {
        let (archive, config) = NoveltyArchive::from_json(&read(&path)?)
            .map_err(|source| BundleError::Archive { path: path.clone(), source })?;
        archives.insert(stem.to_uppercase(), archive.to_document(config.as_ref()));
    }
    Ok(archives)
}

fn copy_tree(from: &Path, to: &Path) -> Result<(), BundleError> {
    fs::create_dir_all(to).map_err(io_error(to))?;
    for entry in fs::read_dir(from).map_err(io_error(from))? {
        let path = entry.map_err(io_error(from))?.path();
        let target = to.join(path.file_name().expect("directory entries have names"));
        if path.is_dir() {
            copy_tree(&path, &target)?;
        } else {
            fs::copy(&path, &target).map_err(io_error(&path))?;
        }
    }
    Ok(())
}

/// Validate inputs and write `out_dir/bundle.json`, copying the explorer's
/// static assets alongside when `assets` is given.
pub fn export_web(
    world_path: &Path,
    grammar_dir: &Path,
    archive_dir: &Path,
    assets: Option<&Path>,
    out_dir: &Path,
) -> Result<Bundle, BundleError> {
    let world = WorldGrid::from_json(&read(world_path)?)?;
    let bundle = Bundle::build(world, load_grammar_dir(grammar_dir)?, load_archive_dir(archive_dir)?)?;
    fs::create_dir_all(out_dir).map_err(io_error(out_dir))?;
    if let Some(assets) = assets {
        copy_tree(assets, out_dir)?;
    }
    let target = out_dir.join(BUNDLE_FILE);
    fs::write(&target, bundle.to_json()).map_err(io_error(&target))?;
    Ok(bundle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::worldgen::{generate_world, WorldParams};

    fn grammars(tags: &[&str]) -> BTreeMap<String, TagGrammars> {
        tags.iter()
            .map(|t| {
                let doc =
                    Grammar::parse(&format!(r#"{{"origin":["a {} room"]}}"#, t.to_lowercase())).unwrap().to_document();
                (t.to_string(), TagGrammars { description: doc, title: None })
            })
            .collect()
    }

    const ALL: [&str; 5] = ["STREAM", "TUNNEL", "CAVERN", "VEGETATION", "SNOW"];

    #[test]
    fn build_requires_every_world_tag() {
        let world = generate_world(&WorldParams::new(7, 64, 64)).unwrap();
        assert!(world.distinct_tags().contains("SNOW"));
        let without_snow: Vec<&str> = ALL.iter().copied().filter(|t| *t != "SNOW").collect();
        match Bundle::build(world.clone(), grammars(&without_snow), BTreeMap::new()) {
            Err(BundleError::MissingGrammarForTag(tag)) => assert_eq!(tag, "SNOW"),
            other => panic!("{other:?}"),
        }
        let bundle = Bundle::build(world, grammars(&ALL), BTreeMap::new()).unwrap();
        assert_eq!(bundle.grammars.len(), 5);
        assert_eq!(bundle.manifest.format_version, 1);
        assert_eq!(bundle.manifest.seeds["world"], 7);
    }

    #[test]
    fn json_round_trip_and_version_check() {
        let world = generate_world(&WorldParams::new(3, 16, 16).npcs(2)).unwrap();
        let bundle = Bundle::build(world, grammars(&ALL), BTreeMap::new()).unwrap();
        let text = bundle.to_json();
        assert_eq!(text, bundle.to_json());
        let back = Bundle::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text);
        let bumped = text.replace("\"format_version\":1", "\"format_version\":2");
        assert!(matches!(Bundle::from_json(&bumped), Err(BundleError::UnsupportedVersion(2))));
    }
}
