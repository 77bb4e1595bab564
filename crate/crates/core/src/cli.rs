//! The `storyvolve` command line.
//!
//! Exit codes: 0 success, 1 domain error, 2 usage error.

use crate::bundle;
use crate::embedding::{train_embeddings, EmbeddingModel, TrainConfig};
use crate::evolve::{evolve, export_augmented_grammar, EvolutionConfig, NoveltyArchive};
use crate::grammar::{CompatTable, Grammar, DEFAULT_START_SYMBOL};
use crate::worldgen::{generate_world, render_minimap, WorldGrid, WorldParams};
use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "storyvolve", version, about = "Storylet grammars over a noise world, evolved for novelty")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a world grid document
    Worldgen(WorldgenArgs),
    /// Train word vectors on a one-sentence-per-line corpus
    Train(TrainArgs),
    /// Expand a grammar symbol with a seed and print the text
    Generate(GenerateArgs),
    /// Run novelty search and write the archive
    Evolve(EvolveArgs),
    /// Add archive texts to a grammar rule as literal alternatives
    Augment(AugmentArgs),
    /// Print the minimap around a cell
    Minimap(MinimapArgs),
    /// Write bundle.json for the browser explorer
    ExportWeb(ExportWebArgs),
}

#[derive(Debug, Args)]
struct WorldgenArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    width: usize,
    #[arg(long)]
    height: usize,
    #[arg(long, default_value_t = 0)]
    npcs: usize,
    /// Noise coordinates per cell
    #[arg(long, default_value_t = 0.1)]
    scale: f64,
    /// Tags the player and NPCs may not stand on (repeatable)
    #[arg(long)]
    impassable: Vec<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value_t = TrainConfig::default().dim)]
    dim: usize,
    #[arg(long, default_value_t = TrainConfig::default().window)]
    window: usize,
    #[arg(long, default_value_t = TrainConfig::default().epochs)]
    epochs: usize,
    #[arg(long, default_value_t = TrainConfig::default().negative_samples)]
    negative: usize,
    #[arg(long, default_value_t = TrainConfig::default().learning_rate)]
    lr: f64,
    #[arg(long, default_value_t = TrainConfig::default().min_count)]
    min_count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long)]
    grammar: PathBuf,
    #[arg(long, default_value = DEFAULT_START_SYMBOL)]
    symbol: String,
    #[arg(long)]
    seed: u64,
}

#[derive(Debug, Args)]
struct EvolveArgs {
    #[arg(long)]
    grammar: PathBuf,
    #[arg(long)]
    vectors: PathBuf,
    /// Room tag the storylets must fit
    #[arg(long)]
    tag: String,
    #[arg(long, default_value_t = EvolutionConfig::default().population_size)]
    pop: usize,
    #[arg(long, default_value_t = EvolutionConfig::default().generations)]
    gens: usize,
    #[arg(long, default_value_t = EvolutionConfig::default().k_neighbors)]
    k: usize,
    #[arg(long, default_value_t = EvolutionConfig::default().rho)]
    rho: f64,
    #[arg(long, default_value_t = EvolutionConfig::default().mutation_rate)]
    mutation_rate: f64,
    #[arg(long, default_value_t = EvolutionConfig::default().crossover_rate)]
    crossover_rate: f64,
    #[arg(long, default_value_t = EvolutionConfig::default().tournament_size)]
    tournament: usize,
    #[arg(long, default_value_t = EvolutionConfig::default().genome_length)]
    genome_length: usize,
    #[arg(long)]
    seed: u64,
    /// Tag compatibility table (JSON map tag -> room tags); defaults to the built-in table
    #[arg(long)]
    compat: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Per-generation CSV
    #[arg(long)]
    telemetry: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AugmentArgs {
    #[arg(long)]
    grammar: PathBuf,
    #[arg(long)]
    archive: PathBuf,
    #[arg(long)]
    symbol: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct MinimapArgs {
    #[arg(long)]
    world: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    cx: i64,
    #[arg(long, allow_hyphen_values = true)]
    cy: i64,
    #[arg(long)]
    radius: usize,
}

#[derive(Debug, Args)]
struct ExportWebArgs {
    #[arg(long)]
    world: PathBuf,
    /// Directory of `<tag>.json` and optional `<tag>.title.json` grammars
    #[arg(long)]
    grammars: PathBuf,
    /// Directory of `<tag>.json` archives
    #[arg(long)]
    archives: PathBuf,
    /// Static explorer files copied next to bundle.json
    #[arg(long)]
    assets: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

/// Parse `argv` (program name first), run the subcommand and return the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(rendered.as_bytes())
            } else {
                stdout.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            1
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("cannot create {}", parent.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn load_grammar(path: &Path) -> Result<Grammar> {
    Grammar::parse(&read(path)?).with_context(|| path.display().to_string())
}

fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match command {
        Command::Worldgen(a) => {
            let mut params = WorldParams::new(a.seed, a.width, a.height).npcs(a.npcs).noise_scale(a.scale);
            params.impassable = a.impassable.into_iter().collect();
            let world = generate_world(&params)?;
            write(&a.out, &world.to_json())
        }
        Command::Train(a) => {
            let cfg = TrainConfig {
                dim: a.dim,
                window: a.window,
                epochs: a.epochs,
                negative_samples: a.negative,
                learning_rate: a.lr,
                min_count: a.min_count,
                seed: a.seed,
            };
            let corpus = read(&a.corpus)?;
            let model = train_embeddings(&corpus, &cfg).with_context(|| a.corpus.display().to_string())?;
            write(&a.out, &model.save_vectors())
        }
        Command::Generate(a) => {
            let grammar = load_grammar(&a.grammar)?;
            let storylet = grammar
                .expand(&a.symbol, a.seed)
                .with_context(|| format!("{}: expanding `{}`", a.grammar.display(), a.symbol))?;
            writeln!(stdout, "{}", storylet.text)?;
            Ok(())
        }
        Command::Evolve(a) => {
            let grammar = load_grammar(&a.grammar)?;
            let model =
                EmbeddingModel::load_vectors(&read(&a.vectors)?).with_context(|| a.vectors.display().to_string())?;
            let compat = match &a.compat {
                Some(path) => {
                    serde_json::from_str::<CompatTable>(&read(path)?).with_context(|| path.display().to_string())?
                }
                None => CompatTable::default(),
            };
            let cfg = EvolutionConfig {
                population_size: a.pop,
                generations: a.gens,
                k_neighbors: a.k,
                rho: a.rho,
                mutation_rate: a.mutation_rate,
                crossover_rate: a.crossover_rate,
                tournament_size: a.tournament,
                genome_length: a.genome_length,
                room_tag: a.tag,
                seed: a.seed,
            };
            let outcome = evolve(&grammar, &cfg, &model, &compat)?;
            if !outcome.infeasible_generations.is_empty() {
                writeln!(
                    stderr,
                    "warning: no feasible individual for {} in generations {:?}",
                    cfg.room_tag, outcome.infeasible_generations
                )?;
            }
            write(&a.out, &outcome.archive.to_json(Some(&cfg)))?;
            if let Some(path) = &a.telemetry {
                write(path, &outcome.telemetry_csv())?;
            }
            Ok(())
        }
        Command::Augment(a) => {
            let grammar = load_grammar(&a.grammar)?;
            let (archive, _) =
                NoveltyArchive::from_json(&read(&a.archive)?).with_context(|| a.archive.display().to_string())?;
            let augmented = export_augmented_grammar(&grammar, &archive, &a.symbol)?;
            write(&a.out, &augmented.to_json())
        }
        Command::Minimap(a) => {
            let world = WorldGrid::from_json(&read(&a.world)?).with_context(|| a.world.display().to_string())?;
            writeln!(stdout, "{}", render_minimap(&world, a.cx, a.cy, a.radius)?)?;
            Ok(())
        }
        Command::ExportWeb(a) => {
            bundle::export_web(&a.world, &a.grammars, &a.archives, a.assets.as_deref(), &a.out)?;
            Ok(())
        }
    }
}
