//! Subcommand implementations. Each takes its parsed flags and the loaded
//! configuration, applies the flags on top, validates, and runs.

mod annotate;
mod bench;
mod curate;
mod evaluate;
mod model;

use std::path::Path;
use std::sync::Arc;

use biomedner::corpus::{read_corpus, Passage};
use biomedner::matcher::provider::ProcessEncoder;
use biomedner::matcher::{Backbone, EncoderMode, TokenEncoder, ToyEncoder};

use crate::args::{Command, MatcherArgs};
use crate::config::{EncoderKind, PipelineConfig};
use crate::failure::Failure;

pub fn dispatch(command: Command, config: PipelineConfig) -> Result<(), Failure> {
    match command {
        Command::Filter(a) => curate::filter(a, config),
        Command::Dedup(a) => curate::dedup(a, config),
        Command::Sample(a) => curate::sample(a, config),
        Command::Chunk(a) => curate::chunk(a, config),
        Command::Annotate(a) => annotate::annotate(a, config),
        Command::TrainHead(a) => model::train_head(a, config),
        Command::Predict(a) => model::predict(a, config),
        Command::Evaluate(a) => evaluate::evaluate(a, config),
        Command::Compare(a) => evaluate::compare(a, config),
        Command::Fewshot(a) => evaluate::fewshot(a, config),
        Command::Bench(a) => bench::bench(a, config),
        Command::ServeToyEncoder(a) => {
            let encoder = ToyEncoder::new(a.dim, a.encoder_seed);
            biomedner::matcher::provider::serve(&encoder, std::io::stdin().lock(), std::io::stdout().lock())?;
            Ok(())
        }
    }
}

/// Reads a passage JSONL file, failing on the first malformed line.
fn read_passages(path: &Path) -> Result<Vec<Passage>, Failure> {
    let reader = read_corpus(path, true).map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
    reader.collect::<Result<Vec<_>, _>>().map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

fn apply_matcher_args(config: &mut PipelineConfig, args: &MatcherArgs) {
    let m = &mut config.matcher;
    if let Some(w) = args.max_width {
        m.max_width = w;
    }
    if let Some(kind) = args.encoder {
        m.encoder.kind = kind;
    }
    if let Some(d) = args.dim {
        m.encoder.dim = d;
    }
    if let Some(cmd) = &args.encoder_cmd {
        m.encoder.command = cmd.clone();
    }
}

fn encoder(config: &PipelineConfig) -> Result<Arc<dyn TokenEncoder>, Failure> {
    let e = &config.matcher.encoder;
    Ok(match e.kind {
        EncoderKind::Toy => Arc::new(ToyEncoder::new(e.dim, e.seed)),
        EncoderKind::Process => {
            let id = format!("process:{}", e.command.join(" "));
            Arc::new(ProcessEncoder::spawn(&e.command[0], &e.command[1..], id, e.dim)?)
        }
    })
}

fn backbone(config: &PipelineConfig, mode: EncoderMode) -> Result<Backbone, Failure> {
    let enc = encoder(config)?;
    Ok(match mode {
        EncoderMode::Uni => Backbone::uni(enc),
        EncoderMode::Bi => Backbone::bi(enc.clone(), enc),
    })
}

fn write_json<T: serde::Serialize>(value: &T, out: Option<&Path>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}
