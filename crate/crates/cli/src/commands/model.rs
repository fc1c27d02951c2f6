use biomedner::corpus::{read_annotated, write_annotated};
use biomedner::matcher::{
    load_head, prepare_example, save_head, train_head as fit, EntityTypeSet, Matcher, ScoringHead, TrainConfig,
};
use rayon::prelude::*;

use super::{apply_matcher_args, backbone, read_passages};
use crate::args::{LabelArgs, PredictArgs, TrainHeadArgs};
use crate::config::{Phase, PipelineConfig};
use crate::failure::Failure;

pub fn train_head(args: TrainHeadArgs, mut config: PipelineConfig) -> Result<(), Failure> {
    apply_matcher_args(&mut config, &args.matcher);
    if let Some(m) = args.mode {
        config.matcher.mode = m;
    }
    if let Some(h) = args.hidden {
        config.matcher.hidden = h;
    }
    let t = &mut config.train;
    if let Some(p) = args.phase {
        t.phase = p;
    }
    t.steps = args.steps.or(t.steps);
    t.batch_size = args.batch_size.or(t.batch_size);
    t.lr_head = args.lr.or(t.lr_head);
    t.weight_decay = args.weight_decay.or(t.weight_decay);
    config.validate()?;

    let t = &config.train;
    let mut train = match t.phase {
        Phase::Pretraining => TrainConfig::pretraining(),
        Phase::PostTraining => TrainConfig::post_training(),
    }
    .with_seed(config.seed);
    train.steps = t.steps.unwrap_or(train.steps);
    train.batch_size = t.batch_size.unwrap_or(train.batch_size);
    train.lr_head = t.lr_head.unwrap_or(train.lr_head);
    train.weight_decay = t.weight_decay.unwrap_or(train.weight_decay);

    let passages = read_annotated(&args.train, true)?;
    let bb = backbone(&config, config.matcher.mode)?;
    let max_width = config.matcher.max_width;
    let prepared: Vec<_> = passages.par_iter().map(|p| prepare_example(&bb, p, max_width)).collect::<Result<_, _>>()?;
    let examples: Vec<_> = prepared.into_iter().flatten().collect();
    if examples.is_empty() {
        return Err(Failure::data("no training passage has an in-scope entity type"));
    }
    let head = ScoringHead::init(bb.dim(), config.matcher.hidden, config.seed);
    let outcome = fit(&examples, head, train)?;
    save_head(&outcome.head, &args.out)?;
    config.write_sidecar(&args.out)?;
    eprintln!(
        "train-head: {} examples, {} steps, final loss {:.6}",
        examples.len(),
        train.steps,
        outcome.losses.last().copied().unwrap_or(f64::NAN)
    );
    Ok(())
}

fn labels(args: &LabelArgs) -> Result<EntityTypeSet, Failure> {
    let list: Vec<String> = match (&args.labels, &args.label_file) {
        (Some(l), _) => l.iter().map(|s| s.trim().to_string()).collect(),
        (None, Some(path)) => std::fs::read_to_string(path)?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_string)
            .collect(),
        (None, None) => return Err(Failure::usage("one of --labels or --label-file is required")),
    };
    EntityTypeSet::new(list).map_err(|e| Failure::usage(e.to_string()))
}

pub fn predict(args: PredictArgs, mut config: PipelineConfig) -> Result<(), Failure> {
    apply_matcher_args(&mut config, &args.matcher);
    if let Some(m) = args.mode {
        config.matcher.mode = m;
    }
    if let Some(t) = args.threshold {
        config.matcher.threshold = t;
    }
    config.validate()?;
    let labels = labels(&args.labels)?;
    let passages = read_passages(&args.input)?;
    let head = load_head(&args.head)?;
    let matcher = Matcher {
        threshold: config.matcher.threshold,
        max_width: config.matcher.max_width,
        ..Matcher::new(backbone(&config, config.matcher.mode)?, head)
    };
    let mut predicted = matcher.annotate(&passages, &labels)?;
    for ap in &mut predicted {
        ap.record_negatives(labels.labels());
    }
    write_annotated(&args.out, &predicted)?;
    config.write_sidecar(&args.out)?;
    let n: usize = predicted.iter().map(|p| p.spans.len()).sum();
    eprintln!("predict: {n} spans over {} passages", predicted.len());
    Ok(())
}
