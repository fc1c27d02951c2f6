use std::fs::File;
use std::io::{BufWriter, Write};

use biomedner::corpus::tokenize;
use biomedner::eval::{bench_throughput, umls_semantic_types, BenchCase, BenchFailure, WallTimer};
use biomedner::matcher::{load_head, EntityTypeSet, Matcher, MatcherError, ScoringHead};

use super::{apply_matcher_args, backbone, read_passages};
use crate::args::{BenchArgs, BenchLabels};
use crate::config::PipelineConfig;
use crate::failure::Failure;

fn failure(e: MatcherError) -> BenchFailure {
    BenchFailure::Other(e.to_string())
}

pub fn bench(args: BenchArgs, mut config: PipelineConfig) -> Result<(), Failure> {
    apply_matcher_args(&mut config, &args.matcher);
    if let Some(h) = args.hidden {
        config.matcher.hidden = h;
    }
    if let Some(b) = args.batch_sizes {
        config.eval.bench_batch_sizes = b;
    }
    config.validate()?;

    let passages = read_passages(&args.input)?;
    if passages.is_empty() {
        return Err(Failure::data("bench needs at least one passage"));
    }
    let mut label_sets: Vec<(&str, EntityTypeSet)> = Vec::new();
    if matches!(args.labels, BenchLabels::Dataset | BenchLabels::Both) {
        let set = EntityTypeSet::new(config.eval.dataset_labels.clone()).map_err(|e| Failure::usage(e.to_string()))?;
        label_sets.push(("dataset", set));
    }
    if matches!(args.labels, BenchLabels::Full127 | BenchLabels::Both) {
        label_sets.push(("full127", EntityTypeSet::new(umls_semantic_types()).expect("bundled label set is valid")));
    }
    let head = match &args.head {
        Some(path) => load_head(path)?,
        None => ScoringHead::init(config.matcher.encoder.dim, config.matcher.hidden, config.seed),
    };

    let mut matchers = Vec::new();
    for &mode in &args.modes {
        for (name, labels) in &label_sets {
            let matcher = Matcher {
                threshold: config.matcher.threshold,
                max_width: config.matcher.max_width,
                ..Matcher::new(backbone(&config, mode)?, head.clone())
            };
            matchers.push((mode, *name, matcher, labels));
        }
    }
    let mut cases: Vec<BenchCase<'_>> = matchers
        .iter()
        .map(|(mode, name, matcher, labels)| BenchCase {
            mode: format!("{mode:?}").to_lowercase(),
            label_set: name.to_string(),
            run: Box::new(move |batch| {
                for p in batch {
                    matcher.predict(&tokenize(&p.text).tokens, labels).map_err(failure)?;
                }
                Ok(())
            }),
        })
        .collect();
    let report = bench_throughput(&mut cases, &passages, &config.eval.bench_batch_sizes, &mut WallTimer::default());
    drop(cases);

    let mut out = BufWriter::new(File::create(&args.out)?);
    report.write_csv(&mut out)?;
    out.flush()?;
    config.write_sidecar(&args.out)?;
    for (mode, name, _, _) in &matchers {
        let mode = format!("{mode:?}").to_lowercase();
        match report.peak(&mode, name) {
            Some(p) => eprintln!("bench: {mode}/{name} peak {p:.1} words/s"),
            None => eprintln!("bench: {mode}/{name} completed no batch size"),
        }
    }
    Ok(())
}
