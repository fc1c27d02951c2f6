use std::fs::File;
use std::io::{BufWriter, Write};

use biomedner::corpus::{
    chunk as chunk_passage, group_by_source, read_annotated, read_corpus, stratified_sample, write_corpus,
    write_jsonl_file, CharQuadCounter,
};
use biomedner::dedup::deduplicate;
use biomedner::quality::{filter_corpus, ProfileAssignment};

use super::read_passages;
use crate::args::{ChunkArgs, DedupArgs, FilterArgs, SampleArgs};
use crate::config::{sidecar_path, PipelineConfig};
use crate::failure::Failure;

pub fn filter(args: FilterArgs, config: PipelineConfig) -> Result<(), Failure> {
    config.validate()?;
    let assignment = ProfileAssignment::with_general(config.quality.general, config.quality.regimen);
    let report_path = args.report.clone().unwrap_or_else(|| sidecar_path(&args.out, "report.jsonl"));
    let mut reader = read_corpus(&args.input, args.strict)?;
    let mut kept = BufWriter::new(File::create(&args.out)?);
    let mut report = BufWriter::new(File::create(&report_path)?);
    let (mut total, mut accepted) = (0usize, 0usize);
    for item in filter_corpus((&mut reader).map(|r| r.map_err(Failure::from)), &assignment) {
        let screened = item?;
        total += 1;
        serde_json::to_writer(&mut report, &screened.report)?;
        report.write_all(b"\n")?;
        if screened.report.accepted {
            accepted += 1;
            serde_json::to_writer(&mut kept, &screened.passage)?;
            kept.write_all(b"\n")?;
        }
    }
    kept.flush()?;
    report.flush()?;
    config.write_sidecar(&args.out)?;
    eprintln!("filter: kept {accepted} of {total} passages; skipped {} malformed lines", reader.skipped());
    Ok(())
}

pub fn dedup(args: DedupArgs, mut config: PipelineConfig) -> Result<(), Failure> {
    if let Some(t) = args.threshold {
        config.dedup.threshold = t;
    }
    if args.cross_source {
        config.dedup.per_source = false;
    } else if args.per_source {
        config.dedup.per_source = true;
    }
    config.validate()?;
    let passages = read_passages(&args.input)?;
    let outcome = deduplicate(&passages, config.dedup.threshold, config.dedup.per_source)?;
    write_corpus(&args.out, &outcome.kept)?;
    let clusters_path = args.clusters.clone().unwrap_or_else(|| sidecar_path(&args.out, "clusters.jsonl"));
    write_jsonl_file(&clusters_path, &outcome.clusters)?;
    config.write_sidecar(&args.out)?;
    eprintln!(
        "dedup: kept {} of {} passages in {} clusters",
        outcome.kept.len(),
        passages.len(),
        outcome.clusters.len()
    );
    Ok(())
}

pub fn sample(args: SampleArgs, mut config: PipelineConfig) -> Result<(), Failure> {
    if let Some(t) = args.total {
        config.sample.total = Some(t);
    }
    config.validate()?;
    let total = config.sample.total.ok_or_else(|| Failure::usage("sample needs --total or sample.total"))?;
    let groups = group_by_source(read_passages(&args.input)?);
    let drawn = stratified_sample(&groups, total, config.seed)?;
    write_corpus(&args.out, &drawn)?;
    config.write_sidecar(&args.out)?;
    eprintln!("sample: drew {} passages from {} sources", drawn.len(), groups.len());
    Ok(())
}

pub fn chunk(args: ChunkArgs, mut config: PipelineConfig) -> Result<(), Failure> {
    if let Some(b) = args.budget {
        config.chunk.budget = b;
    }
    config.validate()?;
    let passages = read_annotated(&args.input, true)?;
    let mut records = Vec::new();
    for ap in &passages {
        let chunks = chunk_passage(ap, config.chunk.budget, &CharQuadCounter)
            .map_err(|e| Failure::data(format!("passage {}: {e}", ap.id())))?;
        records.extend(chunks.iter().map(|c| c.to_record()));
    }
    write_jsonl_file(&args.out, &records)?;
    config.write_sidecar(&args.out)?;
    eprintln!("chunk: {} passages became {} chunks", passages.len(), records.len());
    Ok(())
}
