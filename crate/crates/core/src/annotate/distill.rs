//! Teacher/student annotation of a corpus with resumable checkpoints.

use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::candidates::{CandidateExtractor, ContentRunExtractor};
use super::prompt::{AnnotationRequest, ChatMessage, FewShotExample};
use super::{align_spans, annotate_passage, AnnotateError, LlmClient};
use crate::corpus::{tokenize, AnnotatedPassage, AnnotatedRecord, Passage};

/// Default number of passages sent to the teacher.
pub const DEFAULT_TEACHER_N: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Annotator {
    Teacher,
    Student,
}

impl Annotator {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Teacher => "teacher",
            Self::Student => "student",
        }
    }
}

/// Output locations of a distillation run.
#[derive(Debug, Clone)]
pub struct DistillPaths {
    /// Every annotated passage, tagged with its annotator.
    pub annotated: PathBuf,
    /// Zero-shot prompts paired with teacher answers, for student fine-tuning.
    pub teacher_sft: PathBuf,
    /// One completed passage id per line.
    pub checkpoint: PathBuf,
}

impl DistillPaths {
    /// `<stem>.annotated.jsonl`, `<stem>.teacher_sft.jsonl`, `<stem>.checkpoint`
    /// inside `dir`.
    pub fn in_dir(dir: &Path, stem: &str) -> Self {
        Self {
            annotated: dir.join(format!("{stem}.annotated.jsonl")),
            teacher_sft: dir.join(format!("{stem}.teacher_sft.jsonl")),
            checkpoint: dir.join(format!("{stem}.checkpoint")),
        }
    }
}

pub struct DistillConfig {
    pub teacher_n: usize,
    /// Demonstrations for teacher prompts; students are prompted zero-shot.
    pub few_shot: Vec<FewShotExample>,
    /// Maximum concurrent requests.
    pub max_in_flight: usize,
    pub extractor: Box<dyn CandidateExtractor>,
}

impl Default for DistillConfig {
    fn default() -> Self {
        Self {
            teacher_n: DEFAULT_TEACHER_N,
            few_shot: super::default_few_shot(),
            max_in_flight: 4,
            extractor: Box::new(ContentRunExtractor::default()),
        }
    }
}

/// Counts from one (possibly resumed) run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DistillSummary {
    pub teacher_annotated: usize,
    pub student_annotated: usize,
    /// Passages already checkpointed by an earlier run.
    pub resumed: usize,
    pub dropped_entities: usize,
    pub off_candidate_entities: usize,
}

/// One line of the teacher fine-tuning file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SftRecord {
    pub id: String,
    pub messages: Vec<ChatMessage>,
}

struct Done {
    record: AnnotatedRecord,
    sft: Option<SftRecord>,
    dropped: usize,
    off_candidate: usize,
}

fn annotate_one(
    passage: &Passage,
    annotator: Annotator,
    client: &dyn LlmClient,
    config: &DistillConfig,
) -> Result<Done, AnnotateError> {
    let tokens = tokenize(&passage.text);
    let candidates = config.extractor.extract(&passage.id, &tokens);
    let few_shot = match annotator {
        Annotator::Teacher => config.few_shot.clone(),
        Annotator::Student => Vec::new(),
    };
    let request = AnnotationRequest::new(&passage.id, &passage.text, candidates, few_shot);
    let response = annotate_passage(&request, client)?;
    let alignment = align_spans(&response.plain_entities(), &tokens);
    let ap = AnnotatedPassage::new(passage.clone(), tokens, alignment.spans, Vec::new())
        .map_err(|e| AnnotateError::Io(std::io::Error::other(e.to_string())))?;
    let sft = (annotator == Annotator::Teacher).then(|| {
        let zero_shot = AnnotationRequest { few_shot: Vec::new(), ..request.clone() };
        let mut messages = zero_shot.messages();
        messages.push(ChatMessage::new("assistant", response.raw.clone()));
        SftRecord { id: passage.id.clone(), messages }
    });
    Ok(Done {
        record: AnnotatedRecord::from_passage(&ap).with_annotator(annotator.as_str()),
        sft,
        dropped: alignment.dropped,
        off_candidate: response.entities.iter().filter(|e| e.off_candidate).count(),
    })
}

fn read_checkpoint(path: &Path) -> Result<Vec<String>, AnnotateError> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let reader = BufReader::new(File::open(path)?);
    let mut ids = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if !line.is_empty() {
            ids.push(line);
        }
    }
    Ok(ids)
}

/// Rewrites `path` keeping only JSONL lines whose `id` is in `keep`, so
/// records written after the last checkpoint entry are discarded.
fn truncate_to(path: &Path, keep: &HashSet<String>) -> Result<(), AnnotateError> {
    #[derive(Deserialize)]
    struct IdOnly {
        id: String,
    }
    if !path.exists() {
        File::create(path)?;
        return Ok(());
    }
    let content = std::fs::read_to_string(path)?;
    let mut out = String::with_capacity(content.len());
    for line in content.lines().filter(|l| !l.trim().is_empty()) {
        let Ok(rec) = serde_json::from_str::<IdOnly>(line) else {
            continue;
        };
        if keep.contains(&rec.id) {
            out.push_str(line);
            out.push('\n');
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn append(path: &Path) -> Result<BufWriter<File>, AnnotateError> {
    Ok(BufWriter::new(OpenOptions::new().create(true).append(true).open(path)?))
}

/// Annotates `corpus`: the first `teacher_n` passages with the teacher
/// (few-shot), the rest with the student (zero-shot).
///
/// Results are written in corpus order. After each passage its id is appended
/// to the checkpoint file; rerunning with the same paths skips checkpointed
/// passages, so an interrupted run followed by a resume leaves the same files
/// as an uninterrupted one.
pub fn distill_pipeline(
    corpus: &[Passage],
    teacher: &dyn LlmClient,
    student: &dyn LlmClient,
    config: &DistillConfig,
    paths: &DistillPaths,
) -> Result<DistillSummary, AnnotateError> {
    if corpus.len() < config.teacher_n {
        return Err(AnnotateError::CorpusTooSmall { size: corpus.len(), teacher_n: config.teacher_n });
    }
    let mut ids = HashSet::new();
    if let Some(p) = corpus.iter().find(|p| !ids.insert(p.id.as_str())) {
        return Err(AnnotateError::DuplicateId(p.id.clone()));
    }

    let done: HashSet<String> = read_checkpoint(&paths.checkpoint)?.into_iter().collect();
    truncate_to(&paths.annotated, &done)?;
    truncate_to(&paths.teacher_sft, &done)?;
    let mut summary = DistillSummary { resumed: done.len(), ..Default::default() };

    let pending: Vec<(usize, &Passage)> =
        corpus.iter().enumerate().filter(|(_, p)| !done.contains(&p.id)).collect();
    let mut annotated = append(&paths.annotated)?;
    let mut sft = append(&paths.teacher_sft)?;
    let mut checkpoint = append(&paths.checkpoint)?;

    for window in pending.chunks(config.max_in_flight.max(1)) {
        let results: Vec<Result<Done, AnnotateError>> = window
            .par_iter()
            .map(|&(i, p)| {
                let (who, client) =
                    if i < config.teacher_n { (Annotator::Teacher, teacher) } else { (Annotator::Student, student) };
                annotate_one(p, who, client, config)
            })
            .collect();
        for result in results {
            let item = result?;
            serde_json::to_writer(&mut annotated, &item.record)?;
            annotated.write_all(b"\n")?;
            annotated.flush()?;
            match item.sft {
                Some(rec) => {
                    serde_json::to_writer(&mut sft, &rec)?;
                    sft.write_all(b"\n")?;
                    sft.flush()?;
                    summary.teacher_annotated += 1;
                }
                None => summary.student_annotated += 1,
            }
            writeln!(checkpoint, "{}", item.record.id)?;
            checkpoint.flush()?;
            summary.dropped_entities += item.dropped;
            summary.off_candidate_entities += item.off_candidate;
        }
    }
    Ok(summary)
}
