//! Line-delimited JSON reading and writing.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::marker::PhantomData;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::types::{AnnotatedPassage, EntitySpan, Passage, Source, TokenSequence};
use super::CorpusError;

/// A record type that can check its own invariants after parsing.
pub trait Record: DeserializeOwned {
    fn check(&self) -> Result<(), String> {
        Ok(())
    }
}

impl Record for Passage {
    fn check(&self) -> Result<(), String> {
        self.validate()
    }
}

impl Record for serde_json::Value {}

/// Streaming JSONL reader.
///
/// Holds one line in memory at a time. In strict mode the first malformed line
/// ends the stream with [`CorpusError::Schema`]; otherwise malformed lines are
/// skipped and counted. Blank lines are ignored in both modes.
pub struct JsonlReader<R, T> {
    lines: std::io::Lines<R>,
    line_no: usize,
    strict: bool,
    skipped: usize,
    failed: bool,
    _marker: PhantomData<T>,
}

impl<R: BufRead, T: Record> JsonlReader<R, T> {
    pub fn new(reader: R, strict: bool) -> Self {
        Self { lines: reader.lines(), line_no: 0, strict, skipped: 0, failed: false, _marker: PhantomData }
    }

    /// Malformed lines skipped so far (non-strict mode).
    pub fn skipped(&self) -> usize {
        self.skipped
    }
}

impl<R: BufRead, T: Record> Iterator for JsonlReader<R, T> {
    type Item = Result<T, CorpusError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        loop {
            let line = match self.lines.next()? {
                Ok(line) => line,
                Err(e) => {
                    self.failed = true;
                    return Some(Err(CorpusError::Io(e)));
                }
            };
            self.line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            let parsed = serde_json::from_str::<T>(&line)
                .map_err(|e| e.to_string())
                .and_then(|rec| rec.check().map(|_| rec));
            match parsed {
                Ok(rec) => return Some(Ok(rec)),
                Err(reason) if self.strict => {
                    self.failed = true;
                    return Some(Err(CorpusError::Schema { line: self.line_no, reason }));
                }
                Err(_) => self.skipped += 1,
            }
        }
    }
}

/// Opens a JSONL file of records.
pub fn open_jsonl<T: Record>(path: &Path, strict: bool) -> Result<JsonlReader<BufReader<File>, T>, CorpusError> {
    let file = File::open(path)?;
    Ok(JsonlReader::new(BufReader::new(file), strict))
}

/// Streams raw passages from a JSONL file in file order.
pub fn read_corpus(path: &Path, strict: bool) -> Result<JsonlReader<BufReader<File>, Passage>, CorpusError> {
    open_jsonl(path, strict)
}

/// Writes one compact JSON object per line, LF-terminated.
pub fn write_jsonl<W: Write, T: Serialize>(
    writer: W,
    records: impl IntoIterator<Item = T>,
) -> Result<(), CorpusError> {
    let mut w = BufWriter::new(writer);
    for rec in records {
        serde_json::to_writer(&mut w, &rec).map_err(std::io::Error::from)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_jsonl_file<T: Serialize>(path: &Path, records: impl IntoIterator<Item = T>) -> Result<(), CorpusError> {
    write_jsonl(File::create(path)?, records)
}

/// Writes passages as raw corpus JSONL.
pub fn write_corpus<'a>(path: &Path, passages: impl IntoIterator<Item = &'a Passage>) -> Result<(), CorpusError> {
    write_jsonl_file(path, passages)
}

/// Wire form of an annotated passage.
///
/// Offsets are not stored; they are recovered by locating tokens in the text.
/// The optional fields are set by the annotation and chunking stages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotatedRecord {
    pub id: String,
    pub source: Source,
    pub text: String,
    pub tokens: Vec<String>,
    pub spans: Vec<EntitySpan>,
    #[serde(default)]
    pub negative_types: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chunk_index: Option<usize>,
}

impl Record for AnnotatedRecord {
    fn check(&self) -> Result<(), String> {
        self.to_passage().map(|_| ())
    }
}

impl AnnotatedRecord {
    pub fn from_passage(ap: &AnnotatedPassage) -> Self {
        Self {
            id: ap.passage.id.clone(),
            source: ap.passage.source.clone(),
            text: ap.passage.text.clone(),
            tokens: ap.tokens.tokens.clone(),
            spans: ap.spans.clone(),
            negative_types: ap.negative_types.clone(),
            annotator: None,
            parent_id: None,
            chunk_index: None,
        }
    }

    pub fn with_annotator(mut self, annotator: impl Into<String>) -> Self {
        self.annotator = Some(annotator.into());
        self
    }

    pub fn to_passage(&self) -> Result<AnnotatedPassage, String> {
        let passage = Passage::new(self.id.clone(), self.source.clone(), self.text.clone());
        if passage.id.is_empty() {
            return Err("empty id".into());
        }
        let tokens = TokenSequence::align(&self.text, self.tokens.clone())?;
        let ap = AnnotatedPassage {
            passage,
            tokens,
            spans: self.spans.clone(),
            negative_types: self.negative_types.clone(),
        };
        ap.validate()?;
        Ok(ap)
    }
}

/// Reads a whole annotated JSONL file.
pub fn read_annotated(path: &Path, strict: bool) -> Result<Vec<AnnotatedPassage>, CorpusError> {
    let mut out = Vec::new();
    for rec in open_jsonl::<AnnotatedRecord>(path, strict)? {
        let rec = rec?;
        let ap = rec.to_passage().map_err(|reason| CorpusError::Invalid { id: rec.id.clone(), reason })?;
        out.push(ap);
    }
    Ok(out)
}

pub fn write_annotated<'a>(
    path: &Path,
    passages: impl IntoIterator<Item = &'a AnnotatedPassage>,
) -> Result<(), CorpusError> {
    write_jsonl_file(path, passages.into_iter().map(AnnotatedRecord::from_passage))
}
