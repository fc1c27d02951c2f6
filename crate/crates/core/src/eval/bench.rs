//! Inference throughput sweep over batch sizes.

use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use crate::corpus::Passage;

const UMLS_FIXTURE: &str = include_str!("../../fixtures/umls_semantic_types.txt");

/// The 127 UMLS semantic type names used as the full benchmark label set.
pub fn umls_semantic_types() -> Vec<String> {
    UMLS_FIXTURE.lines().map(str::trim).filter(|l| !l.is_empty()).map(str::to_string).collect()
}

/// Batch sizes 1, 2, 4, ..., 64.
pub fn default_batch_sizes() -> Vec<usize> {
    (0..=6).map(|i| 1 << i).collect()
}

/// Whitespace-delimited words in a passage.
pub fn word_count(passage: &Passage) -> usize {
    passage.text.split_whitespace().count()
}

/// Why a batch could not be processed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BenchFailure {
    ResourceExhausted(String),
    Other(String),
}

/// Source of elapsed time for a measured pass.
pub trait Timer {
    fn start(&mut self);
    /// Seconds since the matching [`Timer::start`].
    fn stop(&mut self) -> f64;
}

#[derive(Debug, Default)]
pub struct WallTimer(Option<Instant>);

impl Timer for WallTimer {
    fn start(&mut self) {
        self.0 = Some(Instant::now());
    }
    fn stop(&mut self) -> f64 {
        self.0.take().expect("timer started").elapsed().as_secs_f64()
    }
}

/// Runs inference over one batch.
pub type BenchFn<'a> = Box<dyn FnMut(&[Passage]) -> Result<(), BenchFailure> + 'a>;

/// One configuration to sweep: a prediction function over a batch.
pub struct BenchCase<'a> {
    pub mode: String,
    pub label_set: String,
    pub run: BenchFn<'a>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    ResourceExhausted,
    Failed,
    /// Not attempted because a smaller batch size already exhausted resources.
    Skipped,
}

impl CellStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Ok => "ok",
            Self::ResourceExhausted => "resource_exhausted",
            Self::Failed => "failed",
            Self::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchCell {
    pub mode: String,
    pub label_set: String,
    pub batch_size: usize,
    pub words_per_second: Option<f64>,
    pub status: CellStatus,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub words: usize,
    pub cells: Vec<BenchCell>,
}

impl BenchReport {
    /// Highest throughput among completed cells of a configuration.
    pub fn peak(&self, mode: &str, label_set: &str) -> Option<f64> {
        self.cells
            .iter()
            .filter(|c| c.mode == mode && c.label_set == label_set)
            .filter_map(|c| c.words_per_second)
            .max_by(f64::total_cmp)
    }

    /// CSV with header `mode,label_set,batch_size,words_per_second,status`.
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "mode,label_set,batch_size,words_per_second,status")?;
        for c in &self.cells {
            let wps = c.words_per_second.map(|v| format!("{v:.3}")).unwrap_or_default();
            writeln!(w, "{},{},{},{},{}", c.mode, c.label_set, c.batch_size, wps, c.status.as_str())?;
        }
        Ok(())
    }
}

/// Measures words per second for every case and batch size.
///
/// Each cell first processes one untimed warm-up batch, then times a full
/// pass over `passages` in batches of that size. A failure is recorded on its
/// cell; after resource exhaustion the larger batch sizes of that case are
/// marked skipped.
pub fn bench_throughput(
    cases: &mut [BenchCase<'_>],
    passages: &[Passage],
    batch_sizes: &[usize],
    timer: &mut dyn Timer,
) -> BenchReport {
    let words: usize = passages.iter().map(word_count).sum();
    let mut cells = Vec::new();
    for case in cases.iter_mut() {
        let mut exhausted = false;
        for &bs in batch_sizes {
            let mut cell = BenchCell {
                mode: case.mode.clone(),
                label_set: case.label_set.clone(),
                batch_size: bs,
                words_per_second: None,
                status: CellStatus::Skipped,
                detail: None,
            };
            if exhausted || passages.is_empty() {
                cells.push(cell);
                continue;
            }
            let outcome = (case.run)(&passages[..bs.min(passages.len())]).and_then(|()| {
                timer.start();
                let result = passages.chunks(bs).try_for_each(|batch| (case.run)(batch));
                let seconds = timer.stop();
                result.map(|()| seconds)
            });
            match outcome {
                Ok(seconds) => {
                    cell.status = CellStatus::Ok;
                    cell.words_per_second = Some(if seconds > 0.0 { words as f64 / seconds } else { f64::INFINITY });
                }
                Err(BenchFailure::ResourceExhausted(msg)) => {
                    cell.status = CellStatus::ResourceExhausted;
                    cell.detail = Some(msg);
                    exhausted = true;
                }
                Err(BenchFailure::Other(msg)) => {
                    cell.status = CellStatus::Failed;
                    cell.detail = Some(msg);
                }
            }
            cells.push(cell);
        }
    }
    BenchReport { words, cells }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Source;

    struct FixedTimer(f64);
    impl Timer for FixedTimer {
        fn start(&mut self) {}
        fn stop(&mut self) -> f64 {
            self.0
        }
    }

    fn passages(n: usize, words: usize) -> Vec<Passage> {
        (0..n).map(|i| Passage::new(format!("p{i}"), Source::Pubmed, vec!["word"; words].join(" "))).collect()
    }

    #[test]
    fn bundled_label_set_has_127_unique_types() {
        let labels = umls_semantic_types();
        assert_eq!(labels.len(), 127);
        let unique: std::collections::HashSet<_> = labels.iter().collect();
        assert_eq!(unique.len(), 127);
    }

    #[test]
    fn words_per_second_is_words_over_time() {
        let ps = passages(10, 100);
        let mut calls = Vec::new();
        let mut cases = vec![BenchCase {
            mode: "bi".into(),
            label_set: "full127".into(),
            run: Box::new(|b: &[Passage]| {
                calls.push(b.len());
                Ok(())
            }),
        }];
        let report = bench_throughput(&mut cases, &ps, &[4], &mut FixedTimer(2.0));
        drop(cases);
        assert_eq!(report.words, 1000);
        assert_eq!(report.cells[0].words_per_second, Some(500.0));
        // Warm-up batch, then 4 + 4 + 2.
        assert_eq!(calls, vec![4, 4, 4, 2]);
        assert_eq!(report.peak("bi", "full127"), Some(500.0));
    }

    #[test]
    fn exhaustion_is_recorded_and_stops_the_sweep() {
        let ps = passages(8, 3);
        let mut cases = vec![BenchCase {
            mode: "uni".into(),
            label_set: "dataset".into(),
            run: Box::new(|b: &[Passage]| {
                if b.len() >= 4 {
                    Err(BenchFailure::ResourceExhausted("out of memory".into()))
                } else {
                    Ok(())
                }
            }),
        }];
        let report = bench_throughput(&mut cases, &ps, &default_batch_sizes(), &mut FixedTimer(1.0));
        let statuses: Vec<&str> = report.cells.iter().map(|c| c.status.as_str()).collect();
        assert_eq!(statuses, ["ok", "ok", "resource_exhausted", "skipped", "skipped", "skipped", "skipped"]);
        assert_eq!(report.peak("uni", "dataset"), Some(24.0));
        let mut csv = Vec::new();
        report.write_csv(&mut csv).unwrap();
        let csv = String::from_utf8(csv).unwrap();
        assert!(csv.starts_with("mode,label_set,batch_size,words_per_second,status\nuni,dataset,1,24.000,ok\n"));
        assert!(csv.contains("uni,dataset,4,,resource_exhausted"));
    }
}
