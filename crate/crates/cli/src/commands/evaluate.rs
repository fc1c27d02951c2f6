use std::collections::{HashMap, HashSet};
use std::path::Path;

use biomedner::corpus::{open_jsonl, read_annotated, write_annotated, write_jsonl_file, Record};
use biomedner::eval::{n_shot_subset, report_passages, wilcoxon_one_sided, EvalError, PassageF1};
use serde::Serialize;

use super::write_json;
use crate::args::{CompareArgs, EvaluateArgs, FewshotArgs};
use crate::config::PipelineConfig;
use crate::failure::Failure;

pub fn evaluate(args: EvaluateArgs, config: PipelineConfig) -> Result<(), Failure> {
    config.validate()?;
    let gold = read_annotated(&args.gold, true)?;
    let pred = read_annotated(&args.pred, true)?;
    let report = report_passages(&gold, &pred)?;
    if let Some(path) = &args.per_passage {
        write_jsonl_file(path, &report.per_passage_f1)?;
    }
    write_json(&report, args.out.as_deref())?;
    eprintln!(
        "evaluate: micro F1 {:.4}, macro mean {:.4}, macro median {:.4}",
        report.micro_f1, report.macro_mean_f1, report.macro_median_f1
    );
    Ok(())
}

#[derive(Debug, Serialize)]
struct Comparison {
    passages: usize,
    mean_f1_a: f64,
    mean_f1_b: f64,
    #[serde(flatten)]
    test: biomedner::eval::WilcoxonResult,
}

impl Record for PassageLine {
    fn check(&self) -> Result<(), String> {
        if self.id.is_empty() {
            return Err("empty id".into());
        }
        if !(0.0..=1.0).contains(&self.f1) {
            return Err(format!("f1 {} outside [0, 1]", self.f1));
        }
        Ok(())
    }
}

#[derive(Debug, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct PassageLine {
    id: String,
    f1: f64,
}

fn read_series(path: &Path) -> Result<Vec<PassageF1>, Failure> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for line in open_jsonl::<PassageLine>(path, true)? {
        let line = line.map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
        if !seen.insert(line.id.clone()) {
            return Err(Failure::data(format!("{}: duplicate passage id {}", path.display(), line.id)));
        }
        out.push(PassageF1 { id: line.id, f1: line.f1 });
    }
    Ok(out)
}

/// Pairs B's scores with A's by passage id, in A's order.
fn pair(a: &[PassageF1], b: &[PassageF1]) -> Result<(Vec<f64>, Vec<f64>), Failure> {
    let by_id: HashMap<&str, f64> = b.iter().map(|p| (p.id.as_str(), p.f1)).collect();
    let missing: Vec<String> = a.iter().filter(|p| !by_id.contains_key(p.id.as_str())).map(|p| p.id.clone()).collect();
    if !missing.is_empty() {
        return Err(EvalError::MissingPredictions(missing).into());
    }
    let a_ids: HashSet<&str> = a.iter().map(|p| p.id.as_str()).collect();
    let extra: Vec<String> = b.iter().filter(|p| !a_ids.contains(p.id.as_str())).map(|p| p.id.clone()).collect();
    if !extra.is_empty() {
        return Err(EvalError::UnexpectedPredictions(extra).into());
    }
    Ok((a.iter().map(|p| p.f1).collect(), a.iter().map(|p| by_id[p.id.as_str()]).collect()))
}

pub fn compare(args: CompareArgs, config: PipelineConfig) -> Result<(), Failure> {
    config.validate()?;
    let (series_a, series_b) = match &args.gold {
        Some(gold) => {
            let gold = read_annotated(gold, true)?;
            let a = report_passages(&gold, &read_annotated(&args.a, true)?)?.per_passage_f1;
            let b = report_passages(&gold, &read_annotated(&args.b, true)?)?.per_passage_f1;
            (a, b)
        }
        None => (read_series(&args.a)?, read_series(&args.b)?),
    };
    let (fa, fb) = pair(&series_a, &series_b)?;
    let test = wilcoxon_one_sided(&fa, &fb)?;
    let mean = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
    let result = Comparison { passages: fa.len(), mean_f1_a: mean(&fa), mean_f1_b: mean(&fb), test };
    write_json(&result, args.out.as_deref())?;
    eprintln!("compare: W+ = {}, n = {}, p = {:.6}", test.statistic, test.n_effective, test.p_value);
    Ok(())
}

pub fn fewshot(args: FewshotArgs, mut config: PipelineConfig) -> Result<(), Failure> {
    if let Some(n) = args.n {
        config.eval.nshot = n;
    }
    config.validate()?;
    let split = read_annotated(&args.input, true)?;
    std::fs::create_dir_all(&args.out_dir)?;
    for &n in &config.eval.nshot {
        let (train, val) = n_shot_subset(&split, n, config.seed)?;
        write_annotated(&args.out_dir.join(format!("train_{n}.jsonl")), &train)?;
        write_annotated(&args.out_dir.join(format!("val_{n}.jsonl")), &val)?;
    }
    config.write_sidecar(&args.out_dir.join("fewshot"))?;
    eprintln!("fewshot: wrote subsets for n = {:?}", config.eval.nshot);
    Ok(())
}
