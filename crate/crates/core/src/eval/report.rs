use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{match_spans, EvalError, MatchCounts};
use crate::corpus::{AnnotatedPassage, EntitySpan};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
    pub counts: MatchCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassageF1 {
    pub id: String,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub micro_f1: f64,
    pub micro_precision: f64,
    pub micro_recall: f64,
    pub macro_mean_f1: f64,
    pub macro_median_f1: f64,
    pub counts: MatchCounts,
    pub per_type: BTreeMap<String, TypeScores>,
    /// In gold order.
    pub per_passage_f1: Vec<PassageF1>,
}

/// Median with the even-count convention of averaging the middle pair.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len().is_multiple_of(2) { (v[mid - 1] + v[mid]) / 2.0 } else { v[mid] })
}

/// Scores predictions against gold passages by id.
///
/// Every gold passage needs a prediction and vice versa. Types seen in either
/// gold or predictions enter the macro averages; with no types at all both
/// macro values are 1.
pub fn report(gold: &[(String, Vec<EntitySpan>)], pred: &[(String, Vec<EntitySpan>)]) -> Result<EvalReport, EvalError> {
    let by_id: HashMap<&str, &Vec<EntitySpan>> = pred.iter().map(|(id, s)| (id.as_str(), s)).collect();
    let gold_ids: std::collections::HashSet<&str> = gold.iter().map(|(id, _)| id.as_str()).collect();
    let missing: Vec<String> = gold.iter().filter(|(id, _)| !by_id.contains_key(id.as_str())).map(|(id, _)| id.clone()).collect();
    if !missing.is_empty() {
        return Err(EvalError::MissingPredictions(missing));
    }
    let extra: Vec<String> = pred.iter().filter(|(id, _)| !gold_ids.contains(id.as_str())).map(|(id, _)| id.clone()).collect();
    if !extra.is_empty() {
        return Err(EvalError::UnexpectedPredictions(extra));
    }

    let mut total = MatchCounts::default();
    let mut per_type_counts: BTreeMap<String, MatchCounts> = BTreeMap::new();
    let mut per_passage = Vec::with_capacity(gold.len());
    for (id, g) in gold {
        let p = by_id[id.as_str()];
        let c = match_spans(g, p);
        total.add(c);
        per_passage.push(PassageF1 { id: id.clone(), f1: c.f1() });
        for (ty, tc) in super::match_by_type(g, p) {
            per_type_counts.entry(ty).or_default().add(tc);
        }
    }
    let per_type: BTreeMap<String, TypeScores> = per_type_counts
        .into_iter()
        .map(|(ty, c)| {
            let scores = TypeScores { precision: c.precision(), recall: c.recall(), f1: c.f1(), support: c.tp + c.fn_, counts: c };
            (ty, scores)
        })
        .collect();
    let f1s: Vec<f64> = per_type.values().map(|s| s.f1).collect();
    let (macro_mean_f1, macro_median_f1) = if f1s.is_empty() {
        (1.0, 1.0)
    } else {
        (f1s.iter().sum::<f64>() / f1s.len() as f64, median(&f1s).expect("non-empty"))
    };
    Ok(EvalReport {
        micro_f1: total.f1(),
        micro_precision: total.precision(),
        micro_recall: total.recall(),
        macro_mean_f1,
        macro_median_f1,
        counts: total,
        per_type,
        per_passage_f1: per_passage,
    })
}

/// [`report`] over annotated passages, keyed by passage id.
pub fn report_passages(gold: &[AnnotatedPassage], pred: &[AnnotatedPassage]) -> Result<EvalReport, EvalError> {
    let key = |ps: &[AnnotatedPassage]| ps.iter().map(|p| (p.id().to_string(), p.spans.clone())).collect::<Vec<_>>();
    report(&key(gold), &key(pred))
}
