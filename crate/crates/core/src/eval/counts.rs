use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::EntitySpan;

/// True positives, false positives and false negatives.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchCounts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl MatchCounts {
    pub fn add(&mut self, other: MatchCounts) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
    }

    /// `tp / (tp + fp)`, 0 when nothing was predicted.
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    /// `tp / (tp + fn)`, 0 when there is no gold.
    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    /// `2tp / (2tp + fp + fn)`; 1 when there is neither gold nor prediction.
    pub fn f1(&self) -> f64 {
        let denom = 2 * self.tp + self.fp + self.fn_;
        if denom == 0 {
            1.0
        } else {
            (2 * self.tp) as f64 / denom as f64
        }
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Exact (start, end, type) matching with multiplicity.
pub fn match_spans(gold: &[EntitySpan], pred: &[EntitySpan]) -> MatchCounts {
    let mut remaining: HashMap<&EntitySpan, usize> = HashMap::new();
    for g in gold {
        *remaining.entry(g).or_default() += 1;
    }
    let mut tp = 0;
    for p in pred {
        if let Some(n) = remaining.get_mut(p) {
            if *n > 0 {
                *n -= 1;
                tp += 1;
            }
        }
    }
    MatchCounts { tp, fp: pred.len() - tp, fn_: gold.len() - tp }
}

/// [`match_spans`] broken down by entity type (gold and predicted types).
pub fn match_by_type(gold: &[EntitySpan], pred: &[EntitySpan]) -> HashMap<String, MatchCounts> {
    let mut out: HashMap<String, MatchCounts> = HashMap::new();
    let mut types: Vec<&str> = gold.iter().chain(pred).map(|s| s.entity_type.as_str()).collect();
    types.sort_unstable();
    types.dedup();
    for t in types {
        let g: Vec<EntitySpan> = gold.iter().filter(|s| s.entity_type == t).cloned().collect();
        let p: Vec<EntitySpan> = pred.iter().filter(|s| s.entity_type == t).cloned().collect();
        out.insert(t.to_string(), match_spans(&g, &p));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(start: usize, ty: &str) -> EntitySpan {
        EntitySpan::new(start, start, ty)
    }

    #[test]
    fn hand_fixture() {
        let gold = [s(0, "a"), s(1, "a"), s(2, "b")];
        let pred = [s(0, "a"), s(1, "a"), s(3, "b")];
        let c = match_spans(&gold, &pred);
        assert_eq!(c, MatchCounts { tp: 2, fp: 1, fn_: 1 });
        assert_eq!(c.precision(), 2.0 / 3.0);
        assert_eq!(c.recall(), 2.0 / 3.0);
        assert_eq!(c.f1(), 2.0 / 3.0);
    }

    #[test]
    fn identity_empty_and_duplicates() {
        let gold = [s(0, "a"), s(4, "b")];
        assert_eq!(match_spans(&gold, &gold), MatchCounts { tp: 2, fp: 0, fn_: 0 });
        assert_eq!(match_spans(&gold, &[]), MatchCounts { tp: 0, fp: 0, fn_: 2 });
        assert_eq!(match_spans(&[s(0, "a")], &[s(0, "a"), s(0, "a")]), MatchCounts { tp: 1, fp: 1, fn_: 0 });
        assert_eq!(match_spans(&[s(0, "a")], &[s(0, "b")]).tp, 0);
        assert_eq!(MatchCounts::default().f1(), 1.0);
        assert_eq!(MatchCounts { tp: 0, fp: 1, fn_: 0 }.f1(), 0.0);
    }

    #[test]
    fn by_type_sums_to_total() {
        let gold = [s(0, "a"), s(1, "b"), s(2, "b")];
        let pred = [s(0, "a"), s(1, "c"), s(2, "b")];
        let by = match_by_type(&gold, &pred);
        assert_eq!(by.len(), 3);
        let mut total = MatchCounts::default();
        by.values().for_each(|c| total.add(*c));
        assert_eq!(total, match_spans(&gold, &pred));
    }
}
