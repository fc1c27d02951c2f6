//! Heuristic passage-quality filtering.
//!
//! Two profiles exist: a general one with eight lexical/structural rules and a
//! stricter four-rule profile for treatment-regimen snippets. Every rule of the
//! active profile is evaluated so a report always carries full diagnostics.

mod metrics;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Passage, Source};
pub use metrics::{newline_clusters, sentences, words, TextStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    MaxNonAlphaWords,
    MinSentences,
    MinAvgSentenceLength,
    MaxUppercaseRatio,
    MaxWordFrequency,
    MaxNewlineClusters,
    MinLexicalDiversity,
    MinStopwordRatio,
    StartsCapital,
    ContainsDigit,
    EndsWithPeriod,
    MinTwoSentences,
}

impl Rule {
    pub const GENERAL: [Rule; 8] = [
        Rule::MaxNonAlphaWords,
        Rule::MinSentences,
        Rule::MinAvgSentenceLength,
        Rule::MaxUppercaseRatio,
        Rule::MaxWordFrequency,
        Rule::MaxNewlineClusters,
        Rule::MinLexicalDiversity,
        Rule::MinStopwordRatio,
    ];
    pub const REGIMEN: [Rule; 4] =
        [Rule::StartsCapital, Rule::ContainsDigit, Rule::EndsWithPeriod, Rule::MinTwoSentences];

    pub fn id(self) -> &'static str {
        match self {
            Rule::MaxNonAlphaWords => "max_non_alpha_words",
            Rule::MinSentences => "min_sentences",
            Rule::MinAvgSentenceLength => "min_avg_sentence_length",
            Rule::MaxUppercaseRatio => "max_uppercase_ratio",
            Rule::MaxWordFrequency => "max_word_frequency",
            Rule::MaxNewlineClusters => "max_newline_clusters",
            Rule::MinLexicalDiversity => "min_lexical_diversity",
            Rule::MinStopwordRatio => "min_stopword_ratio",
            Rule::StartsCapital => "starts_capital",
            Rule::ContainsDigit => "contains_digit",
            Rule::EndsWithPeriod => "ends_with_period",
            Rule::MinTwoSentences => "min_two_sentences",
        }
    }
}

/// Bounds of the general profile. Every bound is inclusive on the passing side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeneralThresholds {
    /// Maximum share of words containing a character that is not a letter,
    /// apostrophe or hyphen.
    pub max_non_alpha_word_ratio: f64,
    pub min_sentences: usize,
    /// Minimum mean words per sentence.
    pub min_avg_sentence_words: f64,
    /// Maximum share of uppercase letters among alphabetic characters.
    pub max_uppercase_ratio: f64,
    /// Maximum share of the word count taken by any single word.
    pub max_word_frequency_ratio: f64,
    /// Newline clusters allowed per sentence (0.5 = one per two sentences),
    /// rounded up over the sentence count.
    pub max_newline_clusters_per_sentence: f64,
    /// Minimum unique/total word ratio.
    pub min_lexical_diversity: f64,
    pub min_stopword_ratio: f64,
}

impl Default for GeneralThresholds {
    fn default() -> Self {
        Self {
            max_non_alpha_word_ratio: 0.30,
            min_sentences: 6,
            min_avg_sentence_words: 10.0,
            max_uppercase_ratio: 0.20,
            max_word_frequency_ratio: 0.20,
            max_newline_clusters_per_sentence: 0.5,
            min_lexical_diversity: 0.10,
            min_stopword_ratio: 0.05,
        }
    }
}

impl GeneralThresholds {
    pub fn validate(&self) -> Result<(), String> {
        let ratios = [
            ("max_non_alpha_word_ratio", self.max_non_alpha_word_ratio),
            ("max_uppercase_ratio", self.max_uppercase_ratio),
            ("max_word_frequency_ratio", self.max_word_frequency_ratio),
            ("min_lexical_diversity", self.min_lexical_diversity),
            ("min_stopword_ratio", self.min_stopword_ratio),
        ];
        for (name, v) in ratios {
            if !(0.0..=1.0).contains(&v) {
                return Err(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        if !(self.min_avg_sentence_words >= 0.0 && self.max_newline_clusters_per_sentence >= 0.0) {
            return Err("sentence-length and newline bounds must be non-negative".into());
        }
        Ok(())
    }
}

/// Bounds of the regimen profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegimenThresholds {
    pub min_well_formed_sentences: usize,
    /// Words a sentence needs, besides a leading capital, to count as well formed.
    pub min_words_per_sentence: usize,
}

impl Default for RegimenThresholds {
    fn default() -> Self {
        Self { min_well_formed_sentences: 2, min_words_per_sentence: 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileName {
    General,
    Regimen,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FilterProfile {
    General(GeneralThresholds),
    Regimen(RegimenThresholds),
}

impl FilterProfile {
    pub fn general() -> Self {
        FilterProfile::General(GeneralThresholds::default())
    }

    pub fn regimen() -> Self {
        FilterProfile::Regimen(RegimenThresholds::default())
    }

    pub fn name(&self) -> ProfileName {
        match self {
            FilterProfile::General(_) => ProfileName::General,
            FilterProfile::Regimen(_) => ProfileName::Regimen,
        }
    }

    pub fn rules(&self) -> &'static [Rule] {
        match self {
            FilterProfile::General(_) => &Rule::GENERAL,
            FilterProfile::Regimen(_) => &Rule::REGIMEN,
        }
    }

    /// Rule id to bound. Boolean regimen rules have bound 1.
    pub fn thresholds(&self) -> BTreeMap<&'static str, f64> {
        match self {
            FilterProfile::General(t) => BTreeMap::from([
                (Rule::MaxNonAlphaWords.id(), t.max_non_alpha_word_ratio),
                (Rule::MinSentences.id(), t.min_sentences as f64),
                (Rule::MinAvgSentenceLength.id(), t.min_avg_sentence_words),
                (Rule::MaxUppercaseRatio.id(), t.max_uppercase_ratio),
                (Rule::MaxWordFrequency.id(), t.max_word_frequency_ratio),
                (Rule::MaxNewlineClusters.id(), t.max_newline_clusters_per_sentence),
                (Rule::MinLexicalDiversity.id(), t.min_lexical_diversity),
                (Rule::MinStopwordRatio.id(), t.min_stopword_ratio),
            ]),
            FilterProfile::Regimen(t) => BTreeMap::from([
                (Rule::StartsCapital.id(), 1.0),
                (Rule::ContainsDigit.id(), 1.0),
                (Rule::EndsWithPeriod.id(), 1.0),
                (Rule::MinTwoSentences.id(), t.min_well_formed_sentences as f64),
            ]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    #[serde(rename = "id")]
    pub passage_id: String,
    pub accepted: bool,
    pub failed_rules: Vec<Rule>,
    pub metrics: BTreeMap<String, f64>,
}

/// Scores a passage against a profile.
pub fn assess(passage: &Passage, profile: &FilterProfile) -> QualityReport {
    let stats = TextStats::compute(&passage.text);
    let mut metrics = BTreeMap::new();
    let mut failed = Vec::new();
    let mut check = |rule: Rule, value: f64, pass: bool| {
        metrics.insert(rule.id().to_string(), value);
        if !pass {
            failed.push(rule);
        }
    };

    match profile {
        FilterProfile::General(t) => {
            let w = stats.word_count;
            let degenerate = w == 0;
            // ratios over zero words take their worst-case value
            let ratio = |num: usize, worst: f64| if degenerate { worst } else { num as f64 / w as f64 };

            let non_alpha = ratio(stats.non_alpha_words, 1.0);
            check(Rule::MaxNonAlphaWords, non_alpha, !degenerate && non_alpha <= t.max_non_alpha_word_ratio);

            let n_sent = stats.sentence_count;
            check(Rule::MinSentences, n_sent as f64, !degenerate && n_sent >= t.min_sentences);

            let avg = if n_sent == 0 { 0.0 } else { w as f64 / n_sent as f64 };
            check(Rule::MinAvgSentenceLength, avg, !degenerate && avg >= t.min_avg_sentence_words);

            let upper = if stats.alphabetic_chars == 0 {
                1.0
            } else {
                stats.uppercase_chars as f64 / stats.alphabetic_chars as f64
            };
            check(Rule::MaxUppercaseRatio, upper, !degenerate && upper <= t.max_uppercase_ratio);

            let top = ratio(stats.most_frequent_word_count, 1.0);
            check(Rule::MaxWordFrequency, top, !degenerate && top <= t.max_word_frequency_ratio);

            let limit = (n_sent as f64 * t.max_newline_clusters_per_sentence).ceil();
            let clusters = stats.newline_clusters as f64;
            check(Rule::MaxNewlineClusters, clusters, !degenerate && clusters <= limit);

            let diversity = ratio(stats.unique_words, 0.0);
            check(Rule::MinLexicalDiversity, diversity, !degenerate && diversity >= t.min_lexical_diversity);

            let stop = ratio(stats.stopwords, 0.0);
            check(Rule::MinStopwordRatio, stop, !degenerate && stop >= t.min_stopword_ratio);

            metrics.insert("word_count".into(), w as f64);
            metrics.insert("newline_cluster_limit".into(), limit);
        }
        FilterProfile::Regimen(t) => {
            let trimmed = passage.text.trim();
            let starts = trimmed.chars().next().is_some_and(char::is_uppercase);
            check(Rule::StartsCapital, f64::from(u8::from(starts)), starts);

            let digits = trimmed.chars().filter(char::is_ascii_digit).count();
            check(Rule::ContainsDigit, digits as f64, digits >= 1);

            let ends = trimmed.ends_with('.');
            check(Rule::EndsWithPeriod, f64::from(u8::from(ends)), ends);

            let well_formed = sentences(&passage.text)
                .iter()
                .filter(|s| {
                    s.chars().next().is_some_and(char::is_uppercase) && words(s).count() >= t.min_words_per_sentence
                })
                .count();
            check(Rule::MinTwoSentences, well_formed as f64, well_formed >= t.min_well_formed_sentences);
        }
    }

    QualityReport { passage_id: passage.id.clone(), accepted: failed.is_empty(), failed_rules: failed, metrics }
}

/// Scores a passage against the default regimen profile.
pub fn assess_regimen(passage: &Passage) -> QualityReport {
    assess(passage, &FilterProfile::regimen())
}

#[derive(Debug, Error)]
pub enum QualityError {
    #[error("no filter profile assigned for source {0}")]
    UncoveredSource(Source),
}

/// Which profile applies to which source.
#[derive(Debug, Clone)]
pub struct ProfileAssignment {
    pub default: Option<FilterProfile>,
    pub per_source: BTreeMap<Source, FilterProfile>,
}

impl Default for ProfileAssignment {
    /// General rules everywhere, regimen rules for treatment-regimen passages.
    fn default() -> Self {
        Self::with_general(GeneralThresholds::default(), RegimenThresholds::default())
    }
}

impl ProfileAssignment {
    pub fn with_general(general: GeneralThresholds, regimen: RegimenThresholds) -> Self {
        Self {
            default: Some(FilterProfile::General(general)),
            per_source: BTreeMap::from([(Source::TrialRegimen, FilterProfile::Regimen(regimen))]),
        }
    }

    pub fn profile_for(&self, source: &Source) -> Result<&FilterProfile, QualityError> {
        self.per_source
            .get(source)
            .or(self.default.as_ref())
            .ok_or_else(|| QualityError::UncoveredSource(source.clone()))
    }
}

/// A passage together with its verdict.
#[derive(Debug, Clone)]
pub struct Screened {
    pub passage: Passage,
    pub report: QualityReport,
}

/// Lazily screens a passage stream; input order is preserved and a report is
/// produced for every input.
pub fn filter_corpus<'a, I, E>(
    passages: I,
    assignment: &'a ProfileAssignment,
) -> impl Iterator<Item = Result<Screened, E>> + 'a
where
    I: IntoIterator<Item = Result<Passage, E>> + 'a,
    E: From<QualityError> + 'a,
{
    passages.into_iter().map(move |p| {
        let passage = p?;
        let profile = assignment.profile_for(&passage.source)?;
        let report = assess(&passage, profile);
        Ok(Screened { passage, report })
    })
}

/// Parallel screening of an in-memory batch; reports come back in input order.
pub fn assess_batch(passages: &[Passage], assignment: &ProfileAssignment) -> Result<Vec<QualityReport>, QualityError> {
    passages
        .par_iter()
        .map(|p| assignment.profile_for(&p.source).map(|prof| assess(p, prof)))
        .collect()
}
