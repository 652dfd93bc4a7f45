//! License detection from raw text.
//!
//! Two stages: a bag-of-words classifier over the 12 most common licenses
//! ([`classifier`]), and a Sørensen–Dice word-set similarity match against
//! all 16 canonical texts. The classifier answers first; whenever it refuses
//! (best posterior under its threshold, or the text belongs to one of the
//! four licenses it was never trained on), the Dice stage decides.

mod classifier;
mod diff;

pub use classifier::ClassifierModel;
pub use diff::{diff_words, DiffRun};

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::corpus::{Corpus, LicenseId};
use crate::error::Result;

/// Inclusive acceptance threshold for the Dice stage: a text is attributed
/// to a license only when at least 98% of its word set coincides with the
/// canonical word set.
pub const DICE_THRESHOLD: f64 = 0.98;

/// A deduplicated set of normalized words. The Dice coefficient is defined
/// over these sets; word order and repetition do not participate.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TokenSet {
    tokens: BTreeSet<String>,
}

impl TokenSet {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.tokens.contains(token)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(String::as_str)
    }

    fn intersection_len(&self, other: &TokenSet) -> usize {
        // Probe the larger set with the smaller one.
        let (small, large) = if self.tokens.len() <= other.tokens.len() {
            (&self.tokens, &other.tokens)
        } else {
            (&other.tokens, &self.tokens)
        };
        small.iter().filter(|t| large.contains(*t)).count()
    }
}

impl FromIterator<String> for TokenSet {
    fn from_iter<I: IntoIterator<Item = String>>(iter: I) -> Self {
        TokenSet { tokens: iter.into_iter().collect() }
    }
}

/// Lowercases and splits `text` into normalized words: every maximal run of
/// alphanumeric characters is one word, everything else separates words.
/// Duplicates collapse; see [`normalize_sequence`] for the ordered variant.
pub fn normalize_tokens(text: &str) -> TokenSet {
    normalize_sequence(text).into_iter().collect()
}

/// The ordered, repetition-preserving counterpart of [`normalize_tokens`],
/// used by the word diff and by classifier count vectors.
pub fn normalize_sequence(text: &str) -> Vec<String> {
    let mut words = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            current.extend(ch.to_lowercase());
        } else if !current.is_empty() {
            words.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        words.push(current);
    }
    words
}

/// Sørensen–Dice coefficient: `2·|x∩y| / (|x|+|y|)`.
///
/// Both sets empty is defined as 1.0 (two empty texts are identical); the
/// formula itself would divide by zero there.
pub fn dice(x: &TokenSet, y: &TokenSet) -> f64 {
    if x.is_empty() && y.is_empty() {
        return 1.0;
    }
    2.0 * x.intersection_len(y) as f64 / (x.len() + y.len()) as f64
}

/// How a license id was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetectionMethod {
    /// Bag-of-words classifier posterior cleared its threshold.
    Classifier,
    /// Dice similarity against a canonical text cleared 0.98.
    Dice,
    /// A declared license name (pom metadata) matched the pattern table.
    DeclaredName,
    /// A remote metadata provider named the license.
    Provider,
}

impl fmt::Display for DetectionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DetectionMethod::Classifier => "classifier",
            DetectionMethod::Dice => "dice",
            DetectionMethod::DeclaredName => "declared-name",
            DetectionMethod::Provider => "provider",
        })
    }
}

/// Outcome of a detection: the license (possibly `Unknown`), which stage
/// produced it, the winning score (Dice coefficient or posterior), and the
/// best runner-up for diagnostics.
#[derive(Clone, Debug, Serialize)]
pub struct DetectionResult {
    pub license: LicenseId,
    pub method: DetectionMethod,
    pub score: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runner_up: Option<(LicenseId, f64)>,
}

/// Detection front end: borrows the corpus and owns a classifier model.
pub struct Detector<'c> {
    corpus: &'c Corpus,
    model: ClassifierModel,
}

impl<'c> Detector<'c> {
    pub fn new(corpus: &'c Corpus, model: ClassifierModel) -> Detector<'c> {
        Detector { corpus, model }
    }

    /// Detector over the embedded corpus and the bundled model.
    pub fn embedded() -> Detector<'static> {
        Detector::new(Corpus::embedded(), ClassifierModel::embedded().clone())
    }

    pub fn corpus(&self) -> &'c Corpus {
        self.corpus
    }

    pub fn model(&self) -> &ClassifierModel {
        &self.model
    }

    /// Full two-stage pipeline: classifier first, Dice on refusal.
    pub fn detect(&self, text: &str) -> DetectionResult {
        let by_classifier = self.classify(text);
        if by_classifier.license != LicenseId::Unknown {
            return by_classifier;
        }
        self.detect_dice(text)
    }

    /// Classifier stage alone (never panics at classify time; model
    /// well-formedness is checked at load).
    pub fn classify(&self, text: &str) -> DetectionResult {
        self.model.classify(text)
    }

    /// Dice stage alone: best canonical word-set match at or above 0.98, or
    /// `Unknown` carrying the best score observed. Ties break toward the
    /// lexicographically smaller SPDX id; the runner-up is recorded.
    pub fn detect_dice(&self, text: &str) -> DetectionResult {
        let tokens = normalize_tokens(text);
        let mut best: Option<(LicenseId, f64)> = None;
        let mut runner_up: Option<(LicenseId, f64)> = None;
        // SUPPORTED is in lexicographic id order, and only a strictly better
        // score displaces the leader, so equal scores keep the smaller id.
        for id in LicenseId::SUPPORTED {
            let record = self.corpus.lookup(id).expect("supported id has a record");
            let score = dice(&tokens, &record.word_set);
            match best {
                Some((_, best_score)) if score <= best_score => {
                    if runner_up.is_none_or(|(_, r)| score > r) {
                        runner_up = Some((id, score));
                    }
                }
                _ => {
                    runner_up = best;
                    best = Some((id, score));
                }
            }
        }
        let (license, score) = best.expect("at least one supported license");
        // An empty token set scores 0.0 everywhere and stays Unknown: an
        // empty file is not a license even though dice(∅,∅) = 1.0.
        if score >= DICE_THRESHOLD {
            DetectionResult { license, method: DetectionMethod::Dice, score, runner_up }
        } else {
            DetectionResult {
                license: LicenseId::Unknown,
                method: DetectionMethod::Dice,
                score,
                runner_up,
            }
        }
    }

    /// Word-level diff of `text` against the canonical text of `id`:
    /// deletions are canonical words missing from `text`, insertions are
    /// words `text` added. Sequences (order and repetition preserved), not
    /// sets. Errors on `unknown`/`none`.
    pub fn diff_against_canonical(&self, text: &str, id: LicenseId) -> Result<Vec<DiffRun>> {
        let record = self.corpus.lookup(id)?;
        let canonical = normalize_sequence(&record.canonical_text);
        let current = normalize_sequence(text);
        Ok(diff_words(&canonical, &current))
    }
}
