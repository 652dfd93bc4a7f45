//! Bag-of-words classifier: count vectorization over a fixed vocabulary,
//! one linear score per class, softmax posteriors, and a refusal threshold.
//!
//! The model ships as a versioned JSON file embedded at build time
//! (`data/model.json`, produced by the repo's training tool) and can be
//! overridden from a path at startup. Malformed models fail at load; the
//! classify path itself is total.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::corpus::LicenseId;
use crate::detector::{normalize_sequence, DetectionMethod, DetectionResult};
use crate::error::{Error, Result};

const EMBEDDED_MODEL_JSON: &str = include_str!("../../data/model.json");

static EMBEDDED: LazyLock<ClassifierModel> = LazyLock::new(|| {
    ClassifierModel::from_json(EMBEDDED_MODEL_JSON)
        .expect("embedded model is validated by the training tool and tests")
});

#[derive(Clone, Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    posterior_threshold: f64,
    classes: Vec<LicenseId>,
    vocabulary: BTreeMap<String, usize>,
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
}

/// A loaded, validated classifier model.
#[derive(Clone)]
pub struct ClassifierModel {
    file: ModelFile,
}

impl ClassifierModel {
    /// The model bundled into the binary.
    pub fn embedded() -> &'static ClassifierModel {
        &EMBEDDED
    }

    pub fn from_json(json: &str) -> Result<ClassifierModel> {
        let file: ModelFile = serde_json::from_str(json)
            .map_err(|e| Error::Model { detail: e.to_string() })?;
        Self::validate(&file)?;
        Ok(ClassifierModel { file })
    }

    pub fn from_path(path: &Path) -> Result<ClassifierModel> {
        let json = std::fs::read_to_string(path)
            .map_err(|e| Error::Io { path: path.to_path_buf(), cause: e })?;
        Self::from_json(&json)
    }

    /// Assembles a model from parts (the training tool's write path) and
    /// validates it exactly like a loaded file.
    pub fn from_parts(
        posterior_threshold: f64,
        classes: Vec<LicenseId>,
        vocabulary: BTreeMap<String, usize>,
        weights: Vec<Vec<f64>>,
        bias: Vec<f64>,
    ) -> Result<ClassifierModel> {
        let file = ModelFile {
            format_version: 1,
            posterior_threshold,
            classes,
            vocabulary,
            weights,
            bias,
        };
        Self::validate(&file)?;
        Ok(ClassifierModel { file })
    }

    /// Serializes the model in its file format (deterministic key order).
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.file).expect("model serialization cannot fail")
    }

    fn validate(file: &ModelFile) -> Result<()> {
        let fail = |detail: String| Err(Error::Model { detail });

        if file.format_version != 1 {
            return fail(format!("unsupported format_version {}", file.format_version));
        }
        if !(0.0..=1.0).contains(&file.posterior_threshold) {
            return fail(format!(
                "posterior_threshold {} outside [0, 1]",
                file.posterior_threshold
            ));
        }
        if file.classes.is_empty() {
            return fail("no classes".into());
        }
        let mut seen = std::collections::BTreeSet::new();
        for class in &file.classes {
            if !class.is_supported() {
                return fail(format!("class `{class}` is not a supported license"));
            }
            if !seen.insert(*class) {
                return fail(format!("duplicate class `{class}`"));
            }
        }
        if file.vocabulary.is_empty() {
            return fail("empty vocabulary".into());
        }
        let vocab_len = file.vocabulary.len();
        let mut index_seen = vec![false; vocab_len];
        for (token, &index) in &file.vocabulary {
            if index >= vocab_len {
                return fail(format!("token `{token}` has out-of-range index {index}"));
            }
            if std::mem::replace(&mut index_seen[index], true) {
                return fail(format!("duplicate feature index {index}"));
            }
        }
        if file.weights.len() != file.classes.len() || file.bias.len() != file.classes.len() {
            return fail("weights/bias rows do not match the class count".into());
        }
        if let Some(row) = file.weights.iter().find(|row| row.len() != vocab_len) {
            return fail(format!(
                "weight row of length {} does not match vocabulary size {vocab_len}",
                row.len()
            ));
        }
        Ok(())
    }

    pub fn posterior_threshold(&self) -> f64 {
        self.file.posterior_threshold
    }

    pub fn classes(&self) -> &[LicenseId] {
        &self.file.classes
    }

    /// Softmax posteriors over the classes for `text`, built from token
    /// counts over the model vocabulary (occurrences, not set membership).
    pub fn posteriors(&self, text: &str) -> Vec<f64> {
        let mut counts = vec![0.0f64; self.file.vocabulary.len()];
        for token in normalize_sequence(text) {
            if let Some(&index) = self.file.vocabulary.get(&token) {
                counts[index] += 1.0;
            }
        }
        let scores: Vec<f64> = self
            .file
            .weights
            .iter()
            .zip(&self.file.bias)
            .map(|(row, bias)| {
                row.iter().zip(&counts).map(|(w, x)| w * x).sum::<f64>() + bias
            })
            .collect();
        softmax(&scores)
    }

    /// Classifier decision: the argmax class when its posterior clears the
    /// threshold, `Unknown` (with the best posterior as score) otherwise.
    pub fn classify(&self, text: &str) -> DetectionResult {
        let posteriors = self.posteriors(text);
        let mut best = 0usize;
        for (i, p) in posteriors.iter().enumerate() {
            // Strict comparison keeps the earliest (lexicographically
            // smallest, classes being sorted) class on ties.
            if *p > posteriors[best] {
                best = i;
            }
        }
        let runner_up = posteriors
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != best)
            .max_by(|(ai, a), (bi, b)| a.partial_cmp(b).unwrap().then(bi.cmp(ai)))
            .map(|(i, p)| (self.file.classes[i], *p));
        let score = posteriors[best];
        let license = if score >= self.file.posterior_threshold {
            self.file.classes[best]
        } else {
            LicenseId::Unknown
        };
        DetectionResult { license, method: DetectionMethod::Classifier, score, runner_up }
    }
}

fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}
