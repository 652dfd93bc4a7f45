//! Training pipeline for the bag-of-words license classifier.
//!
//! The trainer reads canonical texts from the corpus, expands each into a
//! deck of synthetic variants (placeholder substitution, copyright headers,
//! appended footers, word dropout), and fits a softmax regression by
//! full-batch gradient descent with momentum.  Every fourth variant is held
//! out and scored through the exact inference path the shipped model uses,
//! so the reported accuracy measures the artifact, not the training loop.
//!
//! Texts of the four licenses the classifier deliberately does not cover are
//! mixed into training as negatives with uniform targets, alongside ordinary
//! prose; that keeps their posteriors flat so detection falls through to the
//! similarity stage instead of returning a near-miss.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use anyhow::{ensure, Context, Result};
use licheck_core::corpus::{Corpus, LicenseId};
use licheck_core::detector::{normalize_sequence, ClassifierModel};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use regex::Regex;

/// Per-token scale factors used during training.  Each is the inverse of the
/// smallest power of two at or above the token's maximum count over the
/// canonical texts, which puts every feature on a comparable footing
/// (raw counts range from 1 to several hundred, and gradient descent
/// converges poorly on such skewed coordinates).  Powers of two matter:
/// multiplying by one only shifts the float exponent, so folding the scale
/// into the stored weights afterwards is exact, and inference on raw counts
/// reproduces the training-time logits bit for bit.
fn feature_scales(corpus: &Corpus, vocabulary: &BTreeMap<String, usize>) -> Vec<f64> {
    let mut max_count = vec![1u32; vocabulary.len()];
    for record in corpus.records() {
        let mut counts: BTreeMap<usize, u32> = BTreeMap::new();
        for token in normalize_sequence(&record.canonical_text) {
            if let Some(&idx) = vocabulary.get(&token) {
                *counts.entry(idx).or_insert(0) += 1;
            }
        }
        for (idx, c) in counts {
            max_count[idx] = max_count[idx].max(c);
        }
    }
    max_count
        .iter()
        .map(|&m| {
            let mut p = 1.0f64;
            while p < f64::from(m) {
                p *= 2.0;
            }
            1.0 / p
        })
        .collect()
}

/// Licenses the classifier must *not* claim; they train as negatives.
const NEGATIVE_LICENSES: [LicenseId; 4] = [
    LicenseId::Cddl1,
    LicenseId::Epl1,
    LicenseId::Gpl2Classpath,
    LicenseId::Mpl1,
];

/// Knobs for a training run.  The defaults reproduce the shipped model.
#[derive(Debug, Clone)]
pub struct TrainOptions {
    pub seed: u64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    /// Synthetic variants generated per license (variant 0 is pristine).
    pub variants_per_class: usize,
    pub posterior_threshold: f64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            seed: 17,
            epochs: 300,
            learning_rate: 0.5,
            momentum: 0.9,
            variants_per_class: 48,
            posterior_threshold: 0.80,
        }
    }
}

/// A fitted model plus the evaluation numbers backing it.
pub struct TrainOutcome {
    pub model: ClassifierModel,
    pub held_out_accuracy: f64,
    pub held_out_samples: usize,
    pub negative_rejection_rate: f64,
    pub negative_held_out_samples: usize,
    pub final_loss: f64,
    pub vocabulary_size: usize,
    pub train_samples: usize,
    /// Human-readable run summary; one `key = value` pair per line.
    pub report: String,
}

struct Sample {
    text: String,
    /// `(vocabulary index, count * scale)`, ascending by index.
    features: Vec<(usize, f64)>,
    /// Index into the class list for positives; `None` trains toward the
    /// uniform distribution.
    class_index: Option<usize>,
    label: Option<LicenseId>,
}

/// Train a classifier from the corpus and evaluate it on held-out variants.
pub fn train(corpus: &Corpus, opts: &TrainOptions) -> Result<TrainOutcome> {
    ensure!(opts.epochs > 0, "epochs must be positive");
    ensure!(
        opts.variants_per_class >= 8,
        "need at least 8 variants per class for a meaningful held-out split"
    );

    let classes: Vec<LicenseId> = LicenseId::SUPPORTED
        .iter()
        .copied()
        .filter(|id| !NEGATIVE_LICENSES.contains(id))
        .collect();
    let vocabulary = build_vocabulary(corpus);
    let scales = feature_scales(corpus, &vocabulary);

    let (train_set, eval_set) = build_samples(corpus, &classes, &vocabulary, &scales, opts)?;
    ensure!(!train_set.is_empty(), "empty training set");

    let (weights, bias, final_loss) = fit(&train_set, classes.len(), vocabulary.len(), opts);

    // Fold the per-feature scales into the weights so inference works on raw
    // counts (see `feature_scales` for why this is exact).
    let stored: Vec<Vec<f64>> = weights
        .iter()
        .map(|row| row.iter().zip(&scales).map(|(w, s)| w * s).collect())
        .collect();
    let model = ClassifierModel::from_parts(
        opts.posterior_threshold,
        classes.clone(),
        vocabulary.clone(),
        stored,
        bias,
    )
    .context("assembling the trained model")?;

    // Score held-out samples through the real inference path.
    let mut positive_total = 0usize;
    let mut positive_correct = 0usize;
    let mut negative_total = 0usize;
    let mut negative_rejected = 0usize;
    for sample in &eval_set {
        let got = model.classify(&sample.text).license;
        match sample.label {
            Some(expected) => {
                positive_total += 1;
                if got == expected {
                    positive_correct += 1;
                }
            }
            None => {
                negative_total += 1;
                if got == LicenseId::Unknown {
                    negative_rejected += 1;
                }
            }
        }
    }
    let held_out_accuracy = positive_correct as f64 / positive_total.max(1) as f64;
    let negative_rejection_rate = negative_rejected as f64 / negative_total.max(1) as f64;

    let mut report = String::new();
    let _ = writeln!(report, "classifier training report");
    let _ = writeln!(report, "seed = {}", opts.seed);
    let _ = writeln!(report, "epochs = {}", opts.epochs);
    let _ = writeln!(report, "learning_rate = {}", opts.learning_rate);
    let _ = writeln!(report, "momentum = {}", opts.momentum);
    let _ = writeln!(report, "variants_per_class = {}", opts.variants_per_class);
    let _ = writeln!(report, "posterior_threshold = {}", opts.posterior_threshold);
    let _ = writeln!(report, "classes = {}", classes.len());
    let _ = writeln!(report, "vocabulary_size = {}", vocabulary.len());
    let _ = writeln!(report, "train_samples = {}", train_set.len());
    let _ = writeln!(report, "final_loss = {final_loss:.6}");
    let _ = writeln!(report, "held_out_samples = {positive_total}");
    let _ = writeln!(report, "held_out_accuracy = {held_out_accuracy:.4}");
    let _ = writeln!(report, "negative_held_out_samples = {negative_total}");
    let _ = writeln!(
        report,
        "negative_rejection_rate = {negative_rejection_rate:.4}"
    );

    Ok(TrainOutcome {
        model,
        held_out_accuracy,
        held_out_samples: positive_total,
        negative_rejection_rate,
        negative_held_out_samples: negative_total,
        final_loss,
        vocabulary_size: vocabulary.len(),
        train_samples: train_set.len(),
        report,
    })
}

/// Every token appearing in any canonical text, including the licenses the
/// classifier rejects: their distinctive words must be features, or texts
/// like the classpath exception would be indistinguishable from plain GPL-2.0
/// in count space.
fn build_vocabulary(corpus: &Corpus) -> BTreeMap<String, usize> {
    let mut tokens = BTreeSet::new();
    for record in corpus.records() {
        tokens.extend(normalize_sequence(&record.canonical_text));
    }
    tokens
        .into_iter()
        .enumerate()
        .map(|(i, t)| (t, i))
        .collect()
}

fn featurize(
    text: &str,
    vocabulary: &BTreeMap<String, usize>,
    scales: &[f64],
) -> Vec<(usize, f64)> {
    let mut counts: BTreeMap<usize, u32> = BTreeMap::new();
    for token in normalize_sequence(text) {
        if let Some(&idx) = vocabulary.get(&token) {
            *counts.entry(idx).or_insert(0) += 1;
        }
    }
    counts
        .into_iter()
        .map(|(idx, c)| (idx, f64::from(c) * scales[idx]))
        .collect()
}

/// Expand the corpus into train and held-out sample sets.  Variant indices
/// with `v % 4 == 3` are held out; variant 0 is the pristine canonical text
/// and always trains.
fn build_samples(
    corpus: &Corpus,
    classes: &[LicenseId],
    vocabulary: &BTreeMap<String, usize>,
    scales: &[f64],
    opts: &TrainOptions,
) -> Result<(Vec<Sample>, Vec<Sample>)> {
    let mut seeder = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut train = Vec::new();
    let mut eval = Vec::new();

    let mut push = |text: String, class_index: Option<usize>, label: Option<LicenseId>, held: bool| {
        let sample = Sample {
            features: featurize(&text, vocabulary, scales),
            text,
            class_index,
            label,
        };
        if held {
            eval.push(sample);
        } else {
            train.push(sample);
        }
    };

    // Positive classes.
    for (class_index, &id) in classes.iter().enumerate() {
        let canonical = &corpus.lookup(id)?.canonical_text;
        for v in 0..opts.variants_per_class {
            let mut rng = ChaCha8Rng::seed_from_u64(seeder.random());
            let text = if v == 0 {
                canonical.clone()
            } else {
                augment(canonical, &mut rng)
            };
            push(text, Some(class_index), Some(id), v % 4 == 3);
        }
    }

    // Licenses the classifier must reject, same augmentation, uniform target.
    for &id in &NEGATIVE_LICENSES {
        let canonical = &corpus.lookup(id)?.canonical_text;
        for v in 0..opts.variants_per_class {
            let mut rng = ChaCha8Rng::seed_from_u64(seeder.random());
            let text = if v == 0 {
                canonical.clone()
            } else {
                augment(canonical, &mut rng)
            };
            push(text, None, None, v % 4 == 3);
        }
    }

    // Ordinary prose: README excerpts, notes, documentation.
    for paragraph in prose_paragraphs() {
        for v in 0..4usize {
            let mut rng = ChaCha8Rng::seed_from_u64(seeder.random());
            let text = if v == 0 {
                paragraph.to_string()
            } else {
                dropout(paragraph, 0.01 + 0.04 * rng.random::<f64>(), &mut rng)
            };
            push(text, None, None, v % 4 == 3);
        }
    }

    // Degenerate documents.
    push(String::new(), None, None, false);
    push("  \n\t \n".to_string(), None, None, false);
    push("\n\n   ".to_string(), None, None, true);

    Ok((train, eval))
}

fn prose_paragraphs() -> Vec<&'static str> {
    include_str!("../data/train_prose.txt")
        .split("\n\n")
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .collect()
}

/// Full-batch softmax regression with momentum.  Returns `(weights, bias,
/// final mean cross-entropy)`; weights are at scaled-feature resolution and
/// still need the per-feature scales folded in before storage.
fn fit(
    train: &[Sample],
    n_classes: usize,
    n_vocab: usize,
    opts: &TrainOptions,
) -> (Vec<Vec<f64>>, Vec<f64>, f64) {
    let mut weights = vec![vec![0.0f64; n_vocab]; n_classes];
    let mut bias = vec![0.0f64; n_classes];
    let mut vel_w = vec![vec![0.0f64; n_vocab]; n_classes];
    let mut vel_b = vec![0.0f64; n_classes];
    let mut grad_w = vec![vec![0.0f64; n_vocab]; n_classes];
    let mut grad_b = vec![0.0f64; n_classes];
    let inv_n = 1.0 / train.len() as f64;
    let uniform = 1.0 / n_classes as f64;
    let mut final_loss = 0.0;

    for _ in 0..opts.epochs {
        for row in grad_w.iter_mut() {
            row.fill(0.0);
        }
        grad_b.fill(0.0);
        let mut loss = 0.0;

        for sample in train {
            // Accumulate logits feature-major, ascending vocabulary index —
            // the same order inference uses, so decisions match exactly.
            let mut logits = bias.clone();
            for &(j, f) in &sample.features {
                for (c, logit) in logits.iter_mut().enumerate() {
                    *logit += weights[c][j] * f;
                }
            }
            let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
            let sum: f64 = exps.iter().sum();

            for c in 0..n_classes {
                let p = exps[c] / sum;
                let target = match sample.class_index {
                    Some(k) if k == c => 1.0,
                    Some(_) => 0.0,
                    None => uniform,
                };
                let err = p - target;
                grad_b[c] += err;
                for &(j, f) in &sample.features {
                    grad_w[c][j] += err * f;
                }
                if target > 0.0 {
                    loss -= target * p.max(1e-300).ln();
                }
            }
        }

        final_loss = loss * inv_n;
        for c in 0..n_classes {
            for j in 0..n_vocab {
                vel_w[c][j] = opts.momentum * vel_w[c][j] - opts.learning_rate * grad_w[c][j] * inv_n;
                weights[c][j] += vel_w[c][j];
            }
            vel_b[c] = opts.momentum * vel_b[c] - opts.learning_rate * grad_b[c] * inv_n;
            bias[c] += vel_b[c];
        }
    }

    (weights, bias, final_loss)
}

// --- synthetic document generation ---------------------------------------

const FIRST_NAMES: [&str; 12] = [
    "Ada", "Brian", "Chen", "Dmitri", "Elena", "Farid", "Grace", "Hiro", "Ines", "Jonas",
    "Lena", "Priya",
];
const LAST_NAMES: [&str; 12] = [
    "Almeida", "Baker", "Chowdhury", "Dietrich", "Eriksen", "Fujimoto", "Garcia", "Hoffmann",
    "Ivanova", "Jensen", "Kowalski", "Novak",
];
const ORGANIZATIONS: [&str; 8] = [
    "Acme Systems",
    "Blue Harbor Labs",
    "Cedarworks",
    "Driftwood Software",
    "Evergreen Computing",
    "Foxglove Tools",
    "Granite Peak LLC",
    "Harborlight Inc",
];
const PROJECTS: [&str; 8] = [
    "quickmesh",
    "lanternfish",
    "copperwire",
    "snowdrift",
    "maplekit",
    "tidegate",
    "rivermill",
    "oakledger",
];

fn pick<'a>(pool: &[&'a str], rng: &mut ChaCha8Rng) -> &'a str {
    pool[rng.random_range(0..pool.len())]
}

fn random_year(rng: &mut ChaCha8Rng) -> String {
    rng.random_range(1989..2026).to_string()
}

fn random_name(rng: &mut ChaCha8Rng) -> String {
    format!("{} {}", pick(&FIRST_NAMES, rng), pick(&LAST_NAMES, rng))
}

/// Replace the fill-in-the-blank markers canonical texts carry (`<year>`,
/// `[name of copyright owner]`, …) with plausible concrete values.
fn substitute_placeholders(text: &str, rng: &mut ChaCha8Rng) -> String {
    static PLACEHOLDER: std::sync::LazyLock<Regex> = std::sync::LazyLock::new(|| {
        Regex::new(r"<[^<>\n]{1,60}>|\[[^\[\]\n]{1,60}\]").unwrap()
    });
    PLACEHOLDER
        .replace_all(text, |_: &regex::Captures<'_>| match rng.random_range(0..4u8) {
            0 => random_year(rng),
            1 => random_name(rng),
            2 => pick(&ORGANIZATIONS, rng).to_string(),
            _ => format!("the {} project", pick(&PROJECTS, rng)),
        })
        .into_owned()
}

fn random_header(rng: &mut ChaCha8Rng) -> String {
    match rng.random_range(0..4u8) {
        0 => format!(
            "{} version {}.{}.{}",
            pick(&PROJECTS, rng),
            rng.random_range(0..9u8),
            rng.random_range(0..20u8),
            rng.random_range(0..30u8)
        ),
        1 => format!(
            "Copyright (c) {} {}",
            random_year(rng),
            random_name(rng)
        ),
        2 => format!(
            "Copyright {} {}. All rights reserved.",
            random_year(rng),
            pick(&ORGANIZATIONS, rng)
        ),
        _ => format!("This file is part of the {} distribution.", pick(&PROJECTS, rng)),
    }
}

fn random_footer(rng: &mut ChaCha8Rng) -> String {
    match rng.random_range(0..3u8) {
        0 => format!(
            "Source code is available at https://example.com/{}/releases.",
            pick(&PROJECTS, rng)
        ),
        1 => format!(
            "For licensing questions contact the {} maintainers.",
            pick(&PROJECTS, rng)
        ),
        _ => format!("Last updated {}.", random_year(rng)),
    }
}

/// Remove each word independently with probability `rate`.
fn dropout(text: &str, rate: f64, rng: &mut ChaCha8Rng) -> String {
    let kept: Vec<&str> = text
        .split_whitespace()
        .filter(|_| !rng.random_bool(rate))
        .collect();
    kept.join(" ")
}

/// One synthetic variant: concrete placeholder values, optional header and
/// footer, and usually a light sprinkle of word dropout.
fn augment(canonical: &str, rng: &mut ChaCha8Rng) -> String {
    let mut text = substitute_placeholders(canonical, rng);
    if rng.random_bool(0.7) {
        text = format!("{}\n\n{}", random_header(rng), text);
    }
    if rng.random_bool(0.5) {
        text = format!("{}\n\n{}", text, random_footer(rng));
    }
    if rng.random_bool(0.8) {
        let rate = 0.01 + 0.04 * rng.random::<f64>();
        text = dropout(&text, rate, rng);
    }
    text
}
