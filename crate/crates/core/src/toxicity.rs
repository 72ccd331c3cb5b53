//! Bag-of-words logistic regression over normalized tokens.
//!
//! The trained weights double as word-level toxicity scores: a word with a
//! large positive weight pushes a sentence towards the toxic class, so the
//! top-weighted words form the toxic lexicon used by the deletion and
//! masked-substitution rewriters.
//!
//! Training is full-batch gradient descent on mean binary cross-entropy
//! plus an L2 penalty on the weights (the bias is unregularized), from zero
//! initialization — so the result is deterministic and, in particular,
//! flipping every label exactly negates the learned parameters.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::data_io::{LabeledCorpus, StyleLabel};
use crate::error::{Error, Result};
use crate::num::Real;
use crate::text::{normalize, Sentence};

/// Word-to-index mapping in first-occurrence order, so that index
/// assignment is deterministic for a given corpus.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, u32>,
    pub min_count: usize,
}

impl Vocabulary {
    /// Collect normalized token types occurring at least `min_count` times.
    /// Pure-punctuation tokens (empty norm) never enter the vocabulary.
    pub fn build(corpus: &LabeledCorpus, min_count: usize) -> Vocabulary {
        let mut counts: HashMap<&str, usize> = HashMap::new();
        let mut order: Vec<&str> = Vec::new();
        for entry in &corpus.entries {
            for tok in &entry.sentence.tokens {
                if tok.norm.is_empty() {
                    continue;
                }
                let c = counts.entry(tok.norm.as_str()).or_insert(0);
                if *c == 0 {
                    order.push(tok.norm.as_str());
                }
                *c += 1;
            }
        }
        let mut words = Vec::new();
        let mut index = HashMap::new();
        for word in order {
            if counts[word] >= min_count.max(1) {
                index.insert(word.to_string(), words.len() as u32);
                words.push(word.to_string());
            }
        }
        Vocabulary {
            words,
            index,
            min_count,
        }
    }

    pub fn from_words(words: Vec<String>, min_count: usize) -> Vocabulary {
        let index = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as u32))
            .collect();
        Vocabulary {
            words,
            index,
            min_count,
        }
    }

    pub fn index_of(&self, norm: &str) -> Option<u32> {
        self.index.get(norm).copied()
    }

    pub fn word(&self, idx: u32) -> &str {
        &self.words[idx as usize]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Sparse raw-count feature vector: `(vocabulary index, count)` pairs in
/// ascending index order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SparseCounts(pub Vec<(u32, u32)>);

/// Count the in-vocabulary normalized tokens of a sentence.
/// Out-of-vocabulary tokens contribute nothing.
pub fn featurize(sentence: &Sentence, vocab: &Vocabulary) -> SparseCounts {
    let mut counts: HashMap<u32, u32> = HashMap::new();
    for tok in &sentence.tokens {
        if tok.norm.is_empty() {
            continue;
        }
        if let Some(idx) = vocab.index_of(&tok.norm) {
            *counts.entry(idx).or_insert(0) += 1;
        }
    }
    let mut pairs: Vec<(u32, u32)> = counts.into_iter().collect();
    pairs.sort_unstable_by_key(|(idx, _)| *idx);
    SparseCounts(pairs)
}

/// Featurize a whole corpus; labels become `true` for toxic (the positive
/// class).
pub fn featurize_corpus(
    corpus: &LabeledCorpus,
    vocab: &Vocabulary,
) -> (Vec<SparseCounts>, Vec<bool>) {
    let xs = corpus
        .entries
        .iter()
        .map(|e| featurize(&e.sentence, vocab))
        .collect();
    let ys = corpus
        .entries
        .iter()
        .map(|e| e.label == StyleLabel::Toxic)
        .collect();
    (xs, ys)
}

/// Hyperparameters for [`train`]. The trainer is deterministic (zero
/// initialization, full batches); `seed` is carried for interface stability
/// with stochastic variants but does not influence the result.
#[derive(Debug, Clone, Copy)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
    pub min_count: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.5,
            epochs: 300,
            l2: 1e-4,
            min_count: 1,
            seed: 42,
        }
    }
}

/// Trained classifier. `weights[i]` is the toxicity level of
/// `vocab.word(i)`; positive means toxic-leaning.
#[derive(Debug, Clone, PartialEq)]
pub struct ToxicityModel<F: Real> {
    pub vocab: Vocabulary,
    pub weights: Vec<F>,
    pub bias: F,
}

/// Logistic function via tanh: `0.5 + 0.5·tanh(z/2)`.
///
/// This form makes `sigmoid(-z) == 1 - sigmoid(z)` hold *exactly* in
/// floating point, which is what gives label-flip antisymmetry of training
/// down to the last bit.
fn sigmoid_halves<F: Real>(z: F) -> (F, F) {
    let u = F::of(0.5) * (z * F::of(0.5)).tanh();
    (F::of(0.5) + u, F::of(0.5) - u) // (p_toxic, p_neutral)
}

fn dot<F: Real>(weights: &[F], x: &SparseCounts) -> F {
    let mut z = F::zero();
    for &(idx, count) in &x.0 {
        z += weights[idx as usize] * F::of_usize(count as usize);
    }
    z
}

/// Mean binary cross-entropy plus `0.5·l2·‖w‖²` (bias unregularized).
///
/// Deliberately computed through `ln(p)` without clamping: a divergent
/// training run drives probabilities to exactly 0 and the loss to infinity,
/// which is how [`train`] detects runaway learning rates.
pub fn bce_loss<F: Real>(weights: &[F], bias: F, xs: &[SparseCounts], ys: &[bool], l2: f64) -> F {
    let n = F::of_usize(xs.len());
    let mut total = F::zero();
    for (x, &y) in xs.iter().zip(ys) {
        let z = dot(weights, x) + bias;
        let (p_toxic, p_neutral) = sigmoid_halves(z);
        total += -(if y { p_toxic } else { p_neutral }).ln();
    }
    let mut reg = F::zero();
    for &w in weights {
        reg += w * w;
    }
    total / n + F::of(0.5) * F::of(l2) * reg
}

/// Analytic gradient of [`bce_loss`] with respect to (weights, bias).
pub fn bce_gradient<F: Real>(
    weights: &[F],
    bias: F,
    xs: &[SparseCounts],
    ys: &[bool],
    l2: f64,
) -> (Vec<F>, F) {
    let n = F::of_usize(xs.len());
    let mut grad_w = vec![F::zero(); weights.len()];
    let mut grad_b = F::zero();
    for (x, &y) in xs.iter().zip(ys) {
        let z = dot(weights, x) + bias;
        let u = F::of(0.5) * (z * F::of(0.5)).tanh();
        // residual = sigmoid(z) - y, written so that label flipping negates
        // it exactly: u - 0.5 for toxic, u + 0.5 for neutral.
        let r = u + if y { F::of(-0.5) } else { F::of(0.5) };
        for &(idx, count) in &x.0 {
            grad_w[idx as usize] += r * F::of_usize(count as usize);
        }
        grad_b += r;
    }
    for g in grad_w.iter_mut() {
        *g /= n;
    }
    grad_b /= n;
    for (g, &w) in grad_w.iter_mut().zip(weights) {
        *g += F::of(l2) * w;
    }
    (grad_w, grad_b)
}

/// Train the classifier by full-batch gradient descent.
///
/// Errors: a corpus that does not contain both labels
/// ([`Error::Validation`]), or a non-finite loss at any epoch, which signals
/// a divergent learning rate ([`Error::Numeric`]).
pub fn train<F: Real>(corpus: &LabeledCorpus, config: &TrainConfig) -> Result<ToxicityModel<F>> {
    let toxic = corpus.count_label(StyleLabel::Toxic);
    if toxic == 0 || toxic == corpus.len() {
        return Err(Error::Validation(format!(
            "training corpus must contain both labels ({} toxic of {} entries)",
            toxic,
            corpus.len()
        )));
    }
    let vocab = Vocabulary::build(corpus, config.min_count);
    let (xs, ys) = featurize_corpus(corpus, &vocab);

    let lr = F::of(config.learning_rate);
    let mut weights = vec![F::zero(); vocab.len()];
    let mut bias = F::zero();
    for epoch in 0..config.epochs {
        let loss = bce_loss(&weights, bias, &xs, &ys, config.l2);
        if !loss.is_finite() {
            return Err(Error::Numeric(format!(
                "non-finite loss at epoch {epoch} (learning rate {} diverges)",
                config.learning_rate
            )));
        }
        let (grad_w, grad_b) = bce_gradient(&weights, bias, &xs, &ys, config.l2);
        for (w, g) in weights.iter_mut().zip(&grad_w) {
            *w -= lr * *g;
        }
        bias -= lr * grad_b;
    }
    let final_loss = bce_loss(&weights, bias, &xs, &ys, config.l2);
    if !final_loss.is_finite() {
        return Err(Error::Numeric(format!(
            "non-finite loss after {} epochs (learning rate {} diverges)",
            config.epochs, config.learning_rate
        )));
    }
    Ok(ToxicityModel {
        vocab,
        weights,
        bias,
    })
}

/// Probability that a sentence is toxic: `sigmoid(w·x + b)`, clamped into
/// the open interval `(0, 1)` so downstream log-odds never blow up.
pub fn predict_proba<F: Real>(model: &ToxicityModel<F>, sentence: &Sentence) -> F {
    let x = featurize(sentence, &model.vocab);
    let z = dot(&model.weights, &x) + model.bias;
    let (p_toxic, _) = sigmoid_halves(z);
    let lo = F::min_positive_value();
    let hi = F::one() - F::epsilon() * F::of(0.5); // predecessor of 1.0
    p_toxic.max(lo).min(hi)
}

/// Is the sentence classified toxic? The decision threshold is 0.5,
/// inclusive on the toxic side.
pub fn is_toxic<F: Real>(model: &ToxicityModel<F>, sentence: &Sentence) -> bool {
    predict_proba(model, sentence) >= F::of(0.5)
}

/// F1 of the toxic class on a labeled corpus. Degenerate denominators
/// (no predicted or no actual positives) yield 0.
pub fn f1<F: Real>(model: &ToxicityModel<F>, corpus: &LabeledCorpus) -> F {
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for entry in &corpus.entries {
        let predicted = is_toxic(model, &entry.sentence);
        let actual = entry.label == StyleLabel::Toxic;
        match (predicted, actual) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    if tp + fp == 0 || tp + fn_ == 0 {
        return F::zero();
    }
    let precision = F::of_usize(tp) / F::of_usize(tp + fp);
    let recall = F::of_usize(tp) / F::of_usize(tp + fn_);
    if precision + recall == F::zero() {
        return F::zero();
    }
    F::of(2.0) * precision * recall / (precision + recall)
}

/// Toxic words with their toxicity levels (model weights).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ToxicityLexicon<F: Real> {
    weights: HashMap<String, F>,
}

impl<F: Real> ToxicityLexicon<F> {
    pub fn from_entries(entries: impl IntoIterator<Item = (String, F)>) -> Self {
        ToxicityLexicon {
            weights: entries.into_iter().collect(),
        }
    }

    pub fn contains(&self, norm: &str) -> bool {
        self.weights.contains_key(norm)
    }

    pub fn weight(&self, norm: &str) -> Option<F> {
        self.weights.get(norm).copied()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Entries sorted by descending weight, ties by word — the canonical
    /// order used for persistence and reports.
    pub fn sorted_entries(&self) -> Vec<(String, F)> {
        let mut entries: Vec<(String, F)> =
            self.weights.iter().map(|(w, &v)| (w.clone(), v)).collect();
        entries.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| a.0.cmp(&b.0))
        });
        entries
    }
}

/// Build the toxic lexicon: every vocabulary word whose weight is strictly
/// above `threshold`, unioned with a manual word list.
///
/// Manual words are normalized and always included, at the maximum model
/// weight (they are treated as at least as toxic as the worst learned
/// word); for an empty vocabulary they fall back to weight zero.
pub fn extract_lexicon<F: Real>(
    model: &ToxicityModel<F>,
    threshold: f64,
    manual: &[String],
) -> ToxicityLexicon<F> {
    let tau = F::of(threshold);
    let mut weights: HashMap<String, F> = HashMap::new();
    for (i, &w) in model.weights.iter().enumerate() {
        if w > tau {
            weights.insert(model.vocab.word(i as u32).to_string(), w);
        }
    }
    let max_weight = model
        .weights
        .iter()
        .copied()
        .fold(None::<F>, |acc, w| Some(acc.map_or(w, |m| m.max(w))))
        .unwrap_or_else(F::zero);
    for word in manual {
        let norm = normalize(word);
        if !norm.is_empty() {
            weights.insert(norm, max_weight);
        }
    }
    ToxicityLexicon { weights }
}

/// Threshold that selects approximately the top `fraction` of the
/// vocabulary by weight when passed to [`extract_lexicon`].
///
/// With `k = ceil(V · fraction)` this returns the (k+1)-th largest weight,
/// so the strict `> threshold` rule admits the top k (fewer if weights tie
/// exactly at the boundary).
pub fn threshold_for_top_fraction<F: Real>(model: &ToxicityModel<F>, fraction: f64) -> f64 {
    let v = model.weights.len();
    let k = ((v as f64) * fraction).ceil() as usize;
    if k == 0 || v == 0 {
        return f64::INFINITY;
    }
    if k >= v {
        return f64::NEG_INFINITY;
    }
    let mut sorted: Vec<f64> = model
        .weights
        .iter()
        .map(|w| w.to_f64().unwrap_or(f64::NEG_INFINITY))
        .collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted[k]
}

const MODEL_MAGIC: &str = "toxicity-model";
const MODEL_VERSION: &str = "v1";
const BIAS_ROW: &str = "__bias__";

/// Persist a model as a versioned text file: a header line
/// `toxicity-model TAB v1 TAB <vocab_size> TAB <min_count>`, one
/// `word TAB weight` row per vocabulary entry in index order, and a final
/// `__bias__ TAB <bias>` row.  (`__bias__` cannot collide with a vocabulary
/// word — normalization strips the underscores.)
pub fn save_model<F: Real>(model: &ToxicityModel<F>, path: &Path) -> Result<()> {
    let mut out = format!(
        "{MODEL_MAGIC}\t{MODEL_VERSION}\t{}\t{}\n",
        model.vocab.len(),
        model.vocab.min_count
    );
    for (i, w) in model.weights.iter().enumerate() {
        out.push_str(&format!("{}\t{}\n", model.vocab.word(i as u32), w));
    }
    out.push_str(&format!("{BIAS_ROW}\t{}\n", model.bias));
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn parse_weight<F: Real>(path: &Path, line: usize, field: &str) -> Result<F> {
    let value: f64 = field
        .parse()
        .map_err(|_| Error::parse(path, line, format!("bad weight {field:?}")))?;
    F::from_f64(value).ok_or_else(|| Error::parse(path, line, "weight not representable"))
}

/// Load a model saved by [`save_model`].
pub fn load_model<F: Real>(path: &Path) -> Result<ToxicityModel<F>> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = content.lines().enumerate();

    let Some((_, header)) = lines.next() else {
        return Err(Error::parse(path, 1, "empty model file"));
    };
    let fields: Vec<&str> = header.split('\t').collect();
    if fields.len() != 4 || fields[0] != MODEL_MAGIC || fields[1] != MODEL_VERSION {
        return Err(Error::parse(
            path,
            1,
            format!("expected `{MODEL_MAGIC}\\t{MODEL_VERSION}\\t<size>\\t<min_count>` header"),
        ));
    }
    let vocab_size: usize = fields[2]
        .parse()
        .map_err(|_| Error::parse(path, 1, "bad vocabulary size"))?;
    let min_count: usize = fields[3]
        .parse()
        .map_err(|_| Error::parse(path, 1, "bad min_count"))?;

    let mut words = Vec::with_capacity(vocab_size);
    let mut weights = Vec::with_capacity(vocab_size);
    let mut bias: Option<F> = None;
    for (i, line) in lines {
        let row = i + 1;
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(Error::parse(path, row, "expected `word TAB weight`"));
        }
        let value = parse_weight::<F>(path, row, fields[1])?;
        if fields[0] == BIAS_ROW {
            if bias.is_some() {
                return Err(Error::parse(path, row, "duplicate bias row"));
            }
            bias = Some(value);
        } else {
            if bias.is_some() {
                return Err(Error::parse(path, row, "word row after bias row"));
            }
            words.push(fields[0].to_string());
            weights.push(value);
        }
    }
    let Some(bias) = bias else {
        return Err(Error::parse(path, content.lines().count(), "missing bias row"));
    };
    if words.len() != vocab_size {
        return Err(Error::parse(
            path,
            1,
            format!("header promises {vocab_size} words, file has {}", words.len()),
        ));
    }
    Ok(ToxicityModel {
        vocab: Vocabulary::from_words(words, min_count),
        weights,
        bias,
    })
}

/// Persist a lexicon as headerless `word TAB weight` rows in canonical
/// order (descending weight, then word).
pub fn save_lexicon<F: Real>(lexicon: &ToxicityLexicon<F>, path: &Path) -> Result<()> {
    let mut out = String::new();
    for (word, weight) in lexicon.sorted_entries() {
        out.push_str(&format!("{word}\t{weight}\n"));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Load a lexicon saved by [`save_lexicon`].
pub fn load_lexicon<F: Real>(path: &Path) -> Result<ToxicityLexicon<F>> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut weights = HashMap::new();
    for (i, line) in content.lines().enumerate() {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(Error::parse(path, i + 1, "expected `word TAB weight`"));
        }
        let value = parse_weight::<F>(path, i + 1, fields[1])?;
        weights.insert(fields[0].to_string(), value);
    }
    Ok(ToxicityLexicon { weights })
}

/// Load a manual toxic word list: one word per line, normalized on load.
/// Blank lines are skipped; a line that normalizes to nothing is an error.
pub fn load_manual_words(path: &Path) -> Result<Vec<String>> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut words = Vec::new();
    for (i, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let norm = normalize(line);
        if norm.is_empty() {
            return Err(Error::parse(path, i + 1, "line normalizes to nothing"));
        }
        words.push(norm);
    }
    Ok(words)
}
