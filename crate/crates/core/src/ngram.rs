//! Count-based n-gram language models with add-α smoothing.
//!
//! One model holds three count tables — `toxic`, `neutral` and `any` (the
//! pool of both) — so the same artifact can serve style-conditioned masked
//! filling, style-conditioned generation and style-agnostic scoring.  Those
//! three roles are expressed as the traits [`MaskedLm`], [`GenerativeLm`]
//! and [`ScoringLm`], which is the seam where a heavier model could be
//! plugged in.
//!
//! Probability model: every sentence is padded with `order − 1` start
//! markers and one end marker; a conditional distribution ranges over the
//! vocabulary plus the end marker (`V′ = V + 1` outcomes) and is smoothed as
//! `P(w | ctx) = (count(ctx, w) + α) / (count(ctx, ·) + α·V′)`, which sums
//! to one over the outcome space.  A word outside the vocabulary is scored
//! with the unseen-outcome floor `α / (count(ctx, ·) + α·V′)` — finite and
//! maximally pessimistic, so scoring never divides by zero and never aborts
//! a batch.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::data_io::{LabeledCorpus, StyleLabel};
use crate::error::{Error, Result};
use crate::num::Real;
use crate::rng::SplitMix64;
use crate::text::Sentence;
use crate::toxicity::Vocabulary;

/// Which count table a style-conditioned operation reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LmStyle {
    Toxic,
    Neutral,
    /// Both styles pooled — used for scoring and style-agnostic generation.
    Any,
}

impl From<StyleLabel> for LmStyle {
    fn from(label: StyleLabel) -> Self {
        match label {
            StyleLabel::Toxic => LmStyle::Toxic,
            StyleLabel::Neutral => LmStyle::Neutral,
        }
    }
}

impl std::fmt::Display for LmStyle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LmStyle::Toxic => "toxic",
            LmStyle::Neutral => "neutral",
            LmStyle::Any => "any",
        })
    }
}

/// Internal symbol alphabet: interned vocabulary words plus the sentence
/// markers. `Oov` stands for a context word outside the vocabulary; it can
/// appear in lookup contexts (where it simply never matches a trained
/// context) but never as a counted outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Sym {
    Start,
    End,
    Word(u32),
    Oov,
}

const START_TOKEN: &str = "<s>";
const END_TOKEN: &str = "</s>";

#[derive(Debug, Clone, Default, PartialEq)]
struct StyleTable {
    counts: HashMap<Vec<Sym>, HashMap<Sym, u64>>,
    totals: HashMap<Vec<Sym>, u64>,
}

impl StyleTable {
    fn add(&mut self, context: &[Sym], outcome: Sym) {
        *self
            .counts
            .entry(context.to_vec())
            .or_default()
            .entry(outcome)
            .or_insert(0) += 1;
        *self.totals.entry(context.to_vec()).or_insert(0) += 1;
    }

    fn count(&self, context: &[Sym], outcome: Sym) -> u64 {
        self.counts
            .get(context)
            .and_then(|m| m.get(&outcome))
            .copied()
            .unwrap_or(0)
    }

    fn total(&self, context: &[Sym]) -> u64 {
        self.totals.get(context).copied().unwrap_or(0)
    }
}

/// Add-α smoothed n-gram model over normalized tokens.
#[derive(Debug, Clone, PartialEq)]
pub struct NgramLm {
    order: usize,
    alpha: f64,
    vocab: Vocabulary,
    toxic: StyleTable,
    neutral: StyleTable,
    any: StyleTable,
}

/// Sampling-time knobs for [`filtered_sample`] and generation.
///
/// Temperature here follows the exponent convention `p ← p^(1/t)` with
/// renormalization: `t = 1` leaves the distribution alone, large `t`
/// flattens it towards uniform.
#[derive(Debug, Clone, Copy)]
pub struct GenerationParams {
    /// Keep only the `top_k` most probable candidates (≥ 1).
    pub top_k: usize,
    /// Keep the smallest prefix of the sorted candidates whose cumulative
    /// probability reaches `top_p`; always at least one candidate.
    pub top_p: f64,
    /// Flattening exponent, strictly positive.
    pub temperature: f64,
    /// Generation stops after this many tokens even without an end marker.
    pub max_tokens: usize,
    /// Seed for the documented SplitMix64 stream; equal seeds and inputs
    /// reproduce draws exactly.
    pub seed: u64,
}

impl Default for GenerationParams {
    fn default() -> Self {
        GenerationParams {
            top_k: 3,
            top_p: 0.95,
            temperature: 50.0,
            max_tokens: 30,
            seed: 42,
        }
    }
}

/// A discrete distribution over candidate words, sorted by descending
/// probability (ties by word, ascending). Probabilities are positive and
/// sum to one within float tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateDistribution<F: Real> {
    entries: Vec<(String, F)>,
}

impl<F: Real> CandidateDistribution<F> {
    /// Normalize raw positive scores into a sorted distribution.
    pub fn from_scores(scores: Vec<(String, F)>) -> CandidateDistribution<F> {
        let total: F = scores.iter().map(|(_, s)| *s).sum();
        let mut entries: Vec<(String, F)> = scores
            .into_iter()
            .map(|(w, s)| (w, s / total))
            .collect();
        entries.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| a.0.cmp(&b.0))
        });
        CandidateDistribution { entries }
    }

    pub fn entries(&self) -> &[(String, F)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Most probable candidate (first after canonical sorting).
    pub fn argmax(&self) -> Option<&str> {
        self.entries.first().map(|(w, _)| w.as_str())
    }

    pub fn prob(&self, word: &str) -> Option<F> {
        self.entries
            .iter()
            .find(|(w, _)| w == word)
            .map(|(_, p)| *p)
    }
}

/// Per-sentence log-probability mass and event count under a scoring model.
/// `events` counts scored tokens plus the end marker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SentenceScore<F: Real> {
    pub log_prob: F,
    pub events: usize,
}

/// Masked-substitution contract: a distribution over replacement words for
/// a gap between `left` and `right` (normalized tokens), conditioned on a
/// style.
pub trait MaskedLm<F: Real> {
    fn masked_fill(&self, left: &[String], right: &[String], style: LmStyle)
        -> CandidateDistribution<F>;
}

/// Scoring contract: total log-probability of a sentence, used for
/// perplexity. Errors on sentences with no scoreable tokens.
pub trait ScoringLm<F: Real> {
    fn score_sentence(&self, sentence: &Sentence) -> Result<SentenceScore<F>>;
}

/// Generative contract: continuation tokens for a normalized prompt.
pub trait GenerativeLm {
    fn generate(
        &self,
        prompt: &[String],
        params: &GenerationParams,
        style: LmStyle,
    ) -> Result<Vec<String>>;
}

impl NgramLm {
    /// Count n-grams of the given order over a labeled corpus.
    ///
    /// Every sentence contributes to its own style table and to the pooled
    /// `any` table. The vocabulary is every normalized token type in the
    /// corpus. Preconditions: `order ≥ 1`, `alpha > 0`.
    pub fn train(corpus: &LabeledCorpus, order: usize, alpha: f64) -> Result<NgramLm> {
        if order == 0 {
            return Err(Error::Validation("n-gram order must be at least 1".into()));
        }
        if alpha <= 0.0 || !alpha.is_finite() {
            return Err(Error::Validation(format!(
                "smoothing constant must be positive and finite, got {alpha}"
            )));
        }
        let vocab = Vocabulary::build(corpus, 1);
        let mut lm = NgramLm {
            order,
            alpha,
            vocab,
            toxic: StyleTable::default(),
            neutral: StyleTable::default(),
            any: StyleTable::default(),
        };
        for entry in &corpus.entries {
            let syms = lm.pad(&entry.sentence.norms());
            for i in (order - 1)..syms.len() {
                let context = &syms[i - (order - 1)..i];
                let outcome = syms[i];
                match entry.label {
                    StyleLabel::Toxic => lm.toxic.add(context, outcome),
                    StyleLabel::Neutral => lm.neutral.add(context, outcome),
                }
                lm.any.add(context, outcome);
            }
        }
        Ok(lm)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    /// Effective outcome count: vocabulary plus the end marker.
    pub fn effective_outcomes(&self) -> usize {
        self.vocab.len() + 1
    }

    fn table(&self, style: LmStyle) -> &StyleTable {
        match style {
            LmStyle::Toxic => &self.toxic,
            LmStyle::Neutral => &self.neutral,
            LmStyle::Any => &self.any,
        }
    }

    fn sym(&self, word: &str) -> Sym {
        match self.vocab.index_of(word) {
            Some(i) => Sym::Word(i),
            None => Sym::Oov,
        }
    }

    /// `order − 1` start markers, the words, one end marker.
    fn pad(&self, words: &[String]) -> Vec<Sym> {
        let mut syms = Vec::with_capacity(words.len() + self.order);
        syms.extend(std::iter::repeat_n(Sym::Start, self.order - 1));
        syms.extend(words.iter().map(|w| self.sym(w)));
        syms.push(Sym::End);
        syms
    }

    /// Last `order − 1` symbols of start padding followed by `words`.
    fn context_syms(&self, words: &[String]) -> Vec<Sym> {
        let n = self.order - 1;
        let mut ctx: Vec<Sym> =
            std::iter::repeat_n(Sym::Start, n.saturating_sub(words.len())).collect();
        let tail_start = words.len().saturating_sub(n);
        ctx.extend(words[tail_start..].iter().map(|w| self.sym(w)));
        ctx
    }

    fn smoothed<F: Real>(&self, style: LmStyle, context: &[Sym], outcome: Sym) -> F {
        let table = self.table(style);
        let v_prime = F::of_usize(self.effective_outcomes());
        let alpha = F::of(self.alpha);
        let count = match outcome {
            Sym::Oov => 0, // unseen-outcome floor for out-of-vocabulary words
            _ => table.count(context, outcome),
        };
        let total = table.total(context);
        (F::of_usize(count as usize) + alpha) / (F::of_usize(total as usize) + alpha * v_prime)
    }

    /// Smoothed conditional probability of a vocabulary word (or any word —
    /// out-of-vocabulary words get the unseen floor) after `context`.
    pub fn word_prob<F: Real>(&self, style: LmStyle, context: &[String], word: &str) -> F {
        let ctx = self.context_syms(context);
        self.smoothed(style, &ctx, self.sym(word))
    }

    /// Smoothed conditional probability of the end marker after `context`.
    pub fn end_prob<F: Real>(&self, style: LmStyle, context: &[String]) -> F {
        let ctx = self.context_syms(context);
        self.smoothed(style, &ctx, Sym::End)
    }

    /// Distribution over the next symbol (vocabulary words and the end
    /// marker) given the last `order − 1` symbols of `seq`.
    fn next_symbol_scores<F: Real>(&self, style: LmStyle, seq: &[Sym]) -> Vec<(Sym, F)> {
        let n = self.order - 1;
        let ctx: Vec<Sym> = seq[seq.len() - n..].to_vec();
        let mut scores: Vec<(Sym, F)> = Vec::with_capacity(self.effective_outcomes());
        for i in 0..self.vocab.len() {
            let outcome = Sym::Word(i as u32);
            scores.push((outcome, self.smoothed(style, &ctx, outcome)));
        }
        scores.push((Sym::End, self.smoothed(style, &ctx, Sym::End)));
        scores
    }

    /// Log-probability of a sentence's normalized tokens plus the end
    /// marker, under the pooled (`any`) table.
    pub fn sentence_log_prob<F: Real>(&self, sentence: &Sentence) -> Result<SentenceScore<F>> {
        let words = sentence.norms();
        if words.is_empty() {
            return Err(Error::Numeric(
                "perplexity of a sentence with no tokens is undefined".into(),
            ));
        }
        let syms = self.pad(&words);
        let mut log_prob = F::zero();
        for i in (self.order - 1)..syms.len() {
            let context = &syms[i - (self.order - 1)..i];
            let p: F = self.smoothed(LmStyle::Any, context, syms[i]);
            log_prob += p.ln();
        }
        Ok(SentenceScore {
            log_prob,
            events: words.len() + 1,
        })
    }

    /// `exp(−(1/N) Σ ln P(eventᵢ))` where N counts tokens plus the end
    /// marker. Lower is more fluent under the model.
    pub fn perplexity<F: Real>(&self, sentence: &Sentence) -> Result<F> {
        let score = self.sentence_log_prob::<F>(sentence)?;
        Ok((-score.log_prob / F::of_usize(score.events)).exp())
    }
}

impl<F: Real> MaskedLm<F> for NgramLm {
    /// Score every vocabulary word `w` as
    /// `P(w | left context) · P(right₀ | context ending in w)` and
    /// normalize. With an empty right context the second factor is dropped,
    /// so the result is the pure left conditional restricted to words.
    fn masked_fill(
        &self,
        left: &[String],
        right: &[String],
        style: LmStyle,
    ) -> CandidateDistribution<F> {
        let left_ctx = self.context_syms(left);
        let right_outcome = right.first().map(|w| self.sym(w));
        let mut scores: Vec<(String, F)> = Vec::with_capacity(self.vocab.len());
        for i in 0..self.vocab.len() {
            let candidate = Sym::Word(i as u32);
            let mut score: F = self.smoothed(style, &left_ctx, candidate);
            if let Some(right_sym) = right_outcome {
                // Context for the word after the gap: left ++ [candidate],
                // truncated to order − 1.
                let mut ctx2 = left_ctx.clone();
                ctx2.push(candidate);
                let ctx2 = ctx2[ctx2.len() - (self.order - 1)..].to_vec();
                score *= self.smoothed(style, &ctx2, right_sym);
            }
            scores.push((self.vocab.word(i as u32).to_string(), score));
        }
        CandidateDistribution::from_scores(scores)
    }
}

impl<F: Real> ScoringLm<F> for NgramLm {
    fn score_sentence(&self, sentence: &Sentence) -> Result<SentenceScore<F>> {
        self.sentence_log_prob(sentence)
    }
}

impl GenerativeLm for NgramLm {
    /// Autoregressive sampling: starting from the padded prompt, repeatedly
    /// draw the next symbol through the top-k/top-p/temperature filter until
    /// the end marker or `max_tokens`. One SplitMix64 stream seeded with
    /// `params.seed` drives all steps.
    fn generate(
        &self,
        prompt: &[String],
        params: &GenerationParams,
        style: LmStyle,
    ) -> Result<Vec<String>> {
        validate_params(params)?;
        if self.vocab.is_empty() {
            return Err(Error::Validation("cannot generate from an empty vocabulary".into()));
        }
        let mut seq: Vec<Sym> = std::iter::repeat_n(Sym::Start, self.order - 1).collect();
        seq.extend(prompt.iter().map(|w| self.sym(w)));

        let mut rng = SplitMix64::new(params.seed);
        let mut output = Vec::new();
        for _ in 0..params.max_tokens {
            let scores: Vec<(Sym, f64)> = self.next_symbol_scores(style, &seq);
            let picked = sample_symbol(&scores, self, params, &mut rng);
            match picked {
                Sym::End => break,
                Sym::Word(i) => {
                    output.push(self.vocab.word(i).to_string());
                    seq.push(Sym::Word(i));
                }
                _ => unreachable!("start/oov are never outcomes"),
            }
        }
        Ok(output)
    }
}

fn validate_params(params: &GenerationParams) -> Result<()> {
    if params.top_k == 0 {
        return Err(Error::Validation("top_k must be at least 1".into()));
    }
    if !(params.top_p > 0.0 && params.top_p <= 1.0) {
        return Err(Error::Validation(format!(
            "top_p must be in (0, 1], got {}",
            params.top_p
        )));
    }
    if params.temperature <= 0.0 || !params.temperature.is_finite() {
        return Err(Error::Validation(format!(
            "temperature must be positive and finite, got {}",
            params.temperature
        )));
    }
    Ok(())
}

/// Apply temperature then the top-k/top-p truncations to a sorted score
/// list; returns the renormalized kept prefix. Shared by the public word
/// sampler and the internal symbol sampler.
fn filter_scores<T: Clone>(
    mut scored: Vec<(T, f64)>,
    params: &GenerationParams,
) -> Vec<(T, f64)> {
    // p ← p^(1/t), then renormalize. Monotone, so sort order is unchanged.
    let inv_t = 1.0 / params.temperature;
    for (_, p) in scored.iter_mut() {
        *p = p.powf(inv_t);
    }
    let total: f64 = scored.iter().map(|(_, p)| *p).sum();
    for (_, p) in scored.iter_mut() {
        *p /= total;
    }
    // Both truncations keep a prefix of the same sorted order, so their
    // intersection is simply the shorter prefix.
    let k = params.top_k.min(scored.len());
    let p_len = if params.top_p >= 1.0 {
        scored.len()
    } else {
        let mut cum = 0.0;
        let mut len = scored.len();
        for (i, (_, p)) in scored.iter().enumerate() {
            cum += p;
            if cum >= params.top_p {
                len = i + 1;
                break;
            }
        }
        len
    };
    scored.truncate(k.min(p_len).max(1));
    let kept: f64 = scored.iter().map(|(_, p)| *p).sum();
    for (_, p) in scored.iter_mut() {
        *p /= kept;
    }
    scored
}

fn draw<T: Clone>(filtered: &[(T, f64)], rng: &mut SplitMix64) -> T {
    let u = rng.next_f64();
    let mut cum = 0.0;
    for (item, p) in filtered {
        cum += p;
        if u < cum {
            return item.clone();
        }
    }
    filtered.last().expect("non-empty filtered list").0.clone()
}

fn sample_symbol(
    scores: &[(Sym, f64)],
    lm: &NgramLm,
    params: &GenerationParams,
    rng: &mut SplitMix64,
) -> Sym {
    // Canonical order: probability descending, ties by word ascending with
    // the end marker after all words.
    let mut sorted = scores.to_vec();
    sorted.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| sym_key(a.0, lm).cmp(&sym_key(b.0, lm)))
    });
    let filtered = filter_scores(sorted, params);
    draw(&filtered, rng)
}

fn sym_key(sym: Sym, lm: &NgramLm) -> (u8, String) {
    match sym {
        Sym::Word(i) => (0, lm.vocab.word(i).to_string()),
        Sym::End => (1, String::new()),
        Sym::Start | Sym::Oov => (2, String::new()),
    }
}

/// The top-k/top-p/temperature filter alone, for callers that want the
/// surviving distribution rather than a draw.
pub fn filter_distribution<F: Real>(
    dist: &CandidateDistribution<F>,
    params: &GenerationParams,
) -> Result<CandidateDistribution<F>> {
    validate_params(params)?;
    if dist.is_empty() {
        return Err(Error::Numeric("cannot filter an empty distribution".into()));
    }
    let scored: Vec<(String, f64)> = dist
        .entries()
        .iter()
        .map(|(w, p)| (w.clone(), p.to_f64().expect("probability fits f64")))
        .collect();
    let filtered = filter_scores(scored, params);
    let entries = filtered
        .into_iter()
        .map(|(w, p)| (w, F::of(p)))
        .collect();
    Ok(CandidateDistribution { entries })
}

/// Draw one word from a candidate distribution after filtering. The draw
/// consumes exactly one `next_f64` from a SplitMix64 stream seeded with
/// `params.seed`, so equal inputs reproduce the same word.
pub fn filtered_sample<F: Real>(
    dist: &CandidateDistribution<F>,
    params: &GenerationParams,
) -> Result<String> {
    let mut rng = SplitMix64::new(params.seed);
    filtered_sample_with_rng(dist, params, &mut rng)
}

/// As [`filtered_sample`], drawing from a caller-owned stream — the form
/// used inside multi-step generation.
pub fn filtered_sample_with_rng<F: Real>(
    dist: &CandidateDistribution<F>,
    params: &GenerationParams,
    rng: &mut SplitMix64,
) -> Result<String> {
    let filtered = filter_distribution(dist, params)?;
    let scored: Vec<(String, f64)> = filtered
        .entries()
        .iter()
        .map(|(w, p)| (w.clone(), p.to_f64().expect("probability fits f64")))
        .collect();
    Ok(draw(&scored, rng))
}

const LM_MAGIC: &str = "ngram-lm";
const LM_VERSION: &str = "v1";

/// Persist a model: a `ngram-lm TAB v1 TAB <order> TAB <alpha>` header, a
/// `vocab TAB <space-joined words>` line, then one
/// `style TAB <space-joined n-gram> TAB count` row per counted n-gram of
/// the `toxic` and `neutral` tables, sorted for byte determinism. Markers
/// serialize as `<s>` / `</s>` (no collision: vocabulary words are
/// normalized, which strips angle brackets). The pooled table is rebuilt on
/// load as the sum of the two.
pub fn save_lm(lm: &NgramLm, path: &Path) -> Result<()> {
    let mut out = format!("{LM_MAGIC}\t{LM_VERSION}\t{}\t{}\n", lm.order, lm.alpha);
    out.push_str(&format!("vocab\t{}\n", lm.vocab.words().join(" ")));
    let mut rows: Vec<String> = Vec::new();
    for (style, table) in [("toxic", &lm.toxic), ("neutral", &lm.neutral)] {
        for (context, outcomes) in &table.counts {
            for (outcome, count) in outcomes {
                let mut gram: Vec<&str> = context.iter().map(|s| lm.sym_name(*s)).collect();
                gram.push(lm.sym_name(*outcome));
                rows.push(format!("{style}\t{}\t{count}", gram.join(" ")));
            }
        }
    }
    rows.sort();
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

impl NgramLm {
    fn sym_name(&self, sym: Sym) -> &str {
        match sym {
            Sym::Start => START_TOKEN,
            Sym::End => END_TOKEN,
            Sym::Word(i) => self.vocab.word(i),
            Sym::Oov => unreachable!("oov symbols are never counted"),
        }
    }

    fn parse_sym(&self, name: &str) -> Option<Sym> {
        match name {
            START_TOKEN => Some(Sym::Start),
            END_TOKEN => Some(Sym::End),
            word => self.vocab.index_of(word).map(Sym::Word),
        }
    }
}

/// Load a model saved by [`save_lm`].
pub fn load_lm(path: &Path) -> Result<NgramLm> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = content.lines().enumerate();

    let Some((_, header)) = lines.next() else {
        return Err(Error::parse(path, 1, "empty model file"));
    };
    let fields: Vec<&str> = header.split('\t').collect();
    if fields.len() != 4 || fields[0] != LM_MAGIC || fields[1] != LM_VERSION {
        return Err(Error::parse(
            path,
            1,
            format!("expected `{LM_MAGIC}\\t{LM_VERSION}\\t<order>\\t<alpha>` header"),
        ));
    }
    let order: usize = fields[2]
        .parse()
        .map_err(|_| Error::parse(path, 1, "bad order"))?;
    let alpha: f64 = fields[3]
        .parse()
        .map_err(|_| Error::parse(path, 1, "bad alpha"))?;
    if order == 0 {
        return Err(Error::parse(path, 1, "order must be at least 1"));
    }

    let Some((_, vocab_line)) = lines.next() else {
        return Err(Error::parse(path, 2, "missing vocab line"));
    };
    let Some(words_field) = vocab_line.strip_prefix("vocab\t") else {
        return Err(Error::parse(path, 2, "expected `vocab TAB <words>` line"));
    };
    let words: Vec<String> = if words_field.is_empty() {
        Vec::new()
    } else {
        words_field.split(' ').map(str::to_string).collect()
    };
    let mut lm = NgramLm {
        order,
        alpha,
        vocab: Vocabulary::from_words(words, 1),
        toxic: StyleTable::default(),
        neutral: StyleTable::default(),
        any: StyleTable::default(),
    };

    for (i, line) in lines {
        let row = i + 1;
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::parse(path, row, "expected `style TAB ngram TAB count`"));
        }
        let count: u64 = fields[2]
            .parse()
            .map_err(|_| Error::parse(path, row, format!("bad count {:?}", fields[2])))?;
        let mut syms = Vec::new();
        for name in fields[1].split(' ') {
            let sym = lm.parse_sym(name).ok_or_else(|| {
                Error::parse(path, row, format!("n-gram word {name:?} not in vocabulary"))
            })?;
            syms.push(sym);
        }
        if syms.len() != order {
            return Err(Error::parse(
                path,
                row,
                format!("n-gram has {} symbols, model order is {order}", syms.len()),
            ));
        }
        let (context, outcome) = (syms[..order - 1].to_vec(), syms[order - 1]);
        let table = match fields[0] {
            "toxic" => &mut lm.toxic,
            "neutral" => &mut lm.neutral,
            other => return Err(Error::parse(path, row, format!("unknown style {other:?}"))),
        };
        *table
            .counts
            .entry(context.clone())
            .or_default()
            .entry(outcome)
            .or_insert(0) += count;
        *table.totals.entry(context.clone()).or_insert(0) += count;
        *lm.any
            .counts
            .entry(context.clone())
            .or_default()
            .entry(outcome)
            .or_insert(0) += count;
        *lm.any.totals.entry(context).or_insert(0) += count;
    }
    Ok(lm)
}
