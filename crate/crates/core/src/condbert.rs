//! Masked-substitution detoxification: find lexicon words, mask them, and
//! refill each gap from a style-conditioned masked LM whose candidates are
//! penalized (or banned outright) by toxicity weight. Replacements may be
//! longer than one word: a beam search scores every candidate sequence by
//! the harmonic mean of its token probabilities and the best sequence of
//! any length wins.

use std::cmp::Ordering;

use crate::baselines::Detoxifier;
use crate::error::{Error, Result};
use crate::ngram::{CandidateDistribution, LmStyle, MaskedLm};
use crate::num::Real;
use crate::text::{Sentence, Token};
use crate::toxicity::ToxicityLexicon;

/// Knobs for masked substitution.
#[derive(Debug, Clone, Copy)]
pub struct CondBertConfig<F: Real> {
    /// Toxicity penalty strength: a lexicon word's probability is scaled by
    /// `exp(−lambda · weight)`. Ignored under `hard_ban`.
    pub lambda: F,
    /// Beam width for multi-token replacements.
    pub beam_width: usize,
    /// Longest replacement considered for one masked word.
    pub max_len: usize,
    /// Exclude lexicon words from the candidate pool entirely instead of
    /// down-weighting them — the masked LM can otherwise answer a toxic gap
    /// with a synonym just as toxic.
    pub hard_ban: bool,
    /// Which count table fills the gaps. `Neutral` conditions replacements
    /// on the target style; `Any` reproduces a style-blind fill.
    pub style: LmStyle,
}

impl<F: Real> Default for CondBertConfig<F> {
    fn default() -> Self {
        CondBertConfig {
            lambda: F::of(1.5),
            beam_width: 10,
            max_len: 3,
            hard_ban: true,
            style: LmStyle::Neutral,
        }
    }
}

impl<F: Real> CondBertConfig<F> {
    pub fn validate(&self) -> Result<()> {
        if self.lambda < F::zero() || !self.lambda.is_finite() {
            return Err(Error::Validation(format!(
                "toxicity penalty must be finite and non-negative, got {}",
                self.lambda
            )));
        }
        if self.beam_width == 0 {
            return Err(Error::Validation("beam width must be at least 1".into()));
        }
        if self.max_len == 0 {
            return Err(Error::Validation(
                "maximum replacement length must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// A candidate replacement sequence with per-token probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamHypothesis<F: Real> {
    pub tokens: Vec<String>,
    pub probs: Vec<F>,
}

impl<F: Real> BeamHypothesis<F> {
    fn empty() -> BeamHypothesis<F> {
        BeamHypothesis {
            tokens: Vec::new(),
            probs: Vec::new(),
        }
    }

    pub fn extended(&self, token: String, prob: F) -> BeamHypothesis<F> {
        let mut tokens = self.tokens.clone();
        let mut probs = self.probs.clone();
        tokens.push(token);
        probs.push(prob);
        BeamHypothesis { tokens, probs }
    }

    /// Harmonic mean of the token probabilities: `len / Σ(1/pᵢ)`.
    /// Always between the smallest and largest probability. A single token
    /// scores exactly its probability — computed directly rather than as
    /// `1/(1/p)`, whose double rounding can drift one ulp and make a
    /// one-word replacement spuriously lose a tie against a repetition of
    /// itself.
    pub fn score(&self) -> F {
        debug_assert!(!self.probs.is_empty(), "scoring an empty hypothesis");
        if self.probs.len() == 1 {
            return self.probs[0];
        }
        let recip_sum: F = self.probs.iter().map(|p| F::one() / *p).sum();
        F::of_usize(self.probs.len()) / recip_sum
    }
}

/// Hypothesis preference: higher score first, then shorter, then
/// lexicographically smaller tokens. Used both for beam pruning and for the
/// final answer, so ties resolve identically everywhere.
fn rank<F: Real>(a: &BeamHypothesis<F>, b: &BeamHypothesis<F>) -> Ordering {
    b.score()
        .partial_cmp(&a.score())
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.tokens.len().cmp(&b.tokens.len()))
        .then_with(|| a.tokens.cmp(&b.tokens))
}

/// Indices (ascending) of tokens whose normalized form is in the lexicon.
/// Punctuation tokens have empty normalized forms and never match.
pub fn find_mask_positions<F: Real>(
    sentence: &Sentence,
    lexicon: &ToxicityLexicon<F>,
) -> Vec<usize> {
    sentence
        .tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| !t.norm.is_empty() && lexicon.contains(&t.norm))
        .map(|(i, _)| i)
        .collect()
}

/// Down-weight or remove lexicon words from a candidate distribution.
///
/// With `hard_ban` the lexicon words are dropped; otherwise each lexicon
/// word's probability is multiplied by `exp(−lambda · weight)`. The result
/// is renormalized. Note the renormalization means an individual lexicon
/// word's share is only guaranteed to fall monotonically with `lambda`
/// relative to each unpenalized word — when several lexicon words compete,
/// a lightly-weighted one can gain share as a heavier one collapses.
///
/// Errors when nothing survives: an empty input distribution, a ban that
/// covers every candidate, or penalties that underflow all mass to zero.
pub fn penalized_distribution<F: Real>(
    dist: &CandidateDistribution<F>,
    lexicon: &ToxicityLexicon<F>,
    lambda: F,
    hard_ban: bool,
) -> Result<CandidateDistribution<F>> {
    if dist.is_empty() {
        return Err(Error::Validation(
            "cannot penalize an empty candidate distribution".into(),
        ));
    }
    let mut kept: Vec<(String, F)> = Vec::with_capacity(dist.len());
    for (word, p) in dist.entries() {
        match lexicon.weight(word) {
            Some(_) if hard_ban => {}
            Some(weight) => {
                let scaled = *p * (-lambda * weight).exp();
                if scaled > F::zero() {
                    kept.push((word.clone(), scaled));
                }
            }
            None => kept.push((word.clone(), *p)),
        }
    }
    let total: F = kept.iter().map(|(_, p)| *p).sum();
    if kept.is_empty() || total <= F::zero() {
        return Err(Error::Validation(
            "toxicity penalty removed every candidate — lexicon covers the whole vocabulary"
                .into(),
        ));
    }
    Ok(CandidateDistribution::from_scores(kept))
}

/// Best replacement for one masked gap between `left` and `right`
/// (normalized tokens), searched over sequences of 1 to `max_len` words.
///
/// Each step extends every beam hypothesis with the `beam_width` most
/// probable words of the penalized masked-fill distribution, where the left
/// context is the original left plus the hypothesis so far. Sequences of
/// different lengths compete directly on harmonic-mean score; every scored
/// candidate competes for the final answer even if pruned from the beam, so
/// a beam as wide as the vocabulary degenerates to exhaustive search.
pub fn beam_replace<F: Real>(
    left: &[String],
    right: &[String],
    lm: &dyn MaskedLm<F>,
    config: &CondBertConfig<F>,
    lexicon: &ToxicityLexicon<F>,
) -> Result<Vec<String>> {
    config.validate()?;
    let mut best: Option<BeamHypothesis<F>> = None;
    let mut beam: Vec<BeamHypothesis<F>> = vec![BeamHypothesis::empty()];
    for _ in 0..config.max_len {
        let mut expansions: Vec<BeamHypothesis<F>> = Vec::new();
        for hyp in &beam {
            let mut ctx: Vec<String> = left.to_vec();
            ctx.extend(hyp.tokens.iter().cloned());
            let dist = lm.masked_fill(&ctx, right, config.style);
            let dist = penalized_distribution(&dist, lexicon, config.lambda, config.hard_ban)?;
            for (word, p) in dist.entries().iter().take(config.beam_width) {
                let candidate = hyp.extended(word.clone(), *p);
                if best
                    .as_ref()
                    .is_none_or(|b| rank(&candidate, b) == Ordering::Less)
                {
                    best = Some(candidate.clone());
                }
                expansions.push(candidate);
            }
        }
        expansions.sort_by(rank);
        expansions.truncate(config.beam_width);
        beam = expansions;
    }
    Ok(best.expect("max_len ≥ 1 scores at least one candidate").tokens)
}

/// Full masked-substitution pass over a sentence.
///
/// Mask positions are taken from the input once, then filled left to right;
/// each replacement is spliced in before the next gap is processed, so
/// later gaps condition on earlier replacements while still seeing the
/// original words to their right. The output is rebuilt from the surviving
/// surfaces and the replacement words.
pub fn detoxify_condbert<F: Real>(
    sentence: &Sentence,
    lm: &dyn MaskedLm<F>,
    lexicon: &ToxicityLexicon<F>,
    config: &CondBertConfig<F>,
) -> Result<Sentence> {
    config.validate()?;
    let positions = find_mask_positions(sentence, lexicon);
    if positions.is_empty() {
        return Ok(sentence.clone());
    }
    let mut work: Vec<Token> = sentence.tokens.clone();
    let mut offset: isize = 0;
    for position in positions {
        let at = (position as isize + offset) as usize;
        let left: Vec<String> = work[..at]
            .iter()
            .filter(|t| !t.norm.is_empty())
            .map(|t| t.norm.clone())
            .collect();
        let right: Vec<String> = work[at + 1..]
            .iter()
            .filter(|t| !t.norm.is_empty())
            .map(|t| t.norm.clone())
            .collect();
        let replacement = beam_replace(&left, &right, lm, config, lexicon)?;
        let replacement_tokens: Vec<Token> = replacement
            .into_iter()
            .map(|word| Token {
                // Vocabulary words are already normalized (normalization is
                // idempotent), so surface and norm coincide.
                norm: word.clone(),
                surface: word,
            })
            .collect();
        offset += replacement_tokens.len() as isize - 1;
        work.splice(at..=at, replacement_tokens);
    }
    let surfaces: Vec<&str> = work.iter().map(|t| t.surface.as_str()).collect();
    Ok(Sentence::from_surfaces(&surfaces))
}

/// Masked substitution as a [`Detoxifier`], borrowing the masked LM.
pub struct CondBertMethod<'a, F: Real> {
    lm: &'a dyn MaskedLm<F>,
    lexicon: ToxicityLexicon<F>,
    config: CondBertConfig<F>,
}

impl<'a, F: Real> CondBertMethod<'a, F> {
    pub fn new(
        lm: &'a dyn MaskedLm<F>,
        lexicon: ToxicityLexicon<F>,
        config: CondBertConfig<F>,
    ) -> CondBertMethod<'a, F> {
        CondBertMethod { lm, lexicon, config }
    }
}

impl<F: Real> Detoxifier for CondBertMethod<'_, F> {
    fn name(&self) -> &str {
        "condbert"
    }

    fn detoxify(&self, input: &Sentence) -> Result<Sentence> {
        detoxify_condbert(input, self.lm, &self.lexicon, &self.config)
    }
}
