//! Paraphrase prompting: build the prompt strings that ask a generative
//! model to rewrite a sentence, run any [`GenerativeLm`], and parse the
//! continuation back into a sentence.
//!
//! Three regimes share one prompt grammar. Zero-shot sends only an
//! instruction line and the query; few-shot prepends worked examples from a
//! parallel corpus; the fine-tune simulation trains the n-gram model on
//! `source {sep} target` records and prompts with `source {sep}` so the
//! learned chain continues into the target. The separator lives at the
//! string level only — normalization strips it, so token-level models never
//! see it — which is exactly why parsing can split reliably on it.

use crate::data_io::{LabeledCorpus, LabeledEntry, ParallelCorpus, StyleLabel};
use crate::error::{Error, Result};
use crate::ngram::{GenerationParams, GenerativeLm, LmStyle};
use crate::text::{tokenize, Sentence};

/// Prompt grammar: instruction prefix and example separator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    pub paraphrase_prefix: String,
    pub separator: String,
}

impl Default for PromptTemplate {
    fn default() -> Self {
        PromptTemplate {
            paraphrase_prefix: "Перефразируй".to_string(),
            separator: ">>>".to_string(),
        }
    }
}

impl PromptTemplate {
    /// A template with a custom prefix and separator. The separator must be
    /// non-empty — parsing splits on it.
    pub fn new(paraphrase_prefix: &str, separator: &str) -> Result<PromptTemplate> {
        if separator.is_empty() {
            return Err(Error::Validation("prompt separator must be non-empty".into()));
        }
        Ok(PromptTemplate {
            paraphrase_prefix: paraphrase_prefix.to_string(),
            separator: separator.to_string(),
        })
    }

    /// Corpus text used inside a prompt must not contain the separator,
    /// or parsing would split at the wrong place.
    fn check_text(&self, raw: &str, role: &str) -> Result<()> {
        if raw.contains(&self.separator) {
            return Err(Error::Validation(format!(
                "{role} text contains the prompt separator {:?}: {raw:?}",
                self.separator
            )));
        }
        Ok(())
    }
}

/// `{prefix}\n{raw} {sep}` — instruction line, then the query awaiting its
/// rewrite.
pub fn build_zero_shot(sentence: &Sentence, template: &PromptTemplate) -> String {
    format!(
        "{}\n{} {}",
        template.paraphrase_prefix, sentence.raw, template.separator
    )
}

/// `{raw} {sep}` — the inference-time prompt matching the fine-tune record
/// format, with no instruction line.
pub fn build_finetune_prompt(sentence: &Sentence, template: &PromptTemplate) -> String {
    format!("{} {}", sentence.raw, template.separator)
}

/// The first `k` pairs as worked examples (`src {sep} tgt`, one per line,
/// corpus order), then the zero-shot block. `k = 0` is byte-identical to
/// [`build_zero_shot`].
pub fn build_few_shot(
    pairs: &ParallelCorpus,
    sentence: &Sentence,
    k: usize,
    template: &PromptTemplate,
) -> Result<String> {
    if k > pairs.len() {
        return Err(Error::Validation(format!(
            "asked for {k} few-shot examples but the parallel corpus has {}",
            pairs.len()
        )));
    }
    let mut out = String::new();
    for (src, tgt) in &pairs.pairs[..k] {
        template.check_text(&src.raw, "few-shot source")?;
        template.check_text(&tgt.raw, "few-shot target")?;
        out.push_str(&format!("{} {} {}\n", src.raw, template.separator, tgt.raw));
    }
    out.push_str(&build_zero_shot(sentence, template));
    Ok(out)
}

/// One `src {sep} tgt` record per pair, corpus order preserved.
pub fn build_finetune_records(
    pairs: &ParallelCorpus,
    template: &PromptTemplate,
) -> Result<Vec<String>> {
    pairs
        .pairs
        .iter()
        .map(|(src, tgt)| {
            template.check_text(&src.raw, "fine-tune source")?;
            template.check_text(&tgt.raw, "fine-tune target")?;
            Ok(format!("{} {} {}", src.raw, template.separator, tgt.raw))
        })
        .collect()
}

/// Fine-tune records as a trainable corpus: each record becomes one
/// neutral-labeled sentence, so an n-gram model trained on it learns the
/// source-to-target chains.
pub fn finetune_corpus(pairs: &ParallelCorpus, template: &PromptTemplate) -> Result<LabeledCorpus> {
    let entries = build_finetune_records(pairs, template)?
        .into_iter()
        .map(|record| LabeledEntry {
            sentence: tokenize(&record),
            label: StyleLabel::Neutral,
        })
        .collect();
    Ok(LabeledCorpus::new(entries))
}

/// Extract the rewrite from raw generated text: everything after the last
/// separator (the whole string if none), cut at the first newline, trimmed,
/// tokenized. An empty rewrite is a valid empty sentence.
pub fn parse_generation(output: &str, template: &PromptTemplate) -> Sentence {
    let tail = match output.rfind(&template.separator) {
        Some(at) => &output[at + template.separator.len()..],
        None => output,
    };
    let line = tail.split('\n').next().unwrap_or("");
    tokenize(line.trim())
}

/// Prompting regime: zero-shot instruction, few-shot with `k` worked
/// examples, or inference against a model trained on fine-tune records.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PromptMode {
    ZeroShot,
    FewShot { k: usize },
    FinetunedSim,
}

impl PromptMode {
    pub fn name(&self) -> &'static str {
        match self {
            PromptMode::ZeroShot => "prompt-zero",
            PromptMode::FewShot { .. } => "prompt-few",
            PromptMode::FinetunedSim => "prompt-ft",
        }
    }
}

/// Build the prompt for `mode`, generate a continuation, and parse the
/// rewrite out of `prompt + " " + continuation`.
///
/// The generator sees the prompt's normalized tokens (the separator and
/// punctuation drop out) and pooled-style counts — prompting carries the
/// style signal in the text itself, not in a style condition. Deterministic
/// given `params.seed`.
pub fn detoxify_prompted(
    sentence: &Sentence,
    lm: &dyn GenerativeLm,
    mode: PromptMode,
    params: &GenerationParams,
    pairs: Option<&ParallelCorpus>,
    template: &PromptTemplate,
) -> Result<Sentence> {
    let prompt = match mode {
        PromptMode::ZeroShot => build_zero_shot(sentence, template),
        PromptMode::FewShot { k } => {
            let pairs = pairs.ok_or_else(|| {
                Error::Validation("few-shot prompting needs a parallel corpus".into())
            })?;
            build_few_shot(pairs, sentence, k, template)?
        }
        PromptMode::FinetunedSim => build_finetune_prompt(sentence, template),
    };
    let prompt_tokens = tokenize(&prompt).norms();
    let continuation = lm.generate(&prompt_tokens, params, LmStyle::Any)?;
    let full = format!("{prompt} {}", continuation.join(" "));
    Ok(parse_generation(&full, template))
}

/// Prompted generation as a [`Detoxifier`](crate::baselines::Detoxifier),
/// borrowing the generative LM.
pub struct PromptedMethod<'a> {
    lm: &'a dyn GenerativeLm,
    mode: PromptMode,
    params: GenerationParams,
    pairs: Option<ParallelCorpus>,
    template: PromptTemplate,
}

impl<'a> PromptedMethod<'a> {
    pub fn new(
        lm: &'a dyn GenerativeLm,
        mode: PromptMode,
        params: GenerationParams,
        pairs: Option<ParallelCorpus>,
        template: PromptTemplate,
    ) -> PromptedMethod<'a> {
        PromptedMethod {
            lm,
            mode,
            params,
            pairs,
            template,
        }
    }
}

impl crate::baselines::Detoxifier for PromptedMethod<'_> {
    fn name(&self) -> &str {
        self.mode.name()
    }

    fn detoxify(&self, input: &Sentence) -> Result<Sentence> {
        detoxify_prompted(
            input,
            self.lm,
            self.mode,
            &self.params,
            self.pairs.as_ref(),
            &self.template,
        )
    }
}
