//! Evaluation suite: style transfer accuracy, content preservation (word
//! overlap, BLEU, embedding cosine), fluency (corpus perplexity), and their
//! geometric-mean aggregate with a bootstrap standard deviation.

use std::collections::HashMap;

use crate::baselines::Detoxifier;
use crate::data_io::LabeledCorpus;
use crate::embeddings::{cosine, sentence_vector, EmbeddingTable};
use crate::error::{Error, Result};
use crate::ngram::ScoringLm;
use crate::num::Real;
use crate::rng::SplitMix64;
use crate::text::Sentence;
use crate::toxicity::{is_toxic, ToxicityModel};

/// All per-pair measurements needed to aggregate corpus metrics, including
/// the log-probability mass and event count that corpus perplexity pools.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairScores<F: Real> {
    /// Classifier calls the output neutral (toxic probability < 0.5).
    pub sta_neutral: bool,
    pub wo: F,
    pub bleu: F,
    pub cs: F,
    pub log_prob_sum: F,
    /// Scored events: output tokens plus the end marker; always ≥ 1.
    pub token_count: usize,
}

/// One method's aggregated evaluation row.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport<F: Real> {
    pub method: String,
    pub sta: F,
    pub cs: F,
    pub wo: F,
    pub bleu: F,
    pub ppl: F,
    pub gm: F,
    pub gm_std: F,
    pub n: usize,
}

/// Jaccard overlap of the normalized token sets. Two empty sets count as
/// full overlap; one empty set as none.
pub fn word_overlap<F: Real>(x: &Sentence, y: &Sentence) -> F {
    let a: std::collections::HashSet<String> = x.norms().into_iter().collect();
    let b: std::collections::HashSet<String> = y.norms().into_iter().collect();
    match (a.is_empty(), b.is_empty()) {
        (true, true) => return F::one(),
        (true, false) | (false, true) => return F::zero(),
        _ => {}
    }
    let inter = a.intersection(&b).count();
    let union = a.union(&b).count();
    F::of_usize(inter) / F::of_usize(union)
}

fn ngram_counts(words: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts: HashMap<&[String], usize> = HashMap::new();
    if words.len() >= n {
        for gram in words.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// Sentence BLEU over normalized tokens: geometric mean of clipped n-gram
/// precisions for n = 1..4, times the brevity penalty
/// `min(1, exp(1 − |ref| / |hyp|))`.
///
/// Zero match counts for n ≥ 2 are add-1 smoothed (`(m+1)/(h+1)`), so short
/// but correct outputs are not annihilated by missing long n-grams; a zero
/// unigram precision is not smoothed and yields 0. An empty hypothesis
/// scores 0 outright.
pub fn bleu<F: Real>(reference: &Sentence, hypothesis: &Sentence) -> F {
    let ref_words = reference.norms();
    let hyp_words = hypothesis.norms();
    if hyp_words.is_empty() {
        return F::zero();
    }
    let mut log_sum = F::zero();
    for n in 1..=4 {
        let hyp_grams = ngram_counts(&hyp_words, n);
        let ref_grams = ngram_counts(&ref_words, n);
        let total: usize = hyp_grams.values().sum();
        let matched: usize = hyp_grams
            .iter()
            .map(|(gram, count)| (*count).min(ref_grams.get(gram).copied().unwrap_or(0)))
            .sum();
        let precision = if matched == 0 && n >= 2 {
            F::of_usize(matched + 1) / F::of_usize(total + 1)
        } else if total == 0 {
            // Unigram order only: an empty hypothesis was handled above.
            return F::zero();
        } else {
            F::of_usize(matched) / F::of_usize(total)
        };
        if precision == F::zero() {
            return F::zero();
        }
        log_sum += precision.ln();
    }
    let mean_precision = (log_sum / F::of(4.0)).exp();
    let ratio = F::of_usize(ref_words.len()) / F::of_usize(hyp_words.len());
    let brevity = (F::one() - ratio).exp().min(F::one());
    // The identical-sentence case must be exactly 1: every precision is 1
    // (ln 1 = 0, exp 0 = 1) and the brevity term is min(1, exp(0)) = 1.
    brevity * mean_precision
}

/// Cosine similarity of mean-pooled sentence embeddings; 0 when either
/// sentence has no known words to pool.
pub fn content_similarity<F: Real>(x: &Sentence, y: &Sentence, table: &EmbeddingTable<F>) -> F {
    match (sentence_vector(x, table), sentence_vector(y, table)) {
        (Some(u), Some(v)) => cosine(&u, &v),
        _ => F::zero(),
    }
}

/// Fraction of outputs the classifier labels neutral.
pub fn sta<F: Real>(outputs: &[Sentence], classifier: &ToxicityModel<F>) -> Result<F> {
    if outputs.is_empty() {
        return Err(Error::Validation(
            "style accuracy of an empty output list is undefined".into(),
        ));
    }
    let neutral = outputs.iter().filter(|s| !is_toxic(classifier, s)).count();
    Ok(F::of_usize(neutral) / F::of_usize(outputs.len()))
}

/// Corpus perplexity with token pooling: `exp(−Σ log P / Σ events)` summed
/// over all outputs, not a mean of per-sentence perplexities. Any output
/// with no scoreable tokens is an error.
pub fn corpus_ppl<F: Real>(outputs: &[Sentence], lm: &dyn ScoringLm<F>) -> Result<F> {
    if outputs.is_empty() {
        return Err(Error::Validation(
            "perplexity of an empty output list is undefined".into(),
        ));
    }
    let mut log_prob = F::zero();
    let mut events = 0usize;
    for (i, sentence) in outputs.iter().enumerate() {
        let score = lm
            .score_sentence(sentence)
            .map_err(|e| e.with_context(&format!("sentence {}", i + 1)))?;
        log_prob += score.log_prob;
        events += score.events;
    }
    Ok((-log_prob / F::of_usize(events)).exp())
}

/// Aggregate quality score: `(max(STA,0) · max(CS,0) · max(1/PPL,0))^{1/3}`.
/// Any non-positive factor collapses it to zero. Perplexity must be
/// strictly positive.
pub fn gm<F: Real>(sta: F, cs: F, ppl: F) -> Result<F> {
    if ppl <= F::zero() || ppl.is_nan() {
        return Err(Error::Numeric(format!(
            "geometric mean needs a positive perplexity, got {ppl}"
        )));
    }
    let product = sta.max(F::zero()) * cs.max(F::zero()) * (F::one() / ppl).max(F::zero());
    Ok(product.powf(F::one() / F::of(3.0)))
}

fn resample_gm<F: Real>(pairs: &[PairScores<F>], indices: &[usize]) -> Result<F> {
    let mut neutral = 0usize;
    let mut cs_sum = F::zero();
    let mut log_prob = F::zero();
    let mut events = 0usize;
    for &i in indices {
        let p = &pairs[i];
        if p.sta_neutral {
            neutral += 1;
        }
        cs_sum += p.cs;
        log_prob += p.log_prob_sum;
        events += p.token_count;
    }
    let n = F::of_usize(indices.len());
    let sta = F::of_usize(neutral) / n;
    let cs = cs_sum / n;
    let ppl = (-log_prob / F::of_usize(events)).exp();
    gm(sta, cs, ppl)
}

/// Bootstrap the geometric-mean score: resample the pairs with replacement
/// `resamples` times, recompute corpus STA/CS/PPL and GM per resample, and
/// return the mean and population standard deviation of the resampled GMs.
///
/// Randomness is reproducible and parallelizable by construction: a master
/// SplitMix64 stream seeded with `seed` emits one sub-seed per resample,
/// and resample `r` draws its indices from its own stream seeded with the
/// r-th sub-seed. Statistics use Welford's running update, so a constant
/// sample yields a standard deviation of exactly zero.
pub fn bootstrap_gm<F: Real>(
    pairs: &[PairScores<F>],
    resamples: usize,
    seed: u64,
) -> Result<(F, F)> {
    if pairs.is_empty() {
        return Err(Error::Validation("cannot bootstrap an empty sample".into()));
    }
    if resamples < 2 {
        return Err(Error::Validation(format!(
            "bootstrap needs at least 2 resamples, got {resamples}"
        )));
    }
    let mut master = SplitMix64::new(seed);
    let mut mean = F::zero();
    let mut m2 = F::zero();
    for r in 0..resamples {
        let mut rng = SplitMix64::new(master.next_u64());
        let indices: Vec<usize> = (0..pairs.len()).map(|_| rng.next_index(pairs.len())).collect();
        let g = resample_gm(pairs, &indices)?;
        let delta = g - mean;
        mean += delta / F::of_usize(r + 1);
        m2 += delta * (g - mean);
    }
    let std = (m2 / F::of_usize(resamples)).max(F::zero()).sqrt();
    Ok((mean, std))
}

/// Score one (input, output) pair against every metric.
pub fn score_pair<F: Real>(
    input: &Sentence,
    output: &Sentence,
    classifier: &ToxicityModel<F>,
    table: &EmbeddingTable<F>,
    lm: &dyn ScoringLm<F>,
) -> Result<PairScores<F>> {
    let score = lm.score_sentence(output)?;
    Ok(PairScores {
        sta_neutral: !is_toxic(classifier, output),
        wo: word_overlap(input, output),
        bleu: bleu(input, output),
        cs: content_similarity(input, output, table),
        log_prob_sum: score.log_prob,
        token_count: score.events,
    })
}

/// Aggregate already-scored pairs into a report row.
pub fn aggregate<F: Real>(
    method: &str,
    pairs: &[PairScores<F>],
    resamples: usize,
    seed: u64,
) -> Result<EvalReport<F>> {
    if pairs.is_empty() {
        return Err(Error::Validation("cannot aggregate zero pairs".into()));
    }
    let n = F::of_usize(pairs.len());
    let sta = F::of_usize(pairs.iter().filter(|p| p.sta_neutral).count()) / n;
    let mean = |f: fn(&PairScores<F>) -> F| pairs.iter().map(f).sum::<F>() / n;
    let cs = mean(|p| p.cs);
    let wo = mean(|p| p.wo);
    let bleu = mean(|p| p.bleu);
    let log_prob: F = pairs.iter().map(|p| p.log_prob_sum).sum();
    let events: usize = pairs.iter().map(|p| p.token_count).sum();
    let ppl = (-log_prob / F::of_usize(events)).exp();
    let gm_value = gm(sta, cs, ppl)?;
    let (_, gm_std) = bootstrap_gm(pairs, resamples, seed)?;
    Ok(EvalReport {
        method: method.to_string(),
        sta,
        cs,
        wo,
        bleu,
        ppl,
        gm: gm_value,
        gm_std,
        n: pairs.len(),
    })
}

/// Score aligned inputs and outputs and aggregate them — the entry point
/// when outputs come from files rather than a live method.
#[allow(clippy::too_many_arguments)] // mirrors the evaluation contract
pub fn evaluate_outputs<F: Real>(
    method: &str,
    inputs: &[Sentence],
    outputs: &[Sentence],
    classifier: &ToxicityModel<F>,
    table: &EmbeddingTable<F>,
    lm: &dyn ScoringLm<F>,
    resamples: usize,
    seed: u64,
) -> Result<EvalReport<F>> {
    if inputs.len() != outputs.len() {
        return Err(Error::Alignment {
            left: inputs.len(),
            right: outputs.len(),
            message: format!("inputs vs outputs for method {method}"),
        });
    }
    let pairs: Vec<PairScores<F>> = inputs
        .iter()
        .zip(outputs)
        .enumerate()
        .map(|(i, (x, y))| {
            score_pair(x, y, classifier, table, lm)
                .map_err(|e| e.with_context(&format!("method {method}, sentence {}", i + 1)))
        })
        .collect::<Result<_>>()?;
    aggregate(method, &pairs, resamples, seed)
        .map_err(|e| e.with_context(&format!("method {method}")))
}

/// Run a method over the test corpus and evaluate it end to end.
pub fn evaluate_method<F: Real>(
    method: &dyn Detoxifier,
    test: &LabeledCorpus,
    classifier: &ToxicityModel<F>,
    table: &EmbeddingTable<F>,
    lm: &dyn ScoringLm<F>,
    resamples: usize,
    seed: u64,
) -> Result<EvalReport<F>> {
    let inputs: Vec<Sentence> = test.entries.iter().map(|e| e.sentence.clone()).collect();
    let outputs = method.detoxify_all(&inputs)?;
    evaluate_outputs(
        method.name(),
        &inputs,
        &outputs,
        classifier,
        table,
        lm,
        resamples,
        seed,
    )
}

/// Aligned plain-text table, one row per method:
/// method, STA↑, CS↑, WO↑, BLEU↑, PPL↓, GM↑ (±std).
pub fn format_report_table<F: Real>(reports: &[EvalReport<F>]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<12} {:>6} {:>6} {:>6} {:>6} {:>10} {:>6} {:>8}\n",
        "method", "STA↑", "CS↑", "WO↑", "BLEU↑", "PPL↓", "GM↑", "GM std"
    ));
    for r in reports {
        out.push_str(&format!(
            "{:<12} {:>6.2} {:>6.2} {:>6.2} {:>6.2} {:>10.2} {:>6.2} {:>8.4}\n",
            r.method, r.sta, r.cs, r.wo, r.bleu, r.ppl, r.gm, r.gm_std
        ));
    }
    out
}

/// Machine-readable twin of the table: one `key=value` record line per
/// method, full float precision.
pub fn format_report_records<F: Real>(reports: &[EvalReport<F>]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&format!(
            "method={} n={} sta={:?} cs={:?} wo={:?} bleu={:?} ppl={:?} gm={:?} gm_std={:?}\n",
            r.method, r.n, r.sta, r.cs, r.wo, r.bleu, r.ppl, r.gm, r.gm_std
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::DuplicateMethod;
    use crate::data_io::{LabeledEntry, StyleLabel};
    use crate::ngram::NgramLm;
    use crate::text::tokenize;
    use crate::toxicity::{train, TrainConfig};
    use proptest::prelude::*;

    fn corpus(rows: &[(&str, StyleLabel)]) -> LabeledCorpus {
        LabeledCorpus::new(
            rows.iter()
                .map(|(text, label)| LabeledEntry {
                    sentence: tokenize(text),
                    label: *label,
                })
                .collect(),
        )
    }

    #[test]
    fn word_overlap_set_arithmetic() {
        let wo: f64 = word_overlap(&tokenize("a b c"), &tokenize("a b d"));
        assert_eq!(wo, 0.5, "2 shared of 4 total types");
        assert_eq!(word_overlap::<f64>(&tokenize("a b"), &tokenize("a b")), 1.0);
        assert_eq!(word_overlap::<f64>(&tokenize("a"), &tokenize("b")), 0.0);
        assert_eq!(word_overlap::<f64>(&tokenize(""), &tokenize("")), 1.0);
        assert_eq!(word_overlap::<f64>(&tokenize("a"), &tokenize("")), 0.0);
        // Type-level: repetitions do not matter.
        assert_eq!(word_overlap::<f64>(&tokenize("a a a b"), &tokenize("a b b")), 1.0);
    }

    #[test]
    fn bleu_identity_is_exactly_one() {
        let x = tokenize("тебя вношу в список");
        assert_eq!(bleu::<f64>(&x, &x), 1.0);
        let single = tokenize("слово");
        assert_eq!(bleu::<f64>(&single, &single), 1.0, "short sentences too");
    }

    #[test]
    fn bleu_matches_hand_counted_precisions() {
        // p1..p4 = 5/6, 4/5, 3/4, 2/3; BP = 1 → (1/3)^{1/4}.
        let reference = tokenize("a b c d e");
        let hypothesis = tokenize("a b c d e f");
        let got: f64 = bleu(&reference, &hypothesis);
        let want = (1.0f64 / 3.0).powf(0.25);
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn bleu_edge_cases() {
        let reference = tokenize("a b c");
        assert_eq!(bleu::<f64>(&reference, &tokenize("")), 0.0, "empty hypothesis");
        assert_eq!(
            bleu::<f64>(&reference, &tokenize("x y z")),
            0.0,
            "no unigram matches"
        );
        // Short hypothesis is brevity-penalized: ref 4 tokens, hyp 2 matching
        // tokens: p1 = 1, p2 = 1, p3 = p4 smoothed to 1/1; BP = exp(1 − 2).
        let b: f64 = bleu(&tokenize("a b c d"), &tokenize("a b"));
        assert!((b - (-1.0f64).exp()).abs() < 1e-12, "b = {b}");
    }

    #[test]
    fn bleu_smoothing_rescues_higher_orders_only() {
        // hyp "a x": p1 = 1/2, p2 = 0 → smoothed (0+1)/(1+1) = 1/2,
        // p3 = p4 → no n-grams → (0+1)/(0+1) = 1. BP = 1 (equal lengths).
        let got: f64 = bleu(&tokenize("a b"), &tokenize("a x"));
        let want = (0.5f64 * 0.5 * 1.0 * 1.0).powf(0.25);
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn content_similarity_falls_back_to_zero() {
        let mut table = EmbeddingTable::<f64>::new(2);
        table.insert("a".to_string(), vec![1.0, 0.0]);
        let x = tokenize("a");
        assert_eq!(content_similarity(&x, &x, &table), 1.0);
        assert_eq!(content_similarity(&x, &tokenize("неизвестно"), &table), 0.0);
        assert_eq!(content_similarity(&tokenize(""), &x, &table), 0.0);
    }

    fn marker_classifier() -> ToxicityModel<f64> {
        let c = corpus(&[
            ("дурак совсем", StyleLabel::Toxic),
            ("дурак ты", StyleLabel::Toxic),
            ("хороший день", StyleLabel::Neutral),
            ("ты хороший", StyleLabel::Neutral),
        ]);
        train(&c, &TrainConfig::default()).unwrap()
    }

    #[test]
    fn sta_counts_neutral_fractions() {
        let model = marker_classifier();
        let outputs = vec![
            tokenize("хороший день"),
            tokenize("дурак ты"),
            tokenize("ты хороший"),
            tokenize("совсем дурак"),
        ];
        let s: f64 = sta(&outputs, &model).unwrap();
        assert_eq!(s, 0.5);
        assert!(sta::<f64>(&[], &model).is_err());
    }

    #[test]
    fn corpus_ppl_pools_tokens_not_sentences() {
        let c = corpus(&[
            ("a b c", StyleLabel::Neutral),
            ("c b a", StyleLabel::Toxic),
        ]);
        let lm = NgramLm::train(&c, 2, 0.1).unwrap();
        let outputs = vec![tokenize("a b"), tokenize("c b a c")];
        // Oracle: pool log-probs and event counts explicitly.
        let s1 = lm.sentence_log_prob::<f64>(&outputs[0]).unwrap();
        let s2 = lm.sentence_log_prob::<f64>(&outputs[1]).unwrap();
        let want =
            (-(s1.log_prob + s2.log_prob) / (s1.events + s2.events) as f64).exp();
        let got: f64 = corpus_ppl(&outputs, &lm).unwrap();
        assert!((got - want).abs() < 1e-9);
        // Single sentence: pooling of one equals per-sentence perplexity.
        let single: f64 = corpus_ppl(&outputs[..1], &lm).unwrap();
        let direct: f64 = lm.perplexity(&outputs[0]).unwrap();
        assert_eq!(single, direct);

        assert!(corpus_ppl::<f64>(&[], &lm).is_err(), "empty list");
        assert!(
            corpus_ppl::<f64>(&[tokenize("")], &lm).is_err(),
            "empty output sentence"
        );
    }

    #[test]
    fn gm_reproduces_published_triples() {
        // (STA, CS, PPL) → GM, tolerance ±0.01 against two-decimal targets.
        for (s, c, p, want) in [
            (0.91f64, 0.85, 65.74, 0.22),
            (0.61, 0.77, 36.92, 0.23),
            (0.66, 0.86, 209.95, 0.14),
        ] {
            let got: f64 = gm(s, c, p).unwrap();
            assert!((got - want).abs() <= 0.01, "gm({s},{c},{p}) = {got}, want ≈ {want}");
        }
    }

    #[test]
    fn gm_zero_annihilation_and_errors() {
        assert_eq!(gm::<f64>(0.0, 0.9, 10.0).unwrap(), 0.0);
        assert_eq!(gm::<f64>(0.5, -0.2, 10.0).unwrap(), 0.0, "negative CS clamps");
        assert!(gm::<f64>(0.5, 0.5, 0.0).is_err());
        assert!(gm::<f64>(0.5, 0.5, -3.0).is_err());
    }

    fn toy_pairs() -> Vec<PairScores<f64>> {
        vec![
            PairScores {
                sta_neutral: true,
                wo: 0.8,
                bleu: 0.7,
                cs: 0.9,
                log_prob_sum: -4.0,
                token_count: 3,
            },
            PairScores {
                sta_neutral: false,
                wo: 0.5,
                bleu: 0.4,
                cs: 0.6,
                log_prob_sum: -7.0,
                token_count: 4,
            },
            PairScores {
                sta_neutral: true,
                wo: 1.0,
                bleu: 1.0,
                cs: 1.0,
                log_prob_sum: -2.0,
                token_count: 2,
            },
        ]
    }

    #[test]
    fn bootstrap_of_constant_sample_is_exactly_zero() {
        let pair = toy_pairs()[0];
        let pairs = vec![pair; 7];
        let (mean, std) = bootstrap_gm(&pairs, 500, 42).unwrap();
        assert_eq!(std, 0.0, "no variance in a constant sample");
        let g = resample_gm(&pairs, &[0; 7]).unwrap();
        assert_eq!(mean, g, "mean equals the only attainable value");
    }

    #[test]
    fn bootstrap_is_seed_deterministic() {
        let pairs = toy_pairs();
        let a = bootstrap_gm(&pairs, 300, 7).unwrap();
        let b = bootstrap_gm(&pairs, 300, 7).unwrap();
        assert_eq!(a, b);
        let c = bootstrap_gm(&pairs, 300, 8).unwrap();
        assert_ne!(a, c, "different seed, different resamples");
    }

    #[test]
    fn bootstrap_rejects_degenerate_requests() {
        assert!(bootstrap_gm::<f64>(&[], 100, 1).is_err());
        assert!(bootstrap_gm(&toy_pairs(), 1, 1).is_err());
    }

    /// Independent reimplementation of the documented bootstrap: fresh
    /// SplitMix64 (constants inlined), plain two-pass mean/population-std.
    fn bootstrap_oracle(pairs: &[PairScores<f64>], resamples: usize, seed: u64) -> (f64, f64) {
        fn mix(state: &mut u64) -> u64 {
            *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = *state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^ (z >> 31)
        }
        let mut master = seed;
        let mut gms = Vec::with_capacity(resamples);
        for _ in 0..resamples {
            let mut sub = mix(&mut master);
            let mut neutral = 0usize;
            let mut cs_sum = 0.0;
            let mut log_prob = 0.0;
            let mut events = 0usize;
            for _ in 0..pairs.len() {
                let idx = (mix(&mut sub) % pairs.len() as u64) as usize;
                let p = &pairs[idx];
                if p.sta_neutral {
                    neutral += 1;
                }
                cs_sum += p.cs;
                log_prob += p.log_prob_sum;
                events += p.token_count;
            }
            let n = pairs.len() as f64;
            let sta = neutral as f64 / n;
            let cs = cs_sum / n;
            let ppl = (-log_prob / events as f64).exp();
            let product = sta.max(0.0) * cs.max(0.0) * (1.0 / ppl).max(0.0);
            gms.push(product.powf(1.0 / 3.0));
        }
        let mean = gms.iter().sum::<f64>() / resamples as f64;
        let var = gms.iter().map(|g| (g - mean) * (g - mean)).sum::<f64>() / resamples as f64;
        (mean, var.sqrt())
    }

    #[test]
    fn bootstrap_agrees_with_independent_reimplementation() {
        let pairs = toy_pairs();
        let (mean, std) = bootstrap_gm(&pairs, 1000, 20_240_601).unwrap();
        let (mean_o, std_o) = bootstrap_oracle(&pairs, 1000, 20_240_601);
        assert!((mean - mean_o).abs() < 1e-12, "{mean} vs {mean_o}");
        assert!((std - std_o).abs() < 1e-12, "{std} vs {std_o}");
    }

    #[test]
    fn duplicate_report_has_unit_overlap_columns() {
        let test = corpus(&[
            ("ты дурак совсем", StyleLabel::Toxic),
            ("дурак и точка", StyleLabel::Toxic),
            ("какой ты дурак", StyleLabel::Toxic),
        ]);
        let classifier = marker_classifier();
        let mut table = EmbeddingTable::<f64>::new(2);
        for (w, v) in [
            ("ты", vec![1.0, 0.2]),
            ("дурак", vec![0.3, 0.9]),
            ("совсем", vec![0.5, 0.5]),
            ("и", vec![0.9, 0.1]),
            ("точка", vec![0.2, 0.8]),
            ("какой", vec![0.7, 0.4]),
        ] {
            table.insert(w.to_string(), v);
        }
        let lm = NgramLm::train(&test, 2, 0.1).unwrap();
        let report =
            evaluate_method(&DuplicateMethod, &test, &classifier, &table, &lm, 200, 42).unwrap();
        assert_eq!(report.method, "duplicate");
        assert_eq!(report.n, 3);
        assert_eq!(report.wo, 1.0, "exactly, not approximately");
        assert_eq!(report.bleu, 1.0);
        assert_eq!(report.cs, 1.0);
        // Internal consistency: stored GM is recomputable from its fields.
        let recomputed: f64 = gm(report.sta, report.cs, report.ppl).unwrap();
        assert!((report.gm - recomputed).abs() < 1e-9);
    }

    #[test]
    fn misaligned_outputs_are_an_alignment_error() {
        let classifier = marker_classifier();
        let table = EmbeddingTable::<f64>::new(2);
        let lm = NgramLm::train(
            &corpus(&[("a", StyleLabel::Neutral), ("b", StyleLabel::Toxic)]),
            1,
            0.1,
        )
        .unwrap();
        let err = evaluate_outputs(
            "m",
            &[tokenize("a"), tokenize("b")],
            &[tokenize("a")],
            &classifier,
            &table,
            &lm,
            10,
            1,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Alignment { left: 2, right: 1, .. }));
    }

    #[test]
    fn report_formats_are_readable_and_parseable() {
        let report = EvalReport::<f64> {
            method: "delete".into(),
            sta: 0.91,
            cs: 0.85,
            wo: 0.71,
            bleu: 0.54,
            ppl: 65.74,
            gm: 0.2275,
            gm_std: 0.0123,
            n: 100,
        };
        let table = format_report_table(std::slice::from_ref(&report));
        assert!(table.contains("STA↑"));
        assert!(table.contains("PPL↓"));
        assert!(table.contains("delete"));
        assert!(table.contains("65.74"));

        let records = format_report_records(&[report]);
        let line = records.lines().next().unwrap();
        assert!(line.starts_with("method=delete "));
        for key in ["n=", "sta=", "cs=", "wo=", "bleu=", "ppl=", "gm=", "gm_std="] {
            assert!(line.contains(key), "missing {key} in {line}");
        }
        // Full precision survives the round trip.
        let gm_field = line
            .split_whitespace()
            .find_map(|kv| kv.strip_prefix("gm="))
            .unwrap();
        assert_eq!(gm_field.parse::<f64>().unwrap(), 0.2275);
    }

    proptest! {
        /// Overlap is symmetric and within [0, 1].
        #[test]
        fn word_overlap_is_symmetric(
            a in proptest::collection::vec("[абв]{1,3}", 0..6),
            b in proptest::collection::vec("[абв]{1,3}", 0..6),
        ) {
            let x = tokenize(&a.join(" "));
            let y = tokenize(&b.join(" "));
            let xy: f64 = word_overlap(&x, &y);
            let yx: f64 = word_overlap(&y, &x);
            prop_assert_eq!(xy, yx);
            prop_assert!((0.0..=1.0).contains(&xy));
        }

        /// BLEU stays within [0, 1] and self-BLEU is 1 for non-empty inputs.
        #[test]
        fn bleu_bounds_and_identity(
            a in proptest::collection::vec("[абв]{1,3}", 1..8),
            b in proptest::collection::vec("[абв]{1,3}", 0..8),
        ) {
            let x = tokenize(&a.join(" "));
            let y = tokenize(&b.join(" "));
            let score: f64 = bleu(&x, &y);
            prop_assert!((0.0..=1.0 + 1e-15).contains(&score), "score = {}", score);
            prop_assert_eq!(bleu::<f64>(&x, &x), 1.0);
        }

        /// GM is monotone: up in STA and CS, down in PPL.
        #[test]
        fn gm_is_monotone(
            sta in 0.01f64..1.0,
            cs in 0.01f64..1.0,
            ppl in 1.0f64..100.0,
            bump in 0.01f64..0.5,
        ) {
            let base: f64 = gm(sta, cs, ppl).unwrap();
            prop_assert!(gm(sta + bump, cs, ppl).unwrap() >= base);
            prop_assert!(gm(sta, cs + bump, ppl).unwrap() >= base);
            prop_assert!(gm(sta, cs, ppl + bump).unwrap() <= base);
        }
    }
}
