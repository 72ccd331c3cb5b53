//! Reference detoxification methods: pass the text through unchanged,
//! drop lexicon words, or swap the whole sentence for its nearest neutral
//! neighbor. All heavier methods are judged against these three.

use crate::embeddings::{nearest_neighbor, EmbeddingTable, RetrieveIndex};
use crate::error::Result;
use crate::num::Real;
use crate::text::{LemmaTable, Sentence};
use crate::toxicity::ToxicityLexicon;

/// A detoxification method: a deterministic sentence-to-sentence transform.
pub trait Detoxifier {
    /// Short identifier used in reports and file names.
    fn name(&self) -> &str;
    fn detoxify(&self, input: &Sentence) -> Result<Sentence>;

    /// Transform a batch, preserving order. Fails on the first error.
    fn detoxify_all(&self, inputs: &[Sentence]) -> Result<Vec<Sentence>> {
        inputs.iter().map(|s| self.detoxify(s)).collect()
    }
}

/// Return the input unchanged — the lower bound on content preservation
/// loss and the upper bound on residual toxicity.
pub fn duplicate(input: &Sentence) -> Sentence {
    input.clone()
}

/// Remove every token whose normalized form — or its lemma, when a lemma
/// table is supplied — is in the lexicon. Surviving tokens keep their order
/// and surface forms; the raw text is rebuilt with single spaces. The
/// result may be empty when every token matches.
pub fn delete<F: Real>(
    input: &Sentence,
    lexicon: &ToxicityLexicon<F>,
    lemmas: Option<&LemmaTable>,
) -> Sentence {
    let kept: Vec<&str> = input
        .tokens
        .iter()
        .filter(|token| {
            if lexicon.contains(&token.norm) {
                return false;
            }
            if let Some(table) = lemmas {
                if lexicon.contains(table.lemma(&token.norm)) {
                    return false;
                }
            }
            true
        })
        .map(|token| token.surface.as_str())
        .collect();
    Sentence::from_surfaces(&kept)
}

/// Replace the input with the most similar sentence from a neutral corpus,
/// by cosine of mean-pooled embeddings. The output is always a member of
/// the index; errors only on an empty index.
pub fn retrieve<F: Real>(
    input: &Sentence,
    index: &RetrieveIndex<F>,
    table: &EmbeddingTable<F>,
) -> Result<Sentence> {
    nearest_neighbor(input, index, table).cloned()
}

/// [`duplicate`] as a [`Detoxifier`].
#[derive(Debug, Clone, Copy, Default)]
pub struct DuplicateMethod;

impl Detoxifier for DuplicateMethod {
    fn name(&self) -> &str {
        "duplicate"
    }

    fn detoxify(&self, input: &Sentence) -> Result<Sentence> {
        Ok(duplicate(input))
    }
}

/// [`delete`] as a [`Detoxifier`].
#[derive(Debug, Clone)]
pub struct DeleteMethod<F: Real> {
    lexicon: ToxicityLexicon<F>,
    lemmas: Option<LemmaTable>,
}

impl<F: Real> DeleteMethod<F> {
    pub fn new(lexicon: ToxicityLexicon<F>, lemmas: Option<LemmaTable>) -> DeleteMethod<F> {
        DeleteMethod { lexicon, lemmas }
    }
}

impl<F: Real> Detoxifier for DeleteMethod<F> {
    fn name(&self) -> &str {
        "delete"
    }

    fn detoxify(&self, input: &Sentence) -> Result<Sentence> {
        Ok(delete(input, &self.lexicon, self.lemmas.as_ref()))
    }
}

/// [`retrieve`] as a [`Detoxifier`].
#[derive(Debug, Clone)]
pub struct RetrieveMethod<F: Real> {
    index: RetrieveIndex<F>,
    table: EmbeddingTable<F>,
}

impl<F: Real> RetrieveMethod<F> {
    pub fn new(index: RetrieveIndex<F>, table: EmbeddingTable<F>) -> RetrieveMethod<F> {
        RetrieveMethod { index, table }
    }
}

impl<F: Real> Detoxifier for RetrieveMethod<F> {
    fn name(&self) -> &str {
        "retrieve"
    }

    fn detoxify(&self, input: &Sentence) -> Result<Sentence> {
        retrieve(input, &self.index, &self.table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::tokenize;
    use proptest::prelude::*;

    fn lexicon(words: &[&str]) -> ToxicityLexicon<f64> {
        ToxicityLexicon::from_entries(words.iter().map(|w| (w.to_string(), 1.0)))
    }

    #[test]
    fn duplicate_is_byte_identical() {
        let x = tokenize("Ты, дурак!  (и не только)");
        let y = duplicate(&x);
        assert_eq!(y.raw, x.raw);
        assert_eq!(y, x);
    }

    #[test]
    fn delete_removes_the_flagged_word() {
        let x = tokenize("тебя вношу в список долбаебов");
        let y = delete(&x, &lexicon(&["долбаебов"]), None);
        assert_eq!(y.raw, "тебя вношу в список");
    }

    #[test]
    fn delete_without_matches_keeps_the_tokenized_view() {
        let x = tokenize("совершенно нейтральное предложение");
        let y = delete(&x, &lexicon(&["дурак"]), None);
        assert_eq!(y.raw, x.tokenized_view());
        assert_eq!(y.norms(), x.norms());
    }

    #[test]
    fn delete_can_empty_a_sentence() {
        let x = tokenize("дурак идиот");
        let y = delete(&x, &lexicon(&["дурак", "идиот"]), None);
        assert!(y.is_empty());
        assert_eq!(y.raw, "");
    }

    #[test]
    fn delete_matches_case_insensitively_and_through_punctuation() {
        let x = tokenize("Дурак, говорю!");
        let y = delete(&x, &lexicon(&["дурак"]), None);
        // The word goes; its peeled punctuation tokens stay.
        assert_eq!(y.raw, ", говорю !");
    }

    #[test]
    fn delete_uses_lemmas_when_available() {
        let lemmas = LemmaTable::from_pairs([("долбаебов", "долбаеб")]);
        let x = tokenize("тебя вношу в список долбаебов");
        // The lexicon holds only the lemma; the inflected form matches via
        // the table.
        let y = delete(&x, &lexicon(&["долбаеб"]), Some(&lemmas));
        assert_eq!(y.raw, "тебя вношу в список");
        // Without the table the inflected form survives.
        let z = delete(&x, &lexicon(&["долбаеб"]), None);
        assert_eq!(z.norms().len(), 5);
    }

    #[test]
    fn retrieve_returns_an_index_member() {
        let mut table = EmbeddingTable::<f64>::new(2);
        table.insert("a".to_string(), vec![1.0, 0.0]);
        table.insert("b".to_string(), vec![0.0, 1.0]);
        table.insert("c".to_string(), vec![1.0, 1.0]);
        let index = RetrieveIndex::build(
            vec![tokenize("a"), tokenize("b"), tokenize("c")],
            &table,
        );
        let out = retrieve(&tokenize("a"), &index, &table).unwrap();
        assert_eq!(out.raw, "a", "query equal to a member returns that member");

        let method = RetrieveMethod::new(index, table);
        for query in ["a", "b", "c", "a b", "совсем новое"] {
            let out = method.detoxify(&tokenize(query)).unwrap();
            assert!(["a", "b", "c"].contains(&out.raw.as_str()));
        }
    }

    #[test]
    fn retrieve_single_member_index_always_answers_it() {
        let mut table = EmbeddingTable::<f64>::new(2);
        table.insert("a".to_string(), vec![1.0, 0.0]);
        let index = RetrieveIndex::build(vec![tokenize("a")], &table);
        for query in ["a", "b", ""] {
            let out = retrieve(&tokenize(query), &index, &table).unwrap();
            assert_eq!(out.raw, "a");
        }
    }

    #[test]
    fn detoxify_all_preserves_order() {
        let method = DuplicateMethod;
        let inputs = vec![tokenize("раз"), tokenize("два"), tokenize("три")];
        let outputs = method.detoxify_all(&inputs).unwrap();
        assert_eq!(outputs, inputs);
    }

    proptest! {
        /// Delete output never contains a lexicon word and survivors keep
        /// their relative order.
        #[test]
        fn delete_is_clean_and_order_preserving(
            words in proptest::collection::vec("[абвгд]{1,4}", 1..12),
            bad in proptest::collection::hash_set("[абвгд]{1,4}", 1..4),
        ) {
            let text = words.join(" ");
            let bad_words: Vec<&str> = bad.iter().map(String::as_str).collect();
            let lex = lexicon(&bad_words);
            let x = tokenize(&text);
            let y = delete(&x, &lex, None);
            for norm in y.norms() {
                prop_assert!(!lex.contains(&norm), "lexicon word {norm:?} survived");
            }
            // Order: surviving norms appear as a subsequence of the input.
            let input_norms = x.norms();
            let mut cursor = 0;
            for norm in y.norms() {
                let pos = input_norms[cursor..]
                    .iter()
                    .position(|w| *w == norm)
                    .expect("survivor came from the input");
                cursor += pos + 1;
            }
        }
    }
}
