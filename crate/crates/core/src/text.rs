//! Tokenization and word normalization.
//!
//! The unit of processing everywhere in this crate is the [`Sentence`]: the
//! raw string plus a token list where each token keeps its original surface
//! and a normalized form.  Tokenization is deliberately simple — split on
//! Unicode whitespace, then peel leading/trailing punctuation runs off each
//! chunk into tokens of their own.  No subword segmentation.
//!
//! Normalization (lowercase, strip surrounding punctuation) stands in for
//! lemmatization when no lemma table is supplied; both live behind the
//! [`Normalizer`] contract so lexicon matching can swap one for the other.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// One token: the surface exactly as written and its normalized form.
/// The norm of a pure-punctuation token is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub norm: String,
}

/// A tokenized sentence. `raw` is the input string as given; rebuilt
/// sentences carry the single-space join of their surfaces instead.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Sentence {
    pub raw: String,
    pub tokens: Vec<Token>,
}

impl Sentence {
    /// Surfaces joined with single spaces. Re-tokenizing this view yields
    /// the same token list (tokenization is idempotent on its own output).
    pub fn tokenized_view(&self) -> String {
        let surfaces: Vec<&str> = self.tokens.iter().map(|t| t.surface.as_str()).collect();
        surfaces.join(" ")
    }

    /// Build a sentence from token surfaces; `raw` becomes the joined view.
    pub fn from_surfaces<S: AsRef<str>>(surfaces: &[S]) -> Sentence {
        let raw = surfaces
            .iter()
            .map(|s| s.as_ref())
            .collect::<Vec<_>>()
            .join(" ");
        tokenize(&raw)
    }

    /// Non-empty normalized forms, in order. Punctuation tokens drop out.
    pub fn norms(&self) -> Vec<String> {
        self.tokens
            .iter()
            .filter(|t| !t.norm.is_empty())
            .map(|t| t.norm.clone())
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Everything that is neither alphanumeric nor whitespace counts as
/// punctuation here — this covers symbols like `>` as well.
fn is_punct(c: char) -> bool {
    !c.is_alphanumeric() && !c.is_whitespace()
}

/// Split a string into tokens: whitespace separation, then each chunk's
/// leading and trailing punctuation runs become tokens of their own.
/// An empty or all-whitespace input yields an empty sentence, not an error.
pub fn tokenize(raw: &str) -> Sentence {
    let mut tokens = Vec::new();
    for chunk in raw.split_whitespace() {
        let core_start = chunk
            .char_indices()
            .find(|(_, c)| !is_punct(*c))
            .map(|(i, _)| i);
        let Some(start) = core_start else {
            // Pure punctuation chunk stays one token ("..." keeps its dots).
            tokens.push(make_token(chunk));
            continue;
        };
        let end = chunk
            .char_indices()
            .rev()
            .find(|(_, c)| !is_punct(*c))
            .map(|(i, c)| i + c.len_utf8())
            .expect("a non-punct char exists");
        if start > 0 {
            tokens.push(make_token(&chunk[..start]));
        }
        tokens.push(make_token(&chunk[start..end]));
        if end < chunk.len() {
            tokens.push(make_token(&chunk[end..]));
        }
    }
    Sentence {
        raw: raw.to_string(),
        tokens,
    }
}

fn make_token(surface: &str) -> Token {
    Token {
        surface: surface.to_string(),
        norm: normalize(surface),
    }
}

/// Normalized form of a word: lowercase, then strip surrounding punctuation.
/// Idempotent and case-insensitive; pure punctuation maps to the empty string.
pub fn normalize(surface: &str) -> String {
    let lowered: String = surface.chars().flat_map(char::to_lowercase).collect();
    lowered.trim_matches(is_punct).to_string()
}

/// Pluggable word normalization, so lexicon matching can use either plain
/// case folding or a lemma table without the call sites caring which.
pub trait Normalizer {
    fn apply(&self, surface: &str) -> String;
}

/// The default normalizer: [`normalize`].
#[derive(Debug, Clone, Copy, Default)]
pub struct CaseFold;

impl Normalizer for CaseFold {
    fn apply(&self, surface: &str) -> String {
        normalize(surface)
    }
}

/// Surface-to-lemma mapping loaded from a two-column TSV file.
/// Words missing from the table normalize to their case-folded form.
#[derive(Debug, Clone, Default)]
pub struct LemmaTable {
    map: HashMap<String, String>,
}

impl LemmaTable {
    /// Build from (surface, lemma) pairs; both sides are normalized, and a
    /// duplicated surface keeps the last mapping, like the file loader.
    pub fn from_pairs<I, A, B>(pairs: I) -> LemmaTable
    where
        I: IntoIterator<Item = (A, B)>,
        A: AsRef<str>,
        B: AsRef<str>,
    {
        let map = pairs
            .into_iter()
            .map(|(s, l)| (normalize(s.as_ref()), normalize(l.as_ref())))
            .collect();
        LemmaTable { map }
    }

    /// Lemma for an already-normalized word, or the word itself.
    pub fn lemma<'a>(&'a self, norm: &'a str) -> &'a str {
        self.map.get(norm).map(String::as_str).unwrap_or(norm)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

impl Normalizer for LemmaTable {
    fn apply(&self, surface: &str) -> String {
        let norm = normalize(surface);
        self.lemma(&norm).to_string()
    }
}

/// Load a lemma table from TSV rows `surface TAB lemma`.
///
/// Both columns are normalized on load so lookups work on normalized forms.
/// Rows with any other number of columns are rejected with their line
/// number; a duplicated surface keeps the last mapping.
pub fn load_lemma_table(path: &Path) -> Result<LemmaTable> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut map = HashMap::new();
    for (i, line) in content.lines().enumerate() {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(Error::parse(
                path,
                i + 1,
                format!("expected 2 tab-separated columns, found {}", fields.len()),
            ));
        }
        let surface = normalize(fields[0]);
        let lemma = normalize(fields[1]);
        if surface.is_empty() || lemma.is_empty() {
            return Err(Error::parse(path, i + 1, "empty surface or lemma"));
        }
        map.insert(surface, lemma);
    }
    Ok(LemmaTable { map })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn surfaces(s: &Sentence) -> Vec<&str> {
        s.tokens.iter().map(|t| t.surface.as_str()).collect()
    }

    #[test]
    fn splits_whitespace_and_peels_punctuation() {
        let s = tokenize("Привет, мир!");
        assert_eq!(surfaces(&s), vec!["Привет", ",", "мир", "!"]);
        assert_eq!(
            s.tokens.iter().map(|t| t.norm.as_str()).collect::<Vec<_>>(),
            vec!["привет", "", "мир", ""]
        );
        assert_eq!(s.raw, "Привет, мир!");
    }

    #[test]
    fn empty_and_blank_inputs_yield_empty_sentences() {
        assert!(tokenize("").tokens.is_empty());
        assert!(tokenize(" \t\n ").tokens.is_empty());
    }

    #[test]
    fn punctuation_runs_stay_single_tokens() {
        let s = tokenize("ну... так ((вот))");
        assert_eq!(surfaces(&s), vec!["ну", "...", "так", "((", "вот", "))"]);
    }

    #[test]
    fn interior_punctuation_is_kept() {
        let s = tokenize("кое-как б/у");
        assert_eq!(surfaces(&s), vec!["кое-как", "б/у"]);
        assert_eq!(s.tokens[0].norm, "кое-как");
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize("Дурак,"), "дурак");
        assert_eq!(normalize("ИДИОТ"), "идиот");
        assert_eq!(normalize("..."), "");
        assert_eq!(normalize("Hello!"), "hello");
    }

    #[test]
    fn tokenized_view_round_trips() {
        let s = tokenize("Привет, мир!");
        assert_eq!(s.tokenized_view(), "Привет , мир !");
        let again = tokenize(&s.tokenized_view());
        assert_eq!(again.tokens, s.tokens);
    }

    #[test]
    fn norms_drop_punctuation_tokens() {
        let s = tokenize("Эй, ты!");
        assert_eq!(s.norms(), vec!["эй", "ты"]);
    }

    #[test]
    fn lemma_table_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lemmas.tsv");
        std::fs::write(&path, "Дураки\tдурак\nдурака\tдурак\n").unwrap();
        let table = load_lemma_table(&path).unwrap();
        assert_eq!(table.lemma("дураки"), "дурак");
        assert_eq!(table.lemma("дурака"), "дурак");
        assert_eq!(table.lemma("мир"), "мир", "missing word maps to itself");
        assert_eq!(table.apply("Дураки,"), "дурак", "normalizer contract");
    }

    #[test]
    fn lemma_table_rejects_bad_arity_with_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lemmas.tsv");
        std::fs::write(&path, "дураки\tдурак\nстрока-без-таба\n").unwrap();
        let err = load_lemma_table(&path).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn missing_lemma_file_is_an_io_error() {
        let err = load_lemma_table(Path::new("/nonexistent/lemmas.tsv")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    proptest! {
        #[test]
        fn tokenize_is_idempotent_on_its_own_output(input in "\\PC{0,60}") {
            let first = tokenize(&input);
            let second = tokenize(&first.tokenized_view());
            prop_assert_eq!(&second.tokens, &first.tokens);
        }

        #[test]
        fn normalize_is_idempotent(input in "\\PC{0,30}") {
            let once = normalize(&input);
            prop_assert_eq!(normalize(&once), once.clone());
        }

        #[test]
        fn normalize_is_case_insensitive(input in "[a-zA-Zа-яА-Я]{0,20}") {
            prop_assert_eq!(
                normalize(&input.to_uppercase()),
                normalize(&input.to_lowercase())
            );
        }

        #[test]
        fn token_surfaces_never_contain_whitespace(input in "\\PC{0,60}") {
            for tok in tokenize(&input).tokens {
                prop_assert!(!tok.surface.chars().any(char::is_whitespace));
                prop_assert!(!tok.surface.is_empty());
            }
        }
    }
}
