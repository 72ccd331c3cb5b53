//! Word embeddings, sentence vectors and the retrieval index.
//!
//! Embedding files use the common text format: a `vocab_size dim` header,
//! then one `word v1 v2 ... vdim` row per word, space-separated.  Words are
//! normalized on load so lookups work on token norms; when two rows map to
//! the same normalized word the last one wins (a warning is logged).
//!
//! A sentence vector is the arithmetic mean of the vectors of its known
//! tokens; sentences where no token is known have no vector, and cosine
//! similarity against nothing falls back to zero at the metrics layer.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::num::Real;
use crate::text::Sentence;

/// Word-to-vector table with a fixed dimensionality.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable<F: Real> {
    dim: usize,
    vectors: HashMap<String, Vec<F>>,
}

impl<F: Real> EmbeddingTable<F> {
    pub fn new(dim: usize) -> Self {
        EmbeddingTable {
            dim,
            vectors: HashMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, norm: &str) -> Option<&[F]> {
        self.vectors.get(norm).map(Vec::as_slice)
    }

    /// Insert a vector, panicking on a dimension mismatch (caller bug).
    pub fn insert(&mut self, word: String, vector: Vec<F>) {
        assert_eq!(vector.len(), self.dim, "vector dimension mismatch");
        self.vectors.insert(word, vector);
    }
}

/// Load embeddings from the text format described in the module docs.
pub fn load_embeddings<F: Real>(path: &Path) -> Result<EmbeddingTable<F>> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = content.lines().enumerate();

    let Some((_, header)) = lines.next() else {
        return Err(Error::parse(path, 1, "empty embeddings file"));
    };
    let header_fields: Vec<&str> = header.split_whitespace().collect();
    if header_fields.len() != 2 {
        return Err(Error::parse(path, 1, "expected `vocab_size dim` header"));
    }
    let declared: usize = header_fields[0]
        .parse()
        .map_err(|_| Error::parse(path, 1, "bad vocab_size in header"))?;
    let dim: usize = header_fields[1]
        .parse()
        .map_err(|_| Error::parse(path, 1, "bad dim in header"))?;
    if dim == 0 {
        return Err(Error::parse(path, 1, "dimension must be positive"));
    }

    let mut table = EmbeddingTable::new(dim);
    let mut rows = 0usize;
    for (i, line) in lines {
        let row = i + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != dim + 1 {
            return Err(Error::parse(
                path,
                row,
                format!("expected 1 word + {dim} components, found {} fields", fields.len()),
            ));
        }
        let word = crate::text::normalize(fields[0]);
        let mut vector = Vec::with_capacity(dim);
        for field in &fields[1..] {
            let value: f64 = field
                .parse()
                .map_err(|_| Error::parse(path, row, format!("bad component {field:?}")))?;
            vector.push(F::from_f64(value).ok_or_else(|| {
                Error::parse(path, row, "component not representable in target scalar")
            })?);
        }
        rows += 1;
        if word.is_empty() {
            log::warn!("{}: row {row} word normalizes to nothing, skipped", path.display());
            continue;
        }
        if table.vectors.contains_key(&word) {
            log::warn!("{}: duplicate word {word:?} at row {row}, last occurrence wins", path.display());
        }
        table.vectors.insert(word, vector);
    }
    if rows != declared {
        return Err(Error::parse(
            path,
            1,
            format!("header declares {declared} words, file has {rows} rows"),
        ));
    }
    Ok(table)
}

/// Mean of the vectors of the sentence's known tokens, `None` when no token
/// has a vector (including the empty sentence).
pub fn sentence_vector<F: Real>(sentence: &Sentence, table: &EmbeddingTable<F>) -> Option<Vec<F>> {
    let mut sum = vec![F::zero(); table.dim()];
    let mut found = 0usize;
    for tok in &sentence.tokens {
        if tok.norm.is_empty() {
            continue;
        }
        if let Some(v) = table.get(&tok.norm) {
            for (s, &x) in sum.iter_mut().zip(v) {
                *s += x;
            }
            found += 1;
        }
    }
    if found == 0 {
        return None;
    }
    let n = F::of_usize(found);
    for s in sum.iter_mut() {
        *s /= n;
    }
    Some(sum)
}

/// Cosine similarity.
///
/// Computed as `dot(u,v) / sqrt(dot(u,u)·dot(v,v))` — the single square
/// root keeps self-similarity at exactly 1.0 for bit-identical vectors.
/// Either vector having zero norm yields 0.0.
pub fn cosine<F: Real>(u: &[F], v: &[F]) -> F {
    assert_eq!(u.len(), v.len(), "cosine of different dimensions");
    let mut dot = F::zero();
    let mut uu = F::zero();
    let mut vv = F::zero();
    for (&a, &b) in u.iter().zip(v) {
        dot += a * b;
        uu += a * a;
        vv += b * b;
    }
    if uu == F::zero() || vv == F::zero() {
        return F::zero();
    }
    dot / (uu * vv).sqrt()
}

/// Candidate sentences with precomputed vectors, for nearest-neighbor
/// retrieval. Sentences none of whose tokens are known get the zero vector
/// (cosine 0 against everything), so index positions stay aligned with the
/// source corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct RetrieveIndex<F: Real> {
    entries: Vec<(Sentence, Vec<F>)>,
    dim: usize,
}

impl<F: Real> RetrieveIndex<F> {
    pub fn build(sentences: Vec<Sentence>, table: &EmbeddingTable<F>) -> RetrieveIndex<F> {
        let dim = table.dim();
        let entries = sentences
            .into_iter()
            .map(|s| {
                let v = sentence_vector(&s, table).unwrap_or_else(|| vec![F::zero(); dim]);
                (s, v)
            })
            .collect();
        RetrieveIndex { entries, dim }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sentence(&self, i: usize) -> &Sentence {
        &self.entries[i].0
    }

    pub fn vector(&self, i: usize) -> &[F] {
        &self.entries[i].1
    }
}

/// The index sentence most cosine-similar to the query, which is pooled
/// through `table`.
///
/// Exhaustive scan; ties resolve to the earliest candidate.  A query with
/// no sentence vector (every token out-of-vocabulary) falls back to the
/// first candidate — a documented, deterministic stand-in rather than an
/// error, so batch rewriting never stalls on one odd sentence.
pub fn nearest_neighbor<'a, F: Real>(
    query: &Sentence,
    index: &'a RetrieveIndex<F>,
    table: &EmbeddingTable<F>,
) -> Result<&'a Sentence> {
    if index.is_empty() {
        return Err(Error::Validation("retrieval index is empty".into()));
    }
    let Some(qv) = sentence_vector(query, table) else {
        return Ok(index.sentence(0));
    };
    let mut best = 0usize;
    let mut best_score = cosine(&qv, index.vector(0));
    for i in 1..index.len() {
        let score = cosine(&qv, index.vector(i));
        if score > best_score {
            best = i;
            best_score = score;
        }
    }
    Ok(index.sentence(best))
}

/// Persist an index as TSV rows `sentence TAB v1,v2,...,vdim`.
pub fn save_index<F: Real>(index: &RetrieveIndex<F>, path: &Path) -> Result<()> {
    let mut out = String::new();
    for (i, (sentence, vector)) in index.entries.iter().enumerate() {
        if sentence.raw.contains('\t') || sentence.raw.contains('\n') {
            return Err(Error::Validation(format!(
                "index entry {i} contains TAB or newline"
            )));
        }
        let components: Vec<String> = vector.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!("{}\t{}\n", sentence.raw, components.join(",")));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Load an index saved by [`save_index`]. All rows must agree on the
/// vector dimension.
pub fn load_index<F: Real>(path: &Path) -> Result<RetrieveIndex<F>> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut entries: Vec<(Sentence, Vec<F>)> = Vec::new();
    let mut dim: Option<usize> = None;
    for (i, line) in content.lines().enumerate() {
        let row = i + 1;
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(Error::parse(path, row, "expected `sentence TAB components`"));
        }
        let mut vector = Vec::new();
        for comp in fields[1].split(',') {
            let value: f64 = comp
                .parse()
                .map_err(|_| Error::parse(path, row, format!("bad component {comp:?}")))?;
            vector.push(F::from_f64(value).ok_or_else(|| {
                Error::parse(path, row, "component not representable in target scalar")
            })?);
        }
        match dim {
            None => dim = Some(vector.len()),
            Some(d) if d != vector.len() => {
                return Err(Error::parse(
                    path,
                    row,
                    format!("vector has {} components, earlier rows have {d}", vector.len()),
                ));
            }
            _ => {}
        }
        entries.push((crate::text::tokenize(fields[0]), vector));
    }
    Ok(RetrieveIndex {
        dim: dim.unwrap_or(0),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::tokenize;
    use proptest::prelude::*;

    fn table(entries: &[(&str, &[f64])]) -> EmbeddingTable<f64> {
        let dim = entries.first().map(|(_, v)| v.len()).unwrap_or(0);
        let mut t = EmbeddingTable::new(dim);
        for (w, v) in entries {
            t.insert(w.to_string(), v.to_vec());
        }
        t
    }

    #[test]
    fn loads_text_format() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vec.txt");
        fs::write(&path, "2 3\nпривет 1.0 0.0 0.5\nмир 0.0 1.0 -0.5\n").unwrap();
        let t: EmbeddingTable<f64> = load_embeddings(&path).unwrap();
        assert_eq!(t.dim(), 3);
        assert_eq!(t.get("привет"), Some(&[1.0, 0.0, 0.5][..]));
        assert_eq!(t.get("мир"), Some(&[0.0, 1.0, -0.5][..]));
    }

    #[test]
    fn header_word_count_must_match() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vec.txt");
        fs::write(&path, "3 2\nа 1 0\nб 0 1\n").unwrap();
        let err = load_embeddings::<f64>(&path).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err:?}");
    }

    #[test]
    fn component_arity_is_checked_per_row() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vec.txt");
        fs::write(&path, "2 2\nа 1 0\nб 0 1 7\n").unwrap();
        let err = load_embeddings::<f64>(&path).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn duplicate_words_keep_the_last_row() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vec.txt");
        fs::write(&path, "2 2\nа 1 0\nА 0 1\n").unwrap(); // same word after normalization
        let t: EmbeddingTable<f64> = load_embeddings(&path).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.get("а"), Some(&[0.0, 1.0][..]));
    }

    #[test]
    fn sentence_vector_is_the_mean_of_known_tokens() {
        let t = table(&[("привет", &[1.0, 0.0]), ("мир", &[0.0, 1.0])]);
        let v = sentence_vector(&tokenize("Привет, мир!"), &t).unwrap();
        assert_eq!(v, vec![0.5, 0.5]);
        let v1 = sentence_vector(&tokenize("привет космос"), &t).unwrap();
        assert_eq!(v1, vec![1.0, 0.0], "unknown token contributes nothing");
        assert!(sentence_vector(&tokenize("космос"), &t).is_none());
        assert!(sentence_vector(&tokenize(""), &t).is_none());
    }

    #[test]
    fn cosine_basics() {
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]), 0.0);
        assert_eq!(cosine(&[1.0, 2.0], &[1.0, 2.0]), 1.0, "self-similarity exact");
        assert_eq!(cosine(&[0.3, -0.7], &[0.3, -0.7]), 1.0, "self-similarity exact");
        assert_eq!(cosine(&[1.0, 0.0], &[-1.0, 0.0]), -1.0);
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 1.0]), 0.0, "zero norm falls back to 0");
    }

    #[test]
    fn nearest_neighbor_hand_computed() {
        let t = table(&[
            ("a", &[1.0, 0.0]),
            ("b", &[0.0, 1.0]),
            ("c", &[0.8, 0.6]),
            ("q", &[0.6, 0.8]),
        ]);
        let index = RetrieveIndex::build(
            vec![tokenize("a"), tokenize("b"), tokenize("c")],
            &t,
        );
        // cos(q,a)=0.6  cos(q,b)=0.8  cos(q,c)=0.96
        let hit = nearest_neighbor(&tokenize("q"), &index, &t).unwrap();
        assert_eq!(hit.raw, "c");
        // cos(a,a)=1 beats everything
        let hit = nearest_neighbor(&tokenize("a"), &index, &t).unwrap();
        assert_eq!(hit.raw, "a");
    }

    #[test]
    fn ties_resolve_to_the_earliest_candidate() {
        let t = table(&[("x", &[1.0, 0.0]), ("y", &[1.0, 0.0]), ("q", &[2.0, 0.0])]);
        let index = RetrieveIndex::build(vec![tokenize("x"), tokenize("y")], &t);
        let hit = nearest_neighbor(&tokenize("q"), &index, &t).unwrap();
        assert_eq!(hit.raw, "x");
    }

    #[test]
    fn vectorless_query_falls_back_to_first_candidate() {
        let t = table(&[("a", &[1.0, 0.0]), ("b", &[0.0, 1.0])]);
        let index = RetrieveIndex::build(vec![tokenize("a"), tokenize("b")], &t);
        let hit = nearest_neighbor(&tokenize("космос"), &index, &t).unwrap();
        assert_eq!(hit.raw, "a");
    }

    #[test]
    fn empty_index_is_an_error() {
        let t = table(&[("a", &[1.0, 0.0])]);
        let index = RetrieveIndex::build(vec![], &t);
        let err = nearest_neighbor(&tokenize("a"), &index, &t).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn index_round_trips_through_disk() {
        let t = table(&[("привет", &[1.0, 0.25]), ("мир", &[0.0, -1.5])]);
        let index = RetrieveIndex::build(
            vec![tokenize("привет мир"), tokenize("мир"), tokenize("космос")],
            &t,
        );
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("index.tsv");
        save_index(&index, &path).unwrap();
        let reloaded: RetrieveIndex<f64> = load_index(&path).unwrap();
        assert_eq!(reloaded.len(), index.len());
        for i in 0..index.len() {
            assert_eq!(reloaded.sentence(i).raw, index.sentence(i).raw);
            assert_eq!(reloaded.vector(i), index.vector(i), "exact vector round trip");
        }
    }

    #[test]
    fn works_in_f32() {
        let mut t = EmbeddingTable::<f32>::new(2);
        t.insert("a".into(), vec![1.0, 0.0]);
        t.insert("b".into(), vec![0.5, 0.5]);
        let v = sentence_vector(&tokenize("a b"), &t).unwrap();
        assert_eq!(v, vec![0.75f32, 0.25]);
        assert_eq!(cosine(&v, &v), 1.0f32);
    }

    proptest! {
        /// Positive rescaling of either argument never changes cosine by
        /// more than float noise.
        #[test]
        fn cosine_is_scale_invariant(
            u in proptest::collection::vec(-5.0f64..5.0, 3),
            v in proptest::collection::vec(-5.0f64..5.0, 3),
            alpha in 0.01f64..100.0,
        ) {
            let scaled: Vec<f64> = u.iter().map(|x| x * alpha).collect();
            let a = cosine(&u, &v);
            let b = cosine(&scaled, &v);
            prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }

        /// Exhaustive-scan oracle: nearest_neighbor must agree with a naive
        /// loop written independently of the implementation.
        #[test]
        fn nearest_neighbor_matches_brute_force(
            vectors in proptest::collection::vec(
                proptest::collection::vec(-1.0f64..1.0, 3),
                1..30,
            ),
            query in proptest::collection::vec(-1.0f64..1.0, 3),
        ) {
            let mut t = EmbeddingTable::<f64>::new(3);
            for (i, v) in vectors.iter().enumerate() {
                t.insert(format!("w{i}"), v.clone());
            }
            t.insert("query".into(), query.clone());
            let sentences: Vec<Sentence> =
                (0..vectors.len()).map(|i| tokenize(&format!("w{i}"))).collect();
            let index = RetrieveIndex::build(sentences, &t);
            let hit = nearest_neighbor(&tokenize("query"), &index, &t).unwrap();

            // Oracle: first index maximizing cosine, computed by hand.
            let mut best = 0usize;
            let mut best_cos = f64::NEG_INFINITY;
            for (i, v) in vectors.iter().enumerate() {
                let dot: f64 = query.iter().zip(v).map(|(a, b)| a * b).sum();
                let nq: f64 = query.iter().map(|a| a * a).sum::<f64>().sqrt();
                let nv: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                let c = if nq == 0.0 || nv == 0.0 { 0.0 } else { dot / (nq * nv) };
                if c > best_cos {
                    best_cos = c;
                    best = i;
                }
            }
            prop_assert_eq!(hit.raw.clone(), format!("w{best}"));
        }
    }
}
