//! Corpus file formats and the train/test split.
//!
//! Two kinds of corpora exist: labeled corpora (every sentence carries a
//! `toxic`/`neutral` style label) and parallel corpora (source/target
//! rewrite pairs).  The on-disk format is UTF-8 TSV; labeled corpora may
//! also be read from CSV with the same header names.  TAB and newline are
//! forbidden inside text fields — in plain TSV this is structural, in CSV
//! (where quoting could smuggle them in) it is checked and rejected.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::text::{tokenize, Sentence};

/// Style label attached to every sentence of a labeled corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StyleLabel {
    Toxic,
    Neutral,
}

impl FromStr for StyleLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "toxic" => Ok(StyleLabel::Toxic),
            "neutral" => Ok(StyleLabel::Neutral),
            other => Err(format!("unknown label {other:?} (expected toxic|neutral)")),
        }
    }
}

impl std::fmt::Display for StyleLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StyleLabel::Toxic => "toxic",
            StyleLabel::Neutral => "neutral",
        })
    }
}

/// One sentence with its style label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledEntry {
    pub sentence: Sentence,
    pub label: StyleLabel,
}

/// A labeled corpus, in file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LabeledCorpus {
    pub entries: Vec<LabeledEntry>,
}

impl LabeledCorpus {
    pub fn new(entries: Vec<LabeledEntry>) -> Self {
        LabeledCorpus { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count_label(&self, label: StyleLabel) -> usize {
        self.entries.iter().filter(|e| e.label == label).count()
    }

    pub fn with_label(&self, label: StyleLabel) -> impl Iterator<Item = &LabeledEntry> {
        self.entries.iter().filter(move |e| e.label == label)
    }
}

/// Aligned (source, target) rewrite pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParallelCorpus {
    pub pairs: Vec<(Sentence, Sentence)>,
}

impl ParallelCorpus {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Input format for labeled corpora.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Tsv,
    Csv,
}

/// How to carve the held-out test set out of a labeled corpus.
///
/// `test_size` toxic entries are drawn without replacement; everything else
/// (all neutral entries plus the unsampled toxic ones) stays in training.
#[derive(Debug, Clone, Copy)]
pub struct SplitSpec {
    pub test_size: usize,
    pub seed: u64,
}

fn forbid_tab_newline(text: &str) -> std::result::Result<(), &'static str> {
    if text.contains('\t') {
        Err("text contains a TAB character")
    } else if text.contains('\n') || text.contains('\r') {
        Err("text contains a newline")
    } else {
        Ok(())
    }
}

/// Load a labeled corpus. The header row must declare `text` and `label`
/// columns (in either order; extra columns are ignored).
pub fn load_labeled_corpus(path: &Path, format: CorpusFormat) -> Result<LabeledCorpus> {
    match format {
        CorpusFormat::Tsv => load_labeled_tsv(path),
        CorpusFormat::Csv => load_labeled_csv(path),
    }
}

fn header_positions(path: &Path, fields: &[&str]) -> Result<(usize, usize)> {
    let text = fields.iter().position(|f| *f == "text");
    let label = fields.iter().position(|f| *f == "label");
    match (text, label) {
        (Some(t), Some(l)) => Ok((t, l)),
        _ => Err(Error::parse(
            path,
            1,
            format!("header must declare `text` and `label` columns, found {fields:?}"),
        )),
    }
}

fn load_labeled_tsv(path: &Path) -> Result<LabeledCorpus> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = content.lines().enumerate();
    let Some((_, header)) = lines.next() else {
        return Err(Error::parse(path, 1, "missing header row"));
    };
    let header_fields: Vec<&str> = header.split('\t').collect();
    let (text_col, label_col) = header_positions(path, &header_fields)?;
    let arity = header_fields.len();

    let mut entries = Vec::new();
    for (i, line) in lines {
        let row = i + 1; // 1-based physical line number
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != arity {
            return Err(Error::parse(
                path,
                row,
                format!("expected {arity} columns, found {}", fields.len()),
            ));
        }
        let label = StyleLabel::from_str(fields[label_col])
            .map_err(|msg| Error::parse(path, row, msg))?;
        entries.push(LabeledEntry {
            sentence: tokenize(fields[text_col]),
            label,
        });
    }
    Ok(LabeledCorpus::new(entries))
}

fn load_labeled_csv(path: &Path) -> Result<LabeledCorpus> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => {
                let io = std::io::Error::new(std::io::ErrorKind::NotFound, e.to_string());
                Error::io(path, io)
            }
            _ => Error::parse(path, 1, e.to_string()),
        })?;
    let headers = reader
        .headers()
        .map_err(|e| Error::parse(path, 1, e.to_string()))?
        .clone();
    let header_fields: Vec<&str> = headers.iter().collect();
    let (text_col, label_col) = header_positions(path, &header_fields)?;

    let mut entries = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::parse(path, i + 2, e.to_string()))?;
        let row = record
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or(i + 2);
        let text = record.get(text_col).ok_or_else(|| {
            Error::parse(path, row, format!("row has no column {text_col}"))
        })?;
        let label_field = record.get(label_col).ok_or_else(|| {
            Error::parse(path, row, format!("row has no column {label_col}"))
        })?;
        forbid_tab_newline(text).map_err(|msg| Error::parse(path, row, msg))?;
        let label =
            StyleLabel::from_str(label_field).map_err(|msg| Error::parse(path, row, msg))?;
        entries.push(LabeledEntry {
            sentence: tokenize(text),
            label,
        });
    }
    Ok(LabeledCorpus::new(entries))
}

/// Write a labeled corpus as TSV (`text TAB label` with header).
/// Entries whose raw text contains TAB or newline are rejected — they could
/// not be read back.
pub fn save_labeled_corpus(corpus: &LabeledCorpus, path: &Path) -> Result<()> {
    let mut out = String::from("text\tlabel\n");
    for (i, entry) in corpus.entries.iter().enumerate() {
        forbid_tab_newline(&entry.sentence.raw)
            .map_err(|msg| Error::Validation(format!("entry {i}: {msg}")))?;
        out.push_str(&entry.sentence.raw);
        out.push('\t');
        out.push_str(&entry.label.to_string());
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Load a parallel corpus from headerless two-column TSV
/// (`source TAB target`). An empty file is an empty corpus, not an error.
pub fn load_parallel_corpus(path: &Path) -> Result<ParallelCorpus> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut pairs = Vec::new();
    for (i, line) in content.lines().enumerate() {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(Error::parse(
                path,
                i + 1,
                format!("expected 2 tab-separated columns, found {}", fields.len()),
            ));
        }
        pairs.push((tokenize(fields[0]), tokenize(fields[1])));
    }
    Ok(ParallelCorpus { pairs })
}

/// Write a parallel corpus as headerless two-column TSV.
pub fn save_parallel_corpus(corpus: &ParallelCorpus, path: &Path) -> Result<()> {
    let mut out = String::new();
    for (i, (src, tgt)) in corpus.pairs.iter().enumerate() {
        for raw in [&src.raw, &tgt.raw] {
            forbid_tab_newline(raw).map_err(|msg| Error::Validation(format!("pair {i}: {msg}")))?;
        }
        out.push_str(&src.raw);
        out.push('\t');
        out.push_str(&tgt.raw);
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Load one sentence per line.  Empty lines become empty sentences so that
/// line `i` of an output file always corresponds to line `i` of its input.
pub fn load_sentences(path: &Path) -> Result<Vec<Sentence>> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(content.lines().map(tokenize).collect())
}

/// Save one sentence per line (the `raw` field verbatim).
///
/// Newlines inside a sentence would silently break the line = sentence
/// correspondence, so they are rejected rather than escaped.
pub fn save_sentences(sentences: &[Sentence], path: &Path) -> Result<()> {
    let mut out = String::new();
    for (i, sentence) in sentences.iter().enumerate() {
        if sentence.raw.contains('\n') || sentence.raw.contains('\r') {
            return Err(Error::Validation(format!(
                "sentence {i}: text contains a line break"
            )));
        }
        out.push_str(&sentence.raw);
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Split a labeled corpus into (train, test).
///
/// The test set is exactly `spec.test_size` *toxic* entries sampled without
/// replacement — mirroring evaluation setups where only toxic sentences are
/// rewritten.  The sampling procedure is pinned so other implementations can
/// reproduce it: collect the corpus-order indices of toxic entries, draw
/// `test_size` of them with [`SplitMix64::sample_without_replacement`]
/// seeded by `spec.seed`, sort the drawn indices ascending.  Test entries
/// appear in corpus order; train keeps every other entry in corpus order.
pub fn split_corpus(corpus: &LabeledCorpus, spec: &SplitSpec) -> Result<(LabeledCorpus, LabeledCorpus)> {
    let toxic_indices: Vec<usize> = corpus
        .entries
        .iter()
        .enumerate()
        .filter(|(_, e)| e.label == StyleLabel::Toxic)
        .map(|(i, _)| i)
        .collect();
    if spec.test_size > toxic_indices.len() {
        return Err(Error::Validation(format!(
            "test_size {} exceeds the {} toxic entries available",
            spec.test_size,
            toxic_indices.len()
        )));
    }
    if spec.test_size >= corpus.len() && !corpus.is_empty() {
        return Err(Error::Validation(format!(
            "test_size {} would leave an empty training set (corpus has {} entries)",
            spec.test_size,
            corpus.len()
        )));
    }

    let mut rng = SplitMix64::new(spec.seed);
    let picks = rng.sample_without_replacement(toxic_indices.len(), spec.test_size);
    let mut selected: Vec<usize> = picks.into_iter().map(|k| toxic_indices[k]).collect();
    selected.sort_unstable();

    let mut in_test = vec![false; corpus.len()];
    for &i in &selected {
        in_test[i] = true;
    }
    let mut train = Vec::with_capacity(corpus.len() - spec.test_size);
    let mut test = Vec::with_capacity(spec.test_size);
    for (i, entry) in corpus.entries.iter().enumerate() {
        if in_test[i] {
            test.push(entry.clone());
        } else {
            train.push(entry.clone());
        }
    }
    Ok((LabeledCorpus::new(train), LabeledCorpus::new(test)))
}
