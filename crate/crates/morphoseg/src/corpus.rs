//! Text ingestion: tokenized sentence streams, lowercased word lists, and
//! deterministic train/valid/test splitting.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::tsv;

/// An ordered list of tokenized sentences in their original surface case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceStream {
    sentences: Vec<Vec<String>>,
    source_id: String,
}

impl SentenceStream {
    /// Build from already tokenized sentences; empty sentences are dropped.
    pub fn new(sentences: Vec<Vec<String>>, source_id: impl Into<String>) -> Self {
        let sentences = sentences.into_iter().filter(|s| !s.is_empty()).collect();
        Self { sentences, source_id: source_id.into() }
    }

    /// Tokenize plain text, one sentence per line, splitting on Unicode
    /// whitespace. With `strip_punct`, leading and trailing
    /// non-alphanumeric characters are trimmed from each token; tokens
    /// that become empty (and lines with no tokens) are dropped.
    pub fn from_text(text: &str, source_id: impl Into<String>, strip_punct: bool) -> Self {
        let mut sentences = Vec::new();
        for line in text.lines() {
            let mut tokens = Vec::new();
            for raw in line.split_whitespace() {
                let token = if strip_punct {
                    raw.trim_matches(|c: char| !c.is_alphanumeric())
                } else {
                    raw
                };
                if !token.is_empty() {
                    tokens.push(token.to_string());
                }
            }
            if !tokens.is_empty() {
                sentences.push(tokens);
            }
        }
        Self { sentences, source_id: source_id.into() }
    }

    pub fn sentences(&self) -> &[Vec<String>] {
        &self.sentences
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// Write one sentence per line, tokens separated by single spaces.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        for sentence in &self.sentences {
            writeln!(w, "{}", sentence.join(" ")).map_err(|e| Error::io("writing sentences", e))?;
        }
        Ok(())
    }
}

/// Frequency map from lowercased word types to corpus counts — the shared
/// training input for every segmenter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordList {
    entries: BTreeMap<String, u64>,
    total_tokens: u64,
}

impl WordList {
    /// Validate and wrap a count map. Keys must be non-empty, free of
    /// whitespace, already lowercase, and counted at least once.
    pub fn from_counts(entries: BTreeMap<String, u64>) -> Result<Self> {
        for (word, &count) in &entries {
            if word.is_empty() || word.chars().any(char::is_whitespace) {
                return Err(Error::InvalidParam(format!("invalid word-list key {word:?}")));
            }
            if *word != word.to_lowercase() {
                return Err(Error::InvalidParam(format!("word-list key {word:?} is not lowercase")));
            }
            if count == 0 {
                return Err(Error::InvalidCounts);
            }
        }
        let total_tokens = entries.values().sum();
        Ok(Self { entries, total_tokens })
    }

    pub fn get(&self, word: &str) -> Option<u64> {
        self.entries.get(word).copied()
    }

    /// Iterate in lexicographic key order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.entries.iter().map(|(w, &c)| (w.as_str(), c))
    }

    /// Entries ranked by descending count, then lexicographic.
    pub fn ranked(&self) -> Vec<(&str, u64)> {
        tsv::ranked(&self.entries)
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn total_types(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Drop entries with count below `min`.
    pub fn filter_min_count(&self, min: u64) -> Self {
        let entries: BTreeMap<String, u64> =
            self.entries.iter().filter(|(_, &c)| c >= min).map(|(w, &c)| (w.clone(), c)).collect();
        let total_tokens = entries.values().sum();
        Self { entries, total_tokens }
    }

    /// Write as TSV `word<TAB>count`, descending count then lexicographic.
    pub fn write_tsv<W: Write>(&self, w: W) -> Result<()> {
        tsv::write_counts(w, &self.entries)
    }

    /// Read the TSV form; `source_name` labels parse errors.
    pub fn read_tsv<R: BufRead>(r: R, source_name: &str) -> Result<Self> {
        Self::from_counts(tsv::read_counts(r, source_name)?)
    }
}

/// Count lowercased surface forms over every sentence of `stream`.
pub fn extract_word_list(stream: &SentenceStream) -> Result<WordList> {
    if stream.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut entries: BTreeMap<String, u64> = BTreeMap::new();
    for sentence in stream.sentences() {
        for token in sentence {
            *entries.entry(token.to_lowercase()).or_insert(0) += 1;
        }
    }
    WordList::from_counts(entries)
}

/// Split sentences into train/valid/test parts of the given proportions.
///
/// Sizes follow largest-remainder rounding of `ratios` (which must be
/// positive and sum to 1 within 1e-9); membership is a seeded shuffle and
/// each part keeps the original sentence order. Fewer than 3 sentences
/// cannot populate three parts.
pub fn split_corpus(
    stream: &SentenceStream,
    ratios: (f64, f64, f64),
    seed: u64,
) -> Result<(SentenceStream, SentenceStream, SentenceStream)> {
    let (a, b, c) = ratios;
    if !(a > 0.0 && b > 0.0 && c > 0.0) || (a + b + c - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidRatios(a, b, c));
    }
    let n = stream.len();
    if n < 3 {
        return Err(Error::CorpusTooSmall { need: 3, found: n });
    }

    // Largest-remainder apportionment of n sentences to the three parts.
    let quotas = [a * n as f64, b * n as f64, c * n as f64];
    let mut sizes = [0usize; 3];
    let mut remainders: Vec<(usize, f64)> = Vec::with_capacity(3);
    let mut assigned = 0;
    for (i, &q) in quotas.iter().enumerate() {
        sizes[i] = q.floor() as usize;
        assigned += sizes[i];
        remainders.push((i, q - q.floor()));
    }
    remainders.sort_by(|(i, r), (j, s)| s.partial_cmp(r).unwrap().then(i.cmp(j)));
    for k in 0..(n - assigned) {
        sizes[remainders[k % 3].0] += 1;
    }

    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);

    let pick = |count: usize, taken: &mut usize, tag: &str| {
        let mut chosen: Vec<usize> = indices[*taken..*taken + count].to_vec();
        *taken += count;
        chosen.sort_unstable();
        let sentences = chosen.iter().map(|&i| stream.sentences[i].clone()).collect();
        SentenceStream { sentences, source_id: format!("{}:{}", stream.source_id, tag) }
    };
    let mut taken = 0;
    let train = pick(sizes[0], &mut taken, "train");
    let valid = pick(sizes[1], &mut taken, "valid");
    let test = pick(sizes[2], &mut taken, "test");
    Ok((train, valid, test))
}
