//! The universal segmenter output type, the segmenter interface, case
//! restoration, and word-initial marking.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::stats::TrainStats;

/// Marker prefixed to word-initial tokens, following the common
/// tokenizer-file convention; configurable wherever it is consumed.
pub const DEFAULT_MARKER: char = '\u{2581}';

/// A word split into an ordered morph sequence, optionally tagged with
/// the emitting state of each morph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segmentation {
    word: String,
    morphs: Vec<String>,
    states: Option<Vec<usize>>,
}

impl Segmentation {
    /// Build from morphs; the word is their concatenation.
    pub fn new(morphs: Vec<String>) -> Result<Self> {
        if morphs.is_empty() {
            return Err(Error::EmptyWord);
        }
        if morphs.iter().any(|m| m.is_empty()) {
            return Err(Error::InvalidParam("empty morph in segmentation".into()));
        }
        let word = morphs.concat();
        Ok(Self { word, morphs, states: None })
    }

    /// Build with one state id per morph.
    pub fn with_states(morphs: Vec<String>, states: Vec<usize>) -> Result<Self> {
        if morphs.len() != states.len() {
            return Err(Error::InvalidParam(format!(
                "{} morphs but {} states",
                morphs.len(),
                states.len()
            )));
        }
        let mut seg = Self::new(morphs)?;
        seg.states = Some(states);
        Ok(seg)
    }

    pub fn word(&self) -> &str {
        &self.word
    }

    pub fn morphs(&self) -> &[String] {
        &self.morphs
    }

    pub fn states(&self) -> Option<&[usize]> {
        self.states.as_deref()
    }

    /// Internal split points as character offsets into the word,
    /// ascending; a word kept whole has none.
    pub fn split_positions(&self) -> Vec<usize> {
        let mut positions = Vec::with_capacity(self.morphs.len().saturating_sub(1));
        let mut offset = 0;
        for morph in &self.morphs[..self.morphs.len() - 1] {
            offset += morph.chars().count();
            positions.push(offset);
        }
        positions
    }
}

/// A trained sub-word segmenter: anything that can split a lowercased
/// word into morphs and expose the lexicon it draws them from.
pub trait Segmenter {
    /// Segment one lowercased word.
    fn segment(&self, word: &str) -> Result<Segmentation>;

    /// The morph inventory with counts.
    fn lexicon(&self) -> &Lexicon;

    /// Optimizer accounting, for trainers that record it.
    fn train_stats(&self) -> Option<&TrainStats> {
        None
    }
}

/// The character baseline: every word splits into its characters.
#[derive(Debug, Clone)]
pub struct CharSegmenter {
    lexicon: Lexicon,
}

impl CharSegmenter {
    /// Count characters over the word list (weighted by word counts) to
    /// form the baseline's lexicon.
    pub fn train(words: &crate::corpus::WordList) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut counts = std::collections::BTreeMap::new();
        for (word, count) in words.iter() {
            for ch in word.chars() {
                *counts.entry(ch.to_string()).or_insert(0) += count;
            }
        }
        Ok(Self { lexicon: Lexicon::from_counts(counts)? })
    }
}

impl Segmenter for CharSegmenter {
    fn segment(&self, word: &str) -> Result<Segmentation> {
        if word.is_empty() {
            return Err(Error::EmptyWord);
        }
        Segmentation::new(word.chars().map(|c| c.to_string()).collect())
    }

    fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }
}

/// Project the original casing back onto a lowercased segmentation:
/// morph boundaries stay at the same character offsets while characters
/// are replaced positionally by `original`'s.
///
/// Fails with [`Error::CaseFoldMismatch`] when `original` does not
/// lowercase to the segmented word or when case folding changed the
/// character count (e.g. 'İ' → "i̇"), making positions ambiguous.
pub fn restore_case(seg: &Segmentation, original: &str) -> Result<Segmentation> {
    let lower = original.to_lowercase();
    let mismatch = || Error::CaseFoldMismatch {
        original: original.to_string(),
        lower: lower.clone(),
    };
    if lower != seg.word() {
        return Err(mismatch());
    }
    let original_chars: Vec<char> = original.chars().collect();
    if original_chars.len() != seg.word().chars().count() {
        return Err(mismatch());
    }
    let mut morphs = Vec::with_capacity(seg.morphs().len());
    let mut offset = 0;
    for morph in seg.morphs() {
        let len = morph.chars().count();
        morphs.push(original_chars[offset..offset + len].iter().collect());
        offset += len;
    }
    Ok(Segmentation {
        word: original.to_string(),
        morphs,
        states: seg.states.clone(),
    })
}

/// Prefix the first morph with the word-initial marker; later morphs are
/// unchanged. An empty list stays empty.
pub fn mark_word_initial(morphs: &[String], marker: char) -> Vec<String> {
    let mut tokens: Vec<String> = morphs.to_vec();
    if let Some(first) = tokens.first_mut() {
        first.insert(0, marker);
    }
    tokens
}

/// Remove one leading marker if present.
pub fn strip_marker(token: &str, marker: char) -> &str {
    token.strip_prefix(marker).unwrap_or(token)
}

/// Write segmentations as `word<TAB>morph1 morph2 ...`, one per line.
pub fn write_segmentations<'a, W, I>(mut w: W, segs: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a Segmentation>,
{
    for seg in segs {
        writeln!(w, "{}\t{}", seg.word(), seg.morphs().join(" "))
            .map_err(|e| Error::io("writing segmentations", e))?;
    }
    Ok(())
}

/// Read the `word<TAB>morph1 morph2 ...` format, verifying that each
/// line's morphs concatenate to its word.
pub fn read_segmentations<R: BufRead>(r: R, source_name: &str) -> Result<Vec<Segmentation>> {
    let mut segs = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line = line.map_err(|e| Error::io("reading segmentations", e))?;
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        let (word, morphs) = line.split_once('\t').ok_or_else(|| {
            Error::parse(source_name, lineno, "expected word<TAB>morphs")
        })?;
        let morphs: Vec<String> = morphs.split(' ').filter(|m| !m.is_empty()).map(String::from).collect();
        if morphs.is_empty() {
            return Err(Error::parse(source_name, lineno, "no morphs"));
        }
        let seg = Segmentation::new(morphs)
            .map_err(|e| Error::parse(source_name, lineno, &e.to_string()))?;
        if seg.word() != word {
            return Err(Error::parse(
                source_name,
                lineno,
                &format!("morphs do not concatenate to {word:?}"),
            ));
        }
        segs.push(seg);
    }
    Ok(segs)
}
