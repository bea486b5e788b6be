//! The morph inventory shared by every segmenter, plus frequency pruning
//! and vocabulary-size matching.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::tsv;

/// Morph strings with positive counts. Counts are corpus token
/// occurrences under whichever segmentation produced the lexicon.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    counts: BTreeMap<String, u64>,
}

impl Lexicon {
    /// Validate and wrap a count map: keys non-empty, counts at least 1.
    pub fn from_counts(counts: BTreeMap<String, u64>) -> Result<Self> {
        for (morph, &count) in &counts {
            if morph.is_empty() {
                return Err(Error::InvalidParam("empty morph in lexicon".into()));
            }
            if count == 0 {
                return Err(Error::InvalidCounts);
            }
        }
        Ok(Self { counts })
    }

    pub fn get(&self, morph: &str) -> Option<u64> {
        self.counts.get(morph).copied()
    }

    pub fn contains(&self, morph: &str) -> bool {
        self.counts.contains_key(morph)
    }

    /// Number of distinct morphs.
    pub fn size(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Iterate in lexicographic morph order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(m, &c)| (m.as_str(), c))
    }

    /// Entries ranked by descending count, then lexicographic.
    pub fn ranked(&self) -> Vec<(&str, u64)> {
        tsv::ranked(&self.counts)
    }

    /// Sum of all morph counts (total tokens under the segmentation).
    pub fn total_count(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Write as TSV `morph<TAB>count`, descending count then lexicographic.
    pub fn write_tsv<W: Write>(&self, w: W) -> Result<()> {
        tsv::write_counts(w, &self.counts)
    }

    /// Read the TSV form; `source_name` labels parse errors.
    pub fn read_tsv<R: BufRead>(r: R, source_name: &str) -> Result<Self> {
        Self::from_counts(tsv::read_counts(r, source_name)?)
    }
}

/// Keep the `target_size` highest-count morphs (ties broken by smaller
/// string), never dropping single-character morphs — those guarantee that
/// any in-alphabet word still has a segmentation after pruning. Counts of
/// surviving morphs are unchanged. A target at or above the current size
/// is the identity.
pub fn prune_lexicon(lexicon: &Lexicon, target_size: usize) -> Lexicon {
    if target_size >= lexicon.size() {
        return lexicon.clone();
    }
    let ranked = lexicon.ranked();
    let mut kept: BTreeMap<String, u64> = ranked
        .iter()
        .take(target_size)
        .map(|&(m, c)| (m.to_string(), c))
        .collect();
    for &(morph, count) in &ranked[target_size..] {
        if morph.chars().count() == 1 {
            kept.insert(morph.to_string(), count);
        }
    }
    Lexicon { counts: kept }
}

/// The lexicon size of `reference` — the vocabulary target handed to a
/// size-matched BPE training run.
pub fn match_vocab_size(reference: &Lexicon) -> usize {
    reference.size()
}
