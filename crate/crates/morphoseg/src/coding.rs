//! Description-length primitives: entropy code lengths for count vectors
//! and a character-level code for spelling out lexicon entries. Both come
//! in a one-shot form and an incrementally updatable form used by the
//! trainers, which must re-price thousands of candidate count changes.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lexicon::Lexicon;

/// `n * log2(n)`, with the usual convention that the value at zero is zero.
#[inline]
pub(crate) fn nlog2n(n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        let x = n as f64;
        x * x.log2()
    }
}

/// Code length in bits of a count vector under its own maximum-likelihood
/// multinomial: `sum over entries of c * log2(N / c)` with `N` the total.
///
/// The value is permutation-invariant and zero exactly when a single entry
/// carries all the mass. Returns [`Error::InvalidCounts`] for an empty
/// slice or any zero count.
pub fn code_length_multinomial(counts: &[u64]) -> Result<f64> {
    if counts.is_empty() || counts.iter().any(|&c| c == 0) {
        return Err(Error::InvalidCounts);
    }
    let total: u64 = counts.iter().sum();
    let sum: f64 = counts.iter().map(|&c| nlog2n(c)).sum();
    // Clamp away the tiny negative values float cancellation can produce.
    Ok((nlog2n(total) - sum).max(0.0))
}

/// An itemized code length: named parts in bits plus their total.
#[derive(Debug, Clone)]
pub struct CodeLengthReport {
    parts: Vec<(String, f64)>,
    total_bits: f64,
}

impl CodeLengthReport {
    /// Build a report from named parts; the total is their sum.
    pub fn new(parts: Vec<(String, f64)>) -> Self {
        let total_bits = parts.iter().map(|(_, b)| b).sum();
        Self { parts, total_bits }
    }

    pub fn total_bits(&self) -> f64 {
        self.total_bits
    }

    pub fn parts(&self) -> &[(String, f64)] {
        &self.parts
    }

    /// Look up one part by name.
    pub fn part(&self, name: &str) -> Option<f64> {
        self.parts.iter().find(|(n, _)| n == name).map(|&(_, b)| b)
    }
}

/// Character frequencies pooled over the distinct entries of a lexicon,
/// plus one end-of-entry event per entry. Spelling an entry costs
/// `-log2 p(char)` per character plus `-log2 p(end)` under this
/// maximum-likelihood distribution.
#[derive(Debug, Clone)]
pub struct CharDistribution {
    counts: BTreeMap<char, u64>,
    end_count: u64,
    total: u64,
}

impl CharDistribution {
    /// Pool character occurrences over the distinct entries of `lexicon`
    /// (each entry counted once, regardless of its count) and one
    /// end-of-entry event per entry.
    pub fn from_lexicon(lexicon: &Lexicon) -> Self {
        let mut counts: BTreeMap<char, u64> = BTreeMap::new();
        let mut end_count = 0;
        for (entry, _) in lexicon.iter() {
            for ch in entry.chars() {
                *counts.entry(ch).or_insert(0) += 1;
            }
            end_count += 1;
        }
        let total = counts.values().sum::<u64>() + end_count;
        Self { counts, end_count, total }
    }

    /// Build directly from character counts and an end-of-entry count.
    pub fn from_counts(counts: BTreeMap<char, u64>, end_count: u64) -> Self {
        let total = counts.values().sum::<u64>() + end_count;
        Self { counts, end_count, total }
    }

    /// Bits to spell one character; [`Error::UnknownChar`] if never seen.
    pub fn char_bits(&self, c: char) -> Result<f64> {
        match self.counts.get(&c) {
            Some(&n) => Ok((self.total as f64 / n as f64).log2()),
            None => Err(Error::UnknownChar(c)),
        }
    }

    /// Bits to spell one character, pricing a never-seen character as a
    /// single pseudo-occurrence in a pool enlarged by one.
    pub fn char_bits_or_fallback(&self, c: char) -> f64 {
        match self.counts.get(&c) {
            Some(&n) => (self.total as f64 / n as f64).log2(),
            None => ((self.total + 1) as f64).log2(),
        }
    }

    /// Bits for the end-of-entry event (zero for an empty distribution).
    pub fn end_bits(&self) -> f64 {
        if self.end_count == 0 {
            0.0
        } else {
            (self.total as f64 / self.end_count as f64).log2()
        }
    }

    /// Bits to spell a whole string including its end event, with the
    /// fallback price for unknown characters.
    pub fn spell_bits(&self, s: &str) -> f64 {
        s.chars().map(|c| self.char_bits_or_fallback(c)).sum::<f64>() + self.end_bits()
    }
}

/// Total bits to spell out every distinct entry of `lexicon` — each
/// character plus one end-of-entry event — under `chars`. Entry counts do
/// not matter here, only the distinct strings. An empty lexicon costs 0.
///
/// Returns [`Error::UnknownChar`] if an entry contains a character the
/// distribution has never seen.
pub fn lexicon_string_cost(lexicon: &Lexicon, chars: &CharDistribution) -> Result<f64> {
    let mut bits = 0.0;
    for (entry, _) in lexicon.iter() {
        for ch in entry.chars() {
            bits += chars.char_bits(ch)?;
        }
        bits += chars.end_bits();
    }
    Ok(bits)
}

/// Incrementally maintained [`code_length_multinomial`] over a mutable
/// count vector: O(1) per count change instead of a rescan.
#[derive(Debug, Clone, Copy, Default)]
pub struct MultinomialCost {
    total: u64,
    sum_nlog2n: f64,
}

impl MultinomialCost {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record one entry changing from `old` to `new` occurrences.
    /// Entries at zero simply do not exist in the vector.
    pub fn update(&mut self, old: u64, new: u64) {
        self.total = self.total - old + new;
        self.sum_nlog2n += nlog2n(new) - nlog2n(old);
    }

    /// Current code length in bits.
    pub fn bits(&self) -> f64 {
        (nlog2n(self.total) - self.sum_nlog2n).max(0.0)
    }

    /// Sum of all entries.
    pub fn total(&self) -> u64 {
        self.total
    }
}

/// Incrementally maintained string cost of a lexicon under its own pooled
/// character distribution — the self-consistent case of
/// [`lexicon_string_cost`], kept current in O(entry length) per entry
/// added or removed.
#[derive(Debug, Clone, Default)]
pub struct LexiconPrior {
    char_counts: BTreeMap<char, u64>,
    char_total: u64,
    entries: u64,
    sum_nlog2n: f64,
}

impl LexiconPrior {
    pub fn new() -> Self {
        Self::default()
    }

    /// Account for a new distinct entry.
    pub fn add_entry(&mut self, s: &str) {
        for ch in s.chars() {
            let slot = self.char_counts.entry(ch).or_insert(0);
            let old = *slot;
            *slot = old + 1;
            self.sum_nlog2n += nlog2n(old + 1) - nlog2n(old);
            self.char_total += 1;
        }
        self.entries += 1;
    }

    /// Remove a previously added entry. Panics if `s` was never added —
    /// that is a bookkeeping bug in the caller, not a data error.
    pub fn remove_entry(&mut self, s: &str) {
        for ch in s.chars() {
            let slot = self.char_counts.get_mut(&ch).expect("removing unseen character");
            let old = *slot;
            assert!(old > 0, "removing unseen character");
            *slot = old - 1;
            self.sum_nlog2n += nlog2n(old - 1) - nlog2n(old);
            self.char_total -= 1;
            if *slot == 0 {
                self.char_counts.remove(&ch);
            }
        }
        assert!(self.entries > 0, "removing entry from empty prior");
        self.entries -= 1;
    }

    /// Current spelling cost of all entries, in bits.
    pub fn bits(&self) -> f64 {
        // Sum over entries of per-character and end-event code lengths,
        // rewritten in entropy form over the pooled event counts.
        let events = self.char_total + self.entries;
        (nlog2n(events) - self.sum_nlog2n - nlog2n(self.entries)).max(0.0)
    }

    pub fn entries(&self) -> u64 {
        self.entries
    }

    /// Snapshot the pooled character distribution (including end events).
    pub fn distribution(&self) -> CharDistribution {
        CharDistribution::from_counts(self.char_counts.clone(), self.entries)
    }
}
