//! Byte-pair-encoding trainer and encoder with a pre-selected maximum
//! vocabulary size.
//!
//! Training starts from character tokenization of the word list and
//! repeatedly merges the adjacent token pair with the highest
//! count-weighted frequency, recording the merge order. Pair frequency
//! counts non-overlapping occurrences scanned left to right within each
//! word ("aaa" contributes one (a,a)), weighted by word counts; ties
//! break lexicographically on the (left, right) strings. Merges never
//! cross word boundaries.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{BufRead, Write};

use crate::corpus::WordList;
use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::segmentation::{Segmentation, Segmenter};

const MERGE_FILE_HEADER: &str = "#morphoseg-bpe v1";

/// An ordered list of learned merges plus the initial character
/// alphabet. Every merge's operands are alphabet symbols or results of
/// earlier merges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeTable {
    merges: Vec<(String, String)>,
    alphabet: BTreeSet<String>,
}

impl MergeTable {
    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn alphabet(&self) -> &BTreeSet<String> {
        &self.alphabet
    }

    /// Distinct token strings producible by the table: the alphabet plus
    /// every merge result.
    pub fn token_strings(&self) -> BTreeSet<String> {
        let mut tokens = self.alphabet.clone();
        for (l, r) in &self.merges {
            tokens.insert(format!("{l}{r}"));
        }
        tokens
    }

    /// Write the merge list: a version header, then one `left right`
    /// line per merge in training order.
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{MERGE_FILE_HEADER}").map_err(|e| Error::io("writing merges", e))?;
        for (l, r) in &self.merges {
            writeln!(w, "{l} {r}").map_err(|e| Error::io("writing merges", e))?;
        }
        Ok(())
    }

    /// Read the merge-list format. The alphabet is reconstructed from
    /// single-character operands; characters that never took part in a
    /// merge are not recoverable from the file (they behave as singleton
    /// tokens either way). Multi-character operands must be results of
    /// earlier merges.
    pub fn read<R: BufRead>(r: R, source_name: &str) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        match lines.next() {
            Some((_, Ok(header))) if header == MERGE_FILE_HEADER => {}
            Some((_, Ok(other))) => {
                return Err(Error::parse(source_name, 1, &format!("bad header {other:?}")))
            }
            Some((_, Err(e))) => return Err(Error::io("reading merges", e)),
            None => return Err(Error::parse(source_name, 1, "missing header")),
        }
        let mut merges = Vec::new();
        let mut alphabet = BTreeSet::new();
        let mut known: BTreeSet<String> = BTreeSet::new();
        for (idx, line) in lines {
            let line = line.map_err(|e| Error::io("reading merges", e))?;
            let lineno = idx + 1;
            if line.is_empty() {
                continue;
            }
            let (l, r) = line
                .split_once(' ')
                .ok_or_else(|| Error::parse(source_name, lineno, "expected `left right`"))?;
            if l.is_empty() || r.is_empty() {
                return Err(Error::parse(source_name, lineno, "empty merge operand"));
            }
            for operand in [l, r] {
                if operand.chars().count() == 1 {
                    alphabet.insert(operand.to_string());
                } else if !known.contains(operand) {
                    return Err(Error::parse(
                        source_name,
                        lineno,
                        &format!("operand {operand:?} is not a result of an earlier merge"),
                    ));
                }
            }
            known.insert(format!("{l}{r}"));
            merges.push((l.to_string(), r.to_string()));
        }
        Ok(Self { merges, alphabet })
    }
}

/// Count-weighted, non-overlapping left-to-right occurrences of every
/// adjacent pair in one symbol sequence, accumulated into `into`.
fn add_pair_counts(symbols: &[u32], weight: i64, into: &mut HashMap<(u32, u32), i64>) {
    // Per pair type, matches that overlap an earlier match of the same
    // pair do not count, so track the last consumed position per pair.
    let mut last_match: HashMap<(u32, u32), usize> = HashMap::new();
    for i in 0..symbols.len().saturating_sub(1) {
        let pair = (symbols[i], symbols[i + 1]);
        if let Some(&end) = last_match.get(&pair) {
            if i < end {
                continue;
            }
        }
        last_match.insert(pair, i + 2);
        *into.entry(pair).or_insert(0) += weight;
    }
}

/// Merge every non-overlapping leftmost occurrence of `(l, r)` in one
/// pass, writing the merged symbol `m`.
fn merge_in_word(symbols: &[u32], l: u32, r: u32, m: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(symbols.len());
    let mut i = 0;
    while i < symbols.len() {
        if i + 1 < symbols.len() && symbols[i] == l && symbols[i + 1] == r {
            out.push(m);
            i += 2;
        } else {
            out.push(symbols[i]);
            i += 1;
        }
    }
    out
}

/// Train a merge table on `words`, stopping when the vocabulary (alphabet
/// plus merge results) reaches `target_vocab` or no pair occurs at least
/// twice. Also returns the lexicon of token occurrences over the word
/// list under the final merges; alphabet symbols and merge results that
/// end up with no occurrences are kept at a floor count of 1 so the
/// lexicon always covers every producible token.
pub fn train_bpe(words: &WordList, target_vocab: usize) -> Result<(MergeTable, Lexicon)> {
    if words.is_empty() {
        return Err(Error::EmptyCorpus);
    }

    // Intern symbols as dense ids; ids are stable for the whole run.
    let mut strings: Vec<String> = Vec::new();
    let mut ids: HashMap<String, u32> = HashMap::new();
    let intern = |s: String, strings: &mut Vec<String>, ids: &mut HashMap<String, u32>| -> u32 {
        if let Some(&id) = ids.get(&s) {
            return id;
        }
        let id = strings.len() as u32;
        ids.insert(s.clone(), id);
        strings.push(s);
        id
    };

    let mut alphabet: BTreeSet<String> = BTreeSet::new();
    let mut sequences: Vec<(Vec<u32>, i64)> = Vec::with_capacity(words.total_types());
    for (word, count) in words.iter() {
        let symbols: Vec<u32> = word
            .chars()
            .map(|c| {
                let s = c.to_string();
                alphabet.insert(s.clone());
                intern(s, &mut strings, &mut ids)
            })
            .collect();
        sequences.push((symbols, count as i64));
    }
    if target_vocab < alphabet.len() {
        return Err(Error::TargetTooSmall { target: target_vocab, alphabet: alphabet.len() });
    }

    let mut pair_counts: HashMap<(u32, u32), i64> = HashMap::new();
    let mut pair_words: HashMap<(u32, u32), BTreeSet<usize>> = HashMap::new();
    for (w, (symbols, weight)) in sequences.iter().enumerate() {
        let mut counts = HashMap::new();
        add_pair_counts(symbols, *weight, &mut counts);
        for (pair, n) in counts {
            *pair_counts.entry(pair).or_insert(0) += n;
            pair_words.entry(pair).or_default().insert(w);
        }
    }

    let mut merges: Vec<(String, String)> = Vec::new();
    let mut vocab: BTreeSet<String> = alphabet.clone();
    while vocab.len() < target_vocab {
        // Highest count wins; ties break lexicographically on the
        // (left, right) strings so training is deterministic.
        let best = pair_counts
            .iter()
            .filter(|&(_, &n)| n >= 2)
            .map(|(&(l, r), &n)| (n, &strings[l as usize], &strings[r as usize], (l, r)))
            .min_by(|a, b| b.0.cmp(&a.0).then_with(|| (a.1, a.2).cmp(&(b.1, b.2))));
        let Some((_, _, _, (l, r))) = best else { break };

        let merged_string = format!("{}{}", strings[l as usize], strings[r as usize]);
        let m = intern(merged_string.clone(), &mut strings, &mut ids);
        merges.push((strings[l as usize].clone(), strings[r as usize].clone()));
        vocab.insert(merged_string);

        // Re-derive pair counts only for the words that contained the
        // merged pair.
        let affected = pair_words.remove(&(l, r)).unwrap_or_default();
        for w in affected {
            let (symbols, weight) = &sequences[w];
            let weight = *weight;
            let mut old = HashMap::new();
            add_pair_counts(symbols, weight, &mut old);
            let merged = merge_in_word(symbols, l, r, m);
            let mut new = HashMap::new();
            add_pair_counts(&merged, weight, &mut new);
            for (pair, n) in old {
                let slot = pair_counts.entry(pair).or_insert(0);
                *slot -= n;
                if *slot <= 0 {
                    pair_counts.remove(&pair);
                }
                if let Some(set) = pair_words.get_mut(&pair) {
                    set.remove(&w);
                }
            }
            for (pair, n) in new {
                *pair_counts.entry(pair).or_insert(0) += n;
                pair_words.entry(pair).or_default().insert(w);
            }
            sequences[w].0 = merged;
        }
    }

    // Token occurrences under the final merges, with the floor for
    // producible-but-unused tokens.
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for (symbols, weight) in &sequences {
        for &s in symbols {
            *counts.entry(strings[s as usize].clone()).or_insert(0) += *weight as u64;
        }
    }
    let table = MergeTable { merges, alphabet };
    for token in table.token_strings() {
        counts.entry(token).or_insert(1);
    }
    Ok((table, Lexicon::from_counts(counts)?))
}

/// Apply the merges in recorded training order: each rule merges its
/// non-overlapping leftmost occurrences in one pass. Characters outside
/// the table's reach simply stay singleton tokens (they can never match
/// a rule), which is also how out-of-alphabet characters surface.
pub fn apply_bpe(word: &str, merges: &MergeTable) -> Result<Segmentation> {
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    let mut tokens: Vec<String> = word.chars().map(|c| c.to_string()).collect();
    for (l, r) in &merges.merges {
        let mut out: Vec<String> = Vec::with_capacity(tokens.len());
        let mut i = 0;
        while i < tokens.len() {
            if i + 1 < tokens.len() && &tokens[i] == l && &tokens[i + 1] == r {
                out.push(format!("{l}{r}"));
                i += 2;
            } else {
                out.push(std::mem::take(&mut tokens[i]));
                i += 1;
            }
        }
        tokens = out;
    }
    Segmentation::new(tokens)
}

/// A trained BPE segmenter: a merge table plus the lexicon describing
/// token occurrences over its training word list.
#[derive(Debug, Clone)]
pub struct BpeSegmenter {
    table: MergeTable,
    lexicon: Lexicon,
}

impl BpeSegmenter {
    /// Train on `words` to the given vocabulary size.
    pub fn train(words: &WordList, target_vocab: usize) -> Result<Self> {
        let (table, lexicon) = train_bpe(words, target_vocab)?;
        Ok(Self { table, lexicon })
    }

    /// Wrap a merge table loaded from elsewhere, with a placeholder
    /// lexicon (every producible token at count 1). Use
    /// [`BpeSegmenter::recount`] to restore real counts from a word list.
    pub fn from_table(table: MergeTable) -> Result<Self> {
        let counts: BTreeMap<String, u64> =
            table.token_strings().into_iter().map(|t| (t, 1)).collect();
        let lexicon = Lexicon::from_counts(counts)?;
        Ok(Self { table, lexicon })
    }

    /// Recompute lexicon counts as token occurrences over `words` under
    /// the final merges (keeping the count-1 floor for unused tokens).
    pub fn recount(&mut self, words: &WordList) -> Result<()> {
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for (word, count) in words.iter() {
            for token in apply_bpe(word, &self.table)?.morphs() {
                *counts.entry(token.clone()).or_insert(0) += count;
            }
        }
        for token in self.table.token_strings() {
            counts.entry(token).or_insert(1);
        }
        self.lexicon = Lexicon::from_counts(counts)?;
        Ok(())
    }

    pub fn table(&self) -> &MergeTable {
        &self.table
    }
}

impl Segmenter for BpeSegmenter {
    fn segment(&self, word: &str) -> Result<Segmentation> {
        apply_bpe(word, &self.table)
    }

    fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }
}
