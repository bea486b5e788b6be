//! Reference implementations the acceptance tests compare against.
//! Everything here recomputes its answer from first principles — full
//! rescans, exhaustive enumeration, direct per-event pricing — and
//! shares no code with the library under test.

use std::collections::{BTreeMap, BTreeSet};

// ---------------------------------------------------------------------
// Code lengths, computed directly.
// ---------------------------------------------------------------------

/// Bits of a count vector under its own empirical distribution, summed
/// entry by entry as `c * log2(total / c)`. Zeros contribute nothing; an
/// empty or single-outcome vector costs nothing.
pub fn entropy_bits(counts: impl IntoIterator<Item = u64>) -> f64 {
    let counts: Vec<u64> = counts.into_iter().filter(|&c| c > 0).collect();
    let total: u64 = counts.iter().sum();
    counts.iter().map(|&c| c as f64 * (total as f64 / c as f64).log2()).sum()
}

/// Bits to spell every distinct morph: each character priced by its
/// frequency in the pool of all spellings, plus one end event per morph.
pub fn spelling_bits(morphs: &BTreeSet<String>) -> f64 {
    let mut pool: BTreeMap<char, u64> = BTreeMap::new();
    for morph in morphs {
        for c in morph.chars() {
            *pool.entry(c).or_insert(0) += 1;
        }
    }
    let ends = morphs.len() as u64;
    let total = pool.values().sum::<u64>() + ends;
    let mut bits = 0.0;
    for morph in morphs {
        for c in morph.chars() {
            bits += (total as f64 / pool[&c] as f64).log2();
        }
        bits += (total as f64 / ends as f64).log2();
    }
    bits
}

// ---------------------------------------------------------------------
// Naive byte-pair-encoding reference.
// ---------------------------------------------------------------------

pub struct NaiveBpeResult {
    pub merges: Vec<(String, String)>,
    /// Token occurrences under the final merges, with every producible
    /// token floored at count 1.
    pub token_counts: BTreeMap<String, u64>,
}

/// Train the slow way: recount every adjacent pair across the whole list
/// from scratch after every single merge. Pairs count leftmost
/// non-overlapping occurrences weighted by word count; a merge needs a
/// pair count of at least two; ties prefer the lexicographically smaller
/// (left, right) pair; training stops when the token inventory (alphabet
/// plus merge products) reaches `target_vocab`.
pub fn naive_train_bpe(words: &[(String, u64)], target_vocab: usize) -> NaiveBpeResult {
    let mut sequences: Vec<(Vec<String>, u64)> = words
        .iter()
        .map(|(w, c)| (w.chars().map(|ch| ch.to_string()).collect(), *c))
        .collect();
    let mut inventory: BTreeSet<String> =
        sequences.iter().flat_map(|(tokens, _)| tokens.iter().cloned()).collect();
    let mut merges = Vec::new();
    while inventory.len() < target_vocab {
        let mut counts: BTreeMap<(String, String), u64> = BTreeMap::new();
        for (tokens, weight) in &sequences {
            let mut last_end: BTreeMap<(String, String), usize> = BTreeMap::new();
            for i in 0..tokens.len().saturating_sub(1) {
                let pair = (tokens[i].clone(), tokens[i + 1].clone());
                if last_end.get(&pair).is_some_and(|&end| i < end) {
                    continue;
                }
                last_end.insert(pair.clone(), i + 2);
                *counts.entry(pair).or_insert(0) += weight;
            }
        }
        // Highest count wins; among equals the lexicographically smaller
        // pair must compare greater so that max_by picks it.
        let best = counts
            .into_iter()
            .filter(|&(_, n)| n >= 2)
            .max_by(|(pa, na), (pb, nb)| na.cmp(nb).then_with(|| pb.cmp(pa)));
        let Some(((l, r), _)) = best else { break };
        for (tokens, _) in &mut sequences {
            *tokens = apply_one_merge(tokens, &l, &r);
        }
        inventory.insert(format!("{l}{r}"));
        merges.push((l, r));
    }
    let mut token_counts: BTreeMap<String, u64> = BTreeMap::new();
    for (tokens, weight) in &sequences {
        for t in tokens {
            *token_counts.entry(t.clone()).or_insert(0) += weight;
        }
    }
    for t in &inventory {
        token_counts.entry(t.clone()).or_insert(1);
    }
    NaiveBpeResult { merges, token_counts }
}

/// One merge rule over one token sequence: a single left-to-right pass
/// replacing non-overlapping occurrences.
fn apply_one_merge(tokens: &[String], l: &str, r: &str) -> Vec<String> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut i = 0;
    while i < tokens.len() {
        if i + 1 < tokens.len() && tokens[i] == l && tokens[i + 1] == r {
            out.push(format!("{l}{r}"));
            i += 2;
        } else {
            out.push(tokens[i].clone());
            i += 1;
        }
    }
    out
}

/// Segment one word by replaying recorded merges in order.
pub fn naive_apply(word: &str, merges: &[(String, String)]) -> Vec<String> {
    let mut tokens: Vec<String> = word.chars().map(|c| c.to_string()).collect();
    for (l, r) in merges {
        tokens = apply_one_merge(&tokens, l, r);
    }
    tokens
}

// ---------------------------------------------------------------------
// Exhaustive two-part (lexicon + corpus) enumeration.
// ---------------------------------------------------------------------

/// Every way to cut `word` into contiguous non-empty pieces.
pub fn all_splits(word: &str) -> Vec<Vec<String>> {
    let chars: Vec<char> = word.chars().collect();
    let n = chars.len();
    assert!(n >= 1 && n <= 20, "enumeration only makes sense for short words");
    let mut out = Vec::with_capacity(1 << (n - 1));
    for mask in 0u32..(1 << (n - 1)) {
        let mut parts: Vec<String> = Vec::new();
        let mut start = 0;
        for i in 1..n {
            if mask & (1 << (i - 1)) != 0 {
                parts.push(chars[start..i].iter().collect());
                start = i;
            }
        }
        parts.push(chars[start..].iter().collect());
        out.push(parts);
    }
    out
}

/// All `k^m` ways to assign one of `k` labels to each of `m` slots.
pub fn state_assignments(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(k.pow(m as u32));
    let mut current = vec![0usize; m];
    loop {
        out.push(current.clone());
        let mut pos = 0;
        loop {
            if pos == m {
                return out;
            }
            current[pos] += 1;
            if current[pos] < k {
                break;
            }
            current[pos] = 0;
            pos += 1;
        }
    }
}

/// Two-part description length of one joint analysis: spell the distinct
/// morphs, then code the corpus's morph tokens.
pub fn two_part_bits(analyses: &[(Vec<String>, u64)]) -> f64 {
    let mut tokens: BTreeMap<String, u64> = BTreeMap::new();
    for (morphs, count) in analyses {
        for m in morphs {
            *tokens.entry(m.clone()).or_insert(0) += count;
        }
    }
    let distinct: BTreeSet<String> = tokens.keys().cloned().collect();
    spelling_bits(&distinct) + entropy_bits(tokens.values().copied())
}

/// Global minimum of [`two_part_bits`] over every combination of splits,
/// found by plain enumeration of the full product space.
pub fn exhaustive_two_part_optimum(words: &[(String, u64)]) -> f64 {
    let options: Vec<Vec<Vec<String>>> = words.iter().map(|(w, _)| all_splits(w)).collect();
    let mut choice = vec![0usize; words.len()];
    let mut best = f64::INFINITY;
    loop {
        let current: Vec<(Vec<String>, u64)> = choice
            .iter()
            .enumerate()
            .map(|(w, &i)| (options[w][i].clone(), words[w].1))
            .collect();
        let bits = two_part_bits(&current);
        if bits < best {
            best = bits;
        }
        let mut pos = 0;
        loop {
            if pos == choice.len() {
                return best;
            }
            choice[pos] += 1;
            if choice[pos] < options[pos].len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

// ---------------------------------------------------------------------
// Direct pricing of a state network and its analyzed corpus.
// ---------------------------------------------------------------------

/// One word's tagged analysis: the word, its (morph, state) path, and
/// its corpus count.
pub type TaggedAnalysis = (String, Vec<(String, usize)>, u64);

pub struct DirectCost {
    pub lexicon: f64,
    pub transitions: f64,
    pub emissions: f64,
    pub corpus: f64,
    pub total: f64,
}

/// Aggregate transition and emission counts from tagged analyses; the
/// transition matrix is dense over the `k` real states plus the initial
/// pseudo-state at index `k` and the final one at `k + 1`.
pub fn derive_counts(
    k: usize,
    analyses: &[TaggedAnalysis],
) -> (Vec<Vec<u64>>, Vec<BTreeMap<String, u64>>) {
    let mut trans = vec![vec![0u64; k + 2]; k + 2];
    let mut emits: Vec<BTreeMap<String, u64>> = vec![BTreeMap::new(); k];
    for (_, path, count) in analyses {
        let mut prev = k;
        for (morph, state) in path {
            trans[prev][*state] += count;
            *emits[*state].entry(morph.clone()).or_insert(0) += count;
            prev = *state;
        }
        trans[prev][k + 1] += count;
    }
    (trans, emits)
}

/// Price a tagged joint analysis from scratch: derive the counts, then
/// compute all four description-length parts event by event. The corpus
/// part normalizes each state's outgoing transitions over real successor
/// states only, while the model's transition tables include arrivals in
/// the final pseudo-state.
pub fn direct_state_cost(k: usize, analyses: &[TaggedAnalysis]) -> DirectCost {
    let (trans, emits) = derive_counts(k, analyses);
    let distinct: BTreeSet<String> = emits.iter().flat_map(|t| t.keys().cloned()).collect();
    let lexicon = spelling_bits(&distinct);
    let transitions: f64 = trans.iter().map(|row| entropy_bits(row.iter().copied())).sum();
    let emissions: f64 = emits.iter().map(|t| entropy_bits(t.values().copied())).sum();
    let corpus_transitions: f64 =
        trans.iter().map(|row| entropy_bits(row[..k].iter().copied())).sum();
    let corpus_emissions: f64 = emits.iter().map(|t| entropy_bits(t.values().copied())).sum();
    let corpus = corpus_transitions + corpus_emissions;
    DirectCost {
        lexicon,
        transitions,
        emissions,
        corpus,
        total: lexicon + transitions + emissions + corpus,
    }
}

// ---------------------------------------------------------------------
// Decoding prices and the exhaustive lattice minimum.
// ---------------------------------------------------------------------

/// Per-arc decoding prices derived from a network's raw counts: add-0.5
/// smoothed transitions (normalized over real successors) and emissions
/// (supported on the lexicon plus one), with single-character spelling
/// fallback for out-of-lexicon text.
pub struct ArcPricer {
    k: usize,
    trans: Vec<Vec<u64>>,
    emits: Vec<BTreeMap<String, u64>>,
    emit_totals: Vec<u64>,
    lexicon: BTreeSet<String>,
    char_pool: BTreeMap<char, u64>,
    pool_total: u64,
    ends: u64,
    fallback_penalty: f64,
}

impl ArcPricer {
    pub fn new(k: usize, trans: Vec<Vec<u64>>, emits: Vec<BTreeMap<String, u64>>) -> Self {
        let lexicon: BTreeSet<String> =
            emits.iter().flat_map(|t| t.keys().cloned()).collect();
        let mut char_pool: BTreeMap<char, u64> = BTreeMap::new();
        for morph in &lexicon {
            for c in morph.chars() {
                *char_pool.entry(c).or_insert(0) += 1;
            }
        }
        let ends = lexicon.len() as u64;
        let pool_total = char_pool.values().sum::<u64>() + ends;
        let emit_totals: Vec<u64> = emits.iter().map(|t| t.values().sum()).collect();
        let token_total: u64 = emit_totals.iter().sum();
        let fallback_penalty = ((token_total + 1) as f64).log2();
        Self { k, trans, emits, emit_totals, lexicon, char_pool, pool_total, ends, fallback_penalty }
    }

    /// Smoothed bits for entering real state `q` from `p`, where `p` is a
    /// real state or `k` for the initial pseudo-state.
    fn trans_bits(&self, p: usize, q: usize) -> f64 {
        let out: u64 = self.trans[p][..self.k].iter().sum();
        let prob = (self.trans[p][q] as f64 + 0.5) / (out as f64 + 0.5 * self.k as f64);
        -prob.log2()
    }

    /// Bits for state `q` producing `s`: smoothed emission for in-lexicon
    /// morphs, spelling plus a penalty for a single out-of-lexicon
    /// character, and illegal (None) otherwise.
    fn emit_bits(&self, q: usize, s: &str) -> Option<f64> {
        if self.lexicon.contains(s) {
            let count = self.emits[q].get(s).copied().unwrap_or(0);
            let support = self.lexicon.len() + 1;
            let prob = (count as f64 + 0.5)
                / (self.emit_totals[q] as f64 + 0.5 * support as f64);
            Some(-prob.log2())
        } else if s.chars().count() == 1 {
            let mut bits = 0.0;
            for c in s.chars() {
                bits += match self.char_pool.get(&c) {
                    Some(&n) => (self.pool_total as f64 / n as f64).log2(),
                    None => ((self.pool_total + 1) as f64).log2(),
                };
            }
            if self.ends > 0 {
                bits += (self.pool_total as f64 / self.ends as f64).log2();
            }
            Some(bits + self.fallback_penalty)
        } else {
            None
        }
    }

    /// Cost of one tagged path through a word, if every arc is legal.
    pub fn path_cost(&self, morphs: &[String], states: &[usize]) -> Option<f64> {
        assert_eq!(morphs.len(), states.len());
        let mut total = 0.0;
        let mut prev = self.k;
        for (morph, &q) in morphs.iter().zip(states) {
            total += self.trans_bits(prev, q) + self.emit_bits(q, morph)?;
            prev = q;
        }
        Some(total)
    }

    /// Minimum path cost over every split and state assignment.
    pub fn exhaustive_min(&self, word: &str) -> f64 {
        let mut best = f64::INFINITY;
        for split in all_splits(word) {
            for states in state_assignments(split.len(), self.k) {
                if let Some(cost) = self.path_cost(&split, &states) {
                    if cost < best {
                        best = cost;
                    }
                }
            }
        }
        best
    }
}
