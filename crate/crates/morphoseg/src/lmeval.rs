//! Language-model evaluation of segmentations.
//!
//! A segmenter is scored by how predictable its token stream is: train an
//! add-delta smoothed n-gram model on encoded training text, then measure
//! perplexity on held-out text. Because different segmenters emit different
//! numbers of tokens for the same sentence, the headline number is
//! *per-word* perplexity — the total code length divided by the number of
//! surface words — which stays comparable across token granularities.
//! [`compare_segmenters`] runs the full pipeline for several segmenters and
//! tabulates the results; [`boundary_score`] scores split positions against
//! a reference segmentation when one is available.

use std::collections::BTreeSet;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::corpus::SentenceStream;
use crate::error::{Error, Result};
use crate::segmentation::{Segmentation, Segmenter};
use crate::vocab::{assemble_vocabulary, encode, Vocabulary};

/// Default n-gram order: bigrams are the smallest model that rewards a
/// segmenter for producing predictable token *sequences* rather than just
/// a compact unigram distribution.
pub const DEFAULT_ORDER: usize = 2;

/// Default add-delta smoothing mass per vocabulary entry.
pub const DEFAULT_DELTA: f64 = 0.1;

/// Token counts observed after one fixed context.
#[derive(Debug, Clone, Default)]
struct ContextCounts {
    total: u64,
    by_token: BTreeMap<u32, u64>,
}

/// An add-delta smoothed n-gram model over token ids.
///
/// Contexts shorter than `order - 1` (at sentence starts) are left-padded
/// with the padding id, so every token is conditioned on a context of the
/// same length and sentences do not leak into each other.
#[derive(Debug, Clone)]
pub struct NgramLm {
    order: usize,
    delta: f64,
    vocab_size: usize,
    pad_id: u32,
    unk_id: u32,
    counts: BTreeMap<Vec<u32>, ContextCounts>,
}

impl NgramLm {
    /// The n-gram order this model was trained with.
    pub fn order(&self) -> usize {
        self.order
    }

    /// The smoothing constant this model scores with.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Size of the vocabulary the model distributes mass over.
    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    /// Raw training count of `token` after `context` (which must have
    /// length `order - 1`).
    pub fn count(&self, context: &[u32], token: u32) -> u64 {
        self.counts
            .get(context)
            .and_then(|slot| slot.by_token.get(&token).copied())
            .unwrap_or(0)
    }

    /// The context for position `pos` of `sentence`: the previous
    /// `order - 1` ids, left-padded with the padding id.
    fn context_at(&self, sentence: &[u32], pos: usize) -> Vec<u32> {
        let width = self.order - 1;
        let mut context = Vec::with_capacity(width);
        for back in (1..=width).rev() {
            context.push(if pos >= back {
                sentence[pos - back]
            } else {
                self.pad_id
            });
        }
        context
    }

    /// Smoothed code length in bits of the token at `pos`:
    /// `-log2((count + delta) / (context_total + delta * V))`.
    fn token_bits(&self, sentence: &[u32], pos: usize) -> f64 {
        let context = self.context_at(sentence, pos);
        let token = sentence[pos];
        let (count, total) = match self.counts.get(&context) {
            Some(slot) => (slot.by_token.get(&token).copied().unwrap_or(0), slot.total),
            None => (0, 0),
        };
        let v = self.vocab_size as f64;
        let p = (count as f64 + self.delta) / (total as f64 + self.delta * v);
        -p.log2()
    }
}

/// Count the n-grams of `ids` into a smoothed model over `vocab`.
///
/// Every token of every sentence is counted exactly once, conditioned on
/// its padded context; nothing is appended at sentence ends.
pub fn train_ngram(
    ids: &[Vec<u32>],
    vocab: &Vocabulary,
    order: usize,
    delta: f64,
) -> Result<NgramLm> {
    if order == 0 {
        return Err(Error::InvalidParam("n-gram order must be at least 1".into()));
    }
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "smoothing delta must be positive and finite, got {delta}"
        )));
    }
    if ids.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut lm = NgramLm {
        order,
        delta,
        vocab_size: vocab.len(),
        pad_id: vocab.pad_id(),
        unk_id: vocab.unk_id(),
        counts: BTreeMap::new(),
    };
    for sentence in ids {
        for (pos, &token) in sentence.iter().enumerate() {
            if token as usize >= lm.vocab_size {
                return Err(Error::InvalidId {
                    id: token,
                    size: lm.vocab_size,
                });
            }
            let context = lm.context_at(sentence, pos);
            let slot = lm.counts.entry(context).or_default();
            slot.total += 1;
            *slot.by_token.entry(token).or_insert(0) += 1;
        }
    }
    Ok(lm)
}

/// Perplexity of held-out text under an n-gram model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerplexityReport {
    /// `2^(total bits / token count)` — comparable only between models
    /// that tokenize identically.
    pub per_token_ppl: f64,
    /// `2^(total bits / word count)` — the headline number, comparable
    /// across segmenters because every segmenter sees the same words.
    pub per_word_ppl: f64,
    /// Number of tokens scored.
    pub token_count: u64,
    /// Number of surface words behind those tokens.
    pub word_count: u64,
    /// Fraction of scored tokens that were the unknown id.
    pub oov_rate: f64,
}

/// Score `ids` under `lm`. `words_per_sentence` must give the surface word
/// count of each sentence, in the same order as `ids`.
pub fn perplexity(
    lm: &NgramLm,
    ids: &[Vec<u32>],
    words_per_sentence: &[usize],
) -> Result<PerplexityReport> {
    if ids.len() != words_per_sentence.len() {
        return Err(Error::AlignmentError(format!(
            "{} id sentences but {} sentence word counts",
            ids.len(),
            words_per_sentence.len()
        )));
    }
    let token_count: u64 = ids.iter().map(|s| s.len() as u64).sum();
    let word_count: u64 = words_per_sentence.iter().map(|&w| w as u64).sum();
    if token_count == 0 || word_count == 0 {
        return Err(Error::EmptyEval);
    }
    let mut sum_bits = 0.0;
    let mut oov = 0u64;
    for sentence in ids {
        for (pos, &token) in sentence.iter().enumerate() {
            if token as usize >= lm.vocab_size {
                return Err(Error::InvalidId {
                    id: token,
                    size: lm.vocab_size,
                });
            }
            sum_bits += lm.token_bits(sentence, pos);
            if token == lm.unk_id {
                oov += 1;
            }
        }
    }
    Ok(PerplexityReport {
        per_token_ppl: (sum_bits / token_count as f64).exp2(),
        per_word_ppl: (sum_bits / word_count as f64).exp2(),
        token_count,
        word_count,
        oov_rate: oov as f64 / token_count as f64,
    })
}

/// Micro-averaged precision/recall/F1 over internal split positions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(numerator: u64, denominator: u64) -> f64 {
    if denominator == 0 {
        0.0
    } else {
        numerator as f64 / denominator as f64
    }
}

/// Compare predicted split positions against a reference, word by word.
///
/// The two slices must list the same words in the same order. Splits are
/// pooled across all words before computing precision and recall
/// (micro-averaging), and empty ratios are defined as zero, so a
/// completely unsegmented prediction scores 0 rather than erroring.
pub fn boundary_score(
    predicted: &[Segmentation],
    reference: &[Segmentation],
) -> Result<BoundaryScore> {
    if predicted.len() != reference.len() {
        return Err(Error::AlignmentError(format!(
            "{} predicted words but {} reference words",
            predicted.len(),
            reference.len()
        )));
    }
    if predicted.is_empty() {
        return Err(Error::EmptyEval);
    }
    let mut true_pos = 0u64;
    let mut false_pos = 0u64;
    let mut false_neg = 0u64;
    for (pred, gold) in predicted.iter().zip(reference) {
        if pred.word() != gold.word() {
            return Err(Error::AlignmentError(format!(
                "predicted word {:?} but reference word {:?}",
                pred.word(),
                gold.word()
            )));
        }
        let pred_splits: BTreeSet<usize> = pred.split_positions().into_iter().collect();
        let gold_splits: BTreeSet<usize> = gold.split_positions().into_iter().collect();
        true_pos += pred_splits.intersection(&gold_splits).count() as u64;
        false_pos += pred_splits.difference(&gold_splits).count() as u64;
        false_neg += gold_splits.difference(&pred_splits).count() as u64;
    }
    let precision = ratio(true_pos, true_pos + false_pos);
    let recall = ratio(true_pos, true_pos + false_neg);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(BoundaryScore { precision, recall, f1 })
}

/// One segmenter's line in a comparison table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    /// The caller-supplied display name.
    pub segmenter: String,
    /// Number of distinct morphs in the segmenter's lexicon.
    pub vocab_size: usize,
    pub per_token_ppl: f64,
    pub per_word_ppl: f64,
    pub oov_rate: f64,
    /// Optimizer steps spent training the segmenter, for trainers that
    /// report them.
    pub optimizer_steps: Option<u64>,
}

/// Run the full evaluation pipeline — assemble a vocabulary on `train`,
/// encode both corpora, fit an n-gram model, score `valid` — once per
/// named segmenter, and return one row per segmenter in input order.
pub fn compare_segmenters(
    train: &SentenceStream,
    valid: &SentenceStream,
    segmenters: &[(&str, &dyn Segmenter)],
    order: usize,
    delta: f64,
    marker: char,
) -> Result<Vec<ComparisonRow>> {
    if segmenters.len() < 2 {
        return Err(Error::InvalidParam(format!(
            "need at least two segmenters to compare, got {}",
            segmenters.len()
        )));
    }
    let words_per_sentence: Vec<usize> = valid.sentences().iter().map(|s| s.len()).collect();
    let mut rows = Vec::with_capacity(segmenters.len());
    for (name, segmenter) in segmenters {
        let vocab = assemble_vocabulary(train, *segmenter, marker)?;
        let train_ids = encode(train, &vocab, *segmenter)?;
        let valid_ids = encode(valid, &vocab, *segmenter)?;
        let lm = train_ngram(&train_ids, &vocab, order, delta)?;
        let report = perplexity(&lm, &valid_ids, &words_per_sentence)?;
        rows.push(ComparisonRow {
            segmenter: (*name).to_string(),
            vocab_size: segmenter.lexicon().size(),
            per_token_ppl: report.per_token_ppl,
            per_word_ppl: report.per_word_ppl,
            oov_rate: report.oov_rate,
            optimizer_steps: segmenter.train_stats().map(|stats| stats.steps),
        });
    }
    Ok(rows)
}

/// Render comparison rows as a TSV table with a header line. Perplexities
/// and rates are fixed to six decimals; missing optimizer steps render
/// as `-`.
pub fn rows_to_tsv(rows: &[ComparisonRow]) -> String {
    let mut out =
        String::from("segmenter\tvocab_size\tper_token_ppl\tper_word_ppl\toov_rate\toptimizer_steps\n");
    for row in rows {
        let steps = match row.optimizer_steps {
            Some(steps) => steps.to_string(),
            None => "-".to_string(),
        };
        writeln!(
            out,
            "{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{}",
            row.segmenter, row.vocab_size, row.per_token_ppl, row.per_word_ppl, row.oov_rate, steps
        )
        .expect("writing to a String cannot fail");
    }
    out
}

/// Render comparison rows as a pretty-printed JSON array.
pub fn rows_to_json(rows: &[ComparisonRow]) -> String {
    let mut out = serde_json::to_string_pretty(rows).expect("comparison rows serialize cleanly");
    out.push('\n');
    out
}
