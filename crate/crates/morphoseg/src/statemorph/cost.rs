//! Four-part description length of a state network plus its analyzed
//! corpus: spell out the lexicon, code each state's outgoing transition
//! counts and emission counts (the model), then code the corpus itself —
//! one transition and one emission event per morph token under the
//! maximum-likelihood estimates. Per-token transition probabilities are
//! normalized over real successor states only; the arrival in the final
//! pseudo-state is priced once, in the model's transition tables, so a
//! one-state network's corpus cost collapses to the unigram morph cost.

use std::collections::BTreeMap;

use crate::coding::{lexicon_string_cost, nlog2n, CharDistribution};
use crate::corpus::WordList;
use crate::error::{Error, Result};
use crate::segmentation::Segmentation;

use super::StateNetwork;

/// The four cost components and their sum, all in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmCost {
    /// Spelling out the distinct lexicon entries.
    pub lexicon_bits: f64,
    /// Coding every state's outgoing transition counts (final arrivals
    /// included).
    pub transition_bits: f64,
    /// Coding every state's emission counts.
    pub emission_bits: f64,
    /// Coding the analyzed corpus: one transition and one emission per
    /// morph token.
    pub corpus_bits: f64,
    /// Sum of the four parts.
    pub total_bits: f64,
}

/// Maximum-likelihood code length of one count vector, zeros ignored.
fn mult_bits<'a>(counts: impl Iterator<Item = &'a u64>) -> f64 {
    let mut total = 0u64;
    let mut sum = 0.0;
    for &c in counts {
        total += c;
        sum += nlog2n(c);
    }
    (nlog2n(total) - sum).max(0.0)
}

/// Evaluate the full objective for `net` given the state-tagged
/// `analyses` of `words`. The analyses must reproduce the network's
/// counts exactly — every word analyzed, states in range, transition and
/// emission counts equal — otherwise the reported cost would describe a
/// different model ([`Error::InconsistentNetwork`]).
pub fn sm_total_cost(
    net: &StateNetwork,
    analyses: &BTreeMap<String, Segmentation>,
    words: &WordList,
) -> Result<SmCost> {
    let k = net.num_states();
    let bad = |msg: String| Err(Error::InconsistentNetwork(msg));

    if analyses.len() != words.total_types() {
        return bad(format!(
            "{} analyses for {} word types",
            analyses.len(),
            words.total_types()
        ));
    }
    let mut trans = vec![vec![0u64; k + 2]; k + 2];
    let mut emissions: Vec<BTreeMap<String, u64>> = vec![BTreeMap::new(); k];
    for (word, count) in words.iter() {
        let Some(seg) = analyses.get(word) else {
            return bad(format!("no analysis for word {word:?}"));
        };
        if seg.word() != word {
            return bad(format!("analysis keyed {word:?} concatenates to {:?}", seg.word()));
        }
        let Some(states) = seg.states() else {
            return bad(format!("analysis of {word:?} has no state tags"));
        };
        let mut prev = k;
        for (morph, &state) in seg.morphs().iter().zip(states) {
            if state >= k {
                return bad(format!("state id {state} out of range in {word:?}"));
            }
            trans[prev][state] += count;
            *emissions[state].entry(morph.clone()).or_insert(0) += count;
            prev = state;
        }
        trans[prev][k + 1] += count;
    }
    if trans != net.transition_counts() {
        return bad("transition counts disagree with the analyses".into());
    }
    if emissions != net.emission_counts() {
        return bad("emission counts disagree with the analyses".into());
    }

    let chars = CharDistribution::from_lexicon(net.lexicon());
    let lexicon_bits = lexicon_string_cost(net.lexicon(), &chars)?;
    let transition_bits: f64 = trans.iter().map(|row| mult_bits(row.iter())).sum();
    let emission_bits: f64 = emissions.iter().map(|t| mult_bits(t.values())).sum();
    let corpus_transitions: f64 = trans.iter().map(|row| mult_bits(row[..k].iter())).sum();
    let corpus_emissions: f64 = emissions.iter().map(|t| mult_bits(t.values())).sum();
    let corpus_bits = corpus_transitions + corpus_emissions;
    let total_bits = lexicon_bits + transition_bits + emission_bits + corpus_bits;
    Ok(SmCost { lexicon_bits, transition_bits, emission_bits, corpus_bits, total_bits })
}
