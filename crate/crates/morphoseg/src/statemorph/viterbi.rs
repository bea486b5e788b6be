//! Minimum-cost decoding over the (position, state) lattice of a trained
//! network. Arcs are priced with add-δ smoothed transition and emission
//! probabilities so unseen events stay finite; substrings outside the
//! lexicon are only reachable one character at a time, paying spelling
//! bits plus a penalty, which keeps every word decodable.

use crate::coding::CharDistribution;
use crate::error::{Error, Result};
use crate::segmentation::Segmentation;

use super::{StateNetwork, SMOOTH_DELTA};

/// Smoothed code length of one event: `count` out of `total` with add-δ
/// mass spread over `support` outcomes.
pub(crate) fn smoothed_bits(count: u64, total: u64, support: usize) -> f64 {
    let p = (count as f64 + SMOOTH_DELTA) / (total as f64 + SMOOTH_DELTA * support as f64);
    -p.log2()
}

/// Decode `word` to its cheapest state-tagged segmentation under `net`.
///
/// Lattice nodes are (character position, state of the morph just
/// emitted); an arc consumes a substring and pays the smoothed
/// transition into its emitting state plus either the smoothed emission
/// (in-lexicon morphs, any state) or, for a single out-of-lexicon
/// character, spelling bits plus a `log2(tokens + 1)` penalty. No cost
/// attaches to stopping at the end of the word. Ties prefer the shorter
/// trailing morph, then the smaller state id.
pub fn viterbi_segment(word: &str, net: &StateNetwork) -> Result<Segmentation> {
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    let chars: Vec<char> = word.chars().collect();
    let n = chars.len();
    let k = net.num_states();
    let lexicon = net.lexicon();
    let spell = CharDistribution::from_lexicon(lexicon);
    let fallback_penalty = ((net.token_total() + 1) as f64).log2();
    let emission_support = lexicon.size() + 1;
    let emission_totals: Vec<u64> =
        net.emission_counts().iter().map(|t| t.values().sum()).collect();

    // trans_bits[p][q]: smoothed cost of moving from p (real state, or
    // the initial pseudo-state at index k) into real state q.
    let trans_bits: Vec<Vec<f64>> = (0..=k)
        .map(|p| {
            let from = if p == k { net.initial_state() } else { p };
            let out = net.real_out_total(from);
            (0..k)
                .map(|q| smoothed_bits(net.transition_counts()[from][q], out, k))
                .collect()
        })
        .collect();

    let mut dist = vec![vec![f64::INFINITY; k]; n + 1];
    let mut back: Vec<Vec<(usize, usize)>> = vec![vec![(usize::MAX, usize::MAX); k]; n + 1];
    for j in 1..=n {
        // Larger i first: on cost ties the shorter trailing morph wins.
        for i in (0..j).rev() {
            let s: String = chars[i..j].iter().collect();
            let in_lexicon = lexicon.contains(&s);
            if !in_lexicon && j - i > 1 {
                continue;
            }
            let char_bits = if in_lexicon {
                0.0
            } else {
                spell.spell_bits(&s) + fallback_penalty
            };
            let prevs: &[usize] = if i == 0 { &[k] } else { &[] };
            let real_prevs: Vec<usize> = if i == 0 { vec![] } else { (0..k).collect() };
            for &p in prevs.iter().chain(real_prevs.iter()) {
                if p < k && !dist[i][p].is_finite() {
                    continue;
                }
                let base = if p == k { 0.0 } else { dist[i][p] };
                for q in 0..k {
                    let emit = if in_lexicon {
                        let count = net.emission_counts()[q].get(&s).copied().unwrap_or(0);
                        smoothed_bits(count, emission_totals[q], emission_support)
                    } else {
                        char_bits
                    };
                    let cand = base + trans_bits[p][q] + emit;
                    if cand < dist[j][q] {
                        dist[j][q] = cand;
                        back[j][q] = (i, p);
                    }
                }
            }
        }
    }

    let mut best_state = 0;
    for q in 1..k {
        if dist[n][q] < dist[n][best_state] {
            best_state = q;
        }
    }
    let mut morphs_rev: Vec<String> = Vec::new();
    let mut states_rev: Vec<usize> = Vec::new();
    let (mut j, mut q) = (n, best_state);
    while j > 0 {
        let (i, p) = back[j][q];
        morphs_rev.push(chars[i..j].iter().collect());
        states_rev.push(q);
        j = i;
        q = p;
    }
    morphs_rev.reverse();
    states_rev.reverse();
    Segmentation::with_states(morphs_rev, states_rev)
}
