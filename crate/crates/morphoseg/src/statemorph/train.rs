//! Simulated-annealing search over state-tagged segmentations. One
//! proposal redraws a single word's analysis from its full lattice,
//! sampled in proportion to `2^(-cost/T)` so hot temperatures explore
//! and cold ones concentrate on the lattice optimum; acceptance is
//! Metropolis on the exact change in total description length. All
//! randomness comes from the schedule's seed.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coding::{CharDistribution, LexiconPrior, MultinomialCost};
use crate::corpus::WordList;
use crate::error::{Error, Result};
use crate::segmentation::Segmentation;
use crate::stats::TrainStats;

use super::viterbi::smoothed_bits;
use super::{StateNetwork, STEP_TOLERANCE};

/// Cooling plan for [`train_statemorph`]. Temperatures are in bits:
/// Metropolis accepts a proposal that worsens the total by `Δ` bits
/// with probability `2^(-Δ/T)`. Once the temperature reaches `t_min`
/// the walk turns greedy (only strict improvements are kept), and
/// training stops at the first level below `t_min` with no acceptance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealSchedule {
    /// Starting temperature, in bits.
    pub t_initial: f64,
    /// Geometric cooling factor per level, in (0, 1).
    pub alpha: f64,
    /// Temperature at which the walk turns greedy.
    pub t_min: f64,
    /// Proposals drawn at each temperature level.
    pub proposals_per_temp: usize,
    /// Root of all randomness in a run.
    pub seed: u64,
}

impl AnnealSchedule {
    /// The default plan for a word list: start at 10 bits, cool by 1%
    /// per level down to 0.01 bits, one proposal per word type per
    /// level.
    pub fn defaults(words: &WordList, seed: u64) -> Self {
        Self {
            t_initial: 10.0,
            alpha: 0.99,
            t_min: 0.01,
            proposals_per_temp: words.total_types().max(1),
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParam(msg));
        if !(self.t_min > 0.0) || !self.t_min.is_finite() {
            return bad(format!("t_min must be positive, got {}", self.t_min));
        }
        if !(self.t_initial >= self.t_min) || !self.t_initial.is_finite() {
            return bad(format!(
                "t_initial must be at least t_min, got {} < {}",
                self.t_initial, self.t_min
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must be in (0, 1), got {}", self.alpha));
        }
        if self.proposals_per_temp == 0 {
            return bad("proposals_per_temp must be positive".into());
        }
        Ok(())
    }
}

/// One word's state-tagged analysis, kept plain for cheap snapshots.
#[derive(Debug, Clone, PartialEq)]
struct Analysis {
    morphs: Vec<String>,
    states: Vec<usize>,
}

/// All mutable counts of the annealer, with incremental cost trackers:
/// the dense transition matrix (with per-origin full-row and
/// real-successor-only code lengths), per-state emissions, and the
/// cross-state lexicon with its spelling prior.
struct Counts {
    k: usize,
    trans: Vec<Vec<u64>>,
    trans_full: Vec<MultinomialCost>,
    trans_real: Vec<MultinomialCost>,
    emissions: Vec<HashMap<String, u64>>,
    em_cost: Vec<MultinomialCost>,
    global: HashMap<String, u64>,
    prior: LexiconPrior,
}

impl Counts {
    fn new(k: usize) -> Self {
        Self {
            k,
            trans: vec![vec![0; k + 2]; k + 2],
            trans_full: vec![MultinomialCost::new(); k + 2],
            trans_real: vec![MultinomialCost::new(); k + 2],
            emissions: vec![HashMap::new(); k],
            em_cost: vec![MultinomialCost::new(); k],
            global: HashMap::new(),
            prior: LexiconPrior::new(),
        }
    }

    /// Fresh trackers from scratch, used once per level so float drift
    /// from incremental updates cannot accumulate.
    fn rebuild(k: usize, analyses: &BTreeMap<String, Analysis>, words: &WordList) -> Self {
        let mut counts = Self::new(k);
        for (word, analysis) in analyses {
            counts.add_word(analysis, words.get(word).expect("analyzed word in list"));
        }
        counts
    }

    fn bump_trans(&mut self, p: usize, q: usize, delta: i64) {
        let old = self.trans[p][q];
        let new = old.checked_add_signed(delta).expect("transition count underflow");
        self.trans_full[p].update(old, new);
        if q < self.k {
            self.trans_real[p].update(old, new);
        }
        self.trans[p][q] = new;
    }

    fn bump_emission(&mut self, q: usize, morph: &str, delta: i64) {
        let slot = self.emissions[q].entry(morph.to_string()).or_insert(0);
        let old = *slot;
        let new = old.checked_add_signed(delta).expect("emission count underflow");
        self.em_cost[q].update(old, new);
        *slot = new;
        if new == 0 {
            self.emissions[q].remove(morph);
        }
        let slot = self.global.entry(morph.to_string()).or_insert(0);
        let old = *slot;
        let new = old.checked_add_signed(delta).expect("lexicon count underflow");
        *slot = new;
        if new == 0 {
            self.global.remove(morph);
        }
        if old == 0 {
            self.prior.add_entry(morph);
        } else if new == 0 {
            self.prior.remove_entry(morph);
        }
    }

    fn apply(&mut self, analysis: &Analysis, weight: u64, sign: i64) {
        let delta = sign * weight as i64;
        let mut prev = self.k;
        for (morph, &state) in analysis.morphs.iter().zip(&analysis.states) {
            self.bump_trans(prev, state, delta);
            self.bump_emission(state, morph, delta);
            prev = state;
        }
        self.bump_trans(prev, self.k + 1, delta);
    }

    fn add_word(&mut self, analysis: &Analysis, weight: u64) {
        self.apply(analysis, weight, 1);
    }

    fn remove_word(&mut self, analysis: &Analysis, weight: u64) {
        self.apply(analysis, weight, -1);
    }

    /// Current total description length: lexicon spelling, transition
    /// and emission tables, and the corpus — whose emission half equals
    /// the emission tables and whose transition half omits arrivals in
    /// the final pseudo-state.
    fn total(&self) -> f64 {
        let trans: f64 = self.trans_full.iter().map(MultinomialCost::bits).sum();
        let trans_corpus: f64 = self.trans_real.iter().map(MultinomialCost::bits).sum();
        let emit: f64 = self.em_cost.iter().map(MultinomialCost::bits).sum();
        self.prior.bits() + trans + trans_corpus + 2.0 * emit
    }

    fn token_total(&self) -> u64 {
        self.em_cost.iter().map(MultinomialCost::total).sum()
    }
}

/// Draw one state-tagged segmentation of `chars` with probability
/// proportional to `2^(-path cost / temp)`: exact backward partition
/// sums over the (position, state) lattice, then a forward draw. Arc
/// pricing matches decoding — smoothed transitions and emissions —
/// except that *any* substring outside the current lexicon may be
/// proposed as a novel morph for its spelling bits plus a token
/// penalty, which keeps every segmentation reachable.
fn sample_analysis(
    chars: &[char],
    counts: &Counts,
    spell: &CharDistribution,
    temp: f64,
    rng: &mut ChaCha8Rng,
) -> Analysis {
    let n = chars.len();
    let k = counts.k;
    let emission_support = counts.global.len() + 1;
    let fallback_penalty = ((counts.token_total() + 1) as f64).log2();

    // substrings[i][d]: chars[i .. i+d+1]; emit[i][d][q]: its emission
    // bits from state q. Novel substrings price identically everywhere.
    let mut substrings: Vec<Vec<String>> = Vec::with_capacity(n);
    let mut emit: Vec<Vec<Vec<f64>>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row_s = Vec::with_capacity(n - i);
        let mut row_e = Vec::with_capacity(n - i);
        for j in i + 1..=n {
            let s: String = chars[i..j].iter().collect();
            let bits = if counts.global.contains_key(&s) {
                (0..k)
                    .map(|q| {
                        let c = counts.emissions[q].get(&s).copied().unwrap_or(0);
                        smoothed_bits(c, counts.em_cost[q].total(), emission_support)
                    })
                    .collect()
            } else {
                vec![spell.spell_bits(&s) + fallback_penalty; k]
            };
            row_s.push(s);
            row_e.push(bits);
        }
        substrings.push(row_s);
        emit.push(row_e);
    }
    // trans_bits[p][q] for p in 0..k real origins plus p = k (initial).
    let trans_bits: Vec<Vec<f64>> = (0..=k)
        .map(|p| {
            (0..k)
                .map(|q| smoothed_bits(counts.trans[p][q], counts.trans_real[p].total(), k))
                .collect()
        })
        .collect();

    // logw[i][p]: log2 partition over completions from position i with
    // the previous morph emitted by p. The start node (0, initial) is
    // expanded directly in the forward pass.
    let mut logw = vec![vec![0.0f64; k]; n + 1];
    let mut weights: Vec<f64> = Vec::new();
    for i in (1..n).rev() {
        for p in 0..k {
            weights.clear();
            for j in i + 1..=n {
                let bits = &emit[i][j - i - 1];
                for q in 0..k {
                    weights.push(-(trans_bits[p][q] + bits[q]) / temp + logw[j][q]);
                }
            }
            let m = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let sum: f64 = weights.iter().map(|&x| (x - m).exp2()).sum();
            logw[i][p] = m + sum.log2();
        }
    }

    let mut morphs = Vec::new();
    let mut states = Vec::new();
    let mut pos = 0;
    let mut prev = k;
    while pos < n {
        weights.clear();
        for j in pos + 1..=n {
            let bits = &emit[pos][j - pos - 1];
            for q in 0..k {
                weights.push(-(trans_bits[prev][q] + bits[q]) / temp + logw[j][q]);
            }
        }
        let m = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let total: f64 = weights.iter().map(|&x| (x - m).exp2()).sum();
        let mut draw = rng.random::<f64>() * total;
        let mut picked = weights.len() - 1;
        for (idx, &w) in weights.iter().enumerate() {
            draw -= (w - m).exp2();
            if draw <= 0.0 {
                picked = idx;
                break;
            }
        }
        let j = pos + 1 + picked / k;
        let q = picked % k;
        morphs.push(substrings[pos][j - pos - 1].clone());
        states.push(q);
        pos = j;
        prev = q;
    }
    Analysis { morphs, states }
}

/// Train a `k`-state network on `words` by simulated annealing under
/// `schedule`. Starting from seeded random split points with uniform
/// random state tags, each step removes one uniformly chosen word from
/// the counts, redraws its analysis from the Boltzmann lattice at the
/// current temperature, and accepts by Metropolis on the exact
/// description-length change; at and below `t_min` only strict
/// improvements are kept. The best analyses ever seen are restored at
/// the end, so the result never regresses behind the search. Returns
/// the network (carrying step/acceptance counts and the per-level
/// best-cost trajectory) and the winning analyses.
pub fn train_statemorph(
    words: &WordList,
    k: usize,
    schedule: &AnnealSchedule,
) -> Result<(StateNetwork, BTreeMap<String, Segmentation>)> {
    if words.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if k == 0 {
        return Err(Error::InvalidParam("need at least one state".into()));
    }
    schedule.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(schedule.seed);

    let types: Vec<(String, u64)> =
        words.iter().map(|(w, c)| (w.to_string(), c)).collect();
    let mut analyses: BTreeMap<String, Analysis> = BTreeMap::new();
    for (word, _) in &types {
        let chars: Vec<char> = word.chars().collect();
        let mut morphs = Vec::new();
        let mut states = Vec::new();
        let mut start = 0;
        for i in 1..chars.len() {
            if rng.random_bool(0.5) {
                morphs.push(chars[start..i].iter().collect::<String>());
                states.push(rng.random_range(0..k));
                start = i;
            }
        }
        morphs.push(chars[start..].iter().collect::<String>());
        states.push(rng.random_range(0..k));
        analyses.insert(word.clone(), Analysis { morphs, states });
    }

    let mut counts = Counts::rebuild(k, &analyses, words);
    let mut current = counts.total();
    let mut best = current;
    let mut best_analyses = analyses.clone();
    let mut stats = TrainStats::default();
    stats.push_cost(best);

    let mut temp = schedule.t_initial;
    loop {
        let mut level_acceptances = 0u64;
        for _ in 0..schedule.proposals_per_temp {
            stats.steps += 1;
            let (word, weight) = {
                let (w, c) = &types[rng.random_range(0..types.len())];
                (w.clone(), *c)
            };
            let old = analyses.get(&word).expect("analysis exists").clone();
            counts.remove_word(&old, weight);
            let spell = counts.prior.distribution();
            let chars: Vec<char> = word.chars().collect();
            let sample_temp = temp.max(schedule.t_min);
            let proposal = sample_analysis(&chars, &counts, &spell, sample_temp, &mut rng);
            if proposal == old {
                counts.add_word(&old, weight);
                continue;
            }
            counts.add_word(&proposal, weight);
            let candidate = counts.total();
            let delta = candidate - current;
            let greedy = temp <= schedule.t_min;
            let accept = if greedy {
                delta < -STEP_TOLERANCE
            } else {
                delta <= 0.0 || rng.random::<f64>() < (-delta / temp).exp2()
            };
            if accept {
                analyses.insert(word.clone(), proposal);
                current = candidate;
                stats.acceptances += 1;
                level_acceptances += 1;
                if current < best - STEP_TOLERANCE {
                    best = current;
                    best_analyses = analyses.clone();
                }
            } else {
                counts.remove_word(&proposal, weight);
                counts.add_word(&old, weight);
            }
        }

        counts = Counts::rebuild(k, &analyses, words);
        current = counts.total();
        if current < best - STEP_TOLERANCE {
            best = current;
            best_analyses = analyses.clone();
        }
        stats.push_cost(best);
        if temp < schedule.t_min && level_acceptances == 0 {
            break;
        }
        temp *= schedule.alpha;
    }

    let final_counts = Counts::rebuild(k, &best_analyses, words);
    let emissions: Vec<BTreeMap<String, u64>> = final_counts
        .emissions
        .iter()
        .map(|t| t.iter().map(|(m, &c)| (m.clone(), c)).collect())
        .collect();
    let net = StateNetwork::from_counts(k, final_counts.trans, emissions)?.with_stats(stats);
    let mut tagged = BTreeMap::new();
    for (word, analysis) in best_analyses {
        let seg = Segmentation::with_states(analysis.morphs, analysis.states)?;
        tagged.insert(word, seg);
    }
    Ok((net, tagged))
}
