//! MDL segmenter trained by recursive splitting over word types: the
//! objective is a two-part code length — spelling out the lexicon (prior
//! cost) plus encoding the segmented corpus as morph tokens (corpus
//! cost) — minimized greedily one word at a time.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coding::{
    code_length_multinomial, lexicon_string_cost, CharDistribution, CodeLengthReport,
    LexiconPrior, MultinomialCost,
};
use crate::corpus::WordList;
use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::segmentation::{Segmentation, Segmenter};
use crate::stats::TrainStats;

const MODEL_FILE_HEADER: &str = "#morphoseg-morfessor v1";
const LEXICON_SECTION: &str = "#lexicon";
const ANALYSES_SECTION: &str = "#analyses";

/// Rollback tolerance: a committed word step may not worsen the total
/// cost by more than accumulated float noise.
const STEP_TOLERANCE: f64 = 1e-9;

/// A trained model: the morph lexicon, one analysis per training word,
/// and the itemized cost that training minimized.
#[derive(Debug, Clone)]
pub struct MorfessorModel {
    lexicon: Lexicon,
    analyses: BTreeMap<String, Vec<String>>,
    /// Training word counts; absent when the model was loaded from a
    /// file, which does not store them.
    word_counts: Option<WordList>,
    chars: CharDistribution,
    cost: CodeLengthReport,
    stats: TrainStats,
}

/// Cost report over a lexicon alone: the prior is the spelling cost of
/// its entries, the corpus part the multinomial code length of its
/// counts.
fn cost_report(lexicon: &Lexicon) -> Result<CodeLengthReport> {
    let chars = CharDistribution::from_lexicon(lexicon);
    let prior = lexicon_string_cost(lexicon, &chars)?;
    let counts: Vec<u64> = lexicon.iter().map(|(_, c)| c).collect();
    let corpus = if counts.is_empty() { 0.0 } else { code_length_multinomial(&counts)? };
    Ok(CodeLengthReport::new(vec![
        ("prior_bits".to_string(), prior),
        ("corpus_bits".to_string(), corpus),
    ]))
}

impl MorfessorModel {
    /// Build a model from explicit analyses, deriving the lexicon by
    /// recounting morph occurrences weighted by the word counts.
    pub fn from_analyses(
        analyses: BTreeMap<String, Vec<String>>,
        words: &WordList,
    ) -> Result<Self> {
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for (word, morphs) in &analyses {
            let weight = words.get(word).ok_or_else(|| {
                Error::InconsistentModel(format!("analysis for {word:?} has no word count"))
            })?;
            if morphs.concat() != *word {
                return Err(Error::InconsistentModel(format!(
                    "analysis of {word:?} does not concatenate to it"
                )));
            }
            for m in morphs {
                *counts.entry(m.clone()).or_insert(0) += weight;
            }
        }
        let lexicon = Lexicon::from_counts(counts)?;
        let cost = cost_report(&lexicon)?;
        let chars = CharDistribution::from_lexicon(&lexicon);
        Ok(Self {
            lexicon,
            analyses,
            word_counts: Some(words.clone()),
            chars,
            cost,
            stats: TrainStats::default(),
        })
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn analyses(&self) -> &BTreeMap<String, Vec<String>> {
        &self.analyses
    }

    /// The itemized cost at the end of training (or as loaded).
    pub fn cost(&self) -> &CodeLengthReport {
        &self.cost
    }

    pub fn stats(&self) -> &TrainStats {
        &self.stats
    }

    /// Write the model: header, lexicon section, analyses section.
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{MODEL_FILE_HEADER}").map_err(|e| Error::io("writing model", e))?;
        writeln!(w, "{LEXICON_SECTION}").map_err(|e| Error::io("writing model", e))?;
        self.lexicon.write_tsv(&mut w)?;
        writeln!(w, "{ANALYSES_SECTION}").map_err(|e| Error::io("writing model", e))?;
        for (word, morphs) in &self.analyses {
            writeln!(w, "{word}\t{}", morphs.join(" ")).map_err(|e| Error::io("writing model", e))?;
        }
        Ok(())
    }

    /// Read the model file format. Word counts are not stored in the
    /// file, so the loaded model can check morph membership but not
    /// re-derive exact counts.
    pub fn read<R: BufRead>(r: R, source_name: &str) -> Result<Self> {
        let mut lines = Vec::new();
        for line in r.lines() {
            lines.push(line.map_err(|e| Error::io("reading model", e))?);
        }
        if lines.first().map(String::as_str) != Some(MODEL_FILE_HEADER) {
            return Err(Error::parse(source_name, 1, "bad or missing header"));
        }
        if lines.get(1).map(String::as_str) != Some(LEXICON_SECTION) {
            return Err(Error::parse(source_name, 2, "expected lexicon section"));
        }
        let analyses_at = lines
            .iter()
            .position(|l| l == ANALYSES_SECTION)
            .ok_or_else(|| Error::parse(source_name, lines.len(), "missing analyses section"))?;

        let lexicon_text = lines[2..analyses_at].join("\n");
        let lexicon = Lexicon::read_tsv(lexicon_text.as_bytes(), source_name)?;

        let mut analyses: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (offset, line) in lines[analyses_at + 1..].iter().enumerate() {
            let lineno = analyses_at + 2 + offset;
            if line.is_empty() {
                continue;
            }
            let (word, morphs) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(source_name, lineno, "expected word<TAB>morphs"))?;
            let morphs: Vec<String> =
                morphs.split(' ').filter(|m| !m.is_empty()).map(String::from).collect();
            if morphs.concat() != word {
                return Err(Error::parse(
                    source_name,
                    lineno,
                    &format!("morphs do not concatenate to {word:?}"),
                ));
            }
            for m in &morphs {
                if !lexicon.contains(m) {
                    return Err(Error::parse(
                        source_name,
                        lineno,
                        &format!("morph {m:?} is not in the lexicon"),
                    ));
                }
            }
            if analyses.insert(word.to_string(), morphs).is_some() {
                return Err(Error::parse(source_name, lineno, &format!("duplicate word {word:?}")));
            }
        }
        let cost = cost_report(&lexicon)?;
        let chars = CharDistribution::from_lexicon(&lexicon);
        Ok(Self { lexicon, analyses, word_counts: None, chars, cost, stats: TrainStats::default() })
    }
}

/// Recompute the model's cost, verifying consistency first: with word
/// counts available, lexicon counts must equal a weighted recount of the
/// analyses; otherwise lexicon and analyses must agree on membership in
/// both directions.
pub fn total_cost(model: &MorfessorModel) -> Result<CodeLengthReport> {
    match &model.word_counts {
        Some(words) => {
            let mut recount: BTreeMap<&str, u64> = BTreeMap::new();
            for (word, morphs) in &model.analyses {
                let weight = words.get(word).ok_or_else(|| {
                    Error::InconsistentModel(format!("analysis for {word:?} has no word count"))
                })?;
                for m in morphs {
                    *recount.entry(m.as_str()).or_insert(0) += weight;
                }
            }
            if recount.len() != model.lexicon.size() {
                return Err(Error::InconsistentModel(format!(
                    "lexicon has {} morphs, analyses use {}",
                    model.lexicon.size(),
                    recount.len()
                )));
            }
            for (m, &c) in &recount {
                if model.lexicon.get(m) != Some(c) {
                    return Err(Error::InconsistentModel(format!(
                        "count mismatch for morph {m:?}"
                    )));
                }
            }
        }
        None => {
            let mut used: BTreeMap<&str, ()> = BTreeMap::new();
            for morphs in model.analyses.values() {
                for m in morphs {
                    if !model.lexicon.contains(m) {
                        return Err(Error::InconsistentModel(format!(
                            "analysis morph {m:?} is not in the lexicon"
                        )));
                    }
                    used.insert(m, ());
                }
            }
            if !model.analyses.is_empty() {
                for (m, _) in model.lexicon.iter() {
                    if !used.contains_key(m) {
                        return Err(Error::InconsistentModel(format!(
                            "lexicon morph {m:?} is unused by the analyses"
                        )));
                    }
                }
            }
        }
    }
    cost_report(&model.lexicon)
}

/// The default epoch-convergence threshold: 0.1 bits per word type.
pub fn default_epsilon(words: &WordList) -> f64 {
    0.1 * words.total_types() as f64
}

/// Incremental view of the two-part cost during training: morph token
/// counts with a multinomial tracker, plus the lexicon spelling prior.
struct CostState {
    counts: HashMap<String, u64>,
    corpus: MultinomialCost,
    prior: LexiconPrior,
}

impl CostState {
    fn new() -> Self {
        Self { counts: HashMap::new(), corpus: MultinomialCost::new(), prior: LexiconPrior::new() }
    }

    fn add(&mut self, morph: &str, weight: u64) {
        let old = self.counts.get(morph).copied().unwrap_or(0);
        if old == 0 {
            self.prior.add_entry(morph);
        }
        self.corpus.update(old, old + weight);
        self.counts.insert(morph.to_string(), old + weight);
    }

    fn remove(&mut self, morph: &str, weight: u64) {
        let old = self.counts.get(morph).copied().expect("removing untracked morph");
        let new = old.checked_sub(weight).expect("morph count underflow");
        self.corpus.update(old, new);
        if new == 0 {
            self.prior.remove_entry(morph);
            self.counts.remove(morph);
        } else {
            self.counts.insert(morph.to_string(), new);
        }
    }

    fn total(&self) -> f64 {
        self.prior.bits() + self.corpus.bits()
    }

    /// Cost of tentatively adding `morphs`, leaving the state unchanged.
    fn probe(&mut self, morphs: &[&str], weight: u64) -> f64 {
        for m in morphs {
            self.add(m, weight);
        }
        let cost = self.total();
        for m in morphs {
            self.remove(m, weight);
        }
        cost
    }
}

/// Recursively analyze `chars`, committing the chosen morphs into
/// `state`: keep the span whole unless some binary split is strictly
/// cheaper, then re-analyze each half (left first) and keep descending.
fn resplit(chars: &[char], weight: u64, state: &mut CostState, out: &mut Vec<String>) {
    let whole: String = chars.iter().collect();
    let mut best: Option<(usize, f64)> = None;
    if chars.len() > 1 {
        let cost_whole = state.probe(&[&whole], weight);
        for i in 1..chars.len() {
            let left: String = chars[..i].iter().collect();
            let right: String = chars[i..].iter().collect();
            let cost = state.probe(&[&left, &right], weight);
            if cost < cost_whole && best.map_or(true, |(_, b)| cost < b) {
                best = Some((i, cost));
            }
        }
    }
    match best {
        None => {
            state.add(&whole, weight);
            out.push(whole);
        }
        Some((i, _)) => {
            resplit(&chars[..i], weight, state, out);
            resplit(&chars[i..], weight, state, out);
        }
    }
}

/// How one training run seeds its initial analyses.
enum InitStyle {
    /// Split each word where it shares its longest prefix or suffix with
    /// another word — the boundaries that shared structure, if any,
    /// would reward. Deterministic.
    AffixAnchored,
    /// Each word-internal boundary is active with probability one half.
    RandomSplits,
}

/// Number of characters shared at the start of two words.
fn common_prefix(a: &[char], b: &[char]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Number of characters shared at the end of two words.
fn common_suffix(a: &[char], b: &[char]) -> usize {
    a.iter().rev().zip(b.iter().rev()).take_while(|(x, y)| x == y).count()
}

fn initial_analysis(
    word: &str,
    all: &[Vec<char>],
    style: &InitStyle,
    rng: &mut ChaCha8Rng,
) -> Vec<String> {
    let chars: Vec<char> = word.chars().collect();
    let mut boundaries: Vec<usize> = Vec::new();
    match style {
        InitStyle::AffixAnchored => {
            let mut prefix = 0;
            let mut suffix = 0;
            for other in all {
                if other == &chars {
                    continue;
                }
                prefix = prefix.max(common_prefix(&chars, other));
                suffix = suffix.max(common_suffix(&chars, other));
            }
            if prefix > 0 && prefix < chars.len() {
                boundaries.push(prefix);
            }
            let cut = chars.len().saturating_sub(suffix);
            if suffix > 0 && cut > 0 && !boundaries.contains(&cut) {
                boundaries.push(cut);
            }
            boundaries.sort_unstable();
        }
        InitStyle::RandomSplits => {
            for i in 1..chars.len() {
                if rng.random_bool(0.5) {
                    boundaries.push(i);
                }
            }
        }
    }
    let mut morphs = Vec::with_capacity(boundaries.len() + 1);
    let mut start = 0;
    for &b in &boundaries {
        morphs.push(chars[start..b].iter().collect());
        start = b;
    }
    morphs.push(chars[start..].iter().collect());
    morphs
}

/// One complete greedy run from a fresh initialization. Epochs visit the
/// word types in shuffled order, re-analyzing each from scratch —
/// keeping a span whole is always among the options, so spurious initial
/// splits coalesce — with counts updated transactionally; a step that
/// would worsen the total cost is rolled back, so the recorded cost is
/// monotone non-increasing per epoch. The run stops when an epoch
/// improves the total by less than `epsilon` bits. Returns the analyses,
/// the final exact cost, and this run's step accounting.
fn train_single(
    words: &WordList,
    epsilon: f64,
    mut rng: ChaCha8Rng,
    style: InitStyle,
) -> (BTreeMap<String, Vec<String>>, f64, TrainStats) {
    let all_chars: Vec<Vec<char>> = words.iter().map(|(w, _)| w.chars().collect()).collect();
    let mut state = CostState::new();
    let mut analyses: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (word, count) in words.iter() {
        let morphs = initial_analysis(word, &all_chars, &style, &mut rng);
        for m in &morphs {
            state.add(m, count);
        }
        analyses.insert(word.to_string(), morphs);
    }

    let mut order: Vec<String> = words.iter().map(|(w, _)| w.to_string()).collect();
    let mut stats = TrainStats::default();
    let mut previous = state.total();
    stats.push_cost(previous);

    loop {
        order.shuffle(&mut rng);
        for word in &order {
            stats.steps += 1;
            let weight = words.get(word).expect("word list key");
            let old_analysis = analyses.get(word).expect("analysis exists").clone();
            let old_cost = state.total();
            for m in &old_analysis {
                state.remove(m, weight);
            }
            let chars: Vec<char> = word.chars().collect();
            let mut new_analysis = Vec::new();
            resplit(&chars, weight, &mut state, &mut new_analysis);
            if state.total() > old_cost + STEP_TOLERANCE {
                // The greedy descent chose a worse overall analysis than
                // the incumbent; restore it.
                for m in &new_analysis {
                    state.remove(m, weight);
                }
                for m in &old_analysis {
                    state.add(m, weight);
                }
            } else if new_analysis != old_analysis {
                stats.acceptances += 1;
                analyses.insert(word.clone(), new_analysis);
            }
        }

        // Rebuild the trackers exactly so float drift cannot accumulate
        // across epochs.
        state = CostState::new();
        for (word, morphs) in &analyses {
            let weight = words.get(word).expect("word list key");
            for m in morphs {
                state.add(m, weight);
            }
        }
        let current = state.total();
        stats.push_cost(current);
        if previous - current < epsilon {
            return (analyses, current, stats);
        }
        previous = current;
    }
}

/// Default number of training runs for [`train_morfessor`].
pub const DEFAULT_RESTARTS: usize = 8;

/// Train with explicit restart control: the first run starts from
/// affix-anchored splits, the rest from seeded random splits, and the
/// run with the lowest final cost wins (ties go to the earliest run).
/// Restarts matter because greedy descent over this objective stalls
/// easily: a split only pays for itself once several words share the new
/// morph, so every single-word move away from unsegmented words can be
/// uphill even when a much cheaper joint segmentation exists. Diverse
/// initializations are the escape mechanism. Reported steps and
/// acceptances sum over all runs; the trajectory is the winning run's.
pub fn train_morfessor_restarts(
    words: &WordList,
    epsilon: f64,
    seed: u64,
    restarts: usize,
) -> Result<MorfessorModel> {
    if words.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidParam(format!("epsilon must be nonnegative, got {epsilon}")));
    }
    if restarts == 0 {
        return Err(Error::InvalidParam("need at least one training run".into()));
    }
    let epsilon = epsilon.max(1e-9);

    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(BTreeMap<String, Vec<String>>, f64, TrainStats)> = None;
    let mut steps = 0;
    let mut acceptances = 0;
    for run in 0..restarts {
        let style = if run == 0 { InitStyle::AffixAnchored } else { InitStyle::RandomSplits };
        let sub = ChaCha8Rng::seed_from_u64(master.random::<u64>());
        let (analyses, cost, stats) = train_single(words, epsilon, sub, style);
        steps += stats.steps;
        acceptances += stats.acceptances;
        if best.as_ref().map_or(true, |(_, b, _)| cost < *b - STEP_TOLERANCE) {
            best = Some((analyses, cost, stats));
        }
    }
    let (analyses, _, mut stats) = best.expect("at least one run");
    stats.steps = steps;
    stats.acceptances = acceptances;

    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for (word, morphs) in &analyses {
        let weight = words.get(word).expect("word list key");
        for m in morphs {
            *counts.entry(m.clone()).or_insert(0) += weight;
        }
    }
    let lexicon = Lexicon::from_counts(counts)?;
    let cost = cost_report(&lexicon)?;
    let chars = CharDistribution::from_lexicon(&lexicon);
    Ok(MorfessorModel { lexicon, analyses, word_counts: Some(words.clone()), chars, cost, stats })
}

/// Train on `words` with the default restart budget; see
/// [`train_morfessor_restarts`] for the search procedure.
pub fn train_morfessor(words: &WordList, epsilon: f64, seed: u64) -> Result<MorfessorModel> {
    train_morfessor_restarts(words, epsilon, seed, DEFAULT_RESTARTS)
}

/// Segment a word with a trained model: a training word reproduces its
/// training analysis; anything else gets the minimum-corpus-cost
/// segmentation over the trained lexicon by dynamic programming, where
/// an in-lexicon morph of count `c` costs `-log2(c / N)` bits (`N` =
/// total morph tokens) and any single character may serve as a fallback
/// morph costing its spelling bits plus a `log2(N + 1)` penalty. Ties
/// prefer the shorter trailing morph, so the result is deterministic.
pub fn segment_morfessor(word: &str, model: &MorfessorModel) -> Result<Segmentation> {
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    if let Some(morphs) = model.analyses.get(word) {
        return Segmentation::new(morphs.clone());
    }

    let chars: Vec<char> = word.chars().collect();
    let n = chars.len();
    let total = model.lexicon.total_count();
    let fallback_penalty = ((total + 1) as f64).log2();

    let mut dist = vec![f64::INFINITY; n + 1];
    let mut back: Vec<usize> = vec![0; n + 1];
    dist[0] = 0.0;
    for j in 1..=n {
        // Scanning starts from the shortest candidate morph so that cost
        // ties resolve toward it.
        for i in (0..j).rev() {
            let piece: String = chars[i..j].iter().collect();
            let arc = match model.lexicon.get(&piece) {
                Some(c) => (total as f64 / c as f64).log2(),
                None if j - i == 1 => model.chars.spell_bits(&piece) + fallback_penalty,
                None => continue,
            };
            if dist[i] + arc < dist[j] {
                dist[j] = dist[i] + arc;
                back[j] = i;
            }
        }
    }

    let mut bounds = vec![n];
    let mut j = n;
    while j > 0 {
        j = back[j];
        bounds.push(j);
    }
    bounds.reverse();
    let morphs: Vec<String> =
        bounds.windows(2).map(|w| chars[w[0]..w[1]].iter().collect()).collect();
    Segmentation::new(morphs)
}

impl Segmenter for MorfessorModel {
    fn segment(&self, word: &str) -> Result<Segmentation> {
        segment_morfessor(word, self)
    }

    fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    fn train_stats(&self) -> Option<&TrainStats> {
        Some(&self.stats)
    }
}
