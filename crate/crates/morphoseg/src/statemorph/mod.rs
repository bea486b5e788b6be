//! Finite-state MDL segmenter: morphs are emitted by the states of a
//! small network, so the objective prices the lexicon, the transition
//! structure, the per-state emission inventories, and the encoded corpus.
//! Training is simulated annealing over state-tagged segmentations;
//! decoding is Viterbi over a (position, state) lattice. A trained
//! network can be pruned after the fact by dropping its least frequent
//! morphs, which steers decoding toward more frequent sub-words.

mod cost;
mod train;
mod viterbi;

pub use cost::{sm_total_cost, SmCost};
pub use train::{train_statemorph, AnnealSchedule};
pub use viterbi::viterbi_segment;

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::lexicon::{prune_lexicon, Lexicon};
use crate::segmentation::{Segmentation, Segmenter};
use crate::stats::TrainStats;
use crate::tsv;

/// First line of the network file format.
pub const MODEL_FILE_HEADER: &str = "#morphoseg-statemorph v1";

/// Add-δ used when smoothing transition and emission probabilities for
/// decoding and for annealing proposals.
pub(crate) const SMOOTH_DELTA: f64 = 0.5;

/// Cost changes smaller than this are treated as ties (float noise).
pub(crate) const STEP_TOLERANCE: f64 = 1e-9;

/// A morph-emitting state network: `num_states` real states plus an
/// initial and a final pseudo-state. Transition counts are dense over
/// all `num_states + 2` indices; emissions exist only for real states.
/// The lexicon is the cross-state union of emitted morphs with their
/// total counts.
#[derive(Debug, Clone)]
pub struct StateNetwork {
    num_states: usize,
    transition_counts: Vec<Vec<u64>>,
    emission_counts: Vec<BTreeMap<String, u64>>,
    lexicon: Lexicon,
    stats: Option<TrainStats>,
}

impl StateNetwork {
    /// Build from raw counts, validating shape: a `(K+2)×(K+2)`
    /// transition matrix, one emission table per real state with
    /// positive counts, nothing entering the initial pseudo-state and
    /// nothing leaving the final one.
    pub fn from_counts(
        num_states: usize,
        transition_counts: Vec<Vec<u64>>,
        emission_counts: Vec<BTreeMap<String, u64>>,
    ) -> Result<Self> {
        if num_states == 0 {
            return Err(Error::InvalidParam("need at least one state".into()));
        }
        let k = num_states;
        if transition_counts.len() != k + 2
            || transition_counts.iter().any(|row| row.len() != k + 2)
        {
            return Err(Error::InconsistentNetwork(format!(
                "transition matrix must be {0}x{0} for {k} states",
                k + 2
            )));
        }
        if emission_counts.len() != k {
            return Err(Error::InconsistentNetwork(format!(
                "{} emission tables for {k} states",
                emission_counts.len()
            )));
        }
        if transition_counts.iter().any(|row| row[k] != 0) {
            return Err(Error::InconsistentNetwork(
                "transitions into the initial pseudo-state".into(),
            ));
        }
        if transition_counts[k + 1].iter().any(|&c| c != 0) {
            return Err(Error::InconsistentNetwork(
                "transitions out of the final pseudo-state".into(),
            ));
        }
        let mut totals: BTreeMap<String, u64> = BTreeMap::new();
        for (state, table) in emission_counts.iter().enumerate() {
            for (morph, &count) in table {
                if count == 0 {
                    return Err(Error::InconsistentNetwork(format!(
                        "zero emission count for {morph:?} in state {state}"
                    )));
                }
                *totals.entry(morph.clone()).or_insert(0) += count;
            }
        }
        let lexicon = Lexicon::from_counts(totals)?;
        Ok(Self { num_states, transition_counts, emission_counts, lexicon, stats: None })
    }

    pub(crate) fn with_stats(mut self, stats: TrainStats) -> Self {
        self.stats = Some(stats);
        self
    }

    /// Number of real (morph-emitting) states.
    pub fn num_states(&self) -> usize {
        self.num_states
    }

    /// Index of the initial pseudo-state in the transition matrix.
    pub fn initial_state(&self) -> usize {
        self.num_states
    }

    /// Index of the final pseudo-state in the transition matrix.
    pub fn final_state(&self) -> usize {
        self.num_states + 1
    }

    /// Dense transition counts, `[from][to]`.
    pub fn transition_counts(&self) -> &[Vec<u64>] {
        &self.transition_counts
    }

    /// Per-real-state emission counts.
    pub fn emission_counts(&self) -> &[BTreeMap<String, u64>] {
        &self.emission_counts
    }

    /// Cross-state morph inventory with total counts.
    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    /// Total morph tokens emitted across all states.
    pub(crate) fn token_total(&self) -> u64 {
        self.emission_counts.iter().map(|t| t.values().sum::<u64>()).sum()
    }

    /// Outgoing transition mass from `from` into real states only.
    pub(crate) fn real_out_total(&self, from: usize) -> u64 {
        self.transition_counts[from][..self.num_states].iter().sum()
    }

    /// Serialize: header, state count, the dense transition matrix
    /// row-major, then one `#state i` block of morph counts per state.
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        let io = |e| Error::io("writing state network", e);
        writeln!(w, "{MODEL_FILE_HEADER}").map_err(io)?;
        writeln!(w, "{}", self.num_states).map_err(io)?;
        for row in &self.transition_counts {
            let cells: Vec<String> = row.iter().map(u64::to_string).collect();
            writeln!(w, "{}", cells.join(" ")).map_err(io)?;
        }
        for (state, table) in self.emission_counts.iter().enumerate() {
            writeln!(w, "#state {state}").map_err(io)?;
            tsv::write_counts(&mut w, table)?;
        }
        Ok(())
    }

    /// Parse what [`StateNetwork::write`] produced. Only shape and
    /// syntax are validated — a pruned network (whose emissions no
    /// longer balance its transitions) must survive a round trip.
    pub fn read<R: BufRead>(r: R, source_name: &str) -> Result<Self> {
        let mut lines = Vec::new();
        for line in r.lines() {
            lines.push(line.map_err(|e| Error::io("reading state network", e))?);
        }
        let mut cur = Lines { lines: &lines, at: 0, source_name };

        let (n, header) = cur.next("header")?;
        if header != MODEL_FILE_HEADER {
            return Err(cur.fail(n, format!("expected {MODEL_FILE_HEADER:?}")));
        }
        let (n, k_line) = cur.next("state count")?;
        let k: usize = k_line
            .trim()
            .parse()
            .map_err(|_| cur.fail(n, format!("bad state count {k_line:?}")))?;
        if k == 0 {
            return Err(cur.fail(n, "state count must be positive".into()));
        }
        let mut matrix = Vec::with_capacity(k + 2);
        for _ in 0..k + 2 {
            let (n, row_line) = cur.next("transition matrix row")?;
            let mut row = Vec::with_capacity(k + 2);
            for cell in row_line.split_ascii_whitespace() {
                row.push(
                    cell.parse::<u64>()
                        .map_err(|_| cur.fail(n, format!("bad count {cell:?}")))?,
                );
            }
            if row.len() != k + 2 {
                return Err(cur.fail(n, format!("expected {} cells, found {}", k + 2, row.len())));
            }
            matrix.push(row);
        }
        let mut emissions: Vec<BTreeMap<String, u64>> = Vec::with_capacity(k);
        for state in 0..k {
            let (n, section) = cur.next("state section")?;
            if section != format!("#state {state}") {
                return Err(cur.fail(n, format!("expected \"#state {state}\", found {section:?}")));
            }
            let mut table = BTreeMap::new();
            while cur.peek().is_some_and(|line| !line.starts_with('#')) {
                let (n, row) = cur.next("emission row")?;
                let (morph, count) = row
                    .split_once('\t')
                    .ok_or_else(|| cur.fail(n, "expected morph<TAB>count".into()))?;
                let count: u64 = count
                    .parse()
                    .map_err(|_| cur.fail(n, format!("bad count {count:?}")))?;
                if morph.is_empty() {
                    return Err(cur.fail(n, "empty morph".into()));
                }
                if table.insert(morph.to_string(), count).is_some() {
                    return Err(cur.fail(n, format!("duplicate morph {morph:?}")));
                }
            }
            emissions.push(table);
        }
        if let Some(extra) = cur.peek() {
            return Err(cur.fail(cur.at + 1, format!("unexpected trailing line {extra:?}")));
        }
        Self::from_counts(k, matrix, emissions)
    }
}

/// Line cursor for [`StateNetwork::read`], tracking 1-based positions
/// for error reports.
struct Lines<'a> {
    lines: &'a [String],
    at: usize,
    source_name: &'a str,
}

impl<'a> Lines<'a> {
    fn next(&mut self, expect: &str) -> Result<(usize, &'a str)> {
        match self.lines.get(self.at) {
            Some(line) => {
                self.at += 1;
                Ok((self.at, line))
            }
            None => Err(self.fail(self.at + 1, format!("missing {expect}"))),
        }
    }

    fn peek(&self) -> Option<&'a str> {
        self.lines.get(self.at).map(String::as_str)
    }

    fn fail(&self, line: usize, msg: String) -> Error {
        Error::parse(self.source_name, line, msg)
    }
}

impl Segmenter for StateNetwork {
    fn segment(&self, word: &str) -> Result<Segmentation> {
        viterbi_segment(word, self)
    }

    fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    fn train_stats(&self) -> Option<&TrainStats> {
        self.stats.as_ref()
    }
}

/// Drop the least frequent morphs down to `target_size` (single-char
/// morphs are always kept so every in-alphabet word stays decodable):
/// the lexicon is pruned on cross-state totals, emission entries of
/// dropped morphs disappear, and transition counts are left untouched.
/// The pruned decoder therefore leans on the morphs that survive — the
/// more frequent ones.
pub fn prune_statemorph(net: &StateNetwork, target_size: usize) -> StateNetwork {
    let kept = prune_lexicon(&net.lexicon, target_size);
    let emissions: Vec<BTreeMap<String, u64>> = net
        .emission_counts
        .iter()
        .map(|table| {
            table
                .iter()
                .filter(|(morph, _)| kept.contains(morph))
                .map(|(morph, &count)| (morph.clone(), count))
                .collect()
        })
        .collect();
    let pruned = StateNetwork::from_counts(net.num_states, net.transition_counts.clone(), emissions)
        .expect("pruning preserves network shape");
    // The pruned network is the same training run's artifact, so it keeps
    // the run's statistics.
    match &net.stats {
        Some(stats) => pruned.with_stats(stats.clone()),
        None => pruned,
    }
}
