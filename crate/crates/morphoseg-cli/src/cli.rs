//! Command-line surface: one binary, subcommand style, long flags only.
//!
//! Every parameter is optional at the clap layer so a `--config` file can
//! pre-populate it; per-subcommand resolution applies defaults and
//! reports genuinely missing parameters as usage errors.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "morphoseg",
    version,
    about = "Sub-word segmentation pipeline: extract, train, prune, encode, evaluate",
    disable_help_subcommand = true
)]
pub struct Cli {
    /// `key = value` file pre-populating flags; explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Count a lowercased word list out of sentence-per-line text.
    Extract(ExtractArgs),
    /// Train byte-pair merges up to a target vocabulary size.
    TrainBpe(TrainBpeArgs),
    /// Train the recursive-splitting segmenter by greedy cost descent.
    TrainMorfessor(TrainMorfessorArgs),
    /// Train the finite-state segmenter by simulated annealing.
    TrainStatemorph(TrainStatemorphArgs),
    /// Prune a trained state network's lexicon to a target size.
    Prune(PruneArgs),
    /// Assemble a token vocabulary from a corpus and a segmenter.
    BuildVocab(BuildVocabArgs),
    /// Map text to token ids under a vocabulary and segmenter.
    Encode(EncodeArgs),
    /// Map token ids back to text.
    Decode(DecodeArgs),
    /// Train an n-gram model and report held-out perplexity.
    EvalPpl(EvalPplArgs),
    /// Score predicted split positions against a reference.
    EvalBoundaries(EvalBoundariesArgs),
    /// Evaluate several segmenters end to end and tabulate the results.
    Compare(CompareArgs),
}

#[derive(Args, Debug)]
pub struct ExtractArgs {
    /// Sentence-per-line text file to read.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Word-list TSV to write.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Trim leading/trailing punctuation from tokens [default: true].
    #[arg(long, value_name = "BOOL")]
    pub strip_punct: Option<bool>,
}

#[derive(Args, Debug)]
pub struct TrainBpeArgs {
    /// Word-list TSV to train on.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Merge-table file to write.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Target vocabulary size (alphabet plus merge products).
    #[arg(long)]
    pub vocab_size: Option<usize>,
}

#[derive(Args, Debug)]
pub struct TrainMorfessorArgs {
    /// Word-list TSV to train on.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Model file to write.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Convergence threshold in bits per epoch [default: scaled to the
    /// word list].
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Root random seed [default: 42].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Independent restarts; the best final cost wins [default: 8].
    #[arg(long)]
    pub restarts: Option<usize>,
}

#[derive(Args, Debug)]
pub struct TrainStatemorphArgs {
    /// Word-list TSV to train on.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Network file to write.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also write the final per-word analyses to this file.
    #[arg(long)]
    pub analyses: Option<PathBuf>,
    /// Number of emitting states [default: 2].
    #[arg(long)]
    pub states: Option<usize>,
    /// Starting temperature [default: 10].
    #[arg(long)]
    pub t_initial: Option<f64>,
    /// Geometric cooling factor per level [default: 0.99].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Greedy-phase temperature floor [default: 0.01].
    #[arg(long)]
    pub t_min: Option<f64>,
    /// Proposals per temperature level [default: one per word type].
    #[arg(long)]
    pub proposals_per_temp: Option<usize>,
    /// Root random seed [default: 42].
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct PruneArgs {
    /// Network file to read.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Pruned network file to write.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Largest lexicon size to keep (single-character morphs survive
    /// regardless, to preserve coverage).
    #[arg(long)]
    pub target_size: Option<usize>,
}

#[derive(Args, Debug)]
pub struct BuildVocabArgs {
    /// Sentence-per-line text file to segment.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Segmenter spec: chars | bpe:PATH | morfessor:PATH |
    /// statemorph:PATH[@prune=N].
    #[arg(long)]
    pub segmenter: Option<String>,
    /// Vocabulary file to write.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Word-initial marker character [default: U+2581].
    #[arg(long)]
    pub marker: Option<char>,
    /// Trim leading/trailing punctuation from tokens [default: true].
    #[arg(long, value_name = "BOOL")]
    pub strip_punct: Option<bool>,
}

#[derive(Args, Debug)]
pub struct EncodeArgs {
    /// Sentence-per-line text file to encode.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Vocabulary file produced by build-vocab.
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// Segmenter spec (must match the one used for build-vocab).
    #[arg(long)]
    pub segmenter: Option<String>,
    /// Id file to write, one space-separated sentence per line.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Word-initial marker character [default: U+2581].
    #[arg(long)]
    pub marker: Option<char>,
    /// Trim leading/trailing punctuation from tokens [default: true].
    #[arg(long, value_name = "BOOL")]
    pub strip_punct: Option<bool>,
}

#[derive(Args, Debug)]
pub struct DecodeArgs {
    /// Id file to read.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Vocabulary file produced by build-vocab.
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// Text file to write.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Word-initial marker character [default: U+2581].
    #[arg(long)]
    pub marker: Option<char>,
}

#[derive(Args, Debug)]
pub struct EvalPplArgs {
    /// Training text (vocabulary and n-gram counts come from here).
    #[arg(long)]
    pub train: Option<PathBuf>,
    /// Held-out text to score.
    #[arg(long)]
    pub valid: Option<PathBuf>,
    /// Segmenter spec: chars | bpe:PATH | morfessor:PATH |
    /// statemorph:PATH[@prune=N].
    #[arg(long)]
    pub segmenter: Option<String>,
    /// N-gram order [default: 2].
    #[arg(long)]
    pub order: Option<usize>,
    /// Add-delta smoothing constant [default: 0.1].
    #[arg(long)]
    pub delta: Option<f64>,
    /// Word-initial marker character [default: U+2581].
    #[arg(long)]
    pub marker: Option<char>,
    /// Trim leading/trailing punctuation from tokens [default: true].
    #[arg(long, value_name = "BOOL")]
    pub strip_punct: Option<bool>,
    /// Also write the full report as JSON to this file.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvalBoundariesArgs {
    /// Predicted segmentations, one word per line.
    #[arg(long)]
    pub predicted: Option<PathBuf>,
    /// Reference segmentations over the same words.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Also write the score as JSON to this file.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// Training text shared by every entry.
    #[arg(long)]
    pub train: Option<PathBuf>,
    /// Held-out text to score.
    #[arg(long)]
    pub valid: Option<PathBuf>,
    /// A named segmenter entry, NAME=SPEC; repeat for each row. Training
    /// specs (bpe@size=N, bpe@match=NAME, morfessor@train,
    /// statemorph@train[,k=K][,prune=N]) are allowed here.
    #[arg(long = "with", value_name = "NAME=SPEC")]
    pub with: Vec<String>,
    /// N-gram order [default: 2].
    #[arg(long)]
    pub order: Option<usize>,
    /// Add-delta smoothing constant [default: 0.1].
    #[arg(long)]
    pub delta: Option<f64>,
    /// Root random seed; entries draw sub-seeds in order [default: 42].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Word-initial marker character [default: U+2581].
    #[arg(long)]
    pub marker: Option<char>,
    /// Trim leading/trailing punctuation from tokens [default: true].
    #[arg(long, value_name = "BOOL")]
    pub strip_punct: Option<bool>,
    /// Comparison table (TSV) to write.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also write the table as JSON to this file.
    #[arg(long)]
    pub json: Option<PathBuf>,
}
