//! Sub-word segmentation toolkit built around description-length (MDL)
//! objectives: a BPE trainer, a recursive-splitting MDL segmenter, and a
//! finite-state MDL segmenter trained by simulated annealing, plus the
//! surrounding pipeline — word-list extraction, lexicon pruning and
//! size matching, cased vocabulary assembly with word-initial markers,
//! id-level encode/decode, and n-gram perplexity evaluation.
//!
//! Everything is deterministic given its seeds: trainers draw all
//! randomness from a single seeded stream, and every tie-break is fixed
//! (count descending, then codepoint ascending), so identical inputs
//! reproduce identical artifacts byte for byte.

pub mod coding;
pub mod corpus;
pub mod error;
pub mod lexicon;
pub mod lmeval;
pub mod morfessor;
pub mod segmentation;
pub mod statemorph;
pub mod stats;
pub mod bpe;
mod tsv;
pub mod vocab;

pub use bpe::{apply_bpe, train_bpe, BpeSegmenter, MergeTable};
pub use coding::{code_length_multinomial, lexicon_string_cost, CharDistribution, CodeLengthReport};
pub use corpus::{extract_word_list, split_corpus, SentenceStream, WordList};
pub use error::{Error, Result};
pub use lexicon::{match_vocab_size, prune_lexicon, Lexicon};
pub use lmeval::{
    boundary_score, compare_segmenters, perplexity, rows_to_json, rows_to_tsv, train_ngram,
    BoundaryScore, ComparisonRow, NgramLm, PerplexityReport, DEFAULT_DELTA, DEFAULT_ORDER,
};
pub use morfessor::{
    default_epsilon, segment_morfessor, train_morfessor, train_morfessor_restarts,
    MorfessorModel, DEFAULT_RESTARTS,
};
pub use segmentation::{
    mark_word_initial, restore_case, strip_marker, CharSegmenter, Segmentation, Segmenter,
    DEFAULT_MARKER,
};
pub use statemorph::{
    prune_statemorph, sm_total_cost, train_statemorph, viterbi_segment, AnnealSchedule, SmCost,
    StateNetwork,
};
pub use stats::TrainStats;
pub use vocab::{assemble_vocabulary, decode, encode, Vocabulary, PAD_TOKEN, UNK_TOKEN};
