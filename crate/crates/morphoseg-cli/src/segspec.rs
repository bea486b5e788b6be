//! Segmenter specification strings.
//!
//! Commands that consume a segmenter name one with a compact spec:
//!
//! loading forms (valid everywhere a segmenter is accepted):
//! - `chars` — character baseline, trained on the corpus word list
//! - `bpe:PATH` — merge table file
//! - `morfessor:PATH` — model file
//! - `statemorph:PATH[@prune=N]` — network file, optionally pruned to N
//!
//! training forms (valid only inside `compare --with`, where the shared
//! training word list and the root seed are available):
//! - `bpe@size=N` — train merges to vocabulary size N
//! - `bpe@match=NAME` — train merges to the final lexicon size of the
//!   earlier entry NAME
//! - `morfessor@train[,epsilon=E][,restarts=R]`
//! - `statemorph@train[,k=K][,prune=N]`

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use morphoseg::{
    default_epsilon, prune_statemorph, train_morfessor_restarts, train_statemorph,
    AnnealSchedule, BpeSegmenter, CharSegmenter, Error, MergeTable, MorfessorModel, Result,
    Segmenter, StateNetwork, WordList, DEFAULT_RESTARTS,
};

#[derive(Debug, Clone, PartialEq)]
pub enum SegSpec {
    Chars,
    BpeFile(PathBuf),
    MorfessorFile(PathBuf),
    StatemorphFile { path: PathBuf, prune: Option<usize> },
    BpeSize(usize),
    BpeMatch(String),
    MorfessorTrain { epsilon: Option<f64>, restarts: Option<usize> },
    StatemorphTrain { k: usize, prune: Option<usize> },
}

fn bad_spec(spec: &str, why: &str) -> Error {
    Error::InvalidParam(format!("segmenter spec {spec:?}: {why}"))
}

fn parse_field<T: std::str::FromStr>(spec: &str, key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| bad_spec(spec, &format!("cannot parse {key}={value}")))
}

impl SegSpec {
    pub fn parse(spec: &str) -> Result<Self> {
        if spec == "chars" {
            return Ok(Self::Chars);
        }
        if let Some(rest) = spec.strip_prefix("bpe@") {
            return match rest.split_once('=') {
                Some(("size", n)) => Ok(Self::BpeSize(parse_field(spec, "size", n)?)),
                Some(("match", name)) if !name.is_empty() => {
                    Ok(Self::BpeMatch(name.to_string()))
                }
                _ => Err(bad_spec(spec, "expected bpe@size=N or bpe@match=NAME")),
            };
        }
        if let Some(rest) = spec.strip_prefix("morfessor@") {
            let mut fields = rest.split(',');
            if fields.next() != Some("train") {
                return Err(bad_spec(spec, "expected morfessor@train[,epsilon=E][,restarts=R]"));
            }
            let mut epsilon = None;
            let mut restarts = None;
            for field in fields {
                match field.split_once('=') {
                    Some(("epsilon", v)) => epsilon = Some(parse_field(spec, "epsilon", v)?),
                    Some(("restarts", v)) => restarts = Some(parse_field(spec, "restarts", v)?),
                    _ => return Err(bad_spec(spec, &format!("unknown field {field:?}"))),
                }
            }
            return Ok(Self::MorfessorTrain { epsilon, restarts });
        }
        if let Some(rest) = spec.strip_prefix("statemorph@") {
            let mut fields = rest.split(',');
            if fields.next() != Some("train") {
                return Err(bad_spec(spec, "expected statemorph@train[,k=K][,prune=N]"));
            }
            let mut k = 2;
            let mut prune = None;
            for field in fields {
                match field.split_once('=') {
                    Some(("k", v)) => k = parse_field(spec, "k", v)?,
                    Some(("prune", v)) => prune = Some(parse_field(spec, "prune", v)?),
                    _ => return Err(bad_spec(spec, &format!("unknown field {field:?}"))),
                }
            }
            return Ok(Self::StatemorphTrain { k, prune });
        }
        if let Some(path) = spec.strip_prefix("bpe:") {
            return Ok(Self::BpeFile(PathBuf::from(path)));
        }
        if let Some(path) = spec.strip_prefix("morfessor:") {
            return Ok(Self::MorfessorFile(PathBuf::from(path)));
        }
        if let Some(rest) = spec.strip_prefix("statemorph:") {
            let (path, prune) = match rest.rsplit_once('@') {
                Some((path, modifier)) => match modifier.split_once('=') {
                    Some(("prune", n)) => (path, Some(parse_field(spec, "prune", n)?)),
                    _ => return Err(bad_spec(spec, &format!("unknown modifier {modifier:?}"))),
                },
                None => (rest, None),
            };
            return Ok(Self::StatemorphFile { path: PathBuf::from(path), prune });
        }
        Err(bad_spec(
            spec,
            "expected chars, bpe:PATH, morfessor:PATH, statemorph:PATH[@prune=N], \
             bpe@size=N, bpe@match=NAME, morfessor@train[...], or statemorph@train[...]",
        ))
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(format!("reading {}", path.display()), e))
}

fn source_name(path: &Path) -> String {
    path.display().to_string()
}

/// Realize a loading-form spec against the evaluation corpus's word list.
/// Training forms are rejected: they only make sense under `compare`,
/// which owns the training data and the root seed.
pub fn load_segmenter(spec: &SegSpec, words: &WordList) -> Result<Box<dyn Segmenter>> {
    match spec {
        SegSpec::Chars => Ok(Box::new(CharSegmenter::train(words)?)),
        SegSpec::BpeFile(path) => {
            let table = MergeTable::read(open(path)?, &source_name(path))?;
            let mut bpe = BpeSegmenter::from_table(table)?;
            bpe.recount(words)?;
            Ok(Box::new(bpe))
        }
        SegSpec::MorfessorFile(path) => {
            Ok(Box::new(MorfessorModel::read(open(path)?, &source_name(path))?))
        }
        SegSpec::StatemorphFile { path, prune } => {
            let net = StateNetwork::read(open(path)?, &source_name(path))?;
            Ok(Box::new(match prune {
                Some(target) => prune_statemorph(&net, *target),
                None => net,
            }))
        }
        SegSpec::BpeSize(_)
        | SegSpec::BpeMatch(_)
        | SegSpec::MorfessorTrain { .. }
        | SegSpec::StatemorphTrain { .. } => Err(Error::InvalidParam(
            "training segmenter specs are only valid in `compare --with`".into(),
        )),
    }
}

/// Realize any spec for `compare`: loading forms defer to
/// [`load_segmenter`]; training forms train on `words`, drawing their
/// randomness from `sub_seed` and resolving `match=` references against
/// the entries already built.
pub fn build_segmenter(
    spec: &SegSpec,
    words: &WordList,
    built: &[(String, Box<dyn Segmenter>)],
    sub_seed: u64,
) -> Result<Box<dyn Segmenter>> {
    match spec {
        SegSpec::BpeSize(target) => Ok(Box::new(BpeSegmenter::train(words, *target)?)),
        SegSpec::BpeMatch(name) => {
            let target = built
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, seg)| seg.lexicon().size())
                .ok_or_else(|| {
                    Error::InvalidParam(format!(
                        "bpe@match={name} does not name an earlier --with entry"
                    ))
                })?;
            Ok(Box::new(BpeSegmenter::train(words, target)?))
        }
        SegSpec::MorfessorTrain { epsilon, restarts } => {
            let epsilon = epsilon.unwrap_or_else(|| default_epsilon(words));
            let restarts = restarts.unwrap_or(DEFAULT_RESTARTS);
            Ok(Box::new(train_morfessor_restarts(words, epsilon, sub_seed, restarts)?))
        }
        SegSpec::StatemorphTrain { k, prune } => {
            let schedule = AnnealSchedule::defaults(words, sub_seed);
            let (net, _) = train_statemorph(words, *k, &schedule)?;
            Ok(Box::new(match prune {
                Some(target) => prune_statemorph(&net, *target),
                None => net,
            }))
        }
        _ => load_segmenter(spec, words),
    }
}
