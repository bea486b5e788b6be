//! One function per subcommand: resolve effective parameters (explicit
//! flags beat `--config` values beat defaults), print the provenance
//! block, run the pipeline stage, write artifacts, and print a one-line
//! summary.

use std::fs;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write as _};
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use morphoseg::segmentation::{read_segmentations, write_segmentations};
use morphoseg::vocab::{read_ids, write_ids};
use morphoseg::{
    assemble_vocabulary, boundary_score, compare_segmenters, decode, default_epsilon, encode,
    extract_word_list, perplexity, prune_statemorph, rows_to_json, rows_to_tsv, sm_total_cost,
    train_bpe, train_morfessor_restarts, train_ngram, train_statemorph, AnnealSchedule, Error,
    Result, Segmenter, SentenceStream, StateNetwork, Vocabulary, WordList, DEFAULT_DELTA,
    DEFAULT_MARKER, DEFAULT_ORDER, DEFAULT_RESTARTS,
};

use crate::cli::*;
use crate::config::{print_summary, require, resolve, Config, Provenance};
use crate::segspec::{build_segmenter, load_segmenter, SegSpec};

const DEFAULT_SEED: u64 = 42;

fn source_name(path: &Path) -> String {
    path.display().to_string()
}

fn open_reader(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(format!("reading {}", path.display()), e))
}

/// Create/truncate `path` and run `write` against a buffered handle, so
/// re-runs overwrite artifacts with byte-identical content.
fn write_artifact(path: &Path, write: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let file = File::create(path)
        .map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
    let mut w = BufWriter::new(file);
    write(&mut w)?;
    w.flush()
        .map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

fn read_corpus(path: &Path, strip_punct: bool) -> Result<SentenceStream> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    let stream = SentenceStream::from_text(&text, source_name(path), strip_punct);
    if stream.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok(stream)
}

fn read_words(path: &Path) -> Result<WordList> {
    WordList::read_tsv(open_reader(path)?, &source_name(path))
}

fn read_vocab(path: &Path, marker: char) -> Result<Vocabulary> {
    Vocabulary::read(open_reader(path)?, &source_name(path), marker)
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("reports serialize cleanly");
    write_artifact(path, |w| {
        writeln!(w, "{text}").map_err(|e| Error::io(format!("writing {}", path.display()), e))
    })
}

pub fn extract(args: &ExtractArgs, cfg: &Config) -> Result<()> {
    cfg.check_keys(&["input", "output", "strip-punct"])?;
    let input = require(resolve(args.input.clone(), cfg, "input")?, "input")?;
    let output = require(resolve(args.output.clone(), cfg, "output")?, "output")?;
    let strip_punct = resolve(args.strip_punct, cfg, "strip-punct")?.unwrap_or(true);

    Provenance::new("extract")
        .param("input", input.display())
        .param("output", output.display())
        .param("strip-punct", strip_punct)
        .print();

    let stream = read_corpus(&input, strip_punct)?;
    let words = extract_word_list(&stream)?;
    write_artifact(&output, |w| words.write_tsv(w))?;
    print_summary(format_args!(
        "{} word types, {} tokens -> {}",
        words.total_types(),
        words.total_tokens(),
        output.display()
    ));
    Ok(())
}

pub fn train_bpe_cmd(args: &TrainBpeArgs, cfg: &Config) -> Result<()> {
    cfg.check_keys(&["input", "output", "vocab-size"])?;
    let input = require(resolve(args.input.clone(), cfg, "input")?, "input")?;
    let output = require(resolve(args.output.clone(), cfg, "output")?, "output")?;
    let vocab_size = require(resolve(args.vocab_size, cfg, "vocab-size")?, "vocab-size")?;

    Provenance::new("train-bpe")
        .param("input", input.display())
        .param("output", output.display())
        .param("vocab-size", vocab_size)
        .print();

    let words = read_words(&input)?;
    let (table, _) = train_bpe(&words, vocab_size)?;
    write_artifact(&output, |w| table.write(w))?;
    print_summary(format_args!(
        "{} merges; vocabulary size {}",
        table.merges().len(),
        table.token_strings().len()
    ));
    Ok(())
}

pub fn train_morfessor_cmd(args: &TrainMorfessorArgs, cfg: &Config) -> Result<()> {
    cfg.check_keys(&["input", "output", "epsilon", "seed", "restarts"])?;
    let input = require(resolve(args.input.clone(), cfg, "input")?, "input")?;
    let output = require(resolve(args.output.clone(), cfg, "output")?, "output")?;
    let seed = resolve(args.seed, cfg, "seed")?.unwrap_or(DEFAULT_SEED);
    let restarts = resolve(args.restarts, cfg, "restarts")?.unwrap_or(DEFAULT_RESTARTS);

    let words = read_words(&input)?;
    let epsilon = resolve(args.epsilon, cfg, "epsilon")?.unwrap_or_else(|| default_epsilon(&words));

    Provenance::new("train-morfessor")
        .param("input", input.display())
        .param("output", output.display())
        .param("epsilon", epsilon)
        .param("seed", seed)
        .param("restarts", restarts)
        .print();

    let model = train_morfessor_restarts(&words, epsilon, seed, restarts)?;
    write_artifact(&output, |w| model.write(w))?;
    print_summary(format_args!(
        "total cost {:.3} bits; {} lexicon morphs",
        model.cost().total_bits(),
        model.lexicon().size()
    ));
    Ok(())
}

pub fn train_statemorph_cmd(args: &TrainStatemorphArgs, cfg: &Config) -> Result<()> {
    cfg.check_keys(&[
        "input", "output", "analyses", "states", "t-initial", "alpha", "t-min",
        "proposals-per-temp", "seed",
    ])?;
    let input = require(resolve(args.input.clone(), cfg, "input")?, "input")?;
    let output = require(resolve(args.output.clone(), cfg, "output")?, "output")?;
    let analyses_path = resolve(args.analyses.clone(), cfg, "analyses")?;
    let states = resolve(args.states, cfg, "states")?.unwrap_or(2);
    let seed = resolve(args.seed, cfg, "seed")?.unwrap_or(DEFAULT_SEED);

    let words = read_words(&input)?;
    let mut schedule = AnnealSchedule::defaults(&words, seed);
    if let Some(v) = resolve(args.t_initial, cfg, "t-initial")? {
        schedule.t_initial = v;
    }
    if let Some(v) = resolve(args.alpha, cfg, "alpha")? {
        schedule.alpha = v;
    }
    if let Some(v) = resolve(args.t_min, cfg, "t-min")? {
        schedule.t_min = v;
    }
    if let Some(v) = resolve(args.proposals_per_temp, cfg, "proposals-per-temp")? {
        schedule.proposals_per_temp = v;
    }

    let mut prov = Provenance::new("train-statemorph");
    prov.param("input", input.display()).param("output", output.display());
    if let Some(path) = &analyses_path {
        prov.param("analyses", path.display());
    }
    prov.param("states", states)
        .param("t-initial", schedule.t_initial)
        .param("alpha", schedule.alpha)
        .param("t-min", schedule.t_min)
        .param("proposals-per-temp", schedule.proposals_per_temp)
        .param("seed", seed)
        .print();

    let (net, analyses) = train_statemorph(&words, states, &schedule)?;
    write_artifact(&output, |w| net.write(w))?;
    if let Some(path) = &analyses_path {
        write_artifact(path, |w| write_segmentations(w, analyses.values()))?;
    }
    let cost = sm_total_cost(&net, &analyses, &words)?;
    print_summary(format_args!(
        "total cost {:.3} bits; {} lexicon morphs; {} states",
        cost.total_bits,
        net.lexicon().size(),
        net.num_states()
    ));
    Ok(())
}

pub fn prune(args: &PruneArgs, cfg: &Config) -> Result<()> {
    cfg.check_keys(&["input", "output", "target-size"])?;
    let input = require(resolve(args.input.clone(), cfg, "input")?, "input")?;
    let output = require(resolve(args.output.clone(), cfg, "output")?, "output")?;
    let target_size = require(resolve(args.target_size, cfg, "target-size")?, "target-size")?;

    Provenance::new("prune")
        .param("input", input.display())
        .param("output", output.display())
        .param("target-size", target_size)
        .print();

    let net = StateNetwork::read(open_reader(&input)?, &source_name(&input))?;
    let before = net.lexicon().size();
    let pruned = prune_statemorph(&net, target_size);
    write_artifact(&output, |w| pruned.write(w))?;
    print_summary(format_args!(
        "lexicon {before} -> {} morphs",
        pruned.lexicon().size()
    ));
    Ok(())
}

pub fn build_vocab(args: &BuildVocabArgs, cfg: &Config) -> Result<()> {
    cfg.check_keys(&["corpus", "segmenter", "output", "marker", "strip-punct"])?;
    let corpus = require(resolve(args.corpus.clone(), cfg, "corpus")?, "corpus")?;
    let segmenter = require(resolve(args.segmenter.clone(), cfg, "segmenter")?, "segmenter")?;
    let output = require(resolve(args.output.clone(), cfg, "output")?, "output")?;
    let marker = resolve(args.marker, cfg, "marker")?.unwrap_or(DEFAULT_MARKER);
    let strip_punct = resolve(args.strip_punct, cfg, "strip-punct")?.unwrap_or(true);

    Provenance::new("build-vocab")
        .param("corpus", corpus.display())
        .param("segmenter", &segmenter)
        .param("output", output.display())
        .param("marker", marker)
        .param("strip-punct", strip_punct)
        .print();

    let stream = read_corpus(&corpus, strip_punct)?;
    let words = extract_word_list(&stream)?;
    let seg = load_segmenter(&SegSpec::parse(&segmenter)?, &words)?;
    let vocab = assemble_vocabulary(&stream, seg.as_ref(), marker)?;
    write_artifact(&output, |w| vocab.write(w))?;
    print_summary(format_args!("vocabulary size {}", vocab.len()));
    Ok(())
}

pub fn encode_cmd(args: &EncodeArgs, cfg: &Config) -> Result<()> {
    cfg.check_keys(&["corpus", "vocab", "segmenter", "output", "marker", "strip-punct"])?;
    let corpus = require(resolve(args.corpus.clone(), cfg, "corpus")?, "corpus")?;
    let vocab_path = require(resolve(args.vocab.clone(), cfg, "vocab")?, "vocab")?;
    let segmenter = require(resolve(args.segmenter.clone(), cfg, "segmenter")?, "segmenter")?;
    let output = require(resolve(args.output.clone(), cfg, "output")?, "output")?;
    let marker = resolve(args.marker, cfg, "marker")?.unwrap_or(DEFAULT_MARKER);
    let strip_punct = resolve(args.strip_punct, cfg, "strip-punct")?.unwrap_or(true);

    Provenance::new("encode")
        .param("corpus", corpus.display())
        .param("vocab", vocab_path.display())
        .param("segmenter", &segmenter)
        .param("output", output.display())
        .param("marker", marker)
        .param("strip-punct", strip_punct)
        .print();

    let stream = read_corpus(&corpus, strip_punct)?;
    let words = extract_word_list(&stream)?;
    let vocab = read_vocab(&vocab_path, marker)?;
    let seg = load_segmenter(&SegSpec::parse(&segmenter)?, &words)?;
    let ids = encode(&stream, &vocab, seg.as_ref())?;
    write_artifact(&output, |w| write_ids(w, &ids))?;
    let tokens: usize = ids.iter().map(Vec::len).sum();
    print_summary(format_args!("{} sentences; {tokens} tokens", ids.len()));
    Ok(())
}

pub fn decode_cmd(args: &DecodeArgs, cfg: &Config) -> Result<()> {
    cfg.check_keys(&["input", "vocab", "output", "marker"])?;
    let input = require(resolve(args.input.clone(), cfg, "input")?, "input")?;
    let vocab_path = require(resolve(args.vocab.clone(), cfg, "vocab")?, "vocab")?;
    let output = require(resolve(args.output.clone(), cfg, "output")?, "output")?;
    let marker = resolve(args.marker, cfg, "marker")?.unwrap_or(DEFAULT_MARKER);

    Provenance::new("decode")
        .param("input", input.display())
        .param("vocab", vocab_path.display())
        .param("output", output.display())
        .param("marker", marker)
        .print();

    let ids = read_ids(open_reader(&input)?, &source_name(&input))?;
    let vocab = read_vocab(&vocab_path, marker)?;
    let stream = decode(&ids, &vocab)?;
    write_artifact(&output, |w| stream.write_text(w))?;
    print_summary(format_args!("{} sentences", stream.len()));
    Ok(())
}

pub fn eval_ppl(args: &EvalPplArgs, cfg: &Config) -> Result<()> {
    cfg.check_keys(&[
        "train", "valid", "segmenter", "order", "delta", "marker", "strip-punct", "output",
    ])?;
    let train = require(resolve(args.train.clone(), cfg, "train")?, "train")?;
    let valid = require(resolve(args.valid.clone(), cfg, "valid")?, "valid")?;
    let segmenter = require(resolve(args.segmenter.clone(), cfg, "segmenter")?, "segmenter")?;
    let order = resolve(args.order, cfg, "order")?.unwrap_or(DEFAULT_ORDER);
    let delta = resolve(args.delta, cfg, "delta")?.unwrap_or(DEFAULT_DELTA);
    let marker = resolve(args.marker, cfg, "marker")?.unwrap_or(DEFAULT_MARKER);
    let strip_punct = resolve(args.strip_punct, cfg, "strip-punct")?.unwrap_or(true);
    let output = resolve(args.output.clone(), cfg, "output")?;

    let mut prov = Provenance::new("eval-ppl");
    prov.param("train", train.display())
        .param("valid", valid.display())
        .param("segmenter", &segmenter)
        .param("order", order)
        .param("delta", delta)
        .param("marker", marker)
        .param("strip-punct", strip_punct);
    if let Some(path) = &output {
        prov.param("output", path.display());
    }
    prov.print();

    let train_stream = read_corpus(&train, strip_punct)?;
    let valid_stream = read_corpus(&valid, strip_punct)?;
    let words = extract_word_list(&train_stream)?;
    let seg = load_segmenter(&SegSpec::parse(&segmenter)?, &words)?;
    let vocab = assemble_vocabulary(&train_stream, seg.as_ref(), marker)?;
    let train_ids = encode(&train_stream, &vocab, seg.as_ref())?;
    let valid_ids = encode(&valid_stream, &vocab, seg.as_ref())?;
    let lm = train_ngram(&train_ids, &vocab, order, delta)?;
    let words_per_sentence: Vec<usize> =
        valid_stream.sentences().iter().map(Vec::len).collect();
    let report = perplexity(&lm, &valid_ids, &words_per_sentence)?;
    if let Some(path) = &output {
        write_json(path, &report)?;
    }
    print_summary(format_args!(
        "per-word ppl {:.6}; per-token ppl {:.6}; oov rate {:.6}",
        report.per_word_ppl, report.per_token_ppl, report.oov_rate
    ));
    Ok(())
}

pub fn eval_boundaries(args: &EvalBoundariesArgs, cfg: &Config) -> Result<()> {
    cfg.check_keys(&["predicted", "reference", "output"])?;
    let predicted = require(resolve(args.predicted.clone(), cfg, "predicted")?, "predicted")?;
    let reference = require(resolve(args.reference.clone(), cfg, "reference")?, "reference")?;
    let output = resolve(args.output.clone(), cfg, "output")?;

    let mut prov = Provenance::new("eval-boundaries");
    prov.param("predicted", predicted.display()).param("reference", reference.display());
    if let Some(path) = &output {
        prov.param("output", path.display());
    }
    prov.print();

    let pred = read_segmentations(open_reader(&predicted)?, &source_name(&predicted))?;
    let gold = read_segmentations(open_reader(&reference)?, &source_name(&reference))?;
    let score = boundary_score(&pred, &gold)?;
    if let Some(path) = &output {
        write_json(path, &score)?;
    }
    print_summary(format_args!(
        "precision {:.6}; recall {:.6}; f1 {:.6}",
        score.precision, score.recall, score.f1
    ));
    Ok(())
}

pub fn compare(args: &CompareArgs, cfg: &Config) -> Result<()> {
    cfg.check_keys(&[
        "train", "valid", "with", "order", "delta", "seed", "marker", "strip-punct",
        "output", "json",
    ])?;
    let train = require(resolve(args.train.clone(), cfg, "train")?, "train")?;
    let valid = require(resolve(args.valid.clone(), cfg, "valid")?, "valid")?;
    let output = require(resolve(args.output.clone(), cfg, "output")?, "output")?;
    let json = resolve(args.json.clone(), cfg, "json")?;
    let order = resolve(args.order, cfg, "order")?.unwrap_or(DEFAULT_ORDER);
    let delta = resolve(args.delta, cfg, "delta")?.unwrap_or(DEFAULT_DELTA);
    let seed = resolve(args.seed, cfg, "seed")?.unwrap_or(DEFAULT_SEED);
    let marker = resolve(args.marker, cfg, "marker")?.unwrap_or(DEFAULT_MARKER);
    let strip_punct = resolve(args.strip_punct, cfg, "strip-punct")?.unwrap_or(true);

    // Flags replace the config's `with` list wholesale; mixing the two
    // would make entry order (and thus sub-seed assignment) ambiguous.
    let with: Vec<String> = if args.with.is_empty() {
        cfg.get_all("with").into_iter().map(str::to_string).collect()
    } else {
        args.with.clone()
    };
    if with.len() < 2 {
        return Err(Error::InvalidParam(format!(
            "compare needs at least two --with NAME=SPEC entries, got {}",
            with.len()
        )));
    }
    let mut entries: Vec<(String, SegSpec)> = Vec::with_capacity(with.len());
    for item in &with {
        let Some((name, spec)) = item.split_once('=') else {
            return Err(Error::InvalidParam(format!(
                "--with expects NAME=SPEC, got {item:?}"
            )));
        };
        if name.is_empty() {
            return Err(Error::InvalidParam(format!("--with {item:?}: empty name")));
        }
        if entries.iter().any(|(n, _)| n == name) {
            return Err(Error::InvalidParam(format!(
                "--with names must be unique, {name:?} repeats"
            )));
        }
        entries.push((name.to_string(), SegSpec::parse(spec)?));
    }

    let mut prov = Provenance::new("compare");
    prov.param("train", train.display()).param("valid", valid.display());
    for item in &with {
        prov.param("with", item);
    }
    prov.param("order", order)
        .param("delta", delta)
        .param("seed", seed)
        .param("marker", marker)
        .param("strip-punct", strip_punct)
        .param("output", output.display());
    if let Some(path) = &json {
        prov.param("json", path.display());
    }
    prov.print();

    let train_stream = read_corpus(&train, strip_punct)?;
    let valid_stream = read_corpus(&valid, strip_punct)?;
    let words = extract_word_list(&train_stream)?;

    // One root seed per invocation: each entry draws its sub-seed from
    // the master stream in config order, so adding a flag elsewhere
    // never shifts another entry's randomness.
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let mut built: Vec<(String, Box<dyn Segmenter>)> = Vec::with_capacity(entries.len());
    for (name, spec) in &entries {
        let sub_seed: u64 = master.random();
        let seg = build_segmenter(spec, &words, &built, sub_seed)?;
        built.push((name.clone(), seg));
    }
    let refs: Vec<(&str, &dyn Segmenter)> =
        built.iter().map(|(n, s)| (n.as_str(), s.as_ref())).collect();
    let rows = compare_segmenters(&train_stream, &valid_stream, &refs, order, delta, marker)?;

    write_artifact(&output, |w| {
        w.write_all(rows_to_tsv(&rows).as_bytes())
            .map_err(|e| Error::io(format!("writing {}", output.display()), e))
    })?;
    if let Some(path) = &json {
        write_artifact(path, |w| {
            w.write_all(rows_to_json(&rows).as_bytes())
                .map_err(|e| Error::io(format!("writing {}", path.display()), e))
        })?;
    }
    let best = rows
        .iter()
        .min_by(|a, b| a.per_word_ppl.total_cmp(&b.per_word_ppl))
        .expect("at least two rows");
    print_summary(format_args!(
        "best per-word ppl {:.6} ({})",
        best.per_word_ppl, best.segmenter
    ));
    Ok(())
}
