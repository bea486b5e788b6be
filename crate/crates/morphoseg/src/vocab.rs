//! Final token inventory assembly (case restoration + word-initial
//! marking over a segmented corpus) and the id-level encode/decode pair.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};

use crate::corpus::SentenceStream;
use crate::error::{Error, Result};
use crate::segmentation::{mark_word_initial, restore_case, strip_marker, Segmenter};

/// Reserved token for anything outside the vocabulary; always id 0.
pub const UNK_TOKEN: &str = "<unk>";
/// Reserved padding token; always id 1.
pub const PAD_TOKEN: &str = "<pad>";

/// A bijective token ↔ id inventory with reserved specials at the front
/// and word-initial tokens carrying a marker prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    ids: HashMap<String, u32>,
    marker: char,
}

impl Vocabulary {
    /// Validate a complete token list: specials first (in their reserved
    /// positions), no duplicates, and no token empty after stripping one
    /// marker.
    pub fn from_tokens(tokens: Vec<String>, marker: char) -> Result<Self> {
        if tokens.len() < 2 || tokens[0] != UNK_TOKEN || tokens[1] != PAD_TOKEN {
            return Err(Error::InvalidParam(format!(
                "vocabulary must start with {UNK_TOKEN} then {PAD_TOKEN}"
            )));
        }
        let mut ids = HashMap::with_capacity(tokens.len());
        for (i, token) in tokens.iter().enumerate() {
            if i >= 2 && strip_marker(token, marker).is_empty() {
                return Err(Error::InvalidParam(format!("token {i} is empty after marker stripping")));
            }
            if ids.insert(token.clone(), i as u32).is_some() {
                return Err(Error::InvalidParam(format!("duplicate token {token:?}")));
            }
        }
        Ok(Self { tokens, ids, marker })
    }

    pub fn unk_id(&self) -> u32 {
        0
    }

    pub fn pad_id(&self) -> u32 {
        1
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn marker(&self) -> char {
        self.marker
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.ids.get(token).copied()
    }

    /// Write one token per line; the line number (from zero) is the id.
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        for token in &self.tokens {
            writeln!(w, "{token}").map_err(|e| Error::io("writing vocabulary", e))?;
        }
        Ok(())
    }

    /// Read the one-token-per-line form.
    pub fn read<R: BufRead>(r: R, source_name: &str, marker: char) -> Result<Self> {
        let mut tokens = Vec::new();
        for (idx, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::io("reading vocabulary", e))?;
            if line.is_empty() {
                return Err(Error::parse(source_name, idx + 1, "empty token line"));
            }
            tokens.push(line);
        }
        Self::from_tokens(tokens, marker).map_err(|e| Error::parse(source_name, 0, &e.to_string()))
    }
}

/// Run one surface word through the lowercase-segment → restore-case →
/// mark-word-initial pipeline.
fn word_tokens(word: &str, segmenter: &dyn Segmenter, marker: char) -> Result<Vec<String>> {
    let seg = segmenter.segment(&word.to_lowercase())?;
    let restored = restore_case(&seg, word)?;
    Ok(mark_word_initial(restored.morphs(), marker))
}

/// Collect the exact token vocabulary observed when segmenting `corpus`
/// with `segmenter`: reserved specials first, then tokens by descending
/// corpus frequency, ties by codepoint order.
pub fn assemble_vocabulary(
    corpus: &SentenceStream,
    segmenter: &dyn Segmenter,
    marker: char,
) -> Result<Vocabulary> {
    if segmenter.lexicon().is_empty() {
        return Err(Error::NotTrained);
    }
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut frequencies: BTreeMap<String, u64> = BTreeMap::new();
    let mut cache: HashMap<String, Vec<String>> = HashMap::new();
    for sentence in corpus.sentences() {
        for word in sentence {
            let tokens = match cache.get(word) {
                Some(tokens) => tokens,
                None => {
                    let tokens = word_tokens(word, segmenter, marker)?;
                    cache.entry(word.clone()).or_insert(tokens)
                }
            };
            for token in tokens {
                *frequencies.entry(token.clone()).or_insert(0) += 1;
            }
        }
    }
    let mut tokens = vec![UNK_TOKEN.to_string(), PAD_TOKEN.to_string()];
    tokens.extend(crate::tsv::ranked(&frequencies).into_iter().map(|(t, _)| t.to_string()));
    Vocabulary::from_tokens(tokens, marker)
}

/// Map every sentence to token ids under the same segmentation pipeline
/// used to assemble `vocab`. Tokens outside the vocabulary — including
/// whole words whose case folding defeats restoration — become the
/// unknown id.
pub fn encode(
    text: &SentenceStream,
    vocab: &Vocabulary,
    segmenter: &dyn Segmenter,
) -> Result<Vec<Vec<u32>>> {
    if segmenter.lexicon().is_empty() {
        return Err(Error::NotTrained);
    }
    let mut cache: HashMap<String, Vec<u32>> = HashMap::new();
    let mut encoded = Vec::with_capacity(text.len());
    for sentence in text.sentences() {
        let mut ids = Vec::new();
        for word in sentence {
            let word_ids = match cache.get(word) {
                Some(ids) => ids,
                None => {
                    let ids = match word_tokens(word, segmenter, vocab.marker()) {
                        Ok(tokens) => tokens
                            .iter()
                            .map(|t| vocab.id(t).unwrap_or_else(|| vocab.unk_id()))
                            .collect(),
                        // A word that cannot go through the pipeline at
                        // all is a single unknown.
                        Err(Error::CaseFoldMismatch { .. }) => vec![vocab.unk_id()],
                        Err(e) => return Err(e),
                    };
                    cache.entry(word.clone()).or_insert(ids)
                }
            };
            ids.extend_from_slice(word_ids);
        }
        encoded.push(ids);
    }
    Ok(encoded)
}

/// Reassemble sentences from token ids: the marker starts a new word,
/// padding is skipped, and the unknown id renders as its glyph.
pub fn decode(ids: &[Vec<u32>], vocab: &Vocabulary) -> Result<SentenceStream> {
    let mut sentences = Vec::with_capacity(ids.len());
    for (index, sentence_ids) in ids.iter().enumerate() {
        let mut words: Vec<String> = Vec::new();
        let mut current: Option<String> = None;
        for &id in sentence_ids {
            if id as usize >= vocab.len() {
                return Err(Error::InvalidId { id, size: vocab.len() });
            }
            if id == vocab.pad_id() {
                continue;
            }
            let token = vocab.token(id).expect("id was range-checked");
            let (starts_word, piece) = if id == vocab.unk_id() {
                (current.is_none(), token)
            } else if let Some(stripped) = token.strip_prefix(vocab.marker()) {
                (true, stripped)
            } else {
                (current.is_none(), token)
            };
            if starts_word {
                if let Some(done) = current.take() {
                    words.push(done);
                }
                current = Some(piece.to_string());
            } else {
                current.as_mut().expect("started above").push_str(piece);
            }
        }
        if let Some(done) = current.take() {
            words.push(done);
        }
        words.retain(|w| !w.is_empty());
        if words.is_empty() {
            return Err(Error::EmptySentence { index });
        }
        sentences.push(words);
    }
    Ok(SentenceStream::new(sentences, "decoded"))
}

/// Write id sequences one sentence per line, ids space-separated.
pub fn write_ids<W: Write>(mut w: W, ids: &[Vec<u32>]) -> Result<()> {
    for sentence in ids {
        let line: Vec<String> = sentence.iter().map(u32::to_string).collect();
        writeln!(w, "{}", line.join(" ")).map_err(|e| Error::io("writing ids", e))?;
    }
    Ok(())
}

/// Read the space-separated id format; empty lines are rejected because
/// no sentence may be empty.
pub fn read_ids<R: BufRead>(r: R, source_name: &str) -> Result<Vec<Vec<u32>>> {
    let mut ids = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line = line.map_err(|e| Error::io("reading ids", e))?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            return Err(Error::parse(source_name, lineno, "empty sentence"));
        }
        let mut sentence = Vec::new();
        for field in line.split_whitespace() {
            let id: u32 = field
                .parse()
                .map_err(|_| Error::parse(source_name, lineno, &format!("bad id {field:?}")))?;
            sentence.push(id);
        }
        ids.push(sentence);
    }
    Ok(ids)
}
