//! Deterministic fixtures for the acceptance tests: random word lists,
//! the nine-word stem-and-suffix grammar, and a generated sentence
//! corpus with compositional morphology, mixed casing, and punctuation.

use std::collections::BTreeMap;

use morphoseg::WordList;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Draw a random word list: up to `max_types` distinct words of at most
/// `max_len` characters over `alphabet`, counts in 1..=9. Colliding
/// draws collapse, so the result may hold fewer types than asked for.
pub fn random_word_list(
    rng: &mut ChaCha8Rng,
    alphabet: &[char],
    max_types: usize,
    max_len: usize,
) -> Vec<(String, u64)> {
    let n_types = rng.random_range(1..=max_types);
    let mut entries: BTreeMap<String, u64> = BTreeMap::new();
    for _ in 0..n_types {
        let len = rng.random_range(1..=max_len);
        let word: String =
            (0..len).map(|_| alphabet[rng.random_range(0..alphabet.len())]).collect();
        let count = rng.random_range(1..=9u64);
        entries.entry(word).or_insert(count);
    }
    entries.into_iter().collect()
}

/// Wrap plain entries as a [`WordList`].
pub fn word_list(entries: &[(String, u64)]) -> WordList {
    WordList::from_counts(entries.iter().cloned().collect()).expect("valid word list")
}

/// Three stems crossed with two overt suffixes and the bare form — the
/// nine-word grammar the search-quality and decoding tests run on.
pub fn grammar_words() -> Vec<(String, u64)> {
    let mut out = Vec::new();
    for stem in ["talo", "auto", "kala"] {
        for suffix in ["", "ssa", "lla"] {
            out.push((format!("{stem}{suffix}"), 1));
        }
    }
    out
}

/// Generate a sentence corpus over a stem-and-suffix vocabulary with
/// title-cased sentence starts, occasional all-caps words, commas, and
/// varied sentence-final punctuation. Deterministic in `seed`.
pub fn synthetic_sentences(n_sentences: usize, seed: u64) -> String {
    const STEMS: [&str; 12] = [
        "talo", "auto", "kala", "vero", "kirja", "posti", "ranta", "metsa", "kaupun", "juna",
        "tieto", "meri",
    ];
    const SUFFIXES: [&str; 5] = ["", "ssa", "lla", "sta", "lle"];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut text = String::new();
    for s in 0..n_sentences {
        let len = rng.random_range(3..=8usize);
        let mut words = Vec::with_capacity(len);
        for i in 0..len {
            let stem = STEMS[rng.random_range(0..STEMS.len())];
            let suffix = SUFFIXES[rng.random_range(0..SUFFIXES.len())];
            let mut word = format!("{stem}{suffix}");
            if i == 0 {
                let mut chars = word.chars();
                let first = chars.next().expect("stems are non-empty").to_uppercase();
                word = format!("{first}{}", chars.as_str());
            } else if (s + i) % 23 == 0 {
                word = word.to_uppercase();
            }
            if i + 1 < len && (s + i) % 11 == 7 {
                word.push(',');
            }
            words.push(word);
        }
        text.push_str(&words.join(" "));
        text.push_str([".", "!", "?"][rng.random_range(0..3usize)]);
        text.push('\n');
    }
    text
}
