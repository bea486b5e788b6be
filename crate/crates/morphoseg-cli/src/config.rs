//! Run configuration plumbing: `key = value` config files, flag
//! resolution, and the printed provenance block.
//!
//! Every run prints a provenance block to standard output before its
//! one-line summary. The block is itself a valid config file — comments
//! carry the tool version and summary, and every effective parameter
//! appears as a `key = value` line — so capturing stdout and re-running
//! the same subcommand with `--config <captured>` replays the run and
//! reproduces its artifacts byte for byte.

use std::fmt::Display;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use morphoseg::{Error, Result};

/// `key = value` lines in file order; keys may repeat (`with` does).
#[derive(Debug, Default)]
pub struct Config {
    entries: Vec<(String, String)>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading config {}", path.display()), e))?;
        let mut entries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::InvalidParam(format!(
                    "{}:{}: expected `key = value`, got {:?}",
                    path.display(),
                    idx + 1,
                    line
                )));
            };
            entries.push((key.trim().to_string(), value.trim().to_string()));
        }
        Ok(Self { entries })
    }

    /// Last occurrence wins, mirroring "later flags override earlier".
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// All occurrences of a repeatable key, in file order.
    pub fn get_all(&self, key: &str) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .collect()
    }

    /// Reject config keys the current subcommand does not understand, so
    /// a typo cannot silently fall back to a default.
    pub fn check_keys(&self, known: &[&str]) -> Result<()> {
        for (key, _) in &self.entries {
            if !known.contains(&key.as_str()) {
                return Err(Error::InvalidParam(format!(
                    "unknown config key {key:?} for this subcommand (known: {})",
                    known.join(", ")
                )));
            }
        }
        Ok(())
    }
}

/// The explicit flag if given, else the config value parsed as `T`, else
/// `None` (the caller applies its default).
pub fn resolve<T: FromStr>(flag: Option<T>, cfg: &Config, key: &str) -> Result<Option<T>>
where
    T::Err: Display,
{
    if flag.is_some() {
        return Ok(flag);
    }
    match cfg.get(key) {
        Some(raw) => raw
            .parse()
            .map(Some)
            .map_err(|e| Error::InvalidParam(format!("config key {key} = {raw:?}: {e}"))),
        None => Ok(None),
    }
}

/// Unwrap a parameter that has no default.
pub fn require<T>(value: Option<T>, key: &str) -> Result<T> {
    value.ok_or_else(|| Error::InvalidParam(format!("missing required parameter --{key}")))
}

/// The effective parameters of one run, printed as a replayable block.
#[derive(Debug)]
pub struct Provenance {
    command: &'static str,
    params: Vec<(String, String)>,
}

impl Provenance {
    pub fn new(command: &'static str) -> Self {
        Self { command, params: Vec::new() }
    }

    pub fn param(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn print(&self) {
        println!("# morphoseg {}", env!("CARGO_PKG_VERSION"));
        println!("# command: {}", self.command);
        for (key, value) in &self.params {
            println!("{key} = {value}");
        }
    }
}

/// The one-line result summary every subcommand ends with.
pub fn print_summary(text: impl Display) {
    println!("# summary: {text}");
}
