//! `morphoseg` — the pipeline driver binary.
//!
//! Exit codes: 0 success, 1 usage error (bad flags, bad config, bad
//! parameters), 2 data error (unreadable or malformed inputs), 3 internal
//! invariant violation (a model file disagrees with itself).

mod cli;
mod commands;
mod config;
mod segspec;

use clap::Parser;

use cli::{Cli, Command};
use config::Config;
use morphoseg::{Error, Result};

fn run(cli: &Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    match &cli.command {
        Command::Extract(args) => commands::extract(args, &cfg),
        Command::TrainBpe(args) => commands::train_bpe_cmd(args, &cfg),
        Command::TrainMorfessor(args) => commands::train_morfessor_cmd(args, &cfg),
        Command::TrainStatemorph(args) => commands::train_statemorph_cmd(args, &cfg),
        Command::Prune(args) => commands::prune(args, &cfg),
        Command::BuildVocab(args) => commands::build_vocab(args, &cfg),
        Command::Encode(args) => commands::encode_cmd(args, &cfg),
        Command::Decode(args) => commands::decode_cmd(args, &cfg),
        Command::EvalPpl(args) => commands::eval_ppl(args, &cfg),
        Command::EvalBoundaries(args) => commands::eval_boundaries(args, &cfg),
        Command::Compare(args) => commands::compare(args, &cfg),
    }
}

/// Map an error to the documented exit codes: parameter problems are
/// usage (1), inconsistent models are internal (3), everything else is a
/// data error (2).
fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidParam(_) | Error::InvalidRatios(..) | Error::TargetTooSmall { .. } => 1,
        Error::InconsistentModel(_) | Error::InconsistentNetwork(_) => 3,
        _ => 2,
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // --help/--version land here too; only real parse failures
            // should exit nonzero, and as usage (1), not clap's 2.
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = run(&cli) {
        eprintln!("error: {err}");
        std::process::exit(exit_code(&err));
    }
}
