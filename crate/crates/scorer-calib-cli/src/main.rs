//! `scorer-calib` command-line interface.
//!
//! Exit codes: 0 on success, 1 on usage errors (bad flags, bad config,
//! unknown subcommands), 2 on data errors (missing or malformed files,
//! failures inside the pipeline).

mod args;
mod commands;
mod config;

use clap::Parser;

use args::{Cli, Command};

/// Errors split by exit code.
pub enum CliError {
    Usage(String),
    Data(anyhow::Error),
}

fn run() -> Result<(), CliError> {
    let cli = Cli::try_parse().map_err(|e| {
        // clap already formats help/version output; print and classify
        let _ = e.print();
        if e.use_stderr() {
            CliError::Usage(String::new())
        } else {
            // --help or --version: success
            std::process::exit(0);
        }
    })?;
    match cli.command {
        Command::Synth(args) => commands::run_synth(args),
        Command::Train(args) => commands::run_train(args),
        Command::Cv(args) => commands::run_cv(args),
        Command::Eval(args) => commands::run_eval(args),
        Command::Cluster(args) => commands::run_cluster(args),
        Command::Correlate(args) => commands::run_correlate(args),
        Command::CaseStudy(args) => commands::run_case_study(args),
        Command::Report(args) => commands::run_report(args),
    }
}

fn main() {
    match run() {
        Ok(()) => {}
        Err(CliError::Usage(msg)) => {
            if !msg.is_empty() {
                eprintln!("error: {msg}");
            }
            std::process::exit(1);
        }
        Err(CliError::Data(err)) => {
            eprintln!("error: {err:#}");
            std::process::exit(2);
        }
    }
}
