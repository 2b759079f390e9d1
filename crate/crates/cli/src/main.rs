#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod cli;
mod commands;
mod config;
mod exit;
mod output;
mod system;

use std::io::Write;
use std::process::ExitCode;

use anyhow::{Context as _, Result};
use clap::Parser;
use serde::Serialize;
use serde_json::Value;

use cli::{CellCommand, Cli, Command, Format, GlobalArgs};
use commands::Context;
use config::{merge, ConfigFile};
use output::{emit, Outcome};

fn section<T: Serialize + serde::de::DeserializeOwned>(
    file: &ConfigFile,
    verb: &str,
    flags: &T,
) -> Result<Value> {
    let merged: T = merge(&file.section(verb), flags)?;
    Ok(serde_json::to_value(merged)?)
}

fn cell_arguments(file: &ConfigFile, cell: &CellCommand) -> Result<Value> {
    let verb = cell.name();
    match cell {
        CellCommand::Family(a) => section(file, verb, a),
        CellCommand::Simulate(a) => section(file, verb, a),
        CellCommand::Integrals(a) => section(file, verb, a),
        CellCommand::Apsidal(a) => section(file, verb, a),
        CellCommand::Spectrum(a) => section(file, verb, a),
    }
}

fn execute(cli: Cli) -> Result<(Outcome, GlobalArgs)> {
    let file = match &cli.global.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let global: GlobalArgs = merge(&file.globals(), &cli.global)?;
    if let Some(threads) = global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let ctx = Context {
        seed: global.seed.unwrap_or(commands::DEFAULT_SEED),
    };
    let outcome = match &cli.command {
        Command::Family(a) => commands::run("family", section(&file, "family", a)?, &ctx)?,
        Command::Simulate(a) => commands::run("simulate", section(&file, "simulate", a)?, &ctx)?,
        Command::Integrals(a) => commands::run("integrals", section(&file, "integrals", a)?, &ctx)?,
        Command::Apsidal(a) => commands::run("apsidal", section(&file, "apsidal", a)?, &ctx)?,
        Command::Spectrum(a) => commands::run("spectrum", section(&file, "spectrum", a)?, &ctx)?,
        Command::Sweep(s) => {
            let base = cell_arguments(&file, &s.cell)?;
            commands::sweep(s.cell.name(), &base, &s.grid, &ctx)?
        }
    };
    Ok((outcome, global))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let verb = cli.command.name();
    let result = execute(cli).and_then(|(outcome, global)| {
        let text = emit(
            verb,
            &outcome,
            global.format.unwrap_or(Format::Json),
            global.out.as_deref(),
        )?;
        match std::io::stdout().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(outcome.code),
        }
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit::code_of(&err))
        }
    }
}
