#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod config;
mod error;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, OutputArgs};
use config::ConfigFile;
use error::CliError;
use table::Format;

fn output_args(cmd: &Command) -> &OutputArgs {
    match cmd {
        Command::Spectrum(a) => &a.out,
        Command::Oracle(a) => &a.out,
        Command::Invert(a) => &a.out,
        Command::Fit(a) => &a.out,
        Command::Entropy(a) => &a.out,
    }
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    let out = output_args(&cli.command);
    let cfg = ConfigFile::load(out.config.as_deref())?;
    let format = match out.format {
        Some(f) => f,
        None => match cfg.get("format") {
            None => Format::Csv,
            Some(s) => Format::parse(s).ok_or_else(|| CliError::usage(format!("format must be csv or json, got '{s}'")))?,
        },
    };
    let path = out.output.clone().or_else(|| cfg.get("output").map(PathBuf::from));

    let outcome = match &cli.command {
        Command::Spectrum(a) => commands::spectrum(a, &cfg),
        Command::Oracle(a) => commands::oracle(a, &cfg),
        Command::Invert(a) => commands::invert(a, &cfg),
        Command::Fit(a) => commands::fit(a, &cfg),
        Command::Entropy(a) => commands::entropy(a, &cfg),
    }?;

    let mut sink: Box<dyn Write> = match &path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::usage(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    outcome.table.write(format, &mut sink)?;
    sink.flush()?;
    if let Some(note) = outcome.note {
        eprintln!("{note}");
    }
    Ok(outcome.code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
