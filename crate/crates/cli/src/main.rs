mod args;
mod commands;
mod report;

use std::io;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, FromArgMatches};
use serde_json::json;

use args::{Cli, Command};

const EXIT_DOMAIN: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_IO: u8 = 74;

pub enum Failure {
    Usage(clap::Error),
    Core(ringshape_core::Error),
    Io(io::Error),
    Checks(usize),
}

impl From<ringshape_core::Error> for Failure {
    fn from(e: ringshape_core::Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Core(e) if e.is_numeric() => EXIT_NUMERIC,
            Failure::Core(_) => EXIT_DOMAIN,
            Failure::Io(_) => EXIT_IO,
            Failure::Checks(_) => EXIT_NUMERIC,
        }
    }

    fn kind(&self) -> &'static str {
        use ringshape_core::Error::*;
        match self {
            Failure::Usage(_) => "usage",
            Failure::Core(Inadmissible(_)) => "inadmissible",
            Failure::Core(Singular(_)) => "singular",
            Failure::Core(InvalidArgument(_)) => "invalid_argument",
            Failure::Core(OutOfScope(_)) => "out_of_scope",
            Failure::Core(Numeric(_)) => "numeric",
            Failure::Io(_) => "io",
            Failure::Checks(_) => "verification",
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(e) => e.render().to_string().trim_end().to_string(),
            Failure::Core(e) => e.to_string(),
            Failure::Io(e) => e.to_string(),
            Failure::Checks(n) => format!("{n} checks failed"),
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::OscTraj(a) => commands::osc_traj(a),
        Command::CoulTraj(a) => commands::coul_traj(a),
        Command::Equipot(a) => commands::equipot(a),
        Command::Planarity(a) => commands::planarity(a),
        Command::Period(a) => commands::period(a),
        Command::Spectrum(a) => commands::spectrum(a),
        Command::Degeneracy(a) => commands::degeneracy(a),
        Command::Verify(a) => commands::verify(a),
    }
}

fn main() -> ExitCode {
    let parsed = Cli::command()
        .try_get_matches()
        .and_then(|m| Ok((Cli::from_arg_matches(&m)?, m)));
    let result = match parsed {
        Ok((cli, matches)) => {
            if let Some(name) = matches.subcommand_name() {
                commands::set_subcommand(name);
            }
            run(cli)
        }
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => Err(Failure::Usage(e)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        // closed downstream pipe, e.g. piping into `head`
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(f) => {
            let line = json!({
                "error": f.kind(),
                "exit_code": f.code(),
                "message": f.message(),
            });
            eprintln!("{line}");
            ExitCode::from(f.code())
        }
    }
}
