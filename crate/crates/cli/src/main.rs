mod config;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;
use wyner_core::bitalloc::recommended_split;
use wyner_core::experiments::{self, ExperimentSpec, FigureId};

use config::{Cli, Command, ConfigError, Format, RunArgs};

#[derive(Serialize)]
struct Metadata<'a> {
    tool: &'static str,
    version: &'static str,
    figure: &'static str,
    seed: u64,
    trials: usize,
    format: Format,
    spec: &'a ExperimentSpec,
}

enum Failure {
    Config(String),
    Io(String),
    Run(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Failure::Io(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(format!("cannot write to standard output: {e}"))),
    }
}

fn run_figure(figure: FigureId, args: &RunArgs) -> Result<(), Failure> {
    let spec = config::build_spec(figure, args)?;
    let exec = config::execution(std::env::var("SIM_THREADS").ok().as_deref())?;
    let table = experiments::run_with(&spec, exec).map_err(|e| match e {
        wyner_core::Error::InvalidSpec { .. } => Failure::Config(e.to_string()),
        other => Failure::Run(other.to_string()),
    })?;
    let text = match args.format {
        Format::Csv => experiments::to_csv(&table),
        Format::Json => experiments::to_json(
            &table,
            &Metadata {
                tool: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                figure: figure.name(),
                seed: spec.master_seed,
                trials: spec.trials,
                format: args.format,
                spec: &spec,
            },
        ),
    };
    write_output(args.out.as_deref(), &text)
}

fn run(cli: Cli) -> Result<(), Failure> {
    if cli.list {
        let mut listing = String::new();
        for f in FigureId::ALL {
            listing.push_str(&format!("{:<7} {}\n", f.name(), f.description()));
        }
        listing.push_str(
            "custom  strategy comparison on any configuration (--topology, --k, --nt, ...)\n",
        );
        listing.push_str("split   bound-minimizing (B_d, B_i) for one user\n");
        return write_output(None, &listing);
    }
    let Some(command) = cli.command else {
        return Err(Failure::Config("no subcommand given; try --list".into()));
    };
    match &command {
        Command::Split(args) => {
            let q = config::build_split(args)?;
            let split = recommended_split(q.b_tot, q.nt, q.rho_i, q.clamp)
                .map_err(|e| Failure::Config(format!("invalid value for 'btot': {e}")))?;
            write_output(None, &format!("{split}\n"))
        }
        Command::Fig3(a)
        | Command::Fig4(a)
        | Command::Fig5(a)
        | Command::Fig6(a)
        | Command::Fig7(a)
        | Command::Fig8(a)
        | Command::Fig9(a)
        | Command::Custom(a) => {
            run_figure(config::figure_of(&command).expect("figure subcommand"), a)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg) | Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
