//! `eiscoh`: command-line front end. Exit codes: 0 all checks pass, 1 a
//! verification failed, 2 usage or configuration error.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use config::{Flags, Format, RunConfig, CONFIG_ENV};
use serde_json::json;
use std::process::ExitCode;

pub const CLI_SCHEMA: &str = "eiscoh.cli/1";

#[derive(Debug, Parser)]
#[command(
    name = "eiscoh",
    version,
    about = "Rationality checks for Eisenstein cohomology of GL(n) over CM fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Coset representatives and length statistics of S_n.
    Weyl {
        /// Emit the coset representatives w_1, …, w_n.
        #[arg(long)]
        list_coset_reps: bool,
        #[command(flatten)]
        flags: Flags,
    },
    /// Kostant representatives: unique match and Galois equivariance.
    Kostant {
        #[command(flatten)]
        flags: Flags,
    },
    /// Constant-term coefficients as formal L-ratios.
    ConstantTerm {
        #[command(flatten)]
        flags: Flags,
    },
    /// Archimedean intertwining integral: quadrature against closed form.
    Intertwine {
        #[command(flatten)]
        flags: Flags,
    },
    /// Discriminant relation and Galois sign identity for a tower.
    Field {
        #[command(flatten)]
        flags: Flags,
    },
    /// End-to-end equivariance and constant-term diagram checks.
    Diagram {
        #[command(flatten)]
        flags: Flags,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Weyl { .. } => "weyl",
            Command::Kostant { .. } => "kostant",
            Command::ConstantTerm { .. } => "constant-term",
            Command::Intertwine { .. } => "intertwine",
            Command::Field { .. } => "field",
            Command::Diagram { .. } => "diagram",
        }
    }

    fn flag_config(self) -> Result<RunConfig, String> {
        match self {
            Command::Weyl { list_coset_reps, flags } => {
                let mut c = flags.into_config()?;
                c.list_coset_reps = list_coset_reps.then_some(true);
                Ok(c)
            }
            Command::Kostant { flags }
            | Command::ConstantTerm { flags }
            | Command::Intertwine { flags }
            | Command::Field { flags }
            | Command::Diagram { flags } => flags.into_config(),
        }
    }
}

fn resolve(command: Command) -> Result<(&'static str, RunConfig), String> {
    let name = command.name();
    let flags = command.flag_config()?;
    let base = match std::env::var_os(CONFIG_ENV) {
        Some(path) => {
            let text =
                std::fs::read_to_string(&path).map_err(|e| format!("cannot read {}: {e}", path.to_string_lossy()))?;
            config::parse_file(&text, name)?
        }
        None => RunConfig::default(),
    };
    Ok((name, base.overlay(flags)))
}

fn dispatch(name: &str, cfg: &RunConfig) -> Result<commands::Outcome, String> {
    match name {
        "weyl" => commands::weyl(cfg),
        "kostant" => commands::kostant(cfg),
        "constant-term" => commands::constant_term(cfg),
        "intertwine" => commands::intertwine(cfg),
        "field" => commands::field(cfg),
        "diagram" => commands::diagram(cfg),
        _ => Err(format!("unknown subcommand '{name}'")),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (name, cfg) = match resolve(cli.command) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(t) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let out = match dispatch(name, &cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let v = if out.passed { "PASS" } else { "FAIL" };
    match cfg.format() {
        Format::Json => {
            let doc = json!({
                "schema": CLI_SCHEMA,
                "command": name,
                "config": cfg,
                "result": out.result,
                "verdict": v,
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("serialisable report"));
        }
        Format::Text => {
            for l in &out.lines {
                println!("{l}");
            }
            println!("verdict: {v}");
        }
    }
    ExitCode::from(if out.passed { 0 } else { 1 })
}
