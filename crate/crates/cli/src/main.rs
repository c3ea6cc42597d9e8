//! `knowop`: check, evaluate, enumerate and simulate knowledge operators on
//! finite state spaces.
//!
//! Exit status is 0 when everything requested holds, 1 when something
//! fails, and 2 on usage, schema or evaluation errors.

mod commands;
mod load;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use knowop::enumeration::{AxiomSet, Target};
use knowop::operator::Claim;

#[derive(Parser)]
#[command(
    name = "knowop",
    version,
    about = "Finite-model workbench for knowledge operators"
)]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for sampled enumeration.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 10)]
    max_counterexamples: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check axioms, claims and assertions on a model file.
    Check {
        model: PathBuf,
        /// Assertion to check instead of the file's list; repeatable.
        #[arg(short = 'a', long = "assert")]
        assertions: Vec<String>,
        /// Claims to verify on every operator, e.g. thm2,thm3,eq1.
        #[arg(long, value_delimiter = ',')]
        claims: Vec<Claim>,
        /// Event for per-event claims: a declared name or a literal like {a,b}.
        #[arg(long)]
        event: Option<String>,
        /// Axioms every operator must satisfy, e.g. truth,mono.
        #[arg(long, default_value = "none")]
        axioms: AxiomSet,
        /// Evaluate claims whose hypotheses fail.
        #[arg(long)]
        force: bool,
    },
    /// Evaluate an expression (or an assertion) against a model file.
    Eval {
        model: PathBuf,
        #[arg(short = 'e', long = "expr")]
        expr: String,
    },
    /// Check claims or axioms over every operator satisfying the axioms.
    Enumerate {
        #[arg(short = 'n', long)]
        states: usize,
        #[arg(long, default_value = "truth,mono")]
        axioms: AxiomSet,
        /// Claims or axioms to check, e.g. thm2,thm3,eq1,wadd.
        #[arg(long, value_delimiter = ',', default_value = "thm3")]
        claims: Vec<Target>,
        /// Report counts only, without counterexample models.
        #[arg(long)]
        count_only: bool,
        /// Allow brute-force table enumeration at 3 states.
        #[arg(long)]
        override_large: bool,
        /// Check this many seeded random operators instead of all of them.
        #[arg(long)]
        samples: Option<u64>,
        /// Run on one thread.
        #[arg(long)]
        serial: bool,
    },
    /// Run a learning scenario and verify its claims.
    Simulate {
        scenario: PathBuf,
        /// Assertion to check instead of the file's list; repeatable.
        #[arg(short = 'a', long = "assert")]
        assertions: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cap = cli.max_counterexamples;
    let result = match &cli.command {
        Command::Check {
            model,
            assertions,
            claims,
            event,
            axioms,
            force,
        } => commands::check(commands::CheckArgs {
            model,
            assertions,
            claims,
            event: event.as_deref(),
            axioms: *axioms,
            force: *force,
            max_counterexamples: cap,
        }),
        Command::Eval { model, expr } => commands::eval(model, expr, cap),
        Command::Enumerate {
            states,
            axioms,
            claims,
            count_only,
            override_large,
            samples,
            serial,
        } => commands::enumerate(commands::EnumerateArgs {
            states: *states,
            axioms: *axioms,
            targets: claims,
            count_only: *count_only,
            allow_large: *override_large,
            samples: *samples,
            serial: *serial,
            seed: cli.seed,
            max_counterexamples: cap,
        }),
        Command::Simulate {
            scenario,
            assertions,
        } => commands::simulate(scenario, assertions, cap),
    };
    match result {
        Ok(out) => {
            let rendered = match cli.format {
                Format::Text => out.text,
                Format::Json => {
                    let mut doc =
                        serde_json::to_string_pretty(&out.json).expect("values serialize");
                    doc.push('\n');
                    doc
                }
            };
            let _ = std::io::stdout().lock().write_all(rendered.as_bytes());
            if out.holds {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
