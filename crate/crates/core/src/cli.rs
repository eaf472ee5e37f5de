//! Command-line front end. [`run`] is pure: it maps a configuration and the
//! input text to output text and an exit status, so the binary only does I/O.

use clap::{Parser, ValueEnum};

use crate::error::Error;
use crate::formula::{parse_in, Domain, Formula};
use crate::fuzz::run_fuzz;
use crate::qe::{eliminate_all, TraceStep};
use crate::semantics::zarith::check_addition_definability;
use crate::semantics::{eval_ground, signsplit, Assignment};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DISCREPANCY: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Print a quantifier-free equivalent.
    Eliminate,
    /// Print `true` or `false` for a sentence.
    Decide,
    /// Check the integer definition of addition on a bounded cube.
    CheckZ,
    /// Differential test of elimination against the witness oracle.
    Fuzz,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DomainArg {
    Qpos,
    Q,
}

impl From<DomainArg> for Domain {
    fn from(d: DomainArg) -> Domain {
        match d {
            DomainArg::Qpos => Domain::QPos,
            DomainArg::Q => Domain::Q,
        }
    }
}

#[derive(Clone, Debug, Parser)]
#[command(name = "mulord", version, about = "Decide multiplication and order over the rationals")]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    #[arg(long, value_enum, default_value = "qpos")]
    pub domain: DomainArg,
    /// Append the rewrite trace, one tab-separated record per line.
    #[arg(long)]
    pub trace: bool,
    #[arg(long, default_value_t = 40, value_parser = clap::value_parser!(i64).range(1..))]
    pub bound: i64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u64).range(1..))]
    pub iters: u64,
    /// Read the formula from a file.
    #[arg(short = 'f', long = "file", conflicts_with = "expr")]
    pub file: Option<std::path::PathBuf>,
    /// Formula given inline.
    #[arg(short = 'e', long = "expr")]
    pub expr: Option<String>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            domain: DomainArg::Qpos,
            trace: false,
            bound: 40,
            seed: 0,
            iters: 500,
            file: None,
            expr: None,
        }
    }

    pub fn needs_formula(&self) -> bool {
        matches!(self.command, Command::Eliminate | Command::Decide)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl RunOutput {
    fn ok(stdout: String) -> Self {
        RunOutput {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn failure(e: &Error) -> Self {
        let code = match e {
            Error::Syntax { .. } => EXIT_PARSE,
            _ => EXIT_UNSUPPORTED,
        };
        RunOutput {
            code,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        }
    }
}

/// `rule<TAB>before<TAB>after`
pub fn serialize_trace(trace: &[TraceStep]) -> String {
    trace
        .iter()
        .map(|s| format!("{}\t{}\t{}\n", s.rule, s.before, s.after))
        .collect()
}

fn eliminate_input(config: &RunConfig, input: &str) -> Result<(Formula, Vec<TraceStep>), Error> {
    let domain = Domain::from(config.domain);
    let f = parse_in(input, domain)?;
    let positive = match domain {
        Domain::QPos => f,
        Domain::Q => signsplit(&f)?,
    };
    Ok(eliminate_all(&positive))
}

fn with_trace(config: &RunConfig, mut out: String, trace: &[TraceStep]) -> String {
    if config.trace {
        out.push_str(&serialize_trace(trace));
    }
    out
}

pub fn run(config: &RunConfig, input: &str) -> RunOutput {
    match config.command {
        Command::Eliminate => match eliminate_input(config, input) {
            Ok((qf, trace)) => RunOutput::ok(with_trace(config, format!("{qf}\n"), &trace)),
            Err(e) => RunOutput::failure(&e),
        },
        Command::Decide => {
            let decided = eliminate_input(config, input).and_then(|(qf, trace)| {
                if let Some(v) = qf.free_vars().into_iter().next() {
                    return Err(Error::Unsupported(format!("free variable `{v}` in a sentence")));
                }
                Ok((eval_ground(&qf, Domain::QPos, &Assignment::new())?, trace))
            });
            match decided {
                Ok((truth, trace)) => RunOutput::ok(with_trace(config, format!("{truth}\n"), &trace)),
                Err(e) => RunOutput::failure(&e),
            }
        }
        Command::CheckZ => match check_addition_definability(config.bound) {
            Ok(report) => RunOutput {
                code: if report.mismatches.is_empty() {
                    EXIT_OK
                } else {
                    EXIT_DISCREPANCY
                },
                stdout: format!("{report}\n"),
                stderr: String::new(),
            },
            Err(e) => RunOutput::failure(&e),
        },
        Command::Fuzz => {
            let report = run_fuzz(config.seed, config.iters as usize);
            let mut stdout = format!(
                "passed={} failed={} witnessed={}\n",
                report.passed, report.failed, report.witnessed
            );
            let code = match &report.first_failure {
                None => EXIT_OK,
                Some((i, case, why)) => {
                    stdout.push_str(&format!("first failure: case #{i}: {case}\n{why}\n"));
                    stdout.push_str(&format!(
                        "reproduce: mulord fuzz --seed {} --iters {}\n",
                        config.seed,
                        i + 1
                    ));
                    EXIT_DISCREPANCY
                }
            };
            RunOutput {
                code,
                stdout,
                stderr: String::new(),
            }
        }
    }
}
