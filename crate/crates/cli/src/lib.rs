pub mod commands;
pub mod dot;
pub mod format;
pub mod rankfile;
pub mod report;

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;
use trirank::qrank::Instance;

use crate::format::ParseError;
use crate::report::{Output, Report};

pub const OUTPUT_ENV: &str = "TRIRANK_OUTPUT";

#[derive(Parser, Debug)]
#[command(name = "trirank", version, about = "Rank functions on finitely presented triangulated categories")]
pub struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, env = OUTPUT_ENV, default_value = "human")]
    pub output: OutputMode,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputMode {
    Human,
    #[value(alias = "structured")]
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a presentation file (`-` or no path reads standard input).
    Validate { path: Option<PathBuf> },
    /// Build the cluster category of type A_n.
    BuildAn {
        #[arg(long)]
        n: usize,
        /// Number of τ-steps searched for hom vanishing.
        #[arg(long)]
        window: Option<usize>,
        /// Write the presentation here instead of standard output.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// List the simple functors with their projective presentations.
    Simples(CatArg),
    /// List the Σ-orbits of indecomposables.
    Orbits(CatArg),
    /// Split an integral rank function into irreducibles.
    Decompose(RankArgs),
    /// Evaluate a rank function on named morphisms or on objects.
    Eval {
        #[command(flatten)]
        rank: RankArgs,
        /// Named morphism, or `TRIANGLE.f`, `TRIANGLE.g`, `TRIANGLE.h`.
        #[arg(long)]
        morphism: Vec<String>,
        /// Object or direct sum such as `T1+T3`.
        #[arg(long)]
        object: Vec<String>,
    },
    /// Check the rank-function axioms for a value table.
    Check {
        #[command(flatten)]
        rank: RankArgs,
        /// Restrict the triangle checks to these triangles.
        #[arg(long)]
        triangle: Vec<String>,
    },
    /// Classification flags, kernel ideal and factorization properties.
    ///
    /// Exactness is not decidable from a finite presentation. On a category
    /// of compact objects it is equivalent to idempotency, which is reported.
    Classify(RankArgs),
    /// Convert object values of a q-rank function into morphism values.
    Qconvert {
        /// `integers`, `periodic:<d>` or `laurent`.
        #[arg(long)]
        instance: Instance,
        /// A `.qv` value file.
        #[arg(long)]
        values: PathBuf,
        #[arg(long)]
        cat: Option<PathBuf>,
        #[arg(long)]
        triangle: Vec<String>,
    },
    /// Graphviz rendering of the AR quiver, coloured by Σ-orbit.
    ExportDot {
        #[command(flatten)]
        cat: CatArg,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
pub struct CatArg {
    /// Presentation file (`-` reads standard input).
    #[arg(long)]
    pub cat: PathBuf,
}

#[derive(Args, Debug)]
pub struct RankArgs {
    /// A `.rf` file with [coefficients] or [object_values].
    #[arg(long)]
    pub rank: PathBuf,
    /// Presentation file; defaults to the one named in the rank file.
    #[arg(long)]
    pub cat: Option<PathBuf>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::BuildAn { .. } => "build-an",
            Command::Simples(_) => "simples",
            Command::Orbits(_) => "orbits",
            Command::Decompose(_) => "decompose",
            Command::Eval { .. } => "eval",
            Command::Check { .. } => "check",
            Command::Classify(_) => "classify",
            Command::Qconvert { .. } => "qconvert",
            Command::ExportDot { .. } => "export-dot",
        }
    }

    fn inputs(&self) -> Vec<&Path> {
        let mut v: Vec<&Path> = Vec::new();
        match self {
            Command::Validate { path } => v.extend(path.as_deref()),
            Command::BuildAn { .. } => {}
            Command::Simples(c) | Command::Orbits(c) | Command::ExportDot { cat: c, .. } => v.push(&c.cat),
            Command::Decompose(r) | Command::Eval { rank: r, .. } | Command::Check { rank: r, .. } | Command::Classify(r) => {
                v.push(&r.rank);
                v.extend(r.cat.as_deref());
            }
            Command::Qconvert { values, cat, .. } => {
                v.push(values);
                v.extend(cat.as_deref());
            }
        }
        v.retain(|p| *p != Path::new("-"));
        v
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{error}")]
    Parse { path: String, error: ParseError },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            _ => 2,
        }
    }

    pub fn status(&self) -> &'static str {
        match self {
            CliError::Domain(_) => "domain_error",
            _ => "input_error",
        }
    }
}

/// Runs one command line; returns the process exit status.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let name = cli.command.name();
    let outcome = match cli.command.inputs().into_iter().find(|p| !p.exists()) {
        Some(missing) => Err(CliError::Io {
            path: missing.display().to_string(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file"),
        }),
        None => commands::dispatch(&cli.command, stdin),
    };
    match outcome {
        Ok(Output::Raw(text)) => {
            let _ = stdout.write_all(text.as_bytes());
            0
        }
        Ok(Output::Report(o)) => {
            let code = if o.failed { 1 } else { 0 };
            match cli.output {
                OutputMode::Json => {
                    let status = if o.failed { "domain_error" } else { "ok" };
                    let _ = stdout.write_all(Report::new(name, status, o.result, o.diagnostics).to_json().as_bytes());
                }
                OutputMode::Human => {
                    let _ = stdout.write_all(o.human.as_bytes());
                    for d in &o.diagnostics {
                        let _ = writeln!(stderr, "{d}");
                    }
                }
            }
            code
        }
        Err(e) => {
            match cli.output {
                OutputMode::Json => {
                    let report = Report::new(name, e.status(), serde_json::Value::Null, vec![e.to_string()]);
                    let _ = stdout.write_all(report.to_json().as_bytes());
                }
                OutputMode::Human => {
                    let _ = writeln!(stderr, "error: {e}");
                }
            }
            e.exit_code()
        }
    }
}
