//! Command-line front end.
//!
//! Exit codes: 0 pass, 1 mathematical failure, 2 input error, 3 resource
//! cap exceeded.

pub mod commands;
pub mod json;
pub mod model;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::credal::Bound;
use crate::error::{Error, Result};
use crate::exactq::format_rational;

pub use commands::{
    build, exit_code, expect, extend, parse_function, validate, verify, Outcome, VertexOptions, DEFAULT_VERTEX_LIMIT,
    EXIT_CAP, EXIT_FAIL, EXIT_INPUT, EXIT_PASS,
};
pub use model::{parse_model, Model};

#[derive(Debug, Parser)]
#[command(name = "credalk", version, about = "Exact consistency checks and joint sets for families of credal sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BoundArg {
    Lower,
    Upper,
}

#[derive(Debug, clap::Args)]
pub struct ReportArgs {
    /// Write the JSON report to this file.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Print the JSON report instead of the summary.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, clap::Args)]
pub struct VertexArgs {
    /// Include the vertex list of P when it is small enough.
    #[arg(long)]
    pub vertices: bool,
    #[arg(long, default_value_t = DEFAULT_VERTEX_LIMIT)]
    pub vertex_limit: usize,
}

impl VertexArgs {
    fn options(&self) -> VertexOptions {
        VertexOptions {
            emit: self.vertices,
            limit: self.vertex_limit,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check permutation and marginal consistency.
    Validate {
        model: PathBuf,
        #[command(flatten)]
        out: ReportArgs,
    },
    /// Build the joint set and write its constraints.
    Build {
        model: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[command(flatten)]
        vertices: VertexArgs,
    },
    /// Run consistency, joint construction and representation checks.
    Verify {
        model: PathBuf,
        #[command(flatten)]
        out: ReportArgs,
        #[command(flatten)]
        vertices: VertexArgs,
    },
    /// Print a lower or upper expectation.
    Expect {
        model: PathBuf,
        /// Comma-separated index labels.
        #[arg(long)]
        tuple: String,
        #[arg(long)]
        function_file: PathBuf,
        #[arg(long, value_enum)]
        bound: BoundArg,
        /// Bound over the pushforward of the joint set instead.
        #[arg(long)]
        joint: bool,
    },
    /// Extend a measure on a partition to the whole space.
    Extend { partition: PathBuf },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

/// Writes via a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io = |e: std::io::Error| Error::InvalidInput(format!("cannot write {}: {e}", path.display()));
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, contents).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}

pub fn render(doc: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("JSON values serialise");
    s.push('\n');
    s
}

fn emit(outcome: &Outcome, out: &ReportArgs, stdout: &mut dyn Write) -> Result<()> {
    let text = render(&outcome.document);
    if let Some(p) = &out.report {
        write_atomic(p, &text)?;
    }
    let io = |e: std::io::Error| Error::InvalidInput(format!("stdout: {e}"));
    if out.json {
        stdout.write_all(text.as_bytes()).map_err(io)?;
    } else {
        for line in &outcome.summary {
            writeln!(stdout, "{line}").map_err(io)?;
        }
    }
    Ok(())
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<i32> {
    let io = |e: std::io::Error| Error::InvalidInput(format!("stdout: {e}"));
    match cli.command {
        Command::Validate { model, out } => {
            let m = parse_model(&read(&model)?)?;
            let o = validate(&m)?;
            emit(&o, &out, stdout)?;
            Ok(o.exit)
        }
        Command::Verify { model, out, vertices } => {
            let m = parse_model(&read(&model)?)?;
            let o = verify(&m, vertices.options())?;
            emit(&o, &out, stdout)?;
            Ok(o.exit)
        }
        Command::Build {
            model,
            output,
            vertices,
        } => {
            let m = parse_model(&read(&model)?)?;
            let o = build(&m, vertices.options())?;
            let text = render(&o.document);
            match output {
                Some(p) => {
                    write_atomic(&p, &text)?;
                    for line in &o.summary {
                        writeln!(stdout, "{line}").map_err(io)?;
                    }
                }
                None => stdout.write_all(text.as_bytes()).map_err(io)?,
            }
            Ok(o.exit)
        }
        Command::Expect {
            model,
            tuple,
            function_file,
            bound,
            joint,
        } => {
            let m = parse_model(&read(&model)?)?;
            let f = parse_function(&read(&function_file)?)?;
            let labels: Vec<&str> = tuple.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            let bound = match bound {
                BoundArg::Lower => Bound::Lower,
                BoundArg::Upper => Bound::Upper,
            };
            let q = expect(&m, &labels, &f, bound, joint)?;
            writeln!(stdout, "{}", format_rational(&q)).map_err(io)?;
            Ok(EXIT_PASS)
        }
        Command::Extend { partition } => {
            let v = extend(&read(&partition)?)?;
            let out: Vec<String> = v.as_vector().iter().map(format_rational).collect();
            writeln!(stdout, "{}", serde_json::to_string(&out).expect("strings serialise")).map_err(io)?;
            Ok(EXIT_PASS)
        }
    }
}

/// Parses arguments, runs the command and returns the process exit code.
/// Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(cli, &mut lock) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
