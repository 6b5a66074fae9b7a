//! `npp-lab`: seeded experiment runner over the `npp-core` library.
//!
//! Every subcommand derives its randomness from `--seed` through
//! `seed_stream`, runs trials on a rayon pool and writes one self-describing
//! CSV or JSON artifact. The echoed config excludes the worker count and the
//! output path, so reruns with different parallelism are byte-identical.

mod args;
mod commands;
mod output;

use npp_core::NppError;
use std::ffi::OsString;
use std::fmt;

pub use args::Cli;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "NPP_LAB_THREADS";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(NppError),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "invalid argument: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<NppError> for CliError {
    fn from(e: NppError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Core(NppError::InvalidArgument(_)) => EXIT_USAGE,
            CliError::Core(NppError::ResourceLimit { .. }) => EXIT_RESOURCE,
            CliError::Io(_) => EXIT_FAILURE,
        }
    }
}

/// Parse `argv` (program name first), run the subcommand and return the
/// exit code. Diagnostics go to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    use clap::Parser;
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("npp-lab: {e}");
            e.exit_code()
        }
    }
}

/// Run a parsed command line.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let threads = resolve_threads(cli.threads)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {threads} workers: {e}")))?;
    let artifact = pool.install(|| commands::dispatch(cli))?;
    output::emit(&artifact, cli.out.as_deref())
}

/// `--threads`, else `NPP_LAB_THREADS`, else 0 (rayon's default).
fn resolve_threads(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(t) = flag {
        return Ok(t);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a worker count, got {v:?}"))),
        _ => Ok(0),
    }
}
