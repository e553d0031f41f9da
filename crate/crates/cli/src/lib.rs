//! Command-line front end: parse a surface, optionally transform it,
//! classify its singularities and write reports and meshes.

pub mod args;
pub mod commands;
pub mod config;
pub mod obj;
pub mod output;

use std::fmt;

use anyhow::Result;
use liefront::Error;

use args::{Cli, Command};
use config::RunConfig;

/// Invalid flags, config values or missing inputs.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// The transformed surface has no Euclidean projection on most of the grid.
#[derive(Debug)]
pub struct ProjectionFailure {
    pub fraction: f64,
}

impl fmt::Display for ProjectionFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "projection is singular on {:.1}% of the grid", 100.0 * self.fraction)
    }
}

impl std::error::Error for ProjectionFailure {}

pub const EXIT_OTHER: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PROJECTION: i32 = 3;
pub const EXIT_IO: i32 = 4;

fn is_parse_error(e: &Error) -> bool {
    matches!(
        e,
        Error::SyntaxError { .. }
            | Error::UnknownIdentifier { .. }
            | Error::NonSmoothFunction { .. }
            | Error::SurfaceFile { .. }
            | Error::MatrixFormat(_)
            | Error::InvalidNormal { .. }
    )
}

/// Exit code for an error, decided by the first recognised cause.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.is::<UsageError>() || cause.is::<toml::de::Error>() {
            return EXIT_PARSE;
        }
        if cause.is::<ProjectionFailure>() {
            return EXIT_PROJECTION;
        }
        if cause.is::<std::io::Error>() {
            return EXIT_IO;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return if is_parse_error(e) { EXIT_PARSE } else { EXIT_OTHER };
        }
    }
    EXIT_OTHER
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> Result<i32> {
    match &cli.command {
        Command::Classify(a) => commands::classify(&RunConfig::resolve(a)?)?,
        Command::Sweep(a) => commands::sweep_cmd(&RunConfig::resolve(a)?)?,
        Command::Steer(a) => commands::steer_cmd(&RunConfig::resolve(a)?)?,
        Command::Mesh(a) => commands::mesh(&RunConfig::resolve(a)?)?,
        Command::CheckMatrix(a) => {
            if !commands::check_matrix(a)? {
                return Ok(EXIT_OTHER);
            }
        }
    }
    Ok(0)
}
