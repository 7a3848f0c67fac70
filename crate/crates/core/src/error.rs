//! Error type shared across the crate.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed input file (mesh, permutation, labels, config, QUBO JSON).
    #[error("parse error{}{}: {msg}", fmt_path(.path), fmt_line(.line))]
    Parse {
        path: Option<PathBuf>,
        line: Option<usize>,
        msg: String,
    },

    /// Mesh connectivity violations (disconnected graph, degenerate faces, ...).
    #[error("mesh topology error: {msg}")]
    Topology { msg: String },

    /// Invalid parameter or configuration value.
    #[error("invalid parameter: {msg}")]
    Param { msg: String },

    /// Mismatched sizes between objects that must agree.
    #[error("dimension mismatch: {msg}")]
    Dim { msg: String },

    #[error("eigensolver failure: {msg}")]
    Eigen { msg: String },

    /// External solver wire-protocol violation.
    #[error("solver protocol error: {msg}")]
    Protocol { msg: String },

    /// Backend failure other than a protocol violation.
    #[error("solver error: {msg}")]
    Solver { msg: String },
}

fn fmt_path(path: &Option<PathBuf>) -> String {
    match path {
        Some(p) => format!(" in {}", p.display()),
        None => String::new(),
    }
}

fn fmt_line(line: &Option<usize>) -> String {
    match line {
        Some(l) => format!(" (line {l})"),
        None => String::new(),
    }
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn parse(path: Option<PathBuf>, line: Option<usize>, msg: impl Into<String>) -> Self {
        Error::Parse { path, line, msg: msg.into() }
    }

    /// Parse error with no file context (in-memory documents).
    pub fn parse_msg(msg: impl Into<String>) -> Self {
        Error::Parse { path: None, line: None, msg: msg.into() }
    }

    pub fn topology(msg: impl Into<String>) -> Self {
        Error::Topology { msg: msg.into() }
    }

    pub fn param(msg: impl Into<String>) -> Self {
        Error::Param { msg: msg.into() }
    }

    pub fn dim(msg: impl Into<String>) -> Self {
        Error::Dim { msg: msg.into() }
    }

    pub fn eigen(msg: impl Into<String>) -> Self {
        Error::Eigen { msg: msg.into() }
    }

    pub fn protocol(msg: impl Into<String>) -> Self {
        Error::Protocol { msg: msg.into() }
    }

    pub fn solver(msg: impl Into<String>) -> Self {
        Error::Solver { msg: msg.into() }
    }
}
