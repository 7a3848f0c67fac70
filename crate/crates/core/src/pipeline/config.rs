//! Run configuration (TOML) and derived runtime parameters.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solve::{Backend, SaParams};

pub const DEFAULT_WORST_FRACTION: f64 = 0.16;

/// On-disk run configuration. Unknown keys are rejected so typos cannot
/// silently fall back to defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Mesh files, one per shape (.off / .ply, ASCII).
    pub shapes: Vec<PathBuf>,
    /// Optional per-shape side-label files, parallel to `shapes`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side_labels: Option<Vec<PathBuf>>,
    /// Schedule length parameter: the run does 2*t*(N-1) iterations.
    #[serde(alias = "T")]
    pub t: usize,
    /// Fraction of vertices refined per step (rounded down to even).
    #[serde(default = "default_worst_fraction")]
    pub worst_fraction: f64,
    pub seed: u64,
    /// "exact", "sa", or "external:<command>".
    #[serde(default = "default_backend")]
    pub backend: String,
    #[serde(default = "default_num_reads")]
    pub num_reads: usize,
    #[serde(default = "default_num_sweeps")]
    pub num_sweeps: usize,
    /// Revert any round whose exact energy delta is positive.
    #[serde(default)]
    pub monotone_guard: bool,
    /// Rebuild the QUBO against live permutations every round (default).
    /// When off, coefficients are built once per sub-iteration.
    #[serde(default = "default_true")]
    pub strict_rebuild: bool,
    pub output_dir: PathBuf,
    /// Eigenpairs for the descriptor stage; default min(100, n-2).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_eigs: Option<usize>,
    #[serde(default = "default_num_times")]
    pub num_times: usize,
}

fn default_worst_fraction() -> f64 {
    DEFAULT_WORST_FRACTION
}

fn default_backend() -> String {
    "sa".to_string()
}

fn default_num_reads() -> usize {
    SaParams::default().num_reads
}

fn default_num_sweeps() -> usize {
    SaParams::default().num_sweeps
}

fn default_true() -> bool {
    true
}

fn default_num_times() -> usize {
    crate::descriptors::DEFAULT_NUM_TIMES
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let config: RunConfig = toml::from_str(&text)
            .map_err(|e| Error::parse(Some(path.to_path_buf()), None, e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.shapes.len() < 3 {
            return Err(Error::param(format!(
                "need at least 3 shapes, got {}",
                self.shapes.len()
            )));
        }
        if let Some(labels) = &self.side_labels {
            if labels.len() != self.shapes.len() {
                return Err(Error::param(format!(
                    "{} side-label files for {} shapes",
                    labels.len(),
                    self.shapes.len()
                )));
            }
        }
        if self.t < 2 {
            return Err(Error::param(format!("t must be at least 2, got {}", self.t)));
        }
        if !self.worst_fraction.is_finite()
            || self.worst_fraction <= 0.0
            || self.worst_fraction > 1.0
        {
            return Err(Error::param(format!(
                "worst_fraction must be in (0, 1], got {}",
                self.worst_fraction
            )));
        }
        if self.num_reads < 1 || self.num_sweeps < 1 {
            return Err(Error::param("num_reads and num_sweeps must be at least 1"));
        }
        Backend::parse(&self.backend)?;
        Ok(())
    }

    /// Solver backend with this config's annealing parameters applied.
    pub fn backend(&self) -> Result<Backend> {
        Ok(match Backend::parse(&self.backend)? {
            Backend::Exact => Backend::Exact,
            Backend::Sa(_) => Backend::Sa(SaParams {
                num_reads: self.num_reads,
                num_sweeps: self.num_sweeps,
            }),
            Backend::External { cmd, .. } => Backend::External {
                cmd,
                num_reads: self.num_reads,
            },
        })
    }

    pub fn params(&self) -> Result<RunParams> {
        self.validate()?;
        Ok(RunParams {
            t: self.t,
            worst_fraction: self.worst_fraction,
            seed: self.seed,
            backend: self.backend()?,
            monotone_guard: self.monotone_guard,
            strict_rebuild: self.strict_rebuild,
            num_eigs: self.num_eigs,
            num_times: self.num_times,
        })
    }
}

/// Everything the in-memory pipeline needs; paths stay in `RunConfig`.
#[derive(Debug, Clone)]
pub struct RunParams {
    pub t: usize,
    pub worst_fraction: f64,
    pub seed: u64,
    pub backend: Backend,
    pub monotone_guard: bool,
    pub strict_rebuild: bool,
    pub num_eigs: Option<usize>,
    pub num_times: usize,
}

impl RunParams {
    /// Worst-vertex set size for n-vertex shapes: the largest even number
    /// not exceeding worst_fraction * n, at least 2. The exact backend caps
    /// the QUBO at 24 variables, which bounds m.
    pub fn worst_set_size(&self, n: usize) -> Result<usize> {
        let m = 2 * ((self.worst_fraction * n as f64 / 2.0).floor() as usize);
        if m < 2 {
            return Err(Error::param(format!(
                "worst_fraction {} of {n} vertices rounds below 2",
                self.worst_fraction
            )));
        }
        if matches!(self.backend, Backend::Exact) && m > 24 {
            return Err(Error::param(format!(
                "exact backend supports at most 24 QUBO variables, but m = {m}; \
                 lower worst_fraction or switch backends"
            )));
        }
        Ok(m)
    }
}
