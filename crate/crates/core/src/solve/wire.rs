//! Wire format for external QUBO solvers.
//!
//! One JSON object per line over the child's standard streams: the parent
//! writes a single request line, the child answers with a single response
//! line and exits. Entries use the upper-triangular convention of
//! `QuboProblem::upper_entries` (diagonal = linear term, off-diagonal = full
//! pair coefficient); the constant offset never crosses the wire.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::qubo::{QuboDocument, QuboProblem};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveRequest {
    pub num_vars: usize,
    pub entries: Vec<(usize, usize, f64)>,
    pub num_reads: usize,
    pub seed: u64,
}

impl SolveRequest {
    pub fn from_problem(problem: &QuboProblem, num_reads: usize, seed: u64) -> SolveRequest {
        SolveRequest {
            num_vars: problem.len(),
            entries: problem.upper_entries(),
            num_reads,
            seed,
        }
    }

    /// Reconstructs the problem a solver-side process should minimize.
    pub fn to_problem(&self) -> Result<QuboProblem> {
        QuboProblem::from_document(&QuboDocument {
            num_vars: self.num_vars,
            constant: 0.0,
            entries: self.entries.clone(),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveResponse {
    pub samples: Vec<WireSample>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WireSample {
    pub bits: Vec<u8>,
    pub energy: f64,
}
