//! Quadratic unconstrained binary optimization over cycle-selection bits.
//!
//! A problem is a symmetric weight matrix W plus a scalar offset; the value of
//! an assignment x is x^T W x (the offset is reported separately so the zero
//! assignment always evaluates to 0). Problems remember how kernelization
//! renamed and fixed variables, so reduced solutions expand back to the
//! original index space.

mod audit;
mod build;
mod kernel;
mod oracle;
mod sparse;

pub use audit::dropped_energy;
pub use build::{build_qubo, build_qubo_with_constant, TripletOracles};
pub use kernel::kernelize;
pub use oracle::{EnergyArg, EnergyOracle, FieldMode};
pub use sparse::SparseMat;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

#[derive(Debug, Clone)]
pub struct QuboProblem {
    weights: DenseMatrix,
    constant: f64,
    /// Residual variable index -> index in the originally built problem.
    vars: Vec<usize>,
    /// Original variable index -> bit forced by kernelization.
    fixed: BTreeMap<usize, bool>,
    original_len: usize,
}

impl QuboProblem {
    pub fn new(weights: DenseMatrix, constant: f64) -> Result<Self> {
        if !weights.all_finite() || !constant.is_finite() {
            return Err(Error::param("QUBO weights and constant must be finite"));
        }
        if !weights.is_symmetric(0.0) {
            return Err(Error::param("QUBO weight matrix must be symmetric"));
        }
        let n = weights.n();
        Ok(QuboProblem {
            weights,
            constant,
            vars: (0..n).collect(),
            fixed: BTreeMap::new(),
            original_len: n,
        })
    }

    pub(crate) fn with_reduction(
        weights: DenseMatrix,
        constant: f64,
        vars: Vec<usize>,
        fixed: BTreeMap<usize, bool>,
        original_len: usize,
    ) -> Self {
        debug_assert_eq!(weights.n(), vars.len());
        QuboProblem { weights, constant, vars, fixed, original_len }
    }

    /// Number of free (residual) variables.
    pub fn len(&self) -> usize {
        self.weights.n()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn weights(&self) -> &DenseMatrix {
        &self.weights
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// Residual -> original variable mapping (identity for unreduced problems).
    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    /// Original variables fixed by kernelization.
    pub fn fixed(&self) -> &BTreeMap<usize, bool> {
        &self.fixed
    }

    /// Variable count of the problem before any kernelization.
    pub fn original_len(&self) -> usize {
        self.original_len
    }

    /// x^T W x for a 0/1 assignment of the residual variables. The constant
    /// offset is not included.
    pub fn evaluate(&self, bits: &[u8]) -> f64 {
        assert_eq!(bits.len(), self.len(), "assignment length mismatch");
        let n = self.len();
        let mut total = 0.0;
        for i in 0..n {
            if bits[i] == 0 {
                continue;
            }
            let row = self.weights.row(i);
            let mut acc = row[i];
            for j in (i + 1)..n {
                if bits[j] != 0 {
                    acc += 2.0 * row[j];
                }
            }
            total += acc;
        }
        total
    }

    /// Lift a residual assignment back to the original variable space,
    /// filling in kernel-fixed bits.
    pub fn expand(&self, bits: &[u8]) -> Vec<u8> {
        assert_eq!(bits.len(), self.len(), "assignment length mismatch");
        let mut full = vec![0u8; self.original_len];
        for (&orig, &bit) in &self.fixed {
            full[orig] = bit as u8;
        }
        for (r, &orig) in self.vars.iter().enumerate() {
            full[orig] = bits[r];
        }
        full
    }

    /// Upper-triangular entry list: (i, i, W_ii) for diagonals and
    /// (i, j, 2*W_ij) for i < j, zeros skipped. The off-diagonal value is the
    /// full pair coefficient, so x^T W x = sum of w over active entries.
    pub fn upper_entries(&self) -> Vec<(usize, usize, f64)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            let row = self.weights.row(i);
            if row[i] != 0.0 {
                out.push((i, i, row[i]));
            }
            for j in (i + 1)..n {
                if row[j] != 0.0 {
                    out.push((i, j, 2.0 * row[j]));
                }
            }
        }
        out
    }

    pub fn to_document(&self) -> QuboDocument {
        QuboDocument {
            num_vars: self.len(),
            constant: self.constant,
            entries: self.upper_entries(),
        }
    }

    /// Build a problem from a document. Entries may use the upper-triangular
    /// convention (one entry per pair, full coefficient) or the symmetric one
    /// (both orders, half each); duplicates accumulate either way.
    pub fn from_document(doc: &QuboDocument) -> Result<Self> {
        if !doc.constant.is_finite() {
            return Err(Error::parse_msg("QUBO document: constant is not finite"));
        }
        let n = doc.num_vars;
        let mut w = DenseMatrix::zeros(n);
        for (idx, &(i, j, v)) in doc.entries.iter().enumerate() {
            if i >= n || j >= n {
                return Err(Error::parse_msg(format!(
                    "QUBO document: entry {idx} index ({i},{j}) out of range for {n} variables"
                )));
            }
            if !v.is_finite() {
                return Err(Error::parse_msg(format!(
                    "QUBO document: entry {idx} value is not finite"
                )));
            }
            if i == j {
                w.add(i, i, v);
            } else {
                w.add(i, j, v / 2.0);
                w.add(j, i, v / 2.0);
            }
        }
        QuboProblem::new(w, doc.constant)
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let doc: QuboDocument = serde_json::from_str(&text)
            .map_err(|e| Error::parse(Some(path.to_path_buf()), Some(e.line()), e.to_string()))?;
        QuboProblem::from_document(&doc)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.to_document())
            .map_err(|e| Error::parse(Some(path.to_path_buf()), None, e.to_string()))?;
        fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}

/// On-disk / on-wire QUBO representation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuboDocument {
    pub num_vars: usize,
    pub constant: f64,
    pub entries: Vec<(usize, usize, f64)>,
}
