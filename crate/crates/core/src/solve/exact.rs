//! Exhaustive QUBO oracle for small problems.

use super::{QuboSolver, Sample, SolveResult};
use crate::error::{Error, Result};
use crate::qubo::QuboProblem;

/// Hard cap: 2^24 states keeps the oracle under a few seconds.
const MAX_VARS: usize = 24;

pub struct ExactSolver;

impl QuboSolver for ExactSolver {
    fn solve(&self, problem: &QuboProblem, _seed: u64) -> Result<SolveResult> {
        solve_exact(problem)
    }
}

/// Global optimum by enumeration; ties resolve to the lexicographically
/// smallest assignment. Deterministic, seed-free.
pub fn solve_exact(problem: &QuboProblem) -> Result<SolveResult> {
    let n = problem.len();
    if n > MAX_VARS {
        return Err(Error::param(format!(
            "exact solver handles at most {MAX_VARS} variables, problem has {n}"
        )));
    }
    if n == 0 {
        let best = Sample { bits: vec![], energy: 0.0 };
        return Ok(SolveResult { best: best.clone(), samples: vec![best] });
    }

    let w = problem.weights();
    let mut bits = vec![0u8; n];
    let mut energy = 0.0f64;
    let mut best_bits = bits.clone();
    let mut best_energy = 0.0f64;

    // Gray-code walk: state t differs from t-1 in bit trailing_zeros(t), so
    // each step is a single O(n) flip update.
    for t in 1u64..(1u64 << n) {
        let b = t.trailing_zeros() as usize;
        let row = w.row(b);
        let mut cross = 0.0;
        for (j, &x) in bits.iter().enumerate() {
            if j != b && x != 0 {
                cross += row[j];
            }
        }
        let delta = (1.0 - 2.0 * f64::from(bits[b])) * (row[b] + 2.0 * cross);
        energy += delta;
        bits[b] ^= 1;
        if energy < best_energy || (energy == best_energy && bits < best_bits) {
            best_energy = energy;
            best_bits.clone_from(&bits);
        }
    }

    // Re-derive the winner's energy from scratch; the walk accumulates fp
    // rounding over 2^n updates.
    let best = Sample { energy: problem.evaluate(&best_bits), bits: best_bits };
    Ok(SolveResult { best: best.clone(), samples: vec![best] })
}
