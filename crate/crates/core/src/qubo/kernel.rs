//! Variable pre-fixing for QUBO problems.
//!
//! A variable whose linear term outweighs the total magnitude of its
//! couplings has a sign-forced optimal value regardless of the other bits.
//! Fixing such variables (and folding the consequences into the neighbors'
//! linear terms and the constant) can cascade; the loop runs to fixpoint.
//! The reduction never changes the optimal objective value.

use std::collections::BTreeMap;

use super::QuboProblem;
use crate::matrix::DenseMatrix;

/// Returns an equivalent problem with all sign-forced variables fixed.
/// Residual variable r of the output corresponds to original variable
/// `output.vars()[r]`; fixed bits are recorded in `output.fixed()`.
pub fn kernelize(q: &QuboProblem) -> QuboProblem {
    let mut w = q.weights().clone();
    let mut constant = q.constant();
    let mut alive: Vec<usize> = q.vars().to_vec();
    let mut fixed: BTreeMap<usize, bool> = q.fixed().clone();

    loop {
        let n = w.n();
        // Lowest eligible index first, then rescan: folding a fix can make
        // earlier variables eligible.
        let mut pick: Option<(usize, bool)> = None;
        for r in 0..n {
            let b = w.get(r, r);
            let coupling: f64 = (0..n)
                .filter(|&s| s != r)
                .map(|s| 2.0 * w.get(r, s).abs())
                .sum();
            if b.abs() >= coupling {
                pick = Some((r, b <= 0.0));
                break;
            }
        }
        let Some((r, bit)) = pick else { break };

        if bit {
            constant += w.get(r, r);
            for s in 0..n {
                if s != r {
                    let fold = 2.0 * w.get(s, r);
                    w.add(s, s, fold);
                }
            }
        }
        fixed.insert(alive[r], bit);
        alive.remove(r);

        let mut shrunk = DenseMatrix::zeros(n - 1);
        let keep: Vec<usize> = (0..n).filter(|&s| s != r).collect();
        for (i, &si) in keep.iter().enumerate() {
            for (j, &sj) in keep.iter().enumerate() {
                shrunk.set(i, j, w.get(si, sj));
            }
        }
        w = shrunk;
    }

    QuboProblem::with_reduction(w, constant, alive, fixed, q.original_len())
}
