//! Small signed sparse matrices over correspondence space.
//!
//! A selected two-cycle (u,v) turns correspondence P into c.P (rows u and v
//! swapped), so the additive correction (c - I).P has exactly four nonzeros.
//! Products and differences of such corrections stay tiny; entries are kept
//! canonical (row-major sorted, duplicates merged, exact zeros dropped).

use super::super::perm::{Permutation, TwoCycle};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMat {
    rows: usize,
    cols: usize,
    /// Canonical: sorted by (row, col), unique positions, no zero values.
    entries: Vec<(usize, usize, f64)>,
}

impl SparseMat {
    pub fn new(rows: usize, cols: usize, entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        for &(r, c, v) in &entries {
            if r >= rows || c >= cols {
                return Err(Error::dim(format!(
                    "sparse entry ({r},{c}) out of bounds for {rows}x{cols}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::param(format!("sparse entry ({r},{c}) is not finite")));
            }
        }
        let mut m = SparseMat { rows, cols, entries };
        m.canonicalize();
        Ok(m)
    }

    pub fn empty(rows: usize, cols: usize) -> Self {
        SparseMat { rows, cols, entries: Vec::new() }
    }

    fn canonicalize(&mut self) {
        self.entries
            .sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(self.entries.len());
        for &(r, c, v) in &self.entries {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|&(_, _, v)| v != 0.0);
        self.entries = merged;
    }

    #[inline]
    pub fn dim_rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn dim_cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    /// The correction (c - I).P for a two-cycle c acting on the domain of P:
    /// -1 at (u, P(u)) and (v, P(v)), +1 at (u, P(v)) and (v, P(u)).
    pub fn cycle_update(cycle: TwoCycle, p: &Permutation) -> Result<Self> {
        let n = p.len();
        let (u, v) = (cycle.u(), cycle.v());
        if v >= n {
            return Err(Error::dim(format!(
                "cycle ({u},{v}) out of range for permutation of length {n}"
            )));
        }
        let (pu, pv) = (p.apply(u), p.apply(v));
        SparseMat::new(
            n,
            n,
            vec![(u, pu, -1.0), (u, pv, 1.0), (v, pu, 1.0), (v, pv, -1.0)],
        )
    }

    /// Difference new - old of two permutation matrices.
    pub fn perm_diff(new: &Permutation, old: &Permutation) -> Result<Self> {
        if new.len() != old.len() {
            return Err(Error::dim(format!(
                "permutation sizes differ: {} vs {}",
                new.len(),
                old.len()
            )));
        }
        let n = new.len();
        let mut entries = Vec::new();
        for i in 0..n {
            let (t_new, t_old) = (new.apply(i), old.apply(i));
            if t_new != t_old {
                entries.push((i, t_new, 1.0));
                entries.push((i, t_old, -1.0));
            }
        }
        SparseMat::new(n, n, entries)
    }

    /// Sparse-sparse product; cost O(nnz_lhs * nnz_rhs).
    pub fn matmul(&self, rhs: &SparseMat) -> Result<SparseMat> {
        if self.cols != rhs.rows {
            return Err(Error::dim(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut entries = Vec::new();
        for &(r1, c1, v1) in &self.entries {
            for &(r2, c2, v2) in &rhs.entries {
                if c1 == r2 {
                    entries.push((r1, c2, v1 * v2));
                }
            }
        }
        SparseMat::new(self.rows, rhs.cols, entries)
    }
}
