//! Permutations and disjoint two-cycle batch updates.
//!
//! Correspondences are bijections `[0,n) -> [0,n)` stored as index vectors.
//! Updates are batches of pairwise-disjoint transpositions applied on the
//! domain side: selecting a cycle `(u,v)` swaps which target `u` and `v` map
//! to. Because every update is a product of transpositions, bijectivity is
//! preserved by construction.

mod factorize;
mod rank;

pub use factorize::{one_factorization, pair_rounds, CycleFactorization};
pub use rank::{inconsistency, worst_vertices};

use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};

/// Bijection `[0,n) -> [0,n)`; `map[i]` is the target of `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { map: (0..n).collect() }
    }

    /// Validates that `map` is a bijection.
    pub fn from_vec(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for (i, &t) in map.iter().enumerate() {
            if t >= n {
                return Err(Error::param(format!(
                    "permutation entry {i} -> {t} out of range [0,{n})"
                )));
            }
            if seen[t] {
                return Err(Error::param(format!(
                    "permutation maps two indices to {t}; not a bijection"
                )));
            }
            seen[t] = true;
        }
        Ok(Permutation { map })
    }

    /// Uniformly random permutation (Fisher-Yates).
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            map.swap(i, j);
        }
        Permutation { map }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &t)| i == t)
    }

    /// Composition `self` then `other`: `i -> other(self(i))`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.len(), other.len());
        Permutation { map: self.map.iter().map(|&t| other.map[t]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0usize; self.map.len()];
        for (i, &t) in self.map.iter().enumerate() {
            inv[t] = i;
        }
        Permutation { map: inv }
    }

    /// Number of indices whose target differs from `other`.
    pub fn hamming(&self, other: &Permutation) -> usize {
        debug_assert_eq!(self.len(), other.len());
        self.map
            .iter()
            .zip(other.map.iter())
            .filter(|(a, b)| a != b)
            .count()
    }

    /// File format: one 0-based target index per line.
    pub fn write_to(&self, path: &Path) -> Result<()> {
        let mut out = String::with_capacity(self.map.len() * 4);
        for &t in &self.map {
            out.push_str(&t.to_string());
            out.push('\n');
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    pub fn read_from(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut map = Vec::new();
        for (lineno, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let t: usize = trimmed.parse().map_err(|_| {
                Error::parse(
                    Some(path.to_path_buf()),
                    Some(lineno + 1),
                    format!("expected a 0-based index, got {trimmed:?}"),
                )
            })?;
            map.push(t);
        }
        Permutation::from_vec(map).map_err(|e| match e {
            Error::Param { msg } => Error::parse(Some(path.to_path_buf()), None, msg),
            other => other,
        })
    }
}

/// Transposition of two distinct vertices, stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TwoCycle {
    u: usize,
    v: usize,
}

impl TwoCycle {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == b {
            return Err(Error::param(format!("two-cycle needs distinct vertices, got ({a},{a})")));
        }
        Ok(TwoCycle { u: a.min(b), v: a.max(b) })
    }

    #[inline]
    pub fn u(&self) -> usize {
        self.u
    }

    #[inline]
    pub fn v(&self) -> usize {
        self.v
    }
}

/// Batch of pairwise-disjoint two-cycles; the unit of one QUBO variable block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleBatch {
    cycles: Vec<TwoCycle>,
}

impl CycleBatch {
    pub fn new(cycles: Vec<TwoCycle>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for c in &cycles {
            for vertex in [c.u(), c.v()] {
                if !seen.insert(vertex) {
                    return Err(Error::param(format!(
                        "cycle batch is not disjoint: vertex {vertex} appears twice"
                    )));
                }
            }
        }
        Ok(CycleBatch { cycles })
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    pub fn cycles(&self) -> &[TwoCycle] {
        &self.cycles
    }
}

/// Apply the selected cycles of a disjoint batch to `p`.
///
/// `select[i] == 1` means cycle `i` participates. Selected cycles commute
/// (disjoint supports), so the result is independent of application order.
/// Returns a new permutation; `p` is untouched.
pub fn cae_apply(p: &Permutation, batch: &CycleBatch, select: &[u8]) -> Result<Permutation> {
    if select.len() != batch.len() {
        return Err(Error::dim(format!(
            "selection has {} bits for a batch of {} cycles",
            select.len(),
            batch.len()
        )));
    }
    let n = p.len();
    for c in batch.cycles() {
        if c.v() >= n {
            return Err(Error::dim(format!(
                "cycle ({},{}) out of range for permutation of length {n}",
                c.u(),
                c.v()
            )));
        }
    }
    let mut map = p.map.clone();
    for (c, &s) in batch.cycles().iter().zip(select) {
        if s != 0 {
            map.swap(c.u(), c.v());
        }
    }
    let out = Permutation { map };
    debug_assert!(Permutation::from_vec(out.map.clone()).is_ok());
    Ok(out)
}
