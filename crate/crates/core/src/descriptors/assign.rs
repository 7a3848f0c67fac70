//! Descriptor assignment and anchor selection.

use crate::error::{Error, Result};
use crate::mesh::GeodesicField;
use crate::perm::Permutation;
use crate::qubo::{EnergyOracle, FieldMode};

use super::DescriptorSet;

/// Permutation maximizing the summed inner product of matched descriptor
/// rows, solved exactly in O(n^3).
pub fn init_permutation(desc_a: &DescriptorSet, desc_b: &DescriptorSet) -> Result<Permutation> {
    if desc_a.n() != desc_b.n() || desc_a.d() != desc_b.d() {
        return Err(Error::dim(format!(
            "descriptor tables are {}x{} and {}x{}",
            desc_a.n(),
            desc_a.d(),
            desc_b.n(),
            desc_b.d()
        )));
    }
    let n = desc_a.n();
    if n == 0 {
        return Err(Error::dim("empty descriptor tables"));
    }
    // Minimize negated similarity.
    let mut cost = vec![0.0f64; n * n];
    for i in 0..n {
        let ra = desc_a.row(i);
        for j in 0..n {
            let rb = desc_b.row(j);
            let sim: f64 = ra.iter().zip(rb).map(|(x, y)| x * y).sum();
            cost[i * n + j] = -sim;
        }
    }
    let assignment = hungarian_min(n, &cost);
    Permutation::from_vec(assignment)
}

/// Shortest-augmenting-path Hungarian algorithm on a square cost matrix
/// (row-major). Returns the column assigned to each row.
fn hungarian_min(n: usize, cost: &[f64]) -> Vec<usize> {
    // 1-based potentials; p[j] = row matched to column j, 0 = unmatched.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        assignment[p[j] - 1] = j - 1;
    }
    assignment
}

/// Initial permutations for every unordered shape pair; the reverse
/// direction is served as the inverse, so P_AB and P_BA always agree.
#[derive(Debug, Clone)]
pub struct PairInits {
    n_shapes: usize,
    pairs: Vec<Permutation>,
}

impl PairInits {
    pub fn compute(descs: &[DescriptorSet]) -> Result<PairInits> {
        let n_shapes = descs.len();
        let mut pairs = Vec::with_capacity(n_shapes * (n_shapes - 1) / 2);
        for i in 0..n_shapes {
            for j in (i + 1)..n_shapes {
                pairs.push(init_permutation(&descs[i], &descs[j])?);
            }
        }
        Ok(PairInits { n_shapes, pairs })
    }

    pub fn n_shapes(&self) -> usize {
        self.n_shapes
    }

    /// P_{i -> j}. The stored direction is i < j; the reverse is its inverse.
    pub fn get(&self, i: usize, j: usize) -> Permutation {
        assert!(i < self.n_shapes && j < self.n_shapes && i != j);
        let (lo, hi) = (i.min(j), i.max(j));
        // Index into the flattened strict upper triangle.
        let idx = lo * self.n_shapes - lo * (lo + 1) / 2 + (hi - lo - 1);
        if i < j {
            self.pairs[idx].clone()
        } else {
            self.pairs[idx].inverse()
        }
    }
}

/// Anchor = shape A minimizing the total geodesic energy of all initial
/// permutations into A. Ties break toward the lowest index.
pub fn select_anchor(fields: &[GeodesicField], inits: &PairInits) -> Result<usize> {
    let n_shapes = fields.len();
    if n_shapes < 3 {
        return Err(Error::param(format!("anchor selection needs >= 3 shapes, got {n_shapes}")));
    }
    if inits.n_shapes() != n_shapes {
        return Err(Error::dim(format!(
            "{} shapes but initial permutations for {}",
            n_shapes,
            inits.n_shapes()
        )));
    }
    let mut best = (0usize, f64::INFINITY);
    for anchor in 0..n_shapes {
        let mut total = 0.0;
        for other in 0..n_shapes {
            if other == anchor {
                continue;
            }
            let oracle = EnergyOracle::new(
                fields[other].matrix(),
                fields[anchor].matrix(),
                FieldMode::Geodesic,
            );
            total += oracle.energy_perm(&inits.get(other, anchor))?;
        }
        if total < best.1 {
            best = (anchor, total);
        }
    }
    Ok(best.0)
}
