//! Per-vertex contribution ranking used to pick the cycle vertex pool.

use super::Permutation;
use crate::error::{Error, Result};
use crate::qubo::EnergyOracle;

/// Row sum of pairwise field disagreement attributed to vertex `x` under `p`.
pub fn inconsistency(oracle: &EnergyOracle<'_>, p: &Permutation, x: usize) -> Result<f64> {
    let n = oracle.n_a();
    if p.len() != n || oracle.n_b() != n {
        return Err(Error::dim(format!(
            "inconsistency needs square fields matching the map: fields {}x{}, map {}",
            oracle.n_a(),
            oracle.n_b(),
            p.len()
        )));
    }
    if x >= n {
        return Err(Error::dim(format!("vertex {x} out of range for {n} vertices")));
    }
    let px = p.apply(x);
    let mut total = 0.0;
    for w in 0..n {
        total += oracle.entry(x, px, w, p.apply(w));
    }
    Ok(total)
}

/// The `m` vertices with the largest inconsistency, highest score first;
/// equal scores break toward the lower vertex index. `m` must be even (the
/// selected set is always split into 2-cycles) and at most `n`.
pub fn worst_vertices(
    oracle: &EnergyOracle<'_>,
    p: &Permutation,
    m: usize,
) -> Result<Vec<usize>> {
    let n = p.len();
    if m % 2 != 0 {
        return Err(Error::param(format!("worst-vertex count must be even, got {m}")));
    }
    if m > n {
        return Err(Error::param(format!(
            "cannot select {m} worst vertices from {n}"
        )));
    }
    let mut scored: Vec<(usize, f64)> = (0..n)
        .map(|x| inconsistency(oracle, p, x).map(|s| (x, s)))
        .collect::<Result<_>>()?;
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    Ok(scored.into_iter().take(m).map(|(x, _)| x).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::DenseMatrix;
    use crate::qubo::FieldMode;

    fn path_metric() -> DenseMatrix {
        DenseMatrix::from_rows(&[
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.0],
            vec![2.0, 1.0, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn inconsistency_rows_sum_to_energy() {
        let f = path_metric();
        let oracle = EnergyOracle::new(&f, &f, FieldMode::Geodesic);
        let p = Permutation::from_vec(vec![1, 0, 2]).unwrap();
        let scores: Vec<f64> = (0..3)
            .map(|x| inconsistency(&oracle, &p, x).unwrap())
            .collect();
        assert_eq!(scores, vec![1.0, 1.0, 2.0]);
        let total: f64 = scores.iter().sum();
        assert_eq!(total, oracle.energy_perm(&p).unwrap());
    }

    fn path_metric4() -> DenseMatrix {
        DenseMatrix::from_rows(&[
            vec![0.0, 1.0, 2.0, 3.0],
            vec![1.0, 0.0, 1.0, 2.0],
            vec![2.0, 1.0, 0.0, 1.0],
            vec![3.0, 2.0, 1.0, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn worst_vertices_orders_by_score_then_index() {
        let f = path_metric();
        let oracle = EnergyOracle::new(&f, &f, FieldMode::Geodesic);
        let p = Permutation::from_vec(vec![1, 0, 2]).unwrap();
        // Scores [1, 1, 2]: vertex 2 leads, then the tie at 1.0 resolves to 0.
        assert_eq!(worst_vertices(&oracle, &p, 2).unwrap(), vec![2, 0]);
    }

    #[test]
    fn full_selection_sorts_all_vertices() {
        let f = path_metric4();
        let oracle = EnergyOracle::new(&f, &f, FieldMode::Geodesic);
        // Swap of vertices 0 and 2 on the 0-1-2-3 path metric.
        let p = Permutation::from_vec(vec![2, 1, 0, 3]).unwrap();
        let scores: Vec<f64> = (0..4)
            .map(|x| inconsistency(&oracle, &p, x).unwrap())
            .collect();
        assert_eq!(scores, vec![2.0, 0.0, 2.0, 4.0]);
        // Descending by score, ties toward the lower index.
        assert_eq!(worst_vertices(&oracle, &p, 4).unwrap(), vec![3, 0, 2, 1]);
    }

    #[test]
    fn identity_map_on_equal_fields_scores_zero_and_ties_by_index() {
        let f = path_metric4();
        let oracle = EnergyOracle::new(&f, &f, FieldMode::Geodesic);
        let p = Permutation::identity(4);
        for x in 0..4 {
            assert_eq!(inconsistency(&oracle, &p, x).unwrap(), 0.0);
        }
        assert_eq!(worst_vertices(&oracle, &p, 2).unwrap(), vec![0, 1]);
    }

    #[test]
    fn odd_or_oversized_requests_rejected() {
        let f = path_metric();
        let oracle = EnergyOracle::new(&f, &f, FieldMode::Geodesic);
        let p = Permutation::identity(3);
        assert!(worst_vertices(&oracle, &p, 1).is_err());
        assert!(worst_vertices(&oracle, &p, 4).is_err());
    }
}
