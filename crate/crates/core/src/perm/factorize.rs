//! One-factorization of the complete graph on an even vertex set.
//!
//! The circle method partitions all C(m,2) unordered pairs of m vertices
//! (m even) into m-1 rounds of m/2 pairwise-disjoint transpositions. Vertex
//! order is shuffled first with a seeded RNG so that two factorizations built
//! over related vertex sets do not produce trivially aligned rounds.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CycleBatch, Permutation, TwoCycle};
use crate::error::{Error, Result};

/// All C(m,2) pairs of a vertex set, partitioned into m-1 disjoint rounds.
#[derive(Debug, Clone)]
pub struct CycleFactorization {
    rounds: Vec<CycleBatch>,
    vertex_count: usize,
}

impl CycleFactorization {
    pub fn rounds(&self) -> &[CycleBatch] {
        &self.rounds
    }

    pub fn num_rounds(&self) -> usize {
        self.rounds.len()
    }

    /// Cycles per round (m/2).
    pub fn round_size(&self) -> usize {
        self.vertex_count / 2
    }
}

/// Build a one-factorization of the complete graph on `vertices`.
///
/// Requires an even number (>= 2) of distinct vertex ids. Every unordered
/// pair appears in exactly one round; each round is a disjoint batch of
/// m/2 two-cycles.
pub fn one_factorization(vertices: &[usize], seed: u64) -> Result<CycleFactorization> {
    let m = vertices.len();
    if m < 2 || m % 2 != 0 {
        return Err(Error::param(format!(
            "one-factorization needs an even vertex count >= 2, got {m}"
        )));
    }
    {
        let mut sorted = vertices.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::param("one-factorization vertex ids must be distinct"));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shuffle = Permutation::random(m, &mut rng);
    let order: Vec<usize> = (0..m).map(|i| vertices[shuffle.apply(i)]).collect();

    // Circle method: positions 0..m-2 sit on a circle, position m-1 is fixed.
    // Round r pairs the fixed position with r, and (r+j, r-j) mod (m-1) for
    // j = 1..m/2-1.
    let ring = m - 1;
    let mut rounds = Vec::with_capacity(ring);
    for r in 0..ring {
        let mut cycles = Vec::with_capacity(m / 2);
        cycles.push(TwoCycle::new(order[m - 1], order[r])?);
        for j in 1..m / 2 {
            let a = (r + j) % ring;
            let b = (r + ring - j) % ring;
            cycles.push(TwoCycle::new(order[a], order[b])?);
        }
        rounds.push(CycleBatch::new(cycles)?);
    }

    Ok(CycleFactorization { rounds, vertex_count: m })
}

/// Randomly pair the rounds of two factorizations without replacement.
///
/// Both factorizations must have the same number of rounds. The pairing is a
/// seeded uniform bijection between round indices; entry `l` of the result is
/// (round l of `fx`, round sigma(l) of `fy`).
pub fn pair_rounds(
    fx: &CycleFactorization,
    fy: &CycleFactorization,
    seed: u64,
) -> Result<Vec<(CycleBatch, CycleBatch)>> {
    if fx.num_rounds() != fy.num_rounds() {
        return Err(Error::dim(format!(
            "cannot pair factorizations with {} and {} rounds",
            fx.num_rounds(),
            fy.num_rounds()
        )));
    }
    let r = fx.num_rounds();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = Permutation::random(r, &mut rng);
    Ok((0..r)
        .map(|l| (fx.rounds[l].clone(), fy.rounds[sigma.apply(l)].clone()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    /// Every unordered pair covered exactly once, every round disjoint.
    fn assert_exact_cover(vertices: &[usize], f: &CycleFactorization) {
        let m = vertices.len();
        assert_eq!(f.num_rounds(), m - 1);
        let mut seen = BTreeSet::new();
        for round in f.rounds() {
            assert_eq!(round.len(), m / 2);
            for c in round.cycles() {
                assert!(seen.insert((c.u(), c.v())), "pair ({},{}) repeated", c.u(), c.v());
            }
        }
        assert_eq!(seen.len(), m * (m - 1) / 2);
        let ids: BTreeSet<usize> = vertices.iter().copied().collect();
        for (u, v) in seen {
            assert!(ids.contains(&u) && ids.contains(&v));
        }
    }

    #[test]
    fn m2_single_round() {
        let f = one_factorization(&[7, 3], 0).unwrap();
        assert_eq!(f.num_rounds(), 1);
        let c = f.rounds()[0].cycles()[0];
        assert_eq!((c.u(), c.v()), (3, 7));
    }

    #[test]
    fn m4_exact_cover() {
        let f = one_factorization(&[10, 11, 12, 13], 5).unwrap();
        assert_exact_cover(&[10, 11, 12, 13], &f);
    }

    #[test]
    fn all_even_sizes_up_to_64() {
        for m in (2..=64).step_by(2) {
            let vertices: Vec<usize> = (0..m).map(|i| 3 * i + 1).collect();
            let f = one_factorization(&vertices, m as u64).unwrap();
            assert_exact_cover(&vertices, &f);
        }
    }

    #[test]
    fn rejects_odd_and_duplicates() {
        assert!(one_factorization(&[1, 2, 3], 0).is_err());
        assert!(one_factorization(&[], 0).is_err());
        assert!(one_factorization(&[1, 2, 2, 4], 0).is_err());
    }

    #[test]
    fn deterministic_in_seed() {
        let v: Vec<usize> = (0..8).collect();
        let a = one_factorization(&v, 42).unwrap();
        let b = one_factorization(&v, 42).unwrap();
        for (ra, rb) in a.rounds().iter().zip(b.rounds()) {
            assert_eq!(ra, rb);
        }
        let c = one_factorization(&v, 43).unwrap();
        assert!(
            a.rounds().iter().zip(c.rounds()).any(|(x, y)| x != y),
            "different seeds should shuffle differently"
        );
    }

    #[test]
    fn pair_rounds_m2_is_forced() {
        let fx = one_factorization(&[0, 1], 1).unwrap();
        let fy = one_factorization(&[2, 3], 2).unwrap();
        let pairs = pair_rounds(&fx, &fy, 3).unwrap();
        assert_eq!(pairs.len(), 1);
    }

    #[test]
    fn pair_rounds_rejects_mismatch() {
        let fx = one_factorization(&[0, 1], 1).unwrap();
        let fy = one_factorization(&[2, 3, 4, 5], 2).unwrap();
        assert!(pair_rounds(&fx, &fy, 3).is_err());
    }

    #[test]
    fn pair_rounds_bijections_roughly_uniform() {
        // m = 4: 3 rounds, 3! = 6 possible bijections. Identify a bijection by
        // which fy round each fx round got. Expect each within 5 sigma of
        // uniform over 10^4 seeds.
        let fx = one_factorization(&[0, 1, 2, 3], 100).unwrap();
        let fy = one_factorization(&[4, 5, 6, 7], 200).unwrap();
        let mut counts = std::collections::HashMap::new();
        let trials = 10_000u64;
        for seed in 0..trials {
            let pairs = pair_rounds(&fx, &fy, seed).unwrap();
            let key: Vec<usize> = pairs
                .iter()
                .map(|(_, by)| fy.rounds().iter().position(|r| r == by).unwrap())
                .collect();
            *counts.entry(key).or_insert(0u64) += 1;
        }
        assert_eq!(counts.len(), 6, "all 6 bijections should occur");
        let p = 1.0 / 6.0;
        let expected = trials as f64 * p;
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        for (key, count) in counts {
            let dev = (count as f64 - expected).abs();
            assert!(dev < 5.0 * sigma, "bijection {key:?} count {count} deviates {dev:.1}");
        }
    }

    #[test]
    fn pair_rounds_deterministic() {
        let fx = one_factorization(&[0, 1, 2, 3, 4, 5], 9).unwrap();
        let fy = one_factorization(&[6, 7, 8, 9, 10, 11], 8).unwrap();
        assert_eq!(pair_rounds(&fx, &fy, 77).unwrap(), pair_rounds(&fx, &fy, 77).unwrap());
    }
}
