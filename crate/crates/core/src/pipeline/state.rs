//! Anchor-relative matching state.
//!
//! Only permutations into the anchor are stored; every cross-shape
//! correspondence is derived by composition, which makes cycle consistency
//! structural rather than something to maintain.

use crate::descriptors::PairInits;
use crate::error::{Error, Result};
use crate::perm::Permutation;

#[derive(Debug, Clone)]
pub struct MatchingState {
    anchor: usize,
    /// perms[i] = P_{i -> anchor}; the anchor's own slot is the identity.
    perms: Vec<Permutation>,
    iteration: usize,
}

impl MatchingState {
    pub fn new(anchor: usize, perms: Vec<Permutation>) -> Result<MatchingState> {
        if anchor >= perms.len() {
            return Err(Error::param(format!(
                "anchor {anchor} out of range for {} shapes",
                perms.len()
            )));
        }
        let n = perms[anchor].len();
        if perms.iter().any(|p| p.len() != n) {
            return Err(Error::dim("stored permutations disagree in length"));
        }
        if !perms[anchor].is_identity() {
            return Err(Error::param("anchor slot must hold the identity"));
        }
        Ok(MatchingState { anchor, perms, iteration: 0 })
    }

    pub fn from_inits(anchor: usize, inits: &PairInits, n_vertices: usize) -> Result<MatchingState> {
        let n_shapes = inits.n_shapes();
        let perms = (0..n_shapes)
            .map(|i| {
                if i == anchor {
                    Permutation::identity(n_vertices)
                } else {
                    inits.get(i, anchor)
                }
            })
            .collect();
        MatchingState::new(anchor, perms)
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }

    pub fn n_shapes(&self) -> usize {
        self.perms.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.perms[self.anchor].len()
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn advance_iteration(&mut self) {
        self.iteration += 1;
    }

    /// P_{i -> anchor}. The anchor's own entry is the identity.
    pub fn to_anchor(&self, i: usize) -> &Permutation {
        &self.perms[i]
    }

    pub fn set_to_anchor(&mut self, i: usize, p: Permutation) -> Result<()> {
        if i == self.anchor {
            return Err(Error::param("cannot replace the anchor's identity slot"));
        }
        if p.len() != self.n_vertices() {
            return Err(Error::dim(format!(
                "permutation of length {} in a {}-vertex state",
                p.len(),
                self.n_vertices()
            )));
        }
        self.perms[i] = p;
        Ok(())
    }

    /// Derived correspondence P_{i -> j} = P_{i -> A} . P_{j -> A}^{-1}.
    pub fn derived(&self, i: usize, j: usize) -> Permutation {
        if i == j {
            return Permutation::identity(self.n_vertices());
        }
        if j == self.anchor {
            return self.perms[i].clone();
        }
        let to_j = self.perms[j].inverse();
        if i == self.anchor {
            return to_j;
        }
        self.perms[i].then(&to_j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_state(n_shapes: usize, n: usize, anchor: usize, seed: u64) -> MatchingState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let perms = (0..n_shapes)
            .map(|i| {
                if i == anchor {
                    Permutation::identity(n)
                } else {
                    Permutation::random(n, &mut rng)
                }
            })
            .collect();
        MatchingState::new(anchor, perms).unwrap()
    }

    #[test]
    fn derived_compositions_are_cycle_consistent() {
        let state = random_state(5, 12, 2, 9);
        for i in 0..5 {
            for j in 0..5 {
                for k in 0..5 {
                    let ij = state.derived(i, j);
                    let jk = state.derived(j, k);
                    let ik = state.derived(i, k);
                    assert_eq!(ij.then(&jk).as_slice(), ik.as_slice());
                }
            }
        }
    }

    #[test]
    fn derived_special_cases() {
        let state = random_state(4, 8, 1, 3);
        assert!(state.derived(2, 2).is_identity());
        assert_eq!(state.derived(3, 1).as_slice(), state.to_anchor(3).as_slice());
        assert!(state
            .derived(1, 3)
            .then(state.to_anchor(3))
            .is_identity());
    }

    #[test]
    fn anchor_slot_is_protected() {
        let mut state = random_state(3, 6, 0, 1);
        assert!(state.set_to_anchor(0, Permutation::identity(6)).is_err());
        assert!(state.set_to_anchor(1, Permutation::identity(5)).is_err());
        state.set_to_anchor(1, Permutation::identity(6)).unwrap();
    }

    #[test]
    fn construction_validated() {
        let id = Permutation::identity(4);
        assert!(MatchingState::new(3, vec![id.clone(), id.clone()]).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let swapped = Permutation::random(4, &mut rng);
        // Anchor slot must be identity (probability of random identity here is tiny).
        if !swapped.is_identity() {
            assert!(MatchingState::new(0, vec![swapped, id]).is_err());
        }
    }
}
