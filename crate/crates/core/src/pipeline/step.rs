//! One triplet refinement step.
//!
//! Three sub-iterations, one per inconsistency source (the X-Y map, the Y-Z
//! map, and their composition). Each ranks vertices by how much they
//! contribute to the source's distortion, organizes all pairwise swaps of the
//! worst m into m-1 rounds of disjoint transpositions, and for every round
//! poses the joint acceptance of the X-side and Y-side swaps as a QUBO.

use crate::error::{Error, Result};
use crate::perm::{cae_apply, one_factorization, pair_rounds, worst_vertices, Permutation};
use crate::qubo::{build_qubo_with_constant, kernelize, TripletOracles};
use crate::seed::derive;
use crate::solve::QuboSolver;

#[derive(Debug, Clone)]
pub struct StepOptions {
    /// Worst-vertex set size (even, >= 2, <= n).
    pub m: usize,
    pub seed: u64,
    /// Revert a round whose exact energy delta is positive.
    pub monotone_guard: bool,
    /// Rebuild QUBO coefficients against live permutations every round.
    /// When off, coefficients come from the sub-iteration-start snapshot.
    pub strict_rebuild: bool,
}

#[derive(Debug, Clone)]
pub struct StepTrace {
    pub initial_energy: f64,
    pub final_energy: f64,
    /// Exact triplet energy after every round, 3*(m-1) entries.
    pub energies: Vec<f64>,
    pub rounds_accepted: usize,
    pub rounds_reverted: usize,
}

/// Refines (P_XY, P_YZ); P_XZ is their composition throughout, so the
/// returned pair stays cycle-consistent by construction.
pub fn three_shape_step(
    oracles: &TripletOracles,
    p_xy: &Permutation,
    p_yz: &Permutation,
    solver: &dyn QuboSolver,
    opts: &StepOptions,
) -> Result<(Permutation, Permutation, StepTrace)> {
    let n = oracles.n();
    if opts.m > n {
        return Err(Error::param(format!(
            "worst-vertex set size {} exceeds vertex count {n}",
            opts.m
        )));
    }
    let mut p_xy = p_xy.clone();
    let mut p_yz = p_yz.clone();
    let mut energy = oracles.triplet_energy(&p_xy, &p_yz)?;

    let mut trace = StepTrace {
        initial_energy: energy,
        final_energy: energy,
        energies: Vec::with_capacity(3 * (opts.m.saturating_sub(1))),
        rounds_accepted: 0,
        rounds_reverted: 0,
    };

    for sub in 0..3u64 {
        // Worst-vertex sets: ranked on the sub-iteration's source map, then
        // carried to the other shapes through the current permutations so
        // both updated maps touch the same underlying vertices.
        let (set_x, set_y) = match sub {
            0 => {
                let vx = worst_vertices(&oracles.xy, &p_xy, opts.m)?;
                let vy = vx.iter().map(|&v| p_xy.apply(v)).collect::<Vec<_>>();
                (vx, vy)
            }
            1 => {
                let vy = worst_vertices(&oracles.yz, &p_yz, opts.m)?;
                let inv_xy = p_xy.inverse();
                let vx = vy.iter().map(|&v| inv_xy.apply(v)).collect::<Vec<_>>();
                (vx, vy)
            }
            _ => {
                let p_xz = p_xy.then(&p_yz);
                let vx = worst_vertices(&oracles.xz, &p_xz, opts.m)?;
                let vy = vx.iter().map(|&v| p_xy.apply(v)).collect::<Vec<_>>();
                (vx, vy)
            }
        };

        let fx = one_factorization(&set_x, derive(opts.seed, &[sub, 0]))?;
        let fy = one_factorization(&set_y, derive(opts.seed, &[sub, 1]))?;
        let rounds = pair_rounds(&fx, &fy, derive(opts.seed, &[sub, 2]))?;

        let snapshot_xy = p_xy.clone();
        let snapshot_yz = p_yz.clone();
        let snapshot_energy = energy;

        for (round_idx, (batch_x, batch_y)) in rounds.iter().enumerate() {
            let qubo = if opts.strict_rebuild {
                build_qubo_with_constant(oracles, &p_xy, &p_yz, batch_x, batch_y, energy)?
            } else {
                build_qubo_with_constant(
                    oracles,
                    &snapshot_xy,
                    &snapshot_yz,
                    batch_x,
                    batch_y,
                    snapshot_energy,
                )?
            };
            let reduced = kernelize(&qubo);
            let bits = if reduced.is_empty() {
                reduced.expand(&[])
            } else {
                let solution =
                    solver.solve(&reduced, derive(opts.seed, &[sub, 3, round_idx as u64]))?;
                reduced.expand(&solution.best.bits)
            };

            // Predicted change relative to the all-zeros (no-op) assignment.
            let predicted = qubo.evaluate(&bits);
            if predicted < 0.0 {
                let alpha = &bits[..batch_x.len()];
                let beta = &bits[batch_x.len()..];
                let new_xy = cae_apply(&p_xy, batch_x, alpha)?;
                let new_yz = cae_apply(&p_yz, batch_y, beta)?;
                let delta = {
                    let old_xz = p_xy.then(&p_yz);
                    let new_xz = new_xy.then(&new_yz);
                    oracles.xy.energy_delta(&p_xy, &new_xy)?
                        + oracles.yz.energy_delta(&p_yz, &new_yz)?
                        + oracles.xz.energy_delta(&old_xz, &new_xz)?
                };
                if opts.monotone_guard && delta > 0.0 {
                    trace.rounds_reverted += 1;
                } else {
                    p_xy = new_xy;
                    p_yz = new_yz;
                    energy += delta;
                    trace.rounds_accepted += 1;
                }
            }
            trace.energies.push(energy);
        }
    }

    trace.final_energy = energy;
    Ok((p_xy, p_yz, trace))
}
