//! Exact accounting of the terms the QUBO builder truncates.
//!
//! The composed-map energy E_XZ(P'_XZ) expands into products of up to four
//! selection bits. Terms whose bits collapse (same index repeated) are kept in
//! the weight matrix; the genuinely cubic and quartic cross-index summands are
//! dropped. `dropped_energy` sums exactly those, so for every assignment
//!
//!   evaluate(bits) + constant + dropped_energy(bits) = true objective.
//!
//! Diagnostic only: the optimizer never calls this (it would cost more than
//! the truncation saves); tests use it to prove the builder exact-up-to-a-
//! known-remainder.

use super::build::TripletOracles;
use super::oracle::EnergyArg;
use super::sparse::SparseMat;
use crate::error::{Error, Result};
use crate::perm::{CycleBatch, Permutation, TwoCycle};

/// Sum of the truncated cross-index summands for one bit assignment.
pub fn dropped_energy(
    oracles: &TripletOracles,
    p_xy: &Permutation,
    p_yz: &Permutation,
    batch_x: &CycleBatch,
    batch_y: &CycleBatch,
    alpha: &[u8],
    beta: &[u8],
) -> Result<f64> {
    let kx = batch_x.len();
    let ky = batch_y.len();
    if alpha.len() != kx || beta.len() != ky {
        return Err(Error::dim(format!(
            "bit vectors ({}, {}) do not match batch sizes ({kx}, {ky})",
            alpha.len(),
            beta.len()
        )));
    }
    let n = oracles.n();
    if p_xy.len() != n || p_yz.len() != n {
        return Err(Error::dim(format!(
            "permutations ({}, {}) do not match field size {n}",
            p_xy.len(),
            p_yz.len()
        )));
    }

    let active_a: Vec<usize> = (0..kx).filter(|&i| alpha[i] != 0).collect();
    let active_b: Vec<usize> = (0..ky).filter(|&j| beta[j] != 0).collect();
    // Every truncated summand carries >= 3 distinct bits with both sides
    // represented, so fewer than two active (alpha, beta) combinations means
    // an exactly zero remainder.
    if active_a.len() * active_b.len() <= 1 {
        return Ok(0.0);
    }

    let p_xz = p_xy.then(p_yz);
    let inv_xy = p_xy.inverse();

    // A_i = C_i P_YZ, B_j = P_XY Ct_j, K_ij = C_i Ct_j, as in the builder.
    let c_x: Vec<SparseMat> = batch_x
        .cycles()
        .iter()
        .map(|&ci| SparseMat::cycle_update(ci, p_xy))
        .collect::<Result<_>>()?;
    let a_x: Vec<SparseMat> = batch_x
        .cycles()
        .iter()
        .map(|&ci| SparseMat::cycle_update(ci, &p_xz))
        .collect::<Result<_>>()?;
    let c_y: Vec<SparseMat> = batch_y
        .cycles()
        .iter()
        .map(|&cj| SparseMat::cycle_update(cj, p_yz))
        .collect::<Result<_>>()?;
    let b_y: Vec<SparseMat> = batch_y
        .cycles()
        .iter()
        .map(|&cj| {
            let lifted = TwoCycle::new(inv_xy.apply(cj.u()), inv_xy.apply(cj.v()))?;
            SparseMat::cycle_update(lifted, &p_xz)
        })
        .collect::<Result<_>>()?;
    let mut k_mat: Vec<Vec<SparseMat>> = Vec::with_capacity(kx);
    for ci in &c_x {
        let mut row = Vec::with_capacity(ky);
        for cj in &c_y {
            row.push(ci.matmul(cj)?);
        }
        k_mat.push(row);
    }

    let xz = &oracles.xz;
    let e = |l: &SparseMat, r: &SparseMat| {
        xz.energy_pair(EnergyArg::Sparse(l), EnergyArg::Sparse(r))
    };

    let mut total = 0.0;
    // alpha_q beta_j beta_l (j != l): B_j against K_ql.
    for &q in &active_a {
        for &j in &active_b {
            for &l in &active_b {
                if j != l {
                    total += e(&b_y[j], &k_mat[q][l])?;
                }
            }
        }
    }
    // alpha_i alpha_q beta_l (i != q): A_i against K_ql.
    for &i in &active_a {
        for &q in &active_a {
            if i == q {
                continue;
            }
            for &l in &active_b {
                total += e(&a_x[i], &k_mat[q][l])?;
            }
        }
    }
    // alpha_i beta_j beta_l (j != l): K_ij against B_l.
    for &i in &active_a {
        for &j in &active_b {
            for &l in &active_b {
                if j != l {
                    total += e(&k_mat[i][j], &b_y[l])?;
                }
            }
        }
    }
    // alpha_i beta_j alpha_q (i != q): K_ij against A_q.
    for &i in &active_a {
        for &q in &active_a {
            if i == q {
                continue;
            }
            for &j in &active_b {
                total += e(&k_mat[i][j], &a_x[q])?;
            }
        }
    }
    // alpha_i beta_j alpha_q beta_l, (i,j) != (q,l): K against K.
    for &i in &active_a {
        for &j in &active_b {
            for &q in &active_a {
                for &l in &active_b {
                    if (i, j) != (q, l) {
                        total += e(&k_mat[i][j], &k_mat[q][l])?;
                    }
                }
            }
        }
    }
    Ok(total)
}
