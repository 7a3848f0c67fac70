//! Assembly of the cycle-selection QUBO for one shape triplet (X, Y, Z).
//!
//! Candidate updates are disjoint two-cycle batches: alpha bits select cycles
//! acting on P_XY, beta bits select cycles acting on P_YZ. Writing
//! C_i = (c_i - I)P_XY, Ct_j = (ct_j - I)P_YZ, the composed map picks up
//! A_i = C_i P_YZ, B_j = P_XY Ct_j and the interaction K_ij = C_i Ct_j, all of
//! which stay sparse. Every term of the objective that is linear or quadratic
//! in the bits lands in the weight matrix; cross-index cubic and quartic
//! summands are truncated (see `dropped_energy` for the exact remainder).

use super::oracle::{EnergyArg, EnergyOracle, FieldMode};
use super::sparse::SparseMat;
use super::QuboProblem;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::perm::{CycleBatch, Permutation, TwoCycle};

/// The three pairwise oracles of a triplet, sharing one field mode.
pub struct TripletOracles<'a> {
    pub xy: EnergyOracle<'a>,
    pub yz: EnergyOracle<'a>,
    pub xz: EnergyOracle<'a>,
}

impl<'a> TripletOracles<'a> {
    pub fn new(
        fx: &'a DenseMatrix,
        fy: &'a DenseMatrix,
        fz: &'a DenseMatrix,
        mode: FieldMode,
    ) -> Result<Self> {
        if fx.n() != fy.n() || fy.n() != fz.n() {
            return Err(Error::dim(format!(
                "triplet fields disagree in size: {}, {}, {}",
                fx.n(),
                fy.n(),
                fz.n()
            )));
        }
        Ok(TripletOracles {
            xy: EnergyOracle::new(fx, fy, mode),
            yz: EnergyOracle::new(fy, fz, mode),
            xz: EnergyOracle::new(fx, fz, mode),
        })
    }

    pub fn n(&self) -> usize {
        self.xy.n_a()
    }

    pub fn mode(&self) -> FieldMode {
        self.xy.mode()
    }

    /// Total objective of the triplet state: the three pair distortions with
    /// the composed map P_XZ = P_XY . P_YZ.
    pub fn triplet_energy(&self, p_xy: &Permutation, p_yz: &Permutation) -> Result<f64> {
        let n = self.n();
        if p_xy.len() != n || p_yz.len() != n {
            return Err(Error::dim(format!(
                "permutations ({}, {}) do not match field size {n}",
                p_xy.len(),
                p_yz.len()
            )));
        }
        let p_xz = p_xy.then(p_yz);
        Ok(self.xy.energy_perm(p_xy)?
            + self.yz.energy_perm(p_yz)?
            + self.xz.energy_perm(&p_xz)?)
    }

    pub fn entries_evaluated(&self) -> u64 {
        self.xy.entries_evaluated() + self.yz.entries_evaluated() + self.xz.entries_evaluated()
    }

    pub fn reset_entries_evaluated(&self) {
        self.xy.reset_entries_evaluated();
        self.yz.reset_entries_evaluated();
        self.xz.reset_entries_evaluated();
    }
}

/// Builds the QUBO and computes the constant offset from scratch (three dense
/// permutation energies, O(n^2) each). Prefer `build_qubo_with_constant` in
/// iterative callers that already track the current energy.
pub fn build_qubo(
    oracles: &TripletOracles,
    p_xy: &Permutation,
    p_yz: &Permutation,
    batch_x: &CycleBatch,
    batch_y: &CycleBatch,
) -> Result<QuboProblem> {
    let constant = oracles.triplet_energy(p_xy, p_yz)?;
    build_qubo_with_constant(oracles, p_xy, p_yz, batch_x, batch_y, constant)
}

/// Builds the QUBO with a caller-supplied constant (the current triplet
/// energy). Runs in O(n * k^2) oracle entry evaluations; no term touches all
/// n^2 vertex pairs.
pub fn build_qubo_with_constant(
    oracles: &TripletOracles,
    p_xy: &Permutation,
    p_yz: &Permutation,
    batch_x: &CycleBatch,
    batch_y: &CycleBatch,
    constant: f64,
) -> Result<QuboProblem> {
    let n = oracles.n();
    if p_xy.len() != n || p_yz.len() != n {
        return Err(Error::dim(format!(
            "permutations ({}, {}) do not match field size {n}",
            p_xy.len(),
            p_yz.len()
        )));
    }
    let p_xz = p_xy.then(p_yz);
    let inv_xy = p_xy.inverse();
    let kx = batch_x.len();
    let ky = batch_y.len();

    // Sparse correction matrices, four entries each.
    let c_x: Vec<SparseMat> = batch_x
        .cycles()
        .iter()
        .map(|&ci| SparseMat::cycle_update(ci, p_xy))
        .collect::<Result<_>>()?;
    // C_i P_YZ = (c_i - I) P_XZ.
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
    // P_XY Ct_j = (c'_j - I) P_XZ where c'_j swaps the P_XY-preimages.
    let b_y: Vec<SparseMat> = batch_y
        .cycles()
        .iter()
        .map(|&cj| {
            let lifted = TwoCycle::new(inv_xy.apply(cj.u()), inv_xy.apply(cj.v()))?;
            SparseMat::cycle_update(lifted, &p_xz)
        })
        .collect::<Result<_>>()?;

    let arg_pxy = EnergyArg::Perm(p_xy);
    let arg_pyz = EnergyArg::Perm(p_yz);
    let arg_pxz = EnergyArg::Perm(&p_xz);

    let mut w = DenseMatrix::zeros(kx + ky);

    // Linear terms on the diagonal.
    for (i, (c, a)) in c_x.iter().zip(&a_x).enumerate() {
        let (c, a) = (EnergyArg::Sparse(c), EnergyArg::Sparse(a));
        let d = oracles.xy.energy_sym(arg_pxy, c)?
            + oracles.xz.energy_sym(arg_pxz, a)?
            + oracles.xy.energy_pair(c, c)?
            + oracles.xz.energy_pair(a, a)?;
        w.set(i, i, d);
    }
    for (j, (c, b)) in c_y.iter().zip(&b_y).enumerate() {
        let (c, b) = (EnergyArg::Sparse(c), EnergyArg::Sparse(b));
        let d = oracles.yz.energy_sym(arg_pyz, c)?
            + oracles.xz.energy_sym(arg_pxz, b)?
            + oracles.yz.energy_pair(c, c)?
            + oracles.xz.energy_pair(b, b)?;
        w.set(kx + j, kx + j, d);
    }

    // Same-side couplings. The pair coefficient is F(.,.) = 2E(.,.); storing
    // E on both (i,l) and (l,i) makes x^T W x reproduce it.
    for i in 0..kx {
        for l in (i + 1)..kx {
            let coupling = oracles
                .xy
                .energy_pair(EnergyArg::Sparse(&c_x[i]), EnergyArg::Sparse(&c_x[l]))?
                + oracles
                    .xz
                    .energy_pair(EnergyArg::Sparse(&a_x[i]), EnergyArg::Sparse(&a_x[l]))?;
            w.set(i, l, coupling);
            w.set(l, i, coupling);
        }
    }
    for j in 0..ky {
        for l in (j + 1)..ky {
            let coupling = oracles
                .yz
                .energy_pair(EnergyArg::Sparse(&c_y[j]), EnergyArg::Sparse(&c_y[l]))?
                + oracles
                    .xz
                    .energy_pair(EnergyArg::Sparse(&b_y[j]), EnergyArg::Sparse(&b_y[l]))?;
            w.set(kx + j, kx + l, coupling);
            w.set(kx + l, kx + j, coupling);
        }
    }

    // Cross-side couplings, all through the XZ pair energy.
    for i in 0..kx {
        for j in 0..ky {
            let k_ij = c_x[i].matmul(&c_y[j])?;
            let (a, b, k) = (
                EnergyArg::Sparse(&a_x[i]),
                EnergyArg::Sparse(&b_y[j]),
                EnergyArg::Sparse(&k_ij),
            );
            let mut g = oracles.xz.energy_sym(a, b)?;
            if k_ij.nnz() > 0 {
                g += oracles.xz.energy_sym(arg_pxz, k)?
                    + oracles.xz.energy_sym(a, k)?
                    + oracles.xz.energy_sym(b, k)?
                    + oracles.xz.energy_pair(k, k)?;
            }
            w.set(i, kx + j, g / 2.0);
            w.set(kx + j, i, g / 2.0);
        }
    }

    QuboProblem::new(w, constant)
}
