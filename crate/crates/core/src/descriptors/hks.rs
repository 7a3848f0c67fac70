//! Heat-kernel-signature descriptors.
//!
//! Cotangent Laplace-Beltrami operator with a lumped (barycentric) mass
//! matrix, symmetrized as M^{-1/2} L M^{-1/2} and decomposed with a dense
//! symmetric eigensolver. HKS(v, t) = sum_k exp(-lambda_k t) phi_k(v)^2 over
//! the smallest eigenpairs, sampled at log-spaced times and row-normalized.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::mesh::Mesh;

pub const DEFAULT_NUM_TIMES: usize = 16;

/// Default eigenpair count: 100, capped at n-2 for small meshes.
pub fn default_num_eigs(n: usize) -> usize {
    100.min(n.saturating_sub(2)).max(2)
}

/// Row-major n x d table of per-vertex descriptor values.
#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorSet {
    n: usize,
    d: usize,
    data: Vec<f64>,
}

impl DescriptorSet {
    /// Wraps a row-major n x d table. Panics on a size mismatch.
    pub fn from_raw(n: usize, d: usize, data: Vec<f64>) -> DescriptorSet {
        assert_eq!(data.len(), n * d, "descriptor table size mismatch");
        DescriptorSet { n, d, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, v: usize) -> &[f64] {
        &self.data[v * self.d..(v + 1) * self.d]
    }
}

pub fn hks(mesh: &Mesh, num_eigs: usize, num_times: usize) -> Result<DescriptorSet> {
    let n = mesh.n();
    if num_eigs < 2 || num_eigs > n {
        return Err(Error::param(format!(
            "num_eigs must be in [2, {n}], got {num_eigs}"
        )));
    }
    if num_times < 1 {
        return Err(Error::param("num_times must be at least 1"));
    }

    let (stiffness, mass) = cotan_system(mesh)?;
    let inv_sqrt_mass: Vec<f64> = mass.iter().map(|&m| 1.0 / m.sqrt()).collect();

    // Symmetrized operator keeps the eigenproblem in symmetric form.
    let mut sym = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            sym[(i, j)] = stiffness[(i, j)] * inv_sqrt_mass[i] * inv_sqrt_mass[j];
        }
    }

    let eigen = nalgebra::SymmetricEigen::new(sym.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[a].partial_cmp(&eigen.eigenvalues[b]).unwrap());
    let kept = &order[..num_eigs];

    let mut lambdas = Vec::with_capacity(num_eigs);
    let mut phis: Vec<DVector<f64>> = Vec::with_capacity(num_eigs);
    let mut max_residual = 0.0f64;
    for &k in kept {
        let lambda = eigen.eigenvalues[k];
        let psi = eigen.eigenvectors.column(k);
        let residual = (&sym * psi - psi * lambda).amax();
        max_residual = max_residual.max(residual);
        lambdas.push(lambda.max(0.0));
        // phi = M^{-1/2} psi completes the generalized eigenvector.
        let phi = DVector::from_fn(n, |v, _| psi[v] * inv_sqrt_mass[v]);
        phis.push(phi);
    }
    let lambda_max = *lambdas.last().unwrap();
    let scale = lambda_max.max(1.0);
    if max_residual > 1e-7 * scale {
        return Err(Error::eigen(format!(
            "eigensolver did not converge: residual {max_residual:.3e} (scale {scale:.3e})"
        )));
    }
    let lambda_2 = lambdas[1];
    if lambda_2 <= lambda_max * 1e-12 {
        return Err(Error::eigen(format!(
            "second eigenvalue {lambda_2:.3e} is numerically zero"
        )));
    }

    let ln10_4 = 4.0 * std::f64::consts::LN_10;
    let t_min = ln10_4 / lambda_max;
    let t_max = ln10_4 / lambda_2;
    let times: Vec<f64> = if num_times == 1 {
        vec![t_min]
    } else {
        let (a, b) = (t_min.ln(), t_max.ln());
        (0..num_times)
            .map(|i| (a + (b - a) * i as f64 / (num_times - 1) as f64).exp())
            .collect()
    };

    let labeled = mesh.side_labels().is_some();
    let d = num_times + usize::from(labeled);
    let mut data = vec![0.0; n * d];
    for v in 0..n {
        let row = &mut data[v * d..v * d + num_times];
        for (ti, &t) in times.iter().enumerate() {
            let mut acc = 0.0;
            for (lambda, phi) in lambdas.iter().zip(&phis) {
                let f = phi[v];
                acc += (-lambda * t).exp() * f * f;
            }
            row[ti] = acc;
        }
        let norm: f64 = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-300 {
            for x in row.iter_mut() {
                *x /= norm;
            }
        }
    }

    if let Some(labels) = mesh.side_labels() {
        // Weight = mean row norm before augmentation (1 after normalization,
        // computed literally rather than assumed).
        let mean_norm: f64 = (0..n)
            .map(|v| {
                data[v * d..v * d + num_times]
                    .iter()
                    .map(|x| x * x)
                    .sum::<f64>()
                    .sqrt()
            })
            .sum::<f64>()
            / n as f64;
        for v in 0..n {
            data[v * d + num_times] = f64::from(labels[v]) * mean_norm;
        }
    }

    Ok(DescriptorSet { n, d, data })
}

/// Cotangent stiffness matrix and lumped per-vertex mass.
fn cotan_system(mesh: &Mesh) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let n = mesh.n();
    let mut stiffness = DMatrix::<f64>::zeros(n, n);
    let mut mass = vec![0.0f64; n];

    for f in mesh.faces() {
        let [a, b, c] = *f;
        let pa = mesh.vertices()[a];
        let pb = mesh.vertices()[b];
        let pc = mesh.vertices()[c];
        let area2 = crate::mesh::norm(crate::mesh::cross(
            crate::mesh::sub(pb, pa),
            crate::mesh::sub(pc, pa),
        ));
        let area = area2 / 2.0;
        for v in [a, b, c] {
            mass[v] += area / 3.0;
        }
        // Corner (opposite edge): cot weight, skipped when degenerate.
        for (corner, e1, e2) in [(a, b, c), (b, c, a), (c, a, b)] {
            let p = mesh.vertices()[corner];
            let q = mesh.vertices()[e1];
            let r = mesh.vertices()[e2];
            let u = crate::mesh::sub(q, p);
            let v = crate::mesh::sub(r, p);
            let cross_norm = crate::mesh::norm(crate::mesh::cross(u, v));
            let nu = crate::mesh::norm(u);
            let nv = crate::mesh::norm(v);
            if nu < 1e-24 || nv < 1e-24 || cross_norm / (nu * nv) < 1e-12 {
                continue;
            }
            let cot = crate::mesh::dot(u, v) / cross_norm;
            let w = cot / 2.0;
            stiffness[(e1, e2)] -= w;
            stiffness[(e2, e1)] -= w;
            stiffness[(e1, e1)] += w;
            stiffness[(e2, e2)] += w;
        }
    }

    for (v, &m) in mass.iter().enumerate() {
        if m <= 0.0 || !m.is_finite() {
            return Err(Error::eigen(format!("vertex {v} has non-positive lumped mass {m}")));
        }
    }
    Ok((stiffness, mass))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{bumpy_grid, icosphere, relabel};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cosine(a: &[f64], b: &[f64]) -> f64 {
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        dot / (na * nb)
    }

    #[test]
    fn sphere_antipodes_have_near_identical_rows() {
        let m = icosphere(1).unwrap();
        let desc = hks(&m, default_num_eigs(m.n()), DEFAULT_NUM_TIMES).unwrap();
        for (v, pos) in m.vertices().iter().enumerate() {
            let target = [-pos[0], -pos[1], -pos[2]];
            let anti = m
                .vertices()
                .iter()
                .position(|w| {
                    (w[0] - target[0]).abs() < 1e-9
                        && (w[1] - target[1]).abs() < 1e-9
                        && (w[2] - target[2]).abs() < 1e-9
                })
                .unwrap();
            let c = cosine(desc.row(v), desc.row(anti));
            assert!(c > 0.99, "antipodal cosine {c} at vertex {v}");
        }
    }

    #[test]
    fn single_time_gives_one_column() {
        let m = bumpy_grid(4, 5, 0.2, 1).unwrap();
        let desc = hks(&m, 6, 1).unwrap();
        assert_eq!(desc.d(), 1);

        let labeled = m
            .clone()
            .with_side_labels(vec![0; 20])
            .unwrap();
        let desc = hks(&labeled, 6, 1).unwrap();
        assert_eq!(desc.d(), 2);
    }

    #[test]
    fn deterministic_across_calls() {
        let m = bumpy_grid(5, 5, 0.3, 2).unwrap();
        let a = hks(&m, 10, 8).unwrap();
        let b = hks(&m, 10, 8).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rows_have_unit_norm_before_label_column() {
        let m = bumpy_grid(5, 6, 0.25, 4).unwrap();
        let desc = hks(&m, 12, 6).unwrap();
        for v in 0..desc.n() {
            let norm: f64 = desc.row(v).iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12, "row {v} norm {norm}");
        }
    }

    #[test]
    fn label_column_uses_mean_row_norm_weight() {
        let m = bumpy_grid(4, 4, 0.2, 5).unwrap();
        let labels: Vec<u8> = (0..16).map(|v| u8::from(v % 3 == 0)).collect();
        let labeled = m.with_side_labels(labels.clone()).unwrap();
        let desc = hks(&labeled, 8, 4).unwrap();
        assert_eq!(desc.d(), 5);
        for v in 0..desc.n() {
            let col = desc.row(v)[4];
            if labels[v] == 0 {
                assert_eq!(col, 0.0);
            } else {
                assert!((col - 1.0).abs() < 1e-9, "label weight {col}");
            }
        }
    }

    #[test]
    fn invariant_to_vertex_reordering() {
        // Asymmetric bumps keep the spectrum simple, so the cut at num_eigs
        // does not split a degenerate eigenspace.
        let m = bumpy_grid(5, 7, 0.35, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sigma = crate::perm::Permutation::random(m.n(), &mut rng);
        let shuffled = relabel(&m, &sigma).unwrap();
        let a = hks(&m, 12, 6).unwrap();
        let b = hks(&shuffled, 12, 6).unwrap();
        for v in 0..m.n() {
            let ra = a.row(v);
            let rb = b.row(sigma.apply(v));
            for (x, y) in ra.iter().zip(rb) {
                assert!((x - y).abs() < 1e-6, "vertex {v}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn parameter_validation() {
        let m = bumpy_grid(3, 3, 0.1, 0).unwrap();
        assert!(hks(&m, 1, 4).is_err());
        assert!(hks(&m, 10, 4).is_err()); // > n = 9
        assert!(hks(&m, 4, 0).is_err());
    }
}
