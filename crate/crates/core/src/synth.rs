//! Deterministic synthetic shapes for tests, benchmarks, and desk
//! experiments.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::perm::Permutation;

/// Flat rows x cols vertex grid on the unit square, each cell split into two
/// triangles. Vertex (r, c) has index r*cols + c.
pub fn grid_mesh(rows: usize, cols: usize) -> Result<Mesh> {
    grid_with_height(rows, cols, |_, _| 0.0)
}

/// Grid with a smooth seeded height field: a short sum of random sinusoids,
/// scaled by `amplitude`. Breaks the flat grid's symmetries so descriptors
/// and geodesics become vertex-distinctive.
pub fn bumpy_grid(rows: usize, cols: usize, amplitude: f64, seed: u64) -> Result<Mesh> {
    if !amplitude.is_finite() || amplitude < 0.0 {
        return Err(Error::param(format!("amplitude must be finite and >= 0, got {amplitude}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = Vec::with_capacity(3);
    for _ in 0..3 {
        terms.push((
            rng.gen_range(0.4..1.0),
            rng.gen_range(1.0..3.5) * PI,
            rng.gen_range(1.0..3.5) * PI,
            rng.gen_range(0.0..2.0 * PI),
            rng.gen_range(0.0..2.0 * PI),
        ));
    }
    grid_with_height(rows, cols, move |x, y| {
        let mut z = 0.0;
        for &(a, fx, fy, px, py) in &terms {
            z += a * (fx * x + px).sin() * (fy * y + py).sin();
        }
        amplitude * z / 3.0
    })
}

fn grid_with_height(
    rows: usize,
    cols: usize,
    height: impl Fn(f64, f64) -> f64,
) -> Result<Mesh> {
    if rows < 2 || cols < 2 {
        return Err(Error::param(format!("grid needs at least 2x2 vertices, got {rows}x{cols}")));
    }
    let mut vertices = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let x = c as f64 / (cols - 1) as f64;
            let y = r as f64 / (rows - 1) as f64;
            vertices.push([x, y, height(x, y)]);
        }
    }
    let mut faces = Vec::with_capacity(2 * (rows - 1) * (cols - 1));
    for r in 0..rows - 1 {
        for c in 0..cols - 1 {
            let v00 = r * cols + c;
            let v01 = v00 + 1;
            let v10 = v00 + cols;
            let v11 = v10 + 1;
            faces.push([v00, v01, v11]);
            faces.push([v00, v11, v10]);
        }
    }
    Mesh::new(vertices, faces, None)
}

/// Unit sphere from a subdivided icosahedron: 12, 42, 162, ... vertices for
/// 0, 1, 2, ... subdivision levels. Centrally symmetric: every vertex has an
/// exact antipode.
pub fn icosphere(subdivisions: usize) -> Result<Mesh> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<[f64; 3]> = vec![
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ];
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..subdivisions {
        let mut midpoints: std::collections::HashMap<(usize, usize), usize> =
            std::collections::HashMap::new();
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<[f64; 3]>| -> usize {
            let key = (a.min(b), a.max(b));
            *midpoints.entry(key).or_insert_with(|| {
                let pa = vertices[a];
                let pb = vertices[b];
                vertices.push([
                    (pa[0] + pb[0]) / 2.0,
                    (pa[1] + pb[1]) / 2.0,
                    (pa[2] + pb[2]) / 2.0,
                ]);
                vertices.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.push([a, ab, ca]);
            next.push([b, bc, ab]);
            next.push([c, ca, bc]);
            next.push([ab, bc, ca]);
        }
        faces = next;
    }

    for v in &mut vertices {
        let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        *v = [v[0] / len, v[1] / len, v[2] / len];
    }
    Mesh::new(vertices, faces, None)
}

/// Relabels vertices: vertex i of the input becomes vertex sigma(i) of the
/// output, so sigma is exactly the ground-truth correspondence from the
/// input to the copy. Geometry, connectivity, and labels carry over.
pub fn relabel(mesh: &Mesh, sigma: &Permutation) -> Result<Mesh> {
    let n = mesh.n();
    if sigma.len() != n {
        return Err(Error::dim(format!(
            "permutation of length {} on a {n}-vertex mesh",
            sigma.len()
        )));
    }
    let mut vertices = vec![[0.0; 3]; n];
    for (i, &v) in mesh.vertices().iter().enumerate() {
        vertices[sigma.apply(i)] = v;
    }
    let faces = mesh
        .faces()
        .iter()
        .map(|f| [sigma.apply(f[0]), sigma.apply(f[1]), sigma.apply(f[2])])
        .collect();
    let side_labels = mesh.side_labels().map(|labels| {
        let mut out = vec![0u8; n];
        for (i, &l) in labels.iter().enumerate() {
            out[sigma.apply(i)] = l;
        }
        out
    });
    Mesh::new(vertices, faces, side_labels)
}

/// Seeded random relabeling; returns the copy and the ground truth.
pub fn relabeled_copy(mesh: &Mesh, seed: u64) -> Result<(Mesh, Permutation)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = Permutation::random(mesh.n(), &mut rng);
    Ok((relabel(mesh, &sigma)?, sigma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::geodesic_all_pairs;

    #[test]
    fn grid_has_expected_counts() {
        let m = grid_mesh(10, 20).unwrap();
        assert_eq!(m.n(), 200);
        assert_eq!(m.faces().len(), 2 * 9 * 19);
    }

    #[test]
    fn bumpy_grid_is_deterministic_and_bounded() {
        let a = bumpy_grid(5, 7, 0.3, 9).unwrap();
        let b = bumpy_grid(5, 7, 0.3, 9).unwrap();
        let c = bumpy_grid(5, 7, 0.3, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        for v in a.vertices() {
            assert!(v[2].abs() <= 0.3 + 1e-12);
        }
    }

    #[test]
    fn icosphere_counts_and_radius() {
        let m = icosphere(1).unwrap();
        assert_eq!(m.n(), 42);
        assert_eq!(m.faces().len(), 80);
        for v in m.vertices() {
            let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            assert!((r - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn icosphere_is_centrally_symmetric() {
        let m = icosphere(1).unwrap();
        for v in m.vertices() {
            let target = [-v[0], -v[1], -v[2]];
            let found = m.vertices().iter().any(|w| {
                (w[0] - target[0]).abs() < 1e-9
                    && (w[1] - target[1]).abs() < 1e-9
                    && (w[2] - target[2]).abs() < 1e-9
            });
            assert!(found, "no antipode for {v:?}");
        }
    }

    #[test]
    fn relabel_preserves_geodesics_through_sigma() {
        let base = bumpy_grid(4, 5, 0.2, 1).unwrap();
        let (copy, sigma) = relabeled_copy(&base, 7).unwrap();
        assert_eq!(copy.n(), base.n());
        let g_base = geodesic_all_pairs(&base);
        let g_copy = geodesic_all_pairs(&copy);
        for i in 0..base.n() {
            for j in 0..base.n() {
                let d1 = g_base.matrix().get(i, j);
                let d2 = g_copy.matrix().get(sigma.apply(i), sigma.apply(j));
                assert!((d1 - d2).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn relabel_rejects_wrong_length() {
        let base = grid_mesh(3, 3).unwrap();
        let sigma = Permutation::identity(4);
        assert!(relabel(&base, &sigma).is_err());
    }

    #[test]
    fn degenerate_grids_rejected() {
        assert!(grid_mesh(1, 5).is_err());
        assert!(bumpy_grid(2, 2, -0.1, 0).is_err());
    }
}
