//! Triangle meshes and their distance fields.

mod geodesic;
mod io;

pub use geodesic::{gaussian_field, geodesic_all_pairs, GeodesicField, KernelField};
pub use io::{load_mesh, load_mesh_with_labels, read_side_labels, write_off, MeshFormat};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// A connected triangle mesh. Isolated vertices are pruned at construction,
/// preserving the relative order of the survivors, so every vertex is
/// referenced by at least one face.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    vertices: Vec<[f64; 3]>,
    faces: Vec<[usize; 3]>,
    side_labels: Option<Vec<u8>>,
}

impl Mesh {
    /// Builds a mesh from raw parts, pruning isolated vertices (labels are
    /// pruned in lockstep) and rejecting disconnected edge graphs.
    pub fn new(
        vertices: Vec<[f64; 3]>,
        faces: Vec<[usize; 3]>,
        side_labels: Option<Vec<u8>>,
    ) -> Result<Mesh> {
        let n_raw = vertices.len();
        for (vi, v) in vertices.iter().enumerate() {
            if !v.iter().all(|c| c.is_finite()) {
                return Err(Error::param(format!("vertex {vi} has non-finite coordinates")));
            }
        }
        if faces.is_empty() {
            return Err(Error::topology("mesh has no faces"));
        }
        for (fi, f) in faces.iter().enumerate() {
            for &idx in f {
                if idx >= n_raw {
                    return Err(Error::param(format!(
                        "face {fi} references vertex {idx}, but only {n_raw} vertices exist"
                    )));
                }
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::param(format!("face {fi} repeats a vertex index")));
            }
        }
        if let Some(labels) = &side_labels {
            if labels.len() != n_raw {
                return Err(Error::param(format!(
                    "{} side labels for {n_raw} vertices",
                    labels.len()
                )));
            }
            if let Some(bad) = labels.iter().position(|&l| l > 1) {
                return Err(Error::param(format!(
                    "side label at vertex {bad} is {}, expected 0 or 1",
                    labels[bad]
                )));
            }
        }

        // Prune isolated vertices, keeping survivor order.
        let mut referenced = vec![false; n_raw];
        for f in &faces {
            for &idx in f {
                referenced[idx] = true;
            }
        }
        let (vertices, faces, side_labels) = if referenced.iter().all(|&r| r) {
            (vertices, faces, side_labels)
        } else {
            let mut remap = vec![usize::MAX; n_raw];
            let mut kept = Vec::new();
            for (old, &r) in referenced.iter().enumerate() {
                if r {
                    remap[old] = kept.len();
                    kept.push(vertices[old]);
                }
            }
            let faces = faces
                .iter()
                .map(|f| [remap[f[0]], remap[f[1]], remap[f[2]]])
                .collect();
            let side_labels = side_labels.map(|labels| {
                labels
                    .iter()
                    .zip(&referenced)
                    .filter(|(_, &r)| r)
                    .map(|(&l, _)| l)
                    .collect()
            });
            (kept, faces, side_labels)
        };

        let mesh = Mesh { vertices, faces, side_labels };
        let components = mesh.component_count();
        if components > 1 {
            return Err(Error::topology(format!("{components} components")));
        }
        Ok(mesh)
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[[f64; 3]] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn side_labels(&self) -> Option<&[u8]> {
        self.side_labels.as_deref()
    }

    /// Replaces the per-vertex side labels. Length must match the (pruned)
    /// vertex count.
    pub fn with_side_labels(mut self, labels: Vec<u8>) -> Result<Mesh> {
        if labels.len() != self.n() {
            return Err(Error::param(format!(
                "{} side labels for {} vertices",
                labels.len(),
                self.n()
            )));
        }
        if let Some(bad) = labels.iter().position(|&l| l > 1) {
            return Err(Error::param(format!(
                "side label at vertex {bad} is {}, expected 0 or 1",
                labels[bad]
            )));
        }
        self.side_labels = Some(labels);
        Ok(self)
    }

    /// Unique undirected edges as (lo, hi) index pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::with_capacity(self.faces.len() * 3);
        for f in &self.faces {
            for (a, b) in [(f[0], f[1]), (f[1], f[2]), (f[0], f[2])] {
                edges.push((a.min(b), a.max(b)));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    fn component_count(&self) -> usize {
        let n = self.vertices.len();
        if n == 0 {
            return 0;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for f in &self.faces {
            for (a, b) in [(f[0], f[1]), (f[1], f[2])] {
                let ra = find(&mut parent, a);
                let rb = find(&mut parent, b);
                if ra != rb {
                    parent[ra] = rb;
                }
            }
        }
        (0..n).filter(|&v| find(&mut parent, v) == v).count()
    }

    /// Per-vertex unit normals, each the angle-weighted average of incident
    /// face normals. Vertices whose incident faces are all degenerate get a
    /// zero normal.
    pub fn vertex_normals(&self) -> Vec<[f64; 3]> {
        let mut acc = vec![[0.0f64; 3]; self.vertices.len()];
        for f in &self.faces {
            let [a, b, c] = *f;
            let pa = self.vertices[a];
            let pb = self.vertices[b];
            let pc = self.vertices[c];
            let cross = cross(sub(pb, pa), sub(pc, pa));
            let area2 = norm(cross);
            if area2 < 1e-24 {
                continue;
            }
            let face_normal = scale(cross, 1.0 / area2);
            for (v, prev, next) in [(a, pc, pb), (b, pa, pc), (c, pb, pa)] {
                let angle = corner_angle(self.vertices[v], prev, next);
                for k in 0..3 {
                    acc[v][k] += angle * face_normal[k];
                }
            }
        }
        for normal in &mut acc {
            let len = norm(*normal);
            if len > 1e-24 {
                *normal = scale(*normal, 1.0 / len);
            } else {
                *normal = [0.0; 3];
            }
        }
        acc
    }

    /// Displaces each vertex by z·normal with z ~ N(0, sigma2), seeded and
    /// deterministic. `sigma2` is a variance. Connectivity is unchanged.
    pub fn perturb_along_normals(&self, sigma2: f64, seed: u64) -> Result<Mesh> {
        if !sigma2.is_finite() || sigma2 < 0.0 {
            return Err(Error::param(format!("sigma2 must be finite and >= 0, got {sigma2}")));
        }
        if sigma2 == 0.0 {
            return Ok(self.clone());
        }
        let normals = self.vertex_normals();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dist = Normal::new(0.0, sigma2.sqrt())
            .map_err(|e| Error::param(format!("bad noise distribution: {e}")))?;
        let vertices = self
            .vertices
            .iter()
            .zip(&normals)
            .map(|(v, nrm)| {
                let z: f64 = dist.sample(&mut rng);
                [v[0] + z * nrm[0], v[1] + z * nrm[1], v[2] + z * nrm[2]]
            })
            .collect();
        Ok(Mesh {
            vertices,
            faces: self.faces.clone(),
            side_labels: self.side_labels.clone(),
        })
    }
}

pub(crate) fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn scale(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn corner_angle(at: [f64; 3], p: [f64; 3], q: [f64; 3]) -> f64 {
    let u = sub(p, at);
    let v = sub(q, at);
    let nu = norm(u);
    let nv = norm(v);
    if nu < 1e-24 || nv < 1e-24 {
        return 0.0;
    }
    (dot(u, v) / (nu * nv)).clamp(-1.0, 1.0).acos()
}
