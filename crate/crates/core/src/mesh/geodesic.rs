//! Geodesic distance fields and their Gaussian-filtered form.
//!
//! Distances are graph shortest paths over mesh edges with Euclidean edge
//! lengths, an approximation of surface geodesics that keeps the field exact
//! for the energies built on top of it.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

use super::Mesh;

/// All-pairs geodesic distances plus the diameter (max entry).
#[derive(Debug, Clone)]
pub struct GeodesicField {
    dist: DenseMatrix,
    diameter: f64,
}

impl GeodesicField {
    pub fn matrix(&self) -> &DenseMatrix {
        &self.dist
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn n(&self) -> usize {
        self.dist.n()
    }
}

/// Gaussian-filtered geodesics: values[i][j] = g(dist[i][j]) with
/// g(d) = exp(-(d/rho)^2 / 2) / (rho * sqrt(2*pi)).
#[derive(Debug, Clone)]
pub struct KernelField {
    values: DenseMatrix,
    rho: f64,
}

impl KernelField {
    pub fn matrix(&self) -> &DenseMatrix {
        &self.values
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

/// Dijkstra from every source over the edge graph.
pub fn geodesic_all_pairs(mesh: &Mesh) -> GeodesicField {
    let n = mesh.n();
    let mut adjacency = vec![Vec::new(); n];
    for (a, b) in mesh.edges() {
        let length = euclid(mesh.vertices()[a], mesh.vertices()[b]);
        adjacency[a].push((b, length));
        adjacency[b].push((a, length));
    }

    let mut dist = DenseMatrix::zeros(n);
    let mut row = vec![f64::INFINITY; n];
    for source in 0..n {
        row.fill(f64::INFINITY);
        dijkstra(&adjacency, source, &mut row);
        for (j, &d) in row.iter().enumerate() {
            // Mesh connectivity guarantees every vertex is reached.
            debug_assert!(d.is_finite());
            dist.set(source, j, d);
        }
    }

    // The two directions of a pair can differ by an ulp (edge lengths summed
    // in opposite order); force exact symmetry with the directional min.
    for i in 0..n {
        for j in (i + 1)..n {
            let d = dist.get(i, j).min(dist.get(j, i));
            dist.set(i, j, d);
            dist.set(j, i, d);
        }
    }

    let diameter = dist.max_abs();
    GeodesicField { dist, diameter }
}

pub fn gaussian_field(geo: &GeodesicField, rho: f64) -> Result<KernelField> {
    if !rho.is_finite() || rho <= 0.0 {
        return Err(Error::param(format!("rho must be finite and > 0, got {rho}")));
    }
    let n = geo.n();
    let peak = 1.0 / (rho * (2.0 * std::f64::consts::PI).sqrt());
    let mut values = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let z = geo.matrix().get(i, j) / rho;
            let v = peak * (-0.5 * z * z).exp();
            values.set(i, j, v);
            values.set(j, i, v);
        }
    }
    Ok(KernelField { values, rho })
}

struct HeapEntry {
    dist: f64,
    node: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.dist == other.dist && self.node == other.node
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap, we need the closest node first.
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap()
            .then_with(|| other.node.cmp(&self.node))
    }
}

fn dijkstra(adjacency: &[Vec<(usize, f64)>], source: usize, dist: &mut [f64]) {
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(HeapEntry { dist: 0.0, node: source });
    while let Some(HeapEntry { dist: d, node }) = heap.pop() {
        if d > dist[node] {
            continue;
        }
        for &(next, weight) in &adjacency[node] {
            let candidate = d + weight;
            if candidate < dist[next] {
                dist[next] = candidate;
                heap.push(HeapEntry { dist: candidate, node: next });
            }
        }
    }
}

fn euclid(a: [f64; 3], b: [f64; 3]) -> f64 {
    super::norm(super::sub(a, b))
}
