use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cyclematch::descriptors::hks;
use cyclematch::matrix::DenseMatrix;
use cyclematch::mesh::geodesic_all_pairs;
use cyclematch::perm::{CycleBatch, Permutation, TwoCycle};
use cyclematch::qubo::{build_qubo_with_constant, FieldMode, QuboProblem, TripletOracles};
use cyclematch::solve::{solve_sa, SaParams};
use cyclematch::synth::grid_mesh;

fn random_field(n: usize, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = rng.gen_range(0.05..2.0);
            m.set(i, j, d);
            m.set(j, i, d);
        }
    }
    m
}

fn transposition_batch(start: usize, k: usize) -> CycleBatch {
    let cycles: Vec<TwoCycle> =
        (0..k).map(|i| TwoCycle::new(start + 2 * i, start + 2 * i + 1).unwrap()).collect();
    CycleBatch::new(cycles).unwrap()
}

fn bench_geodesics(c: &mut Criterion) {
    let mesh = grid_mesh(12, 12).unwrap();
    c.bench_function("geodesic_all_pairs_144", |b| b.iter(|| geodesic_all_pairs(&mesh)));
}

fn bench_descriptors(c: &mut Criterion) {
    let mesh = grid_mesh(10, 10).unwrap();
    c.bench_function("hks_100_vertices", |b| b.iter(|| hks(&mesh, 40, 16).unwrap()));
}

fn bench_qubo_build(c: &mut Criterion) {
    let n = 200;
    let fx = random_field(n, 1);
    let fy = random_field(n, 2);
    let fz = random_field(n, 3);
    let oracles = TripletOracles::new(&fx, &fy, &fz, FieldMode::Geodesic).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let p_xy = Permutation::random(n, &mut rng);
    let p_yz = Permutation::random(n, &mut rng);
    let batch_x = transposition_batch(0, 16);
    let batch_y = transposition_batch(40, 16);
    let constant = oracles.triplet_energy(&p_xy, &p_yz).unwrap();
    c.bench_function("build_qubo_n200_k16", |b| {
        b.iter(|| {
            build_qubo_with_constant(&oracles, &p_xy, &p_yz, &batch_x, &batch_y, constant)
                .unwrap()
        })
    });
}

fn bench_sa(c: &mut Criterion) {
    let n = 32;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut w = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            if rng.gen_bool(0.7) {
                let v = rng.gen_range(-1.0..1.0);
                w.set(i, j, v);
                if i != j {
                    w.set(j, i, v);
                }
            }
        }
    }
    let problem = QuboProblem::new(w, 0.0).unwrap();
    let params = SaParams { num_reads: 20, num_sweeps: 50 };
    let mut seed = 0u64;
    c.bench_function("solve_sa_32_vars", |b| {
        b.iter_batched(
            || {
                seed += 1;
                seed
            },
            |s| solve_sa(&problem, &params, s).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, bench_geodesics, bench_descriptors, bench_qubo_build, bench_sa);
criterion_main!(benches);
