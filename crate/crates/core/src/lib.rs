//! Multi-shape mesh correspondence via iterated three-shape matching.
//!
//! Dense vertex-to-vertex maps between a collection of triangle meshes are
//! refined by repeatedly picking a triplet of shapes, posing the joint
//! improvement of two of its maps as a small QUBO over disjoint two-cycles,
//! and solving that with an exact, simulated-annealing, or external backend.
//! All maps are stored relative to one anchor shape, which makes every
//! composed correspondence in the collection cycle-consistent by
//! construction.

pub mod descriptors;
pub mod error;
pub mod eval;
pub mod matrix;
pub mod mesh;
pub mod perm;
pub mod pipeline;
pub mod qubo;
pub mod seed;
pub mod solve;
pub mod synth;

pub use descriptors::{
    default_num_eigs, hks, init_permutation, select_anchor, DescriptorSet, PairInits,
    DEFAULT_NUM_TIMES,
};
pub use error::{Error, Result};
pub use eval::{geodesic_error, pck_at, pck_auc, pck_grid, EvalReport};
pub use matrix::DenseMatrix;
pub use mesh::{
    gaussian_field, geodesic_all_pairs, load_mesh, load_mesh_with_labels, read_side_labels,
    GeodesicField, KernelField, Mesh, MeshFormat,
};
pub use pipeline::{
    anchor_pair_energy, initialize_state, match_collection, run_from_state, EnergyLog,
    MatchingState, RunConfig, RunOutcome, RunParams, Schedule, ShapeSet,
};
pub use perm::{
    cae_apply, inconsistency, one_factorization, pair_rounds, worst_vertices, CycleBatch,
    CycleFactorization, Permutation, TwoCycle,
};
pub use qubo::{
    build_qubo, build_qubo_with_constant, dropped_energy, kernelize, EnergyArg, EnergyOracle,
    FieldMode, QuboDocument, QuboProblem, SparseMat, TripletOracles,
};
pub use solve::{
    solve_exact, solve_external, solve_sa, Backend, ExactSolver, ExternalSolver, QuboSolver,
    SaParams, SaSolver, Sample, SolveResult,
};
