//! Collection-level matching loop.
//!
//! Every iteration refines one triplet (X, anchor, Z): X rotates through the
//! non-anchor shapes in seeded shuffled blocks, Z is the previous X. Both
//! anchor-relative maps touched by the step are written back, so any map
//! between two shapes can be derived and all triangles stay consistent.

use std::path::Path;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::descriptors::{default_num_eigs, hks, select_anchor, PairInits};
use crate::error::{Error, Result};
use crate::mesh::{gaussian_field, geodesic_all_pairs, GeodesicField, Mesh};
use crate::qubo::{EnergyOracle, FieldMode, TripletOracles};
use crate::seed::derive;
use crate::solve::QuboSolver;

use super::config::RunParams;
use super::schedule::Schedule;
use super::state::MatchingState;
use super::step::{three_shape_step, StepOptions, StepTrace};

/// Meshes plus their precomputed geodesic distance fields.
#[derive(Debug, Clone)]
pub struct ShapeSet {
    meshes: Vec<Mesh>,
    fields: Vec<GeodesicField>,
}

impl ShapeSet {
    pub fn new(meshes: Vec<Mesh>) -> Result<ShapeSet> {
        if meshes.len() < 3 {
            return Err(Error::param(format!(
                "need at least 3 shapes, got {}",
                meshes.len()
            )));
        }
        let n = meshes[0].n();
        for (idx, mesh) in meshes.iter().enumerate() {
            if mesh.n() != n {
                return Err(Error::dim(format!(
                    "shape {idx} has {} vertices, shape 0 has {n}",
                    mesh.n()
                )));
            }
        }
        let fields = meshes.iter().map(geodesic_all_pairs).collect();
        Ok(ShapeSet { meshes, fields })
    }

    pub fn n_shapes(&self) -> usize {
        self.meshes.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.meshes[0].n()
    }

    pub fn meshes(&self) -> &[Mesh] {
        &self.meshes
    }

    pub fn mesh(&self, i: usize) -> &Mesh {
        &self.meshes[i]
    }

    pub fn fields(&self) -> &[GeodesicField] {
        &self.fields
    }

    pub fn field(&self, i: usize) -> &GeodesicField {
        &self.fields[i]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogRow {
    pub iteration: usize,
    pub mode: &'static str,
    pub energy: f64,
    /// Wall time of the refinement step. Excludes the energy recomputation
    /// done for this log row, which is bookkeeping rather than solving.
    pub seconds: f64,
}

#[derive(Debug, Clone, Default)]
pub struct EnergyLog {
    rows: Vec<LogRow>,
}

impl EnergyLog {
    pub fn new() -> EnergyLog {
        EnergyLog { rows: Vec::new() }
    }

    pub fn push(&mut self, iteration: usize, mode: &'static str, energy: f64, seconds: f64) {
        self.rows.push(LogRow { iteration, mode, energy, seconds });
    }

    pub fn rows(&self) -> &[LogRow] {
        &self.rows
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,mode,energy,seconds\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.iteration, row.mode, row.energy, row.seconds
            ));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

/// Sum of geodesic pair energies between every non-anchor shape and the
/// anchor under the current maps. The convergence measure for a run.
pub fn anchor_pair_energy(shapes: &ShapeSet, state: &MatchingState) -> Result<f64> {
    let anchor = state.anchor();
    let mut total = 0.0;
    for i in 0..shapes.n_shapes() {
        if i == anchor {
            continue;
        }
        let oracle = EnergyOracle::new(
            shapes.field(i).matrix(),
            shapes.field(anchor).matrix(),
            FieldMode::Geodesic,
        );
        total += oracle.energy_perm(state.to_anchor(i))?;
    }
    Ok(total)
}

/// Descriptor-based starting state: per-pair assignments from heat kernel
/// signatures, anchored at the shape whose maps carry the least energy.
pub fn initialize_state(
    shapes: &ShapeSet,
    num_eigs: Option<usize>,
    num_times: usize,
) -> Result<MatchingState> {
    let descs = shapes
        .meshes()
        .iter()
        .map(|mesh| {
            let k = num_eigs.unwrap_or_else(|| default_num_eigs(mesh.n()));
            hks(mesh, k, num_times)
        })
        .collect::<Result<Vec<_>>>()?;
    let inits = PairInits::compute(&descs)?;
    let anchor = select_anchor(shapes.fields(), &inits)?;
    MatchingState::from_inits(anchor, &inits, shapes.n_vertices())
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: MatchingState,
    pub log: EnergyLog,
    pub anchor: usize,
    pub initial_energy: f64,
    pub final_energy: f64,
}

/// Runs the full iteration schedule starting from `state`. The observer is
/// called after each iteration's write-back with the iteration index and
/// that iteration's refinement trace.
pub fn run_from_state(
    shapes: &ShapeSet,
    params: &RunParams,
    mut state: MatchingState,
    observer: &mut dyn FnMut(usize, &MatchingState, &StepTrace),
) -> Result<RunOutcome> {
    let n_shapes = shapes.n_shapes();
    if state.n_shapes() != n_shapes {
        return Err(Error::dim(format!(
            "state covers {} shapes, set has {n_shapes}",
            state.n_shapes()
        )));
    }
    if state.n_vertices() != shapes.n_vertices() {
        return Err(Error::dim(format!(
            "state maps {} vertices, shapes have {}",
            state.n_vertices(),
            shapes.n_vertices()
        )));
    }
    let anchor = state.anchor();
    let schedule = Schedule::new(params.t, n_shapes)?;
    let m = params.worst_set_size(shapes.n_vertices())?;
    let solver: Box<dyn QuboSolver> = params.backend.build();
    let mut rng = ChaCha8Rng::seed_from_u64(derive(params.seed, &[1]));

    let initial_energy = anchor_pair_energy(shapes, &state)?;
    let mut log = EnergyLog::new();
    log.push(0, "init", initial_energy, 0.0);

    let others: Vec<usize> = (0..n_shapes).filter(|&s| s != anchor).collect();
    let mut pool: Vec<usize> = Vec::new();
    let mut prev_x: Option<usize> = None;

    for i in 0..schedule.total_iterations() {
        if pool.is_empty() {
            pool = others.clone();
            pool.shuffle(&mut rng);
            // A fresh block must not resume with the shape just refined:
            // Z is that shape, and the triplet needs X distinct from Z.
            if let Some(px) = prev_x {
                if pool.len() > 1 && pool[0] == px {
                    let j = rng.gen_range(1..pool.len());
                    pool.swap(0, j);
                }
            }
        }
        let x = pool.remove(0);
        let z = match prev_x {
            Some(px) => px,
            None => {
                let choices: Vec<usize> =
                    others.iter().copied().filter(|&s| s != x).collect();
                choices[rng.gen_range(0..choices.len())]
            }
        };

        let mode = schedule.mode(i);
        let started = Instant::now();
        let kernels = match mode {
            FieldMode::Geodesic => None,
            FieldMode::Gaussian => {
                let fraction = schedule.rho_fraction(i)?;
                let blur = |s: usize| {
                    gaussian_field(shapes.field(s), fraction * shapes.field(s).diameter())
                };
                Some((blur(x)?, blur(anchor)?, blur(z)?))
            }
        };
        let oracles = match &kernels {
            None => TripletOracles::new(
                shapes.field(x).matrix(),
                shapes.field(anchor).matrix(),
                shapes.field(z).matrix(),
                mode,
            )?,
            Some((gx, ga, gz)) => {
                TripletOracles::new(gx.matrix(), ga.matrix(), gz.matrix(), mode)?
            }
        };
        let p_xy = state.to_anchor(x).clone();
        let p_yz = state.to_anchor(z).inverse();
        let opts = StepOptions {
            m,
            seed: derive(params.seed, &[2, i as u64]),
            monotone_guard: params.monotone_guard,
            strict_rebuild: params.strict_rebuild,
        };
        let (new_xy, new_yz, trace) =
            three_shape_step(&oracles, &p_xy, &p_yz, solver.as_ref(), &opts)?;
        state.set_to_anchor(x, new_xy)?;
        state.set_to_anchor(z, new_yz.inverse())?;
        let seconds = started.elapsed().as_secs_f64();

        let energy = anchor_pair_energy(shapes, &state)?;
        log.push(i + 1, mode.as_str(), energy, seconds);
        observer(i, &state, &trace);
        state.advance_iteration();
        prev_x = Some(x);
    }

    let final_energy = log.rows().last().map(|r| r.energy).unwrap_or(initial_energy);
    Ok(RunOutcome { state, log, anchor, initial_energy, final_energy })
}

/// Initialization plus the full refinement schedule.
pub fn match_collection(shapes: &ShapeSet, params: &RunParams) -> Result<RunOutcome> {
    let state = initialize_state(shapes, params.num_eigs, params.num_times)?;
    run_from_state(shapes, params, state, &mut |_, _, _| {})
}
