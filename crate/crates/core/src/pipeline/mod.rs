//! Collection matching: configuration, schedule, state, and the solve loop.

mod config;
mod driver;
mod schedule;
mod state;
mod step;

pub use config::{RunConfig, RunParams, DEFAULT_WORST_FRACTION};
pub use driver::{
    anchor_pair_energy, initialize_state, match_collection, run_from_state, EnergyLog, LogRow,
    RunOutcome, ShapeSet,
};
pub use schedule::{Schedule, RHO_FRACTION_FIRST, RHO_FRACTION_LAST};
pub use state::MatchingState;
pub use step::{three_shape_step, StepOptions, StepTrace};
