//! Per-vertex spectral descriptors and the assignment-based initialization.

mod assign;
mod hks;

pub use assign::{init_permutation, select_anchor, PairInits};
pub use hks::{default_num_eigs, hks, DescriptorSet, DEFAULT_NUM_TIMES};
