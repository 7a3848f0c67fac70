//! QUBO solver backends behind one uniform contract.
//!
//! The matching pipeline only ever asks "give me a good assignment for this
//! problem"; whether that comes from exhaustive enumeration, simulated
//! annealing, or an external process is a configuration detail. Every backend
//! returns energies re-evaluated from the problem itself, so downstream
//! acceptance decisions never trust a solver's arithmetic.

mod exact;
mod external;
mod sa;
pub mod wire;

pub use exact::{solve_exact, ExactSolver};
pub use external::{solve_external, ExternalSolver};
pub use sa::{solve_sa, SaParams, SaSolver};

use crate::error::{Error, Result};
use crate::qubo::QuboProblem;

/// One sampled assignment; `energy` is x^T W x without the constant offset.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub bits: Vec<u8>,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub best: Sample,
    pub samples: Vec<Sample>,
}

impl SolveResult {
    /// Picks the best sample: lowest energy, ties toward the
    /// lexicographically smallest bit vector.
    pub fn from_samples(samples: Vec<Sample>) -> Result<SolveResult> {
        let best = samples
            .iter()
            .min_by(|a, b| {
                a.energy
                    .partial_cmp(&b.energy)
                    .expect("sample energies are finite")
                    .then_with(|| a.bits.cmp(&b.bits))
            })
            .cloned()
            .ok_or_else(|| Error::solver("backend returned no samples"))?;
        Ok(SolveResult { best, samples })
    }
}

/// The backend contract. `seed` fully determines any randomized behavior.
pub trait QuboSolver {
    fn solve(&self, problem: &QuboProblem, seed: u64) -> Result<SolveResult>;
}

/// Backend selection as written in run configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum Backend {
    Exact,
    Sa(SaParams),
    External { cmd: String, num_reads: usize },
}

impl Backend {
    /// Parses "exact", "sa", or "external:<command>"; parameters keep their
    /// defaults and can be adjusted on the returned value.
    pub fn parse(spec: &str) -> Result<Backend> {
        match spec {
            "exact" => Ok(Backend::Exact),
            "sa" => Ok(Backend::Sa(SaParams::default())),
            _ => match spec.strip_prefix("external:") {
                Some(cmd) if !cmd.trim().is_empty() => Ok(Backend::External {
                    cmd: cmd.to_string(),
                    num_reads: SaParams::default().num_reads,
                }),
                Some(_) => Err(Error::param("external backend needs a command after the colon")),
                None => Err(Error::param(format!(
                    "unknown backend '{spec}' (expected exact, sa, or external:<cmd>)"
                ))),
            },
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Sa(_) => "sa",
            Backend::External { .. } => "external",
        }
    }

    pub fn build(&self) -> Box<dyn QuboSolver> {
        match self {
            Backend::Exact => Box::new(ExactSolver),
            Backend::Sa(params) => Box::new(SaSolver { params: params.clone() }),
            Backend::External { cmd, num_reads } => {
                Box::new(ExternalSolver::new(cmd.clone(), *num_reads))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn best_sample_ties_break_lexicographically() {
        let samples = vec![
            Sample { bits: vec![1, 0], energy: -1.0 },
            Sample { bits: vec![0, 1], energy: -1.0 },
            Sample { bits: vec![0, 0], energy: 0.0 },
        ];
        let r = SolveResult::from_samples(samples).unwrap();
        assert_eq!(r.best.bits, vec![0, 1]);
    }

    #[test]
    fn empty_sample_list_rejected() {
        assert!(SolveResult::from_samples(vec![]).is_err());
    }

    #[test]
    fn backend_spec_parsing() {
        assert_eq!(Backend::parse("exact").unwrap(), Backend::Exact);
        assert!(matches!(Backend::parse("sa").unwrap(), Backend::Sa(_)));
        match Backend::parse("external:python3 solver.py").unwrap() {
            Backend::External { cmd, .. } => assert_eq!(cmd, "python3 solver.py"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(Backend::parse("annealer").is_err());
        assert!(Backend::parse("external:").is_err());
    }
}
