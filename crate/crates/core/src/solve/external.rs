//! Subprocess solver backend.
//!
//! Spawns a shell command, hands it one request line on stdin, and expects
//! one response line on stdout. Every returned sample is validated: bit
//! vectors must match the variable count, bits must be 0 or 1, and the
//! reported energy must agree with our own evaluation to 1e-6. Energies are
//! recomputed locally afterwards so downstream code never depends on
//! solver-reported arithmetic.

use std::io::Write as _;
use std::process::{Command, Stdio};

use crate::error::{Error, Result};
use crate::qubo::QuboProblem;

use super::wire::{SolveRequest, SolveResponse};
use super::{QuboSolver, Sample, SolveResult};

const ENERGY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct ExternalSolver {
    cmd: String,
    num_reads: usize,
}

impl ExternalSolver {
    pub fn new(cmd: impl Into<String>, num_reads: usize) -> ExternalSolver {
        ExternalSolver { cmd: cmd.into(), num_reads }
    }
}

impl QuboSolver for ExternalSolver {
    fn solve(&self, problem: &QuboProblem, seed: u64) -> Result<SolveResult> {
        solve_external(problem, &self.cmd, self.num_reads, seed)
    }
}

pub fn solve_external(
    problem: &QuboProblem,
    cmd: &str,
    num_reads: usize,
    seed: u64,
) -> Result<SolveResult> {
    if cmd.trim().is_empty() {
        return Err(Error::param("external solver command is empty"));
    }
    if num_reads == 0 {
        return Err(Error::param("num_reads must be at least 1"));
    }

    let request = SolveRequest::from_problem(problem, num_reads, seed);
    let mut line = serde_json::to_string(&request)
        .map_err(|e| Error::protocol(format!("failed to encode solve request: {e}")))?;
    line.push('\n');

    let mut child = Command::new("sh")
        .arg("-c")
        .arg(cmd)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| Error::solver(format!("failed to spawn solver `{cmd}`: {e}")))?;

    {
        let stdin = child
            .stdin
            .take()
            .ok_or_else(|| Error::solver("solver stdin unavailable"))?;
        let mut stdin = stdin;
        stdin
            .write_all(line.as_bytes())
            .map_err(|e| Error::solver(format!("failed to write solve request: {e}")))?;
        // Dropping stdin closes the pipe so line-oriented solvers see EOF.
    }

    let output = child
        .wait_with_output()
        .map_err(|e| Error::solver(format!("failed to wait for solver: {e}")))?;

    if !output.status.success() {
        let stderr = String::from_utf8_lossy(&output.stderr);
        let tail: String = stderr
            .lines()
            .rev()
            .take(5)
            .collect::<Vec<_>>()
            .into_iter()
            .rev()
            .collect::<Vec<_>>()
            .join("\n");
        return Err(Error::solver(format!(
            "solver `{cmd}` exited with {}: {tail}",
            output.status
        )));
    }

    let stdout = String::from_utf8_lossy(&output.stdout);
    let line = stdout
        .lines()
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| Error::protocol("solver produced no response line"))?;

    let response: SolveResponse = serde_json::from_str(line)
        .map_err(|e| Error::protocol(format!("malformed response line: {e}")))?;

    validate_response(problem, &response)?;

    let samples: Vec<Sample> = response
        .samples
        .iter()
        .map(|s| Sample { bits: s.bits.clone(), energy: problem.evaluate(&s.bits) })
        .collect();
    SolveResult::from_samples(samples)
}

fn validate_response(problem: &QuboProblem, response: &SolveResponse) -> Result<()> {
    if response.samples.is_empty() {
        return Err(Error::protocol("response contains no samples"));
    }
    let n = problem.len();
    for (idx, sample) in response.samples.iter().enumerate() {
        if sample.bits.len() != n {
            return Err(Error::protocol(format!(
                "samples[{idx}].bits has length {}, expected {n}",
                sample.bits.len()
            )));
        }
        if let Some(bad) = sample.bits.iter().position(|&b| b > 1) {
            return Err(Error::protocol(format!(
                "samples[{idx}].bits[{bad}] is {}, expected 0 or 1",
                sample.bits[bad]
            )));
        }
        if !sample.energy.is_finite() {
            return Err(Error::protocol(format!(
                "samples[{idx}].energy is not finite"
            )));
        }
        let ours = problem.evaluate(&sample.bits);
        if (sample.energy - ours).abs() > ENERGY_TOLERANCE {
            return Err(Error::protocol(format!(
                "samples[{idx}].energy {} disagrees with evaluated {ours}",
                sample.energy
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::DenseMatrix;

    fn one_var_problem() -> QuboProblem {
        let w = DenseMatrix::from_rows(&[vec![-2.0]]).unwrap();
        QuboProblem::new(w, 0.0).unwrap()
    }

    #[test]
    fn accepts_valid_response() {
        let q = one_var_problem();
        let cmd = r#"cat >/dev/null; printf '{"samples":[{"bits":[1],"energy":-2.0}]}\n'"#;
        let result = solve_external(&q, cmd, 1, 0).unwrap();
        assert_eq!(result.best.bits, vec![1]);
        assert_eq!(result.best.energy, -2.0);
    }

    #[test]
    fn rejects_energy_mismatch() {
        let q = one_var_problem();
        let cmd = r#"cat >/dev/null; printf '{"samples":[{"bits":[1],"energy":-3.0}]}\n'"#;
        let err = solve_external(&q, cmd, 1, 0).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("samples[0].energy"), "unexpected: {msg}");
    }

    #[test]
    fn rejects_wrong_bit_length() {
        let q = one_var_problem();
        let cmd = r#"cat >/dev/null; printf '{"samples":[{"bits":[1,0],"energy":-2.0}]}\n'"#;
        let err = solve_external(&q, cmd, 1, 0).unwrap_err();
        assert!(err.to_string().contains("samples[0].bits"), "{err}");
    }

    #[test]
    fn rejects_non_binary_bits() {
        let q = one_var_problem();
        let cmd = r#"cat >/dev/null; printf '{"samples":[{"bits":[2],"energy":-2.0}]}\n'"#;
        let err = solve_external(&q, cmd, 1, 0).unwrap_err();
        assert!(err.to_string().contains("expected 0 or 1"), "{err}");
    }

    #[test]
    fn rejects_malformed_json() {
        let q = one_var_problem();
        let cmd = r#"cat >/dev/null; printf 'not json\n'"#;
        let err = solve_external(&q, cmd, 1, 0).unwrap_err();
        assert!(err.to_string().contains("malformed response"), "{err}");
    }

    #[test]
    fn rejects_empty_samples() {
        let q = one_var_problem();
        let cmd = r#"cat >/dev/null; printf '{"samples":[]}\n'"#;
        let err = solve_external(&q, cmd, 1, 0).unwrap_err();
        assert!(err.to_string().contains("no samples"), "{err}");
    }

    #[test]
    fn surfaces_nonzero_exit_with_stderr() {
        let q = one_var_problem();
        let cmd = r#"cat >/dev/null; echo boom >&2; exit 3"#;
        let err = solve_external(&q, cmd, 1, 0).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("boom"), "stderr tail missing: {msg}");
    }

    #[test]
    fn request_carries_problem_and_reads() {
        let dir = tempfile::tempdir().unwrap();
        let capture = dir.path().join("req.json");
        let q = one_var_problem();
        let cmd = format!(
            r#"read line; printf '%s\n' "$line" > {}; printf '{{"samples":[{{"bits":[1],"energy":-2.0}}]}}\n'"#,
            capture.display()
        );
        solve_external(&q, &cmd, 5, 99).unwrap();
        let text = std::fs::read_to_string(&capture).unwrap();
        let req: SolveRequest = serde_json::from_str(text.trim()).unwrap();
        assert_eq!(req.num_vars, 1);
        assert_eq!(req.num_reads, 5);
        assert_eq!(req.seed, 99);
        assert_eq!(req.entries, vec![(0, 0, -2.0)]);
    }

    #[test]
    fn energies_are_recomputed_within_tolerance() {
        let q = one_var_problem();
        // 5e-7 off: inside tolerance, but the result must carry our value.
        let cmd = r#"cat >/dev/null; printf '{"samples":[{"bits":[1],"energy":-2.0000005}]}\n'"#;
        let result = solve_external(&q, cmd, 1, 0).unwrap();
        assert_eq!(result.best.energy, -2.0);
    }

    #[test]
    fn empty_command_rejected() {
        let q = one_var_problem();
        let err = solve_external(&q, "   ", 1, 0).unwrap_err();
        assert!(err.to_string().contains("command is empty"), "{err}");
    }
}
