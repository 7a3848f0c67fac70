//! Geodesic-then-Gaussian iteration schedule.
//!
//! A run does 2T(N-1) iterations: the first half on raw geodesic fields, the
//! second half on Gaussian-filtered fields whose bandwidth shrinks from 25%
//! to 5% of the shape diameter. The bandwidth steps once per block of N-1
//! iterations, following fraction(s) = c2 * exp(c1 / (s+1)) with c1, c2
//! solved so the first and last blocks hit the endpoints exactly.

use crate::error::{Error, Result};
use crate::qubo::FieldMode;

pub const RHO_FRACTION_FIRST: f64 = 0.25;
pub const RHO_FRACTION_LAST: f64 = 0.05;

#[derive(Debug, Clone)]
pub struct Schedule {
    t: usize,
    n_shapes: usize,
    c1: f64,
    c2: f64,
}

impl Schedule {
    pub fn new(t: usize, n_shapes: usize) -> Result<Schedule> {
        if t < 2 {
            return Err(Error::param(format!("schedule needs t >= 2, got {t}")));
        }
        if n_shapes < 3 {
            return Err(Error::param(format!("schedule needs >= 3 shapes, got {n_shapes}")));
        }
        // fraction(0) = c2 e^{c1} = FIRST and fraction(t-1) = c2 e^{c1/t} = LAST.
        let ratio = RHO_FRACTION_FIRST / RHO_FRACTION_LAST;
        let t_f = t as f64;
        let c1 = t_f * ratio.ln() / (t_f - 1.0);
        let c2 = RHO_FRACTION_FIRST * (-c1).exp();
        Ok(Schedule { t, n_shapes, c1, c2 })
    }

    pub fn total_iterations(&self) -> usize {
        2 * self.t * (self.n_shapes - 1)
    }

    pub fn block_len(&self) -> usize {
        self.n_shapes - 1
    }

    pub fn mode(&self, i: usize) -> FieldMode {
        if i < self.t * (self.n_shapes - 1) {
            FieldMode::Geodesic
        } else {
            FieldMode::Gaussian
        }
    }

    /// Bandwidth for iteration i as a fraction of the shape diameter.
    /// Defined only in the Gaussian phase; constant within each block of
    /// N-1 iterations.
    pub fn rho_fraction(&self, i: usize) -> Result<f64> {
        let half = self.t * (self.n_shapes - 1);
        if i < half || i >= self.total_iterations() {
            return Err(Error::param(format!(
                "iteration {i} is not in the gaussian phase [{half}, {})",
                self.total_iterations()
            )));
        }
        let block = (i - half) / (self.n_shapes - 1);
        Ok(self.c2 * (self.c1 / (block as f64 + 1.0)).exp())
    }
}
