//! Jacobi's first theta function
//! `θ(z) = -Σ_{j ∈ Z+1/2} exp(πi j² τ + 2πi j (z + 1/2))`
//! and its derivative, evaluated by truncated symmetric-pair summation.
//!
//! No reduction of `z` to a fundamental cell is performed, so precision
//! degrades for large `|Im z|`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Modular parameter and truncation policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaParams {
    pub tau: Complex64,
    /// Cap on the number of symmetric index pairs `±(k + 1/2)`.
    pub max_terms: usize,
    /// Relative tail cutoff against the largest pair magnitude seen.
    pub term_tol: f64,
}

impl ThetaParams {
    pub const DEFAULT_MAX_TERMS: usize = 200;
    pub const DEFAULT_TERM_TOL: f64 = 1e-18;

    pub fn new(tau: Complex64) -> Result<Self> {
        Self::with_policy(tau, Self::DEFAULT_MAX_TERMS, Self::DEFAULT_TERM_TOL)
    }

    pub fn with_policy(tau: Complex64, max_terms: usize, term_tol: f64) -> Result<Self> {
        let p = Self {
            tau,
            max_terms,
            term_tol,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau.im > 0.0) {
            return Err(Error::InvalidParams(format!(
                "Im(tau) must be positive, got {}",
                self.tau
            )));
        }
        if self.max_terms == 0 {
            return Err(Error::InvalidParams("max_terms must be >= 1".into()));
        }
        if !(self.term_tol > 0.0 && self.term_tol < 1.0) {
            return Err(Error::InvalidParams(format!(
                "term_tol must lie in (0, 1), got {}",
                self.term_tol
            )));
        }
        Ok(())
    }
}

impl Default for ThetaParams {
    fn default() -> Self {
        Self {
            tau: Complex64::new(0.0, 0.75),
            max_terms: Self::DEFAULT_MAX_TERMS,
            term_tol: Self::DEFAULT_TERM_TOL,
        }
    }
}

/// Sums `-Σ weight(j) · exp(πi j² τ + 2πi j (z + 1/2))` over pairs `j = ±(k + 1/2)`.
fn series(z: Complex64, p: &ThetaParams, weight: impl Fn(f64) -> Complex64) -> Result<Complex64> {
    let i = Complex64::i();
    let shifted = z + 0.5;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut running_max = 0.0_f64;
    for k in 0..p.max_terms {
        let j = k as f64 + 0.5;
        let quad = i * PI * j * j * p.tau;
        let plus = (quad + 2.0 * PI * i * j * shifted).exp() * weight(j);
        let minus = (quad - 2.0 * PI * i * j * shifted).exp() * weight(-j);
        sum += plus + minus;
        // pair magnitude uses |t+| + |t-| so that cancellations (e.g. z = 0) cannot stall the cutoff
        let mag = plus.norm() + minus.norm();
        running_max = running_max.max(mag);
        if mag <= p.term_tol * running_max {
            return Ok(-sum);
        }
    }
    Err(Error::NonConvergence {
        terms: p.max_terms,
        z: format!("{z}"),
    })
}

pub fn theta_eval(z: Complex64, p: &ThetaParams) -> Result<Complex64> {
    series(z, p, |_| Complex64::new(1.0, 0.0))
}

/// Term-by-term derivative `dθ/dz`.
pub fn theta_deriv(z: Complex64, p: &ThetaParams) -> Result<Complex64> {
    series(z, p, |j| Complex64::new(0.0, 2.0 * PI * j))
}
