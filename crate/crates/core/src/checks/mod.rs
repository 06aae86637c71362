//! Verification checks behind a common trait, registered by name and grouped
//! into suites.

mod fusion;
mod modules;
mod rmatrix;
mod ruijsenaars;
mod theta;
mod transfer;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rmatrix::ModelParams;
use crate::sampling::Sampler;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Theta,
    Rmatrix,
    Fusion,
    Modules,
    Ruijsenaars,
    Transfer,
    All,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Theta,
        Suite::Rmatrix,
        Suite::Fusion,
        Suite::Modules,
        Suite::Ruijsenaars,
        Suite::Transfer,
        Suite::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Theta => "theta",
            Suite::Rmatrix => "rmatrix",
            Suite::Fusion => "fusion",
            Suite::Modules => "modules",
            Suite::Ruijsenaars => "ruijsenaars",
            Suite::Transfer => "transfer",
            Suite::All => "all",
        }
    }

    fn contains(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown suite {s:?}")))
    }
}

/// Parameters shared by every check in a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Context {
    pub params: ModelParams,
    /// Coupling constant `ℓ`.
    pub ell: u32,
    /// Largest tensor power used by the fusion and module checks.
    pub n: usize,
    pub seed: u64,
    /// Overrides each check's own sample count.
    pub samples: Option<usize>,
}

impl Context {
    pub fn new(params: ModelParams, ell: u32, n: usize, seed: u64) -> Self {
        Self {
            params,
            ell,
            n,
            seed,
            samples: None,
        }
    }

    pub fn n_dim(&self) -> usize {
        self.params.n_dim
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub max_residual: f64,
    pub samples_used: usize,
}

impl Outcome {
    pub fn new(max_residual: f64, samples_used: usize) -> Self {
        Self {
            max_residual,
            samples_used,
        }
    }
}

pub trait Check: Send + Sync {
    fn name(&self) -> &'static str;

    fn suite(&self) -> Suite;

    fn tol(&self) -> f64;

    fn default_samples(&self) -> usize;

    fn run(&self, ctx: &Context, sampler: &mut Sampler, samples: usize) -> Result<Outcome>;
}

type CheckFn = fn(&Context, &mut Sampler, usize) -> Result<Outcome>;

/// A check backed by a plain function.
pub struct FnCheck {
    name: &'static str,
    suite: Suite,
    tol: f64,
    samples: usize,
    f: CheckFn,
}

impl FnCheck {
    pub const fn new(name: &'static str, suite: Suite, tol: f64, samples: usize, f: CheckFn) -> Self {
        Self {
            name,
            suite,
            tol,
            samples,
            f,
        }
    }
}

impl Check for FnCheck {
    fn name(&self) -> &'static str {
        self.name
    }

    fn suite(&self) -> Suite {
        self.suite
    }

    fn tol(&self) -> f64 {
        self.tol
    }

    fn default_samples(&self) -> usize {
        self.samples
    }

    fn run(&self, ctx: &Context, sampler: &mut Sampler, samples: usize) -> Result<Outcome> {
        (self.f)(ctx, sampler, samples)
    }
}

#[derive(Default)]
pub struct Registry {
    checks: Vec<Box<dyn Check>>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every built-in check.
    pub fn standard() -> Self {
        let mut r = Self::new();
        theta::register(&mut r);
        rmatrix::register(&mut r);
        fusion::register(&mut r);
        modules::register(&mut r);
        ruijsenaars::register(&mut r);
        transfer::register(&mut r);
        r
    }

    /// Panics on a duplicate name.
    pub fn register(&mut self, check: Box<dyn Check>) {
        assert!(
            self.get(check.name()).is_none(),
            "check {} registered twice",
            check.name()
        );
        self.checks.push(check);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Check> {
        self.checks
            .iter()
            .find(|c| c.name() == name)
            .map(|c| c.as_ref())
    }

    pub fn select(&self, suite: Suite) -> Vec<&dyn Check> {
        self.checks
            .iter()
            .filter(|c| suite.contains(c.suite()))
            .map(|c| c.as_ref())
            .collect()
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.checks.iter().map(|c| c.name()).collect()
    }
}

/// Result of running one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
    pub samples_used: usize,
    pub wall_time_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Runs a check on its own named random stream; `tol` overrides the check's
/// tolerance.
pub fn run_check(check: &dyn Check, ctx: &Context, tol: Option<f64>) -> CheckRecord {
    let mut sampler = Sampler::for_stream(ctx.seed, check.name());
    let samples = ctx.samples.unwrap_or_else(|| check.default_samples());
    let tol = tol.unwrap_or_else(|| check.tol());
    let start = std::time::Instant::now();
    let result = check.run(ctx, &mut sampler, samples);
    let wall_time_s = start.elapsed().as_secs_f64();
    match result {
        Ok(o) => CheckRecord {
            name: check.name().to_string(),
            max_residual: o.max_residual,
            tol,
            pass: o.max_residual.is_finite() && o.max_residual <= tol,
            samples_used: o.samples_used,
            wall_time_s,
            error: None,
        },
        Err(e) => CheckRecord {
            name: check.name().to_string(),
            max_residual: f64::NAN,
            tol,
            pass: false,
            samples_used: 0,
            wall_time_s,
            error: Some(e.to_string()),
        },
    }
}

/// Running maximum that lets a NaN through.
pub(crate) fn worse(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique_and_suites_cover_everything() {
        let r = Registry::standard();
        let all = r.select(Suite::All).len();
        let parts: usize = Suite::ALL[..6].iter().map(|&s| r.select(s).len()).sum();
        assert_eq!(all, parts);
        assert_eq!(all, r.names().len());
        for s in &Suite::ALL[..6] {
            assert!(!r.select(*s).is_empty(), "{s} is empty");
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn nan_is_sticky() {
        assert!(worse(f64::NAN, 1.0).is_nan());
        assert_eq!(worse(0.5, 1.0), 1.0);
    }
}
