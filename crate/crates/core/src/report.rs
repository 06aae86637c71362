//! Run configuration, suite execution and the JSON report.

use std::io;

use num_complex::Complex64;
use serde::Serialize;

use crate::checks::{run_check, CheckRecord, Context, Registry, Suite};
use crate::error::{Error, Result};
use crate::rmatrix::ModelParams;
use crate::theta::ThetaParams;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub suite: Suite,
    /// Single check to run instead of the whole suite.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<String>,
    pub n_dim: usize,
    pub ell: u32,
    pub n: usize,
    /// `τ` as `[re, im]`.
    pub tau: [f64; 2],
    /// `γ` as `[re, im]`.
    pub gamma: [f64; 2],
    pub seed: u64,
    /// Overrides each check's own sample count.
    pub samples: Option<usize>,
    /// Overrides each check's own tolerance.
    pub tol: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let g = ModelParams::default_gamma();
        Self {
            suite: Suite::All,
            check: None,
            n_dim: 2,
            ell: 1,
            n: 3,
            tau: [0.0, 0.75],
            gamma: [g.re, g.im],
            seed: 0,
            samples: None,
            tol: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.n_dim < 2 {
            return bad(format!("N must be at least 2, got {}", self.n_dim));
        }
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if self.samples == Some(0) {
            return bad("samples must be at least 1".into());
        }
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return bad(format!("tol must be positive, got {t}"));
            }
        }
        if !(self.tau[1] > 0.0) {
            return bad(format!("Im tau must be positive, got {}", self.tau[1]));
        }
        if self.gamma.iter().any(|x| !x.is_finite()) || self.tau[0].is_nan() {
            return bad("tau and gamma must be finite".into());
        }
        Ok(())
    }

    pub fn params(&self) -> Result<ModelParams> {
        self.validate()?;
        let theta = ThetaParams::new(Complex64::new(self.tau[0], self.tau[1]))?;
        ModelParams::new(
            self.n_dim,
            Complex64::new(self.gamma[0], self.gamma[1]),
            theta,
        )
    }

    pub fn context(&self) -> Result<Context> {
        let mut ctx = Context::new(self.params()?, self.ell, self.n, self.seed);
        ctx.samples = self.samples;
        Ok(ctx)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub config: RunConfig,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
    pub version: &'static str,
}

/// Runs the configured suite, or the single named check, in registration order.
pub fn run_suite(cfg: &RunConfig, registry: &Registry) -> Result<Report> {
    let ctx = cfg.context()?;
    let selected = match &cfg.check {
        Some(name) => vec![registry
            .get(name)
            .ok_or_else(|| Error::UnknownCheck(name.clone()))?],
        None => registry.select(cfg.suite),
    };
    let checks: Vec<CheckRecord> = selected
        .into_iter()
        .map(|c| run_check(c, &ctx, cfg.tol))
        .collect();
    Ok(Report {
        config: cfg.clone(),
        pass: checks.iter().all(|c| c.pass),
        checks,
        version: VERSION,
    })
}

/// Writes floats with 17 significant digits.
struct FullPrecision;

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

pub fn to_json(report: &Report) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision);
    report
        .serialize(&mut ser)
        .map_err(|e| Error::Output(e.to_string()))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Output(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        let report = Report {
            config: RunConfig::default(),
            checks: vec![],
            pass: true,
            version: VERSION,
        };
        let s = to_json(&report).unwrap();
        assert!(s.contains("1.7171700000000001e-1"), "{s}");
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["config"]["gamma"][0].as_f64(), Some(0.171717));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let base = RunConfig::default();
        for cfg in [
            RunConfig { n_dim: 1, ..base.clone() },
            RunConfig { samples: Some(0), ..base.clone() },
            RunConfig { tol: Some(0.0), ..base.clone() },
            RunConfig { tau: [0.0, -1.0], ..base.clone() },
        ] {
            assert!(matches!(cfg.validate(), Err(Error::InvalidParams(_))), "{cfg:?}");
        }
        base.validate().unwrap();
    }

    #[test]
    fn unknown_check_is_an_error() {
        let cfg = RunConfig {
            check: Some("nope".into()),
            ..RunConfig::default()
        };
        assert!(matches!(
            run_suite(&cfg, &Registry::standard()),
            Err(Error::UnknownCheck(_))
        ));
    }
}
