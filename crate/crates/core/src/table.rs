//! CSV tables of operator coefficients.

use std::io;

use num_complex::Complex64;

use crate::diffop::ruijsenaars_m;
use crate::emodule::{ext_power_module, sym_power_module, EModule};
use crate::error::{Error, Result};
use crate::report::RunConfig;
use crate::rmatrix::ModelParams;
use crate::sampling::{Sampler, LIMIT_SEPARATION};
use crate::tensor::Weight;
use crate::transfer::{scalar_coefficients, transfer_tm};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    /// Coefficients of `M_m`.
    RuijsenaarsCoeffs,
    /// Coefficients of `T_m(z)` on the chosen module.
    TransferCoeffs,
    /// `g_m(z,γ) = T_m(z)/M_m` over sampled `z`.
    GmRatio,
}

impl TableKind {
    pub fn name(self) -> &'static str {
        match self {
            TableKind::RuijsenaarsCoeffs => "ruijsenaars_coeffs",
            TableKind::TransferCoeffs => "transfer_coeffs",
            TableKind::GmRatio => "gm_ratio",
        }
    }
}

/// Quantum space for the transfer tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModuleChoice {
    /// `S^{Nℓ}V(w)`.
    Sym,
    /// `∧^N V(w)`.
    Ext,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableSpec {
    pub kind: TableKind,
    pub module: ModuleChoice,
    /// Only this `m`; all `1..=N` otherwise.
    pub m: Option<usize>,
    pub z: Complex64,
    pub w: Complex64,
}

const DEFAULT_ROWS: usize = 3;

fn module_for(spec: &TableSpec, ell: u32, p: &ModelParams) -> Result<EModule> {
    match spec.module {
        ModuleChoice::Sym => sym_power_module(p.n_dim * ell as usize, spec.w, p),
        ModuleChoice::Ext => ext_power_module(p.n_dim, spec.w, p),
    }
}

/// `{1,3}` for the weight `ω_1 + ω_3`.
fn subset_label(mu: &Weight) -> String {
    let parts: Vec<String> = mu
        .0
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, _)| (i + 1).to_string())
        .collect();
    format!("{{{}}}", parts.join(","))
}

fn csv_err(e: impl std::fmt::Display) -> Error {
    Error::Output(e.to_string())
}

/// Writes the table as CSV. Rows are `(J, sample, re, im)`, or
/// `(m, z_re, z_im, g_re, g_im)` for the `g_m` table. The sample count is
/// `cfg.samples`, three by default.
pub fn emit_table<W: io::Write>(cfg: &RunConfig, spec: &TableSpec, out: W) -> Result<()> {
    let p = cfg.params()?;
    let ms: Vec<usize> = match spec.m {
        Some(m) if m == 0 || m > p.n_dim => {
            return Err(Error::InvalidParams(format!("m must lie in 1..={}, got {m}", p.n_dim)))
        }
        Some(m) => vec![m],
        None => (1..=p.n_dim).collect(),
    };
    let rows = cfg.samples.unwrap_or(DEFAULT_ROWS);
    let mut s = Sampler::for_stream(cfg.seed, spec.kind.name());
    let mut w = csv::Writer::from_writer(out);
    match spec.kind {
        TableKind::RuijsenaarsCoeffs | TableKind::TransferCoeffs => {
            w.write_record(["J", "sample", "re", "im"]).map_err(csv_err)?;
            let ops = ms
                .iter()
                .map(|&m| match spec.kind {
                    TableKind::RuijsenaarsCoeffs => ruijsenaars_m(m, cfg.ell, &p),
                    _ => transfer_tm(m, spec.z, &module_for(spec, cfg.ell, &p)?),
                })
                .collect::<Result<Vec<_>>>()?;
            for sample in 0..rows {
                let coeffs = s.retry(|s| {
                    let l = s.lambda(&p)?;
                    let mut all = Vec::new();
                    for op in &ops {
                        all.extend(scalar_coefficients(op, &l)?);
                    }
                    Ok(all)
                })?;
                for (mu, c) in coeffs {
                    w.serialize((subset_label(&mu), sample, c.re, c.im))
                        .map_err(csv_err)?;
                }
            }
        }
        TableKind::GmRatio => {
            w.write_record(["m", "z_re", "z_im", "g_re", "g_im"])
                .map_err(csv_err)?;
            let module = module_for(spec, cfg.ell, &p)?;
            for _ in 0..rows {
                let (z, gs) = s.retry(|s| {
                    let z = s.separated(p.theta.tau, LIMIT_SEPARATION)?;
                    let l = s.lambda(&p)?;
                    let mut gs = Vec::new();
                    for &m in &ms {
                        let t = transfer_tm(m, z, &module)?;
                        let mu = t.shifts()[0].clone();
                        let num = t.coeff(&mu, &l)?[(0, 0)];
                        let den = ruijsenaars_m(m, cfg.ell, &p)?.coeff(&mu, &l)?[(0, 0)];
                        gs.push((m, num / den));
                    }
                    Ok((z, gs))
                })?;
                for (m, g) in gs {
                    w.serialize((m, z.re, z.im, g.re, g.im)).map_err(csv_err)?;
                }
            }
        }
    }
    w.flush().map_err(csv_err)
}
