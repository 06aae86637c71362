use num_complex::Complex64;

use super::{worse, Check, Context, FnCheck, Outcome, Registry, Suite};
use crate::error::Result;
use crate::rmatrix::{
    dybe_sides, r_classical_limit, r_matrix, r_reg_classical_limit, r_reg_matrix, swapped,
};
use crate::sampling::{Sampler, LIMIT_SEPARATION};
use crate::tensor::{
    c64, max_abs, numeric_rank, off_block_norm, projection_residual, projector_sym, rel_diff,
    CMatrix, GradedSpace, Permutation, DEFAULT_RANK_TOL,
};

/// `γ` used for the `γ → 0` limits.
pub(crate) const SMALL_GAMMA: f64 = 1e-4;

pub(super) fn register(r: &mut Registry) {
    let checks: [FnCheck; 8] = [
        FnCheck::new("dybe", Suite::Rmatrix, 1e-9, 50, dybe),
        FnCheck::new("unitarity", Suite::Rmatrix, 1e-10, 50, unitarity),
        FnCheck::new("sn_equivariance", Suite::Rmatrix, 1e-10, 10, sn_equivariance),
        FnCheck::new("h_invariance", Suite::Rmatrix, 1e-12, 10, h_invariance),
        FnCheck::new("lemma1_image", Suite::Rmatrix, 1e-9, 5, lemma1_image),
        FnCheck::new("lemma1_kernel", Suite::Rmatrix, 1e-9, 5, lemma1_kernel),
        FnCheck::new("residue_limit", Suite::Rmatrix, 1e-4, 5, residue_limit),
        FnCheck::new("classical_limits", Suite::Rmatrix, 1e-3, 5, classical_limits),
    ];
    for c in checks {
        r.register(Box::new(c) as Box<dyn Check>);
    }
}

fn dybe(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let r = s.retry(|s| {
            let z = [s.complex(), s.complex(), s.complex()];
            let l = s.lambda(&p)?;
            let (lhs, rhs) = dybe_sides(z, &l, &p)?;
            Ok(rel_diff(&lhs, &rhs))
        })?;
        worst = worse(worst, r);
    }
    Ok(Outcome::new(worst, k))
}

/// `R(z,λ) R(−z,λ)^{(21)} = Id`, max entry.
fn unitarity(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let d = p.n_dim * p.n_dim;
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let r = s.retry(|s| {
            let z = s.complex();
            let l = s.lambda(&p)?;
            let prod = r_matrix(z, &l, &p)? * swapped(&r_matrix(-z, &l, &p)?, p.n_dim);
            Ok(max_abs(&(prod - CMatrix::identity(d, d))))
        })?;
        worst = worse(worst, r);
    }
    Ok(Outcome::new(worst, k))
}

/// `S_σ e_i = e_{σ(i)}` on `C^N`.
pub(crate) fn basis_permutation(sigma: &Permutation) -> CMatrix {
    let n = sigma.len();
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        m[(sigma.apply(i), i)] = c64(1.0, 0.0);
    }
    m
}

/// `R(z, σλ) = (σ⊗σ) R(z,λ) (σ⊗σ)^{-1}` for every transposition.
fn sn_equivariance(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let r = s.retry(|s| {
            let z = s.complex();
            let l = s.lambda(&p)?;
            let base = r_matrix(z, &l, &p)?;
            let mut w: f64 = 0.0;
            for a in 0..p.n_dim {
                for b in a + 1..p.n_dim {
                    let sigma = Permutation::transposition(p.n_dim, a, b);
                    let sm = basis_permutation(&sigma);
                    let ss = sm.kronecker(&sm);
                    let lhs = r_matrix(z, &l.permuted(&sigma), &p)?;
                    let rhs = &ss * &base * ss.adjoint();
                    w = w.max(max_abs(&(lhs - rhs)));
                }
            }
            Ok(w)
        })?;
        worst = worse(worst, r);
    }
    Ok(Outcome::new(worst, k))
}

fn h_invariance(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let space = GradedSpace::tensor_power(p.n_dim, 2);
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let r = s.retry(|s| {
            let z = s.complex();
            let l = s.lambda(&p)?;
            Ok(off_block_norm(&r_matrix(z, &l, &p)?, &space)
                .max(off_block_norm(&r_reg_matrix(&l, &p)?, &space)))
        })?;
        worst = worse(worst, r);
    }
    Ok(Outcome::new(worst, k))
}

/// The column space of `R(−γ,λ)` is `S²(C^N)`: projection residuals both
/// ways, plus one for each unit of rank mismatch.
fn lemma1_image(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let sym = projector_sym(2, p.n_dim).into_matrix();
    let expected = p.n_dim * (p.n_dim + 1) / 2;
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let r = s.retry(|s| {
            let l = s.lambda(&p)?;
            let m = r_matrix(-p.gamma, &l, &p)?;
            let rank_gap = numeric_rank(&m, DEFAULT_RANK_TOL).abs_diff(expected) as f64;
            Ok(projection_residual(&sym, &m, DEFAULT_RANK_TOL)
                .max(projection_residual(&m, &sym, DEFAULT_RANK_TOL))
                + rank_gap)
        })?;
        worst = worse(worst, r);
    }
    Ok(Outcome::new(worst, k))
}

/// `R^reg(λ)` kills `S²(C^N)` and has exactly that kernel.
fn lemma1_kernel(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let sym = projector_sym(2, p.n_dim).into_matrix();
    let expected = p.n_dim * (p.n_dim - 1) / 2;
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let r = s.retry(|s| {
            let l = s.lambda(&p)?;
            let m = r_reg_matrix(&l, &p)?;
            let rank_gap = numeric_rank(&m, DEFAULT_RANK_TOL).abs_diff(expected) as f64;
            Ok((&m * &sym).norm() / m.norm() + rank_gap)
        })?;
        worst = worse(worst, r);
    }
    Ok(Outcome::new(worst, k))
}

/// `(z−γ) R(z,λ)` at `z = γ + 1e−6` against the analytic residue.
fn residue_limit(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let eps = 1e-6;
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let r = s.retry(|s| {
            let l = s.lambda(&p)?;
            let approx = r_matrix(p.gamma + eps, &l, &p)? * c64(eps, 0.0);
            Ok(rel_diff(&approx, &r_reg_matrix(&l, &p)?))
        })?;
        worst = worse(worst, r);
    }
    Ok(Outcome::new(worst, k))
}

/// At `γ = 1e−4`: `R(−kγ)` for `k = 1,2,3` and `γ^{-1} R^reg` against their
/// limits; max entry. λ keeps its differences away from the lattice.
fn classical_limits(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params.with_gamma(Complex64::new(SMALL_GAMMA, 0.0));
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let r = s.retry(|s| {
            let l = s.lambda_separated(&p, LIMIT_SEPARATION)?;
            let mut w: f64 = 0.0;
            for kk in [-3, -2, -1] {
                let r = r_matrix(p.gamma * kk as f64, &l, &p)?;
                let lim = r_classical_limit(kk, p.n_dim)?.into_matrix();
                w = w.max(max_abs(&(r - lim)));
            }
            let reg = r_reg_matrix(&l, &p)? / p.gamma;
            let lim = r_reg_classical_limit(p.n_dim).into_matrix();
            Ok(w.max(max_abs(&(reg - lim))))
        })?;
        worst = worse(worst, r);
    }
    Ok(Outcome::new(worst, k))
}
