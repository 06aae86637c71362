use num_complex::Complex64;

use super::rmatrix::SMALL_GAMMA;
use super::{worse, Check, Context, FnCheck, Outcome, Registry, Suite};
use crate::diffop::{compose, max_difference, ruijsenaars_m, sn_conjugate};
use crate::emodule::{sym_power_module, vector_module, EModule};
use crate::error::Result;
use crate::rmatrix::ModelParams;
use crate::sampling::{Sampler, LIMIT_SEPARATION};
use crate::tensor::{Permutation, Weight, WeightVector};
use crate::transfer::{
    det_operator, l_hat, shift_ratio_check, scalar_coefficients, t_prefactor, transfer_t1,
    transfer_tm, transfer_tm_with, Domain, TmOrdering,
};

pub(super) fn register(r: &mut Registry) {
    let checks: [FnCheck; 11] = [
        FnCheck::new("theorem_T_equals_M", Suite::Transfer, 1e-8, 10, t_equals_m),
        FnCheck::new("gamma1_coefficient", Suite::Transfer, 1e-9, 10, gamma1_coefficient),
        FnCheck::new("t_sn_symmetry", Suite::Transfer, 1e-9, 5, t_sn_symmetry),
        FnCheck::new("tm_ratio_lambda_independence", Suite::Transfer, 1e-7, 10, tm_ratio_spread),
        FnCheck::new("gm_gamma_limit", Suite::Transfer, 1e-3, 3, gm_gamma_limit),
        FnCheck::new("gm_gamma_limit_extrapolated", Suite::Transfer, 1e-3, 3, gm_extrapolated),
        FnCheck::new("transfer_commutativity", Suite::Transfer, 1e-8, 10, commutativity),
        FnCheck::new("fused_trace_consistency", Suite::Transfer, 1e-9, 5, fused_trace),
        FnCheck::new("lemma4_ratio", Suite::Transfer, 1e-8, 5, lemma4_ratio),
        FnCheck::new("lemma4_orthogonal", Suite::Transfer, 1e-9, 5, lemma4_orthogonal),
        FnCheck::new("quantum_det_centrality", Suite::Transfer, 1e-8, 3, det_centrality),
    ];
    for c in checks {
        r.register(Box::new(c) as Box<dyn Check>);
    }
}

/// The quantum space `S^{Nℓ}V(0)`.
fn quantum_space(ctx: &Context, p: &ModelParams) -> Result<EModule> {
    sym_power_module(p.n_dim * ctx.ell as usize, Complex64::new(0.0, 0.0), p)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// `T(z) = θ(z−γℓ)/θ(z−γNℓ) M`, coefficientwise relative error.
fn t_equals_m(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let module = quantum_space(ctx, &p)?;
    let m = ruijsenaars_m(1, ctx.ell, &p)?;
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let r = s.retry(|s| {
            let z = s.complex();
            let l = s.lambda(&p)?;
            let pre = t_prefactor(z, ctx.ell, &p)?;
            let t = scalar_coefficients(&transfer_t1(&module, z)?, &l)?;
            let mc = scalar_coefficients(&m, &l)?;
            let mut out: f64 = 0.0;
            for ((mu, a), (nu, b)) in t.iter().zip(&mc) {
                debug_assert_eq!(mu, nu);
                out = out.max(rel(*a, pre * b));
            }
            Ok(out)
        })?;
        worst = worse(worst, r);
    }
    Ok(Outcome::new(worst, k))
}

/// Coefficient of `Γ_1` in `T(z)` against
/// `θ(z−γℓ)/θ(z−γNℓ) Π_{k≥2} θ(λ_1−λ_k+γℓ)/θ(λ_1−λ_k)`.
fn gamma1_coefficient(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let module = quantum_space(ctx, &p)?;
    let gl = p.gamma * ctx.ell as f64;
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let r = s.retry(|s| {
            let z = s.complex();
            let l = s.lambda(&p)?;
            let got = transfer_t1(&module, z)?.coeff(&Weight::basis(p.n_dim, 0), &l)?[(0, 0)];
            let mut expect = t_prefactor(z, ctx.ell, &p)?;
            for q in 1..p.n_dim {
                let x = l.diff(0, q);
                expect *= p.theta(x + gl)? / p.theta(x)?;
            }
            Ok(rel(got, expect))
        })?;
        worst = worse(worst, r);
    }
    Ok(Outcome::new(worst, k))
}

fn t_sn_symmetry(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let module = quantum_space(ctx, &p)?;
    let z = s.complex();
    let t = transfer_t1(&module, z)?;
    let samples = s.lambdas(k, &p)?;
    let mut worst: f64 = 0.0;
    for sigma in Permutation::all(p.n_dim) {
        worst = worse(worst, max_difference(&t, &sn_conjugate(&t, &sigma)?, &samples)?);
    }
    Ok(Outcome::new(worst, k))
}

/// `T_m(z)/M_m` for every subset `J`, in subset order.
fn tm_ratios(
    m: usize,
    z: Complex64,
    module: &EModule,
    ell: u32,
    l: &WeightVector,
) -> Result<Vec<Complex64>> {
    let p = module.params();
    let t = scalar_coefficients(&transfer_tm(m, z, module)?, l)?;
    let mm = scalar_coefficients(&ruijsenaars_m(m, ell, p)?, l)?;
    Ok(t.iter().zip(&mm).map(|((_, a), (_, b))| a / b).collect())
}

/// Spread of `T_m(z)/M_m` across λ samples and subsets `J`, for every `m`,
/// relative to the ratio at the first sample.
fn tm_ratio_spread(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let module = quantum_space(ctx, &p)?;
    let mut worst: f64 = 0.0;
    for m in 1..=p.n_dim {
        let (z, reference) = s.retry(|s| {
            let z = s.complex();
            let l = s.lambda(&p)?;
            Ok((z, tm_ratios(m, z, &module, ctx.ell, &l)?[0]))
        })?;
        for _ in 0..k {
            let r = s.retry(|s| {
                let l = s.lambda(&p)?;
                let ratios = tm_ratios(m, z, &module, ctx.ell, &l)?;
                Ok(ratios.iter().map(|&g| rel(g, reference)).fold(0.0, f64::max))
            })?;
            worst = worse(worst, r);
        }
    }
    Ok(Outcome::new(worst, k))
}

/// `g_m(z,γ)` at the first subset, every `m`.
fn gm_values(ctx: &Context, p: &ModelParams, z: Complex64, l: &WeightVector) -> Result<Vec<Complex64>> {
    let module = quantum_space(ctx, p)?;
    (1..=p.n_dim)
        .map(|m| Ok(tm_ratios(m, z, &module, ctx.ell, l)?[0]))
        .collect()
}

/// `|g_m(z,γ) − 1|` at `γ = 1e−4`, every `m`, with `z` away from the lattice.
fn gm_gamma_limit(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params.with_gamma(Complex64::new(SMALL_GAMMA, 0.0));
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let r = s.retry(|s| {
            let z = s.separated(p.theta.tau, LIMIT_SEPARATION)?;
            let l = s.lambda(&p)?;
            let g = gm_values(ctx, &p, z, &l)?;
            Ok(g.iter().map(|g| (g - 1.0).norm()).fold(0.0, f64::max))
        })?;
        worst = worse(worst, r);
    }
    Ok(Outcome::new(worst, k))
}

/// `|2g_m(z,γ/2) − g_m(z,γ) − 1|` at `γ = 1e−4`: the Richardson estimate of
/// `g_m(z,0)`, which removes the first-order term.
fn gm_extrapolated(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params.with_gamma(Complex64::new(SMALL_GAMMA, 0.0));
    let half = p.with_gamma(p.gamma / 2.0);
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let r = s.retry(|s| {
            let z = s.separated(p.theta.tau, LIMIT_SEPARATION)?;
            let l = s.lambda(&p)?;
            let a = gm_values(ctx, &p, z, &l)?;
            let b = gm_values(ctx, &half, z, &l)?;
            Ok(a.iter()
                .zip(&b)
                .map(|(a, b)| (b * 2.0 - a - 1.0).norm())
                .fold(0.0, f64::max))
        })?;
        worst = worse(worst, r);
    }
    Ok(Outcome::new(worst, k))
}

/// `[T_m(z), T_{m′}(w)]` for all `m ≤ m′`.
fn commutativity(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let module = quantum_space(ctx, &p)?;
    let (z, w) = (s.complex(), s.complex());
    let samples = s.lambdas(k, &p)?;
    let mut worst: f64 = 0.0;
    for m in 1..=p.n_dim {
        let a = transfer_tm(m, z, &module)?;
        for mp in m..=p.n_dim {
            let b = transfer_tm(mp, w, &module)?;
            let r = max_difference(&compose(&a, &b)?, &compose(&b, &a)?, &samples)?;
            worst = worse(worst, r);
        }
    }
    Ok(Outcome::new(worst, k))
}

/// The matrix-element form of `T_m` against the trace of the fused R-matrix.
fn fused_trace(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let module = quantum_space(ctx, &p)?;
    let z = s.complex();
    let samples = s.lambdas(k, &p)?;
    let mut worst: f64 = 0.0;
    for m in 1..=p.n_dim {
        let a = transfer_tm(m, z, &module)?;
        let b = transfer_tm_with(m, z, &module, TmOrdering::FusedTrace, Domain::ZeroWeight)?;
        worst = worse(worst, max_difference(&a, &b, &samples)?);
    }
    Ok(Outcome::new(worst, k))
}

fn lemma4_ratio(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    lemma4(ctx, s, k, |o| o.residual)
}

fn lemma4_orthogonal(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    lemma4(ctx, s, k, |o| o.orthogonal)
}

fn lemma4(
    ctx: &Context,
    s: &mut Sampler,
    k: usize,
    pick: fn(&crate::transfer::ShiftRatioOutcome) -> f64,
) -> Result<Outcome> {
    let p = ctx.params;
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let r = s.retry(|s| {
            let (a, b) = (s.lambda(&p)?, s.lambda(&p)?);
            Ok(pick(&shift_ratio_check(ctx.ell, &a, &b, &p)?))
        })?;
        worst = worse(worst, r);
    }
    Ok(Outcome::new(worst, k))
}

/// `[Det̂(z), L̂_ij(w)]` on the vector representation, all `i, j`.
fn det_centrality(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let module = vector_module(s.complex(), &p);
    let (z, w) = (s.complex(), s.complex());
    let det = det_operator(z, &module)?;
    let samples = s.lambdas(k, &p)?;
    let mut worst: f64 = 0.0;
    for i in 0..p.n_dim {
        for j in 0..p.n_dim {
            let g = l_hat(i, j, w, &module)?;
            let r = max_difference(&compose(&det, &g)?, &compose(&g, &det)?, &samples)?;
            worst = worse(worst, r);
        }
    }
    Ok(Outcome::new(worst, k))
}

