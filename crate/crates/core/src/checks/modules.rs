use num_complex::Complex64;

use super::fusion::w_ext_scaled;
use super::{worse, Check, Context, FnCheck, Outcome, Registry, Suite};
use crate::emodule::{
    aux_shifted, compose_rmatrix_left, compose_rmatrix_right, ext_power_module, fused_rmatrix,
    fused_tensor_module, module_dybe_residual, module_unitarity_residual, morphism_residual,
    opposite_l, power_leakage, rll_residual, sym_power_module, tensor_module, vector_module,
    EModule, FusedChain, ModuleRMatrix,
};
use crate::error::Result;
use crate::fusion::w_sym;
use crate::rmatrix::ModelParams;
use crate::sampling::Sampler;
use crate::tensor::{
    identity_kron, max_abs, off_block_norm, projector_antisym, projector_sym, rel_diff, CMatrix, GradedSpace, WeightVector,
};
use crate::transfer::ext_top_diagonal;

pub(super) fn register(r: &mut Registry) {
    let checks: [FnCheck; 11] = [
        FnCheck::new("rll", Suite::Modules, 1e-9, 10, rll),
        FnCheck::new("l_h_invariance", Suite::Modules, 1e-10, 3, l_h_invariance),
        FnCheck::new("theorem1_leakage", Suite::Modules, 1e-9, 5, theorem1_leakage),
        FnCheck::new("lemma3_sym", Suite::Modules, 1e-9, 5, lemma3_sym),
        FnCheck::new("lemma3_ext", Suite::Modules, 1e-9, 5, lemma3_ext),
        FnCheck::new("appendix_r_is_l", Suite::Modules, 1e-12, 5, appendix_r_is_l),
        FnCheck::new("appendix_dybe", Suite::Modules, 1e-9, 5, appendix_dybe),
        FnCheck::new("appendix_unitarity", Suite::Modules, 1e-9, 5, appendix_unitarity),
        FnCheck::new("appendix_morphism", Suite::Modules, 1e-9, 5, appendix_morphism),
        FnCheck::new("fused_rmatrix_subspaces", Suite::Modules, 1e-9, 3, fused_subspaces),
        FnCheck::new("ext_top_diagonal", Suite::Modules, 1e-10, 5, ext_top),
    ];
    for c in checks {
        r.register(Box::new(c) as Box<dyn Check>);
    }
}

/// Modules exercised by the RLL and h-invariance checks.
fn sample_modules(ctx: &Context, s: &mut Sampler) -> Result<Vec<EModule>> {
    let p = ctx.params;
    let n = ctx.n.max(1);
    let v1 = vector_module(s.complex(), &p);
    let v2 = vector_module(s.complex(), &p);
    Ok(vec![
        v1.clone(),
        tensor_module(&v1, &v2)?,
        fused_tensor_module(2, s.complex(), &p),
        sym_power_module(n, s.complex(), &p)?,
        ext_power_module(n.min(p.n_dim), s.complex(), &p)?,
    ])
}

fn rll(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let r = s.retry(|s| {
            let modules = sample_modules(ctx, s)?;
            let (z1, z2) = (s.complex(), s.complex());
            let l = s.lambda(&p)?;
            let mut w: f64 = 0.0;
            for m in &modules {
                w = w.max(rll_residual(m, z1, z2, &l)?);
            }
            Ok(w)
        })?;
        worst = worse(worst, r);
    }
    Ok(Outcome::new(worst, k))
}

fn l_h_invariance(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let r = s.retry(|s| {
            let modules = sample_modules(ctx, s)?;
            let z = s.complex();
            let l = s.lambda(&p)?;
            let mut w: f64 = 0.0;
            for m in &modules {
                let op = m.l_matrix(z, &l)?;
                let space = GradedSpace::vector(p.n_dim).tensor(m.space());
                w = w.max(off_block_norm(&op, &space));
            }
            Ok(w)
        })?;
        worst = worse(worst, r);
    }
    Ok(Outcome::new(worst, k))
}

fn tensor_powers(ctx: &Context) -> std::ops::RangeInclusive<usize> {
    2..=ctx.n.max(2)
}

fn theorem1_leakage(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let r = s.retry(|s| {
            let (w, z) = (s.complex(), s.complex());
            let l = s.lambda(&p)?;
            let mut out: f64 = 0.0;
            for n in tensor_powers(ctx) {
                let (a, b) = power_leakage(n, w, z, &l, &p)?;
                out = out.max(a).max(b);
            }
            Ok(out)
        })?;
        worst = worse(worst, r);
    }
    Ok(Outcome::new(worst, k))
}

/// `‖lhs − rhs‖ / (‖L‖ · max(‖W‖, 1))`, with `W` of order one.
fn intertwiner_residual(lhs: &CMatrix, rhs: &CMatrix, l: &CMatrix, w: &CMatrix) -> f64 {
    (lhs - rhs).norm() / (l.norm() * w.norm().max(1.0))
}

/// `L(z,λ)(1 ⊗ W^S_n(λ−γh^{(0)})) = (1 ⊗ W^S_n(λ)) L′(z,λ)`.
fn lemma3_sym(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    lemma3(ctx, s, k, |n, l, p| Ok(w_sym(n, l, p)?.into_matrix()), false)
}

/// `(1 ⊗ W^∧_n(λ)) L(z,λ) = L′(z,λ)(1 ⊗ W^∧_n(λ−γh^{(0)}))`.
fn lemma3_ext(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    lemma3(ctx, s, k, w_ext_scaled, true)
}

fn lemma3(
    ctx: &Context,
    s: &mut Sampler,
    k: usize,
    fusion: fn(usize, &WeightVector, &ModelParams) -> Result<CMatrix>,
    exterior: bool,
) -> Result<Outcome> {
    let p = ctx.params;
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let r = s.retry(|s| {
            let (w, z) = (s.complex(), s.complex());
            let l = s.lambda(&p)?;
            let mut out: f64 = 0.0;
            for n in tensor_powers(ctx) {
                let lm = FusedChain::new(n, w, &p).matrix(z, &l)?;
                let lp = opposite_l(n, w, z, &l, &p)?.into_matrix();
                let inner = GradedSpace::tensor_power(p.n_dim, n);
                let here = fusion(n, &l, &p)?;
                let shifted = aux_shifted(p.n_dim, &inner, p.gamma, &l, &|x| fusion(n, x, &p))?;
                let plain = identity_kron(p.n_dim, &here);
                let (lhs, rhs) = if exterior {
                    (&plain * &lm, &lp * &shifted)
                } else {
                    (&lm * &shifted, &plain * &lp)
                };
                out = out.max(intertwiner_residual(&lhs, &rhs, &lm, &here));
            }
            Ok(out)
        })?;
        worst = worse(worst, r);
    }
    Ok(Outcome::new(worst, k))
}

/// `𝓡_{V(z_1), V(z_2)⊗V(z_3)}` built by composition equals the tensor-product
/// L-operator at `z_1`.
fn appendix_r_is_l(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let r = s.retry(|s| {
            let z: Vec<Complex64> = (0..3).map(|_| s.complex()).collect();
            let l = s.lambda(&p)?;
            let composed = compose_rmatrix_right(
                &ModuleRMatrix::fundamental(z[0], z[2], &p),
                &ModuleRMatrix::fundamental(z[0], z[1], &p),
            )?;
            let w = tensor_module(&vector_module(z[1], &p), &vector_module(z[2], &p))?;
            Ok(rel_diff(&composed.eval(&l)?, &w.l_matrix(z[0], &l)?))
        })?;
        worst = worse(worst, r);
    }
    Ok(Outcome::new(worst, k))
}

/// `V(z_1)`, `V(z_2) ⊗ V(z_3)`, `V(z_4)` with both composition rules.
fn composed_triple(
    z: &[Complex64],
    p: &ModelParams,
) -> Result<(ModuleRMatrix, ModuleRMatrix, ModuleRMatrix)> {
    let r12 = compose_rmatrix_right(
        &ModuleRMatrix::fundamental(z[0], z[2], p),
        &ModuleRMatrix::fundamental(z[0], z[1], p),
    )?;
    let r13 = ModuleRMatrix::fundamental(z[0], z[3], p);
    let r23 = compose_rmatrix_left(
        &ModuleRMatrix::fundamental(z[1], z[3], p),
        &ModuleRMatrix::fundamental(z[2], z[3], p),
    )?;
    Ok((r12, r13, r23))
}

fn appendix_dybe(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let r = s.retry(|s| {
            let z: Vec<Complex64> = (0..4).map(|_| s.complex()).collect();
            let l = s.lambda(&p)?;
            let (r12, r13, r23) = composed_triple(&z, &p)?;
            module_dybe_residual(&r12, &r13, &r23, &l)
        })?;
        worst = worse(worst, r);
    }
    Ok(Outcome::new(worst, k))
}

/// `𝓡_{W_1,W_2} 𝓡_{W_2,W_1}^{(21)} = Id` for `W_1 = V(z_1)`,
/// `W_2 = V(z_2) ⊗ V(z_3)`, and for two fused products.
fn appendix_unitarity(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let r = s.retry(|s| {
            let z: Vec<Complex64> = (0..3).map(|_| s.complex()).collect();
            let l = s.lambda(&p)?;
            let r12 = compose_rmatrix_right(
                &ModuleRMatrix::fundamental(z[0], z[2], &p),
                &ModuleRMatrix::fundamental(z[0], z[1], &p),
            )?;
            let r21 = compose_rmatrix_left(
                &ModuleRMatrix::fundamental(z[1], z[0], &p),
                &ModuleRMatrix::fundamental(z[2], z[0], &p),
            )?;
            let a = module_unitarity_residual(&r12, &r21, &l)?;
            let f12 = fused_rmatrix(2, z[0], 1, z[1], &p)?;
            let f21 = fused_rmatrix(1, z[1], 2, z[0], &p)?;
            Ok(a.max(module_unitarity_residual(&f12, &f21, &l)?))
        })?;
        worst = worse(worst, r);
    }
    Ok(Outcome::new(worst, k))
}

/// `φ = 𝓡P` intertwines the tensor-product L-operators, for both composition
/// rules and for `𝓡_{V^{⊗2}(z), V^{⊗2}(w)}`.
fn appendix_morphism(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let r = s.retry(|s| {
            let z: Vec<Complex64> = (0..4).map(|_| s.complex()).collect();
            let u = s.complex();
            let l = s.lambda(&p)?;
            let v: Vec<EModule> = z.iter().map(|&x| vector_module(x, &p)).collect();
            let w23 = tensor_module(&v[1], &v[2])?;
            let (r12, _, r23) = composed_triple(&z, &p)?;
            let mut out = morphism_residual(&r12, &v[0], &w23, u, &l)?;
            out = out.max(morphism_residual(&r23, &w23, &v[3], u, &l)?);
            let f = fused_rmatrix(2, z[0], 2, z[1], &p)?;
            out = out.max(morphism_residual(
                &f,
                &fused_tensor_module(2, z[0], &p),
                &fused_tensor_module(2, z[1], &p),
                u,
                &l,
            )?);
            Ok(out)
        })?;
        worst = worse(worst, r);
    }
    Ok(Outcome::new(worst, k))
}

/// Full, symmetric and `J` subspaces of `(C^N)^{⊗n}` as orthogonal projectors.
fn subspace_projectors(n: usize, n_dim: usize) -> Vec<CMatrix> {
    let d = n_dim.pow(n as u32);
    let anti = projector_antisym(n, n_dim).into_matrix();
    let j = CMatrix::identity(d, d) - anti;
    let mut out = vec![CMatrix::identity(d, d), projector_sym(n, n_dim).into_matrix()];
    if j.norm() > 0.5 {
        out.push(j);
    }
    out
}

/// `𝓡_{V^{⊗m}(z), V^{⊗n}(w)}` maps each `A ⊗ B` into itself and is inverted
/// by `𝓡_{V^{⊗n}(w), V^{⊗m}(z)}^{(21)}`, for `m, n ∈ {1, 2}`. Residual: the
/// larger of the relative leakage and the unitarity defect scaled by the
/// largest entries of the two factors.
fn fused_subspaces(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let r = s.retry(|s| {
            let (z, w) = (s.complex(), s.complex());
            let l = s.lambda(&p)?;
            let mut out: f64 = 0.0;
            for m in 1..=2 {
                for n in 1..=2 {
                    let r12 = fused_rmatrix(m, z, n, w, &p)?;
                    let r21 = fused_rmatrix(n, w, m, z, &p)?;
                    let r = r12.eval(&l)?;
                    let scale = (max_abs(&r) * max_abs(&r21.eval(&l)?)).max(1.0);
                    out = out.max(module_unitarity_residual(&r12, &r21, &l)? / scale);
                    for a in subspace_projectors(m, p.n_dim) {
                        for b in subspace_projectors(n, p.n_dim) {
                            let q = a.kronecker(&b);
                            let rq = &r * &q;
                            out = out.max((&rq - &q * &rq).norm() / rq.norm());
                        }
                    }
                }
            }
            Ok(out)
        })?;
        worst = worse(worst, r);
    }
    Ok(Outcome::new(worst, k))
}

/// The top exterior power is one-dimensional with diagonal L-operator given
/// in closed form.
fn ext_top(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let r = s.retry(|s| {
            let (w, z) = (s.complex(), s.complex());
            let l = s.lambda(&p)?;
            let m = ext_power_module(p.n_dim, w, &p)?;
            let e = m.matrix_elements(z, &l)?;
            let mut out: f64 = 0.0;
            for i in 0..p.n_dim {
                for j in 0..p.n_dim {
                    let got = e.get(i, j)[(0, 0)];
                    let expect = if i == j {
                        ext_top_diagonal(i, z, w, &l, &p)?
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    out = out.max((got - expect).norm() / expect.norm().max(1.0));
                }
            }
            Ok(out)
        })?;
        worst = worse(worst, r);
    }
    Ok(Outcome::new(worst, k))
}
