use num_complex::Complex64;

use super::{worse, Check, Context, FnCheck, Outcome, Registry, Suite};
use crate::diffop::{compose, max_difference, ruijsenaars_m, sn_conjugate, DifferenceOperator};
use crate::error::Result;
use crate::sampling::Sampler;
use crate::tensor::{CMatrix, Permutation, Weight, WeightVector};
use crate::transfer::{g_nl, g_ratio_product};

pub(super) fn register(r: &mut Registry) {
    let checks: [FnCheck; 5] = [
        FnCheck::new("m_commutativity", Suite::Ruijsenaars, 1e-8, 10, m_commutativity),
        FnCheck::new("m_sn_symmetry", Suite::Ruijsenaars, 1e-10, 10, m_sn_symmetry),
        FnCheck::new("g_ratio_identity", Suite::Ruijsenaars, 1e-10, 20, g_ratio_identity),
        FnCheck::new("compose_associativity", Suite::Ruijsenaars, 1e-10, 10, associativity),
        FnCheck::new("m1_matches_m", Suite::Ruijsenaars, 1e-12, 10, m1_matches_m),
    ];
    for c in checks {
        r.register(Box::new(c) as Box<dyn Check>);
    }
}

fn family(ctx: &Context) -> Result<Vec<DifferenceOperator>> {
    (1..=ctx.n_dim())
        .map(|m| ruijsenaars_m(m, ctx.ell, &ctx.params))
        .collect()
}

/// Coefficients of `[M_m, M_{m′}]` for all pairs, relative to the larger of
/// one and the coefficients of `M_m M_{m′}`.
fn m_commutativity(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let ms = family(ctx)?;
    let samples = s.lambdas(k, &ctx.params)?;
    let mut worst: f64 = 0.0;
    for (i, a) in ms.iter().enumerate() {
        for b in &ms[i + 1..] {
            let r = max_difference(&compose(a, b)?, &compose(b, a)?, &samples)?;
            worst = worse(worst, r);
        }
    }
    Ok(Outcome::new(worst, k))
}

fn m_sn_symmetry(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let ms = family(ctx)?;
    let samples = s.lambdas(k, &ctx.params)?;
    let mut worst: f64 = 0.0;
    for m in &ms {
        for sigma in Permutation::all(ctx.n_dim()) {
            let r = max_difference(m, &sn_conjugate(m, &sigma)?, &samples)?;
            worst = worse(worst, r);
        }
    }
    Ok(Outcome::new(worst, k))
}

/// `g(λ)/g(λ−γω_1)` against the closed-form product.
fn g_ratio_identity(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let shift = Weight::basis(p.n_dim, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let r = s.retry(|s| {
            let l = s.lambda(&p)?;
            let lhs = g_nl(ctx.ell, &l, &p)? / g_nl(ctx.ell, &l.shifted(&shift, p.gamma), &p)?;
            let rhs = g_ratio_product(ctx.ell, &l, &p)?;
            Ok((lhs - rhs).norm() / rhs.norm().max(1.0))
        })?;
        worst = worse(worst, r);
    }
    Ok(Outcome::new(worst, k))
}

/// `(AB)C = A(BC)` for `A = M_1`, `B` a shift with a λ-dependent matrix
/// coefficient and `C = M_N`.
fn associativity(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let a = ruijsenaars_m(1, ctx.ell, &p)?;
    let c = ruijsenaars_m(p.n_dim, ctx.ell, &p)?;
    let offset = s.complex();
    let b = DifferenceOperator::monomial(Weight::basis(p.n_dim, 1), 1, p.gamma, move |l| {
        Ok(CMatrix::from_element(1, 1, p.theta(l.diff(0, 1) + offset)?))
    })?;
    let samples = s.lambdas(k, &p)?;
    let left = compose(&compose(&a, &b)?, &c)?;
    let right = compose(&a, &compose(&b, &c)?)?;
    Ok(Outcome::new(max_difference(&left, &right, &samples)?, k))
}

/// `M_1` against `Σ_j Π_{k≠j} θ(λ_j−λ_k+γℓ)/θ(λ_j−λ_k) Γ_j` written out directly.
fn m1_matches_m(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let m1 = ruijsenaars_m(1, ctx.ell, &p)?;
    let ell = ctx.ell as f64;
    let direct = DifferenceOperator::new(
        p.n_dim,
        1,
        p.gamma,
        (0..p.n_dim).map(|j| Weight::basis(p.n_dim, j)).collect(),
        move |l: &WeightVector| {
            (0..p.n_dim)
                .map(|j| {
                    let mut c = Complex64::new(1.0, 0.0);
                    for q in (0..p.n_dim).filter(|&q| q != j) {
                        let x = l.diff(j, q);
                        c *= p.theta(x + p.gamma * ell)? / p.theta(x)?;
                    }
                    Ok((Weight::basis(p.n_dim, j), CMatrix::from_element(1, 1, c)))
                })
                .collect()
        },
    )?;
    let samples = s.lambdas(k, &p)?;
    Ok(Outcome::new(max_difference(&direct, &m1, &samples)?, k))
}
