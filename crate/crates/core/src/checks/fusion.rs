use num_complex::Complex64;

use super::rmatrix::SMALL_GAMMA;
use super::{worse, Check, Context, FnCheck, Outcome, Registry, Suite};
use crate::error::Result;
use crate::fusion::{eval_diagram, w_ext, w_ext_scale, w_n, w_sym, Diagram};
use crate::rmatrix::ModelParams;
use crate::sampling::{Sampler, LIMIT_SEPARATION};
use crate::tensor::{
    antisym_basis, c64, flip, max_abs, projection_residual, projector_antisym, projector_sym,
    rel_diff, singular_values, CMatrix, WeightVector, DEFAULT_RANK_TOL,
};

/// Singular values below this count as zero after `W^∧_n` is rescaled by
/// `γ^{1−n}`, which keeps it of order one; when `∧^n C^N = 0` the operator is
/// pure round-off and the relative criterion alone would count noise.
pub(crate) const RANK_FLOOR: f64 = 1e-10;

pub(super) fn register(r: &mut Registry) {
    let checks: [FnCheck; 7] = [
        FnCheck::new("word_independence", Suite::Fusion, 1e-9, 5, word_independence),
        FnCheck::new("admissible_diagrams", Suite::Fusion, 1e-9, 5, admissible_diagrams),
        FnCheck::new("prop1_ranks", Suite::Fusion, 0.0, 2, prop1_ranks),
        FnCheck::new("prop1_subspaces", Suite::Fusion, 1e-9, 2, prop1_subspaces),
        FnCheck::new("w_sym_flip_invariance", Suite::Fusion, 1e-9, 2, w_sym_flips),
        FnCheck::new("w_ext_antisymmetry", Suite::Fusion, 1e-9, 2, w_ext_flips),
        FnCheck::new("fusion_classical_limits", Suite::Fusion, 1e-3, 2, classical),
    ];
    for c in checks {
        r.register(Box::new(c) as Box<dyn Check>);
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

pub(crate) fn rank_with_floor(m: &CMatrix, rel_tol: f64, floor: f64) -> usize {
    let sv = singular_values(m);
    let top = sv.first().copied().unwrap_or(0.0);
    let cut = (rel_tol * top).max(floor);
    sv.iter().filter(|&&s| s > cut).count()
}

/// `γ^{1−n} W^∧_n(λ)`.
pub(crate) fn w_ext_scaled(n: usize, l: &WeightVector, p: &ModelParams) -> Result<CMatrix> {
    Ok(w_ext(n, l, p)?.into_matrix() * w_ext_scale(n, p.gamma))
}

fn tensor_powers(ctx: &Context) -> std::ops::RangeInclusive<usize> {
    2..=ctx.n.max(2)
}

/// For `n = 3, 4`: every reduced word of the longest permutation and of a
/// shorter one gives the same operator.
fn word_independence(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let r = s.retry(|s| {
            let mut w: f64 = 0.0;
            for n in [3usize, 4] {
                let z: Vec<Complex64> = (0..n).map(|_| s.complex()).collect();
                let l = s.lambda(&p)?;
                let mut perms = vec![Diagram::reversal(n)];
                if n == 4 {
                    perms.push(Diagram::new(vec![1, 2, 1, 3], n)?.permutation());
                }
                for sigma in perms {
                    let words = Diagram::reduced_words(&sigma);
                    let base = eval_diagram(&words[0], &z, &l, &p)?.into_matrix();
                    for d in &words[1..] {
                        w = w.max(rel_diff(&base, eval_diagram(d, &z, &l, &p)?.matrix()));
                    }
                }
            }
            Ok(w)
        })?;
        worst = worse(worst, r);
    }
    Ok(Outcome::new(worst, k))
}

/// For `n = 4`: the recursion, the opposite diagram and two further
/// admissible diagrams agree with `w_n`.
fn admissible_diagrams(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let n = 4;
    let rec = Diagram::recursion(n);
    let opp = Diagram::opposite(n);
    let mut chosen = vec![rec.clone(), opp.clone()];
    chosen.extend(
        Diagram::reduced_words(&Diagram::reversal(n))
            .into_iter()
            .filter(|d| *d != rec && *d != opp)
            .take(2),
    );
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let r = s.retry(|s| {
            let z: Vec<Complex64> = (0..n).map(|_| s.complex()).collect();
            let l = s.lambda(&p)?;
            let reference = w_n(&z, &l, &p)?.into_matrix();
            let mut w: f64 = 0.0;
            for d in &chosen {
                debug_assert!(d.is_admissible());
                w = w.max(rel_diff(&reference, eval_diagram(d, &z, &l, &p)?.matrix()));
            }
            Ok(w)
        })?;
        worst = worse(worst, r);
    }
    Ok(Outcome::new(worst, k))
}

/// Total mismatch of `rank W^S_n = C(N+n−1, n)` and
/// `nullity W^∧_n = N^n − C(N, n)` over `n = 2..=ctx.n`, plus the ranks of
/// `R(−γ)` and `R^reg`.
fn prop1_ranks(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let nd = p.n_dim;
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let r = s.retry(|s| {
            let l = s.lambda(&p)?;
            let mut gap = 0usize;
            for n in tensor_powers(ctx) {
                let ws = w_sym(n, &l, &p)?.into_matrix();
                gap += rank_with_floor(&ws, DEFAULT_RANK_TOL, RANK_FLOOR)
                    .abs_diff(binomial(nd + n - 1, n));
                let we = w_ext_scaled(n, &l, &p)?;
                let nullity = we.ncols() - rank_with_floor(&we, DEFAULT_RANK_TOL, RANK_FLOOR);
                gap += nullity.abs_diff(nd.pow(n as u32) - binomial(nd, n));
            }
            let r_minus = crate::rmatrix::r_matrix(-p.gamma, &l, &p)?;
            gap += rank_with_floor(&r_minus, DEFAULT_RANK_TOL, RANK_FLOOR).abs_diff(binomial(nd + 1, 2));
            let reg = crate::rmatrix::r_reg_matrix(&l, &p)?;
            gap += rank_with_floor(&reg, DEFAULT_RANK_TOL, RANK_FLOOR).abs_diff(binomial(nd, 2));
            Ok(gap as f64)
        })?;
        worst = worse(worst, r);
    }
    Ok(Outcome::new(worst, k))
}

/// Image of `W^S_n` equals `S^n` (projection residuals both ways) and
/// `W^∧_n` vanishes on `J_n`.
fn prop1_subspaces(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let r = s.retry(|s| {
            let l = s.lambda(&p)?;
            let mut w: f64 = 0.0;
            for n in tensor_powers(ctx) {
                let ws = w_sym(n, &l, &p)?.into_matrix();
                let sym = projector_sym(n, p.n_dim).into_matrix();
                w = w.max(projection_residual(&sym, &ws, DEFAULT_RANK_TOL));
                w = w.max(projection_residual(&ws, &sym, DEFAULT_RANK_TOL));
                let we = w_ext_scaled(n, &l, &p)?;
                let anti = projector_antisym(n, p.n_dim).into_matrix();
                let j = CMatrix::identity(anti.nrows(), anti.ncols()) - anti;
                w = w.max((&we * j).norm() / we.norm().max(1.0));
            }
            Ok(w)
        })?;
        worst = worse(worst, r);
    }
    Ok(Outcome::new(worst, k))
}

/// `P^{(j,j+1)} W^S_n = W^S_n` for every adjacent flip.
fn w_sym_flips(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let r = s.retry(|s| {
            let l = s.lambda(&p)?;
            let mut w: f64 = 0.0;
            for n in tensor_powers(ctx) {
                let ws = w_sym(n, &l, &p)?.into_matrix();
                for j in 0..n - 1 {
                    let f = flip(n, j, j + 1, p.n_dim).into_matrix();
                    w = w.max(rel_diff(&(f * &ws), &ws));
                }
            }
            Ok(w)
        })?;
        worst = worse(worst, r);
    }
    Ok(Outcome::new(worst, k))
}

/// `W^∧_n (P^{(j,j+1)} + Id) = 0` for every adjacent flip.
fn w_ext_flips(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params;
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let r = s.retry(|s| {
            let l = s.lambda(&p)?;
            let mut w: f64 = 0.0;
            for n in tensor_powers(ctx) {
                let we = w_ext_scaled(n, &l, &p)?;
                let d = we.nrows();
                for j in 0..n - 1 {
                    let f = flip(n, j, j + 1, p.n_dim).into_matrix() + CMatrix::identity(d, d);
                    w = w.max((&we * f).norm() / we.norm().max(1.0));
                }
            }
            Ok(w)
        })?;
        worst = worse(worst, r);
    }
    Ok(Outcome::new(worst, k))
}

/// At `γ = 1e−4`: `W^S_n` is the identity on `S^n`, and `γ^{1−n} W^∧_n` is a
/// nonzero multiple of the identity on the antisymmetric tensors.
fn classical(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let p = ctx.params.with_gamma(c64(SMALL_GAMMA, 0.0));
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let r = s.retry(|s| {
            let l = s.lambda_separated(&p, LIMIT_SEPARATION)?;
            let mut w: f64 = 0.0;
            for n in tensor_powers(ctx) {
                let sym = projector_sym(n, p.n_dim).into_matrix();
                let ws = w_sym(n, &l, &p)?.into_matrix();
                w = w.max(max_abs(&(ws * &sym - &sym)));
                let basis = antisym_basis(n, p.n_dim).vectors;
                if basis.ncols() == 0 {
                    continue;
                }
                let m = basis.adjoint() * w_ext_scaled(n, &l, &p)? * &basis;
                let c = m[(0, 0)];
                if c.norm() < 1e-6 {
                    w = w.max(1.0);
                    continue;
                }
                let d = m.nrows();
                w = w.max(max_abs(&(m - CMatrix::identity(d, d) * c)) / c.norm());
            }
            Ok(w)
        })?;
        worst = worse(worst, r);
    }
    Ok(Outcome::new(worst, k))
}

#[cfg(test)]
mod tests {
    use super::binomial;

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(2, 3), 0);
        assert_eq!(binomial(5, 0), 1);
    }
}

