//! Transfer matrices of E-modules as difference operators, the fused family
//! `T_m(z)`, the quantum determinant, and the zero-weight coefficient of the
//! symmetric fusion operator.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::diffop::{subset_weight, subsets, Coefficients, DifferenceOperator};
use crate::emodule::{EModule, MatrixElements, ModuleRMatrix};
use crate::error::{Error, Result};
use crate::fusion::w_sym;
use crate::rmatrix::ModelParams;
use crate::tensor::{antisym_basis, c64, index_of, CMatrix, Permutation, Weight, WeightVector};

/// How the products of matrix elements in `T_m` are ordered and shifted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TmOrdering {
    /// Products of the generators `L̂_ij(z) = L_ij(z,λ) Γ_j`:
    /// `Σ_σ ε(σ) L̂_{j_{σ(1)} j_1}(z) L̂_{j_{σ(2)} j_2}(z−γ) ⋯ L̂_{j_{σ(m)} j_m}(z−(m−1)γ)`,
    /// so factor `k` is evaluated at `λ − γ(ω_{j_1}+…+ω_{j_{k−1}})`.
    #[default]
    OperatorAlgebra,
    /// Factor `k` evaluated at `λ − γ(ω_{j_{k+1}}+…+ω_{j_m})`.
    PrintedShifts,
    /// Trace of `𝓡_{V^{⊗m}(z−(m−1)γ), W}` over the antisymmetric states `e_J`.
    FusedTrace,
}

impl TmOrdering {
    pub fn name(self) -> &'static str {
        match self {
            TmOrdering::OperatorAlgebra => "operator_algebra",
            TmOrdering::PrintedShifts => "printed_shifts",
            TmOrdering::FusedTrace => "fused_trace",
        }
    }
}

/// Which part of `W` the coefficients act on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    ZeroWeight,
    Full,
}

fn domain_indices(module: &EModule, domain: Domain) -> Result<Vec<usize>> {
    match domain {
        Domain::Full => Ok((0..module.dim()).collect()),
        Domain::ZeroWeight => {
            let idx = module.space().zero_weight_indices();
            if idx.is_empty() {
                Err(Error::EmptyZeroWeight)
            } else {
                Ok(idx)
            }
        }
    }
}

fn restrict(m: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(idx.len(), idx.len(), |a, b| m[(idx[a], idx[b])])
}

/// `T(z) = Σ_i L_ii(z,λ) Γ_i` on `W[0]`.
pub fn transfer_t1(module: &EModule, z: Complex64) -> Result<DifferenceOperator> {
    transfer_tm(1, z, module)
}

/// `T_m(z)` on `W[0]` with the default ordering.
pub fn transfer_tm(m: usize, z: Complex64, module: &EModule) -> Result<DifferenceOperator> {
    transfer_tm_with(m, z, module, TmOrdering::default(), Domain::ZeroWeight)
}

pub fn transfer_tm_with(
    m: usize,
    z: Complex64,
    module: &EModule,
    ordering: TmOrdering,
    domain: Domain,
) -> Result<DifferenceOperator> {
    let p = *module.params();
    if m == 0 || m > p.n_dim {
        return Err(Error::InvalidParams(format!(
            "T_m needs 1 <= m <= N, got m = {m}"
        )));
    }
    let idx = domain_indices(module, domain)?;
    let subs = subsets(p.n_dim, m);
    let shifts = subs.iter().map(|s| subset_weight(s, p.n_dim)).collect();
    let module = module.clone();
    let dim = idx.len();
    match ordering {
        TmOrdering::FusedTrace => {
            let aux = fused_rmatrix_for(m, z - p.gamma * (m - 1) as f64, &module)?;
            let basis = antisym_basis(m, p.n_dim);
            DifferenceOperator::new(p.n_dim, dim, p.gamma, shifts, move |l| {
                let r = aux.eval(l)?;
                let w = module.dim();
                let mut out = Coefficients::new();
                for (col, s) in subs.iter().enumerate() {
                    let a = basis.vectors.column(col);
                    let mut block = CMatrix::zeros(w, w);
                    for (x, ax) in a.iter().enumerate().filter(|(_, v)| v.norm() > 0.0) {
                        for (y, ay) in a.iter().enumerate().filter(|(_, v)| v.norm() > 0.0) {
                            let sub = r.view((x * w, y * w), (w, w));
                            block += sub * (ax.conj() * ay);
                        }
                    }
                    out.insert(subset_weight(s, p.n_dim), restrict(&block, &idx));
                }
                Ok(out)
            })
        }
        _ => DifferenceOperator::new(p.n_dim, dim, p.gamma, shifts, move |l| {
            let perms = Permutation::all(m);
            let mut cache: HashMap<(usize, Weight), MatrixElements> = HashMap::new();
            let mut out = Coefficients::new();
            for s in &subs {
                let mut total = CMatrix::zeros(module.dim(), module.dim());
                // spectral offset and λ-shift of each factor
                let args: Vec<(usize, Weight)> = (0..m)
                    .map(|k| {
                        let part: &[usize] = match ordering {
                            TmOrdering::PrintedShifts => &s[k + 1..],
                            _ => &s[..k],
                        };
                        (k, subset_weight(part, p.n_dim))
                    })
                    .collect();
                for key in &args {
                    if !cache.contains_key(key) {
                        let zk = z - p.gamma * key.0 as f64;
                        let e = module.matrix_elements(zk, &l.shifted(&key.1, p.gamma))?;
                        cache.insert(key.clone(), e);
                    }
                }
                for sigma in &perms {
                    let mut prod = cache[&args[0]].get(s[sigma.apply(0)], s[0]);
                    for k in 1..m {
                        prod *= cache[&args[k]].get(s[sigma.apply(k)], s[k]);
                    }
                    if sigma.sign() < 0 {
                        total -= prod;
                    } else {
                        total += prod;
                    }
                }
                out.insert(subset_weight(s, p.n_dim), restrict(&total, &idx));
            }
            Ok(out)
        }),
    }
}

/// `𝓡_{V^{⊗m}(z), W}` for an arbitrary module `W`.
fn fused_rmatrix_for(m: usize, z: Complex64, module: &EModule) -> Result<ModuleRMatrix> {
    let p = module.params();
    let mut acc = ModuleRMatrix::from_module(z, module);
    for k in 1..m {
        let next = ModuleRMatrix::from_module(z + p.gamma * k as f64, module);
        acc = crate::emodule::compose_rmatrix_left(&acc, &next)?;
    }
    Ok(acc)
}

/// `φ(λ) = Π_{i<j} θ(λ_i − λ_j)`.
pub fn phi(lambda: &WeightVector, p: &ModelParams) -> Result<Complex64> {
    let mut acc = c64(1.0, 0.0);
    for i in 0..p.n_dim {
        for j in i + 1..p.n_dim {
            acc *= p.theta(lambda.diff(i, j))?;
        }
    }
    Ok(acc)
}

/// `Det(z,λ)` on `W[0]`: the coefficient of `Γ_1⋯Γ_N` in `T_N(z)`.
pub fn quantum_det(z: Complex64, lambda: &WeightVector, module: &EModule) -> Result<CMatrix> {
    let p = module.params();
    let t = transfer_tm(p.n_dim, z, module)?;
    t.coeff(&Weight(vec![1; p.n_dim]), lambda)
}

/// `Det(z,λ)` on all of `W`: the top coefficient of `T_N(z)` multiplied by
/// `φ(λ)/φ(λ − γμ)` on each weight space `W[μ]`.
pub fn quantum_det_full(z: Complex64, lambda: &WeightVector, module: &EModule) -> Result<CMatrix> {
    let p = module.params();
    let t = transfer_tm_with(p.n_dim, z, module, TmOrdering::default(), Domain::Full)?;
    let top = t.coeff(&Weight(vec![1; p.n_dim]), lambda)?;
    let base = phi(lambda, p)?;
    let mut out = top;
    for (v, mu) in module.space().weights().iter().enumerate() {
        let ratio = base / phi(&lambda.shifted(mu, p.gamma), p)?;
        for c in 0..out.ncols() {
            out[(v, c)] *= ratio;
        }
    }
    Ok(out)
}

/// `Det̂(z) = Det(z,λ) Γ_1⋯Γ_N` on all of `W`.
pub fn det_operator(z: Complex64, module: &EModule) -> Result<DifferenceOperator> {
    let p = *module.params();
    let m = module.clone();
    DifferenceOperator::monomial(Weight(vec![1; p.n_dim]), module.dim(), p.gamma, move |l| {
        quantum_det_full(z, l, &m)
    })
}

/// The generator `L̂_ij(w) = L_ij(w,λ) Γ_j` (0-based `i, j`) on all of `W`.
pub fn l_hat(i: usize, j: usize, w: Complex64, module: &EModule) -> Result<DifferenceOperator> {
    let p = *module.params();
    if i >= p.n_dim || j >= p.n_dim {
        return Err(Error::IndexOutOfRange {
            index: i.max(j),
            max: p.n_dim - 1,
        });
    }
    let m = module.clone();
    DifferenceOperator::monomial(Weight::basis(p.n_dim, j), module.dim(), p.gamma, move |l| {
        Ok(m.matrix_elements(w, l)?.get(i, j))
    })
}

/// `θ(z − γℓ)/θ(z − γNℓ)`.
pub fn t_prefactor(z: Complex64, ell: u32, p: &ModelParams) -> Result<Complex64> {
    p.theta_ratio(
        z - p.gamma * ell as f64,
        z - p.gamma * (p.n_dim as f64 * ell as f64),
    )
}

/// `g_{N,ℓ}(λ) = Π_{j<k} Π_{s=1}^ℓ θ(λ_j−λ_k+γs)/θ(λ_j−λ_k−γ(s−1))`.
pub fn g_nl(ell: u32, lambda: &WeightVector, p: &ModelParams) -> Result<Complex64> {
    let mut acc = c64(1.0, 0.0);
    for j in 0..p.n_dim {
        for k in j + 1..p.n_dim {
            let x = lambda.diff(j, k);
            for s in 1..=ell {
                acc *= p.theta_ratio(x + p.gamma * s as f64, x - p.gamma * (s - 1) as f64)?;
            }
        }
    }
    Ok(acc)
}

/// `Π_{k≥2} θ(λ_1−λ_k+γℓ)θ(λ_1−λ_k−γℓ)/θ(λ_1−λ_k)²`.
pub fn g_ratio_product(ell: u32, lambda: &WeightVector, p: &ModelParams) -> Result<Complex64> {
    let mut acc = c64(1.0, 0.0);
    let gl = p.gamma * ell as f64;
    for k in 1..p.n_dim {
        let x = lambda.diff(0, k);
        acc *= p.theta(x + gl)? * p.theta(x - gl)? / (p.theta(x)? * p.theta(x)?);
    }
    Ok(acc)
}

/// Component of `W^S_{Nℓ}(λ) ē` along the normalised symmetric zero-weight
/// vector `e`, and the norm of the remainder relative to it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroWeightImage {
    pub coefficient: Complex64,
    pub orthogonal: f64,
}

pub fn sym_zero_weight_image(
    ell: u32,
    lambda: &WeightVector,
    p: &ModelParams,
) -> Result<ZeroWeightImage> {
    let n_dim = p.n_dim;
    let n = n_dim * ell as usize;
    let w = w_sym(n, lambda, p)?;
    let digits: Vec<usize> = (0..n_dim)
        .flat_map(|j| std::iter::repeat_n(j, ell as usize))
        .collect();
    let image = w.matrix().column(index_of(&digits, n_dim)).into_owned();
    let d = image.len();
    let support: Vec<usize> = (0..d)
        .filter(|&i| {
            let mut ds = crate::tensor::digits_of(i, n_dim, n);
            ds.sort_unstable();
            ds == digits
        })
        .collect();
    let norm = 1.0 / (support.len() as f64).sqrt();
    let coefficient = support.iter().map(|&i| image[i]).sum::<Complex64>() * norm;
    let mut rest = image;
    for &i in &support {
        rest[i] -= coefficient * norm;
    }
    Ok(ZeroWeightImage {
        coefficient,
        orthogonal: rest.norm() / coefficient.norm().max(f64::MIN_POSITIVE),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftRatioOutcome {
    /// `|c(λ)/c(λ′) − g(λ)/g(λ′)|`.
    pub residual: f64,
    /// Largest orthogonal remainder at `λ` and `λ′`.
    pub orthogonal: f64,
}

pub fn shift_ratio_check(
    ell: u32,
    lambda: &WeightVector,
    lambda_prime: &WeightVector,
    p: &ModelParams,
) -> Result<ShiftRatioOutcome> {
    let a = sym_zero_weight_image(ell, lambda, p)?;
    let b = if lambda == lambda_prime {
        a
    } else {
        sym_zero_weight_image(ell, lambda_prime, p)?
    };
    let ratio_c = a.coefficient / b.coefficient;
    let ratio_g = g_nl(ell, lambda, p)? / g_nl(ell, lambda_prime, p)?;
    Ok(ShiftRatioOutcome {
        residual: (ratio_c - ratio_g).norm(),
        orthogonal: a.orthogonal.max(b.orthogonal),
    })
}

/// `L_ii(z,λ)` of the top exterior power `∧^N V(w)`:
/// `θ(z−w)/θ(z−w−γ(N−1)) Π_{k≠i} θ(λ_i−λ_k)/θ(λ_i−λ_k−γ)`.
pub fn ext_top_diagonal(
    i: usize,
    z: Complex64,
    w: Complex64,
    lambda: &WeightVector,
    p: &ModelParams,
) -> Result<Complex64> {
    let u = z - w;
    let mut acc = p.theta_ratio(u, u - p.gamma * (p.n_dim - 1) as f64)?;
    for k in (0..p.n_dim).filter(|&k| k != i) {
        let x = lambda.diff(i, k);
        acc *= p.theta_ratio(x, x - p.gamma)?;
    }
    Ok(acc)
}

/// Scalar coefficients of a difference operator on a one-dimensional space.
pub fn scalar_coefficients(
    op: &DifferenceOperator,
    lambda: &WeightVector,
) -> Result<Vec<(Weight, Complex64)>> {
    if op.dim() != 1 {
        return Err(Error::Dimension(format!(
            "expected a scalar operator, found dimension {}",
            op.dim()
        )));
    }
    Ok(op
        .coefficients(lambda)?
        .into_iter()
        .map(|(k, v)| (k, v[(0, 0)]))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emodule::{ext_power_module, sym_power_module, vector_module};

    fn lam(n: usize) -> WeightVector {
        let v = [c64(0.11, 0.52), c64(0.73, 0.05), c64(0.34, 0.81)];
        WeightVector::new(v[..n].to_vec())
    }

    #[test]
    fn vector_module_has_no_zero_weight() {
        let p = ModelParams::with_defaults(2).unwrap();
        let v = vector_module(c64(0.0, 0.0), &p);
        assert!(matches!(transfer_t1(&v, c64(0.3, 0.0)), Err(Error::EmptyZeroWeight)));
    }

    #[test]
    fn lemma4_is_exact_at_equal_points() {
        let p = ModelParams::with_defaults(2).unwrap();
        let out = shift_ratio_check(1, &lam(2), &lam(2), &p).unwrap();
        assert_eq!(out.residual, 0.0);
    }

    #[test]
    fn g_is_one_at_zero_coupling() {
        let p = ModelParams::with_defaults(3).unwrap();
        assert_eq!(g_nl(0, &lam(3), &p).unwrap(), c64(1.0, 0.0));
    }

    #[test]
    fn t1_of_top_exterior_power_has_diagonal_coefficients() {
        let p = ModelParams::with_defaults(3).unwrap();
        let w = c64(0.05, 0.0);
        let z = c64(0.61, 0.13);
        let module = ext_power_module(3, w, &p).unwrap();
        let t = transfer_t1(&module, z).unwrap();
        let l = lam(3);
        for (mu, c) in scalar_coefficients(&t, &l).unwrap() {
            let i = mu.0.iter().position(|&x| x == 1).unwrap();
            let expect = ext_top_diagonal(i, z, w, &l, &p).unwrap();
            assert!((c - expect).norm() < 1e-10 * expect.norm(), "{c} vs {expect}");
        }
    }

    #[test]
    fn sym_power_zero_weight_is_one_dimensional() {
        let p = ModelParams::with_defaults(2).unwrap();
        let s = sym_power_module(2, c64(0.0, 0.0), &p).unwrap();
        assert_eq!(s.space().zero_weight_indices().len(), 1);
    }
}
