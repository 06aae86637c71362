//! Difference operators in `λ` with matrix coefficients.
//!
//! An operator is a finite sum `Σ_μ a_μ(λ) Γ^μ`, `μ ∈ Z_{≥0}^N`, acting by
//! `(A f)(λ) = Σ_μ a_μ(λ) f(λ − γμ)`. Coefficients are evaluated lazily: an
//! operator holds one evaluator that returns all coefficients at a point.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rmatrix::ModelParams;
use crate::tensor::{c64, max_abs, CMatrix, Permutation, Weight, WeightVector};

pub type Coefficients = BTreeMap<Weight, CMatrix>;

type Evaluator = Arc<dyn Fn(&WeightVector) -> Result<Coefficients> + Send + Sync>;

#[derive(Clone)]
pub struct DifferenceOperator {
    n_dim: usize,
    dim: usize,
    gamma: Complex64,
    shifts: Vec<Weight>,
    eval: Evaluator,
}

impl fmt::Debug for DifferenceOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DifferenceOperator")
            .field("n_dim", &self.n_dim)
            .field("dim", &self.dim)
            .field("shifts", &self.shifts)
            .finish()
    }
}

impl DifferenceOperator {
    /// `shifts` lists every shift the evaluator may return; missing entries
    /// count as zero.
    pub fn new(
        n_dim: usize,
        dim: usize,
        gamma: Complex64,
        shifts: Vec<Weight>,
        eval: impl Fn(&WeightVector) -> Result<Coefficients> + Send + Sync + 'static,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("difference operator on a zero space".into()));
        }
        if let Some(bad) = shifts.iter().find(|s| s.n_dim() != n_dim) {
            return Err(Error::Dimension(format!(
                "shift {:?} has length {}, expected {n_dim}",
                bad.0,
                bad.n_dim()
            )));
        }
        let mut shifts = shifts;
        shifts.sort();
        shifts.dedup();
        Ok(Self {
            n_dim,
            dim,
            gamma,
            shifts,
            eval: Arc::new(eval),
        })
    }

    /// `a(λ) Γ^μ` for a single shift.
    pub fn monomial(
        mu: Weight,
        dim: usize,
        gamma: Complex64,
        coeff: impl Fn(&WeightVector) -> Result<CMatrix> + Send + Sync + 'static,
    ) -> Result<Self> {
        let key = mu.clone();
        Self::new(mu.n_dim(), dim, gamma, vec![mu], move |l| {
            Ok(Coefficients::from([(key.clone(), coeff(l)?)]))
        })
    }

    /// `Γ^μ` with identity coefficient.
    pub fn shift(mu: Weight, dim: usize, gamma: Complex64) -> Result<Self> {
        Self::monomial(mu, dim, gamma, move |_| Ok(CMatrix::identity(dim, dim)))
    }

    /// `Γ_j` for a 0-based `j`.
    pub fn gamma_shift(j: usize, n_dim: usize, gamma: Complex64) -> Result<Self> {
        if j >= n_dim {
            return Err(Error::IndexOutOfRange {
                index: j,
                max: n_dim - 1,
            });
        }
        Self::shift(Weight::basis(n_dim, j), 1, gamma)
    }

    pub fn identity(n_dim: usize, dim: usize, gamma: Complex64) -> Result<Self> {
        Self::shift(Weight::zero(n_dim), dim, gamma)
    }

    pub fn n_dim(&self) -> usize {
        self.n_dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gamma(&self) -> Complex64 {
        self.gamma
    }

    pub fn shifts(&self) -> &[Weight] {
        &self.shifts
    }

    /// All coefficients at `λ`, zero-filled over the declared shifts.
    pub fn coefficients(&self, lambda: &WeightVector) -> Result<Coefficients> {
        let mut c = (self.eval)(lambda)?;
        for s in &self.shifts {
            c.entry(s.clone())
                .or_insert_with(|| CMatrix::zeros(self.dim, self.dim));
        }
        Ok(c)
    }

    pub fn coeff(&self, mu: &Weight, lambda: &WeightVector) -> Result<CMatrix> {
        Ok(self
            .coefficients(lambda)?
            .remove(mu)
            .unwrap_or_else(|| CMatrix::zeros(self.dim, self.dim)))
    }

    /// `(A f)(λ)` for a vector-valued `f`.
    pub fn apply(
        &self,
        f: &dyn Fn(&WeightVector) -> Result<CMatrix>,
        lambda: &WeightVector,
    ) -> Result<CMatrix> {
        let mut out: Option<CMatrix> = None;
        for (mu, a) in self.coefficients(lambda)? {
            let term = a * f(&lambda.shifted(&mu, self.gamma))?;
            out = Some(match out {
                Some(acc) => acc + term,
                None => term,
            });
        }
        out.ok_or_else(|| Error::Dimension("operator without shifts".into()))
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n_dim != other.n_dim || self.dim != other.dim {
            return Err(Error::Dimension(format!(
                "operators on ({}, {}) and ({}, {})",
                self.n_dim, self.dim, other.n_dim, other.dim
            )));
        }
        if self.gamma != other.gamma {
            return Err(Error::InvalidParams("operators with different γ".into()));
        }
        Ok(())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let inner = self.clone();
        Self {
            eval: Arc::new(move |l| {
                let mut c = inner.coefficients(l)?;
                c.values_mut().for_each(|m| *m *= s);
                Ok(c)
            }),
            ..self.clone()
        }
    }

    /// `A + s·B`.
    pub fn add_scaled(&self, other: &Self, s: Complex64) -> Result<Self> {
        self.check_compatible(other)?;
        let (a, b) = (self.clone(), other.clone());
        let shifts = self.shifts.iter().chain(&other.shifts).cloned().collect();
        Self::new(self.n_dim, self.dim, self.gamma, shifts, move |l| {
            let mut c = a.coefficients(l)?;
            for (mu, m) in b.coefficients(l)? {
                let entry = c
                    .entry(mu)
                    .or_insert_with(|| CMatrix::zeros(m.nrows(), m.ncols()));
                *entry += m * s;
            }
            Ok(c)
        })
    }

    /// Shifts of a product, `μ + ν`.
    fn product_shifts(&self, other: &Self) -> Vec<Weight> {
        let mut out = Vec::new();
        for mu in &self.shifts {
            for nu in &other.shifts {
                out.push(mu.add(nu));
            }
        }
        out
    }
}

/// `A ∘ B`: `coeff(ρ, λ) = Σ_{μ+ν=ρ} a_μ(λ) b_ν(λ − γμ)`.
pub fn compose(a: &DifferenceOperator, b: &DifferenceOperator) -> Result<DifferenceOperator> {
    a.check_compatible(b)?;
    let shifts = a.product_shifts(b);
    let (a, b) = (a.clone(), b.clone());
    let gamma = a.gamma;
    DifferenceOperator::new(a.n_dim, a.dim, a.gamma, shifts, move |l| {
        let mut out = Coefficients::new();
        for (mu, am) in a.coefficients(l)? {
            for (nu, bm) in b.coefficients(&l.shifted(&mu, gamma))? {
                let term = &am * bm;
                match out.entry(mu.add(&nu)) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(term);
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => *e.get_mut() += term,
                }
            }
        }
        Ok(out)
    })
}

/// `A ∘ B − B ∘ A`.
pub fn commutator(a: &DifferenceOperator, b: &DifferenceOperator) -> Result<DifferenceOperator> {
    compose(a, b)?.add_scaled(&compose(b, a)?, c64(-1.0, 0.0))
}

/// `σ ∘ A ∘ σ^{-1}` where `(σf)(λ) = f(σ^{-1}λ)`: the shift `μ` becomes `σμ`
/// and `coeff(σμ, λ) = a_μ(σ^{-1}λ)`.
pub fn sn_conjugate(a: &DifferenceOperator, sigma: &Permutation) -> Result<DifferenceOperator> {
    if sigma.len() != a.n_dim {
        return Err(Error::InvalidPermutation(sigma.images().to_vec()));
    }
    let act = |mu: &Weight| {
        let mut out = vec![0; mu.n_dim()];
        for (i, &m) in mu.0.iter().enumerate() {
            out[sigma.apply(i)] = m;
        }
        Weight(out)
    };
    let shifts = a.shifts.iter().map(act).collect();
    let inner = a.clone();
    let sigma = sigma.clone();
    let inv = sigma.inverse();
    DifferenceOperator::new(a.n_dim, a.dim, a.gamma, shifts, move |l| {
        let mut out = Coefficients::new();
        for (mu, m) in inner.coefficients(&l.permuted(&inv))? {
            let mut moved = vec![0; mu.n_dim()];
            for (i, &v) in mu.0.iter().enumerate() {
                moved[sigma.apply(i)] = v;
            }
            out.insert(Weight(moved), m);
        }
        Ok(out)
    })
}

/// The indicator weight of a subset of `0..n_dim`.
pub fn subset_weight(subset: &[usize], n_dim: usize) -> Weight {
    let mut w = vec![0; n_dim];
    for &j in subset {
        w[j] = 1;
    }
    Weight(w)
}

/// All `m`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            cur.push(j);
            rec(j + 1, n, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, m, &mut Vec::new(), &mut out);
    out
}

/// `Π_{j∈J, k∉J} θ(λ_j − λ_k + γℓ)/θ(λ_j − λ_k)`.
pub fn ruijsenaars_coefficient(
    subset: &[usize],
    ell: u32,
    lambda: &WeightVector,
    p: &ModelParams,
) -> Result<Complex64> {
    let mut acc = c64(1.0, 0.0);
    for &j in subset {
        for k in (0..p.n_dim).filter(|k| !subset.contains(k)) {
            let x = lambda.diff(j, k);
            acc *= p.theta_ratio(x + p.gamma * ell as f64, x)?;
        }
    }
    Ok(acc)
}

/// `M_m = Σ_{|J|=m} Π_{j∈J,k∉J} θ(λ_j−λ_k+γℓ)/θ(λ_j−λ_k) Π_{j∈J} Γ_j`, scalar coefficients.
pub fn ruijsenaars_m(m: usize, ell: u32, p: &ModelParams) -> Result<DifferenceOperator> {
    p.validate()?;
    if m == 0 || m > p.n_dim {
        return Err(Error::InvalidParams(format!(
            "M_m needs 1 <= m <= N, got m = {m}"
        )));
    }
    let subs = subsets(p.n_dim, m);
    let shifts = subs.iter().map(|s| subset_weight(s, p.n_dim)).collect();
    let p = *p;
    DifferenceOperator::new(p.n_dim, 1, p.gamma, shifts, move |l| {
        subs.iter()
            .map(|s| {
                let c = ruijsenaars_coefficient(s, ell, l, &p)?;
                Ok((subset_weight(s, p.n_dim), CMatrix::from_element(1, 1, c)))
            })
            .collect()
    })
}

/// Largest entry modulus over all coefficients and sample points.
pub fn max_coefficient(a: &DifferenceOperator, samples: &[WeightVector]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for l in samples {
        for m in a.coefficients(l)?.values() {
            worst = worst.max(max_abs(m));
        }
    }
    Ok(worst)
}

/// Largest entry modulus of `A − B` over the samples, divided by the largest
/// entry of `A` (or 1 if that is smaller).
pub fn max_difference(
    a: &DifferenceOperator,
    b: &DifferenceOperator,
    samples: &[WeightVector],
) -> Result<f64> {
    let diff = a.add_scaled(b, c64(-1.0, 0.0))?;
    Ok(max_coefficient(&diff, samples)? / max_coefficient(a, samples)?.max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize) -> ModelParams {
        ModelParams::with_defaults(n).unwrap()
    }

    fn lam3() -> WeightVector {
        WeightVector::new(vec![c64(0.11, 0.52), c64(0.73, 0.05), c64(0.34, 0.81)])
    }

    #[test]
    fn shifts_compose_additively() {
        let g = p(3).gamma;
        let a = DifferenceOperator::gamma_shift(0, 3, g).unwrap();
        let b = DifferenceOperator::gamma_shift(1, 3, g).unwrap();
        let ab = compose(&a, &b).unwrap();
        let ba = compose(&b, &a).unwrap();
        let key = Weight(vec![1, 1, 0]);
        assert_eq!(ab.shifts(), std::slice::from_ref(&key));
        assert_eq!(ab.coeff(&key, &lam3()).unwrap()[(0, 0)], c64(1.0, 0.0));
        assert_eq!(ba.coeff(&key, &lam3()).unwrap()[(0, 0)], c64(1.0, 0.0));
    }

    #[test]
    fn composition_shifts_the_second_coefficient() {
        let g = p(2).gamma;
        let a = DifferenceOperator::gamma_shift(0, 2, g).unwrap();
        let f = DifferenceOperator::monomial(Weight::zero(2), 1, g, |l| {
            Ok(CMatrix::from_element(1, 1, l.0[0]))
        })
        .unwrap();
        let af = compose(&a, &f).unwrap();
        let l = WeightVector::new(vec![c64(0.4, 0.0), c64(0.0, 0.0)]);
        let c = af.coeff(&Weight(vec![1, 0]), &l).unwrap()[(0, 0)];
        assert!((c - (c64(0.4, 0.0) - g)).norm() < 1e-15);
    }

    #[test]
    fn self_commutator_vanishes() {
        let m = ruijsenaars_m(1, 1, &p(3)).unwrap();
        let c = commutator(&m, &m).unwrap();
        assert_eq!(max_coefficient(&c, &[lam3()]).unwrap(), 0.0);
    }

    #[test]
    fn top_operator_is_the_full_shift() {
        let m = ruijsenaars_m(3, 2, &p(3)).unwrap();
        assert_eq!(m.shifts(), &[Weight(vec![1, 1, 1])]);
        assert_eq!(m.coeff(&Weight(vec![1, 1, 1]), &lam3()).unwrap()[(0, 0)], c64(1.0, 0.0));
    }

    #[test]
    fn zero_coupling_gives_unit_coefficients() {
        for m in 1..=3 {
            let op = ruijsenaars_m(m, 0, &p(3)).unwrap();
            for c in op.coefficients(&lam3()).unwrap().values() {
                assert!((c[(0, 0)] - 1.0).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn m_out_of_range_is_rejected() {
        assert!(ruijsenaars_m(0, 1, &p(2)).is_err());
        assert!(ruijsenaars_m(3, 1, &p(2)).is_err());
    }

    #[test]
    fn conjugating_a_shift_moves_it() {
        let g = p(3).gamma;
        let a = DifferenceOperator::gamma_shift(0, 3, g).unwrap();
        let s = Permutation::transposition(3, 0, 1);
        let b = sn_conjugate(&a, &s).unwrap();
        assert_eq!(b.shifts(), &[Weight(vec![0, 1, 0])]);
    }

    #[test]
    fn subsets_are_lexicographic() {
        assert_eq!(subsets(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(subsets(4, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn apply_uses_shifted_arguments() {
        let g = p(2).gamma;
        let a = DifferenceOperator::gamma_shift(1, 2, g).unwrap();
        let l = WeightVector::new(vec![c64(0.2, 0.0), c64(0.5, 0.1)]);
        let v = a
            .apply(&|x: &WeightVector| Ok(CMatrix::from_element(1, 1, x.0[1])), &l)
            .unwrap();
        assert!((v[(0, 0)] - (l.0[1] - g)).norm() < 1e-15);
    }
}
