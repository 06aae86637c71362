//! Weight-graded dense tensor algebra on `(C^N)^{⊗n}` and on products of
//! arbitrary graded spaces.
//!
//! Multi-indices are ordered lexicographically with the first tensor factor
//! as the most significant digit.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

pub(crate) fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Multiplicities of `ω_1, …, ω_N` in a weight.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight(pub Vec<u32>);

impl Weight {
    pub fn zero(n_dim: usize) -> Self {
        Weight(vec![0; n_dim])
    }

    /// `ω_j` for a 0-based `j`.
    pub fn basis(n_dim: usize, j: usize) -> Self {
        let mut w = vec![0; n_dim];
        w[j] = 1;
        Weight(w)
    }

    pub fn n_dim(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn add_assign(&mut self, other: &Weight) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
    }

    /// True when every multiplicity is equal, i.e. the weight is a multiple
    /// of `ω_1 + … + ω_N`. Such vectors span the zero-weight space: the
    /// dynamical parameter only enters through differences `λ_i − λ_j`.
    pub fn is_balanced(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }
}

/// A point `λ ∈ C^N` of the dynamical parameter space.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(pub Vec<Complex64>);

impl WeightVector {
    pub fn new(entries: Vec<Complex64>) -> Self {
        WeightVector(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn diff(&self, i: usize, j: usize) -> Complex64 {
        self.0[i] - self.0[j]
    }

    /// `λ − γ μ`.
    pub fn shifted(&self, mu: &Weight, gamma: Complex64) -> WeightVector {
        debug_assert_eq!(self.len(), mu.n_dim());
        WeightVector(
            self.0
                .iter()
                .zip(&mu.0)
                .map(|(l, &m)| l - gamma * m as f64)
                .collect(),
        )
    }

    /// `σ·λ` with `(σ·λ)_{σ(i)} = λ_i`.
    pub fn permuted(&self, sigma: &Permutation) -> WeightVector {
        let mut out = self.0.clone();
        for (i, &t) in sigma.images().iter().enumerate() {
            out[t] = self.0[i];
        }
        WeightVector(out)
    }
}

/// Weight of the basis tensor `e_{i_1} ⊗ … ⊗ e_{i_n}` (1-based indices).
pub fn basis_weight(multi_index: &[usize], n_dim: usize) -> Result<Weight> {
    let mut w = Weight::zero(n_dim);
    for &i in multi_index {
        if i == 0 || i > n_dim {
            return Err(Error::IndexOutOfRange {
                index: i,
                max: n_dim,
            });
        }
        w.0[i - 1] += 1;
    }
    Ok(w)
}

pub fn shift_lambda(lambda: &WeightVector, mu: &Weight, gamma: Complex64) -> Result<WeightVector> {
    if lambda.len() != mu.n_dim() {
        return Err(Error::Dimension(format!(
            "lambda has {} entries but weight has {}",
            lambda.len(),
            mu.n_dim()
        )));
    }
    Ok(lambda.shifted(mu, gamma))
}

/// A finite-dimensional diagonalisable h-module, described by the weight of
/// each basis vector.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedSpace {
    n_dim: usize,
    weights: Vec<Weight>,
}

impl GradedSpace {
    pub fn new(n_dim: usize, weights: Vec<Weight>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| w.n_dim() != n_dim) {
            return Err(Error::Dimension(format!(
                "weight {:?} does not have {n_dim} entries",
                w.0
            )));
        }
        Ok(Self { n_dim, weights })
    }

    /// `V = C^N` with `V[ω_j] = C e_j`.
    pub fn vector(n_dim: usize) -> Self {
        Self {
            n_dim,
            weights: (0..n_dim).map(|j| Weight::basis(n_dim, j)).collect(),
        }
    }

    /// One-dimensional space of weight zero.
    pub fn trivial(n_dim: usize) -> Self {
        Self {
            n_dim,
            weights: vec![Weight::zero(n_dim)],
        }
    }

    pub fn tensor_power(n_dim: usize, n: usize) -> Self {
        (0..n).fold(Self::trivial(n_dim), |acc, _| {
            acc.tensor(&Self::vector(n_dim))
        })
    }

    /// `self ⊗ other`, with `self` the more significant factor.
    pub fn tensor(&self, other: &GradedSpace) -> GradedSpace {
        let mut weights = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.weights {
            for b in &other.weights {
                weights.push(a.add(b));
            }
        }
        GradedSpace {
            n_dim: self.n_dim,
            weights,
        }
    }

    pub fn n_dim(&self) -> usize {
        self.n_dim
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> &Weight {
        &self.weights[i]
    }

    /// Indices of basis vectors spanning the zero-weight space.
    pub fn zero_weight_indices(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.weights[i].is_balanced())
            .collect()
    }
}

/// A dense operator on a graded space.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedOperator {
    space: GradedSpace,
    matrix: CMatrix,
}

impl GradedOperator {
    pub fn new(space: GradedSpace, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != space.dim() || matrix.ncols() != space.dim() {
            return Err(Error::Dimension(format!(
                "matrix {}x{} does not act on a space of dimension {}",
                matrix.nrows(),
                matrix.ncols(),
                space.dim()
            )));
        }
        Ok(Self { space, matrix })
    }

    pub fn identity(space: GradedSpace) -> Self {
        let d = space.dim();
        Self {
            space,
            matrix: CMatrix::identity(d, d),
        }
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Largest entry connecting basis vectors of different weight.
    pub fn off_block_norm(&self) -> f64 {
        off_block_norm(&self.matrix, &self.space)
    }

    pub fn is_h_invariant(&self, tol: f64) -> bool {
        self.off_block_norm() <= tol
    }

    pub fn compose(&self, rhs: &GradedOperator) -> Result<GradedOperator> {
        if self.space != rhs.space {
            return Err(Error::Dimension("operators act on different spaces".into()));
        }
        Ok(GradedOperator {
            space: self.space.clone(),
            matrix: &self.matrix * &rhs.matrix,
        })
    }
}

pub fn off_block_norm(m: &CMatrix, space: &GradedSpace) -> f64 {
    let mut worst = 0.0_f64;
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            if space.weight(r) != space.weight(c) {
                worst = worst.max(m[(r, c)].norm());
            }
        }
    }
    worst
}

/// A permutation of `{0, …, n−1}` stored by its images.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::InvalidPermutation(images));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    /// Builds from 1-based images `σ(1), …, σ(n)`.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::InvalidPermutation(images.to_vec()));
        }
        Self::new(images.iter().map(|i| i - 1).collect())
            .map_err(|_| Error::InvalidPermutation(images.to_vec()))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut p: Vec<usize> = (0..n).collect();
        p.swap(a, b);
        Permutation(p)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, k: usize) -> usize {
        self.0[k]
    }

    /// `self ∘ rhs`: apply `rhs` first.
    pub fn compose(&self, rhs: &Permutation) -> Permutation {
        Permutation(rhs.0.iter().map(|&k| self.0[k]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (k, &t) in self.0.iter().enumerate() {
            inv[t] = k;
        }
        Permutation(inv)
    }

    pub fn sign(&self) -> i32 {
        let mut visited = vec![false; self.len()];
        let mut sign = 1;
        for start in 0..self.len() {
            if visited[start] {
                continue;
            }
            let mut len = 0;
            let mut k = start;
            while !visited[k] {
                visited[k] = true;
                k = self.0[k];
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        sign
    }

    /// All permutations of `n` letters in lexicographic order of images.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        loop {
            out.push(Permutation(cur.clone()));
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
                break;
            };
            let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }
}

pub(crate) fn digits_of(mut index: usize, n_dim: usize, n: usize) -> Vec<usize> {
    let mut d = vec![0; n];
    for k in (0..n).rev() {
        d[k] = index % n_dim;
        index /= n_dim;
    }
    d
}

pub(crate) fn index_of(digits: &[usize], n_dim: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * n_dim + d)
}

/// Operator moving tensor factor `k` to position `σ(k)`.
pub fn permutation_operator(sigma: &Permutation, n_dim: usize) -> GradedOperator {
    let n = sigma.len();
    let space = GradedSpace::tensor_power(n_dim, n);
    let d = space.dim();
    let mut m = CMatrix::zeros(d, d);
    let mut out = vec![0; n];
    for c in 0..d {
        let digits = digits_of(c, n_dim, n);
        for (k, &dk) in digits.iter().enumerate() {
            out[sigma.apply(k)] = dk;
        }
        m[(index_of(&out, n_dim), c)] = c64(1.0, 0.0);
    }
    GradedOperator { space, matrix: m }
}

/// Flip `P^{(a,b)}` exchanging factors `a` and `b` of `(C^N)^{⊗n}` (0-based).
pub fn flip(n: usize, a: usize, b: usize, n_dim: usize) -> GradedOperator {
    permutation_operator(&Permutation::transposition(n, a, b), n_dim)
}

fn symmetrizer(n: usize, n_dim: usize, signed: bool) -> GradedOperator {
    let space = GradedSpace::tensor_power(n_dim, n);
    let d = space.dim();
    let perms = Permutation::all(n);
    let scale = 1.0 / perms.len() as f64;
    let mut m = CMatrix::zeros(d, d);
    for sigma in &perms {
        let s = if signed { sigma.sign() as f64 } else { 1.0 };
        m += permutation_operator(sigma, n_dim).matrix * c64(s * scale, 0.0);
    }
    GradedOperator { space, matrix: m }
}

/// Orthogonal projector onto `S^n(C^N)`.
pub fn projector_sym(n: usize, n_dim: usize) -> GradedOperator {
    symmetrizer(n, n_dim, false)
}

/// Orthogonal projector onto the antisymmetric tensors `A_n(C^N)`; its
/// kernel is `J_n(C^N)`.
pub fn projector_antisym(n: usize, n_dim: usize) -> GradedOperator {
    symmetrizer(n, n_dim, true)
}

/// Orthogonal projector onto `J_n(C^N)`, the complement of `A_n(C^N)`.
pub fn projector_j(n: usize, n_dim: usize) -> GradedOperator {
    let a = projector_antisym(n, n_dim);
    let d = a.dim();
    GradedOperator {
        space: a.space.clone(),
        matrix: CMatrix::identity(d, d) - a.matrix,
    }
}

fn sorted_multisets(n: usize, n_dim: usize, strict: bool) -> Vec<Vec<usize>> {
    fn rec(
        start: usize,
        left: usize,
        n_dim: usize,
        strict: bool,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for v in start..n_dim {
            cur.push(v);
            rec(if strict { v + 1 } else { v }, left - 1, n_dim, strict, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, n_dim, strict, &mut Vec::new(), &mut out);
    out
}

/// Orthonormal weight-homogeneous basis of a symmetric or antisymmetric
/// subspace, as the columns of a matrix, with the weight of each column.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    pub vectors: CMatrix,
    pub space: GradedSpace,
}

/// Normalised symmetrised monomials, one per multiset of indices.
pub fn sym_basis(n: usize, n_dim: usize) -> SubspaceBasis {
    let d = n_dim.pow(n as u32);
    let sets = sorted_multisets(n, n_dim, false);
    let mut vectors = CMatrix::zeros(d, sets.len());
    let mut weights = Vec::with_capacity(sets.len());
    for (col, set) in sets.iter().enumerate() {
        let mut support = Vec::new();
        for idx in 0..d {
            let mut digits = digits_of(idx, n_dim, n);
            digits.sort_unstable();
            if &digits == set {
                support.push(idx);
            }
        }
        let norm = 1.0 / (support.len() as f64).sqrt();
        for idx in support {
            vectors[(idx, col)] = c64(norm, 0.0);
        }
        let mut w = Weight::zero(n_dim);
        for &v in set {
            w.0[v] += 1;
        }
        weights.push(w);
    }
    SubspaceBasis {
        vectors,
        space: GradedSpace { n_dim, weights },
    }
}

/// Normalised `e_{j_1} ∧ … ∧ e_{j_n}` for `j_1 < … < j_n`.
pub fn antisym_basis(n: usize, n_dim: usize) -> SubspaceBasis {
    let d = n_dim.pow(n as u32);
    let sets = sorted_multisets(n, n_dim, true);
    let mut vectors = CMatrix::zeros(d, sets.len());
    let mut weights = Vec::with_capacity(sets.len());
    let perms = Permutation::all(n);
    let norm = 1.0 / (perms.len() as f64).sqrt();
    for (col, set) in sets.iter().enumerate() {
        let mut digits = vec![0; n];
        for sigma in &perms {
            for k in 0..n {
                digits[sigma.apply(k)] = set[k];
            }
            vectors[(index_of(&digits, n_dim), col)] = c64(sigma.sign() as f64 * norm, 0.0);
        }
        let mut w = Weight::zero(n_dim);
        for &v in set {
            w.0[v] += 1;
        }
        weights.push(w);
    }
    SubspaceBasis {
        vectors,
        space: GradedSpace { n_dim, weights },
    }
}

pub const DEFAULT_RANK_TOL: f64 = 1e-7;

pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Number of singular values above `rel_tol` times the largest.
pub fn numeric_rank(a: &CMatrix, rel_tol: f64) -> usize {
    let sv = singular_values(a);
    match sv.first() {
        Some(&top) if top > 0.0 => sv.iter().filter(|&&s| s > rel_tol * top).count(),
        _ => 0,
    }
}

/// Orthonormal basis of the numerical column space.
pub fn column_basis(a: &CMatrix, rel_tol: f64) -> CMatrix {
    if a.is_empty() {
        return CMatrix::zeros(a.nrows(), 0);
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| top > 0.0 && svd.singular_values[i] > rel_tol * top)
        .collect();
    let mut out = CMatrix::zeros(a.nrows(), keep.len());
    for (k, &i) in keep.iter().enumerate() {
        out.set_column(k, &u.column(i));
    }
    out
}

/// Largest residual of projecting the columns of `b` onto the column space
/// of `a`, relative to the largest column norm of `b`.
pub fn projection_residual(a: &CMatrix, b: &CMatrix, rel_tol: f64) -> f64 {
    let q = column_basis(a, rel_tol);
    let resid = b - &q * (q.adjoint() * b);
    let scale = (0..b.ncols()).map(|j| b.column(j).norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    (0..b.ncols())
        .map(|j| resid.column(j).norm())
        .fold(0.0, f64::max)
        / scale
}

pub fn same_column_space(a: &CMatrix, b: &CMatrix, rel_tol: f64) -> bool {
    if a.nrows() != b.nrows() {
        return false;
    }
    numeric_rank(a, rel_tol) == numeric_rank(b, rel_tol)
        && projection_residual(a, b, rel_tol) <= rel_tol
}

/// Relative Frobenius distance `‖a − b‖ / max(‖a‖, ‖b‖, tiny)`.
pub fn rel_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    let scale = a.norm().max(b.norm()).max(f64::MIN_POSITIVE);
    (a - b).norm() / scale
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// A tensor product of graded factors, used to place local operators on a
/// subset of factors with weight-dependent dynamical shifts.
#[derive(Debug, Clone)]
pub struct Layout {
    factors: Vec<GradedSpace>,
    dims: Vec<usize>,
    dim: usize,
}

impl Layout {
    pub fn new(factors: Vec<GradedSpace>) -> Self {
        let dims: Vec<usize> = factors.iter().map(|f| f.dim()).collect();
        let dim = dims.iter().product();
        Self { factors, dims, dim }
    }

    pub fn uniform(n_dim: usize, n: usize) -> Self {
        Self::new(vec![GradedSpace::vector(n_dim); n])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn factor(&self, k: usize) -> &GradedSpace {
        &self.factors[k]
    }

    pub fn space(&self) -> GradedSpace {
        let n_dim = self.factors[0].n_dim();
        self.factors
            .iter()
            .fold(GradedSpace::trivial(n_dim), |acc, f| acc.tensor(f))
    }

    fn digits(&self, mut index: usize, out: &mut [usize]) {
        for k in (0..self.dims.len()).rev() {
            out[k] = index % self.dims[k];
            index /= self.dims[k];
        }
    }

    fn index(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&d, &n)| acc * n + d)
    }

    /// Sparse columns of the operator that acts as `local(μ)` on the factors
    /// `sites` (in that order) and as the identity elsewhere, where `μ` is the
    /// total weight of the factors in `shift_sites`.
    pub fn sparse_embed(
        &self,
        sites: &[usize],
        shift_sites: &[usize],
        local: &mut dyn FnMut(&Weight) -> Result<CMatrix>,
    ) -> Result<Vec<Vec<(usize, Complex64)>>> {
        let n_dim = self.factors[0].n_dim();
        let local_dims: Vec<usize> = sites.iter().map(|&s| self.dims[s]).collect();
        let local_dim: usize = local_dims.iter().product();
        let mut cache: HashMap<Weight, CMatrix> = HashMap::new();
        let mut digits = vec![0; self.dims.len()];
        let mut target = vec![0; self.dims.len()];
        let mut local_digits = vec![0; sites.len()];
        let mut cols = Vec::with_capacity(self.dim);
        for c in 0..self.dim {
            self.digits(c, &mut digits);
            let mut mu = Weight::zero(n_dim);
            for &s in shift_sites {
                mu.add_assign(self.factors[s].weight(digits[s]));
            }
            if !cache.contains_key(&mu) {
                let m = local(&mu)?;
                if m.nrows() != local_dim || m.ncols() != local_dim {
                    return Err(Error::Dimension(format!(
                        "local operator is {}x{}, expected {local_dim}",
                        m.nrows(),
                        m.ncols()
                    )));
                }
                cache.insert(mu.clone(), m);
            }
            let m = &cache[&mu];
            let local_col = sites
                .iter()
                .zip(&local_dims)
                .fold(0, |acc, (&s, &n)| acc * n + digits[s]);
            let mut entries = Vec::new();
            target.copy_from_slice(&digits);
            for r in 0..local_dim {
                let v = m[(r, local_col)];
                if v == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let mut rr = r;
                for k in (0..sites.len()).rev() {
                    local_digits[k] = rr % local_dims[k];
                    rr /= local_dims[k];
                }
                for (k, &s) in sites.iter().enumerate() {
                    target[s] = local_digits[k];
                }
                entries.push((self.index(&target), v));
            }
            cols.push(entries);
        }
        Ok(cols)
    }

    /// Applies the embedded local operator to every column of `input`.
    pub fn apply_local(
        &self,
        sites: &[usize],
        shift_sites: &[usize],
        local: &mut dyn FnMut(&Weight) -> Result<CMatrix>,
        input: &CMatrix,
    ) -> Result<CMatrix> {
        if input.nrows() != self.dim {
            return Err(Error::Dimension(format!(
                "input has {} rows, layout dimension is {}",
                input.nrows(),
                self.dim
            )));
        }
        let cols = self.sparse_embed(sites, shift_sites, local)?;
        Ok(apply_sparse(&cols, input))
    }

    /// Dense matrix of the embedded local operator.
    pub fn embed(
        &self,
        sites: &[usize],
        shift_sites: &[usize],
        local: &mut dyn FnMut(&Weight) -> Result<CMatrix>,
    ) -> Result<CMatrix> {
        let cols = self.sparse_embed(sites, shift_sites, local)?;
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (c, entries) in cols.iter().enumerate() {
            for &(r, v) in entries {
                m[(r, c)] += v;
            }
        }
        Ok(m)
    }
}

pub(crate) fn apply_sparse(cols: &[Vec<(usize, Complex64)>], input: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(input.nrows(), input.ncols());
    for j in 0..input.ncols() {
        let src = input.column(j);
        let mut dst = out.column_mut(j);
        for (c, entries) in cols.iter().enumerate() {
            let v = src[c];
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            for &(r, m) in entries {
                dst[r] += m * v;
            }
        }
    }
    out
}

/// Block-diagonal `Id_{C^k} ⊗ B`.
pub fn identity_kron(k: usize, b: &CMatrix) -> CMatrix {
    let (r, c) = b.shape();
    let mut out = CMatrix::zeros(k * r, k * c);
    for i in 0..k {
        out.view_mut((i * r, i * c), (r, c)).copy_from(b);
    }
    out
}
