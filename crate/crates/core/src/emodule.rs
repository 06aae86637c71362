//! E-modules `(W, L)`: the vector representation, tensor products, the fused
//! products `V^{⊗n}(w) = V(w) ⊗ V(w+γ) ⊗ … ⊗ V(w+(n−1)γ)`, their symmetric
//! and exterior powers, and R-matrices between modules.
//!
//! The tensor product of `(W_1, L_1)` and `(W_2, L_2)` carries
//! `L(z,λ) = L_1(z, λ−γh^{(3)})^{(12)} L_2(z, λ)^{(13)}`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rmatrix::{r_matrix, ModelParams};
use crate::tensor::{
    antisym_basis, c64, identity_kron, projector_antisym, sym_basis, CMatrix,
    GradedOperator, GradedSpace, Layout, Permutation, WeightVector,
};

/// Largest relative amount by which a restricted L-operator may leave its subspace.
pub const LEAKAGE_TOL: f64 = 1e-8;

/// Evaluator of an L-operator on `C^N ⊗ W`.
pub trait LOperator: Send + Sync {
    fn eval(&self, z: Complex64, lambda: &WeightVector) -> Result<CMatrix>;

    fn describe(&self) -> String;
}

#[derive(Clone)]
pub struct EModule {
    space: GradedSpace,
    l_op: Arc<dyn LOperator>,
    label: String,
    params: ModelParams,
}

impl fmt::Debug for EModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EModule")
            .field("label", &self.label)
            .field("dim", &self.space.dim())
            .finish()
    }
}

impl EModule {
    pub fn new(
        space: GradedSpace,
        l_op: Arc<dyn LOperator>,
        label: impl Into<String>,
        params: ModelParams,
    ) -> Self {
        Self {
            space,
            l_op,
            label: label.into(),
            params,
        }
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn l_matrix(&self, z: Complex64, lambda: &WeightVector) -> Result<CMatrix> {
        self.l_op.eval(z, lambda)
    }

    pub fn l(&self, z: Complex64, lambda: &WeightVector) -> Result<GradedOperator> {
        GradedOperator::new(
            GradedSpace::vector(self.params.n_dim).tensor(&self.space),
            self.l_matrix(z, lambda)?,
        )
    }

    /// Matrix elements `L_{ji}` defined by `L (e_i ⊗ v) = Σ_j e_j ⊗ L_{ji} v`.
    pub fn matrix_elements(&self, z: Complex64, lambda: &WeightVector) -> Result<MatrixElements> {
        Ok(MatrixElements {
            full: self.l_matrix(z, lambda)?,
            block: self.dim(),
        })
    }
}

/// Blocks of an L-operator indexed by the auxiliary factor.
#[derive(Debug, Clone)]
pub struct MatrixElements {
    full: CMatrix,
    block: usize,
}

impl MatrixElements {
    /// `L_{ji}` for 0-based `j, i`.
    pub fn get(&self, j: usize, i: usize) -> CMatrix {
        self.full
            .view((j * self.block, i * self.block), (self.block, self.block))
            .into_owned()
    }

    pub fn full(&self) -> &CMatrix {
        &self.full
    }
}

struct VectorL {
    w: Complex64,
    p: ModelParams,
}

impl LOperator for VectorL {
    fn eval(&self, z: Complex64, lambda: &WeightVector) -> Result<CMatrix> {
        r_matrix(z - self.w, lambda, &self.p)
    }

    fn describe(&self) -> String {
        format!("V({})", self.w)
    }
}

/// `V(w)`: `W = C^N`, `L(z,λ) = R(z−w, λ)`.
pub fn vector_module(w: Complex64, p: &ModelParams) -> EModule {
    let l = VectorL { w, p: *p };
    let label = l.describe();
    EModule::new(GradedSpace::vector(p.n_dim), Arc::new(l), label, *p)
}

struct TrivialL {
    n_dim: usize,
}

impl LOperator for TrivialL {
    fn eval(&self, _z: Complex64, _lambda: &WeightVector) -> Result<CMatrix> {
        Ok(CMatrix::identity(self.n_dim, self.n_dim))
    }

    fn describe(&self) -> String {
        "C".into()
    }
}

/// One-dimensional zero-weight module with `L = Id`.
pub fn trivial_module(p: &ModelParams) -> EModule {
    EModule::new(
        GradedSpace::trivial(p.n_dim),
        Arc::new(TrivialL { n_dim: p.n_dim }),
        "C",
        *p,
    )
}

struct TensorL {
    first: EModule,
    second: EModule,
}

impl LOperator for TensorL {
    fn eval(&self, z: Complex64, lambda: &WeightVector) -> Result<CMatrix> {
        let p = self.first.params;
        let layout = Layout::new(vec![
            GradedSpace::vector(p.n_dim),
            self.first.space.clone(),
            self.second.space.clone(),
        ]);
        let l2 = layout.embed(&[0, 2], &[], &mut |_| self.second.l_matrix(z, lambda))?;
        layout.apply_local(
            &[0, 1],
            &[2],
            &mut |mu| self.first.l_matrix(z, &lambda.shifted(mu, p.gamma)),
            &l2,
        )
    }

    fn describe(&self) -> String {
        format!("({} ⊗ {})", self.first.label, self.second.label)
    }
}

pub fn tensor_module(first: &EModule, second: &EModule) -> Result<EModule> {
    if first.params != second.params {
        return Err(Error::InvalidParams(
            "tensor product of modules with different parameters".into(),
        ));
    }
    let l = TensorL {
        first: first.clone(),
        second: second.clone(),
    };
    let label = l.describe();
    Ok(EModule::new(
        first.space.tensor(&second.space),
        Arc::new(l),
        label,
        first.params,
    ))
}

/// The L-operator of `V^{⊗n}(w)` as a product of fundamental R-matrices,
/// applied without forming the full matrix:
/// `R(z−w, λ−γΣ_{j≥2}h^{(j)})^{(01)} R(z−w−γ, λ−γΣ_{j≥3}h^{(j)})^{(02)} ⋯ R(z−w−γ(n−1), λ)^{(0n)}`.
#[derive(Debug, Clone)]
pub struct FusedChain {
    n: usize,
    w: Complex64,
    p: ModelParams,
    layout: Layout,
}

impl FusedChain {
    pub fn new(n: usize, w: Complex64, p: &ModelParams) -> Self {
        Self {
            n,
            w,
            p: *p,
            layout: Layout::uniform(p.n_dim, n + 1),
        }
    }

    pub fn apply(&self, z: Complex64, lambda: &WeightVector, block: &CMatrix) -> Result<CMatrix> {
        let mut acc = block.clone();
        for s in (1..=self.n).rev() {
            let u = z - self.w - self.p.gamma * (s - 1) as f64;
            let shift: Vec<usize> = (s + 1..=self.n).collect();
            acc = self.layout.apply_local(
                &[0, s],
                &shift,
                &mut |mu| r_matrix(u, &lambda.shifted(mu, self.p.gamma), &self.p),
                &acc,
            )?;
        }
        Ok(acc)
    }

    pub fn matrix(&self, z: Complex64, lambda: &WeightVector) -> Result<CMatrix> {
        let d = self.layout.dim();
        self.apply(z, lambda, &CMatrix::identity(d, d))
    }
}

impl LOperator for FusedChain {
    fn eval(&self, z: Complex64, lambda: &WeightVector) -> Result<CMatrix> {
        self.matrix(z, lambda)
    }

    fn describe(&self) -> String {
        format!("V^{}({})", self.n, self.w)
    }
}

/// `V^{⊗n}(w)`.
pub fn fused_tensor_module(n: usize, w: Complex64, p: &ModelParams) -> EModule {
    let chain = FusedChain::new(n, w, p);
    let label = chain.describe();
    EModule::new(
        GradedSpace::tensor_power(p.n_dim, n),
        Arc::new(chain),
        label,
        *p,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerKind {
    Symmetric,
    Exterior,
}

/// Orthonormal basis columns stored sparsely.
#[derive(Debug, Clone)]
struct SparseBasis {
    cols: Vec<Vec<(usize, Complex64)>>,
    rows: usize,
}

impl SparseBasis {
    fn from_dense(b: &CMatrix) -> Self {
        let cols = (0..b.ncols())
            .map(|j| {
                (0..b.nrows())
                    .filter(|&i| b[(i, j)] != c64(0.0, 0.0))
                    .map(|i| (i, b[(i, j)]))
                    .collect()
            })
            .collect();
        Self {
            cols,
            rows: b.nrows(),
        }
    }

    /// `B` as a dense `rows × k` matrix.
    fn dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.rows, self.cols.len());
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// `B* X`.
    fn project(&self, x: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols.len(), x.ncols());
        for c in 0..x.ncols() {
            for (j, col) in self.cols.iter().enumerate() {
                let mut s = c64(0.0, 0.0);
                for &(i, v) in col {
                    s += v.conj() * x[(i, c)];
                }
                out[(j, c)] = s;
            }
        }
        out
    }

    /// `B Y`.
    fn lift(&self, y: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.rows, y.ncols());
        for c in 0..y.ncols() {
            for (j, col) in self.cols.iter().enumerate() {
                let yj = y[(j, c)];
                for &(i, v) in col {
                    out[(i, c)] += v * yj;
                }
            }
        }
        out
    }
}

/// `Id_{C^N} ⊗ B` as a sparse basis.
fn aux_kron(n_dim: usize, b: &SparseBasis) -> SparseBasis {
    let mut cols = Vec::with_capacity(n_dim * b.cols.len());
    for a in 0..n_dim {
        for col in &b.cols {
            cols.push(col.iter().map(|&(i, v)| (a * b.rows + i, v)).collect());
        }
    }
    SparseBasis {
        cols,
        rows: n_dim * b.rows,
    }
}

/// The symmetric power (restriction of `V^{⊗n}(w)` to `C^N ⊗ S^n`) or the
/// exterior power (the quotient by `J_n`, realised on the antisymmetric
/// complement), both on orthonormal weight bases.
struct PowerL {
    kind: PowerKind,
    chain: FusedChain,
    basis: SparseBasis,
    /// Orthogonal projector onto `C^N ⊗ J_n` for the exterior leakage test.
    j_block: Option<CMatrix>,
}

impl PowerL {
    fn restricted(&self, z: Complex64, lambda: &WeightVector) -> Result<(CMatrix, f64)> {
        match self.kind {
            PowerKind::Symmetric => {
                let x = self.chain.apply(z, lambda, &self.basis.dense())?;
                let y = self.basis.project(&x);
                let leak = (&x - self.basis.lift(&y)).norm() / x.norm().max(f64::MIN_POSITIVE);
                Ok((y, leak))
            }
            PowerKind::Exterior => {
                let j = self.j_block.as_ref().expect("exterior keeps J projector");
                let full = self.chain.apply(z, lambda, j)?;
                // L(C^N ⊗ J_n) must stay inside C^N ⊗ J_n
                let leak = self.basis.project(&full).norm()
                    / full.norm().max(f64::MIN_POSITIVE);
                let x = self.chain.apply(z, lambda, &self.basis.dense())?;
                Ok((self.basis.project(&x), leak))
            }
        }
    }
}

impl LOperator for PowerL {
    fn eval(&self, z: Complex64, lambda: &WeightVector) -> Result<CMatrix> {
        let (m, leak) = self.restricted(z, lambda)?;
        if leak > LEAKAGE_TOL {
            return Err(Error::Leakage {
                module: self.describe(),
                leakage: leak,
                tol: LEAKAGE_TOL,
            });
        }
        Ok(m)
    }

    fn describe(&self) -> String {
        let sym = match self.kind {
            PowerKind::Symmetric => "S",
            PowerKind::Exterior => "Λ",
        };
        format!("{sym}^{}V({})", self.chain.n, self.chain.w)
    }
}

fn power_module(kind: PowerKind, n: usize, w: Complex64, p: &ModelParams) -> Result<EModule> {
    if n == 0 {
        return Err(Error::InvalidParams("power needs n >= 1".into()));
    }
    let total = p.n_dim.checked_pow(n as u32).unwrap_or(usize::MAX);
    if total > 10_000 {
        return Err(Error::InvalidParams(format!(
            "N^n = {total} exceeds the dense limit 10^4"
        )));
    }
    let sub = match kind {
        PowerKind::Symmetric => sym_basis(n, p.n_dim),
        PowerKind::Exterior => {
            if n > p.n_dim {
                return Err(Error::InvalidParams(format!(
                    "exterior power {n} of C^{} is zero",
                    p.n_dim
                )));
            }
            antisym_basis(n, p.n_dim)
        }
    };
    let basis = aux_kron(p.n_dim, &SparseBasis::from_dense(&sub.vectors));
    let j_block = match kind {
        PowerKind::Symmetric => None,
        PowerKind::Exterior => {
            let d = sub.vectors.nrows();
            let pj = CMatrix::identity(d, d) - projector_antisym(n, p.n_dim).into_matrix();
            Some(identity_kron(p.n_dim, &pj))
        }
    };
    let l = PowerL {
        kind,
        chain: FusedChain::new(n, w, p),
        basis,
        j_block,
    };
    let label = l.describe();
    Ok(EModule::new(sub.space, Arc::new(l), label, *p))
}

/// `S^n V(w)`.
pub fn sym_power_module(n: usize, w: Complex64, p: &ModelParams) -> Result<EModule> {
    power_module(PowerKind::Symmetric, n, w, p)
}

/// `∧^n V(w)`.
pub fn ext_power_module(n: usize, w: Complex64, p: &ModelParams) -> Result<EModule> {
    power_module(PowerKind::Exterior, n, w, p)
}

/// Relative norms of the components of `L(C^N ⊗ S^n)` outside `C^N ⊗ S^n`
/// and of `L(C^N ⊗ J_n)` outside `C^N ⊗ J_n`, for `V^{⊗n}(w)`.
pub fn power_leakage(
    n: usize,
    w: Complex64,
    z: Complex64,
    lambda: &WeightVector,
    p: &ModelParams,
) -> Result<(f64, f64)> {
    let chain = FusedChain::new(n, w, p);
    let mut out = [0.0; 2];
    for (k, sub) in [
        crate::tensor::projector_sym(n, p.n_dim).into_matrix(),
        {
            let a = projector_antisym(n, p.n_dim).into_matrix();
            CMatrix::identity(a.nrows(), a.ncols()) - a
        },
    ]
    .into_iter()
    .enumerate()
    {
        let q = identity_kron(p.n_dim, &sub);
        let lq = chain.apply(z, lambda, &q)?;
        let outside = &lq - &q * &lq;
        out[k] = outside.norm() / lq.norm().max(f64::MIN_POSITIVE);
    }
    Ok((out[0], out[1]))
}

/// `L′(z,λ) = R(z−w−γ(n−1), λ−γΣ_{j<n}h^{(j)})^{(0n)} ⋯ R(z−w−γ, λ−γh^{(1)})^{(02)} R(z−w, λ)^{(01)}`.
pub fn opposite_l(
    n: usize,
    w: Complex64,
    z: Complex64,
    lambda: &WeightVector,
    p: &ModelParams,
) -> Result<GradedOperator> {
    let layout = Layout::uniform(p.n_dim, n + 1);
    let mut acc = CMatrix::identity(layout.dim(), layout.dim());
    for s in 1..=n {
        let u = z - w - p.gamma * (s - 1) as f64;
        let shift: Vec<usize> = (1..s).collect();
        acc = layout.apply_local(
            &[0, s],
            &shift,
            &mut |mu| r_matrix(u, &lambda.shifted(mu, p.gamma), p),
            &acc,
        )?;
    }
    GradedOperator::new(GradedSpace::tensor_power(p.n_dim, n + 1), acc)
}

/// Dynamical shift of an operator on `C^N ⊗ W` by the auxiliary weight:
/// `(1 ⊗ A(λ − γh^{(0)}))`.
pub fn aux_shifted(
    n_dim: usize,
    inner: &GradedSpace,
    gamma: Complex64,
    lambda: &WeightVector,
    a: &dyn Fn(&WeightVector) -> Result<CMatrix>,
) -> Result<CMatrix> {
    let layout = Layout::new(vec![GradedSpace::vector(n_dim), inner.clone()]);
    layout.embed(&[1], &[0], &mut |mu| a(&lambda.shifted(mu, gamma)))
}

/// An R-matrix `𝓡_{W_1,W_2}(λ) ∈ End_h(W_1 ⊗ W_2)`.
#[derive(Clone)]
pub struct ModuleRMatrix {
    left: GradedSpace,
    right: GradedSpace,
    gamma: Complex64,
    eval: Arc<dyn Fn(&WeightVector) -> Result<CMatrix> + Send + Sync>,
}

impl fmt::Debug for ModuleRMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModuleRMatrix")
            .field("left_dim", &self.left.dim())
            .field("right_dim", &self.right.dim())
            .finish()
    }
}

impl ModuleRMatrix {
    pub fn new(
        left: GradedSpace,
        right: GradedSpace,
        gamma: Complex64,
        eval: Arc<dyn Fn(&WeightVector) -> Result<CMatrix> + Send + Sync>,
    ) -> Self {
        Self {
            left,
            right,
            gamma,
            eval,
        }
    }

    /// `R(z_1 − z_2, λ)` for `V(z_1)` and `V(z_2)`.
    pub fn fundamental(z1: Complex64, z2: Complex64, p: &ModelParams) -> Self {
        let pp = *p;
        Self::new(
            GradedSpace::vector(p.n_dim),
            GradedSpace::vector(p.n_dim),
            p.gamma,
            Arc::new(move |l| r_matrix(z1 - z2, l, &pp)),
        )
    }

    /// `𝓡_{V(z), W}(λ) = L_W(z, λ)`.
    pub fn from_module(z: Complex64, module: &EModule) -> Self {
        let m = module.clone();
        Self::new(
            GradedSpace::vector(module.params.n_dim),
            module.space.clone(),
            module.params.gamma,
            Arc::new(move |l| m.l_matrix(z, l)),
        )
    }

    pub fn left(&self) -> &GradedSpace {
        &self.left
    }

    pub fn right(&self) -> &GradedSpace {
        &self.right
    }

    pub fn eval(&self, lambda: &WeightVector) -> Result<CMatrix> {
        (self.eval)(lambda)
    }
}

/// `𝓡_{W_1⊗W_2, W_3}(λ) = 𝓡_{W_2,W_3}(λ)^{(23)} 𝓡_{W_1,W_3}(λ − γh^{(2)})^{(13)}`.
pub fn compose_rmatrix_left(r13: &ModuleRMatrix, r23: &ModuleRMatrix) -> Result<ModuleRMatrix> {
    if r13.right != r23.right {
        return Err(Error::Dimension("R13 and R23 must share W3".into()));
    }
    let layout = Layout::new(vec![r13.left.clone(), r23.left.clone(), r13.right.clone()]);
    let (a, b) = (r13.clone(), r23.clone());
    let gamma = r13.gamma;
    Ok(ModuleRMatrix::new(
        r13.left.tensor(&r23.left),
        r13.right.clone(),
        gamma,
        Arc::new(move |l: &WeightVector| {
            let inner = layout.embed(&[0, 2], &[1], &mut |mu| a.eval(&l.shifted(mu, gamma)))?;
            layout.apply_local(&[1, 2], &[], &mut |_| b.eval(l), &inner)
        }),
    ))
}

/// `𝓡_{W_1, W_2⊗W_3}(λ) = 𝓡_{W_1,W_2}(λ − γh^{(3)})^{(12)} 𝓡_{W_1,W_3}(λ)^{(13)}`.
pub fn compose_rmatrix_right(r13: &ModuleRMatrix, r12: &ModuleRMatrix) -> Result<ModuleRMatrix> {
    if r13.left != r12.left {
        return Err(Error::Dimension("R13 and R12 must share W1".into()));
    }
    let layout = Layout::new(vec![r12.left.clone(), r12.right.clone(), r13.right.clone()]);
    let (a, b) = (r13.clone(), r12.clone());
    let gamma = r13.gamma;
    Ok(ModuleRMatrix::new(
        r12.left.clone(),
        r12.right.tensor(&r13.right),
        gamma,
        Arc::new(move |l: &WeightVector| {
            let inner = layout.embed(&[0, 2], &[], &mut |_| a.eval(l))?;
            layout.apply_local(&[0, 1], &[2], &mut |mu| b.eval(&l.shifted(mu, gamma)), &inner)
        }),
    ))
}

/// `𝓡_{V^{⊗m}(z), V^{⊗n}(w)}` built from fundamental R-matrices.
pub fn fused_rmatrix(
    m: usize,
    z: Complex64,
    n: usize,
    w: Complex64,
    p: &ModelParams,
) -> Result<ModuleRMatrix> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidParams("fused R-matrix needs m, n >= 1".into()));
    }
    let target = fused_tensor_module(n, w, p);
    let mut acc = ModuleRMatrix::from_module(z, &target);
    for k in 1..m {
        let next = ModuleRMatrix::from_module(z + p.gamma * k as f64, &target);
        acc = compose_rmatrix_left(&acc, &next)?;
    }
    Ok(acc)
}

/// Operator `P_{W_2,W_1}: W_2 ⊗ W_1 → W_1 ⊗ W_2`.
pub fn flip_spaces(first: &GradedSpace, second: &GradedSpace) -> CMatrix {
    let (d1, d2) = (first.dim(), second.dim());
    let mut m = CMatrix::zeros(d1 * d2, d1 * d2);
    for b in 0..d2 {
        for a in 0..d1 {
            m[(a * d2 + b, b * d1 + a)] = c64(1.0, 0.0);
        }
    }
    m
}

/// Residual of the morphism condition for `φ(λ) = 𝓡(λ) P_{W_2,W_1}`:
/// `(1 ⊗ φ(λ)) L_{W_2⊗W_1}(z,λ) − L_{W_1⊗W_2}(z,λ) (1 ⊗ φ(λ − γh^{(1)}))`,
/// relative to the size of the first term.
pub fn morphism_residual(
    r: &ModuleRMatrix,
    w1: &EModule,
    w2: &EModule,
    z: Complex64,
    lambda: &WeightVector,
) -> Result<f64> {
    let p = w1.params;
    let flip = flip_spaces(w1.space(), w2.space());
    let phi = |l: &WeightVector| -> Result<CMatrix> { Ok(r.eval(l)? * &flip) };
    let l21 = tensor_module(w2, w1)?.l_matrix(z, lambda)?;
    let l12 = tensor_module(w1, w2)?.l_matrix(z, lambda)?;
    let lhs = identity_kron(p.n_dim, &phi(lambda)?) * l21;
    let shifted = aux_shifted(
        p.n_dim,
        &w2.space().tensor(w1.space()),
        p.gamma,
        lambda,
        &phi,
    )?;
    let rhs = l12 * shifted;
    Ok((&lhs - &rhs).norm() / lhs.norm().max(f64::MIN_POSITIVE))
}

/// The dynamical Yang–Baxter residual for R-matrices among three modules,
/// relative Frobenius norm.
pub fn module_dybe_residual(
    r12: &ModuleRMatrix,
    r13: &ModuleRMatrix,
    r23: &ModuleRMatrix,
    lambda: &WeightVector,
) -> Result<f64> {
    let g = r12.gamma;
    let layout = Layout::new(vec![r12.left.clone(), r12.right.clone(), r13.right.clone()]);
    let lhs = {
        let a = layout.embed(&[1, 2], &[0], &mut |mu| r23.eval(&lambda.shifted(mu, g)))?;
        let a = layout.apply_local(&[0, 2], &[], &mut |_| r13.eval(lambda), &a)?;
        layout.apply_local(&[0, 1], &[2], &mut |mu| r12.eval(&lambda.shifted(mu, g)), &a)?
    };
    let rhs = {
        let a = layout.embed(&[0, 1], &[], &mut |_| r12.eval(lambda))?;
        let a = layout.apply_local(&[0, 2], &[1], &mut |mu| r13.eval(&lambda.shifted(mu, g)), &a)?;
        layout.apply_local(&[1, 2], &[], &mut |_| r23.eval(lambda), &a)?
    };
    Ok((&lhs - &rhs).norm() / lhs.norm().max(rhs.norm()).max(f64::MIN_POSITIVE))
}

/// `𝓡_{W_1,W_2}(λ) 𝓡_{W_2,W_1}(λ)^{(21)} − Id`, max-entry norm.
pub fn module_unitarity_residual(
    r12: &ModuleRMatrix,
    r21: &ModuleRMatrix,
    lambda: &WeightVector,
) -> Result<f64> {
    let flip = flip_spaces(&r12.left, &r12.right);
    let back = flip_spaces(&r12.right, &r12.left);
    let prod = r12.eval(lambda)? * (&flip * r21.eval(lambda)? * &back);
    let d = prod.nrows();
    Ok(crate::tensor::max_abs(&(prod - CMatrix::identity(d, d))))
}

/// The RLL residual
/// `R(z_1−z_2, λ−γh^{(3)})^{(12)} L(z_1,λ)^{(13)} L(z_2, λ−γh^{(1)})^{(23)}
///  − L(z_2,λ)^{(23)} L(z_1, λ−γh^{(2)})^{(13)} R(z_1−z_2, λ)^{(12)}`,
/// relative Frobenius norm.
pub fn rll_residual(
    module: &EModule,
    z1: Complex64,
    z2: Complex64,
    lambda: &WeightVector,
) -> Result<f64> {
    let r12 = ModuleRMatrix::fundamental(z1, z2, &module.params);
    let r13 = ModuleRMatrix::from_module(z1, module);
    let r23 = ModuleRMatrix::from_module(z2, module);
    module_dybe_residual(&r12, &r13, &r23, lambda)
}

/// Conjugation of an operator on `W_1 ⊗ W_2` by a permutation of `(C^N)^{⊗n}` factors.
pub fn conjugate_by(sigma: &Permutation, n_dim: usize, m: &CMatrix) -> CMatrix {
    let p = crate::tensor::permutation_operator(sigma, n_dim).into_matrix();
    &p * m * p.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::rel_diff;

    fn p2() -> ModelParams {
        ModelParams::with_defaults(2).unwrap()
    }

    fn lam2() -> WeightVector {
        WeightVector::new(vec![c64(0.21, 0.43), c64(0.66, 0.12)])
    }

    #[test]
    fn vector_module_at_evaluation_point_is_flip() {
        let p = p2();
        let w = c64(0.3, 0.1);
        let v = vector_module(w, &p);
        let l = v.l_matrix(w, &lam2()).unwrap();
        let flip = crate::tensor::flip(2, 0, 1, 2).into_matrix();
        assert!(rel_diff(&l, &flip) < 1e-13);
        assert_eq!(v.space().weights()[1].0, vec![0, 1]);
    }

    #[test]
    fn tensor_with_trivial_module_is_unchanged() {
        let p = p2();
        let v = vector_module(c64(0.1, 0.0), &p);
        let t = tensor_module(&v, &trivial_module(&p)).unwrap();
        let z = c64(0.47, 0.2);
        assert!(rel_diff(&t.l_matrix(z, &lam2()).unwrap(), &v.l_matrix(z, &lam2()).unwrap()) < 1e-15);
        let t = tensor_module(&trivial_module(&p), &v).unwrap();
        assert!(rel_diff(&t.l_matrix(z, &lam2()).unwrap(), &v.l_matrix(z, &lam2()).unwrap()) < 1e-15);
    }

    #[test]
    fn tensor_weights_add() {
        let p = p2();
        let t = tensor_module(&vector_module(c64(0.0, 0.0), &p), &vector_module(c64(0.2, 0.0), &p))
            .unwrap();
        assert_eq!(t.space().weight(1).0, vec![1, 1]);
        assert_eq!(t.space().weight(3).0, vec![0, 2]);
    }

    #[test]
    fn power_of_degree_one_is_the_vector_module() {
        let p = p2();
        let w = c64(0.05, 0.02);
        let z = c64(0.61, -0.1);
        let v = vector_module(w, &p).l_matrix(z, &lam2()).unwrap();
        let s = sym_power_module(1, w, &p).unwrap().l_matrix(z, &lam2()).unwrap();
        let e = ext_power_module(1, w, &p).unwrap().l_matrix(z, &lam2()).unwrap();
        assert!(rel_diff(&v, &s) < 1e-14);
        assert!(rel_diff(&v, &e) < 1e-14);
    }

    #[test]
    fn power_dimensions() {
        let p = ModelParams::with_defaults(3).unwrap();
        assert_eq!(sym_power_module(2, c64(0.0, 0.0), &p).unwrap().dim(), 6);
        assert_eq!(ext_power_module(2, c64(0.0, 0.0), &p).unwrap().dim(), 3);
        assert!(ext_power_module(4, c64(0.0, 0.0), &p).is_err());
        assert!(sym_power_module(0, c64(0.0, 0.0), &p).is_err());
    }

    #[test]
    fn opposite_l_of_one_factor_is_l() {
        let p = p2();
        let w = c64(0.1, 0.0);
        let z = c64(0.45, 0.1);
        let lp = opposite_l(1, w, z, &lam2(), &p).unwrap();
        let l = vector_module(w, &p).l_matrix(z, &lam2()).unwrap();
        assert!(rel_diff(lp.matrix(), &l) < 1e-15);
    }

    #[test]
    fn flip_spaces_moves_factors() {
        let a = GradedSpace::vector(2);
        let b = GradedSpace::tensor_power(2, 2);
        let f = flip_spaces(&a, &b);
        // (b-index 1, a-index 1) in W2⊗W1 ↦ (a 1, b 1) in W1⊗W2
        assert_eq!(f[(1 * 4 + 1, 1 * 2 + 1)], c64(1.0, 0.0));
        assert_eq!(&flip_spaces(&b, &a) * &f, CMatrix::identity(8, 8));
    }
}
