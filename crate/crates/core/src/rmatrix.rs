//! The fundamental elliptic dynamical R-matrix
//!
//! `R(z,λ) = Σ E_ii⊗E_ii + Σ_{i≠j} α(z,λ_i−λ_j) E_ii⊗E_jj + Σ_{i≠j} β(z,λ_i−λ_j) E_ij⊗E_ji`
//!
//! with `α(z,x) = θ(z)θ(x+γ)/(θ(z−γ)θ(x))` and `β(z,x) = −θ(z+x)θ(γ)/(θ(z−γ)θ(x))`,
//! its residue at `z = γ`, and the `γ → 0` reference limits.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::{c64, flip, CMatrix, GradedOperator, GradedSpace, Layout, WeightVector};
use crate::theta::{theta_deriv, theta_eval, ThetaParams};

/// Denominators with smaller magnitude are treated as poles.
pub const POLE_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub n_dim: usize,
    pub gamma: Complex64,
    pub theta: ThetaParams,
}

impl ModelParams {
    pub fn default_gamma() -> Complex64 {
        c64(0.171717, 0.01)
    }

    pub fn new(n_dim: usize, gamma: Complex64, theta: ThetaParams) -> Result<Self> {
        let p = Self {
            n_dim,
            gamma,
            theta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_defaults(n_dim: usize) -> Result<Self> {
        Self::new(n_dim, Self::default_gamma(), ThetaParams::default())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_dim < 2 {
            return Err(Error::InvalidParams(format!(
                "N must be at least 2, got {}",
                self.n_dim
            )));
        }
        self.theta.validate()
    }

    pub fn with_gamma(&self, gamma: Complex64) -> Self {
        Self { gamma, ..*self }
    }

    pub fn with_n(&self, n_dim: usize) -> Self {
        Self { n_dim, ..*self }
    }

    pub fn theta(&self, z: Complex64) -> Result<Complex64> {
        theta_eval(z, &self.theta)
    }

    /// `θ(num)/θ(den)`, signalling a pole when the denominator vanishes.
    pub fn theta_ratio(&self, num: Complex64, den: Complex64) -> Result<Complex64> {
        let d = self.theta(den)?;
        check_denominator(d, "theta ratio")?;
        Ok(self.theta(num)? / d)
    }
}

pub(crate) fn check_denominator(d: Complex64, what: &'static str) -> Result<()> {
    if d.norm() < POLE_THRESHOLD {
        return Err(Error::Pole {
            what,
            magnitude: d.norm(),
        });
    }
    Ok(())
}

pub fn alpha(z: Complex64, lambda_diff: Complex64, p: &ModelParams) -> Result<Complex64> {
    let g = p.gamma;
    let tz = p.theta(z - g)?;
    let tl = p.theta(lambda_diff)?;
    check_denominator(tz, "alpha: theta(z - gamma)")?;
    check_denominator(tl, "alpha: theta(lambda)")?;
    Ok(p.theta(z)? * p.theta(lambda_diff + g)? / (tz * tl))
}

pub fn beta(z: Complex64, lambda_diff: Complex64, p: &ModelParams) -> Result<Complex64> {
    let g = p.gamma;
    let tz = p.theta(z - g)?;
    let tl = p.theta(lambda_diff)?;
    check_denominator(tz, "beta: theta(z - gamma)")?;
    check_denominator(tl, "beta: theta(lambda)")?;
    Ok(-p.theta(z + lambda_diff)? * p.theta(g)? / (tz * tl))
}

fn assemble(
    lambda: &WeightVector,
    n_dim: usize,
    diag: Complex64,
    mut a: impl FnMut(Complex64) -> Result<Complex64>,
    mut b: impl FnMut(Complex64) -> Result<Complex64>,
) -> Result<CMatrix> {
    if lambda.len() != n_dim {
        return Err(Error::Dimension(format!(
            "lambda has {} entries, expected {n_dim}",
            lambda.len()
        )));
    }
    let d = n_dim * n_dim;
    let mut m = CMatrix::zeros(d, d);
    for i in 0..n_dim {
        m[(i * n_dim + i, i * n_dim + i)] = diag;
        for j in 0..n_dim {
            if i == j {
                continue;
            }
            let x = lambda.diff(i, j);
            // α(λ_i−λ_j) E_ii⊗E_jj and β(λ_i−λ_j) E_ij⊗E_ji : e_j⊗e_i ↦ e_i⊗e_j
            m[(i * n_dim + j, i * n_dim + j)] = a(x)?;
            m[(i * n_dim + j, j * n_dim + i)] = b(x)?;
        }
    }
    Ok(m)
}

/// Dense `N² × N²` matrix of `R(z, λ)`.
pub fn r_matrix(z: Complex64, lambda: &WeightVector, p: &ModelParams) -> Result<CMatrix> {
    assemble(
        lambda,
        p.n_dim,
        c64(1.0, 0.0),
        |x| alpha(z, x, p),
        |x| beta(z, x, p),
    )
}

pub fn build_r(z: Complex64, lambda: &WeightVector, p: &ModelParams) -> Result<GradedOperator> {
    GradedOperator::new(
        GradedSpace::tensor_power(p.n_dim, 2),
        r_matrix(z, lambda, p)?,
    )
}

/// Analytic residue `res_{z=γ} R(z, λ)`, using `res_{z=γ} 1/θ(z−γ) = 1/θ′(0)`.
pub fn r_reg_matrix(lambda: &WeightVector, p: &ModelParams) -> Result<CMatrix> {
    let g = p.gamma;
    let tg = p.theta(g)?;
    let dt0 = theta_deriv(c64(0.0, 0.0), &p.theta)?;
    assemble(
        lambda,
        p.n_dim,
        c64(0.0, 0.0),
        |x| {
            let tx = p.theta(x)?;
            check_denominator(tx, "regularized R: theta(lambda)")?;
            Ok(tg * p.theta(x + g)? / (dt0 * tx))
        },
        |x| {
            let tx = p.theta(x)?;
            check_denominator(tx, "regularized R: theta(lambda)")?;
            Ok(-p.theta(g + x)? * tg / (dt0 * tx))
        },
    )
}

pub fn build_r_reg(lambda: &WeightVector, p: &ModelParams) -> Result<GradedOperator> {
    GradedOperator::new(GradedSpace::tensor_power(p.n_dim, 2), r_reg_matrix(lambda, p)?)
}

/// `lim_{γ→0} R_γ(kγ, λ) = (k/(k−1)) Id − (1/(k−1)) P`. For negative `k`
/// this is `(|k|/(|k|+1)) Id + (1/(|k|+1)) P`.
pub fn r_classical_limit(k: i32, n_dim: usize) -> Result<GradedOperator> {
    if k == 0 {
        return Err(Error::InvalidParams("k must be nonzero".into()));
    }
    if k == 1 {
        return Err(Error::InvalidParams(
            "k = 1 is the pole; use the rescaled residue limit Id - P".into(),
        ));
    }
    let kf = k as f64;
    let d = n_dim * n_dim;
    let p = flip(2, 0, 1, n_dim).into_matrix();
    let m = CMatrix::identity(d, d) * c64(kf / (kf - 1.0), 0.0) - p * c64(1.0 / (kf - 1.0), 0.0);
    GradedOperator::new(GradedSpace::tensor_power(n_dim, 2), m)
}

/// `lim_{γ→0} γ^{-1} R^reg_γ(γ, λ) = Id − P`.
pub fn r_reg_classical_limit(n_dim: usize) -> GradedOperator {
    let d = n_dim * n_dim;
    let p = flip(2, 0, 1, n_dim).into_matrix();
    GradedOperator::new(GradedSpace::tensor_power(n_dim, 2), CMatrix::identity(d, d) - p)
        .expect("square")
}

/// `R^{(21)} = P R P`.
pub fn swapped(m: &CMatrix, n_dim: usize) -> CMatrix {
    let p = flip(2, 0, 1, n_dim).into_matrix();
    &p * m * &p
}

/// `R(z_1−z_2, λ−γh^{(3)})^{(12)} R(z_1−z_3, λ)^{(13)} R(z_2−z_3, λ−γh^{(1)})^{(23)}`
/// and the opposite-order product, on `(C^N)^{⊗3}`.
pub fn dybe_sides(
    z: [Complex64; 3],
    lambda: &WeightVector,
    p: &ModelParams,
) -> Result<(CMatrix, CMatrix)> {
    let layout = Layout::uniform(p.n_dim, 3);
    let g = p.gamma;
    let r_at = |zz: Complex64| {
        move |mu: &crate::tensor::Weight| r_matrix(zz, &lambda.shifted(mu, g), p)
    };
    let r12_h3 = layout.embed(&[0, 1], &[2], &mut r_at(z[0] - z[1]))?;
    let r13 = layout.embed(&[0, 2], &[], &mut r_at(z[0] - z[2]))?;
    let r23_h1 = layout.embed(&[1, 2], &[0], &mut r_at(z[1] - z[2]))?;
    let r23 = layout.embed(&[1, 2], &[], &mut r_at(z[1] - z[2]))?;
    let r13_h2 = layout.embed(&[0, 2], &[1], &mut r_at(z[0] - z[2]))?;
    let r12 = layout.embed(&[0, 1], &[], &mut r_at(z[0] - z[1]))?;
    Ok((r12_h3 * r13 * r23_h1, r23 * r13_h2 * r12))
}
