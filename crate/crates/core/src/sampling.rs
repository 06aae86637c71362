//! Seeded draws of generic parameters.
//!
//! The generator is ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`), so a
//! given seed yields the same stream on every platform.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rmatrix::ModelParams;
use crate::tensor::WeightVector;

pub const GENERATOR: &str = "chacha8/seed_from_u64";

/// Draws with `|θ(λ_i−λ_j)|` or `|θ(λ_i−λ_j±γ)|` below this are rejected.
pub const GENERIC_THRESHOLD: f64 = 1e-6;

/// Lattice distance kept by the draws used for `γ → 0` limits, whose first
/// order error grows like `γ/dist(x, Z + τZ)`.
pub const LIMIT_SEPARATION: f64 = 0.25;

const MAX_REDRAWS: usize = 1000;

#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Derives an independent stream for a named consumer.
    pub fn for_stream(seed: u64, name: &str) -> Self {
        // FNV-1a, so the mapping is fixed across toolchains
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in name.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        Self::new(seed ^ h)
    }

    pub fn unit(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform on `[0,1) + [0,1)i`.
    pub fn complex(&mut self) -> Complex64 {
        let re = self.unit();
        let im = self.unit();
        Complex64::new(re, im)
    }

    /// Uniform on `[lo, hi)` in both real and imaginary parts.
    pub fn complex_in(&mut self, lo: f64, hi: f64) -> Complex64 {
        let re = lo + (hi - lo) * self.unit();
        let im = lo + (hi - lo) * self.unit();
        Complex64::new(re, im)
    }

    /// Uniform on the cell `{a + bτ : a, b ∈ [0,1)}`.
    pub fn cell_point(&mut self, tau: Complex64) -> Complex64 {
        let a = self.unit();
        let b = self.unit();
        tau * b + a
    }

    pub fn lambda(&mut self, p: &ModelParams) -> Result<WeightVector> {
        for _ in 0..MAX_REDRAWS {
            let l = WeightVector::new((0..p.n_dim).map(|_| self.complex()).collect());
            if is_generic(&l, p)? {
                return Ok(l);
            }
        }
        Err(Error::InvalidParams(format!(
            "no generic λ found in {MAX_REDRAWS} draws"
        )))
    }

    /// A point of `[0,1) + [0,1)i` at least `min` away from `Z + τZ`.
    pub fn separated(&mut self, tau: Complex64, min: f64) -> Result<Complex64> {
        for _ in 0..MAX_REDRAWS {
            let z = self.complex();
            if lattice_distance(z, tau) >= min {
                return Ok(z);
            }
        }
        Err(Error::InvalidParams(format!(
            "no point {min} away from the lattice in {MAX_REDRAWS} draws"
        )))
    }

    /// A generic λ whose differences `λ_i − λ_j` all lie at least `min` away
    /// from `Z + τZ`.
    pub fn lambda_separated(&mut self, p: &ModelParams, min: f64) -> Result<WeightVector> {
        let tau = p.theta.tau;
        for _ in 0..MAX_REDRAWS {
            let l = self.lambda(p)?;
            let ok = (0..p.n_dim)
                .all(|i| (i + 1..p.n_dim).all(|j| lattice_distance(l.diff(i, j), tau) >= min));
            if ok {
                return Ok(l);
            }
        }
        Err(Error::InvalidParams(format!(
            "no λ with separation {min} in {MAX_REDRAWS} draws"
        )))
    }

    pub fn lambdas(&mut self, k: usize, p: &ModelParams) -> Result<Vec<WeightVector>> {
        (0..k).map(|_| self.lambda(p)).collect()
    }

    /// Runs `f` on fresh draws until it does not hit a pole.
    pub fn retry<T>(&mut self, mut f: impl FnMut(&mut Self) -> Result<T>) -> Result<T> {
        let mut last = None;
        for _ in 0..MAX_REDRAWS {
            match f(self) {
                Err(e @ Error::Pole { .. }) => last = Some(e),
                other => return other,
            }
        }
        Err(last.expect("at least one attempt"))
    }
}

/// Distance from `x` to the nearest point of `Z + τZ`.
pub fn lattice_distance(x: Complex64, tau: Complex64) -> f64 {
    let b = (x.im / tau.im).round();
    let a = (x.re - b * tau.re).round();
    let mut best = f64::INFINITY;
    for db in -1..=1 {
        for da in -1..=1 {
            let q = Complex64::new(a + da as f64, 0.0) + tau * (b + db as f64);
            best = best.min((x - q).norm());
        }
    }
    best
}

pub fn is_generic(lambda: &WeightVector, p: &ModelParams) -> Result<bool> {
    for i in 0..p.n_dim {
        for j in 0..p.n_dim {
            if i == j {
                continue;
            }
            let x = lambda.diff(i, j);
            for s in [-1.0, 0.0, 1.0] {
                if p.theta(x + p.gamma * s)?.norm() < GENERIC_THRESHOLD {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_distance_of_lattice_points_is_zero() {
        let tau = Complex64::new(0.3, 0.75);
        assert!(lattice_distance(tau * 2.0 - 1.0, tau) < 1e-15);
        let d = lattice_distance(Complex64::new(0.5, 0.0), tau);
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn separated_draws_keep_their_distance() {
        let tau = Complex64::new(0.0, 0.75);
        let mut s = Sampler::new(3);
        for _ in 0..50 {
            assert!(lattice_distance(s.separated(tau, 0.25).unwrap(), tau) >= 0.25);
        }
    }

    #[test]
    fn same_seed_same_stream() {
        let mut a = Sampler::new(7);
        let mut b = Sampler::new(7);
        for _ in 0..5 {
            assert_eq!(a.complex(), b.complex());
        }
    }

    #[test]
    fn streams_differ_by_name() {
        let mut a = Sampler::for_stream(7, "dybe");
        let mut b = Sampler::for_stream(7, "unitarity");
        assert_ne!(a.complex(), b.complex());
    }

    #[test]
    fn lambda_is_generic() {
        let p = ModelParams::with_defaults(3).unwrap();
        let mut s = Sampler::new(1);
        for _ in 0..20 {
            assert!(is_generic(&s.lambda(&p).unwrap(), &p).unwrap());
        }
    }

    #[test]
    fn retry_gives_up_on_persistent_poles() {
        let mut s = Sampler::new(1);
        let r: Result<()> = s.retry(|_| {
            Err(Error::Pole {
                what: "test",
                magnitude: 0.0,
            })
        });
        assert!(matches!(r, Err(Error::Pole { .. })));
    }
}
