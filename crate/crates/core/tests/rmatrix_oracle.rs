use std::f64::consts::PI;

use elliptic_fusion::rmatrix::{dybe_sides, r_matrix, r_reg_matrix, swapped, ModelParams};
use elliptic_fusion::tensor::{
    numeric_rank, rel_diff, CMatrix, Permutation, WeightVector,
    DEFAULT_RANK_TOL,
};
use num_complex::Complex64 as C;
use proptest::prelude::*;

fn theta(z: C, tau: C) -> C {
    let q = (C::i() * PI * tau).exp();
    let mut acc = (C::i() * PI * tau / 4.0).exp() * 2.0 * (z * PI).sin();
    let c = (z * 2.0 * PI).cos();
    let mut q2n = C::new(1.0, 0.0);
    for _ in 0..60 {
        q2n *= q * q;
        acc *= (C::new(1.0, 0.0) - q2n) * (C::new(1.0, 0.0) - q2n * c * 2.0 + q2n * q2n);
    }
    acc
}

/// `Σ E_ii⊗E_ii + Σ_{i≠j} α(z,λ_ij) E_ii⊗E_jj + Σ_{i≠j} β(z,λ_ij) E_ij⊗E_ji`.
fn r_oracle(z: C, l: &[C], p: &ModelParams) -> CMatrix {
    let (g, tau, n) = (p.gamma, p.theta.tau, l.len());
    let th = |x: C| theta(x, tau);
    let mut m = CMatrix::zeros(n * n, n * n);
    for i in 0..n {
        m[(i * n + i, i * n + i)] = C::new(1.0, 0.0);
        for j in (0..n).filter(|&j| j != i) {
            let x = l[i] - l[j];
            let den = th(z - g) * th(x);
            m[(i * n + j, i * n + j)] = th(z) * th(x + g) / den;
            m[(i * n + j, j * n + i)] = -th(z + x) * th(g) / den;
        }
    }
    m
}

fn lambda(n: usize, seed: f64) -> Vec<C> {
    (0..n)
        .map(|k| C::new((0.37 * (k as f64 + 1.0) + seed).fract(), (0.61 * k as f64 + 0.5 * seed).fract()))
        .collect()
}

#[test]
fn r_matches_independent_assembly() {
    for n in [2, 3] {
        let p = ModelParams::with_defaults(n).unwrap();
        for (k, z) in [C::new(0.31, 0.07), C::new(-0.44, 0.2)].into_iter().enumerate() {
            let l = lambda(n, 0.13 * k as f64);
            let got = r_matrix(z, &WeightVector::new(l.clone()), &p).unwrap();
            assert!(rel_diff(&got, &r_oracle(z, &l, &p)) < 1e-12);
        }
    }
}

#[test]
fn residue_matches_numerical_limit() {
    let p = ModelParams::with_defaults(3).unwrap();
    let l = lambda(3, 0.2);
    let eps = 1e-7;
    let approx = r_oracle(p.gamma + eps, &l, &p) * C::new(eps, 0.0);
    let reg = r_reg_matrix(&WeightVector::new(l), &p).unwrap();
    assert!(rel_diff(&approx, &reg) < 1e-5);
}

#[test]
fn lemma1_ranks() {
    for n in [2usize, 3, 4] {
        let p = ModelParams::with_defaults(n).unwrap();
        let l = WeightVector::new(lambda(n, 0.3));
        let minus = r_matrix(-p.gamma, &l, &p).unwrap();
        assert_eq!(numeric_rank(&minus, DEFAULT_RANK_TOL), n * (n + 1) / 2);
        let reg = r_reg_matrix(&l, &p).unwrap();
        assert_eq!(numeric_rank(&reg, DEFAULT_RANK_TOL), n * (n - 1) / 2);
    }
}

#[test]
fn pole_is_reported() {
    let p = ModelParams::with_defaults(2).unwrap();
    let l = WeightVector::new(lambda(2, 0.1));
    assert!(r_matrix(p.gamma, &l, &p).is_err());
}

fn point() -> impl Strategy<Value = C> {
    (0.0..1.0f64, 0.0..1.0f64).prop_map(|(a, b)| C::new(a, b))
}

fn generic(l: &[C], p: &ModelParams) -> bool {
    l.iter().enumerate().all(|(i, a)| {
        l[i + 1..].iter().all(|b| {
            [-1.0, 0.0, 1.0]
                .iter()
                .all(|&s| theta(a - b + p.gamma * s, p.theta.tau).norm() > 1e-3)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dybe_holds(n in 2usize..=3, z in proptest::array::uniform3(point()), l in proptest::collection::vec(point(), 3)) {
        let p = ModelParams::with_defaults(n).unwrap();
        let l = &l[..n];
        prop_assume!(generic(l, &p));
        match dybe_sides(z, &WeightVector::new(l.to_vec()), &p) {
            Ok((a, b)) => prop_assert!(rel_diff(&a, &b) < 1e-9),
            Err(_) => prop_assume!(false),
        }
    }

    #[test]
    fn unitarity(n in 2usize..=3, z in point(), l in proptest::collection::vec(point(), 3)) {
        let p = ModelParams::with_defaults(n).unwrap();
        let l = &l[..n];
        prop_assume!(generic(l, &p));
        prop_assume!(theta(z - p.gamma, p.theta.tau).norm() > 1e-3);
        prop_assume!(theta(-z - p.gamma, p.theta.tau).norm() > 1e-3);
        let w = WeightVector::new(l.to_vec());
        let prod = r_matrix(z, &w, &p).unwrap() * swapped(&r_matrix(-z, &w, &p).unwrap(), n);
        let d = prod.nrows();
        prop_assert!((prod - CMatrix::identity(d, d)).norm() < 1e-9);
    }

    #[test]
    fn sn_equivariance(z in point(), l in proptest::collection::vec(point(), 3), k in 0usize..6) {
        let p = ModelParams::with_defaults(3).unwrap();
        prop_assume!(generic(&l, &p));
        prop_assume!(theta(z - p.gamma, p.theta.tau).norm() > 1e-3);
        let sigma = Permutation::all(3)[k].clone();
        let w = WeightVector::new(l);
        let s = CMatrix::from_fn(3, 3, |a, b| C::new(if sigma.apply(b) == a { 1.0 } else { 0.0 }, 0.0));
        let ss = s.kronecker(&s);
        let lhs = r_matrix(z, &w.permuted(&sigma), &p).unwrap();
        let rhs = &ss * r_matrix(z, &w, &p).unwrap() * ss.adjoint();
        prop_assert!(rel_diff(&lhs, &rhs) < 1e-10);
    }
}
