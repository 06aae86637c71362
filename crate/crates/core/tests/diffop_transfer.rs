use elliptic_fusion::diffop::{
    commutator, compose, max_coefficient, max_difference, ruijsenaars_m, sn_conjugate,
    DifferenceOperator,
};
use elliptic_fusion::emodule::{ext_power_module, sym_power_module, vector_module};
use elliptic_fusion::rmatrix::ModelParams;
use elliptic_fusion::sampling::Sampler;
use elliptic_fusion::tensor::{CMatrix, Permutation, Weight, WeightVector};
use elliptic_fusion::transfer::{
    ext_top_diagonal, quantum_det, scalar_coefficients, t_prefactor, transfer_t1,
    transfer_tm, transfer_tm_with, Domain, TmOrdering,
};
use elliptic_fusion::Error;
use num_complex::Complex64 as C;
use proptest::prelude::*;

fn params(n: usize) -> ModelParams {
    ModelParams::with_defaults(n).unwrap()
}

fn samples(n: usize, k: usize, seed: u64) -> Vec<WeightVector> {
    Sampler::new(seed).lambdas(k, &params(n)).unwrap()
}

/// `c · θ(λ_1 − λ_2 + a)` times a shift by `ω_j`, on a one-dimensional space.
fn monomial(j: usize, a: C, p: &ModelParams) -> DifferenceOperator {
    let p = *p;
    DifferenceOperator::monomial(Weight::basis(p.n_dim, j), 1, p.gamma, move |l| {
        Ok(CMatrix::from_element(1, 1, p.theta(l.diff(0, 1) + a)?))
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn composition_is_associative(
        js in proptest::array::uniform3(0usize..3),
        re in proptest::array::uniform3(-0.5..0.5f64),
        seed in 0u64..1000,
    ) {
        let p = params(3);
        let [a, b, c] = [0, 1, 2].map(|k| monomial(js[k], C::new(re[k], 0.3), &p));
        let l = samples(3, 3, seed);
        let left = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        let right = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        prop_assert!(max_difference(&left, &right, &l).unwrap() < 1e-10);
    }

    #[test]
    fn conjugation_is_a_homomorphism(k in 0usize..6, j in 0usize..3, seed in 0u64..1000) {
        let p = params(3);
        let sigma = Permutation::all(3)[k].clone();
        let a = monomial(j, C::new(0.2, 0.1), &p);
        let b = ruijsenaars_m(1, 1, &p).unwrap();
        let l = samples(3, 3, seed);
        let lhs = sn_conjugate(&compose(&a, &b).unwrap(), &sigma).unwrap();
        let rhs = compose(&sn_conjugate(&a, &sigma).unwrap(), &sn_conjugate(&b, &sigma).unwrap()).unwrap();
        prop_assert!(max_difference(&lhs, &rhs, &l).unwrap() < 1e-12);
    }

    #[test]
    fn ruijsenaars_family_commutes(n in 2usize..=3, ell in 1u32..=2, seed in 0u64..1000) {
        let p = params(n);
        let l = samples(n, 2, seed);
        for m in 1..=n {
            for mp in m + 1..=n {
                let c = commutator(&ruijsenaars_m(m, ell, &p).unwrap(), &ruijsenaars_m(mp, ell, &p).unwrap()).unwrap();
                prop_assert!(max_coefficient(&c, &l).unwrap() < 1e-8);
            }
        }
    }
}

#[test]
fn zero_coupling_gives_unit_coefficients() {
    let p = params(3);
    for m in 1..=3 {
        let op = ruijsenaars_m(m, 0, &p).unwrap();
        for l in samples(3, 3, 4) {
            for (_, c) in scalar_coefficients(&op, &l).unwrap() {
                assert!((c - 1.0).norm() < 1e-14);
            }
        }
    }
}

#[test]
fn t_equals_m_for_two_particles() {
    let p = params(2);
    let module = sym_power_module(2, C::new(0.0, 0.0), &p).unwrap();
    let z = C::new(0.37, 0.21);
    let t = transfer_t1(&module, z).unwrap();
    let m = ruijsenaars_m(1, 1, &p).unwrap();
    let pre = t_prefactor(z, 1, &p).unwrap();
    for l in samples(2, 5, 9) {
        let a = scalar_coefficients(&t, &l).unwrap();
        let b = scalar_coefficients(&m, &l).unwrap();
        for ((_, x), (_, y)) in a.iter().zip(&b) {
            assert!((x - pre * y).norm() < 1e-10 * (pre * y).norm());
        }
    }
}

#[test]
fn tm_of_order_one_is_t() {
    let p = params(3);
    let module = sym_power_module(3, C::new(0.0, 0.0), &p).unwrap();
    let z = C::new(0.21, 0.33);
    let l = samples(3, 2, 2);
    let a = transfer_t1(&module, z).unwrap();
    let b = transfer_tm(1, z, &module).unwrap();
    assert_eq!(max_difference(&a, &b, &l).unwrap(), 0.0);
    assert!(transfer_tm(4, z, &module).is_err());
}

#[test]
fn tm_shifts_have_total_degree_m() {
    let p = params(3);
    let module = sym_power_module(3, C::new(0.0, 0.0), &p).unwrap();
    for m in 1..=3 {
        let t = transfer_tm(m, C::new(0.3, 0.1), &module).unwrap();
        assert!(t.shifts().iter().all(|s| s.total() as usize == m));
    }
}

/// Ratio spread of `T_m/M_m` across λ samples and subsets.
fn spread(ordering: TmOrdering, n: usize, m: usize) -> f64 {
    let p = params(n);
    let module = sym_power_module(n, C::new(0.0, 0.0), &p).unwrap();
    let z = C::new(0.37, 0.11);
    let t = transfer_tm_with(m, z, &module, ordering, Domain::ZeroWeight).unwrap();
    let mm = ruijsenaars_m(m, 1, &p).unwrap();
    let mut ratios = Vec::new();
    for l in samples(n, 4, 5) {
        let a = scalar_coefficients(&t, &l).unwrap();
        let b = scalar_coefficients(&mm, &l).unwrap();
        ratios.extend(a.iter().zip(&b).map(|((_, x), (_, y))| x / y));
    }
    ratios.iter().map(|r| (r - ratios[0]).norm() / ratios[0].norm()).fold(0.0, f64::max)
}

#[test]
fn operator_algebra_and_fused_trace_orderings_agree() {
    for (n, m) in [(2, 2), (3, 2), (3, 3)] {
        assert!(spread(TmOrdering::OperatorAlgebra, n, m) < 1e-9, "N={n} m={m}");
        assert!(spread(TmOrdering::FusedTrace, n, m) < 1e-9, "N={n} m={m}");
    }
}

/// Evaluating factor `k` at `λ − γ(ω_{j_{k+1}} + … + ω_{j_m})` instead of
/// `λ − γ(ω_{j_1} + … + ω_{j_{k−1}})` happens to work up to `m = 2` but
/// breaks λ-independence at `m = 3`.
#[test]
fn reversed_shift_placement_fails_at_order_three() {
    assert!(spread(TmOrdering::PrintedShifts, 2, 2) < 1e-9);
    assert!(spread(TmOrdering::PrintedShifts, 3, 2) < 1e-9);
    assert!(spread(TmOrdering::PrintedShifts, 3, 3) > 1e-3);
}

#[test]
fn quantum_determinant_is_nonzero() {
    let p = params(2);
    let module = sym_power_module(2, C::new(0.0, 0.0), &p).unwrap();
    for l in samples(2, 3, 11) {
        let d = quantum_det(C::new(0.29, 0.17), &l, &module).unwrap();
        assert_eq!(d.nrows(), 1);
        assert!(d[(0, 0)].norm() > 1e-3);
    }
}

#[test]
fn top_exterior_power_has_a_single_n_shift() {
    let p = params(3);
    let w = C::new(0.05, 0.0);
    let z = C::new(0.61, 0.13);
    let module = ext_power_module(3, w, &p).unwrap();
    let t = transfer_tm(3, z, &module).unwrap();
    assert_eq!(t.shifts(), &[Weight(vec![1, 1, 1])]);
    let t1 = transfer_t1(&module, z).unwrap();
    for l in samples(3, 2, 6) {
        for (mu, c) in scalar_coefficients(&t1, &l).unwrap() {
            let i = mu.0.iter().position(|&x| x == 1).unwrap();
            let expect = ext_top_diagonal(i, z, w, &l, &p).unwrap();
            assert!((c - expect).norm() < 1e-10 * expect.norm());
        }
    }
}

#[test]
fn vector_module_has_no_zero_weight_space() {
    let p = params(3);
    let v = vector_module(C::new(0.0, 0.0), &p);
    assert!(matches!(transfer_t1(&v, C::new(0.3, 0.0)), Err(Error::EmptyZeroWeight)));
}
