use elliptic_fusion::emodule::{
    compose_rmatrix_left, compose_rmatrix_right, ext_power_module, fused_tensor_module,
    module_dybe_residual, morphism_residual, power_leakage, rll_residual, sym_power_module,
    tensor_module, trivial_module, vector_module, ModuleRMatrix,
};
use elliptic_fusion::fusion::{eval_diagram, w_ext, w_ext_scale, w_n, w_sym, Diagram};
use elliptic_fusion::rmatrix::{r_matrix, ModelParams};
use elliptic_fusion::tensor::{
    numeric_rank, projection_residual, projector_sym, rel_diff, singular_values, CMatrix,
    WeightVector, DEFAULT_RANK_TOL,
};
use elliptic_fusion::Error;
use num_complex::Complex64 as C;

fn lam(n: usize) -> WeightVector {
    let v = [C::new(0.11, 0.52), C::new(0.73, 0.05), C::new(0.34, 0.81)];
    WeightVector::new(v[..n].to_vec())
}

fn params(n: usize) -> ModelParams {
    ModelParams::with_defaults(n).unwrap()
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (1..=k).fold(1, |acc, i| acc * (n + 1 - i) / i)
}

#[test]
fn fusion_ranks_follow_binomials() {
    for (nd, n) in [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3)] {
        let p = params(nd);
        let l = lam(nd);
        let ws = w_sym(n, &l, &p).unwrap().into_matrix();
        assert_eq!(numeric_rank(&ws, DEFAULT_RANK_TOL), binomial(nd + n - 1, n), "W^S N={nd} n={n}");
        let we = w_ext(n, &l, &p).unwrap().into_matrix() * w_ext_scale(n, p.gamma);
        let sv = singular_values(&we);
        let rank = sv.iter().filter(|&&s| s > (1e-7 * sv[0]).max(1e-10)).count();
        assert_eq!(we.ncols() - rank, nd.pow(n as u32) - binomial(nd, n), "W^ext N={nd} n={n}");
    }
}

#[test]
fn symmetric_fusion_has_image_s_n() {
    let p = params(3);
    let ws = w_sym(3, &lam(3), &p).unwrap().into_matrix();
    let sym = projector_sym(3, 3).into_matrix();
    assert!(projection_residual(&sym, &ws, DEFAULT_RANK_TOL) < 1e-9);
    assert!(projection_residual(&ws, &sym, DEFAULT_RANK_TOL) < 1e-9);
}

#[test]
fn reduced_words_of_the_longest_permutation_agree() {
    let p = params(2);
    let z = [C::new(0.1, 0.2), C::new(-0.3, 0.05), C::new(0.45, -0.1), C::new(0.2, 0.3)];
    let l = lam(2);
    let words = Diagram::reduced_words(&Diagram::reversal(4));
    assert_eq!(words.len(), 16);
    let first = eval_diagram(&words[0], &z, &l, &p).unwrap().into_matrix();
    for d in &words[1..] {
        assert!(d.is_admissible());
        let m = eval_diagram(d, &z, &l, &p).unwrap().into_matrix();
        assert!(rel_diff(&m, &first) < 1e-10);
    }
    let rec = w_n(&z, &l, &p).unwrap().into_matrix();
    assert!(rel_diff(&rec, &first) < 1e-10);
}

#[test]
fn w_2_is_a_single_r_matrix() {
    let p = params(3);
    let z = [C::new(0.3, 0.1), C::new(-0.2, 0.4)];
    let w = w_n(&z, &lam(3), &p).unwrap().into_matrix();
    assert!(rel_diff(&w, &r_matrix(z[0] - z[1], &lam(3), &p).unwrap()) < 1e-14);
}

#[test]
fn modules_satisfy_rll() {
    let p = params(3);
    let l = lam(3);
    let (z1, z2) = (C::new(0.41, 0.13), C::new(-0.17, 0.29));
    let v = vector_module(C::new(0.05, 0.02), &p);
    let modules = [
        v.clone(),
        trivial_module(&p),
        tensor_module(&v, &vector_module(C::new(-0.3, 0.1), &p)).unwrap(),
        fused_tensor_module(2, C::new(0.2, 0.0), &p),
        sym_power_module(2, C::new(0.2, 0.0), &p).unwrap(),
        ext_power_module(2, C::new(0.2, 0.0), &p).unwrap(),
        ext_power_module(3, C::new(0.2, 0.0), &p).unwrap(),
    ];
    for m in &modules {
        assert!(rll_residual(m, z1, z2, &l).unwrap() < 1e-10, "{}", m.label());
    }
}

#[test]
fn power_module_dimensions() {
    let p = params(3);
    let w = C::new(0.0, 0.0);
    assert_eq!(sym_power_module(3, w, &p).unwrap().dim(), 10);
    assert_eq!(ext_power_module(2, w, &p).unwrap().dim(), 3);
    assert_eq!(ext_power_module(3, w, &p).unwrap().dim(), 1);
    assert!(ext_power_module(4, w, &p).is_err());
}

#[test]
fn vector_module_l_is_r() {
    let p = params(2);
    let (z, w) = (C::new(0.3, 0.2), C::new(-0.1, 0.05));
    let l = lam(2);
    let m = vector_module(w, &p);
    assert!(rel_diff(&m.l_matrix(z, &l).unwrap(), &r_matrix(z - w, &l, &p).unwrap()) < 1e-15);
}

#[test]
fn tensor_products_are_associative() {
    let p = params(2);
    let vs: Vec<_> = [0.1, -0.2, 0.35]
        .iter()
        .map(|&w| vector_module(C::new(w, 0.0), &p))
        .collect();
    let left = tensor_module(&tensor_module(&vs[0], &vs[1]).unwrap(), &vs[2]).unwrap();
    let right = tensor_module(&vs[0], &tensor_module(&vs[1], &vs[2]).unwrap()).unwrap();
    let (z, l) = (C::new(0.27, 0.31), lam(2));
    assert!(rel_diff(&left.l_matrix(z, &l).unwrap(), &right.l_matrix(z, &l).unwrap()) < 1e-13);
}

#[test]
fn subspaces_are_preserved() {
    for nd in [2, 3] {
        let p = params(nd);
        let (sym, j) = power_leakage(3, C::new(0.1, 0.0), C::new(0.4, 0.2), &lam(nd), &p).unwrap();
        assert!(sym < 1e-12 && j < 1e-12, "N={nd}: {sym:e} {j:e}");
    }
}

#[test]
fn composed_r_matrices_satisfy_dybe_and_intertwine() {
    let p = params(2);
    let l = lam(2);
    let z = [C::new(0.3, 0.1), C::new(-0.2, 0.05), C::new(0.6, -0.1), C::new(0.1, 0.25)];
    let f = |a: usize, b: usize| ModuleRMatrix::fundamental(z[a], z[b], &p);
    let r_1_23 = compose_rmatrix_right(&f(0, 2), &f(0, 1)).unwrap();
    let r_23_4 = compose_rmatrix_left(&f(1, 3), &f(2, 3)).unwrap();
    assert!(module_dybe_residual(&r_1_23, &f(0, 3), &r_23_4, &l).unwrap() < 1e-12);
    let v: Vec<_> = z.iter().map(|&w| vector_module(w, &p)).collect();
    let w23 = tensor_module(&v[1], &v[2]).unwrap();
    let u = C::new(0.21, 0.4);
    assert!(morphism_residual(&r_1_23, &v[0], &w23, u, &l).unwrap() < 1e-12);
    assert!(morphism_residual(&r_23_4, &w23, &v[3], u, &l).unwrap() < 1e-12);
}

#[test]
fn too_large_power_is_refused() {
    let p = params(3);
    let err = sym_power_module(9, C::new(0.0, 0.0), &p).unwrap_err();
    assert!(matches!(err, Error::InvalidParams(_) | Error::Dimension(_)), "{err}");
}

#[test]
fn top_exterior_l_is_diagonal() {
    let p = params(3);
    let m = ext_power_module(3, C::new(0.1, 0.0), &p).unwrap();
    let e = m.matrix_elements(C::new(0.5, 0.2), &lam(3)).unwrap();
    for i in 0..3 {
        for j in (0..3).filter(|&j| j != i) {
            let off: CMatrix = e.get(i, j);
            assert!(off[(0, 0)].norm() < 1e-13);
        }
    }
}
