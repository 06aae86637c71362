//! Products of R-matrices described by wiring diagrams, and the fusion
//! operators `W_n`, `W^S_n`, `W^∧_n`.
//!
//! Lines are numbered `1..n` from left to right at the bottom. A crossing of
//! line `j` (on the left below the crossing) with line `k` contributes
//! `R(z_j − z_k, λ − γ Σ_l h^{(l)})^{(jk)}`, the sum running over the lines to
//! the left of the crossing. The bottom crossing is the rightmost factor.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rmatrix::{r_matrix, r_reg_matrix, ModelParams};
use crate::tensor::{
    c64, permutation_operator, CMatrix, GradedOperator, GradedSpace, Layout, Permutation, Weight,
    WeightVector,
};

/// A word in the adjacent transpositions `s_1, …, s_{n−1}`, bottom crossing first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Diagram {
    word: Vec<usize>,
    lines: usize,
}

impl Diagram {
    pub fn new(word: Vec<usize>, lines: usize) -> Result<Self> {
        if let Some(&bad) = word.iter().find(|&&s| s == 0 || s >= lines) {
            return Err(Error::InvalidParams(format!(
                "crossing s_{bad} is not defined for {lines} lines"
            )));
        }
        Ok(Self { word, lines })
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn lines(&self) -> usize {
        self.lines
    }

    /// Line labels (0-based) at each position after every crossing.
    fn arrangement(&self) -> Vec<usize> {
        let mut at: Vec<usize> = (0..self.lines).collect();
        for &s in &self.word {
            at.swap(s - 1, s);
        }
        at
    }

    /// Sends `j` to `k` when the `j`-th bottom point is joined to the `k`-th top point.
    pub fn permutation(&self) -> Permutation {
        let at = self.arrangement();
        let mut images = vec![0; self.lines];
        for (pos, &line) in at.iter().enumerate() {
            images[line] = pos;
        }
        Permutation::new(images).expect("arrangement is a bijection")
    }

    /// Every pair of lines crosses exactly once.
    pub fn is_admissible(&self) -> bool {
        let n = self.lines;
        let mut count = vec![0usize; n * n];
        let mut at: Vec<usize> = (0..n).collect();
        for &s in &self.word {
            let (a, b) = (at[s - 1].min(at[s]), at[s - 1].max(at[s]));
            count[a * n + b] += 1;
            at.swap(s - 1, s);
        }
        (0..n).all(|a| (a + 1..n).all(|b| count[a * n + b] == 1))
    }

    /// The diagram produced by the defining recursion of `W_n`.
    pub fn recursion(n: usize) -> Self {
        let mut word = Vec::new();
        for m in 2..=n {
            // W_m = (line 1 crosses lines 2..m) · (1 ⊗ W_{m−1})
            word = word.iter().map(|s| s + 1).collect();
            word.extend(1..m);
        }
        Self { word, lines: n }
    }

    /// Line 1 first crosses every other line, then `W_{n−1}` acts on the rest.
    pub fn opposite(n: usize) -> Self {
        let mut word: Vec<usize> = (1..n).collect();
        if n > 1 {
            word.extend(Self::recursion(n - 1).word);
        }
        Self { word, lines: n }
    }

    /// All reduced words of a permutation.
    pub fn reduced_words(sigma: &Permutation) -> Vec<Diagram> {
        fn rec(
            at: &mut Vec<usize>,
            sigma: &Permutation,
            word: &mut Vec<usize>,
            out: &mut Vec<Diagram>,
        ) {
            let n = at.len();
            let mut any = false;
            for s in 1..n {
                let (a, b) = (at[s - 1], at[s]);
                if sigma.apply(a) > sigma.apply(b) {
                    any = true;
                    at.swap(s - 1, s);
                    word.push(s);
                    rec(at, sigma, word, out);
                    word.pop();
                    at.swap(s - 1, s);
                }
            }
            if !any {
                out.push(Diagram {
                    word: word.clone(),
                    lines: n,
                });
            }
        }
        let mut out = Vec::new();
        rec(&mut (0..sigma.len()).collect(), sigma, &mut Vec::new(), &mut out);
        out
    }

    /// The permutation reversing the order of `n` letters.
    pub fn reversal(n: usize) -> Permutation {
        Permutation::new((0..n).rev().collect()).expect("reversal")
    }
}

/// How crossings whose spectral parameter sits on the pole `z = γ` are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossingPolicy {
    /// Every crossing uses `R`; a pole is an error.
    Plain,
    /// Crossings between lines with consecutive labels use `res_{z=γ} R`.
    RegularizeAdjacent,
}

/// Evaluates the ordered product of R-matrices of a diagram.
pub fn eval_diagram(
    d: &Diagram,
    z: &[Complex64],
    lambda: &WeightVector,
    p: &ModelParams,
) -> Result<GradedOperator> {
    eval_diagram_with(d, z, lambda, p, CrossingPolicy::Plain)
}

pub fn eval_diagram_with(
    d: &Diagram,
    z: &[Complex64],
    lambda: &WeightVector,
    p: &ModelParams,
    policy: CrossingPolicy,
) -> Result<GradedOperator> {
    let n = d.lines;
    if z.len() != n {
        return Err(Error::Dimension(format!(
            "{} spectral parameters for {n} lines",
            z.len()
        )));
    }
    let layout = Layout::uniform(p.n_dim, n);
    let mut acc = CMatrix::identity(layout.dim(), layout.dim());
    let mut at: Vec<usize> = (0..n).collect();
    for &s in &d.word {
        let (j, k) = (at[s - 1], at[s]);
        let left: Vec<usize> = at[..s - 1].to_vec();
        let regular = policy == CrossingPolicy::RegularizeAdjacent && k == j + 1;
        let u = z[j] - z[k];
        let mut local = |mu: &Weight| {
            let l = lambda.shifted(mu, p.gamma);
            if regular {
                r_reg_matrix(&l, p)
            } else {
                r_matrix(u, &l, p)
            }
        };
        acc = layout.apply_local(&[j, k], &left, &mut local, &acc)?;
        at.swap(s - 1, s);
    }
    GradedOperator::new(GradedSpace::tensor_power(p.n_dim, n), acc)
}

fn w_n_matrix(z: &[Complex64], lambda: &WeightVector, p: &ModelParams) -> Result<CMatrix> {
    let n = z.len();
    let dim = p.n_dim.pow(n as u32);
    if n <= 1 {
        return Ok(CMatrix::identity(dim, dim));
    }
    let layout = Layout::uniform(p.n_dim, n);
    let rest: Vec<usize> = (1..n).collect();
    let mut acc = layout.embed(&rest, &[0], &mut |mu| {
        w_n_matrix(&z[1..], &lambda.shifted(mu, p.gamma), p)
    })?;
    for k in (1..n).rev() {
        let shift: Vec<usize> = (k + 1..n).collect();
        let u = z[0] - z[k];
        acc = layout.apply_local(
            &[0, k],
            &shift,
            &mut |mu| r_matrix(u, &lambda.shifted(mu, p.gamma), p),
            &acc,
        )?;
    }
    Ok(acc)
}

/// `W_n(z, λ)` by the defining recursion
/// `W_{n+1} = R^{(12)} ⋯ R^{(1,n+1)} (1 ⊗ W_n(z_2, …, λ − γh^{(1)}))`.
pub fn w_n(z: &[Complex64], lambda: &WeightVector, p: &ModelParams) -> Result<GradedOperator> {
    if z.is_empty() {
        return Err(Error::InvalidParams("W_n needs n >= 1".into()));
    }
    GradedOperator::new(
        GradedSpace::tensor_power(p.n_dim, z.len()),
        w_n_matrix(z, lambda, p)?,
    )
}

/// `z^S = (0, γ, …, (n−1)γ)`.
pub fn z_sym(n: usize, gamma: Complex64) -> Vec<Complex64> {
    (0..n).map(|k| gamma * k as f64).collect()
}

/// `z^∧ = ((n−1)γ, …, γ, 0)`.
pub fn z_ext(n: usize, gamma: Complex64) -> Vec<Complex64> {
    (0..n).rev().map(|k| gamma * k as f64).collect()
}

/// `W^S_n(λ) = W_n(z^S, λ)`; every crossing sits at a negative multiple of `γ`.
pub fn w_sym(n: usize, lambda: &WeightVector, p: &ModelParams) -> Result<GradedOperator> {
    w_n(&z_sym(n, p.gamma), lambda, p)
}

/// `W^∧_n(λ)`: the limit at `z^∧` of `Π_j (z_j − z_{j+1} − γ) W_n(z, λ)^{(n,…,1)}`.
///
/// Each prefactor cancels the pole of the single crossing between lines `j`
/// and `j+1`, which is replaced by the residue; the superscript relabels line
/// `r` as tensor factor `n+1−r`.
pub fn w_ext(n: usize, lambda: &WeightVector, p: &ModelParams) -> Result<GradedOperator> {
    if n == 0 {
        return Err(Error::InvalidParams("W^ext_n needs n >= 1".into()));
    }
    let w = eval_diagram_with(
        &Diagram::recursion(n),
        &z_ext(n, p.gamma),
        lambda,
        p,
        CrossingPolicy::RegularizeAdjacent,
    )?;
    let rev = permutation_operator(&Diagram::reversal(n), p.n_dim).into_matrix();
    GradedOperator::new(
        GradedSpace::tensor_power(p.n_dim, n),
        &rev * w.matrix() * &rev,
    )
}

/// `γ^{−(n−1)}`, the normalisation under which `W^∧_n` has a finite `γ → 0` limit.
pub fn w_ext_scale(n: usize, gamma: Complex64) -> Complex64 {
    c64(1.0, 0.0) / gamma.powi(n as i32 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmatrix::r_matrix;
    use crate::tensor::{max_abs, rel_diff};

    fn p2() -> ModelParams {
        ModelParams::with_defaults(2).unwrap()
    }

    fn lam2() -> WeightVector {
        WeightVector::new(vec![c64(0.21, 0.43), c64(0.66, 0.12)])
    }

    #[test]
    fn recursion_words() {
        assert_eq!(Diagram::recursion(1).word(), &[] as &[usize]);
        assert_eq!(Diagram::recursion(3).word(), &[2, 1, 2]);
        assert_eq!(Diagram::recursion(4).word(), &[3, 2, 3, 1, 2, 3]);
        assert_eq!(Diagram::opposite(4).word(), &[1, 2, 3, 2, 1, 2]);
        for n in 1..=5 {
            assert!(Diagram::recursion(n).is_admissible());
            assert!(Diagram::opposite(n).is_admissible());
            assert_eq!(Diagram::recursion(n).permutation(), Diagram::reversal(n));
        }
        assert!(!Diagram::new(vec![1, 1], 2).unwrap().is_admissible());
        assert!(Diagram::new(vec![2], 2).is_err());
    }

    #[test]
    fn reduced_words_of_longest_elements() {
        assert_eq!(Diagram::reduced_words(&Diagram::reversal(3)).len(), 2);
        assert_eq!(Diagram::reduced_words(&Diagram::reversal(4)).len(), 16);
        for d in Diagram::reduced_words(&Diagram::reversal(4)) {
            assert!(d.is_admissible());
        }
    }

    #[test]
    fn single_crossing_is_r() {
        let p = p2();
        let z = [c64(0.3, 0.1), c64(-0.2, 0.05)];
        let d = Diagram::new(vec![1], 2).unwrap();
        let w = eval_diagram(&d, &z, &lam2(), &p).unwrap();
        let r = r_matrix(z[0] - z[1], &lam2(), &p).unwrap();
        assert!(max_abs(&(w.into_matrix() - r)) < 1e-14);
    }

    #[test]
    fn empty_diagram_is_identity() {
        let p = p2();
        let d = Diagram::new(vec![], 3).unwrap();
        let w = eval_diagram(&d, &[c64(0.0, 0.0); 3], &lam2(), &p).unwrap();
        assert_eq!(w.into_matrix(), CMatrix::identity(8, 8));
    }

    #[test]
    fn w1_is_identity() {
        let w = w_n(&[c64(0.4, 0.0)], &lam2(), &p2()).unwrap();
        assert_eq!(w.into_matrix(), CMatrix::identity(2, 2));
    }

    #[test]
    fn w_sym_2_is_r_at_minus_gamma() {
        let p = p2();
        let w = w_sym(2, &lam2(), &p).unwrap();
        let r = r_matrix(-p.gamma, &lam2(), &p).unwrap();
        assert!(rel_diff(w.matrix(), &r) < 1e-14);
    }

    #[test]
    fn plain_policy_hits_pole_at_z_ext() {
        let p = p2();
        let res = eval_diagram(&Diagram::recursion(2), &z_ext(2, p.gamma), &lam2(), &p);
        assert!(matches!(res, Err(Error::Pole { .. })));
    }
}
