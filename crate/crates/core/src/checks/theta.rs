use num_complex::Complex64;

use super::{worse, Check, Context, FnCheck, Outcome, Registry, Suite};
use crate::error::Result;
use crate::sampling::Sampler;
use crate::theta::{theta_deriv, theta_eval};

pub(super) fn register(r: &mut Registry) {
    let checks: [FnCheck; 5] = [
        FnCheck::new("theta_oddness", Suite::Theta, 1e-12, 100, oddness),
        FnCheck::new("theta_period_one", Suite::Theta, 1e-12, 100, period_one),
        FnCheck::new("theta_period_tau", Suite::Theta, 1e-12, 100, period_tau),
        FnCheck::new("theta_lattice_zeros", Suite::Theta, 1e-10, 9, lattice_zeros),
        FnCheck::new("theta_derivative_fd", Suite::Theta, 1e-6, 20, derivative_fd),
    ];
    for c in checks {
        r.register(Box::new(c) as Box<dyn Check>);
    }
}

/// `|θ(−z) + θ(z)| / (1 + |θ(z)|)`.
fn oddness(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let tp = &ctx.params.theta;
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let z = s.cell_point(tp.tau);
        let t = theta_eval(z, tp)?;
        worst = worse(worst, (theta_eval(-z, tp)? + t).norm() / (1.0 + t.norm()));
    }
    Ok(Outcome::new(worst, k))
}

/// `|θ(z+1) + θ(z)| / (1 + |θ(z)|)`.
fn period_one(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let tp = &ctx.params.theta;
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let z = s.cell_point(tp.tau);
        let t = theta_eval(z, tp)?;
        worst = worse(worst, (theta_eval(z + 1.0, tp)? + t).norm() / (1.0 + t.norm()));
    }
    Ok(Outcome::new(worst, k))
}

/// `θ(z+τ) = −e^{−πiτ−2πiz} θ(z)`, relative to `1 + |θ(z+τ)|`.
fn period_tau(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let tp = &ctx.params.theta;
    let i_pi = Complex64::new(0.0, std::f64::consts::PI);
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let z = s.cell_point(tp.tau);
        let lhs = theta_eval(z + tp.tau, tp)?;
        let rhs = -(-i_pi * tp.tau - i_pi * 2.0 * z).exp() * theta_eval(z, tp)?;
        worst = worse(worst, (lhs - rhs).norm() / (1.0 + lhs.norm()));
    }
    Ok(Outcome::new(worst, k))
}

fn lattice_zeros(ctx: &Context, _s: &mut Sampler, _k: usize) -> Result<Outcome> {
    let tp = &ctx.params.theta;
    let mut worst: f64 = 0.0;
    for m in -1..=1 {
        for n in -1..=1 {
            let z = tp.tau * n as f64 + m as f64;
            worst = worse(worst, theta_eval(z, tp)?.norm());
        }
    }
    Ok(Outcome::new(worst, 9))
}

/// Central difference with `h = 1e−6` against the series derivative.
fn derivative_fd(ctx: &Context, s: &mut Sampler, k: usize) -> Result<Outcome> {
    let tp = &ctx.params.theta;
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let z = s.cell_point(tp.tau);
        let fd = (theta_eval(z + h, tp)? - theta_eval(z - h, tp)?) / (2.0 * h);
        let d = theta_deriv(z, tp)?;
        worst = worse(worst, (fd - d).norm() / d.norm().max(1.0));
    }
    Ok(Outcome::new(worst, k))
}
