//! Finite-difference checks of the analytic derivative paths.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::geometry::LevelSetSurface;
use crate::jet::Vec3;
use crate::net::{architecture, forward, forward_jet, xavier_init, MlpParams};
use crate::pde::{manufactured_problem, CollocationLoss, ProblemName};
use crate::sampling::random_surface_points;

/// Step of the central differences used for input derivatives.
pub const INPUT_STEP: f64 = 1e-4;
pub const INPUT_TOL: f64 = 1e-6;
/// Step of the one-sided differences used for parameter derivatives.
pub const PARAM_STEP: f64 = 1e-6;
pub const PARAM_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Serialize)]
pub struct DerivativeCheck {
    pub name: String,
    pub relative_error: f64,
    pub tolerance: f64,
}

impl DerivativeCheck {
    pub fn passed(&self) -> bool {
        self.relative_error < self.tolerance
    }
}

/// `‖a − b‖ / ‖b‖`.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

fn shifted(x: Vec3, axis: usize, h: f64) -> Vec3 {
    let mut y = x;
    y[axis] += h;
    y
}

/// Input gradient and Hessian of `forward_jet` against central differences
/// of `forward` and of the jet gradient, at `points` random inputs.
pub fn input_derivatives(params: &MlpParams, points: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = INPUT_STEP;
    let (mut worst_g, mut worst_h) = (0.0f64, 0.0f64);
    for _ in 0..points {
        let x: Vec3 = std::array::from_fn(|_| rng.random_range(-1.5..1.5));
        let jet = forward_jet(params, x);
        let fd_grad: Vec<f64> = (0..3)
            .map(|i| (forward(params, shifted(x, i, h)) - forward(params, shifted(x, i, -h))) / (2.0 * h))
            .collect();
        worst_g = worst_g.max(relative_error(&jet.grad, &fd_grad));

        let mut fd_hess = Vec::with_capacity(9);
        let mut an_hess = Vec::with_capacity(9);
        for j in 0..3 {
            let gp = forward_jet(params, shifted(x, j, h)).grad;
            let gm = forward_jet(params, shifted(x, j, -h)).grad;
            for i in 0..3 {
                fd_hess.push((gp[i] - gm[i]) / (2.0 * h));
                an_hess.push(jet.hess[i][j]);
            }
        }
        worst_h = worst_h.max(relative_error(&an_hess, &fd_hess));
    }
    (worst_g, worst_h)
}

/// Gradient of the Example 1 collocation loss on `count` random sphere points
/// against forward differences in every parameter.
pub fn parameter_gradient(layer_sizes: &[usize], count: usize, seed: u64) -> Result<f64> {
    let problem = manufactured_problem(ProblemName::Example1, "sphere")?;
    let training = random_surface_points(&LevelSetSurface::sphere(1.0), count, seed)?;
    let loss = CollocationLoss::new(&problem, &training)?;
    let mut params = xavier_init(layer_sizes, seed)?;
    let (f0, grad) = loss.value_and_gradient(&params)?;
    let flat = params.to_flat();
    let mut fd = Vec::with_capacity(flat.len());
    let mut probe = flat.clone();
    for k in 0..flat.len() {
        probe[k] = flat[k] + PARAM_STEP;
        params.set_flat(&probe)?;
        fd.push((loss.value_and_gradient(&params)?.0 - f0) / PARAM_STEP);
        probe[k] = flat[k];
    }
    Ok(relative_error(&grad, &fd))
}

/// The full suite run by `surface-pinn check-derivatives`.
pub fn derivative_checks(seed: u64) -> Result<Vec<DerivativeCheck>> {
    let params = xavier_init(&architecture(50, 3), seed)?;
    let (g, h) = input_derivatives(&params, 20, seed);
    let p = parameter_gradient(&[3, 20, 1], 10, seed)?;
    Ok(vec![
        DerivativeCheck {
            name: "input gradient".into(),
            relative_error: g,
            tolerance: INPUT_TOL,
        },
        DerivativeCheck {
            name: "input hessian".into(),
            relative_error: h,
            tolerance: INPUT_TOL,
        },
        DerivativeCheck {
            name: "parameter gradient".into(),
            relative_error: p,
            tolerance: PARAM_TOL,
        },
    ])
}
