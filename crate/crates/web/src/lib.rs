//! Browser bindings: point sampling, surface geometry and small training runs.
//!
//! Arrays cross the boundary as flat `Float64Array`s with a fixed stride.

use surface_pinn::geometry::{Surface, SURFACE_NAMES};
use surface_pinn::harness::l2_error;
use surface_pinn::net::{architecture, forward, xavier_init};
use surface_pinn::optim::{minimize, LbfgsConfig};
use surface_pinn::pde::{manufactured_problem, ProblemName};
use surface_pinn::sampling::{
    minimum_energy_points, parametric_grid, random_subset, random_surface_points, PointSet,
};
use wasm_bindgen::prelude::*;

/// Values per point in [`sample_points`]: position, normal, `H_S`.
pub const POINT_STRIDE: usize = 7;
/// Values per point in [`Solution::points`]: position, reference, prediction.
pub const SOLUTION_STRIDE: usize = 5;

fn js_err(e: surface_pinn::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Registered surface names, comma separated.
#[wasm_bindgen]
pub fn surface_names() -> String {
    SURFACE_NAMES.join(",")
}

fn point_set(surface: &str, count: usize, seed: u64, me_iters: usize) -> surface_pinn::Result<PointSet> {
    match Surface::by_name(surface)? {
        Surface::LevelSet(s) if me_iters == 0 => random_surface_points(&s, count, seed),
        Surface::LevelSet(s) => minimum_energy_points(&s, count, seed, me_iters),
        Surface::Parametric(s) => {
            let n_theta = 20.min(count.max(2));
            parametric_grid(&s, (count / n_theta).max(2), n_theta)
        }
    }
}

/// Points on `surface` as `[x, y, z, nx, ny, nz, H, ...]`. `me_iters = 0`
/// gives plain random points; parametric surfaces always give a grid.
#[wasm_bindgen]
pub fn sample_points(surface: &str, count: usize, seed: u64, me_iters: usize) -> Result<Vec<f64>, JsError> {
    let set = point_set(surface, count, seed, me_iters).map_err(js_err)?;
    Ok(flatten(&set))
}

fn flatten(set: &PointSet) -> Vec<f64> {
    let mut out = Vec::with_capacity(set.len() * POINT_STRIDE);
    for p in &set.points {
        out.extend_from_slice(&p.position);
        out.extend_from_slice(&p.normal);
        out.push(p.mean_curv_sum);
    }
    out
}

#[wasm_bindgen]
pub struct Solution {
    l2: f64,
    losses: Vec<f64>,
    points: Vec<f64>,
}

#[wasm_bindgen]
impl Solution {
    #[wasm_bindgen(getter)]
    pub fn l2_error(&self) -> f64 {
        self.l2
    }

    pub fn loss_history(&self) -> Vec<f64> {
        self.losses.clone()
    }

    /// `[x, y, z, u_ref, u_pred, ...]` at every test point.
    pub fn points(&self) -> Vec<f64> {
        self.points.clone()
    }
}

/// Trains one network on a manufactured problem and evaluates it on the test
/// points. `problem` is `"example1"` or `"example2"`.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn solve(
    problem: &str,
    surface: &str,
    test_count: usize,
    train_count: usize,
    width: usize,
    hidden: usize,
    max_iters: usize,
    seed: u64,
) -> Result<Solution, JsError> {
    run(problem, surface, test_count, train_count, width, hidden, max_iters, seed).map_err(js_err)
}

#[allow(clippy::too_many_arguments)]
fn run(
    problem: &str,
    surface: &str,
    test_count: usize,
    train_count: usize,
    width: usize,
    hidden: usize,
    max_iters: usize,
    seed: u64,
) -> surface_pinn::Result<Solution> {
    let name: ProblemName = problem.parse()?;
    let pde = manufactured_problem(name, surface)?;
    let test = point_set(surface, test_count, 2021, 20)?;
    let training = random_subset(&test, train_count.min(test.len()), seed)?;
    let init = xavier_init(&architecture(width, hidden), seed)?;
    let cfg = LbfgsConfig {
        max_iters,
        ..LbfgsConfig::default()
    };
    let result = minimize(&pde, &training, &init, &cfg, seed)?;

    let reference: Vec<f64> = test.points.iter().map(|p| pde.reference.value(p.position)).collect();
    let predicted: Vec<f64> = test.points.iter().map(|p| forward(&result.final_params, p.position)).collect();
    let mut points = Vec::with_capacity(test.len() * SOLUTION_STRIDE);
    for ((p, u), v) in test.points.iter().zip(&reference).zip(&predicted) {
        points.extend_from_slice(&p.position);
        points.push(*u);
        points.push(*v);
    }
    Ok(Solution {
        l2: l2_error(&reference, &predicted)?,
        losses: result.loss_history,
        points,
    })
}
