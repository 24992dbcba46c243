//! L-BFGS over the flat parameter vector.
//!
//! Two-loop recursion for the search direction, strong-Wolfe line search with
//! cubic interpolation in the zoom phase. When the line search fails along
//! the quasi-Newton direction, the history is dropped and one steepest-descent
//! attempt is made before giving up.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::{xavier_init, MlpParams};
use crate::par::par_map;
use crate::pde::{CollocationLoss, PdeProblem};
use crate::sampling::PointSet;

const MAX_LINE_SEARCH_EVALS: usize = 25;
const PLATEAU_WINDOW: usize = 10;
/// Serialized loss histories keep at most this many entries.
pub const HISTORY_LIMIT: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LbfgsConfig {
    pub memory: usize,
    pub max_iters: usize,
    /// Stop when `‖∇Loss‖∞ < grad_tol`.
    pub grad_tol: f64,
    /// Stop when the relative decrease over 10 iterations is below this.
    pub loss_tol: f64,
    pub wolfe_c1: f64,
    pub wolfe_c2: f64,
}

impl Default for LbfgsConfig {
    fn default() -> Self {
        Self {
            memory: 10,
            max_iters: 5000,
            grad_tol: 1e-9,
            loss_tol: 1e-12,
            wolfe_c1: 1e-4,
            wolfe_c2: 0.9,
        }
    }
}

impl LbfgsConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.memory >= 1
            && 0.0 < self.wolfe_c1
            && self.wolfe_c1 < self.wolfe_c2
            && self.wolfe_c2 < 1.0
            && self.grad_tol >= 0.0
            && self.loss_tol >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("invalid L-BFGS settings {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    GradTol,
    LossPlateau,
    MaxIters,
    LinesearchFail,
}

/// A differentiable objective over `R^n`.
pub trait Objective {
    fn dim(&self) -> usize;
    /// Writes the gradient at `x` into `grad` and returns the value.
    fn evaluate(&mut self, x: &[f64], grad: &mut [f64]) -> f64;
}

/// Line-search record of one accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub alpha: f64,
    pub f0: f64,
    pub slope0: f64,
    pub f1: f64,
    pub slope1: f64,
}

#[derive(Debug, Clone)]
pub struct LbfgsOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    /// Objective at the initial point and after every accepted step.
    pub history: Vec<f64>,
    pub steps: Vec<StepRecord>,
    pub iterations: usize,
    pub evaluations: usize,
    pub termination: Termination,
}

struct Pair {
    s: Vec<f64>,
    y: Vec<f64>,
    rho: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `-H g` for the inverse-Hessian approximation built from `pairs` with
/// initial matrix `gamma · I`.
pub fn two_loop_direction(grad: &[f64], pairs: &[(Vec<f64>, Vec<f64>)], gamma: f64) -> Vec<f64> {
    let pairs: Vec<Pair> = pairs
        .iter()
        .map(|(s, y)| Pair {
            rho: 1.0 / dot(s, y),
            s: s.clone(),
            y: y.clone(),
        })
        .collect();
    let refs: VecDeque<&Pair> = pairs.iter().collect();
    direction(grad, &refs, gamma)
}

fn direction(grad: &[f64], pairs: &VecDeque<&Pair>, gamma: f64) -> Vec<f64> {
    let mut q = grad.to_vec();
    let mut alphas = vec![0.0; pairs.len()];
    for (k, p) in pairs.iter().enumerate().rev() {
        let a = p.rho * dot(&p.s, &q);
        alphas[k] = a;
        q.iter_mut().zip(&p.y).for_each(|(qi, yi)| *qi -= a * yi);
    }
    q.iter_mut().for_each(|v| *v *= gamma);
    for (k, p) in pairs.iter().enumerate() {
        let b = p.rho * dot(&p.y, &q);
        q.iter_mut()
            .zip(&p.s)
            .for_each(|(qi, si)| *qi += (alphas[k] - b) * si);
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

// Minimizer of the cubic through (a, fa, da) and (b, fb, db), or None when the
// interpolant has no interior minimum.
fn cubic_min(a: f64, fa: f64, da: f64, b: f64, fb: f64, db: f64) -> Option<f64> {
    let d1 = da + db - 3.0 * (fa - fb) / (a - b);
    let disc = d1 * d1 - da * db;
    if !(disc >= 0.0) {
        return None;
    }
    let d2 = (b - a).signum() * disc.sqrt();
    let t = b - (b - a) * (db + d2 - d1) / (db - da + 2.0 * d2);
    t.is_finite().then_some(t)
}

struct LineSearch<'a, O: Objective> {
    obj: &'a mut O,
    x: &'a [f64],
    d: &'a [f64],
    f0: f64,
    slope0: f64,
    c1: f64,
    c2: f64,
    evals: usize,
    trial: Vec<f64>,
    grad: Vec<f64>,
}

struct Probe {
    alpha: f64,
    f: f64,
    slope: f64,
    grad: Vec<f64>,
}

impl<O: Objective> LineSearch<'_, O> {
    fn probe(&mut self, alpha: f64) -> Probe {
        for i in 0..self.x.len() {
            self.trial[i] = self.x[i] + alpha * self.d[i];
        }
        let f = self.obj.evaluate(&self.trial, &mut self.grad);
        self.evals += 1;
        Probe {
            alpha,
            f,
            slope: dot(&self.grad, self.d),
            grad: self.grad.clone(),
        }
    }

    fn armijo(&self, p: &Probe) -> bool {
        p.f <= self.f0 + self.c1 * p.alpha * self.slope0
    }

    fn curvature(&self, p: &Probe) -> bool {
        p.slope.abs() <= -self.c2 * self.slope0
    }

    fn run(&mut self, alpha0: f64) -> Option<Probe> {
        let mut prev = Probe {
            alpha: 0.0,
            f: self.f0,
            slope: self.slope0,
            grad: Vec::new(),
        };
        let mut alpha = alpha0;
        for i in 0.. {
            if self.evals >= MAX_LINE_SEARCH_EVALS || !alpha.is_finite() {
                return None;
            }
            let cur = self.probe(alpha);
            if !cur.f.is_finite() {
                // Step overflowed the objective; pull back.
                alpha = 0.5 * (prev.alpha + alpha);
                continue;
            }
            if !self.armijo(&cur) || (i > 0 && cur.f >= prev.f) {
                return self.zoom(prev, cur);
            }
            if self.curvature(&cur) {
                return Some(cur);
            }
            if cur.slope >= 0.0 {
                return self.zoom(cur, prev);
            }
            alpha = cubic_min(prev.alpha, prev.f, prev.slope, cur.alpha, cur.f, cur.slope)
                .filter(|&t| t > 1.1 * cur.alpha && t < 10.0 * cur.alpha)
                .unwrap_or(4.0 * cur.alpha);
            prev = cur;
        }
        None
    }

    fn zoom(&mut self, mut lo: Probe, mut hi: Probe) -> Option<Probe> {
        loop {
            if self.evals >= MAX_LINE_SEARCH_EVALS {
                return None;
            }
            let width = (hi.alpha - lo.alpha).abs();
            if width <= 1e-14 * lo.alpha.abs().max(hi.alpha.abs()) {
                return None;
            }
            let (left, right) = if lo.alpha < hi.alpha {
                (lo.alpha, hi.alpha)
            } else {
                (hi.alpha, lo.alpha)
            };
            let guard = 0.1 * width;
            let alpha = if hi.f.is_finite() {
                cubic_min(lo.alpha, lo.f, lo.slope, hi.alpha, hi.f, hi.slope)
            } else {
                None
            }
            .filter(|&t| t > left + guard && t < right - guard)
            .unwrap_or(0.5 * (lo.alpha + hi.alpha));
            let cur = self.probe(alpha);
            if !cur.f.is_finite() || !self.armijo(&cur) || cur.f >= lo.f {
                hi = cur;
            } else {
                if self.curvature(&cur) {
                    return Some(cur);
                }
                if cur.slope * (hi.alpha - lo.alpha) >= 0.0 {
                    hi = lo;
                }
                lo = cur;
            }
        }
    }
}

/// Minimizes `obj` from `x0`.
pub fn lbfgs<O: Objective>(obj: &mut O, x0: &[f64], cfg: &LbfgsConfig) -> Result<LbfgsOutcome> {
    cfg.validate()?;
    let n = obj.dim();
    if x0.len() != n {
        return Err(Error::InvalidConfig(format!(
            "initial point has {} entries, objective expects {n}",
            x0.len()
        )));
    }
    let mut x = x0.to_vec();
    let mut g = vec![0.0; n];
    let mut f = obj.evaluate(&x, &mut g);
    let mut evaluations = 1;
    let mut history = vec![f];
    let mut steps = Vec::new();
    let mut pairs: VecDeque<Pair> = VecDeque::with_capacity(cfg.memory);
    let mut termination = Termination::MaxIters;
    let mut iterations = 0;

    while iterations < cfg.max_iters {
        if g.iter().fold(0.0f64, |m, v| m.max(v.abs())) < cfg.grad_tol {
            termination = Termination::GradTol;
            break;
        }
        if history.len() > PLATEAU_WINDOW {
            let old = history[history.len() - 1 - PLATEAU_WINDOW];
            if old - f <= cfg.loss_tol * old.abs() {
                termination = Termination::LossPlateau;
                break;
            }
        }

        let mut accepted = None;
        for attempt in 0..2 {
            let steepest = attempt == 1 || pairs.is_empty();
            let (d, alpha0) = if steepest {
                pairs.clear();
                let gn = dot(&g, &g).sqrt();
                (g.iter().map(|v| -v).collect::<Vec<_>>(), 1.0 / gn.max(1.0))
            } else {
                let last = pairs.back().unwrap();
                let gamma = dot(&last.s, &last.y) / dot(&last.y, &last.y);
                (direction(&g, &pairs.iter().collect(), gamma), 1.0)
            };
            let slope0 = dot(&g, &d);
            if !(slope0 < 0.0) {
                if steepest {
                    break;
                }
                continue;
            }
            let mut ls = LineSearch {
                obj: &mut *obj,
                x: &x,
                d: &d,
                f0: f,
                slope0,
                c1: cfg.wolfe_c1,
                c2: cfg.wolfe_c2,
                evals: 0,
                trial: vec![0.0; n],
                grad: vec![0.0; n],
            };
            let found = ls.run(alpha0);
            evaluations += ls.evals;
            if let Some(p) = found {
                accepted = Some((p, d, slope0));
                break;
            }
            if steepest {
                break;
            }
        }

        let Some((probe, d, slope0)) = accepted else {
            termination = Termination::LinesearchFail;
            break;
        };
        let s: Vec<f64> = d.iter().map(|v| probe.alpha * v).collect();
        let y: Vec<f64> = probe.grad.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        steps.push(StepRecord {
            alpha: probe.alpha,
            f0: f,
            slope0,
            f1: probe.f,
            slope1: probe.slope,
        });
        x.iter_mut().zip(&s).for_each(|(xi, si)| *xi += si);
        f = probe.f;
        g = probe.grad;
        history.push(f);
        iterations += 1;
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            if pairs.len() == cfg.memory {
                pairs.pop_front();
            }
            pairs.push_back(Pair {
                rho: 1.0 / sy,
                s,
                y,
            });
        }
    }

    Ok(LbfgsOutcome {
        x,
        f,
        history,
        steps,
        iterations,
        evaluations,
        termination,
    })
}

/// The collocation loss as an [`Objective`] over flat parameters.
pub struct PinnObjective {
    loss: CollocationLoss,
    params: MlpParams,
}

impl PinnObjective {
    pub fn new(problem: &PdeProblem, training: &PointSet, template: &MlpParams) -> Result<Self> {
        Ok(Self {
            loss: CollocationLoss::new(problem, training)?,
            params: template.clone(),
        })
    }
}

impl Objective for PinnObjective {
    fn dim(&self) -> usize {
        self.params.num_params()
    }

    fn evaluate(&mut self, x: &[f64], grad: &mut [f64]) -> f64 {
        self.params
            .set_flat(x)
            .expect("flat vector length is fixed by dim()");
        let (v, g) = self
            .loss
            .value_and_gradient(&self.params)
            .expect("training set is non-empty by construction");
        grad.copy_from_slice(&g);
        v
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub final_params: MlpParams,
    pub loss_history: Vec<f64>,
    pub iterations: usize,
    /// Loss and gradient evaluations, including line-search probes.
    pub evaluations: usize,
    pub seed: u64,
    pub termination: Termination,
}

/// JSON form of a [`RunResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub termination: Termination,
    pub iterations: usize,
    pub evaluations: usize,
    pub final_loss: f64,
    pub loss_history: Vec<f64>,
}

impl RunResult {
    pub fn final_loss(&self) -> f64 {
        *self.loss_history.last().unwrap()
    }

    pub fn summary(&self) -> RunSummary {
        RunSummary {
            seed: self.seed,
            termination: self.termination,
            iterations: self.iterations,
            evaluations: self.evaluations,
            final_loss: self.final_loss(),
            loss_history: decimate(&self.loss_history, HISTORY_LIMIT),
        }
    }
}

/// Keeps at most `limit` entries, evenly spaced, always including both ends.
pub fn decimate(values: &[f64], limit: usize) -> Vec<f64> {
    if values.len() <= limit {
        return values.to_vec();
    }
    if limit < 2 {
        return values[..limit].to_vec();
    }
    let last = values.len() - 1;
    (0..limit)
        .map(|k| values[(k * last) / (limit - 1)])
        .collect()
}

/// Trains the network from `init` on the collocation loss.
pub fn minimize(
    problem: &PdeProblem,
    training: &PointSet,
    init: &MlpParams,
    cfg: &LbfgsConfig,
    seed: u64,
) -> Result<RunResult> {
    let mut obj = PinnObjective::new(problem, training, init)?;
    let out = lbfgs(&mut obj, &init.to_flat(), cfg)?;
    Ok(RunResult {
        final_params: MlpParams::from_flat(&init.layer_sizes, &out.x)?,
        loss_history: out.history,
        iterations: out.iterations,
        evaluations: out.evaluations,
        seed,
        termination: out.termination,
    })
}

/// One independent [`minimize`] per seed, each from its own Xavier draw.
pub fn multi_seed_train(
    problem: &PdeProblem,
    training: &PointSet,
    seeds: &[u64],
    cfg: &LbfgsConfig,
    arch: &[usize],
) -> Result<Vec<Result<RunResult>>> {
    if seeds.is_empty() {
        return Err(Error::InvalidConfig("at least one seed is required".into()));
    }
    Ok(par_map(seeds.len(), |k| {
        let seed = seeds[k];
        let init = xavier_init(arch, seed)?;
        minimize(problem, training, &init, cfg, seed)
    }))
}
