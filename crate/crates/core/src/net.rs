//! Fully-connected tanh network `ũ = u_NN(x; μ)` with second-order input jets.
//!
//! Two evaluation paths share the parameters:
//!
//! * [`forward_jet`] propagates one [`Jet2`] through the layers with scalar
//!   loops. It is the reference path and matches [`forward`] bit-for-bit in
//!   the value component.
//! * [`scalar_param_gradient`] evaluates batches of points as dense matrix
//!   products over all ten jet channels and runs reverse-mode accumulation
//!   through the jet computation, giving the exact gradient with respect to
//!   every parameter of any objective built from value, gradient and Hessian.

use ndarray::linalg::general_mat_mul;
use ndarray::{s, Array1, Array2, ArrayView2, ArrayViewMut2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{Jet2, Vec3, HESS_PAIRS, PACKED_LEN};
use crate::par::par_map;

/// Points per batch in the gradient engine. Batches are reduced in index
/// order, so results do not depend on the number of threads.
pub const BATCH: usize = 128;

pub const ACTIVATION: &str = "tanh";
pub const INITIALIZATION: &str = "xavier_uniform";

#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    pub layer_sizes: Vec<usize>,
    /// `weights[l]` has shape `(layer_sizes[l + 1], layer_sizes[l])`.
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

/// Checks `[3, w, ..., w, 1]`-style sizes: input 3, output 1, no empty layer.
pub fn validate_layer_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.len() < 2 || sizes[0] != 3 || *sizes.last().unwrap() != 1 || sizes.contains(&0) {
        return Err(Error::InvalidConfig(format!(
            "layer sizes must start with 3, end with 1 and be positive, got {sizes:?}"
        )));
    }
    Ok(())
}

/// `[3, width, ..., width, 1]` with `hidden` hidden layers.
pub fn architecture(width: usize, hidden: usize) -> Vec<usize> {
    let mut sizes = vec![3];
    sizes.extend(std::iter::repeat_n(width, hidden));
    sizes.push(1);
    sizes
}

pub fn param_count(sizes: &[usize]) -> usize {
    sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
}

impl MlpParams {
    pub fn zeros(layer_sizes: &[usize]) -> Result<Self> {
        validate_layer_sizes(layer_sizes)?;
        let weights = layer_sizes
            .windows(2)
            .map(|w| Array2::zeros((w[1], w[0])))
            .collect();
        let biases = layer_sizes[1..].iter().map(|&n| Array1::zeros(n)).collect();
        Ok(Self {
            layer_sizes: layer_sizes.to_vec(),
            weights,
            biases,
        })
    }

    pub fn num_params(&self) -> usize {
        param_count(&self.layer_sizes)
    }

    pub fn num_layers(&self) -> usize {
        self.weights.len()
    }

    /// Layer by layer: weights in row-major order, then biases.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_params());
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend(w.iter());
            out.extend(b.iter());
        }
        out
    }

    pub fn from_flat(layer_sizes: &[usize], flat: &[f64]) -> Result<Self> {
        let mut p = Self::zeros(layer_sizes)?;
        p.set_flat(flat)?;
        Ok(p)
    }

    pub fn set_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.num_params() {
            return Err(Error::InvalidConfig(format!(
                "expected {} parameters, got {}",
                self.num_params(),
                flat.len()
            )));
        }
        let mut off = 0;
        for (w, b) in self.weights.iter_mut().zip(self.biases.iter_mut()) {
            for v in w.iter_mut() {
                *v = flat[off];
                off += 1;
            }
            for v in b.iter_mut() {
                *v = flat[off];
                off += 1;
            }
        }
        Ok(())
    }

    /// The network `x ↦ u(x + shift)`.
    pub fn precompose_translation(&self, shift: Vec3) -> Self {
        let mut out = self.clone();
        let w0 = &self.weights[0];
        for i in 0..w0.nrows() {
            out.biases[0][i] += w0[[i, 0]] * shift[0] + w0[[i, 1]] * shift[1] + w0[[i, 2]] * shift[2];
        }
        out
    }
}

/// Glorot-uniform weights in `±√(6/(fan_in + fan_out))`, zero biases.
pub fn xavier_init(layer_sizes: &[usize], seed: u64) -> Result<MlpParams> {
    let mut p = MlpParams::zeros(layer_sizes)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for w in p.weights.iter_mut() {
        let (fan_out, fan_in) = w.dim();
        let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
        for v in w.iter_mut() {
            *v = rng.random_range(-bound..bound);
        }
    }
    Ok(p)
}

/// Plain forward pass.
pub fn forward(params: &MlpParams, x: Vec3) -> f64 {
    let mut a: Vec<f64> = x.to_vec();
    let last = params.num_layers() - 1;
    for (l, (w, b)) in params.weights.iter().zip(&params.biases).enumerate() {
        let mut z = Vec::with_capacity(w.nrows());
        for i in 0..w.nrows() {
            let mut s = b[i];
            for (k, ak) in a.iter().enumerate() {
                s = s + w[[i, k]] * ak;
            }
            z.push(if l < last { s.tanh() } else { s });
        }
        a = z;
    }
    a[0]
}

/// Value, input gradient and input Hessian of the network at `x`.
pub fn forward_jet(params: &MlpParams, x: Vec3) -> Jet2 {
    let mut a: Vec<Jet2> = Jet2::coordinates(x).to_vec();
    let last = params.num_layers() - 1;
    for (l, (w, b)) in params.weights.iter().zip(&params.biases).enumerate() {
        let mut z = Vec::with_capacity(w.nrows());
        for i in 0..w.nrows() {
            let mut s = Jet2::constant(b[i]);
            for (k, ak) in a.iter().enumerate() {
                s = s + ak.scale(w[[i, k]]);
            }
            z.push(if l < last { s.tanh() } else { s });
        }
        a = z;
    }
    a[0]
}

/// A per-point scalar built from the network jet; the total objective is the
/// mean of the per-point terms.
pub trait JetObjective: Sync {
    /// Returns the term for point `index` and its derivative with respect to
    /// the packed jet `[v, g0, g1, g2, h00, h01, h02, h11, h12, h22]`.
    /// Off-diagonal Hessian slots stand for both symmetric entries.
    fn point_term(&self, index: usize, jet: &[f64; PACKED_LEN]) -> (f64, [f64; PACKED_LEN]);
}

impl<F> JetObjective for F
where
    F: Fn(usize, &[f64; PACKED_LEN]) -> (f64, [f64; PACKED_LEN]) + Sync,
{
    fn point_term(&self, index: usize, jet: &[f64; PACKED_LEN]) -> (f64, [f64; PACKED_LEN]) {
        self(index, jet)
    }
}

/// Mean of `objective` over `points` and its gradient with respect to the
/// flat parameter vector.
pub fn scalar_param_gradient(
    params: &MlpParams,
    points: &[Vec3],
    objective: &dyn JetObjective,
) -> Result<(f64, Vec<f64>)> {
    if points.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let n_batches = points.len().div_ceil(BATCH);
    let partials = par_map(n_batches, |b| {
        let start = b * BATCH;
        let end = (start + BATCH).min(points.len());
        batch_gradient(params, &points[start..end], start, objective)
    });
    let mut total = 0.0;
    let mut grad = vec![0.0; params.num_params()];
    for (s, g) in partials {
        total += s;
        for (acc, v) in grad.iter_mut().zip(&g) {
            *acc += v;
        }
    }
    let inv = 1.0 / points.len() as f64;
    grad.iter_mut().for_each(|v| *v *= inv);
    Ok((total * inv, grad))
}

/// Packed output jets of the network at every point, via the batched path.
pub fn batch_jets(params: &MlpParams, points: &[Vec3]) -> Vec<[f64; PACKED_LEN]> {
    let n_batches = points.len().div_ceil(BATCH);
    par_map(n_batches, |b| {
        let start = b * BATCH;
        let end = (start + BATCH).min(points.len());
        let chunk = &points[start..end];
        let trace = JetTrace::forward(params, chunk);
        let out = trace.output();
        let np = chunk.len();
        (0..np)
            .map(|p| std::array::from_fn(|c| out[[0, c * np + p]]))
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

// Column layout of every activation matrix: channel-major blocks of `np`
// points, channel order as in the packed jet.
struct JetTrace {
    np: usize,
    /// Inputs of each layer (layer 0 input is the coordinate jet).
    inputs: Vec<Array2<f64>>,
    /// Pre-activations of each layer.
    pre: Vec<Array2<f64>>,
}

impl JetTrace {
    fn forward(params: &MlpParams, pts: &[Vec3]) -> Self {
        let np = pts.len();
        let cols = PACKED_LEN * np;
        let mut a0 = Array2::zeros((3, cols));
        for (p, x) in pts.iter().enumerate() {
            for d in 0..3 {
                a0[[d, p]] = x[d];
                a0[[d, (1 + d) * np + p]] = 1.0;
            }
        }
        let mut inputs = vec![a0];
        let mut pre = Vec::with_capacity(params.num_layers());
        let last = params.num_layers() - 1;
        for (l, (w, b)) in params.weights.iter().zip(&params.biases).enumerate() {
            let input = inputs.last().unwrap();
            let mut z = Array2::zeros((w.nrows(), cols));
            general_mat_mul(1.0, w, input, 0.0, &mut z);
            for (i, mut row) in z.rows_mut().into_iter().enumerate() {
                row.slice_mut(s![..np]).mapv_inplace(|v| v + b[i]);
            }
            if l < last {
                inputs.push(tanh_jet(z.view(), np));
            }
            pre.push(z);
        }
        Self { np, inputs, pre }
    }

    fn output(&self) -> &Array2<f64> {
        self.pre.last().unwrap()
    }
}

fn tanh_jet(z: ArrayView2<f64>, np: usize) -> Array2<f64> {
    let mut a = Array2::zeros(z.raw_dim());
    for (zr, mut ar) in z.rows().into_iter().zip(a.rows_mut()) {
        let zr = zr.as_slice().unwrap();
        let ar = ar.as_slice_mut().unwrap();
        for p in 0..np {
            let t = zr[p].tanh();
            let t1 = 1.0 - t * t;
            let t2 = -2.0 * t * t1;
            let g = [zr[np + p], zr[2 * np + p], zr[3 * np + p]];
            ar[p] = t;
            for d in 0..3 {
                ar[(1 + d) * np + p] = t1 * g[d];
            }
            for (k, &(i, j)) in HESS_PAIRS.iter().enumerate() {
                let c = (4 + k) * np + p;
                ar[c] = t1 * zr[c] + t2 * g[i] * g[j];
            }
        }
    }
    a
}

// Adjoint of `tanh_jet`: maps the adjoint of the activation to the adjoint of
// the pre-activation, in place.
fn tanh_jet_backward(
    z: ArrayView2<f64>,
    act: ArrayView2<f64>,
    mut adj: ArrayViewMut2<f64>,
    np: usize,
) {
    for ((zr, tr), mut ar) in z.rows().into_iter().zip(act.rows()).zip(adj.rows_mut()) {
        let zr = zr.as_slice().unwrap();
        let tr = tr.as_slice().unwrap();
        let ar = ar.as_slice_mut().unwrap();
        for p in 0..np {
            let t = tr[p];
            let t1 = 1.0 - t * t;
            let t2 = -2.0 * t * t1;
            let t3 = -2.0 * (t1 * t1 + t * t2);
            let g = [zr[np + p], zr[2 * np + p], zr[3 * np + p]];
            let av = ar[p];
            let ag = [ar[np + p], ar[2 * np + p], ar[3 * np + p]];

            let mut zv = t1 * av + t2 * (ag[0] * g[0] + ag[1] * g[1] + ag[2] * g[2]);
            let mut zg = [t1 * ag[0], t1 * ag[1], t1 * ag[2]];
            for (k, &(i, j)) in HESS_PAIRS.iter().enumerate() {
                let c = (4 + k) * np + p;
                let ah = ar[c];
                zv += ah * (t2 * zr[c] + t3 * g[i] * g[j]);
                zg[i] += t2 * ah * g[j];
                zg[j] += t2 * ah * g[i];
                ar[c] = t1 * ah;
            }
            ar[p] = zv;
            for d in 0..3 {
                ar[(1 + d) * np + p] = zg[d];
            }
        }
    }
}

fn batch_gradient(
    params: &MlpParams,
    pts: &[Vec3],
    offset: usize,
    objective: &dyn JetObjective,
) -> (f64, Vec<f64>) {
    let trace = JetTrace::forward(params, pts);
    let np = trace.np;
    let out = trace.output();

    let mut total = 0.0;
    let mut adj = Array2::zeros(out.raw_dim());
    for p in 0..np {
        let jet: [f64; PACKED_LEN] = std::array::from_fn(|c| out[[0, c * np + p]]);
        let (v, d) = objective.point_term(offset + p, &jet);
        total += v;
        for c in 0..PACKED_LEN {
            adj[[0, c * np + p]] = d[c];
        }
    }

    let n_layers = params.num_layers();
    let mut w_grads: Vec<Array2<f64>> = Vec::with_capacity(n_layers);
    let mut b_grads: Vec<Array1<f64>> = Vec::with_capacity(n_layers);
    for l in (0..n_layers).rev() {
        let input = &trace.inputs[l];
        let w = &params.weights[l];
        let mut wg = Array2::zeros(w.raw_dim());
        general_mat_mul(1.0, &adj, &input.t(), 0.0, &mut wg);
        let bg: Array1<f64> = adj.slice(s![.., ..np]).sum_axis(ndarray::Axis(1));
        w_grads.push(wg);
        b_grads.push(bg);
        if l > 0 {
            let mut prev = Array2::zeros(input.raw_dim());
            general_mat_mul(1.0, &w.t(), &adj, 0.0, &mut prev);
            tanh_jet_backward(trace.pre[l - 1].view(), input.view(), prev.view_mut(), np);
            adj = prev;
        }
    }

    let mut flat = Vec::with_capacity(params.num_params());
    for (wg, bg) in w_grads.iter().rev().zip(b_grads.iter().rev()) {
        flat.extend(wg.iter());
        flat.extend(bg.iter());
    }
    (total, flat)
}

/// Header and flat vector of a saved parameter snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSnapshot {
    pub layer_sizes: Vec<usize>,
    pub seed: u64,
    pub activation: String,
    pub params: Vec<f64>,
}

impl ParamSnapshot {
    pub fn new(params: &MlpParams, seed: u64) -> Self {
        Self {
            layer_sizes: params.layer_sizes.clone(),
            seed,
            activation: ACTIVATION.to_string(),
            params: params.to_flat(),
        }
    }

    pub fn to_params(&self) -> Result<MlpParams> {
        MlpParams::from_flat(&self.layer_sizes, &self.params)
    }
}
