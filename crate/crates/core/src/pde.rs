//! Surface operators assembled from Euclidean jets, manufactured problems and
//! the collocation loss.
//!
//! For a field `u` with Euclidean jet `(u, ∇u, ∇²u)` at a surface point with
//! normal `n` and curvature term `H_S`:
//!
//! ```text
//! ∇_S u = ∇u − n (nᵀ∇u)
//! Δ_S u = tr(∇²u) − H_S nᵀ∇u − nᵀ ∇²u n
//! ```
//!
//! and the problem operator is `a Δ_S u − b·∇_S u + c u`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Surface, SurfacePoint};
use crate::jet::{dot, mat_vec, Jet2, Vec3, HESS_PAIRS, PACKED_LEN};
use crate::net::{forward_jet, scalar_param_gradient, JetObjective, MlpParams};
use crate::sampling::PointSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemName {
    /// `a = 1`, `b = (1,1,1)`, `c = 5`, `u = sin x sin y sin z`.
    Example1,
    /// `a = 1`, `b = (1,1,1)`, `c = 1`, `u = sin x cos y sin z`.
    Example2,
}

impl std::str::FromStr for ProblemName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "example1" => Ok(ProblemName::Example1),
            "example2" => Ok(ProblemName::Example2),
            other => Err(Error::InvalidConfig(format!("unknown problem `{other}`"))),
        }
    }
}

/// Closed-form reference solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceField {
    SinSinSin,
    SinCosSin,
    Zero,
}

impl ReferenceField {
    pub fn jet(&self, p: Vec3) -> Jet2 {
        let [x, y, z] = Jet2::coordinates(p);
        match self {
            ReferenceField::SinSinSin => x.sin() * y.sin() * z.sin(),
            ReferenceField::SinCosSin => x.sin() * y.cos() * z.sin(),
            ReferenceField::Zero => Jet2::constant(0.0),
        }
    }

    pub fn value(&self, p: Vec3) -> f64 {
        let [x, y, z] = p;
        match self {
            ReferenceField::SinSinSin => x.sin() * y.sin() * z.sin(),
            ReferenceField::SinCosSin => x.sin() * y.cos() * z.sin(),
            ReferenceField::Zero => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdeProblem {
    pub a: f64,
    pub b: Vec3,
    pub c: f64,
    pub reference: ReferenceField,
    pub surface_name: String,
}

impl PdeProblem {
    pub fn new(a: f64, b: Vec3, c: f64, reference: ReferenceField, surface_name: &str) -> Result<Self> {
        if a == 0.0 {
            return Err(Error::InvalidConfig("the operator needs a != 0".into()));
        }
        Ok(Self {
            a,
            b,
            c,
            reference,
            surface_name: surface_name.to_string(),
        })
    }

    /// `a Δ_S u − b·∇_S u + c u` for the field whose jet is `jet`.
    pub fn operator(&self, jet: &Jet2, pt: &SurfacePoint) -> f64 {
        self.a * surface_laplacian(jet, pt) - dot(self.b, surface_gradient(jet, pt)) + self.c * jet.value
    }

    /// The right-hand side, obtained by applying the operator to the
    /// reference solution.
    pub fn forcing(&self, pt: &SurfacePoint) -> f64 {
        self.operator(&self.reference.jet(pt.position), pt)
    }

    /// Weights `w` such that `operator(jet, pt) = w · jet.packed()`.
    pub fn coefficients(&self, pt: &SurfacePoint) -> [f64; PACKED_LEN] {
        let n = pt.normal;
        let bn = dot(self.b, n);
        let mut w = [0.0; PACKED_LEN];
        w[0] = self.c;
        for d in 0..3 {
            w[1 + d] = -self.a * pt.mean_curv_sum * n[d] - self.b[d] + bn * n[d];
        }
        for (k, &(i, j)) in HESS_PAIRS.iter().enumerate() {
            w[4 + k] = if i == j {
                self.a * (1.0 - n[i] * n[i])
            } else {
                -2.0 * self.a * n[i] * n[j]
            };
        }
        w
    }
}

/// `∇_S u = ∇u − n (n·∇u)`.
pub fn surface_gradient(jet: &Jet2, pt: &SurfacePoint) -> Vec3 {
    let n = pt.normal;
    let dn = dot(n, jet.grad);
    [
        jet.grad[0] - dn * n[0],
        jet.grad[1] - dn * n[1],
        jet.grad[2] - dn * n[2],
    ]
}

/// `Δ_S u = Δu − H_S ∂_n u − ∂²_n u`.
pub fn surface_laplacian(jet: &Jet2, pt: &SurfacePoint) -> f64 {
    let n = pt.normal;
    jet.laplacian() - pt.mean_curv_sum * dot(n, jet.grad) - dot(n, mat_vec(&jet.hess, n))
}

pub fn residual(problem: &PdeProblem, jet: &Jet2, pt: &SurfacePoint) -> f64 {
    problem.operator(jet, pt) - problem.forcing(pt)
}

/// Mean squared residual of the network over the training points, evaluated
/// point by point through [`forward_jet`].
pub fn loss(problem: &PdeProblem, params: &MlpParams, training: &PointSet) -> Result<f64> {
    if training.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let mut sum = 0.0;
    for pt in &training.points {
        let r = residual(problem, &forward_jet(params, pt.position), pt);
        sum += r * r;
    }
    Ok(sum / training.len() as f64)
}

pub fn manufactured_problem(name: ProblemName, surface_name: &str) -> Result<PdeProblem> {
    Surface::by_name(surface_name)?;
    let (c, reference) = match name {
        ProblemName::Example1 => (5.0, ReferenceField::SinSinSin),
        ProblemName::Example2 => (1.0, ReferenceField::SinCosSin),
    };
    PdeProblem::new(1.0, [1.0, 1.0, 1.0], c, reference, surface_name)
}

/// The collocation loss with per-point operator weights and forcing values
/// precomputed, for use in training.
#[derive(Debug, Clone)]
pub struct CollocationLoss {
    positions: Vec<Vec3>,
    weights: Vec<[f64; PACKED_LEN]>,
    forcing: Vec<f64>,
}

impl CollocationLoss {
    pub fn new(problem: &PdeProblem, training: &PointSet) -> Result<Self> {
        if training.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        Ok(Self {
            positions: training.positions(),
            weights: training.points.iter().map(|p| problem.coefficients(p)).collect(),
            forcing: training.points.iter().map(|p| problem.forcing(p)).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn value_and_gradient(&self, params: &MlpParams) -> Result<(f64, Vec<f64>)> {
        scalar_param_gradient(params, &self.positions, self)
    }
}

impl JetObjective for CollocationLoss {
    fn point_term(&self, index: usize, jet: &[f64; PACKED_LEN]) -> (f64, [f64; PACKED_LEN]) {
        let w = &self.weights[index];
        let r = w.iter().zip(jet).map(|(a, b)| a * b).sum::<f64>() - self.forcing[index];
        let mut d = [0.0; PACKED_LEN];
        for c in 0..PACKED_LEN {
            d[c] = 2.0 * r * w[c];
        }
        (r * r, d)
    }
}
