//! Second-order jets of scalar fields on R³.
//!
//! A [`Jet2`] carries the value, gradient and Hessian of a scalar field at one
//! point. Arithmetic on jets applies the chain rule exactly, so closed-form
//! fields (level-set functions, manufactured solutions) written in terms of
//! jets yield exact first and second derivatives.

use std::ops::{Add, Mul, Neg, Sub};

/// Packed layout used when a jet enters or leaves a computation trace:
/// `[v, g0, g1, g2, h00, h01, h02, h11, h12, h22]`.
pub const PACKED_LEN: usize = 10;

/// Index pairs of the packed Hessian entries, in packed order.
pub const HESS_PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub grad: Vec3,
    /// Always symmetric: both triangles are written together.
    pub hess: Mat3,
}

impl Jet2 {
    pub fn constant(value: f64) -> Self {
        Self {
            value,
            grad: [0.0; 3],
            hess: [[0.0; 3]; 3],
        }
    }

    /// The coordinate field `x_axis` evaluated at `p`.
    pub fn coordinate(p: Vec3, axis: usize) -> Self {
        let mut grad = [0.0; 3];
        grad[axis] = 1.0;
        Self {
            value: p[axis],
            grad,
            hess: [[0.0; 3]; 3],
        }
    }

    /// The three coordinate jets `(x, y, z)` at `p`.
    pub fn coordinates(p: Vec3) -> [Self; 3] {
        [
            Self::coordinate(p, 0),
            Self::coordinate(p, 1),
            Self::coordinate(p, 2),
        ]
    }

    pub fn laplacian(&self) -> f64 {
        self.hess[0][0] + self.hess[1][1] + self.hess[2][2]
    }

    pub fn packed(&self) -> [f64; PACKED_LEN] {
        let mut out = [0.0; PACKED_LEN];
        out[0] = self.value;
        out[1..4].copy_from_slice(&self.grad);
        for (k, &(i, j)) in HESS_PAIRS.iter().enumerate() {
            out[4 + k] = self.hess[i][j];
        }
        out
    }

    pub fn from_packed(p: &[f64; PACKED_LEN]) -> Self {
        let mut hess = [[0.0; 3]; 3];
        for (k, &(i, j)) in HESS_PAIRS.iter().enumerate() {
            hess[i][j] = p[4 + k];
            hess[j][i] = p[4 + k];
        }
        Self {
            value: p[0],
            grad: [p[1], p[2], p[3]],
            hess,
        }
    }

    /// Composes a univariate function given its value and first two
    /// derivatives at `self.value`.
    pub fn compose(&self, f: f64, df: f64, d2f: f64) -> Self {
        let g = self.grad;
        let mut hess = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in i..3 {
                let h = df * self.hess[i][j] + d2f * g[i] * g[j];
                hess[i][j] = h;
                hess[j][i] = h;
            }
        }
        Self {
            value: f,
            grad: [df * g[0], df * g[1], df * g[2]],
            hess,
        }
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose(c, -s, -c)
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.compose(e, e, e)
    }

    pub fn tanh(&self) -> Self {
        let t = self.value.tanh();
        let dt = 1.0 - t * t;
        self.compose(t, dt, -2.0 * t * dt)
    }

    /// Square root; the caller guarantees a strictly positive value.
    pub fn sqrt(&self) -> Self {
        let r = self.value.sqrt();
        self.compose(r, 0.5 / r, -0.25 / (r * self.value))
    }

    pub fn square(&self) -> Self {
        *self * *self
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut hess = self.hess;
        hess.iter_mut().flatten().for_each(|h| *h *= k);
        Self {
            value: k * self.value,
            grad: [k * self.grad[0], k * self.grad[1], k * self.grad[2]],
            hess,
        }
    }

    pub fn offset(&self, k: f64) -> Self {
        Self {
            value: self.value + k,
            ..*self
        }
    }
}

impl Add for Jet2 {
    type Output = Jet2;

    fn add(self, rhs: Jet2) -> Jet2 {
        let mut hess = self.hess;
        for i in 0..3 {
            for j in 0..3 {
                hess[i][j] += rhs.hess[i][j];
            }
        }
        Jet2 {
            value: self.value + rhs.value,
            grad: [
                self.grad[0] + rhs.grad[0],
                self.grad[1] + rhs.grad[1],
                self.grad[2] + rhs.grad[2],
            ],
            hess,
        }
    }
}

impl Sub for Jet2 {
    type Output = Jet2;

    fn sub(self, rhs: Jet2) -> Jet2 {
        self + (-rhs)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;

    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;

    fn mul(self, rhs: Jet2) -> Jet2 {
        let (a, b) = (self, rhs);
        let mut hess = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in i..3 {
                let h = a.value * b.hess[i][j]
                    + b.value * a.hess[i][j]
                    + a.grad[i] * b.grad[j]
                    + a.grad[j] * b.grad[i];
                hess[i][j] = h;
                hess[j][i] = h;
            }
        }
        Jet2 {
            value: a.value * b.value,
            grad: [
                a.value * b.grad[0] + b.value * a.grad[0],
                a.value * b.grad[1] + b.value * a.grad[1],
                a.value * b.grad[2] + b.value * a.grad[2],
            ],
            hess,
        }
    }
}

impl From<f64> for Jet2 {
    fn from(v: f64) -> Self {
        Jet2::constant(v)
    }
}

pub(crate) fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn mat_vec(m: &Mat3, v: Vec3) -> Vec3 {
    [dot(m[0], v), dot(m[1], v), dot(m[2], v)]
}
