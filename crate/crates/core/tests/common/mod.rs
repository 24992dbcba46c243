//! Oracles shared by the integration tests: hand-differentiated fields,
//! Cartesian closed forms on the unit sphere and finite differences.

#![allow(dead_code)]

use surface_pinn::geometry::SurfacePoint;
use surface_pinn::jet::Jet2;
use surface_pinn::pde::PdeProblem;

pub type V = [f64; 3];
pub type M = [[f64; 3]; 3];

/// Hand-differentiated test fields: value, gradient, Hessian.
pub fn field(k: usize, p: V) -> (f64, V, M) {
    let [x, y, z] = p;
    match k {
        0 => (x, [1.0, 0.0, 0.0], [[0.0; 3]; 3]),
        1 => (z * z, [0.0, 0.0, 2.0 * z], [[0.0; 3], [0.0; 3], [0.0, 0.0, 2.0]]),
        2 => {
            let (sx, cx, sy, cy, sz, cz) = (x.sin(), x.cos(), y.sin(), y.cos(), z.sin(), z.cos());
            let u = sx * sy * sz;
            (
                u,
                [cx * sy * sz, sx * cy * sz, sx * sy * cz],
                [
                    [-u, cx * cy * sz, cx * sy * cz],
                    [cx * cy * sz, -u, sx * cy * cz],
                    [cx * sy * cz, sx * cy * cz, -u],
                ],
            )
        }
        3 => (x * y * z, [y * z, x * z, x * y], [[0.0, z, y], [z, 0.0, x], [y, x, 0.0]]),
        4 => {
            let e = x.exp();
            (e, [e, 0.0, 0.0], [[e, 0.0, 0.0], [0.0; 3], [0.0; 3]])
        }
        _ => unreachable!(),
    }
}

/// The same fields through jet arithmetic.
pub fn field_jet(k: usize, p: V) -> Jet2 {
    let [x, y, z] = Jet2::coordinates(p);
    match k {
        0 => x,
        1 => z.square(),
        2 => x.sin() * y.sin() * z.sin(),
        3 => x * y * z,
        4 => x.exp(),
        _ => unreachable!(),
    }
}

/// Cartesian closed forms on the unit sphere.
pub fn sphere_gradient(p: V, g: V) -> V {
    let [x, y, z] = p;
    let m = [
        [1.0 - x * x, -x * y, -x * z],
        [-x * y, 1.0 - y * y, -y * z],
        [-x * z, -y * z, 1.0 - z * z],
    ];
    std::array::from_fn(|i| (0..3).map(|j| m[i][j] * g[j]).sum())
}

pub fn sphere_laplacian(p: V, g: V, h: M) -> f64 {
    let [x, y, z] = p;
    (1.0 - x * x) * h[0][0] + (1.0 - y * y) * h[1][1] + (1.0 - z * z) * h[2][2]
        - 2.0 * x * y * h[0][1]
        - 2.0 * x * z * h[0][2]
        - 2.0 * y * z * h[1][2]
        - 2.0 * x * g[0]
        - 2.0 * y * g[1]
        - 2.0 * z * g[2]
}

pub fn dot(a: V, b: V) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Fourth-order central differences of a scalar function.
pub struct Fd<F: Fn(V) -> f64> {
    pub f: F,
    pub h: f64,
}

impl<F: Fn(V) -> f64> Fd<F> {
    pub fn d1(&self, g: &dyn Fn(V) -> f64, p: V, i: usize) -> f64 {
        let s = |t: f64| {
            let mut q = p;
            q[i] += t * self.h;
            g(q)
        };
        (-s(2.0) + 8.0 * s(1.0) - 8.0 * s(-1.0) + s(-2.0)) / (12.0 * self.h)
    }

    pub fn jet(&self, p: V) -> (f64, V, M) {
        let f = &self.f;
        let g: V = std::array::from_fn(|i| self.d1(f, p, i));
        let mut h = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                h[i][j] = self.d1(&|q| self.d1(f, q, j), p, i);
            }
        }
        (f(p), g, h)
    }
}


pub fn rel(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

pub fn at(x: V, i: usize, h: f64) -> V {
    let mut y = x;
    y[i] += h;
    y
}

/// The problem operator applied to a jet given as plain arrays.
pub fn fd_operator(problem: &PdeProblem, jet: (f64, V, M), pt: &SurfacePoint) -> f64 {
    let (u, g, h) = jet;
    let n = pt.normal;
    let dn = dot(n, g);
    let hn: V = std::array::from_fn(|i| dot(h[i], n));
    let lap = h[0][0] + h[1][1] + h[2][2] - pt.mean_curv_sum * dn - dot(n, hn);
    let tangential: V = std::array::from_fn(|i| g[i] - dn * n[i]);
    problem.a * lap - dot(problem.b, tangential) + problem.c * u
}
