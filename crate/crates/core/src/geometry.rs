//! Closed surfaces in R³: implicit level sets `S(x) = 0` and parametric charts.
//!
//! Every surface point used by the solver carries its unit normal and the
//! curvature term `H_S` (sum of principal curvatures, positive on a sphere with
//! outward normal), which is all the surface operators need.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{cross, dot, norm, Jet2, Mat3, Vec3};

/// Level-set gradients at or below this norm are treated as singular.
pub const DEGENERATE_GRADIENT: f64 = 1e-8;
/// Charts with `|r_λ × r_θ|` at or below this are treated as singular.
pub const DEGENERATE_CHART: f64 = 1e-10;

/// Names accepted by [`Surface::by_name`].
pub const SURFACE_NAMES: [&str; 7] = [
    "sphere",
    "torus",
    "cdp",
    "bretzel2",
    "orthocircle",
    "rbc",
    "rbc_closed",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub position: Vec3,
    pub normal: Vec3,
    /// `H_S`, the sum of principal curvatures.
    pub mean_curv_sum: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LevelSetKind {
    /// `x² + y² + z² − r²`
    Sphere { radius: f64 },
    /// `z`; an unbounded flat sheet, used as a zero-curvature reference.
    Plane,
    /// `(1 − √(x²+y²))² + z² − 1/9`
    Torus,
    /// Product of distances to `(±1,0,0)`, `(0,±1,0)` minus 1.1.
    Cdp,
    /// `(x²(1−x²) − y²)² + z²/2 − 1/40`
    Bretzel2,
    /// Three orthogonal tori multiplied, minus `0.075²(1 + 3|x|²)`.
    Orthocircle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelSetSurface {
    pub name: String,
    pub kind: LevelSetKind,
    /// Axis-aligned sampling box, `[[xmin, xmax], [ymin, ymax], [zmin, zmax]]`.
    pub bounding_box: [[f64; 2]; 3],
}

impl LevelSetSurface {
    pub fn sphere(radius: f64) -> Self {
        let r = radius;
        Self {
            name: "sphere".into(),
            kind: LevelSetKind::Sphere { radius },
            bounding_box: [[-r, r], [-r, r], [-r, r]],
        }
    }

    pub fn plane() -> Self {
        Self {
            name: "plane".into(),
            kind: LevelSetKind::Plane,
            bounding_box: [[-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]],
        }
    }

    pub fn torus() -> Self {
        Self {
            name: "torus".into(),
            kind: LevelSetKind::Torus,
            bounding_box: [[-1.4, 1.4], [-1.4, 1.4], [-0.4, 0.4]],
        }
    }

    pub fn cdp() -> Self {
        Self {
            name: "cdp".into(),
            kind: LevelSetKind::Cdp,
            bounding_box: [[-1.6, 1.6], [-1.6, 1.6], [-1.6, 1.6]],
        }
    }

    pub fn bretzel2() -> Self {
        Self {
            name: "bretzel2".into(),
            kind: LevelSetKind::Bretzel2,
            bounding_box: [[-1.2, 1.2], [-1.2, 1.2], [-0.35, 0.35]],
        }
    }

    pub fn orthocircle() -> Self {
        Self {
            name: "orthocircle".into(),
            kind: LevelSetKind::Orthocircle,
            bounding_box: [[-1.2, 1.2], [-1.2, 1.2], [-1.2, 1.2]],
        }
    }

    /// Value, gradient and Hessian of `S` at `p`.
    pub fn jet(&self, p: Vec3) -> Jet2 {
        let [x, y, z] = Jet2::coordinates(p);
        match self.kind {
            LevelSetKind::Sphere { radius } => {
                (x.square() + y.square() + z.square()).offset(-radius * radius)
            }
            LevelSetKind::Plane => z,
            LevelSetKind::Torus => torus_jet(p),
            LevelSetKind::Cdp => {
                let centers = [
                    [1.0, 0.0, 0.0],
                    [-1.0, 0.0, 0.0],
                    [0.0, 1.0, 0.0],
                    [0.0, -1.0, 0.0],
                ];
                centers
                    .iter()
                    .map(|c| {
                        ((x.offset(-c[0])).square()
                            + (y.offset(-c[1])).square()
                            + (z.offset(-c[2])).square())
                        .sqrt()
                    })
                    .fold(Jet2::constant(1.0), |acc, d| acc * d)
                    .offset(-1.1)
            }
            LevelSetKind::Bretzel2 => {
                let x2 = x.square();
                let inner = x2 * x2.scale(-1.0).offset(1.0) - y.square();
                (inner.square() + z.square().scale(0.5)).offset(-1.0 / 40.0)
            }
            LevelSetKind::Orthocircle => {
                let (x2, y2, z2) = (x.square(), y.square(), z.square());
                let ring = |a: Jet2, b: Jet2, c: Jet2| (a + b).offset(-1.0).square() + c;
                let product = ring(x2, y2, z2) * ring(y2, z2, x2) * ring(z2, x2, y2);
                let r2 = x2 + y2 + z2;
                product - r2.scale(3.0).offset(1.0).scale(0.075 * 0.075)
            }
        }
    }

    pub fn eval(&self, p: Vec3) -> f64 {
        self.jet(p).value
    }

    pub fn grad(&self, p: Vec3) -> Vec3 {
        self.jet(p).grad
    }

    pub fn hess(&self, p: Vec3) -> Mat3 {
        self.jet(p).hess
    }

    /// Builds the full collocation record for a point on (or near) the surface.
    pub fn surface_point(&self, p: Vec3) -> Result<SurfacePoint> {
        let jet = self.jet(p);
        let (normal, grad_norm) = unit_gradient(&jet, p)?;
        Ok(SurfacePoint {
            position: p,
            normal,
            mean_curv_sum: curvature_from_jet(&jet, normal, grad_norm),
        })
    }
}

// The torus level set is singular on the z-axis, so it is written with an
// explicit cylindrical radius instead of a jet square root of x² + y².
fn torus_jet(p: Vec3) -> Jet2 {
    let [x, y, z] = p;
    let rho = (x * x + y * y).sqrt();
    let k = 1.0 - 1.0 / rho;
    let rho3 = rho * rho * rho;
    let mut hess = [[0.0; 3]; 3];
    hess[0][0] = 2.0 * k + 2.0 * x * x / rho3;
    hess[1][1] = 2.0 * k + 2.0 * y * y / rho3;
    hess[0][1] = 2.0 * x * y / rho3;
    hess[1][0] = hess[0][1];
    hess[2][2] = 2.0;
    Jet2 {
        value: (1.0 - rho).powi(2) + z * z - 1.0 / 9.0,
        grad: [2.0 * x * k, 2.0 * y * k, 2.0 * z],
        hess,
    }
}

fn unit_gradient(jet: &Jet2, p: Vec3) -> Result<(Vec3, f64)> {
    let g = jet.grad;
    let n = norm(g);
    if !(n > DEGENERATE_GRADIENT) {
        return Err(Error::DegenerateGradient { point: p, norm: n });
    }
    Ok(([g[0] / n, g[1] / n, g[2] / n], n))
}

// H_S = trace((I − nnᵀ) Hess S) / |∇S|
fn curvature_from_jet(jet: &Jet2, n: Vec3, grad_norm: f64) -> f64 {
    let h = &jet.hess;
    let trace = h[0][0] + h[1][1] + h[2][2];
    let nhn = dot(n, crate::jet::mat_vec(h, n));
    (trace - nhn) / grad_norm
}

/// Unit normal `∇S/|∇S|`, pointing towards increasing `S`.
pub fn normal_at(surface: &LevelSetSurface, p: Vec3) -> Result<Vec3> {
    let jet = surface.jet(p);
    unit_gradient(&jet, p).map(|(n, _)| n)
}

/// Tangent-space projector `I − nnᵀ`.
pub fn projection_matrix(n: Vec3) -> Mat3 {
    let mut p = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            p[i][j] = if i == j { 1.0 } else { 0.0 } - n[i] * n[j];
        }
    }
    p
}

/// The curvature term `H_S = trace(J(n)(I − nnᵀ))` for the normalized
/// gradient field, evaluated as `trace((I − nnᵀ) Hess S) / |∇S|`.
pub fn curvature_term(surface: &LevelSetSurface, p: Vec3) -> Result<f64> {
    let jet = surface.jet(p);
    let (n, g) = unit_gradient(&jet, p)?;
    Ok(curvature_from_jet(&jet, n, g))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChartKind {
    /// `(cos λ cos θ, sin λ cos θ, sin θ)`
    UnitSphere,
    /// Red blood cell chart:
    /// `x = 1.15 cos λ cos θ`, `y = 1.15 sin λ cos θ`,
    /// `z = 0.5 sin λ (0.24 + 2.3 cos²θ − 1.3 cos⁴θ)`.
    RedBloodCell,
    /// The closed biconcave disc with `sin θ` in place of `sin λ` in `z`.
    RedBloodCellClosed,
}

/// First and second partial derivatives of a chart.
#[derive(Debug, Clone, Copy)]
pub struct ChartDerivatives {
    pub position: Vec3,
    pub d_lambda: Vec3,
    pub d_theta: Vec3,
    pub d_lambda_lambda: Vec3,
    pub d_lambda_theta: Vec3,
    pub d_theta_theta: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParametricSurface {
    pub name: String,
    pub kind: ChartKind,
    /// `[[λmin, λmax], [θmin, θmax]]`
    pub domain: [[f64; 2]; 2],
    /// Parameter values where the first partials are parallel. `None` matches
    /// any value of that coordinate.
    pub degenerate: Vec<(Option<f64>, Option<f64>)>,
    /// Normals are `orientation · (r_λ × r_θ)/|r_λ × r_θ|`.
    pub orientation: f64,
}

impl ParametricSurface {
    pub fn unit_sphere_chart() -> Self {
        let mut s = Self {
            name: "sphere_chart".into(),
            kind: ChartKind::UnitSphere,
            domain: [[-PI, PI], [-FRAC_PI_2, FRAC_PI_2]],
            degenerate: vec![(None, Some(-FRAC_PI_2)), (None, Some(FRAC_PI_2))],
            orientation: 1.0,
        };
        s.orient_at(0.0, 0.0);
        s
    }

    pub fn rbc() -> Self {
        let mut s = Self {
            name: "rbc".into(),
            kind: ChartKind::RedBloodCell,
            domain: [[-PI, PI], [-FRAC_PI_2, FRAC_PI_2]],
            // r_θ vanishes along θ = 0; r_λ vanishes at the poles with cos λ = 0.
            degenerate: vec![
                (None, Some(0.0)),
                (Some(-FRAC_PI_2), Some(-FRAC_PI_2)),
                (Some(-FRAC_PI_2), Some(FRAC_PI_2)),
                (Some(FRAC_PI_2), Some(-FRAC_PI_2)),
                (Some(FRAC_PI_2), Some(FRAC_PI_2)),
            ],
            orientation: 1.0,
        };
        // At λ = 0 the normal is orthogonal to the position vector, so the
        // reference is taken off that meridian.
        s.orient_at(FRAC_PI_2, PI / 4.0);
        s
    }

    pub fn rbc_closed() -> Self {
        let mut s = Self {
            name: "rbc_closed".into(),
            kind: ChartKind::RedBloodCellClosed,
            domain: [[-PI, PI], [-FRAC_PI_2, FRAC_PI_2]],
            degenerate: vec![(None, Some(-FRAC_PI_2)), (None, Some(FRAC_PI_2))],
            orientation: 1.0,
        };
        s.orient_at(0.0, 0.0);
        s
    }

    // Fixes the orientation so the normal at the reference parameters points
    // away from the origin.
    fn orient_at(&mut self, lambda: f64, theta: f64) {
        let d = self.derivatives(lambda, theta);
        let c = cross(d.d_lambda, d.d_theta);
        self.orientation = if dot(c, d.position) >= 0.0 { 1.0 } else { -1.0 };
    }

    pub fn chart(&self, lambda: f64, theta: f64) -> Vec3 {
        self.derivatives(lambda, theta).position
    }

    pub fn first_partials(&self, lambda: f64, theta: f64) -> (Vec3, Vec3) {
        let d = self.derivatives(lambda, theta);
        (d.d_lambda, d.d_theta)
    }

    pub fn second_partials(&self, lambda: f64, theta: f64) -> (Vec3, Vec3, Vec3) {
        let d = self.derivatives(lambda, theta);
        (d.d_lambda_lambda, d.d_lambda_theta, d.d_theta_theta)
    }

    pub fn is_listed_degenerate(&self, lambda: f64, theta: f64) -> bool {
        let close = |v: f64, target: Option<f64>| target.is_none_or(|t| (v - t).abs() < 1e-12);
        self.degenerate
            .iter()
            .any(|&(l, t)| close(lambda, l) && close(theta, t))
    }

    pub fn derivatives(&self, lambda: f64, theta: f64) -> ChartDerivatives {
        let (sl, cl) = lambda.sin_cos();
        let (st, ct) = theta.sin_cos();
        match self.kind {
            ChartKind::UnitSphere => ChartDerivatives {
                position: [cl * ct, sl * ct, st],
                d_lambda: [-sl * ct, cl * ct, 0.0],
                d_theta: [-cl * st, -sl * st, ct],
                d_lambda_lambda: [-cl * ct, -sl * ct, 0.0],
                d_lambda_theta: [sl * st, -cl * st, 0.0],
                d_theta_theta: [-cl * ct, -sl * ct, -st],
            },
            ChartKind::RedBloodCell | ChartKind::RedBloodCellClosed => {
                let a = 1.15;
                let c2 = ct * ct;
                let g = 0.24 + 2.3 * c2 - 1.3 * c2 * c2;
                let dg = st * ct * (-4.6 + 5.2 * c2);
                let d2g = (c2 - st * st) * (-4.6 + 5.2 * c2) - 10.4 * c2 * st * st;
                let (z, z_l, z_t, z_ll, z_lt, z_tt) = if self.kind == ChartKind::RedBloodCell {
                    (sl * g, cl * g, sl * dg, -sl * g, cl * dg, sl * d2g)
                } else {
                    (st * g, 0.0, ct * g + st * dg, 0.0, 0.0, -st * g + 2.0 * ct * dg + st * d2g)
                };
                ChartDerivatives {
                    position: [a * cl * ct, a * sl * ct, 0.5 * z],
                    d_lambda: [-a * sl * ct, a * cl * ct, 0.5 * z_l],
                    d_theta: [-a * cl * st, -a * sl * st, 0.5 * z_t],
                    d_lambda_lambda: [-a * cl * ct, -a * sl * ct, 0.5 * z_ll],
                    d_lambda_theta: [a * sl * st, -a * cl * st, 0.5 * z_lt],
                    d_theta_theta: [-a * cl * ct, -a * sl * ct, 0.5 * z_tt],
                }
            }
        }
    }
}

/// Position, oriented normal and `H_S` from the fundamental forms of the chart.
pub fn parametric_point(surface: &ParametricSurface, lambda: f64, theta: f64) -> Result<SurfacePoint> {
    let d = surface.derivatives(lambda, theta);
    let c = cross(d.d_lambda, d.d_theta);
    let len = norm(c);
    if !(len > DEGENERATE_CHART) {
        return Err(Error::DegenerateChart { lambda, theta });
    }
    let s = surface.orientation / len;
    let n = [c[0] * s, c[1] * s, c[2] * s];
    let (e1, f1, g1) = (
        dot(d.d_lambda, d.d_lambda),
        dot(d.d_lambda, d.d_theta),
        dot(d.d_theta, d.d_theta),
    );
    let (e2, f2, g2) = (
        dot(d.d_lambda_lambda, n),
        dot(d.d_lambda_theta, n),
        dot(d.d_theta_theta, n),
    );
    // Sign chosen so that H_S = div n, i.e. +2 on the outward unit sphere.
    let h = -(e2 * g1 - 2.0 * f2 * f1 + g2 * e1) / (e1 * g1 - f1 * f1);
    Ok(SurfacePoint {
        position: d.position,
        normal: n,
        mean_curv_sum: h,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Surface {
    LevelSet(LevelSetSurface),
    Parametric(ParametricSurface),
}

impl Surface {
    pub fn by_name(name: &str) -> Result<Self> {
        Ok(match name {
            "sphere" => Surface::LevelSet(LevelSetSurface::sphere(1.0)),
            "torus" => Surface::LevelSet(LevelSetSurface::torus()),
            "cdp" => Surface::LevelSet(LevelSetSurface::cdp()),
            "bretzel2" => Surface::LevelSet(LevelSetSurface::bretzel2()),
            "orthocircle" => Surface::LevelSet(LevelSetSurface::orthocircle()),
            "rbc" => Surface::Parametric(ParametricSurface::rbc()),
            "rbc_closed" => Surface::Parametric(ParametricSurface::rbc_closed()),
            other => return Err(Error::UnknownSurface(other.to_string())),
        })
    }

    pub fn name(&self) -> &str {
        match self {
            Surface::LevelSet(s) => &s.name,
            Surface::Parametric(s) => &s.name,
        }
    }

    pub fn as_level_set(&self) -> Result<&LevelSetSurface> {
        match self {
            Surface::LevelSet(s) => Ok(s),
            Surface::Parametric(s) => Err(Error::NotLevelSet(s.name.clone())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Vec3, b: Vec3, tol: f64) -> bool {
        (0..3).all(|i| (a[i] - b[i]).abs() < tol)
    }

    #[test]
    fn sphere_normals() {
        let s = LevelSetSurface::sphere(1.0);
        assert_eq!(normal_at(&s, [0.0, 0.0, 1.0]).unwrap(), [0.0, 0.0, 1.0]);
        let p = [0.48, -0.6, 0.64];
        assert!(close(normal_at(&s, p).unwrap(), p, 1e-15));
    }

    #[test]
    fn torus_outer_equator() {
        let t = LevelSetSurface::torus();
        let p = [4.0 / 3.0, 0.0, 0.0];
        assert!(t.eval(p).abs() < 1e-15);
        assert!(close(normal_at(&t, p).unwrap(), [1.0, 0.0, 0.0], 1e-15));
        assert!((curvature_term(&t, p).unwrap() - 3.75).abs() < 1e-12);
    }

    #[test]
    fn flat_plane_has_zero_curvature() {
        let s = LevelSetSurface::plane();
        for p in [[0.0, 0.0, 0.0], [0.3, -2.0, 0.0], [5.0, 1.0, 0.0]] {
            assert_eq!(curvature_term(&s, p).unwrap(), 0.0);
        }
    }

    #[test]
    fn degenerate_gradient_is_rejected() {
        let s = LevelSetSurface::sphere(1.0);
        assert!(matches!(
            normal_at(&s, [0.0, 0.0, 0.0]),
            Err(Error::DegenerateGradient { .. })
        ));
        assert!(curvature_term(&s, [1e-10, 0.0, 0.0]).is_err());
    }

    #[test]
    fn projection_of_pole() {
        let p = projection_matrix([0.0, 0.0, 1.0]);
        assert_eq!(p, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]]);
    }

    #[test]
    fn projection_on_sphere_matches_closed_form() {
        let [x, y, z] = [0.36, 0.48, 0.8];
        let expected = [
            [1.0 - x * x, -x * y, -x * z],
            [-x * y, 1.0 - y * y, -y * z],
            [-x * z, -y * z, 1.0 - z * z],
        ];
        let p = projection_matrix([x, y, z]);
        for i in 0..3 {
            assert!(close(p[i], expected[i], 1e-15));
        }
    }

    #[test]
    fn sphere_chart_matches_level_set() {
        let chart = ParametricSurface::unit_sphere_chart();
        let sp = parametric_point(&chart, 0.0, 0.0).unwrap();
        assert!(close(sp.position, [1.0, 0.0, 0.0], 1e-15));
        assert!(close(sp.normal, [1.0, 0.0, 0.0], 1e-15));
        assert!((sp.mean_curv_sum - 2.0).abs() < 1e-12);

        let ls = LevelSetSurface::sphere(1.0);
        for &(l, t) in &[(0.3, 0.2), (-2.0, 1.1), (3.0, -0.7)] {
            let sp = parametric_point(&chart, l, t).unwrap();
            let n = normal_at(&ls, sp.position).unwrap();
            assert!(close(sp.normal, n, 1e-8));
            assert!((sp.mean_curv_sum - 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn rbc_chart_values() {
        let rbc = ParametricSurface::rbc();
        assert!(close(rbc.chart(0.0, 0.0), [1.15, 0.0, 0.0], 1e-15));
        let p = rbc.chart(FRAC_PI_2, 0.0);
        assert!(close(p, [0.0, 1.15, 0.5 * (0.24 + 2.3 - 1.3)], 1e-12));
        assert!((p[2] - 0.62).abs() < 1e-12);
    }

    #[test]
    fn rbc_fold_is_degenerate() {
        let rbc = ParametricSurface::rbc();
        assert!(rbc.is_listed_degenerate(0.4, 0.0));
        assert!(matches!(
            parametric_point(&rbc, 0.4, 0.0),
            Err(Error::DegenerateChart { .. })
        ));
        assert!(parametric_point(&rbc, 0.4, 0.3).is_ok());
    }

    #[test]
    fn registry() {
        for name in SURFACE_NAMES {
            assert_eq!(Surface::by_name(name).unwrap().name(), name);
        }
        assert!(matches!(
            Surface::by_name("klein"),
            Err(Error::UnknownSurface(_))
        ));
        assert!(Surface::by_name("rbc").unwrap().as_level_set().is_err());
    }
}
