use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;

use surface_pinn::geometry::{
    curvature_term, normal_at, parametric_point, projection_matrix, LevelSetSurface, ParametricSurface,
};
use surface_pinn::sampling::{minimum_energy_points, random_surface_points};

type V = [f64; 3];

fn level_sets() -> Vec<LevelSetSurface> {
    vec![
        LevelSetSurface::sphere(1.0),
        LevelSetSurface::torus(),
        LevelSetSurface::cdp(),
        LevelSetSurface::bretzel2(),
        LevelSetSurface::orthocircle(),
    ]
}

fn at(x: V, i: usize, h: f64) -> V {
    let mut y = x;
    y[i] += h;
    y
}

fn unit(v: V) -> V {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn dot(a: V, b: V) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: V, b: V) -> V {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn rel(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

#[test]
fn projection_is_idempotent_and_symmetric_everywhere() {
    for s in level_sets() {
        let pts = random_surface_points(&s, 1000, 17).unwrap();
        for p in &pts.points {
            let m = projection_matrix(p.normal);
            let mut worst: f64 = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    let sq: f64 = (0..3).map(|k| m[i][k] * m[k][j]).sum();
                    worst = worst.max((sq - m[i][j]).abs());
                    assert_eq!(m[i][j], m[j][i]);
                }
            }
            assert!(worst < 1e-13, "{}: {worst}", s.name);
            assert!((dot(p.normal, p.normal) - 1.0).abs() < 1e-12);
            assert!(s.eval(p.position).abs() < 1e-10);
        }
    }
}

#[test]
fn sphere_projection_matches_closed_form() {
    let s = LevelSetSurface::sphere(1.0);
    for p in random_surface_points(&s, 50, 3).unwrap().points {
        let [x, y, z] = p.position;
        let closed = [
            [1.0 - x * x, -x * y, -x * z],
            [-x * y, 1.0 - y * y, -y * z],
            [-x * z, -y * z, 1.0 - z * z],
        ];
        let m = projection_matrix(p.normal);
        for i in 0..3 {
            for j in 0..3 {
                assert!((m[i][j] - closed[i][j]).abs() < 1e-14);
            }
        }
    }
}

#[test]
fn named_normals_and_curvatures() {
    let torus = LevelSetSurface::torus();
    let n = normal_at(&torus, [4.0 / 3.0, 0.0, 0.0]).unwrap();
    assert!(rel(&n, &[1.0, 0.0, 0.0]) < 1e-14);
    // Principal curvatures 3 (tube) and 3/4 (ring) at the outer equator.
    assert!((curvature_term(&torus, [4.0 / 3.0, 0.0, 0.0]).unwrap() - 3.75).abs() < 1e-6);
    assert_eq!(curvature_term(&LevelSetSurface::plane(), [0.3, -2.0, 0.0]).unwrap(), 0.0);
    assert_eq!(normal_at(&LevelSetSurface::sphere(1.0), [0.0, 0.0, 1.0]).unwrap(), [0.0, 0.0, 1.0]);
}

#[test]
fn scaled_spheres_have_curvature_two_over_r() {
    for r in [0.5, 1.0, 2.0] {
        let s = LevelSetSurface::sphere(r);
        for p in random_surface_points(&s, 200, 6).unwrap().points {
            assert!((p.mean_curv_sum - 2.0 / r).abs() < 1e-8);
        }
    }
}

/// `div(∇S/|∇S|)` by central differences of the normalized gradient.
fn fd_divergence(s: &LevelSetSurface, p: V, h: f64) -> f64 {
    (0..3)
        .map(|i| (unit(s.grad(at(p, i, h)))[i] - unit(s.grad(at(p, i, -h)))[i]) / (2.0 * h))
        .sum()
}

#[test]
fn curvature_matches_divergence_of_normal_field() {
    for s in level_sets() {
        for p in random_surface_points(&s, 100, 29).unwrap().points {
            let fd = fd_divergence(&s, p.position, 1e-5);
            let h = curvature_term(&s, p.position).unwrap();
            assert!(
                (h - fd).abs() <= 1e-4 * fd.abs().max(1.0),
                "{} at {:?}: {h} vs {fd}",
                s.name,
                p.position
            );
        }
    }
}

#[test]
fn level_set_derivatives_match_finite_differences() {
    let h = 1e-4;
    for s in level_sets() {
        let mut pts: Vec<V> = random_surface_points(&s, 60, 8)
            .unwrap()
            .points
            .iter()
            .map(|p| p.position)
            .collect();
        // Off-surface points as well.
        pts.extend(pts.clone().iter().map(|p| [p[0] * 0.9, p[1] * 1.05, p[2] * 0.8 + 0.01]));
        for p in pts {
            let g = s.grad(p);
            if dot(g, g).sqrt() <= 1e-8 {
                continue;
            }
            let f = |x| s.eval(x);
            let fd_g: Vec<f64> = (0..3).map(|i| (f(at(p, i, h)) - f(at(p, i, -h))) / (2.0 * h)).collect();
            assert!(rel(&g, &fd_g) < 1e-6, "{} grad at {p:?}", s.name);

            let hs = s.hess(p);
            let mut ana = Vec::new();
            let mut fd_h = Vec::new();
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(hs[i][j], hs[j][i]);
                    ana.push(hs[i][j]);
                    fd_h.push(if i == j {
                        (f(at(p, i, h)) - 2.0 * f(p) + f(at(p, i, -h))) / (h * h)
                    } else {
                        (f(at(at(p, i, h), j, h)) - f(at(at(p, i, h), j, -h)) - f(at(at(p, i, -h), j, h))
                            + f(at(at(p, i, -h), j, -h)))
                            / (4.0 * h * h)
                    });
                }
            }
            assert!(rel(&ana, &fd_h) < 1e-6, "{} hess at {p:?}: {}", s.name, rel(&ana, &fd_h));
        }
    }
}

#[test]
fn bounding_boxes_contain_sampled_points() {
    for s in level_sets() {
        let mut pts = random_surface_points(&s, 2000, 1).unwrap().points;
        pts.extend(minimum_energy_points(&s, 300, 2, 10).unwrap().points);
        for p in pts {
            for d in 0..3 {
                let [lo, hi] = s.bounding_box[d];
                assert!(p.position[d] >= lo && p.position[d] <= hi, "{} {:?}", s.name, p.position);
            }
        }
    }
}

#[test]
fn sphere_chart_agrees_with_level_set() {
    let chart = ParametricSurface::unit_sphere_chart();
    let level = LevelSetSurface::sphere(1.0);
    let p = parametric_point(&chart, 0.0, 0.0).unwrap();
    assert!(rel(&p.position, &[1.0, 0.0, 0.0]) < 1e-15);
    assert!(rel(&p.normal, &[1.0, 0.0, 0.0]) < 1e-15);
    assert!((p.mean_curv_sum - 2.0).abs() < 1e-12);
    for (l, t) in [(0.3, 0.2), (-2.0, 1.1), (3.0, -0.7), (1.0, -1.4)] {
        let a = parametric_point(&chart, l, t).unwrap();
        let b = level.surface_point(a.position).unwrap();
        assert!(rel(&a.normal, &b.normal) < 1e-8);
        assert!((a.mean_curv_sum - b.mean_curv_sum).abs() < 1e-8);
    }
}

#[test]
fn rbc_named_points() {
    let rbc = ParametricSurface::rbc();
    let p = rbc.chart(0.0, 0.0);
    assert!(rel(&p, &[1.15, 0.0, 0.0]) < 1e-15);
    let q = rbc.chart(FRAC_PI_2, 0.0);
    let z = 0.5 * 1.0 * (0.24 + 2.3 - 1.3);
    assert!((q[0]).abs() < 1e-15 && (q[1] - 1.15).abs() < 1e-15 && (q[2] - z).abs() < 1e-15);
    assert!((z - 0.62).abs() < 1e-15);
    assert!(rbc.is_listed_degenerate(0.7, 0.0));
    assert!(parametric_point(&rbc, 0.7, 0.0).is_err());
}

/// `H_S = Σ gⁱʲ ⟨∂ᵢn, ∂ⱼr⟩` with the normal differentiated numerically.
fn rbc_fd_curvature(s: &ParametricSurface, l: f64, t: f64) -> f64 {
    let h = 1e-6;
    let n = |l, t| parametric_point(s, l, t).unwrap().normal;
    let dn_l: Vec<f64> = (0..3).map(|i| (n(l + h, t)[i] - n(l - h, t)[i]) / (2.0 * h)).collect();
    let dn_t: Vec<f64> = (0..3).map(|i| (n(l, t + h)[i] - n(l, t - h)[i]) / (2.0 * h)).collect();
    let (rl, rt) = s.first_partials(l, t);
    let dn_l = [dn_l[0], dn_l[1], dn_l[2]];
    let dn_t = [dn_t[0], dn_t[1], dn_t[2]];
    let (e, f, g) = (dot(rl, rl), dot(rl, rt), dot(rt, rt));
    let det = e * g - f * f;
    (g * dot(dn_l, rl) - f * (dot(dn_l, rt) + dot(dn_t, rl)) + e * dot(dn_t, rt)) / det
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn projection_annihilates_normal(x in -1.0..1.0f64, y in -1.0..1.0f64, z in -1.0..1.0f64) {
        prop_assume!(x * x + y * y + z * z > 1e-4);
        let n = unit([x, y, z]);
        let m = projection_matrix(n);
        for row in m {
            prop_assert!(dot(row, n).abs() < 1e-15);
        }
    }

    #[test]
    fn rbc_partials_match_finite_differences(l in -PI..PI, t in -1.5..1.5f64, closed: bool) {
        let s = if closed { ParametricSurface::rbc_closed() } else { ParametricSurface::rbc() };
        let h = 1e-5;
        let d = s.derivatives(l, t);
        let c = |l, t| s.chart(l, t);
        let cd = |a: V, b: V| -> Vec<f64> { (0..3).map(|i| (a[i] - b[i]) / (2.0 * h)).collect() };
        let fd_l = cd(c(l + h, t), c(l - h, t));
        let fd_t = cd(c(l, t + h), c(l, t - h));
        let scale = (dot(d.d_lambda, d.d_lambda) + dot(d.d_theta, d.d_theta)).sqrt();
        let err = |a: V, b: &[f64]| (0..3).map(|i| (a[i] - b[i]).powi(2)).sum::<f64>().sqrt() / scale;
        prop_assert!(err(d.d_lambda, &fd_l) < 1e-6);
        prop_assert!(err(d.d_theta, &fd_t) < 1e-6);

        let (rl_p, rt_p) = s.first_partials(l, t + h);
        let (rl_m, rt_m) = s.first_partials(l, t - h);
        let (rl_pl, _) = s.first_partials(l + h, t);
        let (rl_ml, _) = s.first_partials(l - h, t);
        let second = [
            (d.d_lambda_lambda, cd(rl_pl, rl_ml)),
            (d.d_lambda_theta, cd(rl_p, rl_m)),
            (d.d_theta_theta, cd(rt_p, rt_m)),
        ];
        for (ana, fd) in second {
            prop_assert!(err(ana, &fd) < 1e-6);
        }
    }

    #[test]
    fn rbc_curvature_matches_normal_divergence(l in -PI..PI, t in -1.5..1.5f64, closed: bool) {
        let s = if closed { ParametricSurface::rbc_closed() } else { ParametricSurface::rbc() };
        prop_assume!(t.abs() > 0.05 && (l.abs() - FRAC_PI_2).abs() + (t.abs() - FRAC_PI_2).abs() > 0.1);
        let p = parametric_point(&s, l, t).unwrap();
        let fd = rbc_fd_curvature(&s, l, t);
        prop_assert!((p.mean_curv_sum - fd).abs() <= 1e-4 * fd.abs().max(1.0), "{} vs {}", p.mean_curv_sum, fd);
        let (rl, rt) = s.first_partials(l, t);
        let c = unit(cross(rl, rt));
        prop_assert!((dot(c, p.normal).abs() - 1.0).abs() < 1e-12);
    }
}
