//! Point sets on surfaces: minimum-energy (quasi-uniform) sets, random sets,
//! random subsets and parametric grids.

use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{parametric_point, LevelSetSurface, ParametricSurface, SurfacePoint};
use crate::jet::{dot, norm, Vec3};
use crate::par::par_map;

/// Riesz exponent of the repulsion energy.
pub const RIESZ_S: f64 = 2.0;
/// Neighbours contributing to each point's repulsion force.
pub const NEIGHBOURS: usize = 12;
/// Points must satisfy `|S| < PROJECTION_TOL` after projection.
pub const PROJECTION_TOL: f64 = 1e-10;
const PROJECTION_STEPS: usize = 50;
/// Half-width (in estimated distance `|S|/|∇S|`) of the band used for
/// rejection sampling.
const SAMPLING_BAND: f64 = 0.03;
const MAX_BACKTRACKS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointSetKind {
    QuasiUniform,
    Random,
    RandomSubset,
    ParametricGrid,
}

impl fmt::Display for PointSetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PointSetKind::QuasiUniform => "quasi_uniform",
            PointSetKind::Random => "random",
            PointSetKind::RandomSubset => "random_subset",
            PointSetKind::ParametricGrid => "parametric_grid",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub points: Vec<SurfacePoint>,
    pub surface_name: String,
    pub seed: u64,
    pub kind: PointSetKind,
    /// For random subsets, the index of each point in the parent set.
    pub parent_indices: Option<Vec<usize>>,
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn positions(&self) -> Vec<Vec3> {
        self.points.iter().map(|p| p.position).collect()
    }

    /// `<surface>_<kind>_<count>_<seed>.csv`
    pub fn file_name(&self) -> String {
        format!(
            "{}_{}_{}_{}.csv",
            self.surface_name,
            self.kind,
            self.len(),
            self.seed
        )
    }

    /// Writes `x,y,z,nx,ny,nz,H` rows with 17 significant digits.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        let mut out = String::from("x,y,z,nx,ny,nz,H\n");
        for p in &self.points {
            let [x, y, z] = p.position;
            let [nx, ny, nz] = p.normal;
            out.push_str(&format!(
                "{x:.16e},{y:.16e},{z:.16e},{nx:.16e},{ny:.16e},{nz:.16e},{:.16e}\n",
                p.mean_curv_sum
            ));
        }
        w.write_all(out.as_bytes())
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))
    }

    /// Writes into `dir` under [`PointSet::file_name`] and returns the path.
    pub fn save(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(self.file_name());
        self.write_csv(&path)?;
        Ok(path)
    }

    pub fn read_csv(
        path: &Path,
        surface_name: &str,
        seed: u64,
        kind: PointSetKind,
    ) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let parse_err = |reason: String| Error::Parse {
            path: path.to_path_buf(),
            reason,
        };
        let mut points = Vec::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if i == 0 {
                if line.trim() != "x,y,z,nx,ny,nz,H" {
                    return Err(parse_err(format!("unexpected header `{line}`")));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let v: Vec<f64> = line
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| parse_err(format!("line {}: {e}", i + 1)))?;
            if v.len() != 7 {
                return Err(parse_err(format!("line {}: expected 7 fields", i + 1)));
            }
            points.push(SurfacePoint {
                position: [v[0], v[1], v[2]],
                normal: [v[3], v[4], v[5]],
                mean_curv_sum: v[6],
            });
        }
        Ok(Self {
            points,
            surface_name: surface_name.to_string(),
            seed,
            kind,
            parent_indices: None,
        })
    }
}

/// Moves `p` onto `S = 0` by damped Newton steps along `∇S`.
pub fn project_to_surface(surface: &LevelSetSurface, start: Vec3) -> Result<Vec3> {
    let mut p = start;
    let mut jet = surface.jet(p);
    for _ in 0..PROJECTION_STEPS {
        if jet.value.abs() <= 1e-14 {
            break;
        }
        let g2 = dot(jet.grad, jet.grad);
        if !(g2 > 0.0) {
            break;
        }
        let k = jet.value / g2;
        let mut step = 1.0;
        let mut improved = false;
        for _ in 0..20 {
            let q = [
                p[0] - step * k * jet.grad[0],
                p[1] - step * k * jet.grad[1],
                p[2] - step * k * jet.grad[2],
            ];
            let jq = surface.jet(q);
            if jq.value.abs() < jet.value.abs() {
                p = q;
                jet = jq;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if jet.value.abs() < PROJECTION_TOL {
        Ok(p)
    } else {
        Err(Error::ProjectionFailed {
            surface: surface.name.clone(),
            start,
            residual: jet.value.abs(),
        })
    }
}

fn rejection_sample(surface: &LevelSetSurface, count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec3>> {
    let b = surface.bounding_box;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let q = [
            rng.random_range(b[0][0]..b[0][1]),
            rng.random_range(b[1][0]..b[1][1]),
            rng.random_range(b[2][0]..b[2][1]),
        ];
        let jet = surface.jet(q);
        let g = norm(jet.grad);
        if g > 1e-6 && jet.value.abs() / g < SAMPLING_BAND {
            out.push(project_to_surface(surface, q)?);
        }
    }
    Ok(out)
}

fn to_surface_points(surface: &LevelSetSurface, positions: &[Vec3]) -> Result<Vec<SurfacePoint>> {
    positions.iter().map(|&p| surface.surface_point(p)).collect()
}

/// Points drawn uniformly in the bounding box near `S = 0`, then projected.
pub fn random_surface_points(surface: &LevelSetSurface, count: usize, seed: u64) -> Result<PointSet> {
    if count == 0 {
        return Err(Error::InvalidConfig("count must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positions = rejection_sample(surface, count, &mut rng)?;
    Ok(PointSet {
        points: to_surface_points(surface, &positions)?,
        surface_name: surface.name.clone(),
        seed,
        kind: PointSetKind::Random,
        parent_indices: None,
    })
}

/// Total Riesz energy `Σ_{i<j} |x_i − x_j|^{-s}` over all pairs.
pub fn riesz_energy(points: &[Vec3]) -> f64 {
    let rows = par_map(points.len(), |i| {
        let mut e = 0.0;
        for q in &points[i + 1..] {
            let d2 = dist2(points[i], *q);
            e += d2.powf(-0.5 * RIESZ_S);
        }
        e
    });
    rows.iter().sum()
}

fn dist2(a: Vec3, b: Vec3) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    dot(d, d)
}

/// Indices of the `k` nearest neighbours of every point (brute force).
fn nearest_neighbours(points: &[Vec3], k: usize) -> Vec<Vec<usize>> {
    par_map(points.len(), |i| {
        let mut cand: Vec<(f64, usize)> = points
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(j, &q)| (dist2(points[i], q), j))
            .collect();
        let k = k.min(cand.len());
        if k < cand.len() {
            cand.select_nth_unstable_by(k, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            cand.truncate(k);
        }
        cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        cand.into_iter().map(|(_, j)| j).collect()
    })
}

/// Per-sweep diagnostics of [`minimum_energy_points_traced`].
#[derive(Debug, Clone, Default)]
pub struct EnergyTrace {
    /// Total energy before the first sweep and after every sweep.
    pub energies: Vec<f64>,
}

/// Quasi-uniform points on `S = 0` by tangential Riesz repulsion.
pub fn minimum_energy_points(
    surface: &LevelSetSurface,
    count: usize,
    seed: u64,
    iters: usize,
) -> Result<PointSet> {
    minimum_energy_points_traced(surface, count, seed, iters).map(|(set, _)| set)
}

pub fn minimum_energy_points_traced(
    surface: &LevelSetSurface,
    count: usize,
    seed: u64,
    iters: usize,
) -> Result<(PointSet, EnergyTrace)> {
    if count < 2 {
        return Err(Error::InvalidConfig(
            "minimum-energy sets need at least two points".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = rejection_sample(surface, count, &mut rng)?;
    let mut energy = riesz_energy(&pts);
    let mut trace = EnergyTrace {
        energies: vec![energy],
    };
    let k = NEIGHBOURS.min(count - 1);
    let mut step = 0.1;

    for _ in 0..iters {
        let neighbours = nearest_neighbours(&pts, k);
        let nn_dist: Vec<f64> = neighbours
            .iter()
            .enumerate()
            .map(|(i, nb)| dist2(pts[i], pts[nb[0]]).sqrt())
            .collect();
        let spacing = nn_dist.iter().sum::<f64>() / count as f64;
        let forces: Vec<Vec3> = par_map(count, |i| {
            let p = pts[i];
            let mut f = [0.0; 3];
            for &j in &neighbours[i] {
                let d = [p[0] - pts[j][0], p[1] - pts[j][1], p[2] - pts[j][2]];
                let r2 = dot(d, d);
                let w = RIESZ_S * r2.powf(-0.5 * RIESZ_S - 1.0);
                for a in 0..3 {
                    f[a] += w * d[a];
                }
            }
            let n = surface.surface_point(p).map(|sp| sp.normal).unwrap_or([0.0; 3]);
            let fn_ = dot(f, n);
            [f[0] - fn_ * n[0], f[1] - fn_ * n[1], f[2] - fn_ * n[2]]
        });
        let mean_force = forces.iter().map(|&f| norm(f)).sum::<f64>() / count as f64;
        if !(mean_force > 0.0) {
            trace.energies.push(energy);
            continue;
        }

        let mut accepted = false;
        for _ in 0..MAX_BACKTRACKS {
            let trial: Result<Vec<Vec3>> = par_map(count, |i| {
                let f = forces[i];
                let mut scale = step * spacing / mean_force;
                let len = norm(f) * scale;
                let cap = 0.5 * nn_dist[i];
                if len > cap {
                    scale *= cap / len;
                }
                let q = [
                    pts[i][0] + scale * f[0],
                    pts[i][1] + scale * f[1],
                    pts[i][2] + scale * f[2],
                ];
                project_to_surface(surface, q)
            })
            .into_iter()
            .collect();
            let trial = trial?;
            let e = riesz_energy(&trial);
            if e <= energy {
                pts = trial;
                energy = e;
                step = (step * 1.5).min(1.0);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        trace.energies.push(energy);
        if !accepted {
            break;
        }
    }

    let set = PointSet {
        points: to_surface_points(surface, &pts)?,
        surface_name: surface.name.clone(),
        seed,
        kind: PointSetKind::QuasiUniform,
        parent_indices: None,
    };
    Ok((set, trace))
}

/// Uniform `n`-subset of `parent` without replacement.
pub fn random_subset(parent: &PointSet, n: usize, seed: u64) -> Result<PointSet> {
    if n > parent.len() {
        return Err(Error::SubsetTooLarge {
            requested: n,
            available: parent.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let idx = index::sample(&mut rng, parent.len(), n).into_vec();
    Ok(PointSet {
        points: idx.iter().map(|&i| parent.points[i]).collect(),
        surface_name: parent.surface_name.clone(),
        seed,
        kind: PointSetKind::RandomSubset,
        parent_indices: Some(idx),
    })
}

/// Cell-centred tensor grid over the chart domain.
pub fn parametric_grid(surface: &ParametricSurface, n_lambda: usize, n_theta: usize) -> Result<PointSet> {
    if n_lambda < 2 || n_theta < 2 {
        return Err(Error::InvalidConfig("grid needs at least 2x2 nodes".into()));
    }
    let [[l0, l1], [t0, t1]] = surface.domain;
    let dl = (l1 - l0) / n_lambda as f64;
    let dt = (t1 - t0) / n_theta as f64;
    let mut points = Vec::with_capacity(n_lambda * n_theta);
    for i in 0..n_lambda {
        let lambda = l0 + (i as f64 + 0.5) * dl;
        for j in 0..n_theta {
            let theta = t0 + (j as f64 + 0.5) * dt;
            if surface.is_listed_degenerate(lambda, theta) {
                return Err(Error::DegenerateChart { lambda, theta });
            }
            points.push(parametric_point(surface, lambda, theta)?);
        }
    }
    Ok(PointSet {
        points,
        surface_name: surface.name.clone(),
        seed: 0,
        kind: PointSetKind::ParametricGrid,
        parent_indices: None,
    })
}

/// Smallest distance between two distinct points.
pub fn min_pairwise_distance(points: &[Vec3]) -> f64 {
    par_map(points.len(), |i| {
        points[i + 1..]
            .iter()
            .map(|&q| dist2(points[i], q))
            .fold(f64::INFINITY, f64::min)
    })
    .into_iter()
    .fold(f64::INFINITY, f64::min)
    .sqrt()
}
