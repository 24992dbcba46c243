//! Experiment orchestration: point generation, multi-seed training, error
//! metrics and the files each experiment leaves behind.
//!
//! An experiment directory contains
//!
//! * `metrics.json`: per-seed and mean L2 errors plus a provenance echo of
//!   every setting. Wall time is kept out of it (see `timing.json`) so that
//!   identical configurations give byte-identical files.
//! * `errors.csv`: `x,y,z,u_ref,u_pred,abs_err` for the best seed.
//! * `runs/seed_<k>.json`: optimizer summary per seed.
//! * `best_params.json`: parameter snapshot of the best seed.
//! * `points/`: the test and training point sets.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Surface;
use crate::net::{forward, validate_layer_sizes, ParamSnapshot, ACTIVATION, BATCH, INITIALIZATION};
use crate::optim::{multi_seed_train, LbfgsConfig, RunResult, Termination};
use crate::pde::{manufactured_problem, ProblemName};
use crate::sampling::{
    minimum_energy_points, parametric_grid, random_subset, random_surface_points, PointSet,
    NEIGHBOURS, RIESZ_S,
};

/// Acceptance thresholds for the reproduced experiments.
pub mod thresholds {
    /// Example 1 on the sphere, 2500 training points: mean over seeds.
    pub const SPHERE_MEAN_L2: f64 = 5e-3;
    /// Example 1 on the sphere, 2500 training points: best seed.
    pub const SPHERE_BEST_L2: f64 = 1e-3;
    /// Error at the smallest N divided by the error at the largest N.
    pub const CONVERGENCE_RATIO: f64 = 10.0;
    pub const SLOPE_RANGE: (f64, f64) = (1.0, 2.5);
    /// Largest ratio between mean errors of different widths.
    pub const WIDTH_SPREAD: f64 = 10.0;
    /// Largest ratio between quasi-uniform and random training errors.
    pub const SAMPLING_FACTOR: f64 = 3.0;
    /// Ten times the reported errors for each manifold.
    pub const MANIFOLD_L2: [(&str, f64); 4] = [
        ("cdp", 1.2e-2),
        ("bretzel2", 1.6e-2),
        ("orthocircle", 4.2e-2),
        ("rbc", 2.4e-2),
    ];

    pub fn manifold_limit(name: &str) -> Option<f64> {
        MANIFOLD_L2.iter().find(|(n, _)| *n == name).map(|&(_, v)| v)
    }
}

/// Number of test points used for each registered surface.
pub fn default_test_count(surface: &str) -> Option<usize> {
    Some(match surface {
        "sphere" => 2500,
        "torus" => 2000,
        "cdp" => 3996,
        "bretzel2" => 3690,
        "orthocircle" => 4286,
        "rbc" | "rbc_closed" => 4000,
        _ => return None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainKind {
    /// A random subset of the (quasi-uniform) test points.
    QuasiUniformSubset,
    /// Independent random points on the surface.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplingConfig {
    /// Seed of the test point set.
    pub point_seed: u64,
    /// Repulsion sweeps for minimum-energy test sets.
    pub me_iters: usize,
    /// Seed of the training subset or random training points.
    pub train_seed: u64,
    /// `[n_lambda, n_theta]` for parametric surfaces; defaults to
    /// `[test_count / 40, 40]`.
    pub grid: Option<[usize; 2]>,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            point_seed: 2021,
            me_iters: 60,
            train_seed: 1,
            grid: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problem: ProblemName,
    pub surface: String,
    pub train_count: usize,
    pub train_kind: TrainKind,
    pub test_count: usize,
    pub arch: Vec<usize>,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub optimizer: LbfgsConfig,
    #[serde(default)]
    pub sampling: SamplingConfig,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    /// Example 1 on the unit sphere with the default architecture, all
    /// 2500 test points used for training, ten seeds.
    pub fn example1(output_dir: impl Into<PathBuf>) -> Self {
        Self {
            problem: ProblemName::Example1,
            surface: "sphere".into(),
            train_count: 2500,
            train_kind: TrainKind::QuasiUniformSubset,
            test_count: 2500,
            arch: crate::net::architecture(50, 3),
            seeds: (0..10).collect(),
            optimizer: LbfgsConfig::default(),
            sampling: SamplingConfig::default(),
            output_dir: output_dir.into(),
        }
    }

    /// Example 2 on `surface` with 500 training points drawn from the test set.
    pub fn example2(surface: &str, output_dir: impl Into<PathBuf>) -> Result<Self> {
        let test_count =
            default_test_count(surface).ok_or_else(|| Error::UnknownSurface(surface.into()))?;
        Ok(Self {
            problem: ProblemName::Example2,
            surface: surface.into(),
            train_count: 500,
            train_kind: TrainKind::QuasiUniformSubset,
            test_count,
            arch: crate::net::architecture(50, 3),
            seeds: (0..10).collect(),
            optimizer: LbfgsConfig::default(),
            sampling: SamplingConfig::default(),
            output_dir: output_dir.into(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }

    pub fn validate(&self) -> Result<()> {
        Surface::by_name(&self.surface)?;
        validate_layer_sizes(&self.arch)?;
        self.optimizer.validate()?;
        if self.seeds.is_empty() {
            return Err(Error::InvalidConfig("no seeds given".into()));
        }
        if self.train_count == 0 || self.test_count == 0 {
            return Err(Error::InvalidConfig("point counts must be positive".into()));
        }
        if self.train_kind == TrainKind::QuasiUniformSubset && self.train_count > self.test_count {
            return Err(Error::InvalidConfig(format!(
                "train_count {} exceeds test_count {}",
                self.train_count, self.test_count
            )));
        }
        Ok(())
    }
}

/// Everything that determines the numbers in `metrics.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub problem: ProblemName,
    pub surface: String,
    pub train_count: usize,
    pub train_kind: TrainKind,
    pub test_count: usize,
    pub arch: Vec<usize>,
    pub seeds: Vec<u64>,
    pub optimizer: LbfgsConfig,
    pub sampling: SamplingConfig,
    pub activation: String,
    pub initialization: String,
    pub riesz_exponent: f64,
    pub repulsion_neighbours: usize,
    pub batch_size: usize,
    pub version: String,
}

impl Provenance {
    fn new(cfg: &ExperimentConfig) -> Self {
        Self {
            problem: cfg.problem,
            surface: cfg.surface.clone(),
            train_count: cfg.train_count,
            train_kind: cfg.train_kind,
            test_count: cfg.test_count,
            arch: cfg.arch.clone(),
            seeds: cfg.seeds.clone(),
            optimizer: cfg.optimizer,
            sampling: cfg.sampling.clone(),
            activation: ACTIVATION.into(),
            initialization: INITIALIZATION.into(),
            riesz_exponent: RIESZ_S,
            repulsion_neighbours: NEIGHBOURS,
            batch_size: BATCH,
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedMetrics {
    pub seed: u64,
    pub l2_error: Option<f64>,
    pub final_loss: Option<f64>,
    pub iterations: Option<usize>,
    pub termination: Option<Termination>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub per_seed: Vec<SeedMetrics>,
    /// L2 errors of the seeds that trained successfully, in seed order.
    pub l2_errors: Vec<f64>,
    pub mean_l2: f64,
    pub best_seed: Option<u64>,
    pub best_l2: Option<f64>,
    /// Set when at least one seed failed.
    pub failed: bool,
    pub provenance: Provenance,
    /// `|u − ũ|` of the best seed at every test point.
    #[serde(skip)]
    pub best_abs_errors: Vec<f64>,
    #[serde(skip)]
    pub wall_time_secs: f64,
}

/// `√Σ(u − ũ)² / √Σu²`.
pub fn l2_error(reference: &[f64], predicted: &[f64]) -> Result<f64> {
    if reference.len() != predicted.len() || reference.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "L2 error needs equal non-empty lengths, got {} and {}",
            reference.len(),
            predicted.len()
        )));
    }
    let den: f64 = reference.iter().map(|u| u * u).sum();
    if den == 0.0 {
        return Err(Error::ZeroReference);
    }
    let num: f64 = reference
        .iter()
        .zip(predicted)
        .map(|(u, v)| (u - v) * (u - v))
        .sum();
    Ok(num.sqrt() / den.sqrt())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// The test point set of an experiment.
pub fn test_points(cfg: &ExperimentConfig) -> Result<PointSet> {
    match Surface::by_name(&cfg.surface)? {
        Surface::LevelSet(s) => {
            minimum_energy_points(&s, cfg.test_count, cfg.sampling.point_seed, cfg.sampling.me_iters)
        }
        Surface::Parametric(s) => {
            let [nl, nt] = match cfg.sampling.grid {
                Some(g) => g,
                None if cfg.test_count % 40 == 0 => [cfg.test_count / 40, 40],
                None => {
                    return Err(Error::InvalidConfig(format!(
                        "no grid factorization given for {} points on `{}`",
                        cfg.test_count, cfg.surface
                    )))
                }
            };
            if nl * nt != cfg.test_count {
                return Err(Error::InvalidConfig(format!(
                    "grid {nl}x{nt} does not give {} points",
                    cfg.test_count
                )));
            }
            parametric_grid(&s, nl, nt)
        }
    }
}

/// The training point set of an experiment, given its test set.
pub fn training_points(cfg: &ExperimentConfig, test: &PointSet) -> Result<PointSet> {
    match cfg.train_kind {
        TrainKind::QuasiUniformSubset => random_subset(test, cfg.train_count, cfg.sampling.train_seed),
        TrainKind::Random => {
            let surface = Surface::by_name(&cfg.surface)?;
            random_surface_points(surface.as_level_set()?, cfg.train_count, cfg.sampling.train_seed)
        }
    }
}

/// Trains every seed and evaluates it on the test points; writes all output
/// files into `cfg.output_dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<MetricsRecord> {
    cfg.validate()?;
    let started = Instant::now();
    let problem = manufactured_problem(cfg.problem, &cfg.surface)?;
    let test = test_points(cfg)?;
    let training = training_points(cfg, &test)?;

    let out = &cfg.output_dir;
    create_dir(&out.join("points"))?;
    create_dir(&out.join("runs"))?;
    test.save(&out.join("points"))?;
    training.save(&out.join("points"))?;

    let runs = multi_seed_train(&problem, &training, &cfg.seeds, &cfg.optimizer, &cfg.arch)?;

    let reference: Vec<f64> = test
        .points
        .iter()
        .map(|p| problem.reference.value(p.position))
        .collect();
    let mut per_seed = Vec::with_capacity(runs.len());
    let mut best: Option<(f64, &RunResult, Vec<f64>)> = None;
    let mut failed = false;
    for (seed, run) in cfg.seeds.iter().zip(&runs) {
        match run {
            Ok(run) => {
                let predicted: Vec<f64> = test
                    .points
                    .iter()
                    .map(|p| forward(&run.final_params, p.position))
                    .collect();
                let err = l2_error(&reference, &predicted)?;
                write_json(&out.join("runs").join(format!("seed_{seed}.json")), &run.summary())?;
                per_seed.push(SeedMetrics {
                    seed: *seed,
                    l2_error: Some(err),
                    final_loss: Some(run.final_loss()),
                    iterations: Some(run.iterations),
                    termination: Some(run.termination),
                    error: None,
                });
                if best.as_ref().is_none_or(|(b, _, _)| err < *b) {
                    best = Some((err, run, predicted));
                }
            }
            Err(e) => {
                failed = true;
                per_seed.push(SeedMetrics {
                    seed: *seed,
                    l2_error: None,
                    final_loss: None,
                    iterations: None,
                    termination: None,
                    error: Some(e.to_string()),
                });
            }
        }
    }

    let l2_errors: Vec<f64> = per_seed.iter().filter_map(|s| s.l2_error).collect();
    let mean_l2 = if l2_errors.is_empty() {
        f64::NAN
    } else {
        l2_errors.iter().sum::<f64>() / l2_errors.len() as f64
    };

    let mut best_abs_errors = Vec::new();
    if let Some((_, run, predicted)) = &best {
        let mut csv = String::from("x,y,z,u_ref,u_pred,abs_err\n");
        for ((p, u), v) in test.points.iter().zip(&reference).zip(predicted) {
            let [x, y, z] = p.position;
            let e = (u - v).abs();
            best_abs_errors.push(e);
            csv.push_str(&format!(
                "{x:.16e},{y:.16e},{z:.16e},{u:.16e},{v:.16e},{e:.16e}\n"
            ));
        }
        let path = out.join("errors.csv");
        std::fs::write(&path, csv).map_err(|e| Error::io(&path, e))?;
        write_json(
            &out.join("best_params.json"),
            &ParamSnapshot::new(&run.final_params, run.seed),
        )?;
    }

    let record = MetricsRecord {
        per_seed,
        l2_errors,
        mean_l2,
        best_seed: best.as_ref().map(|(_, r, _)| r.seed),
        best_l2: best.as_ref().map(|(e, _, _)| *e),
        failed,
        provenance: Provenance::new(cfg),
        best_abs_errors,
        wall_time_secs: started.elapsed().as_secs_f64(),
    };
    write_json(&out.join("metrics.json"), &record)?;
    write_json(
        &out.join("timing.json"),
        &serde_json::json!({ "wall_time_secs": record.wall_time_secs }),
    )?;
    Ok(record)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub mean_l2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `log(mean_l2)` against `log(N)` over the rows up
    /// to the smallest error.
    pub slope: f64,
}

impl ConvergenceTable {
    pub fn from_rows(rows: Vec<ConvergenceRow>) -> Self {
        Self {
            slope: fit_decreasing_slope(&rows),
            rows,
        }
    }

    /// Writes `convergence.csv` into `dir`.
    pub fn write_csv(&self, dir: &Path) -> Result<PathBuf> {
        let mut csv = String::from("N,mean_l2,slope\n");
        for r in &self.rows {
            csv.push_str(&format!("{},{:.16e},{:.16e}\n", r.n, r.mean_l2, self.slope));
        }
        create_dir(dir)?;
        let path = dir.join("convergence.csv");
        std::fs::write(&path, csv).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

/// Fits the log-log slope over the leading rows up to and including the row
/// with the smallest error. Returns NaN when fewer than two rows qualify.
pub fn fit_decreasing_slope(rows: &[ConvergenceRow]) -> f64 {
    let Some(argmin) = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.mean_l2.is_finite() && r.mean_l2 > 0.0)
        .min_by(|a, b| a.1.mean_l2.total_cmp(&b.1.mean_l2))
        .map(|(i, _)| i)
    else {
        return f64::NAN;
    };
    let pts: Vec<(f64, f64)> = rows[..=argmin]
        .iter()
        .filter(|r| r.mean_l2.is_finite() && r.mean_l2 > 0.0)
        .map(|r| ((r.n as f64).ln(), r.mean_l2.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Runs `base` once per training-set size, each in `<output_dir>/N_<n>`, and
/// writes `convergence.csv`.
pub fn convergence_study(base: &ExperimentConfig, n_values: &[usize]) -> Result<ConvergenceTable> {
    if n_values.is_empty() || n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(
            "n_values must be non-empty and strictly increasing".into(),
        ));
    }
    let mut rows = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let cfg = ExperimentConfig {
            train_count: n,
            output_dir: base.output_dir.join(format!("N_{n}")),
            ..base.clone()
        };
        let record = run_experiment(&cfg)?;
        rows.push(ConvergenceRow {
            n,
            mean_l2: record.mean_l2,
        });
    }
    let table = ConvergenceTable::from_rows(rows);
    table.write_csv(&base.output_dir)?;
    Ok(table)
}

/// Runs `base` once per architecture, each in `<output_dir>/arch_<sizes>`.
pub fn architecture_study(base: &ExperimentConfig, archs: &[Vec<usize>]) -> Result<Vec<(Vec<usize>, f64)>> {
    let mut out = Vec::with_capacity(archs.len());
    for arch in archs {
        let tag = arch.iter().map(|n| n.to_string()).collect::<Vec<_>>().join("-");
        let cfg = ExperimentConfig {
            arch: arch.clone(),
            output_dir: base.output_dir.join(format!("arch_{tag}")),
            ..base.clone()
        };
        out.push((arch.clone(), run_experiment(&cfg)?.mean_l2));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteRow {
    pub manifold: String,
    pub test_count: usize,
    pub mean_l2: f64,
}

/// Settings shared by every manifold of the suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptions {
    pub output_dir: PathBuf,
    pub train_count: usize,
    pub arch: Vec<usize>,
    pub optimizer: LbfgsConfig,
    pub sampling: SamplingConfig,
}

impl SuiteOptions {
    pub fn new(output_dir: impl Into<PathBuf>) -> Self {
        Self {
            output_dir: output_dir.into(),
            train_count: 500,
            arch: crate::net::architecture(50, 3),
            optimizer: LbfgsConfig::default(),
            sampling: SamplingConfig::default(),
        }
    }
}

pub const SUITE_MANIFOLDS: [&str; 4] = ["cdp", "bretzel2", "orthocircle", "rbc"];

/// Example 2 on each manifold of the error table; writes `suite.csv`.
pub fn manifold_suite(seeds: &[u64], opts: &SuiteOptions) -> Result<Vec<SuiteRow>> {
    let mut rows = Vec::new();
    for name in SUITE_MANIFOLDS {
        let cfg = ExperimentConfig {
            seeds: seeds.to_vec(),
            train_count: opts.train_count,
            arch: opts.arch.clone(),
            optimizer: opts.optimizer,
            sampling: opts.sampling.clone(),
            ..ExperimentConfig::example2(name, opts.output_dir.join(name))?
        };
        let record = run_experiment(&cfg)?;
        rows.push(SuiteRow {
            manifold: name.to_string(),
            test_count: cfg.test_count,
            mean_l2: record.mean_l2,
        });
    }
    let mut csv = String::from("manifold,test_count,mean_l2\n");
    for r in &rows {
        csv.push_str(&format!("{},{},{:.16e}\n", r.manifold, r.test_count, r.mean_l2));
    }
    create_dir(&opts.output_dir)?;
    let path = opts.output_dir.join("suite.csv");
    std::fs::write(&path, csv).map_err(|e| Error::io(&path, e))?;
    Ok(rows)
}

/// Thresholds that apply to this experiment, as `(label, passed)`.
pub fn threshold_checks(cfg: &ExperimentConfig, record: &MetricsRecord) -> Vec<(String, bool)> {
    let mut out = Vec::new();
    match (cfg.problem, cfg.surface.as_str()) {
        (ProblemName::Example1, "sphere") => {
            let best = record.best_l2.unwrap_or(f64::NAN);
            out.push((
                format!("mean l2 {:.3e} <= {:.0e}", record.mean_l2, thresholds::SPHERE_MEAN_L2),
                record.mean_l2 <= thresholds::SPHERE_MEAN_L2,
            ));
            out.push((
                format!("best l2 {best:.3e} <= {:.0e}", thresholds::SPHERE_BEST_L2),
                best <= thresholds::SPHERE_BEST_L2,
            ));
        }
        (ProblemName::Example2, name) => {
            if let Some(limit) = thresholds::manifold_limit(name) {
                out.push((
                    format!("{name} mean l2 {:.3e} <= {limit:.1e}", record.mean_l2),
                    record.mean_l2 <= limit,
                ));
            }
        }
        _ => {}
    }
    out
}

/// Error reduction from the smallest to the largest N, and the fitted rate.
pub fn convergence_checks(table: &ConvergenceTable) -> Vec<(String, bool)> {
    let (first, last) = match (table.rows.first(), table.rows.last()) {
        (Some(f), Some(l)) => (f.mean_l2, l.mean_l2),
        _ => return Vec::new(),
    };
    let ratio = first / last;
    let (lo, hi) = thresholds::SLOPE_RANGE;
    let slope = table.slope.abs();
    vec![
        (
            format!("error ratio {ratio:.2} >= {}", thresholds::CONVERGENCE_RATIO),
            ratio >= thresholds::CONVERGENCE_RATIO,
        ),
        (
            format!("|slope| {slope:.3} in [{lo}, {hi}]"),
            (lo..=hi).contains(&slope),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l2_examples() {
        let u = [0.3, -1.2, 2.0];
        assert_eq!(l2_error(&u, &u).unwrap(), 0.0);
        let doubled: Vec<f64> = u.iter().map(|v| 2.0 * v).collect();
        assert!((l2_error(&u, &doubled).unwrap() - 1.0).abs() < 1e-15);
        assert!((l2_error(&[3.0, 4.0], &[3.0, 0.0]).unwrap() - 0.8).abs() < 1e-15);
        assert!(matches!(l2_error(&[0.0, 0.0], &[1.0, 0.0]), Err(Error::ZeroReference)));
        assert!(l2_error(&[1.0], &[1.0, 2.0]).is_err());
        assert!(l2_error(&[], &[]).is_err());
    }

    #[test]
    fn slope_fit() {
        let rows: Vec<ConvergenceRow> = [10usize, 100, 1000]
            .iter()
            .map(|&n| ConvergenceRow {
                n,
                mean_l2: 3.0 * (n as f64).powf(-1.5),
            })
            .collect();
        assert!((fit_decreasing_slope(&rows) + 1.5).abs() < 1e-12);

        // The plateau after the minimum is ignored.
        let mut with_tail = rows.clone();
        with_tail.push(ConvergenceRow {
            n: 5000,
            mean_l2: 1.0,
        });
        assert!((fit_decreasing_slope(&with_tail) + 1.5).abs() < 1e-12);
        assert!(fit_decreasing_slope(&rows[..1]).is_nan());
    }

    #[test]
    fn config_validation() {
        let mut cfg = ExperimentConfig::example1("/tmp/unused");
        assert!(cfg.validate().is_ok());
        cfg.train_count = 2501;
        assert!(cfg.validate().is_err());
        cfg.train_kind = TrainKind::Random;
        assert!(cfg.validate().is_ok());
        cfg.surface = "cube".into();
        assert!(matches!(cfg.validate(), Err(Error::UnknownSurface(_))));
        assert!(ExperimentConfig::example2("cube", "/tmp").is_err());
        assert_eq!(ExperimentConfig::example2("rbc", "/tmp").unwrap().test_count, 4000);
    }

    #[test]
    fn config_json_defaults() {
        let text = r#"{
            "problem": "example2", "surface": "torus", "train_count": 50,
            "train_kind": "random", "test_count": 200, "arch": [3, 8, 1],
            "seeds": [0, 1], "output_dir": "out"
        }"#;
        let cfg: ExperimentConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.optimizer, LbfgsConfig::default());
        assert_eq!(cfg.sampling, SamplingConfig::default());
        assert_eq!(cfg.problem, ProblemName::Example2);
    }
}
