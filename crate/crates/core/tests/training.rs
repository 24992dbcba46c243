use std::collections::HashSet;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use surface_pinn::geometry::LevelSetSurface;
use surface_pinn::harness::{
    convergence_study, run_experiment, training_points, test_points, ExperimentConfig, SamplingConfig, TrainKind,
};
use surface_pinn::net::xavier_init;
use surface_pinn::optim::{lbfgs, minimize, multi_seed_train, LbfgsConfig, Objective, PinnObjective, Termination};
use surface_pinn::pde::{manufactured_problem, ProblemName};
use surface_pinn::sampling::random_surface_points;
use surface_pinn::Error;

/// Checks the gradient on a random subset of coordinates at every evaluation.
struct SpotChecked {
    inner: PinnObjective,
    rng: ChaCha8Rng,
    checks: usize,
}

impl Objective for SpotChecked {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn evaluate(&mut self, x: &[f64], grad: &mut [f64]) -> f64 {
        let f = self.inner.evaluate(x, grad);
        let n = x.len();
        let mut scratch = vec![0.0; n];
        let h = 1e-6;
        let mut num = 0.0;
        let mut den = 0.0;
        for k in sample(&mut self.rng, n, 20.min(n)) {
            let mut p = x.to_vec();
            p[k] = x[k] + h;
            let up = self.inner.evaluate(&p, &mut scratch);
            p[k] = x[k] - h;
            let down = self.inner.evaluate(&p, &mut scratch);
            let fd = (up - down) / (2.0 * h);
            num += (fd - grad[k]).powi(2);
            den += fd * fd;
        }
        assert!((num / den).sqrt() < 1e-4, "gradient spot check {}", (num / den).sqrt());
        self.checks += 1;
        f
    }
}

fn small_problem() -> (surface_pinn::pde::PdeProblem, surface_pinn::sampling::PointSet) {
    let problem = manufactured_problem(ProblemName::Example1, "sphere").unwrap();
    let training = random_surface_points(&LevelSetSurface::sphere(1.0), 40, 2).unwrap();
    (problem, training)
}

#[test]
fn pinn_training_takes_strong_wolfe_steps_with_correct_gradients() {
    let (problem, training) = small_problem();
    let init = xavier_init(&[3, 10, 10, 1], 0).unwrap();
    let mut obj = SpotChecked {
        inner: PinnObjective::new(&problem, &training, &init).unwrap(),
        rng: ChaCha8Rng::seed_from_u64(0),
        checks: 0,
    };
    let cfg = LbfgsConfig {
        max_iters: 40,
        ..LbfgsConfig::default()
    };
    let out = lbfgs(&mut obj, &init.to_flat(), &cfg).unwrap();
    assert!(obj.checks > 40);
    assert!(out.history.last().unwrap() < &(0.1 * out.history[0]));
    for w in out.history.windows(2) {
        assert!(w[1] <= w[0] + 1e-15);
    }
    for s in &out.steps {
        assert!(s.f1 <= s.f0 + cfg.wolfe_c1 * s.alpha * s.slope0);
        assert!(s.slope1.abs() <= cfg.wolfe_c2 * s.slope0.abs());
    }
}

#[test]
fn seeds_are_independent_and_reproducible() {
    let (problem, training) = small_problem();
    let cfg = LbfgsConfig {
        max_iters: 15,
        ..LbfgsConfig::default()
    };
    let arch = [3, 8, 8, 1];
    let single = multi_seed_train(&problem, &training, &[0], &cfg, &arch).unwrap();
    let direct = minimize(&problem, &training, &xavier_init(&arch, 0).unwrap(), &cfg, 0).unwrap();
    let single = single[0].as_ref().unwrap();
    assert_eq!(single.final_params, direct.final_params);
    assert_eq!(single.loss_history, direct.loss_history);

    let a = multi_seed_train(&problem, &training, &[0, 1, 2], &cfg, &arch).unwrap();
    let b = multi_seed_train(&problem, &training, &[0, 1, 2], &cfg, &arch).unwrap();
    for (x, y) in a.iter().zip(&b) {
        let (x, y) = (x.as_ref().unwrap(), y.as_ref().unwrap());
        assert_eq!(x.final_loss().to_bits(), y.final_loss().to_bits());
        assert_eq!(x.termination, Termination::MaxIters);
    }
    assert_eq!(a.iter().map(|r| r.as_ref().unwrap().seed).collect::<Vec<_>>(), [0, 1, 2]);
    assert!(multi_seed_train(&problem, &training, &[], &cfg, &arch).is_err());
}

#[test]
fn zero_iterations_return_the_initial_parameters() {
    let (problem, training) = small_problem();
    let init = xavier_init(&[3, 5, 1], 9).unwrap();
    let cfg = LbfgsConfig {
        max_iters: 0,
        ..LbfgsConfig::default()
    };
    let run = minimize(&problem, &training, &init, &cfg, 9).unwrap();
    assert_eq!(run.final_params, init);
    assert_eq!(run.termination, Termination::MaxIters);
    assert_eq!(run.iterations, 0);
}

fn tiny_config(dir: &std::path::Path) -> ExperimentConfig {
    ExperimentConfig {
        problem: ProblemName::Example1,
        surface: "sphere".into(),
        train_count: 60,
        train_kind: TrainKind::QuasiUniformSubset,
        test_count: 150,
        arch: vec![3, 8, 8, 1],
        seeds: vec![0, 1, 2],
        optimizer: LbfgsConfig {
            max_iters: 25,
            ..LbfgsConfig::default()
        },
        sampling: SamplingConfig {
            me_iters: 5,
            ..SamplingConfig::default()
        },
        output_dir: dir.to_path_buf(),
    }
}

#[test]
fn experiment_outputs_are_consistent_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(&dir.path().join("a"));
    let record = run_experiment(&cfg).unwrap();
    assert_eq!(record.l2_errors.len(), 3);
    assert!(!record.failed);
    let mean = record.l2_errors.iter().sum::<f64>() / 3.0;
    assert!((record.mean_l2 - mean).abs() <= 1e-15);
    let best = record.l2_errors.iter().cloned().fold(f64::INFINITY, f64::min);
    assert_eq!(record.best_l2, Some(best));
    assert_eq!(record.best_abs_errors.len(), 150);

    let csv = std::fs::read_to_string(cfg.output_dir.join("errors.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,y,z,u_ref,u_pred,abs_err"));
    assert_eq!(lines.count(), 150);
    for name in ["metrics.json", "timing.json", "best_params.json", "runs/seed_0.json", "runs/seed_2.json"] {
        assert!(cfg.output_dir.join(name).exists(), "{name}");
    }

    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(cfg.output_dir.join("metrics.json")).unwrap()).unwrap();
    let per_seed: Vec<f64> = json["per_seed"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["l2_error"].as_f64().unwrap())
        .collect();
    assert!((json["mean_l2"].as_f64().unwrap() - per_seed.iter().sum::<f64>() / 3.0).abs() <= 1e-15);
    assert_eq!(json["provenance"]["activation"], "tanh");
    assert_eq!(json["provenance"]["optimizer"]["memory"], 10);

    let again = ExperimentConfig {
        output_dir: dir.path().join("b"),
        ..cfg.clone()
    };
    run_experiment(&again).unwrap();
    assert_eq!(
        std::fs::read(cfg.output_dir.join("metrics.json")).unwrap(),
        std::fs::read(again.output_dir.join("metrics.json")).unwrap()
    );
}

#[test]
fn full_subset_is_the_test_set() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        train_count: 150,
        ..tiny_config(dir.path())
    };
    let test = test_points(&cfg).unwrap();
    let train = training_points(&cfg, &test).unwrap();
    let key = |p: &surface_pinn::geometry::SurfacePoint| p.position.map(f64::to_bits);
    let a: HashSet<_> = test.points.iter().map(key).collect();
    let b: HashSet<_> = train.points.iter().map(key).collect();
    assert_eq!(a, b);
}

#[test]
fn single_point_convergence_table_matches_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let base = tiny_config(&dir.path().join("conv"));
    let table = convergence_study(&base, &[60]).unwrap();
    assert_eq!(table.rows.len(), 1);
    assert!(table.slope.is_nan());
    let direct = run_experiment(&ExperimentConfig {
        output_dir: dir.path().join("direct"),
        ..base.clone()
    })
    .unwrap();
    assert_eq!(table.rows[0].mean_l2, direct.mean_l2);
    let csv = std::fs::read_to_string(base.output_dir.join("convergence.csv")).unwrap();
    assert!(csv.starts_with("N,mean_l2,slope\n60,"));
    assert!(convergence_study(&base, &[60, 30]).is_err());
}

#[test]
fn invalid_experiments_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = tiny_config(dir.path());
    cfg.train_count = 151;
    assert!(matches!(run_experiment(&cfg), Err(Error::InvalidConfig(_))));

    let rbc = ExperimentConfig {
        surface: "rbc".into(),
        test_count: 80,
        train_count: 20,
        train_kind: TrainKind::Random,
        ..tiny_config(dir.path())
    };
    let test = test_points(&rbc).unwrap();
    assert_eq!(test.len(), 80);
    assert!(matches!(training_points(&rbc, &test), Err(Error::NotLevelSet(_))));

    let config_path = dir.path().join("config.json");
    cfg.save(&config_path).unwrap();
    assert_eq!(ExperimentConfig::load(&config_path).unwrap(), cfg);
}

#[test]
fn shipped_configs_load_and_validate() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let sphere = ExperimentConfig::load(&dir.join("sphere_example1.json")).unwrap();
    assert_eq!(sphere, ExperimentConfig {
        optimizer: LbfgsConfig { max_iters: 2000, ..LbfgsConfig::default() },
        ..ExperimentConfig::example1("out/sphere_example1")
    });
    sphere.validate().unwrap();
    let torus = ExperimentConfig::load(&dir.join("torus_random.json")).unwrap();
    torus.validate().unwrap();
    assert_eq!(torus.train_kind, TrainKind::Random);
    assert_eq!(torus.sampling.train_seed, 7);
    assert_eq!(torus.sampling.me_iters, 60);
    assert_eq!(torus.optimizer.memory, 10);
}
