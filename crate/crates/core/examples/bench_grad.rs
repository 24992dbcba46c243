//! Times one loss-and-gradient evaluation for a [3, 50, 50, 50, 1] network on
//! 2500 points. Run with `cargo run --release --example bench_grad`.

use std::time::Instant;

use surface_pinn::jet::PACKED_LEN;
use surface_pinn::net::{scalar_param_gradient, xavier_init};

fn main() {
    let params = xavier_init(&[3, 50, 50, 50, 1], 0).unwrap();
    let pts: Vec<[f64; 3]> = (0..2500)
        .map(|i| {
            let t = i as f64 * 0.01;
            [t.sin(), t.cos(), (2.0 * t).sin()]
        })
        .collect();
    // Squared (value + Laplacian), exercising every second-order slot.
    let objective = |_: usize, j: &[f64; PACKED_LEN]| {
        let r = j[0] + j[4] + j[7] + j[9];
        let mut d = [0.0; PACKED_LEN];
        for c in [0, 4, 7, 9] {
            d[c] = 2.0 * r;
        }
        (r * r, d)
    };
    let reps = 10;
    let started = Instant::now();
    for _ in 0..reps {
        scalar_param_gradient(&params, &pts, &objective).unwrap();
    }
    println!("{:?} per evaluation", started.elapsed() / reps);
}
