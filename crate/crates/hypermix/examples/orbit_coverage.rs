//! Projective orbit coverage in dimension 3.
//!
//! The normalized orbit `{+- e^{tA}x / |e^{tA}x|}` of a 3x3 generator is
//! a smooth curve on the sphere, so the fraction of an equal-area mesh
//! it visits stays far below 1 -- the finite-dimensional obstruction to
//! supercyclic semigroups, made visible.
//!
//! Run with `cargo run --example orbit_coverage`.

use rand::rngs::StdRng;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use hypermix::matrix::Mat;
use hypermix::mixing_cert::{orbit_coverage_3d, SphereMesh};

fn main() {
    let mesh = SphereMesh::new(64, 128);
    println!(
        "equal-area mesh: {} bands x {} sectors = {} cells",
        mesh.bands,
        mesh.sectors,
        mesh.total_cells()
    );

    // Constant orbit: exactly two antipodal cells.
    let zero: Mat<f64> = Mat::zeros(3, 3);
    let r = orbit_coverage_3d(&zero, [0.3, -0.2, 0.9], 100.0, 1000, mesh);
    println!("A = 0:        fraction {:.6} ({} cells)", r.covered_fraction, r.hit_cells);

    // Pure rotation: the orbit is one great circle.
    let mut rot: Mat<f64> = Mat::zeros(3, 3);
    rot[(0, 1)] = -1.0;
    rot[(1, 0)] = 1.0;
    let r = orbit_coverage_3d(&rot, [1.0, 0.0, 0.0], 100.0, 20_000, mesh);
    println!("rotation:     fraction {:.6} ({} cells)", r.covered_fraction, r.hit_cells);

    // Random Gaussian generators: bounded well away from full coverage.
    println!("\nrandom generators, t_max = 100, 1e5 samples:");
    for seed in 0..10u64 {
        let mut rng = StdRng::seed_from_u64(seed);
        let a = Mat::from_fn(3, 3, |_, _| StandardNormal.sample(&mut rng));
        let r = orbit_coverage_3d(&a, [1.0, 0.5, -0.25], 100.0, 100_000, mesh);
        println!(
            "  seed {seed}: fraction {:.4} ({} / {} cells)",
            r.covered_fraction, r.hit_cells, r.total_cells
        );
    }
}
