//! Two-point steering on a nilpotent shift block.
//!
//! Builds the 2n-dimensional backward shift, solves `P x = u`,
//! `P e^{zS} x = v` across six decades of `z`, and prints how fast the
//! tail coordinates die off (the `c |z|^{-j}` rates).
//!
//! Run with `cargo run --example steer`.

use hypermix::jordan_core::{solve_steering, verify_decay, ShiftBlock, SteeringProblem};

fn main() -> hypermix::Result<()> {
    let n = 3;
    let block = ShiftBlock::new(n);
    let u = vec![0.9, -0.4, 0.7];
    let v = vec![-0.2, 0.8, 0.1];

    println!("steering a {}-dimensional shift block, u = {u:?}, v = {v:?}", block.dim());
    println!("{:>10}  {:>12}  {:>12}", "z", "||x - u||", "||e^zS x - v||");
    for decade in 1..=6 {
        let z = 10f64.powi(decade);
        let problem = SteeringProblem::new(block, z, u.clone(), v.clone());
        let solution = solve_steering(&problem)?;
        let (ru, rv) = solution.target_residuals(&problem);
        println!("{z:>10.0e}  {ru:>12.3e}  {rv:>12.3e}");
    }

    // Decay rates over a bounded family of pairs: the fitted log-log
    // slope of tail coordinate j sits near -j.
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..8)
        .map(|i| {
            let s = (i as f64 * 0.37).sin();
            (
                vec![s, -s * 0.5, 0.3 + s * 0.1],
                vec![0.6 - s, s * 0.2, -0.5],
            )
        })
        .collect();
    let z_samples: Vec<f64> = (0..13).map(|i| 10f64.powf(1.0 + 0.25 * i as f64)).collect();
    let report = verify_decay(&block, &pairs, 10.0, &z_samples)?;
    println!("\nempirical bound constant c = {:.3}", report.c_estimate);
    for per_j in &report.per_j {
        println!(
            "tail j = {}: slope_x = {:+.3}, slope_image = {:+.3} (expected {:+})",
            per_j.j,
            per_j.slope_x.unwrap_or(f64::NAN),
            per_j.slope_image.unwrap_or(f64::NAN),
            -(per_j.j as i32),
        );
    }
    Ok(())
}
