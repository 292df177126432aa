//! Discretized L_p demos: the dilation tuple on the unit cube and the
//! translation group on the line.
//!
//! Shows the corner-clearing density probe (clear an eps-small dyadic
//! corner and land in the kernel of a finite dilation power) and the
//! escape mechanism that makes translations mixing-like on L_0: shifted
//! bumps leave every exhaustion window, so their d_0 distance to zero
//! dies off geometrically.
//!
//! Run with `cargo run --example lp_demo`.

use hypermix::lp_grid::{
    dilation_apply, kernel_density_probe, translation_group_check, GridField, LpMetric,
};

fn main() -> hypermix::Result<()> {
    // Dilation side: p = 1/2 on the unit square.
    let metric = LpMetric::new(0.5);
    let constant = GridField::unit_cube(&[64, 64]).fill(|_| 1.0);
    let probe = kernel_density_probe(&metric, &[constant], 1e-3)?;
    let t = &probe.targets[0];
    println!(
        "density probe (f = 1, p = 1/2, eps = 1e-3): delta = 2^{}, d_p(f, f~) = {:.3e}",
        t.delta_log2, t.distance
    );
    println!(
        "cleared field annihilated by (T_1 T_2)^{}",
        t.annihilation_power.expect("annihilation power")
    );

    // Dilations halve coordinate supports: a slab-vanishing field
    // empties after a few applications.
    let slab = GridField::unit_cube(&[32]).fill(|p| if p[0] < 0.5 { 0.0 } else { 1.0 });
    let mut g = slab;
    for step in 1..=3 {
        g = dilation_apply(0, &g);
        println!("after {step} dilation(s): q_p = {:.4}", metric.functional(&g));
    }

    // Translation side: d_0 escape on the line.
    let d0 = LpMetric::new(0.0);
    let bump = GridField::symmetric_box(&[40], 2.0).fill(|p| (1.0 - p[0] * p[0]).max(0.0));
    let shifts: Vec<Vec<f64>> = (1..=12).map(|n| vec![n as f64]).collect();
    let report = translation_group_check(&d0, &shifts, &[bump])?;
    println!("\ntranslation escape (window span {}):", report.omega_span);
    println!("{:>6}  {:>12}  {:>12}", "t", "d0(T_t f, 0)", "d0(T_-t f, 0)");
    for s in &report.escapes[0] {
        println!(
            "{:>6.0}  {:>12.3e}  {:>12.3e}",
            s.t_magnitude, s.forward, s.backward
        );
    }
    println!("\nstrong continuity refinement at t = 1:");
    for c in &report.continuity {
        println!("  offset {:>9.2e}: d0 = {:.3e}", c.offset, c.distance);
    }
    Ok(())
}
