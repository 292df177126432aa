//! The symbol-criterion gallery.
//!
//! Checks the circle criterion for a few polynomial symbols, verifies
//! the four geometric facts about the triangle U and the lens V, and
//! reproduces the four-cell decision table in which `I + A` and `e^B`
//! come out hypercyclic-type while `e^A` and `I + B` do not.
//!
//! Run with `cargo run --example gallery`.

use num_complex::Complex64;

use hypermix::spectral_gallery::{
    b2cp_scenario, check_gs_criterion, kernel_eigencheck, verify_domain_facts, DiskGrid, Symbol,
};

fn main() -> hypermix::Result<()> {
    let grid = DiskGrid::new(64, 256);
    let c = Complex64::new;

    println!("circle criterion on polynomial symbols:");
    for (label, coeffs) in [
        ("z", vec![c(0.0, 0.0), c(1.0, 0.0)]),
        ("z/4 + 2", vec![c(2.0, 0.0), c(0.25, 0.0)]),
        ("(z+1)/2", vec![c(0.5, 0.0), c(0.5, 0.0)]),
    ] {
        let flags = check_gs_criterion(&Symbol::polynomial(coeffs), &grid)?;
        println!(
            "  {label:>10}: meets circle = {}, inside disk = {}, avoids closed disk = {}",
            flags.meets_unit_circle, flags.image_inside_open_disk, flags.image_avoids_closed_disk
        );
    }

    let facts = verify_domain_facts(128);
    println!("\ndomain facts:");
    for f in &facts.facts {
        println!(
            "  {:<28} holds = {} ({} samples)",
            f.label, f.holds, f.samples_checked
        );
    }

    let scenario = b2cp_scenario(96)?;
    println!("\nfour-cell decision table:");
    for cell in &scenario.cells {
        println!(
            "  {:<28} -> {}",
            cell.label,
            if cell.hypercyclic_type {
                "hypercyclic-type"
            } else {
                "non-hypercyclic"
            }
        );
    }
    println!("pattern matches expectation: {}", scenario.matches_expected_pattern);

    // Truncated reproducing-kernel eigencheck: the residual is pure
    // truncation tail, decaying like |w|^N.
    let symbol = Symbol::polynomial(vec![c(1.0, 0.0), c(0.5, 0.0)]);
    let w = c(0.8, 0.0);
    println!("\nkernel eigencheck for 1 + z/2 at w = 0.8:");
    for n in [30, 40, 50, 60] {
        println!("  N = {n}: residual {:.3e}", kernel_eigencheck(&symbol, w, n)?);
    }
    Ok(())
}
