//! A packet started on one site spreads ballistically, diffusively or not at
//! all depending on λ. Prints `σ²(t)` and the fitted exponent.
//!
//! Run with `cargo run --release --example wave_packet`.

use harper_ent::dynamics::{diffusion_exponent, evolve, EvolutionConfig};
use harper_ent::{HarperParams, Result};

fn main() -> Result<()> {
    let config = EvolutionConfig::default();
    for (lambda, window) in [(0.5, (10.0, 60.0)), (1.0, (5.0, 40.0)), (1.5, (5.0, 40.0))] {
        let params = HarperParams::fibonacci(144, lambda)?;
        let series = evolve(&params, &config)?;
        println!("lambda = {lambda}, start site {}", series.initial_site);
        for i in (0..series.len()).step_by(100) {
            println!(
                "  t = {:5.1}  var = {:10.4}  E_1 = {:.4e}",
                series.times[i], series.variances[i], series.entanglements[i]
            );
        }
        match diffusion_exponent(&series, window.0, window.1) {
            Ok(fit) => println!(
                "  alpha on [{}, {}] = {:.4} (r^2 = {:.4})",
                fit.t_lo, fit.t_hi, fit.alpha, fit.r_squared
            ),
            Err(e) => println!("  no fit: {e}"),
        }
        if let Some(t) = series.boundary_hit_time {
            println!("  reached the chain ends at t = {t}");
        }
    }
    Ok(())
}
