//! The spectral propagator against direct Runge-Kutta integration of the
//! Schrödinger equation on the same chain.
//!
//! Run with `cargo run --release --example rk4_cross_check`.

use harper_ent::dynamics::{evolve, EvolutionConfig, Propagator};
use harper_ent::{HarperParams, Result};

fn main() -> Result<()> {
    let params = HarperParams::fibonacci(89, 1.0)?;
    let spectral = evolve(&params, &EvolutionConfig { t_max: 20.0, ..Default::default() })?;
    let rk4 = evolve(
        &params,
        &EvolutionConfig { t_max: 20.0, propagator: Propagator::Rk4, ..Default::default() },
    )?;

    let mut worst: f64 = 0.0;
    for (a, b) in spectral.states.iter().zip(&rk4.states) {
        let d = a
            .amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        worst = worst.max(d);
    }
    println!("{}", params.describe());
    println!("max |psi_spectral - psi_rk4| over {} samples: {worst:.3e}", spectral.len());
    println!(
        "norm drift: spectral {:.3e}, rk4 {:.3e}",
        spectral.max_norm_drift(),
        rk4.max_norm_drift()
    );
    Ok(())
}
