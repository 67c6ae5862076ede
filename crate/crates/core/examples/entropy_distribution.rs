//! Per-site entropy `2(|ψ_n|² − |ψ_n|⁴)` of the N = 144 ground state on both
//! sides of the transition.
//!
//! Run with `cargo run --release --example entropy_distribution`.

use harper_ent::harper::ground_state;
use harper_ent::state::entropy_distribution;
use harper_ent::{HarperParams, Result};

fn main() -> Result<()> {
    for lambda in [0.5, 2.0] {
        let g = ground_state(&HarperParams::fibonacci(144, lambda)?)?;
        let e = entropy_distribution(&g.state);
        let total: f64 = e.iter().sum();
        let mut ranked: Vec<(usize, f64)> = e.iter().copied().enumerate().map(|(i, v)| (i + 1, v)).collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
        let top5: f64 = ranked[..5].iter().map(|r| r.1).sum();
        let mean = total / e.len() as f64;
        let sd = (e.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / e.len() as f64).sqrt();

        println!("lambda = {lambda}: ground energy {:.6}, gap {:.3e}", g.energy, g.gap);
        println!("  top sites {:?}", ranked[..5].iter().map(|r| r.0).collect::<Vec<_>>());
        println!("  top-5 share {:.4}, coefficient of variation {:.4}", top5 / total, sd / mean);
        let bars = 60.0 / ranked[0].1;
        for (site, v) in e.iter().enumerate().step_by(8) {
            println!("  {:>4} {}", site + 1, "#".repeat((v * bars).round() as usize));
        }
    }
    Ok(())
}
