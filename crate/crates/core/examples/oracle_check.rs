//! Brute-force partial traces in the full `2^N` space against the closed
//! form, for random complex one-particle states.
//!
//! Run with `cargo run --release --example oracle_check -- [N] [COUNT]`.

use harper_ent::oracle::{embed_one_particle, partial_trace, verify_block_formula};
use harper_ent::state::{BlockSelection, OneParticleState};
use harper_ent::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(10, |a| a.parse().expect("N"));
    let count: usize = args.next().map_or(20, |a| a.parse().expect("COUNT"));
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let psi = OneParticleState::random(&mut rng, n)?;
        let block = BlockSelection::random_nonempty(&mut rng, n);
        let v = verify_block_formula(&psi, &block)?;
        println!(
            "{:>24}  oracle {:.15}  closed {:.15}  |diff| {:.2e}",
            v.block.spec_string(),
            v.oracle_value,
            v.closed_form_value,
            v.abs_diff
        );
        worst = worst.max(v.abs_diff);
    }
    println!("worst |diff| over {count} states at N = {n}: {worst:.2e}");

    // the reduced matrix itself: one-particle structure and its spectrum
    let psi = OneParticleState::random(&mut rng, 6)?;
    let rho = partial_trace(&embed_one_particle(&psi)?, &BlockSelection::new(6, vec![1, 4])?)?;
    let ev = rho.eigenvalues();
    println!(
        "rho on sites 1-4: dim {}, trace {:.15}, purity {:.15}, eigenvalues {:?}",
        rho.dimension(),
        rho.trace().re,
        rho.purity(),
        ev.iter().map(|e| format!("{e:.6}")).collect::<Vec<_>>()
    );
    Ok(())
}
