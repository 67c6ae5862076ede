//! Closed-form block entropies for a few hand-picked one-particle states.
//!
//! Run with `cargo run --example closed_forms`.

use harper_ent::state::{
    average_block_entropy, average_block_entropy_enumerated, bipartite_from_pairwise,
    entropy_from_participation, BlockSelection, EntanglementSummary, OneParticleState,
};
use harper_ent::{state, Result};

fn report(name: &str, psi: &OneParticleState) -> Result<()> {
    let n = psi.n_sites();
    let s = EntanglementSummary::of(psi);
    println!("{name}: N = {n}, E_s = {:.6}, p = {:.6}, <C^2> = {:.6e}", s.e_s, s.p, s.mean_c2);
    for l in [1, n / 2, n - 1] {
        let closed = average_block_entropy(psi, l)?;
        let via_p = entropy_from_participation(n, l, s.p)?;
        let via_c2 = bipartite_from_pairwise(n, l, s.mean_c2);
        let enumerated = average_block_entropy_enumerated(psi, l)?;
        println!(
            "  L = {l:2}: closed {closed:.12}  from p {via_p:.12}  from <C^2> {via_c2:.12}  enumerated {enumerated:.12}"
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    report("W state", &OneParticleState::w_state(12)?)?;
    report("localized", &OneParticleState::delta(12, 5)?)?;

    // exponentially decaying amplitudes around site 6
    let decay: Vec<f64> = (1..=12).map(|n| (-(n as f64 - 6.0).abs() / 1.5).exp()).collect();
    let psi = OneParticleState::from_real(&decay)?;
    report("exponential", &psi)?;

    // a single block and its complement carry the same entropy
    let block = BlockSelection::new(12, vec![2, 3, 7])?;
    println!(
        "block {} -> {:.12}, complement {} -> {:.12}",
        block.spec_string(),
        state::block_entropy(&psi, &block)?,
        block.complement().spec_string(),
        state::block_entropy(&psi, &block.complement())?
    );
    Ok(())
}
