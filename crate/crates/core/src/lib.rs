//! Bipartite entanglement and localization of one-particle states.
//!
//! For a state `|Ψ⟩ = Σ_n ψ_n |0…1_n…0⟩` on `N` qubits, the linear entropy
//! between a block of `L` qubits and the rest, averaged over all blocks, is
//!
//! ```text
//! E_{L,N−L} = 2L(N−L)/(N(N−1)) · E_s,   E_s = 1 − Σ|ψ_n|⁴ = 1 − 1/(Np)
//! ```
//!
//! where `p` is the participation ratio. The crate provides
//!
//! - [`state`]: one-particle states and the closed-form formulas,
//! - [`oracle`]: a brute-force `2^N` partial-trace check of those formulas,
//! - [`harper`]: the Harper chain, its spectrum and ground-state sweeps,
//! - [`dynamics`]: wave-packet evolution, variance and diffusion exponents,
//! - [`experiments`]: CSV-producing drivers used by the `harper-ent` binary.
//!
//! ```
//! use harper_ent::state::{average_block_entropy, OneParticleState};
//!
//! let w = OneParticleState::w_state(8).unwrap();
//! assert!((average_block_entropy(&w, 4).unwrap() - 0.5).abs() < 1e-14);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod harper;
pub mod oracle;
pub mod output;
pub mod state;

pub use error::{Error, Result};
pub use harper::{Boundary, HarperParams, Sigma};
pub use state::{BlockSelection, EntanglementSummary, OneParticleState};
