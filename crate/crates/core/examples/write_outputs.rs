//! Produce every CSV the command-line tool writes, through the library
//! drivers, into one directory.
//!
//! Run with `cargo run --release --example write_outputs -- OUT_DIR`.

use std::path::PathBuf;

use harper_ent::experiments::{
    run_distribution, run_dynamics, run_ground_sweep, run_verify, DistributionSpec, DynamicsSpec,
    GroundSweepSpec, VerifySpec,
};
use harper_ent::{Boundary, Result};

fn main() -> Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out".into()));
    let mut files = Vec::new();

    let verify = run_verify(&VerifySpec::default(), &out)?;
    println!("verify: {} failures, max |diff| {:.2e}", verify.failures(), verify.max_oracle_diff());
    files.extend(verify.files);

    files.extend(run_ground_sweep(&GroundSweepSpec { plot: true, ..Default::default() }, &out)?.files);
    for lambda in [0.5, 2.0] {
        let spec = DistributionSpec {
            n_sites: 144,
            lambda,
            sigma: None,
            boundary: Boundary::Periodic,
            plot: false,
        };
        files.extend(run_distribution(&spec, &out)?.files);
    }
    let dynamics = DynamicsSpec { exponent_window: Some((5.0, 40.0)), plot: true, ..Default::default() };
    files.extend(run_dynamics(&dynamics, &out)?.files);

    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
