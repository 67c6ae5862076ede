//! Ground-state entanglement across the localization transition at λ = 1
//! for the Fibonacci approximants N = 34, 55, 89, 144.
//!
//! Run with `cargo run --release --example ground_sweep`.

use harper_ent::harper::{lambda_grid, lambda_sweep};
use harper_ent::{HarperParams, Result};

fn main() -> Result<()> {
    let lambdas = lambda_grid(0.0, 2.0, 0.1)?;
    let sizes = [34, 55, 89, 144];
    let mut tables = Vec::new();
    for n in sizes {
        tables.push(lambda_sweep(&HarperParams::fibonacci(n, 0.0)?, &lambdas, 1)?);
    }

    print!("{:>6}", "lambda");
    for n in sizes {
        print!("{:>14}", format!("E_1 N={n}"));
    }
    println!("{:>12}", "p (N=144)");
    for (i, lambda) in lambdas.iter().enumerate() {
        print!("{lambda:>6.2}");
        for t in &tables {
            print!("{:>14.6e}", t[i].e_avg);
        }
        println!("{:>12.4}", tables[3][i].participation);
    }
    Ok(())
}
