//! Command-line front end. Exit codes: 0 success, 1 check or numerical
//! failure, 2 usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use harper_ent::dynamics::{EvolutionConfig, Propagator};
use harper_ent::experiments::{
    run_distribution, run_dynamics, run_ground_sweep, run_verify, with_thread_limit,
    DistributionSpec, DynamicsSpec, GroundSweepSpec, VerifySpec, DEFAULT_SEED,
};
use harper_ent::{Boundary, Error, Sigma};

#[derive(Parser)]
#[command(name = "harper-ent", version, about = "One-particle entanglement and the Harper model")]
struct Cli {
    /// Seed for randomized verification.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check closed-form entropies against the brute-force partial trace.
    Verify {
        #[arg(long, default_value_t = 12)]
        max_n: usize,
        #[arg(long, default_value_t = 100)]
        states_per_size: usize,
        /// Pass threshold on |oracle − closed form|.
        #[arg(long, default_value_t = 1e-10, allow_negative_numbers = true)]
        tolerance: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Ground-state E_{L,N−L}, E_s and p against λ.
    GroundSweep {
        /// Comma-separated chain lengths.
        #[arg(long, value_delimiter = ',', default_value = "34,55,89,144")]
        n_sites: Vec<usize>,
        #[arg(long, default_value_t = 0.0)]
        lambda_min: f64,
        #[arg(long, default_value_t = 2.0)]
        lambda_max: f64,
        #[arg(long, default_value_t = 0.02)]
        lambda_step: f64,
        /// Potential frequency σ as P/Q or a real; defaults to F(n−1)/F(n).
        #[arg(long)]
        sigma: Option<Sigma>,
        #[arg(long, default_value_t = 1)]
        block_size: usize,
        #[arg(long, default_value_t = Boundary::Periodic)]
        boundary: Boundary,
        #[arg(long)]
        out: PathBuf,
        /// Also emit a gnuplot script.
        #[arg(long)]
        plot: bool,
    },
    /// Per-site entropy of the ground state.
    Distribution {
        #[arg(long)]
        n_sites: usize,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        sigma: Option<Sigma>,
        #[arg(long, default_value_t = Boundary::Periodic)]
        boundary: Boundary,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        plot: bool,
    },
    /// Wave-packet evolution, one CSV per λ.
    Dynamics {
        #[command(flatten)]
        run: DynamicsArgs,
        /// Fit window for σ²(t) ∝ t^α, as LO,HI.
        #[arg(long, value_parser = parse_window)]
        exponent_window: Option<(f64, f64)>,
    },
    /// Diffusion exponents only.
    Exponent {
        #[command(flatten)]
        run: DynamicsArgs,
        #[arg(long, value_parser = parse_window)]
        exponent_window: (f64, f64),
    },
}

#[derive(Args)]
struct DynamicsArgs {
    #[arg(long, default_value_t = 144)]
    n_sites: usize,
    /// Comma-separated λ values.
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,1.5")]
    lambda: Vec<f64>,
    #[arg(long)]
    sigma: Option<Sigma>,
    #[arg(long, default_value_t = Boundary::Periodic)]
    boundary: Boundary,
    #[arg(long, default_value_t = 60.0)]
    t_max: f64,
    #[arg(long, default_value_t = 0.1)]
    dt: f64,
    #[arg(long, default_value_t = Propagator::Spectral)]
    propagator: Propagator,
    #[arg(long, default_value_t = 1e-3)]
    rk4_substep: f64,
    /// 1-based start site; defaults to ⌊N/2⌋.
    #[arg(long)]
    initial_site: Option<usize>,
    #[arg(long, default_value_t = 1e-6)]
    boundary_hit_threshold: f64,
    #[arg(long, default_value_t = 1)]
    block_size: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    plot: bool,
}

impl DynamicsArgs {
    fn into_spec(self, window: Option<(f64, f64)>, write_series: bool) -> DynamicsSpec {
        DynamicsSpec {
            n_sites: self.n_sites,
            lambdas: self.lambda,
            sigma: self.sigma,
            boundary: self.boundary,
            config: EvolutionConfig {
                t_max: self.t_max,
                dt: self.dt,
                propagator: self.propagator,
                rk4_substep: self.rk4_substep,
                initial_site: self.initial_site,
                boundary_hit_threshold: self.boundary_hit_threshold,
                block_size: self.block_size,
            },
            exponent_window: window,
            write_series,
            plot: self.plot,
        }
    }
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected LO,HI")?;
    let lo = lo.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let hi = hi.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((lo, hi))
}

fn print_files(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Verify {
            max_n,
            states_per_size,
            tolerance,
            out,
        } => {
            let spec = VerifySpec {
                seed: cli.seed,
                max_n,
                states_per_size,
                tolerance,
            };
            let report = run_verify(&spec, &out)?;
            print_files(&report.files);
            println!(
                "{} oracle cases, {} identity checks, max |diff| = {:e}, failures = {}",
                report.oracle.len(),
                report.identities.len(),
                report.max_oracle_diff(),
                report.failures()
            );
            Ok(if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::GroundSweep {
            n_sites,
            lambda_min,
            lambda_max,
            lambda_step,
            sigma,
            block_size,
            boundary,
            out,
            plot,
        } => {
            let spec = GroundSweepSpec {
                n_sites,
                lambda_min,
                lambda_max,
                lambda_step,
                sigma,
                block_size,
                boundary,
                plot,
            };
            print_files(&run_ground_sweep(&spec, &out)?.files);
            Ok(ExitCode::SUCCESS)
        }
        Command::Distribution {
            n_sites,
            lambda,
            sigma,
            boundary,
            out,
            plot,
        } => {
            let spec = DistributionSpec {
                n_sites,
                lambda,
                sigma,
                boundary,
                plot,
            };
            print_files(&run_distribution(&spec, &out)?.files);
            Ok(ExitCode::SUCCESS)
        }
        Command::Dynamics {
            run,
            exponent_window,
        } => {
            let out = run.out.clone();
            let res = run_dynamics(&run.into_spec(exponent_window, true), &out)?;
            print_files(&res.files);
            for r in &res.runs {
                if let Some(f) = r.fit {
                    println!("lambda={} alpha={:.4} r2={:.4}", r.lambda, f.alpha, f.r_squared);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Exponent {
            run,
            exponent_window,
        } => {
            let out = run.out.clone();
            let res = run_dynamics(&run.into_spec(Some(exponent_window), false), &out)?;
            print_files(&res.files);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match with_thread_limit(|| run(cli)).and_then(|r| r) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
