//! Reproducible experiment drivers behind the `harper-ent` command line.
//!
//! Each `run_*` function validates its spec, computes, writes CSV files (plus
//! an optional gnuplot script) into an output directory and returns the
//! in-memory results. Outputs depend only on the spec, never on thread
//! scheduling.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dynamics::{diffusion_exponent, evolve, EvolutionConfig, ExponentFit, TimeSeries};
use crate::error::{Error, Result};
use crate::harper::{
    fibonacci_sigma, ground_state, lambda_grid, lambda_sweep, Boundary, GroundState, HarperParams,
    Sigma, SweepRow,
};
use crate::oracle::{verify_block_formula_with_tolerance, BlockVerification, MAX_EMBED_QUBITS};
use crate::output::{write_atomic, CsvDocument};
use crate::state::{
    average_block_entropy, average_block_entropy_enumerated, bipartite_from_pairwise,
    entropy_distribution, mean_square_concurrence, participation_ratio, state_linear_entropy,
    BlockSelection, OneParticleState,
};

/// Environment variable capping the worker pool size.
pub const THREADS_ENV: &str = "HARPER_ENT_THREADS";
pub const DEFAULT_SEED: u64 = 42;
/// Tolerance for the closed-form identity checks in [`run_verify`].
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

/// Run `f` on a pool sized by [`THREADS_ENV`], or on rayon's global pool
/// when the variable is unset.
pub fn with_thread_limit<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| Error::InvalidParameter(format!("{THREADS_ENV}={v} is not a positive integer")))?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidParameter(e.to_string()))?;
            Ok(pool.install(f))
        }
        Err(_) => Ok(f()),
    }
}

fn sigma_for(n_sites: usize, explicit: Option<Sigma>) -> Result<Sigma> {
    match explicit {
        Some(s) => Ok(s),
        None => fibonacci_sigma(n_sites),
    }
}

// ---------------------------------------------------------------- verify

#[derive(Debug, Clone, PartialEq)]
pub struct VerifySpec {
    pub seed: u64,
    pub max_n: usize,
    pub states_per_size: usize,
    pub tolerance: f64,
}

impl Default for VerifySpec {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            max_n: 12,
            states_per_size: 100,
            tolerance: crate::oracle::VERIFY_TOLERANCE,
        }
    }
}

impl VerifySpec {
    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_EMBED_QUBITS).contains(&self.max_n) {
            return Err(Error::InvalidParameter(format!(
                "max-n must be in 2..={MAX_EMBED_QUBITS}, got {}",
                self.max_n
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be > 0, got {}",
                self.tolerance
            )));
        }
        if self.states_per_size == 0 {
            return Err(Error::InvalidParameter("states per size must be > 0".into()));
        }
        Ok(())
    }
}

/// Worst deviation of one closed-form identity on one random state.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub n_sites: usize,
    pub state_index: usize,
    pub check: &'static str,
    pub max_abs_diff: f64,
    pub pass: bool,
}

impl IdentityCheck {
    pub const CSV_HEADER: &'static str = "n_sites,state_index,check,max_abs_diff,pass";

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:e},{}",
            self.n_sites, self.state_index, self.check, self.max_abs_diff, self.pass
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub oracle: Vec<BlockVerification>,
    pub identities: Vec<IdentityCheck>,
    pub files: Vec<PathBuf>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.oracle.iter().all(|r| r.pass) && self.identities.iter().all(|r| r.pass)
    }

    pub fn max_oracle_diff(&self) -> f64 {
        self.oracle.iter().map(|r| r.abs_diff).fold(0.0, f64::max)
    }

    pub fn failures(&self) -> usize {
        self.oracle.iter().filter(|r| !r.pass).count()
            + self.identities.iter().filter(|r| !r.pass).count()
    }
}

fn identity_checks(n: usize, index: usize, state: &OneParticleState) -> Result<Vec<IdentityCheck>> {
    let nf = n as f64;
    let e_s = state_linear_entropy(state);
    let p = participation_ratio(state);
    let c2 = mean_square_concurrence(state);

    let mut averaging: f64 = 0.0;
    let mut pairwise: f64 = 0.0;
    for l in 0..=n {
        let closed = average_block_entropy(state, l)?;
        averaging = averaging.max((average_block_entropy_enumerated(state, l)? - closed).abs());
        pairwise = pairwise.max((bipartite_from_pairwise(n, l, c2) - closed).abs());
    }
    let participation = (e_s - (1.0 - 1.0 / (nf * p))).abs();
    let concurrence = (c2 - 4.0 / (nf * (nf - 1.0)) * e_s).abs();

    Ok([
        ("block_average", averaging),
        ("participation", participation),
        ("concurrence", concurrence),
        ("pairwise", pairwise),
    ]
    .into_iter()
    .map(|(check, d)| IdentityCheck {
        n_sites: n,
        state_index: index,
        check,
        max_abs_diff: d,
        pass: d < IDENTITY_TOLERANCE,
    })
    .collect())
}

/// Randomized oracle and identity suite over `N = 2..=max_n`.
///
/// Writes `verify_oracle.csv` and `verify_identities.csv`.
pub fn run_verify(spec: &VerifySpec, out_dir: &Path) -> Result<VerifyReport> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut cases = Vec::new();
    for n in 2..=spec.max_n {
        for i in 0..spec.states_per_size {
            let state = OneParticleState::random(&mut rng, n)?;
            let block = BlockSelection::random_nonempty(&mut rng, n);
            cases.push((n, i, state, block));
        }
    }
    let results: Vec<(BlockVerification, Vec<IdentityCheck>)> = cases
        .par_iter()
        .map(|(n, i, state, block)| {
            Ok((
                verify_block_formula_with_tolerance(state, block, spec.tolerance)?,
                identity_checks(*n, *i, state)?,
            ))
        })
        .collect::<Result<_>>()?;
    let (oracle, identities): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let identities: Vec<IdentityCheck> = identities.into_iter().flatten().collect();

    let params = format!(
        "seed={} max_n={} states_per_size={} tolerance={} identity_tolerance={}",
        spec.seed, spec.max_n, spec.states_per_size, spec.tolerance, IDENTITY_TOLERANCE
    );
    let mut doc = CsvDocument::new("verify", BlockVerification::CSV_HEADER);
    doc.comment(params.clone())
        .comment("oracle: embed -> partial trace -> 1 - Tr(rho^2); closed form: 2(s - s^2)");
    doc.rows = oracle.iter().map(|r| r.csv_row()).collect();
    let f1 = doc.write_to(&out_dir.join("verify_oracle.csv"))?;

    let mut doc = CsvDocument::new("verify", IdentityCheck::CSV_HEADER);
    doc.comment(params);
    doc.rows = identities.iter().map(|r| r.csv_row()).collect();
    let f2 = doc.write_to(&out_dir.join("verify_identities.csv"))?;

    Ok(VerifyReport {
        oracle,
        identities,
        files: vec![f1, f2],
    })
}

// ---------------------------------------------------------- ground sweep

#[derive(Debug, Clone, PartialEq)]
pub struct GroundSweepSpec {
    pub n_sites: Vec<usize>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_step: f64,
    /// Applied to every size; `None` picks the Fibonacci approximant.
    pub sigma: Option<Sigma>,
    pub block_size: usize,
    pub boundary: Boundary,
    pub plot: bool,
}

impl Default for GroundSweepSpec {
    fn default() -> Self {
        Self {
            n_sites: vec![34, 55, 89, 144],
            lambda_min: 0.0,
            lambda_max: 2.0,
            lambda_step: 0.02,
            sigma: None,
            block_size: 1,
            boundary: Boundary::Periodic,
            plot: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundSweepResult {
    pub tables: Vec<(usize, Vec<SweepRow>)>,
    pub files: Vec<PathBuf>,
}

pub fn ground_sweep_path(out_dir: &Path, n_sites: usize) -> PathBuf {
    out_dir.join(format!("ground_sweep_N{n_sites}.csv"))
}

/// Ground-state `E_{L,N−L}` against λ, one CSV per chain length.
pub fn run_ground_sweep(spec: &GroundSweepSpec, out_dir: &Path) -> Result<GroundSweepResult> {
    if spec.n_sites.is_empty() {
        return Err(Error::InvalidParameter("no lattice sizes given".into()));
    }
    let lambdas = lambda_grid(spec.lambda_min, spec.lambda_max, spec.lambda_step)?;
    let mut bases = Vec::new();
    for &n in &spec.n_sites {
        let sigma = sigma_for(n, spec.sigma)?;
        bases.push(HarperParams::new(n, lambdas[0], sigma, spec.boundary)?);
    }

    let mut tables = Vec::new();
    let mut files = Vec::new();
    for base in &bases {
        let rows = lambda_sweep(base, &lambdas, spec.block_size)?;
        let mut doc = CsvDocument::new("ground-sweep", SweepRow::CSV_HEADER);
        doc.comment(format!(
            "n_sites={} sigma={} boundary={} hopping={} block_size={} lambda_min={} lambda_max={} lambda_step={}",
            base.n_sites,
            base.sigma,
            base.boundary,
            crate::harper::HOPPING,
            spec.block_size,
            spec.lambda_min,
            spec.lambda_max,
            spec.lambda_step
        ));
        doc.rows = rows.iter().map(|r| r.csv_row()).collect();
        files.push(doc.write_to(&ground_sweep_path(out_dir, base.n_sites))?);
        tables.push((base.n_sites, rows));
    }

    if spec.plot {
        let mut gp = String::from(
            "set xlabel 'lambda'\nset ylabel 'E_{L,N-L}'\nset datafile separator ','\nset key top right\nplot ",
        );
        let parts: Vec<String> = spec
            .n_sites
            .iter()
            .map(|n| format!("'ground_sweep_N{n}.csv' using 1:6 skip 2 with linespoints title 'N={n}'"))
            .collect();
        gp.push_str(&parts.join(", \\\n     "));
        gp.push('\n');
        let path = out_dir.join("ground_sweep.gp");
        write_atomic(&path, gp.as_bytes())?;
        files.push(path);
    }
    Ok(GroundSweepResult { tables, files })
}

// ---------------------------------------------------------- distribution

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSpec {
    pub n_sites: usize,
    pub lambda: f64,
    pub sigma: Option<Sigma>,
    pub boundary: Boundary,
    pub plot: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionResult {
    pub params: HarperParams,
    pub ground: GroundState,
    /// `E^{(n)}` for `n = 1..N`.
    pub site_entropies: Vec<f64>,
    pub files: Vec<PathBuf>,
}

pub fn distribution_path(out_dir: &Path, n_sites: usize, lambda: f64) -> PathBuf {
    out_dir.join(format!("distribution_N{n_sites}_lambda{lambda}.csv"))
}

/// Per-site entropies of the ground state.
pub fn run_distribution(spec: &DistributionSpec, out_dir: &Path) -> Result<DistributionResult> {
    let sigma = sigma_for(spec.n_sites, spec.sigma)?;
    let params = HarperParams::new(spec.n_sites, spec.lambda, sigma, spec.boundary)?;
    let ground = ground_state(&params)?;
    let site_entropies = entropy_distribution(&ground.state);

    let mut doc = CsvDocument::new("distribution", "site,site_entropy,abs_psi_sq");
    doc.comment(params.describe()).comment(format!(
        "ground_energy={} degenerate_flag={}",
        ground.energy,
        u8::from(ground.degenerate)
    ));
    doc.rows = site_entropies
        .iter()
        .zip(ground.state.probabilities())
        .enumerate()
        .map(|(i, (e, p))| format!("{},{:e},{:e}", i + 1, e, p))
        .collect();
    let path = distribution_path(out_dir, spec.n_sites, spec.lambda);
    let mut files = vec![doc.write_to(&path)?];

    if spec.plot {
        let name = path.file_name().unwrap().to_string_lossy();
        let gp = format!(
            "set xlabel 'site n'\nset ylabel 'E^(n)_(1,N-1)'\nset datafile separator ','\nplot '{name}' using 1:2 skip 3 with impulses title 'lambda={}'\n",
            spec.lambda
        );
        let gp_path = path.with_extension("gp");
        write_atomic(&gp_path, gp.as_bytes())?;
        files.push(gp_path);
    }
    Ok(DistributionResult {
        params,
        ground,
        site_entropies,
        files,
    })
}

// -------------------------------------------------------------- dynamics

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsSpec {
    pub n_sites: usize,
    pub lambdas: Vec<f64>,
    pub sigma: Option<Sigma>,
    pub boundary: Boundary,
    pub config: EvolutionConfig,
    pub exponent_window: Option<(f64, f64)>,
    /// Write per-λ time-series CSVs (the exponent report is always written
    /// when a window is set).
    pub write_series: bool,
    pub plot: bool,
}

impl Default for DynamicsSpec {
    fn default() -> Self {
        Self {
            n_sites: 144,
            lambdas: vec![0.5, 1.0, 1.5],
            sigma: None,
            boundary: Boundary::Periodic,
            config: EvolutionConfig::default(),
            exponent_window: None,
            write_series: true,
            plot: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsRun {
    pub lambda: f64,
    pub series: TimeSeries,
    pub fit: Option<ExponentFit>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsResult {
    pub runs: Vec<DynamicsRun>,
    pub files: Vec<PathBuf>,
}

pub fn dynamics_path(out_dir: &Path, n_sites: usize, lambda: f64) -> PathBuf {
    out_dir.join(format!("dynamics_N{n_sites}_lambda{lambda}.csv"))
}

/// Wave-packet evolution for each λ, with an optional diffusion-exponent fit.
pub fn run_dynamics(spec: &DynamicsSpec, out_dir: &Path) -> Result<DynamicsResult> {
    if spec.lambdas.is_empty() {
        return Err(Error::InvalidParameter("no lambda values given".into()));
    }
    let sigma = sigma_for(spec.n_sites, spec.sigma)?;
    let params: Vec<HarperParams> = spec
        .lambdas
        .iter()
        .map(|&l| HarperParams::new(spec.n_sites, l, sigma, spec.boundary))
        .collect::<Result<_>>()?;
    spec.config.validate(spec.n_sites)?;

    let runs: Vec<DynamicsRun> = params
        .par_iter()
        .map(|p| {
            let series = evolve(p, &spec.config)?;
            let fit = spec
                .exponent_window
                .map(|(lo, hi)| diffusion_exponent(&series, lo, hi))
                .transpose()?;
            Ok(DynamicsRun {
                lambda: p.lambda,
                series,
                fit,
            })
        })
        .collect::<Result<_>>()?;

    let mut files = Vec::new();
    if spec.write_series {
        for (run, p) in runs.iter().zip(&params) {
            let mut doc = CsvDocument::new("dynamics", TimeSeries::CSV_HEADER);
            doc.comment(p.describe())
                .comment(spec.config.describe(spec.n_sites))
                .comment(format!(
                    "boundary_hit_time={}",
                    run.series
                        .boundary_hit_time
                        .map_or("none".to_string(), |t| t.to_string())
                ));
            doc.rows = run.series.csv_rows();
            files.push(doc.write_to(&dynamics_path(out_dir, spec.n_sites, run.lambda))?);
        }
    }
    if let Some((lo, hi)) = spec.exponent_window {
        let mut doc = CsvDocument::new("exponent", ExponentFit::CSV_HEADER);
        doc.comment(format!(
            "n_sites={} sigma={} boundary={} window={lo},{hi}",
            spec.n_sites, sigma, spec.boundary
        ))
        .comment(spec.config.describe(spec.n_sites));
        doc.rows = runs
            .iter()
            .filter_map(|r| r.fit.map(|f| f.csv_row(r.lambda)))
            .collect();
        files.push(doc.write_to(&out_dir.join(format!("exponents_N{}.csv", spec.n_sites)))?);
    }
    if spec.plot && spec.write_series {
        let parts: Vec<String> = runs
            .iter()
            .map(|r| {
                format!(
                    "'dynamics_N{}_lambda{}.csv' using 1:4 skip 4 with lines title 'lambda={}'",
                    spec.n_sites, r.lambda, r.lambda
                )
            })
            .collect();
        let gp = format!(
            "set xlabel 't'\nset ylabel 'E_{{L,N-L}}(t)'\nset datafile separator ','\nplot {}\n",
            parts.join(", \\\n     ")
        );
        let path = out_dir.join(format!("dynamics_N{}.gp", spec.n_sites));
        write_atomic(&path, gp.as_bytes())?;
        files.push(path);
    }
    Ok(DynamicsResult { runs, files })
}
