//! The Harper (Aubry-André) tight-binding chain.
//!
//! `H = Σ_n ½(c†_n c_{n+1} + h.c.) + V_n c†_n c_n` with `V_n = λ cos(2πnσ + φ)`.
//! In the one-particle sector this is an `N × N` real symmetric matrix:
//! hopping `½` on the first off-diagonals (plus the corners for a periodic
//! chain) and `V_n` on the diagonal.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::state::{check_site, participation_ratio, state_linear_entropy, OneParticleState};
use crate::state::block_average_factor;

pub const HOPPING: f64 = 0.5;
/// Largest chain handed to the dense eigensolver.
pub const MAX_DENSE_SITES: usize = 4096;
/// Lowest two eigenvalues closer than this are flagged degenerate.
pub const DEGENERACY_GAP: f64 = 1e-10;

/// Potential frequency: an exact rational `num/den` or a plain real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sigma {
    Rational { num: u64, den: u64 },
    Real(f64),
}

impl Sigma {
    /// `num/den` in lowest terms; rejects `den = 0` and non-coprime pairs.
    pub fn rational(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidParameter("sigma denominator is zero".into()));
        }
        if gcd(num, den) != 1 {
            return Err(Error::InvalidParameter(format!(
                "sigma {num}/{den} is not in lowest terms"
            )));
        }
        Ok(Sigma::Rational { num, den })
    }

    pub fn value(&self) -> f64 {
        match *self {
            Sigma::Rational { num, den } => num as f64 / den as f64,
            Sigma::Real(x) => x,
        }
    }

    /// `(numerator, denominator)` as written to CSV; reals use denominator 1.
    pub fn csv_parts(&self) -> (String, String) {
        match *self {
            Sigma::Rational { num, den } => (num.to_string(), den.to_string()),
            Sigma::Real(x) => (x.to_string(), "1".to_string()),
        }
    }

    /// Fractional part of `n·σ`, exact for rationals.
    fn phase_fraction(&self, n: usize) -> f64 {
        match *self {
            Sigma::Rational { num, den } => {
                let r = (n as u128 * num as u128) % den as u128;
                r as f64 / den as f64
            }
            Sigma::Real(x) => (n as f64 * x).rem_euclid(1.0),
        }
    }
}

impl fmt::Display for Sigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sigma::Rational { num, den } => write!(f, "{num}/{den}"),
            Sigma::Real(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for Sigma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cannot parse sigma '{s}'"));
        match s.split_once('/') {
            Some((p, q)) => {
                let p = p.trim().parse().map_err(|_| bad())?;
                let q = q.trim().parse().map_err(|_| bad())?;
                Sigma::rational(p, q)
            }
            None => {
                let x: f64 = s.trim().parse().map_err(|_| bad())?;
                if !x.is_finite() {
                    return Err(bad());
                }
                Ok(Sigma::Real(x))
            }
        }
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    #[default]
    Periodic,
    Open,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::Periodic => "periodic",
            Boundary::Open => "open",
        })
    }
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "periodic" => Ok(Boundary::Periodic),
            "open" => Ok(Boundary::Open),
            other => Err(Error::InvalidParameter(format!(
                "boundary must be 'periodic' or 'open', got '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarperParams {
    pub n_sites: usize,
    pub lambda: f64,
    pub sigma: Sigma,
    pub boundary: Boundary,
    /// Phase offset `φ` in `cos(2πnσ + φ)`; zero unless set.
    pub phase: f64,
}

impl HarperParams {
    pub fn new(n_sites: usize, lambda: f64, sigma: Sigma, boundary: Boundary) -> Result<Self> {
        let params = Self {
            n_sites,
            lambda,
            sigma,
            boundary,
            phase: 0.0,
        };
        params.validate()?;
        Ok(params)
    }

    /// Periodic chain with `σ = F(n−1)/F(n)` for Fibonacci `n_sites`.
    pub fn fibonacci(n_sites: usize, lambda: f64) -> Result<Self> {
        Self::new(n_sites, lambda, fibonacci_sigma(n_sites)?, Boundary::Periodic)
    }

    pub fn with_lambda(mut self, lambda: f64) -> Result<Self> {
        self.lambda = lambda;
        self.validate()?;
        Ok(self)
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 3 {
            return Err(Error::TooFewSites {
                min: 3,
                got: self.n_sites,
            });
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "lambda must be finite and >= 0, got {}",
                self.lambda
            )));
        }
        if let Sigma::Rational { num, den } = self.sigma {
            Sigma::rational(num, den)?;
        }
        if let Sigma::Real(x) = self.sigma {
            if !x.is_finite() {
                return Err(Error::InvalidParameter("sigma must be finite".into()));
            }
        }
        Ok(())
    }

    /// One-line `key=value` description for file headers.
    pub fn describe(&self) -> String {
        format!(
            "n_sites={} lambda={} sigma={} boundary={} hopping={} phase={}",
            self.n_sites, self.lambda, self.sigma, self.boundary, HOPPING, self.phase
        )
    }
}

/// `V_n = λ cos(2πnσ + φ)` at 1-based `site`.
pub fn potential(params: &HarperParams, site: usize) -> Result<f64> {
    check_site(site, params.n_sites)?;
    Ok(potential_unchecked(params, site))
}

fn potential_unchecked(params: &HarperParams, site: usize) -> f64 {
    if params.lambda == 0.0 {
        return 0.0;
    }
    params.lambda * (TAU * params.sigma.phase_fraction(site) + params.phase).cos()
}

/// `V_1..V_N`, stored 0-based.
pub fn potentials(params: &HarperParams) -> Vec<f64> {
    (1..=params.n_sites)
        .map(|n| potential_unchecked(params, n))
        .collect()
}

pub fn hamiltonian_matrix(params: &HarperParams) -> DMatrix<f64> {
    let n = params.n_sites;
    let mut h = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(potentials(params)));
    for i in 0..n - 1 {
        h[(i, i + 1)] = HOPPING;
        h[(i + 1, i)] = HOPPING;
    }
    if params.boundary == Boundary::Periodic {
        h[(0, n - 1)] = HOPPING;
        h[(n - 1, 0)] = HOPPING;
    }
    h
}

/// `Hψ` without materializing the matrix.
pub fn apply_hamiltonian(
    potentials: &[f64],
    boundary: Boundary,
    psi: &[Complex64],
    out: &mut [Complex64],
) {
    let n = psi.len();
    for i in 0..n {
        let mut acc = psi[i] * potentials[i];
        if i + 1 < n {
            acc += psi[i + 1] * HOPPING;
        }
        if i > 0 {
            acc += psi[i - 1] * HOPPING;
        }
        out[i] = acc;
    }
    if boundary == Boundary::Periodic {
        out[0] += psi[n - 1] * HOPPING;
        out[n - 1] += psi[0] * HOPPING;
    }
}

/// Full eigendecomposition, eigenvalues ascending.
///
/// Each eigenvector is signed so that its largest-magnitude component is
/// positive (lowest index wins ties), making the output reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    /// Column `k` pairs with `eigenvalues[k]`.
    pub eigenvectors: DMatrix<f64>,
}

impl SpectrumResult {
    pub const GROUND_INDEX: usize = 0;

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `max_k ‖H v_k − E_k v_k‖`.
    pub fn max_residual(&self, h: &DMatrix<f64>) -> f64 {
        let hv = h * &self.eigenvectors;
        (0..self.len())
            .map(|k| (hv.column(k) - self.eigenvectors.column(k) * self.eigenvalues[k]).norm())
            .fold(0.0, f64::max)
    }

    /// `max |⟨v_i, v_j⟩ − δ_ij|`.
    pub fn orthonormality_error(&self) -> f64 {
        let gram = self.eigenvectors.transpose() * &self.eigenvectors;
        let n = self.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let delta = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - delta).abs());
            }
        }
        worst
    }
}

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 100_000;

pub fn full_spectrum(params: &HarperParams) -> Result<SpectrumResult> {
    params.validate()?;
    if params.n_sites > MAX_DENSE_SITES {
        return Err(Error::InvalidParameter(format!(
            "n_sites {} exceeds dense solver limit {MAX_DENSE_SITES}",
            params.n_sites
        )));
    }
    let h = hamiltonian_matrix(params);
    diagonalize(h)
}

/// Diagonalize a real symmetric matrix with the sign convention of
/// [`SpectrumResult`].
pub fn diagonalize(h: DMatrix<f64>) -> Result<SpectrumResult> {
    let n = h.nrows();
    let eig = SymmetricEigen::try_new(h, EIGEN_EPS, EIGEN_MAX_ITER).ok_or_else(|| {
        Error::SolverFailure(format!(
            "symmetric QR did not converge on {n}x{n} matrix within {EIGEN_MAX_ITER} iterations (eps {EIGEN_EPS:e})"
        ))
    })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));

    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).into_owned();
        let max = col.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let lead = col
            .iter()
            .position(|x| x.abs() >= max - 1e-12)
            .unwrap_or(0);
        if col[lead] < 0.0 {
            col.neg_mut();
        }
        eigenvectors.set_column(dst, &col);
    }
    Ok(SpectrumResult {
        eigenvalues,
        eigenvectors,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub energy: f64,
    pub state: OneParticleState,
    /// `E_1 − E_0`.
    pub gap: f64,
    pub degenerate: bool,
}

pub fn ground_state(params: &HarperParams) -> Result<GroundState> {
    let spectrum = full_spectrum(params)?;
    Ok(ground_state_from(&spectrum))
}

pub fn ground_state_from(spectrum: &SpectrumResult) -> GroundState {
    let v = spectrum.eigenvectors.column(SpectrumResult::GROUND_INDEX);
    let amps: Vec<f64> = v.iter().copied().collect();
    let state =
        OneParticleState::from_real(&amps).expect("eigenvectors are unit vectors of length >= 3");
    let gap = spectrum.eigenvalues[1] - spectrum.eigenvalues[0];
    GroundState {
        energy: spectrum.eigenvalues[0],
        state,
        gap,
        degenerate: gap < DEGENERACY_GAP,
    }
}

fn fibonacci_upto(limit: usize) -> Vec<usize> {
    let mut seq = vec![1usize, 1];
    while *seq.last().unwrap() <= limit {
        let next = seq[seq.len() - 1] + seq[seq.len() - 2];
        seq.push(next);
    }
    seq
}

/// `σ = F(n−1)/F(n)` for `n_sites = F(n) ≥ 3`.
pub fn fibonacci_sigma(n_sites: usize) -> Result<Sigma> {
    let seq = fibonacci_upto(n_sites.max(3));
    if n_sites >= 3 {
        if let Some(i) = seq.iter().position(|&f| f == n_sites) {
            return Sigma::rational(seq[i - 1] as u64, n_sites as u64);
        }
    }
    let above = *seq.iter().find(|&&f| f > n_sites.max(2)).unwrap();
    let below = seq.iter().copied().rfind(|&f| f < n_sites).unwrap_or(1);
    Err(Error::NotFibonacci {
        n: n_sites,
        below,
        above,
    })
}

/// `start, start + step, …` up to `stop` inclusive, rounded to 12 decimals.
pub fn lambda_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "bad lambda grid {start}..{stop} step {step}"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

/// One row of a ground-state λ sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub n_sites: usize,
    pub sigma: Sigma,
    pub block_size: usize,
    pub e_avg: f64,
    pub e_s: f64,
    pub participation: f64,
    pub ground_energy: f64,
    pub degenerate: bool,
}

impl SweepRow {
    pub const CSV_HEADER: &'static str = "lambda,n_sites,sigma_num,sigma_den,block_size,e_avg,e_s,participation,ground_energy,degenerate_flag";

    pub fn csv_row(&self) -> String {
        let (num, den) = self.sigma.csv_parts();
        format!(
            "{},{},{},{},{},{:e},{:e},{:e},{:e},{}",
            self.lambda,
            self.n_sites,
            num,
            den,
            self.block_size,
            self.e_avg,
            self.e_s,
            self.participation,
            self.ground_energy,
            u8::from(self.degenerate)
        )
    }
}

/// Ground-state entanglement for each λ, in input order.
pub fn lambda_sweep(
    base: &HarperParams,
    lambdas: &[f64],
    block_size: usize,
) -> Result<Vec<SweepRow>> {
    if lambdas.is_empty() {
        return Err(Error::InvalidParameter("empty lambda list".into()));
    }
    if block_size > base.n_sites {
        return Err(Error::BlockSizeOutOfRange {
            block_size,
            n_sites: base.n_sites,
        });
    }
    lambdas
        .par_iter()
        .map(|&lambda| {
            let params = base.with_lambda(lambda)?;
            let gs = ground_state(&params)?;
            let e_s = state_linear_entropy(&gs.state);
            Ok(SweepRow {
                lambda,
                n_sites: params.n_sites,
                sigma: params.sigma,
                block_size,
                e_avg: block_average_factor(params.n_sites, block_size) * e_s,
                e_s,
                participation: participation_ratio(&gs.state),
                ground_energy: gs.energy,
                degenerate: gs.degenerate,
            })
        })
        .collect()
}
