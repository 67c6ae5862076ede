//! Wave-packet evolution under the Harper Hamiltonian.
//!
//! Solves `i dψ_n/dt = ½(ψ_{n+1} + ψ_{n−1}) + V_n ψ_n` either exactly in the
//! eigenbasis (spectral) or with classical fourth-order Runge-Kutta.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::harper::{apply_hamiltonian, full_spectrum, potentials, Boundary, HarperParams, SpectrumResult};
use crate::state::{
    average_block_entropy, participation_ratio, state_linear_entropy, OneParticleState,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
/// rk4 runs abort once `|‖ψ‖² − 1|` exceeds this.
pub const RK4_MAX_NORM_DRIFT: f64 = 1e-6;
/// Fits with `R²` below this are reported as low-confidence.
pub const CONFIDENT_R_SQUARED: f64 = 0.9;
pub const MIN_FIT_SAMPLES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Propagator {
    #[default]
    Spectral,
    Rk4,
}

impl fmt::Display for Propagator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Propagator::Spectral => "spectral",
            Propagator::Rk4 => "rk4",
        })
    }
}

impl FromStr for Propagator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" => Ok(Propagator::Spectral),
            "rk4" => Ok(Propagator::Rk4),
            other => Err(Error::InvalidParameter(format!(
                "propagator must be 'spectral' or 'rk4', got '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionConfig {
    pub t_max: f64,
    /// Recording interval.
    pub dt: f64,
    pub propagator: Propagator,
    /// Integration step for rk4; ignored by the spectral propagator.
    pub rk4_substep: f64,
    /// 1-based start site; `None` means `⌊N/2⌋`.
    pub initial_site: Option<usize>,
    pub boundary_hit_threshold: f64,
    /// `L` for the recorded `E_{L,N−L}`.
    pub block_size: usize,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            t_max: 60.0,
            dt: 0.1,
            propagator: Propagator::Spectral,
            rk4_substep: 1e-3,
            initial_site: None,
            boundary_hit_threshold: 1e-6,
            block_size: 1,
        }
    }
}

impl EvolutionConfig {
    pub fn start_site(&self, n_sites: usize) -> usize {
        self.initial_site.unwrap_or(n_sites / 2)
    }

    pub fn validate(&self, n_sites: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.t_max > 0.0) || !self.t_max.is_finite() {
            return bad(format!("t_max must be > 0, got {}", self.t_max));
        }
        if !(self.dt > 0.0) || self.dt > self.t_max {
            return bad(format!("dt must be in (0, t_max], got {}", self.dt));
        }
        if self.propagator == Propagator::Rk4 && !(self.rk4_substep > 0.0 && self.rk4_substep <= self.dt) {
            return bad(format!("rk4 substep must be in (0, dt], got {}", self.rk4_substep));
        }
        if !(self.boundary_hit_threshold > 0.0) {
            return bad("boundary hit threshold must be > 0".into());
        }
        if self.block_size > n_sites {
            return Err(Error::BlockSizeOutOfRange {
                block_size: self.block_size,
                n_sites,
            });
        }
        crate::state::check_site(self.start_site(n_sites), n_sites)
    }

    /// Recording times `0, dt, 2dt, …, ≤ t_max`.
    pub fn times(&self) -> Vec<f64> {
        let steps = (self.t_max / self.dt + 1e-9).floor() as usize;
        (0..=steps).map(|k| k as f64 * self.dt).collect()
    }

    pub fn describe(&self, n_sites: usize) -> String {
        format!(
            "t_max={} dt={} propagator={} rk4_substep={} initial_site={} boundary_hit_threshold={} block_size={}",
            self.t_max,
            self.dt,
            self.propagator,
            self.rk4_substep,
            self.start_site(n_sites),
            self.boundary_hit_threshold,
            self.block_size
        )
    }
}

/// The wave packet `ψ_site = 1`.
pub fn initial_packet(n_sites: usize, site: usize) -> Result<OneParticleState> {
    OneParticleState::delta(n_sites, site)
}

/// Exact propagation `ψ(t) = Σ_k e^{−iE_k t} ⟨v_k|ψ(0)⟩ v_k`.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    spectrum: SpectrumResult,
}

impl SpectralPropagator {
    pub fn new(params: &HarperParams) -> Result<Self> {
        Ok(Self {
            spectrum: full_spectrum(params)?,
        })
    }

    pub fn from_spectrum(spectrum: SpectrumResult) -> Self {
        Self { spectrum }
    }

    pub fn spectrum(&self) -> &SpectrumResult {
        &self.spectrum
    }

    /// Eigenbasis coefficients `⟨v_k|ψ⟩`.
    pub fn coefficients(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let v = &self.spectrum.eigenvectors;
        (0..self.spectrum.len())
            .map(|k| v.column(k).iter().zip(psi).map(|(&vk, &p)| p * vk).sum())
            .collect()
    }

    /// `ψ(t)` from precomputed coefficients; `t` may be negative.
    pub fn evolve_coefficients(&self, coeffs: &[Complex64], t: f64) -> Vec<Complex64> {
        let v = &self.spectrum.eigenvectors;
        let n = v.nrows();
        let phased: Vec<Complex64> = coeffs
            .iter()
            .zip(&self.spectrum.eigenvalues)
            .map(|(&c, &e)| c * Complex64::from_polar(1.0, -e * t))
            .collect();
        let mut out = vec![ZERO; n];
        for (k, &ck) in phased.iter().enumerate() {
            for (o, &vnk) in out.iter_mut().zip(v.column(k).iter()) {
                *o += ck * vnk;
            }
        }
        out
    }

    pub fn propagate(&self, psi: &[Complex64], t: f64) -> Vec<Complex64> {
        self.evolve_coefficients(&self.coefficients(psi), t)
    }
}

/// Fixed-step RK4 integrator for `dψ/dt = −iHψ`.
#[derive(Debug, Clone)]
pub struct Rk4Propagator {
    potentials: Vec<f64>,
    boundary: Boundary,
}

impl Rk4Propagator {
    pub fn new(params: &HarperParams) -> Self {
        Self {
            potentials: potentials(params),
            boundary: params.boundary,
        }
    }

    fn derivative(&self, psi: &[Complex64], out: &mut [Complex64]) {
        apply_hamiltonian(&self.potentials, self.boundary, psi, out);
        for o in out.iter_mut() {
            *o = Complex64::new(o.im, -o.re);
        }
    }

    /// Advance `psi` in place by `n_steps` steps of size `h`.
    pub fn advance(&self, psi: &mut [Complex64], h: f64, n_steps: usize) {
        let n = psi.len();
        let mut k1 = vec![ZERO; n];
        let mut k2 = vec![ZERO; n];
        let mut k3 = vec![ZERO; n];
        let mut k4 = vec![ZERO; n];
        let mut tmp = vec![ZERO; n];
        for _ in 0..n_steps {
            self.derivative(psi, &mut k1);
            for i in 0..n {
                tmp[i] = psi[i] + k1[i] * (h / 2.0);
            }
            self.derivative(&tmp, &mut k2);
            for i in 0..n {
                tmp[i] = psi[i] + k2[i] * (h / 2.0);
            }
            self.derivative(&tmp, &mut k3);
            for i in 0..n {
                tmp[i] = psi[i] + k3[i] * h;
            }
            self.derivative(&tmp, &mut k4);
            for i in 0..n {
                psi[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
            }
        }
    }
}

/// Recorded trajectory and observables of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub states: Vec<OneParticleState>,
    /// `‖ψ(t)‖²` before any renormalization.
    pub norms: Vec<f64>,
    pub variances: Vec<f64>,
    /// `E_{L,N−L}(t)` for `block_size`.
    pub entanglements: Vec<f64>,
    pub block_size: usize,
    pub initial_site: usize,
    /// First recorded time with `|ψ_1|² + |ψ_N|²` above the threshold.
    pub boundary_hit_time: Option<f64>,
}

impl TimeSeries {
    pub const CSV_HEADER: &'static str = "t,norm,variance,e_avg,e_s,participation,boundary_hit";

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.norms.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn csv_rows(&self) -> Vec<String> {
        (0..self.len())
            .map(|i| {
                let s = &self.states[i];
                let hit = self.boundary_hit_time.is_some_and(|th| self.times[i] >= th);
                format!(
                    "{},{:e},{:e},{:e},{:e},{:e},{}",
                    self.times[i],
                    self.norms[i],
                    self.variances[i],
                    self.entanglements[i],
                    state_linear_entropy(s),
                    participation_ratio(s),
                    u8::from(hit)
                )
            })
            .collect()
    }
}

/// Evolve the packet started at `config.start_site` and record observables
/// every `config.dt`.
pub fn evolve(params: &HarperParams, config: &EvolutionConfig) -> Result<TimeSeries> {
    params.validate()?;
    let n = params.n_sites;
    config.validate(n)?;
    let start = config.start_site(n);
    let psi0 = initial_packet(n, start)?;
    let times = config.times();

    let raw: Vec<Vec<Complex64>> = match config.propagator {
        Propagator::Spectral => {
            let prop = SpectralPropagator::new(params)?;
            let coeffs = prop.coefficients(psi0.amplitudes());
            times
                .par_iter()
                .map(|&t| {
                    if t == 0.0 {
                        psi0.amplitudes().to_vec()
                    } else {
                        prop.evolve_coefficients(&coeffs, t)
                    }
                })
                .collect()
        }
        Propagator::Rk4 => {
            let prop = Rk4Propagator::new(params);
            let n_sub = ((config.dt / config.rk4_substep).round() as usize).max(1);
            let h = config.dt / n_sub as f64;
            let mut psi = psi0.amplitudes().to_vec();
            let mut out = Vec::with_capacity(times.len());
            out.push(psi.clone());
            for &t in &times[1..] {
                prop.advance(&mut psi, h, n_sub);
                let drift = (psi.iter().map(|a| a.norm_sqr()).sum::<f64>() - 1.0).abs();
                if drift > RK4_MAX_NORM_DRIFT {
                    return Err(Error::Rk4Unstable { drift, t });
                }
                out.push(psi.clone());
            }
            out
        }
    };

    let mut series = TimeSeries {
        times,
        states: Vec::with_capacity(raw.len()),
        norms: Vec::with_capacity(raw.len()),
        variances: Vec::with_capacity(raw.len()),
        entanglements: Vec::with_capacity(raw.len()),
        block_size: config.block_size,
        initial_site: start,
        boundary_hit_time: None,
    };
    for (amps, &t) in raw.into_iter().zip(&series.times) {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        let state = OneParticleState::new(amps)?;
        let probs = state.probabilities();
        if series.boundary_hit_time.is_none() && probs[0] + probs[n - 1] > config.boundary_hit_threshold {
            series.boundary_hit_time = Some(t);
        }
        series.norms.push(norm);
        series.variances.push(variance(&state));
        series
            .entanglements
            .push(average_block_entropy(&state, config.block_size)?);
        series.states.push(state);
    }
    Ok(series)
}

/// `σ² = Σ (n − n̄)² |ψ_n|²` in plain site coordinates `n = 1..N`.
///
/// On a periodic chain this is only meaningful before the packet reaches the
/// edges.
pub fn variance(state: &OneParticleState) -> f64 {
    let probs = state.probabilities();
    let mean: f64 = probs.iter().enumerate().map(|(i, p)| (i + 1) as f64 * p).sum();
    probs
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let d = (i + 1) as f64 - mean;
            d * d * p
        })
        .sum()
}

/// `E_{L,N−L}(t)` at every recorded time.
pub fn entanglement_trace(series: &TimeSeries, block_size: usize) -> Result<Vec<f64>> {
    series
        .states
        .iter()
        .map(|s| average_block_entropy(s, block_size))
        .collect()
}

/// `⟨ψ|H|ψ⟩`.
pub fn energy_expectation(params: &HarperParams, state: &OneParticleState) -> f64 {
    let psi = state.amplitudes();
    let mut hpsi = vec![ZERO; psi.len()];
    apply_hamiltonian(&potentials(params), params.boundary, psi, &mut hpsi);
    psi.iter().zip(&hpsi).map(|(a, b)| (a.conj() * b).re).sum()
}

/// Power-law fit `σ²(t) ∝ t^α` on a time window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub t_lo: f64,
    pub t_hi: f64,
    pub alpha: f64,
    pub r_squared: f64,
    pub samples: usize,
    pub confident: bool,
}

impl ExponentFit {
    pub const CSV_HEADER: &'static str = "lambda,t_lo,t_hi,alpha,r_squared,confident_flag";

    pub fn csv_row(&self, lambda: f64) -> String {
        format!(
            "{},{},{},{:e},{:e},{}",
            lambda,
            self.t_lo,
            self.t_hi,
            self.alpha,
            self.r_squared,
            u8::from(self.confident)
        )
    }
}

/// Least-squares slope of `ln σ²` against `ln t` over `[t_lo, t_hi]`.
pub fn diffusion_exponent(series: &TimeSeries, t_lo: f64, t_hi: f64) -> Result<ExponentFit> {
    let win = |msg: String| Err(Error::FitWindow(msg));
    if !(t_lo > 0.0 && t_hi > t_lo) {
        return win(format!("need 0 < t_lo < t_hi, got [{t_lo}, {t_hi}]"));
    }
    let (first, last) = match (series.times.first(), series.times.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return win("empty series".into()),
    };
    let slack = 1e-9;
    if t_lo < first - slack || t_hi > last + slack {
        return win(format!(
            "[{t_lo}, {t_hi}] outside recorded range [{first}, {last}]"
        ));
    }
    if let Some(hit) = series.boundary_hit_time {
        if t_hi >= hit {
            return win(format!("window end {t_hi} is not before boundary hit at t = {hit}"));
        }
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = series
        .times
        .iter()
        .zip(&series.variances)
        .filter(|(&t, _)| t >= t_lo - slack && t <= t_hi + slack)
        .map(|(&t, &v)| (t, v))
        .unzip();
    if xs.len() < MIN_FIT_SAMPLES {
        return win(format!(
            "{} samples in window, need at least {MIN_FIT_SAMPLES}",
            xs.len()
        ));
    }
    if let Some(v) = ys.iter().find(|&&v| !(v > 0.0)) {
        return win(format!("non-positive variance {v} in window"));
    }
    let lx: Vec<f64> = xs.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    let alpha = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(ExponentFit {
        t_lo,
        t_hi,
        alpha,
        r_squared,
        samples: xs.len(),
        confident: r_squared >= CONFIDENT_R_SQUARED,
    })
}
