//! One-particle states and the closed-form entanglement formulas built on them.
//!
//! A one-particle state on `N` sites is `|Ψ⟩ = Σ_n ψ_n |0…1_n…0⟩`. Every
//! quantity in this module depends on the occupation probabilities `|ψ_n|²`
//! only, which are computed once at construction and cached on the state.
//!
//! Site indices are 1-based throughout the public interface.

use itertools::Itertools;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Norms below this are rejected as unnormalizable.
pub const MIN_NORM: f64 = 1e-12;

/// Default cap on the number of subsets visited by
/// [`average_block_entropy_enumerated`].
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

/// A normalized one-particle state.
#[derive(Debug, Clone, PartialEq)]
pub struct OneParticleState {
    amplitudes: Vec<Complex64>,
    probabilities: Vec<f64>,
}

impl OneParticleState {
    /// Build a state from raw amplitudes, rescaling to unit norm.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::TooFewSites {
                min: 2,
                got: amplitudes.len(),
            });
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm >= MIN_NORM) || !norm.is_finite() {
            return Err(Error::Unnormalizable { norm });
        }
        let amplitudes: Vec<Complex64> = amplitudes.into_iter().map(|a| a / norm).collect();
        let probabilities = amplitudes.iter().map(|a| a.norm_sqr()).collect();
        Ok(Self {
            amplitudes,
            probabilities,
        })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// The uniform state with every amplitude equal to `1/√N`.
    pub fn w_state(n_sites: usize) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::TooFewSites {
                min: 2,
                got: n_sites,
            });
        }
        let a = Complex64::new(1.0 / (n_sites as f64).sqrt(), 0.0);
        Ok(Self {
            amplitudes: vec![a; n_sites],
            probabilities: vec![1.0 / n_sites as f64; n_sites],
        })
    }

    /// The state fully localized on `site`.
    pub fn delta(n_sites: usize, site: usize) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::TooFewSites {
                min: 2,
                got: n_sites,
            });
        }
        check_site(site, n_sites)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); n_sites];
        amplitudes[site - 1] = Complex64::new(1.0, 0.0);
        let mut probabilities = vec![0.0; n_sites];
        probabilities[site - 1] = 1.0;
        Ok(Self {
            amplitudes,
            probabilities,
        })
    }

    /// Haar-random state: i.i.d. complex Gaussian amplitudes, normalized.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n_sites: usize) -> Result<Self> {
        let amplitudes = (0..n_sites)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im)
            })
            .collect();
        Self::new(amplitudes)
    }

    pub fn n_sites(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `|ψ_n|²` for `n = 1..N`, stored 0-based.
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Amplitude at 1-based `site`.
    pub fn amplitude(&self, site: usize) -> Result<Complex64> {
        check_site(site, self.n_sites())?;
        Ok(self.amplitudes[site - 1])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// `Σ_n |ψ_n|⁴`, the inverse participation ratio.
    pub fn ipr(&self) -> f64 {
        self.probabilities.iter().map(|p| p * p).sum()
    }
}

pub(crate) fn check_site(site: usize, n_sites: usize) -> Result<()> {
    if site == 0 || site > n_sites {
        return Err(Error::SiteOutOfRange { site, n_sites });
    }
    Ok(())
}

/// A subset of sites defining an `L` vs `N − L` bipartition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockSelection {
    n_sites: usize,
    sites: Vec<usize>,
}

impl BlockSelection {
    /// `sites` must be strictly increasing and within `1..=n_sites`.
    pub fn new(n_sites: usize, sites: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = sites.iter().find(|&&s| s == 0 || s > n_sites) {
            return Err(Error::SiteOutOfRange {
                site: bad,
                n_sites,
            });
        }
        if sites.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidBlock(format!(
                "sites must be strictly increasing, got {sites:?}"
            )));
        }
        Ok(Self { n_sites, sites })
    }

    pub fn empty(n_sites: usize) -> Self {
        Self {
            n_sites,
            sites: Vec::new(),
        }
    }

    pub fn full(n_sites: usize) -> Self {
        Self {
            n_sites,
            sites: (1..=n_sites).collect(),
        }
    }

    /// Sample a nonempty block uniformly: size in `1..=N`, then a uniform
    /// subset of that size.
    pub fn random_nonempty<R: Rng + ?Sized>(rng: &mut R, n_sites: usize) -> Self {
        let size = rng.random_range(1..=n_sites);
        let mut sites: Vec<usize> = rand::seq::index::sample(rng, n_sites, size)
            .into_iter()
            .map(|i| i + 1)
            .collect();
        sites.sort_unstable();
        Self { n_sites, sites }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn contains(&self, site: usize) -> bool {
        self.sites.binary_search(&site).is_ok()
    }

    pub fn complement(&self) -> Self {
        Self {
            n_sites: self.n_sites,
            sites: (1..=self.n_sites).filter(|&s| !self.contains(s)).collect(),
        }
    }

    /// Hyphen-joined site list, e.g. `1-2-5`. Empty blocks render as `none`.
    pub fn spec_string(&self) -> String {
        if self.sites.is_empty() {
            "none".to_string()
        } else {
            self.sites.iter().join("-")
        }
    }
}

/// Participation ratio `p = 1 / (N Σ|ψ_n|⁴)`, in `[1/N, 1]`.
pub fn participation_ratio(state: &OneParticleState) -> f64 {
    1.0 / (state.n_sites() as f64 * state.ipr())
}

/// Quantum state linear entropy `E_s = 1 − Σ|ψ_n|⁴`.
pub fn state_linear_entropy(state: &OneParticleState) -> f64 {
    (1.0 - state.ipr()).max(0.0)
}

fn two_s_one_minus_s(s: f64) -> f64 {
    (2.0 * s * (1.0 - s)).max(0.0)
}

/// Linear entropy between site `site` and the rest: `2(|ψ_n|² − |ψ_n|⁴)`.
pub fn site_entropy(state: &OneParticleState, site: usize) -> Result<f64> {
    check_site(site, state.n_sites())?;
    Ok(two_s_one_minus_s(state.probabilities()[site - 1]))
}

/// Linear entropy between `block` and its complement: `2(s − s²)` with `s`
/// the block's total occupation.
pub fn block_entropy(state: &OneParticleState, block: &BlockSelection) -> Result<f64> {
    if block.n_sites() != state.n_sites() {
        return Err(Error::InvalidBlock(format!(
            "block is over {} sites but the state has {}",
            block.n_sites(),
            state.n_sites()
        )));
    }
    let probs = state.probabilities();
    let s: f64 = block.sites().iter().map(|&n| probs[n - 1]).sum();
    Ok(two_s_one_minus_s(s))
}

fn check_block_size(n_sites: usize, block_size: usize) -> Result<()> {
    if block_size > n_sites {
        return Err(Error::BlockSizeOutOfRange {
            block_size,
            n_sites,
        });
    }
    Ok(())
}

/// `2L(N−L) / (N(N−1))`, the factor relating the block-averaged entropy to `E_s`.
pub fn block_average_factor(n_sites: usize, block_size: usize) -> f64 {
    let n = n_sites as f64;
    let l = block_size as f64;
    2.0 * l * (n - l) / (n * (n - 1.0))
}

/// Average of [`block_entropy`] over all blocks of size `block_size`, in
/// closed form: `2L(N−L)/(N(N−1)) · E_s`.
pub fn average_block_entropy(state: &OneParticleState, block_size: usize) -> Result<f64> {
    check_block_size(state.n_sites(), block_size)?;
    Ok(block_average_factor(state.n_sites(), block_size) * state_linear_entropy(state))
}

/// Number of `k`-subsets of an `n`-set.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Average of [`block_entropy`] over all `C(N, L)` blocks by explicit
/// enumeration, capped at [`DEFAULT_ENUMERATION_CAP`] subsets.
pub fn average_block_entropy_enumerated(
    state: &OneParticleState,
    block_size: usize,
) -> Result<f64> {
    average_block_entropy_enumerated_with_cap(state, block_size, DEFAULT_ENUMERATION_CAP)
}

pub fn average_block_entropy_enumerated_with_cap(
    state: &OneParticleState,
    block_size: usize,
    cap: u128,
) -> Result<f64> {
    let n = state.n_sites();
    check_block_size(n, block_size)?;
    let count = binomial(n, block_size);
    if count > cap {
        return Err(Error::EnumerationTooLarge {
            n_sites: n,
            block_size,
            count,
            cap,
        });
    }
    let probs = state.probabilities();
    let total: f64 = (0..n)
        .combinations(block_size)
        .map(|subset| two_s_one_minus_s(subset.iter().map(|&i| probs[i]).sum()))
        .sum();
    Ok(total / count as f64)
}

/// Block-averaged entropy expressed through the participation ratio:
/// `2L(N−L)/(N(N−1)) · (1 − 1/(Np))`.
pub fn entropy_from_participation(n_sites: usize, block_size: usize, p: f64) -> Result<f64> {
    if n_sites < 2 {
        return Err(Error::TooFewSites {
            min: 2,
            got: n_sites,
        });
    }
    check_block_size(n_sites, block_size)?;
    let n = n_sites as f64;
    // 1e-12 slack absorbs rounding in p computed from a delta or uniform state
    if !(p >= 1.0 / n - 1e-12 && p <= 1.0 + 1e-12) {
        return Err(Error::ParticipationOutOfRange { p, n_sites });
    }
    let e_s = (1.0 - 1.0 / (n * p)).max(0.0);
    Ok(block_average_factor(n_sites, block_size) * e_s)
}

/// Average squared pairwise concurrence, `4/(N(N−1)) · (1 − 1/(Np))`.
pub fn mean_square_concurrence(state: &OneParticleState) -> f64 {
    let n = state.n_sites() as f64;
    let p = participation_ratio(state);
    4.0 / (n * (n - 1.0)) * (1.0 - 1.0 / (n * p)).max(0.0)
}

/// Block-averaged entropy from the average squared concurrence:
/// `L(N−L)/2 · ⟨C²⟩`.
pub fn bipartite_from_pairwise(n_sites: usize, block_size: usize, mean_c2: f64) -> f64 {
    let l = block_size as f64;
    l * (n_sites as f64 - l) / 2.0 * mean_c2
}

/// Per-site entropies `E^{(n)}` for `n = 1..N`.
pub fn entropy_distribution(state: &OneParticleState) -> Vec<f64> {
    state
        .probabilities()
        .iter()
        .map(|&p| two_s_one_minus_s(p))
        .collect()
}

/// All scalar entanglement/localization measures of a state in one pass.
#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementSummary {
    pub n_sites: usize,
    pub e_s: f64,
    pub p: f64,
    pub mean_c2: f64,
    pub site_entropies: Vec<f64>,
}

impl EntanglementSummary {
    pub fn of(state: &OneParticleState) -> Self {
        Self {
            n_sites: state.n_sites(),
            e_s: state_linear_entropy(state),
            p: participation_ratio(state),
            mean_c2: mean_square_concurrence(state),
            site_entropies: entropy_distribution(state),
        }
    }

    /// Closed-form `E_{L,N−L}`; `block_size` is clamped to `N`.
    pub fn average_block_entropy(&self, block_size: usize) -> f64 {
        block_average_factor(self.n_sites, block_size.min(self.n_sites)) * self.e_s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-14;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() < tol
    }

    #[test]
    fn make_state_rescales() {
        let s = OneParticleState::from_real(&[2.0, 0.0]).unwrap();
        assert_eq!(s.amplitudes()[0], Complex64::new(1.0, 0.0));
        assert_eq!(s.amplitudes()[1], Complex64::new(0.0, 0.0));

        let s = OneParticleState::from_real(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        for a in s.amplitudes() {
            assert!(close(a.re, 0.5, TOL) && a.im == 0.0);
        }
    }

    #[test]
    fn make_state_errors() {
        assert!(matches!(
            OneParticleState::from_real(&[0.0, 0.0]),
            Err(Error::Unnormalizable { .. })
        ));
        assert!(matches!(
            OneParticleState::from_real(&[1.0]),
            Err(Error::TooFewSites { .. })
        ));
        assert!(OneParticleState::from_real(&[1e-13, 0.0]).is_err());
        assert!(OneParticleState::from_real(&[f64::NAN, 1.0]).is_err());
        assert!(OneParticleState::w_state(1).is_err());
    }

    #[test]
    fn w_state_values() {
        let s = OneParticleState::w_state(2).unwrap();
        for a in s.amplitudes() {
            assert!(close(a.re, 1.0 / 2f64.sqrt(), TOL));
        }
        let s = OneParticleState::w_state(4).unwrap();
        assert!(s.probabilities().iter().all(|&p| p == 0.25));
        let s = OneParticleState::w_state(144).unwrap();
        assert!(close(participation_ratio(&s), 1.0, 1e-12));
    }

    #[test]
    fn participation_examples() {
        for n in [2, 7, 30] {
            let w = OneParticleState::w_state(n).unwrap();
            assert!(close(participation_ratio(&w), 1.0, 1e-12));
            let d = OneParticleState::delta(n, n / 2 + 1).unwrap();
            assert!(close(participation_ratio(&d), 1.0 / n as f64, TOL));
        }
        let s = OneParticleState::from_real(&[3f64.sqrt() / 2.0, 0.5]).unwrap();
        assert!(close(participation_ratio(&s), 0.8, 1e-14));
        assert!(close(state_linear_entropy(&s), 3.0 / 8.0, 1e-14));
    }

    #[test]
    fn state_entropy_examples() {
        for n in [2, 5, 12] {
            let w = OneParticleState::w_state(n).unwrap();
            assert!(close(state_linear_entropy(&w), 1.0 - 1.0 / n as f64, TOL));
            let d = OneParticleState::delta(n, 1).unwrap();
            assert_eq!(state_linear_entropy(&d), 0.0);
        }
    }

    #[test]
    fn site_entropy_examples() {
        let s = OneParticleState::from_real(&[1.0, 1.0, 0.0]).unwrap();
        assert_eq!(site_entropy(&s, 3).unwrap(), 0.0);
        assert!(close(site_entropy(&s, 1).unwrap(), 0.5, TOL));
        let w = OneParticleState::w_state(4).unwrap();
        for n in 1..=4 {
            assert!(close(site_entropy(&w, n).unwrap(), 3.0 / 8.0, TOL));
        }
        assert!(matches!(
            site_entropy(&w, 0),
            Err(Error::SiteOutOfRange { .. })
        ));
        assert!(site_entropy(&w, 5).is_err());
    }

    #[test]
    fn block_entropy_examples() {
        let w = OneParticleState::w_state(4).unwrap();
        assert_eq!(block_entropy(&w, &BlockSelection::empty(4)).unwrap(), 0.0);
        assert_eq!(block_entropy(&w, &BlockSelection::full(4)).unwrap(), 0.0);
        let b = BlockSelection::new(4, vec![1, 2]).unwrap();
        assert!(close(block_entropy(&w, &b).unwrap(), 0.5, TOL));
        assert!(block_entropy(&w, &BlockSelection::full(5)).is_err());
    }

    #[test]
    fn block_selection_validation() {
        assert!(BlockSelection::new(4, vec![2, 1]).is_err());
        assert!(BlockSelection::new(4, vec![1, 1]).is_err());
        assert!(BlockSelection::new(4, vec![0]).is_err());
        assert!(BlockSelection::new(4, vec![5]).is_err());
        let b = BlockSelection::new(6, vec![1, 2, 5]).unwrap();
        assert_eq!(b.spec_string(), "1-2-5");
        assert_eq!(b.complement().sites(), &[3, 4, 6]);
        assert_eq!(BlockSelection::empty(3).spec_string(), "none");
    }

    #[test]
    fn average_block_entropy_w_state() {
        for n in 2..=12usize {
            let w = OneParticleState::w_state(n).unwrap();
            for l in 0..=n {
                let expect = 2.0 * (l * (n - l)) as f64 / (n * n) as f64;
                assert!(close(average_block_entropy(&w, l).unwrap(), expect, TOL));
            }
            if n % 2 == 0 {
                assert!(close(average_block_entropy(&w, n / 2).unwrap(), 0.5, TOL));
            }
        }
        let w = OneParticleState::w_state(4).unwrap();
        assert!(average_block_entropy(&w, 5).is_err());
    }

    #[test]
    fn enumerated_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = OneParticleState::random(&mut rng, 9).unwrap();
        let l1 = average_block_entropy_enumerated(&s, 1).unwrap();
        assert!(close(l1, 2.0 / 9.0 * state_linear_entropy(&s), 1e-15));

        let w = OneParticleState::w_state(4).unwrap();
        assert!(close(average_block_entropy_enumerated(&w, 2).unwrap(), 0.5, TOL));

        let s = OneParticleState::random(&mut rng, 10).unwrap();
        let enumerated = average_block_entropy_enumerated(&s, 3).unwrap();
        assert!(close(enumerated, average_block_entropy(&s, 3).unwrap(), 1e-12));
    }

    #[test]
    fn enumeration_cap() {
        let w = OneParticleState::w_state(30).unwrap();
        assert!(matches!(
            average_block_entropy_enumerated(&w, 15),
            Err(Error::EnumerationTooLarge { .. })
        ));
        assert!(average_block_entropy_enumerated_with_cap(&w, 2, 10).is_err());
        assert!(average_block_entropy_enumerated_with_cap(&w, 2, 435).is_ok());
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(12, 6), 924);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(30, 15), 155_117_520);
    }

    #[test]
    fn participation_relation() {
        assert_eq!(entropy_from_participation(10, 3, 0.1).unwrap(), 0.0);
        let n = 10.0;
        assert!(close(
            entropy_from_participation(10, 1, 1.0).unwrap(),
            2.0 / n * (1.0 - 1.0 / n),
            TOL
        ));
        assert!(entropy_from_participation(10, 1, 0.05).is_err());
        assert!(entropy_from_participation(10, 1, 1.5).is_err());
        assert!(entropy_from_participation(10, 11, 0.5).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = OneParticleState::random(&mut rng, 20).unwrap();
        let p = participation_ratio(&s);
        for l in 0..=20 {
            let a = entropy_from_participation(20, l, p).unwrap();
            assert!(close(a, average_block_entropy(&s, l).unwrap(), 1e-12));
        }
    }

    #[test]
    fn concurrence_examples() {
        let bell = OneParticleState::w_state(2).unwrap();
        assert!(close(mean_square_concurrence(&bell), 1.0, 1e-14));
        let d = OneParticleState::delta(6, 2).unwrap();
        assert_eq!(mean_square_concurrence(&d), 0.0);
        for n in [3, 8, 50] {
            let w = OneParticleState::w_state(n).unwrap();
            assert!(close(
                mean_square_concurrence(&w),
                4.0 / (n * n) as f64,
                1e-14
            ));
        }
    }

    #[test]
    fn pairwise_examples() {
        assert_eq!(bipartite_from_pairwise(10, 3, 0.0), 0.0);
        assert!(close(bipartite_from_pairwise(4, 2, 0.25), 0.5, TOL));
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let s = OneParticleState::random(&mut rng, 8).unwrap();
            let via_c2 = bipartite_from_pairwise(8, 3, mean_square_concurrence(&s));
            assert!(close(via_c2, average_block_entropy(&s, 3).unwrap(), 1e-12));
        }
    }

    #[test]
    fn distribution_examples() {
        let n = 7;
        let w = OneParticleState::w_state(n).unwrap();
        let expect = 2.0 * (1.0 / n as f64 - 1.0 / (n * n) as f64);
        assert!(entropy_distribution(&w)
            .iter()
            .all(|&e| close(e, expect, TOL)));
        let d = OneParticleState::delta(n, 3).unwrap();
        assert!(entropy_distribution(&d).iter().all(|&e| e == 0.0));
    }

    #[test]
    fn summary_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = OneParticleState::random(&mut rng, 13).unwrap();
        let sum = EntanglementSummary::of(&s);
        let n = 13.0;
        assert!(close(sum.e_s, 1.0 - 1.0 / (n * sum.p), 1e-12));
        assert!(close(sum.mean_c2, 4.0 / (n * (n - 1.0)) * sum.e_s, 1e-12));
        assert_eq!(sum.site_entropies.len(), 13);
        assert!(close(
            sum.average_block_entropy(4),
            average_block_entropy(&s, 4).unwrap(),
            1e-15
        ));
    }
}
