//! Brute-force verifier in the full `2^N` qubit Hilbert space.
//!
//! Basis convention: qubit 1 is the most significant bit of the basis index,
//! and `|1⟩` marks the occupied site. A one-particle amplitude `ψ_n` therefore
//! sits at index `1 << (N − n)`.
//!
//! Reduced density matrices are built by summing outer products over the
//! traced-out bitstrings; the `2^N × 2^N` projector is never formed.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{block_entropy, BlockSelection, OneParticleState};

pub const MAX_EMBED_QUBITS: usize = 14;
pub const MAX_KEPT_QUBITS: usize = 12;
/// Oracle and closed form must agree to this.
pub const VERIFY_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A pure state of `n_qubits` qubits as a dense amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FullStateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl FullStateVector {
    /// Wrap a dense vector; it must have length `2^n_qubits` and unit norm.
    pub fn new(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if n_qubits > MAX_EMBED_QUBITS {
            return Err(Error::OracleSizeLimit {
                what: "n_qubits",
                got: n_qubits,
                max: MAX_EMBED_QUBITS,
            });
        }
        if amplitudes.len() != 1 << n_qubits {
            return Err(Error::InvalidParameter(format!(
                "expected {} amplitudes for {n_qubits} qubits, got {}",
                1usize << n_qubits,
                amplitudes.len()
            )));
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "full state vector not normalized: |Ψ|² = {norm_sqr}"
            )));
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Basis index of the state with only `site` (1-based) in `|1⟩`.
    pub fn one_hot_index(n_qubits: usize, site: usize) -> usize {
        1 << (n_qubits - site)
    }
}

/// Place `ψ_n` on the basis state whose `n`-th qubit alone is `|1⟩`.
pub fn embed_one_particle(state: &OneParticleState) -> Result<FullStateVector> {
    let n = state.n_sites();
    if n > MAX_EMBED_QUBITS {
        return Err(Error::OracleSizeLimit {
            what: "n_sites",
            got: n,
            max: MAX_EMBED_QUBITS,
        });
    }
    let mut amplitudes = vec![ZERO; 1 << n];
    for (site, &a) in (1..=n).zip(state.amplitudes()) {
        amplitudes[FullStateVector::one_hot_index(n, site)] = a;
    }
    Ok(FullStateVector {
        n_qubits: n,
        amplitudes,
    })
}

/// A reduced density matrix over `n_qubits` kept qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dimension(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        let d = self.dimension();
        let mut acc = 0.0;
        for i in 0..d {
            for j in 0..d {
                acc += (self.entries[(i, j)] * self.entries[(j, i)]).re;
            }
        }
        acc
    }

    /// `max |ρ_ij − conj(ρ_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dimension();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues of the Hermitian part, ascending.
    ///
    /// Rows and columns that are identically zero are split off first; each
    /// contributes an exact zero eigenvalue. The solver can return NaN on
    /// large, highly degenerate zero blocks, which partial traces of
    /// one-particle states produce in abundance.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        let d = herm.nrows();
        let support: Vec<usize> = (0..d)
            .filter(|&i| herm.row(i).iter().any(|z| *z != Complex64::new(0.0, 0.0)))
            .collect();
        let reduced = DMatrix::from_fn(support.len(), support.len(), |i, j| {
            herm[(support[i], support[j])]
        });
        let mut ev: Vec<f64> = if support.is_empty() {
            Vec::new()
        } else {
            SymmetricEigen::new(reduced).eigenvalues.iter().copied().collect()
        };
        ev.resize(d, 0.0);
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Hermitian, unit trace, and PSD down to `-tol`.
    pub fn is_valid(&self, tol: f64) -> bool {
        self.hermiticity_error() < tol
            && (self.trace() - Complex64::new(1.0, 0.0)).norm() < tol
            && self.eigenvalues().first().is_none_or(|&e| e >= -tol)
    }
}

/// `ρ = Tr_{complement}(|Ψ⟩⟨Ψ|)` over the qubits in `keep`.
///
/// Row/column index bits follow the order of `keep.sites()`, first kept
/// qubit most significant.
pub fn partial_trace(full: &FullStateVector, keep: &BlockSelection) -> Result<DensityMatrix> {
    let n = full.n_qubits();
    if keep.n_sites() != n {
        return Err(Error::InvalidBlock(format!(
            "block is over {} qubits but the state has {n}",
            keep.n_sites()
        )));
    }
    if keep.is_empty() {
        return Err(Error::InvalidBlock("cannot keep zero qubits".into()));
    }
    let l = keep.len();
    if l > MAX_KEPT_QUBITS {
        return Err(Error::OracleSizeLimit {
            what: "kept qubits",
            got: l,
            max: MAX_KEPT_QUBITS,
        });
    }
    let kept_offsets = scatter_offsets(n, keep.sites());
    let traced = keep.complement();
    let traced_offsets = scatter_offsets(n, traced.sites());

    let dim = 1 << l;
    let mut rho = DMatrix::from_element(dim, dim, ZERO);
    let psi = full.amplitudes();
    let mut column = vec![ZERO; dim];
    for &base in &traced_offsets {
        let mut any = false;
        for (slot, &off) in column.iter_mut().zip(&kept_offsets) {
            *slot = psi[base | off];
            any |= *slot != ZERO;
        }
        if !any {
            continue;
        }
        for (a, &va) in column.iter().enumerate() {
            if va == ZERO {
                continue;
            }
            for (b, &vb) in column.iter().enumerate() {
                rho[(a, b)] += va * vb.conj();
            }
        }
    }
    Ok(DensityMatrix {
        n_qubits: l,
        entries: rho,
    })
}

/// For each local bitstring over `sites` (first site most significant),
/// the corresponding global basis-index offset.
fn scatter_offsets(n_qubits: usize, sites: &[usize]) -> Vec<usize> {
    let k = sites.len();
    (0..1usize << k)
        .map(|local| {
            sites.iter().enumerate().fold(0, |acc, (pos, &site)| {
                if local >> (k - 1 - pos) & 1 == 1 {
                    acc | (1 << (n_qubits - site))
                } else {
                    acc
                }
            })
        })
        .collect()
}

/// `1 − Tr(ρ²)`.
pub fn linear_entropy(rho: &DensityMatrix) -> f64 {
    1.0 - rho.purity()
}

/// Oracle vs closed-form comparison for one state and block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockVerification {
    pub n_sites: usize,
    pub block: BlockSelection,
    pub oracle_value: f64,
    pub closed_form_value: f64,
    pub abs_diff: f64,
    pub pass: bool,
}

impl BlockVerification {
    pub const CSV_HEADER: &'static str =
        "n_sites,block_spec,oracle_value,closed_form_value,abs_diff,pass";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:e},{:e},{:e},{}",
            self.n_sites,
            self.block.spec_string(),
            self.oracle_value,
            self.closed_form_value,
            self.abs_diff,
            self.pass
        )
    }
}

pub fn verify_block_formula(
    state: &OneParticleState,
    block: &BlockSelection,
) -> Result<BlockVerification> {
    verify_block_formula_with_tolerance(state, block, VERIFY_TOLERANCE)
}

/// Embed, trace out the complement of `block`, and compare the linear entropy
/// with [`block_entropy`]. Empty or oversized blocks are traced from the
/// complementary side, which has the same purity for a pure state.
pub fn verify_block_formula_with_tolerance(
    state: &OneParticleState,
    block: &BlockSelection,
    tolerance: f64,
) -> Result<BlockVerification> {
    let full = embed_one_particle(state)?;
    let closed_form_value = block_entropy(state, block)?;
    let keep = if block.is_empty() || block.len() > MAX_KEPT_QUBITS {
        block.complement()
    } else {
        block.clone()
    };
    let oracle_value = if keep.is_empty() {
        // both sides empty only when N = 0, which states cannot be
        0.0
    } else {
        linear_entropy(&partial_trace(&full, &keep)?)
    };
    let abs_diff = (oracle_value - closed_form_value).abs();
    Ok(BlockVerification {
        n_sites: state.n_sites(),
        block: block.clone(),
        oracle_value,
        closed_form_value,
        abs_diff,
        pass: abs_diff < tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn embed_two_sites() {
        let s = OneParticleState::new(vec![c(0.6), Complex64::new(0.0, 0.8)]).unwrap();
        let full = embed_one_particle(&s).unwrap();
        // |00⟩, |01⟩, |10⟩, |11⟩
        assert_eq!(full.amplitudes()[0b10], c(0.6));
        assert_eq!(full.amplitudes()[0b01], Complex64::new(0.0, 0.8));
        assert_eq!(full.amplitudes()[0b00], ZERO);
        assert_eq!(full.amplitudes()[0b11], ZERO);
    }

    #[test]
    fn embed_w3_and_norm() {
        let w = OneParticleState::w_state(3).unwrap();
        let full = embed_one_particle(&w).unwrap();
        for (i, a) in full.amplitudes().iter().enumerate() {
            if i.count_ones() == 1 {
                assert!((a.re - 1.0 / 3f64.sqrt()).abs() < 1e-15);
            } else {
                assert_eq!(*a, ZERO);
            }
        }
        assert!((full.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn embed_size_limit() {
        let w = OneParticleState::w_state(15).unwrap();
        assert!(matches!(
            embed_one_particle(&w),
            Err(Error::OracleSizeLimit { .. })
        ));
    }

    #[test]
    fn trace_keep_all_is_projector() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = OneParticleState::random(&mut rng, 3).unwrap();
        let full = embed_one_particle(&s).unwrap();
        let rho = partial_trace(&full, &BlockSelection::full(3)).unwrap();
        let psi = full.amplitudes();
        for i in 0..8 {
            for j in 0..8 {
                assert!((rho.entries()[(i, j)] - psi[i] * psi[j].conj()).norm() < 1e-15);
            }
        }
        assert!(linear_entropy(&rho).abs() < 1e-14);
        assert!(rho.is_valid(1e-12));
    }

    #[test]
    fn single_qubit_reduced_matrix() {
        let s = OneParticleState::new(vec![c(0.6), Complex64::new(0.0, 0.8)]).unwrap();
        let full = embed_one_particle(&s).unwrap();
        let rho = partial_trace(&full, &BlockSelection::new(2, vec![1]).unwrap()).unwrap();
        let e = rho.entries();
        assert!((e[(0, 0)] - c(1.0 - 0.36)).norm() < 1e-15);
        assert!((e[(1, 1)] - c(0.36)).norm() < 1e-15);
        assert!(e[(0, 1)].norm() < 1e-15 && e[(1, 0)].norm() < 1e-15);
        let expect = 2.0 * (0.36 - 0.36 * 0.36);
        assert!((linear_entropy(&rho) - expect).abs() < 1e-15);
    }

    #[test]
    fn product_state_qubit_is_pure() {
        // |0⟩ ⊗ (a|0⟩ + b|1⟩) on 2 qubits
        let full = FullStateVector::new(2, vec![c(0.6), c(0.8), ZERO, ZERO]).unwrap();
        let rho = partial_trace(&full, &BlockSelection::new(2, vec![1]).unwrap()).unwrap();
        assert!((rho.entries()[(0, 0)] - c(1.0)).norm() < 1e-15);
        assert!(rho.entries()[(1, 1)].norm() < 1e-15);
        assert!(linear_entropy(&rho).abs() < 1e-15);
    }

    #[test]
    fn linear_entropy_maximally_mixed() {
        let full = FullStateVector::new(
            2,
            vec![c(1.0 / 2f64.sqrt()), ZERO, ZERO, c(1.0 / 2f64.sqrt())],
        )
        .unwrap();
        let rho = partial_trace(&full, &BlockSelection::new(2, vec![2]).unwrap()).unwrap();
        assert!((linear_entropy(&rho) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn trace_errors() {
        let w = OneParticleState::w_state(4).unwrap();
        let full = embed_one_particle(&w).unwrap();
        assert!(partial_trace(&full, &BlockSelection::empty(4)).is_err());
        assert!(partial_trace(&full, &BlockSelection::full(5)).is_err());
        assert!(FullStateVector::new(2, vec![c(1.0); 3]).is_err());
        assert!(FullStateVector::new(2, vec![c(1.0); 4]).is_err());
    }

    #[test]
    fn verify_examples() {
        let w = OneParticleState::w_state(4).unwrap();
        let v = verify_block_formula(&w, &BlockSelection::new(4, vec![1, 2]).unwrap()).unwrap();
        assert!((v.oracle_value - 0.5).abs() < 1e-14);
        assert!((v.closed_form_value - 0.5).abs() < 1e-14);
        assert!(v.pass);

        let d = OneParticleState::delta(5, 3).unwrap();
        for sites in [vec![], vec![3], vec![1, 2], vec![1, 2, 3, 4, 5]] {
            let v = verify_block_formula(&d, &BlockSelection::new(5, sites).unwrap()).unwrap();
            assert!(v.oracle_value.abs() < 1e-15 && v.closed_form_value == 0.0 && v.pass);
        }
    }

    #[test]
    fn verify_random_n10() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let s = OneParticleState::random(&mut rng, 10).unwrap();
            let b = BlockSelection::random_nonempty(&mut rng, 10);
            let v = verify_block_formula(&s, &b).unwrap();
            worst = worst.max(v.abs_diff);
        }
        assert!(worst < 1e-10, "worst {worst}");
    }

    #[test]
    fn one_particle_block_structure() {
        // weight-0 sector holds 1 − s, weight-1 sector is the L×L block ψ_i ψ_j*
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = OneParticleState::random(&mut rng, 6).unwrap();
        let full = embed_one_particle(&s).unwrap();
        let keep = BlockSelection::new(6, vec![2, 4, 5]).unwrap();
        let rho = partial_trace(&full, &keep).unwrap();
        let mass: f64 = keep.sites().iter().map(|&n| s.probabilities()[n - 1]).sum();
        assert!((rho.entries()[(0, 0)].re - (1.0 - mass)).abs() < 1e-14);
        for a in 0..8usize {
            for b in 0..8usize {
                let z = rho.entries()[(a, b)];
                let in_sector = (a == 0 && b == 0) || (a.count_ones() == 1 && b.count_ones() == 1);
                if !in_sector {
                    assert!(z.norm() < 1e-15);
                }
            }
        }
        let csv = verify_block_formula(&s, &keep).unwrap().csv_row();
        assert!(csv.starts_with("6,2-4-5,"));
    }

    #[test]
    fn spectrum_of_sparse_reduced_matrix() {
        // 128×128 with rank 2; the unreduced solve returned NaN here
        let amps = [
            (-0.336516187868013, 0.29793966386502213),
            (0.04472344016419802, 0.05720605003372783),
            (-0.2812404848189804, 0.06398496834654865),
            (0.32890014698785897, 0.30306922026986965),
            (0.06259382301430011, -0.31264268881899787),
            (0.25947382580426087, -0.31456043689585717),
            (0.34248117392337096, -0.29876104318543173),
            (-0.1861846145470786, -0.018572826890304168),
        ];
        let s = OneParticleState::new(amps.iter().map(|&(a, b)| Complex64::new(a, b)).collect())
            .unwrap();
        let keep = BlockSelection::new(8, vec![1, 2, 4, 5, 6, 7, 8]).unwrap();
        let rho = partial_trace(&embed_one_particle(&s).unwrap(), &keep).unwrap();
        let ev = rho.eigenvalues();
        assert_eq!(ev.len(), 128);
        assert!(ev.iter().all(|e| e.is_finite() && *e > -1e-14));
        let p3 = s.probabilities()[2];
        assert!((ev[127] - (1.0 - p3)).abs() < 1e-12 && (ev[126] - p3).abs() < 1e-12);
        assert!(rho.is_valid(1e-12));
    }
}
