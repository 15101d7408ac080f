//! Exact diagonalization.
//!
//! The Hamiltonian matrix is split into the connected components of its
//! off-diagonal pattern (particle-number and spin sectors for molecular
//! Hamiltonians) and each block is diagonalized densely.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::{format_bits, OccupationState};
use crate::limits::DenseLimits;
use crate::pauli::{i_pow, PauliSum};
use crate::statevector::Statevector;

/// Amplitudes below this magnitude are left out of reports.
pub const REPORT_THRESHOLD: f64 = 1e-3;

/// Off-diagonal elements below this magnitude do not connect basis states.
const COUPLING_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Amplitude {
    pub bitstring: String,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub width: usize,
    pub threshold: f64,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Per eigenvalue, amplitudes with magnitude at least `threshold`,
    /// largest first.
    pub eigenvectors: Vec<Vec<Amplitude>>,
}

#[derive(Debug, Clone)]
struct EigenPair {
    value: f64,
    block: usize,
    vector: Vec<Complex64>,
}

/// Full eigendecomposition stored block by block.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    width: usize,
    blocks: Vec<Vec<u64>>,
    pairs: Vec<EigenPair>,
}

struct XGroups(Vec<(u64, Vec<(u64, Complex64)>)>);

impl XGroups {
    fn new(h: &PauliSum) -> Self {
        let mut by_x: std::collections::BTreeMap<u64, Vec<(u64, Complex64)>> = Default::default();
        for t in h.terms() {
            let (x, z) = (t.x_mask(), t.z_mask());
            by_x.entry(x)
                .or_default()
                .push((z, i_pow((x & z).count_ones()) * t.coefficient));
        }
        Self(by_x.into_iter().collect())
    }

    /// `⟨b ^ x|H|b⟩` contributions of one X-group.
    #[inline]
    fn element(zs: &[(u64, Complex64)], b: u64) -> Complex64 {
        zs.iter().fold(Complex64::new(0.0, 0.0), |acc, &(z, c)| {
            if (b & z).count_ones() % 2 == 0 {
                acc + c
            } else {
                acc - c
            }
        })
    }
}

fn find(parent: &mut [u32], mut i: u32) -> u32 {
    while parent[i as usize] != i {
        parent[i as usize] = parent[parent[i as usize] as usize];
        i = parent[i as usize];
    }
    i
}

/// Dense Hermitian matrix of `groups` restricted to `basis`.
fn block_matrix(groups: &XGroups, basis: &[u64], local: &[u32]) -> DMatrix<Complex64> {
    let k = basis.len();
    let mut m = DMatrix::<Complex64>::zeros(k, k);
    for (j, &b) in basis.iter().enumerate() {
        for (x, zs) in &groups.0 {
            let row = local[(b ^ x) as usize];
            if row == u32::MAX {
                continue;
            }
            m[(row as usize, j)] += XGroups::element(zs, b);
        }
    }
    m
}

/// Real parts of `⟨basis[i]|H|basis[j]⟩` as sparse rows; `basis` must be
/// sorted. For real states these fully determine the energy.
pub(crate) fn real_sector_rows(h: &PauliSum, basis: &[u64]) -> Vec<Vec<(u32, f64)>> {
    let groups = XGroups::new(h);
    basis
        .iter()
        .map(|&b| {
            let mut row: Vec<(u32, f64)> = groups
                .0
                .iter()
                .filter_map(|(x, zs)| {
                    let j = basis.binary_search(&(b ^ x)).ok()?;
                    let v = XGroups::element(zs, b ^ x).re;
                    (v != 0.0).then_some((j as u32, v))
                })
                .collect();
            row.sort_unstable_by_key(|e| e.0);
            row
        })
        .collect()
}

fn fix_phase(v: &mut [Complex64]) {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, a) in v.iter().enumerate() {
        let m = a.norm();
        if m > best_mag + 1e-12 {
            best = i;
            best_mag = m;
        }
    }
    if best_mag > 0.0 {
        let f = v[best].conj() / best_mag;
        for a in v.iter_mut() {
            *a *= f;
        }
        v[best] = Complex64::new(v[best].re, 0.0);
    }
}

fn solve_blocks(groups: &XGroups, width: usize, blocks: Vec<Vec<u64>>) -> Eigensystem {
    let dim = 1usize << width;
    let mut local = vec![u32::MAX; dim];
    let mut pairs = Vec::with_capacity(blocks.iter().map(Vec::len).sum());
    for (bi, basis) in blocks.iter().enumerate() {
        for (i, &b) in basis.iter().enumerate() {
            local[b as usize] = i as u32;
        }
        let m = block_matrix(groups, basis, &local);
        let eig = m.symmetric_eigen();
        let mut order: Vec<usize> = (0..basis.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        for k in order {
            let mut vector: Vec<Complex64> = eig.eigenvectors.column(k).iter().copied().collect();
            let norm = vector.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            for a in &mut vector {
                *a /= norm;
            }
            fix_phase(&mut vector);
            pairs.push(EigenPair {
                value: eig.eigenvalues[k],
                block: bi,
                vector,
            });
        }
        for &b in basis {
            local[b as usize] = u32::MAX;
        }
    }
    pairs.sort_by(|a, b| a.value.total_cmp(&b.value));
    Eigensystem {
        width,
        blocks,
        pairs,
    }
}

fn check_limit(width: usize, limit: usize) -> Result<()> {
    if width > limit {
        return Err(Error::OverDenseLimit {
            what: "diagonalization",
            width,
            limit,
        });
    }
    Ok(())
}

/// Full eigendecomposition of `h` (width at most the matrix limit).
pub fn eigensystem(h: &PauliSum) -> Result<Eigensystem> {
    eigensystem_with_limit(h, DenseLimits::default().matrix_qubits)
}

pub fn eigensystem_with_limit(h: &PauliSum, limit: usize) -> Result<Eigensystem> {
    let width = h.width();
    check_limit(width, limit)?;
    let dim = 1usize << width;
    let groups = XGroups::new(h);
    let mut parent: Vec<u32> = (0..dim as u32).collect();
    for (x, zs) in &groups.0 {
        if *x == 0 {
            continue;
        }
        for b in 0..dim as u64 {
            let partner = b ^ x;
            if partner < b {
                continue;
            }
            if XGroups::element(zs, b).norm() > COUPLING_TOLERANCE {
                let (ra, rb) = (find(&mut parent, b as u32), find(&mut parent, partner as u32));
                if ra != rb {
                    let (lo, hi) = (ra.min(rb), ra.max(rb));
                    parent[hi as usize] = lo;
                }
            }
        }
    }
    let mut slot = vec![u32::MAX; dim];
    let mut blocks: Vec<Vec<u64>> = Vec::new();
    for b in 0..dim as u32 {
        let r = find(&mut parent, b);
        if slot[r as usize] == u32::MAX {
            slot[r as usize] = blocks.len() as u32;
            blocks.push(Vec::new());
        }
        blocks[slot[r as usize] as usize].push(b as u64);
    }
    Ok(solve_blocks(&groups, width, blocks))
}

impl Eigensystem {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.value).collect()
    }

    pub fn value(&self, i: usize) -> f64 {
        self.pairs[i].value
    }

    /// Nonzero support of eigenvector `i` as `(basis index, amplitude)`.
    pub fn components(&self, i: usize) -> impl Iterator<Item = (u64, Complex64)> + '_ {
        let p = &self.pairs[i];
        self.blocks[p.block].iter().copied().zip(p.vector.iter().copied())
    }

    /// Eigenvector `i` as a full statevector.
    pub fn vector(&self, i: usize) -> Result<Statevector> {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << self.width];
        for (b, a) in self.components(i) {
            amps[b as usize] = a;
        }
        Statevector::from_amplitudes(self.width, amps)
    }

    pub fn report(&self, threshold: f64) -> SpectrumReport {
        let eigenvectors = (0..self.len())
            .map(|i| {
                let mut amps: Vec<(u64, Complex64)> =
                    self.components(i).filter(|(_, a)| a.norm() >= threshold).collect();
                amps.sort_by(|a, b| b.1.norm().total_cmp(&a.1.norm()).then(a.0.cmp(&b.0)));
                amps.into_iter()
                    .map(|(b, a)| Amplitude {
                        bitstring: format_bits(b, self.width),
                        re: a.re,
                        im: a.im,
                    })
                    .collect()
            })
            .collect();
        SpectrumReport {
            width: self.width,
            threshold,
            eigenvalues: self.eigenvalues(),
            eigenvectors,
        }
    }
}

/// Eigenvalues ascending with occupation-basis decompositions above
/// [`REPORT_THRESHOLD`].
pub fn diagonalize(h: &PauliSum) -> Result<SpectrumReport> {
    Ok(eigensystem(h)?.report(REPORT_THRESHOLD))
}

/// Lowest eigenvalue and its eigenvector.
pub fn ground_state(h: &PauliSum) -> Result<(f64, Statevector)> {
    let es = eigensystem(h)?;
    Ok((es.value(0), es.vector(0)?))
}

/// Basis states with the same α and β electron counts as `reference`.
pub fn sector_basis(reference: &OccupationState) -> Vec<u64> {
    let n = reference.n_spatial;
    let alpha_mask = (1u64 << n) - 1;
    let na = (reference.bits & alpha_mask).count_ones();
    let nb = (reference.bits >> n).count_ones();
    (0..1u64 << (2 * n))
        .filter(|b| (b & alpha_mask).count_ones() == na && (b >> n).count_ones() == nb)
        .collect()
}

/// Ground state of `h` projected onto the `(N_α, N_β)` sector of
/// `reference`.
pub fn sector_ground_state(h: &PauliSum, reference: &OccupationState) -> Result<(f64, Statevector)> {
    if reference.n_qubits() != h.width() {
        return Err(Error::WidthMismatch {
            expected: h.width(),
            found: reference.n_qubits(),
        });
    }
    check_limit(h.width(), DenseLimits::default().matrix_qubits)?;
    let es = solve_blocks(&XGroups::new(h), h.width(), vec![sector_basis(reference)]);
    Ok((es.value(0), es.vector(0)?))
}
