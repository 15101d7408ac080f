#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use qcwb_core::fermion::{jordan_wigner, parse_fcidump, MolecularIntegrals, OccupationState};
use qcwb_core::pauli::{PauliSum, PauliTerm};

pub type C = Complex64;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Shipped fixtures and their spectral scale (shift 0).
pub const FIXTURES: [(&str, f64); 3] = [
    ("h2o2_2e2o", 2.26),
    ("h2o2_6e4o", 11.26),
    ("h2o2_10e6o", 27.8),
];

pub fn fixture_text(name: &str) -> String {
    let path = format!("{}/../../fixtures/{name}.fcidump", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn fixture(name: &str) -> (MolecularIntegrals, PauliSum) {
    let mi = parse_fcidump(&fixture_text(name)).unwrap();
    let h = jordan_wigner(&mi).unwrap();
    (mi, h)
}

pub fn sum(width: usize, terms: &[(&str, f64)]) -> PauliSum {
    PauliSum::from_terms(
        width,
        terms.iter().map(|&(l, c)| PauliTerm::from_label(l, c).unwrap()).collect(),
    )
    .unwrap()
}

fn single(ch: char) -> DMatrix<C> {
    let (o, i) = (c(0.0, 0.0), c(1.0, 0.0));
    match ch {
        'I' => DMatrix::from_row_slice(2, 2, &[i, o, o, i]),
        'X' => DMatrix::from_row_slice(2, 2, &[o, i, i, o]),
        'Y' => DMatrix::from_row_slice(2, 2, &[o, c(0.0, -1.0), c(0.0, 1.0), o]),
        'Z' => DMatrix::from_row_slice(2, 2, &[i, o, o, -i]),
        _ => panic!("bad axis {ch}"),
    }
}

/// Kronecker product of the label's single-qubit matrices, leftmost
/// character acting on the highest qubit.
pub fn label_matrix(label: &str) -> DMatrix<C> {
    label
        .chars()
        .fold(DMatrix::from_element(1, 1, c(1.0, 0.0)), |acc, ch| acc.kronecker(&single(ch)))
}

pub fn dense(h: &PauliSum) -> DMatrix<C> {
    let d = 1usize << h.width();
    let mut m = DMatrix::zeros(d, d);
    for t in h.terms() {
        m += label_matrix(&t.label()) * c(t.coefficient, 0.0);
    }
    m
}

/// `exp(i·t·M)` for Hermitian `M`.
pub fn expm_i(m: &DMatrix<C>, t: f64) -> DMatrix<C> {
    let eig = m.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C::from_polar(1.0, t * l)));
    v * d * v.adjoint()
}

/// `ladder` applied right to left on an occupation bitstring with
/// Jordan-Wigner signs; `None` when it annihilates the state.
pub fn apply_ladder(ops: &[(usize, bool)], bits: u64) -> Option<(u64, f64)> {
    let mut b = bits;
    let mut sign = 1.0;
    for &(p, create) in ops.iter().rev() {
        let occ = b >> p & 1 == 1;
        if occ == create {
            return None;
        }
        if (b & ((1u64 << p) - 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        b ^= 1 << p;
    }
    Some((b, sign))
}

/// Occupation states with `na` α and `nb` β electrons, ascending.
pub fn sector(n: usize, na: u32, nb: u32) -> Vec<u64> {
    let a = (1u64 << n) - 1;
    (0..1u64 << (2 * n))
        .filter(|b| (b & a).count_ones() == na && (b >> n).count_ones() == nb)
        .collect()
}

/// Second-quantized Hamiltonian built directly in the occupation basis.
pub fn occupation_hamiltonian(mi: &MolecularIntegrals, basis: &[u64]) -> DMatrix<f64> {
    let n = mi.n_spatial;
    let so = |p: usize, beta: bool| p + if beta { n } else { 0 };
    let k = basis.len();
    let mut m = DMatrix::zeros(k, k);
    let mut add = |ops: &[(usize, bool)], v: f64| {
        for (j, &b) in basis.iter().enumerate() {
            if let Some((out, s)) = apply_ladder(ops, b) {
                if let Ok(i) = basis.binary_search(&out) {
                    m[(i, j)] += v * s;
                }
            }
        }
    };
    add(&[], mi.core_energy);
    for sp in [false, true] {
        for p in 0..n {
            for q in 0..n {
                add(&[(so(p, sp), true), (so(q, sp), false)], mi.h(p, q));
            }
        }
    }
    for s1 in [false, true] {
        for s2 in [false, true] {
            for p in 0..n {
                for q in 0..n {
                    for r in 0..n {
                        for s in 0..n {
                            add(
                                &[(so(p, s1), true), (so(r, s2), true), (so(s, s2), false), (so(q, s1), false)],
                                0.5 * mi.g(p, q, r, s),
                            );
                        }
                    }
                }
            }
        }
    }
    m
}

pub fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut e: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

/// Lowest eigenvalue over the reference's `(N_α, N_β)` sector, from the
/// occupation-basis builder.
pub fn oracle_ground(mi: &MolecularIntegrals, reference: &OccupationState) -> f64 {
    let n = mi.n_spatial;
    let a = (1u64 << n) - 1;
    let basis = sector(n, (reference.bits & a).count_ones(), (reference.bits >> n).count_ones());
    sorted_eigenvalues(occupation_hamiltonian(mi, &basis))[0]
}

/// `⟨b|H|b⟩` from the Z part of `h`.
pub fn diagonal_energy(h: &PauliSum, b: u64) -> f64 {
    h.terms()
        .iter()
        .filter(|t| t.x_mask() == 0)
        .map(|t| if (t.z_mask() & b).count_ones() % 2 == 0 { t.coefficient } else { -t.coefficient })
        .sum()
}

pub fn max_abs(m: &DMatrix<C>) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Equal up to a global phase.
pub fn phase_equal(a: &DMatrix<C>, b: &DMatrix<C>, tol: f64) -> bool {
    let (mut k, mut best) = (0, -1.0);
    for (i, v) in b.iter().enumerate() {
        if v.norm() > best {
            best = v.norm();
            k = i;
        }
    }
    let ph = a.as_slice()[k] / b.as_slice()[k];
    if (ph.norm() - 1.0).abs() > tol {
        return false;
    }
    max_abs(&(a - b * ph)) < tol
}
