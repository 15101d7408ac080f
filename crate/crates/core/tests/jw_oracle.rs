mod common;

use common::*;
use qcwb_core::fermion::{jordan_wigner, jw_number_operator, parse_fcidump, to_fcidump, MolecularIntegrals};
use qcwb_core::spectrum::{diagonalize, eigensystem, sector_ground_state};
use qcwb_core::statevector::Statevector;

#[test]
fn pauli_matrices_match_kronecker_products() {
    let (_, h) = fixture("h2o2_2e2o");
    let m = h.to_matrix().unwrap();
    assert!(max_abs(&(m - dense(&h))) < 1e-12);
    let (_, h) = fixture("h2o2_6e4o");
    let m = h.to_matrix().unwrap();
    assert!(max_abs(&(m - dense(&h))) < 1e-12);
}

#[test]
fn jw_spectrum_matches_occupation_basis_per_sector() {
    for (name, _) in FIXTURES {
        let (mi, h) = fixture(name);
        let n = mi.n_spatial;
        let es = eigensystem(&h).unwrap();
        let mut from_jw = es.eigenvalues();
        let mut oracle = Vec::new();
        for na in 0..=n as u32 {
            for nb in 0..=n as u32 {
                oracle.extend(sorted_eigenvalues(occupation_hamiltonian(&mi, &sector(n, na, nb))));
            }
        }
        oracle.sort_by(f64::total_cmp);
        from_jw.sort_by(f64::total_cmp);
        assert_eq!(oracle.len(), from_jw.len());
        let worst = oracle.iter().zip(&from_jw).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-9, "{name}: {worst}");
    }
}

#[test]
fn jw_commutes_with_number_operator() {
    for (name, _) in FIXTURES {
        let (mi, h) = fixture(name);
        // [H, N] has entries H_ij·(n_j − n_i); every Pauli term maps |b⟩ to |b ^ x⟩.
        let mut worst: f64 = 0.0;
        let width = mi.n_qubits();
        let mut by_x: std::collections::BTreeMap<u64, Vec<_>> = Default::default();
        for t in h.terms() {
            by_x.entry(t.x_mask()).or_default().push(t.clone());
        }
        for b in 0..1u64 << width {
            for (x, ts) in &by_x {
                let out = b ^ x;
                let dn = out.count_ones() as f64 - b.count_ones() as f64;
                if dn == 0.0 {
                    continue;
                }
                let mut elem = c(0.0, 0.0);
                for t in ts {
                    let y = (t.x_mask() & t.z_mask()).count_ones();
                    let iy = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)][(y % 4) as usize];
                    let s = if (t.z_mask() & b).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                    elem += iy * s * t.coefficient;
                }
                worst = worst.max(elem.norm() * dn.abs());
            }
        }
        assert!(worst < 1e-10, "{name}: {worst}");
    }
    let (_, h) = fixture("h2o2_2e2o");
    let n = jw_number_operator(4).unwrap();
    let (hm, nm) = (h.to_matrix().unwrap(), n.to_matrix().unwrap());
    assert!(max_abs(&(&hm * &nm - &nm * &hm)) < 1e-10);
}

#[test]
fn fixture_round_trips_through_fcidump() {
    for (name, _) in FIXTURES {
        let mi = parse_fcidump(&fixture_text(name)).unwrap();
        let back = parse_fcidump(&to_fcidump(&mi)).unwrap();
        assert_eq!(mi, back);
    }
}

#[test]
fn two_orbital_ground_state_structure() {
    let (mi, h) = fixture("h2o2_2e2o");
    let r = diagonalize(&h).unwrap();
    let (e0, psi) = sector_ground_state(&h, &mi.reference()).unwrap();
    assert!((r.eigenvalues[0] - e0).abs() < 1e-12);
    let amps = &r.eigenvectors[0];
    assert_eq!(amps[0].bitstring, "0101");
    assert_eq!(amps[1].bitstring, "1010");
    assert!(amps[0].re.abs() > amps[1].re.abs() && amps[1].re.abs() > 0.05);
    assert!((psi.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn two_orbital_triplet_is_degenerate() {
    let (_, h) = fixture("h2o2_2e2o");
    let m = h.to_matrix().unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut states = Vec::new();
    for (idx, amp) in [(vec![0b1100], vec![1.0]), (vec![0b0110, 0b1001], vec![s, -s]), (vec![0b0011], vec![1.0])] {
        let mut v = vec![c(0.0, 0.0); 16];
        for (i, a) in idx.iter().zip(amp) {
            v[*i] = c(a, 0.0);
        }
        states.push(Statevector::from_amplitudes(4, v).unwrap());
    }
    let energies: Vec<f64> = states.iter().map(|s| s.expectation(&h).unwrap()).collect();
    for e in &energies {
        assert!((e - energies[0]).abs() < 1e-9, "{energies:?}");
    }
    for (st, e) in states.iter().zip(&energies) {
        let v = nalgebra::DVector::from_column_slice(st.amplitudes());
        let r = &m * &v - &v * c(*e, 0.0);
        assert!(r.norm() < 1e-9, "not an eigenvector: {}", r.norm());
    }
    let (e0, _) = sector_ground_state(&h, &qcwb_core::fermion::hf_state(2, 2).unwrap()).unwrap();
    assert!(energies[0] > e0);
}

#[test]
fn lowest_triplet_components_agree_on_four_orbitals() {
    let (mi, _) = fixture("h2o2_6e4o");
    let up = sorted_eigenvalues(occupation_hamiltonian(&mi, &sector(4, 4, 2)))[0];
    let down = sorted_eigenvalues(occupation_hamiltonian(&mi, &sector(4, 2, 4)))[0];
    let zero = sorted_eigenvalues(occupation_hamiltonian(&mi, &sector(4, 3, 3)));
    assert!((up - down).abs() < 1e-9);
    assert!(zero.iter().any(|e| (e - up).abs() < 1e-9));
}

#[test]
fn sector_oracle_is_the_global_minimum_on_fixtures() {
    for (name, scale) in FIXTURES {
        let (mi, h) = fixture(name);
        let e = eigensystem(&h).unwrap().eigenvalues();
        let (sector_e0, _) = sector_ground_state(&h, &mi.reference()).unwrap();
        assert!((e[0] - sector_e0).abs() < 1e-10, "{name}");
        assert!((oracle_ground(&mi, &mi.reference()) - sector_e0).abs() < 1e-9);
        assert!(e[0] > 0.0 && *e.last().unwrap() < scale, "{name}: {} {}", e[0], e.last().unwrap());
    }
}

#[test]
fn hubbard_dimer_closed_form() {
    // Two sites, hopping −t, on-site U: singlet ground (U − √(U² + 16t²))/2.
    let (t, u) = (0.4, 1.3);
    let mut mi = MolecularIntegrals::zeros(2, 2).unwrap();
    mi.set_h(0, 1, -t);
    mi.set_g(0, 0, 0, 0, u);
    mi.set_g(1, 1, 1, 1, u);
    let h = jordan_wigner(&mi).unwrap();
    let (e0, _) = sector_ground_state(&h, &mi.reference()).unwrap();
    let exact = (u - (u * u + 16.0 * t * t).sqrt()) / 2.0;
    assert!((e0 - exact).abs() < 1e-12, "{e0} vs {exact}");
}
