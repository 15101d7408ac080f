//! UCCSD excitation enumeration and ansatz circuits.

use serde::{Deserialize, Serialize};

use super::{pauli_exponential, Circuit, Gate};
use crate::error::{Error, Result};
use crate::fermion::{hf_state, LadderPolynomial, OccupationState};
use crate::pauli::PauliSum;

/// Fermionic excitation `T = a†_{v0} a†_{v1} ⋯ a_{o1} a_{o0}` between spin
/// orbitals, with `occupied` and `virtuals` each strictly ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Excitation {
    pub occupied: Vec<usize>,
    pub virtuals: Vec<usize>,
}

impl Excitation {
    pub fn rank(&self) -> usize {
        self.occupied.len()
    }

    /// Ladder operators of `T`, leftmost first.
    fn ladder_ops(&self) -> Vec<(usize, bool)> {
        self.virtuals
            .iter()
            .map(|&v| (v, true))
            .chain(self.occupied.iter().rev().map(|&o| (o, false)))
            .collect()
    }

    fn adjoint_ops(&self) -> Vec<(usize, bool)> {
        self.ladder_ops()
            .into_iter()
            .rev()
            .map(|(p, c)| (p, !c))
            .collect()
    }

    /// `T|u⟩ = sign·|v⟩`, or `None` when `T` annihilates `|u⟩`.
    pub fn apply(&self, u: u64) -> Option<(u64, f64)> {
        let mut bits = u;
        let mut sign = 1.0;
        for (p, create) in self.ladder_ops().into_iter().rev() {
            let occupied = (bits >> p) & 1 == 1;
            if occupied == create {
                return None;
            }
            if (bits & ((1u64 << p) - 1)).count_ones() % 2 == 1 {
                sign = -sign;
            }
            bits ^= 1 << p;
        }
        Some((bits, sign))
    }

    /// Hermitian `R` with `T − T† = i·R` under Jordan-Wigner.
    pub fn generator(&self, width: usize) -> Result<PauliSum> {
        let mut poly = LadderPolynomial::product(&self.ladder_ops());
        poly.add_scaled(
            &LadderPolynomial::product(&self.adjoint_ops()),
            num_complex::Complex64::new(-1.0, 0.0),
        );
        poly.into_imaginary_sum(width, 1e-12)
    }

    /// Image under α↔β exchange, brought back to ascending order, with the
    /// sign picked up by the reordering.
    fn spin_flipped(&self, n_spatial: usize) -> (Excitation, f64) {
        let flip = |q: usize| if q < n_spatial { q + n_spatial } else { q - n_spatial };
        let mut sign = 1.0;
        let mut sorted = |v: &[usize]| {
            let mut out: Vec<usize> = v.iter().map(|&q| flip(q)).collect();
            for i in 0..out.len() {
                for j in 0..out.len() - 1 - i {
                    if out[j] > out[j + 1] {
                        out.swap(j, j + 1);
                        sign = -sign;
                    }
                }
            }
            out
        };
        let occupied = sorted(&self.occupied);
        let virtuals = sorted(&self.virtuals);
        (Excitation { occupied, virtuals }, sign)
    }
}

/// How excitations are bound to parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinPairing {
    /// One parameter per excitation.
    #[default]
    Independent,
    /// An excitation and its α↔β image share one parameter.
    Merged,
}

/// UCCSD ansatz: excitations plus their assignment to shared parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UccsdAnsatz {
    pub n_spatial: usize,
    pub n_electrons: usize,
    pub reference: OccupationState,
    pub excitations: Vec<Excitation>,
    /// Per parameter, the excitations it drives and their sign factors.
    pub groups: Vec<Vec<(usize, f64)>>,
    pub pairing: SpinPairing,
    #[serde(skip)]
    generators: Vec<PauliSum>,
}

impl UccsdAnsatz {
    pub fn width(&self) -> usize {
        2 * self.n_spatial
    }

    pub fn parameter_count(&self) -> usize {
        self.groups.len()
    }

    /// Pauli generator `R_e` of excitation `e` (`T_e − T_e† = i·R_e`).
    pub fn generator(&self, e: usize) -> &PauliSum {
        &self.generators[e]
    }

    /// The ansatz restricted to its first `k` parameter groups.
    pub fn prefix(&self, k: usize) -> Result<UccsdAnsatz> {
        if k > self.groups.len() {
            return Err(Error::invalid(format!(
                "prefix of {k} groups requested from an ansatz with {}",
                self.groups.len()
            )));
        }
        let mut out = self.clone();
        out.groups.truncate(k);
        Ok(out)
    }

    /// Per-excitation angles for a parameter vector, in application order.
    pub fn expand(&self, params: &[f64]) -> Result<Vec<(usize, f64)>> {
        if params.len() != self.groups.len() {
            return Err(Error::invalid(format!(
                "expected {} parameters, got {}",
                self.groups.len(),
                params.len()
            )));
        }
        Ok(self
            .groups
            .iter()
            .zip(params)
            .flat_map(|(g, &theta)| g.iter().map(move |&(e, s)| (e, s * theta)))
            .collect())
    }
}

/// [`uccsd_excitations_with`] with one parameter per excitation.
pub fn uccsd_excitations(n_electrons: usize, n_spatial: usize) -> Result<UccsdAnsatz> {
    uccsd_excitations_with(n_electrons, n_spatial, SpinPairing::Independent)
}

/// All `N`- and `S_z`-preserving singles and doubles out of the Aufbau
/// reference; singles first, each block lexicographic.
pub fn uccsd_excitations_with(
    n_electrons: usize,
    n_spatial: usize,
    pairing: SpinPairing,
) -> Result<UccsdAnsatz> {
    if n_spatial == 0 || n_spatial > 32 {
        return Err(Error::invalid(format!("unsupported orbital count {n_spatial}")));
    }
    if n_electrons == 0 || n_electrons >= 2 * n_spatial {
        return Err(Error::invalid(format!(
            "({n_electrons}e, {n_spatial}o) has no occupied-to-virtual excitations"
        )));
    }
    let reference = hf_state(n_electrons, n_spatial)?;
    let width = 2 * n_spatial;
    let spin = |q: usize| q >= n_spatial;
    let occ: Vec<usize> = (0..width).filter(|&q| reference.is_occupied(q)).collect();
    let vir: Vec<usize> = (0..width).filter(|&q| !reference.is_occupied(q)).collect();

    let mut singles = Vec::new();
    for &o in &occ {
        for &v in &vir {
            if spin(o) == spin(v) {
                singles.push(Excitation {
                    occupied: vec![o],
                    virtuals: vec![v],
                });
            }
        }
    }
    let mut doubles = Vec::new();
    for (i, &o0) in occ.iter().enumerate() {
        for &o1 in &occ[i + 1..] {
            for (j, &v0) in vir.iter().enumerate() {
                for &v1 in &vir[j + 1..] {
                    let sz_occ = spin(o0) as u8 + spin(o1) as u8;
                    let sz_vir = spin(v0) as u8 + spin(v1) as u8;
                    if sz_occ == sz_vir {
                        doubles.push(Excitation {
                            occupied: vec![o0, o1],
                            virtuals: vec![v0, v1],
                        });
                    }
                }
            }
        }
    }
    let excitations: Vec<Excitation> = singles.into_iter().chain(doubles).collect();

    let groups = match pairing {
        SpinPairing::Independent => (0..excitations.len()).map(|e| vec![(e, 1.0)]).collect(),
        SpinPairing::Merged => {
            let mut assigned = vec![false; excitations.len()];
            let mut groups = Vec::new();
            for e in 0..excitations.len() {
                if assigned[e] {
                    continue;
                }
                assigned[e] = true;
                let mut group = vec![(e, 1.0)];
                let (image, sign) = excitations[e].spin_flipped(n_spatial);
                if let Some(p) = excitations.iter().position(|x| *x == image) {
                    if !assigned[p] {
                        assigned[p] = true;
                        group.push((p, sign));
                    }
                }
                groups.push(group);
            }
            groups
        }
    };
    let generators = excitations
        .iter()
        .map(|e| e.generator(width))
        .collect::<Result<Vec<_>>>()?;
    Ok(UccsdAnsatz {
        n_spatial,
        n_electrons,
        reference,
        excitations,
        groups,
        pairing,
        generators,
    })
}

/// Reference preparation followed, group by group, by the single-step
/// product of `exp(θ·s·(T − T†))` over the group's excitations.
pub fn uccsd_circuit(ansatz: &UccsdAnsatz, params: &[f64]) -> Result<Circuit> {
    let angles = ansatz.expand(params)?;
    let width = ansatz.width();
    let mut c = Circuit::new(width);
    for q in 0..width {
        if ansatz.reference.is_occupied(q) {
            c.push_unchecked(Gate::X(q));
        }
    }
    for (e, theta) in angles {
        for term in ansatz.generator(e).terms() {
            c.append(&pauli_exponential(term, theta)?)?;
        }
    }
    Ok(c)
}
