//! Pauli exponentials, product formulas and the quantum Fourier transform.

use std::f64::consts::PI;

use super::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliSum, PauliTerm};

/// Basis change, CNOT ladder and the qubit receiving the rotation.
struct Skeleton {
    pre: Vec<Gate>,
    ladder: Vec<Gate>,
    post: Vec<Gate>,
    pivot: usize,
}

fn skeleton(term: &PauliTerm) -> Result<Skeleton> {
    if term.is_identity() {
        return Err(Error::invalid(
            "identity term has no exponential circuit; treat it as a phase",
        ));
    }
    let support: Vec<usize> = (0..term.width())
        .filter(|&q| term.axis(q) != Pauli::I)
        .collect();
    let mut pre = Vec::new();
    let mut post = Vec::new();
    for &q in &support {
        match term.axis(q) {
            Pauli::X => {
                pre.push(Gate::H(q));
                post.push(Gate::H(q));
            }
            Pauli::Y => {
                pre.push(Gate::Sdg(q));
                pre.push(Gate::H(q));
                post.push(Gate::H(q));
                post.push(Gate::S(q));
            }
            _ => {}
        }
    }
    let ladder = support
        .windows(2)
        .map(|w| Gate::Cnot {
            control: w[0],
            target: w[1],
        })
        .collect();
    Ok(Skeleton {
        pre,
        ladder,
        post,
        pivot: *support.last().expect("non-identity term"),
    })
}

fn emit(c: &mut Circuit, sk: &Skeleton, rotation: Gate) {
    for &g in sk.pre.iter().chain(&sk.ladder) {
        c.push_unchecked(g);
    }
    c.push_unchecked(rotation);
    for &g in sk.ladder.iter().rev().chain(&sk.post) {
        c.push_unchecked(g);
    }
}

/// Circuit for `exp(i·angle·c·P)` where `c·P` is `term`. Exact, with no
/// leftover global phase.
pub fn pauli_exponential(term: &PauliTerm, angle: f64) -> Result<Circuit> {
    let sk = skeleton(term)?;
    let theta = -2.0 * term.coefficient * angle;
    if !theta.is_finite() {
        return Err(Error::NonFinite("rotation angle".into()));
    }
    let mut c = Circuit::new(term.width());
    emit(
        &mut c,
        &sk,
        Gate::Rz {
            qubit: sk.pivot,
            angle: theta,
        },
    );
    Ok(c)
}

/// First-order product formula for `exp(i·time·h)`: `n_steps` repetitions of
/// the per-term exponentials in canonical term order, each with angle
/// `time/n_steps`. The identity term goes into the global phase.
pub fn trotter_circuit(h: &PauliSum, time: f64, n_steps: usize) -> Result<Circuit> {
    trotter_impl(h, time, n_steps, None)
}

/// [`trotter_circuit`] controlled on `control`, a qubit above the system
/// register. Rotations become `CRZ`; the identity contribution becomes a
/// `PHASE` on the control. The result is `control + 1` qubits wide.
pub fn controlled_trotter(
    h: &PauliSum,
    time: f64,
    n_steps: usize,
    control: usize,
) -> Result<Circuit> {
    if control < h.width() {
        return Err(Error::invalid(format!(
            "control qubit {control} collides with the {}-qubit system register",
            h.width()
        )));
    }
    trotter_impl(h, time, n_steps, Some(control))
}

fn trotter_impl(h: &PauliSum, time: f64, n_steps: usize, control: Option<usize>) -> Result<Circuit> {
    if n_steps == 0 {
        return Err(Error::invalid("n_steps must be at least 1"));
    }
    if !time.is_finite() {
        return Err(Error::NonFinite("evolution time".into()));
    }
    let h = h.simplify();
    let dt = time / n_steps as f64;
    let width = control.map_or(h.width(), |c| c + 1);
    let mut step = Circuit::new(width);
    for term in h.terms() {
        if term.is_identity() {
            let phase = term.coefficient * dt;
            match control {
                None => step.add_global_phase(phase),
                Some(c) => step.push_unchecked(Gate::Phase { qubit: c, angle: phase }),
            }
            continue;
        }
        let sk = skeleton(term)?;
        let theta = -2.0 * term.coefficient * dt;
        let rotation = match control {
            None => Gate::Rz {
                qubit: sk.pivot,
                angle: theta,
            },
            Some(c) => Gate::Crz {
                control: c,
                target: sk.pivot,
                angle: theta,
            },
        };
        emit(&mut step, &sk, rotation);
    }
    let mut out = Circuit::new(width);
    for _ in 0..n_steps {
        out.append(&step)?;
    }
    Ok(out)
}

/// Forward QFT on qubits `0..n`: `|m⟩ → 2^{-n/2} Σ_x e^{2πi·m·x/2^n} |x⟩`
/// with qubit 0 the least-significant bit of both `m` and `x`.
pub fn qft(n: usize) -> Result<Circuit> {
    Ok(inverse_qft(n)?.inverse())
}

/// Exact inverse QFT on qubits `0..n` built from `H`, `CPHASE` and `SWAP`.
pub fn inverse_qft(n: usize) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::invalid("inverse QFT needs at least one qubit"));
    }
    let mut c = Circuit::new(n);
    for j in (0..n).rev() {
        for k in (j + 1..n).rev() {
            c.push_unchecked(Gate::CPhase {
                control: k,
                target: j,
                angle: -PI / (1u64 << (k - j)) as f64,
            });
        }
        c.push_unchecked(Gate::H(j));
    }
    for i in 0..n / 2 {
        c.push_unchecked(Gate::Swap(i, n - 1 - i));
    }
    Ok(c)
}
