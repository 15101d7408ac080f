//! Gate-level circuit IR and synthesis.

mod metrics;
mod qpe;
mod synth;
mod uccsd;

pub use metrics::{compile_clifford_rz, compile_metrics, Basis, CircuitMetrics, MetricsAccumulator, TCountModel};
pub use qpe::{qpe_circuit, QpeCircuit};
pub use synth::{controlled_trotter, inverse_qft, pauli_exponential, qft, trotter_circuit};
pub use uccsd::{uccsd_circuit, uccsd_excitations, uccsd_excitations_with, Excitation, SpinPairing, UccsdAnsatz};

use std::fmt;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gates understood by the simulator and the metrics pass.
///
/// `RZ(θ) = diag(e^{-iθ/2}, e^{iθ/2})`, `PHASE(θ) = diag(1, e^{iθ})`,
/// `CPHASE(θ)` multiplies `|11⟩` by `e^{iθ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    X(usize),
    S(usize),
    Sdg(usize),
    Cnot { control: usize, target: usize },
    Rz { qubit: usize, angle: f64 },
    Crz { control: usize, target: usize, angle: f64 },
    Phase { qubit: usize, angle: f64 },
    CPhase { control: usize, target: usize, angle: f64 },
    Swap(usize, usize),
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::H(_) => "H",
            Gate::X(_) => "X",
            Gate::S(_) => "S",
            Gate::Sdg(_) => "SDG",
            Gate::Cnot { .. } => "CNOT",
            Gate::Rz { .. } => "RZ",
            Gate::Crz { .. } => "CRZ",
            Gate::Phase { .. } => "PHASE",
            Gate::CPhase { .. } => "CPHASE",
            Gate::Swap(..) => "SWAP",
        }
    }

    /// Qubits touched, in argument order.
    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::H(q) | Gate::X(q) | Gate::S(q) | Gate::Sdg(q) => (q, None),
            Gate::Rz { qubit, .. } | Gate::Phase { qubit, .. } => (qubit, None),
            Gate::Cnot { control, target }
            | Gate::Crz { control, target, .. }
            | Gate::CPhase { control, target, .. } => (control, Some(target)),
            Gate::Swap(a, b) => (a, Some(b)),
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rz { angle, .. }
            | Gate::Crz { angle, .. }
            | Gate::Phase { angle, .. }
            | Gate::CPhase { angle, .. } => Some(angle),
            _ => None,
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        self.qubits().1.is_some()
    }

    fn check(&self, width: usize) -> Result<()> {
        let (a, b) = self.qubits();
        for q in std::iter::once(a).chain(b) {
            if q >= width {
                return Err(Error::invalid(format!(
                    "{} acts on qubit {q} of a {width}-qubit circuit",
                    self.name()
                )));
            }
        }
        if b == Some(a) {
            return Err(Error::invalid(format!("{} on repeated qubit {a}", self.name())));
        }
        if let Some(t) = self.angle() {
            if !t.is_finite() {
                return Err(Error::NonFinite(format!("{} angle", self.name())));
            }
        }
        Ok(())
    }

    /// Same gate acting on `q + offset` for every qubit `q`.
    pub fn shifted(&self, offset: usize) -> Gate {
        let s = |q: usize| q + offset;
        match *self {
            Gate::H(q) => Gate::H(s(q)),
            Gate::X(q) => Gate::X(s(q)),
            Gate::S(q) => Gate::S(s(q)),
            Gate::Sdg(q) => Gate::Sdg(s(q)),
            Gate::Cnot { control, target } => Gate::Cnot {
                control: s(control),
                target: s(target),
            },
            Gate::Rz { qubit, angle } => Gate::Rz { qubit: s(qubit), angle },
            Gate::Crz { control, target, angle } => Gate::Crz {
                control: s(control),
                target: s(target),
                angle,
            },
            Gate::Phase { qubit, angle } => Gate::Phase { qubit: s(qubit), angle },
            Gate::CPhase { control, target, angle } => Gate::CPhase {
                control: s(control),
                target: s(target),
                angle,
            },
            Gate::Swap(a, b) => Gate::Swap(s(a), s(b)),
        }
    }

    /// Inverse gate.
    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::S(q) => Gate::Sdg(q),
            Gate::Sdg(q) => Gate::S(q),
            Gate::Rz { qubit, angle } => Gate::Rz { qubit, angle: -angle },
            Gate::Crz { control, target, angle } => Gate::Crz { control, target, angle: -angle },
            Gate::Phase { qubit, angle } => Gate::Phase { qubit, angle: -angle },
            Gate::CPhase { control, target, angle } => Gate::CPhase { control, target, angle: -angle },
            g => g,
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.qubits();
        write!(f, "{} {a}", self.name())?;
        if let Some(b) = b {
            write!(f, ",{b}")?;
        }
        if let Some(t) = self.angle() {
            write!(f, ",{t:e}")?;
        }
        Ok(())
    }
}

/// Ordered gate list over a fixed register plus a tracked global phase.
///
/// The represented unitary is `e^{i·global_phase} · G_last ⋯ G_first`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
    global_phase: f64,
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            gates: Vec::new(),
            global_phase: 0.0,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn global_phase(&self) -> f64 {
        self.global_phase
    }

    pub fn add_global_phase(&mut self, phase: f64) {
        self.global_phase += phase;
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.check(self.width)?;
        self.gates.push(gate);
        Ok(())
    }

    pub(crate) fn push_unchecked(&mut self, gate: Gate) {
        debug_assert!(gate.check(self.width).is_ok());
        self.gates.push(gate);
    }

    /// Appends `other` (which must not be wider) after this circuit.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.width > self.width {
            return Err(Error::WidthMismatch {
                expected: self.width,
                found: other.width,
            });
        }
        self.gates.extend_from_slice(&other.gates);
        self.global_phase += other.global_phase;
        Ok(())
    }

    /// The same circuit on a wider register.
    pub fn widened(&self, width: usize) -> Result<Circuit> {
        if width < self.width {
            return Err(Error::WidthMismatch {
                expected: self.width,
                found: width,
            });
        }
        Ok(Circuit {
            width,
            ..self.clone()
        })
    }

    /// Inverse circuit.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            width: self.width,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            global_phase: -self.global_phase,
        }
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    /// Dense unitary, column `j` = circuit applied to `|j⟩`.
    pub fn unitary(&self) -> Result<DMatrix<Complex64>> {
        let limit = crate::limits::DenseLimits::default().matrix_qubits;
        if self.width > limit {
            return Err(Error::OverDenseLimit {
                what: "circuit unitary",
                width: self.width,
                limit,
            });
        }
        let dim = 1usize << self.width;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for j in 0..dim {
            let mut col = vec![Complex64::new(0.0, 0.0); dim];
            col[j] = Complex64::new(1.0, 0.0);
            crate::statevector::apply_gates_raw(&mut col, &self.gates, self.global_phase);
            for (i, a) in col.into_iter().enumerate() {
                m[(i, j)] = a;
            }
        }
        Ok(m)
    }

    /// Line format: optional `WIDTH n`, optional `GPHASE θ`, then one
    /// `GATE q[,q2][,angle]` per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "WIDTH {}", self.width);
        if self.global_phase != 0.0 {
            let _ = writeln!(out, "GPHASE {:e}", self.global_phase);
        }
        for g in &self.gates {
            let _ = writeln!(out, "{g}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Circuit> {
        let mut width: Option<usize> = None;
        let mut phase = 0.0;
        let mut gates = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (name, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let args: Vec<&str> = rest
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .collect();
            let name = name.to_ascii_uppercase();
            let q = |k: usize| -> Result<usize> {
                args.get(k)
                    .ok_or_else(|| Error::parse(line_no, format!("{name} needs more arguments")))?
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad qubit index in {name}")))
            };
            let a = |k: usize| -> Result<f64> {
                let v: f64 = args
                    .get(k)
                    .ok_or_else(|| Error::parse(line_no, format!("{name} needs an angle")))?
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad angle in {name}")))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::parse(line_no, "non-finite angle"))
                }
            };
            let arity = match name.as_str() {
                "WIDTH" | "GPHASE" | "H" | "X" | "S" | "SDG" => 1,
                "CNOT" | "RZ" | "PHASE" | "SWAP" => 2,
                "CRZ" | "CPHASE" => 3,
                _ => return Err(Error::parse(line_no, format!("unknown gate {name:?}"))),
            };
            if args.len() != arity {
                return Err(Error::parse(line_no, format!("{name} takes {arity} arguments")));
            }
            let gate = match name.as_str() {
                "WIDTH" => {
                    width = Some(q(0)?);
                    continue;
                }
                "GPHASE" => {
                    phase += a(0)?;
                    continue;
                }
                "H" => Gate::H(q(0)?),
                "X" => Gate::X(q(0)?),
                "S" => Gate::S(q(0)?),
                "SDG" => Gate::Sdg(q(0)?),
                "CNOT" => Gate::Cnot { control: q(0)?, target: q(1)? },
                "RZ" => Gate::Rz { qubit: q(0)?, angle: a(1)? },
                "PHASE" => Gate::Phase { qubit: q(0)?, angle: a(1)? },
                "SWAP" => Gate::Swap(q(0)?, q(1)?),
                "CRZ" => Gate::Crz { control: q(0)?, target: q(1)?, angle: a(2)? },
                _ => Gate::CPhase { control: q(0)?, target: q(1)?, angle: a(2)? },
            };
            gates.push((line_no, gate));
        }
        let inferred = gates
            .iter()
            .map(|(_, g)| {
                let (a, b) = g.qubits();
                a.max(b.unwrap_or(0)) + 1
            })
            .max()
            .unwrap_or(0);
        let mut c = Circuit::new(width.unwrap_or(inferred));
        c.global_phase = phase;
        for (line_no, g) in gates {
            c.push(g).map_err(|e| Error::parse(line_no, e.to_string()))?;
        }
        Ok(c)
    }
}
