//! Pauli corrections and the brute-force search that derives them.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gates::{apply_in_place, GateMatrix, GateOp};
use crate::qstate::{Label, StateVector};

/// Fidelity a correction must reach to count as exact.
pub const EXACT_FIDELITY_TOL: f64 = 1e-10;

/// Single-qubit correction. `ZX` applies `X` first, then `Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Z,
    ZX,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Z, Pauli::ZX];

    /// `Z^z · X^x`.
    pub fn from_bits(z: u8, x: u8) -> Self {
        match (z & 1, x & 1) {
            (0, 0) => Pauli::I,
            (0, 1) => Pauli::X,
            (1, 0) => Pauli::Z,
            _ => Pauli::ZX,
        }
    }

    pub fn has_x(self) -> bool {
        matches!(self, Pauli::X | Pauli::ZX)
    }

    pub fn has_z(self) -> bool {
        matches!(self, Pauli::Z | Pauli::ZX)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Z => "Z",
            Pauli::ZX => "ZX",
        }
    }

    pub fn matrix(self) -> GateMatrix {
        match self {
            Pauli::I => GateMatrix::identity(2),
            Pauli::X => GateMatrix::x(),
            Pauli::Z => GateMatrix::z(),
            Pauli::ZX => GateMatrix::z().mul(&GateMatrix::x()).expect("2x2 product"),
        }
    }

    /// Gates in execution order.
    pub fn ops(self, target: Label) -> Vec<GateOp> {
        let mut ops = Vec::new();
        if self.has_x() {
            ops.push(GateOp::x(target));
        }
        if self.has_z() {
            ops.push(GateOp::z(target));
        }
        ops
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Tensor product of [`Pauli`]s on named qubits.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliWord {
    labels: Vec<Label>,
    paulis: Vec<Pauli>,
}

impl PauliWord {
    pub fn new(labels: &[Label], paulis: &[Pauli]) -> Result<Self> {
        if labels.len() != paulis.len() {
            return Err(Error::LabelCount {
                expected: labels.len(),
                got: paulis.len(),
            });
        }
        Ok(Self {
            labels: labels.to_vec(),
            paulis: paulis.to_vec(),
        })
    }

    pub fn identity(labels: &[Label]) -> Self {
        Self {
            labels: labels.to_vec(),
            paulis: vec![Pauli::I; labels.len()],
        }
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn paulis(&self) -> &[Pauli] {
        &self.paulis
    }

    pub fn get(&self, label: Label) -> Option<Pauli> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .map(|i| self.paulis[i])
    }

    pub fn is_identity(&self) -> bool {
        self.paulis.iter().all(|&p| p == Pauli::I)
    }

    pub fn ops(&self) -> Vec<GateOp> {
        self.labels
            .iter()
            .zip(&self.paulis)
            .flat_map(|(&l, p)| p.ops(l))
            .collect()
    }

    pub fn apply_in_place(&self, state: &mut StateVector) -> Result<()> {
        for op in self.ops() {
            apply_in_place(state, &op)?;
        }
        Ok(())
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        let mut out = state.clone();
        self.apply_in_place(&mut out)?;
        Ok(out)
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .labels
            .iter()
            .zip(&self.paulis)
            .map(|(l, p)| format!("{p}{l}"))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

impl Serialize for PauliWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Searches every word over `alphabet` on the qubits of `branch` and returns
/// the first, in lexicographic order (first qubit most significant), that maps
/// `branch` onto `target` up to global phase. Labels of `target` are ignored.
pub fn derive_correction(
    branch: &StateVector,
    target: &StateVector,
    alphabet: &[Pauli],
) -> Result<PauliWord> {
    if branch.dim() != target.dim() {
        return Err(Error::DimensionMismatch(branch.dim(), target.dim()));
    }
    for s in [branch, target] {
        if (s.norm_sqr() - 1.0).abs() > crate::qstate::NORM_TOL {
            return Err(Error::NotNormalized(s.norm_sqr()));
        }
    }
    if alphabet.is_empty() {
        return Err(Error::InvalidInput("empty Pauli alphabet".into()));
    }
    let n = branch.num_qubits();
    let total = alphabet.len().pow(n as u32);
    let mut best = 0.0f64;
    for idx in 0..total {
        let mut rest = idx;
        let mut paulis = vec![Pauli::I; n];
        for slot in paulis.iter_mut().rev() {
            *slot = alphabet[rest % alphabet.len()];
            rest /= alphabet.len();
        }
        let word = PauliWord::new(branch.labels(), &paulis)?;
        let f = word.apply(branch)?.fidelity(target)?;
        if f >= 1.0 - EXACT_FIDELITY_TOL {
            return Ok(word);
        }
        best = best.max(f);
    }
    Err(Error::NoExactCorrection(best))
}
