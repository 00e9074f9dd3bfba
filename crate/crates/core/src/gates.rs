//! Gate matrices, labelled gate operations and their action on state vectors.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qstate::{Label, StateVector, MAX_QUBITS};

/// Maximum entry of `U†U − I` tolerated for a gate matrix.
pub const UNITARY_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square unitary matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct GateMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl GateMatrix {
    /// Checked constructor: `dim` must be a power of two and the matrix unitary
    /// within [`UNITARY_TOL`].
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        let m = Self::unchecked(dim, entries)?;
        let dev = m.unitarity_deviation();
        if dev.is_nan() || dev > UNITARY_TOL {
            return Err(Error::NonUnitary(dev));
        }
        Ok(m)
    }

    fn unchecked(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim < 2 || !dim.is_power_of_two() || dim > 1 << MAX_QUBITS {
            return Err(Error::InvalidGate(format!("dimension {dim} is not 2^k")));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(entries.len(), dim * dim));
        }
        Ok(Self { dim, entries })
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(
            dim,
            entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = ONE;
        }
        Self { dim, entries }
    }

    pub fn x() -> Self {
        Self {
            dim: 2,
            entries: vec![ZERO, ONE, ONE, ZERO],
        }
    }

    pub fn z() -> Self {
        Self {
            dim: 2,
            entries: vec![ONE, ZERO, ZERO, -ONE],
        }
    }

    pub fn h() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self {
            dim: 2,
            entries: vec![h, h, h, -h],
        }
    }

    pub fn s() -> Self {
        Self {
            dim: 2,
            entries: vec![ONE, ZERO, ZERO, Complex64::i()],
        }
    }

    pub fn t() -> Self {
        Self {
            dim: 2,
            entries: vec![ONE, ZERO, ZERO, Complex64::from_polar(1.0, FRAC_PI_4)],
        }
    }

    pub fn t_dagger() -> Self {
        Self {
            dim: 2,
            entries: vec![ONE, ZERO, ZERO, Complex64::from_polar(1.0, -FRAC_PI_4)],
        }
    }

    /// `R_y(θ) = [[cos θ/2, −sin θ/2], [sin θ/2, cos θ/2]]`.
    pub fn ry(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::NonFiniteAngle(theta));
        }
        let (s, c) = (theta / 2.0).sin_cos();
        Ok(Self::real_rotation(c, s))
    }

    /// Channel-preparation rotation `[[β0, −β1], [β1, β0]]`, mapping `|0⟩` to
    /// `β0|0⟩ + β1|1⟩`.
    pub fn r_channel(beta0: f64, beta1: f64) -> Result<Self> {
        let n = beta0 * beta0 + beta1 * beta1;
        if n.is_nan() || (n - 1.0).abs() > UNITARY_TOL {
            return Err(Error::InvalidChannel(format!(
                "beta pair must be normalized (sum of squares {n})"
            )));
        }
        Ok(Self::real_rotation(beta0, beta1))
    }

    fn real_rotation(c: f64, s: f64) -> Self {
        let (c, s) = (Complex64::new(c, 0.0), Complex64::new(s, 0.0));
        Self {
            dim: 2,
            entries: vec![c, -s, s, c],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &GateMatrix) -> Result<GateMatrix> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch(self.dim, rhs.dim));
        }
        let d = self.dim;
        let mut entries = vec![ZERO; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.entries[i * d + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..d {
                    entries[i * d + j] += a * rhs.entries[k * d + j];
                }
            }
        }
        Ok(GateMatrix { dim: d, entries })
    }

    pub fn adjoint(&self) -> GateMatrix {
        let d = self.dim;
        let mut entries = vec![ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                entries[j * d + i] = self.entries[i * d + j].conj();
            }
        }
        GateMatrix { dim: d, entries }
    }

    /// `max |(U†U − I)_ij|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let d = self.dim;
        let mut dev = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let mut acc = ZERO;
                for k in 0..d {
                    acc += self.entries[k * d + i].conj() * self.entries[k * d + j];
                }
                if i == j {
                    acc -= ONE;
                }
                dev = dev.max(acc.norm());
            }
        }
        dev
    }

    /// Entrywise `max |a_ij − b_ij|`.
    pub fn max_abs_diff(&self, other: &GateMatrix) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_imag(&self) -> f64 {
        self.entries.iter().map(|a| a.im.abs()).fold(0.0, f64::max)
    }

    /// Applies the matrix to a column vector.
    pub fn apply_to(&self, v: &[Complex64]) -> Vec<Complex64> {
        let d = self.dim;
        (0..d)
            .map(|i| (0..d).map(|k| self.entries[i * d + k] * v[k]).sum())
            .collect()
    }
}

/// A gate matrix bound to register labels. `targets[0]` is the most significant
/// qubit of the matrix index. Controls fire on value 1.
#[derive(Clone, Debug, PartialEq)]
pub struct GateOp {
    name: String,
    matrix: GateMatrix,
    targets: Vec<Label>,
    controls: Vec<Label>,
    angle: Option<f64>,
}

impl GateOp {
    pub fn new(
        name: impl Into<String>,
        matrix: GateMatrix,
        targets: &[Label],
        controls: &[Label],
    ) -> Result<Self> {
        if 1usize << targets.len() != matrix.dim() {
            return Err(Error::InvalidGate(format!(
                "{} targets for a {}x{} matrix",
                targets.len(),
                matrix.dim(),
                matrix.dim()
            )));
        }
        let all: Vec<Label> = targets.iter().chain(controls).copied().collect();
        for (i, l) in all.iter().enumerate() {
            if all[..i].contains(l) {
                return Err(Error::InvalidGate(format!("label {l} used twice")));
            }
        }
        Ok(Self {
            name: name.into(),
            matrix,
            targets: targets.to_vec(),
            controls: controls.to_vec(),
            angle: None,
        })
    }

    pub fn single(name: &str, matrix: GateMatrix, target: Label) -> Result<Self> {
        Self::new(name, matrix, &[target], &[])
    }

    pub fn x(target: Label) -> Self {
        Self::single("X", GateMatrix::x(), target).expect("valid")
    }

    pub fn z(target: Label) -> Self {
        Self::single("Z", GateMatrix::z(), target).expect("valid")
    }

    pub fn h(target: Label) -> Self {
        Self::single("H", GateMatrix::h(), target).expect("valid")
    }

    pub fn ry(target: Label, theta: f64) -> Result<Self> {
        Ok(Self::single("RY", GateMatrix::ry(theta)?, target)?.with_angle(theta))
    }

    pub fn cnot(control: Label, target: Label) -> Result<Self> {
        Self::new("CNOT", GateMatrix::x(), &[target], &[control])
    }

    pub fn cz(control: Label, target: Label) -> Result<Self> {
        Self::new("CZ", GateMatrix::z(), &[target], &[control])
    }

    pub fn with_angle(mut self, angle: f64) -> Self {
        self.angle = Some(angle);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn matrix(&self) -> &GateMatrix {
        &self.matrix
    }

    pub fn targets(&self) -> &[Label] {
        &self.targets
    }

    pub fn controls(&self) -> &[Label] {
        &self.controls
    }

    pub fn angle(&self) -> Option<f64> {
        self.angle
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        self.targets.iter().chain(&self.controls).copied()
    }

    /// Exactly one control, one target, and an `X` matrix.
    pub fn is_cnot(&self) -> bool {
        self.controls.len() == 1 && self.targets.len() == 1 && self.matrix == GateMatrix::x()
    }

    pub fn is_single_qubit(&self) -> bool {
        self.controls.is_empty() && self.targets.len() == 1
    }

    /// `GATE name target [control] [angle]`; multi-qubit target or control
    /// lists are comma-joined.
    pub fn netlist_line(&self) -> String {
        let join = |ls: &[Label]| {
            ls.iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut line = format!("GATE {} {}", self.name, join(&self.targets));
        if !self.controls.is_empty() {
            line.push(' ');
            line.push_str(&join(&self.controls));
        }
        if let Some(a) = self.angle {
            line.push_str(&format!(" {a:.17}"));
        }
        line
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.netlist_line())
    }
}

/// Applies `op` in place.
pub fn apply_in_place(state: &mut StateVector, op: &GateOp) -> Result<()> {
    let target_masks = op
        .targets()
        .iter()
        .map(|&l| state.mask(l))
        .collect::<Result<Vec<_>>>()?;
    let control_mask: usize = op
        .controls()
        .iter()
        .map(|&l| state.mask(l))
        .sum::<Result<usize>>()?;
    let all_targets: usize = target_masks.iter().sum();
    let k = target_masks.len();
    let sub_dim = 1usize << k;
    let offsets: Vec<usize> = (0..sub_dim)
        .map(|t| {
            (0..k)
                .filter(|j| t >> (k - 1 - j) & 1 == 1)
                .map(|j| target_masks[j])
                .sum()
        })
        .collect();

    let m = op.matrix();
    let dim = state.dim();
    let amps = state.amplitudes_mut();
    let mut block = vec![ZERO; sub_dim];
    for base in 0..dim {
        if base & all_targets != 0 || base & control_mask != control_mask {
            continue;
        }
        for (b, o) in block.iter_mut().zip(&offsets) {
            *b = amps[base | o];
        }
        for (row, o) in offsets.iter().enumerate() {
            amps[base | o] = (0..sub_dim).map(|col| m.get(row, col) * block[col]).sum();
        }
    }
    Ok(())
}

/// Returns `op` applied to `state`.
pub fn apply(state: &StateVector, op: &GateOp) -> Result<StateVector> {
    let mut out = state.clone();
    apply_in_place(&mut out, op)?;
    Ok(out)
}

/// Full matrix of `ops` executed left to right on a register with `labels`,
/// i.e. `ops[n-1] · … · ops[0]`.
pub fn compose(ops: &[GateOp], labels: &[Label]) -> Result<GateMatrix> {
    if ops.is_empty() {
        return Err(Error::InvalidGate("empty gate sequence".into()));
    }
    let n = labels.len();
    let dim = 1usize << n;
    let mut entries = vec![ZERO; dim * dim];
    for col in 0..dim {
        let mut s = StateVector::basis(labels, col)?;
        for op in ops {
            apply_in_place(&mut s, op)?;
        }
        for (row, a) in s.amplitudes().iter().enumerate() {
            entries[row * dim + col] = *a;
        }
    }
    GateMatrix::unchecked(dim, entries)
}
