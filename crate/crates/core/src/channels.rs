//! Shared entangled channels: the three-qubit GHZ-like channel over particles
//! (2, 3, 4) and the five-qubit channel over particles (3, 4, 5, 6, 7).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gates::{GateMatrix, GateOp};
use crate::qstate::{Label, StateVector, NORM_TOL};
use crate::unitaries::uniformly_controlled_ry;

pub const CHANNEL_ONE_LABELS: [Label; 3] = [2, 3, 4];
pub const CHANNEL_TWO_LABELS: [Label; 5] = [3, 4, 5, 6, 7];

/// Basis indices (over particles 3..7) carrying β0..β3 in the two-qubit channel.
pub const CHANNEL_TWO_SUPPORT: [usize; 4] = [0b00000, 0b01100, 0b10011, 0b11111];

/// Real channel coefficients. Two values for the one-qubit protocol, four for
/// the two-qubit one. All nonzero, normalized, and `|β0| ≤ |βi|` for every
/// other `i`; equality is the deterministic case.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSpec {
    betas: Vec<f64>,
}

impl ChannelSpec {
    pub fn new(betas: &[f64]) -> Result<Self> {
        if betas.len() != 2 && betas.len() != 4 {
            return Err(Error::InvalidChannel(format!(
                "expected 2 or 4 beta values, got {}",
                betas.len()
            )));
        }
        for (i, b) in betas.iter().enumerate() {
            if !b.is_finite() {
                return Err(Error::InvalidChannel(format!("beta[{i}] must be finite")));
            }
            if *b == 0.0 {
                return Err(Error::InvalidChannel(format!("beta[{i}] must be nonzero")));
            }
        }
        let norm: f64 = betas.iter().map(|b| b * b).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidChannel(format!(
                "betas must be normalized (sum of squares is {norm})"
            )));
        }
        for (i, b) in betas.iter().enumerate().skip(1) {
            if betas[0].abs() > b.abs() + NORM_TOL {
                return Err(Error::InvalidChannel(format!(
                    "beta[0] must not exceed beta[{i}]"
                )));
            }
        }
        Ok(Self {
            betas: betas.to_vec(),
        })
    }

    pub fn one(beta0: f64, beta1: f64) -> Result<Self> {
        Self::new(&[beta0, beta1])
    }

    pub fn two(betas: [f64; 4]) -> Result<Self> {
        Self::new(&betas)
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn beta(&self, i: usize) -> f64 {
        self.betas[i]
    }

    pub fn len(&self) -> usize {
        self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.betas.is_empty()
    }

    /// `β0/βi`, clamped to `[−1, 1]`.
    pub fn ratio(&self, i: usize) -> f64 {
        (self.betas[0] / self.betas[i]).clamp(-1.0, 1.0)
    }

    /// All `|βi|` equal: the channel is maximally entangled and the protocol
    /// succeeds with certainty.
    pub fn is_degenerate(&self) -> bool {
        self.betas
            .iter()
            .all(|b| (b.abs() - self.betas[0].abs()).abs() <= NORM_TOL)
    }

    pub(crate) fn expect_len(&self, n: usize) -> Result<()> {
        if self.betas.len() != n {
            return Err(Error::InvalidChannel(format!(
                "this protocol needs {n} beta values, got {}",
                self.betas.len()
            )));
        }
        Ok(())
    }
}

/// `β0|000⟩ + β1|111⟩` over particles (2, 3, 4).
pub fn channel_one(spec: &ChannelSpec) -> Result<StateVector> {
    spec.expect_len(2)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); 8];
    amps[0b000] = Complex64::new(spec.beta(0), 0.0);
    amps[0b111] = Complex64::new(spec.beta(1), 0.0);
    StateVector::from_amplitudes(&CHANNEL_ONE_LABELS, amps)
}

/// `R` on particle 2, then fan-out CNOTs to 3 and 4.
pub fn channel_one_circuit(spec: &ChannelSpec) -> Result<Vec<GateOp>> {
    spec.expect_len(2)?;
    let (b0, b1) = (spec.beta(0), spec.beta(1));
    let r = GateOp::single("R", GateMatrix::r_channel(b0, b1)?, 2)?.with_angle(2.0 * b1.atan2(b0));
    Ok(vec![r, GateOp::cnot(2, 3)?, GateOp::cnot(2, 4)?])
}

/// `β0|00000⟩ + β1|01100⟩ + β2|10011⟩ + β3|11111⟩` over particles (3..7).
pub fn channel_two(spec: &ChannelSpec) -> Result<StateVector> {
    spec.expect_len(4)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); 32];
    for (k, &idx) in CHANNEL_TWO_SUPPORT.iter().enumerate() {
        amps[idx] = Complex64::new(spec.beta(k), 0.0);
    }
    StateVector::from_amplitudes(&CHANNEL_TWO_LABELS, amps)
}

/// Amplitude tree of the two-qubit channel: an `R_y` on 3 splits weight
/// between `(β0, β1)` and `(β2, β3)`, a multiplexed `R_y` on 4 (controlled by
/// 3) sets the ratio inside each pair, and CNOTs copy 4 to 5 and 3 to 6, 7.
pub fn channel_two_circuit(spec: &ChannelSpec) -> Result<Vec<GateOp>> {
    spec.expect_len(4)?;
    let b = spec.betas();
    let low = b[0].hypot(b[1]);
    let high = b[2].hypot(b[3]);
    let mut ops = vec![GateOp::ry(3, 2.0 * high.atan2(low))?];
    let angles = [2.0 * b[1].atan2(b[0]), 2.0 * b[3].atan2(b[2])];
    ops.extend(uniformly_controlled_ry(&[3], 4, &angles)?);
    ops.push(GateOp::cnot(4, 5)?);
    ops.push(GateOp::cnot(3, 6)?);
    ops.push(GateOp::cnot(3, 7)?);
    Ok(ops)
}

/// Runs `ops` on `|0…0⟩` over `labels`.
pub fn prepare(ops: &[GateOp], labels: &[Label]) -> Result<StateVector> {
    let mut s = StateVector::new_register(labels.len(), labels)?;
    for op in ops {
        crate::gates::apply_in_place(&mut s, op)?;
    }
    Ok(s)
}
