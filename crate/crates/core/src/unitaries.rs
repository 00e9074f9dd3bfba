//! Bob's collective unitaries `U1` (particles 3, 5) and `U2` (particles 5, 6, 8),
//! their CNOT + `R_y` realizations, and a phase-insensitive matrix comparison.

use num_complex::Complex64;

use crate::channels::ChannelSpec;
use crate::error::{Error, Result};
use crate::gates::{GateMatrix, GateOp};
use crate::qstate::Label;

pub const U1_LABELS: [Label; 2] = [3, 5];
pub const U2_LABELS: [Label; 3] = [5, 6, 8];

/// `cos(θ/2) = β0/βi` with `θ ∈ [0, 2π]`.
pub fn rotation_angle(spec: &ChannelSpec, i: usize) -> f64 {
    2.0 * spec.ratio(i).acos()
}

fn radical(r: f64) -> f64 {
    (1.0 - r * r).max(0.0).sqrt()
}

/// `U1` over basis `|q3 q5⟩`: identity on `|00⟩` and `|11⟩`, and the block
/// `[[r, s], [−s, r]]` on `{|01⟩, |10⟩}` with `r = β0/β1`, `s = √(1 − r²)`.
pub fn u1_matrix(spec: &ChannelSpec) -> Result<GateMatrix> {
    spec.expect_len(2)?;
    let r = spec.ratio(1);
    let s = radical(r);
    #[rustfmt::skip]
    let m = [
        1.0, 0.0, 0.0, 0.0,
        0.0,   r,   s, 0.0,
        0.0,  -s,   r, 0.0,
        0.0, 0.0, 0.0, 1.0,
    ];
    GateMatrix::from_real(4, &m)
}

/// `U1 = C53 · C35 · (I⊗B) · C35 · (I⊗A) · C53` in execution order, with
/// `A = R_y(θ/2)`, `B = R_y(−θ/2)` on particle 5 and `cos(θ/2) = β0/β1`.
/// The inner four gates form a controlled-`R_y(θ)` from 3 onto 5.
pub fn u1_circuit(spec: &ChannelSpec) -> Result<Vec<GateOp>> {
    spec.expect_len(2)?;
    let theta = rotation_angle(spec, 1);
    Ok(vec![
        GateOp::cnot(5, 3)?,
        GateOp::ry(5, theta / 2.0)?,
        GateOp::cnot(3, 5)?,
        GateOp::ry(5, -theta / 2.0)?,
        GateOp::cnot(3, 5)?,
        GateOp::cnot(5, 3)?,
    ])
}

fn u_block(spec: &ChannelSpec, i: usize) -> [f64; 4] {
    let r = spec.ratio(i);
    let s = radical(r);
    [r, -s, s, r]
}

/// `U2 = diag(I, u2, u1, u3)` over basis `|q5 q6 q8⟩`, where
/// `u_i = R_y(θ_i)`, `cos(θ_i/2) = β0/βi`. The `(q5, q6)` sector selects the
/// block, so sector `01` gets `u2` and sector `10` gets `u1`.
pub fn u2_matrix(spec: &ChannelSpec) -> Result<GateMatrix> {
    spec.expect_len(4)?;
    let blocks = [
        [1.0, 0.0, 0.0, 1.0],
        u_block(spec, 2),
        u_block(spec, 1),
        u_block(spec, 3),
    ];
    let mut m = vec![0.0; 64];
    for (k, b) in blocks.iter().enumerate() {
        let o = 2 * k;
        m[o * 8 + o] = b[0];
        m[o * 8 + o + 1] = b[1];
        m[(o + 1) * 8 + o] = b[2];
        m[(o + 1) * 8 + o + 1] = b[3];
    }
    GateMatrix::from_real(8, &m)
}

/// `U2` as a uniformly controlled `R_y` on 8 with controls (5, 6) and angle
/// vector `(0, θ2, θ1, θ3)`, built from CNOTs and single-qubit rotations.
pub fn u2_circuit(spec: &ChannelSpec) -> Result<Vec<GateOp>> {
    spec.expect_len(4)?;
    let angles = [
        0.0,
        rotation_angle(spec, 2),
        rotation_angle(spec, 1),
        rotation_angle(spec, 3),
    ];
    uniformly_controlled_ry(&[5, 6], 8, &angles)
}

/// Multiplexed rotation: applies `R_y(angles[c])` to `target` where `c` is the
/// value of `controls` read with `controls[0]` most significant.
///
/// Splits on the leading control: with `lo`/`hi` the angle halves,
/// `UC(lo, hi) = CNOT · UC'((lo − hi)/2) · CNOT · UC'((lo + hi)/2)`, using
/// `X R_y(φ) X = R_y(−φ)`.
pub fn uniformly_controlled_ry(
    controls: &[Label],
    target: Label,
    angles: &[f64],
) -> Result<Vec<GateOp>> {
    if angles.len() != 1 << controls.len() {
        return Err(Error::InvalidGate(format!(
            "{} angles for {} controls",
            angles.len(),
            controls.len()
        )));
    }
    let Some((&lead, rest)) = controls.split_first() else {
        return Ok(vec![GateOp::ry(target, angles[0])?]);
    };
    let half = angles.len() / 2;
    let (lo, hi) = angles.split_at(half);
    let sum: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| (a + b) / 2.0).collect();
    let diff: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| (a - b) / 2.0).collect();
    let mut ops = uniformly_controlled_ry(rest, target, &sum)?;
    ops.push(GateOp::cnot(lead, target)?);
    ops.extend(uniformly_controlled_ry(rest, target, &diff)?);
    ops.push(GateOp::cnot(lead, target)?);
    Ok(ops)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Equivalence {
    pub equivalent: bool,
    /// `max |a_ij − e^{iφ} b_ij|` at the reported phase.
    pub max_deviation: f64,
    pub phase: f64,
}

/// Compares `a` and `e^{iφ} b`, taking `φ` as the phase minimizing the
/// Frobenius distance (`arg tr(b†a)`, or 0 when that trace vanishes).
pub fn assert_equivalent(a: &GateMatrix, b: &GateMatrix, tol: f64) -> Result<Equivalence> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let overlap: Complex64 = a
        .entries()
        .iter()
        .zip(b.entries())
        .map(|(x, y)| y.conj() * x)
        .sum();
    let phase = if overlap.norm() > 1e-12 {
        overlap.arg()
    } else {
        0.0
    };
    let rot = Complex64::from_polar(1.0, phase);
    let max_deviation = a
        .entries()
        .iter()
        .zip(b.entries())
        .map(|(x, y)| (x - rot * y).norm())
        .fold(0.0, f64::max);
    Ok(Equivalence {
        equivalent: max_deviation <= tol,
        max_deviation,
        phase,
    })
}

/// One `GATE …` line per operation.
pub fn netlist(ops: &[GateOp]) -> String {
    let mut out = String::new();
    for op in ops {
        out.push_str(&op.netlist_line());
        out.push('\n');
    }
    out
}
