//! Projective measurements, measurement plans and exact branch enumeration.
//!
//! Every measurement writes its outcome back into the register as a
//! computational basis value: Z and X measurements leave the qubit in `|k⟩`,
//! a Bell measurement on `(a, b)` leaves `a` holding the phase bit and `b`
//! the parity bit of the outcome code. This is the state the circuit
//! realization (CNOT, H, then Z measurements) would leave behind.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{apply_in_place, GateOp};
use crate::qstate::{Label, StateVector};

/// Allowed deviation of the summed outcome probabilities from 1.
pub const PROBABILITY_LEAK_TOL: f64 = 1e-9;

/// Allowed deviation of summed branch probabilities from 1 in enumeration.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// Joint probabilities at or below this are recorded as exact zeros.
pub const ZERO_BRANCH_TOL: f64 = 1e-24;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
    Bell,
}

/// Bell basis, coded `(Φ+, Φ−, Ψ+, Ψ−) ↦ (0, 1, 2, 3)`. Bit 0 of the code is
/// the phase bit, bit 1 the parity bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum BellState {
    PhiPlus = 0,
    PhiMinus = 1,
    PsiPlus = 2,
    PsiMinus = 3,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PhiMinus,
        BellState::PsiPlus,
        BellState::PsiMinus,
    ];

    pub fn from_code(code: u8) -> Result<Self> {
        Self::ALL
            .get(code as usize)
            .copied()
            .ok_or(Error::CodeOutOfRange {
                what: "Bell outcome",
                code,
            })
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn phase_bit(self) -> u8 {
        self.code() & 1
    }

    pub fn parity_bit(self) -> u8 {
        self.code() >> 1
    }

    pub fn name(self) -> &'static str {
        match self {
            BellState::PhiPlus => "Phi+",
            BellState::PhiMinus => "Phi-",
            BellState::PsiPlus => "Psi+",
            BellState::PsiMinus => "Psi-",
        }
    }

    /// Amplitudes over `|00⟩, |01⟩, |10⟩, |11⟩`.
    pub fn amplitudes(self) -> [Complex64; 4] {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        match self {
            BellState::PhiPlus => [h, ZERO, ZERO, h],
            BellState::PhiMinus => [h, ZERO, ZERO, -h],
            BellState::PsiPlus => [ZERO, h, h, ZERO],
            BellState::PsiMinus => [ZERO, h, -h, ZERO],
        }
    }
}

impl fmt::Display for BellState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A projective measurement on one or two labelled qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measurement {
    Z(Label),
    X(Label),
    Bell(Label, Label),
}

impl Measurement {
    pub fn basis(&self) -> Basis {
        match self {
            Measurement::Z(_) => Basis::Z,
            Measurement::X(_) => Basis::X,
            Measurement::Bell(..) => Basis::Bell,
        }
    }

    pub fn labels(&self) -> Vec<Label> {
        match *self {
            Measurement::Z(l) | Measurement::X(l) => vec![l],
            Measurement::Bell(a, b) => vec![a, b],
        }
    }

    pub fn num_outcomes(&self) -> u8 {
        match self {
            Measurement::Bell(..) => 4,
            _ => 2,
        }
    }

    /// Classical bits carried by an outcome code.
    pub fn num_bits(&self) -> u8 {
        match self {
            Measurement::Bell(..) => 2,
            _ => 1,
        }
    }

    fn validate(&self, state: &StateVector) -> Result<()> {
        for l in self.labels() {
            state.position(l)?;
        }
        if let Measurement::Bell(a, b) = *self {
            if a == b {
                return Err(Error::InvalidPlan(format!(
                    "Bell measurement on ({a}, {a})"
                )));
            }
        }
        Ok(())
    }

    /// Unnormalized post-measurement amplitudes for `outcome`, with the
    /// outcome written back into the measured qubits.
    pub fn project(&self, state: &StateVector, outcome: u8) -> Result<Vec<Complex64>> {
        self.validate(state)?;
        if outcome >= self.num_outcomes() {
            return Err(Error::CodeOutOfRange {
                what: "measurement outcome",
                code: outcome,
            });
        }
        let amps = state.amplitudes();
        let mut out = vec![ZERO; amps.len()];
        match *self {
            Measurement::Z(l) => {
                let m = state.mask(l)?;
                let want = if outcome == 1 { m } else { 0 };
                for (i, a) in amps.iter().enumerate() {
                    if i & m == want {
                        out[i] = *a;
                    }
                }
            }
            Measurement::X(l) => {
                // H, then a Z projection
                let mut rotated = state.clone();
                apply_in_place(&mut rotated, &GateOp::h(l))?;
                return Measurement::Z(l).project(&rotated, outcome);
            }
            Measurement::Bell(a, b) => {
                let (ma, mb) = (state.mask(a)?, state.mask(b)?);
                let bell = BellState::from_code(outcome)?;
                let v = bell.amplitudes();
                let dest = if bell.phase_bit() == 1 { ma } else { 0 }
                    | if bell.parity_bit() == 1 { mb } else { 0 };
                for base in (0..amps.len()).filter(|i| i & (ma | mb) == 0) {
                    let c = [
                        amps[base],
                        amps[base | mb],
                        amps[base | ma],
                        amps[base | ma | mb],
                    ];
                    out[base | dest] = v.iter().zip(&c).map(|(x, y)| x.conj() * y).sum();
                }
            }
        }
        Ok(out)
    }

    /// Probability and normalized post-state for every outcome; zero-probability
    /// outcomes carry no state.
    pub fn outcomes(&self, state: &StateVector) -> Result<Vec<(f64, Option<StateVector>)>> {
        let mut res = Vec::with_capacity(self.num_outcomes() as usize);
        for k in 0..self.num_outcomes() {
            let amps = self.project(state, k)?;
            let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
            let post = if p > ZERO_BRANCH_TOL {
                Some(StateVector::normalized(state.labels(), amps)?)
            } else {
                None
            };
            res.push((p, post));
        }
        let total: f64 = res.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > PROBABILITY_LEAK_TOL {
            return Err(Error::ProbabilityLeak(total));
        }
        Ok(res)
    }
}

impl fmt::Display for Measurement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measurement::Z(l) => write!(f, "Z({l})"),
            Measurement::X(l) => write!(f, "X({l})"),
            Measurement::Bell(a, b) => write!(f, "Bell({a},{b})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureOutcome {
    pub labels: Vec<Label>,
    pub basis: Basis,
    pub outcome: u8,
    pub probability: f64,
    pub post_state: StateVector,
}

/// Seeded ChaCha8 stream. Trials draw from independent streams keyed by
/// `(seed, trial)`, so results do not depend on how trials are scheduled.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    draws: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::for_trial(seed, 0)
    }

    pub fn for_trial(seed: u64, trial: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        Self {
            seed,
            stream: trial,
            draws: 0,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    /// Uniform draw in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        self.draws += 1;
        self.rng.random::<f64>()
    }

    fn pick(&mut self, probs: &[f64]) -> usize {
        let u = self.next_f64();
        let mut acc = 0.0;
        let mut last = 0;
        for (k, &p) in probs.iter().enumerate() {
            if p <= ZERO_BRANCH_TOL {
                continue;
            }
            acc += p;
            last = k;
            if u < acc {
                return k;
            }
        }
        last
    }
}

/// Samples `measurement` with Born probabilities and collapses the state.
pub fn measure(
    state: &StateVector,
    measurement: &Measurement,
    rng: &mut RngStream,
) -> Result<MeasureOutcome> {
    let mut outcomes = measurement.outcomes(state)?;
    let probs: Vec<f64> = outcomes.iter().map(|(p, _)| *p).collect();
    let k = rng.pick(&probs);
    let (probability, post) = outcomes.swap_remove(k);
    Ok(MeasureOutcome {
        labels: measurement.labels(),
        basis: measurement.basis(),
        outcome: k as u8,
        probability,
        post_state: post.expect("sampled outcomes have nonzero probability"),
    })
}

pub fn measure_z(state: &StateVector, label: Label, rng: &mut RngStream) -> Result<MeasureOutcome> {
    measure(state, &Measurement::Z(label), rng)
}

/// X-basis measurement: outcome 0 is `(|0⟩+|1⟩)/√2`, 1 is `(|0⟩−|1⟩)/√2`.
pub fn measure_x(state: &StateVector, label: Label, rng: &mut RngStream) -> Result<MeasureOutcome> {
    measure(state, &Measurement::X(label), rng)
}

pub fn measure_bell(
    state: &StateVector,
    a: Label,
    b: Label,
    rng: &mut RngStream,
) -> Result<MeasureOutcome> {
    measure(state, &Measurement::Bell(a, b), rng)
}

/// Bell measurement by circuit: `CNOT(a→b)`, `H(a)`, then Z on `a` and `b`.
/// The outcome code is `phase + 2·parity`.
pub fn measure_bell_circuit(
    state: &StateVector,
    a: Label,
    b: Label,
    rng: &mut RngStream,
) -> Result<MeasureOutcome> {
    let mut s = state.clone();
    apply_in_place(&mut s, &GateOp::cnot(a, b)?)?;
    apply_in_place(&mut s, &GateOp::h(a))?;
    let phase = measure_z(&s, a, rng)?;
    let parity = measure_z(&phase.post_state, b, rng)?;
    Ok(MeasureOutcome {
        labels: vec![a, b],
        basis: Basis::Bell,
        outcome: phase.outcome + 2 * parity.outcome,
        probability: phase.probability * parity.probability,
        post_state: parity.post_state,
    })
}

/// Reference to one classical bit produced earlier in a plan: bit `bit` of
/// the `measurement`-th measurement (counting measurements only).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassicalBit {
    pub measurement: usize,
    pub bit: u8,
}

impl ClassicalBit {
    pub fn new(measurement: usize, bit: u8) -> Self {
        Self { measurement, bit }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    Gate(GateOp),
    Measure(Measurement),
    /// Applies `op` when the XOR of the referenced bits is 1.
    Conditional {
        op: GateOp,
        parity_of: Vec<ClassicalBit>,
    },
}

impl Step {
    pub fn conditional(op: GateOp, parity_of: &[ClassicalBit]) -> Self {
        Step::Conditional {
            op,
            parity_of: parity_of.to_vec(),
        }
    }
}

/// One outcome path of a plan. `state` is `None` for zero-probability paths.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchRecord {
    pub outcomes: Vec<u8>,
    pub probability: f64,
    pub state: Option<StateVector>,
}

fn validate_plan(plan: &[Step], state: &StateVector) -> Result<()> {
    let mut measured: Vec<u8> = Vec::new();
    for step in plan {
        match step {
            Step::Gate(op) => {
                for l in op.labels() {
                    state.position(l)?;
                }
            }
            Step::Measure(m) => {
                m.validate(state)?;
                measured.push(m.num_bits());
            }
            Step::Conditional { op, parity_of } => {
                for l in op.labels() {
                    state.position(l)?;
                }
                for cb in parity_of {
                    match measured.get(cb.measurement) {
                        Some(&bits) if cb.bit < bits => {}
                        _ => {
                            return Err(Error::InvalidPlan(format!(
                                "bit {} of measurement {} is not available",
                                cb.bit, cb.measurement
                            )))
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn condition_holds(parity_of: &[ClassicalBit], outcomes: &[u8]) -> bool {
    parity_of.iter().fold(0u8, |acc, cb| {
        acc ^ ((outcomes[cb.measurement] >> cb.bit) & 1)
    }) == 1
}

/// Every outcome path of `plan` with its exact joint probability, in
/// lexicographic outcome order. Zero-probability paths are kept.
pub fn enumerate_branches(state: &StateVector, plan: &[Step]) -> Result<Vec<BranchRecord>> {
    validate_plan(plan, state)?;
    let mut out = Vec::new();
    walk(plan, Some(state.clone()), 1.0, Vec::new(), &mut out)?;
    let total: f64 = out.iter().map(|b| b.probability).sum();
    if (total - 1.0).abs() > COMPLETENESS_TOL {
        return Err(Error::ProbabilityLeak(total));
    }
    Ok(out)
}

fn walk(
    plan: &[Step],
    mut state: Option<StateVector>,
    probability: f64,
    outcomes: Vec<u8>,
    out: &mut Vec<BranchRecord>,
) -> Result<()> {
    for (i, step) in plan.iter().enumerate() {
        match step {
            Step::Gate(op) => {
                if let Some(s) = state.as_mut() {
                    apply_in_place(s, op)?;
                }
            }
            Step::Conditional { op, parity_of } => {
                if let Some(s) = state.as_mut() {
                    if condition_holds(parity_of, &outcomes) {
                        apply_in_place(s, op)?;
                    }
                }
            }
            Step::Measure(m) => {
                let children: Vec<(f64, Option<StateVector>)> = match &state {
                    Some(s) => m.outcomes(s)?,
                    None => (0..m.num_outcomes()).map(|_| (0.0, None)).collect(),
                };
                for (k, (p, post)) in children.into_iter().enumerate() {
                    let joint = probability * p;
                    let (joint, post) = if joint > ZERO_BRANCH_TOL {
                        (joint, post)
                    } else {
                        (0.0, None)
                    };
                    let mut next = outcomes.clone();
                    next.push(k as u8);
                    walk(&plan[i + 1..], post, joint, next, out)?;
                }
                return Ok(());
            }
        }
    }
    out.push(BranchRecord {
        outcomes,
        probability,
        state,
    });
    Ok(())
}

/// Executes `plan` once with sampled outcomes.
pub fn run_plan(
    state: &StateVector,
    plan: &[Step],
    rng: &mut RngStream,
) -> Result<(Vec<u8>, StateVector)> {
    validate_plan(plan, state)?;
    let mut s = state.clone();
    let mut outcomes = Vec::new();
    for step in plan {
        match step {
            Step::Gate(op) => apply_in_place(&mut s, op)?,
            Step::Conditional { op, parity_of } => {
                if condition_holds(parity_of, &outcomes) {
                    apply_in_place(&mut s, op)?;
                }
            }
            Step::Measure(m) => {
                let r = measure(&s, m, rng)?;
                outcomes.push(r.outcome);
                s = r.post_state;
            }
        }
    }
    Ok((outcomes, s))
}
