//! One-qubit probabilistic controlled teleportation.
//!
//! Alice holds the input on particle 1 and channel particle 2, Bob holds 3,
//! Charlie holds 4 and Bob's auxiliary qubit is 5. Alice Bell-measures (1, 2),
//! Charlie measures 4 in the X basis, Bob applies `U1` to (3, 5) and measures
//! 5; outcome 0 heralds success and a Pauli correction restores the input on 3.

use num_complex::Complex64;

use crate::channels::{channel_one, ChannelSpec};
use crate::correction::{Pauli, PauliWord};
use crate::error::{Error, Result};
use crate::gates::GateOp;
use crate::listings::{self, Listing};
use crate::measure::{
    enumerate_branches, run_plan, BranchRecord, ClassicalBit, Measurement, RngStream, Step,
};
use crate::protocol::{
    aux_zero, compare_listing, conclude, input_state, ListingComparison, ProtocolResult,
};
use crate::qstate::{Label, StateVector};
use crate::unitaries::{u1_matrix, U1_LABELS};

pub const INPUT: Label = 1;
pub const SENDER: Label = 2;
pub const RECEIVER: Label = 3;
pub const CONTROLLER: Label = 4;
pub const AUX: Label = 5;
pub const REGISTER: [Label; 5] = [1, 2, 3, 4, 5];

/// Correction on the receiver qubit, indexed by `2·bell + charlie`.
/// Equivalent to `Z^(phase ⊕ charlie) · X^parity` with the Bell code bits.
pub const CORRECTION_ONE: [Pauli; 8] = [
    Pauli::I,
    Pauli::Z,
    Pauli::Z,
    Pauli::I,
    Pauli::X,
    Pauli::ZX,
    Pauli::ZX,
    Pauli::X,
];

pub fn correction_one(bell: u8, charlie: u8) -> Result<PauliWord> {
    if bell > 3 {
        return Err(Error::CodeOutOfRange {
            what: "Bell outcome",
            code: bell,
        });
    }
    if charlie > 1 {
        return Err(Error::CodeOutOfRange {
            what: "controller outcome",
            code: charlie,
        });
    }
    PauliWord::new(
        &[RECEIVER],
        &[CORRECTION_ONE[2 * bell as usize + charlie as usize]],
    )
}

/// `2β0²`.
pub fn success_probability_one(spec: &ChannelSpec) -> Result<f64> {
    spec.expect_len(2)?;
    Ok(2.0 * spec.beta(0) * spec.beta(0))
}

/// Input on 1, channel on (2, 3, 4), auxiliary `|0⟩` on 5.
pub fn initial_state_one(alpha: &[Complex64], spec: &ChannelSpec) -> Result<StateVector> {
    input_state(alpha, &[INPUT])?
        .product(&channel_one(spec)?)?
        .product(&StateVector::basis(&[AUX], 0)?)
}

pub fn u1_op(spec: &ChannelSpec) -> Result<GateOp> {
    GateOp::new("U1", u1_matrix(spec)?, &U1_LABELS, &[])
}

/// Measurements and `U1` without corrections. Outcomes are
/// `(bell, charlie, aux)`.
pub fn protocol_plan_one(spec: &ChannelSpec) -> Result<Vec<Step>> {
    Ok(vec![
        Step::Measure(Measurement::Bell(INPUT, SENDER)),
        Step::Measure(Measurement::X(CONTROLLER)),
        Step::Gate(u1_op(spec)?),
        Step::Measure(Measurement::Z(AUX)),
    ])
}

/// [`protocol_plan_one`] followed by classically controlled corrections.
pub fn measure_first_plan_one(spec: &ChannelSpec) -> Result<Vec<Step>> {
    let mut plan = protocol_plan_one(spec)?;
    plan.push(Step::conditional(
        GateOp::x(RECEIVER),
        &[ClassicalBit::new(0, 1)],
    ));
    plan.push(Step::conditional(
        GateOp::z(RECEIVER),
        &[ClassicalBit::new(0, 0), ClassicalBit::new(1, 0)],
    ));
    Ok(plan)
}

/// Same protocol with every measurement moved to the end and the corrections
/// driven by quantum controls. Outcomes are `(z1, z2, z4, z5)`.
pub fn coherent_plan_one(spec: &ChannelSpec) -> Result<Vec<Step>> {
    Ok(vec![
        Step::Gate(GateOp::cnot(INPUT, SENDER)?),
        Step::Gate(GateOp::h(INPUT)),
        Step::Gate(GateOp::h(CONTROLLER)),
        Step::Gate(u1_op(spec)?),
        Step::Gate(GateOp::cnot(SENDER, RECEIVER)?),
        Step::Gate(GateOp::cz(INPUT, RECEIVER)?),
        Step::Gate(GateOp::cz(CONTROLLER, RECEIVER)?),
        Step::Measure(Measurement::Z(INPUT)),
        Step::Measure(Measurement::Z(SENDER)),
        Step::Measure(Measurement::Z(CONTROLLER)),
        Step::Measure(Measurement::Z(AUX)),
    ])
}

/// Maps coherent-plan outcomes `(z1, z2, z4, z5)` to `(bell, charlie, aux)`.
pub fn coherent_outcomes_one(z: &[u8]) -> Vec<u8> {
    vec![z[0] | (z[1] << 1), z[2], z[3]]
}

/// All 16 `(bell, charlie, aux)` branches with post-measurement states.
pub fn branch_table_one(alpha: &[Complex64], spec: &ChannelSpec) -> Result<Vec<BranchRecord>> {
    enumerate_branches(&initial_state_one(alpha, spec)?, &protocol_plan_one(spec)?)
}

fn correct(outcomes: &[u8]) -> Result<PauliWord> {
    correction_one(outcomes[0], outcomes[1])
}

/// One sampled run.
pub fn teleport_one(
    alpha: &[Complex64],
    spec: &ChannelSpec,
    rng: &mut RngStream,
) -> Result<ProtocolResult> {
    let target = input_state(alpha, &[INPUT])?;
    let (outcomes, state) = run_plan(
        &initial_state_one(alpha, spec)?,
        &protocol_plan_one(spec)?,
        rng,
    )?;
    conclude(outcomes, Some(state), None, correct, &[RECEIVER], &target)
}

/// Every branch with its exact probability.
pub fn exact_one(alpha: &[Complex64], spec: &ChannelSpec) -> Result<Vec<ProtocolResult>> {
    let target = input_state(alpha, &[INPUT])?;
    branch_table_one(alpha, spec)?
        .into_iter()
        .map(|b| {
            conclude(
                b.outcomes,
                b.state,
                Some(b.probability),
                correct,
                &[RECEIVER],
                &target,
            )
        })
        .collect()
}

pub fn listings_one() -> Vec<Listing> {
    vec![
        listings::one_bell(),
        listings::one_charlie(),
        listings::one_recovered(),
    ]
}

/// Branch states by projection against the reference listings.
pub fn listing_comparisons_one(
    alpha: &[Complex64],
    spec: &ChannelSpec,
) -> Result<Vec<ListingComparison>> {
    let state = initial_state_one(alpha, spec)?;
    let plan = protocol_plan_one(spec)?;
    let after_bell = enumerate_branches(&state, &plan[..1])?;
    let after_charlie = enumerate_branches(&state, &plan[..2])?;
    let full = enumerate_branches(&state, &plan)?;
    let [bell, charlie, recovered] =
        <[Listing; 3]>::try_from(listings_one()).expect("three listings");
    let mut out = compare_listing(
        &bell,
        &after_bell.iter().collect::<Vec<_>>(),
        alpha,
        spec.betas(),
    )?;
    out.extend(compare_listing(
        &charlie,
        &after_charlie.iter().collect::<Vec<_>>(),
        alpha,
        spec.betas(),
    )?);
    out.extend(compare_listing(
        &recovered,
        &aux_zero(&full),
        alpha,
        spec.betas(),
    )?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correction::derive_correction;
    use crate::measure::BellState;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spec() -> ChannelSpec {
        ChannelSpec::one(0.6, 0.8).unwrap()
    }

    #[test]
    fn success_probability_examples() {
        let h = FRAC_1_SQRT_2;
        assert_eq!(
            success_probability_one(&ChannelSpec::one(h, h).unwrap()).unwrap(),
            2.0 * h * h
        );
        assert!((success_probability_one(&spec()).unwrap() - 0.72).abs() < 1e-15);
        assert!(success_probability_one(&ChannelSpec::two([0.5; 4]).unwrap()).is_err());
    }

    #[test]
    fn correction_examples() {
        assert!(correction_one(BellState::PhiPlus.code(), 0)
            .unwrap()
            .is_identity());
        assert_eq!(
            correction_one(BellState::PsiMinus.code(), 0)
                .unwrap()
                .paulis(),
            &[Pauli::ZX]
        );
        assert!(correction_one(4, 0).is_err());
        assert!(correction_one(0, 2).is_err());
    }

    #[test]
    fn correction_table_matches_rule() {
        for bell in 0..4u8 {
            for ch in 0..2u8 {
                let b = BellState::from_code(bell).unwrap();
                let want = Pauli::from_bits(b.phase_bit() ^ ch, b.parity_bit());
                assert_eq!(CORRECTION_ONE[2 * bell as usize + ch as usize], want);
            }
        }
    }

    /// Regenerates the frozen table from the branch states.
    #[test]
    fn correction_table_is_derivable() {
        let alpha = [c(0.8, 0.0), c(0.0, 0.6)];
        let target = input_state(&alpha, &[INPUT]).unwrap();
        let table = branch_table_one(&alpha, &spec()).unwrap();
        let successes: Vec<&BranchRecord> = aux_zero(&table);
        assert_eq!(successes.len(), 8);
        for (i, rec) in successes.iter().enumerate() {
            let branch = rec
                .state
                .as_ref()
                .unwrap()
                .extract_factor(&[RECEIVER])
                .unwrap();
            let word = derive_correction(&branch, &target, &Pauli::ALL).unwrap();
            assert_eq!(word.paulis(), &[CORRECTION_ONE[i]], "branch {i}");
        }
    }

    #[test]
    fn basis_input_always_recovers_zero() {
        let alpha = [c(1.0, 0.0), c(0.0, 0.0)];
        for r in exact_one(&alpha, &spec()).unwrap() {
            if r.success {
                assert!((r.fidelity.unwrap() - 1.0).abs() < 1e-12);
                let rec = r.recovered.unwrap();
                assert!(rec.amplitudes()[0].norm() > 1.0 - 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_channel_never_fails() {
        let h = FRAC_1_SQRT_2;
        let spec = ChannelSpec::one(h, h).unwrap();
        let alpha = [c(0.6, 0.0), c(0.0, 0.8)];
        let results = exact_one(&alpha, &spec).unwrap();
        let fail: f64 = results
            .iter()
            .filter(|r| r.aux() == 1)
            .map(|r| r.probability.unwrap())
            .sum();
        assert!(fail < 1e-24);
        let mut rng = RngStream::new(3);
        for _ in 0..200 {
            assert!(teleport_one(&alpha, &spec, &mut rng).unwrap().success);
        }
    }

    #[test]
    fn seeded_runs_recover_exactly() {
        let alpha = [c(0.8, 0.0), c(0.0, 0.6)];
        for seed in 0..50 {
            let r = teleport_one(&alpha, &spec(), &mut RngStream::new(seed)).unwrap();
            assert_eq!(r.success, r.aux() == 0);
            if r.success {
                assert!(r.fidelity.unwrap() >= 1.0 - 1e-10);
            } else {
                assert!(r.recovered.is_none() && r.correction.is_none());
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(teleport_one(&[c(1.0, 0.0)], &spec(), &mut RngStream::new(0)).is_err());
        assert!(exact_one(&[c(0.6, 0.0), c(0.6, 0.0)], &spec()).is_err());
        assert!(exact_one(
            &[c(1.0, 0.0), c(0.0, 0.0)],
            &ChannelSpec::two([0.5; 4]).unwrap()
        )
        .is_err());
    }

    #[test]
    fn listings_agree_with_projection() {
        let alpha = [c(0.48, 0.36), c(-0.64, 0.48)];
        let cmp = listing_comparisons_one(&alpha, &spec()).unwrap();
        assert_eq!(cmp.len(), 4 + 8 + 8);
        for x in &cmp {
            assert!(x.matches, "{x:?}");
        }
    }
}
