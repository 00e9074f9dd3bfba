//! Two-qubit probabilistic controlled teleportation.
//!
//! The input lives on particles (1, 2). Alice holds channel particles 3 and 4,
//! Bob holds 5 and 6, Charlie holds 7 and Bob's auxiliary qubit is 8. Alice
//! Bell-measures (2, 3) then (1, 4), Charlie measures 7 in the X basis, Bob
//! applies `U2` to (5, 6, 8) and measures 8; outcome 0 heralds success.

use num_complex::Complex64;

use crate::channels::{channel_two, ChannelSpec};
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
use crate::unitaries::{u2_matrix, U2_LABELS};

pub const INPUT: [Label; 2] = [1, 2];
pub const SENDER: [Label; 2] = [3, 4];
pub const RECEIVER: [Label; 2] = [5, 6];
pub const CONTROLLER: Label = 7;
pub const AUX: Label = 8;
pub const REGISTER: [Label; 8] = [1, 2, 3, 4, 5, 6, 7, 8];

const I: Pauli = Pauli::I;
const X: Pauli = Pauli::X;
const Z: Pauli = Pauli::Z;
const ZX: Pauli = Pauli::ZX;

/// Corrections on (5, 6), indexed by `2·(4·bell23 + bell14) + charlie`.
/// Qubit 5 gets `Z^p14 · X^x14` and qubit 6 gets `Z^(p23 ⊕ charlie) · X^x23`,
/// where `p`/`x` are the phase and parity bits of each Bell code.
#[rustfmt::skip]
pub const CORRECTION_TWO: [[Pauli; 2]; 32] = [
    [I, I], [I, Z], [Z, I], [Z, Z], [X, I], [X, Z], [ZX, I], [ZX, Z],
    [I, Z], [I, I], [Z, Z], [Z, I], [X, Z], [X, I], [ZX, Z], [ZX, I],
    [I, X], [I, ZX], [Z, X], [Z, ZX], [X, X], [X, ZX], [ZX, X], [ZX, ZX],
    [I, ZX], [I, X], [Z, ZX], [Z, X], [X, ZX], [X, X], [ZX, ZX], [ZX, X],
];

pub fn correction_two(bell23: u8, bell14: u8, charlie: u8) -> Result<PauliWord> {
    for (what, code, max) in [
        ("Bell outcome (2, 3)", bell23, 3),
        ("Bell outcome (1, 4)", bell14, 3),
        ("controller outcome", charlie, 1),
    ] {
        if code > max {
            return Err(Error::CodeOutOfRange { what, code });
        }
    }
    let n = 2 * (4 * bell23 as usize + bell14 as usize) + charlie as usize;
    PauliWord::new(&RECEIVER, &CORRECTION_TWO[n])
}

/// `4β0²`.
pub fn success_probability_two(spec: &ChannelSpec) -> Result<f64> {
    spec.expect_len(4)?;
    Ok(4.0 * spec.beta(0) * spec.beta(0))
}

/// Input on (1, 2), channel on (3..7), auxiliary `|0⟩` on 8.
pub fn initial_state_two(alpha: &[Complex64], spec: &ChannelSpec) -> Result<StateVector> {
    input_state(alpha, &INPUT)?
        .product(&channel_two(spec)?)?
        .product(&StateVector::basis(&[AUX], 0)?)
}

pub fn u2_op(spec: &ChannelSpec) -> Result<GateOp> {
    GateOp::new("U2", u2_matrix(spec)?, &U2_LABELS, &[])
}

/// Measurements and `U2` without corrections. Outcomes are
/// `(bell23, bell14, charlie, aux)`.
pub fn protocol_plan_two(spec: &ChannelSpec) -> Result<Vec<Step>> {
    Ok(vec![
        Step::Measure(Measurement::Bell(2, 3)),
        Step::Measure(Measurement::Bell(1, 4)),
        Step::Measure(Measurement::X(CONTROLLER)),
        Step::Gate(u2_op(spec)?),
        Step::Measure(Measurement::Z(AUX)),
    ])
}

/// [`protocol_plan_two`] followed by classically controlled corrections.
pub fn measure_first_plan_two(spec: &ChannelSpec) -> Result<Vec<Step>> {
    let bit = ClassicalBit::new;
    let mut plan = protocol_plan_two(spec)?;
    plan.push(Step::conditional(GateOp::x(5), &[bit(1, 1)]));
    plan.push(Step::conditional(GateOp::z(5), &[bit(1, 0)]));
    plan.push(Step::conditional(GateOp::x(6), &[bit(0, 1)]));
    plan.push(Step::conditional(GateOp::z(6), &[bit(0, 0), bit(2, 0)]));
    Ok(plan)
}

/// Same protocol with measurements deferred to the end and quantum-controlled
/// corrections. Outcomes are `(z2, z3, z1, z4, z7, z8)`.
pub fn coherent_plan_two(spec: &ChannelSpec) -> Result<Vec<Step>> {
    let mut plan = vec![
        Step::Gate(GateOp::cnot(2, 3)?),
        Step::Gate(GateOp::h(2)),
        Step::Gate(GateOp::cnot(1, 4)?),
        Step::Gate(GateOp::h(1)),
        Step::Gate(GateOp::h(CONTROLLER)),
        Step::Gate(u2_op(spec)?),
        Step::Gate(GateOp::cnot(4, 5)?),
        Step::Gate(GateOp::cz(1, 5)?),
        Step::Gate(GateOp::cnot(3, 6)?),
        Step::Gate(GateOp::cz(2, 6)?),
        Step::Gate(GateOp::cz(CONTROLLER, 6)?),
    ];
    for l in [2, 3, 1, 4, CONTROLLER, AUX] {
        plan.push(Step::Measure(Measurement::Z(l)));
    }
    Ok(plan)
}

/// Maps coherent-plan outcomes to `(bell23, bell14, charlie, aux)`.
pub fn coherent_outcomes_two(z: &[u8]) -> Vec<u8> {
    vec![z[0] | (z[1] << 1), z[2] | (z[3] << 1), z[4], z[5]]
}

/// The 16 `(bell23, bell14)` branches.
pub fn bell_branches_two(alpha: &[Complex64], spec: &ChannelSpec) -> Result<Vec<BranchRecord>> {
    let plan = protocol_plan_two(spec)?;
    enumerate_branches(&initial_state_two(alpha, spec)?, &plan[..2])
}

/// The 32 `(bell23, bell14, charlie)` branches, before `U2`.
pub fn pre_unitary_branches_two(
    alpha: &[Complex64],
    spec: &ChannelSpec,
) -> Result<Vec<BranchRecord>> {
    let plan = protocol_plan_two(spec)?;
    enumerate_branches(&initial_state_two(alpha, spec)?, &plan[..3])
}

/// All 64 `(bell23, bell14, charlie, aux)` branches.
pub fn branch_table_two(alpha: &[Complex64], spec: &ChannelSpec) -> Result<Vec<BranchRecord>> {
    enumerate_branches(&initial_state_two(alpha, spec)?, &protocol_plan_two(spec)?)
}

fn correct(outcomes: &[u8]) -> Result<PauliWord> {
    correction_two(outcomes[0], outcomes[1], outcomes[2])
}

/// One sampled run.
pub fn teleport_two(
    alpha: &[Complex64],
    spec: &ChannelSpec,
    rng: &mut RngStream,
) -> Result<ProtocolResult> {
    let target = input_state(alpha, &INPUT)?;
    let (outcomes, state) = run_plan(
        &initial_state_two(alpha, spec)?,
        &protocol_plan_two(spec)?,
        rng,
    )?;
    conclude(outcomes, Some(state), None, correct, &RECEIVER, &target)
}

/// Every branch with its exact probability.
pub fn exact_two(alpha: &[Complex64], spec: &ChannelSpec) -> Result<Vec<ProtocolResult>> {
    let target = input_state(alpha, &INPUT)?;
    branch_table_two(alpha, spec)?
        .into_iter()
        .map(|b| {
            conclude(
                b.outcomes,
                b.state,
                Some(b.probability),
                correct,
                &RECEIVER,
                &target,
            )
        })
        .collect()
}

pub fn listings_two() -> Vec<Listing> {
    vec![
        listings::two_bell(),
        listings::two_charlie(),
        listings::two_recovered(),
    ]
}

/// Branch states by projection against the reference listings.
pub fn listing_comparisons_two(
    alpha: &[Complex64],
    spec: &ChannelSpec,
) -> Result<Vec<ListingComparison>> {
    let bell = bell_branches_two(alpha, spec)?;
    let pre = pre_unitary_branches_two(alpha, spec)?;
    let full = branch_table_two(alpha, spec)?;
    let [l_bell, l_charlie, l_recovered] =
        <[Listing; 3]>::try_from(listings_two()).expect("three listings");
    let mut out = compare_listing(
        &l_bell,
        &bell.iter().collect::<Vec<_>>(),
        alpha,
        spec.betas(),
    )?;
    out.extend(compare_listing(
        &l_charlie,
        &pre.iter().collect::<Vec<_>>(),
        alpha,
        spec.betas(),
    )?);
    out.extend(compare_listing(
        &l_recovered,
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
    use crate::protocol::{discrepancy_report, DiscrepancyKind};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spec() -> ChannelSpec {
        ChannelSpec::two([0.3, 0.4, 0.5, 0.5f64.sqrt()]).unwrap()
    }

    fn generic_alpha() -> Vec<Complex64> {
        let raw = [c(0.3, 0.1), c(-0.2, 0.5), c(0.4, -0.3), c(0.1, 0.6)];
        let n = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        raw.iter().map(|a| a / n).collect()
    }

    #[test]
    fn success_probability_examples() {
        assert_eq!(
            success_probability_two(&ChannelSpec::two([0.5; 4]).unwrap()).unwrap(),
            1.0
        );
        assert!((success_probability_two(&spec()).unwrap() - 0.36).abs() < 1e-15);
        assert!(success_probability_two(&ChannelSpec::one(0.6, 0.8).unwrap()).is_err());
    }

    #[test]
    fn correction_examples() {
        assert!(correction_two(0, 0, 0).unwrap().is_identity());
        // (Ψ+ on (2, 3), Φ− on (1, 4), charlie 1)
        let w = correction_two(BellState::PsiPlus.code(), BellState::PhiMinus.code(), 1).unwrap();
        assert_eq!(w.get(5), Some(Pauli::Z));
        assert_eq!(w.get(6), Some(Pauli::ZX));
        assert!(correction_two(4, 0, 0).is_err());
        assert!(correction_two(0, 4, 0).is_err());
        assert!(correction_two(0, 0, 2).is_err());
    }

    #[test]
    fn correction_table_matches_rule() {
        for (n, row) in CORRECTION_TWO.iter().enumerate() {
            let (k, ch) = (n / 2, (n % 2) as u8);
            let b23 = BellState::from_code((k / 4) as u8).unwrap();
            let b14 = BellState::from_code((k % 4) as u8).unwrap();
            let want = [
                Pauli::from_bits(b14.phase_bit(), b14.parity_bit()),
                Pauli::from_bits(b23.phase_bit() ^ ch, b23.parity_bit()),
            ];
            assert_eq!(*row, want, "entry {n}");
        }
    }

    /// Regenerates the frozen table from the branch states.
    #[test]
    fn correction_table_is_derivable() {
        let alpha = generic_alpha();
        let target = input_state(&alpha, &INPUT).unwrap();
        let table = branch_table_two(&alpha, &spec()).unwrap();
        let successes = aux_zero(&table);
        assert_eq!(successes.len(), 32);
        for (n, rec) in successes.iter().enumerate() {
            let branch = rec
                .state
                .as_ref()
                .unwrap()
                .extract_factor(&RECEIVER)
                .unwrap();
            let word = derive_correction(&branch, &target, &Pauli::ALL).unwrap();
            assert_eq!(word.paulis(), &CORRECTION_TWO[n], "branch {n}");
        }
    }

    #[test]
    fn first_bell_branch_unnormalized() {
        let alpha = generic_alpha();
        let b = spec();
        let rec = &bell_branches_two(&alpha, &b).unwrap()[0];
        assert_eq!(rec.outcomes, vec![0, 0]);
        let factor = rec
            .state
            .as_ref()
            .unwrap()
            .extract_factor(&[5, 6, 7])
            .unwrap();
        let beta = b.betas();
        let want = [
            (0b000, alpha[0] * beta[0]),
            (0b011, alpha[1] * beta[2]),
            (0b100, alpha[2] * beta[1]),
            (0b111, alpha[3] * beta[3]),
        ];
        let overlap: Complex64 = want
            .iter()
            .map(|(i, v)| factor.amplitudes()[*i].conj() * v * 0.5)
            .sum();
        let phase = overlap / overlap.norm();
        for (i, v) in want {
            let got = factor.amplitudes()[i] * rec.probability.sqrt() * phase;
            assert!((got - v * 0.5).norm() < 1e-12);
        }
    }

    #[test]
    fn single_amplitude_branch_probability() {
        let alpha = [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let recs = bell_branches_two(&alpha, &spec()).unwrap();
        assert!((recs[0].probability - 0.0625).abs() < 1e-12);
        let full = branch_table_two(&alpha, &spec()).unwrap();
        assert_eq!(full.len(), 64);
        let p: f64 = full
            .iter()
            .filter(|r| r.outcomes[..2] == [0, 0])
            .map(|r| r.probability)
            .sum();
        assert!((p - 0.0625).abs() < 1e-12);
        assert!((full.iter().map(|r| r.probability).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn basis_input_recovers_basis_state() {
        let alpha = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        for r in exact_two(&alpha, &spec())
            .unwrap()
            .into_iter()
            .filter(|r| r.success)
        {
            assert!((r.fidelity.unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_channel_is_deterministic() {
        let spec = ChannelSpec::two([0.5; 4]).unwrap();
        let results = exact_two(&generic_alpha(), &spec).unwrap();
        let p: f64 = results
            .iter()
            .filter(|r| r.success)
            .map(|r| r.probability.unwrap())
            .sum();
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn seeded_runs_recover_exactly() {
        let alpha = generic_alpha();
        let mut successes = 0;
        for seed in 0..60 {
            let r = teleport_two(&alpha, &spec(), &mut RngStream::new(seed)).unwrap();
            assert_eq!(r.outcomes.len(), 4);
            if r.success {
                successes += 1;
                assert!(r.fidelity.unwrap() >= 1.0 - 1e-10);
            }
        }
        assert!(successes > 0);
    }

    #[test]
    fn bell_measurement_order_is_irrelevant() {
        let alpha = generic_alpha();
        let state = initial_state_two(&alpha, &spec()).unwrap();
        let a = enumerate_branches(
            &state,
            &[
                Step::Measure(Measurement::Bell(2, 3)),
                Step::Measure(Measurement::Bell(1, 4)),
            ],
        )
        .unwrap();
        let b = enumerate_branches(
            &state,
            &[
                Step::Measure(Measurement::Bell(1, 4)),
                Step::Measure(Measurement::Bell(2, 3)),
            ],
        )
        .unwrap();
        for ra in &a {
            let rb = b
                .iter()
                .find(|r| r.outcomes == [ra.outcomes[1], ra.outcomes[0]])
                .unwrap();
            assert!((ra.probability - rb.probability).abs() < 1e-12);
            let f = ra
                .state
                .as_ref()
                .unwrap()
                .fidelity(rb.state.as_ref().unwrap())
                .unwrap();
            assert!((f - 1.0).abs() < 1e-10);
        }
    }

    /// `⟨B|_{23}⟨B'|_{14}|ψ⟩` by explicit summation over the amplitudes of
    /// particles 1..4, independent of the projection code.
    fn direct_contraction(
        alpha: &[Complex64],
        beta: &[f64],
        b23: usize,
        b14: usize,
    ) -> Vec<Complex64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = |code: usize, x: usize, y: usize| -> f64 {
            match (code, x, y) {
                (0, 0, 0) | (0, 1, 1) | (1, 0, 0) | (2, 0, 1) | (2, 1, 0) | (3, 0, 1) => h,
                (1, 1, 1) | (3, 1, 0) => -h,
                _ => 0.0,
            }
        };
        // channel terms as (q3, q4, q5, q6, q7)
        let terms = [
            [0, 0, 0, 0, 0],
            [0, 1, 1, 0, 0],
            [1, 0, 0, 1, 1],
            [1, 1, 1, 1, 1],
        ];
        let mut out = vec![Complex64::new(0.0, 0.0); 8];
        for q1 in 0..2 {
            for q2 in 0..2 {
                for (k, t) in terms.iter().enumerate() {
                    let amp = alpha[2 * q1 + q2] * beta[k];
                    let w = bell(b23, q2, t[0]) * bell(b14, q1, t[1]);
                    out[(t[2] << 2) | (t[3] << 1) | t[4]] += amp * w;
                }
            }
        }
        out
    }

    #[test]
    fn projection_matches_direct_summation() {
        for (alpha, b) in [
            (generic_alpha(), spec()),
            (generic_alpha(), ChannelSpec::two([0.5; 4]).unwrap()),
        ] {
            let recs = bell_branches_two(&alpha, &b).unwrap();
            for (k, rec) in recs.iter().enumerate() {
                let direct = direct_contraction(&alpha, b.betas(), k / 4, k % 4);
                let factor = rec
                    .state
                    .as_ref()
                    .unwrap()
                    .extract_factor(&[5, 6, 7])
                    .unwrap();
                let scaled: Vec<Complex64> = factor
                    .amplitudes()
                    .iter()
                    .map(|a| a * rec.probability.sqrt())
                    .collect();
                let overlap: Complex64 =
                    scaled.iter().zip(&direct).map(|(x, y)| x.conj() * y).sum();
                let phase = if overlap.norm() > 0.0 {
                    overlap / overlap.norm()
                } else {
                    c(1.0, 0.0)
                };
                for (x, y) in scaled.iter().zip(&direct) {
                    assert!((x * phase - y).norm() < 1e-12, "branch {k}");
                }
            }
        }
    }

    #[test]
    fn listings_against_projection() {
        let alpha = generic_alpha();
        let cmp = listing_comparisons_two(&alpha, &spec()).unwrap();
        assert_eq!(cmp.len(), 16 + 32 + 32);
        let bell: Vec<_> = cmp.iter().filter(|x| x.listing == "two/bell").collect();
        assert!(bell
            .iter()
            .all(|x| x.matches && x.norm_deviation.unwrap() < 1e-12));
        let report = discrepancy_report(&listings_two(), &cmp);
        // every flagged entry is accounted for by a comparison
        for d in &report {
            let x = cmp
                .iter()
                .find(|x| x.listing == d.listing && x.index == d.index)
                .unwrap();
            assert_eq!(d.matches_projection, x.matches);
            if d.kind == DiscrepancyKind::Mismatch {
                assert!(!x.matches);
            }
        }
        assert_eq!(
            report
                .iter()
                .filter(|d| d.kind == DiscrepancyKind::Mismatch)
                .count(),
            cmp.iter().filter(|x| !x.matches).count()
        );
    }

    fn arb_case() -> impl Strategy<Value = (Vec<Complex64>, ChannelSpec)> {
        (
            proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4),
            proptest::collection::vec(0.1f64..1.0, 4),
        )
            .prop_filter_map("degenerate", |(a, b)| {
                let n = a.iter().map(|(x, y)| x * x + y * y).sum::<f64>().sqrt();
                if n < 1e-3 {
                    return None;
                }
                let alpha = a.iter().map(|(x, y)| c(x / n, y / n)).collect();
                let mut b = b;
                let min = (0..4).min_by(|&i, &j| b[i].total_cmp(&b[j])).unwrap();
                b.swap(0, min);
                let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
                let spec = ChannelSpec::new(&b.iter().map(|x| x / nb).collect::<Vec<_>>()).ok()?;
                Some((alpha, spec))
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn charlie_marginal_is_uniform((alpha, spec) in arb_case()) {
            let recs = pre_unitary_branches_two(&alpha, &spec).unwrap();
            let p0: f64 = recs.iter().filter(|r| r.outcomes[2] == 0).map(|r| r.probability).sum();
            prop_assert!((p0 - 0.5).abs() < 1e-12);
        }

        #[test]
        fn success_matches_formula((alpha, spec) in arb_case()) {
            let p: f64 = exact_two(&alpha, &spec).unwrap().iter().filter(|r| r.success).map(|r| r.probability.unwrap()).sum();
            prop_assert!((p - success_probability_two(&spec).unwrap()).abs() < 1e-12);
        }
    }
}
