use num_complex::Complex64;
use pctele::channels::ChannelSpec;
use pctele::measure::{enumerate_branches, RngStream};
use pctele::protocol::Protocol;
use pctele::{protocol_one as one, protocol_two as two};
use proptest::prelude::*;

fn alpha_strategy(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n).prop_filter_map("near-zero", |v| {
        let norm = v.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
        (norm > 1e-2).then(|| {
            v.iter()
                .map(|(a, b)| Complex64::new(a / norm, b / norm))
                .collect()
        })
    })
}

fn spec_strategy(n: usize) -> impl Strategy<Value = ChannelSpec> {
    (
        proptest::collection::vec(0.05f64..1.0, n),
        proptest::collection::vec(any::<bool>(), n),
    )
        .prop_filter_map("invalid", |(mut v, neg)| {
            let min = (0..v.len()).min_by(|&i, &j| v[i].total_cmp(&v[j])).unwrap();
            v.swap(0, min);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let v: Vec<f64> = v
                .iter()
                .zip(neg)
                .map(|(x, s)| if s { -x / norm } else { x / norm })
                .collect();
            ChannelSpec::new(&v).ok()
        })
}

fn success_mass(results: &[pctele::ProtocolResult]) -> f64 {
    results
        .iter()
        .filter(|r| r.success)
        .map(|r| r.probability.unwrap())
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn one_success_is_perfect(alpha in alpha_strategy(2), spec in spec_strategy(2)) {
        let results = one::exact_one(&alpha, &spec).unwrap();
        prop_assert_eq!(results.len(), 16);
        for r in &results {
            prop_assert_eq!(r.success, r.aux() == 0);
            if r.success {
                prop_assert!(r.fidelity.unwrap() >= 1.0 - 1e-10);
            }
        }
        let p = one::success_probability_one(&spec).unwrap();
        prop_assert!((success_mass(&results) - p).abs() <= 1e-12);
    }

    #[test]
    fn two_success_is_perfect(alpha in alpha_strategy(4), spec in spec_strategy(4)) {
        let results = two::exact_two(&alpha, &spec).unwrap();
        prop_assert_eq!(results.len(), 64);
        for r in results.iter().filter(|r| r.success) {
            prop_assert!(r.fidelity.unwrap() >= 1.0 - 1e-10);
        }
        let p = two::success_probability_two(&spec).unwrap();
        prop_assert!((success_mass(&results) - p).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn success_is_alpha_independent(
        alphas1 in proptest::collection::vec(alpha_strategy(2), 20),
        alphas2 in proptest::collection::vec(alpha_strategy(4), 20),
        spec1 in spec_strategy(2),
        spec2 in spec_strategy(4),
    ) {
        let m1: Vec<f64> = alphas1.iter().map(|a| success_mass(&one::exact_one(a, &spec1).unwrap())).collect();
        let m2: Vec<f64> = alphas2.iter().map(|a| success_mass(&two::exact_two(a, &spec2).unwrap())).collect();
        for m in [m1, m2] {
            let lo = m.iter().cloned().fold(f64::MAX, f64::min);
            let hi = m.iter().cloned().fold(f64::MIN, f64::max);
            prop_assert!(hi - lo <= 1e-12);
        }
    }

    #[test]
    fn one_controller_marginal_is_uniform(alpha in alpha_strategy(2), spec in spec_strategy(2)) {
        let state = one::initial_state_one(&alpha, &spec).unwrap();
        let plan = one::protocol_plan_one(&spec).unwrap();
        let recs = enumerate_branches(&state, &plan[..2]).unwrap();
        let p0: f64 = recs.iter().filter(|r| r.outcomes[1] == 0).map(|r| r.probability).sum();
        prop_assert!((p0 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn listings_one_reproduced(alpha in alpha_strategy(2), spec in spec_strategy(2)) {
        for c in Protocol::One.listing_comparisons(&alpha, &spec).unwrap() {
            prop_assert!(c.matches, "{:?}", c);
        }
    }

    #[test]
    fn bell_listing_two_reproduced(alpha in alpha_strategy(4), spec in spec_strategy(4)) {
        for c in Protocol::Two.listing_comparisons(&alpha, &spec).unwrap() {
            if c.listing == "two/bell" {
                prop_assert!(c.matches, "{:?}", c);
            }
        }
    }

    #[test]
    fn deferred_measurement_one(alpha in alpha_strategy(2), spec in spec_strategy(2)) {
        let state = one::initial_state_one(&alpha, &spec).unwrap();
        let a = enumerate_branches(&state, &one::measure_first_plan_one(&spec).unwrap()).unwrap();
        let b = enumerate_branches(&state, &one::coherent_plan_one(&spec).unwrap()).unwrap();
        for rb in &b {
            let key = one::coherent_outcomes_one(&rb.outcomes);
            let ra = a.iter().find(|r| r.outcomes == key).unwrap();
            prop_assert!((ra.probability - rb.probability).abs() <= 1e-12);
            if let (Some(x), Some(y)) = (&ra.state, &rb.state) {
                prop_assert!(x.fidelity(y).unwrap() >= 1.0 - 1e-10);
            }
        }
    }
}

#[test]
fn sampled_results_follow_invariants() {
    let spec = ChannelSpec::two([0.3, 0.4, 0.5, 0.5f64.sqrt()]).unwrap();
    let alpha: Vec<Complex64> = [0.5, 0.5, -0.5, 0.5]
        .iter()
        .map(|&x| Complex64::new(x, 0.0))
        .collect();
    for t in 0..200 {
        let r = two::teleport_two(&alpha, &spec, &mut RngStream::for_trial(17, t)).unwrap();
        assert_eq!(r.success, r.aux() == 0);
        assert!(r.probability.is_none());
        match r.fidelity {
            Some(f) => assert!(f >= 1.0 - 1e-10),
            None => assert!(!r.success),
        }
    }
}

#[test]
fn sampled_branch_frequencies_track_exact_probabilities() {
    let spec = ChannelSpec::one(0.6, 0.8).unwrap();
    let alpha = [Complex64::new(0.8, 0.0), Complex64::new(0.0, 0.6)];
    let exact = one::exact_one(&alpha, &spec).unwrap();
    let s = pctele::sampling::sample(Protocol::One, &alpha, &spec, 100_000, 1).unwrap();
    for r in &exact {
        let p = r.probability.unwrap();
        let count = s
            .branches
            .iter()
            .find(|b| b.outcomes == r.outcomes)
            .map_or(0, |b| b.count);
        let se = (p * (1.0 - p) / 100_000.0).sqrt();
        let freq = count as f64 / 100_000.0;
        assert!(
            (freq - p).abs() <= 4.0 * se.max(1e-9),
            "{:?}: {freq} vs {p}",
            r.outcomes
        );
    }
}
