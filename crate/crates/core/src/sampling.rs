//! Monte-Carlo runs over independent per-trial streams.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::channels::ChannelSpec;
use crate::error::{Error, Result};
use crate::measure::RngStream;
use crate::protocol::Protocol;

#[derive(Clone, Debug, PartialEq)]
pub struct BranchCount {
    pub outcomes: Vec<u8>,
    pub count: u64,
    /// Mean fidelity of the successful runs in this branch.
    pub mean_fidelity: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleSummary {
    pub trials: u64,
    pub seed: u64,
    pub successes: u64,
    pub success_rate: f64,
    /// `√(p(1 − p)/N)` at the observed rate.
    pub standard_error: f64,
    pub mean_conditional_fidelity: Option<f64>,
    pub min_conditional_fidelity: Option<f64>,
    /// Observed outcome tuples in lexicographic order.
    pub branches: Vec<BranchCount>,
}

/// Runs `trials` independent trials; trial `t` draws from
/// `RngStream::for_trial(seed, t)`, so the summary does not depend on the
/// number of worker threads.
pub fn sample(
    protocol: Protocol,
    alpha: &[Complex64],
    spec: &ChannelSpec,
    trials: u64,
    seed: u64,
) -> Result<SampleSummary> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be positive".into()));
    }
    // validate once so a bad input fails before fanning out
    protocol.teleport(alpha, spec, &mut RngStream::for_trial(seed, 0))?;
    let runs: Vec<(Vec<u8>, Option<f64>)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let r = protocol.teleport(alpha, spec, &mut RngStream::for_trial(seed, t))?;
            Ok((r.outcomes, r.fidelity))
        })
        .collect::<Result<_>>()?;

    let mut per_branch: BTreeMap<Vec<u8>, (u64, f64, u64)> = BTreeMap::new();
    let (mut successes, mut fid_sum) = (0u64, 0.0f64);
    let mut min_fid: Option<f64> = None;
    for (outcomes, fidelity) in runs {
        let e = per_branch.entry(outcomes).or_insert((0, 0.0, 0));
        e.0 += 1;
        if let Some(f) = fidelity {
            successes += 1;
            fid_sum += f;
            e.1 += f;
            e.2 += 1;
            min_fid = Some(min_fid.map_or(f, |m| m.min(f)));
        }
    }
    let n = trials as f64;
    let rate = successes as f64 / n;
    Ok(SampleSummary {
        trials,
        seed,
        successes,
        success_rate: rate,
        standard_error: (rate * (1.0 - rate) / n).sqrt(),
        mean_conditional_fidelity: (successes > 0).then(|| fid_sum / successes as f64),
        min_conditional_fidelity: min_fid,
        branches: per_branch
            .into_iter()
            .map(|(outcomes, (count, fsum, fcount))| BranchCount {
                outcomes,
                count,
                mean_fidelity: (fcount > 0).then(|| fsum / fcount as f64),
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha() -> Vec<Complex64> {
        vec![Complex64::new(0.8, 0.0), Complex64::new(0.0, 0.6)]
    }

    #[test]
    fn summary_is_consistent() {
        let spec = ChannelSpec::one(0.6, 0.8).unwrap();
        let s = sample(Protocol::One, &alpha(), &spec, 2000, 7).unwrap();
        assert_eq!(s.branches.iter().map(|b| b.count).sum::<u64>(), 2000);
        let ok: u64 = s
            .branches
            .iter()
            .filter(|b| b.outcomes[2] == 0)
            .map(|b| b.count)
            .sum();
        assert_eq!(ok, s.successes);
        assert!(s.min_conditional_fidelity.unwrap() >= 1.0 - 1e-10);
        assert!(s.branches.windows(2).all(|w| w[0].outcomes < w[1].outcomes));
    }

    #[test]
    fn independent_of_thread_count() {
        let spec = ChannelSpec::two([0.3, 0.4, 0.5, 0.5f64.sqrt()]).unwrap();
        let alpha = vec![Complex64::new(0.5, 0.0); 4];
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| sample(Protocol::Two, &alpha, &spec, 3000, 11).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn rejects_zero_trials() {
        let spec = ChannelSpec::one(0.6, 0.8).unwrap();
        assert!(sample(Protocol::One, &alpha(), &spec, 0, 0).is_err());
    }
}
