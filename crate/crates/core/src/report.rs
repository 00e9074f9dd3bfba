//! Run reports and their JSON, CSV and text renderings.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::channels::ChannelSpec;
use crate::error::{Error, Result};
use crate::measure::BellState;
use crate::protocol::{Discrepancy, Protocol};
use crate::sampling::sample;

/// Reported real numbers are rounded to this many decimals so values that
/// agree to within rounding print identically.
pub const REPORT_DECIMALS: i32 = 12;

pub fn snap(x: f64) -> f64 {
    let scale = 10f64.powi(REPORT_DECIMALS);
    let v = (x * scale).round() / scale;
    // avoid printing -0
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Sample,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchRow {
    pub outcomes: Vec<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probability: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<u64>,
    pub success: bool,
    pub correction: Option<String>,
    pub fidelity: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub protocol: Protocol,
    /// `[re, im]` per amplitude.
    pub alpha: Vec<[f64; 2]>,
    pub beta: Vec<f64>,
    pub mode: Mode,
    pub success_probability_analytic: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub success_probability_exact: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub success_probability_observed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub standard_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_conditional_fidelity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub branches: Vec<BranchRow>,
    pub discrepancies: Vec<Discrepancy>,
}

fn header(
    protocol: Protocol,
    alpha: &[Complex64],
    spec: &ChannelSpec,
    mode: Mode,
) -> Result<Report> {
    if spec.len() != protocol.beta_len() {
        return Err(Error::InvalidChannel(format!(
            "protocol {protocol} needs {} beta values, got {}",
            protocol.beta_len(),
            spec.len()
        )));
    }
    let mut discrepancies = protocol.discrepancies(alpha, spec)?;
    for d in &mut discrepancies {
        d.fidelity = snap(d.fidelity);
    }
    Ok(Report {
        protocol,
        alpha: alpha.iter().map(|a| [a.re, a.im]).collect(),
        beta: spec.betas().to_vec(),
        mode,
        success_probability_analytic: snap(protocol.success_probability(spec)?),
        success_probability_exact: None,
        success_probability_observed: None,
        standard_error: None,
        mean_conditional_fidelity: None,
        trials: None,
        seed: None,
        branches: Vec::new(),
        discrepancies,
    })
}

impl Report {
    /// Full branch enumeration.
    pub fn exact(protocol: Protocol, alpha: &[Complex64], spec: &ChannelSpec) -> Result<Self> {
        let mut r = header(protocol, alpha, spec, Mode::Exact)?;
        let results = protocol.exact(alpha, spec)?;
        let p: f64 = results
            .iter()
            .filter(|x| x.success)
            .filter_map(|x| x.probability)
            .sum();
        r.success_probability_exact = Some(snap(p));
        r.branches = results
            .into_iter()
            .map(|x| BranchRow {
                outcomes: x.outcomes,
                probability: x.probability.map(snap),
                count: None,
                success: x.success,
                correction: x.correction.map(|w| w.to_string()),
                fidelity: x.fidelity.map(snap),
            })
            .collect();
        Ok(r)
    }

    /// Monte-Carlo estimate from `trials` seeded runs.
    pub fn sample(
        protocol: Protocol,
        alpha: &[Complex64],
        spec: &ChannelSpec,
        trials: u64,
        seed: u64,
    ) -> Result<Self> {
        let mut r = header(protocol, alpha, spec, Mode::Sample)?;
        let s = sample(protocol, alpha, spec, trials, seed)?;
        r.success_probability_observed = Some(snap(s.success_rate));
        r.standard_error = Some(snap(s.standard_error));
        r.mean_conditional_fidelity = s.mean_conditional_fidelity.map(snap);
        r.trials = Some(trials);
        r.seed = Some(seed);
        r.branches = s
            .branches
            .into_iter()
            .map(|b| {
                let success = b.outcomes.last() == Some(&0);
                let correction = success
                    .then(|| correction_for(protocol, &b.outcomes))
                    .transpose()?;
                Ok(BranchRow {
                    outcomes: b.outcomes,
                    probability: None,
                    count: Some(b.count),
                    success,
                    correction,
                    fidelity: b.mean_fidelity.map(snap),
                })
            })
            .collect::<Result<_>>()?;
        Ok(r)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// The branch table, one row per branch.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let weight = if self.mode == Mode::Exact {
            "probability"
        } else {
            "count"
        };
        let map = |e: csv::Error| Error::InvalidInput(e.to_string());
        w.write_record(["outcomes", weight, "success", "correction", "fidelity"])
            .map_err(map)?;
        for b in &self.branches {
            let weight = match (b.probability, b.count) {
                (Some(p), _) => p.to_string(),
                (_, Some(c)) => c.to_string(),
                _ => String::new(),
            };
            w.write_record([
                join_outcomes(&b.outcomes),
                weight,
                b.success.to_string(),
                b.correction.clone().unwrap_or_default(),
                b.fidelity.map(|f| f.to_string()).unwrap_or_default(),
            ])
            .map_err(map)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let alpha: Vec<String> = self
            .alpha
            .iter()
            .map(|[re, im]| format_complex(*re, *im))
            .collect();
        let beta: Vec<String> = self.beta.iter().map(|b| b.to_string()).collect();
        let _ = writeln!(s, "protocol: {}", self.protocol);
        let _ = writeln!(s, "alpha: {}", alpha.join(", "));
        let _ = writeln!(s, "beta: {}", beta.join(", "));
        let _ = writeln!(
            s,
            "success probability (analytic): {}",
            self.success_probability_analytic
        );
        if let Some(p) = self.success_probability_exact {
            let _ = writeln!(s, "success probability (exact): {p}");
        }
        if let (Some(p), Some(se), Some(n), Some(seed)) = (
            self.success_probability_observed,
            self.standard_error,
            self.trials,
            self.seed,
        ) {
            let _ = writeln!(
                s,
                "success rate (observed): {p} ± {se} over {n} trials, seed {seed}"
            );
            match self.mean_conditional_fidelity {
                Some(f) => {
                    let _ = writeln!(s, "mean conditional fidelity: {f}");
                }
                None => {
                    let _ = writeln!(s, "mean conditional fidelity: n/a");
                }
            }
        }
        let weight = if self.mode == Mode::Exact {
            "probability"
        } else {
            "count"
        };
        let _ = writeln!(s, "\nbranches ({}):", self.branches.len());
        let _ = writeln!(
            s,
            "  {:<24} {:>16}  {:<8} {:<10} fidelity",
            "outcomes", weight, "result", "correction"
        );
        for b in &self.branches {
            let w = match (b.probability, b.count) {
                (Some(p), _) => format!("{p:.12}"),
                (_, Some(c)) => c.to_string(),
                _ => String::new(),
            };
            let _ = writeln!(
                s,
                "  {:<24} {:>16}  {:<8} {:<10} {}",
                describe_outcomes(self.protocol, &b.outcomes),
                w,
                if b.success { "success" } else { "failure" },
                b.correction.as_deref().unwrap_or("-"),
                b.fidelity.map_or("-".to_string(), |f| format!("{f:.12}")),
            );
        }
        if self.discrepancies.is_empty() {
            let _ = writeln!(s, "\nlisting discrepancies: none");
        } else {
            let _ = writeln!(s, "\nlisting discrepancies ({}):", self.discrepancies.len());
            for d in &self.discrepancies {
                let what = match d.duplicate_of {
                    Some(first) => format!("repeats entry {first}"),
                    None => "differs from projection".to_string(),
                };
                let _ = writeln!(
                    s,
                    "  {} entry {} ({}): {}; matches projection: {}, fidelity {}",
                    d.listing,
                    d.index,
                    describe_outcomes(self.protocol, &d.outcomes),
                    what,
                    d.matches_projection,
                    d.fidelity
                );
            }
        }
        s
    }
}

fn correction_for(protocol: Protocol, outcomes: &[u8]) -> Result<String> {
    let w = match protocol {
        Protocol::One => crate::protocol_one::correction_one(outcomes[0], outcomes[1])?,
        Protocol::Two => {
            crate::protocol_two::correction_two(outcomes[0], outcomes[1], outcomes[2])?
        }
    };
    Ok(w.to_string())
}

fn join_outcomes(o: &[u8]) -> String {
    o.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("-")
}

/// `Phi+ c=0 aux=0` style; Bell codes first, then controller and auxiliary
/// bits. Partial tuples (listing entries) show only what is present.
pub fn describe_outcomes(protocol: Protocol, o: &[u8]) -> String {
    let bells = match protocol {
        Protocol::One => 1,
        Protocol::Two => 2,
    }
    .min(o.len());
    let mut parts: Vec<String> = o[..bells]
        .iter()
        .map(|&b| BellState::from_code(b).map_or(b.to_string(), |s| s.name().to_string()))
        .collect();
    if let Some(c) = o.get(bells) {
        parts.push(format!("c={c}"));
    }
    if let Some(a) = o.get(bells + 1) {
        parts.push(format!("aux={a}"));
    }
    parts.join(" ")
}

pub fn format_complex(re: f64, im: f64) -> String {
    if im == 0.0 {
        re.to_string()
    } else if re == 0.0 {
        format!("{im}i")
    } else if im < 0.0 {
        format!("{re}-{}i", -im)
    } else {
        format!("{re}+{im}i")
    }
}
