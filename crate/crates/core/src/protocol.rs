//! Pieces shared by both protocols: results, input validation, listing
//! comparison and the discrepancy report.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::channels::ChannelSpec;
use crate::correction::{PauliWord, EXACT_FIDELITY_TOL};
use crate::error::{Error, Result};
use crate::listings::Listing;
use crate::measure::{BranchRecord, RngStream};
use crate::qstate::{Label, StateVector};
use crate::{protocol_one, protocol_two};

/// Outcome of one protocol run (sampled) or one branch (exact).
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolResult {
    pub success: bool,
    /// Measurement results in execution order: Bell code(s), the
    /// controller's bit, then the auxiliary bit.
    pub outcomes: Vec<u8>,
    /// Correction applied; `None` on failure.
    pub correction: Option<PauliWord>,
    pub recovered: Option<StateVector>,
    pub fidelity: Option<f64>,
    /// Exact branch probability; `None` for sampled runs.
    pub probability: Option<f64>,
}

impl ProtocolResult {
    pub fn aux(&self) -> u8 {
        *self.outcomes.last().expect("outcomes never empty")
    }

    pub fn charlie(&self) -> u8 {
        self.outcomes[self.outcomes.len() - 2]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    One,
    Two,
}

impl Protocol {
    pub fn alpha_len(self) -> usize {
        match self {
            Protocol::One => 2,
            Protocol::Two => 4,
        }
    }

    pub fn beta_len(self) -> usize {
        self.alpha_len()
    }

    pub fn success_probability(self, spec: &ChannelSpec) -> Result<f64> {
        match self {
            Protocol::One => protocol_one::success_probability_one(spec),
            Protocol::Two => protocol_two::success_probability_two(spec),
        }
    }

    /// Every branch, with exact probabilities, in lexicographic outcome order.
    pub fn exact(self, alpha: &[Complex64], spec: &ChannelSpec) -> Result<Vec<ProtocolResult>> {
        match self {
            Protocol::One => protocol_one::exact_one(alpha, spec),
            Protocol::Two => protocol_two::exact_two(alpha, spec),
        }
    }

    pub fn teleport(
        self,
        alpha: &[Complex64],
        spec: &ChannelSpec,
        rng: &mut RngStream,
    ) -> Result<ProtocolResult> {
        match self {
            Protocol::One => protocol_one::teleport_one(alpha, spec, rng),
            Protocol::Two => protocol_two::teleport_two(alpha, spec, rng),
        }
    }

    pub fn listing_comparisons(
        self,
        alpha: &[Complex64],
        spec: &ChannelSpec,
    ) -> Result<Vec<ListingComparison>> {
        match self {
            Protocol::One => protocol_one::listing_comparisons_one(alpha, spec),
            Protocol::Two => protocol_two::listing_comparisons_two(alpha, spec),
        }
    }

    pub fn listings(self) -> Vec<Listing> {
        match self {
            Protocol::One => protocol_one::listings_one(),
            Protocol::Two => protocol_two::listings_two(),
        }
    }

    pub fn discrepancies(
        self,
        alpha: &[Complex64],
        spec: &ChannelSpec,
    ) -> Result<Vec<Discrepancy>> {
        let comparisons = self.listing_comparisons(alpha, spec)?;
        Ok(discrepancy_report(&self.listings(), &comparisons))
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one" => Ok(Protocol::One),
            "two" => Ok(Protocol::Two),
            _ => Err(Error::InvalidInput(format!("unknown protocol {s:?}"))),
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Protocol::One => "one",
            Protocol::Two => "two",
        })
    }
}

/// The state to teleport on `labels`, checked for length and normalization.
pub fn input_state(alpha: &[Complex64], labels: &[Label]) -> Result<StateVector> {
    if alpha.len() != 1 << labels.len() {
        return Err(Error::InvalidInput(format!(
            "alpha must have {} entries, got {}",
            1 << labels.len(),
            alpha.len()
        )));
    }
    StateVector::from_amplitudes(labels, alpha.to_vec())
}

/// Turns a finished branch into a result: on aux 0 applies `correction` and
/// extracts the `output` qubits.
pub(crate) fn conclude(
    outcomes: Vec<u8>,
    state: Option<StateVector>,
    probability: Option<f64>,
    correction: impl FnOnce(&[u8]) -> Result<PauliWord>,
    output: &[Label],
    target: &StateVector,
) -> Result<ProtocolResult> {
    let aux = *outcomes.last().expect("plan measures the auxiliary qubit");
    let Some(mut state) = state.filter(|_| aux == 0) else {
        return Ok(ProtocolResult {
            success: false,
            outcomes,
            correction: None,
            recovered: None,
            fidelity: None,
            probability,
        });
    };
    let word = correction(&outcomes)?;
    word.apply_in_place(&mut state)?;
    let recovered = state.extract_factor(output)?;
    let fidelity = recovered.fidelity(target)?;
    Ok(ProtocolResult {
        success: true,
        outcomes,
        correction: Some(word),
        recovered: Some(recovered),
        fidelity: Some(fidelity),
        probability,
    })
}

/// One listing entry set against the state obtained by projection.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ListingComparison {
    pub listing: &'static str,
    pub index: usize,
    pub outcomes: Vec<u8>,
    pub probability: f64,
    /// Fidelity between the listed and projected states.
    pub fidelity: f64,
    /// `|√p − ‖entry‖|` for listings with a fixed overall factor.
    pub norm_deviation: Option<f64>,
    pub matches: bool,
}

/// Tolerance on `norm_deviation`.
pub const LISTING_NORM_TOL: f64 = 1e-12;

/// Compares `records[i]` with entry `i` of `listing`. Record states are
/// reduced to the listing's qubits, which must factor out.
pub(crate) fn compare_listing(
    listing: &Listing,
    records: &[&BranchRecord],
    alpha: &[Complex64],
    beta: &[f64],
) -> Result<Vec<ListingComparison>> {
    if records.len() != listing.len() {
        return Err(Error::InvalidInput(format!(
            "{} has {} entries but {} branches were given",
            listing.name(),
            listing.len(),
            records.len()
        )));
    }
    let mut out = Vec::with_capacity(records.len());
    for (index, rec) in records.iter().enumerate() {
        let listed = listing.evaluate(index, alpha, beta);
        let listed_norm = listed.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let fidelity = match (&rec.state, listed_norm > 1e-12) {
            (Some(s), true) => {
                let factor = s.extract_factor(listing.labels())?;
                factor.fidelity(&StateVector::normalized(listing.labels(), listed)?)?
            }
            (None, false) => 1.0,
            _ => 0.0,
        };
        let norm_deviation =
            (listing.scale() != 1.0).then(|| (rec.probability.sqrt() - listed_norm).abs());
        let matches = fidelity >= 1.0 - EXACT_FIDELITY_TOL
            && norm_deviation.is_none_or(|d| d <= LISTING_NORM_TOL);
        out.push(ListingComparison {
            listing: listing.name(),
            index,
            outcomes: rec.outcomes.clone(),
            probability: rec.probability,
            fidelity,
            norm_deviation,
            matches,
        });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscrepancyKind {
    /// The listed state differs from the projected one by more than a phase.
    Mismatch,
    /// The entry repeats an earlier entry of the same listing up to sign.
    DuplicateEntry,
}

/// One flagged listing entry.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Discrepancy {
    pub listing: &'static str,
    pub index: usize,
    pub outcomes: Vec<u8>,
    pub kind: DiscrepancyKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duplicate_of: Option<usize>,
    /// Whether the listed state still agrees with projection.
    pub matches_projection: bool,
    pub fidelity: f64,
}

/// Mismatches from `comparisons` plus entries that duplicate an earlier entry
/// of their listing, sorted by listing then index.
pub fn discrepancy_report(
    listings: &[Listing],
    comparisons: &[ListingComparison],
) -> Vec<Discrepancy> {
    let find = |name: &str, index: usize| {
        comparisons
            .iter()
            .find(|c| c.listing == name && c.index == index)
    };
    let mut out = Vec::new();
    for c in comparisons.iter().filter(|c| !c.matches) {
        out.push(Discrepancy {
            listing: c.listing,
            index: c.index,
            outcomes: c.outcomes.clone(),
            kind: DiscrepancyKind::Mismatch,
            duplicate_of: None,
            matches_projection: false,
            fidelity: c.fidelity,
        });
    }
    for l in listings {
        for (first, second) in l.coincident_pairs() {
            let Some(c) = find(l.name(), second) else {
                continue;
            };
            out.push(Discrepancy {
                listing: l.name(),
                index: second,
                outcomes: c.outcomes.clone(),
                kind: DiscrepancyKind::DuplicateEntry,
                duplicate_of: Some(first),
                matches_projection: c.matches,
                fidelity: c.fidelity,
            });
        }
    }
    let order = |name: &str| {
        listings
            .iter()
            .position(|l| l.name() == name)
            .unwrap_or(usize::MAX)
    };
    out.sort_by_key(|d| {
        (
            order(d.listing),
            d.index,
            d.kind == DiscrepancyKind::DuplicateEntry,
        )
    });
    out
}

/// Records of `records` whose last outcome (the auxiliary bit) is 0.
pub(crate) fn aux_zero(records: &[BranchRecord]) -> Vec<&BranchRecord> {
    records
        .iter()
        .filter(|r| r.outcomes.last() == Some(&0))
        .collect()
}
