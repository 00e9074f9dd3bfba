//! Reference branch listings, transcribed term by term, used as a cross-check
//! corpus against branch states computed by projection.
//!
//! Each entry is a sum of terms `±a{i}b{j}|bits⟩` (the `b` factor is optional)
//! over the qubits named by the listing. Entry order:
//!
//! | listing        | qubits    | entry index                       |
//! |----------------|-----------|-----------------------------------|
//! | one/bell       | (3, 4)    | `bell`                            |
//! | one/charlie    | (3, 4)    | `2·bell + charlie`                |
//! | one/recovered  | (3, 4)    | `2·bell + charlie`                |
//! | two/bell       | (5, 6, 7) | `4·bell23 + bell14`               |
//! | two/charlie    | (5, 6)    | `2·(4·bell23 + bell14) + charlie` |
//! | two/recovered  | (5, 6)    | `2·(4·bell23 + bell14) + charlie` |
//!
//! `two/bell` entries carry an overall factor of 1/2 in unnormalized form; the
//! others are compared up to normalization only.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qstate::Label;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Term {
    pub alpha: usize,
    pub beta: Option<usize>,
    pub ket: usize,
    pub negative: bool,
}

impl Term {
    pub fn parse(text: &str, num_qubits: usize) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("malformed listing term {text:?}"));
        let (negative, rest) = match text.as_bytes().first() {
            Some(b'+') => (false, &text[1..]),
            Some(b'-') => (true, &text[1..]),
            _ => return Err(bad()),
        };
        let (coef, bits) = rest.split_once('|').ok_or_else(bad)?;
        let coef = coef.strip_prefix('a').ok_or_else(bad)?;
        let (a, b) = match coef.split_once('b') {
            Some((a, b)) => (a, Some(b)),
            None => (coef, None),
        };
        let alpha = a.parse().map_err(|_| bad())?;
        let beta = b.map(|b| b.parse()).transpose().map_err(|_| bad())?;
        if bits.len() != num_qubits || !bits.bytes().all(|c| c == b'0' || c == b'1') {
            return Err(bad());
        }
        let ket = usize::from_str_radix(bits, 2).map_err(|_| bad())?;
        Ok(Self {
            alpha,
            beta,
            ket,
            negative,
        })
    }

    fn value(&self, alpha: &[Complex64], beta: &[f64]) -> Complex64 {
        let mut v = alpha[self.alpha] * self.beta.map_or(1.0, |j| beta[j]);
        if self.negative {
            v = -v;
        }
        v
    }
}

#[derive(Clone, Debug)]
pub struct Listing {
    name: &'static str,
    labels: &'static [Label],
    scale: f64,
    entries: Vec<Vec<Term>>,
}

impl Listing {
    fn parse(name: &'static str, labels: &'static [Label], scale: f64, text: &[&str]) -> Self {
        let entries = text
            .iter()
            .map(|line| {
                line.split_whitespace()
                    .map(|t| Term::parse(t, labels.len()).expect("built-in listing term"))
                    .collect()
            })
            .collect();
        Self {
            name,
            labels,
            scale,
            entries,
        }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn labels(&self) -> &'static [Label] {
        self.labels
    }

    /// Overall factor of each entry in unnormalized form, when fixed.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn terms(&self, index: usize) -> &[Term] {
        &self.entries[index]
    }

    /// Amplitudes of entry `index` (including the scale) for the given input
    /// and channel coefficients.
    pub fn evaluate(&self, index: usize, alpha: &[Complex64], beta: &[f64]) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); 1 << self.labels.len()];
        for t in &self.entries[index] {
            v[t.ket] += t.value(alpha, beta) * self.scale;
        }
        v
    }

    /// Pairs `(i, j)`, `i < j`, whose entries are identical as formal sums up
    /// to an overall sign, so they describe the same state for every input.
    pub fn coincident_pairs(&self) -> Vec<(usize, usize)> {
        let canon: Vec<(Vec<Term>, Vec<Term>)> = self
            .entries
            .iter()
            .map(|e| {
                let mut a = e.clone();
                a.sort();
                let mut b: Vec<Term> = e
                    .iter()
                    .map(|t| Term {
                        negative: !t.negative,
                        ..*t
                    })
                    .collect();
                b.sort();
                (a, b)
            })
            .collect();
        let mut pairs = Vec::new();
        for j in 0..canon.len() {
            for i in 0..j {
                if canon[i].0 == canon[j].0 || canon[i].0 == canon[j].1 {
                    pairs.push((i, j));
                }
            }
        }
        pairs
    }
}

pub fn one_bell() -> Listing {
    Listing::parse("one/bell", &[3, 4], 1.0, &ONE_BELL_TEXT)
}

pub fn one_charlie() -> Listing {
    Listing::parse("one/charlie", &[3, 4], 1.0, &ONE_CHARLIE_TEXT)
}

pub fn one_recovered() -> Listing {
    Listing::parse("one/recovered", &[3, 4], 1.0, &ONE_RECOVERED_TEXT)
}

pub fn two_bell() -> Listing {
    Listing::parse("two/bell", &[5, 6, 7], 0.5, &TWO_BELL_TEXT)
}

pub fn two_charlie() -> Listing {
    Listing::parse("two/charlie", &[5, 6], 1.0, &TWO_CHARLIE_TEXT)
}

pub fn two_recovered() -> Listing {
    Listing::parse("two/recovered", &[5, 6], 1.0, &TWO_RECOVERED_TEXT)
}

const ONE_BELL_TEXT: [&str; 4] = [
    "+a0b0|00 +a1b1|11",
    "+a0b0|00 -a1b1|11",
    "+a0b1|11 +a1b0|00",
    "+a0b1|11 -a1b0|00",
];

const ONE_CHARLIE_TEXT: [&str; 8] = [
    "+a0b0|00 +a1b1|10",
    "+a0b0|01 -a1b1|11",
    "+a0b0|00 -a1b1|10",
    "+a0b0|01 +a1b1|11",
    "+a1b0|00 +a0b1|10",
    "+a1b0|01 -a0b1|11",
    "-a1b0|00 +a0b1|10",
    "-a1b0|01 -a0b1|11",
];

const ONE_RECOVERED_TEXT: [&str; 8] = [
    "+a0|00 +a1|10",
    "+a0|01 -a1|11",
    "+a0|00 -a1|10",
    "+a0|01 +a1|11",
    "+a1|00 +a0|10",
    "+a1|01 -a0|11",
    "-a1|00 +a0|10",
    "-a1|01 -a0|11",
];

const TWO_BELL_TEXT: [&str; 16] = [
    "+a0b0|000 +a1b2|011 +a2b1|100 +a3b3|111",
    "+a0b0|000 +a1b2|011 -a2b1|100 -a3b3|111",
    "+a0b1|100 +a1b3|111 +a2b0|000 +a3b2|011",
    "+a0b1|100 +a1b3|111 -a2b0|000 -a3b2|011",
    "+a0b0|000 -a1b2|011 +a2b1|100 -a3b3|111",
    "+a0b0|000 -a1b2|011 -a2b1|100 +a3b3|111",
    "+a0b1|100 -a1b3|111 +a2b0|000 -a3b2|011",
    "+a0b1|100 -a1b3|111 -a2b0|000 +a3b2|011",
    "+a0b2|011 +a1b0|000 +a2b3|111 +a3b1|100",
    "+a0b2|011 +a1b0|000 -a2b3|111 -a3b1|100",
    "+a0b3|111 +a1b1|100 +a2b2|011 +a3b0|000",
    "+a0b3|111 +a1b1|100 -a2b2|011 -a3b0|000",
    "+a0b2|011 -a1b0|000 +a2b3|111 -a3b1|100",
    "+a0b2|011 -a1b0|000 -a2b3|111 +a3b1|100",
    "+a0b3|111 -a1b1|100 +a2b2|011 -a3b0|000",
    "+a0b3|111 -a1b1|100 -a2b2|011 +a3b0|000",
];

const TWO_CHARLIE_TEXT: [&str; 32] = [
    "+a0b0|00 +a1b2|01 +a2b1|10 +a3b3|11",
    "+a0b0|00 -a1b2|01 +a2b1|10 -a3b3|11",
    "+a0b0|00 +a1b2|01 -a2b1|10 -a3b3|11",
    "+a0b0|00 -a1b2|01 -a2b1|10 +a3b3|11",
    "+a0b1|10 +a1b3|11 +a2b0|00 +a3b2|01",
    "+a0b1|10 -a1b3|11 +a2b0|00 -a3b2|01",
    "+a0b1|10 +a1b3|11 -a2b0|00 -a3b2|01",
    "+a0b1|10 -a1b3|11 -a2b0|00 +a3b2|01",
    "+a0b0|00 -a1b2|01 +a2b1|10 -a3b3|11",
    "+a0b0|00 +a1b2|01 +a2b1|10 +a3b3|11",
    "+a0b0|00 -a1b2|01 -a2b1|10 +a3b3|11",
    "+a0b0|00 +a1b2|01 -a2b1|10 -a3b3|11",
    "+a0b1|10 -a1b3|11 +a2b0|00 -a3b2|01",
    "+a0b1|10 +a1b3|11 +a2b0|00 +a3b2|01",
    "+a0b1|10 -a1b3|11 -a2b0|00 +a3b2|01",
    "+a0b1|10 +a1b3|11 -a2b0|00 -a3b2|01",
    "+a0b2|01 +a1b0|00 +a2b3|11 +a3b1|10",
    "-a0b2|01 +a1b0|00 -a2b3|11 +a3b1|10",
    "+a0b2|01 +a1b0|00 -a2b3|11 -a3b1|10",
    "-a0b2|01 +a1b0|00 +a2b3|11 -a3b1|10",
    "+a0b3|11 +a1b1|10 +a2b2|01 +a3b0|00",
    "-a0b3|11 +a1b1|10 -a2b2|01 +a3b0|00",
    "+a0b3|11 +a1b1|10 -a2b2|01 -a3b0|00",
    "-a0b3|11 +a1b1|10 +a2b2|01 -a3b0|00",
    "+a0b2|01 -a1b0|00 +a2b3|11 -a3b1|10",
    "-a0b2|01 -a1b0|00 -a2b3|11 -a3b1|10",
    "+a0b2|01 -a1b0|00 -a2b3|11 +a3b1|10",
    "-a0b2|01 -a1b0|00 +a2b3|11 +a3b1|10",
    "+a0b3|11 -a1b1|10 +a2b2|01 -a3b0|00",
    "-a0b3|11 -a1b1|10 -a2b2|01 -a3b0|00",
    "+a0b3|11 -a1b1|10 -a2b2|01 +a3b0|00",
    "-a0b3|11 -a1b1|10 +a2b2|01 +a3b0|00",
];

const TWO_RECOVERED_TEXT: [&str; 32] = [
    "+a0|00 +a1|01 +a2|10 +a3|11",
    "+a0|00 -a1|01 +a2|10 -a3|11",
    "+a0|00 +a1|01 -a2|10 -a3|11",
    "+a0|00 -a1|01 -a2|10 +a3|11",
    "+a0|10 +a1|11 +a2|00 +a3|01",
    "+a0|10 -a1|11 +a2|00 -a3|01",
    "+a0|10 +a1|11 -a2|00 -a3|01",
    "+a0|10 -a1|11 -a2|00 +a3|01",
    "+a0|00 -a1|01 +a2|10 -a3|11",
    "+a0|00 +a1|01 +a2|10 +a3|11",
    "+a0|00 -a1|01 -a2|10 +a3|11",
    "+a0|00 +a1|01 -a2|10 -a3|11",
    "+a0|10 -a1|11 +a2|00 -a3|01",
    "+a0|10 +a1|11 +a2|00 +a3|01",
    "+a0|10 -a1|11 -a2|00 +a3|01",
    "+a0|10 +a1|11 -a2|00 -a3|01",
    "+a0|01 +a1|00 +a2|11 +a3|10",
    "-a0|01 +a1|00 -a2|11 +a3|10",
    "+a0|01 +a1|00 -a2|11 -a3|10",
    "-a0|01 +a1|00 +a2|11 -a3|10",
    "+a0|11 +a1|10 +a2|01 +a3|00",
    "-a0|11 +a1|10 -a2|01 +a3|00",
    "+a0|11 +a1|10 -a2|01 -a3|00",
    "-a0|11 +a1|10 +a2|01 -a3|00",
    "+a0|01 -a1|00 +a2|11 -a3|10",
    "-a0|01 -a1|00 -a2|11 -a3|10",
    "+a0|01 -a1|00 -a2|11 +a3|10",
    "-a0|01 -a1|00 +a2|11 +a3|10",
    "+a0|11 -a1|10 +a2|01 -a3|00",
    "-a0|11 -a1|10 -a2|01 -a3|00",
    "+a0|11 -a1|10 -a2|01 +a3|00",
    "-a0|11 -a1|10 +a2|01 +a3|00",
];
