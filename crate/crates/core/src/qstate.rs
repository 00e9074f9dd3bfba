//! Dense state vectors over a labelled qubit register.
//!
//! Register position 0 is the most significant bit of the basis index, so a
//! register with labels `[3, 4, 5]` stores `|q3 q4 q5⟩` at index
//! `q3·4 + q4·2 + q5`. Kets print in label order.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Particle label of a qubit.
pub type Label = u32;

pub const MAX_QUBITS: usize = 10;

/// Tolerance on squared norms after construction or renormalization.
pub const NORM_TOL: f64 = 1e-12;

/// Tolerance for product-state factorization.
pub const FACTOR_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    labels: Vec<Label>,
    amplitudes: Vec<Complex64>,
}

fn check_labels(labels: &[Label]) -> Result<()> {
    if labels.is_empty() || labels.len() > MAX_QUBITS {
        return Err(Error::SizeOutOfRange(labels.len()));
    }
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(Error::DuplicateLabel(*l));
        }
    }
    Ok(())
}

impl StateVector {
    /// The all-zero state `|0…0⟩` on `num_qubits` qubits.
    pub fn new_register(num_qubits: usize, labels: &[Label]) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::SizeOutOfRange(num_qubits));
        }
        if labels.len() != num_qubits {
            return Err(Error::LabelCount {
                expected: num_qubits,
                got: labels.len(),
            });
        }
        check_labels(labels)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self {
            labels: labels.to_vec(),
            amplitudes,
        })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(labels: &[Label], index: usize) -> Result<Self> {
        let mut s = Self::new_register(labels.len(), labels)?;
        if index >= s.dim() {
            return Err(Error::DimensionMismatch(index, s.dim()));
        }
        s.amplitudes[0] = Complex64::new(0.0, 0.0);
        s.amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    /// Wraps amplitudes that must already be normalized within [`NORM_TOL`].
    pub fn from_amplitudes(labels: &[Label], amplitudes: Vec<Complex64>) -> Result<Self> {
        let s = Self::from_raw(labels, amplitudes)?;
        let n = s.norm_sqr();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(s)
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(labels: &[Label], amplitudes: Vec<Complex64>) -> Result<Self> {
        let mut s = Self::from_raw(labels, amplitudes)?;
        let n = s.norm_sqr();
        if n.is_nan() || n <= 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n));
        }
        let scale = 1.0 / n.sqrt();
        s.amplitudes.iter_mut().for_each(|a| *a *= scale);
        Ok(s)
    }

    fn from_raw(labels: &[Label], amplitudes: Vec<Complex64>) -> Result<Self> {
        check_labels(labels)?;
        let dim = 1usize << labels.len();
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch(amplitudes.len(), dim));
        }
        Ok(Self {
            labels: labels.to_vec(),
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn contains(&self, label: Label) -> bool {
        self.labels.contains(&label)
    }

    pub fn position(&self, label: Label) -> Result<usize> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .ok_or(Error::UnknownLabel(label))
    }

    /// Bit mask selecting `label` within a basis index.
    pub fn mask(&self, label: Label) -> Result<usize> {
        let pos = self.position(label)?;
        Ok(1 << (self.num_qubits() - 1 - pos))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Tensor product `self ⊗ other`; `self`'s qubits come first.
    pub fn product(&self, other: &StateVector) -> Result<StateVector> {
        if let Some(l) = other.labels.iter().find(|l| self.labels.contains(l)) {
            return Err(Error::OverlappingLabels(*l));
        }
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        check_labels(&labels)?;
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ok(StateVector { labels, amplitudes })
    }

    /// `⟨self|other⟩`, by register position.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`, clamped to `[0, 1]`. Labels are ignored; only the
    /// register sizes must agree.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr().min(1.0))
    }

    /// Normalized one-qubit factor of a product state.
    pub fn extract_qubit_state(&self, label: Label) -> Result<StateVector> {
        self.extract_factor(&[label])
    }

    /// Normalized factor on `labels` (in the given order), provided the state
    /// factorizes as `factor ⊗ rest` within [`FACTOR_TOL`].
    pub fn extract_factor(&self, labels: &[Label]) -> Result<StateVector> {
        check_labels(labels)?;
        let masks = labels
            .iter()
            .map(|&l| self.mask(l))
            .collect::<Result<Vec<_>>>()?;
        let sub_dim = 1usize << labels.len();
        let all_targets: usize = masks.iter().sum();

        // index of the target block for every rest-configuration
        let scatter = |t: usize| -> usize {
            masks
                .iter()
                .enumerate()
                .filter(|(k, _)| t >> (labels.len() - 1 - k) & 1 == 1)
                .map(|(_, m)| m)
                .sum()
        };
        let offsets: Vec<usize> = (0..sub_dim).map(scatter).collect();
        let rests: Vec<usize> = (0..self.dim()).filter(|i| i & all_targets == 0).collect();
        let column = |r: usize| -> Vec<Complex64> {
            offsets.iter().map(|o| self.amplitudes[r | o]).collect()
        };

        let norm = |v: &[Complex64]| v.iter().map(|a| a.norm_sqr()).sum::<f64>();
        let best = rests
            .iter()
            .copied()
            .max_by(|&a, &b| norm(&column(a)).total_cmp(&norm(&column(b))))
            .expect("register has at least one configuration");
        let mut factor = column(best);
        let n = norm(&factor);
        if n.is_nan() || n <= 0.0 {
            return Err(Error::NotProductState(f64::INFINITY));
        }
        let scale = 1.0 / n.sqrt();
        factor.iter_mut().for_each(|a| *a *= scale);

        let mut residual = 0.0f64;
        for &r in &rests {
            let col = column(r);
            let overlap: Complex64 = factor.iter().zip(&col).map(|(f, c)| f.conj() * c).sum();
            for (f, c) in factor.iter().zip(&col) {
                residual = residual.max((c - f * overlap).norm());
            }
        }
        if residual > FACTOR_TOL {
            return Err(Error::NotProductState(residual));
        }
        StateVector::from_raw(labels, factor)
    }

    /// Value of `label`'s bit if every nonzero amplitude agrees on it.
    pub fn definite_bit(&self, label: Label) -> Result<Option<u8>> {
        let mask = self.mask(label)?;
        let mut seen = None;
        for (i, a) in self.amplitudes.iter().enumerate() {
            if a.norm_sqr() <= FACTOR_TOL * FACTOR_TOL {
                continue;
            }
            let bit = u8::from(i & mask != 0);
            match seen {
                None => seen = Some(bit),
                Some(b) if b != bit => return Ok(None),
                _ => {}
            }
        }
        Ok(seen)
    }
}

/// Free-function form of [`StateVector::fidelity`].
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    a.fidelity(b)
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.num_qubits();
        let subscript: Vec<String> = self.labels.iter().map(|l| l.to_string()).collect();
        let mut first = true;
        for (i, a) in self.amplitudes.iter().enumerate() {
            if a.norm() < 1e-12 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i)|{:0width$b}⟩", a.re, a.im, i, width = n)?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, "_{{{}}}", subscript.join(","))
    }
}
