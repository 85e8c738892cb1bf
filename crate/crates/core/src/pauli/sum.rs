use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, MAX_DIM};
use super::string::{apply_letters, Pauli, PauliString};
use crate::error::{Error, Result};

/// Coefficients with magnitude below this are dropped.
pub const PRUNE_TOL: f64 = 1e-12;

/// Complex-weighted sum of phase-free Pauli strings, `Σ_k c_k P_k`.
///
/// Terms are kept in lexicographic letter order so iteration and output are
/// deterministic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliSum {
    n: usize,
    terms: BTreeMap<Vec<Pauli>, Complex64>,
}

impl PauliSum {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    /// A single string, with its phase moved into the coefficient.
    pub fn from_string(s: &PauliString) -> Self {
        let mut sum = Self::zero(s.len());
        sum.add_term(s.letters.clone(), s.phase.to_complex());
        sum
    }

    /// Builds a sum from `(letters, coefficient)` pairs such as `("ZY", -0.5)`.
    pub fn from_terms<'a>(n: usize, terms: impl IntoIterator<Item = (&'a str, Complex64)>) -> Result<Self> {
        let mut sum = Self::zero(n);
        for (label, c) in terms {
            let s: PauliString = label.parse()?;
            if s.len() != n {
                return Err(Error::DimensionMismatch {
                    left: format!("{n} qubits"),
                    right: format!("term `{label}`"),
                });
            }
            sum.add_term(s.letters, c * s.phase.to_complex());
        }
        Ok(sum)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c · letters`; a term whose coefficient falls under the pruning
    /// threshold is removed.
    pub fn add_term(&mut self, letters: Vec<Pauli>, c: Complex64) {
        debug_assert_eq!(letters.len(), self.n);
        let entry = self.terms.entry(letters).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if entry.norm() < PRUNE_TOL {
            self.terms.retain(|_, v| v.norm() >= PRUNE_TOL);
        }
    }

    pub fn prune(&mut self, tol: f64) {
        self.terms.retain(|_, v| v.norm() >= tol);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Pauli], Complex64)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    /// Coefficient of a term given as a letter string, zero if absent.
    pub fn coefficient(&self, label: &str) -> Complex64 {
        let letters: Option<Vec<Pauli>> = label.chars().map(Pauli::from_char).collect();
        letters
            .and_then(|l| self.terms.get(&l).copied())
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// `Σ_k |c_k|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum()
    }

    /// Largest imaginary part over all coefficients.
    pub fn max_imag(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    /// Hermitian iff every coefficient is real (the strings themselves are).
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_imag() <= tol
    }

    /// Largest coefficient difference over the union of both term sets.
    pub fn max_abs_diff(&self, other: &PauliSum) -> f64 {
        if self.n != other.n {
            return f64::INFINITY;
        }
        let a = self
            .terms
            .iter()
            .map(|(k, v)| (v - other.terms.get(k).copied().unwrap_or_default()).norm());
        let b = other
            .terms
            .iter()
            .filter(|(k, _)| !self.terms.contains_key(*k))
            .map(|(_, v)| v.norm());
        a.chain(b).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &PauliSum, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn scale(&self, s: Complex64) -> PauliSum {
        let mut out = PauliSum::zero(self.n);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * s);
        }
        out
    }

    /// Qubit concatenation: `self` on the low qubits, `other` on the next ones.
    pub fn tensor(&self, other: &PauliSum) -> PauliSum {
        let mut out = PauliSum::zero(self.n + other.n);
        for (ka, va) in &self.terms {
            for (kb, vb) in &other.terms {
                let mut letters = ka.clone();
                letters.extend_from_slice(kb);
                out.add_term(letters, va * vb);
            }
        }
        out
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let dim = 1usize << self.n;
        if dim > MAX_DIM {
            return Err(Error::DimensionTooLarge { dim, cap: MAX_DIM });
        }
        let mut out = ComplexMatrix::zeros(dim, dim);
        for (letters, c) in &self.terms {
            let (flip, sign, ys) = PauliString::masks(letters);
            let base = c * super::string::Phase::from_power(ys).to_complex();
            for col in 0..dim {
                let v = if (col & sign).count_ones() % 2 == 1 {
                    -base
                } else {
                    base
                };
                out[(col ^ flip, col)] += v;
            }
        }
        Ok(out)
    }

    /// `(Σ c_k P_k)|amps⟩`.
    pub fn apply(&self, amps: &[Complex64]) -> Result<Vec<Complex64>> {
        if amps.len() != 1usize << self.n {
            return Err(Error::DimensionMismatch {
                left: format!("{}-qubit Pauli sum", self.n),
                right: format!("vector of length {}", amps.len()),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for (letters, c) in &self.terms {
            apply_letters(letters, *c, amps, &mut out);
        }
        Ok(out)
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            let label: String = k.iter().map(|p| p.to_char()).collect();
            if c.im.abs() < PRUNE_TOL {
                write!(f, "{:+.6}·{label}", c.re)?;
            } else {
                write!(f, "({:+.6}{:+.6}i)·{label}", c.re, c.im)?;
            }
        }
        Ok(())
    }
}

/// Expands a `2^n x 2^n` matrix in the Pauli basis:
/// `c_k = tr(P_k† m) / 2^n` over all `4^n` phase-free strings.
pub fn pauli_decompose(m: &ComplexMatrix, n: usize) -> Result<PauliSum> {
    if !m.is_square() || !m.rows().is_power_of_two() {
        return Err(Error::NotPowerOfTwo(m.rows()));
    }
    if m.rows() != 1usize << n {
        return Err(Error::DimensionMismatch {
            left: m.dim_label(),
            right: format!("{n} qubits"),
        });
    }
    let dim = m.rows();
    if dim > MAX_DIM {
        return Err(Error::DimensionTooLarge { dim, cap: MAX_DIM });
    }
    let norm = 1.0 / dim as f64;
    let mut sum = PauliSum::zero(n);
    let mut letters = vec![Pauli::I; n];
    for code in 0..(1usize << (2 * n)) {
        for (q, l) in letters.iter_mut().enumerate() {
            *l = Pauli::from_index(code >> (2 * q));
        }
        let (flip, sign, ys) = PauliString::masks(&letters);
        // P[col ^ flip, col] = i^ys (-1)^{popcount(col & sign)}
        let base = super::string::Phase::from_power(ys).to_complex().conj();
        let mut acc = Complex64::new(0.0, 0.0);
        for col in 0..dim {
            let e = m[(col ^ flip, col)];
            if (col & sign).count_ones() % 2 == 1 {
                acc -= e;
            } else {
                acc += e;
            }
        }
        let c = base * acc * norm;
        if c.norm() >= PRUNE_TOL {
            sum.terms.insert(letters.clone(), c);
        }
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::string::pauli;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn decompose_basis_element() {
        let zz = pauli(Pauli::Z).kron(&pauli(Pauli::Z));
        let s = pauli_decompose(&zz, 2).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s.coefficient("ZZ") - re(1.0)).norm() < 1e-15);
    }

    #[test]
    fn decompose_zero_is_empty() {
        let s = pauli_decompose(&ComplexMatrix::zeros(2, 2), 1).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn decompose_rejects_bad_dims() {
        assert_eq!(
            pauli_decompose(&ComplexMatrix::identity(3), 1),
            Err(Error::NotPowerOfTwo(3))
        );
        assert!(pauli_decompose(&ComplexMatrix::identity(4), 1).is_err());
    }

    #[test]
    fn y_letter_decomposes_with_unit_coefficient() {
        let m = pauli(Pauli::X).kron(&pauli(Pauli::Y));
        // kron(X, Y): X on qubit 1, Y on qubit 0
        let s = pauli_decompose(&m, 2).unwrap();
        assert!((s.coefficient("YX") - re(1.0)).norm() < 1e-15);
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn tensor_and_reconstruct() {
        let a = PauliSum::from_terms(1, [("Z", re(0.6)), ("Y", re(-0.8))]).unwrap();
        let b = PauliSum::from_terms(1, [("X", re(1.0))]).unwrap();
        let ab = a.tensor(&b);
        assert!((ab.coefficient("ZX") - re(0.6)).norm() < 1e-15);
        let back = pauli_decompose(&ab.to_matrix().unwrap(), 2).unwrap();
        assert!(back.approx_eq(&ab, 1e-14));
    }

    #[test]
    fn add_term_prunes_cancellations() {
        let mut s = PauliSum::zero(1);
        s.add_term(vec![Pauli::X], re(0.5));
        s.add_term(vec![Pauli::X], re(-0.5));
        assert!(s.is_empty());
    }
}
