//! Normalized n-qubit state vectors.
//!
//! Basis index bit `q` holds qubit `q` (little-endian: qubit 0 is the least
//! significant bit). The JSON form is `{"n": 3, "amps": [[re, im], ...]}` with
//! amplitudes in basis-index order.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{ComplexMatrix, Pauli, MAX_DIM};

const NORM_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    n: usize,
    amps: Vec<[f64; 2]>,
}

impl StateVector {
    /// Normalizes `amps`; fails on a length that is not `2^n` or a null vector.
    pub fn new(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        if (1usize << n) > MAX_DIM {
            return Err(Error::DimensionTooLarge {
                dim: 1 << n,
                cap: MAX_DIM,
            });
        }
        if amps.len() != 1usize << n {
            return Err(Error::DimensionMismatch {
                left: format!("{n} qubits"),
                right: format!("{} amplitudes", amps.len()),
            });
        }
        let mut s = Self { n, amps };
        s.renormalize()?;
        Ok(s)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        *amps
            .get_mut(index)
            .ok_or_else(|| Error::invalid("index", format!("{index} >= 2^{n}")))? = Complex64::new(1.0, 0.0);
        Self::new(n, amps)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn renormalize(&mut self) -> Result<()> {
        let norm = self.norm();
        if !(norm > NORM_FLOOR) {
            return Err(Error::invalid("state", "null vector cannot be normalized"));
        }
        let inv = 1.0 / norm;
        for a in &mut self.amps {
            *a *= inv;
        }
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_same(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Largest amplitude difference.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        if self.n != other.n {
            return f64::INFINITY;
        }
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn check_same(&self, other: &StateVector) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: format!("{} qubits", self.n),
                right: format!("{} qubits", other.n),
            });
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::invalid(
                "qubit",
                format!("{q} out of range for {} qubits", self.n),
            ));
        }
        Ok(())
    }

    /// Applies a 2x2 unitary to qubit `q`.
    pub fn apply_single(&mut self, q: usize, u: &ComplexMatrix) -> Result<()> {
        self.check_qubit(q)?;
        if u.rows() != 2 || u.cols() != 2 {
            return Err(Error::DimensionMismatch {
                left: u.dim_label(),
                right: "2x2".into(),
            });
        }
        let (u00, u01, u10, u11) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let j = i | bit;
                let (a, b) = (self.amps[i], self.amps[j]);
                self.amps[i] = u00 * a + u01 * b;
                self.amps[j] = u10 * a + u11 * b;
            }
        }
        Ok(())
    }

    /// Applies the same 2x2 unitary to every qubit.
    pub fn apply_all(&mut self, u: &ComplexMatrix) -> Result<()> {
        for q in 0..self.n {
            self.apply_single(q, u)?;
        }
        Ok(())
    }

    /// Applies `u` to `target` on the subspace where every control is 1.
    pub fn apply_controlled(&mut self, controls: &[usize], target: usize, u: &ComplexMatrix) -> Result<()> {
        self.check_qubit(target)?;
        let mut cmask = 0usize;
        for &c in controls {
            self.check_qubit(c)?;
            if c == target || cmask & (1 << c) != 0 {
                return Err(Error::invalid("targets", "control and target qubits must be distinct"));
            }
            cmask |= 1 << c;
        }
        let (u00, u01, u10, u11) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
        let bit = 1usize << target;
        for i in 0..self.amps.len() {
            if i & bit == 0 && i & cmask == cmask {
                let j = i | bit;
                let (a, b) = (self.amps[i], self.amps[j]);
                self.amps[i] = u00 * a + u01 * b;
                self.amps[j] = u10 * a + u11 * b;
            }
        }
        Ok(())
    }

    /// Applies a single Pauli letter to qubit `q` without a matrix product.
    pub fn apply_pauli(&mut self, q: usize, p: Pauli) -> Result<()> {
        self.check_qubit(q)?;
        let bit = 1usize << q;
        let i = Complex64::new(0.0, 1.0);
        match p {
            Pauli::I => {}
            Pauli::X => {
                for k in 0..self.amps.len() {
                    if k & bit == 0 {
                        self.amps.swap(k, k | bit);
                    }
                }
            }
            Pauli::Z => {
                for (k, a) in self.amps.iter_mut().enumerate() {
                    if k & bit != 0 {
                        *a = -*a;
                    }
                }
            }
            Pauli::Y => {
                // Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩
                for k in 0..self.amps.len() {
                    if k & bit == 0 {
                        let j = k | bit;
                        let (a0, a1) = (self.amps[k], self.amps[j]);
                        self.amps[k] = -i * a1;
                        self.amps[j] = i * a0;
                    }
                }
            }
        }
        Ok(())
    }

    /// Applies a dense `2^n x 2^n` operator; the result is not renormalized.
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> Result<Vec<Complex64>> {
        m.apply(&self.amps)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&StateJson {
            n: self.n,
            amps: self.amps.iter().map(|a| [a.re, a.im]).collect(),
        })
        .expect("state serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: StateJson = serde_json::from_str(s).map_err(|e| Error::Parse {
            line: e.line() as u64,
            message: e.to_string(),
        })?;
        Self::new(
            raw.n,
            raw.amps.into_iter().map(|[re, im]| Complex64::new(re, im)).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{pauli, tensor};

    fn sample(n: usize) -> StateVector {
        let amps = (0..1 << n)
            .map(|k| Complex64::new((k as f64 * 0.7).sin(), (k as f64 * 1.3).cos()))
            .collect();
        StateVector::new(n, amps).unwrap()
    }

    #[test]
    fn constructor_normalizes() {
        let s = StateVector::new(1, vec![Complex64::new(3.0, 0.0), Complex64::new(0.0, 4.0)]).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
        assert!(StateVector::new(1, vec![Complex64::new(0.0, 0.0); 2]).is_err());
        assert!(StateVector::new(2, vec![Complex64::new(1.0, 0.0); 2]).is_err());
    }

    #[test]
    fn single_qubit_gate_matches_kron() {
        let s = sample(3);
        let u = pauli(Pauli::Y);
        let mut fast = s.clone();
        fast.apply_single(1, &u).unwrap();
        let id = ComplexMatrix::identity(2);
        let dense = tensor(&[id.clone(), u, id]).unwrap();
        let slow = s.apply_matrix(&dense).unwrap();
        for (a, b) in fast.amps().iter().zip(&slow) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn pauli_fast_path_matches_matrix() {
        for p in Pauli::ALL {
            let mut a = sample(2);
            let mut b = a.clone();
            a.apply_pauli(0, p).unwrap();
            b.apply_single(0, &pauli(p)).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-15, "{p}");
        }
    }

    #[test]
    fn controlled_gate_rejects_overlap() {
        let mut s = sample(2);
        assert!(s.apply_controlled(&[1], 1, &pauli(Pauli::X)).is_err());
        assert!(s.apply_controlled(&[2], 0, &pauli(Pauli::X)).is_err());
    }

    #[test]
    fn json_layout() {
        let s = StateVector::basis(2, 1).unwrap();
        assert_eq!(
            s.to_json(),
            r#"{"n":2,"amps":[[0.0,0.0],[1.0,0.0],[0.0,0.0],[0.0,0.0]]}"#
        );
        let back = StateVector::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
    }
}
