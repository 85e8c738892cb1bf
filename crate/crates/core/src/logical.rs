//! Logical basis states of the n-qubit bit-flip chain, their rotated forms and
//! the rotated stabilizer generators and logical operators.
//!
//! The GHZ encoding sums over `V = {0^n, 1^n}`:
//! `|0_L⟩ ∝ Σ_v |v⟩` and `|1_L⟩ ∝ Σ_v |v ⊕ 1⟩`. Both sums give the same vector
//! `(|0…0⟩ + |1…1⟩)/√2`, so any superposition `a0|0_L⟩ + a1|1_L⟩` is
//! `(a0 + a1)` times that vector. The unnormalized prefactor `1/√(2^{n−1})`
//! is only a unit norm for `n = 2`; every state here is renormalized instead.
//! The repetition encoding `|0^n⟩`, `|1^n⟩` keeps the two logical states
//! distinguishable.
//!
//! Rotations act per qubit with `U = R_x(θ) R_z(φ)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{pauli, pauli_decompose, tensor, ComplexMatrix, Pauli, PauliString, PauliSum, Phase};
use crate::rotation::{conjugate, rotation, Axis, RotationParams};
use crate::state::StateVector;

pub const MIN_QUBITS: usize = 2;
pub const MAX_QUBITS: usize = 12;

/// Residual below which an operator counts as stabilizing a state.
pub const STABILIZE_TOL: f64 = 1e-10;

const PRODUCT_FORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingMode {
    /// Both logical states are `(|0^n⟩ + |1^n⟩)/√2`.
    #[default]
    Ghz,
    /// `|0_L⟩ = |0^n⟩`, `|1_L⟩ = |1^n⟩`.
    Repetition,
}

tag_enum!(EncodingMode, EncodingMode::Ghz => "ghz", EncodingMode::Repetition => "repetition");

/// Logical amplitudes `a0|0_L⟩ + a1|1_L⟩`, normalized on construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogicalAmplitudes {
    pub a0: Complex64,
    pub a1: Complex64,
}

impl LogicalAmplitudes {
    pub fn new(a0: Complex64, a1: Complex64) -> Result<Self> {
        let norm = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::invalid("amplitudes", "a0 and a1 must not both vanish"));
        }
        Ok(Self {
            a0: a0 / norm,
            a1: a1 / norm,
        })
    }

    pub fn real(a0: f64, a1: f64) -> Result<Self> {
        Self::new(Complex64::new(a0, 0.0), Complex64::new(a1, 0.0))
    }

    /// `a0 = a1 = 1/√2`.
    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            a0: Complex64::new(h, 0.0),
            a1: Complex64::new(h, 0.0),
        }
    }
}

/// `[[n, k, d]]` code parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub d: usize,
}

impl CodeParams {
    pub fn new(n: usize, k: usize, d: usize) -> Result<Self> {
        if k < 1 || k >= n {
            return Err(Error::invalid("k", format!("need 1 <= k < n, got k = {k}, n = {n}")));
        }
        if d < 1 || d > n {
            return Err(Error::invalid("d", format!("need 1 <= d <= n, got d = {d}, n = {n}")));
        }
        Ok(Self { n, k, d })
    }

    /// The n-qubit bit-flip chain, `[[n, 1, n]]`.
    pub fn repetition(n: usize) -> Result<Self> {
        Self::new(n, 1, n)
    }
}

fn check_n(n: usize) -> Result<()> {
    if !(MIN_QUBITS..=MAX_QUBITS).contains(&n) {
        return Err(Error::invalid(
            "n",
            format!("qubit count must be in {MIN_QUBITS}..={MAX_QUBITS}, got {n}"),
        ));
    }
    Ok(())
}

fn xor_sum(n: usize, offset: usize) -> Result<StateVector> {
    let ones = (1usize << n) - 1;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    for v in [0, ones] {
        amps[v ^ offset] += Complex64::new(1.0, 0.0);
    }
    StateVector::new(n, amps)
}

/// `(|0_L⟩, |1_L⟩)` for `2 <= n <= 12`.
pub fn stabilizer_logical_basis(n: usize, mode: EncodingMode) -> Result<(StateVector, StateVector)> {
    check_n(n)?;
    let ones = (1usize << n) - 1;
    match mode {
        EncodingMode::Ghz => Ok((xor_sum(n, 0)?, xor_sum(n, ones)?)),
        EncodingMode::Repetition => Ok((StateVector::basis(n, 0)?, StateVector::basis(n, ones)?)),
    }
}

/// Applies `R_x(θ) R_z(φ)` to every qubit.
pub fn rotate_state(state: &StateVector, rot: &RotationParams) -> Result<StateVector> {
    let mut out = state.clone();
    out.apply_all(&rot.qubit_unitary())?;
    Ok(out)
}

/// `(|0_L^R⟩, |1_L^R⟩)`.
pub fn rotated_basis(n: usize, rot: &RotationParams, mode: EncodingMode) -> Result<(StateVector, StateVector)> {
    let (b0, b1) = stabilizer_logical_basis(n, mode)?;
    Ok((rotate_state(&b0, rot)?, rotate_state(&b1, rot)?))
}

/// `(|R_0⟩^{⊗n} + |R_1⟩^{⊗n})`, normalized, with `|R_b⟩ = U|b⟩`.
pub fn product_form(n: usize, rot: &RotationParams) -> Result<StateVector> {
    check_n(n)?;
    let u = rot.qubit_unitary();
    let r0 = [u[(0, 0)], u[(1, 0)]];
    let r1 = [u[(0, 1)], u[(1, 1)]];
    let amps = (0..1usize << n)
        .map(|k| {
            let (mut p0, mut p1) = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
            for q in 0..n {
                let b = (k >> q) & 1;
                p0 *= r0[b];
                p1 *= r1[b];
            }
            p0 + p1
        })
        .collect();
    StateVector::new(n, amps)
}

/// `a0|0_L^R⟩ + a1|1_L^R⟩`, renormalized.
///
/// In GHZ mode the result is also built from the product form
/// `(a0 + a1)(|R_0⟩^{⊗n} + |R_1⟩^{⊗n})` and the two are required to agree.
/// `a0 + a1 = 0` gives a null vector there and is rejected.
pub fn rotated_logical_state(
    amps: &LogicalAmplitudes,
    n: usize,
    rot: &RotationParams,
    mode: EncodingMode,
) -> Result<StateVector> {
    let sum = amps.a0 + amps.a1;
    if mode == EncodingMode::Ghz && sum.norm() < 1e-12 {
        return Err(Error::NullGhzState);
    }
    let (r0, r1) = rotated_basis(n, rot, mode)?;
    let combined = r0
        .amps()
        .iter()
        .zip(r1.amps())
        .map(|(x, y)| amps.a0 * x + amps.a1 * y)
        .collect();
    let state = StateVector::new(n, combined)?;
    if mode == EncodingMode::Ghz {
        let phase = sum / sum.norm();
        let pf = product_form(n, rot)?;
        let scaled = StateVector::new(n, pf.amps().iter().map(|a| a * phase).collect())?;
        let dev = scaled.max_abs_diff(&state);
        if dev > PRODUCT_FORM_TOL {
            return Err(Error::ProductFormMismatch(dev));
        }
    }
    Ok(state)
}

/// `S_j = Z_j Z_{j+1}` for `j = 1..n−1`, returned in order of `j`.
pub fn chain_generators(n: usize) -> Result<Vec<PauliString>> {
    if n < 2 {
        return Err(Error::invalid("n", format!("chain needs at least 2 qubits, got {n}")));
    }
    Ok((0..n - 1)
        .map(|q| {
            let mut letters = vec![Pauli::I; n];
            letters[q] = Pauli::Z;
            letters[q + 1] = Pauli::Z;
            PauliString::new(Phase::ONE, letters)
        })
        .collect())
}

/// `u σ u†` for every letter, as single-qubit sums.
fn conjugated_letters(u: &ComplexMatrix) -> Result<[PauliSum; 4]> {
    let one = |p: Pauli| -> Result<PauliSum> { pauli_decompose(&conjugate(u, &pauli(p))?, 1) };
    Ok([one(Pauli::I)?, one(Pauli::X)?, one(Pauli::Y)?, one(Pauli::Z)?])
}

/// `(u^{⊗n}) s (u^{⊗n})†` for a Pauli string, expanded letter by letter.
pub fn conjugate_string(s: &PauliString, u: &ComplexMatrix) -> Result<PauliSum> {
    let table = conjugated_letters(u)?;
    let mut acc = PauliSum::from_terms(0, [])?;
    acc.add_term(Vec::new(), s.phase.to_complex());
    for &l in &s.letters {
        acc = acc.tensor(&table[l as usize]);
    }
    Ok(acc)
}

/// Same as [`conjugate_string`] through dense `2^n` matrices.
pub fn conjugate_string_dense(s: &PauliString, u: &ComplexMatrix) -> Result<PauliSum> {
    let n = s.len();
    // tensor() puts its first factor on the most significant qubit
    let big = tensor(&vec![u.clone(); n])?;
    pauli_decompose(&conjugate(&big, &s.to_matrix()?)?, n)
}

/// `S_j^R = U^{⊗n} S_j U^{†⊗n}` with a 1-based `j`.
pub fn rotated_generator(j: usize, n: usize, rot: &RotationParams) -> Result<PauliSum> {
    let gens = chain_generators(n)?;
    let s = j
        .checked_sub(1)
        .and_then(|i| gens.get(i))
        .ok_or(Error::IndexOutOfRange { index: j, max: n - 1 })?;
    conjugate_string(s, &rot.qubit_unitary())
}

/// `X_L = X^{⊗n}` and `Z_L = Z` on qubit 0.
pub fn logical_operators(n: usize) -> Result<(PauliString, PauliString)> {
    if n < 2 {
        return Err(Error::invalid("n", format!("need at least 2 qubits, got {n}")));
    }
    Ok((
        PauliString::new(Phase::ONE, vec![Pauli::X; n]),
        PauliString::single(n, 0, Pauli::Z),
    ))
}

/// Rotated logical operators.
///
/// `X_L` is conjugated by `R_x(θ) R_z(φ)` per qubit. `Z_L` is conjugated by
/// the reversed product `R_z(φ) R_x(θ)`: the right-hand factor
/// `R_x(−θ) R_z(−φ)` is exactly its adjoint, so this is still a unitary
/// conjugation, by a different unitary than the one that rotates the states.
/// [`rotated_logical_z_state_frame`] gives `Z_L` conjugated by the state
/// unitary.
pub fn rotated_logical_operators(n: usize, rot: &RotationParams) -> Result<(PauliSum, PauliSum)> {
    let (xl, zl) = logical_operators(n)?;
    let zx = &rotation(Axis::Z, rot.phi, rot.convention) * &rotation(Axis::X, rot.theta, rot.convention);
    Ok((
        conjugate_string(&xl, &rot.qubit_unitary())?,
        conjugate_string(&zl, &zx)?,
    ))
}

/// `Z_L` conjugated by `R_x(θ) R_z(φ)` per qubit, the frame of the rotated states.
pub fn rotated_logical_z_state_frame(n: usize, rot: &RotationParams) -> Result<PauliSum> {
    let (_, zl) = logical_operators(n)?;
    conjugate_string(&zl, &rot.qubit_unitary())
}

/// `(‖op·ψ − ψ‖₂ < 1e−10, ‖op·ψ − ψ‖₂)`.
pub fn stabilizes(op: &PauliSum, state: &StateVector) -> Result<(bool, f64)> {
    if op.n() != state.n() {
        return Err(Error::DimensionMismatch {
            left: format!("{}-qubit operator", op.n()),
            right: format!("{}-qubit state", state.n()),
        });
    }
    let image = op.apply(state.amps())?;
    let residual = image
        .iter()
        .zip(state.amps())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok((residual < STABILIZE_TOL, residual))
}
