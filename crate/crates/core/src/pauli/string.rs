use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::{tensor, ComplexMatrix};
use crate::error::{Error, Result};

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_index(i: usize) -> Pauli {
        Self::ALL[i & 3]
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// Whether the letter flips the computational basis bit.
    pub(crate) fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    /// Whether the letter carries a `(-1)^b` sign on basis bit `b`.
    pub(crate) fn signs(self) -> bool {
        matches!(self, Pauli::Y | Pauli::Z)
    }

    /// `self · other = phase · result`.
    pub fn product(self, other: Pauli) -> (Phase, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (Phase::ONE, p),
            (a, b) if a == b => (Phase::ONE, I),
            (X, Y) => (Phase::I, Z),
            (Y, Z) => (Phase::I, X),
            (Z, X) => (Phase::I, Y),
            (Y, X) => (Phase::MINUS_I, Z),
            (Z, Y) => (Phase::MINUS_I, X),
            (X, Z) => (Phase::MINUS_I, Y),
            _ => unreachable!(),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// Standard 2x2 Pauli matrix.
pub fn pauli(letter: Pauli) -> ComplexMatrix {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match letter {
        Pauli::I => ComplexMatrix::square2(one, z, z, one),
        Pauli::X => ComplexMatrix::square2(z, one, one, z),
        Pauli::Y => ComplexMatrix::square2(z, -i, i, z),
        Pauli::Z => ComplexMatrix::square2(one, z, z, -one),
    }
}

/// A fourth root of unity, stored as the power of `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);
    pub const ALL: [Phase; 4] = [Phase::ONE, Phase::I, Phase::MINUS_ONE, Phase::MINUS_I];

    pub fn from_power(k: u32) -> Phase {
        Phase((k % 4) as u8)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    pub fn conj(self) -> Phase {
        Phase((4 - self.0) % 4)
    }

    /// Recognises a complex number that is one of `{±1, ±i}` to within `tol`.
    pub fn from_complex(z: Complex64, tol: f64) -> Option<Phase> {
        Phase::ALL.into_iter().find(|p| (p.to_complex() - z).norm() <= tol)
    }
}

impl Mul for Phase {
    type Output = Phase;

    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        })
    }
}

/// Phased tensor product of Pauli letters, an element of the extended Pauli
/// group. `letters[q]` acts on qubit `q`, the bit of weight `2^q` in a basis
/// index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliString {
    pub phase: Phase,
    pub letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(phase: Phase, letters: Vec<Pauli>) -> Self {
        Self { phase, letters }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(Phase::ONE, vec![Pauli::I; n])
    }

    /// Single letter at `qubit`, identity elsewhere.
    pub fn single(n: usize, qubit: usize, letter: Pauli) -> Self {
        let mut s = Self::identity(n);
        s.letters[qubit] = letter;
        s
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub(crate) fn masks(letters: &[Pauli]) -> (usize, usize, u32) {
        let mut flip = 0usize;
        let mut sign = 0usize;
        let mut ys = 0u32;
        for (q, p) in letters.iter().enumerate() {
            if p.flips() {
                flip |= 1 << q;
            }
            if p.signs() {
                sign |= 1 << q;
            }
            if *p == Pauli::Y {
                ys += 1;
            }
        }
        (flip, sign, ys)
    }

    /// Product `self · other`, tracking the phase.
    pub fn try_mul(&self, other: &PauliString) -> Result<PauliString> {
        check_len(self, other)?;
        let mut phase = self.phase * other.phase;
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&a, &b)| {
                let (ph, p) = a.product(b);
                phase = phase * ph;
                p
            })
            .collect();
        Ok(PauliString::new(phase, letters))
    }

    /// Dense matrix; qubit `n-1` is the leftmost Kronecker factor.
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let factors: Vec<_> = self.letters.iter().rev().map(|&p| pauli(p)).collect();
        Ok(tensor(&factors)?.scale(self.phase.to_complex()))
    }

    /// Applies the string to a state vector without forming the matrix.
    pub fn apply(&self, amps: &[Complex64]) -> Result<Vec<Complex64>> {
        if amps.len() != 1usize << self.len() {
            return Err(Error::DimensionMismatch {
                left: format!("{}-qubit Pauli string", self.len()),
                right: format!("vector of length {}", amps.len()),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        apply_letters(&self.letters, self.phase.to_complex(), amps, &mut out);
        Ok(out)
    }
}

/// Accumulates `coeff · P |amps⟩` into `out`.
pub(crate) fn apply_letters(letters: &[Pauli], coeff: Complex64, amps: &[Complex64], out: &mut [Complex64]) {
    let (flip, sign, ys) = PauliString::masks(letters);
    let base = coeff * Phase::from_power(ys).to_complex();
    for (j, a) in amps.iter().enumerate() {
        let v = if (j & sign).count_ones() % 2 == 1 { -base } else { base };
        out[j ^ flip] += v * a;
    }
}

fn check_len(a: &PauliString, b: &PauliString) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: format!("{} letters", a.len()),
            right: format!("{} letters", b.len()),
        });
    }
    Ok(())
}

/// The scalar `λ` with `p1·p2 = λ·p2·p1`.
///
/// For Pauli strings this is always `+1` or `-1`: each site where both letters
/// are non-identity and differ contributes one factor of `-1`, and global
/// phases cancel between the two orderings. The `±i` values that appear in the
/// general relation for the extended group only arise as phases of products,
/// which [`PauliString::try_mul`] tracks separately.
pub fn commutation_scalar(p1: &PauliString, p2: &PauliString) -> Result<Phase> {
    check_len(p1, p2)?;
    let anti = p1
        .letters
        .iter()
        .zip(&p2.letters)
        .filter(|(&a, &b)| a != Pauli::I && b != Pauli::I && a != b)
        .count();
    Ok(if anti % 2 == 0 { Phase::ONE } else { Phase::MINUS_ONE })
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.phase != Phase::ONE {
            write!(f, "{}", self.phase)?;
        }
        for p in &self.letters {
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses `"XZI"`, `"-XZI"`, `"+iXZI"` or `"-iXZI"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, rest) = if let Some(r) = s.strip_prefix("-i") {
            (Phase::MINUS_I, r)
        } else if let Some(r) = s.strip_prefix("+i") {
            (Phase::I, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (Phase::MINUS_ONE, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (Phase::ONE, r)
        } else {
            (Phase::ONE, s)
        };
        let letters = rest
            .chars()
            .map(|c| Pauli::from_char(c).ok_or_else(|| Error::invalid("pauli", format!("bad letter `{c}`"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString::new(phase, letters))
    }
}
