//! Rotation operators and how they act on Pauli matrices under conjugation.
//!
//! Two angle conventions coexist. With [`Convention::HalfAngle`] the rotation
//! is `R_a(α) = cos(α/2) I − i sin(α/2) σ_a`, which conjugates a Pauli
//! matrix by a mixing angle `α`. With [`Convention::FullAngle`] the rotation
//! is `cos(α) I − i sin(α) σ_a` and the mixing angle is `2α`. The closed-form
//! generator expressions in [`crate::logical`] use `2θ`, so they line up with
//! the full-angle convention.
//!
//! Two rotated-Pauli identities from the literature come out differently
//! under exact conjugation. This module implements exact conjugation. Its
//! tests record both differences:
//!
//! * `R_x(θ) Z R_x(θ)†` is `cos θ Z − sin θ Y` and `R_z(φ) X R_z(φ)†` is
//!   `cos φ X + sin φ Y`. Neither carries a factor of `i` on the `Y` term; a
//!   factor of `i` there would break Hermiticity.
//! * [`mixing_commutator`] evaluates `(cos α − 1) σ_b + sin α (σ_a × σ_b)` with
//!   `σ_a × σ_b = i ε_abc σ_c`. This is not the exact commutator
//!   `[R_a(α), σ_b]` of the operators above; compare with [`commutator`].
//!
//! [`commutator`]: crate::pauli::commutator

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{pauli, ComplexMatrix, Pauli, PauliSum};

/// Rotation axis among the three Pauli directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn letter(self) -> Pauli {
        match self {
            Axis::X => Pauli::X,
            Axis::Y => Pauli::Y,
            Axis::Z => Pauli::Z,
        }
    }

    fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    fn from_index(i: usize) -> Axis {
        Self::ALL[i]
    }
}

/// Levi-Civita symbol `ε_abc` and the third axis `c`, or `None` when `a == b`.
pub fn levi_civita(a: Axis, b: Axis) -> Option<(f64, Axis)> {
    if a == b {
        return None;
    }
    let (i, j) = (a.index(), b.index());
    let k = 3 - i - j;
    let sign = if (j + 3 - i) % 3 == 1 { 1.0 } else { -1.0 };
    Some((sign, Axis::from_index(k)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    #[default]
    HalfAngle,
    FullAngle,
}

impl Convention {
    /// Angle that multiplies the generator: `α/2` or `α`.
    pub fn generator_angle(self, alpha: f64) -> f64 {
        match self {
            Convention::HalfAngle => alpha / 2.0,
            Convention::FullAngle => alpha,
        }
    }

    /// Mixing angle seen by a conjugated Pauli: `α` or `2α`.
    pub fn mixing_angle(self, alpha: f64) -> f64 {
        2.0 * self.generator_angle(alpha)
    }
}

/// Rotation and decoherence knobs shared by state construction and the
/// distance model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationParams {
    /// X-axis angle θ, radians.
    pub theta: f64,
    /// Z-axis angle φ, radians.
    pub phi: f64,
    /// Decoherence parameter λ ≥ 0.
    pub lambda_dec: f64,
    pub convention: Convention,
}

impl RotationParams {
    pub fn new(theta: f64, phi: f64, lambda_dec: f64, convention: Convention) -> Result<Self> {
        if !(lambda_dec >= 0.0) {
            return Err(Error::invalid("lambda_dec", format!("must be >= 0, got {lambda_dec}")));
        }
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::invalid("theta/phi", "angles must be finite"));
        }
        Ok(Self {
            theta,
            phi,
            lambda_dec,
            convention,
        })
    }

    pub fn angles(theta: f64, phi: f64, convention: Convention) -> Self {
        Self {
            theta,
            phi,
            lambda_dec: 0.0,
            convention,
        }
    }

    pub fn zero() -> Self {
        Self::angles(0.0, 0.0, Convention::HalfAngle)
    }

    /// The per-qubit unitary `R_x(θ) R_z(φ)`.
    pub fn qubit_unitary(&self) -> ComplexMatrix {
        &rotation(Axis::X, self.theta, self.convention) * &rotation(Axis::Z, self.phi, self.convention)
    }
}

/// `R_a(α)` in the chosen convention.
pub fn rotation(axis: Axis, angle: f64, convention: Convention) -> ComplexMatrix {
    let half = convention.generator_angle(angle);
    let (s, c) = half.sin_cos();
    let id = ComplexMatrix::identity(2).scale(Complex64::new(c, 0.0));
    let gen = pauli(axis.letter()).scale(Complex64::new(0.0, -s));
    &id + &gen
}

/// Unit rotation axis `n̂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationAxis {
    nx: f64,
    ny: f64,
    nz: f64,
}

impl RotationAxis {
    pub fn new(nx: f64, ny: f64, nz: f64) -> Result<Self> {
        let n2 = nx * nx + ny * ny + nz * nz;
        if !((n2 - 1.0).abs() <= 1e-10) {
            return Err(Error::NonUnitAxis(n2));
        }
        Ok(Self { nx, ny, nz })
    }

    pub fn components(&self) -> (f64, f64, f64) {
        (self.nx, self.ny, self.nz)
    }

    /// `n̂ · σ`.
    pub fn dot_sigma(&self) -> ComplexMatrix {
        let r = |x: f64| Complex64::new(x, 0.0);
        let mut m = pauli(Pauli::X).scale(r(self.nx));
        m = &m + &pauli(Pauli::Y).scale(r(self.ny));
        &m + &pauli(Pauli::Z).scale(r(self.nz))
    }
}

/// `R_n̂(θ) = cos(θ/2) I − i sin(θ/2) (n̂·σ)`, the closed form of
/// `exp(−i θ/2 n̂·σ)`.
pub fn rotation_axis(n: &RotationAxis, theta: f64) -> ComplexMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    let id = ComplexMatrix::identity(2).scale(Complex64::new(c, 0.0));
    &id + &n.dot_sigma().scale(Complex64::new(0.0, -s))
}

/// `u · m · u†`.
pub fn conjugate(u: &ComplexMatrix, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !u.is_square() || !m.is_square() || u.rows() != m.rows() {
        return Err(Error::DimensionMismatch {
            left: u.dim_label(),
            right: m.dim_label(),
        });
    }
    Ok(&(u * m) * &u.dagger())
}

/// Closed-form mixing `cos θ σ_m + sin θ (σ_n × σ_m) + (1 − cos θ)(σ_n·σ_m) σ_n`,
/// with `σ_n × σ_m = ε_nmk σ_k` and `σ_n·σ_m = δ_nm`.
///
/// Equals exact conjugation of `σ_target` by the half-angle `R_axis(θ)`.
pub fn rodrigues_conjugate(axis: Axis, target: Axis, theta: f64) -> PauliSum {
    let mut out = PauliSum::zero(1);
    let t = target.letter();
    match levi_civita(axis, target) {
        // aligned: cos θ σ + (1 − cos θ) σ
        None => out.add_term(vec![t], Complex64::new(1.0, 0.0)),
        Some((eps, k)) => {
            out.add_term(vec![t], Complex64::new(theta.cos(), 0.0));
            out.add_term(vec![k.letter()], Complex64::new(eps * theta.sin(), 0.0));
        }
    }
    out
}

/// The same mixing rule written with `2θ`; matches exact conjugation by the
/// full-angle rotation `R_axis(θ)`.
pub fn conjugate_2theta(axis: Axis, target: Axis, theta: f64) -> PauliSum {
    rodrigues_conjugate(axis, target, 2.0 * theta)
}

/// Literal evaluation of `(cos α − 1) σ_b + sin α (σ_a × σ_b)` with the cross
/// product taken as `i ε_abc σ_c`. Vanishes for `a == b`.
pub fn mixing_commutator(a: Axis, b: Axis, alpha: f64) -> ComplexMatrix {
    match levi_civita(a, b) {
        None => ComplexMatrix::zeros(2, 2),
        Some((eps, c)) => {
            let first = pauli(b.letter()).scale(Complex64::new(alpha.cos() - 1.0, 0.0));
            let cross = pauli(c.letter()).scale(Complex64::new(0.0, eps * alpha.sin()));
            &first + &cross
        }
    }
}

/// One entry of the reference commutator table at `α = π/4`.
#[derive(Debug, Clone, Serialize)]
pub struct CommutatorEntryReport {
    pub axis: Axis,
    pub target: Axis,
    pub row: usize,
    pub col: usize,
    pub reference: [f64; 2],
    pub computed: [f64; 2],
    pub deviation: f64,
}

/// Reference matrices for `[R_a(π/4), σ_b]`, as `(a, b, entries)` with
/// entries row-major `(re, im)` to four decimals.
#[allow(clippy::approx_constant)]
pub const REFERENCE_COMMUTATORS: [(Axis, Axis, [[f64; 2]; 4]); 6] = [
    (
        Axis::X,
        Axis::Y,
        [[0.0, 0.7071], [0.0, 0.2929], [0.0, -0.2929], [0.0, -0.7071]],
    ),
    (
        Axis::X,
        Axis::Z,
        [[-0.2929, 0.0], [-0.7071, 0.0], [0.7071, 0.0], [0.2929, 0.0]],
    ),
    (
        Axis::Y,
        Axis::X,
        [[0.0, -0.7071], [-0.2929, 0.0], [-0.2929, 0.0], [0.0, 0.7071]],
    ),
    (
        Axis::Y,
        Axis::Z,
        [[-0.2929, 0.0], [0.0, 0.7071], [0.0, 0.7071], [0.2929, 0.0]],
    ),
    (Axis::Z, Axis::X, [[0.0, 0.0], [0.4142, 0.0], [-1.0, 0.0], [0.0, 0.0]]),
    (Axis::Z, Axis::Y, [[0.0, 0.0], [0.0, -0.4142], [0.0, -1.0], [0.0, 0.0]]),
];

/// Entry-by-entry comparison of [`mixing_commutator`] at `π/4` with the
/// reference table.
pub fn commutator_table_report() -> Vec<CommutatorEntryReport> {
    let alpha = std::f64::consts::FRAC_PI_4;
    let mut out = Vec::with_capacity(24);
    for (a, b, reference) in REFERENCE_COMMUTATORS {
        let m = mixing_commutator(a, b, alpha);
        for (idx, p) in reference.iter().enumerate() {
            let (row, col) = (idx / 2, idx % 2);
            let v = m[(row, col)];
            out.push(CommutatorEntryReport {
                axis: a,
                target: b,
                row,
                col,
                reference: *p,
                computed: [v.re, v.im],
                deviation: (v - Complex64::new(p[0], p[1])).norm(),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_8, PI};

    use super::*;
    use crate::pauli::{commutator, pauli_decompose};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_and_full_turn() {
        let id = ComplexMatrix::identity(2);
        assert!(rotation(Axis::X, 0.0, Convention::HalfAngle).approx_eq(&id, 1e-15));
        let neg = id.scale(c(-1.0, 0.0));
        assert!(rotation(Axis::X, 2.0 * PI, Convention::HalfAngle).approx_eq(&neg, 1e-15));
    }

    #[test]
    fn rz_quarter_turn_is_diagonal_phase() {
        let r = rotation(Axis::Z, FRAC_PI_2, Convention::HalfAngle);
        let e = Complex64::from_polar(1.0, -FRAC_PI_4);
        let expect = ComplexMatrix::diagonal(&[e, e.conj()]);
        assert!(r.approx_eq(&expect, 1e-15));
        assert!((r.determinant_2x2().unwrap().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn axis_rotation_cases() {
        let z = RotationAxis::new(0.0, 0.0, 1.0).unwrap();
        for t in [0.3, 1.1, -2.4] {
            assert!(rotation_axis(&z, t).approx_eq(&rotation(Axis::Z, t, Convention::HalfAngle), 1e-12));
        }
        let x = RotationAxis::new(1.0, 0.0, 0.0).unwrap();
        let expect = pauli(Pauli::X).scale(c(0.0, -1.0));
        assert!(rotation_axis(&x, PI).approx_eq(&expect, 1e-12));
        let n = RotationAxis::new(0.6, 0.0, 0.8).unwrap();
        assert!(rotation_axis(&n, 0.0).approx_eq(&ComplexMatrix::identity(2), 1e-15));
        assert!(matches!(RotationAxis::new(1.0, 1.0, 0.0), Err(Error::NonUnitAxis(_))));
    }

    #[test]
    fn conjugation_examples() {
        let th = 0.7;
        let rz = rotation(Axis::Z, th, Convention::HalfAngle);
        let got = conjugate(&rz, &pauli(Pauli::X)).unwrap();
        let expect = &pauli(Pauli::X).scale(c(th.cos(), 0.0)) + &pauli(Pauli::Y).scale(c(th.sin(), 0.0));
        assert!(got.approx_eq(&expect, 1e-14));

        let m = pauli(Pauli::Y);
        assert!(conjugate(&ComplexMatrix::identity(2), &m).unwrap().approx_eq(&m, 0.0));

        // no factor of i on the Y term
        let rx = rotation(Axis::X, th, Convention::HalfAngle);
        let got = conjugate(&rx, &pauli(Pauli::Z)).unwrap();
        let expect = &pauli(Pauli::Z).scale(c(th.cos(), 0.0)) - &pauli(Pauli::Y).scale(c(th.sin(), 0.0));
        assert!(got.approx_eq(&expect, 1e-14));
        assert!(conjugate(&rx, &ComplexMatrix::identity(4)).is_err());
    }

    #[test]
    fn exact_commutator_with_rx() {
        // [cos(π/8) I − i sin(π/8) X, Y] = 2 sin(π/8) Z
        let rx = rotation(Axis::X, FRAC_PI_4, Convention::HalfAngle);
        let got = commutator(&rx, &pauli(Pauli::Y)).unwrap();
        let expect = pauli(Pauli::Z).scale(c(2.0 * FRAC_PI_8.sin(), 0.0));
        assert!(got.approx_eq(&expect, 1e-14));
        assert!((2.0 * FRAC_PI_8.sin() - 0.76537).abs() < 1e-5);
        // the literal formula gives a different matrix
        assert!(!mixing_commutator(Axis::X, Axis::Y, FRAC_PI_4).approx_eq(&got, 0.1));
    }

    #[test]
    fn rodrigues_examples() {
        let th = 0.9;
        let s = rodrigues_conjugate(Axis::Z, Axis::X, th);
        assert!((s.coefficient("X") - c(th.cos(), 0.0)).norm() < 1e-15);
        assert!((s.coefficient("Y") - c(th.sin(), 0.0)).norm() < 1e-15);

        let s = rodrigues_conjugate(Axis::X, Axis::X, th);
        assert_eq!(s.len(), 1);
        assert!((s.coefficient("X") - c(1.0, 0.0)).norm() < 1e-15);

        let s = rodrigues_conjugate(Axis::X, Axis::Z, FRAC_PI_3);
        assert!((s.coefficient("Z").re - 0.5).abs() < 1e-12);
        assert!((s.coefficient("Y").re + 0.866_025_403_784_438_6).abs() < 1e-12);
        let exact = conjugate(&rotation(Axis::X, FRAC_PI_3, Convention::HalfAngle), &pauli(Pauli::Z)).unwrap();
        assert!(pauli_decompose(&exact, 1).unwrap().approx_eq(&s, 1e-12));
    }

    #[test]
    fn two_theta_examples() {
        let th = 0.37;
        let s = conjugate_2theta(Axis::X, Axis::Z, th);
        assert!((s.coefficient("Z").re - (2.0 * th).cos()).abs() < 1e-15);
        assert!((s.coefficient("Y").re + (2.0 * th).sin()).abs() < 1e-15);
        let exact = conjugate(&rotation(Axis::X, th, Convention::FullAngle), &pauli(Pauli::Z)).unwrap();
        assert!(pauli_decompose(&exact, 1).unwrap().approx_eq(&s, 1e-12));

        let s = conjugate_2theta(Axis::Z, Axis::Z, th);
        assert!((s.coefficient("Z").re - 1.0).abs() < 1e-15);

        let s = conjugate_2theta(Axis::Z, Axis::X, FRAC_PI_8);
        assert!((s.coefficient("X").re - FRAC_PI_4.cos()).abs() < 1e-15);
        assert!((s.coefficient("Y").re - FRAC_PI_4.sin()).abs() < 1e-15);
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn literal_commutator_examples() {
        let m = mixing_commutator(Axis::X, Axis::Y, FRAC_PI_4);
        let expect = ComplexMatrix::square2(c(0.0, 0.7071), c(0.0, 0.2929), c(0.0, -0.2929), c(0.0, -0.7071));
        assert!(m.approx_eq(&expect, 1e-4));
        let m = mixing_commutator(Axis::Z, Axis::X, FRAC_PI_4);
        let expect = ComplexMatrix::square2(c(0.0, 0.0), c(0.4142, 0.0), c(-1.0, 0.0), c(0.0, 0.0));
        assert!(m.approx_eq(&expect, 1e-4));
        for a in Axis::ALL {
            assert_eq!(mixing_commutator(a, a, 1.234), ComplexMatrix::zeros(2, 2));
        }
    }

    #[test]
    fn reference_table_agrees_everywhere() {
        let report = commutator_table_report();
        assert_eq!(report.len(), 24);
        for e in &report {
            assert!(e.deviation < 1e-4, "{e:?}");
        }
    }
}
