use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{pauli, ComplexMatrix, Pauli};
use crate::rotation::{rotation, Axis, Convention, RotationParams};
use crate::state::StateVector;

/// Widest circuit [`build_circuit`] accepts.
pub const MAX_CIRCUIT_QUBITS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GateKind {
    Rx,
    Rz,
    RxInv,
    RzInv,
    T,
    Ch,
    Cs,
    Cnot,
    Ccnot,
    X,
    Z,
    /// Location where the noise channel acts; identity in the ideal circuit.
    Noise,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Ch | GateKind::Cs | GateKind::Cnot => 2,
            GateKind::Ccnot => 3,
            _ => 1,
        }
    }

    pub fn takes_angle(self) -> bool {
        matches!(self, GateKind::Rx | GateKind::Rz | GateKind::RxInv | GateKind::RzInv)
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Rx => "RX",
            GateKind::Rz => "RZ",
            GateKind::RxInv => "RX_INV",
            GateKind::RzInv => "RZ_INV",
            GateKind::T => "T",
            GateKind::Ch => "CH",
            GateKind::Cs => "CS",
            GateKind::Cnot => "CNOT",
            GateKind::Ccnot => "CCNOT",
            GateKind::X => "X",
            GateKind::Z => "Z",
            GateKind::Noise => "NOISE",
        }
    }
}

/// A gate on explicit qubits. Controlled gates list controls first and the
/// target last. Rotation angles are half-angle: `RX(α) = e^{−iαX/2}`;
/// the `_INV` kinds apply the rotation by `−α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub param: Option<f64>,
}

impl Gate {
    pub fn new(kind: GateKind, targets: Vec<usize>, param: Option<f64>) -> Result<Self> {
        let g = Self { kind, targets, param };
        if g.targets.len() != kind.arity() {
            return Err(Error::invalid(
                "targets",
                format!("{} takes {} qubits, got {}", kind.name(), kind.arity(), g.targets.len()),
            ));
        }
        if kind.takes_angle() != param.is_some() {
            return Err(Error::invalid("param", format!("angle mismatch for {}", kind.name())));
        }
        for (i, a) in g.targets.iter().enumerate() {
            if g.targets[..i].contains(a) {
                return Err(Error::invalid(
                    "targets",
                    format!("repeated qubit {a} in {}", kind.name()),
                ));
            }
        }
        Ok(g)
    }

    fn unchecked(kind: GateKind, targets: Vec<usize>, param: Option<f64>) -> Self {
        Self { kind, targets, param }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        Gate::new(self.kind, self.targets.clone(), self.param)?;
        if let Some(&q) = self.targets.iter().find(|&&q| q >= n) {
            return Err(Error::invalid(
                "targets",
                format!("qubit {q} outside a {n}-qubit circuit"),
            ));
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.name())?;
        if let Some(a) = self.param {
            write!(f, "({a})")?;
        }
        let qs: Vec<String> = self.targets.iter().map(|q| format!("q{q}")).collect();
        write!(f, " {}", qs.join(","))
    }
}

fn hadamard() -> ComplexMatrix {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    ComplexMatrix::square2(h, h, h, -h)
}

fn t_gate() -> ComplexMatrix {
    ComplexMatrix::diagonal(&[
        Complex64::new(1.0, 0.0),
        Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4),
    ])
}

fn s_gate() -> ComplexMatrix {
    ComplexMatrix::diagonal(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)])
}

/// The 2x2 block acting on the target qubit, and the number of controls.
fn target_block(g: &Gate) -> (ComplexMatrix, usize) {
    let angle = g.param.unwrap_or(0.0);
    match g.kind {
        GateKind::Rx => (rotation(Axis::X, angle, Convention::HalfAngle), 0),
        GateKind::Rz => (rotation(Axis::Z, angle, Convention::HalfAngle), 0),
        GateKind::RxInv => (rotation(Axis::X, -angle, Convention::HalfAngle), 0),
        GateKind::RzInv => (rotation(Axis::Z, -angle, Convention::HalfAngle), 0),
        GateKind::T => (t_gate(), 0),
        GateKind::X => (pauli(Pauli::X), 0),
        GateKind::Z => (pauli(Pauli::Z), 0),
        GateKind::Noise => (ComplexMatrix::identity(2), 0),
        GateKind::Ch => (hadamard(), 1),
        GateKind::Cs => (s_gate(), 1),
        GateKind::Cnot => (pauli(Pauli::X), 1),
        GateKind::Ccnot => (pauli(Pauli::X), 2),
    }
}

/// The gate's unitary on its own qubits, with `targets[0]` as the most
/// significant bit of the row index (so controls come first).
pub fn gate_matrix(g: &Gate) -> ComplexMatrix {
    let (block, controls) = target_block(g);
    if controls == 0 {
        return block;
    }
    let dim = 1usize << (controls + 1);
    let mut m = ComplexMatrix::identity(dim);
    let base = dim - 2;
    for r in 0..2 {
        for c in 0..2 {
            m[(base + r, base + c)] = block[(r, c)];
        }
    }
    m
}

/// Applies `g` in place using the controlled-block form.
pub fn apply_gate(state: &mut StateVector, g: &Gate) -> Result<()> {
    match g.kind {
        GateKind::Noise => Ok(()),
        GateKind::X => state.apply_pauli(g.targets[0], Pauli::X),
        GateKind::Z => state.apply_pauli(g.targets[0], Pauli::Z),
        _ => {
            let (block, controls) = target_block(g);
            if controls == 0 {
                state.apply_single(g.targets[0], &block)
            } else {
                state.apply_controlled(&g.targets[..controls], g.targets[controls], &block)
            }
        }
    }
}

/// Where noise markers go.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoisePlacement {
    /// One marker per qubit, after the X/Z layers and before the inverse
    /// rotations.
    #[default]
    Figure,
    /// One marker per gate target after every gate.
    PerGate,
}

tag_enum!(NoisePlacement, NoisePlacement::Figure => "figure", NoisePlacement::PerGate => "per-gate");

/// The rotated-logical-state circuit on `n` qubits, in time order:
///
/// 1. `RX(θ)` then `RZ(φ)` on every qubit,
/// 2. `CH` on `(q, q+1 mod n)`, `T` on every qubit, `CS` on `(q, q+1 mod n)`,
/// 3. `CNOT` chain `q → q+1` for `q = 0..n−2`,
/// 4. `X` then `Z` on every qubit (unconditional, not a conditioned recovery),
/// 5. noise markers,
/// 6. `RZ(−φ)` then `RX(−θ)` on every qubit.
///
/// Angles are converted to the half-angle convention of [`Gate`].
pub fn build_circuit(n: usize, rot: &RotationParams, placement: NoisePlacement) -> Result<Vec<Gate>> {
    if !(2..=MAX_CIRCUIT_QUBITS).contains(&n) {
        return Err(Error::invalid(
            "n",
            format!("circuit width must be in 2..={MAX_CIRCUIT_QUBITS}, got {n}"),
        ));
    }
    let theta = rot.convention.mixing_angle(rot.theta);
    let phi = rot.convention.mixing_angle(rot.phi);
    let layer = |kind: GateKind, param: Option<f64>| -> Vec<Gate> {
        (0..n).map(|q| Gate::unchecked(kind, vec![q], param)).collect()
    };
    let ring = |kind: GateKind| -> Vec<Gate> {
        (0..n)
            .map(|q| Gate::unchecked(kind, vec![q, (q + 1) % n], None))
            .collect()
    };

    let mut body = Vec::new();
    body.extend(layer(GateKind::Rx, Some(theta)));
    body.extend(layer(GateKind::Rz, Some(phi)));
    body.extend(ring(GateKind::Ch));
    body.extend(layer(GateKind::T, None));
    body.extend(ring(GateKind::Cs));
    body.extend((0..n - 1).map(|q| Gate::unchecked(GateKind::Cnot, vec![q, q + 1], None)));
    body.extend(layer(GateKind::X, None));
    body.extend(layer(GateKind::Z, None));
    let tail: Vec<Gate> = layer(GateKind::RzInv, Some(phi))
        .into_iter()
        .chain(layer(GateKind::RxInv, Some(theta)))
        .collect();

    let circuit = match placement {
        NoisePlacement::Figure => {
            let mut c = body;
            c.extend(layer(GateKind::Noise, None));
            c.extend(tail);
            c
        }
        NoisePlacement::PerGate => {
            let mut c = Vec::new();
            for g in body.into_iter().chain(tail) {
                let targets = g.targets.clone();
                c.push(g);
                c.extend(
                    targets
                        .into_iter()
                        .map(|q| Gate::unchecked(GateKind::Noise, vec![q], None)),
                );
            }
            c
        }
    };
    for g in &circuit {
        g.validate(n)?;
    }
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::tensor;

    /// Dense embedding of a gate matrix into `n` qubits by explicit index
    /// bookkeeping.
    fn embed(g: &Gate, n: usize) -> ComplexMatrix {
        let m = gate_matrix(g);
        let k = g.targets.len();
        let dim = 1usize << n;
        let mut out = ComplexMatrix::zeros(dim, dim);
        let local = |i: usize| -> usize { (0..k).fold(0, |acc, j| (acc << 1) | ((i >> g.targets[j]) & 1)) };
        let mask: usize = g.targets.iter().map(|&q| 1 << q).sum();
        for col in 0..dim {
            for row in 0..dim {
                if row & !mask == col & !mask {
                    out[(row, col)] = m[(local(row), local(col))];
                }
            }
        }
        out
    }

    fn sample(n: usize) -> StateVector {
        let amps = (0..1 << n)
            .map(|k| Complex64::new((k as f64 * 0.9 + 0.1).cos(), (k as f64 * 0.4).sin()))
            .collect();
        StateVector::new(n, amps).unwrap()
    }

    #[test]
    fn fast_application_matches_dense_embedding() {
        let n = 3;
        let gates = [
            Gate::new(GateKind::Rx, vec![1], Some(0.7)).unwrap(),
            Gate::new(GateKind::RzInv, vec![2], Some(0.3)).unwrap(),
            Gate::new(GateKind::T, vec![0], None).unwrap(),
            Gate::new(GateKind::Ch, vec![2, 0], None).unwrap(),
            Gate::new(GateKind::Cs, vec![0, 1], None).unwrap(),
            Gate::new(GateKind::Cnot, vec![1, 2], None).unwrap(),
            Gate::new(GateKind::Ccnot, vec![2, 0, 1], None).unwrap(),
            Gate::new(GateKind::X, vec![1], None).unwrap(),
            Gate::new(GateKind::Z, vec![2], None).unwrap(),
        ];
        for g in &gates {
            let s = sample(n);
            let mut fast = s.clone();
            apply_gate(&mut fast, g).unwrap();
            let slow = s.apply_matrix(&embed(g, n)).unwrap();
            let slow = StateVector::new(n, slow).unwrap();
            assert!(fast.max_abs_diff(&slow) < 1e-14, "{g}");
        }
    }

    #[test]
    fn single_qubit_embedding_agrees_with_tensor() {
        let g = Gate::new(GateKind::Rx, vec![0], Some(0.4)).unwrap();
        let id = ComplexMatrix::identity(2);
        let want = tensor(&[id, gate_matrix(&g)]).unwrap();
        assert!(embed(&g, 2).approx_eq(&want, 1e-15));
    }

    #[test]
    fn t_squared_is_s() {
        let t = gate_matrix(&Gate::new(GateKind::T, vec![0], None).unwrap());
        let tt = &t * &t;
        assert!((tt[(1, 1)] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((tt[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn controlled_s_and_h() {
        let cs = gate_matrix(&Gate::new(GateKind::Cs, vec![0, 1], None).unwrap());
        let one = Complex64::new(1.0, 0.0);
        assert!(cs.approx_eq(
            &ComplexMatrix::diagonal(&[one, one, one, Complex64::new(0.0, 1.0)]),
            1e-15
        ));
        let ch = gate_matrix(&Gate::new(GateKind::Ch, vec![0, 1], None).unwrap());
        for r in 0..2 {
            for c in 0..2 {
                let want = if r == c { 1.0 } else { 0.0 };
                assert!((ch[(r, c)] - Complex64::new(want, 0.0)).norm() < 1e-15);
            }
        }
        assert!(ch.is_unitary(1e-14));
        let ccx = gate_matrix(&Gate::new(GateKind::Ccnot, vec![0, 1, 2], None).unwrap());
        assert_eq!(ccx[(6, 7)], Complex64::new(1.0, 0.0));
        assert_eq!(ccx[(7, 6)], Complex64::new(1.0, 0.0));
        assert_eq!(ccx[(5, 5)], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn controlled_gates_on_basis_states() {
        // CS on |11⟩ gives i|11⟩
        let mut s = StateVector::basis(2, 3).unwrap();
        apply_gate(&mut s, &Gate::new(GateKind::Cs, vec![0, 1], None).unwrap()).unwrap();
        assert!((s.amps()[3] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        // CH with control |0⟩ leaves the target alone
        let mut s = StateVector::basis(2, 2).unwrap();
        apply_gate(&mut s, &Gate::new(GateKind::Ch, vec![0, 1], None).unwrap()).unwrap();
        assert_eq!(s, StateVector::basis(2, 2).unwrap());
    }

    #[test]
    fn gate_validation() {
        assert!(Gate::new(GateKind::Cnot, vec![1], None).is_err());
        assert!(Gate::new(GateKind::Cnot, vec![1, 1], None).is_err());
        assert!(Gate::new(GateKind::Rx, vec![0], None).is_err());
        assert!(Gate::new(GateKind::T, vec![0], Some(1.0)).is_err());
        assert!(Gate::new(GateKind::T, vec![4], None).unwrap().validate(3).is_err());
    }

    #[test]
    fn seven_qubit_layout() {
        let c = build_circuit(7, &RotationParams::zero(), NoisePlacement::Figure).unwrap();
        let count = |k: GateKind| c.iter().filter(|g| g.kind == k).count();
        assert_eq!(count(GateKind::Noise), 7);
        assert_eq!(count(GateKind::Cnot), 6);
        assert_eq!(count(GateKind::Ch), 7);
        assert_eq!(count(GateKind::Cs), 7);
        assert_eq!(c.len(), 7 * 10 + 6);
        // noise sits right before the inverse rotations
        let first_inv = c.iter().position(|g| g.kind == GateKind::RzInv).unwrap();
        assert!(c[first_inv - 7..first_inv].iter().all(|g| g.kind == GateKind::Noise));
    }

    #[test]
    fn two_qubit_layout_and_bounds() {
        let c = build_circuit(2, &RotationParams::zero(), NoisePlacement::Figure).unwrap();
        assert_eq!(c.iter().filter(|g| g.kind == GateKind::Cnot).count(), 1);
        assert!(build_circuit(1, &RotationParams::zero(), NoisePlacement::Figure).is_err());
        assert!(build_circuit(11, &RotationParams::zero(), NoisePlacement::Figure).is_err());
    }

    #[test]
    fn zero_angles_give_identity_rotations() {
        let c = build_circuit(3, &RotationParams::zero(), NoisePlacement::Figure).unwrap();
        for g in c.iter().filter(|g| g.kind.takes_angle()) {
            assert!(gate_matrix(g).approx_eq(&ComplexMatrix::identity(2), 1e-15));
        }
    }

    #[test]
    fn per_gate_placement_follows_every_target() {
        let c = build_circuit(3, &RotationParams::zero(), NoisePlacement::PerGate).unwrap();
        let fig = build_circuit(3, &RotationParams::zero(), NoisePlacement::Figure).unwrap();
        let body_targets: usize = fig
            .iter()
            .filter(|g| g.kind != GateKind::Noise)
            .map(|g| g.targets.len())
            .sum();
        assert_eq!(c.iter().filter(|g| g.kind == GateKind::Noise).count(), body_targets);
    }

    #[test]
    fn full_angle_parameters_are_doubled() {
        let rot = RotationParams::angles(0.3, 0.2, Convention::FullAngle);
        let c = build_circuit(2, &rot, NoisePlacement::Figure).unwrap();
        assert_eq!(c[0].param, Some(0.6));
        assert!(gate_matrix(&c[0]).approx_eq(&rotation(Axis::X, 0.3, Convention::FullAngle), 1e-15));
    }
}
