use num_bigint::BigUint;
use serde::Serialize;

use super::string::{Pauli, PauliString, Phase};
use crate::error::{Error, Result};

/// Largest qubit count accepted by [`enumerate_pauli_group`].
pub const MAX_ENUMERATION_QUBITS: usize = 3;

/// Lists the n-qubit Pauli group, with or without the `{±1, ±i}` phases.
///
/// Strings are produced in a fixed order: phases outermost, then letters with
/// qubit 0 varying fastest.
pub fn enumerate_pauli_group(n: usize, with_phases: bool) -> Result<Vec<PauliString>> {
    if n > MAX_ENUMERATION_QUBITS {
        return Err(Error::EnumerationBound {
            n,
            max: MAX_ENUMERATION_QUBITS,
        });
    }
    let phases: &[Phase] = if with_phases { &Phase::ALL } else { &[Phase::ONE] };
    let count = 1usize << (2 * n);
    let mut out = Vec::with_capacity(phases.len() * count);
    for &phase in phases {
        for code in 0..count {
            let letters = (0..n).map(|q| Pauli::from_index(code >> (2 * q))).collect();
            out.push(PauliString::new(phase, letters));
        }
    }
    Ok(out)
}

/// Group orders from the closed-form expressions.
///
/// The two Clifford entries are the approximations `2^{n²+2n}` and
/// `2^{n²+2n+1}` taken as definitions; they are not the exact Clifford group
/// orders.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupOrders {
    #[serde(serialize_with = "decimal")]
    pub pauli_ext: BigUint,
    #[serde(serialize_with = "decimal")]
    pub clifford: BigUint,
    #[serde(serialize_with = "decimal")]
    pub clifford_ext: BigUint,
}

fn decimal<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_str_radix(10))
}

pub fn group_orders(n: usize) -> Result<GroupOrders> {
    if n == 0 {
        return Err(Error::invalid("n", "qubit count must be at least 1"));
    }
    let pow2 = |e: usize| BigUint::from(1u8) << e;
    Ok(GroupOrders {
        pauli_ext: pow2(2 * n + 2),
        clifford: pow2(n * n + 2 * n),
        clifford_ext: pow2(n * n + 2 * n + 1),
    })
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;
    use crate::pauli::string::commutation_scalar;

    #[test]
    fn single_qubit_group_has_sixteen_elements() {
        let g = enumerate_pauli_group(1, true).unwrap();
        assert_eq!(g.len(), 16);
        assert_eq!(enumerate_pauli_group(1, false).unwrap().len(), 4);
    }

    #[test]
    fn enumeration_matches_order_formula() {
        for n in 1..=3 {
            let g = enumerate_pauli_group(n, true).unwrap();
            let distinct: HashSet<_> = g.iter().collect();
            assert_eq!(distinct.len(), g.len());
            assert_eq!(BigUint::from(g.len()), group_orders(n).unwrap().pauli_ext);
        }
    }

    #[test]
    fn enumeration_bound() {
        assert_eq!(
            enumerate_pauli_group(4, false),
            Err(Error::EnumerationBound { n: 4, max: 3 })
        );
    }

    #[test]
    fn order_values() {
        let o1 = group_orders(1).unwrap();
        assert_eq!(
            (o1.pauli_ext, o1.clifford, o1.clifford_ext),
            (16u32.into(), 8u32.into(), 16u32.into())
        );
        let o2 = group_orders(2).unwrap();
        assert_eq!(
            (o2.pauli_ext, o2.clifford, o2.clifford_ext),
            (64u32.into(), 256u32.into(), 512u32.into())
        );
        assert_eq!(group_orders(3).unwrap().pauli_ext, 256u32.into());
        assert!(group_orders(0).is_err());
        // exact big integers beyond u64
        assert_eq!(group_orders(8).unwrap().clifford_ext.bits(), 82);
    }

    #[test]
    fn closure_and_commutation_over_two_qubits() {
        let g = enumerate_pauli_group(2, true).unwrap();
        let members: HashSet<_> = g.iter().cloned().collect();
        for a in &g {
            for b in &g {
                let ab = a.try_mul(b).unwrap();
                assert!(members.contains(&ab));
                let lam = commutation_scalar(a, b).unwrap();
                assert!(lam == Phase::ONE || lam == Phase::MINUS_ONE);
                // a·b = λ b·a
                let ba = b.try_mul(a).unwrap();
                assert_eq!(ab.phase, lam * ba.phase);
                assert_eq!(ab.letters, ba.letters);
            }
        }
    }
}
