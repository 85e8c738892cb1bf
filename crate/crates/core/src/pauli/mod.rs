//! Complex-matrix and phased Pauli-string algebra.

mod group;
mod matrix;
mod string;
mod sum;

pub use group::{enumerate_pauli_group, group_orders, GroupOrders, MAX_ENUMERATION_QUBITS};
pub use matrix::{commutator, tensor, ComplexMatrix, MAX_DIM};
pub use string::{commutation_scalar, pauli, Pauli, PauliString, Phase};
pub use sum::{pauli_decompose, PauliSum, PRUNE_TOL};
