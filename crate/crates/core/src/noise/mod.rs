//! Monte-Carlo simulation of the noisy rotated-logical-state circuit.
//!
//! Fidelity is measured against the noiseless run of the same circuit and a
//! trial fails below 1/2. The X and Z layers in the circuit are applied
//! unconditionally; there is no syndrome measurement or decoding.

mod channel;
mod gate;
mod sim;

pub use channel::{apply_channel, NoiseChannel, DEFAULT_ETA};
pub use gate::{apply_gate, build_circuit, gate_matrix, Gate, GateKind, NoisePlacement, MAX_CIRCUIT_QUBITS};
pub use sim::{
    estimate_plog, estimate_with, exact_failure_probability, run_trial, trial_rng, wilson_interval, Estimate,
    SimOptions, SimulationResult, Simulator, TrialOutcome, FAILURE_FIDELITY, MAX_EXACT_SITES, MIN_TRIALS, WILSON_Z,
};
