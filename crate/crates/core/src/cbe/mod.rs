//! Non-diagonal density-matrix encodings in the Pauli (`I→|0⟩`, `X→|1⟩`)
//! encoding and channel block encodings acting on them.

mod channel;
mod circuit;
mod eta;
mod gates;
mod jumps;
mod ndme;
mod pqc;

pub use channel::{compose_cbe, verify_cbe, CbeChannel, CbeDump, CbePair, CbeVerification, PairJson};
pub use circuit::{compile_circuit_cbe, embed_cbe, CbeCircuit};
pub use eta::{eta_ratio, eta_upper_bound_estimate, EtaEstimate, ETA_DEFAULT_ITERATIONS, ETA_DEFAULT_STARTS};
pub use gates::{
    adjoint_gates, check_gates, circuit_unitary, cnot, gate_cbe, hadamard, hadamard_all, hadamard_count, pauli_i,
    pauli_x, pauli_y, pauli_z, phase_s, phase_t, Gate, GateName, TableGate,
};
pub use jumps::hamiltonian_jump_construction;
pub use ndme::{ndme_construct, NdmeState};
pub use pqc::{gamma_upper_bound, hadamard_transform, pqc_decode, pqc_encode, pqc_map, ub_tensor, PqcBasisMap};
