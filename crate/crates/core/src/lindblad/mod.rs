//! Purely dissipative Lindbladians with unitary jumps: the exact generator,
//! the renormalised Taylor channel, trajectory sampling with Pauli fast
//! forwarding, and the purification circuits with their resource tallies.

mod circuit;
mod spec;
mod taylor;
mod trajectory;

pub use circuit::{
    build_purified_circuit, build_purified_circuit_with_plan, jump_index_width, CircuitGate, CircuitMode,
    GateKind, PurifiedCircuit, Register, ResourceTally,
};
pub use spec::{exact_channel, exact_evolution, liouvillian_matrix, DissipativeLindbladSpec, Jump, JumpOperator};
pub use taylor::{
    apply_taylor_channel, apply_taylor_operator, build_taylor_channel, build_taylor_channel_with_plan, kraus_count,
    taylor_superoperator, truncation_bound, truncation_order, TruncationPlan,
};
pub use trajectory::{
    average_density, fast_forward_apply, sample_sequence, sample_trajectories, sample_trajectory, Trajectory,
    TrajectoryPath,
};
