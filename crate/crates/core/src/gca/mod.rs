//! Gibbs coherence amplitudes `⟨ψ₁|e^{−β(H+I)}|ψ₂⟩`: the Gibbs
//! Lindbladian, the channel pipeline on an NDME input, its exact, shot and
//! amplitude-estimation readouts, and the dense oracle.

mod pipeline;
mod problem;

pub use pipeline::{
    default_plan, exact_gca_oracle, gca_from_raw, gibbs_cbe_residual, gibbs_lindbladian, hamiltonian_matrix,
    mlae_amplitude_epsilon, mlae_register_qubits, pipeline_output, run_pipeline_exact, run_pipeline_mlae,
    run_pipeline_shots, Composition, GcaEstimate, GcaMethod, PipelineOutput, GIBBS_CHECK_TOL, ORACLE_MAX_QUBITS,
    PIPELINE_MAX_QUBITS,
};
pub use problem::{hadamard_conjugate, GcaProblem, GcaProblemJson, TermJson};
