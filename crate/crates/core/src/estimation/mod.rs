//! Amplitude estimation of state overlaps: Hadamard-test embeddings, the
//! Grover operator, maximum-likelihood estimation over an exponential
//! schedule, and a plain shot-noise baseline.

mod grover;
mod hadamard;
mod mlae;
mod shots;

pub use grover::grover_operator;
pub use hadamard::{hadamard_test_embed, hadamard_test_states, projector_block_encoding, HadamardEmbedding, Part};
pub use mlae::{
    max_likelihood_angle, mlae_amplitude, mlae_estimate, mlae_plan, shots_per_round, AmplitudeProblem,
    EstimateReport, MlaePlan, ScheduleEntry, Target, MLAE_MIN_SHOTS, MLAE_RATIO, MLAE_SAFETY,
};
pub use shots::shot_estimate;
pub(crate) use shots::shot_estimate_with;

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
