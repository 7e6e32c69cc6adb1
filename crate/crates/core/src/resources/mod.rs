//! Closed-form cost model for the purification circuits, Gibbs coherence
//! amplitude estimation and the QSVT baselines, with comparison tables.

mod cost;
mod report;

pub use cost::{
    depth_envelope_check, qsvt_cost, theorem1_cost, theorem2_cost, theorem3_cost, CostMethod, CostReport,
    EnvelopeCheck, SpectralAmplification, CONVENTIONS, DEFAULT_ENVELOPE,
};
pub use report::{comparison_table, crossover, log_sweep, to_csv, to_json, ComparisonPoint, Crossover};
