//! Dense complex linear algebra: operators, density matrices, channels,
//! vectorisation, Choi states and the matrix exponential.

mod channel;
mod density;
mod eigen;
mod expm;
mod json;
mod operator;
mod vectorize;

pub use channel::{
    choi_trace_distance, choi_trace_distance_superop, complete_to_unitary, stinespring_isometry,
    stinespring_unitary, KrausChannel, Superoperator,
};
pub use density::{partial_trace, DensityMatrix};
pub use eigen::{hermitian_eigen, normal_eigenvalues, trace_norm_hermitian, HermitianEigen};
pub use expm::expm;
pub use json::MatrixJson;
pub use operator::{basis_state, embed, inner, kron_vec, norm, solve, DenseOperator};
pub use vectorize::{matrixize, superop_of_map, vectorize, VectorizedOperator};

pub const TAU_HERM: f64 = 1e-10;
pub const TAU_TR: f64 = 1e-10;
pub const TAU_CPTP: f64 = 1e-9;
pub const TAU_PSD: f64 = 1e-10;

pub type Operator = DenseOperator<f64>;
