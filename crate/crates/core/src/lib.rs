//! Simulation and verification of purely dissipative Lindbladian dynamics,
//! channel block encodings and Gibbs coherence amplitude estimation, with
//! dense-matrix oracles for every algorithmic output.
//!
//! The numerical core (`linalg`, `lindblad`, `cbe`) is generic over
//! [`Real`] so it runs in `f32` or `f64`; the aliases below fix the common
//! double-precision instantiations.

pub mod cbe;
pub mod error;
pub mod estimation;
pub mod gca;
pub mod io;
pub mod limits;
pub mod lindblad;
pub mod linalg;
pub mod pauli;
pub mod resources;
pub mod sample;
pub mod scalar;

pub use error::{Error, Result};
pub use limits::Limits;
pub use scalar::{cx, Cx, Real};

pub type Complex64 = Cx<f64>;
pub type Operator = linalg::DenseOperator<f64>;
pub type Operator32 = linalg::DenseOperator<f32>;
pub type Density = linalg::DensityMatrix<f64>;
pub type Density32 = linalg::DensityMatrix<f32>;
pub type Channel = linalg::KrausChannel<f64>;
pub type Channel32 = linalg::KrausChannel<f32>;
pub type LindbladSpec = lindblad::DissipativeLindbladSpec<f64>;
pub type LindbladSpec32 = lindblad::DissipativeLindbladSpec<f32>;
pub type CbeChannel = cbe::CbeChannel<f64>;
pub type CbeChannel32 = cbe::CbeChannel<f32>;
