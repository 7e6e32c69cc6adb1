//! Phased Pauli strings, block-diagonal Pauli operators, their binary
//! register encoding and logarithmic-depth product reduction.

mod block;
mod code;
mod string;
mod tree;

pub use block::BlockDiagPauli;
pub use code::{decode_binary, encode_binary, PauliBinaryCode};
pub use string::{Letter, PauliPhase, PauliString};
pub use tree::{ceil_log2, product_tree, PauliProduct, TreeStats};
