use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::DenseOperator;
use crate::pauli::PauliString;
use crate::scalar::{Cx, Real};

/// Block-diagonal Pauli operator `Σ_j |j⟩⟨j| ⊗ P_j` over `R` blocks of
/// `n`-qubit Pauli strings.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockDiagPauli {
    blocks: Vec<PauliString>,
}

impl BlockDiagPauli {
    pub fn new(blocks: Vec<PauliString>) -> Result<Self> {
        let first = blocks.first().ok_or(Error::Empty("block list"))?;
        let n = first.num_qubits();
        if let Some(bad) = blocks.iter().find(|b| b.num_qubits() != n) {
            return Err(Error::QubitMismatch {
                left: n,
                right: bad.num_qubits(),
            });
        }
        Ok(BlockDiagPauli { blocks })
    }

    pub fn identity(num_blocks: usize, num_qubits: usize) -> Self {
        assert!(num_blocks > 0);
        BlockDiagPauli {
            blocks: vec![PauliString::identity(num_qubits); num_blocks],
        }
    }

    pub fn parse(blocks: &[&str]) -> Result<Self> {
        BlockDiagPauli::new(blocks.iter().map(|s| s.parse()).collect::<Result<_>>()?)
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Qubits per block.
    pub fn num_qubits(&self) -> usize {
        self.blocks[0].num_qubits()
    }

    /// Qubits of the full operator, `log2(R) + n`; `None` when `R` is not a
    /// power of two.
    pub fn total_qubits(&self) -> Option<usize> {
        let r = self.num_blocks();
        r.is_power_of_two()
            .then(|| r.trailing_zeros() as usize + self.num_qubits())
    }

    pub fn blocks(&self) -> &[PauliString] {
        &self.blocks
    }

    pub fn block(&self, j: usize) -> &PauliString {
        &self.blocks[j]
    }

    pub fn multiply(&self, rhs: &BlockDiagPauli) -> Result<BlockDiagPauli> {
        if self.num_blocks() != rhs.num_blocks() {
            return Err(Error::Shape(format!(
                "block counts differ: {} vs {}",
                self.num_blocks(),
                rhs.num_blocks()
            )));
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&rhs.blocks)
            .map(|(a, b)| a.multiply(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(BlockDiagPauli { blocks })
    }

    pub fn complex_conjugate(&self) -> BlockDiagPauli {
        BlockDiagPauli {
            blocks: self.blocks.iter().map(|b| b.complex_conjugate()).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.blocks
            .iter()
            .all(|b| b.is_identity_letters() && b.phase() == super::PauliPhase::ONE)
    }

    /// Applies the operator to a state of length `R · 2^n`, block by block.
    pub fn apply<T: Real>(&self, state: &[Cx<T>]) -> Result<Vec<Cx<T>>> {
        let sub = 1usize << self.num_qubits();
        if state.len() != sub * self.num_blocks() {
            return Err(Error::Shape(format!(
                "state length {} != {} blocks × {}",
                state.len(),
                self.num_blocks(),
                sub
            )));
        }
        let mut out = vec![Cx::new(T::zero(), T::zero()); state.len()];
        for (j, block) in self.blocks.iter().enumerate() {
            block.apply_into(&state[j * sub..(j + 1) * sub], &mut out[j * sub..(j + 1) * sub]);
        }
        Ok(out)
    }

    /// Dense matrix; requires a power-of-two block count.
    pub fn to_dense<T: Real>(&self) -> Result<DenseOperator<T>> {
        if !self.num_blocks().is_power_of_two() {
            return Err(Error::Shape(format!(
                "dense form needs a power-of-two block count, got {}",
                self.num_blocks()
            )));
        }
        let sub = 1usize << self.num_qubits();
        let mut m = DenseOperator::zeros(sub * self.num_blocks());
        for (j, block) in self.blocks.iter().enumerate() {
            m.set_block(j * sub, j * sub, &block.to_dense());
        }
        Ok(m)
    }
}

impl fmt::Display for BlockDiagPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (j, b) in self.blocks.iter().enumerate() {
            if j > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{b}")?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Operator;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn involution_blocks() {
        let f = BlockDiagPauli::parse(&["X", "Z"]).unwrap();
        assert!(f.multiply(&f).unwrap().is_identity());
    }

    #[test]
    fn published_entries() {
        let a = BlockDiagPauli::parse(&["X", "I"]).unwrap();
        let b = BlockDiagPauli::parse(&["Y", "Z"]).unwrap();
        assert_eq!(
            a.multiply(&b).unwrap(),
            BlockDiagPauli::parse(&["+iZ", "Z"]).unwrap()
        );
    }

    #[test]
    fn random_product_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let a = BlockDiagPauli::new((0..4).map(|_| PauliString::random(3, &mut rng)).collect())
                .unwrap();
            let b = BlockDiagPauli::new((0..4).map(|_| PauliString::random(3, &mut rng)).collect())
                .unwrap();
            let da: Operator = a.to_dense().unwrap();
            let want = da.matmul(&b.to_dense().unwrap()).unwrap();
            let got: Operator = a.multiply(&b).unwrap().to_dense().unwrap();
            assert_eq!(got.max_abs_diff(&want), 0.0);
        }
    }

    #[test]
    fn shape_errors() {
        let a = BlockDiagPauli::parse(&["X", "I"]).unwrap();
        let b = BlockDiagPauli::parse(&["X"]).unwrap();
        assert!(a.multiply(&b).is_err());
        assert!(BlockDiagPauli::parse(&["X", "XX"]).is_err());
        assert!(BlockDiagPauli::new(vec![]).is_err());
    }

    #[test]
    fn apply_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = BlockDiagPauli::new((0..2).map(|_| PauliString::random(2, &mut rng)).collect())
            .unwrap();
        let psi: Vec<Cx<f64>> = (0..8).map(|k| Cx::new(k as f64, 1.0 - k as f64)).collect();
        let dense: Operator = f.to_dense().unwrap();
        let want = dense.apply(&psi).unwrap();
        let got = f.apply(&psi).unwrap();
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
