use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::{BlockDiagPauli, PauliString};

/// Values that can be multiplied pairwise in a reduction tree.
pub trait PauliProduct: Clone + Send + Sync {
    fn try_mul(&self, rhs: &Self) -> Result<Self>;
    fn shape(&self) -> (usize, usize);
}

impl PauliProduct for PauliString {
    fn try_mul(&self, rhs: &Self) -> Result<Self> {
        self.multiply(rhs)
    }

    fn shape(&self) -> (usize, usize) {
        (1, self.num_qubits())
    }
}

impl PauliProduct for BlockDiagPauli {
    fn try_mul(&self, rhs: &Self) -> Result<Self> {
        self.multiply(rhs)
    }

    fn shape(&self) -> (usize, usize) {
        (self.num_blocks(), self.num_qubits())
    }
}

/// Statistics of a pairwise reduction.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TreeStats {
    /// Number of multiplication rounds, `⌈log2 len⌉`.
    pub depth: usize,
    pub multiplies: usize,
    /// Sequence length entering each round, leaves first.
    pub level_sizes: Vec<usize>,
}

const PAR_THRESHOLD: usize = 512;

/// Ordered product `seq[0] · seq[1] · ... · seq[len-1]` evaluated as a binary
/// tree of independent pairwise multiplies. An unpaired trailing element is
/// promoted to the next level unchanged.
pub fn product_tree<P: PauliProduct>(seq: &[P]) -> Result<(P, TreeStats)> {
    let first = seq.first().ok_or(Error::Empty("product sequence"))?;
    let shape = first.shape();
    if let Some(bad) = seq.iter().find(|p| p.shape() != shape) {
        return Err(Error::Shape(format!(
            "mixed shapes in product sequence: {:?} vs {:?}",
            shape,
            bad.shape()
        )));
    }
    let mut stats = TreeStats::default();
    let mut level: Vec<P> = seq.to_vec();
    while level.len() > 1 {
        stats.level_sizes.push(level.len());
        stats.multiplies += level.len() / 2;
        let reduce = |pair: &[P]| -> Result<P> {
            match pair {
                [a, b] => a.try_mul(b),
                [a] => Ok(a.clone()),
                _ => unreachable!(),
            }
        };
        level = if level.len() >= PAR_THRESHOLD {
            level.par_chunks(2).map(reduce).collect::<Result<_>>()?
        } else {
            level.chunks(2).map(reduce).collect::<Result<_>>()?
        };
        stats.depth += 1;
    }
    stats.level_sizes.push(1);
    Ok((level.pop().expect("nonempty"), stats))
}

/// `⌈log2 len⌉` with `ceil_log2(0) = ceil_log2(1) = 0`.
pub fn ceil_log2(len: usize) -> usize {
    if len <= 1 {
        0
    } else {
        (usize::BITS - (len - 1).leading_zeros()) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pair_and_singleton() {
        let (r, s) = product_tree(&["X".parse::<PauliString>().unwrap(), "Y".parse().unwrap()]).unwrap();
        assert_eq!(r, "+iZ".parse().unwrap());
        assert_eq!(s.depth, 1);
        let p: PauliString = "-iXZ".parse().unwrap();
        let (r, s) = product_tree(std::slice::from_ref(&p)).unwrap();
        assert_eq!(r, p);
        assert_eq!(s.depth, 0);
    }

    #[test]
    fn long_sequence_matches_fold() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let seq: Vec<PauliString> = (0..1024).map(|_| PauliString::random(3, &mut rng)).collect();
        let fold = seq[1..]
            .iter()
            .fold(seq[0].clone(), |acc, p| acc.multiply(p).unwrap());
        let (r, s) = product_tree(&seq).unwrap();
        assert_eq!(r, fold);
        assert_eq!(s.depth, 10);
        assert_eq!(s.multiplies, 1023);
    }

    #[test]
    fn odd_lengths_keep_log_depth() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for len in [3usize, 5, 7, 9, 33, 1000] {
            let seq: Vec<PauliString> = (0..len).map(|_| PauliString::random(2, &mut rng)).collect();
            let (_, s) = product_tree(&seq).unwrap();
            assert_eq!(s.depth, ceil_log2(len), "len {len}");
            assert_eq!(s.multiplies, len - 1);
        }
    }

    #[test]
    fn errors() {
        assert!(product_tree::<PauliString>(&[]).is_err());
        let seq: Vec<PauliString> = vec!["X".parse().unwrap(), "XX".parse().unwrap()];
        assert!(product_tree(&seq).is_err());
    }

    #[test]
    fn ceil_log2_values() {
        let got: Vec<usize> = [1, 2, 3, 4, 5, 8, 9, 4096].iter().map(|&k| ceil_log2(k)).collect();
        assert_eq!(got, vec![0, 1, 2, 2, 3, 3, 4, 12]);
    }
}
