use crate::error::{Error, Result};
use crate::limits::check_dense_dim;
use crate::linalg::{norm, DenseOperator};
use crate::pauli::{Letter, PauliPhase, PauliString};
use crate::scalar::{Cx, Real};

/// Normalised Walsh–Hadamard transform `H^{⊗n} v`.
pub fn hadamard_transform<T: Real>(v: &[Cx<T>]) -> Vec<Cx<T>> {
    let mut out = v.to_vec();
    let mut h = 1;
    while h < out.len() {
        for start in (0..out.len()).step_by(2 * h) {
            for i in start..start + h {
                let (a, b) = (out[i], out[i + h]);
                out[i] = a + b;
                out[i + h] = a - b;
            }
        }
        h <<= 1;
    }
    let s = T::one() / T::from_usize(out.len()).expect("length").sqrt();
    out.iter_mut().for_each(|z| *z = *z * s);
    out
}

fn qubits_of(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::Shape(format!("vector length {len} is not a power of two")));
    }
    Ok(len.trailing_zeros() as usize)
}

fn check_normalized<T: Real>(state: &[Cx<T>]) -> Result<usize> {
    let n = qubits_of(state.len())?;
    let nrm = norm(state);
    if (nrm - T::one()).abs() > T::tol(1e-10) {
        return Err(Error::InvalidArgument(format!("state has norm {nrm}")));
    }
    Ok(n)
}

/// Correspondence between `I`/`X` Pauli words and computational basis
/// states: qubit `q` of the word is `X` exactly when bit `q` of the index
/// is set (qubit 0 most significant).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PqcBasisMap {
    pub n: usize,
}

impl PqcBasisMap {
    pub fn new(n: usize) -> Self {
        PqcBasisMap { n }
    }

    pub fn word(&self, index: usize) -> PauliString {
        let letters: Vec<Letter> = (0..self.n)
            .map(|q| if (index >> (self.n - 1 - q)) & 1 == 1 { Letter::X } else { Letter::I })
            .collect();
        PauliString::from_letters(PauliPhase::ONE, &letters)
    }

    /// Basis index of an unphased `I`/`X` word, `None` for anything else.
    pub fn index(&self, word: &PauliString) -> Option<usize> {
        if word.num_qubits() != self.n || word.phase() != PauliPhase::ONE {
            return None;
        }
        let mut idx = 0;
        for l in word.letters() {
            idx = match l {
                Letter::I => idx << 1,
                Letter::X => (idx << 1) | 1,
                _ => return None,
            };
        }
        Some(idx)
    }
}

/// `S = 2^{-n/2} Σ_i c_i P_i`. Since `P_i` is the bit-flip by `i`,
/// `S[r][c] = 2^{-n/2} c_{r⊕c}`.
pub fn pqc_encode<T: Real>(state: &[Cx<T>]) -> Result<DenseOperator<T>> {
    check_normalized(state)?;
    let d = state.len();
    check_dense_dim(d)?;
    let s = T::one() / T::from_usize(d).expect("dim").sqrt();
    Ok(DenseOperator::from_fn(d, d, |r, c| state[r ^ c] * s))
}

/// The PQC map `(⟨0|^{⊗n}⊗I) U_B^{⊗n} V[S]` of an arbitrary operator:
/// `PQC[S]_a = 2^{-n/2} Σ_r S[r][r⊕a]`.
pub fn pqc_map<T: Real>(s: &DenseOperator<T>) -> Result<Vec<Cx<T>>> {
    let d = s.rows();
    if !s.is_square() {
        return Err(Error::Shape("PQC map needs a square operator".into()));
    }
    qubits_of(d)?;
    let scale = T::one() / T::from_usize(d).expect("dim").sqrt();
    Ok((0..d)
        .map(|a| (0..d).fold(Cx::new(T::zero(), T::zero()), |acc, r| acc + s[(r, r ^ a)]) * scale)
        .collect())
}

/// Inverse of [`pqc_encode`] on `I`/`X` combinations.
pub fn pqc_decode<T: Real>(s: &DenseOperator<T>) -> Result<Vec<Cx<T>>> {
    pqc_map(s)
}

/// `U_B^{⊗n}` on `2n` qubits with `U_B = (H⊗I)·CNOT`. Qubit `q` is paired
/// with qubit `n+q`; the first `n` qubits are the ones projected on `⟨0|`.
pub fn ub_tensor<T: Real>(n: usize) -> Result<DenseOperator<T>> {
    let d = 1usize << n;
    check_dense_dim(d * d)?;
    let s = T::one() / T::from_usize(d).expect("dim").sqrt();
    // U_B^{⊗n} |r, c⟩ = H^{⊗n}|r⟩ ⊗ |c ⊕ r⟩
    Ok(DenseOperator::from_fn(d * d, d * d, |row, col| {
        let (r2, c2) = (row / d, row % d);
        let (r, c) = (col / d, col % d);
        if c2 != c ^ r {
            return Cx::new(T::zero(), T::zero());
        }
        if (r2 & r).count_ones() % 2 == 1 {
            Cx::new(-s, T::zero())
        } else {
            Cx::new(s, T::zero())
        }
    }))
}

/// `γ_S = 1 / (2 ‖H^{⊗n}|S⟩‖₁)`.
pub fn gamma_upper_bound<T: Real>(state: &[Cx<T>]) -> Result<T> {
    check_normalized(state)?;
    let l1 = hadamard_transform(state).iter().fold(T::zero(), |acc, z| acc + z.norm());
    Ok(T::one() / (l1 + l1))
}
