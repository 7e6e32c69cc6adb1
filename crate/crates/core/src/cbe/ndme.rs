use crate::cbe::pqc::{gamma_upper_bound, hadamard_transform, pqc_encode};
use crate::error::{Error, Result};
use crate::linalg::{DenseOperator, DensityMatrix};
use crate::scalar::{Cx, Real};

/// A `γ`-NDME: an `(n+1)`-qubit density matrix whose upper-right
/// `2^n × 2^n` block is `γ S`.
#[derive(Clone, Debug, PartialEq)]
pub struct NdmeState<T: Real> {
    pub n: usize,
    pub rho: DensityMatrix<T>,
    pub gamma: T,
    /// Upper-right block over `γ`; `None` when `γ = 0`.
    pub encoded_s: Option<DenseOperator<T>>,
}

impl<T: Real> NdmeState<T> {
    /// Reads `γ` and `S` back from a density matrix, given the factor.
    pub fn from_density(rho: DensityMatrix<T>, gamma: T) -> Result<Self> {
        let n = rho
            .num_qubits()
            .and_then(|q| q.checked_sub(1))
            .ok_or_else(|| Error::Shape("NDME needs at least one ancilla qubit".into()))?;
        let d = 1 << n;
        let encoded_s = (gamma > T::zero()).then(|| rho.matrix().block(0, d, d, d).scale_real(T::one() / gamma));
        Ok(NdmeState { n, rho, gamma, encoded_s })
    }

    /// Upper-right block `γ S` as stored in `ρ`.
    pub fn upper_right(&self) -> DenseOperator<T> {
        let d = 1 << self.n;
        self.rho.matrix().block(0, d, d, d)
    }
}

/// Builds the `γ`-NDME of `|S⟩` using the completion from the `γ` bound:
/// in the frame `I⊗H^{⊗n}` the off-diagonal block is `diag(γχ)`, and both
/// diagonal blocks are `diag(γ|χ_i| + (1/2 − γΣ|χ|)/2^n)`, which is PSD
/// with unit trace exactly when `γ ≤ γ_S`.
pub fn ndme_construct<T: Real>(state: &[Cx<T>], gamma: T) -> Result<NdmeState<T>> {
    let bound = gamma_upper_bound(state)?;
    if !(gamma >= T::zero()) || gamma > bound * (T::one() + T::tol(1e-12)) {
        return Err(Error::InvalidArgument(format!("gamma {gamma} outside [0, {bound}]")));
    }
    let s = pqc_encode(state)?;
    let d = state.len();
    // H P_j H = Z^j, so Σ_S = H S H = diag(χ) with χ = H^{⊗n}|S⟩.
    let chi = hadamard_transform(state);
    let l1 = chi.iter().fold(T::zero(), |acc, z| acc + z.norm());
    let two = T::one() + T::one();
    let slack = ((T::one() / two - gamma * l1) / T::from_usize(d).expect("dim")).max(T::zero());
    let diag: Vec<T> = chi.iter().map(|z| gamma * z.norm() + slack).collect();

    // H^{⊗n} diag(v) H^{⊗n} depends on r⊕c only: 2^{-n/2} (H v)_{r⊕c}.
    let had_of = |v: &[Cx<T>]| -> Vec<Cx<T>> {
        let s = T::one() / T::from_usize(d).expect("dim").sqrt();
        hadamard_transform(v).iter().map(|z| *z * s).collect()
    };
    let diag_c: Vec<Cx<T>> = diag.iter().map(|&x| Cx::new(x, T::zero())).collect();
    let r_block = had_of(&diag_c);
    let mut rho = DenseOperator::zeros(2 * d);
    for r in 0..d {
        for c in 0..d {
            let v = r_block[r ^ c];
            rho[(r, c)] = v;
            rho[(d + r, d + c)] = v;
            let off = s[(r, c)] * gamma;
            rho[(r, d + c)] = off;
            rho[(d + c, r)] = off.conj();
        }
    }
    let rho = DensityMatrix::new(rho)?;
    Ok(NdmeState {
        n: d.trailing_zeros() as usize,
        rho,
        gamma,
        encoded_s: (gamma > T::zero()).then_some(s),
    })
}
