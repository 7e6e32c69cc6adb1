use num_traits::Zero;

use crate::error::{Error, Result};
use crate::limits::check_dense_dim;
use crate::linalg::eigen::{hermitian_eigen, trace_norm_hermitian};
use crate::linalg::operator::DenseOperator;
use crate::linalg::{TAU_HERM, TAU_PSD, TAU_TR};
use crate::scalar::{Cx, Real};

/// Positive semidefinite, unit-trace Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    m: DenseOperator<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity, trace and positivity.
    pub fn new(m: DenseOperator<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidDensity("not square".into()));
        }
        check_dense_dim(m.dim())?;
        if !m.is_finite() {
            return Err(Error::InvalidDensity("non-finite entries".into()));
        }
        let herm = m.hermiticity_residual();
        if herm > T::tol(TAU_HERM) {
            return Err(Error::InvalidDensity(format!("Hermiticity residual {herm:e}")));
        }
        let tr = m.trace();
        if (tr.re - T::one()).abs() > T::tol(TAU_TR) || tr.im.abs() > T::tol(TAU_TR) {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let min = hermitian_eigen(&m)?.values[0];
        if min < -T::tol(TAU_PSD) {
            return Err(Error::InvalidDensity(format!("eigenvalue {min:e}")));
        }
        Ok(DensityMatrix { m })
    }

    /// Wraps a matrix produced by a construction that preserves the
    /// invariants (CPTP maps, partial traces, pure states).
    pub fn new_unchecked(m: DenseOperator<T>) -> Self {
        DensityMatrix { m }
    }

    pub fn from_pure(psi: &[Cx<T>]) -> Self {
        DensityMatrix {
            m: DenseOperator::outer(psi, psi),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let w = T::one() / T::from_usize(dim).expect("dimension");
        DensityMatrix {
            m: DenseOperator::identity(dim).scale_real(w),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn num_qubits(&self) -> Option<usize> {
        self.m.num_qubits()
    }

    pub fn matrix(&self) -> &DenseOperator<T> {
        &self.m
    }

    pub fn into_matrix(self) -> DenseOperator<T> {
        self.m
    }

    /// `Tr(O ρ)`.
    pub fn expectation(&self, o: &DenseOperator<T>) -> Result<Cx<T>> {
        if o.rows() != self.dim() || o.cols() != self.dim() {
            return Err(Error::Shape("observable dimension".into()));
        }
        let d = self.dim();
        let mut acc = Cx::zero();
        for r in 0..d {
            for k in 0..d {
                acc += o[(r, k)] * self.m[(k, r)];
            }
        }
        Ok(acc)
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix<T>> {
        Ok(DensityMatrix::new_unchecked(partial_trace(&self.m, keep)?))
    }

    /// `½‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &DensityMatrix<T>) -> Result<T> {
        Ok(trace_norm_hermitian(&self.m.sub(&other.m)?)? * T::from_f64_lossy(0.5))
    }
}

/// Partial trace over every qubit not listed in `keep` (qubit 0 is the most
/// significant tensor factor). The kept qubits retain their relative order.
pub fn partial_trace<T: Real>(m: &DenseOperator<T>, keep: &[usize]) -> Result<DenseOperator<T>> {
    let n = m
        .num_qubits()
        .ok_or_else(|| Error::Shape("partial trace needs a 2^n × 2^n operator".into()))?;
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.len() != keep.len() {
        return Err(Error::InvalidArgument("duplicate qubit in keep set".into()));
    }
    if let Some(&bad) = keep.iter().find(|&&q| q >= n) {
        return Err(Error::IndexOutOfRange { index: bad, size: n });
    }
    let keep_mask: usize = keep.iter().map(|&q| 1usize << (n - 1 - q)).sum();
    let out_dim = 1usize << keep.len();
    let compress = |idx: usize| -> usize {
        keep.iter()
            .fold(0usize, |acc, &q| (acc << 1) | ((idx >> (n - 1 - q)) & 1))
    };
    let mut out = DenseOperator::zeros(out_dim);
    let d = m.dim();
    for r in 0..d {
        let r_env = r & !keep_mask;
        let rk = compress(r);
        for c in 0..d {
            if c & !keep_mask != r_env {
                continue;
            }
            out[(rk, compress(c))] += m[(r, c)];
        }
    }
    Ok(out)
}
