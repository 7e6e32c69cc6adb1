use num_traits::Zero;

use crate::error::{Error, Result};
use crate::limits::{check_dense_dim, Limits};
use crate::linalg::density::DensityMatrix;
use crate::linalg::eigen::trace_norm_hermitian;
use crate::linalg::operator::{inner, DenseOperator};
use crate::linalg::vectorize::{accumulate_kron_conj, matrixize, vectorize, VectorizedOperator};
use crate::linalg::TAU_CPTP;
use crate::scalar::{Cx, Real};

/// Channel in Kraus form, `ρ ↦ Σ A_i ρ A_i†`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel<T: Real> {
    ops: Vec<DenseOperator<T>>,
}

impl<T: Real> KrausChannel<T> {
    /// Checks shapes and trace preservation to `τ_cptp`.
    pub fn new(ops: Vec<DenseOperator<T>>) -> Result<Self> {
        let ch = Self::new_unchecked(ops)?;
        let residual = ch.cptp_residual();
        if !(residual <= T::tol(TAU_CPTP)) {
            return Err(Error::NotCptp {
                residual: residual.to_f64_lossy(),
                tol: T::tol(TAU_CPTP).to_f64_lossy(),
            });
        }
        Ok(ch)
    }

    /// Checks shapes only.
    pub fn new_unchecked(ops: Vec<DenseOperator<T>>) -> Result<Self> {
        let first = ops.first().ok_or(Error::Empty("Kraus list"))?;
        let d = first.rows();
        if ops.iter().any(|a| !a.is_square() || a.rows() != d) {
            return Err(Error::Shape("Kraus operators must be square and of equal size".into()));
        }
        let cap = Limits::current().max_kraus;
        if ops.len() > cap {
            return Err(Error::EnumerationCap {
                count: ops.len() as f64,
                cap,
            });
        }
        check_dense_dim(d)?;
        Ok(KrausChannel { ops })
    }

    pub fn identity(dim: usize) -> Self {
        KrausChannel {
            ops: vec![DenseOperator::identity(dim)],
        }
    }

    pub fn unitary(u: DenseOperator<T>) -> Result<Self> {
        Self::new(vec![u])
    }

    pub fn ops(&self) -> &[DenseOperator<T>] {
        &self.ops
    }

    pub fn into_ops(self) -> Vec<DenseOperator<T>> {
        self.ops
    }

    pub fn dim(&self) -> usize {
        self.ops[0].rows()
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// `max |(Σ A†A − I)_{ij}|`.
    pub fn cptp_residual(&self) -> T {
        let d = self.dim();
        let mut acc = DenseOperator::zeros(d);
        for a in &self.ops {
            acc = acc.add(&a.adjoint().mm(a)).expect("same shape");
        }
        acc.max_abs_diff(&DenseOperator::identity(d))
    }

    /// `Σ A O A†` for any operator `O`.
    pub fn apply_operator(&self, o: &DenseOperator<T>) -> Result<DenseOperator<T>> {
        if o.rows() != self.dim() || o.cols() != self.dim() {
            return Err(Error::Shape(format!(
                "operator of size {} for a channel on {}",
                o.rows(),
                self.dim()
            )));
        }
        let mut acc = DenseOperator::zeros(self.dim());
        for a in &self.ops {
            acc = acc.add(&a.mm(o).mm(&a.adjoint()))?;
        }
        Ok(acc)
    }

    pub fn apply(&self, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
        let residual = self.cptp_residual();
        if !(residual <= T::tol(TAU_CPTP)) {
            return Err(Error::NotCptp {
                residual: residual.to_f64_lossy(),
                tol: T::tol(TAU_CPTP).to_f64_lossy(),
            });
        }
        Ok(DensityMatrix::new_unchecked(self.apply_operator(rho.matrix())?))
    }

    /// `self ∘ first`: Kraus operators `A_i B_j`.
    pub fn compose(&self, first: &KrausChannel<T>) -> Result<KrausChannel<T>> {
        let mut ops = Vec::with_capacity(self.len() * first.len());
        for a in &self.ops {
            for b in &first.ops {
                ops.push(a.matmul(b)?);
            }
        }
        KrausChannel::new_unchecked(ops)
    }

    pub fn superoperator(&self) -> Result<Superoperator<T>> {
        let d = self.dim();
        check_dense_dim(d * d)?;
        let mut s = DenseOperator::zeros(d * d);
        let one = Cx::new(T::one(), T::zero());
        for a in &self.ops {
            accumulate_kron_conj(&mut s, a, a, one);
        }
        Ok(Superoperator { matrix: s, dim: d })
    }

    /// `(C ⊗ I)[|Ω⟩⟨Ω|]` with the normalised maximally entangled `|Ω⟩`,
    /// system first.
    pub fn choi_state(&self) -> Result<DensityMatrix<T>> {
        let d = self.dim();
        check_dense_dim(d * d)?;
        let mut j = DenseOperator::zeros(d * d);
        let w = T::one() / T::from_usize(d).expect("dimension");
        for a in &self.ops {
            let v = vectorize(a);
            for r in 0..d * d {
                let vr = v.0[r] * w;
                if vr.is_zero() {
                    continue;
                }
                for c in 0..d * d {
                    j[(r, c)] += vr * v.0[c].conj();
                }
            }
        }
        Ok(DensityMatrix::new_unchecked(j))
    }
}

/// Superoperator acting on row-major vectorised operators.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator<T: Real> {
    matrix: DenseOperator<T>,
    dim: usize,
}

impl<T: Real> Superoperator<T> {
    pub fn from_matrix(matrix: DenseOperator<T>) -> Result<Self> {
        let d = (matrix.rows() as f64).sqrt().round() as usize;
        if !matrix.is_square() || d * d != matrix.rows() {
            return Err(Error::Shape("superoperator must be d² × d²".into()));
        }
        Ok(Superoperator { matrix, dim: d })
    }

    pub fn identity(dim: usize) -> Self {
        Superoperator {
            matrix: DenseOperator::identity(dim * dim),
            dim,
        }
    }

    pub fn matrix(&self) -> &DenseOperator<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DenseOperator<T> {
        self.matrix
    }

    /// Dimension of the operators acted upon.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply_operator(&self, o: &DenseOperator<T>) -> Result<DenseOperator<T>> {
        let v = self.matrix.apply(vectorize(o).as_slice())?;
        matrixize(&VectorizedOperator(v))
    }

    /// Output wrapped without revalidation; callers own the CPTP guarantee.
    pub fn apply(&self, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
        Ok(DensityMatrix::new_unchecked(self.apply_operator(rho.matrix())?))
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &Superoperator<T>) -> Result<Superoperator<T>> {
        Ok(Superoperator {
            matrix: self.matrix.matmul(&first.matrix)?,
            dim: self.dim,
        })
    }

    pub fn choi_state(&self) -> DensityMatrix<T> {
        let d = self.dim;
        let w = T::one() / T::from_usize(d).expect("dimension");
        let j = DenseOperator::from_fn(d * d, d * d, |r, c| {
            let (a, i) = (r / d, r % d);
            let (b, jj) = (c / d, c % d);
            self.matrix[(a * d + b, i * d + jj)] * w
        });
        DensityMatrix::new_unchecked(j)
    }
}

/// `‖J(C1) − J(C2)‖₁`, a lower bound on the diamond distance.
pub fn choi_trace_distance<T: Real>(a: &KrausChannel<T>, b: &KrausChannel<T>) -> Result<T> {
    if a.dim() != b.dim() {
        return Err(Error::Shape("channels act on different dimensions".into()));
    }
    choi_distance_of_states(&a.choi_state()?, &b.choi_state()?)
}

pub fn choi_trace_distance_superop<T: Real>(a: &Superoperator<T>, b: &Superoperator<T>) -> Result<T> {
    if a.dim() != b.dim() {
        return Err(Error::Shape("channels act on different dimensions".into()));
    }
    choi_distance_of_states(&a.choi_state(), &b.choi_state())
}

fn choi_distance_of_states<T: Real>(a: &DensityMatrix<T>, b: &DensityMatrix<T>) -> Result<T> {
    trace_norm_hermitian(&a.matrix().sub(b.matrix())?)
}

/// Stinespring isometry `V|ψ⟩ = Σ_k |k⟩_env ⊗ A_k|ψ⟩` with the environment
/// as the leading factor, padded to a power-of-two dimension.
pub fn stinespring_isometry<T: Real>(c: &KrausChannel<T>) -> Result<DenseOperator<T>> {
    let residual = c.cptp_residual();
    if !(residual <= T::tol(TAU_CPTP)) {
        return Err(Error::NotCptp {
            residual: residual.to_f64_lossy(),
            tol: T::tol(TAU_CPTP).to_f64_lossy(),
        });
    }
    let d = c.dim();
    let env = c.len().next_power_of_two();
    check_dense_dim(env * d)?;
    let mut v = DenseOperator::zeros_rect(env * d, d);
    for (k, a) in c.ops().iter().enumerate() {
        v.set_block(k * d, 0, a);
    }
    Ok(v)
}

/// Unitary on `env ⊗ system` whose action on `|0⟩_env|ψ⟩` is the
/// Stinespring isometry; the remaining columns are a Gram–Schmidt completion.
pub fn stinespring_unitary<T: Real>(c: &KrausChannel<T>) -> Result<DenseOperator<T>> {
    let v = stinespring_isometry(c)?;
    complete_to_unitary(&v)
}

/// Extends an isometry (orthonormal columns) to a square unitary whose first
/// columns are the given ones.
pub fn complete_to_unitary<T: Real>(v: &DenseOperator<T>) -> Result<DenseOperator<T>> {
    let big = v.rows();
    let mut cols: Vec<Vec<Cx<T>>> = (0..v.cols()).map(|c| v.column(c)).collect();
    let floor = T::from_f64_lossy(0.5);
    for e in 0..big {
        if cols.len() == big {
            break;
        }
        let mut cand = vec![Cx::zero(); big];
        cand[e] = Cx::new(T::one(), T::zero());
        for _ in 0..2 {
            for q in &cols {
                let p = inner(q, &cand);
                for (x, y) in cand.iter_mut().zip(q) {
                    *x -= p * y;
                }
            }
        }
        let nrm = crate::linalg::operator::norm(&cand);
        if nrm > floor {
            cols.push(cand.into_iter().map(|z| z / nrm).collect());
        }
    }
    if cols.len() != big {
        return Err(Error::Verification {
            what: "unitary completion".into(),
            residual: (big - cols.len()) as f64,
        });
    }
    let u = DenseOperator::from_fn(big, big, |r, c| cols[c][r]);
    let res = u.unitarity_residual();
    if res > T::tol(1e-9) {
        return Err(Error::NotUnitary(res.to_f64_lossy()));
    }
    Ok(u)
}
