use crate::error::{Error, Result};
use crate::limits::check_dense_dim;
use crate::linalg::{expm, DenseOperator, DensityMatrix, Superoperator};
use crate::linalg::superop_of_map;
use crate::pauli::BlockDiagPauli;
use crate::scalar::{Cx, Real};

/// A unitary jump operator, either as an explicit matrix or in
/// block-diagonal Pauli form.
#[derive(Clone, Debug, PartialEq)]
pub enum JumpOperator<T: Real> {
    Dense(DenseOperator<T>),
    Pauli(BlockDiagPauli),
}

impl<T: Real> JumpOperator<T> {
    pub fn to_dense(&self) -> Result<DenseOperator<T>> {
        match self {
            JumpOperator::Dense(m) => Ok(m.clone()),
            JumpOperator::Pauli(p) => p.to_dense(),
        }
    }

    pub fn as_pauli(&self) -> Option<&BlockDiagPauli> {
        match self {
            JumpOperator::Pauli(p) => Some(p),
            JumpOperator::Dense(_) => None,
        }
    }

    /// `F|ψ⟩` without forming a dense matrix in the Pauli case.
    pub fn apply(&self, psi: &[Cx<T>]) -> Result<Vec<Cx<T>>> {
        match self {
            JumpOperator::Dense(m) => m.apply(psi),
            JumpOperator::Pauli(p) => p.apply(psi),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Jump<T: Real> {
    pub rate: T,
    pub op: JumpOperator<T>,
}

/// `L_d[ρ] = Σ g_i (F_i ρ F_i† − ρ)` with unitary `F_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct DissipativeLindbladSpec<T: Real> {
    num_qubits: usize,
    jumps: Vec<Jump<T>>,
}

impl<T: Real> DissipativeLindbladSpec<T> {
    /// `num_qubits` is the full system width; for Pauli jumps it equals
    /// `log2(R)` plus the per-block width.
    pub fn new(num_qubits: usize, jumps: Vec<Jump<T>>) -> Result<Self> {
        if jumps.is_empty() {
            return Err(Error::Empty("jump list"));
        }
        let mut total = T::zero();
        for (i, j) in jumps.iter().enumerate() {
            if !j.rate.is_finite() || j.rate < T::zero() {
                return Err(Error::InvalidArgument(format!("jump {i}: rate {} is not a finite nonnegative number", j.rate)));
            }
            total += j.rate;
            match &j.op {
                JumpOperator::Dense(m) => {
                    if m.num_qubits() != Some(num_qubits) {
                        return Err(Error::Shape(format!(
                            "jump {i}: {}×{} matrix on {num_qubits} qubits",
                            m.rows(),
                            m.cols()
                        )));
                    }
                    let res = m.unitarity_residual();
                    if res > T::tol(1e-10) {
                        return Err(Error::NotUnitary(res.to_f64_lossy()));
                    }
                }
                JumpOperator::Pauli(p) => {
                    if p.total_qubits() != Some(num_qubits) {
                        return Err(Error::Shape(format!(
                            "jump {i}: {} blocks of {} qubits do not span {num_qubits} qubits",
                            p.num_blocks(),
                            p.num_qubits()
                        )));
                    }
                }
            }
        }
        if !(total > T::zero()) {
            return Err(Error::InvalidArgument("rates must not all vanish".into()));
        }
        let pauli: Vec<&BlockDiagPauli> = jumps.iter().filter_map(|j| j.op.as_pauli()).collect();
        if let Some(first) = pauli.first() {
            if pauli.iter().any(|p| p.num_blocks() != first.num_blocks()) {
                return Err(Error::Shape("Pauli jumps disagree on the block count".into()));
            }
        }
        Ok(DissipativeLindbladSpec { num_qubits, jumps })
    }

    pub fn dense(num_qubits: usize, jumps: Vec<(T, DenseOperator<T>)>) -> Result<Self> {
        Self::new(
            num_qubits,
            jumps
                .into_iter()
                .map(|(rate, m)| Jump {
                    rate,
                    op: JumpOperator::Dense(m),
                })
                .collect(),
        )
    }

    /// All jumps in Pauli form; the system width is derived from them.
    pub fn pauli(jumps: Vec<(T, BlockDiagPauli)>) -> Result<Self> {
        let first = jumps.first().ok_or(Error::Empty("jump list"))?;
        let n = first
            .1
            .total_qubits()
            .ok_or_else(|| Error::Shape("block count must be a power of two".into()))?;
        Self::new(
            n,
            jumps
                .into_iter()
                .map(|(rate, p)| Jump {
                    rate,
                    op: JumpOperator::Pauli(p),
                })
                .collect(),
        )
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn jumps(&self) -> &[Jump<T>] {
        &self.jumps
    }

    /// `M`.
    pub fn num_jumps(&self) -> usize {
        self.jumps.len()
    }

    /// `‖L_d‖_L = Σ g_i`.
    pub fn lindblad_norm(&self) -> T {
        self.jumps.iter().fold(T::zero(), |acc, j| acc + j.rate)
    }

    /// `p_i = g_i / Σ g_j`.
    pub fn probabilities(&self) -> Vec<T> {
        let norm = self.lindblad_norm();
        self.jumps.iter().map(|j| j.rate / norm).collect()
    }

    /// Dimensionless time `T = ‖L_d‖_L t` in double precision.
    pub fn dimensionless_time(&self, t: f64) -> f64 {
        self.lindblad_norm().to_f64_lossy() * t
    }

    pub fn is_pauli(&self) -> bool {
        self.jumps.iter().all(|j| j.op.as_pauli().is_some())
    }

    /// Jumps in Pauli form, when every jump has one.
    pub fn pauli_jumps(&self) -> Option<Vec<&BlockDiagPauli>> {
        self.jumps.iter().map(|j| j.op.as_pauli()).collect()
    }

    /// `R`, for Pauli-form specs.
    pub fn num_blocks(&self) -> Option<usize> {
        self.pauli_jumps().map(|p| p[0].num_blocks())
    }

    pub fn dense_jumps(&self) -> Result<Vec<DenseOperator<T>>> {
        check_dense_dim(self.dim())?;
        self.jumps.iter().map(|j| j.op.to_dense()).collect()
    }

    /// Vectorised jump mixture `Σ p_i F_i ⊗ conj(F_i)`.
    pub fn jump_mixture_superop(&self) -> Result<DenseOperator<T>> {
        check_dense_dim(self.dim() * self.dim())?;
        let dense = self.dense_jumps()?;
        let scaled: Vec<DenseOperator<T>> = dense
            .iter()
            .zip(self.probabilities())
            .map(|(f, p)| f.scale_real(p))
            .collect();
        superop_of_map(&scaled, &dense)
    }
}

/// `Σ g_i (F_i ⊗ conj(F_i)) − (Σ g_i) I` on the vectorised space.
pub fn liouvillian_matrix<T: Real>(spec: &DissipativeLindbladSpec<T>) -> Result<DenseOperator<T>> {
    let d2 = spec.dim() * spec.dim();
    check_dense_dim(d2)?;
    let norm = spec.lindblad_norm();
    let mut l = spec.jump_mixture_superop()?.scale_real(norm);
    for i in 0..d2 {
        l[(i, i)] -= Cx::new(norm, T::zero());
    }
    Ok(l)
}

/// `exp(L_d t)` as a superoperator.
pub fn exact_channel<T: Real>(spec: &DissipativeLindbladSpec<T>, t: f64) -> Result<Superoperator<T>> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time {t} must be finite and nonnegative")));
    }
    let l = liouvillian_matrix(spec)?;
    Superoperator::from_matrix(expm(&l.scale_real(T::from_f64_lossy(t)))?)
}

pub fn exact_evolution<T: Real>(
    spec: &DissipativeLindbladSpec<T>,
    rho0: &DensityMatrix<T>,
    t: f64,
) -> Result<DensityMatrix<T>> {
    if rho0.dim() != spec.dim() {
        return Err(Error::Shape(format!("state of dimension {} for a {}-qubit spec", rho0.dim(), spec.num_qubits())));
    }
    exact_channel(spec, t)?.apply(rho0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    type Op = DenseOperator<f64>;

    fn x() -> Op {
        Op::from_real(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    fn z() -> Op {
        Op::diag(&[cx(1.0, 0.0), cx(-1.0, 0.0)])
    }

    #[test]
    fn identity_jump_is_stationary() {
        let spec = DissipativeLindbladSpec::dense(1, vec![(1.0, Op::identity(2))]).unwrap();
        assert!(liouvillian_matrix(&spec).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn x_jump_generator() {
        let spec = DissipativeLindbladSpec::dense(1, vec![(1.0, x())]).unwrap();
        let want = x().kron(&x()).sub(&Op::identity(4)).unwrap();
        assert_eq!(liouvillian_matrix(&spec).unwrap(), want);
    }

    #[test]
    fn dephasing_decay() {
        let spec = DissipativeLindbladSpec::dense(1, vec![(1.0, z())]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let rho = DensityMatrix::from_pure(&[cx(h, 0.0), cx(h, 0.0)]);
        assert_eq!(exact_evolution(&spec, &rho, 0.0).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-15, true);
        let out = exact_evolution(&spec, &rho, 0.7).unwrap();
        assert!((out.matrix()[(0, 1)].re - 0.5 * (-1.4f64).exp()).abs() < 1e-13);
        assert!((out.matrix()[(0, 0)].re - 0.5).abs() < 1e-13);
    }

    #[test]
    fn validation() {
        assert!(DissipativeLindbladSpec::dense(1, vec![(-1.0, x())]).is_err());
        assert!(DissipativeLindbladSpec::dense(1, vec![(0.0, x())]).is_err());
        assert!(DissipativeLindbladSpec::dense(2, vec![(1.0, x())]).is_err());
        assert!(DissipativeLindbladSpec::dense(1, vec![(1.0, x().scale_real(2.0))]).is_err());
        let a = BlockDiagPauli::parse(&["X", "Z"]).unwrap();
        let b = BlockDiagPauli::parse(&["XX"]).unwrap();
        let spec = DissipativeLindbladSpec::<f64>::pauli(vec![(1.0, a.clone())]).unwrap();
        assert_eq!(spec.num_qubits(), 2);
        assert_eq!(spec.num_blocks(), Some(2));
        assert!(DissipativeLindbladSpec::<f64>::pauli(vec![(1.0, a), (1.0, b)]).is_err());
    }
}
