use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cbe::pqc::ub_tensor;
use crate::error::{Error, Result};
use crate::limits::{check_dense_dim, Limits};
use crate::linalg::{superop_of_map, DenseOperator, DensityMatrix, KrausChannel, MatrixJson, TAU_CPTP};
use crate::scalar::{Cx, Real};

/// One Kraus operator `diag(K, L)` of a block-diagonal channel.
#[derive(Clone, Debug, PartialEq)]
pub struct CbePair<T: Real> {
    pub k: DenseOperator<T>,
    pub l: DenseOperator<T>,
}

impl<T: Real> CbePair<T> {
    pub fn new(k: DenseOperator<T>, l: DenseOperator<T>) -> Self {
        CbePair { k, l }
    }
}

/// A block-diagonal channel `Σ diag(K_i, L_i) · diag(K_i, L_i)†` claimed to
/// be an `η`-CBE of `encoded_op` in the Pauli encoding.
#[derive(Clone, Debug, PartialEq)]
pub struct CbeChannel<T: Real> {
    n: usize,
    pairs: Vec<CbePair<T>>,
    eta: T,
    encoded_op: DenseOperator<T>,
}

/// Outcome of [`verify_cbe`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CbeVerification {
    pub cptp_residual_k: f64,
    pub cptp_residual_l: f64,
    /// Max-entry deviation of the projected transfer matrix from `ηQ`.
    pub residual: f64,
    /// Deviation of `P(M²)` from `P(M)²` for `M = Σ K⊗L*`; `None` above
    /// four encoded qubits.
    pub strong_residual: Option<f64>,
    pub is_cbe: bool,
    pub is_strong: bool,
}

impl CbeVerification {
    pub fn passed(&self) -> bool {
        self.is_cbe && self.is_strong
    }
}

fn cptp_residual<T: Real>(ops: impl Iterator<Item = DenseOperator<T>>, d: usize) -> T {
    let mut acc = DenseOperator::zeros(d);
    for a in ops {
        acc.add_scaled(Cx::new(T::one(), T::zero()), &a.adjoint().mm(&a));
    }
    acc.sub(&DenseOperator::identity(d)).map(|m| m.max_abs()).unwrap_or(T::infinity())
}

impl<T: Real> CbeChannel<T> {
    /// Checks shapes and that both `{K_i}` and `{L_i}` are trace preserving.
    pub fn new(pairs: Vec<CbePair<T>>, eta: T, encoded_op: DenseOperator<T>) -> Result<Self> {
        let c = Self::new_unchecked(pairs, eta, encoded_op)?;
        let (rk, rl) = c.cptp_residuals();
        let worst = rk.max(rl);
        if !(worst <= T::tol(TAU_CPTP)) {
            return Err(Error::NotCptp {
                residual: worst.to_f64_lossy(),
                tol: T::tol(TAU_CPTP).to_f64_lossy(),
            });
        }
        Ok(c)
    }

    /// Checks shapes only, so corrupted sets can be built and rejected by
    /// [`verify_cbe`].
    pub fn new_unchecked(pairs: Vec<CbePair<T>>, eta: T, encoded_op: DenseOperator<T>) -> Result<Self> {
        let n = encoded_op
            .num_qubits()
            .ok_or_else(|| Error::Shape("encoded operator must be 2^n × 2^n".into()))?;
        if pairs.is_empty() {
            return Err(Error::Empty("Kraus pair list"));
        }
        let d = 1 << n;
        if pairs.iter().any(|p| p.k.rows() != d || p.l.rows() != d || !p.k.is_square() || !p.l.is_square()) {
            return Err(Error::Shape(format!("Kraus blocks must be {d}×{d}")));
        }
        if !(eta > T::zero()) || !eta.is_finite() {
            return Err(Error::InvalidArgument(format!("eta {eta} must be positive")));
        }
        let cap = Limits::current().max_kraus;
        if pairs.len() > cap {
            return Err(Error::EnumerationCap {
                count: pairs.len() as f64,
                cap,
            });
        }
        Ok(CbeChannel { n, pairs, eta, encoded_op })
    }

    /// The trivial CBE `{(I, I)}` of the identity.
    pub fn identity(n: usize) -> Self {
        let id = DenseOperator::identity(1 << n);
        CbeChannel {
            n,
            pairs: vec![CbePair::new(id.clone(), id.clone())],
            eta: T::one(),
            encoded_op: id,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> &[CbePair<T>] {
        &self.pairs
    }

    pub fn eta(&self) -> T {
        self.eta
    }

    pub fn encoded_op(&self) -> &DenseOperator<T> {
        &self.encoded_op
    }

    pub fn cptp_residuals(&self) -> (T, T) {
        let d = 1 << self.n;
        (
            cptp_residual(self.pairs.iter().map(|p| p.k.clone()), d),
            cptp_residual(self.pairs.iter().map(|p| p.l.clone()), d),
        )
    }

    /// `M = Σ K_i ⊗ conj(L_i)` on `2n` qubits.
    pub fn mixture(&self) -> Result<DenseOperator<T>> {
        let ks: Vec<_> = self.pairs.iter().map(|p| p.k.clone()).collect();
        let ls: Vec<_> = self.pairs.iter().map(|p| p.l.clone()).collect();
        superop_of_map(&ks, &ls)
    }

    /// `(⟨0|^{⊗n}⊗I) U_B^{⊗n} M U_B^{†⊗n} (|0⟩^{⊗n}⊗I)` in closed form:
    /// entry `(a, b)` is `2^{-n} Σ_i Σ_{r,s} K_i[r][s] conj(L_i[a⊕r][b⊕s])`.
    pub fn transfer_matrix(&self) -> DenseOperator<T> {
        let d = 1usize << self.n;
        let scale = T::one() / T::from_usize(d).expect("dim");
        let rows: Vec<Vec<Cx<T>>> = (0..d)
            .into_par_iter()
            .map(|a| {
                let mut row = vec![Cx::new(T::zero(), T::zero()); d];
                for p in &self.pairs {
                    for r in 0..d {
                        for s in 0..d {
                            let k = p.k[(r, s)];
                            if k.norm_sqr() == T::zero() {
                                continue;
                            }
                            let lrow = p.l.row(a ^ r);
                            for (b, out) in row.iter_mut().enumerate() {
                                *out += k * lrow[b ^ s].conj();
                            }
                        }
                    }
                }
                row.into_iter().map(|z| z * scale).collect()
            })
            .collect();
        DenseOperator::from_rows(rows).expect("square")
    }

    /// Same as [`CbeChannel::transfer_matrix`] but through explicit
    /// `U_B^{⊗n}` and `M` matrices.
    pub fn transfer_matrix_dense(&self) -> Result<DenseOperator<T>> {
        project_dense(&self.mixture()?, self.n)
    }

    /// The `(n+1)`-qubit channel with Kraus operators `diag(K_i, L_i)`;
    /// the block index is the leading qubit.
    pub fn block_channel(&self) -> Result<KrausChannel<T>> {
        KrausChannel::new(
            self.pairs
                .iter()
                .map(|p| DenseOperator::block_diag(&p.k, &p.l))
                .collect(),
        )
    }

    pub fn apply(&self, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
        self.block_channel()?.apply(rho)
    }

    pub fn to_dump(&self) -> CbeDump {
        CbeDump {
            n: self.n,
            eta: self.eta.to_f64_lossy(),
            pairs: self
                .pairs
                .iter()
                .map(|p| PairJson {
                    k: MatrixJson::from_operator(&p.k),
                    l: MatrixJson::from_operator(&p.l),
                })
                .collect(),
        }
    }

    /// Rebuilds a channel from its dump; `Q` is recovered as the transfer
    /// matrix over `η`.
    pub fn from_dump(dump: &CbeDump) -> Result<Self> {
        let pairs = dump
            .pairs
            .iter()
            .map(|p| Ok(CbePair::new(p.k.to_operator()?, p.l.to_operator()?)))
            .collect::<Result<Vec<_>>>()?;
        let d = pairs.first().map(|p: &CbePair<T>| p.k.rows()).ok_or(Error::Empty("Kraus pair list"))?;
        if d != 1 << dump.n {
            return Err(Error::Shape(format!("blocks of size {d} for n = {}", dump.n)));
        }
        let eta = T::from_f64_lossy(dump.eta);
        let probe = Self::new_unchecked(pairs, eta, DenseOperator::identity(d))?;
        let q = probe.transfer_matrix().scale_real(T::one() / eta);
        Self::new(probe.pairs, eta, q)
    }
}

fn project_dense<T: Real>(m: &DenseOperator<T>, n: usize) -> Result<DenseOperator<T>> {
    let d = 1usize << n;
    check_dense_dim(d * d)?;
    let top = ub_tensor::<T>(n)?.block(0, 0, d, d * d);
    Ok(top.mm(m).mm(&top.adjoint()))
}

/// Dense check of the CBE equation and of the strong (associative) form.
pub fn verify_cbe<T: Real>(c: &CbeChannel<T>) -> CbeVerification {
    let (rk, rl) = c.cptp_residuals();
    let want = c.encoded_op.scale_real(c.eta);
    let dense_ok = c.n <= 4;
    let mixture = if dense_ok { c.mixture().ok() } else { None };
    let transfer = match &mixture {
        Some(m) => project_dense(m, c.n).unwrap_or_else(|_| c.transfer_matrix()),
        None => c.transfer_matrix(),
    };
    let residual = transfer.max_abs_diff(&want);
    let strong_residual = mixture.as_ref().and_then(|m| {
        let lhs = project_dense(&m.mm(m), c.n).ok()?;
        Some(lhs.max_abs_diff(&transfer.mm(&transfer)).to_f64_lossy())
    });
    let tol = T::tol(1e-10);
    let cptp_tol = T::tol(TAU_CPTP);
    let is_cbe = rk <= cptp_tol && rl <= cptp_tol && residual <= tol;
    CbeVerification {
        cptp_residual_k: rk.to_f64_lossy(),
        cptp_residual_l: rl.to_f64_lossy(),
        residual: residual.to_f64_lossy(),
        strong_residual,
        is_cbe,
        is_strong: is_cbe && strong_residual.is_some_and(|r| r <= tol.to_f64_lossy()),
    }
}

/// Pairwise products without any verification.
pub(crate) fn compose_pairs<T: Real>(c2: &CbeChannel<T>, c1: &CbeChannel<T>) -> Result<CbeChannel<T>> {
    if c2.n != c1.n {
        return Err(Error::QubitMismatch { left: c2.n, right: c1.n });
    }
    let count = c2.pairs.len() * c1.pairs.len();
    let cap = Limits::current().max_kraus;
    if count > cap {
        return Err(Error::EnumerationCap { count: count as f64, cap });
    }
    let mut pairs = Vec::with_capacity(count);
    for p2 in &c2.pairs {
        for p1 in &c1.pairs {
            pairs.push(CbePair::new(p2.k.mm(&p1.k), p2.l.mm(&p1.l)));
        }
    }
    Ok(CbeChannel {
        n: c1.n,
        pairs,
        eta: c2.eta * c1.eta,
        encoded_op: c2.encoded_op.mm(&c1.encoded_op),
    })
}

/// `C₂ ∘ C₁` as an `η₁η₂`-CBE of `Q₂Q₁`. Both inputs must pass the strong
/// check, and the result is verified before it is returned.
pub fn compose_cbe<T: Real>(c2: &CbeChannel<T>, c1: &CbeChannel<T>) -> Result<CbeChannel<T>> {
    for (name, c) in [("second", c2), ("first", c1)] {
        let v = verify_cbe(c);
        if !v.passed() {
            return Err(Error::Verification {
                what: format!("strong-CBE precondition on the {name} channel"),
                residual: v.strong_residual.unwrap_or(f64::INFINITY).max(v.residual),
            });
        }
    }
    let out = compose_pairs(c2, c1)?;
    let v = verify_cbe(&out);
    if !v.is_cbe {
        return Err(Error::Verification {
            what: "composed CBE".into(),
            residual: v.residual,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairJson {
    #[serde(rename = "K")]
    pub k: MatrixJson,
    #[serde(rename = "L")]
    pub l: MatrixJson,
}

/// `{"n", "eta", "pairs": [{"K", "L"}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CbeDump {
    pub n: usize,
    pub eta: f64,
    pub pairs: Vec<PairJson>,
}
