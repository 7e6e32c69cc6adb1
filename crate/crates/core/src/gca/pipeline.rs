use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::problem::GcaProblem;
use crate::cbe::{adjoint_gates, circuit_unitary, hamiltonian_jump_construction, ub_tensor, CbeCircuit};
use crate::error::{Error, Result};
use crate::estimation::{mlae_estimate, shot_estimate_with, AmplitudeProblem, EstimateReport, Target};
use crate::limits::check_dense_dim;
use crate::lindblad::{apply_taylor_channel, TruncationPlan};
use crate::linalg::{expm, hermitian_eigen, Operator};
use crate::pauli::{ceil_log2, BlockDiagPauli, PauliString};
use crate::resources::{theorem3_cost, CostReport};
use crate::scalar::{cx, Cx};
use crate::{Density, LindbladSpec};

/// Widest system the dense oracle accepts.
pub const ORACLE_MAX_QUBITS: usize = 8;
/// Widest system the density-matrix pipeline accepts.
pub const PIPELINE_MAX_QUBITS: usize = 6;
/// Tolerance of the dense 1-CBE check run inside [`gibbs_lindbladian`].
pub const GIBBS_CHECK_TOL: f64 = 1e-9;
/// Widths up to which [`gibbs_lindbladian`] runs the dense check.
const GIBBS_CHECK_QUBITS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GcaMethod {
    Exact,
    Shots,
    Mlae,
}

/// Order of the three channels. `Forward` is `C_{u1†} ∘ e^{Lβ} ∘ C_{u2}`;
/// `Reversed` swaps the circuit channels and exists as a negative control.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Composition {
    Forward,
    Reversed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GcaEstimate {
    pub re: f64,
    pub im: f64,
    pub method: GcaMethod,
    /// `2^{(n−n_h)/2}`.
    pub amplification_factor: f64,
    /// `Tr((X⊗I)ρ_out)` as measured or computed.
    pub raw_x: f64,
    /// `Tr((Y⊗I)ρ_out)` as measured or computed.
    pub raw_y: f64,
    pub truncation_order: usize,
    /// Set when an amplitude-estimation result lies within `2ϵ` of the
    /// lower edge `−2^{−(n−n_h)/2}` where the modulus would fold the sign.
    pub boundary_flag: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub queries: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub estimates: Vec<EstimateReport>,
    pub resources: CostReport,
}

impl GcaEstimate {
    pub fn value(&self) -> Cx<f64> {
        cx(self.re, self.im)
    }
}

/// Output state of the channel composition and its two expectations.
#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub rho: Density,
    pub plan: TruncationPlan,
    pub raw_x: f64,
    pub raw_y: f64,
}

/// Pauli-form Lindbladian on `n+1` qubits with jumps
/// `F_i = |0⟩⟨0|⊗P_{0,i} + |1⟩⟨1|⊗P_{1,i}` at rates `λ_i`, built from
/// `Q'_i = H^{⊗n}Q_iH^{⊗n}`. Evolving for time `β` is a 1-CBE of
/// `e^{−β(H'+I)}`; that is checked densely for `n ≤ 3`.
pub fn gibbs_lindbladian(problem: &GcaProblem) -> Result<LindbladSpec> {
    let jumps = jump_pairs(problem)?
        .into_iter()
        .map(|(l, p0, p1)| Ok((l, BlockDiagPauli::new(vec![p0, p1])?)))
        .collect::<Result<Vec<_>>>()?;
    let spec = LindbladSpec::pauli(jumps)?;
    if problem.n <= GIBBS_CHECK_QUBITS {
        let residual = gibbs_cbe_residual(problem, problem.beta)?;
        if !(residual <= GIBBS_CHECK_TOL) {
            return Err(Error::Verification {
                what: "Gibbs Lindbladian 1-CBE".into(),
                residual,
            });
        }
    }
    Ok(spec)
}

fn jump_pairs(problem: &GcaProblem) -> Result<Vec<(f64, PauliString, PauliString)>> {
    problem
        .conjugated_terms()
        .into_iter()
        .map(|(l, q)| {
            let (p0, p1) = hamiltonian_jump_construction(&q)?;
            Ok((l, p0, p1))
        })
        .collect()
}

/// Dense `H = Σ λ_i Q_i`.
pub fn hamiltonian_matrix(terms: &[(f64, PauliString)], n: usize) -> Result<Operator> {
    check_dense_dim(1 << n)?;
    let mut h = Operator::zeros(1 << n);
    for (l, q) in terms {
        h.add_scaled(cx(*l, 0.0), &q.to_dense());
    }
    Ok(h)
}

/// Max-entry deviation of
/// `(⟨0|^{⊗n}⊗I)U_B^{⊗n} exp(β Σλ_i P_{0,i}⊗P_{1,i}^* − β) U_B^{†⊗n}(|0⟩^{⊗n}⊗I)`
/// from `e^{−β(H'+I)}`.
pub fn gibbs_cbe_residual(problem: &GcaProblem, beta: f64) -> Result<f64> {
    let n = problem.n;
    let d = 1usize << n;
    check_dense_dim(d * d)?;
    let mut gen = Operator::identity(d * d).scale(cx(-1.0, 0.0));
    for (l, p0, p1) in jump_pairs(problem)? {
        gen.add_scaled(cx(l, 0.0), &p0.to_dense::<f64>().kron(&p1.to_dense::<f64>().conj()));
    }
    let evolved = expm(&gen.scale(cx(beta, 0.0)))?;
    let w = ub_tensor::<f64>(n)?;
    let block = w.mm(&evolved).mm(&w.adjoint()).block(0, 0, d, d);
    let target = gibbs_operator(&problem.conjugated_terms(), n, beta)?;
    Ok(block.max_abs_diff(&target))
}

/// `e^{−β(H+I)}` for the given terms.
fn gibbs_operator(terms: &[(f64, PauliString)], n: usize, beta: f64) -> Result<Operator> {
    let mut a = hamiltonian_matrix(terms, n)?;
    a.add_scaled(cx(1.0, 0.0), &Operator::identity(1 << n));
    expm(&a.scale(cx(-beta, 0.0)))
}

fn plus_state(n: usize) -> Vec<Cx<f64>> {
    let d = 1usize << n;
    vec![cx(1.0 / (d as f64).sqrt(), 0.0); d]
}

/// `⟨ψ₁|e^{−β(H+I)}|ψ₂⟩` by dense matrix exponentiation.
pub fn exact_gca_oracle(problem: &GcaProblem) -> Result<Cx<f64>> {
    let n = problem.n;
    if n > ORACLE_MAX_QUBITS {
        return Err(Error::Ceiling {
            dim: 1 << n,
            max: 1 << ORACLE_MAX_QUBITS,
        });
    }
    let e = gibbs_operator(&problem.terms, n, problem.beta)?;
    let psi1 = circuit_unitary::<f64>(&problem.u1, n)?.apply(&plus_state(n))?;
    let psi2 = circuit_unitary::<f64>(&problem.u2, n)?.column(0);
    Ok(crate::linalg::inner(&psi1, &e.apply(&psi2)?))
}

/// Truncation plan at time `β` with the simulation budget `½·2^{(n−n_h)/2}ϵ`.
pub fn default_plan(problem: &GcaProblem) -> Result<TruncationPlan> {
    TruncationPlan::new(problem.beta, problem.simulation_epsilon())
}

/// `ρ_out` from `ρ_in = |+⟩⟨+|^{⊗(n+1)}` through the three channels.
pub fn pipeline_output(problem: &GcaProblem, plan: &TruncationPlan, composition: Composition) -> Result<PipelineOutput> {
    let n = problem.n;
    if n > PIPELINE_MAX_QUBITS {
        return Err(Error::Ceiling {
            dim: 2 << n,
            max: 2 << PIPELINE_MAX_QUBITS,
        });
    }
    let spec = gibbs_lindbladian(problem)?;
    let c2 = CbeCircuit::<f64>::compile(&problem.u2, n)?;
    let c1 = CbeCircuit::<f64>::compile(&adjoint_gates(&problem.u1), n)?;
    let rho_in = Density::from_pure(&plus_state(n + 1));
    let (first, last) = match composition {
        Composition::Forward => (&c2, &c1),
        Composition::Reversed => (&c1, &c2),
    };
    let rho = last.apply(&apply_taylor_channel(&spec, plan, &first.apply(&rho_in)?)?)?;
    let (raw_x, raw_y) = block_expectations(&rho);
    Ok(PipelineOutput {
        rho,
        plan: plan.clone(),
        raw_x,
        raw_y,
    })
}

/// `(Tr((X⊗I)ρ), Tr((Y⊗I)ρ)) = (2 Re t, −2 Im t)` with `t` the trace of the
/// upper-right block.
fn block_expectations(rho: &Density) -> (f64, f64) {
    let m = rho.matrix();
    let d = m.dim() / 2;
    let t = (0..d).fold(Cx::<f64>::new(0.0, 0.0), |acc, i| acc + m[(i, d + i)]);
    (2.0 * t.re, -2.0 * t.im)
}

/// `(re, im) = 2^{−(n−n_h)/2}·(Tr_X, −Tr_Y)`.
pub fn gca_from_raw(problem: &GcaProblem, raw_x: f64, raw_y: f64) -> (f64, f64) {
    let a = problem.amplification_factor();
    (raw_x / a, -raw_y / a)
}

fn resources(problem: &GcaProblem) -> Result<CostReport> {
    theorem3_cost(
        problem.beta,
        problem.epsilon,
        problem.delta,
        problem.num_terms(),
        problem.n,
        problem.num_hadamards(),
        problem.depth(),
    )
}

fn estimate(problem: &GcaProblem, method: GcaMethod, out: &PipelineOutput, raw: (f64, f64)) -> Result<GcaEstimate> {
    let (re, im) = gca_from_raw(problem, raw.0, raw.1);
    Ok(GcaEstimate {
        re,
        im,
        method,
        amplification_factor: problem.amplification_factor(),
        raw_x: raw.0,
        raw_y: raw.1,
        truncation_order: out.plan.order,
        boundary_flag: false,
        shots: None,
        queries: None,
        seed: None,
        estimates: Vec::new(),
        resources: resources(problem)?,
    })
}

/// Expectations computed exactly from `ρ_out`.
pub fn run_pipeline_exact(problem: &GcaProblem) -> Result<GcaEstimate> {
    let out = pipeline_output(problem, &default_plan(problem)?, Composition::Forward)?;
    estimate(problem, GcaMethod::Exact, &out, (out.raw_x, out.raw_y))
}

/// Each expectation estimated from `shots` single-shot `±1` outcomes.
pub fn run_pipeline_shots(problem: &GcaProblem, shots: u64, seed: u64) -> Result<GcaEstimate> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let out = pipeline_output(problem, &default_plan(problem)?, Composition::Forward)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = shot_estimate_with(out.raw_x, shots, &mut rng)?;
    let y = shot_estimate_with(out.raw_y, shots, &mut rng)?;
    let mut e = estimate(problem, GcaMethod::Shots, &out, (x, y))?;
    e.shots = Some(shots);
    e.queries = Some(2 * shots);
    e.seed = Some(seed);
    Ok(e)
}

/// Purification `Σ_k √p_k |v_k⟩|k⟩_e` of `ρ` on the support of its
/// spectrum, returned with the environment width.
fn purify(rho: &Density) -> Result<(Vec<Cx<f64>>, usize)> {
    let eig = hermitian_eigen(rho.matrix())?;
    let d = rho.dim();
    let kept: Vec<usize> = (0..d).filter(|&k| eig.values[k] > 1e-14).collect();
    let w = ceil_log2(kept.len());
    let total: f64 = kept.iter().map(|&k| eig.values[k]).sum();
    let mut psi = vec![cx(0.0, 0.0); d << w];
    for (slot, &k) in kept.iter().enumerate() {
        let amp = (eig.values[k] / total).sqrt();
        for i in 0..d {
            psi[(i << w) | slot] = eig.vectors[(i, k)] * amp;
        }
    }
    Ok((psi, w))
}

/// `(|0⟩|ψ⟩, U_P|0⟩|ψ⟩)` where `U_P` block-encodes `P = (I+O)/2` with `O`
/// the Pauli `X` or `Y` on the top qubit, so that `⟨0|⟨ψ|U_P|0⟩|ψ⟩ = ⟨ψ|P|ψ⟩`.
fn projector_states(psi: &[Cx<f64>], y: bool) -> (Vec<Cx<f64>>, Vec<Cx<f64>>) {
    let len = psi.len();
    let top = len / 2;
    let mut p = vec![cx(0.0, 0.0); len];
    for i in 0..len {
        let j = i ^ top;
        let o = if !y {
            psi[j]
        } else if i & top != 0 {
            psi[j] * cx(0.0, 1.0)
        } else {
            psi[j] * cx(0.0, -1.0)
        };
        p[i] = (psi[i] + o) * 0.5;
    }
    let mut s1 = vec![cx(0.0, 0.0); 2 * len];
    s1[..len].copy_from_slice(psi);
    let mut s2 = vec![cx(0.0, 0.0); 2 * len];
    for i in 0..len {
        s2[i] = p[i];
        s2[len + i] = psi[i] - p[i];
    }
    (s1, s2)
}

/// Amplitude accuracy for `a = (1 + Tr)/2` so that `re + i·im` lands within
/// `ϵ/2` of the channel value.
pub fn mlae_amplitude_epsilon(problem: &GcaProblem) -> f64 {
    (problem.epsilon * problem.amplification_factor() / (4.0 * std::f64::consts::SQRT_2)).min(0.25)
}

/// Amplitude estimation on a purification of `ρ_out`, one run for each of
/// `X` and `Y` at confidence `1 − δ/2`.
pub fn run_pipeline_mlae(problem: &GcaProblem, seed: u64) -> Result<GcaEstimate> {
    let out = pipeline_output(problem, &default_plan(problem)?, Composition::Forward)?;
    let (psi, _) = purify(&out.rho)?;
    let eps_a = mlae_amplitude_epsilon(problem);
    let mut reports = Vec::with_capacity(2);
    for (k, y) in [false, true].into_iter().enumerate() {
        let (s1, s2) = projector_states(&psi, y);
        let ap = AmplitudeProblem::from_states(s1, s2, Target::Abs, eps_a, problem.delta / 2.0)?;
        reports.push(mlae_estimate(&ap, seed.wrapping_mul(2).wrapping_add(k as u64))?);
    }
    let amp = problem.amplification_factor();
    let boundary_flag = reports.iter().any(|r| r.estimate <= problem.epsilon * amp);
    let raw = (2.0 * reports[0].estimate - 1.0, 2.0 * reports[1].estimate - 1.0);
    let mut e = estimate(problem, GcaMethod::Mlae, &out, raw)?;
    e.boundary_flag = boundary_flag;
    e.queries = Some(reports.iter().map(|r| r.queries).sum());
    e.seed = Some(seed);
    e.estimates = reports;
    Ok(e)
}

/// Qubits of the simulated amplitude-estimation register for `problem`:
/// projector ancilla, `n+1` pipeline qubits and the purifying environment.
pub fn mlae_register_qubits(problem: &GcaProblem) -> Result<usize> {
    let out = pipeline_output(problem, &default_plan(problem)?, Composition::Forward)?;
    let (psi, _) = purify(&out.rho)?;
    Ok(psi.len().trailing_zeros() as usize + 1)
}
