use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lindblad::spec::DissipativeLindbladSpec;
use crate::lindblad::taylor::TruncationPlan;
use crate::linalg::{norm, DenseOperator};
use crate::pauli::{product_tree, BlockDiagPauli, TreeStats};
use crate::scalar::{Cx, Real};

/// How a sampled jump sequence is applied to the state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TrajectoryPath {
    /// Sequential dense matrix-vector products.
    Dense,
    /// One block-diagonal Pauli obtained by tree reduction of the sequence.
    Pauli,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T: Real> {
    pub seed: u64,
    pub shot: u64,
    pub k: usize,
    /// Jump indices in application order.
    pub sequence: Vec<usize>,
    pub state: Vec<Cx<T>>,
    /// Reduction statistics on the Pauli path.
    pub tree: Option<TreeStats>,
}

/// Deterministic per-shot generator: one ChaCha stream per shot index.
fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

fn inverse_cdf(weights: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    // Round-off can leave the total a hair below one; take the last
    // index with nonzero weight.
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// Draws `k` from the renormalised truncated Poisson weights and then `k`
/// jump indices from `p`.
pub fn sample_sequence(plan: &TruncationPlan, probs: &[f64], rng: &mut impl Rng) -> Vec<usize> {
    let k = inverse_cdf(&plan.weights, rng.gen::<f64>());
    (0..k).map(|_| inverse_cdf(probs, rng.gen::<f64>())).collect()
}

/// Product `F_{s_k}···F_{s_1}` of a jump sequence by pairwise tree
/// reduction; the empty sequence gives the identity.
pub fn fast_forward_apply<T: Real>(
    spec: &DissipativeLindbladSpec<T>,
    sequence: &[usize],
) -> Result<(BlockDiagPauli, TreeStats)> {
    let jumps = spec
        .pauli_jumps()
        .ok_or_else(|| Error::InvalidArgument("fast forwarding needs block-diagonal Pauli jumps".into()))?;
    if let Some(&bad) = sequence.iter().find(|&&i| i >= jumps.len()) {
        return Err(Error::IndexOutOfRange { index: bad, size: jumps.len() });
    }
    if sequence.is_empty() {
        let r = jumps[0].num_blocks();
        return Ok((
            BlockDiagPauli::identity(r, jumps[0].num_qubits()),
            TreeStats {
                depth: 0,
                multiplies: 0,
                level_sizes: vec![1],
            },
        ));
    }
    let ordered: Vec<BlockDiagPauli> = sequence.iter().rev().map(|&i| jumps[i].clone()).collect();
    product_tree(&ordered)
}

fn check_state<T: Real>(spec: &DissipativeLindbladSpec<T>, psi0: &[Cx<T>]) -> Result<()> {
    if psi0.len() != spec.dim() {
        return Err(Error::Shape(format!("state of length {} for {} qubits", psi0.len(), spec.num_qubits())));
    }
    let nrm = norm(psi0);
    if (nrm - T::one()).abs() > T::tol(1e-10) {
        return Err(Error::InvalidArgument(format!("input state has norm {nrm}")));
    }
    Ok(())
}

struct Prepared<T: Real> {
    plan: TruncationPlan,
    probs: Vec<f64>,
    dense: Option<Vec<DenseOperator<T>>>,
}

fn prepare<T: Real>(
    spec: &DissipativeLindbladSpec<T>,
    psi0: &[Cx<T>],
    t: f64,
    epsilon: f64,
    path: TrajectoryPath,
) -> Result<Prepared<T>> {
    check_state(spec, psi0)?;
    let plan = TruncationPlan::for_spec(spec, t, epsilon)?;
    let probs = spec.probabilities().iter().map(|p| p.to_f64_lossy()).collect();
    let dense = match path {
        TrajectoryPath::Dense => Some(spec.dense_jumps()?),
        TrajectoryPath::Pauli => {
            if !spec.is_pauli() {
                return Err(Error::InvalidArgument("Pauli path needs block-diagonal Pauli jumps".into()));
            }
            None
        }
    };
    Ok(Prepared { plan, probs, dense })
}

fn run_shot<T: Real>(
    spec: &DissipativeLindbladSpec<T>,
    prep: &Prepared<T>,
    psi0: &[Cx<T>],
    seed: u64,
    shot: u64,
) -> Result<Trajectory<T>> {
    let mut rng = shot_rng(seed, shot);
    let sequence = sample_sequence(&prep.plan, &prep.probs, &mut rng);
    let (state, tree) = match &prep.dense {
        Some(mats) => {
            let mut psi = psi0.to_vec();
            for &i in &sequence {
                psi = mats[i].apply(&psi)?;
            }
            (psi, None)
        }
        None => {
            let (f, stats) = fast_forward_apply(spec, &sequence)?;
            (f.apply(psi0)?, Some(stats))
        }
    };
    Ok(Trajectory {
        seed,
        shot,
        k: sequence.len(),
        sequence,
        state,
        tree,
    })
}

/// One Monte-Carlo realisation of the truncated channel on a pure input.
pub fn sample_trajectory<T: Real>(
    spec: &DissipativeLindbladSpec<T>,
    psi0: &[Cx<T>],
    t: f64,
    epsilon: f64,
    seed: u64,
    path: TrajectoryPath,
) -> Result<Trajectory<T>> {
    let prep = prepare(spec, psi0, t, epsilon, path)?;
    run_shot(spec, &prep, psi0, seed, 0)
}

/// `shots` independent trajectories, shot `s` drawn from stream `s` of the
/// master seed, so results do not depend on the worker count.
pub fn sample_trajectories<T: Real>(
    spec: &DissipativeLindbladSpec<T>,
    psi0: &[Cx<T>],
    t: f64,
    epsilon: f64,
    seed: u64,
    shots: u64,
    path: TrajectoryPath,
) -> Result<Vec<Trajectory<T>>> {
    let prep = prepare(spec, psi0, t, epsilon, path)?;
    (0..shots)
        .into_par_iter()
        .map(|s| run_shot(spec, &prep, psi0, seed, s))
        .collect()
}

/// Empirical density matrix `mean |ψ⟩⟨ψ|`.
pub fn average_density<T: Real>(trajectories: &[Trajectory<T>]) -> Result<DenseOperator<T>> {
    let first = trajectories.first().ok_or(Error::Empty("trajectory list"))?;
    let d = first.state.len();
    let w = T::one() / T::from_usize(trajectories.len()).expect("count");
    let sum = trajectories
        .par_iter()
        .fold(
            || DenseOperator::zeros(d),
            |mut acc, tr| {
                acc.add_scaled(Cx::new(w, T::zero()), &DenseOperator::outer(&tr.state, &tr.state));
                acc
            },
        )
        .reduce(|| DenseOperator::zeros(d), |a, b| a.add(&b).expect("same shape"));
    Ok(sum)
}
