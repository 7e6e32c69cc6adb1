use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::estimation::grover::grover_probabilities;
use crate::estimation::hadamard::{hadamard_test_states, Part};
use crate::limits::check_statevector_qubits;
use crate::linalg::{inner, norm, Operator};
use crate::scalar::Cx;

/// Quantity estimated from `⟨S₁|S₂⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Abs,
    Real,
    Imag,
}

/// Inflation of the Fisher-information target over the normal quantile.
pub const MLAE_SAFETY: f64 = 1.25;
/// Ratio between consecutive frequencies of the schedule.
pub const MLAE_RATIO: f64 = 1.6;
/// Shots per round are `max(16, ⌈8 ln(2/δ)⌉)`.
pub const MLAE_MIN_SHOTS: u64 = 16;
const SHOTS_PER_LOG: f64 = 8.0;
const UNITARY_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct AmplitudeProblem {
    psi1: Vec<Cx<f64>>,
    psi2: Vec<Cx<f64>>,
    pub target: Target,
    pub epsilon: f64,
    pub delta: f64,
}

fn check_accuracy(epsilon: f64, delta: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon {epsilon} must lie in (0, 1)")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("delta {delta} must lie in (0, 1)")));
    }
    Ok(())
}

impl AmplitudeProblem {
    /// Problem for `|S_k⟩ = U_k|0⟩` with dense preparation unitaries.
    pub fn new(u1: &Operator, u2: &Operator, target: Target, epsilon: f64, delta: f64) -> Result<Self> {
        if !u1.is_square() || u1.dim() != u2.dim() {
            return Err(Error::Shape(format!("preparations of dimension {} and {}", u1.rows(), u2.rows())));
        }
        for u in [u1, u2] {
            let r = u.unitarity_residual();
            if !(r <= UNITARY_TOL) {
                return Err(Error::NotUnitary(r));
            }
        }
        Self::from_states(u1.column(0), u2.column(0), target, epsilon, delta)
    }

    /// Problem given the prepared states directly. They stand for the first
    /// columns of preparation unitaries, e.g. completed Stinespring isometries.
    pub fn from_states(
        psi1: Vec<Cx<f64>>,
        psi2: Vec<Cx<f64>>,
        target: Target,
        epsilon: f64,
        delta: f64,
    ) -> Result<Self> {
        if psi1.len() != psi2.len() || !psi1.len().is_power_of_two() || psi1.len() < 2 {
            return Err(Error::Shape(format!("states of length {} and {}", psi1.len(), psi2.len())));
        }
        for psi in [&psi1, &psi2] {
            let r = (norm(psi) - 1.0).abs();
            if !(r <= UNITARY_TOL) {
                return Err(Error::InvalidArgument(format!("state norm deviates from 1 by {r:e}")));
            }
        }
        check_accuracy(epsilon, delta)?;
        let p = AmplitudeProblem {
            psi1,
            psi2,
            target,
            epsilon,
            delta,
        };
        check_statevector_qubits(p.simulated_qubits())?;
        Ok(p)
    }

    pub fn num_qubits(&self) -> usize {
        self.psi1.len().trailing_zeros() as usize
    }

    /// Width of the register actually simulated, including the two
    /// Hadamard-test ancillas for the real and imaginary targets.
    pub fn simulated_qubits(&self) -> usize {
        match self.target {
            Target::Abs => self.num_qubits(),
            Target::Real | Target::Imag => self.num_qubits() + 2,
        }
    }

    pub fn overlap(&self) -> Cx<f64> {
        inner(&self.psi1, &self.psi2)
    }

    /// Exact value of the target quantity.
    pub fn truth(&self) -> f64 {
        let o = self.overlap();
        match self.target {
            Target::Abs => o.norm(),
            Target::Real => o.re,
            Target::Imag => o.im,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    /// Grover power `m`; each shot queries the oracle `2m + 1` times.
    pub power: u64,
    pub shots: u64,
    pub hits: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub estimate: f64,
    pub target: Target,
    pub epsilon: f64,
    pub delta: f64,
    pub schedule: Vec<ScheduleEntry>,
    pub queries: u64,
    pub seed: u64,
}

/// Grover powers and shot counts chosen before any measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct MlaePlan {
    pub rounds: Vec<(u64, u64)>,
    /// Required `Σ N_k (2m_k+1)²`, a quarter of the Fisher information in `θ`.
    pub required_information: f64,
}

impl MlaePlan {
    pub fn queries(&self) -> u64 {
        self.rounds.iter().map(|&(m, n)| n * (2 * m + 1)).sum()
    }
}

pub fn shots_per_round(delta: f64) -> u64 {
    ((SHOTS_PER_LOG * (2.0 / delta).ln()).ceil() as u64).max(MLAE_MIN_SHOTS)
}

/// Odd frequencies `2m+1` of a geometric ladder descending from `top` by
/// `MLAE_RATIO`, always including `1`.
fn frequency_ladder(top: f64) -> Vec<u64> {
    let odd = |w: f64| 2 * ((w - 1.0) / 2.0).round().max(0.0) as u64 + 1;
    let mut ws = vec![odd(top)];
    while let Some(&w) = ws.last().filter(|&&w| w > 1) {
        ws.push(odd(w as f64 / MLAE_RATIO).min(w - 2));
    }
    ws.reverse();
    ws
}

/// Geometric schedule of Grover powers with a fixed number of shots per
/// round. The ladder is built downward from a top frequency sized so the
/// Fisher information in `θ = asin a` reaches `(κ z_{δ/2} / ε)²`, then one
/// round is added above it. The ratio is not two: dyadic frequencies share
/// aliases near `θ = π/2^k` in every high round.
pub fn mlae_plan(epsilon: f64, delta: f64) -> Result<MlaePlan> {
    check_accuracy(epsilon, delta)?;
    let z = Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf(1.0 - delta / 2.0);
    let need = (MLAE_SAFETY * z / epsilon).powi(2) / 4.0;
    let n = shots_per_round(delta);
    let r2 = MLAE_RATIO * MLAE_RATIO;
    let mut top = (need / n as f64 * (r2 - 1.0) / r2).sqrt().max(1.0);
    let mut ladder = loop {
        let ws = frequency_ladder(top);
        let info: f64 = ws.iter().map(|&w| (w * w) as f64).sum::<f64>() * n as f64;
        if info >= need {
            break ws;
        }
        top *= 1.01;
    };
    // One more round above the ladder. The rounds below it already meet the
    // target, so a top round sitting near p = 0 or 1 cannot drag the
    // estimate onto one of its nearby aliases.
    let last = *ladder.last().expect("ladder contains 1");
    ladder.push((2 * ((last as f64 * MLAE_RATIO - 1.0) / 2.0).round() as u64 + 1).max(last + 2));
    Ok(MlaePlan {
        rounds: ladder.into_iter().map(|w| ((w - 1) / 2, n)).collect(),
        required_information: need,
    })
}

fn log_likelihood(schedule: &[ScheduleEntry], theta: f64) -> f64 {
    const FLOOR: f64 = 1e-300;
    schedule
        .iter()
        .map(|e| {
            let s = ((2 * e.power + 1) as f64 * theta).sin().powi(2);
            let h = e.hits as f64;
            let miss = (e.shots - e.hits) as f64;
            let mut l = 0.0;
            if e.hits > 0 {
                l += h * s.max(FLOOR).ln();
            }
            if miss > 0.0 {
                l += miss * (1.0 - s).max(FLOOR).ln();
            }
            l
        })
        .sum()
}

/// Maximum-likelihood angle in `[0, π/2]`: dense grid, then golden-section
/// refinement around the best grid point.
pub fn max_likelihood_angle(schedule: &[ScheduleEntry]) -> f64 {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let top = schedule.iter().map(|e| 2 * e.power + 1).max().unwrap_or(1);
    let g = (64 * top as usize).max(2048);
    let step = half_pi / g as f64;
    let best = (0..=g)
        .map(|i| (i, log_likelihood(schedule, i as f64 * step)))
        .fold((0usize, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
        .0;
    let mut lo = (best as f64 - 1.0).max(0.0) * step;
    let mut hi = (best as f64 + 1.0).min(g as f64) * step;
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (log_likelihood(schedule, x1), log_likelihood(schedule, x2));
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = log_likelihood(schedule, x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = log_likelihood(schedule, x1);
        }
    }
    let mid = 0.5 * (lo + hi);
    // the endpoints can win when the truth sits on the boundary
    [(mid, log_likelihood(schedule, mid)), (0.0, log_likelihood(schedule, 0.0)), (half_pi, log_likelihood(schedule, half_pi))]
        .into_iter()
        .fold((mid, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
        .0
}

/// Estimates `|⟨ψ₁|ψ₂⟩|` to additive `epsilon` with confidence `1 − delta`.
/// Returns the estimate and the executed schedule.
pub fn mlae_amplitude(
    psi1: &[Cx<f64>],
    psi2: &[Cx<f64>],
    epsilon: f64,
    delta: f64,
    seed: u64,
) -> Result<(f64, Vec<ScheduleEntry>)> {
    let plan = mlae_plan(epsilon, delta)?;
    let powers: Vec<u64> = plan.rounds.iter().map(|r| r.0).collect();
    let probs = grover_probabilities(psi1, psi2, &powers);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let schedule: Vec<ScheduleEntry> = plan
        .rounds
        .iter()
        .zip(&probs)
        .map(|(&(power, shots), &p)| {
            let hits = Binomial::new(shots, p).expect("probability in [0, 1]").sample(&mut rng);
            ScheduleEntry { power, shots, hits }
        })
        .collect();
    Ok((max_likelihood_angle(&schedule).sin(), schedule))
}

pub fn mlae_estimate(problem: &AmplitudeProblem, seed: u64) -> Result<EstimateReport> {
    let (estimate, schedule) = match problem.target {
        Target::Abs => mlae_amplitude(&problem.psi1, &problem.psi2, problem.epsilon, problem.delta, seed)?,
        Target::Real | Target::Imag => {
            let part = if problem.target == Target::Real { Part::Real } else { Part::Imag };
            let (p1, p2) = hadamard_test_states(&problem.psi1, &problem.psi2, part)?;
            // estimate = 2a − 1 doubles the amplitude error
            let (a, s) = mlae_amplitude(&p1, &p2, problem.epsilon / 2.0, problem.delta, seed)?;
            (2.0 * a - 1.0, s)
        }
    };
    let queries = schedule.iter().map(|e| e.shots * (2 * e.power + 1)).sum();
    Ok(EstimateReport {
        estimate,
        target: problem.target,
        epsilon: problem.epsilon,
        delta: problem.delta,
        schedule,
        queries,
        seed,
    })
}
