use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cbe::pqc::hadamard_transform;
use crate::error::{Error, Result};
use crate::linalg::{norm, DenseOperator};
use crate::scalar::{Cx, Real};

pub const ETA_DEFAULT_STARTS: usize = 64;
pub const ETA_DEFAULT_ITERATIONS: u64 = 500;

/// Best ratio found and the state attaining it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EtaEstimate {
    pub value: f64,
    /// Normalised certificate `|S⟩`; `ratio(U, S) == value`.
    pub state: Vec<Cx<f64>>,
    pub starts: usize,
    pub iterations: u64,
}

fn l1(v: &[Cx<f64>]) -> f64 {
    v.iter().map(|z| z.norm()).sum()
}

/// `‖H^{⊗n}|S⟩‖₁ / ‖H^{⊗n}U|S⟩‖₁`, invariant under rescaling `|S⟩`.
pub fn eta_ratio(u: &DenseOperator<f64>, s: &[Cx<f64>]) -> Result<f64> {
    let us = u.apply(s)?;
    let den = l1(&hadamard_transform(&us));
    if den == 0.0 {
        return Err(Error::InvalidArgument("zero state".into()));
    }
    Ok(l1(&hadamard_transform(s)) / den)
}

struct Ratio<'a> {
    u: &'a DenseOperator<f64>,
}

fn unpack(x: &[f64]) -> Vec<Cx<f64>> {
    let d = x.len() / 2;
    (0..d).map(|i| Cx::new(x[i], x[d + i])).collect()
}

impl CostFunction for Ratio<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        let s = unpack(x);
        if norm(&s) < 1e-12 {
            return Ok(f64::MAX);
        }
        Ok(eta_ratio(self.u, &s).unwrap_or(f64::MAX))
    }
}

/// Multi-start Nelder–Mead estimate of `inf_S ‖H^{⊗n}S‖₁/‖H^{⊗n}US‖₁`.
///
/// Starts are the computational and Hadamard basis states followed by
/// seeded random states. Every returned value is attained by its
/// certificate, so it bounds the infimum from above.
pub fn eta_upper_bound_estimate<T: Real>(
    u: &DenseOperator<T>,
    starts: usize,
    iterations: u64,
    seed: u64,
) -> Result<EtaEstimate> {
    let u = u.cast::<f64>();
    let n = u
        .num_qubits()
        .ok_or_else(|| Error::Shape("unitary must be 2^n × 2^n".into()))?;
    if n > 3 {
        return Err(Error::InvalidArgument(format!("eta estimate supports n ≤ 3, got {n}")));
    }
    let res = u.unitarity_residual();
    if res > 1e-10 {
        return Err(Error::NotUnitary(res));
    }
    let d = 1 << n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inits: Vec<Vec<f64>> = Vec::with_capacity(starts);
    for i in 0..d {
        let mut e = vec![0.0; 2 * d];
        e[i] = 1.0;
        inits.push(e);
        let mut basis = vec![Cx::new(0.0, 0.0); d];
        basis[i] = Cx::new(1.0, 0.0);
        let h = hadamard_transform(&basis);
        inits.push(h.iter().map(|z| z.re).chain(h.iter().map(|z| z.im)).collect());
    }
    inits.truncate(starts);
    while inits.len() < starts {
        inits.push((0..2 * d).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect());
    }

    let mut best: Option<(f64, Vec<f64>)> = None;
    for x0 in inits {
        let scale = x0.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-3);
        let mut simplex = vec![x0.clone()];
        for j in 0..x0.len() {
            let mut v = x0.clone();
            v[j] += 0.25 * scale;
            simplex.push(v);
        }
        let solver = NelderMead::new(simplex)
            .with_sd_tolerance(1e-14)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let out = Executor::new(Ratio { u: &u }, solver)
            .configure(|s| s.max_iters(iterations))
            .run()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let state = out.state();
        let cand = state.get_best_param().cloned().unwrap_or(x0);
        let value = state.get_best_cost();
        if best.as_ref().map_or(true, |(b, _)| value < *b) {
            best = Some((value, cand));
        }
    }
    let (_, x) = best.ok_or(Error::Empty("start list"))?;
    let mut s = unpack(&x);
    let nrm = norm(&s);
    s.iter_mut().for_each(|z| *z /= nrm);
    Ok(EtaEstimate {
        // re-evaluated so the value is exactly what the certificate attains
        value: eta_ratio(&u, &s)?,
        state: s,
        starts,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cbe::gates::{hadamard, pauli_z, phase_t};

    #[test]
    fn direct_ratios() {
        let h = hadamard::<f64>();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let plus = [Cx::new(r, 0.0), Cx::new(r, 0.0)];
        let zero = [Cx::new(1.0, 0.0), Cx::new(0.0, 0.0)];
        assert!((eta_ratio(&h, &plus).unwrap() - r).abs() < 1e-15);
        assert!((eta_ratio(&h, &zero).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn known_values() {
        let z = eta_upper_bound_estimate(&pauli_z::<f64>(), 16, 200, 1).unwrap();
        assert!((z.value - 1.0).abs() < 1e-9);
        let id = eta_upper_bound_estimate(&DenseOperator::<f64>::identity(4), 16, 200, 1).unwrap();
        assert!((id.value - 1.0).abs() < 1e-12);
        let h = eta_upper_bound_estimate(&hadamard::<f64>(), 64, 500, 1).unwrap();
        assert!(h.value <= std::f64::consts::FRAC_1_SQRT_2 + 1e-3);
        assert!((eta_ratio(&hadamard(), &h.state).unwrap() - h.value).abs() < 1e-15);
        let t = eta_upper_bound_estimate(&phase_t::<f64>(), 16, 300, 2).unwrap();
        assert!(t.value <= 1.0 + 1e-12);
        assert!(eta_upper_bound_estimate(&DenseOperator::<f64>::identity(16), 4, 10, 0).is_err());
    }
}
