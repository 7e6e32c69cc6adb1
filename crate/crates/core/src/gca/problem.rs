use serde::{Deserialize, Serialize};

use crate::cbe::{check_gates, hadamard_count, Gate};
use crate::error::{Error, Result};
use crate::pauli::{PauliPhase, PauliString};

/// One Hamiltonian term as written in a problem file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: f64,
    pub pauli: String,
}

/// Problem file layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GcaProblemJson {
    pub n: usize,
    pub beta: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub hamiltonian: Vec<TermJson>,
    #[serde(default)]
    pub u1: Vec<Gate>,
    #[serde(default)]
    pub u2: Vec<Gate>,
}

/// Estimation target `⟨ψ₁|e^{−β(H+I)}|ψ₂⟩` with `|ψ₁⟩ = U₁|+⟩^{⊗n}`,
/// `|ψ₂⟩ = U₂|0⟩^{⊗n}` and `H = Σ λ_i Q_i`, `Σ λ_i = 1`.
///
/// Input coefficients `c_i` are normalised to `λ_i = |c_i|/s` with
/// `s = Σ|c_i|`, the sign of `c_i` moves into `Q_i`, and `β` becomes `βs`.
/// The normalised target differs from the input one by `e^{−β(s−1)}`; see
/// [`GcaProblem::to_input_target`].
#[derive(Clone, Debug, PartialEq)]
pub struct GcaProblem {
    pub n: usize,
    pub terms: Vec<(f64, PauliString)>,
    /// `β` after normalisation.
    pub beta: f64,
    /// `β` as given.
    pub input_beta: f64,
    /// `s = Σ|c_i|`.
    pub scale: f64,
    pub u1: Vec<Gate>,
    pub u2: Vec<Gate>,
    pub epsilon: f64,
    pub delta: f64,
}

impl GcaProblem {
    pub fn new(
        n: usize,
        hamiltonian: Vec<(f64, PauliString)>,
        beta: f64,
        u1: Vec<Gate>,
        u2: Vec<Gate>,
        epsilon: f64,
        delta: f64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::InvalidArgument(format!("beta = {beta} must be finite and nonnegative")));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidArgument(format!("epsilon = {epsilon} must lie in (0, 1)")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidArgument(format!("delta = {delta} must lie in (0, 1)")));
        }
        check_gates(&u1, n)?;
        check_gates(&u2, n)?;
        let mut terms = Vec::with_capacity(hamiltonian.len());
        for (c, q) in hamiltonian {
            if q.num_qubits() != n {
                return Err(Error::QubitMismatch {
                    left: q.num_qubits(),
                    right: n,
                });
            }
            if !q.phase().is_real() {
                return Err(Error::InvalidArgument(format!("term {q} is not Hermitian")));
            }
            if !c.is_finite() {
                return Err(Error::InvalidArgument(format!("coefficient {c} is not finite")));
            }
            if c == 0.0 {
                continue;
            }
            let q = if c < 0.0 { q.negate() } else { q };
            terms.push((c.abs(), q));
        }
        let scale: f64 = terms.iter().map(|(c, _)| c).sum();
        if terms.is_empty() || scale == 0.0 {
            return Err(Error::Empty("Hamiltonian with no nonzero terms"));
        }
        for t in &mut terms {
            t.0 /= scale;
        }
        Ok(GcaProblem {
            n,
            terms,
            beta: beta * scale,
            input_beta: beta,
            scale,
            u1,
            u2,
            epsilon,
            delta,
        })
    }

    pub fn from_json(j: &GcaProblemJson) -> Result<Self> {
        let ham = j
            .hamiltonian
            .iter()
            .map(|t| Ok((t.coeff, t.pauli.parse::<PauliString>()?)))
            .collect::<Result<Vec<_>>>()?;
        GcaProblem::new(j.n, ham, j.beta, j.u1.clone(), j.u2.clone(), j.epsilon, j.delta)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: GcaProblemJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&j)
    }

    /// Normalised form written back out; `from_json(to_json())` is the same
    /// problem.
    pub fn to_json(&self) -> GcaProblemJson {
        GcaProblemJson {
            n: self.n,
            beta: self.beta,
            epsilon: self.epsilon,
            delta: self.delta,
            hamiltonian: self
                .terms
                .iter()
                .map(|(c, q)| TermJson {
                    coeff: *c,
                    pauli: q.to_string(),
                })
                .collect(),
            u1: self.u1.clone(),
            u2: self.u2.clone(),
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// `n_h = n_{h1} + n_{h2}`.
    pub fn num_hadamards(&self) -> usize {
        hadamard_count(&self.u1) + hadamard_count(&self.u2)
    }

    /// `D = D₁ + D₂`, each the ASAP layer count of the given gate list.
    pub fn depth(&self) -> usize {
        layer_count(&self.u1, self.n) + layer_count(&self.u2, self.n)
    }

    /// `2^{(n−n_h)/2}`.
    pub fn amplification_factor(&self) -> f64 {
        2f64.powf((self.n as f64 - self.num_hadamards() as f64) / 2.0)
    }

    /// Simulation budget `½·2^{(n−n_h)/2}ϵ`.
    pub fn simulation_epsilon(&self) -> f64 {
        0.5 * self.amplification_factor() * self.epsilon
    }

    /// Converts a value of the normalised target back to
    /// `⟨ψ₁|e^{−β(H+I)}|ψ₂⟩` for the input coefficients.
    pub fn to_input_target(&self, re: f64, im: f64) -> (f64, f64) {
        let f = (self.input_beta * (self.scale - 1.0)).exp();
        (re * f, im * f)
    }

    /// `Q'_i = H^{⊗n} Q_i H^{⊗n}`: `X↔Z` and `Y→−Y` per qubit.
    pub fn conjugated_terms(&self) -> Vec<(f64, PauliString)> {
        self.terms.iter().map(|(l, q)| (*l, hadamard_conjugate(q))).collect()
    }
}

fn layer_count(gates: &[Gate], n: usize) -> usize {
    let mut ready = vec![0usize; n];
    let mut depth = 0;
    for g in gates {
        let at = g.qubits.iter().map(|&q| ready[q]).max().unwrap_or(0) + 1;
        for &q in &g.qubits {
            ready[q] = at;
        }
        depth = depth.max(at);
    }
    depth
}

/// `H^{⊗n} P H^{⊗n}` for a phased Pauli string.
pub fn hadamard_conjugate(p: &PauliString) -> PauliString {
    use crate::pauli::Letter;
    let mut phase = p.phase();
    let letters: Vec<Letter> = p
        .letters()
        .into_iter()
        .map(|l| match l {
            Letter::X => Letter::Z,
            Letter::Z => Letter::X,
            other => other,
        })
        .collect();
    if p.count_y() % 2 == 1 {
        phase = phase.mul(PauliPhase::MINUS_ONE);
    }
    PauliString::from_letters(phase, &letters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cbe::{hadamard_all, Gate};

    #[test]
    fn normalisation_folds_signs() {
        let p = GcaProblem::new(
            2,
            vec![(-0.5, "XZ".parse().unwrap()), (1.5, "YY".parse().unwrap()), (0.0, "ZZ".parse().unwrap())],
            2.0,
            vec![],
            vec![],
            0.01,
            0.05,
        )
        .unwrap();
        assert_eq!(p.scale, 2.0);
        assert_eq!(p.beta, 4.0);
        assert_eq!(p.terms.len(), 2);
        assert_eq!(p.terms[0].0, 0.25);
        assert_eq!(p.terms[0].1, "-XZ".parse().unwrap());
        let back = GcaProblem::from_json(&p.to_json()).unwrap();
        assert_eq!(back.terms, p.terms);
        assert_eq!(back.beta, p.beta);
    }

    #[test]
    fn rejects_invalid() {
        let z: PauliString = "Z".parse().unwrap();
        assert!(GcaProblem::new(1, vec![(1.0, "+iZ".parse().unwrap())], 1.0, vec![], vec![], 0.1, 0.1).is_err());
        assert!(GcaProblem::new(1, vec![(0.0, z.clone())], 1.0, vec![], vec![], 0.1, 0.1).is_err());
        assert!(GcaProblem::new(1, vec![(1.0, z.clone())], -1.0, vec![], vec![], 0.1, 0.1).is_err());
        assert!(GcaProblem::new(1, vec![(1.0, z.clone())], 1.0, vec![Gate::h(1)], vec![], 0.1, 0.1).is_err());
        assert!(GcaProblem::new(2, vec![(1.0, z)], 1.0, vec![], vec![], 0.1, 0.1).is_err());
    }

    #[test]
    fn hadamard_conjugation_matches_dense() {
        let h = hadamard_all::<f64>(3).unwrap();
        for s in ["XYZ", "-YIY", "ZZX", "YII"] {
            let p: PauliString = s.parse().unwrap();
            let want = h.mm(&p.to_dense()).mm(&h);
            assert!(hadamard_conjugate(&p).to_dense::<f64>().max_abs_diff(&want) < 1e-12, "{s}");
        }
    }

    #[test]
    fn tallies() {
        let p = GcaProblem::new(
            3,
            vec![(1.0, "ZZI".parse().unwrap())],
            1.0,
            vec![Gate::h(0), Gate::h(1), Gate::cnot(0, 1)],
            vec![Gate::t(2), Gate::s(2), Gate::h(0)],
            0.01,
            0.05,
        )
        .unwrap();
        assert_eq!(p.num_hadamards(), 3);
        assert_eq!(p.depth(), 2 + 2);
        assert_eq!(p.amplification_factor(), 1.0);
        let json = serde_json::to_string(&p.to_json()).unwrap();
        assert!(json.contains(r#"{"g":"CNOT","q":[0,1]}"#));
    }
}
