//! Seeded random instances shared by sweeps, the command-line self-check
//! and the test suites.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::cbe::{Gate, GateName};
use crate::error::Result;
use crate::gca::GcaProblem;
use crate::linalg::expm;
use crate::pauli::{BlockDiagPauli, Letter, PauliPhase, PauliString};
use crate::scalar::cx;
use crate::{LindbladSpec, Operator};

/// `exp(iA)` for a Gaussian Hermitian `A` on `n` qubits.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Operator> {
    let d = 1 << n;
    let mut a = Operator::zeros(d);
    for i in 0..d {
        a[(i, i)] = cx(rng.sample::<f64, _>(StandardNormal), 0.0);
        for j in i + 1..d {
            let z = cx(rng.sample(StandardNormal), rng.sample(StandardNormal));
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
    }
    expm(&a.scale(cx(0.0, 1.0)))
}

/// Pauli string with uniformly random letters and phase.
pub fn random_phased_pauli<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PauliString {
    PauliString::random(n, rng).with_phase(PauliPhase::from_code(rng.gen_range(0..4)))
}

/// Hermitian Pauli string: random letters, sign `±1`.
pub fn random_hermitian_pauli<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PauliString {
    let code = if rng.gen::<bool>() { 0 } else { 2 };
    PauliString::random(n, rng).with_phase(PauliPhase::from_code(code))
}

/// `m` unitary dense jumps on `n` qubits with rates in `[0.1, 1)`.
pub fn random_dense_spec<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<LindbladSpec> {
    let jumps = (0..m)
        .map(|_| Ok((rng.gen_range(0.1..1.0), random_unitary(n, rng)?)))
        .collect::<Result<Vec<_>>>()?;
    LindbladSpec::dense(n, jumps)
}

/// `m` block-diagonal Pauli jumps with `2^index_qubits` blocks of
/// `n − index_qubits` qubits each.
pub fn random_pauli_spec<R: Rng + ?Sized>(n: usize, index_qubits: usize, m: usize, rng: &mut R) -> Result<LindbladSpec> {
    let width = n - index_qubits;
    let jumps = (0..m)
        .map(|_| {
            let blocks = (0..1usize << index_qubits).map(|_| random_phased_pauli(width, rng)).collect();
            Ok((rng.gen_range(0.1..1.0), BlockDiagPauli::new(blocks)?))
        })
        .collect::<Result<Vec<_>>>()?;
    LindbladSpec::pauli(jumps)
}

/// Up to `len` gates drawn uniformly from `{H, S, T, CNOT}`.
pub fn random_gates<R: Rng + ?Sized>(n: usize, len: usize, rng: &mut R) -> Vec<Gate> {
    let names: &[GateName] = if n >= 2 {
        &[GateName::H, GateName::S, GateName::T, GateName::Cnot]
    } else {
        &[GateName::H, GateName::S, GateName::T]
    };
    (0..len)
        .map(|_| {
            let name = *names.choose(rng).expect("nonempty");
            if name == GateName::Cnot {
                let c = rng.gen_range(0..n);
                let t = (c + rng.gen_range(1..n)) % n;
                Gate::cnot(c, t)
            } else {
                Gate::new(name, vec![rng.gen_range(0..n)])
            }
        })
        .collect()
}

/// GCA problem with `m` Hermitian terms (an all-identity draw is replaced
/// by `Z` on qubit 0 so the terms stay distinct from the shift), random
/// coefficients and circuits of at most `max_gates` gates in total, which
/// bounds `D = D₁ + D₂`.
pub fn random_gca_problem<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    beta: f64,
    max_gates: usize,
    epsilon: f64,
    delta: f64,
    rng: &mut R,
) -> Result<GcaProblem> {
    let terms = (0..m)
        .map(|_| {
            let mut q = random_hermitian_pauli(n, rng);
            if q.is_identity_letters() {
                q.set_letter(0, Letter::Z);
            }
            let c: f64 = rng.gen_range(0.1..1.0);
            (if rng.gen::<bool>() { c } else { -c }, q)
        })
        .collect();
    let total = rng.gen_range(0..=max_gates);
    let split = rng.gen_range(0..=total);
    let u1 = random_gates(n, split, rng);
    let u2 = random_gates(n, total - split, rng);
    GcaProblem::new(n, terms, beta, u1, u2, epsilon, delta)
}
