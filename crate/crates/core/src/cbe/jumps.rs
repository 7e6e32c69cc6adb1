use crate::cbe::pqc::ub_tensor;
use crate::error::{Error, Result};
use crate::linalg::DenseOperator;
use crate::pauli::{Letter, PauliPhase, PauliString};

/// Dense check is run up to this width; beyond it only the per-qubit
/// factors are checked (the conjugation factorises over qubit pairs).
const DENSE_CHECK_QUBITS: usize = 3;

fn pair_for(l: Letter) -> (Letter, Letter) {
    match l {
        Letter::I => (Letter::I, Letter::I),
        Letter::X => (Letter::I, Letter::X),
        Letter::Y => (Letter::Z, Letter::Y),
        Letter::Z => (Letter::Z, Letter::Z),
    }
}

/// Max-entry deviation of `U_B^{⊗n}(P0 ⊗ P1*)U_B^{†⊗n}` from `c·I⊗Q`.
fn conjugation_residual(p0: &PauliString, p1: &PauliString, c: f64, q: &PauliString) -> Result<f64> {
    let n = q.num_qubits();
    let w = ub_tensor::<f64>(n)?;
    let lhs = w.mm(&p0.to_dense::<f64>().kron(&p1.to_dense::<f64>().conj())).mm(&w.adjoint());
    let rhs = DenseOperator::identity(1 << n).kron(&q.to_dense::<f64>()).scale_real(c);
    Ok(lhs.max_abs_diff(&rhs))
}

/// Pauli pair `(P0, P1)` with `U_B^{⊗n}(P0 ⊗ P1*)U_B^{†⊗n} = −I ⊗ Q'`.
///
/// Per qubit `I→(I,I)`, `X→(I,X)`, `Y→(Z,Y)`, `Z→(Z,Z)`. Each `Y`
/// contributes a sign through `Y* = −Y`; that sign, the sign of `Q'` and
/// the overall minus are carried by `P0`, and `P1` is phase-free.
pub fn hamiltonian_jump_construction(q: &PauliString) -> Result<(PauliString, PauliString)> {
    let phase = q.phase();
    if !phase.is_real() {
        return Err(Error::InvalidArgument(format!("Q' = {q} must carry a real sign")));
    }
    let letters = q.letters();
    let (l0, l1): (Vec<Letter>, Vec<Letter>) = letters.iter().map(|&l| pair_for(l)).unzip();
    // −sign(Q')·(−1)^{#Y}
    let mut p0_phase = PauliPhase::MINUS_ONE.mul(phase);
    if q.count_y() % 2 == 1 {
        p0_phase = p0_phase.mul(PauliPhase::MINUS_ONE);
    }
    let p0 = PauliString::from_letters(p0_phase, &l0);
    let p1 = PauliString::from_letters(PauliPhase::ONE, &l1);

    let residual = if letters.len() <= DENSE_CHECK_QUBITS {
        conjugation_residual(&p0, &p1, -1.0, q)?
    } else {
        // unphased factors map to ±I⊗letter; the signs must combine with
        // the phase of P0 into −sign(Q')
        let mut worst = 0.0f64;
        let mut sign = p0_phase;
        for (k, &l) in letters.iter().enumerate() {
            let a = PauliString::from_letters(PauliPhase::ONE, &[l0[k]]);
            let b = PauliString::from_letters(PauliPhase::ONE, &[l1[k]]);
            let target = PauliString::from_letters(PauliPhase::ONE, &[l]);
            let plus = conjugation_residual(&a, &b, 1.0, &target)?;
            let minus = conjugation_residual(&a, &b, -1.0, &target)?;
            if minus < plus {
                sign = sign.mul(PauliPhase::MINUS_ONE);
            }
            worst = worst.max(plus.min(minus));
        }
        if sign != PauliPhase::MINUS_ONE.mul(phase) {
            worst = worst.max(2.0);
        }
        worst
    };
    if residual > 1e-10 {
        return Err(Error::Verification {
            what: format!("jump construction for {q}"),
            residual,
        });
    }
    Ok((p0, p1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(q: &str) -> (PauliString, PauliString) {
        let q: PauliString = q.parse().unwrap();
        let (p0, p1) = hamiltonian_jump_construction(&q).unwrap();
        assert_eq!(p1.phase(), PauliPhase::ONE);
        assert!(conjugation_residual(&p0, &p1, -1.0, &q).unwrap() < 1e-12);
        (p0, p1)
    }

    #[test]
    fn single_qubit_cases() {
        let (p0, p1) = check("+Z");
        assert_eq!(p0.to_string(), "-Z");
        assert_eq!(p1.to_string(), "+Z");
        let (p0, _) = check("+I");
        assert_eq!(p0.to_string(), "-I");
        check("-X");
        check("+Y");
        check("-Y");
    }

    #[test]
    fn all_two_qubit_words() {
        for a in "IXYZ".chars() {
            for b in "IXYZ".chars() {
                for s in ["+", "-"] {
                    check(&format!("{s}{a}{b}"));
                }
            }
        }
        assert!(hamiltonian_jump_construction(&"+iXZ".parse().unwrap()).is_err());
    }

    #[test]
    fn wide_words_use_factor_check() {
        let (p0, p1) = check("-YXZY");
        assert_eq!(p1.to_string(), "+YXZY");
        assert_eq!(p0.to_string(), "+ZIZZ");
        hamiltonian_jump_construction(&"+XYZIYYX".parse().unwrap()).unwrap();
    }
}
